//! Indexed binary min-heap over `f64` keys.
//!
//! Items are identified by ids in `0..capacity`. Keys can move in either
//! direction via [`IndexedMinQueue::update_key`]. Ties are broken by the
//! lower id, so identical operation streams always pop identically.

use alloc::vec;
use alloc::vec::Vec;

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum QueueError {
    #[error("id {0} is already queued")]
    Duplicate(usize),
    #[error("id {0} is not queued")]
    NotMember(usize),
    #[error("id {id} out of range (capacity {capacity})")]
    OutOfRange { id: usize, capacity: usize },
    #[error("queue is empty")]
    Empty,
    #[error("key is NaN")]
    NanKey,
}

#[derive(Debug, Clone)]
pub struct IndexedMinQueue {
    heap: Vec<(f64, usize)>,
    position: Vec<usize>,
    sifts: u64,
}

#[inline]
fn less(a: (f64, usize), b: (f64, usize)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

impl IndexedMinQueue {
    pub fn new(capacity: usize) -> Self {
        Self {
            heap: Vec::with_capacity(capacity),
            position: vec![ABSENT; capacity],
            sifts: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.position.len()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        id < self.position.len() && self.position[id] != ABSENT
    }

    pub fn key(&self, id: usize) -> Option<f64> {
        self.contains(id).then(|| self.heap[self.position[id]].0)
    }

    /// Swaps performed by sift operations so far.
    pub fn sift_count(&self) -> u64 {
        self.sifts
    }

    pub fn clear(&mut self) {
        for &(_, id) in &self.heap {
            self.position[id] = ABSENT;
        }
        self.heap.clear();
    }

    pub fn insert(&mut self, id: usize, key: f64) -> Result<(), QueueError> {
        if id >= self.position.len() {
            return Err(QueueError::OutOfRange {
                id,
                capacity: self.position.len(),
            });
        }
        if key.is_nan() {
            return Err(QueueError::NanKey);
        }
        if self.position[id] != ABSENT {
            return Err(QueueError::Duplicate(id));
        }
        let slot = self.heap.len();
        self.heap.push((key, id));
        self.position[id] = slot;
        self.sift_up(slot);
        Ok(())
    }

    pub fn peek_min(&self) -> Result<(usize, f64), QueueError> {
        self.heap.first().map(|&(k, id)| (id, k)).ok_or(QueueError::Empty)
    }

    pub fn pop_min(&mut self) -> Result<(usize, f64), QueueError> {
        let (id, key) = self.peek_min()?;
        self.remove_slot(0);
        Ok((id, key))
    }

    pub fn remove(&mut self, id: usize) -> Result<f64, QueueError> {
        if !self.contains(id) {
            return Err(QueueError::NotMember(id));
        }
        let slot = self.position[id];
        let key = self.heap[slot].0;
        self.remove_slot(slot);
        Ok(key)
    }

    pub fn update_key(&mut self, id: usize, key: f64) -> Result<(), QueueError> {
        if key.is_nan() {
            return Err(QueueError::NanKey);
        }
        if !self.contains(id) {
            return Err(QueueError::NotMember(id));
        }
        let slot = self.position[id];
        let old = self.heap[slot].0;
        self.heap[slot].0 = key;
        if key < old {
            self.sift_up(slot);
        } else if key > old {
            self.sift_down(slot);
        }
        Ok(())
    }

    fn remove_slot(&mut self, slot: usize) {
        let (_, id) = self.heap[slot];
        self.position[id] = ABSENT;
        let last = self.heap.pop().expect("slot is occupied");
        if slot < self.heap.len() {
            self.heap[slot] = last;
            self.position[last.1] = slot;
            if slot > 0 && less(last, self.heap[(slot - 1) / 2]) {
                self.sift_up(slot);
            } else {
                self.sift_down(slot);
            }
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.position[self.heap[a].1] = a;
        self.position[self.heap[b].1] = b;
        self.sifts += 1;
    }

    fn sift_up(&mut self, mut slot: usize) {
        while slot > 0 {
            let parent = (slot - 1) / 2;
            if !less(self.heap[slot], self.heap[parent]) {
                break;
            }
            self.swap(slot, parent);
            slot = parent;
        }
    }

    fn sift_down(&mut self, mut slot: usize) {
        let len = self.heap.len();
        loop {
            let left = 2 * slot + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && less(self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !less(self.heap[child], self.heap[slot]) {
                break;
            }
            self.swap(slot, child);
            slot = child;
        }
    }

    #[cfg(test)]
    fn check_heap(&self) {
        for s in 1..self.heap.len() {
            assert!(!less(self.heap[s], self.heap[(s - 1) / 2]));
        }
        for (s, &(_, id)) in self.heap.iter().enumerate() {
            assert_eq!(self.position[id], s);
        }
        let members = self.position.iter().filter(|&&p| p != ABSENT).count();
        assert_eq!(members, self.heap.len());
    }
}
