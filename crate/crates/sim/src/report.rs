//! BLER tables as CSV.

use std::io::{Read, Write};

use dynsched_core::SchedulerKind;
use serde::{Deserialize, Serialize};

use crate::stats::wilson95;

pub const CSV_HEADER: &str =
    "scheduler,es_n0_db,trials,block_errors,bit_errors,bler,ber,ci_lo,ci_hi,mean_iters,mean_updates";

/// One (scheduler, SNR) row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub scheduler: SchedulerKind,
    pub es_n0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub bler: f64,
    pub ber: f64,
    /// 95% Wilson interval on the BLER.
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub mean_iters: f64,
    /// Mean individual check updates per decode.
    pub mean_updates: f64,
}

/// Integer totals for one point, merged across workers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub iterations: u64,
    pub updates: u64,
}

impl Tally {
    pub fn merge(&mut self, other: &Tally) {
        self.trials += other.trials;
        self.block_errors += other.block_errors;
        self.bit_errors += other.bit_errors;
        self.iterations += other.iterations;
        self.updates += other.updates;
    }

    /// `bits_per_block` is the number of information bits scored per trial.
    pub fn point(&self, scheduler: SchedulerKind, es_n0_db: f64, bits_per_block: usize) -> BlerPoint {
        let n = self.trials.max(1) as f64;
        let (ci_lo, ci_hi) = wilson95(self.block_errors, self.trials);
        BlerPoint {
            scheduler,
            es_n0_db,
            trials: self.trials,
            block_errors: self.block_errors,
            bit_errors: self.bit_errors,
            bler: self.block_errors as f64 / n,
            ber: self.bit_errors as f64 / (n * bits_per_block.max(1) as f64),
            ci_lo,
            ci_hi,
            mean_iters: self.iterations as f64 / n,
            mean_updates: self.updates as f64 / n,
        }
    }
}

pub fn write_csv<W: Write>(points: &[BlerPoint], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(points: &[BlerPoint]) -> String {
    let mut buf = Vec::new();
    write_csv(points, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn read_csv<R: Read>(input: R) -> csv::Result<Vec<BlerPoint>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(to_csv_string(&[]), format!("{CSV_HEADER}\n"));
        assert!(read_csv(to_csv_string(&[]).as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn round_trip() {
        let t = Tally {
            trials: 3000,
            block_errors: 17,
            bit_errors: 301,
            iterations: 4412,
            updates: 4412 * 35,
        };
        let points = vec![
            t.point(SchedulerKind::DynPebp, -1.8, 352),
            Tally::default().point(SchedulerKind::RbpDecay, 0.25, 0),
        ];
        let text = to_csv_string(&points);
        assert_eq!(read_csv(text.as_bytes()).unwrap(), points);
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.contains("\ndyn-pebp,-1.8,3000,17,301,"));
    }
}
