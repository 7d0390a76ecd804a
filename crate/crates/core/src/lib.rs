//! Quasi-cyclic LDPC belief propagation with error-probability-driven
//! dynamic layered scheduling.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! threads or the command line lives in the companion `dynsched` crate.
//!
//! Layout:
//!
//! * [`graph`]: Tanner graphs, QC base graphs, lifting and layer maps.
//! * [`code`]: code configurations (puncturing, shortening, truncation) and
//!   the built-in 5G NR base graph 1.
//! * [`channel`]: BPSK/AWGN channel LLR generation with a portable RNG.
//! * [`bp`]: edge message storage and the sum-product kernels.
//! * [`reliability`]: variable/check error probabilities and scheduling keys.
//! * [`queue`]: an indexed binary min-heap with arbitrary key updates.
//! * [`schedule`]: the decoders (flooding, layered, static, Dyn-EBP,
//!   Dyn-PEBP, residual-decay RBP).
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod bg1_table;

pub mod bp;
pub mod channel;
pub mod code;
pub mod graph;
pub mod queue;
pub mod reliability;
pub mod schedule;

pub use bp::{MessageState, CLAMP};
pub use channel::{ChannelConfig, Codeword};
pub use code::{CodeSpec, LdpcCode, VarRole};
pub use graph::{BaseGraph, GraphError, LayerMap, TannerGraph};
pub use queue::{IndexedMinQueue, QueueError};
pub use schedule::{decode, decode_observed, DecodeConfig, DecodeError, DecodeOutcome, Granularity, SchedulerKind};
