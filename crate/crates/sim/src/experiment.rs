//! Monte Carlo BLER/BER estimation.
//!
//! Trial `t` at SNR index `s` draws its channel from
//! [`trial_rng`]`(seed, s, t)` whatever the scheduler, so every scheduler
//! sees the same LLRs at matched trials. Trials run in fixed batches of
//! [`BATCH`]; the stop-at-errors rule is only evaluated between batches,
//! which keeps the number of trials run (and every output byte) independent
//! of the worker count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};

use dynsched_core::channel::{sample_llrs_with, trial_rng, Codeword};
use dynsched_core::schedule::TraceEvent;
use dynsched_core::{decode, DecodeConfig, DecodeError, LdpcCode, SchedulerKind, VarRole};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::report::{BlerPoint, Tally};
use crate::trace::write_trace;

pub const BATCH: u64 = 256;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid experiment: {0}")]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("trace output: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    /// Scheduler-major, then SNR in configuration order.
    pub points: Vec<BlerPoint>,
    /// Block-error flag of every trial run, keyed by (scheduler, SNR index).
    pub failures: BTreeMap<(SchedulerKind, usize), Vec<bool>>,
}

impl ExperimentResult {
    pub fn point(&self, scheduler: SchedulerKind, snr_index: usize) -> Option<&BlerPoint> {
        self.points.iter().filter(|p| p.scheduler == scheduler).nth(snr_index)
    }

    pub fn failures(&self, scheduler: SchedulerKind, snr_index: usize) -> &[bool] {
        self.failures.get(&(scheduler, snr_index)).map_or(&[], Vec::as_slice)
    }
}

struct TrialOutcome {
    block_error: bool,
    tally: Tally,
    trace: Vec<TraceEvent>,
}

/// Positions scored for BER: information variables that are not shortened.
pub fn scored_bits(code: &LdpcCode) -> Vec<usize> {
    (0..code.info_vars())
        .filter(|&j| code.roles()[j] != VarRole::Shortened)
        .collect()
}

/// LLRs of trial `trial` at SNR index `snr_index`.
pub fn trial_llrs(code: &LdpcCode, seed: u64, snr_index: usize, es_n0_db: f64, trial: u64) -> Vec<f64> {
    sample_llrs_with(
        code.roles(),
        es_n0_db,
        &Codeword::AllZero,
        trial_rng(seed, snr_index as u32, trial as u32),
    )
}

#[allow(clippy::too_many_arguments)]
fn run_trial(
    code: &LdpcCode,
    kind: SchedulerKind,
    cfg: &DecodeConfig,
    scored: &[usize],
    seed: u64,
    snr_index: usize,
    es_n0_db: f64,
    trial: u64,
    record: bool,
) -> Result<TrialOutcome, DecodeError> {
    let llr = trial_llrs(code, seed, snr_index, es_n0_db, trial);
    let cfg = DecodeConfig { record, ..cfg.clone() };
    let out = decode(kind, code, &llr, &cfg)?;
    // The all-zero codeword is sent, so every set bit is an error.
    let bit_errors = scored.iter().filter(|&&j| out.hard_decision[j] != 0).count() as u64;
    let block_error = bit_errors > 0 || !out.success;
    Ok(TrialOutcome {
        block_error,
        tally: Tally {
            trials: 1,
            block_errors: block_error as u64,
            bit_errors,
            iterations: out.iterations as u64,
            updates: out.check_updates,
        },
        trace: out.trace,
    })
}

/// Runs every (scheduler, SNR) point of `cfg` on `code`. Writes the trace
/// file if `cfg.trace` is set; the CSV is left to the caller.
pub fn run_experiment(code: &LdpcCode, cfg: &ExperimentConfig) -> Result<ExperimentResult, ExperimentError> {
    cfg.validate()?;
    let dcfg = cfg.decode_config();
    let scored = scored_bits(code);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let mut trace_out = match &cfg.trace {
        Some(path) => Some(BufWriter::new(File::create(path)?)),
        None => None,
    };

    let mut points = Vec::new();
    let mut failures = BTreeMap::new();
    for &kind in &cfg.schedulers {
        for (s, &db) in cfg.snr_db.iter().enumerate() {
            let mut tally = Tally::default();
            let mut flags = Vec::new();
            let mut start = 0;
            while start < cfg.trials {
                let end = (start + BATCH).min(cfg.trials);
                let outcomes: Vec<TrialOutcome> = pool.install(|| {
                    (start..end)
                        .into_par_iter()
                        .map(|t| {
                            let record = trace_out.is_some() && t < cfg.trace_trials;
                            run_trial(code, kind, &dcfg, &scored, cfg.seed, s, db, t, record)
                        })
                        .collect::<Result<_, _>>()
                })?;
                for (t, o) in (start..).zip(&outcomes) {
                    tally.merge(&o.tally);
                    flags.push(o.block_error);
                    if let Some(w) = trace_out.as_mut() {
                        write_trace(w, kind, Some(db), t, &o.trace)?;
                    }
                }
                start = end;
                if cfg.stop_at_errors > 0 && tally.block_errors >= cfg.stop_at_errors {
                    break;
                }
            }
            points.push(tally.point(kind, db, scored.len()));
            failures.insert((kind, s), flags);
        }
    }
    if let Some(mut w) = trace_out {
        w.flush()?;
    }
    Ok(ExperimentResult { points, failures })
}
