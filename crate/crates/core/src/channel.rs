//! BPSK over AWGN, producing per-variable channel LLRs.
//!
//! Conventions, frozen so that golden vectors stay valid:
//!
//! * Symbols are `1 - 2x` with unit energy, so `σ² = 1 / (2·10^(Es/N0 / 10))`.
//! * The generator is ChaCha8 (`rand_chacha`). A decode trial uses the
//!   stream `(snr_index << 32) | trial` of the generator seeded with
//!   `seed_from_u64(master_seed)`; see [`trial_rng`].
//! * Gaussian samples come from the Box–Muller transform on two 53-bit
//!   uniforms, both outputs used in order, with `libm` for the
//!   transcendental functions.
//! * Noise is drawn only for transmitted variables, in index order.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::bp::CLAMP;
use crate::code::{LdpcCode, VarRole};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("prior ratio must be positive, got {0}")]
    BadPrior(f64),
    #[error("Es/N0 must not be NaN or -inf")]
    BadSnr,
    #[error("codeword has length {got}, code has {expected} variables")]
    CodewordLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Codeword {
    AllZero,
    Bits(Vec<u8>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    /// `f64::INFINITY` selects the noiseless channel.
    pub es_n0_db: f64,
    pub seed: u64,
    pub codeword: Codeword,
    /// `P(x=0) / P(x=1)`.
    pub prior_ratio: f64,
}

impl ChannelConfig {
    pub fn new(es_n0_db: f64, seed: u64) -> Self {
        Self {
            es_n0_db,
            seed,
            codeword: Codeword::AllZero,
            prior_ratio: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.prior_ratio > 0.0 && self.prior_ratio.is_finite()) {
            return Err(ChannelError::BadPrior(self.prior_ratio));
        }
        if self.es_n0_db.is_nan() || self.es_n0_db == f64::NEG_INFINITY {
            return Err(ChannelError::BadSnr);
        }
        Ok(())
    }

    pub fn noise_variance(&self) -> f64 {
        noise_variance(self.es_n0_db)
    }
}

pub fn noise_variance(es_n0_db: f64) -> f64 {
    1.0 / (2.0 * libm::pow(10.0, es_n0_db / 10.0))
}

/// Generator for trial `trial` at SNR point `snr_index`.
pub fn trial_rng(master_seed: u64, snr_index: u32, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((snr_index as u64) << 32) | trial as u64);
    rng
}

/// Standard normal samples by Box–Muller.
pub struct Gaussian<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: RngCore> Gaussian<R> {
    pub fn new(rng: R) -> Self {
        Self { rng, spare: None }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * SCALE;
        let u2 = (self.rng.next_u64() >> 11) as f64 * SCALE;
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }
}

/// LLRs for one trial: `2y/σ²` on transmitted variables, 0 on punctured and
/// truncated ones, `+CLAMP` on shortened ones. Values are clamped to
/// `±CLAMP`.
pub fn sample_llrs_with<R: RngCore>(roles: &[VarRole], es_n0_db: f64, codeword: &Codeword, rng: R) -> Vec<f64> {
    let sigma2 = noise_variance(es_n0_db);
    let sigma = libm::sqrt(sigma2);
    let mut noise = Gaussian::new(rng);
    let mut llrs = vec![0.0; roles.len()];
    for (j, (&role, llr)) in roles.iter().zip(llrs.iter_mut()).enumerate() {
        let bit = match codeword {
            Codeword::AllZero => 0,
            Codeword::Bits(bits) => bits[j],
        };
        let symbol = 1.0 - 2.0 * bit as f64;
        *llr = match role {
            VarRole::Punctured | VarRole::Truncated => 0.0,
            VarRole::Shortened => CLAMP,
            VarRole::Transmitted if sigma2 == 0.0 => symbol * CLAMP,
            VarRole::Transmitted => {
                let y = symbol + sigma * noise.sample();
                (2.0 * y / sigma2).clamp(-CLAMP, CLAMP)
            }
        };
    }
    llrs
}

/// LLRs for `cfg`, drawing from `ChaCha8Rng::seed_from_u64(cfg.seed)`.
pub fn sample_llrs(code: &LdpcCode, cfg: &ChannelConfig) -> Result<Vec<f64>, ChannelError> {
    cfg.validate()?;
    if let Codeword::Bits(bits) = &cfg.codeword {
        if bits.len() != code.roles().len() {
            return Err(ChannelError::CodewordLength {
                expected: code.roles().len(),
                got: bits.len(),
            });
        }
    }
    Ok(sample_llrs_with(
        code.roles(),
        cfg.es_n0_db,
        &cfg.codeword,
        ChaCha8Rng::seed_from_u64(cfg.seed),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeSpec;
    use crate::graph::TannerGraph;

    fn small_code() -> LdpcCode {
        LdpcCode::from_spec(&CodeSpec {
            shortened: 3,
            truncated: 2,
            ..CodeSpec::bg1(4, 4)
        })
        .unwrap()
    }

    #[test]
    fn roles_map_to_fixed_llrs() {
        let code = small_code();
        let llrs = sample_llrs(&code, &ChannelConfig::new(2.0, 7)).unwrap();
        for (r, c) in code.roles().iter().zip(&llrs) {
            match r {
                VarRole::Punctured | VarRole::Truncated => assert_eq!(*c, 0.0),
                VarRole::Shortened => assert_eq!(*c, CLAMP),
                VarRole::Transmitted => assert!(c.abs() <= CLAMP && *c != 0.0),
            }
        }
    }

    #[test]
    fn noiseless_is_all_positive() {
        let code = small_code();
        let llrs = sample_llrs(&code, &ChannelConfig::new(f64::INFINITY, 1)).unwrap();
        assert!(code
            .roles()
            .iter()
            .zip(&llrs)
            .filter(|(r, _)| **r == VarRole::Transmitted)
            .all(|(_, &c)| c == CLAMP));
    }

    #[test]
    fn golden_vector() {
        let g = TannerGraph::from_check_lists(8, &[[0usize, 1, 2, 3]]).unwrap();
        let code = LdpcCode::from_graph(g);
        let llrs = sample_llrs(&code, &ChannelConfig::new(2.0, 0x5EED)).unwrap();
        let bits: Vec<u64> = llrs.iter().map(|x| x.to_bits()).collect();
        assert_eq!(bits, GOLDEN);
    }

    // Generated once with the conventions in the module docs.
    const GOLDEN: [u64; 8] = [
        4621366097869813385,
        4616366464394849920,
        4621826343376925233,
        4621451432211437346,
        4617082644629130682,
        4618517611115838020,
        4618468996433475795,
        4618385232641759678,
    ];

    #[test]
    fn mean_llr_matches_theory() {
        let n = 100_000;
        let roles = vec![VarRole::Transmitted; n];
        let es_n0_db = 1.0;
        let llrs = sample_llrs_with(&roles, es_n0_db, &Codeword::AllZero, trial_rng(3, 0, 0));
        let s2 = noise_variance(es_n0_db);
        let mean = llrs.iter().sum::<f64>() / n as f64;
        let se = 2.0 / libm::sqrt(s2) / libm::sqrt(n as f64);
        assert!((mean - 2.0 / s2).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn trial_streams_differ() {
        let mut a = trial_rng(1, 0, 0);
        let mut b = trial_rng(1, 0, 1);
        let mut c = trial_rng(1, 1, 0);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert!(x != y && x != z && y != z);
        assert_eq!(trial_rng(1, 0, 0).next_u64(), x);
    }

    #[test]
    fn rejects_bad_config() {
        let code = small_code();
        let mut cfg = ChannelConfig::new(1.0, 0);
        cfg.prior_ratio = 0.0;
        assert!(sample_llrs(&code, &cfg).is_err());
        let mut cfg = ChannelConfig::new(1.0, 0);
        cfg.codeword = Codeword::Bits(vec![0; 3]);
        assert!(sample_llrs(&code, &cfg).is_err());
    }

    #[test]
    fn explicit_codeword_sets_signs() {
        let g = TannerGraph::from_check_lists(2, &[[0usize, 1]]).unwrap();
        let code = LdpcCode::from_graph(g);
        let mut cfg = ChannelConfig::new(f64::INFINITY, 0);
        cfg.codeword = Codeword::Bits(vec![1, 1]);
        assert_eq!(sample_llrs(&code, &cfg).unwrap(), vec![-CLAMP, -CLAMP]);
    }
}
