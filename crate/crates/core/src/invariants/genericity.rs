use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::Rational;
use crate::sb::Budget;

/// Source of every "generic" choice: random integers in [-B, B].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenericityConfig {
    pub seed: u64,
    pub coefficient_bound: i64,
    /// Independent draws per generic value (at least 2).
    pub draws: usize,
    /// Extra draws allowed when the minimum is not yet attained twice.
    pub retry_limit: usize,
    pub budget: Budget,
}

impl Default for GenericityConfig {
    fn default() -> Self {
        GenericityConfig {
            seed: 0,
            coefficient_bound: 100,
            draws: 2,
            retry_limit: 4,
            budget: Budget::default(),
        }
    }
}

impl GenericityConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenericityConfig { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.draws < 2 {
            return Err(Error::InvalidInput("at least 2 draws are required".into()));
        }
        if self.coefficient_bound < 10 {
            return Err(Error::InvalidInput("coefficient bound must be at least 10".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityResult {
    pub value: u64,
    pub draws_agreeing: usize,
    pub seed_used: u64,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Private stream for draw `draw` of the operation `tag`.
pub(crate) fn stream(seed: u64, tag: &str, draw: usize) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(splitmix(splitmix(seed) ^ h ^ splitmix(draw as u64 + 1)))
}

pub(crate) fn rand_coeff(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    Rational::from_integer(rng.gen_range(-bound..=bound).into())
}

/// Evaluate `draw` on independent streams and accept the minimum once two
/// draws attain it. `None` marks a degenerate draw (e.g. infinite colength).
pub(crate) fn stable_min(
    cfg: &GenericityConfig,
    tag: &str,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Result<Option<u64>>,
) -> Result<MultiplicityResult> {
    cfg.validate()?;
    let mut values: Vec<u64> = Vec::new();
    let mut degenerate = 0usize;
    for k in 0..cfg.draws + cfg.retry_limit {
        let mut rng = stream(cfg.seed, tag, k);
        match draw(&mut rng)? {
            Some(v) => values.push(v),
            None => degenerate += 1,
        }
        if k + 1 < cfg.draws {
            continue;
        }
        if let Some(&min) = values.iter().min() {
            let agreeing = values.iter().filter(|&&v| v == min).count();
            if agreeing >= 2 {
                return Ok(MultiplicityResult { value: min, draws_agreeing: agreeing, seed_used: cfg.seed });
            }
        }
    }
    if values.is_empty() {
        Err(Error::NotFiniteColength(format!("{tag}: all {degenerate} draws have infinite colength")))
    } else {
        Err(Error::GenericityUnstable(format!("{tag}: values {values:?}")))
    }
}
