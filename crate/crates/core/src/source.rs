//! Probability models over byte symbols.
//!
//! The synthetic families model the residual sources the codec targets. Each
//! family has a single shape parameter whose entropy is monotone, so a target
//! entropy is reached by bisection on that parameter.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ALPHABET_SIZE: usize = 256;

/// Identifier of the sampling algorithm: ChaCha8 seeded with `seed_from_u64`,
/// one 64-bit draw per symbol reduced to a 53-bit uniform in `[0, 1)`, then
/// inverted through the cumulative distribution.
pub const SAMPLER_ID: &str = "chacha8-u53-cdf-v1";

const SUM_TOLERANCE: f64 = 1e-9;

/// Probability vector over the 256 byte symbols.
#[derive(Clone, PartialEq)]
pub struct SymbolDistribution {
    probs: [f64; ALPHABET_SIZE],
}

impl fmt::Debug for SymbolDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let support: Vec<(usize, f64)> = self
            .probs
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, p)| p > 0.0)
            .take(8)
            .collect();
        f.debug_struct("SymbolDistribution")
            .field("entropy", &self.entropy())
            .field("head", &support)
            .finish()
    }
}

impl SymbolDistribution {
    /// Validates a probability vector: 256 finite, non-negative entries
    /// summing to one.
    pub fn new(probs: &[f64]) -> Result<Self> {
        if probs.len() != ALPHABET_SIZE {
            return Err(Error::InvalidDistribution(format!(
                "expected {ALPHABET_SIZE} probabilities, got {}",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("probability of symbol {i} is {p}")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        let mut out = [0.0; ALPHABET_SIZE];
        out.copy_from_slice(probs);
        Ok(Self { probs: out })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        let normalized: Vec<f64> = weights.iter().map(|w| w / sum).collect();
        Self::new(&normalized)
    }

    pub fn uniform() -> Self {
        Self {
            probs: [1.0 / ALPHABET_SIZE as f64; ALPHABET_SIZE],
        }
    }

    pub fn point_mass(symbol: u8) -> Self {
        let mut probs = [0.0; ALPHABET_SIZE];
        probs[symbol as usize] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64; ALPHABET_SIZE] {
        &self.probs
    }

    pub fn prob(&self, symbol: u8) -> f64 {
        self.probs[symbol as usize]
    }

    /// Shannon entropy in bits per symbol.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }

    /// L1 distance between two distributions.
    pub fn l1_distance(&self, other: &SymbolDistribution) -> f64 {
        self.probs
            .iter()
            .zip(other.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Entropy of an arbitrary probability vector, with `0 log 0 = 0`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    h.max(0.0)
}

/// Synthetic source shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Two-sided Laplacian around zero, stored as two's complement bytes.
    LaplacianResidual,
    /// Poisson counts folded modulo 256.
    Poisson,
    /// One-sided geometric decay from zero.
    ExponentialResidual,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::LaplacianResidual, Family::Poisson, Family::ExponentialResidual];

    pub fn name(self) -> &'static str {
        match self {
            Family::LaplacianResidual => "laplacian",
            Family::Poisson => "poisson",
            Family::ExponentialResidual => "exponential",
        }
    }

    /// Search bracket of the shape parameter.
    fn bracket(self) -> (f64, f64) {
        match self {
            Family::LaplacianResidual | Family::ExponentialResidual => (1e-4, 1e9),
            Family::Poisson => (1e-9, 5000.0),
        }
    }

    /// Unnormalized-then-normalized probabilities for a shape parameter.
    fn probabilities(self, param: f64) -> [f64; ALPHABET_SIZE] {
        let mut w = [0.0; ALPHABET_SIZE];
        match self {
            Family::LaplacianResidual => {
                for (x, slot) in w.iter_mut().enumerate() {
                    let signed = (x as u8 as i8) as f64;
                    *slot = (-signed.abs() / param).exp();
                }
            }
            Family::ExponentialResidual => {
                for (x, slot) in w.iter_mut().enumerate() {
                    *slot = (-(x as f64) / param).exp();
                }
            }
            Family::Poisson => folded_poisson(param, &mut w),
        }
        let sum: f64 = w.iter().sum();
        for p in &mut w {
            *p /= sum;
        }
        w
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "laplacian" | "laplacian-residual" => Ok(Family::LaplacianResidual),
            "poisson" => Ok(Family::Poisson),
            "exponential" | "exponential-residual" => Ok(Family::ExponentialResidual),
            other => Err(Error::InvalidParameters(format!(
                "unknown distribution family `{other}`"
            ))),
        }
    }
}

/// Poisson(λ) mass folded onto `y mod 256`. For λ below ~150 the fold is
/// numerically identical to truncation; past that it keeps widening the
/// distribution instead of piling mass on the last symbol.
fn folded_poisson(lambda: f64, w: &mut [f64; ALPHABET_SIZE]) {
    let ln_lambda = lambda.ln();
    let mode = lambda.floor();
    let ln_mode = mode * ln_lambda - lambda - libm::lgamma(mode + 1.0);
    let spread = 40.0 * lambda.sqrt() + 40.0;
    let lo = (mode - spread).max(0.0) as u64;
    let hi = (mode + spread) as u64;
    let mode = mode as u64;

    // walk outwards from the mode with the pmf ratio recurrence
    let mut ln_p = ln_mode;
    for y in mode..=hi {
        w[(y % 256) as usize] += ln_p.exp();
        ln_p += ln_lambda - ((y + 1) as f64).ln();
    }
    let mut ln_p = ln_mode;
    let mut y = mode;
    while y > lo {
        ln_p -= ln_lambda - (y as f64).ln();
        y -= 1;
        w[(y % 256) as usize] += ln_p.exp();
    }
}

/// A family together with a target entropy, expressed as a fraction of 8 bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticFamily {
    pub family: Family,
    pub target_entropy_fraction: f64,
}

impl SyntheticFamily {
    pub fn new(family: Family, target_entropy_fraction: f64) -> Self {
        Self {
            family,
            target_entropy_fraction,
        }
    }

    pub fn target_bits(&self) -> f64 {
        8.0 * self.target_entropy_fraction
    }

    /// Short identifier used to tag dictionaries trained on this source.
    pub fn id(&self) -> String {
        format!("{}@{:.4}", self.family.name(), self.target_entropy_fraction)
    }
}

/// Builds the member of `spec.family` whose entropy matches the target.
pub fn make_distribution(source: SyntheticFamily) -> Result<SymbolDistribution> {
    let fraction = source.target_entropy_fraction;
    let (mut lo, mut hi) = source.family.bracket();
    let h_lo = entropy_of(&source.family.probabilities(lo));
    let h_hi = entropy_of(&source.family.probabilities(hi));
    let target = source.target_bits();
    if !(fraction > 0.0 && fraction < 1.0) || target <= h_lo || target >= h_hi {
        return Err(Error::UnreachableEntropy {
            family: source.family.name(),
            target,
            min: h_lo,
            max: h_hi,
        });
    }
    for _ in 0..200 {
        // geometric midpoint: the brackets span many orders of magnitude
        let mid = (lo * hi).sqrt();
        if entropy_of(&source.family.probabilities(mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-14 {
            break;
        }
    }
    Ok(SymbolDistribution {
        probs: source.family.probabilities((lo * hi).sqrt()),
    })
}

/// Draws `n` i.i.d. symbols. Deterministic for a fixed `(dist, n, seed)`.
pub fn sample(dist: &SymbolDistribution, n: usize, seed: u64) -> Vec<u8> {
    let mut cdf = [0.0f64; ALPHABET_SIZE];
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (i, &p) in dist.probs.iter().enumerate() {
        acc += p;
        cdf[i] = acc;
        if p > 0.0 {
            last_nonzero = i;
        }
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64) * total;
            let idx = cdf.partition_point(|&c| c <= u);
            idx.min(last_nonzero) as u8
        })
        .collect()
}

/// Normalized byte frequencies of a non-empty message.
pub fn empirical_histogram(message: &[u8]) -> Result<SymbolDistribution> {
    if message.is_empty() {
        return Err(Error::EmptyMessage);
    }
    let counts = byte_counts(message);
    let n = message.len() as f64;
    let mut probs = [0.0; ALPHABET_SIZE];
    for (p, &c) in probs.iter_mut().zip(counts.iter()) {
        *p = c as f64 / n;
    }
    Ok(SymbolDistribution { probs })
}

pub(crate) fn byte_counts(message: &[u8]) -> [u64; ALPHABET_SIZE] {
    let mut counts = [0u64; ALPHABET_SIZE];
    for &b in message {
        counts[b as usize] += 1;
    }
    counts
}
