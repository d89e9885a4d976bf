//! Choosing the shift and exclusion threshold for a source.

use rayon::prelude::*;

use super::{CodeParams, MarlinDictionary};
use crate::alphabet::{split_alphabet, MAX_SHIFT};
use crate::error::{Error, Result};
use crate::source::SymbolDistribution;

/// Exclusion thresholds tried by default: none, then `2^-6 .. 2^-16`.
pub const THRESHOLD_GRID: [f64; 12] = [
    0.0,
    1.0 / 64.0,
    1.0 / 128.0,
    1.0 / 256.0,
    1.0 / 512.0,
    1.0 / 1024.0,
    1.0 / 2048.0,
    1.0 / 4096.0,
    1.0 / 8192.0,
    1.0 / 16384.0,
    1.0 / 32768.0,
    1.0 / 65536.0,
];

/// Candidate shifts and thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    pub shifts: Vec<u8>,
    pub thresholds: Vec<f64>,
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self {
            shifts: (0..=MAX_SHIFT).collect(),
            thresholds: THRESHOLD_GRID.to_vec(),
        }
    }
}

/// Best achievable efficiency when the reminder bits are stored verbatim and
/// the quotient stream is coded at its entropy: `H(X) / (H(Q) + S)`.
///
/// A source with zero entropy has nothing to gain from any shift: the bound
/// is 1 at `S = 0` and 0 otherwise.
pub fn shift_efficiency_bound(dist: &SymbolDistribution, shift: u8) -> f64 {
    let h = dist.entropy();
    let mut q = vec![0.0; 1usize << (8 - shift.min(MAX_SHIFT))];
    for (x, &p) in dist.probs().iter().enumerate() {
        q[x >> shift.min(MAX_SHIFT)] += p;
    }
    let denom = crate::source::entropy_of(&q) + shift as f64;
    if denom <= 0.0 {
        return if h <= 0.0 { 1.0 } else { 0.0 };
    }
    h / denom
}

/// The dictionary with the lowest estimated bits per symbol over the default
/// search space. Ties go to the smaller shift, then the smaller threshold.
pub fn best_dictionary_for(
    dist: &SymbolDistribution,
    params: CodeParams,
    block_n: usize,
    source_id: &str,
) -> Result<MarlinDictionary> {
    search_dictionary(dist, params, block_n, source_id, &SearchSpace::default())
}

pub fn search_dictionary(
    dist: &SymbolDistribution,
    params: CodeParams,
    block_n: usize,
    source_id: &str,
    space: &SearchSpace,
) -> Result<MarlinDictionary> {
    let mut shifts = space.shifts.clone();
    shifts.sort_unstable();
    shifts.dedup();
    let mut thresholds = space.thresholds.clone();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    // identical alphabets from neighbouring thresholds are built once, under
    // the smallest threshold
    let mut candidates = Vec::new();
    for &shift in &shifts {
        let mut seen: Vec<Vec<u8>> = Vec::new();
        for &threshold in &thresholds {
            let Ok(alphabet) = split_alphabet(dist, shift, threshold) else {
                continue;
            };
            if alphabet.len() > 1 && alphabet.len() >= params.words_per_chapter() {
                continue;
            }
            let key = alphabet.excluded_quotients();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            candidates.push((threshold, alphabet));
        }
    }
    if candidates.is_empty() {
        return Err(Error::NoCandidate(format!(
            "no shift/threshold fits K={} for source {source_id}",
            params.k()
        )));
    }

    let built: Vec<Result<MarlinDictionary>> = candidates
        .into_par_iter()
        .map(|(threshold, alphabet)| MarlinDictionary::from_alphabet(alphabet, params, threshold, block_n, source_id))
        .collect();

    let mut best: Option<MarlinDictionary> = None;
    let mut last_err = None;
    for result in built {
        match result {
            Ok(d) => {
                if best.as_ref().is_none_or(|b| d.abr_estimate() < b.abr_estimate()) {
                    best = Some(d);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        Error::NoCandidate(format!(
            "every candidate failed for source {source_id}: {}",
            last_err.map(|e| e.to_string()).unwrap_or_default()
        ))
    })
}
