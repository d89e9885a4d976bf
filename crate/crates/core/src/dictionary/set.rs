//! Dictionary sets: one dictionary per synthetic source, shared geometry.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{best_dictionary_for, CodeParams, MarlinDictionary};
use crate::error::{Error, Result};
use crate::source::{make_distribution, Family, SymbolDistribution, SyntheticFamily};

/// Dictionary index 255 marks a raw block, so a set holds at most 255.
pub const MAX_DICTIONARIES: usize = 255;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub family: Family,
    /// Target entropies as fractions of 8 bits.
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetConfig {
    pub k: u8,
    pub o: u8,
    pub block_size: usize,
    pub grid: Vec<GridEntry>,
}

impl Default for SetConfig {
    fn default() -> Self {
        Self {
            k: 8,
            o: 4,
            block_size: 4096,
            grid: vec![
                GridEntry {
                    family: Family::LaplacianResidual,
                    fractions: (1..=49).map(|i| i as f64 / 50.0).collect(),
                },
                GridEntry {
                    family: Family::Poisson,
                    fractions: (1..=9).map(|i| i as f64 / 10.0).collect(),
                },
            ],
        }
    }
}

impl SetConfig {
    pub fn params(&self) -> Result<CodeParams> {
        CodeParams::new(self.k, self.o)
    }

    pub fn sources(&self) -> Vec<SyntheticFamily> {
        self.grid
            .iter()
            .flat_map(|g| g.fractions.iter().map(move |&f| SyntheticFamily::new(g.family, f)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictionarySet {
    params: CodeParams,
    block_size: usize,
    dictionaries: Vec<MarlinDictionary>,
    /// Sources the set was trained on; empty for hand-assembled sets.
    grid: Vec<GridEntry>,
}

impl DictionarySet {
    pub fn new(dictionaries: Vec<MarlinDictionary>, block_size: usize) -> Result<Self> {
        let Some(first) = dictionaries.first() else {
            return Err(Error::DictSet("a dictionary set needs at least one dictionary".into()));
        };
        if dictionaries.len() > MAX_DICTIONARIES {
            return Err(Error::DictSet(format!(
                "{} dictionaries exceed the limit of {MAX_DICTIONARIES}",
                dictionaries.len()
            )));
        }
        let params = first.params();
        if dictionaries.iter().any(|d| d.params() != params) {
            return Err(Error::DictSet("dictionaries disagree on K and O".into()));
        }
        if block_size == 0 {
            return Err(Error::DictSet("block size must be positive".into()));
        }
        Ok(Self {
            params,
            block_size,
            dictionaries,
            grid: Vec::new(),
        })
    }

    pub fn with_grid(mut self, grid: Vec<GridEntry>) -> Self {
        self.grid = grid;
        self
    }

    pub fn grid(&self) -> &[GridEntry] {
        &self.grid
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn len(&self) -> usize {
        self.dictionaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dictionaries.is_empty()
    }

    pub fn dictionaries(&self) -> &[MarlinDictionary] {
        &self.dictionaries
    }

    pub fn get(&self, index: usize) -> Option<&MarlinDictionary> {
        self.dictionaries.get(index)
    }

    pub fn select(&self, hist: &SymbolDistribution, block_n: usize) -> usize {
        select_dictionary(self, hist, block_n)
    }
}

/// Builds the best dictionary for every source of the grid.
pub fn build_dictionary_set(config: &SetConfig) -> Result<DictionarySet> {
    let params = config.params()?;
    let sources = config.sources();
    if sources.len() > MAX_DICTIONARIES {
        return Err(Error::DictSet(format!(
            "{} sources exceed the limit of {MAX_DICTIONARIES}",
            sources.len()
        )));
    }
    let dictionaries = sources
        .par_iter()
        .map(|s| {
            let dist = make_distribution(*s)?;
            best_dictionary_for(&dist, params, config.block_size, &s.id())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DictionarySet::new(dictionaries, config.block_size)?.with_grid(config.grid.clone()))
}

/// Like [`select_dictionary`], but only the `shortlist` dictionaries with the
/// lowest [`MarlinDictionary::abr_proxy`] get the exact estimate.
pub fn select_dictionary_shortlist(
    set: &DictionarySet,
    hist: &SymbolDistribution,
    block_n: usize,
    shortlist: usize,
) -> usize {
    let mut ranked: Vec<(f64, usize)> = set
        .dictionaries
        .iter()
        .enumerate()
        .map(|(i, d)| (d.abr_proxy(hist, block_n), i))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked.truncate(shortlist.max(1));
    if ranked.len() == 1 {
        return ranked[0].1;
    }
    let mut best = (f64::INFINITY, usize::MAX);
    for (_, i) in ranked {
        let s = set.dictionaries[i]
            .abr_estimate_for(hist, block_n)
            .unwrap_or(f64::INFINITY);
        if s < best.0 || (s == best.0 && i < best.1) {
            best = (s, i);
        }
    }
    if best.1 == usize::MAX {
        0
    } else {
        best.1
    }
}

/// Index of the dictionary with the lowest estimated bits per symbol on the
/// empirical distribution `hist`. Ties go to the lower index.
pub fn select_dictionary(set: &DictionarySet, hist: &SymbolDistribution, block_n: usize) -> usize {
    let scores: Vec<f64> = set
        .dictionaries
        .par_iter()
        .map(|d| d.abr_estimate_for(hist, block_n).unwrap_or(f64::INFINITY))
        .collect();
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s < scores[best] {
            best = i;
        }
    }
    best
}
