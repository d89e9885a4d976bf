//! Rice-Marlin dictionaries.
//!
//! A dictionary has `2^O` chapters of `2^K` words. Chapter `c` owns codewords
//! `c * 2^K .. (c + 1) * 2^K`; the low `O` bits of a codeword name the chapter
//! used for the next word. Each chapter carries an exclusion level `e`: its
//! roots are the quotients of rank `>= e`, and only words with at least `e`
//! children may lead into it.

mod assign;
pub mod chain;
mod growth;
mod search;
mod set;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use assign::{assign_codewords, exclusion_bounds};
pub use chain::{stationary_distribution, ChainStats, Skeleton};
pub use growth::{grow_chapter, Word};
pub use search::{best_dictionary_for, search_dictionary, shift_efficiency_bound, SearchSpace, THRESHOLD_GRID};
pub use set::{
    build_dictionary_set, select_dictionary, select_dictionary_shortlist, DictionarySet, GridEntry, SetConfig,
    MAX_DICTIONARIES,
};

use crate::alphabet::{split_alphabet, QuotientAlphabet};
use crate::error::{Error, Result};
use crate::format::loc_bytes;
use crate::source::SymbolDistribution;

/// Rounds of the exclusion-map refinement in [`build_chapters`].
const EXCLUSION_ROUNDS: usize = 24;

/// Codeword geometry: `K` bits consumed per step, `O` bits of overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    k: u8,
    o: u8,
}

impl CodeParams {
    pub fn new(k: u8, o: u8) -> Result<Self> {
        if k == 0 || o > k || k as u32 + o as u32 > 24 {
            return Err(Error::InvalidParameters(format!(
                "need 1 <= K, O <= K and K + O <= 24 (got K={k}, O={o})"
            )));
        }
        Ok(Self { k, o })
    }

    pub fn k(self) -> u8 {
        self.k
    }

    pub fn o(self) -> u8 {
        self.o
    }

    /// Bits peeked per step.
    pub fn n(self) -> u8 {
        self.k + self.o
    }

    pub fn chapters(self) -> usize {
        1 << self.o
    }

    pub fn words_per_chapter(self) -> usize {
        1 << self.k
    }

    /// Codewords in a chapter that lead to any one next chapter.
    pub fn slots_per_group(self) -> usize {
        1 << (self.k - self.o)
    }

    pub fn codewords(self) -> usize {
        1 << self.n()
    }

    pub fn overlap_mask(self) -> usize {
        self.chapters() - 1
    }
}

/// Words of one chapter, indexed by codeword within the chapter.
#[derive(Debug, Clone, PartialEq)]
pub struct Chapter {
    /// The first quotient of any word parsed in this chapter has rank `>= exclusion`.
    pub exclusion: usize,
    pub words: Vec<Word>,
    /// Word indices with every parent before its children.
    pub(crate) order: Vec<u32>,
}

impl Chapter {
    /// Codeword index (within the chapter) of each single-symbol word, by rank.
    pub fn roots(&self, ranks: usize) -> Vec<Option<u32>> {
        let mut roots = vec![None; ranks];
        for (i, w) in self.words.iter().enumerate() {
            if w.len() == 1 {
                roots[w.first() as usize] = Some(i as u32);
            }
        }
        roots
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarlinDictionary {
    params: CodeParams,
    alphabet: QuotientAlphabet,
    threshold: f64,
    /// Empty when a single quotient is represented: the quotient stream is
    /// then implied and never stored.
    chapters: Vec<Chapter>,
    stationary: Vec<f64>,
    mean_word_len: f64,
    abr_estimate: f64,
    block_n: usize,
    source_id: String,
    skeleton: Skeleton,
}

impl MarlinDictionary {
    /// Splits `dist` at `shift`, excludes quotients below `threshold` and
    /// builds the dictionary.
    pub fn build(
        dist: &SymbolDistribution,
        params: CodeParams,
        shift: u8,
        threshold: f64,
        block_n: usize,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        let alphabet = split_alphabet(dist, shift, threshold)?;
        Self::from_alphabet(alphabet, params, threshold, block_n, source_id)
    }

    pub fn from_alphabet(
        alphabet: QuotientAlphabet,
        params: CodeParams,
        threshold: f64,
        block_n: usize,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        let m = alphabet.len();
        if m == 1 {
            return Self::finish(params, alphabet, threshold, Vec::new(), block_n, source_id.into());
        }
        if m >= params.words_per_chapter() {
            return Err(Error::InvalidParameters(format!(
                "2^K = {} must exceed the {m} represented quotients",
                params.words_per_chapter()
            )));
        }
        let probs = alphabet.coding_probs();
        let (grown, exclusions) = build_chapters(&probs, params)?;
        let codewords = assign_codewords(&grown, &exclusions, params)?;
        let chapters = grown
            .into_iter()
            .zip(codewords)
            .zip(exclusions)
            .map(|((words, cw), exclusion)| arrange(words, &cw, exclusion))
            .collect();
        Self::finish(params, alphabet, threshold, chapters, block_n, source_id.into())
    }

    /// Loads a dictionary from an explicit codeword table: `table[cw]` is the
    /// word (as quotient ranks) of codeword `cw`, and `exclusions[c]` the
    /// exclusion level of chapter `c`.
    pub fn from_codeword_table(
        params: CodeParams,
        alphabet: QuotientAlphabet,
        exclusions: &[usize],
        table: Vec<Vec<u8>>,
        threshold: f64,
        block_n: usize,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        let source_id = source_id.into();
        if alphabet.len() == 1 && table.is_empty() {
            return Self::finish(params, alphabet, threshold, Vec::new(), block_n, source_id);
        }
        if table.len() != params.codewords() || exclusions.len() != params.chapters() {
            return Err(Error::InvalidParameters(format!(
                "expected {} codewords and {} exclusions, got {} and {}",
                params.codewords(),
                params.chapters(),
                table.len(),
                exclusions.len()
            )));
        }
        let size = params.words_per_chapter();
        let mut chapters = Vec::with_capacity(params.chapters());
        let mut entries = table.into_iter();
        for (c, &exclusion) in exclusions.iter().enumerate() {
            let symbols: Vec<Vec<u8>> = entries.by_ref().take(size).collect();
            chapters.push(link_chapter(c, symbols, exclusion, alphabet.len())?);
        }
        Self::finish(params, alphabet, threshold, chapters, block_n, source_id)
    }

    fn finish(
        params: CodeParams,
        alphabet: QuotientAlphabet,
        threshold: f64,
        mut chapters: Vec<Chapter>,
        block_n: usize,
        source_id: String,
    ) -> Result<Self> {
        let probs = alphabet.coding_probs();
        let skeleton = Skeleton::new(&chapters, alphabet.len(), params.overlap_mask());
        let (stationary, mean_word_len) = if chapters.is_empty() {
            (vec![1.0], f64::INFINITY)
        } else {
            set_word_probs(&mut chapters, &probs);
            let stats = chain::solve_skeleton(&skeleton, &probs, chain::TOLERANCE)?;
            (stats.chapters, stats.mean_word_len)
        };
        let mut dict = Self {
            params,
            alphabet,
            threshold,
            chapters,
            stationary,
            mean_word_len,
            abr_estimate: 0.0,
            block_n,
            source_id,
            skeleton,
        };
        dict.validate()?;
        dict.abr_estimate = dict.abr_from(mean_word_len, dict.alphabet.p_escape(), block_n);
        Ok(dict)
    }

    /// Rebuilds a dictionary from persisted parts, keeping stored statistics.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        params: CodeParams,
        alphabet: QuotientAlphabet,
        threshold: f64,
        exclusions: &[usize],
        table: Vec<Vec<u8>>,
        stationary: Vec<f64>,
        mean_word_len: f64,
        abr_estimate: f64,
        block_n: usize,
        source_id: String,
    ) -> Result<Self> {
        let mut chapters = Vec::new();
        if !table.is_empty() {
            if table.len() != params.codewords() || exclusions.len() != params.chapters() {
                return Err(Error::DictSet("codeword table has the wrong size".into()));
            }
            let size = params.words_per_chapter();
            let mut entries = table.into_iter();
            for (c, &exclusion) in exclusions.iter().enumerate() {
                let symbols: Vec<Vec<u8>> = entries.by_ref().take(size).collect();
                chapters.push(link_chapter(c, symbols, exclusion, alphabet.len())?);
            }
            set_word_probs(&mut chapters, &alphabet.coding_probs());
        }
        let skeleton = Skeleton::new(&chapters, alphabet.len(), params.overlap_mask());
        let dict = Self {
            params,
            alphabet,
            threshold,
            chapters,
            stationary,
            mean_word_len,
            abr_estimate,
            block_n,
            source_id,
            skeleton,
        };
        dict.validate()?;
        Ok(dict)
    }

    fn abr_from(&self, mean_word_len: f64, p_escape: f64, block_n: usize) -> f64 {
        let quotient_bits = if self.chapters.is_empty() {
            0.0
        } else {
            self.params.k() as f64 / mean_word_len
        };
        quotient_bits + self.alphabet.shift() as f64 + p_escape * 8.0 * (1 + loc_bytes(block_n)) as f64
    }

    pub fn params(&self) -> CodeParams {
        self.params
    }

    pub fn alphabet(&self) -> &QuotientAlphabet {
        &self.alphabet
    }

    pub fn shift(&self) -> u8 {
        self.alphabet.shift()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn chapters(&self) -> &[Chapter] {
        &self.chapters
    }

    /// True when the quotient stream carries no information and is omitted.
    pub fn is_empty_quotient(&self) -> bool {
        self.chapters.is_empty()
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn mean_word_len(&self) -> f64 {
        self.mean_word_len
    }

    /// Estimated bits per source symbol on the training source at the
    /// nominal block size.
    pub fn abr_estimate(&self) -> f64 {
        self.abr_estimate
    }

    pub fn block_n(&self) -> usize {
        self.block_n
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn word(&self, codeword: usize) -> &Word {
        let size = self.params.words_per_chapter();
        &self.chapters[codeword / size].words[codeword % size]
    }

    pub fn next_chapter(&self, codeword: usize) -> usize {
        codeword & self.params.overlap_mask()
    }

    /// Codeword of a word (given as ranks) in chapter `chapter`.
    pub fn codeword_of(&self, chapter: usize, symbols: &[u8]) -> Option<usize> {
        let size = self.params.words_per_chapter();
        self.chapters
            .get(chapter)?
            .words
            .iter()
            .position(|w| w.symbols == symbols)
            .map(|i| chapter * size + i)
    }

    pub fn max_word_len(&self) -> usize {
        self.chapters
            .iter()
            .flat_map(|c| c.words.iter().map(Word::len))
            .max()
            .unwrap_or(0)
    }

    /// The codeword table as quotient ranks, `2^N` entries (empty for an
    /// empty-quotient dictionary).
    pub fn codeword_table(&self) -> Vec<Vec<u8>> {
        self.chapters
            .iter()
            .flat_map(|c| c.words.iter().map(|w| w.symbols.clone()))
            .collect()
    }

    pub fn exclusions(&self) -> Vec<usize> {
        self.chapters.iter().map(|c| c.exclusion).collect()
    }

    /// Estimated bits per symbol when this dictionary codes `dist`, keeping
    /// the word structure and recomputing emission and chapter statistics.
    pub fn abr_estimate_for(&self, dist: &SymbolDistribution, block_n: usize) -> Result<f64> {
        let (probs, escape) = self.alphabet.reweigh(dist);
        let mean = if self.chapters.is_empty() {
            f64::INFINITY
        } else {
            chain::solve_skeleton(&self.skeleton, &probs, chain::TOLERANCE)?.mean_word_len
        };
        Ok(self.abr_from(mean, escape, block_n))
    }

    /// Cheap stand-in for [`Self::abr_estimate_for`]: the quotient rate is
    /// scaled by the cross-entropy of `dist` against the training source
    /// instead of re-solving the parsing chain. Used to shortlist candidates.
    pub fn abr_proxy(&self, dist: &SymbolDistribution, block_n: usize) -> f64 {
        let (probs, escape) = self.alphabet.reweigh(dist);
        let mut quotient_bits = 0.0;
        if !self.chapters.is_empty() {
            let own = self.alphabet.coding_probs();
            let mut cross = 0.0;
            for (&p, &q) in probs.iter().zip(&own) {
                if p > 0.0 {
                    if q <= 0.0 {
                        return f64::INFINITY;
                    }
                    cross -= p * q.log2();
                }
            }
            let own_entropy = crate::source::entropy_of(&own);
            let rate = self.params.k() as f64 / self.mean_word_len;
            quotient_bits = if own_entropy > 0.0 {
                rate * cross / own_entropy
            } else {
                rate
            };
        }
        quotient_bits + self.alphabet.shift() as f64 + escape * 8.0 * (1 + loc_bytes(block_n)) as f64
    }

    /// Chapter occupancy and mean word length under `dist`.
    pub fn chain_stats_for(&self, dist: &SymbolDistribution) -> Result<ChainStats> {
        if self.chapters.is_empty() {
            return Ok(ChainStats {
                chapters: vec![1.0],
                mean_word_len: f64::INFINITY,
                iterations: 0,
            });
        }
        let (probs, _) = self.alphabet.reweigh(dist);
        chain::solve_skeleton(&self.skeleton, &probs, chain::TOLERANCE)
    }

    /// Checks the structural invariants: chapter sizes, distinct
    /// prefix-closed words, roots for every admissible quotient, children
    /// that are the most probable successors, and safe chapter transitions.
    pub fn validate(&self) -> Result<()> {
        if self.chapters.is_empty() {
            return if self.alphabet.len() == 1 {
                Ok(())
            } else {
                Err(Error::InvalidParameters("dictionary has no chapters".into()))
            };
        }
        let m = self.alphabet.len();
        let size = self.params.words_per_chapter();
        if self.chapters.len() != self.params.chapters() {
            return Err(Error::InvalidParameters("wrong number of chapters".into()));
        }
        for (c, chapter) in self.chapters.iter().enumerate() {
            if chapter.words.len() != size {
                return Err(Error::InvalidParameters(format!(
                    "chapter {c} has {} words",
                    chapter.words.len()
                )));
            }
            let roots = chapter.roots(m);
            if let Some(r) = (chapter.exclusion..m).find(|&r| roots[r].is_none()) {
                return Err(Error::InvalidParameters(format!(
                    "chapter {c} cannot parse quotient rank {r}"
                )));
            }
            for (i, w) in chapter.words.iter().enumerate() {
                let next = self.chapters[i & self.params.overlap_mask()].exclusion;
                if (w.children as usize) < next {
                    return Err(Error::InvalidParameters(format!(
                        "chapter {c} word {i} has {} children but leads to a chapter excluding {next}",
                        w.children
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Estimated bits per symbol of `dict` on `dist` at block size `block_n`.
pub fn abr_estimate(dict: &MarlinDictionary, dist: &SymbolDistribution, block_n: usize) -> Result<f64> {
    dict.abr_estimate_for(dist, block_n)
}

/// Chapter occupancy of a dictionary on its training source.
pub fn chapter_stationary(dict: &MarlinDictionary) -> &[f64] {
    dict.stationary()
}

/// Grows every chapter and picks per-chapter exclusion levels that admit a
/// safe codeword assignment.
///
/// Starting from no exclusion (always feasible), each round raises chapter
/// `j`'s exclusion to the child count guaranteed by slot group `j`, capped at
/// `j`, and regrows. A round whose result is infeasible is walked back down
/// until it fits. The feasible map excluding the most is kept.
fn build_chapters(probs: &[f64], params: CodeParams) -> Result<(Vec<Vec<Word>>, Vec<usize>)> {
    let groups = params.chapters();
    let size = params.words_per_chapter();
    let positive = probs.iter().take_while(|&&p| p > 0.0).count().max(1);
    let cap = |j: usize| j.min(positive - 1);

    let mut cache: HashMap<usize, Vec<Word>> = HashMap::new();
    let mut exclusions = vec![0usize; groups];
    let mut best: Option<(usize, Vec<usize>)> = None;

    for _ in 0..EXCLUSION_ROUNDS {
        for &e in &exclusions {
            if let std::collections::hash_map::Entry::Vacant(slot) = cache.entry(e) {
                slot.insert(growth::grow_with_probs(probs, e, size)?);
            }
        }
        let chapters: Vec<Vec<Word>> = exclusions.iter().map(|e| cache[e].clone()).collect();
        let bounds = exclusion_bounds(&chapters, params);
        let feasible = bounds.iter().zip(&exclusions).all(|(b, e)| b >= e);
        if feasible {
            let total: usize = exclusions.iter().sum();
            if best.as_ref().is_none_or(|(t, _)| total > *t) {
                best = Some((total, exclusions.clone()));
            }
        }
        let mut next: Vec<usize> = (0..groups).map(|j| bounds[j].min(cap(j))).collect();
        if !feasible {
            for (n, e) in next.iter_mut().zip(&exclusions) {
                *n = (*n).min(*e);
            }
        }
        if next == exclusions {
            break;
        }
        exclusions = next;
    }
    let exclusions = best.map(|(_, e)| e).unwrap_or_else(|| vec![0; groups]);
    let chapters = exclusions
        .iter()
        .map(|e| match cache.get(e) {
            Some(words) => Ok(words.clone()),
            None => growth::grow_with_probs(probs, *e, size),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((chapters, exclusions))
}

/// Reorders growth-ordered words by codeword index.
fn arrange(words: Vec<Word>, codeword: &[u32], exclusion: usize) -> Chapter {
    let mut slots: Vec<Option<Word>> = vec![None; words.len()];
    for (i, mut w) in words.into_iter().enumerate() {
        w.parent = w.parent.map(|p| codeword[p as usize]);
        slots[codeword[i] as usize] = Some(w);
    }
    let words: Vec<Word> = slots
        .into_iter()
        .map(|w| w.expect("codewords form a bijection"))
        .collect();
    Chapter {
        exclusion,
        order: parents_first(&words),
        words,
    }
}

/// Recovers parent links and child counts of an explicit chapter.
fn link_chapter(c: usize, symbols: Vec<Vec<u8>>, exclusion: usize, ranks: usize) -> Result<Chapter> {
    let mut index: HashMap<&[u8], u32> = HashMap::with_capacity(symbols.len());
    for (i, s) in symbols.iter().enumerate() {
        if s.is_empty() || s.iter().any(|&r| r as usize >= ranks) {
            return Err(Error::InvalidParameters(format!(
                "chapter {c} word {i} is empty or uses an unknown quotient"
            )));
        }
        if index.insert(s.as_slice(), i as u32).is_some() {
            return Err(Error::InvalidParameters(format!("chapter {c} repeats word {s:?}")));
        }
    }
    let mut parents = vec![None; symbols.len()];
    let mut child_sets: Vec<Vec<u8>> = vec![Vec::new(); symbols.len()];
    for (i, s) in symbols.iter().enumerate() {
        if s.len() > 1 {
            let Some(&p) = index.get(&s[..s.len() - 1]) else {
                return Err(Error::InvalidParameters(format!(
                    "chapter {c} word {s:?} has no parent word"
                )));
            };
            parents[i] = Some(p);
            child_sets[p as usize].push(*s.last().unwrap());
        }
    }
    for (i, set) in child_sets.iter_mut().enumerate() {
        set.sort_unstable();
        if set.iter().enumerate().any(|(r, &s)| r != s as usize) {
            return Err(Error::InvalidParameters(format!(
                "chapter {c} word {:?} has children that are not its most probable successors",
                symbols[i]
            )));
        }
    }
    let words: Vec<Word> = symbols
        .into_iter()
        .enumerate()
        .map(|(i, s)| Word {
            symbols: s,
            parent: parents[i],
            children: child_sets[i].len() as u32,
            raw_prob: 0.0,
            emit_prob: 0.0,
        })
        .collect();
    Ok(Chapter {
        exclusion,
        order: parents_first(&words),
        words,
    })
}

/// Word indices by length, ties by index: parents always precede children.
fn parents_first(words: &[Word]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..words.len() as u32).collect();
    order.sort_by_key(|&i| words[i as usize].len());
    order
}

/// Fills `raw_prob` and `emit_prob` of every word under `probs`, conditioned
/// on each chapter's exclusion.
fn set_word_probs(chapters: &mut [Chapter], probs: &[f64]) {
    for chapter in chapters.iter_mut() {
        let z: f64 = probs[chapter.exclusion.min(probs.len())..].iter().sum();
        let norm = if z > 0.0 { 1.0 / z } else { 0.0 };
        for &i in &chapter.order {
            let i = i as usize;
            let last = probs[*chapter.words[i].symbols.last().unwrap() as usize];
            chapter.words[i].raw_prob = match chapter.words[i].parent {
                Some(p) => chapter.words[p as usize].raw_prob * last,
                None => last * norm,
            };
        }
        growth::set_emit_probs(&mut chapter.words, probs);
    }
}
