use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::alphabet::QuotientAlphabet;
use crate::error::{Error, Result};

/// A dictionary word over quotient ranks (0 is the most probable quotient).
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    pub symbols: Vec<u8>,
    /// Index of the word one symbol shorter, within the same chapter.
    pub parent: Option<u32>,
    /// Number of single-symbol extensions present in the chapter. They are
    /// always the most probable successors, so after longest-match emission
    /// the next quotient is known to have rank `>= children`.
    pub children: u32,
    /// Probability that the chapter's conditional source starts with this word.
    pub raw_prob: f64,
    /// Probability that longest-match parsing emits this word.
    pub emit_prob: f64,
}

impl Word {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn first(&self) -> u8 {
        self.symbols[0]
    }
}

#[derive(Debug, PartialEq)]
struct Candidate {
    priority: f64,
    word: u32,
    successor: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.word.cmp(&self.word))
            .then_with(|| other.successor.cmp(&self.successor))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Grows the word set of a chapter whose first quotient is known to have
/// rank `>= exclusion`.
pub fn grow_chapter(alphabet: &QuotientAlphabet, exclusion: usize, size: usize) -> Result<Vec<Word>> {
    grow_with_probs(&alphabet.coding_probs(), exclusion, size)
}

/// Greedy growth over per-rank probabilities `probs` (descending).
///
/// Every word exposes one candidate at a time, its extension by the most
/// probable successor not yet present, weighted by the probability of
/// reaching it. The best candidate is promoted until `size` words exist.
pub(crate) fn grow_with_probs(probs: &[f64], exclusion: usize, size: usize) -> Result<Vec<Word>> {
    let m = probs.len();
    if exclusion >= m {
        return Err(Error::Growth(format!(
            "exclusion {exclusion} leaves no admissible quotient out of {m}"
        )));
    }
    let admissible = m - exclusion;
    if admissible > size {
        return Err(Error::Growth(format!(
            "{admissible} admissible quotients do not fit in {size} words"
        )));
    }
    let z: f64 = probs[exclusion..].iter().sum();
    let norm = if z > 0.0 { 1.0 / z } else { 0.0 };

    let mut words: Vec<Word> = (exclusion..m)
        .map(|r| Word {
            symbols: vec![r as u8],
            parent: None,
            children: 0,
            raw_prob: probs[r] * norm,
            emit_prob: 0.0,
        })
        .collect();
    words.reserve(size - admissible);

    let mut heap: BinaryHeap<Candidate> = words
        .iter()
        .enumerate()
        .map(|(i, w)| Candidate {
            priority: w.raw_prob * probs[0],
            word: i as u32,
            successor: 0,
        })
        .collect();

    while words.len() < size {
        let Some(best) = heap.pop() else {
            return Err(Error::Growth("ran out of extensions".into()));
        };
        let parent = best.word as usize;
        let succ = best.successor as usize;
        let mut symbols = words[parent].symbols.clone();
        symbols.push(succ as u8);
        let raw_prob = words[parent].raw_prob * probs[succ];
        words[parent].children += 1;
        let idx = words.len() as u32;
        words.push(Word {
            symbols,
            parent: Some(best.word),
            children: 0,
            raw_prob,
            emit_prob: 0.0,
        });
        if succ + 1 < m {
            heap.push(Candidate {
                priority: words[parent].raw_prob * probs[succ + 1],
                word: best.word,
                successor: (succ + 1) as u32,
            });
        }
        heap.push(Candidate {
            priority: raw_prob * probs[0],
            word: idx,
            successor: 0,
        });
    }
    set_emit_probs(&mut words, probs);
    Ok(words)
}

/// `emit = raw * (1 - mass of the present children)`.
pub(crate) fn set_emit_probs(words: &mut [Word], probs: &[f64]) {
    let top = top_mass(probs);
    for w in words.iter_mut() {
        w.emit_prob = w.raw_prob * (1.0 - top[w.children as usize]).max(0.0);
    }
}

/// `top[k]` = total probability of the `k` most probable ranks.
pub(crate) fn top_mass(probs: &[f64]) -> Vec<f64> {
    let mut top = Vec::with_capacity(probs.len() + 1);
    let mut acc = 0.0;
    top.push(0.0);
    for &p in probs {
        acc += p;
        top.push(acc);
    }
    top
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABCD: [f64; 4] = [0.7, 0.15, 0.1, 0.05];

    fn spelled(words: &[Word]) -> Vec<String> {
        words
            .iter()
            .map(|w| w.symbols.iter().map(|&s| (b'a' + s) as char).collect())
            .collect()
    }

    #[test]
    fn grows_along_the_most_probable_chain() {
        // hand trace: after the roots, aa (.49), aaa (.343), aaaa (.2401)
        // and aaaaa (.16807) beat ab / ba (.105)
        let words = grow_with_probs(&ABCD, 0, 8).unwrap();
        assert_eq!(spelled(&words), ["a", "b", "c", "d", "aa", "aaa", "aaaa", "aaaaa"]);
        let k: Vec<u32> = words.iter().map(|w| w.children).collect();
        assert_eq!(k, [1, 0, 0, 0, 1, 1, 1, 0]);
    }

    #[test]
    fn excluded_chapter_has_no_word_starting_with_the_top_symbol() {
        let words = grow_with_probs(&ABCD, 1, 8).unwrap();
        assert_eq!(words.len(), 8);
        assert!(words.iter().all(|w| w.first() != 0));
        let names = spelled(&words);
        for root in ["b", "c", "d"] {
            assert!(names.iter().any(|n| n == root));
        }
        // hand trace under p(.|rank >= 1) = (.5, .333, .167) for b, c, d:
        // ba .35, baa .245, ca .233, baaa .1715, caa .163
        assert_eq!(names, ["b", "c", "d", "ba", "baa", "ca", "baaa", "caa"]);
    }

    #[test]
    fn no_room_to_grow() {
        let words = grow_with_probs(&[0.6, 0.4], 0, 2).unwrap();
        assert_eq!(spelled(&words), ["a", "b"]);
    }

    #[test]
    fn emission_probabilities_sum_to_one() {
        for exclusion in 0..3 {
            let words = grow_with_probs(&ABCD, exclusion, 64).unwrap();
            let total: f64 = words.iter().map(|w| w.emit_prob).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let top = top_mass(&ABCD);
            for w in &words {
                let expect = w.raw_prob * (1.0 - top[w.children as usize]);
                assert!((w.emit_prob - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_impossible_chapters() {
        assert!(grow_with_probs(&ABCD, 4, 8).is_err());
        assert!(grow_with_probs(&ABCD, 0, 2).is_err());
    }
}
