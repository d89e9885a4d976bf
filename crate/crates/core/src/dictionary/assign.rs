//! Codeword assignment under overlap.
//!
//! Within a chapter, codeword index `i` leads to chapter `i mod 2^O`, so each
//! next-chapter value owns exactly `2^(K-O)` codewords. A word may lead to
//! chapter `j` only if it has at least `exclusion(j)` children: the quotient
//! following it is then guaranteed to be a root of chapter `j`.

use super::growth::Word;
use super::CodeParams;
use crate::error::{Error, Result};

/// Word indices of a chapter sorted by child count, descending. Ties keep
/// growth order.
fn by_children(words: &[Word]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by(|&a, &b| words[b].children.cmp(&words[a].children));
    order
}

/// For each next-chapter value `j`, the smallest child count among the words
/// that the sorted fill would place in slot group `j`, over all chapters.
/// Any exclusion map at or below these bounds admits a safe assignment.
pub fn exclusion_bounds(chapters: &[Vec<Word>], params: CodeParams) -> Vec<usize> {
    let groups = params.chapters();
    let per_group = params.slots_per_group();
    let mut bounds = vec![usize::MAX; groups];
    for words in chapters {
        let order = by_children(words);
        for (j, bound) in bounds.iter_mut().enumerate() {
            // group j holds sorted positions [(G-1-j)*P, (G-j)*P)
            let last = (groups - j) * per_group - 1;
            let k = words[order[last]].children as usize;
            *bound = (*bound).min(k);
        }
    }
    bounds
}

/// Assigns every word a codeword index within its chapter.
///
/// Words are sorted by child count and dealt into next-chapter slot groups
/// from the highest chapter downwards. Returns, per chapter, the codeword
/// index of each word (in the chapter's growth order).
pub fn assign_codewords(chapters: &[Vec<Word>], exclusions: &[usize], params: CodeParams) -> Result<Vec<Vec<u32>>> {
    let groups = params.chapters();
    let per_group = params.slots_per_group();
    let size = params.words_per_chapter();
    if chapters.len() != groups || exclusions.len() != groups {
        return Err(Error::InvalidParameters(format!(
            "expected {groups} chapters and exclusions, got {} and {}",
            chapters.len(),
            exclusions.len()
        )));
    }
    let mut out = Vec::with_capacity(groups);
    for (c, words) in chapters.iter().enumerate() {
        if words.len() != size {
            return Err(Error::InvalidParameters(format!(
                "chapter {c} has {} words, expected {size}",
                words.len()
            )));
        }
        let order = by_children(words);
        let mut codeword = vec![0u32; size];
        for (pos, &w) in order.iter().enumerate() {
            let j = groups - 1 - pos / per_group;
            let within = pos % per_group;
            if (words[w].children as usize) < exclusions[j] {
                return Err(Error::InfeasibleAssignment(format!(
                    "chapter {c}: a word with {} children cannot lead to chapter {j} (excludes {})",
                    words[w].children, exclusions[j]
                )));
            }
            codeword[w] = (within * groups + j) as u32;
        }
        out.push(codeword);
    }
    Ok(out)
}
