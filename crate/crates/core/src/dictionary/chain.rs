//! Chapter occupancy and mean parsed word length.
//!
//! Longest-match parsing of a memoryless source is a Markov chain over
//! `(chapter, exclusion)` pairs: after emitting a word with `k` children the
//! next quotient has rank `>= k`, and the word's codeword selects the next
//! chapter. Tracking the exact exclusion, not just the chapter's, keeps the
//! model equal to what the parser does.

use super::Chapter;
use crate::error::{Error, Result};

pub const TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 100_000;
/// Plain power steps before switching to the lazy chain `(I + P) / 2`, which
/// has the same stationary vectors but cannot oscillate on periodic chains
/// (e.g. a deterministic source cycling through chapters).
const PLAIN_ITERATIONS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainStats {
    /// Probability of each chapter being the active one.
    pub chapters: Vec<f64>,
    /// Mean parsed word length in quotients.
    pub mean_word_len: f64,
    pub iterations: usize,
}

/// Flattened word structure of a dictionary: everything the chain needs,
/// in parents-first order, without chasing per-word allocations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Skeleton {
    ranks: usize,
    chapters: usize,
    exclusion: Vec<u16>,
    /// First word of each chapter in the flat arrays, plus an end marker.
    offsets: Vec<u32>,
    last: Vec<u8>,
    first: Vec<u8>,
    /// Flat index of the parent, `u32::MAX` for roots.
    parent: Vec<u32>,
    children: Vec<u16>,
    len: Vec<u16>,
    next: Vec<u16>,
}

impl Skeleton {
    pub fn new(chapters: &[Chapter], ranks: usize, overlap_mask: usize) -> Self {
        let mut s = Self {
            ranks,
            chapters: chapters.len(),
            offsets: vec![0],
            ..Self::default()
        };
        for ch in chapters {
            let base = s.last.len() as u32;
            let mut pos = vec![u32::MAX; ch.words.len()];
            for (j, &i) in ch.order.iter().enumerate() {
                pos[i as usize] = base + j as u32;
            }
            for &i in &ch.order {
                let w = &ch.words[i as usize];
                s.last.push(*w.symbols.last().unwrap());
                s.first.push(w.first());
                s.parent.push(w.parent.map_or(u32::MAX, |p| pos[p as usize]));
                s.children.push(w.children.min(ranks as u32) as u16);
                s.len.push(w.len() as u16);
                s.next.push((i as usize & overlap_mask) as u16);
            }
            s.exclusion.push(ch.exclusion as u16);
            s.offsets.push(s.last.len() as u32);
        }
        s
    }
}

/// Solves the parsing chain of `chapters` under per-rank probabilities
/// `probs` (the dictionary's rank order).
pub fn solve(chapters: &[Chapter], probs: &[f64], overlap_mask: usize) -> Result<ChainStats> {
    solve_skeleton(&Skeleton::new(chapters, probs.len(), overlap_mask), probs, TOLERANCE)
}

pub fn solve_skeleton(sk: &Skeleton, probs: &[f64], tolerance: f64) -> Result<ChainStats> {
    let m = probs.len();
    debug_assert_eq!(m, sk.ranks);
    let width = m + 1;
    let n_chapters = sk.chapters;
    let mut tail = vec![0.0; width];
    for x in (0..m).rev() {
        tail[x] = tail[x + 1] + probs[x];
    }
    let inv_tail: Vec<f64> = tail.iter().map(|&z| if z > 0.0 { 1.0 / z } else { 0.0 }).collect();
    let stay: Vec<f64> = tail.iter().map(|&z| (1.0 - (tail[0] - z)).max(0.0)).collect();

    // unconditioned emission weight of each word: P(word) * P(next not a child)
    let words = sk.last.len();
    let mut prefix = vec![0.0; words];
    let mut weight = vec![0.0; words];
    let mut target = vec![0u32; words];
    for i in 0..words {
        let p = probs[sk.last[i] as usize];
        prefix[i] = match sk.parent[i] {
            u32::MAX => p,
            parent => prefix[parent as usize] * p,
        };
        let k = sk.children[i] as usize;
        weight[i] = prefix[i] * stay[k];
        target[i] = (sk.next[i] as usize * width + k) as u32;
    }

    let mut mass = vec![0.0; n_chapters * width];
    for (c, &e) in sk.exclusion.iter().enumerate() {
        mass[c * width + e as usize] = 1.0 / n_chapters as f64;
    }
    let mut next = vec![0.0; n_chapters * width];
    let mut reach = vec![0.0; m];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        next.iter_mut().for_each(|v| *v = 0.0);
        for c in 0..n_chapters {
            if !fill_reach(&mass[c * width..(c + 1) * width], &inv_tail, &mut reach) {
                continue;
            }
            for i in sk.offsets[c] as usize..sk.offsets[c + 1] as usize {
                next[target[i] as usize] += reach[sk.first[i] as usize] * weight[i];
            }
        }
        let total: f64 = next.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::NoConvergence {
                iterations,
                residual: f64::NAN,
            });
        }
        next.iter_mut().for_each(|v| *v /= total);
        if iterations > PLAIN_ITERATIONS {
            next.iter_mut().zip(&mass).for_each(|(v, &m)| *v = 0.5 * (*v + m));
        }
        residual = mass.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut mass, &mut next);
        if residual < tolerance {
            break;
        }
    }
    if residual >= tolerance {
        return Err(Error::NoConvergence { iterations, residual });
    }

    let mut chapter_probs = vec![0.0; n_chapters];
    let mut mean_len = 0.0;
    for c in 0..n_chapters {
        let row = &mass[c * width..(c + 1) * width];
        chapter_probs[c] = row.iter().sum();
        if fill_reach(row, &inv_tail, &mut reach) {
            for i in sk.offsets[c] as usize..sk.offsets[c + 1] as usize {
                mean_len += reach[sk.first[i] as usize] * weight[i] * sk.len[i] as f64;
            }
        }
    }
    Ok(ChainStats {
        chapters: chapter_probs,
        mean_word_len: mean_len,
        iterations,
    })
}

/// `reach[r] = sum over x <= r of mass[x] / P(rank >= x)`: the factor that
/// turns a word's unconditioned weight into its emission probability.
fn fill_reach(mass: &[f64], inv_tail: &[f64], reach: &mut [f64]) -> bool {
    let mut running = 0.0;
    let mut any = false;
    for (r, slot) in reach.iter_mut().enumerate() {
        let m = mass[r];
        if m != 0.0 {
            running += m * inv_tail[r];
            any = true;
        }
        *slot = running;
    }
    any
}

/// Stationary vector of a row-stochastic matrix by power iteration from the
/// uniform vector.
pub fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transition.len();
    if n == 0 || transition.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidParameters(
            "transition matrix must be square and non-empty".into(),
        ));
    }
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 1..=MAX_ITERATIONS {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (row, &p) in transition.iter().zip(&pi) {
            for (slot, &t) in next.iter_mut().zip(row) {
                *slot += p * t;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        if iteration > PLAIN_ITERATIONS {
            next.iter_mut().zip(&pi).for_each(|(v, &p)| *v = 0.5 * (*v + p));
        }
        residual = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if residual < TOLERANCE {
            return Ok(pi);
        }
        if iteration == MAX_ITERATIONS {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}
