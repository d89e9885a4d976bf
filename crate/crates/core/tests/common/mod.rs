#![allow(dead_code)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rice_marlin::{CodeParams, MarlinDictionary, QuotientAlphabet, SymbolDistribution};

pub const EXAMPLE_PROBS: [f64; 4] = [0.7, 0.15, 0.1, 0.05];

/// Four-symbol example dictionary, K=3 and O=1. Symbols a..d are the bytes
/// 0..3 and also their ranks.
pub fn example_dictionary() -> MarlinDictionary {
    let alphabet = QuotientAlphabet::from_ranked(
        0,
        EXAMPLE_PROBS.iter().enumerate().map(|(i, &p)| (i as u8, p)).collect(),
        &(4..=255).collect::<Vec<u8>>(),
    )
    .unwrap();
    let words = [
        "aaaa", "a", "ba", "aa", "c", "aaa", "d", "b", // chapter 0
        "baaa", "ba", "ca", "baa", "bb", "c", "d", "b", // chapter 1
    ];
    let table = words.iter().map(|w| letters_to_bytes(w)).collect();
    MarlinDictionary::from_codeword_table(
        CodeParams::new(3, 1).unwrap(),
        alphabet,
        &[0, 1],
        table,
        0.0,
        4096,
        "example",
    )
    .unwrap()
}

pub fn letters_to_bytes(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'a').collect()
}

pub fn bytes_to_letters(v: &[u8]) -> String {
    v.iter().map(|&b| (b'a' + b) as char).collect()
}

/// Distribution over bytes 0..probs.len().
pub fn small_source(probs: &[f64]) -> SymbolDistribution {
    let mut p = vec![0.0; 256];
    p[..probs.len()].copy_from_slice(probs);
    SymbolDistribution::new(&p).unwrap()
}

/// i.i.d. ranks drawn from `probs`.
pub fn sample_ranks(probs: &[f64], n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: f64 = probs.iter().sum();
    (0..n)
        .map(|_| {
            let mut u = rng.random::<f64>() * total;
            for (r, &p) in probs.iter().enumerate() {
                if u < p {
                    return r as u8;
                }
                u -= p;
            }
            (probs.len() - 1) as u8
        })
        .collect()
}

/// Reference parser: plain longest match against each chapter's word list,
/// written without the encoder's transition matrix.
pub struct NaiveParser {
    chapters: Vec<HashMap<Vec<u8>, usize>>,
    words_per_chapter: usize,
    overlap_mask: usize,
    max_len: usize,
}

pub struct ParseStats {
    /// Codewords as global indices.
    pub codewords: Vec<usize>,
    /// Ranks covered by the emitted codewords.
    pub consumed: usize,
}

impl NaiveParser {
    pub fn new(dict: &MarlinDictionary) -> Self {
        let table = dict.codeword_table();
        let size = dict.params().words_per_chapter();
        let chapters = table
            .chunks(size)
            .map(|words| words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect())
            .collect();
        Self {
            chapters,
            words_per_chapter: size,
            overlap_mask: (1 << dict.params().o()) - 1,
            max_len: table.iter().map(Vec::len).max().unwrap(),
        }
    }

    /// Parses whole words only when `flush` is false; the trailing prefix is
    /// left unconsumed.
    pub fn parse(&self, ranks: &[u8], flush: bool) -> ParseStats {
        let mut chapter = 0;
        let mut pos = 0;
        let mut codewords = Vec::new();
        while pos < ranks.len() {
            let rest = &ranks[pos..];
            let longest = (1..=self.max_len.min(rest.len()))
                .rev()
                .find_map(|len| self.chapters[chapter].get(&rest[..len]).map(|&i| (len, i)));
            let (len, i) = longest.unwrap_or_else(|| panic!("rank {} unparseable in chapter {chapter}", rest[0]));
            if !flush && len == rest.len() {
                break;
            }
            codewords.push(chapter * self.words_per_chapter + i);
            pos += len;
            chapter = i & self.overlap_mask;
        }
        ParseStats {
            codewords,
            consumed: pos,
        }
    }
}

/// Reads `count` MSB-first units of `k` bits.
pub fn unpack_units(bytes: &[u8], k: u32, count: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    let mut acc = 0u64;
    let mut bits = 0;
    let mut it = bytes.iter();
    while out.len() < count {
        while bits < k {
            acc = (acc << 8) | u64::from(*it.next().expect("stream too short"));
            bits += 8;
        }
        out.push(((acc >> (bits - k)) & ((1 << k) - 1)) as usize);
        bits -= k;
    }
    out
}
