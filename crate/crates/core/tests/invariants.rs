//! Structural invariants of built dictionaries over random sources and
//! parameters.

mod common;

use std::collections::HashSet;

use common::{sample_ranks, NaiveParser};
use proptest::prelude::*;
use rice_marlin::{CodeParams, EncoderMatrix, MarlinDictionary, SymbolDistribution};

/// Parameters `(K, O, S, threshold)` and a skewed source with fewer
/// nonzero bytes than `2^K`, so every case builds.
fn case() -> impl Strategy<Value = ((u8, u8, u8, f64), SymbolDistribution)> {
    (
        2u8..=8,
        0u8..=4,
        0u8..=3,
        prop::sample::select(vec![1e-12, 1.0 / 4096.0, 1.0 / 64.0]),
    )
        .prop_flat_map(|(k, o, s, t)| {
            let max_support = ((1usize << k) - 1).min(40);
            (
                Just((k, o.min(k), s, t)),
                1..=max_support,
                prop::collection::vec(0.0f64..1.0, 40),
                0.5f64..6.0,
            )
        })
        .prop_map(|(p, support, u, skew)| {
            let mut w = vec![0.0; 256];
            for i in 0..support {
                w[i * 7 % 256] = u[i].powf(skew) + 1e-6;
            }
            (p, SymbolDistribution::from_weights(&w).unwrap())
        })
}

fn build(dist: &SymbolDistribution, (k, o, s, t): (u8, u8, u8, f64)) -> MarlinDictionary {
    MarlinDictionary::build(dist, CodeParams::new(k, o).unwrap(), s, t, 4096, "prop").unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn structure((p, dist) in case()) {
        let dict = build(&dist, p);
        prop_assert!(dict.validate().is_ok());
        if dict.is_empty_quotient() {
            return Ok(());
        }
        let m = dict.alphabet().len();
        let o_mask = dict.params().overlap_mask();
        for (c, chapter) in dict.chapters().iter().enumerate() {
            // bijective codewords
            let distinct: HashSet<&Vec<u8>> = chapter.words.iter().map(|w| &w.symbols).collect();
            prop_assert_eq!(distinct.len(), chapter.words.len());
            prop_assert_eq!(chapter.words.len(), dict.params().words_per_chapter());
            // every admissible first symbol has a root
            let roots = chapter.roots(m);
            for (rank, root) in roots.iter().enumerate() {
                prop_assert!(rank < chapter.exclusion || root.is_some(), "chapter {} lacks rank {}", c, rank);
            }
            prop_assert!(chapter.words.iter().all(|w| (w.first() as usize) >= chapter.exclusion));
            // after emitting w the next quotient has rank >= children(w);
            // the next chapter must accept all of those
            for (i, w) in chapter.words.iter().enumerate() {
                let next = &dict.chapters()[i & o_mask];
                prop_assert!(next.exclusion <= w.children as usize);
            }
            let sum: f64 = chapter.words.iter().map(|w| w.emit_prob).sum();
            prop_assert!((sum - 1.0).abs() < 1e-9, "chapter {} emits {}", c, sum);
        }
        let total: f64 = dict.stationary().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        prop_assert!(dict.stationary().iter().all(|&x| x >= -1e-12));
        prop_assert!(dict.mean_word_len() >= 1.0);
        prop_assert!(dict.abr_estimate() >= f64::from(dict.shift()));
    }

    #[test]
    fn emission_probabilities_match_a_direct_count((p, dist) in case()) {
        let dict = build(&dist, p);
        let probs = dict.alphabet().coding_probs();
        for chapter in dict.chapters() {
            let entry: f64 = probs[chapter.exclusion..].iter().sum();
            let index: std::collections::HashMap<&[u8], usize> =
                chapter.words.iter().enumerate().map(|(i, w)| (w.symbols.as_slice(), i)).collect();
            let raw = |s: &[u8]| s[1..].iter().fold(probs[s[0] as usize] / entry, |a, &x| a * probs[x as usize]);
            for w in &chapter.words {
                let mut child_mass = 0.0;
                let mut ext = w.symbols.clone();
                ext.push(0);
                for r in 0..probs.len() {
                    *ext.last_mut().unwrap() = r as u8;
                    if index.contains_key(ext.as_slice()) {
                        child_mass += raw(&ext);
                    }
                }
                let expected = raw(&w.symbols) - child_mass;
                prop_assert!((w.emit_prob - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn encoder_matches_longest_match((p, dist) in case(), seed in any::<u64>()) {
        let dict = build(&dist, p);
        if dict.is_empty_quotient() {
            return Ok(());
        }
        let alphabet = dict.alphabet();
        let probs = alphabet.coding_probs();
        let ranks = sample_ranks(&probs, 3000, seed);
        let s = dict.shift();
        let message: Vec<u8> = ranks
            .iter()
            .enumerate()
            .map(|(i, &r)| rice_marlin::join(alphabet.value_of_rank(r as usize), (i as u8) & ((1u16 << s) - 1) as u8, s))
            .collect();
        let (stream, words) = EncoderMatrix::new(&dict).encode_quotients(&message);
        let expected = NaiveParser::new(&dict).parse(&ranks, true);
        prop_assert_eq!(words, expected.codewords.len());
        let k = u32::from(dict.params().k());
        let low: Vec<usize> = expected.codewords.iter().map(|c| c & ((1 << k) - 1)).collect();
        prop_assert_eq!(common::unpack_units(&stream, k, words), low);
    }
}
