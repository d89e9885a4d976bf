//! Efficiency studies on synthetic sources and throughput measurement.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::Codec;
use crate::dictionary::{search_dictionary, shift_efficiency_bound, CodeParams, MarlinDictionary, SearchSpace};
use crate::encoder::{encode_block, EncoderMatrix};
use crate::error::{Error, Result};
use crate::format::serialize_block;
use crate::source::{make_distribution, sample, Family, SyntheticFamily};

/// Synthetic efficiency study: one row per (family, fraction, size, shift).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub families: Vec<Family>,
    pub fractions: Vec<f64>,
    /// Dictionary sizes as `K` (words per chapter `2^K`).
    pub sizes: Vec<u8>,
    pub overlap: u8,
    /// Fixed shifts to evaluate one by one; `None` searches all shifts.
    pub shifts: Option<Vec<u8>>,
    pub thresholds: Vec<f64>,
    /// Symbols drawn per row for the measured efficiency.
    pub sample_len: usize,
    pub block_size: usize,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            families: vec![Family::LaplacianResidual],
            fractions: vec![0.5],
            sizes: vec![8, 10, 12],
            overlap: 0,
            shifts: Some(vec![0, 1, 2, 3, 4, 5]),
            thresholds: vec![0.0],
            sample_len: 16 << 20,
            block_size: 4096,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub family: Family,
    pub fraction: f64,
    pub dict_size: usize,
    pub overlap: u8,
    pub shift: u8,
    pub threshold: f64,
    pub entropy: f64,
    pub shift_bound: f64,
    pub predicted_eta: f64,
    pub measured_bps: f64,
    pub measured_eta: f64,
}

/// Compressed size of `message` coded block by block with one dictionary,
/// counting every serialized block byte (headers, escapes, raw fallbacks).
pub fn measure_dictionary(dict: &MarlinDictionary, message: &[u8], block_size: usize) -> usize {
    let matrix = EncoderMatrix::new(dict);
    message
        .par_chunks(block_size.max(1))
        .map(|chunk| serialize_block(&encode_block(dict, &matrix, 0, chunk), chunk.len()).len())
        .sum()
}

/// Measured bits per symbol of one dictionary on a message.
pub fn measured_bps(dict: &MarlinDictionary, message: &[u8], block_size: usize) -> f64 {
    if message.is_empty() {
        return 0.0;
    }
    measure_dictionary(dict, message, block_size) as f64 * 8.0 / message.len() as f64
}

pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    let mut rows = Vec::new();
    for &family in &cfg.families {
        for &fraction in &cfg.fractions {
            let source = SyntheticFamily::new(family, fraction);
            let dist = make_distribution(source)?;
            let entropy = dist.entropy();
            let message = sample(&dist, cfg.sample_len, cfg.seed);
            for &k in &cfg.sizes {
                let params = CodeParams::new(k, cfg.overlap)?;
                let spaces: Vec<SearchSpace> = match &cfg.shifts {
                    Some(shifts) => shifts
                        .iter()
                        .map(|&s| SearchSpace {
                            shifts: vec![s],
                            thresholds: cfg.thresholds.clone(),
                        })
                        .collect(),
                    None => vec![SearchSpace {
                        thresholds: cfg.thresholds.clone(),
                        ..SearchSpace::default()
                    }],
                };
                for space in spaces {
                    let dict = match search_dictionary(&dist, params, cfg.block_size, &source.id(), &space) {
                        Ok(d) => d,
                        // e.g. a small dictionary cannot hold every quotient at this shift
                        Err(Error::NoCandidate(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    let bps = measured_bps(&dict, &message, cfg.block_size);
                    rows.push(StudyRow {
                        family,
                        fraction,
                        dict_size: params.words_per_chapter(),
                        overlap: cfg.overlap,
                        shift: dict.shift(),
                        threshold: dict.threshold(),
                        entropy,
                        shift_bound: shift_efficiency_bound(&dist, dict.shift()),
                        predicted_eta: entropy / dict.abr_estimate(),
                        measured_bps: bps,
                        measured_eta: if bps > 0.0 { entropy / bps } else { 0.0 },
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str =
    "family,entropy_fraction,dict_size,overlap,shift,threshold,entropy_bits,shift_bound,predicted_eta,measured_bps,measured_eta";

pub fn rows_to_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.4},{},{},{},{:e},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.family.name(),
            r.fraction,
            r.dict_size,
            r.overlap,
            r.shift,
            r.threshold,
            r.entropy,
            r.shift_bound,
            r.predicted_eta,
            r.measured_bps,
            r.measured_eta
        );
    }
    out
}

/// Throughput and ratio of a codec on one corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub bytes: usize,
    pub compressed: usize,
    pub ratio: f64,
    pub runs: usize,
    pub threads: usize,
    pub encode_single_mibs: f64,
    pub decode_single_mibs: f64,
    pub encode_multi_mibs: f64,
    pub decode_multi_mibs: f64,
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn mibs(bytes: usize, t: Duration) -> f64 {
    bytes as f64 / (1u64 << 20) as f64 / t.as_secs_f64().max(1e-12)
}

/// Times compression and decompression of `corpus`: one verified warm-up
/// pass, then the median of `runs` timed passes, single-threaded and over the
/// rayon pool. `multi = false` skips the pooled runs.
pub fn bench_speed(codec: &Codec, corpus: &[u8], block_size: usize, runs: usize, multi: bool) -> Result<SpeedReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidParameters("benchmark corpus is empty".into()));
    }
    let runs = runs.max(1);
    codec.warm();
    let packed = codec.compress(corpus, block_size, multi)?;
    if codec.decompress(&packed, multi)? != corpus {
        return Err(Error::CorruptContainer("benchmark round trip mismatch".into()));
    }
    let time = |parallel: bool| -> Result<(Duration, Duration)> {
        let mut enc = Vec::with_capacity(runs);
        let mut dec = Vec::with_capacity(runs);
        for _ in 0..runs {
            let t = Instant::now();
            let c = codec.compress(corpus, block_size, parallel)?;
            enc.push(t.elapsed());
            let t = Instant::now();
            let d = codec.decompress(&c, parallel)?;
            dec.push(t.elapsed());
            debug_assert_eq!(d.len(), corpus.len());
        }
        Ok((median(enc), median(dec)))
    };
    let (enc1, dec1) = time(false)?;
    let (encn, decn) = if multi { time(true)? } else { (enc1, dec1) };
    Ok(SpeedReport {
        bytes: corpus.len(),
        compressed: packed.len(),
        ratio: corpus.len() as f64 / packed.len() as f64,
        runs,
        threads: if multi { rayon::current_num_threads() } else { 1 },
        encode_single_mibs: mibs(corpus.len(), enc1),
        decode_single_mibs: mibs(corpus.len(), dec1),
        encode_multi_mibs: mibs(corpus.len(), encn),
        decode_multi_mibs: mibs(corpus.len(), decn),
    })
}

/// `len` bytes drawn from a synthetic source.
pub fn synthetic_corpus(family: Family, fraction: f64, len: usize, seed: u64) -> Result<Vec<u8>> {
    Ok(sample(
        &make_distribution(SyntheticFamily::new(family, fraction))?,
        len,
        seed,
    ))
}
