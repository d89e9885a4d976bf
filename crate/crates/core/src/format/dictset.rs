//! Dictionary-set files: `magic | version | body | sha256(body)`.
//!
//! The body stores every dictionary's alphabet, chapter exclusions and full
//! codeword table, plus its precomputed statistics, so a loaded set yields
//! the same encoder and decoder tables as the one saved.

use sha2::{Digest, Sha256};

use super::Reader;
use crate::alphabet::QuotientAlphabet;
use crate::dictionary::{CodeParams, DictionarySet, GridEntry, MarlinDictionary};
use crate::error::{Error, Result};

pub const DICTSET_MAGIC: [u8; 4] = *b"RMDS";
pub const DICTSET_VERSION: u8 = 1;
const DIGEST_LEN: usize = 32;

pub fn save_dictset(set: &DictionarySet) -> Vec<u8> {
    let body = encode_body(set);
    let digest = Sha256::digest(&body);
    let mut out = Vec::with_capacity(5 + body.len() + DIGEST_LEN);
    out.extend_from_slice(&DICTSET_MAGIC);
    out.push(DICTSET_VERSION);
    out.extend_from_slice(&body);
    out.extend_from_slice(&digest);
    out
}

/// SHA-256 of the set's serialized body; recorded in containers so a
/// mismatched set is caught before decoding.
pub fn dictset_digest(set: &DictionarySet) -> [u8; 32] {
    Sha256::digest(encode_body(set)).into()
}

pub fn load_dictset(bytes: &[u8]) -> Result<DictionarySet> {
    if bytes.len() < 5 + DIGEST_LEN || bytes[..4] != DICTSET_MAGIC {
        return Err(Error::DictSet("not a dictionary-set file".into()));
    }
    if bytes[4] != DICTSET_VERSION {
        return Err(Error::DictSet(format!("unsupported version {}", bytes[4])));
    }
    let (body, digest) = bytes[5..].split_at(bytes.len() - 5 - DIGEST_LEN);
    if Sha256::digest(body).as_slice() != digest {
        return Err(Error::DictSet("digest mismatch".into()));
    }
    decode_body(body)
}

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u16).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn encode_body(set: &DictionarySet) -> Vec<u8> {
    let mut out = Vec::new();
    let params = set.params();
    out.push(params.k());
    out.push(params.o());
    out.extend_from_slice(&(set.block_size() as u64).to_le_bytes());

    out.push(set.grid().len() as u8);
    for entry in set.grid() {
        put_str(&mut out, entry.family.name());
        out.extend_from_slice(&(entry.fractions.len() as u16).to_le_bytes());
        for f in &entry.fractions {
            out.extend_from_slice(&f.to_le_bytes());
        }
    }

    out.push(set.len() as u8);
    for d in set.dictionaries() {
        put_str(&mut out, d.source_id());
        out.push(d.shift());
        out.extend_from_slice(&d.threshold().to_le_bytes());
        out.extend_from_slice(&(d.block_n() as u64).to_le_bytes());
        let alphabet = d.alphabet();
        out.extend_from_slice(&(alphabet.len() as u16).to_le_bytes());
        for &(q, p) in alphabet.quotients() {
            out.push(q);
            out.extend_from_slice(&p.to_le_bytes());
        }
        let exclusions = d.exclusions();
        out.extend_from_slice(&(exclusions.len() as u32).to_le_bytes());
        for e in exclusions {
            out.extend_from_slice(&(e as u16).to_le_bytes());
        }
        let table = d.codeword_table();
        out.extend_from_slice(&(table.len() as u32).to_le_bytes());
        for word in table {
            out.extend_from_slice(&(word.len() as u16).to_le_bytes());
            out.extend_from_slice(&word);
        }
        out.extend_from_slice(&(d.stationary().len() as u32).to_le_bytes());
        for p in d.stationary() {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out.extend_from_slice(&d.mean_word_len().to_le_bytes());
        out.extend_from_slice(&d.abr_estimate().to_le_bytes());
    }
    out
}

fn decode_body(body: &[u8]) -> Result<DictionarySet> {
    let mut r = Reader::new(body, Error::DictSet);
    let params = CodeParams::new(r.u8()?, r.u8()?).map_err(|e| Error::DictSet(e.to_string()))?;
    let block_size = usize::try_from(r.u64()?).map_err(|_| Error::DictSet("block size too large".into()))?;

    let mut grid = Vec::new();
    for _ in 0..r.u8()? {
        let name = read_str(&mut r)?;
        let family = name
            .parse()
            .map_err(|_| Error::DictSet(format!("unknown family {name}")))?;
        let count = r.u16()? as usize;
        let fractions = (0..count).map(|_| r.f64()).collect::<Result<_>>()?;
        grid.push(GridEntry { family, fractions });
    }

    let count = r.u8()? as usize;
    let mut dictionaries = Vec::with_capacity(count);
    for _ in 0..count {
        let source_id = read_str(&mut r)?;
        let shift = r.u8()?;
        let threshold = r.f64()?;
        let block_n = r.u64()? as usize;
        let m = r.u16()? as usize;
        let mut quotients = Vec::with_capacity(m);
        for _ in 0..m {
            quotients.push((r.u8()?, r.f64()?));
        }
        let represented: Vec<u8> = quotients.iter().map(|q| q.0).collect();
        let q_count = if shift >= 8 { 1 } else { 1usize << (8 - shift) };
        let excluded: Vec<u8> = (0..q_count as u16)
            .map(|q| q as u8)
            .filter(|q| !represented.contains(q))
            .collect();
        let alphabet = QuotientAlphabet::from_ranked(shift, quotients, &excluded).map_err(invalid)?;
        let exclusions = (0..r.u32()?)
            .map(|_| r.u16().map(usize::from))
            .collect::<Result<Vec<_>>>()?;
        let words = r.u32()? as usize;
        if words > body.len() {
            return Err(Error::DictSet("codeword count exceeds file size".into()));
        }
        let mut table = Vec::with_capacity(words);
        for _ in 0..words {
            let len = r.u16()? as usize;
            table.push(r.take(len)?.to_vec());
        }
        let states = r.u32()? as usize;
        if states > body.len() {
            return Err(Error::DictSet("stationary length exceeds file size".into()));
        }
        let stationary = (0..states).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let mean_word_len = r.f64()?;
        let abr = r.f64()?;
        let dict = MarlinDictionary::from_parts(
            params,
            alphabet,
            threshold,
            &exclusions,
            table,
            stationary,
            mean_word_len,
            abr,
            block_n,
            source_id,
        )
        .map_err(invalid)?;
        dictionaries.push(dict);
    }
    if !r.is_done() {
        return Err(Error::DictSet("trailing bytes after the last dictionary".into()));
    }
    let set = DictionarySet::new(dictionaries, block_size)?;
    if set.params() != params {
        return Err(Error::DictSet("dictionaries disagree with the set header".into()));
    }
    Ok(set.with_grid(grid))
}

fn read_str(r: &mut Reader<'_>) -> Result<String> {
    let len = r.u16()? as usize;
    String::from_utf8(r.take(len)?.to_vec()).map_err(|_| Error::DictSet("string is not UTF-8".into()))
}

fn invalid(e: Error) -> Error {
    match e {
        Error::DictSet(_) => e,
        other => Error::DictSet(other.to_string()),
    }
}
