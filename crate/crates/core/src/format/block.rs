//! Block layout: `#D | #U | quotients | escapes | reminders`, or
//! `255 | raw bytes`. Section sizes follow from the compressed length, the
//! original size `n`, the dictionary's shift and `#U`.

use super::{loc_bytes, Reader, RAW_SENTINEL};
use crate::dictionary::DictionarySet;
use crate::encoder::CompressedBlock;
use crate::error::{Error, Result};

pub fn serialize_block(block: &CompressedBlock, n: usize) -> Vec<u8> {
    if let Some(raw) = &block.raw {
        let mut out = Vec::with_capacity(1 + raw.len());
        out.push(RAW_SENTINEL);
        out.extend_from_slice(raw);
        return out;
    }
    let width = loc_bytes(n);
    let mut out = Vec::with_capacity(block.wire_len(n));
    out.push(block.dict_index);
    out.push(block.escapes.len() as u8);
    out.extend_from_slice(&block.quotients);
    for &(loc, byte) in &block.escapes {
        out.extend_from_slice(&loc.to_le_bytes()[..width]);
        out.push(byte);
    }
    out.extend_from_slice(&block.reminders);
    out
}

/// Parses a block whose compressed length is `bytes.len()` and whose
/// original size is `n`.
pub fn parse_block(bytes: &[u8], n: usize, set: &DictionarySet) -> Result<CompressedBlock> {
    let mut r = Reader::new(bytes, Error::CorruptBlock);
    let index = r.u8()?;
    if index == RAW_SENTINEL {
        let raw = r.rest();
        if raw.len() != n {
            return Err(Error::CorruptBlock(format!(
                "raw block holds {} bytes, expected {n}",
                raw.len()
            )));
        }
        return Ok(CompressedBlock::raw(raw));
    }
    let dict = set
        .get(index as usize)
        .ok_or_else(|| Error::CorruptBlock(format!("unknown dictionary index {index}")))?;
    let count = r.u8()? as usize;
    let width = loc_bytes(n);
    let reminder_len = (n * dict.shift() as usize).div_ceil(8);
    let fixed = 2 + count * (width + 1) + reminder_len;
    let Some(quotient_len) = bytes.len().checked_sub(fixed) else {
        return Err(Error::CorruptBlock(format!(
            "{} bytes cannot hold {count} escapes and {reminder_len} reminder bytes",
            bytes.len()
        )));
    };
    if dict.is_empty_quotient() && quotient_len != 0 {
        return Err(Error::CorruptBlock(
            "quotient section present for an empty-quotient dictionary".into(),
        ));
    }
    let quotients = r.take(quotient_len)?.to_vec();
    let mut escapes = Vec::with_capacity(count);
    for _ in 0..count {
        let loc = r.uint(width)?;
        let byte = r.u8()?;
        if loc >= n as u64 || escapes.last().is_some_and(|&(prev, _)| prev >= loc) {
            return Err(Error::CorruptBlock(format!(
                "escape location {loc} out of order or outside block of {n}"
            )));
        }
        escapes.push((loc, byte));
    }
    let reminders = r.take(reminder_len)?.to_vec();
    debug_assert!(r.is_done());
    Ok(CompressedBlock {
        dict_index: index,
        quotients,
        escapes,
        reminders,
        raw: None,
    })
}
