//! Table-driven block decoder.

use crate::alphabet::MAX_SHIFT;
use crate::bits::BitReader;
use crate::dictionary::MarlinDictionary;
use crate::encoder::CompressedBlock;
use crate::error::{Error, Result};

/// Longest row stored inline. Longer words live in an overflow arena.
const MAX_STRIDE: usize = 32;

/// Codeword-indexed word table.
///
/// Each row holds the word's quotients already shifted into place
/// (`q << S`), padded to a fixed stride so the decode loop copies a whole
/// row and then advances by the word length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderTable {
    k: u32,
    o: u32,
    shift: u8,
    stride: usize,
    rows: Vec<u8>,
    lens: Vec<u16>,
    /// Offset into `overflow` for words longer than `stride`.
    long: Vec<u32>,
    overflow: Vec<u8>,
    max_word_len: usize,
    empty_quotient: bool,
}

impl DecoderTable {
    pub fn new(dict: &MarlinDictionary) -> Self {
        let params = dict.params();
        let shift = dict.shift();
        let max_word_len = dict.max_word_len();
        let stride = max_word_len.clamp(1, MAX_STRIDE).next_multiple_of(8);
        let mut table = Self {
            k: params.k() as u32,
            o: params.o() as u32,
            shift,
            stride,
            rows: Vec::new(),
            lens: Vec::new(),
            long: Vec::new(),
            overflow: Vec::new(),
            max_word_len,
            empty_quotient: dict.is_empty_quotient(),
        };
        if dict.is_empty_quotient() {
            return table;
        }
        let alphabet = dict.alphabet();
        let codewords = params.codewords();
        table.rows = vec![0; codewords * stride];
        table.lens = Vec::with_capacity(codewords);
        table.long = vec![u32::MAX; codewords];
        for (cw, symbols) in dict.codeword_table().iter().enumerate() {
            let bytes: Vec<u8> = symbols
                .iter()
                .map(|&r| ((alphabet.value_of_rank(r as usize) as u16) << shift) as u8)
                .collect();
            let inline = bytes.len().min(stride);
            table.rows[cw * stride..cw * stride + inline].copy_from_slice(&bytes[..inline]);
            if bytes.len() > stride {
                table.long[cw] = table.overflow.len() as u32;
                table.overflow.extend_from_slice(&bytes);
            }
            table.lens.push(bytes.len() as u16);
        }
        table
    }

    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    pub fn len(&self) -> usize {
        self.lens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lens.is_empty()
    }

    /// The word of codeword `cw` as shifted quotients (`q << S`).
    pub fn word(&self, cw: usize) -> &[u8] {
        let len = self.lens[cw] as usize;
        if len > self.stride {
            let start = self.long[cw] as usize;
            &self.overflow[start..start + len]
        } else {
            &self.rows[cw * self.stride..cw * self.stride + len]
        }
    }

    /// The word of codeword `cw` as quotient values.
    pub fn quotients(&self, cw: usize) -> Vec<u8> {
        self.word(cw)
            .iter()
            .map(|&b| if self.shift >= MAX_SHIFT { 0 } else { b >> self.shift })
            .collect()
    }

    /// Writes `n` shifted quotients (`q << S`) into `out[..n]`.
    /// `out` must have `n + stride` bytes of room.
    fn decode_into(&self, stream: &[u8], n: usize, out: &mut [u8]) -> Result<()> {
        if n == 0 {
            return Ok(());
        }
        if self.empty_quotient {
            out[..n].fill(0);
            return Ok(());
        }
        let stride = self.stride;
        let omask = (1usize << self.o) - 1;
        let k = self.k;
        let mut window = 0usize;
        let mut pos = 0usize;
        let mut step = |unit: usize, pos: &mut usize| {
            let cw = (window << k) | unit;
            let len = self.lens[cw] as usize;
            if len <= stride {
                out[*pos..*pos + stride].copy_from_slice(&self.rows[cw * stride..(cw + 1) * stride]);
            } else {
                let start = self.long[cw] as usize;
                let take = len.min(out.len() - *pos);
                out[*pos..*pos + take].copy_from_slice(&self.overflow[start..start + take]);
            }
            *pos += len;
            window = cw & omask;
        };
        if k == 8 {
            let mut units = stream.iter();
            while pos < n {
                let Some(&unit) = units.next() else {
                    return Err(exhausted(pos, n));
                };
                step(unit as usize, &mut pos);
            }
        } else {
            let mut reader = BitReader::new(stream);
            while pos < n {
                let Some(unit) = reader.read(k) else {
                    return Err(exhausted(pos, n));
                };
                step(unit as usize, &mut pos);
            }
        }
        Ok(())
    }
}

fn exhausted(pos: usize, n: usize) -> Error {
    Error::CorruptBlock(format!("quotient stream ended after {pos} of {n} symbols"))
}

/// Decodes `n` quotient values from a packed codeword stream.
pub fn decode_quotients(table: &DecoderTable, stream: &[u8], n: usize) -> Result<Vec<u8>> {
    let mut out = vec![0u8; n + table.stride];
    table.decode_into(stream, n, &mut out)?;
    out.truncate(n);
    if table.shift > 0 {
        let shift = table.shift;
        out.iter_mut()
            .for_each(|b| *b = if shift >= MAX_SHIFT { 0 } else { *b >> shift });
    }
    Ok(out)
}

/// Reconstructs the `n` bytes of a block coded with the dictionary behind
/// `table`.
pub fn decode_block(table: &DecoderTable, block: &CompressedBlock, n: usize) -> Result<Vec<u8>> {
    if let Some(raw) = &block.raw {
        if raw.len() != n {
            return Err(Error::CorruptBlock(format!(
                "raw payload has {} bytes, expected {n}",
                raw.len()
            )));
        }
        return Ok(raw.clone());
    }
    let shift = table.shift;
    let needed = (n * shift as usize).div_ceil(8);
    if block.reminders.len() != needed {
        return Err(Error::CorruptBlock(format!(
            "reminder section has {} bytes, expected {needed}",
            block.reminders.len()
        )));
    }
    let mut out = vec![0u8; n + table.stride];
    table.decode_into(&block.quotients, n, &mut out)?;
    out.truncate(n);
    merge_reminders(&mut out, &block.reminders, shift);
    for &(loc, byte) in &block.escapes {
        let Some(slot) = usize::try_from(loc).ok().and_then(|l| out.get_mut(l)) else {
            return Err(Error::CorruptBlock(format!(
                "escape location {loc} outside block of {n}"
            )));
        };
        *slot = byte;
    }
    Ok(out)
}

/// ORs the packed `shift`-bit reminders into `out`.
fn merge_reminders(out: &mut [u8], reminders: &[u8], shift: u8) {
    match shift {
        0 => {}
        8 => out.copy_from_slice(&reminders[..out.len()]),
        4 => {
            for (pair, &r) in out.chunks_mut(2).zip(reminders) {
                pair[0] |= r >> 4;
                if let Some(b) = pair.get_mut(1) {
                    *b |= r & 0x0f;
                }
            }
        }
        s => {
            let mut reader = BitReader::new(reminders);
            for b in out.iter_mut() {
                *b |= reader.read(s as u32).unwrap_or(0) as u8;
            }
        }
    }
}
