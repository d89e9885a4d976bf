//! Three-stage block encoder: quotient parsing through a state matrix,
//! escape collection and reminder packing.

use crate::alphabet::reminder;
use crate::bits::BitWriter;
use crate::dictionary::MarlinDictionary;
use crate::format::{loc_bytes, RAW_SENTINEL};

/// Escapes beyond this count force a raw block.
pub const MAX_ESCAPES: usize = 255;

const EMIT: u32 = 1 << 31;
/// Cell value for quotients that can never follow a state.
pub const TRAP: u32 = u32::MAX;

/// Prefix-tree transition table: one cell per (codeword state, quotient rank).
///
/// A cell either names the state reached by extending the current word, or
/// carries the emit flag and names the single-symbol state of the next
/// chapter.
#[derive(Debug, Clone)]
pub struct EncoderMatrix {
    k: u32,
    ranks: usize,
    /// `cells[state * ranks + rank]`
    cells: Vec<u32>,
    /// Root state of each rank in chapter 0, where every block starts.
    start: Vec<u32>,
    /// Parsed rank of every byte; escaped bytes map to the placeholder's rank.
    rank_of_byte: [u8; 256],
    excluded: [bool; 256],
    shift: u8,
    empty_quotient: bool,
}

/// Decoded cell of an [`EncoderMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    Extend(usize),
    Emit(usize),
    Trap,
}

impl EncoderMatrix {
    pub fn new(dict: &MarlinDictionary) -> Self {
        let alphabet = dict.alphabet();
        let mut rank_of_byte = [0u8; 256];
        for (x, slot) in rank_of_byte.iter_mut().enumerate() {
            *slot = alphabet.parse_rank(x as u8) as u8;
        }
        let base = Self {
            k: dict.params().k() as u32,
            ranks: alphabet.len(),
            cells: Vec::new(),
            start: Vec::new(),
            rank_of_byte,
            excluded: *alphabet.excluded_mask(),
            shift: alphabet.shift(),
            empty_quotient: dict.is_empty_quotient(),
        };
        if dict.is_empty_quotient() {
            return base;
        }

        let params = dict.params();
        let m = alphabet.len();
        let size = params.words_per_chapter();
        let roots: Vec<Vec<Option<u32>>> = dict.chapters().iter().map(|c| c.roots(m)).collect();
        let mut cells = vec![TRAP; params.codewords() * m];
        for state in 0..params.codewords() {
            let next = dict.next_chapter(state);
            for (rank, root) in roots[next].iter().enumerate() {
                if let Some(r) = root {
                    cells[state * m + rank] = EMIT | ((next * size) as u32 + r);
                }
            }
        }
        // extensions override emission, so they go in after every emit cell
        for (c, chapter) in dict.chapters().iter().enumerate() {
            for (i, w) in chapter.words.iter().enumerate() {
                let state = c * size + i;
                if let Some(p) = w.parent {
                    let parent = c * size + p as usize;
                    cells[parent * m + *w.symbols.last().unwrap() as usize] = state as u32;
                }
            }
        }
        let start = roots[0].iter().map(|r| r.map_or(TRAP, |r| r)).collect();
        Self { cells, start, ..base }
    }

    pub fn ranks(&self) -> usize {
        self.ranks
    }

    pub fn transition(&self, state: usize, rank: usize) -> Transition {
        match self.cells[state * self.ranks + rank] {
            TRAP => Transition::Trap,
            c if c & EMIT != 0 => Transition::Emit((c & !EMIT) as usize),
            c => Transition::Extend(c as usize),
        }
    }

    /// Chapter-0 state of a single quotient rank.
    pub fn start_state(&self, rank: usize) -> Option<usize> {
        self.start.get(rank).filter(|&&s| s != TRAP).map(|&s| s as usize)
    }

    /// Stage 1: parses the quotients of `message` into packed `K`-bit units.
    /// Returns the packed stream and the number of codewords.
    pub fn encode_quotients(&self, message: &[u8]) -> (Vec<u8>, usize) {
        if self.empty_quotient || message.is_empty() {
            return (Vec::new(), 0);
        }
        let k = self.k;
        let mask = (1u32 << k) - 1;
        let mut out = BitWriter::with_capacity(message.len() / 2 + 8);
        let mut words = 0usize;
        let mut state = self.start[self.rank_of_byte[message[0] as usize] as usize];
        debug_assert_ne!(state, TRAP, "first quotient has no root in chapter 0");
        for &x in &message[1..] {
            let cell = self.cells[state as usize * self.ranks + self.rank_of_byte[x as usize] as usize];
            debug_assert_ne!(cell, TRAP, "parser consulted a trap cell");
            if cell & EMIT != 0 {
                out.write(state & mask, k);
                words += 1;
                state = cell & !EMIT;
            } else {
                state = cell;
            }
        }
        out.write(state & mask, k);
        (out.finish(), words + 1)
    }
}

/// A block in decoded-section form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedBlock {
    pub dict_index: u8,
    /// Packed `K`-bit codeword units, zero-padded to a byte.
    pub quotients: Vec<u8>,
    /// `(location, original byte)`, ascending by location.
    pub escapes: Vec<(u64, u8)>,
    /// `S` low bits of every byte, MSB-first.
    pub reminders: Vec<u8>,
    /// Verbatim payload of a raw block.
    pub raw: Option<Vec<u8>>,
}

impl CompressedBlock {
    pub fn raw(message: &[u8]) -> Self {
        Self {
            dict_index: RAW_SENTINEL,
            quotients: Vec::new(),
            escapes: Vec::new(),
            reminders: Vec::new(),
            raw: Some(message.to_vec()),
        }
    }

    pub fn is_raw(&self) -> bool {
        self.raw.is_some()
    }

    /// Serialized size in bytes for a block of `n` source bytes.
    pub fn wire_len(&self, n: usize) -> usize {
        match &self.raw {
            Some(p) => 1 + p.len(),
            None => 2 + self.quotients.len() + self.escapes.len() * (loc_bytes(n) + 1) + self.reminders.len(),
        }
    }
}

/// Concatenates the low `shift` bits of every byte, MSB-first.
pub fn pack_reminders(message: &[u8], shift: u8) -> Vec<u8> {
    match shift {
        0 => Vec::new(),
        8 => message.to_vec(),
        4 => message
            .chunks(2)
            .map(|c| (c[0] << 4) | c.get(1).map_or(0, |b| b & 0x0f))
            .collect(),
        s => {
            let mut w = BitWriter::with_capacity((message.len() * s as usize).div_ceil(8));
            for &x in message {
                w.write(reminder(x, s) as u32, s as u32);
            }
            w.finish()
        }
    }
}

/// Encodes `message` with dictionary `dict_index`, falling back to a raw
/// block on too many escapes or when coding would not save space.
pub fn encode_block(
    dict: &MarlinDictionary,
    matrix: &EncoderMatrix,
    dict_index: u8,
    message: &[u8],
) -> CompressedBlock {
    debug_assert!(dict_index != RAW_SENTINEL);
    let n = message.len();
    let mut escapes = Vec::new();
    for (i, &x) in message.iter().enumerate() {
        if matrix.excluded[x as usize] {
            if escapes.len() == MAX_ESCAPES {
                return CompressedBlock::raw(message);
            }
            escapes.push((i as u64, x));
        }
    }
    // cheap bound before parsing: escapes and reminders alone already too big
    let fixed = 2 + escapes.len() * (loc_bytes(n) + 1) + (n * dict.shift() as usize).div_ceil(8);
    if fixed > n && n > 0 {
        return CompressedBlock::raw(message);
    }
    let (quotients, _) = matrix.encode_quotients(message);
    let block = CompressedBlock {
        dict_index,
        quotients,
        escapes,
        reminders: pack_reminders(message, matrix.shift),
        raw: None,
    };
    if block.wire_len(n) > n {
        return CompressedBlock::raw(message);
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reminders_of_zero_to_seven_at_shift_three() {
        let msg: Vec<u8> = (0..8).collect();
        assert_eq!(pack_reminders(&msg, 3), vec![0x05, 0x39, 0x77]);
    }

    #[test]
    fn reminder_edge_shifts() {
        let msg = [0xAB, 0xCD, 0xEF];
        assert!(pack_reminders(&msg, 0).is_empty());
        assert_eq!(pack_reminders(&msg, 8), msg.to_vec());
        assert_eq!(pack_reminders(&msg, 4), vec![0xBD, 0xF0]);
    }
}
