//! MSB-first bit packing used by the quotient stream and the reminder section.

/// Appends fields of up to 32 bits, most significant bit first.
#[derive(Debug, Default)]
pub struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    filled: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bytes: usize) -> Self {
        Self {
            out: Vec::with_capacity(bytes),
            ..Self::default()
        }
    }

    /// Writes the low `bits` bits of `value`.
    #[inline]
    pub fn write(&mut self, value: u32, bits: u32) {
        debug_assert!(bits <= 32);
        if bits == 0 {
            return;
        }
        let masked = u64::from(value) & ((1u64 << bits) - 1);
        self.acc = (self.acc << bits) | masked;
        self.filled += bits;
        while self.filled >= 8 {
            self.filled -= 8;
            self.out.push((self.acc >> self.filled) as u8);
        }
        // keep only the pending bits so the shift above never overflows
        self.acc &= (1u64 << self.filled) - 1;
    }

    pub fn bit_len(&self) -> usize {
        self.out.len() * 8 + self.filled as usize
    }

    /// Flushes pending bits, zero-padding the final byte.
    pub fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            self.out.push((self.acc << (8 - self.filled)) as u8);
        }
        self.out
    }
}

/// Reads MSB-first fields from a byte slice.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u64,
    avail: u32,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self {
            data,
            pos: 0,
            acc: 0,
            avail: 0,
        }
    }

    /// Bits not yet consumed.
    pub fn remaining(&self) -> usize {
        (self.data.len() - self.pos) * 8 + self.avail as usize
    }

    #[inline]
    fn refill(&mut self) {
        while self.avail <= 56 && self.pos < self.data.len() {
            self.acc |= u64::from(self.data[self.pos]) << (56 - self.avail);
            self.pos += 1;
            self.avail += 8;
        }
    }

    /// Reads `bits` (≤ 32) bits, or `None` when the stream is exhausted.
    #[inline]
    pub fn read(&mut self, bits: u32) -> Option<u32> {
        debug_assert!(bits <= 32);
        if bits == 0 {
            return Some(0);
        }
        if self.avail < bits {
            self.refill();
            if self.avail < bits {
                return None;
            }
        }
        let value = (self.acc >> (64 - bits)) as u32;
        self.acc <<= bits;
        self.avail -= bits;
        Some(value)
    }
}
