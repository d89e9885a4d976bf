//! Wire formats: single blocks, the container file and dictionary-set files.
//! All multi-byte integers are little-endian.

mod block;
mod container;
mod dictset;

pub use block::{parse_block, serialize_block};
pub use container::{Container, ContainerHeader, Mode, CONTAINER_MAGIC, CONTAINER_VERSION};
pub use dictset::{dictset_digest, load_dictset, save_dictset, DICTSET_MAGIC, DICTSET_VERSION};

/// Dictionary index reserved for raw blocks.
pub const RAW_SENTINEL: u8 = 255;

/// Bytes per escape location for a block of `n` symbols.
pub fn loc_bytes(n: usize) -> usize {
    match n as u64 {
        0..=0x100 => 1,
        0x101..=0x1_0000 => 2,
        0x1_0001..=0x1_0000_0000 => 4,
        _ => 8,
    }
}

/// Little-endian cursor over a byte slice; every read reports truncation
/// through the supplied error constructor.
pub(crate) struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    err: fn(String) -> crate::Error,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(data: &'a [u8], err: fn(String) -> crate::Error) -> Self {
        Self { data, pos: 0, err }
    }

    pub(crate) fn take(&mut self, len: usize) -> crate::Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| (self.err)(format!("truncated at byte {} (wanted {len} more)", self.pos)))?;
        let out = &self.data[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub(crate) fn u8(&mut self) -> crate::Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub(crate) fn u16(&mut self) -> crate::Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub(crate) fn u32(&mut self) -> crate::Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self) -> crate::Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self) -> crate::Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Little-endian unsigned integer of `width` bytes.
    pub(crate) fn uint(&mut self, width: usize) -> crate::Result<u64> {
        let mut buf = [0u8; 8];
        buf[..width].copy_from_slice(self.take(width)?);
        Ok(u64::from_le_bytes(buf))
    }

    pub(crate) fn rest(&mut self) -> &'a [u8] {
        let out = &self.data[self.pos..];
        self.pos = self.data.len();
        out
    }

    pub(crate) fn is_done(&self) -> bool {
        self.pos == self.data.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn location_width_boundaries() {
        assert_eq!(loc_bytes(0), 1);
        assert_eq!(loc_bytes(256), 1);
        assert_eq!(loc_bytes(257), 2);
        assert_eq!(loc_bytes(300), 2);
        assert_eq!(loc_bytes(65536), 2);
        assert_eq!(loc_bytes(65537), 4);
        assert_eq!(loc_bytes(1 << 32), 4);
        assert_eq!(loc_bytes((1 << 32) + 1), 8);
    }
}
