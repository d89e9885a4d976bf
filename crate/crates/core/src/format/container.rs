//! Container file for a sequence of blocks.
//!
//! ```text
//! magic "RMRC" | version u8 | mode u8 | K u8 | O u8 | set digest [32]
//! block size u64 | original size u64
//! image mode only: width u32 | height u32 | header length u32 | header bytes
//! block count u64 | compressed length u32 per block | block bytes...
//! ```
//!
//! Every block's original size follows from the header, and its compressed
//! length from the length table, so blocks can be located without reading
//! their contents.

use super::Reader;
use crate::error::{Error, Result};

pub const CONTAINER_MAGIC: [u8; 4] = *b"RMRC";
pub const CONTAINER_VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Bytes,
    /// 8-bit grayscale image coded as residual tiles.
    Image {
        width: u32,
        height: u32,
        tile: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerHeader {
    pub mode: Mode,
    pub k: u8,
    pub o: u8,
    pub digest: [u8; 32],
    /// Bytes per block (`tile * tile` in image mode).
    pub block_size: u64,
    /// Size of the original file.
    pub original_size: u64,
    /// Image mode: the file header preceding the pixels, kept verbatim.
    pub image_header: Vec<u8>,
}

impl ContainerHeader {
    pub fn block_count(&self) -> Result<u64> {
        if self.block_size == 0 {
            return Err(Error::CorruptContainer("block size is zero".into()));
        }
        match self.mode {
            Mode::Bytes => Ok(self.original_size.div_ceil(self.block_size)),
            Mode::Image { width, height, tile } => {
                if tile == 0 || u64::from(tile) * u64::from(tile) != self.block_size {
                    return Err(Error::CorruptContainer("tile size disagrees with block size".into()));
                }
                Ok(u64::from(width.div_ceil(tile)) * u64::from(height.div_ceil(tile)))
            }
        }
    }

    /// Original size of every block.
    pub fn block_lengths(&self) -> Result<Vec<usize>> {
        let count = self.block_count()?;
        let bs = self.block_size;
        Ok(match self.mode {
            Mode::Bytes => (0..count)
                .map(|i| (self.original_size - i * bs).min(bs) as usize)
                .collect(),
            Mode::Image { .. } => vec![bs as usize; count as usize],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub header: ContainerHeader,
    pub blocks: Vec<Vec<u8>>,
}

impl Container {
    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let payload: usize = self.blocks.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(64 + h.image_header.len() + 4 * self.blocks.len() + payload);
        out.extend_from_slice(&CONTAINER_MAGIC);
        out.push(CONTAINER_VERSION);
        out.push(match h.mode {
            Mode::Bytes => 0,
            Mode::Image { .. } => 1,
        });
        out.push(h.k);
        out.push(h.o);
        out.extend_from_slice(&h.digest);
        out.extend_from_slice(&h.block_size.to_le_bytes());
        out.extend_from_slice(&h.original_size.to_le_bytes());
        if let Mode::Image { width, height, .. } = h.mode {
            out.extend_from_slice(&width.to_le_bytes());
            out.extend_from_slice(&height.to_le_bytes());
            out.extend_from_slice(&(h.image_header.len() as u32).to_le_bytes());
            out.extend_from_slice(&h.image_header);
        }
        out.extend_from_slice(&(self.blocks.len() as u64).to_le_bytes());
        for b in &self.blocks {
            out.extend_from_slice(&(b.len() as u32).to_le_bytes());
        }
        for b in &self.blocks {
            out.extend_from_slice(b);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, Error::CorruptContainer);
        if r.take(4)? != CONTAINER_MAGIC {
            return Err(Error::CorruptContainer("bad magic".into()));
        }
        let version = r.u8()?;
        if version != CONTAINER_VERSION {
            return Err(Error::CorruptContainer(format!("unsupported version {version}")));
        }
        let mode_tag = r.u8()?;
        let k = r.u8()?;
        let o = r.u8()?;
        let digest: [u8; 32] = r.take(32)?.try_into().unwrap();
        let block_size = r.u64()?;
        let original_size = r.u64()?;
        let (mode, image_header) = match mode_tag {
            0 => (Mode::Bytes, Vec::new()),
            1 => {
                let width = r.u32()?;
                let height = r.u32()?;
                let len = r.u32()? as usize;
                let tile = (block_size as f64).sqrt().round() as u32;
                (Mode::Image { width, height, tile }, r.take(len)?.to_vec())
            }
            t => return Err(Error::CorruptContainer(format!("unknown mode {t}"))),
        };
        let header = ContainerHeader {
            mode,
            k,
            o,
            digest,
            block_size,
            original_size,
            image_header,
        };
        let expected = header.block_count()?;
        let count = r.u64()?;
        if count != expected || count > bytes.len() as u64 / 4 {
            return Err(Error::CorruptContainer(format!(
                "{count} blocks listed, header implies {expected}"
            )));
        }
        let lengths = (0..count)
            .map(|_| r.u32().map(|l| l as usize))
            .collect::<Result<Vec<_>>>()?;
        let blocks = lengths
            .iter()
            .map(|&l| r.take(l).map(<[u8]>::to_vec))
            .collect::<Result<Vec<_>>>()?;
        if !r.is_done() {
            return Err(Error::CorruptContainer("trailing bytes after the last block".into()));
        }
        Ok(Self { header, blocks })
    }
}
