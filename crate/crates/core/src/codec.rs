//! Block codec over a dictionary set, plus the container-level pipeline.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::decoder::{decode_block, DecoderTable};
use crate::dictionary::{select_dictionary, select_dictionary_shortlist, DictionarySet};
use crate::encoder::{encode_block, CompressedBlock, EncoderMatrix};
use crate::error::{Error, Result};
use crate::format::{dictset_digest, parse_block, serialize_block, Container, ContainerHeader, Mode};
use crate::image::{self, TILE};
use crate::source::empirical_histogram;

/// Default bytes per block in file mode.
pub const DEFAULT_BLOCK_SIZE: usize = 4096;

/// Dictionaries re-scored exactly after the cross-entropy pre-ranking.
pub const DEFAULT_SHORTLIST: usize = 4;

/// How a block's dictionary is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Exact estimate for every dictionary of the set.
    Exact,
    /// Exact estimate for the best few by a cheap cross-entropy proxy.
    Shortlist(usize),
}

/// Encoder and decoder tables for a dictionary set, built on first use.
#[derive(Debug)]
pub struct Codec {
    set: DictionarySet,
    digest: [u8; 32],
    matrices: Vec<OnceLock<EncoderMatrix>>,
    tables: Vec<OnceLock<DecoderTable>>,
    selection: Selection,
}

impl Codec {
    pub fn new(set: DictionarySet) -> Self {
        let n = set.len();
        Self {
            digest: dictset_digest(&set),
            matrices: (0..n).map(|_| OnceLock::new()).collect(),
            tables: (0..n).map(|_| OnceLock::new()).collect(),
            selection: Selection::Shortlist(DEFAULT_SHORTLIST),
            set,
        }
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    pub fn set(&self) -> &DictionarySet {
        &self.set
    }

    pub fn digest(&self) -> [u8; 32] {
        self.digest
    }

    pub fn matrix(&self, index: usize) -> &EncoderMatrix {
        self.matrices[index].get_or_init(|| EncoderMatrix::new(&self.set.dictionaries()[index]))
    }

    pub fn table(&self, index: usize) -> &DecoderTable {
        self.tables[index].get_or_init(|| DecoderTable::new(&self.set.dictionaries()[index]))
    }

    /// Builds every table up front, e.g. before timing.
    pub fn warm(&self) {
        (0..self.set.len()).into_par_iter().for_each(|i| {
            self.matrix(i);
            self.table(i);
        });
    }

    /// Best dictionary for a non-empty block.
    pub fn select(&self, message: &[u8]) -> Option<usize> {
        let hist = empirical_histogram(message).ok()?;
        Some(match self.selection {
            Selection::Exact => select_dictionary(&self.set, &hist, message.len()),
            Selection::Shortlist(k) => select_dictionary_shortlist(&self.set, &hist, message.len(), k),
        })
    }

    pub fn encode_block(&self, message: &[u8]) -> CompressedBlock {
        match self.select(message) {
            Some(i) => self.encode_with(i, message),
            None => CompressedBlock::raw(message),
        }
    }

    /// Encodes with a fixed dictionary.
    pub fn encode_with(&self, index: usize, message: &[u8]) -> CompressedBlock {
        encode_block(
            &self.set.dictionaries()[index],
            self.matrix(index),
            index as u8,
            message,
        )
    }

    pub fn decode_block(&self, block: &CompressedBlock, n: usize) -> Result<Vec<u8>> {
        if block.is_raw() {
            return decode_block(self.raw_table(), block, n);
        }
        let index = block.dict_index as usize;
        if index >= self.set.len() {
            return Err(Error::CorruptBlock(format!("unknown dictionary index {index}")));
        }
        decode_block(self.table(index), block, n)
    }

    fn raw_table(&self) -> &DecoderTable {
        // raw blocks never touch the table; any entry serves
        self.table(0)
    }

    pub fn compress_block(&self, message: &[u8]) -> Vec<u8> {
        serialize_block(&self.encode_block(message), message.len())
    }

    pub fn decompress_block(&self, bytes: &[u8], n: usize) -> Result<Vec<u8>> {
        let block = parse_block(bytes, n, &self.set)?;
        self.decode_block(&block, n)
    }

    fn compress_blocks(&self, chunks: Vec<&[u8]>, parallel: bool) -> Vec<Vec<u8>> {
        if parallel {
            chunks.into_par_iter().map(|c| self.compress_block(c)).collect()
        } else {
            chunks.into_iter().map(|c| self.compress_block(c)).collect()
        }
    }

    fn header(&self, mode: Mode, block_size: usize, original_size: usize, image_header: Vec<u8>) -> ContainerHeader {
        let params = self.set.params();
        ContainerHeader {
            mode,
            k: params.k(),
            o: params.o(),
            digest: self.digest,
            block_size: block_size as u64,
            original_size: original_size as u64,
            image_header,
        }
    }

    /// Splits `data` into blocks and writes a container.
    pub fn compress(&self, data: &[u8], block_size: usize, parallel: bool) -> Result<Vec<u8>> {
        if block_size == 0 {
            return Err(Error::InvalidParameters("block size must be positive".into()));
        }
        let blocks = self.compress_blocks(data.chunks(block_size).collect(), parallel);
        let container = Container {
            header: self.header(Mode::Bytes, block_size, data.len(), Vec::new()),
            blocks,
        };
        Ok(container.to_bytes())
    }

    /// Compresses an 8-bit binary PGM as residual tiles.
    pub fn compress_image(&self, pgm: &[u8], parallel: bool) -> Result<Vec<u8>> {
        let (header, img) = image::parse_pgm(pgm)?;
        let residuals = image::residuals(&img);
        let tiles = image::tiles(&residuals, img.width, img.height, TILE);
        let blocks = self.compress_blocks(tiles.iter().map(Vec::as_slice).collect(), parallel);
        let mode = Mode::Image {
            width: img.width as u32,
            height: img.height as u32,
            tile: TILE as u32,
        };
        let container = Container {
            header: self.header(mode, TILE * TILE, pgm.len(), header),
            blocks,
        };
        Ok(container.to_bytes())
    }

    /// Inverts [`Codec::compress`] and [`Codec::compress_image`].
    pub fn decompress(&self, bytes: &[u8], parallel: bool) -> Result<Vec<u8>> {
        let container = Container::from_bytes(bytes)?;
        let h = &container.header;
        let params = self.set.params();
        if h.k != params.k() || h.o != params.o() || h.digest != self.digest {
            return Err(Error::DictSet(
                "container was written with a different dictionary set".into(),
            ));
        }
        let lengths = h.block_lengths()?;
        let decode = |(bytes, &n): (&Vec<u8>, &usize)| self.decompress_block(bytes, n);
        let parts: Vec<Vec<u8>> = if parallel {
            container
                .blocks
                .par_iter()
                .zip(lengths.par_iter())
                .map(decode)
                .collect::<Result<_>>()?
        } else {
            container
                .blocks
                .iter()
                .zip(lengths.iter())
                .map(decode)
                .collect::<Result<_>>()?
        };
        match h.mode {
            Mode::Bytes => Ok(parts.concat()),
            Mode::Image { width, height, tile } => {
                let (width, height) = (width as usize, height as usize);
                let residuals = image::untile(&parts, width, height, tile as usize);
                let pixels = image::unresiduals(&residuals, width, height);
                let mut out = h.image_header.clone();
                out.extend_from_slice(&pixels);
                if out.len() as u64 != h.original_size {
                    return Err(Error::CorruptContainer("image size disagrees with header".into()));
                }
                Ok(out)
            }
        }
    }
}
