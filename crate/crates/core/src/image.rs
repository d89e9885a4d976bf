//! 8-bit grayscale images: binary PGM parsing, above-pixel residuals and
//! square tiling.

use crate::error::{Error, Result};

/// Tile edge in pixels.
pub const TILE: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    /// Row-major pixels.
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::Image(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self { width, height, pixels })
    }

    /// Binary PGM encoding with maxval 255.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Splits a binary PGM into its header bytes (kept verbatim) and pixels.
pub fn parse_pgm(bytes: &[u8]) -> Result<(Vec<u8>, GrayImage)> {
    if !bytes.starts_with(b"P5") {
        return Err(Error::Image("not a binary PGM (P5)".into()));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Image(format!("malformed header near byte {start}")))?;
    }
    // exactly one whitespace byte separates the header from the raster
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Image("header does not end in whitespace".into()));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Image(format!("maxval {maxval} is not an 8-bit depth")));
    }
    let area = width
        .checked_mul(height)
        .ok_or_else(|| Error::Image("image dimensions overflow".into()))?;
    if bytes.len() - pos != area {
        return Err(Error::Image(format!(
            "expected {area} pixel bytes, found {}",
            bytes.len() - pos
        )));
    }
    let img = GrayImage::new(width, height, bytes[pos..].to_vec())?;
    Ok((bytes[..pos].to_vec(), img))
}

/// `pixel - prediction mod 256`: the pixel above, the left neighbour on the
/// first row, and 0 for the top-left pixel.
pub fn residuals(img: &GrayImage) -> Vec<u8> {
    let w = img.width;
    let p = &img.pixels;
    let mut out = Vec::with_capacity(p.len());
    for (i, &px) in p.iter().enumerate() {
        let pred = if i >= w {
            p[i - w]
        } else if i > 0 {
            p[i - 1]
        } else {
            0
        };
        out.push(px.wrapping_sub(pred));
    }
    out
}

pub fn unresiduals(res: &[u8], width: usize, height: usize) -> Vec<u8> {
    let mut p = vec![0u8; width * height];
    for i in 0..p.len() {
        let pred = if i >= width {
            p[i - width]
        } else if i > 0 {
            p[i - 1]
        } else {
            0
        };
        p[i] = res[i].wrapping_add(pred);
    }
    p
}

/// Cuts a `width x height` plane into `tile x tile` blocks in row-major tile
/// order. Edge tiles are padded by repeating the last row and column.
pub fn tiles(plane: &[u8], width: usize, height: usize, tile: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(width.div_ceil(tile) * height.div_ceil(tile));
    for ty in (0..height).step_by(tile) {
        for tx in (0..width).step_by(tile) {
            let mut block = Vec::with_capacity(tile * tile);
            for dy in 0..tile {
                let y = (ty + dy).min(height - 1);
                for dx in 0..tile {
                    let x = (tx + dx).min(width - 1);
                    block.push(plane[y * width + x]);
                }
            }
            out.push(block);
        }
    }
    out
}

/// Inverse of [`tiles`]; padding is dropped.
pub fn untile(blocks: &[Vec<u8>], width: usize, height: usize, tile: usize) -> Vec<u8> {
    let mut plane = vec![0u8; width * height];
    let across = width.div_ceil(tile);
    for (b, block) in blocks.iter().enumerate() {
        let (tx, ty) = ((b % across) * tile, (b / across) * tile);
        for dy in 0..tile.min(height.saturating_sub(ty)) {
            let cols = tile.min(width - tx);
            let src = &block[dy * tile..dy * tile + cols];
            let row = (ty + dy) * width + tx;
            plane[row..row + cols].copy_from_slice(src);
        }
    }
    plane
}
