//! Binary PNM images (P5 grayscale, P6 RGB, 8-bit) as per-channel matrices.

use std::path::Path;

use rand::seq::index;

use crate::data::synthetic::substream;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Channels are `height × width` matrices with values in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: Vec<Matrix>,
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::data(None, format!("bad PNM {what}")))
    }
}

impl Image {
    pub fn from_channels(channels: Vec<Matrix>) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::data(None, "image needs at least one channel"))?;
        let (height, width) = first.shape();
        if channels.iter().any(|c| c.shape() != (height, width)) {
            return Err(Error::data(None, "channel shapes differ"));
        }
        if channels.len() != 1 && channels.len() != 3 {
            return Err(Error::data(None, "PNM images have 1 or 3 channels"));
        }
        Ok(Image {
            width,
            height,
            channels,
        })
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let magic = bytes.get(..2).ok_or_else(|| Error::data(None, "empty image file"))?;
        let nch = match magic {
            b"P5" => 1,
            b"P6" => 3,
            _ => {
                return Err(Error::data(
                    None,
                    format!("unsupported image magic {:?}", String::from_utf8_lossy(magic)),
                ))
            }
        };
        let mut h = Header { bytes, pos: 2 };
        let width = h.number("width")?;
        let height = h.number("height")?;
        let maxval = h.number("maxval")?;
        if maxval != 255 {
            return Err(Error::data(None, format!("only 8-bit PNM supported, maxval {maxval}")));
        }
        // exactly one whitespace byte separates the header from the payload
        let start = h.pos + 1;
        let need = width * height * nch;
        let payload = bytes
            .get(start..start + need)
            .ok_or_else(|| Error::data(None, format!("truncated payload: need {need} bytes")))?;
        let channels = (0..nch)
            .map(|c| Matrix::from_fn(height, width, |i, j| payload[(i * width + j) * nch + c] as f64))
            .collect();
        Ok(Image {
            width,
            height,
            channels,
        })
    }

    /// Clamps to `[0, 255]` and rounds to the nearest integer.
    pub fn encode(&self) -> Vec<u8> {
        let nch = self.channels.len();
        let magic = if nch == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.reserve(self.width * self.height * nch);
        for i in 0..self.height {
            for j in 0..self.width {
                for c in &self.channels {
                    out.push(c[(i, j)].round().clamp(0.0, 255.0) as u8);
                }
            }
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::decode(&bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.encode())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
    }
}

/// Observed pixel positions after dropping a uniform `missing_fraction` of
/// the `rows × cols` grid; the same set applies to every channel.
pub fn mask_uniform(shape: (usize, usize), missing_fraction: f64, seed: u64) -> Result<Vec<(usize, usize)>> {
    if !(0.0..1.0).contains(&missing_fraction) {
        return Err(Error::param(format!(
            "missing_fraction must lie in [0, 1), got {missing_fraction}"
        )));
    }
    let (rows, cols) = shape;
    let total = rows * cols;
    let missing = (missing_fraction * total as f64).round() as usize;
    let mut dropped = vec![false; total];
    for k in index::sample(&mut substream(seed, 0x6d61736b), total, missing) {
        dropped[k] = true;
    }
    Ok((0..total)
        .filter(|&k| !dropped[k])
        .map(|k| (k / cols, k % cols))
        .collect())
}
