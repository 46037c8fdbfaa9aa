//! 8-bit grayscale PGM, plain (`P2`) and raw (`P5`).

use std::path::Path;

use crate::error::{io_error, Error, Result};

/// Row-major grayscale pixels kept as raw sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Pgm(format!("empty image {width}x{height}")));
        }
        if pixels.len() != width * height {
            return Err(Error::LengthMismatch { expected: width * height, found: pixels.len() });
        }
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(Error::Pgm("non-finite pixel".into()));
        }
        Ok(Image { width, height, pixels })
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Pgm(format!("expected {what} at byte {start}")))
    }
}

pub fn parse_pgm(data: &[u8]) -> Result<Image> {
    let raw = match data.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(Error::Pgm("missing P2/P5 magic".into())),
    };
    let mut c = Cursor { data, pos: 2 };
    let width = c.number("width")?;
    let height = c.number("height")?;
    let maxval = c.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!("maxval {maxval} is not 8-bit")));
    }
    let n = width.checked_mul(height).ok_or_else(|| Error::Pgm(format!("image {width}x{height} too large")))?;
    let mut pixels = Vec::with_capacity(n);
    if raw {
        // Exactly one whitespace byte separates the header from the samples.
        match data.get(c.pos) {
            Some(b) if b.is_ascii_whitespace() => c.pos += 1,
            _ => return Err(Error::Pgm("missing separator before raster".into())),
        }
        let body = data
            .get(c.pos..c.pos + n)
            .ok_or_else(|| Error::Pgm(format!("raster holds {} of {n} bytes", data.len() - c.pos)))?;
        pixels.extend(body.iter().map(|&b| b as f64));
    } else {
        for _ in 0..n {
            pixels.push(c.number("sample")? as f64);
        }
    }
    if let Some(&p) = pixels.iter().find(|&&p| p > maxval as f64) {
        return Err(Error::Pgm(format!("sample {p} exceeds maxval {maxval}")));
    }
    Image::new(width, height, pixels)
}

pub fn read_pgm(path: &Path) -> Result<Image> {
    let data = std::fs::read(path).map_err(io_error(path))?;
    parse_pgm(&data)
}

/// `P5` bytes; samples are rounded and clamped to `0..=255`.
pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.pixels.iter().map(|&p| p.round().clamp(0.0, 255.0) as u8));
    out
}

pub fn write_pgm(path: &Path, img: &Image) -> Result<()> {
    std::fs::write(path, encode_pgm(img)).map_err(io_error(path))
}
