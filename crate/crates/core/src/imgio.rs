//! Grayscale and binary rasters, PGM (P5/P2) I/O and global thresholding.
//!
//! Coordinates are `(x, y)` with the origin at the top-left corner, `x`
//! growing to the right and `y` growing downward. Pixel data is row-major.

use thiserror::Error;

/// Luminance of a white pixel in a [`BinaryImage`].
pub const WHITE: u8 = 255;
/// Luminance of a black pixel in a [`BinaryImage`].
pub const BLACK: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("binary image contains value {value} at index {index}; only 0 and 255 are allowed")]
    NotBinary { index: usize, value: u8 },
    #[error("malformed PGM header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },
    #[error("PGM maxval {maxval} at byte {offset} is outside 1..=255")]
    UnsupportedMaxval { offset: usize, maxval: u32 },
    #[error("PGM zero dimension {width}x{height} at byte {offset}")]
    ZeroPgmDimension {
        offset: usize,
        width: usize,
        height: usize,
    },
    #[error("truncated pixel data at byte {offset}: expected {expected} samples, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("PGM sample {value} at byte {offset} exceeds maxval {maxval}")]
    SampleOutOfRange {
        offset: usize,
        value: u32,
        maxval: u32,
    },
}

/// Row-major 8-bit luminance raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, data.len())?;
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image of the given size with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }
}

/// Row-major raster whose pixels are exactly [`BLACK`] or [`WHITE`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        check_dims(width, height, data.len())?;
        if let Some((index, &value)) = data
            .iter()
            .enumerate()
            .find(|(_, &v)| v != BLACK && v != WHITE)
        {
            return Err(ImageError::NotBinary { index, value });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// All-black image.
    pub fn black(width: usize, height: usize) -> Result<Self, ImageError> {
        Self::new(width, height, vec![BLACK; width * height])
    }

    /// Builds an image from a predicate evaluated at every `(x, y)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut white: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, ImageError> {
        check_dims(width, height, width * height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(if white(x, y) { WHITE } else { BLACK });
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn is_white(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] == WHITE
    }

    /// Like [`is_white`](Self::is_white) but out-of-bounds coordinates read as black.
    pub fn is_white_at(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.is_white(x as usize, y as usize)
    }

    pub fn set_white(&mut self, x: usize, y: usize) {
        self.data[y * self.width + x] = WHITE;
    }

    pub fn set_black(&mut self, x: usize, y: usize) {
        self.data[y * self.width + x] = BLACK;
    }

    pub fn count_white(&self) -> usize {
        self.data.iter().filter(|&&v| v == WHITE).count()
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.clone(),
        }
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::ZeroDimension { width, height });
    }
    let expected = width * height;
    if len != expected {
        return Err(ImageError::BufferSize {
            expected,
            actual: len,
        });
    }
    Ok(())
}

/// Anything that can be serialized as an 8-bit PGM raster.
pub trait Raster {
    fn dimensions(&self) -> (usize, usize);
    fn pixels(&self) -> &[u8];
}

impl Raster for GrayImage {
    fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    fn pixels(&self) -> &[u8] {
        &self.data
    }
}

impl Raster for BinaryImage {
    fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }
    fn pixels(&self) -> &[u8] {
        &self.data
    }
}

/// Serializes `image` as a binary (P5) PGM with maxval 255.
pub fn write_pgm<R: Raster + ?Sized>(image: &R) -> Vec<u8> {
    let (w, h) = image.dimensions();
    let header = format!("P5\n{w} {h}\n255\n");
    let mut out = Vec::with_capacity(header.len() + w * h);
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(image.pixels());
    out
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_uint(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImageError::MalformedHeader {
                offset: start,
                reason: if start >= self.bytes.len() {
                    format!("unexpected end of data, expected {what}")
                } else {
                    format!("expected {what}")
                },
            });
        }
        // Digits only, so the slice is valid ASCII.
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or_default();
        text.parse::<u32>()
            .map_err(|_| ImageError::MalformedHeader {
                offset: start,
                reason: format!("{what} '{text}' does not fit in 32 bits"),
            })
    }
}

/// Parses a P5 (binary) or P2 (ASCII) PGM stream with maxval at most 255.
///
/// Samples are rescaled to 0..=255 when maxval is below 255.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    if bytes.len() < 2 || bytes[0] != b'P' || !(bytes[1] == b'5' || bytes[1] == b'2') {
        return Err(ImageError::MalformedHeader {
            offset: 0,
            reason: "expected magic number P5 or P2".into(),
        });
    }
    let binary = bytes[1] == b'5';
    let mut rd = HeaderReader { bytes, pos: 2 };
    if rd.pos < bytes.len() && !bytes[rd.pos].is_ascii_whitespace() && bytes[rd.pos] != b'#' {
        return Err(ImageError::MalformedHeader {
            offset: rd.pos,
            reason: "expected whitespace after magic number".into(),
        });
    }
    let dims_offset = {
        rd.skip_whitespace_and_comments();
        rd.pos
    };
    let width = rd.read_uint("width")? as usize;
    let height = rd.read_uint("height")? as usize;
    if width == 0 || height == 0 {
        return Err(ImageError::ZeroPgmDimension {
            offset: dims_offset,
            width,
            height,
        });
    }
    rd.skip_whitespace_and_comments();
    let maxval_offset = rd.pos;
    let maxval = rd.read_uint("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(ImageError::UnsupportedMaxval {
            offset: maxval_offset,
            maxval,
        });
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| ImageError::MalformedHeader {
            offset: dims_offset,
            reason: "image dimensions overflow".into(),
        })?;

    let scale = |v: u32| -> u8 {
        if maxval == 255 {
            v as u8
        } else {
            ((v * 255 + maxval / 2) / maxval) as u8
        }
    };

    let mut data = Vec::with_capacity(expected.min(bytes.len()));
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        match bytes.get(rd.pos) {
            Some(b) if b.is_ascii_whitespace() => rd.pos += 1,
            Some(_) => {
                return Err(ImageError::MalformedHeader {
                    offset: rd.pos,
                    reason: "expected single whitespace after maxval".into(),
                })
            }
            None => {
                return Err(ImageError::Truncated {
                    offset: rd.pos,
                    expected,
                    found: 0,
                })
            }
        }
        let raster = &bytes[rd.pos..];
        if raster.len() < expected {
            return Err(ImageError::Truncated {
                offset: bytes.len(),
                expected,
                found: raster.len(),
            });
        }
        for (i, &b) in raster[..expected].iter().enumerate() {
            if u32::from(b) > maxval {
                return Err(ImageError::SampleOutOfRange {
                    offset: rd.pos + i,
                    value: u32::from(b),
                    maxval,
                });
            }
            data.push(scale(u32::from(b)));
        }
    } else {
        for found in 0..expected {
            rd.skip_whitespace_and_comments();
            if rd.pos >= bytes.len() {
                return Err(ImageError::Truncated {
                    offset: rd.pos,
                    expected,
                    found,
                });
            }
            let offset = rd.pos;
            let v = rd.read_uint("sample")?;
            if v > maxval {
                return Err(ImageError::SampleOutOfRange {
                    offset,
                    value: v,
                    maxval,
                });
            }
            data.push(scale(v));
        }
    }
    GrayImage::new(width, height, data)
}

/// Global threshold: a pixel becomes white iff its value is strictly greater
/// than `threshold`.
pub fn binarize(image: &GrayImage, threshold: u8) -> BinaryImage {
    BinaryImage {
        width: image.width,
        height: image.height,
        data: image
            .data
            .iter()
            .map(|&v| if v > threshold { WHITE } else { BLACK })
            .collect(),
    }
}

/// Otsu's threshold over the 256-bin histogram.
///
/// Pixels `<= t` form the dark class. Among thresholds with maximal
/// between-class variance the smallest one wins. An image with a single
/// distinct value returns that value.
pub fn otsu_threshold(image: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in &image.data {
        hist[v as usize] += 1;
    }
    let distinct: Vec<usize> = (0..256).filter(|&v| hist[v] > 0).collect();
    if distinct.len() == 1 {
        return distinct[0] as u8;
    }

    let total = image.data.len() as f64;
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as f64 * c as f64)
        .sum();

    let mut best_t = 0u8;
    let mut best_var = -1.0f64;
    let mut w0 = 0.0f64;
    let mut sum0 = 0.0f64;
    for (t, &count) in hist.iter().enumerate() {
        w0 += count as f64;
        sum0 += t as f64 * count as f64;
        let w1 = total - w0;
        let var = if w0 == 0.0 || w1 == 0.0 {
            0.0
        } else {
            let mean0 = sum0 / w0;
            let mean1 = (sum_all - sum0) / w1;
            let diff = mean0 - mean1;
            w0 * w1 * diff * diff
        };
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}
