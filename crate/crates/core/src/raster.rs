//! RGB raster images: PNG / binary PPM codecs and integer box downscaling.
//!
//! Coordinates are row-major with the origin at the top-left corner; `y` grows
//! downward.

use std::io::Cursor;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RasterError {
    #[error("unknown image format (no PNG or P6 signature)")]
    UnknownFormat,
    #[error("corrupt image stream: {0}")]
    CorruptStream(String),
    #[error("image has a zero dimension")]
    ZeroDimension,
    #[error("pixel buffer holds {actual} bytes, expected {expected}")]
    BufferSize { expected: usize, actual: usize },
    #[error("resize factor must be at least 1")]
    ZeroFactor,
}

pub type Rgb = [u8; 3];

/// Column/row index into an image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

/// 8-bit RGB image, row-major, three bytes per pixel.
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RasterImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl RasterImage {
    /// Wraps an interleaved RGB buffer of exactly `width * height * 3` bytes.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroDimension);
        }
        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(3))
            .ok_or(RasterError::ZeroDimension)?;
        if data.len() != expected {
            return Err(RasterError::BufferSize {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroDimension);
        }
        let data = color.iter().copied().cycle().take(width * height * 3).collect();
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Rgb,
    ) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroDimension);
        }
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend_from_slice(&f(x, y));
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

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, p: Rgb) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&p);
    }

    pub fn pixel_at(&self, c: PixelCoord) -> Option<Rgb> {
        (c.x < self.width && c.y < self.height).then(|| self.get(c.x, c.y))
    }

    /// Pixels in raster order.
    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    /// One row as interleaved RGB bytes.
    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * 3;
        &self.data[y * stride..(y + 1) * stride]
    }
}

const PNG_MAGIC: &[u8] = &[0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

pub fn detect_format(bytes: &[u8]) -> Option<ImageFormat> {
    if bytes.starts_with(PNG_MAGIC) {
        Some(ImageFormat::Png)
    } else if bytes.starts_with(b"P6") {
        Some(ImageFormat::Ppm)
    } else {
        None
    }
}

/// Decodes a PNG or binary PPM (P6, maxval 255) byte stream.
pub fn decode_image(bytes: &[u8]) -> Result<RasterImage, RasterError> {
    match detect_format(bytes) {
        Some(ImageFormat::Png) => decode_png(bytes),
        Some(ImageFormat::Ppm) => decode_ppm(bytes),
        None => Err(RasterError::UnknownFormat),
    }
}

pub fn encode_image(img: &RasterImage, format: ImageFormat) -> Vec<u8> {
    match format {
        ImageFormat::Ppm => encode_ppm(img),
        ImageFormat::Png => encode_png(img),
    }
}

fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

struct PpmHeader<'a> {
    rest: &'a [u8],
}

impl<'a> PpmHeader<'a> {
    fn skip_space_and_comments(&mut self) {
        loop {
            match self.rest.first() {
                Some(b) if b.is_ascii_whitespace() => self.rest = &self.rest[1..],
                Some(b'#') => {
                    let end = self
                        .rest
                        .iter()
                        .position(|&b| b == b'\n')
                        .unwrap_or(self.rest.len());
                    self.rest = &self.rest[end..];
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, RasterError> {
        self.skip_space_and_comments();
        let len = self.rest.iter().take_while(|b| b.is_ascii_digit()).count();
        if len == 0 {
            return Err(RasterError::CorruptStream(format!("missing PPM {what}")));
        }
        let text = std::str::from_utf8(&self.rest[..len]).expect("ascii digits");
        self.rest = &self.rest[len..];
        text.parse()
            .map_err(|_| RasterError::CorruptStream(format!("PPM {what} out of range")))
    }
}

fn decode_ppm(bytes: &[u8]) -> Result<RasterImage, RasterError> {
    let mut hdr = PpmHeader { rest: &bytes[2..] };
    if !hdr.rest.first().is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(RasterError::UnknownFormat);
    }
    let width = hdr.number("width")?;
    let height = hdr.number("height")?;
    let maxval = hdr.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(RasterError::ZeroDimension);
    }
    if maxval != 255 {
        return Err(RasterError::CorruptStream(format!(
            "unsupported PPM maxval {maxval}"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    match hdr.rest.split_first() {
        Some((b, rest)) if b.is_ascii_whitespace() => hdr.rest = rest,
        _ => return Err(RasterError::CorruptStream("PPM header not terminated".into())),
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| RasterError::CorruptStream("PPM dimensions overflow".into()))?;
    if hdr.rest.len() < len {
        return Err(RasterError::CorruptStream(format!(
            "PPM payload truncated: {} of {len} bytes",
            hdr.rest.len()
        )));
    }
    RasterImage::from_raw(width, height, hdr.rest[..len].to_vec())
}

fn png_err(e: png::DecodingError) -> RasterError {
    RasterError::CorruptStream(e.to_string())
}

fn decode_png(bytes: &[u8]) -> Result<RasterImage, RasterError> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
    let mut reader = decoder.read_info().map_err(png_err)?;
    let (width, height) = {
        let info = reader.info();
        (info.width as usize, info.height as usize)
    };
    if width == 0 || height == 0 {
        return Err(RasterError::ZeroDimension);
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| RasterError::CorruptStream("PNG too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(png_err)?;
    let buf = &buf[..frame.buffer_size()];
    let channels = match frame.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::GrayscaleAlpha => 2,
        png::ColorType::Rgb => 3,
        png::ColorType::Rgba => 4,
        png::ColorType::Indexed => {
            return Err(RasterError::CorruptStream("unexpanded palette".into()))
        }
    };
    if frame.bit_depth != png::BitDepth::Eight {
        return Err(RasterError::CorruptStream(format!(
            "unsupported PNG bit depth {:?}",
            frame.bit_depth
        )));
    }
    let data: Vec<u8> = if channels == 3 {
        buf.to_vec()
    } else {
        buf.chunks_exact(channels)
            .flat_map(|c| match channels {
                1 | 2 => [c[0], c[0], c[0]],
                _ => [c[0], c[1], c[2]],
            })
            .collect()
    };
    RasterImage::from_raw(width, height, data)
}

fn encode_png(img: &RasterImage) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width as u32, img.height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().expect("writing to a Vec cannot fail");
        writer
            .write_image_data(&img.data)
            .expect("buffer length matches header");
    }
    out
}

/// Integer division rounding to nearest, ties up. `den` must be non-zero.
#[inline]
pub(crate) fn div_round(num: u64, den: u64) -> u64 {
    (2 * num + den) / (2 * den)
}

/// Downscales by an integer factor, averaging each `factor x factor` block.
///
/// Edge blocks that hang off the image average only the pixels they cover.
pub fn resize_box(img: &RasterImage, factor: usize) -> Result<RasterImage, RasterError> {
    if factor == 0 {
        return Err(RasterError::ZeroFactor);
    }
    if factor == 1 {
        return Ok(img.clone());
    }
    let out_w = img.width.div_ceil(factor);
    let out_h = img.height.div_ceil(factor);
    let mut data = Vec::with_capacity(out_w * out_h * 3);
    for by in 0..out_h {
        let y0 = by * factor;
        let y1 = (y0 + factor).min(img.height);
        for bx in 0..out_w {
            let x0 = bx * factor;
            let x1 = (x0 + factor).min(img.width);
            let mut sum = [0u64; 3];
            for y in y0..y1 {
                for px in img.row(y)[x0 * 3..x1 * 3].chunks_exact(3) {
                    sum[0] += px[0] as u64;
                    sum[1] += px[1] as u64;
                    sum[2] += px[2] as u64;
                }
            }
            let n = ((y1 - y0) * (x1 - x0)) as u64;
            data.extend(sum.iter().map(|&s| div_round(s, n) as u8));
        }
    }
    RasterImage::from_raw(out_w, out_h, data)
}
