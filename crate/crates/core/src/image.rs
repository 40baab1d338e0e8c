//! RGBA8 image buffer and PNG codec.

use std::io::Cursor;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("png encode failed: {0}")]
    Encode(#[from] png::EncodingError),
    #[error("png decode failed: {0}")]
    Decode(#[from] png::DecodingError),
    #[error("unsupported png layout: {0}")]
    Unsupported(String),
}

pub type Rgba = [u8; 4];

/// Row-major RGBA, 8 bits per channel.
#[derive(Clone, PartialEq, Eq)]
pub struct RgbaImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for RgbaImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RgbaImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

/// The engine-1 output is just an RGBA image.
pub type BaseImage = RgbaImage;

impl RgbaImage {
    pub fn new(width: u32, height: u32) -> Self {
        Self::filled(width, height, [0, 0, 0, 255])
    }

    pub fn filled(width: u32, height: u32, color: Rgba) -> Self {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n * 4);
        for _ in 0..n {
            pixels.extend_from_slice(&color);
        }
        RgbaImage {
            width,
            height,
            pixels,
        }
    }

    /// Wrap an existing buffer; `None` if its length is not `w * h * 4`.
    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Option<Self> {
        (pixels.len() == width as usize * height as usize * 4).then_some(RgbaImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.pixels
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 4
    }

    /// Panics when out of bounds.
    pub fn get(&self, x: u32, y: u32) -> Rgba {
        assert!(x < self.width && y < self.height, "pixel ({x},{y}) out of bounds");
        let o = self.offset(x, y);
        [self.pixels[o], self.pixels[o + 1], self.pixels[o + 2], self.pixels[o + 3]]
    }

    pub fn put(&mut self, x: u32, y: u32, color: Rgba) {
        assert!(x < self.width && y < self.height, "pixel ({x},{y}) out of bounds");
        let o = self.offset(x, y);
        self.pixels[o..o + 4].copy_from_slice(&color);
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let start = self.offset(0, y);
        &self.pixels[start..start + self.width as usize * 4]
    }

    pub fn row_mut(&mut self, y: u32) -> &mut [u8] {
        let start = self.offset(0, y);
        let len = self.width as usize * 4;
        &mut self.pixels[start..start + len]
    }

    /// 8-bit RGBA PNG, non-interlaced, fixed filter and compression so the
    /// bytes only depend on the pixels.
    pub fn to_png(&self) -> Result<Vec<u8>, ImageError> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width, self.height);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            enc.set_compression(png::Compression::Fast);
            enc.set_filter(png::Filter::Paeth);
            let mut writer = enc.write_header()?;
            writer.write_image_data(&self.pixels)?;
            writer.finish()?;
        }
        Ok(out)
    }

    /// Decode any 8/16-bit grey, grey+alpha, RGB or RGBA PNG to RGBA8.
    pub fn from_png(bytes: &[u8]) -> Result<Self, ImageError> {
        let mut dec = png::Decoder::new(Cursor::new(bytes));
        dec.set_transformations(png::Transformations::EXPAND | png::Transformations::STRIP_16);
        let mut reader = dec.read_info()?;
        let size = reader
            .output_buffer_size()
            .ok_or_else(|| ImageError::Unsupported("image too large".into()))?;
        let mut buf = vec![0; size];
        let info = reader.next_frame(&mut buf)?;
        buf.truncate(info.buffer_size());
        if info.bit_depth != png::BitDepth::Eight {
            return Err(ImageError::Unsupported(format!("bit depth {:?}", info.bit_depth)));
        }
        let pixels = match info.color_type {
            png::ColorType::Rgba => buf,
            png::ColorType::Rgb => buf.chunks_exact(3).flat_map(|p| [p[0], p[1], p[2], 255]).collect(),
            png::ColorType::GrayscaleAlpha => buf.chunks_exact(2).flat_map(|p| [p[0], p[0], p[0], p[1]]).collect(),
            png::ColorType::Grayscale => buf.iter().flat_map(|&g| [g, g, g, 255]).collect(),
            other => return Err(ImageError::Unsupported(format!("color type {other:?}"))),
        };
        RgbaImage::from_raw(info.width, info.height, pixels)
            .ok_or_else(|| ImageError::Unsupported("row stride mismatch".into()))
    }
}

/// Top-to-bottom linear gradient, exact integer rounding.
pub fn vertical_gradient(top: [u8; 3], bottom: [u8; 3], width: u32, height: u32) -> RgbaImage {
    let mut img = RgbaImage::new(width, height);
    let span = u32::max(height, 2) - 1;
    for y in 0..height {
        let t = y.min(span);
        let mix = |a: u8, b: u8| ((u32::from(a) * (span - t) + u32::from(b) * t + span / 2) / span) as u8;
        let px = [mix(top[0], bottom[0]), mix(top[1], bottom[1]), mix(top[2], bottom[2]), 255];
        for chunk in img.row_mut(y).chunks_exact_mut(4) {
            chunk.copy_from_slice(&px);
        }
    }
    img
}

/// Width and height from a PNG header without decoding pixel data.
pub fn png_dimensions(bytes: &[u8]) -> Result<(u32, u32), ImageError> {
    let reader = png::Decoder::new(Cursor::new(bytes)).read_info()?;
    let info = reader.info();
    Ok((info.width, info.height))
}

/// Alpha-composite `src` over `dst` with an 8-bit alpha, rounding to nearest.
pub fn blend_over(dst: Rgba, src: [u8; 3], alpha: u8) -> Rgba {
    let a = u32::from(alpha);
    let mix = |d: u8, s: u8| ((u32::from(s) * a + u32::from(d) * (255 - a) + 127) / 255) as u8;
    [mix(dst[0], src[0]), mix(dst[1], src[1]), mix(dst[2], src[2]), 255]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let mut img = RgbaImage::filled(16, 8, [10, 20, 30, 255]);
        img.put(3, 4, [255, 0, 128, 7]);
        let png = img.to_png().unwrap();
        assert_eq!(&png[1..4], b"PNG");
        let back = RgbaImage::from_png(&png).unwrap();
        assert_eq!(back, img);
        assert_eq!(img.to_png().unwrap(), png);
    }

    #[test]
    fn from_raw_checks_length() {
        assert!(RgbaImage::from_raw(2, 2, vec![0; 16]).is_some());
        assert!(RgbaImage::from_raw(2, 2, vec![0; 15]).is_none());
    }

    #[test]
    fn garbage_is_a_decode_error() {
        assert!(matches!(RgbaImage::from_png(b"not a png"), Err(ImageError::Decode(_))));
    }

    #[test]
    fn blend_extremes() {
        assert_eq!(blend_over([0, 0, 0, 255], [255, 255, 255], 255), [255, 255, 255, 255]);
        assert_eq!(blend_over([9, 9, 9, 255], [255, 255, 255], 0), [9, 9, 9, 255]);
        assert_eq!(blend_over([0, 0, 0, 255], [255, 0, 0], 128), [128, 0, 0, 255]);
    }
}
