//! Binary PGM (P5) and PPM (P6) readers/writers, 8-bit only.
//!
//! Grayscale maps to an order-2 H x W tensor, color to H x W x 3, values in
//! [0, 255] as reals. The writer emits the canonical header
//! `P5\n<w> <h>\n255\n`, clamps to [0, 255] and rounds half away from zero,
//! so canonical-header files survive read -> write byte for byte.

use std::path::Path;

use tensor_core::DenseTensor;

use crate::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Gray,
    Rgb,
}

fn fmt_err(path: &Path, detail: impl Into<String>, offset: usize) -> crate::CliError {
    usage(format!(
        "{}: {} (byte {offset})",
        path.display(),
        detail.into()
    ))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    fn token(&mut self, path: &Path, what: &str) -> Result<(usize, u64)> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(fmt_err(path, format!("expected {what}"), start));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value: u64 = text
            .parse()
            .map_err(|_| fmt_err(path, format!("bad {what} {text:?}"), start))?;
        Ok((start, value))
    }
}

/// Parses a binary PGM/PPM byte buffer.
pub fn image_from_bytes(bytes: &[u8], path: &Path) -> Result<(DenseTensor, ImageFormat)> {
    if bytes.len() < 2 {
        return Err(fmt_err(path, "file too short for a netpbm magic", 0));
    }
    let format = match &bytes[0..2] {
        b"P5" => ImageFormat::Gray,
        b"P6" => ImageFormat::Rgb,
        other => {
            return Err(fmt_err(
                path,
                format!(
                    "unsupported magic {:?}; only binary P5/P6 handled",
                    String::from_utf8_lossy(other)
                ),
                0,
            ))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let (_, width) = cur.token(path, "width")?;
    let (_, height) = cur.token(path, "height")?;
    let (maxval_at, maxval) = cur.token(path, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(fmt_err(
            path,
            format!("unsupported maxval {maxval}; only 8-bit (<= 255) images handled"),
            maxval_at,
        ));
    }
    // exactly one whitespace byte separates the header from the payload
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(fmt_err(path, "missing whitespace before payload", cur.pos));
    }
    cur.pos += 1;

    let (w, h) = (width as usize, height as usize);
    if w == 0 || h == 0 {
        return Err(fmt_err(path, "zero image dimension", 2));
    }
    let channels = match format {
        ImageFormat::Gray => 1,
        ImageFormat::Rgb => 3,
    };
    let expected = w * h * channels;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(fmt_err(
            path,
            format!("payload truncated: expected {expected} bytes, got {}", payload.len()),
            cur.pos + payload.len(),
        ));
    }
    if payload.len() > expected {
        return Err(fmt_err(
            path,
            format!("trailing bytes after payload: expected {expected}, got {}", payload.len()),
            cur.pos + expected,
        ));
    }
    let data: Vec<f64> = payload.iter().map(|&b| b as f64).collect();
    let dims = match format {
        ImageFormat::Gray => vec![h, w],
        ImageFormat::Rgb => vec![h, w, 3],
    };
    // raster order (row-major, channels interleaved) matches the canonical
    // buffer order directly
    let tensor = DenseTensor::new(dims, data)
        .map_err(|e| fmt_err(path, format!("{e}"), cur.pos))?;
    Ok((tensor, format))
}

pub fn read_image(path: impl AsRef<Path>) -> Result<(DenseTensor, ImageFormat)> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    image_from_bytes(&bytes, path)
}

fn quantize(v: f64) -> u8 {
    // clamp then round half away from zero
    v.clamp(0.0, 255.0).round() as u8
}

/// Serializes an order-2 tensor as P5 or an H x W x 3 tensor as P6.
pub fn image_to_bytes(t: &DenseTensor) -> Result<Vec<u8>> {
    let (magic, h, w) = match t.dims() {
        [h, w] => ("P5", *h, *w),
        [h, w, 3] => ("P6", *h, *w),
        other => {
            return Err(usage(format!(
                "cannot write dims {other:?} as an image; need HxW or HxWx3"
            )))
        }
    };
    let mut out = format!("{magic}\n{w} {h}\n255\n").into_bytes();
    out.extend(t.data().iter().map(|&v| quantize(v)));
    Ok(out)
}

pub fn write_image(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    let path = path.as_ref();
    let bytes = image_to_bytes(t)?;
    std::fs::write(path, bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}
