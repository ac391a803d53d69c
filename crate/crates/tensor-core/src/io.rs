//! The `.ten` binary tensor format.
//!
//! Layout: magic `KTDT`, version byte `1`, u32-LE order `N`, `N` u64-LE
//! extents, then `product(dims)` f64-LE values in canonical (row-major)
//! order. Readers reject wrong magic or version and truncated payloads.

use std::io::{Read, Write};
use std::path::Path;

use crate::tensor::DenseTensor;
use crate::{Result, TensorError};

pub const MAGIC: &[u8; 4] = b"KTDT";
pub const VERSION: u8 = 1;

fn fmt_err(path: &Path, detail: impl Into<String>, offset: u64) -> TensorError {
    TensorError::Format {
        path: path.display().to_string(),
        detail: detail.into(),
        offset,
    }
}

fn io_err(path: &Path, source: std::io::Error) -> TensorError {
    TensorError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Serializes a tensor to the `.ten` byte layout.
pub fn to_bytes(t: &DenseTensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(9 + 8 * t.order() + 8 * t.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(t.order() as u32).to_le_bytes());
    for &d in t.dims() {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses the `.ten` byte layout; `path` only labels errors.
pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<DenseTensor> {
    let mut off = 0usize;
    let take = |off: &mut usize, n: usize, what: &str| -> Result<&[u8]> {
        if *off + n > bytes.len() {
            return Err(fmt_err(path, format!("truncated {what}"), *off as u64));
        }
        let s = &bytes[*off..*off + n];
        *off += n;
        Ok(s)
    };

    let magic = take(&mut off, 4, "magic")?;
    if magic != MAGIC {
        return Err(fmt_err(path, "bad magic, not a .ten file", 0));
    }
    let version = take(&mut off, 1, "version")?[0];
    if version != VERSION {
        return Err(fmt_err(path, format!("unsupported version {version}"), 4));
    }
    let order = u32::from_le_bytes(take(&mut off, 4, "order")?.try_into().unwrap()) as usize;
    if order == 0 {
        return Err(fmt_err(path, "order must be >= 1", 5));
    }
    let mut dims = Vec::with_capacity(order);
    for _ in 0..order {
        let at = off as u64;
        let d = u64::from_le_bytes(take(&mut off, 8, "extent")?.try_into().unwrap());
        if d == 0 {
            return Err(fmt_err(path, "zero extent", at));
        }
        dims.push(d as usize);
    }
    let count: usize = dims.iter().product();
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        let v = f64::from_le_bytes(take(&mut off, 8, "payload")?.try_into().unwrap());
        data.push(v);
    }
    if off != bytes.len() {
        return Err(fmt_err(path, "trailing bytes after payload", off as u64));
    }
    DenseTensor::new(dims, data)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&to_bytes(t)).map_err(|e| io_err(path, e))
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| io_err(path, e))?;
    from_bytes(&bytes, path)
}
