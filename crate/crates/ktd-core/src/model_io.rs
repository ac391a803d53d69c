//! The `.ktdm` model file: a JSON manifest followed by the factor payloads
//! as embedded `.ten` blobs.
//!
//! Layout: magic `KTDM`, version byte `1`, u32-LE manifest length, manifest
//! JSON, then `R * M` `.ten` blobs in term-major order. JSON floats print in
//! shortest round-trip form, so `load(save(model)) == model` bitwise.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::model::{DecomposeMethod, KtdModel, ModelMeta, PhaseTimings, SketchMeta};
use crate::{DimsGrid, KtdError, Result};

const MAGIC: &[u8; 4] = b"KTDM";
const VERSION: u8 = 1;

#[derive(Serialize, Deserialize)]
struct ManifestV1 {
    schema: String,
    grid: Vec<Vec<usize>>,
    sigmas: Vec<f64>,
    method: DecomposeMethod,
    seed: u64,
    sketch: SketchMeta,
    clamped: bool,
    passes: usize,
    timings: PhaseTimings,
    factor_bytes: Vec<u64>,
}

fn fmt_err(path: &Path, detail: impl Into<String>) -> KtdError {
    KtdError::Format {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

pub fn model_to_bytes(model: &KtdModel) -> Vec<u8> {
    let blobs: Vec<Vec<u8>> = model
        .factors
        .iter()
        .flat_map(|term| term.iter().map(tensor_core::io::to_bytes))
        .collect();
    let manifest = ManifestV1 {
        schema: "ktdm/1".into(),
        grid: model.grid.rows().to_vec(),
        sigmas: model.sigmas.clone(),
        method: model.meta.method,
        seed: model.meta.seed,
        sketch: model.meta.sketch,
        clamped: model.meta.clamped,
        passes: model.meta.passes,
        timings: model.meta.timings,
        factor_bytes: blobs.iter().map(|b| b.len() as u64).collect(),
    };
    let manifest_json = serde_json::to_vec(&manifest).expect("manifest serializes");

    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(manifest_json.len() as u32).to_le_bytes());
    out.extend_from_slice(&manifest_json);
    for blob in &blobs {
        out.extend_from_slice(blob);
    }
    out
}

pub fn model_from_bytes(bytes: &[u8], path: &Path) -> Result<KtdModel> {
    if bytes.len() < 9 {
        return Err(fmt_err(path, "truncated header"));
    }
    if &bytes[0..4] != MAGIC {
        return Err(fmt_err(path, "bad magic, not a .ktdm file"));
    }
    if bytes[4] != VERSION {
        return Err(fmt_err(path, format!("unsupported version {}", bytes[4])));
    }
    let manifest_len = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let manifest_end = 9 + manifest_len;
    if bytes.len() < manifest_end {
        return Err(fmt_err(path, "truncated manifest"));
    }
    let manifest: ManifestV1 = serde_json::from_slice(&bytes[9..manifest_end])
        .map_err(|e| fmt_err(path, format!("manifest parse error: {e}")))?;
    if manifest.schema != "ktdm/1" {
        return Err(fmt_err(path, format!("unknown schema {}", manifest.schema)));
    }

    let grid = DimsGrid::new(manifest.grid)?;
    let terms = manifest.sigmas.len();
    let blocks = grid.num_blocks();
    if manifest.factor_bytes.len() != terms * blocks {
        return Err(fmt_err(
            path,
            format!(
                "{} factor blobs for {} terms x {} blocks",
                manifest.factor_bytes.len(),
                terms,
                blocks
            ),
        ));
    }

    let mut offset = manifest_end;
    let mut factors = Vec::with_capacity(terms);
    let mut lens = manifest.factor_bytes.iter();
    for _ in 0..terms {
        let mut term = Vec::with_capacity(blocks);
        for _ in 0..blocks {
            let len = *lens.next().unwrap() as usize;
            if bytes.len() < offset + len {
                return Err(fmt_err(path, "truncated factor payload"));
            }
            term.push(tensor_core::io::from_bytes(&bytes[offset..offset + len], path)?);
            offset += len;
        }
        factors.push(term);
    }
    if offset != bytes.len() {
        return Err(fmt_err(path, "trailing bytes after payload"));
    }

    KtdModel::new(
        grid,
        manifest.sigmas,
        factors,
        ModelMeta {
            method: manifest.method,
            timings: manifest.timings,
            seed: manifest.seed,
            sketch: manifest.sketch,
            clamped: manifest.clamped,
            passes: manifest.passes,
        },
    )
}

pub fn save_model(path: impl AsRef<Path>, model: &KtdModel) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::fs::File::create(path).map_err(|e| KtdError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    f.write_all(&model_to_bytes(model)).map_err(|e| KtdError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<KtdModel> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| KtdError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
    model_from_bytes(&bytes, path)
}
