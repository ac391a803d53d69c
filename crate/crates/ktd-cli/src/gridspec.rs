//! Flag-value parsers for block grids and integer lists.

use ktd_core::DimsGrid;

use crate::{usage, Result};

/// Parses `"4,4,4,4x5,5,5,5"` into a grid: blocks separated by `x`, one
/// comma-separated extent per mode.
pub fn parse_grid(spec: &str) -> Result<DimsGrid> {
    let rows: Vec<Vec<usize>> = spec
        .split('x')
        .map(parse_dims)
        .collect::<Result<_>>()?;
    DimsGrid::new(rows).map_err(|e| usage(format!("--grid: {e}")))
}

/// Parses `"20,20,20,20"` into an extent list.
pub fn parse_dims(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("expected a positive integer, got {tok:?}")))
                .and_then(|v| {
                    if v == 0 {
                        Err(usage(format!("extent must be >= 1, got {tok:?}")))
                    } else {
                        Ok(v)
                    }
                })
        })
        .collect()
}
