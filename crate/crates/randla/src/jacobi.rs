//! Dense SVD by one-sided (Hestenes) Jacobi rotations.
//!
//! Column pairs of the working matrix are rotated until all are mutually
//! orthogonal; column norms are then the singular values and the accumulated
//! rotations give the right factor. Converges unconditionally and computes
//! small singular values to high relative accuracy, which the composite
//! singular-value bookkeeping downstream depends on.

use crate::{Matrix, RandlaError, Result};

const MAX_SWEEPS: usize = 60;
/// Columns below this fraction of the largest are numerically null: their
/// directions carry no information, so pairs touching them are not rotated
/// and their left vectors come from orthonormal completion.
const NOISE_FLOOR: f64 = 1e-14;

/// Two distinct columns of a column-major backing slice, mutable.
fn col_pair_mut(data: &mut [f64], rows: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(p < q);
    let (head, tail) = data.split_at_mut(q * rows);
    (&mut head[p * rows..(p + 1) * rows], &mut tail[..rows])
}

fn col(data: &[f64], rows: usize, c: usize) -> &[f64] {
    &data[c * rows..(c + 1) * rows]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full SVD of `m` as (U, sigma, V) with `m = U * diag(sigma) * V^T`,
/// sigma sorted nonincreasing, U and V column-orthonormal with
/// `min(rows, cols)` columns each.
pub(crate) fn jacobi_svd(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(RandlaError::EmptyMatrix);
    }
    if rows < cols {
        let (u, s, v) = jacobi_svd(&m.transpose())?;
        return Ok((v, s, u));
    }
    if rows > cols {
        // precondition: sweep the small square triangular factor instead
        let qr = m.clone().qr();
        let (u_r, s, v) = jacobi_core(&qr.r())?;
        return Ok((qr.q() * u_r, s, v));
    }
    jacobi_core(m)
}

fn jacobi_core(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let (rows, cols) = m.shape();
    // LAPACK-style relative threshold for declaring a pair orthogonal
    let pair_tol = (rows as f64).sqrt() * f64::EPSILON;

    let mut w = m.clone();
    let mut v = Matrix::identity(cols, cols);
    let mut sq = vec![0.0f64; cols];

    for _sweep in 0..MAX_SWEEPS {
        let wdata = w.as_mut_slice();
        let vdata = v.as_mut_slice();
        // exact norms each sweep; incremental updates drift on
        // rank-deficient columns
        for (c, slot) in sq.iter_mut().enumerate() {
            *slot = dot(col(wdata, rows, c), col(wdata, rows, c));
        }
        let floor_sq = sq.iter().cloned().fold(0.0, f64::max) * NOISE_FLOOR * NOISE_FLOOR;

        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in (p + 1)..cols {
                let alpha = sq[p];
                let beta = sq[q];
                if alpha <= floor_sq || beta <= floor_sq {
                    continue;
                }
                let gamma = {
                    let (cp, cq) = col_pair_mut(wdata, rows, p, q);
                    dot(cp, cq)
                };
                if gamma.abs() <= pair_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                {
                    let (cp, cq) = col_pair_mut(wdata, rows, p, q);
                    for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                        let x = *a;
                        let y = *b;
                        *a = cs * x - sn * y;
                        *b = sn * x + cs * y;
                    }
                }
                {
                    let (vp, vq) = col_pair_mut(vdata, cols, p, q);
                    for (a, b) in vp.iter_mut().zip(vq.iter_mut()) {
                        let x = *a;
                        let y = *b;
                        *a = cs * x - sn * y;
                        *b = sn * x + cs * y;
                    }
                }
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
    }

    // recompute norms exactly, order descending
    let norms: Vec<f64> = (0..cols).map(|c| w.column(c).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma_max = norms[order[0]];
    let direction_floor = sigma_max * NOISE_FLOOR;

    let mut u = Matrix::zeros(rows, cols);
    let mut right = Matrix::zeros(cols, cols);
    let mut singulars = Vec::with_capacity(cols);
    let mut noise_columns = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singulars.push(sigma);
        right.set_column(dst, &v.column(src));
        if sigma > direction_floor && sigma > 0.0 {
            let scaled = w.column(src) / sigma;
            u.set_column(dst, &scaled);
        } else {
            noise_columns.push(dst);
        }
    }
    complete_orthonormal(&mut u, &noise_columns);
    Ok((u, singulars, right))
}

/// Fills the listed columns with unit vectors orthogonal to all others so
/// the factor stays column-orthonormal even past the numerical rank. One
/// batch pass: each candidate basis vector is tried at most once.
fn complete_orthonormal(u: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let rows = u.nrows();
    let cols = u.ncols();
    let mut unfilled: std::collections::HashSet<usize> = missing.iter().copied().collect();
    let mut pending = missing.iter().copied();
    let mut dst = pending.next();

    let mut cand = vec![0.0f64; rows];
    for k in 0..rows {
        let Some(target) = dst else { break };
        cand.fill(0.0);
        cand[k] = 1.0;
        for _gs in 0..2 {
            for c in 0..cols {
                if unfilled.contains(&c) {
                    continue;
                }
                let col = &u.as_slice()[c * rows..(c + 1) * rows];
                let proj: f64 = col.iter().zip(&cand).map(|(a, b)| a * b).sum();
                if proj != 0.0 {
                    for (slot, &a) in cand.iter_mut().zip(col) {
                        *slot -= proj * a;
                    }
                }
            }
        }
        let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.5 {
            for (r, &val) in cand.iter().enumerate() {
                u[(r, target)] = val / norm;
            }
            unfilled.remove(&target);
            dst = pending.next();
        }
    }
}
