//! Factorizations under an explicit pass budget.
//!
//! A budget of `v` total reads of the data matrix is spent as follows:
//!
//! * `v == 1`: one-pass co-sketch. Draw Gaussian Ω and Ψ, form `Y = XΩ` and
//!   `W = XᵀΨ` in a single fused sweep, take `Q = qr(Y)` and recover the
//!   small factor as `B = (ΨᵀQ)⁺ Wᵀ`, so `X ≈ QB`.
//! * even `v`: the sketch pass, `(v-2)/2` stabilized power iterations
//!   (two passes each), and a final pass for `B = QᵀX`.
//! * odd `v >= 3`: as above plus one half-iteration — a single `Xᵀ`
//!   application with re-orthonormalization — after which the final pass
//!   forms `B̃ = XQ̃` and the factorization reads `X ≈ B̃ Q̃ᵀ`.
//!
//! An instrumented counter increments at every multiplication against the
//! data and is reported on the results; it always equals `v`.

use crate::rng::derive_seed;
use crate::sketch::{gaussian_sketch, thin_q, RangeBasis};
use crate::svd::{apply_sign_convention, dense_svd, TruncatedSvd};
use crate::{Matrix, RandlaError, Result, SketchConfig};

/// One sweep over the rows of `m` computing `y = m * omega` and
/// `w = mᵀ * psi` together, so the data is read once for both products.
fn fused_co_sketch(
    m: &Matrix,
    omega: &Matrix,
    psi: &Matrix,
    passes: &mut usize,
) -> (Matrix, Matrix) {
    let (rows, cols) = m.shape();
    let k = omega.ncols();
    let kp = psi.ncols();
    let mut y = Matrix::zeros(rows, k);
    let mut w = Matrix::zeros(cols, kp);
    for i in 0..rows {
        for j in 0..cols {
            let x = m[(i, j)];
            if x == 0.0 {
                continue;
            }
            for c in 0..k {
                y[(i, c)] += x * omega[(j, c)];
            }
            for c in 0..kp {
                w[(j, c)] += x * psi[(i, c)];
            }
        }
    }
    *passes += 1;
    (y, w)
}

/// Moore-Penrose pseudoinverse of a small square matrix via its SVD.
fn pinv(m: &Matrix) -> Result<Matrix> {
    let (u, s, v) = dense_svd(m)?;
    let cutoff = 1e-12 * s.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut inv = Matrix::zeros(m.ncols(), m.nrows());
    for (k, &sk) in s.iter().enumerate() {
        if sk > cutoff {
            let col_v = v.column(k);
            let col_u = u.column(k);
            for i in 0..m.ncols() {
                for j in 0..m.nrows() {
                    inv[(i, j)] += col_v[i] * col_u[j] / sk;
                }
            }
        }
    }
    Ok(inv)
}

struct PassOutcome {
    q_col: Matrix,
    svd: TruncatedSvd,
}

fn run_schedule(m: &Matrix, cfg: &SketchConfig) -> Result<PassOutcome> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(RandlaError::EmptyMatrix);
    }
    cfg.validate()?;
    let v = cfg.pass_budget.ok_or(RandlaError::BadPassBudget { got: 0 })?;
    let (width, clamped) = cfg.sketch_width(m.nrows(), m.ncols());
    let mut passes = 0usize;

    if v == 1 {
        let omega = gaussian_sketch(m.ncols(), width, cfg.seed);
        let psi = gaussian_sketch(m.nrows(), width, derive_seed(cfg.seed, 1));
        let (y, w) = fused_co_sketch(m, &omega, &psi, &mut passes);
        let q = thin_q(&y);
        let small = pinv(&(psi.transpose() * &q))? * w.transpose();
        let (u_small, singulars, right) = dense_svd(&small)?;
        let mut left = &q * u_small;
        let mut right = right;
        apply_sign_convention(&mut left, &mut right);
        debug_assert_eq!(passes, v);
        return Ok(PassOutcome {
            q_col: q,
            svd: TruncatedSvd {
                left,
                singulars,
                right,
                clamped,
                passes,
            }
            .truncate(cfg.rank),
        });
    }

    let omega = gaussian_sketch(m.ncols(), width, cfg.seed);
    let mut q = thin_q(&{
        passes += 1;
        m * &omega
    });
    let q_full = (v - 2) / 2;
    for _ in 0..q_full {
        let z = thin_q(&{
            passes += 1;
            m.transpose() * &q
        });
        q = thin_q(&{
            passes += 1;
            m * &z
        });
    }

    let (q_col, mut left, singulars, mut right);
    if v % 2 == 0 {
        let small = {
            passes += 1;
            q.transpose() * m
        };
        let (u_small, s, r) = dense_svd(&small)?;
        left = &q * u_small;
        singulars = s;
        right = r;
        q_col = q;
    } else {
        // half iteration folded into the final factor
        let q_row = thin_q(&{
            passes += 1;
            m.transpose() * &q
        });
        let tall = {
            passes += 1;
            m * &q_row
        };
        let (u, s, w) = dense_svd(&tall)?;
        left = u;
        singulars = s;
        right = &q_row * w;
        q_col = thin_q(&tall);
    }
    apply_sign_convention(&mut left, &mut right);
    debug_assert_eq!(passes, v);
    Ok(PassOutcome {
        q_col,
        svd: TruncatedSvd {
            left,
            singulars,
            right,
            clamped,
            passes,
        }
        .truncate(cfg.rank),
    })
}

/// Column-orthonormal range basis computed inside the pass budget
/// `cfg.pass_budget`; `passes` on the result is the instrumented count.
pub fn pass_efficient_range(m: &Matrix, cfg: &SketchConfig) -> Result<RangeBasis> {
    let out = run_schedule(m, cfg)?;
    Ok(RangeBasis {
        basis: out.q_col,
        passes: out.svd.passes,
        clamped: out.svd.clamped,
    })
}

/// Truncated SVD computed inside the pass budget.
pub fn pass_efficient_svd(m: &Matrix, cfg: &SketchConfig) -> Result<TruncatedSvd> {
    Ok(run_schedule(m, cfg)?.svd)
}
