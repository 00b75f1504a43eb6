use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{dot, Matrix};
use crate::error::{Error, Result};
use crate::exec::Exec;

const MAX_SWEEPS: usize = 80;

/// Below this `m·n·min(m,n)` the exact path is always taken.
const EXACT_WORK_LIMIT: usize = 50_000_000;

/// Rank-`k` factors `U · diag(sigma) · Vᵀ`.
///
/// `sigma` is non-increasing and non-negative, `U` (m×k) and `V` (n×k) have
/// orthonormal columns, and the largest-magnitude entry of every `U` column
/// is positive (earliest row on ties).
#[derive(Clone, Debug, PartialEq)]
pub struct SvdFactors {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U · diag(sigma)`: one row per row of the decomposed matrix.
    pub fn scaled_left(&self) -> Matrix {
        let mut us = self.u.clone();
        us.scale_columns(&self.sigma);
        us
    }

    pub fn reconstruct(&self) -> Matrix {
        self.scaled_left()
            .matmul_with(&self.v.transpose(), Exec::Sequential)
            .expect("factor shapes are consistent")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvdMethod {
    /// Exact for small problems or when `k` is close to `min(m, n)`,
    /// randomized otherwise.
    Auto,
    /// One-sided Jacobi on the narrower orientation.
    Exact,
    /// Randomized range finder followed by an exact SVD of the projection.
    Randomized { oversample: usize, power_iters: usize },
}

impl SvdMethod {
    pub const DEFAULT_RANDOMIZED: SvdMethod = SvdMethod::Randomized {
        oversample: 20,
        power_iters: 4,
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SvdOptions {
    pub method: SvdMethod,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            method: SvdMethod::Auto,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

pub fn truncated_svd(m: &Matrix, k: usize) -> Result<SvdFactors> {
    truncated_svd_with(m, k, &SvdOptions::default())
}

pub fn truncated_svd_with(m: &Matrix, k: usize, options: &SvdOptions) -> Result<SvdFactors> {
    let (rows, cols) = m.shape();
    let min_dim = rows.min(cols);
    if k == 0 || k > min_dim {
        return Err(Error::invalid(format!(
            "rank {k} outside 1..={min_dim} for a {rows}x{cols} matrix"
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("SVD input".into()));
    }

    let method = match options.method {
        SvdMethod::Auto => {
            let SvdMethod::Randomized { oversample, .. } = SvdMethod::DEFAULT_RANDOMIZED else {
                unreachable!()
            };
            if k + oversample >= min_dim || rows * cols * min_dim <= EXACT_WORK_LIMIT {
                SvdMethod::Exact
            } else {
                SvdMethod::DEFAULT_RANDOMIZED
            }
        }
        other => other,
    };

    let (u, sigma, v) = match method {
        SvdMethod::Randomized {
            oversample,
            power_iters,
        } if k + oversample < min_dim => randomized(m, k + oversample, power_iters, options.seed, options.exec)?,
        _ => jacobi(m)?,
    };

    let mut factors = SvdFactors {
        u: u.leading_columns(k),
        sigma: sigma[..k].to_vec(),
        v: v.leading_columns(k),
    };
    fix_signs(&mut factors);
    Ok(factors)
}

/// `‖M − U·diag(sigma)·Vᵀ‖_F`.
pub fn frobenius_error(m: &Matrix, factors: &SvdFactors) -> Result<f64> {
    let k = factors.sigma.len();
    if factors.u.rows() != m.rows()
        || factors.v.rows() != m.cols()
        || factors.u.cols() != k
        || factors.v.cols() != k
    {
        return Err(Error::Shape(format!(
            "factors U {:?}, sigma {}, V {:?} do not fit a {:?} matrix",
            factors.u.shape(),
            k,
            factors.v.shape(),
            m.shape()
        )));
    }
    Ok(m.sub(&factors.reconstruct())?.frobenius_norm())
}

/// Thin SVD via one-sided (Hestenes) Jacobi; returns all `min(m, n)` triplets
/// sorted by decreasing singular value.
fn jacobi(m: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    if m.rows() < m.cols() {
        let (u, s, v) = jacobi(&m.transpose())?;
        return Ok((v, s, u));
    }
    let (rows, cols) = m.shape();
    let t = m.transpose();
    let mut work: Vec<Vec<f64>> = (0..cols).map(|j| t.row(j).to_vec()).collect();
    let mut right: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    let tol = f64::EPSILON * (rows as f64).sqrt().max(1.0);
    // Columns below this norm are rounding noise; rotating them never settles.
    let negligible = f64::EPSILON * m.frobenius_norm();
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&work[p], &work[p]);
                let beta = dot(&work[q], &work[q]);
                let gamma = dot(&work[p], &work[q]);
                if gamma == 0.0
                    || alpha.sqrt() <= negligible
                    || beta.sqrt() <= negligible
                    || gamma.abs() <= tol * alpha.sqrt() * beta.sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut work, p, q, c, s);
                rotate(&mut right, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = work.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    // Smaller singular values are indistinguishable from rounding error.
    let floor = (negligible * rows.max(cols) as f64).max(f64::MIN_POSITIVE);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(cols);
    let mut sigma = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > floor {
            u_cols.push(work[j].iter().map(|x| x / s).collect());
            sigma.push(s);
        } else {
            u_cols.push(vec![0.0; rows]);
            sigma.push(0.0);
            missing.push(slot);
        }
    }
    complete_basis(&mut u_cols, &missing);

    let u = Matrix::from_fn(rows, cols, |i, j| u_cols[j][i]);
    let v = Matrix::from_fn(cols, cols, |i, j| right[order[j]][i]);
    Ok((u, sigma, v))
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Fills the listed slots with unit vectors orthogonal to every other column,
/// drawn deterministically from the standard basis.
fn complete_basis(cols: &mut [Vec<f64>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let len = cols[0].len();
    let mut candidate = 0;
    for &slot in missing {
        loop {
            assert!(candidate < len, "cannot complete an orthonormal basis");
            let mut v = vec![0.0; len];
            v[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for (j, col) in cols.iter().enumerate() {
                    if j == slot || (missing.contains(&j) && col.iter().all(|&x| x == 0.0)) {
                        continue;
                    }
                    let proj = dot(col, &v);
                    for (x, c) in v.iter_mut().zip(col) {
                        *x -= proj * c;
                    }
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm > 0.5 {
                cols[slot] = v.into_iter().map(|x| x / norm).collect();
                break;
            }
        }
    }
}

/// Columns of `m` made orthonormal (two passes of Gram-Schmidt); dependent
/// columns are replaced by completion vectors so the width is preserved.
fn orthonormalize(m: &Matrix) -> Matrix {
    let t = m.transpose();
    let (rows, width) = m.shape();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(width);
    let mut missing = Vec::new();
    for j in 0..width {
        let mut v = t.row(j).to_vec();
        let original = dot(&v, &v).sqrt();
        for _ in 0..2 {
            for q in &cols {
                let proj = dot(q, &v);
                for (x, c) in v.iter_mut().zip(q) {
                    *x -= proj * c;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if original > 0.0 && norm > 1e-10 * original {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        } else {
            cols.push(vec![0.0; rows]);
            missing.push(j);
        }
    }
    complete_basis(&mut cols, &missing);
    Matrix::from_fn(rows, width, |i, j| cols[j][i])
}

fn randomized(
    m: &Matrix,
    width: usize,
    power_iters: usize,
    seed: u64,
    exec: Exec,
) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = Matrix::from_fn(m.cols(), width, |_, _| StandardNormal.sample(&mut rng));
    let mt = m.transpose();

    let mut q = orthonormalize(&m.matmul_with(&omega, exec)?);
    for _ in 0..power_iters {
        let z = orthonormalize(&mt.matmul_with(&q, exec)?);
        q = orthonormalize(&m.matmul_with(&z, exec)?);
    }
    // B = Qᵀ·M, formed as (Mᵀ·Q)ᵀ.
    let b = mt.matmul_with(&q, exec)?.transpose();
    let (ub, sigma, v) = jacobi(&b)?;
    let u = q.matmul_with(&ub, exec)?;
    Ok((u, sigma, v))
}

fn fix_signs(f: &mut SvdFactors) {
    for j in 0..f.sigma.len() {
        let mut best = 0;
        for i in 1..f.u.rows() {
            if f.u[(i, j)].abs() > f.u[(best, j)].abs() {
                best = i;
            }
        }
        if f.u[(best, j)] < 0.0 {
            for i in 0..f.u.rows() {
                f.u[(i, j)] = -f.u[(i, j)];
            }
            for i in 0..f.v.rows() {
                f.v[(i, j)] = -f.v[(i, j)];
            }
        }
    }
}
