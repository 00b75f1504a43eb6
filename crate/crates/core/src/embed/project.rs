use crate::error::{Error, Result};
use crate::numerics::{truncated_svd_with, Matrix, SvdMethod, SvdOptions};

/// 2-D coordinates of the rows of `vectors` on their first two principal
/// axes: the rank-2 SVD of the mean-centered matrix, scaled by the
/// singular values. Output order matches input order.
pub fn project_2d(vectors: &Matrix, seed: u64) -> Result<Vec<[f64; 2]>> {
    let (n, d) = vectors.shape();
    if n < 2 {
        return Err(Error::invalid("projection needs at least 2 vectors"));
    }
    if d < 2 {
        return Err(Error::invalid("projection needs vectors of dimension at least 2"));
    }
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(vectors.row(i)) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered = Matrix::from_fn(n, d, |i, j| vectors[(i, j)] - mean[j]);
    let options = SvdOptions {
        method: SvdMethod::Auto,
        seed,
        ..SvdOptions::default()
    };
    let factors = truncated_svd_with(&centered, 2, &options)?;
    let coords = factors.scaled_left();
    Ok((0..n).map(|i| [coords[(i, 0)], coords[(i, 1)]]).collect())
}
