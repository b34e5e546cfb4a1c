//! Singular value decomposition.
//!
//! Right singular vectors come from the Hermitian eigendecomposition of
//! `m* m`. The singular values are then read off as column norms of `m V`
//! after a one-sided Jacobi polish that re-orthogonalizes those columns, so
//! small singular values keep absolute accuracy `~eps * σ_max` instead of
//! the `~sqrt(eps) * σ_max` left over after squaring.

use super::eigen::{hermitian_eigen, Rotation};
use super::{ComplexMatrix, Tolerance, C64};
use crate::error::{Error, Result};

const POLISH_MAX_SWEEPS: usize = 60;
const POLISH_ORTHOGONALITY: f64 = 1e-15;

/// Singular values of an `r x c` matrix (`c` of them, sorted decreasing,
/// zero-padded), right vectors as a `c x c` unitary and left vectors as an
/// `r x c` matrix whose first `rank` columns are orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
    pub right: ComplexMatrix,
    pub left: ComplexMatrix,
    /// Number of singular values above `tol.rank_cutoff(σ_max)`.
    pub rank: usize,
}

impl SingularSpectrum {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `|m|^s = V diag(σ^s) V*` for `s > 0`.
    pub fn abs_power(&self, s: f64) -> ComplexMatrix {
        weighted_projector_sum(&self.right, &self.values, |x| pow_nonneg(x, s))
    }

    /// `|m*|^s = U diag(σ^s) U*` for `s > 0`.
    pub fn abs_adjoint_power(&self, s: f64) -> ComplexMatrix {
        weighted_projector_sum(&self.left, &self.values, |x| pow_nonneg(x, s))
    }

    /// Partial isometry `Σ_{k < rank} u_k v_k*`, the polar factor of `m`.
    pub fn partial_isometry(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.left.rows(), self.right.rows());
        for k in 0..self.rank {
            out = out + ComplexMatrix::outer(&self.left.column(k), &self.right.column(k));
        }
        out
    }

    /// Projection onto the span of the left vectors above the cutoff.
    pub fn range_projection(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.left.rows(), self.left.rows());
        for k in 0..self.rank {
            let u = self.left.column(k);
            out = out + ComplexMatrix::outer(&u, &u);
        }
        out
    }

    /// Projection onto the span of the right vectors above the cutoff.
    pub fn support_projection(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.right.rows(), self.right.rows());
        for k in 0..self.rank {
            let v = self.right.column(k);
            out = out + ComplexMatrix::outer(&v, &v);
        }
        out
    }
}

pub(crate) fn pow_nonneg(x: f64, s: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.powf(s)
    }
}

/// `Σ_k f(w_k) c_k c_k*` over the columns `c_k` of `basis`.
pub(crate) fn weighted_projector_sum(
    basis: &ComplexMatrix,
    weights: &[f64],
    f: impl Fn(f64) -> f64,
) -> ComplexMatrix {
    let mut scaled = basis.clone();
    for (j, &w) in weights.iter().enumerate() {
        let fw = f(w);
        for i in 0..basis.rows() {
            scaled[(i, j)] *= fw;
        }
    }
    scaled.mul_adjoint(basis)
}

pub fn svd(m: &ComplexMatrix, tol: &Tolerance) -> Result<SingularSpectrum> {
    let (rows, cols) = m.shape();
    let gram = m.gram();
    let eig = hermitian_eigen(&gram, &Tolerance::default())?;
    let mut v = eig.vectors;
    let mut b = m * &v;
    let negligible = (f64::EPSILON * f64::EPSILON * m.frobenius_norm()).powi(2);

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for i in 0..cols.saturating_sub(1) {
            for j in i + 1..cols {
                let (alpha, beta, gamma) = column_gram(&b, i, j);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                if gamma.norm() <= POLISH_ORTHOGONALITY * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                let rot = Rotation::annihilating(alpha, beta, gamma);
                rot.apply_right(&mut b, i, j);
                rot.apply_right(&mut v, i, j);
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
        sweeps += 1;
        if sweeps == POLISH_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_diagonal: max_column_coherence(&b),
            });
        }
    }

    let norms: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| b[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));

    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let right_cols: Vec<Vec<C64>> = order.iter().map(|&j| v.column(j)).collect();
    let left_cols: Vec<Vec<C64>> = order
        .iter()
        .map(|&j| {
            let sigma = norms[j];
            b.column(j)
                .into_iter()
                .map(|z| if sigma > 0.0 { z / sigma } else { C64::new(0.0, 0.0) })
                .collect()
        })
        .collect();
    let cutoff = tol.rank_cutoff(values.first().copied().unwrap_or(0.0));
    let rank = values.iter().filter(|&&s| s > cutoff).count();

    Ok(SingularSpectrum {
        values,
        right: ComplexMatrix::from_columns(&right_cols),
        left: ComplexMatrix::from_columns(&left_cols),
        rank,
    })
}

/// `σ_0(m)`, the operator norm.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m, &Tolerance::default())?.largest())
}

fn column_gram(b: &ComplexMatrix, i: usize, j: usize) -> (f64, f64, C64) {
    let mut alpha = 0.0;
    let mut beta = 0.0;
    let mut gamma = C64::new(0.0, 0.0);
    for k in 0..b.rows() {
        let x = b[(k, i)];
        let y = b[(k, j)];
        alpha += x.norm_sqr();
        beta += y.norm_sqr();
        gamma += x.conj() * y;
    }
    (alpha, beta, gamma)
}

fn max_column_coherence(b: &ComplexMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..b.cols() {
        for j in i + 1..b.cols() {
            let (alpha, beta, gamma) = column_gram(b, i, j);
            if alpha > 0.0 && beta > 0.0 {
                worst = worst.max(gamma.norm() / (alpha.sqrt() * beta.sqrt()));
            }
        }
    }
    worst
}
