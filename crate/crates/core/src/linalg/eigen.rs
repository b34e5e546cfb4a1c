//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::{ComplexMatrix, Tolerance, C64};
use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius mass falls below this fraction
/// of `||m||_F`.
pub const JACOBI_CONVERGENCE: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted decreasing, eigenvectors as the columns of a unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let w = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        scaled.mul_adjoint(&self.vectors)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Verifies `m` is square and Hermitian within `tol`.
pub(crate) fn check_hermitian(m: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let residual = m.hermitian_defect();
    if residual > tol.scaled(m.frobenius_norm()) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// Diagonalizes a Hermitian matrix with unitary 2x2 Jacobi rotations.
///
/// The input is symmetrized before iterating, so rounding-level asymmetry in
/// products like `a* a` is harmless.
pub fn hermitian_eigen(m: &ComplexMatrix, tol: &Tolerance) -> Result<EigenDecomposition> {
    check_hermitian(m, tol)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    let target = JACOBI_CONVERGENCE * scale;

    let mut converged = scale == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal(&a) <= target {
            converged = true;
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let rot = Rotation::annihilating(a[(p, p)].re, a[(q, q)].re, apq);
                rot.apply_two_sided(&mut a, p, q);
                rot.apply_right(&mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            off_diagonal: off_diagonal(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let columns: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();
    Ok(EigenDecomposition {
        values,
        vectors: ComplexMatrix::from_columns(&columns),
    })
}

fn off_diagonal(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// The unitary `G = D R` acting on coordinates `(p, q)`, where
/// `D = diag(1, e^{-iφ})` makes the pivot real and `R` is a real Jacobi
/// rotation. Stored as the 2x2 block `[[gpp, gpq], [gqp, gqq]]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Rotation {
    gpp: C64,
    gpq: C64,
    gqp: C64,
    gqq: C64,
}

impl Rotation {
    /// Rotation with `(G* H G)_pq = 0` for the Hermitian block
    /// `H = [[app, apq], [conj(apq), aqq]]`.
    pub(crate) fn annihilating(app: f64, aqq: f64, apq: C64) -> Self {
        let mag = apq.norm();
        let phase = apq / mag;
        let theta = (aqq - app) / (2.0 * mag);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        let conj_phase = phase.conj();
        Rotation {
            gpp: C64::new(c, 0.0),
            gpq: C64::new(s, 0.0),
            gqp: conj_phase * (-s),
            gqq: conj_phase * c,
        }
    }

    /// `m <- m G` on columns `p`, `q`.
    pub(crate) fn apply_right(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        for k in 0..m.rows() {
            let mp = m[(k, p)];
            let mq = m[(k, q)];
            m[(k, p)] = mp * self.gpp + mq * self.gqp;
            m[(k, q)] = mp * self.gpq + mq * self.gqq;
        }
    }

    /// `m <- G* m G` for Hermitian `m`, restoring exact zeros and a real
    /// diagonal at the pivot.
    fn apply_two_sided(&self, m: &mut ComplexMatrix, p: usize, q: usize) {
        self.apply_right(m, p, q);
        for k in 0..m.cols() {
            let mp = m[(p, k)];
            let mq = m[(q, k)];
            m[(p, k)] = self.gpp.conj() * mp + self.gqp.conj() * mq;
            m[(q, k)] = self.gpq.conj() * mp + self.gqq.conj() * mq;
        }
        m[(p, q)] = C64::new(0.0, 0.0);
        m[(q, p)] = C64::new(0.0, 0.0);
        m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
        m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    }
}
