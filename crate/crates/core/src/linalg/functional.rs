//! Spectral functional calculus on Hermitian matrices, PSD tests and range
//! projections.

use serde::Serialize;

use super::eigen::{check_hermitian, hermitian_eigen};
use super::svd::svd;
use super::{ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

/// Outcome of a PSD test; the minimum eigenvalue is reported either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PsdCheck {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// True iff the smallest eigenvalue is at least `-(relative * ||m|| + absolute)`.
pub fn is_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<PsdCheck> {
    let eig = hermitian_eigen(m, tol)?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    let norm = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(PsdCheck {
        is_psd: min_eigenvalue >= -tol.scaled(norm),
        min_eigenvalue,
    })
}

/// `m^exponent` for Hermitian PSD `m`. Eigenvalues within the solver noise
/// floor `n·eps·||m||` are set to zero first, so rounding neither turns
/// negative nor gets inflated by a fractional exponent.
pub fn psd_power(m: &ComplexMatrix, exponent: f64, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !(exponent.is_finite() && exponent > 0.0) {
        return Err(Error::BadExponent(format!(
            "power exponent must be positive and finite, got {exponent}"
        )));
    }
    check_hermitian(m, tol)?;
    let eig = hermitian_eigen(m, tol)?;
    let norm = eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -tol.scaled(norm) {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let floor = m.rows() as f64 * f64::EPSILON * norm;
    Ok(eig
        .reconstruct_with(|x| if x <= floor { 0.0 } else { x.powf(exponent) })
        .hermitian_part())
}

/// Orthogonal projection onto the span of the left singular vectors whose
/// singular values exceed `tol.rank_cutoff(σ_max)`.
pub fn range_projection(m: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(svd(m, tol)?.range_projection())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn power_examples() {
        let d = ComplexMatrix::from_real_diag(&[4.0, 1.0]);
        let half = psd_power(&d, 0.5, &tol()).unwrap();
        assert!(half.approx_eq(&ComplexMatrix::from_real_diag(&[2.0, 1.0]), 1e-14));

        let d = ComplexMatrix::from_real_diag(&[4.0, 0.0]);
        let p = psd_power(&d, 1.5, &tol()).unwrap();
        assert!(p.approx_eq(&ComplexMatrix::from_real_diag(&[8.0, 0.0]), 1e-13));

        let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let sq = psd_power(&m, 2.0, &tol()).unwrap();
        assert!(sq.approx_eq(&ComplexMatrix::from_real_rows(&[&[5.0, 4.0], &[4.0, 5.0]]), 1e-13));
    }

    #[test]
    fn power_rejects_indefinite_and_bad_exponent() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(psd_power(&m, 0.5, &tol()), Err(Error::NotPsd { .. })));
        assert!(matches!(
            psd_power(&ComplexMatrix::identity(2), 0.0, &tol()),
            Err(Error::BadExponent(_))
        ));
        let skew = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(psd_power(&skew, 1.0, &tol()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rounding_negative_eigenvalue_is_clamped() {
        let m = ComplexMatrix::from_real_diag(&[1.0, -1e-14]);
        let r = psd_power(&m, 0.5, &tol()).unwrap();
        assert_eq!(r[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn psd_examples() {
        let c = is_psd(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), &tol()).unwrap();
        assert!(c.is_psd);
        assert_eq!(c.min_eigenvalue, 0.0);

        let c = is_psd(&ComplexMatrix::from_real_diag(&[1.0, -0.5]), &tol()).unwrap();
        assert!(!c.is_psd);
        assert_eq!(c.min_eigenvalue, -0.5);

        // eigenvalues 3 and −1
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let c = is_psd(&m, &tol()).unwrap();
        assert!(!c.is_psd);
        assert!((c.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn range_projection_examples() {
        let p = range_projection(&ComplexMatrix::from_real_diag(&[3.0, 0.0]), &tol()).unwrap();
        assert!(p.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-15));

        let p = range_projection(&ComplexMatrix::zeros(3, 3), &tol()).unwrap();
        assert_eq!(p, ComplexMatrix::zeros(3, 3));

        let xi = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rank_one = ComplexMatrix::outer(&xi, &xi);
        let p = range_projection(&rank_one, &tol()).unwrap();
        assert!(p.approx_eq(&rank_one, 1e-14));
    }
}
