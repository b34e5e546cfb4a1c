//! Checkers for the supporting operator identities and inequalities.

use serde::Serialize;

use super::thresholds::{MATRIX_REL, SPECTRAL_REL};
use super::{check_square_pair, young_spectra, ConjugatePair};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, inner, is_psd, polar, psd_power, range_projection, svd, vec_norm,
    ComplexMatrix, Tolerance, C64,
};

fn require_psd(m: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    let check = is_psd(m, tol)?;
    if !check.is_psd {
        return Err(Error::NotPsd {
            min_eigenvalue: check.min_eigenvalue,
        });
    }
    Ok(())
}

fn require_open_unit(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::BadExponent(format!("exponent must lie in (0, 1), got {r}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PolarIdentities {
    /// `|| |ab*| - ν||a||b||ν* ||_F`.
    pub conjugation_residual: f64,
    /// `|| ν*|ab*|ν - ||a||b|| ||_F`.
    pub compression_residual: f64,
    /// `max_k |λ_k(|ab*|) - λ_k(||a||b||)|`.
    pub spectral_gap: f64,
    /// `max(||ab*||_F, || |a||b| ||_F)`, the scale the residuals compare to.
    pub scale: f64,
}

impl PolarIdentities {
    /// Largest residual divided by `scale` (zero for the zero pair).
    pub fn max_relative(&self) -> f64 {
        let worst = self
            .conjugation_residual
            .max(self.compression_residual)
            .max(self.spectral_gap);
        if self.scale == 0.0 {
            worst
        } else {
            worst / self.scale
        }
    }
}

/// Residuals of `|ab*| = ν||a||b||ν*` and `ν*|ab*|ν = ||a||b||`, `ν` the
/// partial isometry of `b`, plus the resulting spectral identity.
pub fn check_polar_identities(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<PolarIdentities> {
    check_square_pair(a, b)?;
    let pb = polar(b, tol)?;
    let nu = &pb.isometry;
    let abs_a = svd(a, tol)?.abs_power(1.0);
    let sp = svd(&a.mul_adjoint(b), tol)?;
    let abs_product = sp.abs_power(1.0);
    let si = svd(&(&abs_a * &pb.positive_part), tol)?;
    let inner_abs = si.abs_power(1.0);

    let conjugation_residual = (&abs_product - &inner_abs.conjugate_by(nu)).frobenius_norm();
    let compression_residual =
        (&abs_product.conjugate_by(&nu.adjoint()) - &inner_abs).frobenius_norm();
    let spectral_gap = sp
        .values
        .iter()
        .zip(&si.values)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(PolarIdentities {
        conjugation_residual,
        compression_residual,
        spectral_gap,
        scale: abs_product.frobenius_norm().max(inner_abs.frobenius_norm()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LambdaBound {
    pub holds: bool,
    pub worst_index: usize,
    /// `max_k (λ_k(|axb|) - ||a|| ||b|| λ_k(x))`.
    pub worst_excess: f64,
}

/// `λ_k(|axb|) <= ||a|| ||b|| λ_k(x)` for every `k`.
pub fn check_lambda_bound(
    a: &ComplexMatrix,
    x: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<LambdaBound> {
    if a.cols() != x.rows() || x.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "cannot form a x b from {}x{}, {}x{}, {}x{}",
            a.rows(),
            a.cols(),
            x.rows(),
            x.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let lhs = svd(&(&(a * x) * b), tol)?.values;
    let sx = svd(x, tol)?.values;
    let factor = svd(a, tol)?.largest() * svd(b, tol)?.largest();
    let (worst_index, worst_excess) = lhs
        .iter()
        .enumerate()
        .map(|(k, &l)| (k, l - factor * sx.get(k).copied().unwrap_or(0.0)))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    let scale = factor * sx.first().copied().unwrap_or(0.0);
    Ok(LambdaBound {
        holds: worst_excess <= tol.scaled(scale),
        worst_index,
        worst_excess,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RangeInclusion {
    /// `|| (1 - P_b)|ba| ||_F`.
    pub residual: f64,
    pub holds: bool,
}

/// For PSD `a`, `b` with equal spectra and `1 < p < 2`, the range of `|ba|`
/// lies in the closed range of `b`.
pub fn check_range_inclusion(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cp: &ConjugatePair,
    tol: &Tolerance,
) -> Result<RangeInclusion> {
    if !(cp.p() > 1.0 && cp.p() < 2.0) {
        return Err(Error::BadExponent(format!(
            "range inclusion needs 1 < p < 2, got {}",
            cp.p()
        )));
    }
    let n = check_square_pair(a, b)?;
    require_psd(a, tol)?;
    require_psd(b, tol)?;
    let s = young_spectra(a, b, cp, tol)?;
    let (gap, k) = s.max_gap();
    if gap > SPECTRAL_REL * s.delta_top() + tol.absolute {
        return Err(Error::PremiseNotMet(format!(
            "spectra differ: |gamma_{k} - delta_{k}| = {gap:e}"
        )));
    }
    let abs_ba = svd(&(b * a), tol)?.abs_power(1.0);
    let complement = ComplexMatrix::identity(n) - range_projection(b, tol)?;
    let residual = (&complement * &abs_ba).frobenius_norm();
    Ok(RangeInclusion {
        residual,
        holds: residual <= MATRIX_REL * abs_ba.frobenius_norm() + tol.absolute,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VectorHoelder {
    /// `<x^r ξ, ξ>`.
    pub lhs: f64,
    /// `<x ξ, ξ>^r`.
    pub rhs: f64,
    pub inequality_holds: bool,
    pub equality_detected: bool,
    /// `|| xξ - <xξ, ξ>ξ ||`.
    pub eigen_residual: f64,
    pub eigenvector_detected: bool,
}

impl VectorHoelder {
    /// Equality holds exactly when `ξ` is an eigenvector.
    pub fn flags_agree(&self) -> bool {
        self.equality_detected == self.eigenvector_detected
    }
}

/// `<x^r ξ, ξ> <= <xξ, ξ>^r` for PSD `x`, unit `ξ`, `0 < r < 1`.
///
/// The `s > 1` form `<xξ, ξ>^s <= <x^s ξ, ξ>` is the same statement for
/// `x^s` and `r = 1/s`.
pub fn check_vector_hoelder(
    x: &ComplexMatrix,
    xi: &[C64],
    r: f64,
    tol: &Tolerance,
) -> Result<VectorHoelder> {
    require_open_unit(r)?;
    if !x.is_square() || xi.len() != x.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {}x{} matrix",
            xi.len(),
            x.rows(),
            x.cols()
        )));
    }
    let norm = vec_norm(xi);
    if (norm - 1.0).abs() > tol.scaled(1.0) {
        return Err(Error::NotUnit { norm });
    }
    let x_r = psd_power(x, r, tol)?;
    let top = hermitian_eigen(x, tol)?.values[0].max(0.0);

    let x_xi = x.mul_vec(xi);
    let rayleigh = inner(&x_xi, xi).re.max(0.0);
    let lhs = inner(&x_r.mul_vec(xi), xi).re;
    let rhs = rayleigh.powf(r);
    let residual_vec: Vec<C64> = x_xi.iter().zip(xi).map(|(a, b)| a - b * rayleigh).collect();
    let eigen_residual = vec_norm(&residual_vec);
    let eq_scale = lhs.abs().max(rhs);
    Ok(VectorHoelder {
        lhs,
        rhs,
        inequality_holds: lhs <= rhs + SPECTRAL_REL * eq_scale + tol.absolute,
        equality_detected: (lhs - rhs).abs() <= SPECTRAL_REL * eq_scale + tol.absolute,
        eigen_residual,
        eigenvector_detected: eigen_residual <= MATRIX_REL * top + tol.absolute,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectionHoelder {
    /// Minimum eigenvalue of `(qxq)^r - q x^r q`.
    pub min_eigenvalue: f64,
    pub inequality_holds: bool,
    /// `|| (qxq)^r - q x^r q ||_F`.
    pub difference: f64,
    pub equality_detected: bool,
    /// `c = tr(qxq)`.
    pub c: f64,
    /// `|| xq - cq ||_F`.
    pub eigen_residual: f64,
    pub eigen_detected: bool,
}

impl ProjectionHoelder {
    pub fn flags_agree(&self) -> bool {
        self.equality_detected == self.eigen_detected
    }
}

/// `q x^r q <= (qxq)^r` for a rank-one projection `q`, with equality iff
/// `xq = cq`.
pub fn check_projection_hoelder(
    x: &ComplexMatrix,
    q: &ComplexMatrix,
    r: f64,
    tol: &Tolerance,
) -> Result<ProjectionHoelder> {
    require_open_unit(r)?;
    if !x.is_square() || q.shape() != x.shape() {
        return Err(Error::DimensionMismatch(format!(
            "projection is {}x{}, matrix is {}x{}",
            q.rows(),
            q.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let herm = q.hermitian_defect();
    let idem = (&(q * q) - q).frobenius_norm();
    let defect = herm.max(idem);
    if defect > tol.scaled(q.frobenius_norm().max(1.0)) {
        return Err(Error::NotProjection { residual: defect });
    }
    let rank = q.trace().re.round().max(0.0) as usize;
    if rank != 1 {
        return Err(Error::NotRankOne { rank });
    }
    let q = q.hermitian_part();
    let qxq = x.conjugate_by(&q).hermitian_part();
    let left = psd_power(&qxq, r, tol)?;
    let right = psd_power(x, r, tol)?.conjugate_by(&q).hermitian_part();
    let diff = &left - &right;
    let min_eigenvalue = *hermitian_eigen(&diff, tol)?.values.last().expect("nonempty");
    let scale = left.frobenius_norm();
    let difference = diff.frobenius_norm();
    let c = qxq.trace().re;
    let eigen_residual = (&(x * &q) - &q.scale(c)).frobenius_norm();
    Ok(ProjectionHoelder {
        min_eigenvalue,
        inequality_holds: min_eigenvalue >= -(SPECTRAL_REL * scale + tol.absolute),
        difference,
        equality_detected: difference <= SPECTRAL_REL * scale + tol.absolute,
        c,
        eigen_residual,
        eigen_detected: eigen_residual <= MATRIX_REL * x.frobenius_norm() + tol.absolute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{equality_family_psd, equality_pair_from, random_pair, GeneratorConfig};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn e0() -> Vec<C64> {
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    }

    fn diagonal_unit() -> Vec<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![C64::new(h, 0.0), C64::new(h, 0.0)]
    }

    #[test]
    fn vector_hoelder_examples() {
        let x = ComplexMatrix::from_real_diag(&[4.0, 1.0]);
        let v = check_vector_hoelder(&x, &e0(), 0.5, &tol()).unwrap();
        assert!((v.lhs - 2.0).abs() < 1e-14 && (v.rhs - 2.0).abs() < 1e-14);
        assert!(v.equality_detected && v.eigenvector_detected);

        // (2 + 1)/2 and ((4 + 1)/2)^½
        let v = check_vector_hoelder(&x, &diagonal_unit(), 0.5, &tol()).unwrap();
        assert!((v.lhs - 1.5).abs() < 1e-14);
        assert!((v.rhs - 2.5f64.sqrt()).abs() < 1e-14);
        assert!(!v.equality_detected && !v.eigenvector_detected && v.inequality_holds);

        let x = ComplexMatrix::identity(2).scale(3.0);
        let v = check_vector_hoelder(&x, &diagonal_unit(), 0.3, &tol()).unwrap();
        assert!(v.equality_detected && v.eigenvector_detected);
    }

    #[test]
    fn vector_hoelder_convex_direction() {
        // ⟨xξ,ξ⟩^s <= ⟨x^s ξ,ξ⟩ via x^s and r = 1/s.
        let x = ComplexMatrix::from_real_diag(&[4.0, 1.0]);
        let s = 3.0;
        let xs = psd_power(&x, s, &tol()).unwrap();
        let v = check_vector_hoelder(&xs, &diagonal_unit(), 1.0 / s, &tol()).unwrap();
        assert!(v.inequality_holds && !v.equality_detected);
        assert!((v.lhs - 2.5).abs() < 1e-13);
        assert!((v.rhs - 32.5f64.powf(1.0 / 3.0)).abs() < 1e-13);
    }

    #[test]
    fn vector_hoelder_errors() {
        let x = ComplexMatrix::from_real_diag(&[4.0, 1.0]);
        let long = vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        assert!(matches!(check_vector_hoelder(&x, &long, 0.5, &tol()), Err(Error::NotUnit { .. })));
        assert!(matches!(check_vector_hoelder(&x, &e0(), 1.0, &tol()), Err(Error::BadExponent(_))));
        let indefinite = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(matches!(
            check_vector_hoelder(&indefinite, &e0(), 0.5, &tol()),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn projection_hoelder_examples() {
        let x = ComplexMatrix::from_real_diag(&[4.0, 1.0]);
        let q = ComplexMatrix::outer(&e0(), &e0());
        let v = check_projection_hoelder(&x, &q, 0.5, &tol()).unwrap();
        assert!(v.equality_detected && v.eigen_detected && v.inequality_holds);
        assert!((v.c - 4.0).abs() < 1e-14);

        let q = ComplexMatrix::outer(&diagonal_unit(), &diagonal_unit());
        let v = check_projection_hoelder(&x, &q, 0.5, &tol()).unwrap();
        assert!(v.inequality_holds && !v.equality_detected && !v.eigen_detected);
        assert!(v.difference > 0.05 && v.min_eigenvalue.abs() < 1e-12);

        let v = check_projection_hoelder(&ComplexMatrix::identity(2), &q, 0.7, &tol()).unwrap();
        assert!(v.equality_detected && v.eigen_detected);
        assert!((v.c - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projection_hoelder_errors() {
        let x = ComplexMatrix::from_real_diag(&[4.0, 1.0]);
        let not_proj = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            check_projection_hoelder(&x, &not_proj, 0.5, &tol()),
            Err(Error::NotProjection { .. })
        ));
        assert!(matches!(
            check_projection_hoelder(&x, &ComplexMatrix::identity(2), 0.5, &tol()),
            Err(Error::NotRankOne { rank: 2 })
        ));
    }

    #[test]
    fn polar_identities() {
        for seed in 0..5 {
            let (a, b) = random_pair(&GeneratorConfig::new(seed, 4).unwrap());
            let r = check_polar_identities(&a, &b, &tol()).unwrap();
            assert!(r.max_relative() <= 1e-10, "{r:?}");
        }
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexMatrix::from_rows(&[
            vec![C64::new(c, 0.0), C64::new(0.0, c)],
            vec![C64::new(0.0, c), C64::new(c, 0.0)],
        ])
        .unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let r = check_polar_identities(&a, &u, &tol()).unwrap();
        assert!(r.max_relative() <= 1e-12);

        let r = check_polar_identities(&ComplexMatrix::zeros(2, 2), &u, &tol()).unwrap();
        assert_eq!(r.scale, 0.0);
        assert!(r.max_relative() <= 1e-15);
    }

    #[test]
    fn lambda_bound_examples() {
        let x = ComplexMatrix::from_real_diag(&[1.0, 0.5]);
        let i = ComplexMatrix::identity(2);
        let r = check_lambda_bound(&i, &x, &i, &tol()).unwrap();
        assert!(r.holds && r.worst_excess.abs() < 1e-14);
        let r = check_lambda_bound(&i.scale(2.0), &x, &i, &tol()).unwrap();
        assert!(r.holds && r.worst_excess.abs() < 1e-14);
        let bad = ComplexMatrix::zeros(3, 3);
        assert!(matches!(check_lambda_bound(&i, &bad, &i, &tol()), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn range_inclusion_examples() {
        let cp = ConjugatePair::new(1.5).unwrap();
        let d = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let r = check_range_inclusion(&d, &d, &cp, &tol()).unwrap();
        assert!(r.holds);

        let cfg = GeneratorConfig::new(4, 4).unwrap().with_p(1.5).unwrap();
        let (a, b) = equality_family_psd(&cfg);
        assert!(check_range_inclusion(&a, &b, &cp, &tol()).unwrap().holds);

        // Rank-deficient core so the inclusion is not vacuous.
        let c = ComplexMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 0.0], &[0.0, 0.0, 0.0]]);
        let (a, b) = equality_pair_from(&c, &cp, &tol()).unwrap();
        let r = check_range_inclusion(&a, &b, &cp, &tol()).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn range_inclusion_errors() {
        let d = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let cp2 = ConjugatePair::new(2.0).unwrap();
        assert!(matches!(check_range_inclusion(&d, &d, &cp2, &tol()), Err(Error::BadExponent(_))));
        let cp = ConjugatePair::new(1.5).unwrap();
        let other = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!(matches!(
            check_range_inclusion(&d, &other, &cp, &tol()),
            Err(Error::PremiseNotMet(_))
        ));
        let neg = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(matches!(check_range_inclusion(&neg, &d, &cp, &tol()), Err(Error::NotPsd { .. })));
    }
}
