//! Decision procedure for the four equivalent equality conditions.
//!
//! 1. `|a|^p = |b|^q`;
//! 2. `z|ab*|z* = mean` for some contraction `z`;
//! 3. `||z|ab*|w||_φ = ||mean||_φ` for contractions `z`, `w` and a strictly
//!    increasing norm;
//! 4. `γ_k = δ_k` for every `k`.
//!
//! Conditions 2 and 3 quantify over contractions. The report evaluates them
//! on the canonical witness `z = ν*` (with `w = ν`), where `b = ν|b|`. Since
//! `|ab*| = ν||a||b||ν*`, condition 1 makes `ν*|ab*|ν = |a|^p` equal to the
//! mean, so a failure at `ν*` together with a failure of condition 4 is
//! conclusive. The universal statement itself is not decided numerically.

use serde::Serialize;

use super::thresholds::{MATRIX_REL, SPECTRAL_REL};
use super::{check_square_pair, young_spectra, ConjugatePair, YoungSpectra};
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, polar, ComplexMatrix, Tolerance};
use crate::norms::{evaluate_norm, NormDescriptor};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cond1 {
    /// `|| |a|^p - |b|^q ||_F`.
    pub residual: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cond2 {
    /// The contraction tried, `ν*` from the polar decomposition of `b`.
    pub witness: ComplexMatrix,
    pub witness_norm: f64,
    /// `|| z|ab*|z* - mean ||_F`.
    pub residual: f64,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NormEquality {
    pub norm: String,
    pub strictly_increasing: bool,
    /// `||z|ab*|z*||_φ`.
    pub lhs: f64,
    /// `||mean||_φ`.
    pub rhs: f64,
    pub residual: f64,
    pub equal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cond3 {
    pub norms: Vec<NormEquality>,
    /// Conjunction over the strictly increasing norms; `None` when the list
    /// has none, in which case condition 3 is not evaluated.
    pub verdict: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Cond4 {
    /// `max_k |γ_k - δ_k|`.
    pub gap: f64,
    pub worst_index: usize,
    pub verdict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EquivalenceReport {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub p: f64,
    pub q: f64,
    pub dimension: usize,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub cond1: Cond1,
    pub cond2: Cond2,
    pub cond3: Cond3,
    pub cond4: Cond4,
    /// True iff conditions 1, 2, 4 and every strictly increasing norm in
    /// condition 3 return the same verdict.
    pub overall_consistent: bool,
    pub notes: Vec<String>,
}

impl EquivalenceReport {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Verdicts entering the consistency decision.
    pub fn verdicts(&self) -> Vec<bool> {
        let mut v = vec![self.cond1.verdict, self.cond2.verdict, self.cond4.verdict];
        v.extend(
            self.cond3
                .norms
                .iter()
                .filter(|n| n.strictly_increasing)
                .map(|n| n.equal),
        );
        v
    }

    pub fn all_true(&self) -> bool {
        self.verdicts().iter().all(|&v| v)
    }

    pub fn all_false(&self) -> bool {
        self.verdicts().iter().all(|&v| !v)
    }
}

/// Evaluates all four conditions and whether they agree.
pub fn check_equivalence(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cp: &ConjugatePair,
    norms: &[NormDescriptor],
    tol: &Tolerance,
) -> Result<EquivalenceReport> {
    if norms.is_empty() {
        return Err(Error::InvalidConfig("at least one norm is required".into()));
    }
    let s = young_spectra(a, b, cp, tol)?;

    let residual = (&s.abs_a_p - &s.abs_b_q).frobenius_norm();
    let scale = s.abs_a_p.frobenius_norm().max(s.abs_b_q.frobenius_norm());
    let cond1 = Cond1 {
        residual,
        verdict: residual <= MATRIX_REL * scale + tol.absolute,
    };

    let (gap, worst_index) = s.max_gap();
    let cond4 = Cond4 {
        gap,
        worst_index,
        verdict: gap <= SPECTRAL_REL * s.delta_top() + tol.absolute,
    };

    let nu = polar(b, tol)?.isometry;
    let witness = nu.adjoint();
    let conjugated = s.abs_product.conjugate_by(&witness).hermitian_part();
    let residual = (&conjugated - &s.mean).frobenius_norm();
    let cond2 = Cond2 {
        witness_norm: operator_norm(&witness)?,
        witness,
        residual,
        verdict: residual <= MATRIX_REL * s.mean.frobenius_norm() + tol.absolute,
    };

    let mut entries = Vec::with_capacity(norms.len());
    for d in norms {
        let lhs = evaluate_norm(d, &conjugated)?;
        let rhs = d.gauge_sorted(&s.delta);
        let residual = (lhs - rhs).abs();
        entries.push(NormEquality {
            norm: d.to_string(),
            strictly_increasing: d.strictly_increasing,
            lhs,
            rhs,
            residual,
            equal: residual <= SPECTRAL_REL * rhs + tol.absolute,
        });
    }
    let strict: Vec<bool> = entries
        .iter()
        .filter(|e| e.strictly_increasing)
        .map(|e| e.equal)
        .collect();
    let cond3 = Cond3 {
        verdict: (!strict.is_empty()).then(|| strict.iter().all(|&v| v)),
        norms: entries,
    };

    let mut notes = vec![
        "conditions 2 and 3 are evaluated on the canonical witness z = nu* (w = nu) from b = nu|b|; \
         quantification over all contractions is not decided numerically"
            .to_string(),
    ];
    if cond3.verdict.is_none() {
        notes.push("no strictly increasing norm requested; condition 3 not evaluated".into());
    }
    for e in cond3.norms.iter().filter(|e| !e.strictly_increasing && e.equal) {
        if !cond1.verdict {
            notes.push(format!(
                "{} equality holds although |a|^p != |b|^q (norm is not strictly increasing)",
                e.norm
            ));
        }
    }

    let mut report = EquivalenceReport {
        tool_version: TOOL_VERSION.to_string(),
        seed: None,
        p: cp.p(),
        q: cp.q(),
        dimension: s.dim(),
        gamma: s.gamma.clone(),
        delta: s.delta.clone(),
        cond1,
        cond2,
        cond3,
        cond4,
        overall_consistent: false,
        notes,
    };
    report.overall_consistent = report.all_true() || report.all_false();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "camelCase")]
pub enum ContractionCheck {
    /// `z|ab*|z* = mean` holds within the matrix threshold; `gap` must then
    /// be within `equality_residual` (Weyl) of zero.
    #[serde(rename_all = "camelCase")]
    Applicable {
        equality_residual: f64,
        gap: f64,
        spectra_equal: bool,
    },
    #[serde(rename_all = "camelCase")]
    NotApplicable { equality_residual: f64 },
}

impl ContractionCheck {
    pub fn is_applicable(&self) -> bool {
        matches!(self, ContractionCheck::Applicable { .. })
    }
}

/// If a contraction `z` attains `z|ab*|z* = mean`, the spectra must agree:
/// `γ_k <= δ_k = λ_k(z|ab*|z*) <= γ_k`.
pub fn check_gamma_delta_from_contraction(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    z: &ComplexMatrix,
    cp: &ConjugatePair,
    tol: &Tolerance,
) -> Result<ContractionCheck> {
    let n = check_square_pair(a, b)?;
    if z.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "contraction is {}x{}, expected {n}x{n}",
            z.rows(),
            z.cols()
        )));
    }
    let norm = operator_norm(z)?;
    if norm > 1.0 + tol.scaled(1.0) {
        return Err(Error::NotContraction { norm });
    }
    let s: YoungSpectra = young_spectra(a, b, cp, tol)?;
    let conjugated = s.abs_product.conjugate_by(z);
    let equality_residual = (&conjugated - &s.mean).frobenius_norm();
    if equality_residual > MATRIX_REL * s.mean.frobenius_norm() + tol.absolute {
        return Ok(ContractionCheck::NotApplicable { equality_residual });
    }
    let (gap, _) = s.max_gap();
    Ok(ContractionCheck::Applicable {
        equality_residual,
        gap,
        spectra_equal: gap <= equality_residual + SPECTRAL_REL * s.delta_top() + tol.absolute,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{contraction, equality_family, opnorm_counterexample, ContractionKind, GeneratorConfig};
    use crate::norms::parse_norm_list;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn equality_family_is_all_true() {
        let norms = parse_norm_list("op,schatten:1,schatten:2,kyfan:2,dyadic").unwrap();
        for (seed, p) in [(11u64, 1.5), (12, 2.0), (13, 3.0)] {
            let cfg = GeneratorConfig::new(seed, 5).unwrap().with_p(p).unwrap();
            let (a, b) = equality_family(&cfg);
            let r = check_equivalence(&a, &b, &cfg.conjugate_pair(), &norms, &tol()).unwrap();
            assert!(r.all_true(), "{r:#?}");
            assert!(r.overall_consistent);
        }
    }

    #[test]
    fn operator_norm_counterexample() {
        let (a, b, cp) = opnorm_counterexample(2).unwrap();
        let norms = parse_norm_list("op,dyadic").unwrap();
        let r = check_equivalence(&a, &b, &cp, &norms, &tol()).unwrap();
        assert!(!r.cond1.verdict && !r.cond2.verdict && !r.cond4.verdict);
        assert!((r.cond1.residual - 1.0).abs() < 1e-12);
        assert!((r.cond4.gap - 0.5).abs() < 1e-12);
        assert_eq!(r.cond4.worst_index, 1);
        let op = &r.cond3.norms[0];
        assert!(op.equal && !op.strictly_increasing);
        assert!((op.lhs - 2.0).abs() < 1e-12 && (op.rhs - 2.0).abs() < 1e-12);
        let dy = &r.cond3.norms[1];
        assert!(!dy.equal);
        assert!((dy.rhs - dy.lhs - 0.25).abs() < 1e-12);
        assert_eq!(r.cond3.verdict, Some(false));
        assert!(r.overall_consistent);
        assert!(r.notes.iter().any(|n| n.starts_with("op equality holds")));
    }

    #[test]
    fn zero_pair_is_trivially_equal() {
        let z = ComplexMatrix::zeros(3, 3);
        let cp = ConjugatePair::new(2.5).unwrap();
        let r = check_equivalence(&z, &z, &cp, &[NormDescriptor::dyadic()], &tol()).unwrap();
        assert!(r.all_true() && r.overall_consistent);
    }

    #[test]
    fn only_non_strict_norms() {
        let (a, b, cp) = opnorm_counterexample(2).unwrap();
        let r = check_equivalence(&a, &b, &cp, &[NormDescriptor::operator()], &tol()).unwrap();
        assert_eq!(r.cond3.verdict, None);
        assert!(r.overall_consistent);
    }

    #[test]
    fn report_serializes_camel_case() {
        let (a, b, cp) = opnorm_counterexample(2).unwrap();
        let r = check_equivalence(&a, &b, &cp, &[NormDescriptor::dyadic()], &tol())
            .unwrap()
            .with_seed(7);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["seed"], 7);
        assert_eq!(v["overallConsistent"], true);
        assert!(v["cond2"]["witness"]["data"].is_array());
        assert!(v["toolVersion"].is_string());
    }

    #[test]
    fn contraction_check() {
        let cfg = GeneratorConfig::new(5, 4).unwrap().with_p(1.5).unwrap();
        let (a, b) = equality_family(&cfg);
        let cp = cfg.conjugate_pair();
        let nu = polar(&b, &tol()).unwrap().isometry;
        let r = check_gamma_delta_from_contraction(&a, &b, &nu.adjoint(), &cp, &tol()).unwrap();
        match r {
            ContractionCheck::Applicable { gap, spectra_equal, .. } => {
                assert!(spectra_equal);
                assert!(gap < 1e-10);
            }
            other => panic!("{other:?}"),
        }

        let zero = ComplexMatrix::zeros(4, 4);
        let r = check_gamma_delta_from_contraction(&a, &b, &zero, &cp, &tol()).unwrap();
        assert!(!r.is_applicable());

        let z = contraction(&cfg, ContractionKind::Random);
        let r = check_gamma_delta_from_contraction(&a, &b, &z, &cp, &tol()).unwrap();
        assert!(!r.is_applicable());

        let big = ComplexMatrix::identity(4).scale(1.5);
        assert!(matches!(
            check_gamma_delta_from_contraction(&a, &b, &big, &cp, &tol()),
            Err(Error::NotContraction { .. })
        ));
    }
}
