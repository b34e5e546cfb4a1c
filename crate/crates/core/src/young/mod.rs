//! Singular-value Young inequality for pairs of matrices.
//!
//! For `a`, `b` of equal size and conjugate exponents `p`, `q` this module
//! computes the four spectra
//!
//! * `α_k = λ_k(|a|)`, `β_k = λ_k(|b|)`,
//! * `γ_k = λ_k(|ab*|)`,
//! * `δ_k = λ_k(|a|^p / p + |b|^q / q)`,
//!
//! checks `γ_k <= δ_k` for every `k`, builds the partial isometry `u` mapping
//! the eigenbasis of `|ab*|` onto that of the mean, and decides the four-way
//! equivalence between `|a|^p = |b|^q`, operator equality under a
//! contraction, equality in a strictly increasing norm, and `γ = δ`.

mod equivalence;
mod lemmas;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, svd, ComplexMatrix, Tolerance, C64};

pub use equivalence::{
    check_equivalence, check_gamma_delta_from_contraction, Cond1, Cond2, Cond3, Cond4,
    ContractionCheck, EquivalenceReport, NormEquality,
};
pub use lemmas::{
    check_lambda_bound, check_polar_identities, check_projection_hoelder, check_range_inclusion,
    check_vector_hoelder, LambdaBound, PolarIdentities, ProjectionHoelder, RangeInclusion,
    VectorHoelder,
};

/// Equality thresholds, deliberately looser than solver accuracy: `t^{1/p}`
/// amplifies eigenvalue error near zero when `p` is close to one.
pub mod thresholds {
    /// Relative threshold for equality of spectra and of scalar norm values.
    pub const SPECTRAL_REL: f64 = 1e-7;
    /// Relative (Frobenius) threshold for equality of matrices.
    pub const MATRIX_REL: f64 = 1e-6;
}

/// Conjugate exponents `p, q > 1` with `1/p + 1/q = 1`; `q` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct ConjugatePair {
    p: f64,
    q: f64,
}

#[derive(Deserialize)]
struct RawPair {
    p: f64,
}

impl TryFrom<RawPair> for ConjugatePair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        ConjugatePair::new(raw.p)
    }
}

impl ConjugatePair {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::BadExponent(format!("p must be a finite real > 1, got {p}")));
        }
        Ok(Self { p, q: p / (p - 1.0) })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The pair with roles exchanged, `(q, p)`.
    pub fn swapped(&self) -> Self {
        Self { p: self.q, q: self.p }
    }
}

/// The spectra `α, β, γ, δ` of a pair, with the eigenvectors of `|ab*|`
/// (`gamma_vectors`) and of the mean (`delta_vectors`) as aligned columns.
#[derive(Debug, Clone, PartialEq)]
pub struct YoungSpectra {
    pub pair: ConjugatePair,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
    pub gamma_vectors: ComplexMatrix,
    pub delta_vectors: ComplexMatrix,
    /// `|ab*|`.
    pub abs_product: ComplexMatrix,
    /// `|a|^p / p + |b|^q / q`.
    pub mean: ComplexMatrix,
    pub abs_a_p: ComplexMatrix,
    pub abs_b_q: ComplexMatrix,
    /// Result of checking `γ_k <= δ_k` at the tolerance the spectra were
    /// computed with.
    pub inequality: InequalityVerdict,
}

impl YoungSpectra {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `max_k |γ_k - δ_k|` and the first index attaining it.
    pub fn max_gap(&self) -> (f64, usize) {
        self.gamma
            .iter()
            .zip(&self.delta)
            .map(|(g, d)| (g - d).abs())
            .enumerate()
            .fold((0.0, 0), |best, (k, gap)| if gap > best.0 { (gap, k) } else { best })
    }

    pub fn delta_top(&self) -> f64 {
        self.delta.first().copied().unwrap_or(0.0)
    }
}

pub(crate) fn check_square_pair(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() || !b.is_square() || a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(a.rows())
}

/// Computes `α, β, γ, δ` and verifies `γ <= δ` at `tol`.
///
/// `|a|^p` and `|b|^q` are formed from the singular spectra of `a` and `b`;
/// `γ` comes from the SVD of `ab*` directly, without squaring.
pub fn young_spectra(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    cp: &ConjugatePair,
    tol: &Tolerance,
) -> Result<YoungSpectra> {
    check_square_pair(a, b)?;
    let sa = svd(a, tol)?;
    let sb = svd(b, tol)?;
    let abs_a_p = sa.abs_power(cp.p).hermitian_part();
    let abs_b_q = sb.abs_power(cp.q).hermitian_part();
    let mean = (abs_a_p.scale(1.0 / cp.p) + abs_b_q.scale(1.0 / cp.q)).hermitian_part();
    let sp = svd(&a.mul_adjoint(b), tol)?;
    let abs_product = sp.abs_power(1.0).hermitian_part();
    let eig = hermitian_eigen(&mean, tol)?;
    let delta: Vec<f64> = eig.values.iter().map(|&d| d.max(0.0)).collect();
    let inequality = verify_sequences(&sp.values, &delta, tol);

    Ok(YoungSpectra {
        pair: *cp,
        alpha: sa.values,
        beta: sb.values,
        gamma: sp.values,
        delta,
        gamma_vectors: sp.right,
        delta_vectors: eig.vectors,
        abs_product,
        mean,
        abs_a_p,
        abs_b_q,
        inequality,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalityVerdict {
    pub holds: bool,
    /// First index maximizing `γ_k - δ_k`.
    pub worst_index: usize,
    /// `γ_k - δ_k` at `worst_index`; nonpositive when the inequality is slack.
    pub worst_gap: f64,
}

/// `γ_k <= δ_k + tol.relative * δ_0 + tol.absolute` for all `k`.
pub fn verify_singular_inequality(s: &YoungSpectra, tol: &Tolerance) -> InequalityVerdict {
    verify_sequences(&s.gamma, &s.delta, tol)
}

/// Sequence form of [`verify_singular_inequality`], for hand-built spectra.
pub fn verify_sequences(gamma: &[f64], delta: &[f64], tol: &Tolerance) -> InequalityVerdict {
    let (worst_index, worst_gap) = gamma
        .iter()
        .zip(delta)
        .map(|(g, d)| g - d)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, gap)| {
            if gap > best.1 {
                (k, gap)
            } else {
                best
            }
        });
    let delta_top = delta.first().copied().unwrap_or(0.0);
    let worst_gap = if worst_gap.is_finite() { worst_gap } else { 0.0 };
    InequalityVerdict {
        holds: worst_gap <= tol.scaled(delta_top),
        worst_index,
        worst_gap,
    }
}

/// Partial isometry `u = Σ_{γ_k > cutoff} d_k g_k*` with `g_k`, `d_k` the
/// eigenvectors of `|ab*|` and of the mean. Then `u p_k u* = q_k`,
/// `u*u` projects onto the range of `|ab*|`, and `u|ab*|u* <= mean`.
///
/// Within a degenerate cluster the matching follows solver order; any
/// orthonormal matching is equally valid. A cluster that the rank cutoff
/// splits in two is reported as `DegenerateCluster`.
pub fn build_partial_isometry(s: &YoungSpectra, tol: &Tolerance) -> Result<ComplexMatrix> {
    let cutoff = tol.rank_cutoff(s.gamma.first().copied().unwrap_or(0.0));
    let rank = s.gamma.iter().filter(|&&g| g > cutoff).count();
    if rank > 0 && rank < s.gamma.len() {
        let top = s.gamma[0];
        if s.gamma[rank - 1] - s.gamma[rank] <= tol.scaled(top) {
            return Err(Error::DegenerateCluster { index: rank - 1 });
        }
    }
    let n = s.dim();
    let mut u = ComplexMatrix::zeros(n, n);
    for k in 0..rank {
        u = u + ComplexMatrix::outer(&s.delta_vectors.column(k), &s.gamma_vectors.column(k));
    }
    Ok(u)
}

/// `Σ_{γ_k > cutoff} p_k`, the projection onto the range of `|ab*|`.
pub fn gamma_support_projection(s: &YoungSpectra, tol: &Tolerance) -> ComplexMatrix {
    let cutoff = tol.rank_cutoff(s.gamma.first().copied().unwrap_or(0.0));
    let n = s.dim();
    let mut proj = ComplexMatrix::zeros(n, n);
    for (k, _) in s.gamma.iter().enumerate().filter(|(_, &g)| g > cutoff) {
        let v = s.gamma_vectors.column(k);
        proj = proj + ComplexMatrix::outer(&v, &v);
    }
    proj
}

/// Scalar Young reproduced through the matrix verifier on `1x1` inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalarYoung {
    /// `|a||b|`.
    pub gamma: f64,
    /// `|a|^p / p + |b|^q / q`.
    pub delta: f64,
    pub inequality_holds: bool,
    /// `|γ - δ| <= rel * δ`.
    pub equality_detected: bool,
    /// `||a|^p - |b|^q| <= rel * max(|a|^p, |b|^q)`.
    pub powers_equal: bool,
}

pub fn scalar_young(a: C64, b: C64, cp: &ConjugatePair, rel: f64) -> Result<ScalarYoung> {
    let am = ComplexMatrix::new(1, 1, vec![a])?;
    let bm = ComplexMatrix::new(1, 1, vec![b])?;
    let s = young_spectra(&am, &bm, cp, &Tolerance::default())?;
    let (gamma, delta) = (s.gamma[0], s.delta[0]);
    let (ap, bq) = (s.abs_a_p[(0, 0)].re, s.abs_b_q[(0, 0)].re);
    Ok(ScalarYoung {
        gamma,
        delta,
        inequality_holds: gamma <= delta * (1.0 + rel),
        equality_detected: (gamma - delta).abs() <= rel * delta,
        powers_equal: (ap - bq).abs() <= rel * ap.max(bq),
    })
}
