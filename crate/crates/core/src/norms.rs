//! Unitarily invariant norms as symmetric gauges on singular-value sequences.
//!
//! Four families are supported: the operator norm, Schatten `p`-norms, Ky-Fan
//! `k`-norms and the dyadic gauge `φ(a) = Σ_k a_k↓ 2^{-k}`. Each descriptor
//! carries whether its gauge is strictly increasing, meaning that
//! `0 <= a_i <= b_i` for all `i` together with `φ(a) = φ(b)` forces `a = b`.
//! Schatten norms with finite `p` and the dyadic gauge are strictly
//! increasing; the operator norm and Ky-Fan norms are not.
//!
//! Gauges act on finite sequences. Trailing zeros contribute nothing to any
//! of the four families, so a matrix spectrum is a faithful truncation.
//!
//! Whether strict increase implies the Radon-Riesz property
//! (`||x_n|| -> ||x||` and weak convergence giving norm convergence) is an
//! open question and is not modeled here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{svd, ComplexMatrix, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum NormKind {
    Operator,
    Schatten { p: f64 },
    KyFan { k: usize },
    Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormDescriptor {
    pub kind: NormKind,
    pub strictly_increasing: bool,
}

impl NormDescriptor {
    pub fn new(kind: NormKind) -> Result<Self> {
        match kind {
            NormKind::Schatten { p } if p.is_nan() || p < 1.0 => {
                return Err(Error::BadExponent(format!("Schatten exponent must be >= 1, got {p}")))
            }
            NormKind::KyFan { k: 0 } => {
                return Err(Error::UnknownNorm("kyfan:0".into()));
            }
            _ => {}
        }
        let strictly_increasing = match kind {
            NormKind::Operator | NormKind::KyFan { .. } => false,
            NormKind::Schatten { p } => p.is_finite(),
            NormKind::Dyadic => true,
        };
        Ok(Self {
            kind,
            strictly_increasing,
        })
    }

    pub fn operator() -> Self {
        Self::new(NormKind::Operator).expect("operator norm")
    }

    pub fn dyadic() -> Self {
        Self::new(NormKind::Dyadic).expect("dyadic gauge")
    }

    pub fn schatten(p: f64) -> Result<Self> {
        Self::new(NormKind::Schatten { p })
    }

    pub fn ky_fan(k: usize) -> Result<Self> {
        Self::new(NormKind::KyFan { k })
    }

    /// Gauge value of an arbitrary nonnegative sequence (rearranged first).
    pub fn gauge(&self, seq: &[f64]) -> Result<f64> {
        let sorted = rearrange_decreasing(seq)?;
        Ok(self.gauge_sorted(&sorted))
    }

    /// Gauge value of a sequence already sorted decreasing.
    pub fn gauge_sorted(&self, sorted: &[f64]) -> f64 {
        match self.kind {
            NormKind::Operator => sorted.first().copied().unwrap_or(0.0),
            NormKind::Schatten { p } if p.is_infinite() => sorted.first().copied().unwrap_or(0.0),
            NormKind::Schatten { p } => {
                // Scale by the largest entry to keep large p from overflowing.
                let top = sorted.first().copied().unwrap_or(0.0);
                if top == 0.0 {
                    return 0.0;
                }
                let sum: f64 = sorted.iter().map(|&s| (s / top).powf(p)).sum();
                top * sum.powf(1.0 / p)
            }
            NormKind::KyFan { k } => sorted.iter().take(k).sum(),
            NormKind::Dyadic => sorted
                .iter()
                .enumerate()
                .map(|(k, &s)| s * 0.5f64.powi(k as i32))
                .sum(),
        }
    }
}

impl fmt::Display for NormDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NormKind::Operator => write!(f, "op"),
            NormKind::Schatten { p } => write!(f, "schatten:{p}"),
            NormKind::KyFan { k } => write!(f, "kyfan:{k}"),
            NormKind::Dyadic => write!(f, "dyadic"),
        }
    }
}

/// Parses `op`, `schatten:p`, `kyfan:k` or `dyadic`.
impl FromStr for NormDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let unknown = || Error::UnknownNorm(s.to_string());
        let kind = match s.split_once(':') {
            None if s == "op" => NormKind::Operator,
            None if s == "dyadic" => NormKind::Dyadic,
            Some(("schatten", p)) => NormKind::Schatten {
                p: p.parse().map_err(|_| unknown())?,
            },
            Some(("kyfan", k)) => NormKind::KyFan {
                k: k.parse().map_err(|_| unknown())?,
            },
            _ => return Err(unknown()),
        };
        Self::new(kind)
    }
}

/// Parses a comma-separated norm list such as `op,schatten:2,dyadic`.
pub fn parse_norm_list(s: &str) -> Result<Vec<NormDescriptor>> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(str::parse)
        .collect()
}

pub fn rearrange_decreasing(seq: &[f64]) -> Result<Vec<f64>> {
    for (index, &value) in seq.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::NegativeEntry { index, value });
        }
    }
    let mut out = seq.to_vec();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// `||m||_φ` evaluated on the singular spectrum of `m`.
pub fn evaluate_norm(d: &NormDescriptor, m: &ComplexMatrix) -> Result<f64> {
    let s = svd(m, &Tolerance::default())?;
    Ok(d.gauge_sorted(&s.values))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum StrictnessVerdict {
    /// `φ(a) = φ(b)` although `a` is strictly dominated at `index`: the
    /// gauge is not strictly increasing.
    Violation { phi_a: f64, phi_b: f64, index: usize },
    Consistent { phi_a: f64, phi_b: f64 },
}

impl StrictnessVerdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, StrictnessVerdict::Violation { .. })
    }
}

/// Tests one dominated pair `0 <= a_i <= b_i` against the strict-increase
/// definition. Sequences of different lengths are zero-padded.
pub fn check_strictly_increasing_witness(
    d: &NormDescriptor,
    a: &[f64],
    b: &[f64],
    tol: &Tolerance,
) -> Result<StrictnessVerdict> {
    let n = a.len().max(b.len());
    let pad = |v: &[f64]| {
        let mut v = v.to_vec();
        v.resize(n, 0.0);
        v
    };
    let (a, b) = (pad(a), pad(b));
    // Validates nonnegativity as a side effect.
    rearrange_decreasing(&a)?;
    rearrange_decreasing(&b)?;
    for (index, (&ai, &bi)) in a.iter().zip(&b).enumerate() {
        if ai > bi + tol.scaled(bi) {
            return Err(Error::DominanceViolated { index, a: ai, b: bi });
        }
    }
    let phi_a = d.gauge(&a)?;
    let phi_b = d.gauge(&b)?;
    if (phi_a - phi_b).abs() <= tol.scaled(phi_b) {
        if let Some(index) = a
            .iter()
            .zip(&b)
            .position(|(&ai, &bi)| bi - ai > tol.scaled(bi))
        {
            return Ok(StrictnessVerdict::Violation { phi_a, phi_b, index });
        }
    }
    Ok(StrictnessVerdict::Consistent { phi_a, phi_b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn rearrangement() {
        assert_eq!(rearrange_decreasing(&[1.0, 3.0, 2.0]).unwrap(), vec![3.0, 2.0, 1.0]);
        assert_eq!(rearrange_decreasing(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(rearrange_decreasing(&[0.5, 3.0, 0.5]).unwrap(), vec![3.0, 0.5, 0.5]);
        assert_eq!(
            rearrange_decreasing(&[1.0, -0.1]).unwrap_err(),
            Error::NegativeEntry { index: 1, value: -0.1 }
        );
    }

    #[test]
    fn evaluate_examples() {
        let s2 = NormDescriptor::schatten(2.0).unwrap();
        let v = evaluate_norm(&s2, &ComplexMatrix::from_real_diag(&[3.0, 4.0])).unwrap();
        assert!((v - 5.0).abs() < 1e-14);

        let dy = NormDescriptor::dyadic();
        let v = evaluate_norm(&dy, &ComplexMatrix::from_real_diag(&[0.5, 3.0, 0.25])).unwrap();
        // 3·1 + 0.5·½ + 0.25·¼
        assert!((v - 3.3125).abs() < 1e-14);

        let op = NormDescriptor::operator();
        let v = evaluate_norm(&op, &ComplexMatrix::from_real_diag(&[2.0, -7.0])).unwrap();
        assert!((v - 7.0).abs() < 1e-14);
    }

    #[test]
    fn strictness_flags() {
        assert!(!NormDescriptor::operator().strictly_increasing);
        assert!(!NormDescriptor::ky_fan(2).unwrap().strictly_increasing);
        assert!(NormDescriptor::schatten(1.0).unwrap().strictly_increasing);
        assert!(NormDescriptor::schatten(3.5).unwrap().strictly_increasing);
        assert!(!NormDescriptor::schatten(f64::INFINITY).unwrap().strictly_increasing);
        assert!(NormDescriptor::dyadic().strictly_increasing);
    }

    #[test]
    fn parsing() {
        let list = parse_norm_list("op,schatten:2,kyfan:3,dyadic").unwrap();
        assert_eq!(list.len(), 4);
        assert_eq!(list[1].kind, NormKind::Schatten { p: 2.0 });
        assert_eq!(list[2].kind, NormKind::KyFan { k: 3 });
        for d in &list {
            assert_eq!(d.to_string().parse::<NormDescriptor>().unwrap(), *d);
        }
        assert!(matches!("schatten:0.5".parse::<NormDescriptor>(), Err(Error::BadExponent(_))));
        assert!(matches!("frobenius".parse::<NormDescriptor>(), Err(Error::UnknownNorm(_))));
        assert!(matches!("kyfan:x".parse::<NormDescriptor>(), Err(Error::UnknownNorm(_))));
        assert!(matches!("kyfan:0".parse::<NormDescriptor>(), Err(Error::UnknownNorm(_))));
    }

    #[test]
    fn strictness_witness_examples() {
        let v = check_strictly_increasing_witness(
            &NormDescriptor::operator(),
            &[1.0, 0.0],
            &[1.0, 1.0],
            &tol(),
        )
        .unwrap();
        assert!(v.is_violation());

        let v = check_strictly_increasing_witness(
            &NormDescriptor::dyadic(),
            &[1.0, 0.0],
            &[1.0, 1.0],
            &tol(),
        )
        .unwrap();
        assert_eq!(v, StrictnessVerdict::Consistent { phi_a: 1.0, phi_b: 1.5 });

        for d in parse_norm_list("op,kyfan:1,schatten:2,dyadic").unwrap() {
            let v = check_strictly_increasing_witness(&d, &[0.3, 2.0], &[0.3, 2.0], &tol()).unwrap();
            assert!(!v.is_violation());
        }

        let err = check_strictly_increasing_witness(
            &NormDescriptor::dyadic(),
            &[2.0],
            &[1.0],
            &tol(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DominanceViolated { index: 0, .. }));
    }

    #[test]
    fn ky_fan_one_is_operator() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, -4.0]]);
        let a = evaluate_norm(&NormDescriptor::ky_fan(1).unwrap(), &m).unwrap();
        let b = evaluate_norm(&NormDescriptor::operator(), &m).unwrap();
        assert_eq!(a, b);
    }
}
