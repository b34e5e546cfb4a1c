//! Seeded instance factories.
//!
//! Every generator owns a private ChaCha stream derived from the caller's
//! seed and a per-generator label, so two generators called with the same
//! configuration never share draws and there is no global RNG state. The
//! derivation is counter based: `derive_seed(seed, counter)` mixes the two
//! words with SplitMix64, and campaign drivers use it to give trial `i` the
//! seed `derive_seed(master, i)`.
//!
//! Compactness is modeled by singular values decaying geometrically or by a
//! power law at finite dimension.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{polar, psd_power, svd, vec_norm, ComplexMatrix, Tolerance, C64};
use crate::young::ConjugatePair;

pub const MAX_DIMENSION: usize = 64;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed number `counter` of `seed`.
pub fn derive_seed(seed: u64, counter: u64) -> u64 {
    splitmix64(seed ^ splitmix64(counter))
}

/// Independent stream for `(seed, label)`.
pub fn stream(seed: u64, label: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, label))
}

// Stream labels, one per generator.
const LABEL_PAIR: u64 = 1;
const LABEL_EQUALITY: u64 = 2;
const LABEL_EQUALITY_PSD: u64 = 3;
const LABEL_CONTRACTION: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "lowercase")]
pub enum SpectrumDecay {
    None,
    Geometric { ratio: f64 },
    PowerLaw { exponent: f64 },
}

impl SpectrumDecay {
    fn validate(&self) -> Result<()> {
        match *self {
            SpectrumDecay::Geometric { ratio } if !(ratio > 0.0 && ratio < 1.0) => Err(
                Error::InvalidConfig(format!("geometric ratio must lie in (0, 1), got {ratio}")),
            ),
            SpectrumDecay::PowerLaw { exponent } if !(exponent > 0.0 && exponent.is_finite()) => {
                Err(Error::InvalidConfig(format!(
                    "power-law exponent must be positive, got {exponent}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Target singular values `(s_0, ..., s_{n-1})` with `s_0 = 1`, or `None`
    /// when the profile is left to the ensemble.
    pub fn profile(&self, n: usize) -> Option<Vec<f64>> {
        match *self {
            SpectrumDecay::None => None,
            SpectrumDecay::Geometric { ratio } => Some((0..n).map(|k| ratio.powi(k as i32)).collect()),
            SpectrumDecay::PowerLaw { exponent } => {
                Some((0..n).map(|k| ((k + 1) as f64).powf(-exponent)).collect())
            }
        }
    }
}

impl fmt::Display for SpectrumDecay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumDecay::None => write!(f, "none"),
            SpectrumDecay::Geometric { ratio } => write!(f, "geometric:{ratio}"),
            SpectrumDecay::PowerLaw { exponent } => write!(f, "powerlaw:{exponent}"),
        }
    }
}

/// Parses `none`, `geometric:<ratio>` or `powerlaw:<exponent>`.
impl FromStr for SpectrumDecay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown spectrum decay {s:?}"));
        let decay = match s.trim().split_once(':') {
            None if s.trim() == "none" => SpectrumDecay::None,
            Some(("geometric", r)) => SpectrumDecay::Geometric {
                ratio: r.parse().map_err(|_| bad())?,
            },
            Some(("powerlaw", e)) => SpectrumDecay::PowerLaw {
                exponent: e.parse().map_err(|_| bad())?,
            },
            _ => return Err(bad()),
        };
        decay.validate()?;
        Ok(decay)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratorConfig {
    seed: u64,
    dimension: usize,
    spectrum_decay: SpectrumDecay,
    p: f64,
}

impl GeneratorConfig {
    /// Dimension in `1..=64`, no decay, `p = 2`.
    pub fn new(seed: u64, dimension: usize) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::BadDimension(dimension));
        }
        Ok(Self {
            seed,
            dimension,
            spectrum_decay: SpectrumDecay::None,
            p: 2.0,
        })
    }

    pub fn with_decay(mut self, decay: SpectrumDecay) -> Result<Self> {
        decay.validate()?;
        self.spectrum_decay = decay;
        Ok(self)
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        ConjugatePair::new(p)?;
        self.p = p;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dimension(self, dimension: usize) -> Result<Self> {
        Self::new(self.seed, dimension)?;
        Ok(Self { dimension, ..self })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn decay(&self) -> SpectrumDecay {
        self.spectrum_decay
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn conjugate_pair(&self) -> ConjugatePair {
        ConjugatePair::new(self.p).expect("validated on construction")
    }
}

/// Complex Gaussian matrix, real and imaginary parts standard normal.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    ComplexMatrix::new(rows, cols, data).expect("finite gaussian entries")
}

/// Unitary polar factor of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    // A Gaussian matrix is singular with probability zero; redraw in the
    // astronomically unlikely rank-deficient case.
    loop {
        let g = gaussian_matrix(rng, n, n);
        let parts = polar(&g, &Tolerance::default()).expect("polar of gaussian");
        if parts.rank() == n {
            return parts.isometry;
        }
    }
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

/// Wishart-type PSD matrix `g g* / n`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    g.mul_adjoint(&g).scale(1.0 / n as f64).hermitian_part()
}

/// `W diag(spectrum) W*` for a random unitary `W`.
pub fn psd_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> ComplexMatrix {
    let w = random_unitary(rng, spectrum.len());
    ComplexMatrix::from_real_diag(spectrum).conjugate_by(&w).hermitian_part()
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Gaussian matrix, re-spectralized as `U diag(profile) V*` when the
/// configuration asks for a decay profile.
fn decayed_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, decay: SpectrumDecay) -> ComplexMatrix {
    match decay.profile(n) {
        None => gaussian_matrix(rng, n, n),
        Some(profile) => {
            let u = random_unitary(rng, n);
            let v = random_unitary(rng, n);
            (&u * &ComplexMatrix::from_real_diag(&profile)).mul_adjoint(&v)
        }
    }
}

/// Independent complex Gaussian pair, deterministic in the seed.
pub fn random_pair(cfg: &GeneratorConfig) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = stream(cfg.seed, LABEL_PAIR);
    let n = cfg.dimension;
    let a = decayed_matrix(&mut rng, n, cfg.spectrum_decay);
    let b = decayed_matrix(&mut rng, n, cfg.spectrum_decay);
    (a, b)
}

/// Positive parts `(c^{1/p}, c^{1/q})` of an equality pair built from PSD `c`.
pub fn equality_pair_from(
    c: &ComplexMatrix,
    cp: &ConjugatePair,
    tol: &Tolerance,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    Ok((psd_power(c, 1.0 / cp.p(), tol)?, psd_power(c, 1.0 / cp.q(), tol)?))
}

fn equality_core<R: Rng + ?Sized>(rng: &mut R, cfg: &GeneratorConfig) -> ComplexMatrix {
    let n = cfg.dimension;
    match cfg.spectrum_decay.profile(n) {
        None => random_psd(rng, n),
        Some(profile) => psd_with_spectrum(rng, &profile),
    }
}

/// Pair with `|a|^p = |b|^q`: `a = u c^{1/p}`, `b = v c^{1/q}` for random PSD
/// `c` and independent random unitaries `u`, `v`.
pub fn equality_family(cfg: &GeneratorConfig) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = stream(cfg.seed, LABEL_EQUALITY);
    let c = equality_core(&mut rng, cfg);
    let (abs_a, abs_b) =
        equality_pair_from(&c, &cfg.conjugate_pair(), &Tolerance::default()).expect("psd core");
    let u = random_unitary(&mut rng, cfg.dimension);
    let v = random_unitary(&mut rng, cfg.dimension);
    (&u * &abs_a, &v * &abs_b)
}

/// PSD equality pair `(c^{1/p}, c^{1/q})`, no unitary factors.
pub fn equality_family_psd(cfg: &GeneratorConfig) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = stream(cfg.seed, LABEL_EQUALITY_PSD);
    let c = equality_core(&mut rng, cfg);
    equality_pair_from(&c, &cfg.conjugate_pair(), &Tolerance::default()).expect("psd core")
}

/// `a = diag(√2, 1, 0, ...)`, `b = diag(√2, 0, ...)`, `p = q = 2`: the mean
/// `(a² + b²)/2 = diag(2, 1/2, 0, ...)` and `|ab*| = diag(2, 0, ...)` share
/// their operator norm although `a² != b²`.
pub fn opnorm_counterexample(dim: usize) -> Result<(ComplexMatrix, ComplexMatrix, ConjugatePair)> {
    if !(2..=MAX_DIMENSION).contains(&dim) {
        return Err(Error::BadDimension(dim));
    }
    let mut da = vec![0.0; dim];
    let mut db = vec![0.0; dim];
    da[0] = 2f64.sqrt();
    da[1] = 1.0;
    db[0] = 2f64.sqrt();
    Ok((
        ComplexMatrix::from_real_diag(&da),
        ComplexMatrix::from_real_diag(&db),
        ConjugatePair::new(2.0)?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionKind {
    Random,
    Identity,
}

/// Random matrix with singular values clipped to at most one. Draws whose
/// singular values are all below one are returned untouched.
pub fn contraction(cfg: &GeneratorConfig, kind: ContractionKind) -> ComplexMatrix {
    let n = cfg.dimension;
    if kind == ContractionKind::Identity {
        return ComplexMatrix::identity(n);
    }
    let mut rng = stream(cfg.seed, LABEL_CONTRACTION);
    let g = gaussian_matrix(&mut rng, n, n).scale(1.0 / (2.0 * n as f64).sqrt());
    clip_to_contraction(&g)
}

/// Clips singular values above one; returns `m` itself when already a
/// contraction.
pub fn clip_to_contraction(m: &ComplexMatrix) -> ComplexMatrix {
    let s = svd(m, &Tolerance::default()).expect("svd of finite matrix");
    if s.largest() <= 1.0 {
        return m.clone();
    }
    let clipped: Vec<f64> = s.values.iter().map(|&x| x.min(1.0)).collect();
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for (k, &sigma) in clipped.iter().enumerate() {
        if sigma > 0.0 {
            out = out + ComplexMatrix::outer(&s.left.column(k), &s.right.column(k)).scale(sigma);
        }
    }
    out
}
