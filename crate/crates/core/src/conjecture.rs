//! Operator equality `z|ab*|z* = |a|^p/p + |b|^q/q` under a contraction `z`.
//!
//! When the equality holds, `|a|^p = |b|^q`, so `a` is always rebuilt as
//! `(|b|^q)^{1/p}` and the equality reads `z|b*|^q z* = |b|^q`. The three
//! conditions
//!
//! 1. `|b*| z*z = |b*|`
//! 2. `|b| zz* = |b|`
//! 3. `|b| z = z |b*|`
//!
//! are sufficient for it. At finite rank the trace of `|b|^q` is finite and
//! they are also necessary, so [`search_necessity_counterexample`] can only
//! collect consistency evidence: a witness it reports is a numerical artifact
//! to investigate, not a refutation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{
    clip_to_contraction, derive_seed, gaussian_matrix, random_unitary, stream, GeneratorConfig,
    SpectrumDecay,
};
use crate::linalg::{operator_norm, psd_power, svd, ComplexMatrix, Tolerance, C64};
use crate::young::ConjugatePair;

/// Equality residual, relative to `||b||^q`, below which a point counts as
/// an equality case.
pub const EQUALITY_REL: f64 = 1e-8;
/// Condition violation, relative to `||b||`, above which an equality case is
/// a witness.
pub const VIOLATION_THRESHOLD: f64 = 1e-4;
/// Premise threshold of [`check_trace_argument`].
pub const PREMISE_REL: f64 = 1e-10;
/// Threshold on the three conditions, relative to `||b||`.
pub const CONDITION_REL: f64 = 1e-6;

const LABEL_SEARCH: u64 = 5;
const DEFAULT_DECAY: SpectrumDecay = SpectrumDecay::Geometric { ratio: 0.5 };
const COLLAPSED_B: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ThreeConditions {
    /// `|| |b*|z*z - |b*| ||_F`
    pub r1: f64,
    /// `|| |b|zz* - |b| ||_F`
    pub r2: f64,
    /// `|| |b|z - z|b*| ||_F`
    pub r3: f64,
    /// `||b||`
    pub scale: f64,
}

impl ThreeConditions {
    pub fn max_residual(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3)
    }

    pub fn max_relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_residual()
        } else {
            self.max_residual() / self.scale
        }
    }

    pub fn hold(&self, rel: f64, tol: &Tolerance) -> bool {
        self.max_residual() <= rel * self.scale + tol.absolute
    }
}

/// `|b|`, `|b*|`, `|b|^q`, `|b*|^q` and `||b||` from one SVD.
struct Moduli {
    abs: ComplexMatrix,
    abs_adjoint: ComplexMatrix,
    abs_q: ComplexMatrix,
    abs_adjoint_q: ComplexMatrix,
    norm: f64,
}

impl Moduli {
    fn new(b: &ComplexMatrix, q: f64, tol: &Tolerance) -> Result<Self> {
        let s = svd(b, tol)?;
        Ok(Self {
            abs: s.abs_power(1.0),
            abs_adjoint: s.abs_adjoint_power(1.0),
            abs_q: s.abs_power(q),
            abs_adjoint_q: s.abs_adjoint_power(q),
            norm: s.largest(),
        })
    }

    fn conditions(&self, z: &ComplexMatrix) -> ThreeConditions {
        let zsz = z.adjoint() * z;
        let zzs = z.mul_adjoint(z);
        ThreeConditions {
            r1: (&(&self.abs_adjoint * &zsz) - &self.abs_adjoint).frobenius_norm(),
            r2: (&(&self.abs * &zzs) - &self.abs).frobenius_norm(),
            r3: (&(&self.abs * z) - &(z * &self.abs_adjoint)).frobenius_norm(),
            scale: self.norm,
        }
    }

    /// `|| z|b*|^q z* - |b|^q ||_F`.
    fn equality_residual(&self, z: &ComplexMatrix) -> f64 {
        (&self.abs_adjoint_q.conjugate_by(z) - &self.abs_q).frobenius_norm()
    }
}

fn check_pair_shape(b: &ComplexMatrix, z: &ComplexMatrix) -> Result<()> {
    if !b.is_square() || b.shape() != z.shape() {
        return Err(Error::DimensionMismatch(format!(
            "b is {}x{}, z is {}x{}",
            b.rows(),
            b.cols(),
            z.rows(),
            z.cols()
        )));
    }
    Ok(())
}

fn require_contraction(z: &ComplexMatrix, tol: &Tolerance) -> Result<()> {
    let norm = operator_norm(z)?;
    if norm > 1.0 + tol.scaled(1.0) {
        return Err(Error::NotContraction { norm });
    }
    Ok(())
}

/// The three condition residuals for `(b, z)`, with no premise checks.
pub fn three_conditions(
    b: &ComplexMatrix,
    z: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ThreeConditions> {
    check_pair_shape(b, z)?;
    Ok(Moduli::new(b, 2.0, tol)?.conditions(z))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Sufficiency {
    pub conditions: ThreeConditions,
    /// `|| z|ab*|z* - (|a|^p/p + |b|^q/q) ||_F` with `a = (|b|^q)^{1/p}`.
    pub residual: f64,
    /// `||b||^q`
    pub scale: f64,
    pub holds: bool,
}

/// Given a contraction `z` satisfying the three conditions, checks the
/// operator equality for `a = (|b|^q)^{1/p}`.
pub fn check_sufficiency(
    b: &ComplexMatrix,
    z: &ComplexMatrix,
    cp: &ConjugatePair,
    tol: &Tolerance,
) -> Result<Sufficiency> {
    check_pair_shape(b, z)?;
    require_contraction(z, tol)?;
    let moduli = Moduli::new(b, cp.q(), tol)?;
    let conditions = moduli.conditions(z);
    if !conditions.hold(CONDITION_REL, tol) {
        return Err(Error::PremiseNotMet(format!(
            "conditions fail: residuals {:e}, {:e}, {:e}",
            conditions.r1, conditions.r2, conditions.r3
        )));
    }
    let a = psd_power(&moduli.abs_q, 1.0 / cp.p(), tol)?;
    let abs_product = svd(&a.mul_adjoint(b), tol)?.abs_power(1.0);
    let mean = psd_power(&a, cp.p(), tol)?.scale(1.0 / cp.p()) + moduli.abs_q.scale(1.0 / cp.q());
    let residual = (&abs_product.conjugate_by(z) - &mean).frobenius_norm();
    let scale = moduli.norm.powf(cp.q());
    Ok(Sufficiency {
        conditions,
        residual,
        scale,
        holds: residual <= EQUALITY_REL * scale + tol.absolute,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceArgument {
    /// `|| z|b*|^q z* - |b|^q ||_F`
    pub equality_residual: f64,
    pub conditions: ThreeConditions,
    pub holds: bool,
}

/// Given the operator equality for a contraction `z`, checks that the three
/// conditions follow: `Tr(|b*|^q (1 - z*z)) = 0` forces them at finite rank.
pub fn check_trace_argument(
    b: &ComplexMatrix,
    z: &ComplexMatrix,
    cp: &ConjugatePair,
    tol: &Tolerance,
) -> Result<TraceArgument> {
    check_pair_shape(b, z)?;
    require_contraction(z, tol)?;
    let moduli = Moduli::new(b, cp.q(), tol)?;
    let equality_residual = moduli.equality_residual(z);
    let scale = moduli.norm.powf(cp.q());
    if equality_residual > PREMISE_REL * scale + tol.absolute {
        return Err(Error::PremiseNotMet(format!(
            "equality residual {equality_residual:e} exceeds {:e}",
            PREMISE_REL * scale
        )));
    }
    let conditions = moduli.conditions(z);
    Ok(TraceArgument {
        equality_residual,
        holds: conditions.hold(CONDITION_REL, tol),
        conditions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchSpace {
    /// Arbitrary square `b` and `z`.
    General,
    /// `b` PSD diagonal, `z = W diag(e^{iθ})` unitary for a fixed unitary `W`.
    DiagonalUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchOptions {
    pub space: SearchSpace,
    /// Coordinate probes per trial.
    pub iterations: usize,
    pub initial_step: f64,
    /// Weight of `max(0, ||z|| - 1)` in the refinement objective.
    pub penalty: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            space: SearchSpace::General,
            iterations: 200,
            initial_step: 1e-3,
            penalty: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Witness {
    pub trial: u64,
    pub b: ComplexMatrix,
    pub z: ComplexMatrix,
    pub equality_relative: f64,
    pub violation_relative: f64,
    pub conditions: ThreeConditions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchResult {
    /// Smallest candidate score over all trials; a witness exists iff it is
    /// below one.
    pub best_objective: f64,
    pub best_trial: u64,
    pub witness: Option<Witness>,
    pub trials: u64,
    pub seed: u64,
    pub max_dimension: usize,
    pub p: f64,
    pub options: SearchOptions,
    /// Points with equality residual below [`EQUALITY_REL`].
    pub equality_cases: u64,
}

/// `max(eq / EQUALITY_REL, VIOLATION_THRESHOLD / violation)`: below one
/// exactly for an equality case violating a condition.
pub fn candidate_score(equality_relative: f64, violation_relative: f64) -> f64 {
    (equality_relative / EQUALITY_REL).max(VIOLATION_THRESHOLD / violation_relative.max(1e-300))
}

struct Evaluation {
    objective: f64,
    contraction: bool,
    equality_relative: f64,
    conditions: ThreeConditions,
}

fn evaluate(b: &ComplexMatrix, z: &ComplexMatrix, q: f64, penalty: f64, tol: &Tolerance) -> Option<Evaluation> {
    let moduli = Moduli::new(b, q, tol).ok()?;
    if moduli.norm < COLLAPSED_B {
        return None;
    }
    let z_norm = operator_norm(z).ok()?;
    let equality_relative = moduli.equality_residual(z) / moduli.norm.powf(q);
    Some(Evaluation {
        objective: equality_relative + penalty * (z_norm - 1.0).max(0.0),
        contraction: z_norm <= 1.0 + tol.scaled(1.0),
        equality_relative,
        conditions: moduli.conditions(z),
    })
}

/// Real coordinates of one trial and their map to `(b, z)`.
struct Parametrization {
    n: usize,
    space: SearchSpace,
    frame: ComplexMatrix,
}

impl Parametrization {
    fn len(&self) -> usize {
        match self.space {
            SearchSpace::General => 4 * self.n * self.n,
            SearchSpace::DiagonalUnitary => 2 * self.n,
        }
    }

    fn decode(&self, x: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.n;
        match self.space {
            SearchSpace::General => {
                let entries: Vec<C64> = x.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
                let (b, z) = entries.split_at(n * n);
                (
                    ComplexMatrix::new(n, n, b.to_vec()).expect("finite coordinates"),
                    ComplexMatrix::new(n, n, z.to_vec()).expect("finite coordinates"),
                )
            }
            SearchSpace::DiagonalUnitary => {
                let diag: Vec<f64> = x[..n].iter().map(|d| d.abs()).collect();
                let phases: Vec<C64> = x[n..].iter().map(|&t| C64::from_polar(1.0, t)).collect();
                (
                    ComplexMatrix::from_real_diag(&diag),
                    &self.frame * &ComplexMatrix::from_diag(&phases),
                )
            }
        }
    }

    fn encode_general(b: &ComplexMatrix, z: &ComplexMatrix) -> Vec<f64> {
        b.data().iter().chain(z.data()).flat_map(|c| [c.re, c.im]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StartMode {
    RandomContraction,
    NearPolar,
    KernelBlock,
}

fn decayed_b(rng: &mut ChaCha8Rng, n: usize, decay: SpectrumDecay, drop_last: bool) -> ComplexMatrix {
    let mut profile = decay.profile(n).expect("decay profile");
    if drop_last && n > 1 {
        profile[n - 1] = 0.0;
    }
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    (&u * &ComplexMatrix::from_real_diag(&profile)).mul_adjoint(&v)
}

fn small_contraction(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ComplexMatrix {
    clip_to_contraction(&gaussian_matrix(rng, n, n).scale(scale / (2.0 * n as f64).sqrt()))
}

fn start_point(
    rng: &mut ChaCha8Rng,
    n: usize,
    mode: StartMode,
    decay: SpectrumDecay,
    tol: &Tolerance,
) -> (ComplexMatrix, ComplexMatrix) {
    match mode {
        StartMode::RandomContraction => {
            let b = decayed_b(rng, n, decay, false);
            (b, small_contraction(rng, n, 1.0))
        }
        StartMode::NearPolar => {
            let b = decayed_b(rng, n, decay, false);
            let nu = svd(&b, tol).expect("svd of finite matrix").partial_isometry();
            let z = nu.adjoint() + small_contraction(rng, n, 1e-9);
            (b, clip_to_contraction(&z))
        }
        StartMode::KernelBlock => {
            let b = decayed_b(rng, n, decay, true);
            let s = svd(&b, tol).expect("svd of finite matrix");
            let nu = s.partial_isometry();
            let id = ComplexMatrix::identity(n);
            let left = &id - &s.support_projection();
            let right = &id - &s.range_projection();
            let block = &(&left * &small_contraction(rng, n, 1.0)) * &right;
            let z = nu.adjoint() + block + small_contraction(rng, n, 1e-9);
            (b, clip_to_contraction(&z))
        }
    }
}

struct TrialOutcome {
    trial: u64,
    score: f64,
    equality_cases: u64,
    witness: Option<Witness>,
}

struct Best {
    score: f64,
    b: ComplexMatrix,
    z: ComplexMatrix,
    equality_relative: f64,
    conditions: ThreeConditions,
}

fn run_trial(
    seed: u64,
    trial: u64,
    max_dim: usize,
    cp: &ConjugatePair,
    decay: SpectrumDecay,
    opts: &SearchOptions,
    tol: &Tolerance,
) -> TrialOutcome {
    let mut rng = stream(derive_seed(seed, trial), LABEL_SEARCH);
    let span = max_dim.saturating_sub(1).max(1) as u64;
    let n = if max_dim == 1 { 1 } else { 2 + (trial % span) as usize };
    let mode = match (trial / span) % 3 {
        0 => StartMode::RandomContraction,
        1 => StartMode::NearPolar,
        _ => StartMode::KernelBlock,
    };

    let (param, mut x) = match opts.space {
        SearchSpace::General => {
            let (b, z) = start_point(&mut rng, n, mode, decay, tol);
            let param = Parametrization { n, space: opts.space, frame: ComplexMatrix::identity(n) };
            (param, Parametrization::encode_general(&b, &z))
        }
        SearchSpace::DiagonalUnitary => {
            let frame = random_unitary(&mut rng, n);
            let mut x = decay.profile(n).expect("decay profile");
            x.extend((0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)));
            (Parametrization { n, space: opts.space, frame }, x)
        }
    };

    let q = cp.q();
    let mut equality_cases = 0;
    let mut best: Option<Best> = None;
    let mut consider = |b: &ComplexMatrix, z: &ComplexMatrix, e: &Evaluation, best: &mut Option<Best>| {
        if !e.contraction {
            return;
        }
        if e.equality_relative <= EQUALITY_REL {
            equality_cases += 1;
        }
        let score = candidate_score(e.equality_relative, e.conditions.max_relative());
        if best.as_ref().is_none_or(|cur| score < cur.score) {
            *best = Some(Best {
                score,
                b: b.clone(),
                z: z.clone(),
                equality_relative: e.equality_relative,
                conditions: e.conditions,
            });
        }
    };

    let (b0, z0) = param.decode(&x);
    let mut current = evaluate(&b0, &z0, q, opts.penalty, tol);
    if let Some(e) = &current {
        consider(&b0, &z0, e, &mut best);
    }

    let dims = param.len();
    let mut step = opts.initial_step;
    let mut failures = 0;
    for it in 0..opts.iterations {
        let Some(cur) = &current else { break };
        let k = it % dims;
        let mut accepted = None;
        for sign in [1.0, -1.0] {
            let mut y = x.clone();
            y[k] += sign * step;
            let (b, z) = param.decode(&y);
            if let Some(e) = evaluate(&b, &z, q, opts.penalty, tol) {
                if e.objective < cur.objective {
                    consider(&b, &z, &e, &mut best);
                    accepted = Some((y, e));
                    break;
                }
            }
        }
        match accepted {
            Some((y, e)) => {
                x = y;
                current = Some(e);
                failures = 0;
            }
            None => {
                failures += 1;
                if failures >= dims {
                    step *= 0.5;
                    failures = 0;
                }
            }
        }
    }

    match best {
        None => TrialOutcome { trial, score: f64::MAX, equality_cases, witness: None },
        Some(best) => {
            let witness = (best.score < 1.0).then(|| Witness {
                trial,
                b: best.b,
                z: best.z,
                equality_relative: best.equality_relative,
                violation_relative: best.conditions.max_relative(),
                conditions: best.conditions,
            });
            TrialOutcome { trial, score: best.score, equality_cases, witness }
        }
    }
}

/// Local search for an equality case violating one of the three conditions,
/// with the default options.
pub fn search_necessity_counterexample(
    cfg: &GeneratorConfig,
    trials: u64,
    tol: &Tolerance,
) -> Result<SearchResult> {
    search_with_options(cfg, trials, &SearchOptions::default(), tol)
}

/// Trial `t` runs at dimension `2 + t mod (d - 1)` for `d = cfg.dimension()`
/// on its own seed `derive_seed(cfg.seed(), t)`, cycling through three start
/// modes: a random contraction, a perturbation of `ν*`, and `ν*` plus a block
/// between the kernels of `b*` and `b`. Each of `opts.iterations` probes
/// moves one real coordinate by `±step`; the step halves after a full cycle
/// without improvement.
pub fn search_with_options(
    cfg: &GeneratorConfig,
    trials: u64,
    opts: &SearchOptions,
    tol: &Tolerance,
) -> Result<SearchResult> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    if !(opts.initial_step > 0.0 && opts.penalty >= 0.0) {
        return Err(Error::InvalidConfig("step must be positive and penalty nonnegative".into()));
    }
    let cp = cfg.conjugate_pair();
    let decay = match cfg.decay() {
        SpectrumDecay::None => DEFAULT_DECAY,
        d => d,
    };
    let seed = cfg.seed();
    let max_dim = cfg.dimension();
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(seed, t, max_dim, &cp, decay, opts, tol))
        .collect();

    let equality_cases = outcomes.iter().map(|o| o.equality_cases).sum();
    let best = outcomes
        .into_iter()
        .min_by(|x, y| x.score.total_cmp(&y.score).then(x.trial.cmp(&y.trial)))
        .expect("at least one trial");
    Ok(SearchResult {
        best_objective: best.score,
        best_trial: best.trial,
        witness: best.witness,
        trials,
        seed,
        max_dimension: max_dim,
        p: cp.p(),
        options: *opts,
        equality_cases,
    })
}
