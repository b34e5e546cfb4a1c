//! Seeded property campaigns.
//!
//! Trial `t` of a campaign runs on seed `derive_seed(seed, t)`, dimension
//! `dims[t % dims.len()]` and exponent `p_list[(t / dims.len()) % p_list.len()]`,
//! so a summary is reproduced exactly by rerunning the same configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conjecture::{
    check_sufficiency, check_trace_argument, search_necessity_counterexample, SearchResult,
};
use crate::error::{Error, Result};
use crate::generators::{
    derive_seed, equality_family, equality_family_psd, gaussian_matrix, random_pair, random_psd,
    random_unit_vector, random_unitary, stream, GeneratorConfig, SpectrumDecay, MAX_DIMENSION,
};
use crate::linalg::{hermitian_eigen, is_psd, svd, ComplexMatrix, Tolerance, C64};
use crate::norms::{check_strictly_increasing_witness, evaluate_norm, NormDescriptor, NormKind};
use crate::young::{
    build_partial_isometry, check_equivalence, check_lambda_bound, check_polar_identities,
    check_projection_hoelder, check_range_inclusion, check_vector_hoelder, gamma_support_projection,
    scalar_young, young_spectra, ConjugatePair,
};

/// `γ_k <= δ_k + INEQUALITY_REL · δ_0`.
pub const INEQUALITY_REL: f64 = 1e-8;
/// `|| u*u - Σ p_k ||_F` bound.
pub const ISOMETRY_TOL: f64 = 1e-8;
/// `|| |a|^p - |b|^q ||_F <= POWER_REL · || |b|^q ||_F` on equality instances.
pub const POWER_REL: f64 = 1e-6;
/// `max_k |γ_k - δ_k| <= GAP_REL · δ_0` on equality instances.
pub const GAP_REL: f64 = 1e-7;
/// Polar identity residuals relative to their scale.
pub const POLAR_REL: f64 = 1e-8;
/// Scalar Young equality threshold.
pub const SCALAR_REL: f64 = 1e-12;
/// Sufficiency residual relative to `||b||^q`.
pub const SUFFICIENCY_REL: f64 = 1e-8;

const LABEL_VECTOR: u64 = 11;
const LABEL_LAMBDA: u64 = 12;
const LABEL_SCALAR: u64 = 13;
const LABEL_NORMS: u64 = 14;
const LABEL_DEFICIENT: u64 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EfzInequality,
    EqualityRoundtrip,
    LemmaChecks,
    NormAxioms,
    ConjectureSearch,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::EfzInequality,
        Suite::EqualityRoundtrip,
        Suite::LemmaChecks,
        Suite::NormAxioms,
        Suite::ConjectureSearch,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::EfzInequality => "efz-inequality",
            Suite::EqualityRoundtrip => "equality-roundtrip",
            Suite::LemmaChecks => "lemma-checks",
            Suite::NormAxioms => "norm-axioms",
            Suite::ConjectureSearch => "conjecture-search",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s.trim())
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignConfig {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub p_list: Vec<f64>,
    pub decay: SpectrumDecay,
    pub norms: Vec<NormDescriptor>,
    pub tolerance: Tolerance,
}

impl CampaignConfig {
    /// Dimensions `2..=8`, `p ∈ {1.5, 2, 3}`, no decay, default norm set.
    pub fn new(suite: Suite, trials: u64, seed: u64) -> Self {
        Self {
            suite,
            trials,
            seed,
            dims: (2..=8).collect(),
            p_list: vec![1.5, 2.0, 3.0],
            decay: SpectrumDecay::None,
            norms: default_norms(),
            tolerance: Tolerance::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.dims.is_empty() || self.p_list.is_empty() || self.norms.is_empty() {
            return Err(Error::InvalidConfig("dims, p-list and norms must be nonempty".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d == 0 || d > MAX_DIMENSION) {
            return Err(Error::BadDimension(d));
        }
        for &p in &self.p_list {
            ConjugatePair::new(p)?;
        }
        Ok(())
    }

    fn trial_config(&self, t: u64) -> GeneratorConfig {
        let nd = self.dims.len() as u64;
        let dim = self.dims[(t % nd) as usize];
        let p = self.p_list[((t / nd) % self.p_list.len() as u64) as usize];
        GeneratorConfig::new(derive_seed(self.seed, t), dim)
            .and_then(|c| c.with_p(p))
            .and_then(|c| c.with_decay(self.decay))
            .expect("validated campaign configuration")
    }
}

/// Operator, Schatten 1, 2 and 3.5, Ky-Fan 2 and dyadic.
pub fn default_norms() -> Vec<NormDescriptor> {
    vec![
        NormDescriptor::operator(),
        NormDescriptor::schatten(1.0).expect("valid exponent"),
        NormDescriptor::schatten(2.0).expect("valid exponent"),
        NormDescriptor::schatten(3.5).expect("valid exponent"),
        NormDescriptor::ky_fan(2).expect("valid index"),
        NormDescriptor::dyadic(),
    ]
}

/// One check on one trial; the CSV row type.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckRecord {
    pub trial: u64,
    pub seed: u64,
    pub dimension: usize,
    pub p: f64,
    pub check: String,
    pub passed: bool,
    /// Check-specific measure (relative where a scale exists); infinite when
    /// the check raised an error.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckSummary {
    pub check: String,
    pub runs: u64,
    pub failures: u64,
    pub worst_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignSummary {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub checks: u64,
    pub passes: u64,
    pub failures: u64,
    pub failing_seeds: Vec<u64>,
    pub per_check: Vec<CheckSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRun {
    pub summary: CampaignSummary,
    pub records: Vec<CheckRecord>,
}

struct Trial {
    index: u64,
    cfg: GeneratorConfig,
    records: Vec<CheckRecord>,
}

impl Trial {
    fn push(&mut self, check: &str, passed: bool, residual: f64) {
        self.records.push(CheckRecord {
            trial: self.index,
            seed: self.cfg.seed(),
            dimension: self.cfg.dimension(),
            p: self.cfg.p(),
            check: check.to_string(),
            passed,
            residual,
        });
    }

    fn push_result(&mut self, check: &str, outcome: Result<(bool, f64)>) {
        match outcome {
            Ok((passed, residual)) => self.push(check, passed, residual),
            Err(_) => self.push(check, false, f64::INFINITY),
        }
    }
}

fn relative(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

fn efz_trial(t: &mut Trial, tol: &Tolerance) {
    let (a, b) = random_pair(&t.cfg);
    let cp = t.cfg.conjugate_pair();
    let s = match young_spectra(&a, &b, &cp, tol) {
        Ok(s) => s,
        Err(_) => {
            t.push("inequality", false, f64::INFINITY);
            return;
        }
    };
    let top = s.delta_top();
    let gap = s.inequality.worst_gap.max(0.0);
    t.push("inequality", s.inequality.worst_gap <= INEQUALITY_REL * top, relative(gap, top));

    let outcome = build_partial_isometry(&s, tol).and_then(|u| {
        let slack = &s.mean - &s.abs_product.conjugate_by(&u).hermitian_part();
        let psd = is_psd(&slack, tol)?;
        let support = (&(u.adjoint() * &u) - &gamma_support_projection(&s, tol)).frobenius_norm();
        Ok((psd, support))
    });
    match outcome {
        Ok((psd, support)) => {
            t.push("isometry-domination", psd.is_psd, relative((-psd.min_eigenvalue).max(0.0), top));
            t.push("isometry-support", support <= ISOMETRY_TOL, support);
        }
        Err(_) => {
            t.push("isometry-domination", false, f64::INFINITY);
            t.push("isometry-support", false, f64::INFINITY);
        }
    }
}

fn roundtrip_trial(t: &mut Trial, norms: &[NormDescriptor], tol: &Tolerance) {
    let (a, b) = equality_family(&t.cfg);
    let cp = t.cfg.conjugate_pair();
    match check_equivalence(&a, &b, &cp, norms, tol) {
        Ok(r) => {
            t.push("all-conditions", r.all_true(), r.cond2.residual);
            let scale = young_spectra(&a, &b, &cp, tol)
                .map(|s| s.abs_b_q.frobenius_norm())
                .unwrap_or(0.0);
            let power = relative(r.cond1.residual, scale);
            t.push("power-equality", power <= POWER_REL, power);
            let top = r.delta.first().copied().unwrap_or(0.0);
            let gap = relative(r.cond4.gap, top);
            t.push("spectral-gap", gap <= GAP_REL, gap);
        }
        Err(_) => t.push("all-conditions", false, f64::INFINITY),
    }
}

fn lemma_trial(t: &mut Trial, tol: &Tolerance) {
    let n = t.cfg.dimension();
    let cp = t.cfg.conjugate_pair();
    let (a, b) = random_pair(&t.cfg);
    t.push_result(
        "polar-identities",
        check_polar_identities(&a, &b, tol).map(|r| (r.max_relative() <= POLAR_REL, r.max_relative())),
    );

    // Half the samples use an eigenvector of x so both branches of the
    // equality characterization are exercised.
    let mut rng = stream(t.cfg.seed(), LABEL_VECTOR);
    let x = random_psd(&mut rng, n);
    let xi = if t.index % 2 == 0 {
        hermitian_eigen(&x, tol)
            .map(|e| e.vector(t.index as usize / 2 % n))
            .unwrap_or_else(|_| random_unit_vector(&mut rng, n))
    } else {
        random_unit_vector(&mut rng, n)
    };
    let r = 1.0 / cp.p();
    t.push_result(
        "vector-hoelder",
        check_vector_hoelder(&x, &xi, r, tol)
            .map(|v| (v.inequality_holds && v.flags_agree(), v.eigen_residual)),
    );
    let q = ComplexMatrix::outer(&xi, &xi);
    t.push_result(
        "projection-hoelder",
        check_projection_hoelder(&x, &q, r, tol)
            .map(|v| (v.inequality_holds && v.flags_agree(), v.difference)),
    );

    let mut rng = stream(t.cfg.seed(), LABEL_LAMBDA);
    let (la, lx, lb) = (
        gaussian_matrix(&mut rng, n, n),
        gaussian_matrix(&mut rng, n, n),
        gaussian_matrix(&mut rng, n, n),
    );
    t.push_result(
        "lambda-bound",
        check_lambda_bound(&la, &lx, &lb, tol).map(|r| (r.holds, r.worst_excess.max(0.0))),
    );

    if cp.p() > 1.0 && cp.p() < 2.0 {
        let (pa, pb) = equality_family_psd(&t.cfg);
        t.push_result(
            "range-inclusion",
            check_range_inclusion(&pa, &pb, &cp, tol).map(|r| (r.holds, r.residual)),
        );
    }

    let mut rng = stream(t.cfg.seed(), LABEL_SCALAR);
    let (sa, sb, constructed) = scalar_sample(&mut rng, &cp, t.index % 2 == 0);
    t.push_result(
        "scalar-reduction",
        scalar_young(sa, sb, &cp, SCALAR_REL).map(|s| {
            let agree = s.equality_detected == s.powers_equal && (!constructed || s.powers_equal);
            (s.inequality_holds && agree, relative((s.gamma - s.delta).abs(), s.delta))
        }),
    );
}

/// Complex scalars with random phases; when `equal`, `|b| = |a|^{p/q}`.
pub fn scalar_sample<R: Rng + ?Sized>(rng: &mut R, cp: &ConjugatePair, equal: bool) -> (C64, C64, bool) {
    let modulus = |rng: &mut R| rng.sample::<f64, _>(StandardNormal).exp();
    let alpha = modulus(rng);
    let beta = if equal { alpha.powf(cp.p() / cp.q()) } else { modulus(rng) };
    let phase = |rng: &mut R| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    (phase(rng) * alpha, phase(rng) * beta, equal)
}

/// Whether lowering the last of `n` entries leaves the gauge unchanged.
fn insensitive_to_last(d: &NormDescriptor, n: usize) -> bool {
    match d.kind {
        NormKind::Operator => n > 1,
        NormKind::KyFan { k } => n > k,
        NormKind::Schatten { p } => p.is_infinite() && n > 1,
        NormKind::Dyadic => false,
    }
}

fn norm_trial(t: &mut Trial, norms: &[NormDescriptor], tol: &Tolerance) {
    let n = t.cfg.dimension();
    let mut rng = stream(t.cfg.seed(), LABEL_NORMS);
    let x = gaussian_matrix(&mut rng, n, n);
    let y = gaussian_matrix(&mut rng, n, n);
    let u = random_unitary(&mut rng, n);
    let v = random_unitary(&mut rng, n);
    let c = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let spectrum = svd(&x, tol).map(|s| s.values).unwrap_or_default();

    for d in norms {
        let name = d.to_string();
        let outcome = (|| -> Result<()> {
            let nx = evaluate_norm(d, &x)?;
            let ny = evaluate_norm(d, &y)?;
            let nsum = evaluate_norm(d, &(&x + &y))?;
            let excess = (nsum - nx - ny).max(0.0);
            t.push(&format!("triangle[{name}]"), excess <= 1e-12 * (nx + ny), relative(excess, nx + ny));

            let nc = evaluate_norm(d, &x.scale_complex(c))?;
            let hom = (nc - c.norm() * nx).abs();
            t.push(&format!("homogeneity[{name}]"), hom <= 1e-10 * c.norm() * nx, relative(hom, c.norm() * nx));

            let nu = evaluate_norm(d, &(&(&u * &x) * &v))?;
            let inv = (nu - nx).abs();
            t.push(&format!("unitary-invariance[{name}]"), inv <= 1e-9 * nx, relative(inv, nx));

            let mut lowered = spectrum.clone();
            if let Some(last) = lowered.last_mut() {
                *last *= 0.5;
            }
            let verdict = check_strictly_increasing_witness(d, &lowered, &spectrum, tol)?;
            let expected = insensitive_to_last(d, n) && spectrum.last().is_some_and(|&s| s > 0.0);
            let agree = verdict.is_violation() == expected && (!d.strictly_increasing || !expected);
            t.push(&format!("strict-increase[{name}]"), agree, 0.0);
            Ok(())
        })();
        if outcome.is_err() {
            t.push(&format!("norm-error[{name}]"), false, f64::INFINITY);
        }
    }
}

fn sufficiency_trial(t: &mut Trial, tol: &Tolerance) {
    let n = t.cfg.dimension();
    let cp = t.cfg.conjugate_pair();
    let compact = t
        .cfg
        .with_decay(SpectrumDecay::Geometric { ratio: 0.5 })
        .expect("valid decay");
    let (_, mut b) = random_pair(&compact);
    if t.index % 2 == 1 && n > 1 {
        // Rank-deficient b: project out a random direction.
        let mut rng = stream(t.cfg.seed(), LABEL_DEFICIENT);
        let w = random_unit_vector(&mut rng, n);
        b = &b * &(ComplexMatrix::identity(n) - ComplexMatrix::outer(&w, &w));
    }
    let z = match svd(&b, tol) {
        Ok(s) => s.partial_isometry().adjoint(),
        Err(_) => {
            t.push("sufficiency", false, f64::INFINITY);
            return;
        }
    };
    t.push_result(
        "sufficiency",
        check_sufficiency(&b, &z, &cp, tol).map(|s| {
            let rel = relative(s.residual, s.scale);
            (rel <= SUFFICIENCY_REL, rel)
        }),
    );
    t.push_result(
        "trace-argument",
        check_trace_argument(&b, &z, &cp, tol).map(|r| (r.holds, r.conditions.max_relative())),
    );
}

pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignRun> {
    cfg.validate()?;
    let tol = &cfg.tolerance;
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|index| {
            let mut t = Trial { index, cfg: cfg.trial_config(index), records: Vec::new() };
            match cfg.suite {
                Suite::EfzInequality => efz_trial(&mut t, tol),
                Suite::EqualityRoundtrip => roundtrip_trial(&mut t, &cfg.norms, tol),
                Suite::LemmaChecks => lemma_trial(&mut t, tol),
                Suite::NormAxioms => norm_trial(&mut t, &cfg.norms, tol),
                Suite::ConjectureSearch => sufficiency_trial(&mut t, tol),
            }
            t
        })
        .collect();
    let mut records: Vec<CheckRecord> = trials.into_iter().flat_map(|t| t.records).collect();

    let search = if cfg.suite == Suite::ConjectureSearch {
        let max_dim = *cfg.dims.iter().max().expect("nonempty dims");
        let search_cfg = GeneratorConfig::new(cfg.seed, max_dim)?
            .with_p(cfg.p_list[0])?
            .with_decay(cfg.decay)?;
        let result = search_necessity_counterexample(&search_cfg, cfg.trials, tol)?;
        records.push(CheckRecord {
            trial: result.best_trial,
            seed: cfg.seed,
            dimension: max_dim,
            p: result.p,
            check: "necessity-search".into(),
            passed: result.witness.is_none(),
            residual: result.best_objective,
        });
        Some(result)
    } else {
        None
    };

    Ok(CampaignRun { summary: summarize(cfg, &records, search), records })
}

fn summarize(cfg: &CampaignConfig, records: &[CheckRecord], search: Option<SearchResult>) -> CampaignSummary {
    let mut per_check: BTreeMap<&str, CheckSummary> = BTreeMap::new();
    let mut failing_seeds = Vec::new();
    for r in records {
        let entry = per_check.entry(&r.check).or_insert_with(|| CheckSummary {
            check: r.check.clone(),
            runs: 0,
            failures: 0,
            worst_residual: 0.0,
        });
        entry.runs += 1;
        entry.worst_residual = entry.worst_residual.max(r.residual);
        if !r.passed {
            entry.failures += 1;
            if !failing_seeds.contains(&r.seed) {
                failing_seeds.push(r.seed);
            }
        }
    }
    let failures: u64 = per_check.values().map(|c| c.failures).sum();
    CampaignSummary {
        suite: cfg.suite,
        trials: cfg.trials,
        seed: cfg.seed,
        checks: records.len() as u64,
        passes: records.len() as u64 - failures,
        failures,
        failing_seeds,
        per_check: per_check.into_values().collect(),
        search,
    }
}
