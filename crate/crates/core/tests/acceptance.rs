//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the lines always reach the output; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use young_core::conjecture::{check_sufficiency, search_necessity_counterexample};
use young_core::generators::{
    derive_seed, equality_family, gaussian_matrix, opnorm_counterexample, random_hermitian,
    random_pair, random_psd, random_unit_vector, stream, GeneratorConfig, SpectrumDecay,
};
use young_core::linalg::{hermitian_eigen, is_psd, svd, Tolerance, C64};
use young_core::norms::NormDescriptor;
use young_core::young::{
    build_partial_isometry, check_equivalence, check_lambda_bound, check_polar_identities,
    check_vector_hoelder, gamma_support_projection, scalar_young, young_spectra, ConjugatePair,
};

const SEED: u64 = 0x5EED_2024;
const P_LIST: [f64; 3] = [1.5, 2.0, 3.0];

struct Outcome {
    passed: bool,
    detail: String,
}

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Trial `t`: dimension in `2..=8`, `p` cycling through `P_LIST`.
fn suite_config(label: u64, t: u64) -> GeneratorConfig {
    let dim = 2 + (t % 7) as usize;
    let p = P_LIST[((t / 7) % 3) as usize];
    GeneratorConfig::new(derive_seed(SEED ^ label, t), dim)
        .unwrap()
        .with_p(p)
        .unwrap()
}

fn efz_and_isometry() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut violations = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut psd_failures = 0;
    let mut worst_support = 0.0f64;
    let mut errors = 0;
    for t in 0..500 {
        let cfg = suite_config(1, t);
        let (a, b) = random_pair(&cfg);
        let s = young_spectra(&a, &b, &cfg.conjugate_pair(), &tol()).unwrap();
        let d0 = s.delta[0];
        for (g, d) in s.gamma.iter().zip(&s.delta) {
            worst_gap = worst_gap.max((g - d) / d0);
            if *g > d + 1e-8 * d0 {
                violations += 1;
            }
        }
        match build_partial_isometry(&s, &tol()) {
            Ok(u) => {
                let slack = &s.mean - &s.abs_product.conjugate_by(&u).hermitian_part();
                if !is_psd(&slack, &tol()).unwrap().is_psd {
                    psd_failures += 1;
                }
                let support = (&(u.adjoint() * &u) - &gamma_support_projection(&s, &tol())).frobenius_norm();
                worst_support = worst_support.max(support);
            }
            Err(_) => errors += 1,
        }
    }
    let elapsed = start.elapsed();
    let efz = Outcome {
        passed: violations == 0 && elapsed < Duration::from_secs(30),
        detail: format!(
            "500 pairs, {violations} violations, max (γ_k - δ_k)/δ_0 = {worst_gap:.2e}, {:.2} s",
            elapsed.as_secs_f64()
        ),
    };
    let iso = Outcome {
        passed: psd_failures == 0 && errors == 0 && worst_support <= 1e-8,
        detail: format!(
            "500 instances, {psd_failures} non-PSD slacks, {errors} construction errors, max ||u*u - Σp_k||_F = {worst_support:.2e}"
        ),
    };
    (efz, iso)
}

fn equality_roundtrip() -> Outcome {
    let norms = [NormDescriptor::operator(), NormDescriptor::dyadic(), NormDescriptor::schatten(2.0).unwrap()];
    let mut not_all_true = 0;
    let mut worst_power = 0.0f64;
    let mut worst_gap = 0.0f64;
    for t in 0..200 {
        let cfg = suite_config(2, t);
        let (a, b) = equality_family(&cfg);
        let cp = cfg.conjugate_pair();
        let r = check_equivalence(&a, &b, &cp, &norms, &tol()).unwrap();
        if !r.all_true() {
            not_all_true += 1;
        }
        let s = young_spectra(&a, &b, &cp, &tol()).unwrap();
        worst_power = worst_power.max((&s.abs_a_p - &s.abs_b_q).frobenius_norm() / s.abs_b_q.frobenius_norm());
        worst_gap = worst_gap.max(s.max_gap().0 / s.delta[0]);
    }
    Outcome {
        passed: not_all_true == 0 && worst_power <= 1e-6 && worst_gap <= 1e-7,
        detail: format!(
            "200 instances, {not_all_true} not all-true, max power residual {worst_power:.2e}, max gap/δ_0 {worst_gap:.2e}"
        ),
    }
}

fn counterexample_regression() -> Outcome {
    let (a, b, cp) = opnorm_counterexample(2).unwrap();
    let norms = [NormDescriptor::operator(), NormDescriptor::dyadic()];
    let r = check_equivalence(&a, &b, &cp, &norms, &tol()).unwrap();
    // Oracle: |ab*| = diag(2, 0) and the mean is diag(2, 1/2).
    let (abs_product, mean) = ([2.0, 0.0], [2.0, 0.5]);
    let dyadic = |v: [f64; 2]| v[0] + 0.5 * v[1];
    let op = &r.cond3.norms[0];
    let dy = &r.cond3.norms[1];
    let op_ok = (op.lhs - abs_product[0]).abs() <= 1e-10 && (op.rhs - mean[0]).abs() <= 1e-10;
    let dy_diff = dy.rhs - dy.lhs;
    let dy_ok = (dy_diff - (dyadic(mean) - dyadic(abs_product))).abs() <= 1e-10;
    let gap_ok = (r.cond4.gap - 0.5).abs() <= 1e-10;
    Outcome {
        passed: op_ok && dy_ok && gap_ok && !r.cond4.verdict,
        detail: format!(
            "op {:.12} vs {:.12}, dyadic difference {dy_diff:.12}, cond4 gap {:.12}",
            op.lhs, op.rhs, r.cond4.gap
        ),
    }
}

fn lemma_suite() -> Outcome {
    let mut worst_polar = 0.0f64;
    for t in 0..500 {
        let (a, b) = random_pair(&suite_config(5, t));
        worst_polar = worst_polar.max(check_polar_identities(&a, &b, &tol()).unwrap().max_relative());
    }

    let mut disagreements = 0;
    let mut eigen_cases = 0;
    for t in 0..1000u64 {
        let n = 1 + (t % 6) as usize;
        let mut rng = stream(derive_seed(SEED, t), 51);
        let x = random_psd(&mut rng, n);
        let xi = if t % 3 == 0 {
            eigen_cases += 1;
            hermitian_eigen(&x, &tol()).unwrap().vector((t / 3) as usize % n)
        } else {
            random_unit_vector(&mut rng, n)
        };
        let r = 0.1 + 0.8 * ((t % 9) as f64 / 8.0);
        let v = check_vector_hoelder(&x, &xi, r, &tol()).unwrap();
        if !v.flags_agree() || !v.inequality_holds {
            disagreements += 1;
        }
    }

    let mut lambda_violations = 0;
    for t in 0..500u64 {
        let n = 2 + (t % 7) as usize;
        let mut rng = stream(derive_seed(SEED, t), 52);
        let (a, x, b) = (
            gaussian_matrix(&mut rng, n, n),
            gaussian_matrix(&mut rng, n, n),
            gaussian_matrix(&mut rng, n, n),
        );
        if !check_lambda_bound(&a, &x, &b, &tol()).unwrap().holds {
            lambda_violations += 1;
        }
    }
    Outcome {
        passed: worst_polar <= 1e-8 && disagreements == 0 && lambda_violations == 0,
        detail: format!(
            "polar max residual {worst_polar:.2e} (500), Hölder disagreements {disagreements}/1000 ({eigen_cases} eigenvector cases), λ-bound violations {lambda_violations}/500"
        ),
    }
}

fn scalar_reduction() -> Outcome {
    let mut mismatches = 0;
    let mut equality_cases = 0;
    for t in 0..1000u64 {
        let cp = ConjugatePair::new(P_LIST[(t % 3) as usize]).unwrap();
        let mut rng = stream(derive_seed(SEED, t), 61);
        let phase = |rng: &mut rand_chacha::ChaCha8Rng| {
            let v = random_unit_vector(rng, 1)[0];
            v / v.norm()
        };
        let alpha = (4.0 * rand::Rng::random::<f64>(&mut rng) - 2.0).exp();
        let constructed = t % 4 == 0;
        let beta = if constructed {
            equality_cases += 1;
            alpha.powf(cp.p() / cp.q())
        } else {
            (4.0 * rand::Rng::random::<f64>(&mut rng) - 2.0).exp()
        };
        let (a, b): (C64, C64) = (phase(&mut rng) * alpha, phase(&mut rng) * beta);
        let s = scalar_young(a, b, &cp, 1e-12).unwrap();
        // Oracle: the scalar inequality evaluated directly.
        let (ap, bq) = (alpha.powf(cp.p()), beta.powf(cp.q()));
        let gamma = alpha * beta;
        let delta = ap / cp.p() + bq / cp.q();
        let powers_equal = (ap - bq).abs() <= 1e-12 * ap.max(bq);
        let ok = s.inequality_holds
            && (s.gamma - gamma).abs() <= 1e-12 * gamma
            && (s.delta - delta).abs() <= 1e-12 * delta
            && s.equality_detected == s.powers_equal
            && s.powers_equal == powers_equal
            && (!constructed || s.equality_detected);
        if !ok {
            mismatches += 1;
        }
    }
    Outcome {
        passed: mismatches == 0,
        detail: format!("1000 samples ({equality_cases} constructed equality cases), {mismatches} mismatches"),
    }
}

fn conjecture_lab() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for t in 0..200u64 {
        let n = 2 + (t % 5) as usize;
        let cfg = GeneratorConfig::new(derive_seed(SEED ^ 7, t), n)
            .unwrap()
            .with_p(P_LIST[(t % 3) as usize])
            .unwrap()
            .with_decay(SpectrumDecay::Geometric { ratio: 0.5 })
            .unwrap();
        let (_, b) = random_pair(&cfg);
        let nu = svd(&b, &tol()).unwrap().partial_isometry();
        match check_sufficiency(&b, &nu.adjoint(), &cfg.conjugate_pair(), &tol()) {
            Ok(s) => {
                let rel = s.residual / s.scale;
                worst = worst.max(rel);
                if rel > 1e-8 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    let cfg = GeneratorConfig::new(SEED, 6).unwrap().with_p(1.5).unwrap();
    let search = search_necessity_counterexample(&cfg, 10_000, &tol()).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        passed: failures == 0 && search.witness.is_none() && elapsed < Duration::from_secs(300),
        detail: format!(
            "sufficiency max residual/||b||^q {worst:.2e} ({failures} failures of 200); search {} trials n <= 6, witness {}, best score {:.3e}, {} equality cases; {:.1} s",
            search.trials,
            if search.witness.is_some() { "FOUND" } else { "none" },
            search.best_objective,
            search.equality_cases,
            elapsed.as_secs_f64()
        ),
    }
}

fn solver_floor() -> Outcome {
    let mut worst = 0.0f64;
    for t in 0..1000u64 {
        let n = 1 + (t % 16) as usize;
        let m = random_hermitian(&mut stream(derive_seed(SEED, t), 81), n);
        let e = hermitian_eigen(&m, &tol()).unwrap();
        worst = worst.max((&e.reconstruct() - &m).frobenius_norm() / m.frobenius_norm());
    }
    Outcome {
        passed: worst <= 1e-8,
        detail: format!("1000 matrices, n <= 16, max reconstruction error/||m||_F {worst:.2e}"),
    }
}

fn main() -> ExitCode {
    let (efz, iso) = efz_and_isometry();
    let results = [
        ("efz inequality", efz),
        ("equality round-trip", equality_roundtrip()),
        ("counterexample regression", counterexample_regression()),
        ("partial isometry", iso),
        ("lemma suite", lemma_suite()),
        ("scalar reduction", scalar_reduction()),
        ("conjecture lab", conjecture_lab()),
        ("solver floor", solver_floor()),
    ];
    let mut failed = 0;
    for (k, (name, outcome)) in results.iter().enumerate() {
        let mark = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {} [{mark}] {name}: {}", k + 1, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
