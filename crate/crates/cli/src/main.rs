//! `young`: verify pairs, run campaigns, generate instances and search for
//! counterexamples.
//!
//! Exit codes: 0 when the run is consistent (no failures, no witness), 2 when
//! it is not, 1 on input errors.

mod manifest;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use young_core::campaign::{run_campaign, CampaignConfig, Suite};
use young_core::conjecture::{search_with_options, SearchOptions, SearchSpace};
use young_core::generators::{
    equality_family, opnorm_counterexample, random_pair, GeneratorConfig, SpectrumDecay,
};
use young_core::norms::parse_norm_list;
use young_core::young::{check_equivalence, ConjugatePair};
use young_core::{ComplexMatrix, Tolerance};

use manifest::{Report, RunManifest};

#[derive(Parser)]
#[command(name = "young", version, about = "Singular-value Young inequality workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct TolArgs {
    /// Relative tolerance for rank decisions and solver checks.
    #[arg(long, default_value_t = Tolerance::DEFAULT_RELATIVE)]
    tol_rel: f64,
    /// Absolute tolerance floor.
    #[arg(long, default_value_t = Tolerance::DEFAULT_ABSOLUTE)]
    tol_abs: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Result<Tolerance> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(self.tol_rel) || !ok(self.tol_abs) {
            bail!("tolerances must be finite and nonnegative");
        }
        Ok(Tolerance::new(self.tol_rel, self.tol_abs))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the four-way equality characterization for a pair of matrix files.
    Verify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        p: f64,
        /// Comma-separated norms: op, schatten:<p>, kyfan:<k>, dyadic.
        #[arg(long, default_value = "op,dyadic")]
        norms: String,
        /// Recorded in the report; verification itself is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded property campaign.
    Campaign {
        /// efz-inequality, equality-roundtrip, lemma-checks, norm-axioms or
        /// conjecture-search.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive range `lo..hi` or comma list.
        #[arg(long, default_value = "2..8")]
        dims: String,
        #[arg(long = "p-list", default_value = "1.5,2,3")]
        p_list: String,
        /// none, geometric:<ratio> or powerlaw:<exponent>.
        #[arg(long, default_value = "none")]
        decay: String,
        #[arg(long, default_value = "op,schatten:1,schatten:2,schatten:3.5,kyfan:2,dyadic")]
        norms: String,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-check records as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write a.json, b.json and manifest.json for an instance family.
    Generate {
        /// random, equality or opnorm-counterexample.
        family: String,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "none")]
        decay: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for an equality case violating the three conditions.
    Search {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest trial dimension; trials cycle through 2..=dim.
        #[arg(long, default_value_t = 6)]
        dim: usize,
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[arg(long, default_value = "none")]
        decay: String,
        /// general or diagonal-unitary.
        #[arg(long, default_value = "general")]
        space: String,
        #[command(flatten)]
        tol: TolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Status {
    Consistent,
    Inconsistent,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Status::Consistent) => ExitCode::SUCCESS,
        Ok(Status::Inconsistent) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Status> {
    match command {
        Command::Verify { a, b, p, norms, seed, tol, out } => {
            let tolerance = tol.tolerance()?;
            let cp = ConjugatePair::new(p)?;
            let norm_list = parse_norm_list(&norms)?;
            let ma = read_matrix(&a)?;
            let mb = read_matrix(&b)?;
            let report = check_equivalence(&ma, &mb, &cp, &norm_list, &tolerance)?.with_seed(seed);
            let manifest = RunManifest::new("verify", seed)
                .param("a", a.display())
                .param("b", b.display())
                .param("p", p)
                .param("norms", &norms)
                .param("tolRel", format!("{:e}", tolerance.relative))
                .param("tolAbs", format!("{:e}", tolerance.absolute));
            emit(&manifest, &report, out.as_deref())?;
            Ok(status(report.overall_consistent))
        }
        Command::Campaign { suite, trials, seed, dims, p_list, decay, norms, tol, out, csv } => {
            let cfg = CampaignConfig {
                suite: suite.parse::<Suite>()?,
                trials,
                seed,
                dims: parse_dims(&dims)?,
                p_list: parse_list(&p_list).context("invalid --p-list")?,
                decay: decay.parse::<SpectrumDecay>()?,
                norms: parse_norm_list(&norms)?,
                tolerance: tol.tolerance()?,
            };
            let run = run_campaign(&cfg)?;
            let manifest = RunManifest::new("campaign", seed)
                .param("suite", &suite)
                .param("trials", trials)
                .param("dims", &dims)
                .param("pList", &p_list)
                .param("decay", &decay)
                .param("norms", &norms)
                .param("tolRel", format!("{:e}", cfg.tolerance.relative))
                .param("tolAbs", format!("{:e}", cfg.tolerance.absolute));
            if let Some(path) = csv {
                let mut writer = csv::Writer::from_path(&path)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                for record in &run.records {
                    writer.serialize(record)?;
                }
                writer.flush()?;
            }
            emit(&manifest, &run.summary, out.as_deref())?;
            Ok(status(run.summary.failures == 0))
        }
        Command::Generate { family, dim, p, seed, decay, out } => {
            let cfg = GeneratorConfig::new(seed, dim)?
                .with_p(p)?
                .with_decay(decay.parse::<SpectrumDecay>()?)?;
            let (a, b, p) = match family.as_str() {
                "random" => {
                    let (a, b) = random_pair(&cfg);
                    (a, b, p)
                }
                "equality" => {
                    let (a, b) = equality_family(&cfg);
                    (a, b, p)
                }
                "opnorm-counterexample" => {
                    let (a, b, cp) = opnorm_counterexample(dim)?;
                    (a, b, cp.p())
                }
                other => bail!("unknown family {other:?} (expected random, equality or opnorm-counterexample)"),
            };
            fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
            write_json(&out.join("a.json"), &a)?;
            write_json(&out.join("b.json"), &b)?;
            let manifest = RunManifest::new("generate", seed)
                .param("family", &family)
                .param("dim", dim)
                .param("p", p)
                .param("decay", &decay);
            write_json(&out.join("manifest.json"), &manifest)?;
            Ok(Status::Consistent)
        }
        Command::Search { trials, seed, dim, p, decay, space, tol, out } => {
            let cfg = GeneratorConfig::new(seed, dim)?
                .with_p(p)?
                .with_decay(decay.parse::<SpectrumDecay>()?)?;
            let space = match space.as_str() {
                "general" => SearchSpace::General,
                "diagonal-unitary" => SearchSpace::DiagonalUnitary,
                other => bail!("unknown search space {other:?} (expected general or diagonal-unitary)"),
            };
            let opts = SearchOptions { space, ..SearchOptions::default() };
            let tolerance = tol.tolerance()?;
            let result = search_with_options(&cfg, trials, &opts, &tolerance)?;
            let manifest = RunManifest::new("search", seed)
                .param("trials", trials)
                .param("dim", dim)
                .param("p", p)
                .param("decay", &decay)
                .param("space", format!("{space:?}"))
                .param("tolRel", format!("{:e}", tolerance.relative))
                .param("tolAbs", format!("{:e}", tolerance.absolute));
            emit(&manifest, &result, out.as_deref())?;
            Ok(status(result.witness.is_none()))
        }
    }
}

fn status(consistent: bool) -> Status {
    if consistent {
        Status::Consistent
    } else {
        Status::Inconsistent
    }
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parse error in {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn emit<T: Serialize>(manifest: &RunManifest, report: &T, out: Option<&Path>) -> Result<()> {
    let wrapped = Report { manifest, report };
    match out {
        Some(path) => write_json(path, &wrapped),
        None => {
            let mut stdout = io::stdout().lock();
            serde_json::to_writer_pretty(&mut stdout, &wrapped)?;
            writeln!(stdout)?;
            Ok(())
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("not a number: {x:?}")))
        .collect()
}

/// `lo..hi` (inclusive) or a comma list.
fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .with_context(|| format!("invalid dimension {x:?} in --dims"))
    };
    if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if lo > hi {
            bail!("empty dimension range {s:?}");
        }
        Ok((lo..=hi).collect())
    } else {
        s.split(',').map(parse).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_forms() {
        assert_eq!(parse_dims("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_dims("3, 7").unwrap(), vec![3, 7]);
        assert!(parse_dims("5..2").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn p_list() {
        assert_eq!(parse_list("1.5,2").unwrap(), vec![1.5, 2.0]);
        assert!(parse_list("1.5,,2").is_err());
    }
}
