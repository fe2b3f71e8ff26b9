//! Implementations of the CLI subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use num::rational::BigRational;
use serde_json::{json, Value};

use addcomb::extract::{unstructured_pipeline, UnstructuredReport};
use addcomb::generators::GeneratorSpec;
use addcomb::gf2::{setfile, F2Set, F2Vector, SpanBasis};
use addcomb::rat;
use addcomb::report::{CheckResult, RationalRepr};
use addcomb::stats::{
    self, expectation_y2, expectation_z, lemma8_bijection_check, pr_z_positive,
    symmetry_profile, symmetry_profile_auto, ProfileMethod, SymmetryProfile, Y2Method,
};
use addcomb::structured::{
    chain_deltas, containment_checks, delta_hat, eps_gate_check, scan_a_star, structured_b,
    structured_pipeline, StructuredReport,
};

use crate::run::{check_summary, StageClock};

/// Process exit classification (documented contract).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    /// all requested checks passed
    Ok = 0,
    /// internal error: bad input, parse failure, size cap exceeded
    Error = 1,
    /// a hypothesis gate failed (pipeline refused, or ran under --force)
    GateFailure = 2,
    /// a verification check failed
    CheckFailure = 3,
}

pub struct CommandOutcome {
    pub payload: Value,
    pub input_digest: Option<String>,
    pub exit: ExitKind,
    /// where to write the run report
    pub out: Option<PathBuf>,
}

// ------------------------------------------------------------------ analyze

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// canonical set file to analyze
    #[arg(long)]
    pub input: PathBuf,
    /// write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_analyze(args: &AnalyzeArgs, clock: &mut StageClock) -> Result<CommandOutcome> {
    clock.stage("load");
    let a = setfile::read_file(&args.input)?;
    if a.is_empty() {
        bail!("input set is empty");
    }
    clock.stage("profile");
    let profile = symmetry_profile_auto(&a)?;
    clock.stage("span");
    let basis = SpanBasis::from_set(&a)?;
    clock.stage("checks");
    let checks = vec![
        stats::mass_identity_check(&profile),
        stats::mean_identity_check(&profile),
    ];
    let histogram: Vec<Value> = profile
        .histogram()
        .into_iter()
        .map(|(fiber, count)| json!({ "fiber": fiber, "count": count }))
        .collect();
    let payload = json!({
        "set": {
            "dim": a.dim(),
            "size": a.len(),
            "sumset_size": profile.sumset_size(),
            "doubling": RationalRepr::from(&profile.doubling()),
        },
        "span": { "rank": basis.rank(), "size": basis.span_size().to_string() },
        "profile": {
            "total_mass": profile.total_mass().to_string(),
            "mean_fiber": RationalRepr::from(&profile.mean_fiber()),
            "histogram": histogram,
        },
        "checks": checks,
        "summary": check_summary(&checks_vec(&payload_placeholder(), &checks)),
    });
    let exit = if checks.iter().all(|c| c.passed()) { ExitKind::Ok } else { ExitKind::CheckFailure };
    Ok(CommandOutcome {
        payload,
        input_digest: Some(crate::run::file_digest(&args.input)?),
        exit,
        out: args.out.clone(),
    })
}

// small helpers so `checks` can be embedded and summarized without cloning noise
fn payload_placeholder() -> Value {
    Value::Null
}
fn checks_vec<'a>(_: &Value, checks: &'a [CheckResult]) -> &'a [CheckResult] {
    checks
}

// ------------------------------------------------------------------- verify

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CheckId {
    /// mass and mean identities of the symmetry profile
    Mass,
    /// Markov step and the E[Z] lower bound |A|/16K^2
    Lemma6,
    /// conditional E[Y^2] upper bound 6 L^4 |A|^2 / K^4 (+ conversion)
    Lemma7,
    /// the pair-count bijection, all (a1, a2) pairs
    Lemma8,
    /// Pr[Z>0] >= E[Z]^2 / E[Y^2]
    Eq6,
    /// span(A) <= 2^ceil(2K) |A|
    Fr,
    /// B+B and level-set sumset containments (needs --eps)
    Containments,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// comma-separated subset of checks to run
    #[arg(long, value_delimiter = ',', default_values = ["mass", "lemma6", "lemma7", "lemma8", "eq6", "fr"])]
    pub checks: Vec<CheckId>,
    /// fiber-threshold multiplier L (used by lemma7 and the gates)
    #[arg(long, default_value = "2")]
    pub l: String,
    /// exponent for the level-set parameter (required by `containments`)
    #[arg(long)]
    pub eps: Option<String>,
    /// base point for `containments` as a binary string; scanned when absent
    #[arg(long)]
    pub astar: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const VERIFY_LEMMA6_MAX: usize = 8192;
const VERIFY_LEMMA7_MAX: usize = 512;
const VERIFY_LEMMA8_MAX: usize = 64;

fn require_cap(check: &str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        bail!("check `{check}`: size cap exceeded (|A| = {size} > {cap})");
    }
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs, clock: &mut StageClock) -> Result<CommandOutcome> {
    clock.stage("load");
    let a = setfile::read_file(&args.input)?;
    if a.is_empty() {
        bail!("input set is empty");
    }
    let l = rat::parse_rational(&args.l).map_err(|e| anyhow!("{e}"))?;
    clock.stage("profile");
    let profile = symmetry_profile_auto(&a)?;

    let mut checks: Vec<CheckResult> = Vec::new();
    let mut values = serde_json::Map::new();

    for check in dedup(&args.checks) {
        match check {
            CheckId::Mass => {
                clock.stage("mass");
                checks.push(stats::mass_identity_check(&profile));
                checks.push(stats::mean_identity_check(&profile));
            }
            CheckId::Lemma6 => {
                clock.stage("lemma6");
                require_cap("lemma6", a.len(), VERIFY_LEMMA6_MAX)?;
                checks.push(stats::markov_half_check(&profile));
                let e_z = expectation_z(&a, &profile).map_err(|e| anyhow!("{e}"))?;
                values.insert("e_z".into(), json!(RationalRepr::from(&e_z)));
                checks.push(stats::lemma6_check(&profile, &e_z));
            }
            CheckId::Lemma7 => {
                clock.stage("lemma7");
                require_cap("lemma7", a.len(), VERIFY_LEMMA7_MAX)?;
                checks.push(stats::fiber_conversion_check(&profile, &l));
                let e_y2 =
                    expectation_y2(&a, &profile, Y2Method::Lemma4).map_err(|e| anyhow!("{e}"))?;
                values.insert("e_y2".into(), json!(RationalRepr::from(&e_y2)));
                checks.push(stats::lemma7_check(&profile, &l, &e_y2));
            }
            CheckId::Lemma8 => {
                clock.stage("lemma8");
                require_cap("lemma8", a.len(), VERIFY_LEMMA8_MAX)?;
                let mut all_ok = true;
                let mut pairs = 0u64;
                for v1 in a.iter_vectors() {
                    for v2 in a.iter_vectors() {
                        let outcome =
                            lemma8_bijection_check(&a, &v1, &v2).map_err(|e| anyhow!("{e}"))?;
                        all_ok &= outcome.passed;
                        pairs += 1;
                    }
                }
                checks.push(CheckResult::from_bool(
                    "lemma8-pair-bijection-all-pairs",
                    all_ok,
                    json!({ "pairs_checked": pairs }),
                ));
            }
            CheckId::Eq6 => {
                clock.stage("eq6");
                require_cap("eq6", a.len(), VERIFY_LEMMA7_MAX)?;
                let report = pr_z_positive(&a, &profile, Some(&l)).map_err(|e| anyhow!("{e}"))?;
                values.insert("moments".into(), json!(report));
                checks.push(report.to_check());
            }
            CheckId::Fr => {
                clock.stage("fr");
                checks.push(stats::freiman_ruzsa_check(&a, &profile).map_err(|e| anyhow!("{e}"))?);
            }
            CheckId::Containments => {
                clock.stage("containments");
                let eps_text = args
                    .eps
                    .as_ref()
                    .ok_or_else(|| anyhow!("check `containments` requires --eps"))?;
                let eps = rat::parse_rational(eps_text).map_err(|e| anyhow!("{e}"))?;
                checks.extend(run_containments(&a, &profile, &eps, args.astar.as_deref())?);
            }
        }
    }
    clock.stage("report");

    let exit = if checks.iter().all(|c| c.passed()) { ExitKind::Ok } else { ExitKind::CheckFailure };
    let payload = json!({
        "set": {
            "dim": a.dim(),
            "size": a.len(),
            "sumset_size": profile.sumset_size(),
            "doubling": RationalRepr::from(&profile.doubling()),
        },
        "l": RationalRepr::from(&l),
        "values": Value::Object(values),
        "checks": checks,
        "summary": check_summary(&checks),
    });
    Ok(CommandOutcome {
        payload,
        input_digest: Some(crate::run::file_digest(&args.input)?),
        exit,
        out: args.out.clone(),
    })
}

fn dedup(checks: &[CheckId]) -> Vec<CheckId> {
    let mut out = Vec::new();
    for &c in checks {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn run_containments(
    a: &F2Set,
    profile: &SymmetryProfile,
    eps: &BigRational,
    astar: Option<&str>,
) -> Result<Vec<CheckResult>> {
    if profile.sumset_size() == profile.base_size() {
        return Ok(vec![CheckResult::from_bool(
            "containments-degenerate",
            true,
            json!({ "note": "K = 1: every level set is 2A and B = A; containments are immediate" }),
        )]);
    }
    let mut checks = vec![eps_gate_check(profile, eps).map_err(|e| anyhow!("{e}"))?];
    let dh = delta_hat(profile, eps).map_err(|e| anyhow!("{e}"))?;
    let star = match astar {
        Some(text) => {
            let v = F2Vector::parse(text).map_err(|e| anyhow!("{e}"))?;
            if v.dim() != a.dim() {
                bail!("--astar has dimension {} but the set has {}", v.dim(), a.dim());
            }
            v
        }
        None => scan_a_star(a, profile, &dh).ok_or_else(|| anyhow!("empty set"))?,
    };
    let b = structured_b(a, profile, &star, &dh).map_err(|e| anyhow!("{e}"))?;
    let deltas = chain_deltas(profile, eps).map_err(|e| anyhow!("{e}"))?;
    checks.extend(containment_checks(profile, &b, &dh, &deltas).map_err(|e| anyhow!("{e}"))?);
    Ok(checks)
}

// ------------------------------------------------------------------ extract

#[derive(Subcommand, Debug)]
pub enum ExtractMode {
    /// typical set, dense-pair subset, component extraction, span certificate
    Unstructured {
        #[arg(long)]
        input: PathBuf,
        /// fiber-threshold multiplier L
        #[arg(long)]
        l: String,
        /// keep going when a hypothesis gate fails (recorded in the report)
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// near-full-fiber set through a base point, chain selection, certificate
    Structured {
        #[arg(long)]
        input: PathBuf,
        /// base point a* as a binary string
        #[arg(long, conflicts_with = "scan_astar")]
        astar: Option<String>,
        /// find a* by the averaging scan instead
        #[arg(long)]
        scan_astar: bool,
        /// exponent of the level parameter K^-eps
        #[arg(long)]
        eps: String,
        /// size-hypothesis exponent L
        #[arg(long)]
        l: String,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn cmd_extract(mode: &ExtractMode, clock: &mut StageClock) -> Result<CommandOutcome> {
    match mode {
        ExtractMode::Unstructured { input, l, force, out } => {
            clock.stage("load");
            let a = setfile::read_file(input)?;
            let l = rat::parse_rational(l).map_err(|e| anyhow!("{e}"))?;
            clock.stage("pipeline");
            let outcome = unstructured_pipeline(&a, &l, *force).map_err(|e| anyhow!("{e}"))?;
            clock.stage("report");
            let exit = unstructured_exit(&outcome.report);
            Ok(CommandOutcome {
                payload: json!({ "mode": "unstructured", "report": outcome.report }),
                input_digest: Some(crate::run::file_digest(input)?),
                exit,
                out: out.clone(),
            })
        }
        ExtractMode::Structured { input, astar, scan_astar, eps, l, force, out } => {
            clock.stage("load");
            let a = setfile::read_file(input)?;
            let eps = rat::parse_rational(eps).map_err(|e| anyhow!("{e}"))?;
            let l = rat::parse_rational(l).map_err(|e| anyhow!("{e}"))?;
            let star = match (astar, scan_astar) {
                (Some(text), false) => Some(F2Vector::parse(text).map_err(|e| anyhow!("{e}"))?),
                (None, true) => None,
                (None, false) => bail!("pass --astar <bits> or --scan-astar"),
                (Some(_), true) => unreachable!("clap conflicts_with"),
            };
            clock.stage("pipeline");
            let outcome =
                structured_pipeline(&a, star, &eps, &l, *force).map_err(|e| anyhow!("{e}"))?;
            clock.stage("report");
            let exit = structured_exit(&outcome.report);
            Ok(CommandOutcome {
                payload: json!({ "mode": "structured", "report": outcome.report }),
                input_digest: Some(crate::run::file_digest(input)?),
                exit,
                out: out.clone(),
            })
        }
    }
}

fn unstructured_exit(report: &UnstructuredReport) -> ExitKind {
    if report.stopped_at.is_some() || !report.gate_failures.is_empty() {
        ExitKind::GateFailure
    } else if !report.all_checks_pass() {
        ExitKind::CheckFailure
    } else {
        ExitKind::Ok
    }
}

fn structured_exit(report: &StructuredReport) -> ExitKind {
    if report.stopped_at.is_some() || !report.gate_failures.is_empty() {
        ExitKind::GateFailure
    } else if !report.all_checks_pass() {
        ExitKind::CheckFailure
    } else {
        ExitKind::Ok
    }
}

// ----------------------------------------------------------------- generate

#[derive(Subcommand, Debug)]
pub enum GenerateFamily {
    /// {e_1, ..., e_t}: one 1 in the first t coordinates
    WeightOnePrefix {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        t: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// the span of the first d unit vectors
    Subspace {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// seeded uniform sample of ceil(density 2^d) elements of that subspace
    DenseSubspace {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// exact rational in (0, 1], e.g. 3/4
        #[arg(long)]
        density: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// the subspace plus k seeded points outside it
    SubspacePlusPoints {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// m distinct seeded-uniform elements
    Random {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

pub fn cmd_generate(family: &GenerateFamily, clock: &mut StageClock) -> Result<CommandOutcome> {
    clock.stage("generate");
    let (spec, out) = match family {
        GenerateFamily::WeightOnePrefix { n, t, out } => {
            (GeneratorSpec::WeightOnePrefix { n: *n, t: *t }, out)
        }
        GenerateFamily::Subspace { n, d, out } => (GeneratorSpec::Subspace { n: *n, d: *d }, out),
        GenerateFamily::DenseSubspace { n, d, density, seed, out } => (
            GeneratorSpec::DenseSubspaceSample {
                n: *n,
                d: *d,
                density: rat::parse_rational(density).map_err(|e| anyhow!("{e}"))?,
                seed: *seed,
            },
            out,
        ),
        GenerateFamily::SubspacePlusPoints { n, d, k, seed, out } => {
            (GeneratorSpec::SubspacePlusPoints { n: *n, d: *d, k: *k, seed: *seed }, out)
        }
        GenerateFamily::Random { n, m, seed, out } => {
            (GeneratorSpec::Random { n: *n, m: *m, seed: *seed }, out)
        }
    };
    let set = spec.build().map_err(|e| anyhow!("{e}"))?;
    clock.stage("write");
    setfile::write_file(out, &set).map_err(|e| anyhow!("{e}"))?;
    let payload = json!({
        "spec": spec,
        "size": set.len(),
        "dim": set.dim(),
        "out": out.display().to_string(),
        "output_digest": crate::run::file_digest(out)?,
    });
    Ok(CommandOutcome { payload, input_digest: None, exit: ExitKind::Ok, out: None })
}

// -------------------------------------------------------------------- bench

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// smallest dimension (inclusive)
    #[arg(long)]
    pub n_min: u32,
    /// largest dimension (inclusive)
    #[arg(long)]
    pub n_max: u32,
    /// seed for the benchmark instances (required: no hidden randomness)
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Full naive/WHT cross-check up to this dimension; sampled above it.
const BENCH_FULL_COMPARE_MAX: u32 = 14;
const BENCH_SET_MAX: u64 = 2048;

pub fn cmd_bench(args: &BenchArgs, clock: &mut StageClock) -> Result<CommandOutcome> {
    let mut entries: Vec<Value> = Vec::new();
    let mut all_equal = true;
    for n in args.n_min..=args.n_max {
        if n > stats::WHT_DIM_MAX {
            bail!("bench requires n <= {} for the transform kernel", stats::WHT_DIM_MAX);
        }
        clock.stage(&format!("n{n}"));
        let size = BENCH_SET_MAX.min(1u64 << (n - 1).max(1));
        let a = addcomb::generators::random_set(n, size, args.seed.wrapping_add(n as u64))
            .map_err(|e| anyhow!("{e}"))?;

        let start = Instant::now();
        let wht = symmetry_profile(&a, ProfileMethod::Wht).map_err(|e| anyhow!("{e}"))?;
        let wht_ms = start.elapsed().as_secs_f64() * 1e3;

        let (naive_ms, equal, compared) = if n <= BENCH_FULL_COMPARE_MAX {
            let start = Instant::now();
            let naive = symmetry_profile(&a, ProfileMethod::Naive).map_err(|e| anyhow!("{e}"))?;
            let naive_ms = start.elapsed().as_secs_f64() * 1e3;
            (Some(naive_ms), naive == wht, wht.sumset_size())
        } else {
            // sampled oracle: direct membership counts on a fiber sample
            let fibers = wht.fibers();
            let step = (fibers.len() / 100).max(1);
            let mut ok = true;
            let mut compared = 0u64;
            for &(s, count) in fibers.iter().step_by(step) {
                let direct =
                    a.bits().iter().filter(|&&x| a.contains_bits(x ^ s)).count() as u64;
                ok &= direct == count;
                compared += 1;
            }
            (None, ok, compared)
        };
        all_equal &= equal;
        entries.push(json!({
            "n": n,
            "set_size": a.len(),
            "sumset_size": wht.sumset_size(),
            "wht_ms": wht_ms,
            "naive_ms": naive_ms,
            "methods_equal": equal,
            "fibers_compared": compared,
        }));
    }
    clock.stage("report");
    let payload = json!({ "entries": entries, "all_methods_equal": all_equal });
    let exit = if all_equal { ExitKind::Ok } else { ExitKind::CheckFailure };
    Ok(CommandOutcome { payload, input_digest: None, exit, out: args.out.clone() })
}

// Writes a set file for tests and docs.
pub fn write_setfile(path: &Path, set: &F2Set) -> Result<()> {
    setfile::write_file(path, set).map_err(|e| anyhow!("{e}"))?;
    Ok(())
}
