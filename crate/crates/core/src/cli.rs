//! Command-line front end. `run` returns the report text and whether every
//! requested check passed; the binary maps that to an exit code.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::eop::{self, EopResult, OptimizerConfig, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::experiments::{self, ScanConfig};
use crate::io::{self, LoadedState};
use crate::qdense::{
    canonical_purification, conditional_mutual_information, log_negativity, markov_gap,
    mutual_information, reflected_entropy, DensityOperator, Entropies, PureState, Region,
};
use crate::recovery::{self, default_quadrature, QuadratureWeight};
use crate::stab::{self, CanonicalCounts, StabilizerTableau};
use crate::structure::{self, DEFAULT_THRESHOLD};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "EOPGAP_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "eopgap", version, about = "Entanglement-of-purification gaps, recovery bounds and stabilizer scans")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report path. Defaults to `$EOPGAP_OUT_DIR/<command>.<ext>` when that
    /// variable is set, otherwise stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies, mutual informations, CMIs, reflected entropy, Markov gap
    /// and negativity; canonical counts for tableaux.
    Analyze(AnalyzeArgs),
    /// Entanglement of purification and its gap.
    Eop(EopArgs),
    /// Local (rotated) Petz recovery and the fidelity bound.
    Recover(RecoverArgs),
    /// 2-producibility certificate.
    Certify(CertifyArgs),
    /// Random-stabilizer Monte Carlo scan.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub input: PathBuf,
    /// Extra regions, e.g. `A,B;C`.
    #[arg(long)]
    pub regions: Option<String>,
    /// Qubit groups for tableaux, e.g. `A=0,1;B=2;C=3`.
    #[arg(long)]
    pub groups: Option<String>,
}

#[derive(Debug, Args, Clone)]
pub struct OptArgs {
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    /// Largest embedded ancilla dimension.
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EopArgs {
    pub input: PathBuf,
    /// Parties of α, e.g. `A;B;C` or `A,B;C`.
    #[arg(long)]
    pub alpha: Option<String>,
    #[command(flatten)]
    pub opt: OptArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    Petz,
    Rotated,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Reuse a stored `eop` report instead of optimizing.
    #[arg(long)]
    pub from_eop: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MapKind::Petz)]
    pub map: MapKind,
    /// Also bound the measured relative entropy (rotated map only).
    #[arg(long)]
    pub measured: bool,
    #[command(flatten)]
    pub opt: OptArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    pub input: PathBuf,
    /// Chain elements separated by `/`, e.g. `A;B/A;B;C`.
    #[arg(long)]
    pub chain: Option<String>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long)]
    pub groups: Option<String>,
    #[command(flatten)]
    pub opt: OptArgs,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 30])]
    pub n_list: Vec<usize>,
    #[arg(long, default_value = "1:3:3:3")]
    pub ratios: String,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Also estimate how often 4-party stabilizer states admit a GSD.
    #[arg(long)]
    pub gsd_probe: bool,
    #[arg(long, default_value_t = 200)]
    pub probe_samples: usize,
}

/// Report text plus the verdict of all checks it contains.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub checks_passed: bool,
    pub extension: &'static str,
}

fn json<T: Serialize>(value: &T, checks_passed: bool) -> Result<Outcome> {
    Ok(Outcome {
        text: serde_json::to_string_pretty(value)? + "\n",
        checks_passed,
        extension: "json",
    })
}

fn parse_regions(s: &str) -> Vec<Region> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(Region::parse).collect()
}

fn parse_groups(s: &str) -> Result<Vec<(String, Vec<usize>)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let (label, qs) = part
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("group {part:?} needs the form LABEL=q,q")))?;
            let qubits = qs
                .split(',')
                .map(|q| q.trim().parse::<usize>().map_err(|e| Error::Config(format!("qubit {q:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok((label.trim().to_string(), qubits))
        })
        .collect()
}

fn single_qubit_groups(n: usize) -> Vec<(String, Vec<usize>)> {
    (0..n).map(|q| (format!("q{q}"), vec![q])).collect()
}

fn opt_config(opt: &OptArgs, seed: u64) -> Result<OptimizerConfig> {
    let cfg = OptimizerConfig {
        restarts: opt.restarts,
        max_iters: opt.max_iters,
        ancilla_cap: opt.cap,
        seed,
        ..Default::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn tableau_state(tab: &StabilizerTableau, groups: &Option<String>) -> Result<PureState> {
    let dense = stab::to_dense(tab)?;
    match groups {
        None => Ok(dense),
        Some(g) => {
            let groups = parse_groups(g)?;
            let regrouped: Vec<(String, Region)> = groups
                .into_iter()
                .map(|(l, qs)| (l, Region::new(qs.iter().map(|q| format!("q{q}")))))
                .collect();
            dense.regroup(&regrouped)
        }
    }
}

#[derive(Serialize)]
struct RegionValue {
    region: Region,
    value: f64,
}

#[derive(Serialize)]
struct PairValues {
    a: Region,
    b: Region,
    mutual_information: f64,
    reflected_entropy: f64,
    markov_gap: f64,
    log_negativity: f64,
}

#[derive(Serialize)]
struct CmiValue {
    a: Region,
    c: Region,
    given: Region,
    value: f64,
}

#[derive(Serialize)]
struct GroupCounts {
    a: String,
    b: String,
    c: String,
    counts: CanonicalCounts,
}

#[derive(Serialize)]
struct AnalyzeReport {
    schema_version: u32,
    kind: &'static str,
    parties: Vec<String>,
    entropies: Vec<RegionValue>,
    pairs: Vec<PairValues>,
    cmi: Vec<CmiValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stabilizer: Option<StabilizerSummary>,
}

#[derive(Serialize)]
struct StabilizerSummary {
    n_qubits: usize,
    entropy_bits: Vec<(String, usize)>,
    tripartitions: Vec<GroupCounts>,
}

fn dense_analysis<S: Entropies>(
    state: &S,
    labels: &[String],
    extra: &[Region],
    pair_marginal: impl Fn(&Region) -> Result<DensityOperator>,
) -> Result<(Vec<RegionValue>, Vec<PairValues>, Vec<CmiValue>)> {
    let singles: Vec<Region> = labels.iter().map(|l| Region::new([l.clone()])).collect();
    let mut entropies = Vec::new();
    for r in singles.iter().chain(extra) {
        entropies.push(RegionValue {
            region: r.clone(),
            value: state.region_entropy(r)?,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..singles.len() {
        for j in i + 1..singles.len() {
            let (a, b) = (&singles[i], &singles[j]);
            let rho = pair_marginal(&a.union(b))?;
            pairs.push(PairValues {
                a: a.clone(),
                b: b.clone(),
                mutual_information: mutual_information(state, a, b)?,
                reflected_entropy: reflected_entropy(&rho, a, b)?,
                markov_gap: markov_gap(&rho, a, b)?,
                log_negativity: log_negativity(&rho, a, b)?,
            });
        }
    }
    let mut cmi = Vec::new();
    for i in 0..singles.len() {
        for k in i + 1..singles.len() {
            for j in 0..singles.len() {
                if j != i && j != k {
                    cmi.push(CmiValue {
                        a: singles[i].clone(),
                        c: singles[k].clone(),
                        given: singles[j].clone(),
                        value: conditional_mutual_information(state, &singles[i], &singles[k], &singles[j])?,
                    });
                }
            }
        }
    }
    Ok((entropies, pairs, cmi))
}

fn stabilizer_summary(tab: &StabilizerTableau, groups: &[(String, Vec<usize>)]) -> Result<StabilizerSummary> {
    let mut entropy_bits = Vec::new();
    for (l, qs) in groups {
        entropy_bits.push((l.clone(), stab::region_entropy_bits(tab, qs)?));
    }
    let mut tripartitions = Vec::new();
    if groups.len() == 3 {
        tripartitions.push(GroupCounts {
            a: groups[0].0.clone(),
            b: groups[1].0.clone(),
            c: groups[2].0.clone(),
            counts: stab::tripartite_counts(tab, &groups[0].1, &groups[1].1, &groups[2].1)?,
        });
    } else if groups.len() > 3 {
        for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let rest: Vec<usize> = groups
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .flat_map(|(_, (_, qs))| qs.iter().copied())
                    .collect();
                tripartitions.push(GroupCounts {
                    a: groups[i].0.clone(),
                    b: groups[j].0.clone(),
                    c: "rest".into(),
                    counts: stab::tripartite_counts(tab, &groups[i].1, &groups[j].1, &rest)?,
                });
            }
        }
    }
    Ok(StabilizerSummary {
        n_qubits: tab.n_qubits(),
        entropy_bits,
        tripartitions,
    })
}

fn analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let extra = args.regions.as_deref().map(parse_regions).unwrap_or_default();
    let report = match io::read_input(&args.input)? {
        LoadedState::Pure(psi) => {
            let labels: Vec<String> = psi.spec().labels().iter().map(|s| s.to_string()).collect();
            let (entropies, pairs, cmi) = dense_analysis(&psi, &labels, &extra, |r| psi.reduced(r))?;
            AnalyzeReport { schema_version: SCHEMA_VERSION, kind: "pure", parties: labels, entropies, pairs, cmi, stabilizer: None }
        }
        LoadedState::Density(rho) => {
            let labels: Vec<String> = rho.spec().labels().iter().map(|s| s.to_string()).collect();
            let (entropies, pairs, cmi) = dense_analysis(&rho, &labels, &extra, |r| rho.partial_trace(r))?;
            AnalyzeReport { schema_version: SCHEMA_VERSION, kind: "density", parties: labels, entropies, pairs, cmi, stabilizer: None }
        }
        LoadedState::Tableau(tab) => {
            let groups = match &args.groups {
                Some(g) => parse_groups(g)?,
                None => single_qubit_groups(tab.n_qubits()),
            };
            let summary = stabilizer_summary(&tab, &groups)?;
            let psi = tableau_state(&tab, &args.groups)?;
            let labels: Vec<String> = psi.spec().labels().iter().map(|s| s.to_string()).collect();
            let (entropies, pairs, cmi) = dense_analysis(&psi, &labels, &extra, |r| psi.reduced(r))?;
            AnalyzeReport {
                schema_version: SCHEMA_VERSION,
                kind: "stabilizer",
                parties: labels,
                entropies,
                pairs,
                cmi,
                stabilizer: Some(summary),
            }
        }
    };
    json(&report, true)
}

/// What `eop` writes and `recover --from-eop` reads back.
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct EopReport {
    pub schema_version: u32,
    /// `E_p − ½(Σ S(A_i) − S(Ā))`.
    pub gap: f64,
    /// Bipartite convention `2E_p − I`, two-party α only.
    pub gap_bipartite: Option<f64>,
    pub gap_telescoped: Option<f64>,
    pub sandwich_ok: bool,
    /// The state the optimizer actually saw: `"pure"`, `"density"` or
    /// `"canonical-purification"`.
    pub input_form: String,
    pub result: EopResult,
}

/// Input prepared for the optimizer: either a pure state or a two-party
/// density problem.
enum Prepared {
    Pure(PureState, &'static str),
    Density(DensityOperator),
}

fn default_alpha(labels: &[&str], pure: bool) -> Vec<Region> {
    let take = if pure { labels.len().saturating_sub(1).max(2) } else { labels.len() };
    labels.iter().take(take).map(|l| Region::new([*l])).collect()
}

fn prepare(state: LoadedState, alpha: &Option<String>, groups: &Option<String>) -> Result<(Prepared, Vec<Region>)> {
    match state {
        LoadedState::Pure(psi) => {
            let a = alpha.as_deref().map(parse_regions).unwrap_or_else(|| default_alpha(&psi.spec().labels(), true));
            Ok((Prepared::Pure(psi, "pure"), a))
        }
        LoadedState::Tableau(tab) => {
            let psi = tableau_state(&tab, groups)?;
            let a = alpha.as_deref().map(parse_regions).unwrap_or_else(|| default_alpha(&psi.spec().labels(), true));
            Ok((Prepared::Pure(psi, "pure"), a))
        }
        LoadedState::Density(rho) => {
            let a = alpha.as_deref().map(parse_regions).unwrap_or_else(|| default_alpha(&rho.spec().labels(), false));
            if a.len() == 2 {
                Ok((Prepared::Density(rho), a))
            } else {
                Ok((Prepared::Pure(canonical_purification(&rho)?, "canonical-purification"), a))
            }
        }
    }
}

fn run_eop(prepared: &Prepared, alpha: &[Region], cfg: &OptimizerConfig) -> Result<EopReport> {
    let (result, telescoped, form) = match prepared {
        Prepared::Pure(psi, form) => {
            let rep = eop::generalized_gap(psi, alpha, cfg)?;
            (rep.eop, Some(rep.gap_telescoped), form.to_string())
        }
        Prepared::Density(rho) => (eop::eop_bipartite_regions(rho, &alpha[0], &alpha[1], cfg)?, None, "density".to_string()),
    };
    let tol = 1e-9;
    Ok(EopReport {
        schema_version: SCHEMA_VERSION,
        gap: result.gap(),
        gap_bipartite: (alpha.len() == 2).then(|| eop::bipartite_gap_of(&result)),
        gap_telescoped: telescoped,
        sandwich_ok: result.lower_bound - tol <= result.value && result.value <= result.upper_bound + tol,
        input_form: form,
        result,
    })
}

fn eop_cmd(args: &EopArgs, seed: u64) -> Result<Outcome> {
    let cfg = opt_config(&args.opt, seed)?;
    let (prepared, alpha) = prepare(io::read_input(&args.input)?, &args.alpha, &None)?;
    let report = run_eop(&prepared, &alpha, &cfg)?;
    let ok = report.sandwich_ok;
    json(&report, ok)
}

fn load_eop(path: &Path) -> Result<EopResult> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let version = value.get("schema_version").and_then(|v| v.as_u64());
    if version != Some(SCHEMA_VERSION as u64) {
        return Err(Error::Version(format!(
            "EoP result has schema_version {version:?}, expected {SCHEMA_VERSION}"
        )));
    }
    let inner = value.get("result").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| Error::Version(format!("incompatible EoP result: {e}")))
}

#[derive(Serialize)]
struct RecoverOutput {
    #[serde(flatten)]
    report: recovery::RecoveryReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    measured: Option<recovery::MeasuredCheck>,
}

fn recover_cmd(args: &RecoverArgs, seed: u64) -> Result<Outcome> {
    let state = io::read_input(&args.input)?;
    let quad = match args.map {
        MapKind::Petz => QuadratureWeight::petz(),
        MapKind::Rotated => default_quadrature(),
    };
    let (prepared, alpha) = prepare(state, &args.alpha, &None)?;
    let result = match &args.from_eop {
        Some(path) => {
            let result = load_eop(path)?;
            let fp = match &prepared {
                Prepared::Pure(psi, _) => eop::fingerprint_pure(psi),
                Prepared::Density(rho) => eop::fingerprint_density(rho),
            };
            if fp != result.state_fingerprint {
                return Err(Error::Version("EoP result was computed for a different state".into()));
            }
            result
        }
        None => run_eop(&prepared, &alpha, &opt_config(&args.opt, seed)?)?.result,
    };
    let (report, measured) = match &prepared {
        Prepared::Pure(psi, _) => {
            let report = recovery::recovery_report(psi, &result, &quad)?;
            let measured = if args.measured {
                Some(recovery::measured_bound_check(psi, &result, &quad)?)
            } else {
                None
            };
            (report, measured)
        }
        Prepared::Density(rho) => {
            if args.measured {
                return Err(Error::Config("--measured needs a pure input".into()));
            }
            (recovery::recovery_report_density(rho, &result, &quad)?, None)
        }
    };
    let ok = report.bound_satisfied && measured.as_ref().is_none_or(|m| m.satisfied);
    json(&RecoverOutput { report, measured }, ok)
}

fn parse_chain(s: &str) -> Vec<Vec<Region>> {
    s.split('/').filter(|p| !p.trim().is_empty()).map(parse_regions).collect()
}

fn certify_cmd(args: &CertifyArgs, seed: u64) -> Result<Outcome> {
    let cfg = opt_config(&args.opt, seed)?;
    let chain = args.chain.as_deref().map(parse_chain);
    let cert = match io::read_input(&args.input)? {
        LoadedState::Pure(psi) => structure::certify_2producible(&psi, chain, &cfg, args.threshold)?,
        LoadedState::Tableau(tab) => {
            let groups = match &args.groups {
                Some(g) => parse_groups(g)?,
                None => single_qubit_groups(tab.n_qubits()),
            };
            structure::certify_tableau(&tab, &groups, chain, &cfg, args.threshold)?
        }
        LoadedState::Density(_) => {
            return Err(Error::Config("certification needs a pure state or a tableau".into()));
        }
    };
    let ok = cert.distance_check.holds;
    json(&cert, ok)
}

#[derive(Serialize)]
struct ScanOutput {
    #[serde(flatten)]
    summary: experiments::ScanSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    gsd_prevalence: Option<Vec<experiments::GsdPrevalence>>,
}

fn scan_cmd(args: &ScanArgs, seed: u64, format: Format) -> Result<Outcome> {
    let ratios = args
        .ratios
        .split(':')
        .map(|r| r.trim().parse::<usize>().map_err(|e| Error::Config(format!("ratio {r:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let cfg = ScanConfig {
        n_list: args.n_list.clone(),
        ratios,
        samples: args.samples,
        seed,
        output: None,
    };
    let rows = experiments::run_scan(&cfg)?;
    let summary = experiments::summarize(&cfg, rows)?;
    let ok = summary.all_markov_hold && summary.all_page_hold;
    if format == Format::Csv {
        let mut buf = Vec::new();
        experiments::write_csv(&summary.rows, &mut buf)?;
        return Ok(Outcome {
            text: String::from_utf8(buf).expect("csv is utf-8"),
            checks_passed: ok,
            extension: "csv",
        });
    }
    let gsd_prevalence = if args.gsd_probe {
        Some(experiments::gsd_prevalence(&[4, 8, 12], args.probe_samples, seed)?)
    } else {
        None
    };
    json(&ScanOutput { summary, gsd_prevalence }, ok)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze(_) => "analyze",
        Command::Eop(_) => "eop",
        Command::Recover(_) => "recover",
        Command::Certify(_) => "certify",
        Command::Scan(_) => "scan",
    }
}

/// Runs one command without touching global state.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    if cli.format == Format::Csv && !matches!(cli.command, Command::Scan(_)) {
        return Err(Error::Config("csv output is only available for scan".into()));
    }
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Eop(a) => eop_cmd(a, cli.seed),
        Command::Recover(a) => recover_cmd(a, cli.seed),
        Command::Certify(a) => certify_cmd(a, cli.seed),
        Command::Scan(a) => scan_cmd(a, cli.seed, cli.format),
    }
}

/// Where the report goes: `--out`, else the env directory, else stdout.
pub fn output_path(cli: &Cli, outcome: &Outcome) -> Option<PathBuf> {
    cli.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|dir| {
            PathBuf::from(dir).join(format!("{}.{}", command_name(&cli.command), outcome.extension))
        })
    })
}

/// Exit code: 0 when every check passed, 2 when a check failed, 1 on error.
pub fn main_with(cli: Cli) -> i32 {
    let level = cli.log_level.parse().unwrap_or(log::LevelFilter::Warn);
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match output_path(&cli, &outcome) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(parent) {
                    eprintln!("error: {e}");
                    return 1;
                }
            }
            if let Err(e) = std::fs::write(&path, &outcome.text) {
                eprintln!("error: writing {}: {e}", path.display());
                return 1;
            }
            log::info!("wrote {}", path.display());
        }
        None => print!("{}", outcome.text),
    }
    if outcome.checks_passed {
        0
    } else {
        eprintln!("one or more checks failed");
        2
    }
}
