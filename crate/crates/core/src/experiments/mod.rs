//! Monte Carlo scans over random four-party stabilizer states: how often
//! pairs share Bell pairs or GHZ triples, how often the first party is
//! entangled at all, and the Markov, union and Page-type bounds on those
//! frequencies.

use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eop::SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::qdense::{default_label, derive_seed, Region};
use crate::stab::{self, to_dense};
use crate::structure::gsd_detect;

const LN2: f64 = std::f64::consts::LN_2;

/// Slack, in standard errors, for the Markov and Page checks.
pub const MARKOV_SE: f64 = 3.0;
/// Slack, in combined standard errors, for the union bound.
pub const UNION_SE: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_list: Vec<usize>,
    /// Party proportions; the first party is `A`.
    pub ratios: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            n_list: vec![10, 20, 30],
            ratios: vec![1, 3, 3, 3],
            samples: 2000,
            seed: 0,
            output: None,
        }
    }
}

impl ScanConfig {
    /// Qubits per party for `n` total qubits.
    pub fn party_sizes(&self, n: usize) -> Result<Vec<usize>> {
        let total: usize = self.ratios.iter().sum();
        if self.ratios.len() < 3 || self.ratios.contains(&0) {
            return Err(Error::Config("need at least three positive ratios".into()));
        }
        if !n.is_multiple_of(total) {
            return Err(Error::Config(format!(
                "N = {n} does not split into integer party sizes with ratios {:?}",
                self.ratios
            )));
        }
        Ok(self.ratios.iter().map(|r| r * n / total).collect())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("empty N list".into()));
        }
        for &n in &self.n_list {
            self.party_sizes(n)?;
        }
        Ok(())
    }
}

/// Frequencies for the tripartition `(A : X : rest)` at one `N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub party_sizes: Vec<usize>,
    /// `"AB"`, `"AC"`, …
    pub pair: String,
    pub samples: usize,
    /// `P(E_N(A:X) > 0)`, i.e. at least one Bell pair between `A` and `X`.
    pub p_en_pos: f64,
    pub se_en: f64,
    /// `P(g(A:X) > 0)`, i.e. at least one GHZ triple.
    pub p_g_pos: f64,
    pub se_g: f64,
    pub p_sa_pos: f64,
    pub se_sa_pos: f64,
    /// Mean `S(A)` in nats.
    pub mean_sa: f64,
    pub se_mean_sa: f64,
    /// `D_{AX} / D_{rest}`.
    pub bound_pair: f64,
    /// `log D_min − D_min / D_max` for `A` against the rest.
    pub bound_page: f64,
}

#[derive(Serialize)]
struct CsvRecord<'a> {
    #[serde(rename = "N")]
    n: usize,
    party_sizes: String,
    pair: &'a str,
    #[serde(rename = "P_EN_pos")]
    p_en_pos: f64,
    #[serde(rename = "SE_EN")]
    se_en: f64,
    #[serde(rename = "P_g_pos")]
    p_g_pos: f64,
    #[serde(rename = "SE_g")]
    se_g: f64,
    #[serde(rename = "P_SA_pos")]
    p_sa_pos: f64,
    #[serde(rename = "mean_SA")]
    mean_sa: f64,
    bound_pair: f64,
    bound_page: f64,
}

/// Integer outcome of one sample.
#[derive(Clone, Copy, Debug, Default)]
struct Sample {
    sa_bits: usize,
    bell: [bool; 8],
    ghz: [bool; 8],
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn qubit_ranges(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let r: Vec<usize> = (start..start + s).collect();
            start += s;
            r
        })
        .collect()
}

/// Seed of sample `index` at size `n`; independent of scheduling.
pub fn sample_seed(seed: u64, n: usize, index: usize) -> u64 {
    derive_seed(seed, &[n as u64, index as u64])
}

fn one_sample(n: usize, parties: &[Vec<usize>], seed: u64) -> Result<Sample> {
    let tab = stab::random_stabilizer(n, seed)?;
    let mut out = Sample {
        sa_bits: stab::region_entropy_bits(&tab, &parties[0])?,
        ..Default::default()
    };
    for x in 1..parties.len() {
        let rest: Vec<usize> = (1..parties.len())
            .filter(|&k| k != x)
            .flat_map(|k| parties[k].iter().copied())
            .collect();
        let counts = stab::tripartite_counts(&tab, &parties[0], &parties[x], &rest)?;
        out.bell[x] = counts.e_ab > 0;
        out.ghz[x] = counts.g > 0;
    }
    Ok(out)
}

/// Samples `cfg.samples` random stabilizer states for every `N` and
/// tabulates frequencies per pair `(A, X)`. Results do not depend on the
/// number of threads. Writes the CSV when `cfg.output` is set.
pub fn run_scan(cfg: &ScanConfig) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    if cfg.ratios.len() > 8 {
        return Err(Error::Config("at most eight parties".into()));
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let sizes = cfg.party_sizes(n)?;
        let parties = qubit_ranges(&sizes);
        let samples: Vec<Sample> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| one_sample(n, &parties, sample_seed(cfg.seed, n, i)))
            .collect::<Result<_>>()?;
        let m = cfg.samples;
        let count = |f: &dyn Fn(&Sample) -> bool| samples.iter().filter(|s| f(s)).count();
        let sa_pos = count(&|s| s.sa_bits > 0) as f64 / m as f64;
        let sa_nats: Vec<f64> = samples.iter().map(|s| s.sa_bits as f64 * LN2).collect();
        let sa_sum: u64 = samples.iter().map(|s| s.sa_bits as u64).sum();
        let mean_sa = sa_sum as f64 * LN2 / m as f64;
        let var = if m > 1 {
            sa_nats.iter().map(|x| (x - mean_sa).powi(2)).sum::<f64>() / (m - 1) as f64
        } else {
            0.0
        };
        let n_rest_a = n - sizes[0];
        let (dmin, dmax) = if sizes[0] <= n_rest_a { (sizes[0], n_rest_a) } else { (n_rest_a, sizes[0]) };
        let bound_page = dmin as f64 * LN2 - 2f64.powi(dmin as i32 - dmax as i32);
        for x in 1..sizes.len() {
            let en = count(&|s| s.bell[x]) as f64 / m as f64;
            let g = count(&|s| s.ghz[x]) as f64 / m as f64;
            let rest = n - sizes[0] - sizes[x];
            rows.push(ScanRow {
                n,
                party_sizes: sizes.clone(),
                pair: format!("{}{}", default_label(0), default_label(x)),
                samples: m,
                p_en_pos: en,
                se_en: binomial_se(en, m),
                p_g_pos: g,
                se_g: binomial_se(g, m),
                p_sa_pos: sa_pos,
                se_sa_pos: binomial_se(sa_pos, m),
                mean_sa,
                se_mean_sa: (var / m as f64).sqrt(),
                bound_pair: 2f64.powi((sizes[0] + sizes[x]) as i32 - rest as i32),
                bound_page,
            });
        }
    }
    if let Some(path) = &cfg.output {
        let file = std::fs::File::create(path)?;
        write_csv(&rows, file)?;
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[ScanRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        let sizes: Vec<String> = r.party_sizes.iter().map(|s| s.to_string()).collect();
        w.serialize(CsvRecord {
            n: r.n,
            party_sizes: sizes.join(":"),
            pair: &r.pair,
            p_en_pos: r.p_en_pos,
            se_en: r.se_en,
            p_g_pos: r.p_g_pos,
            se_g: r.se_g,
            p_sa_pos: r.p_sa_pos,
            mean_sa: r.mean_sa,
            bound_pair: r.bound_pair,
            bound_page: r.bound_page,
        })
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

/// Markov-inequality bounds `P(E_N(A:X) > 0), P(g(A:X) > 0) ≤ D_{AX}/D_{rest}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovCheck {
    pub n: usize,
    pub pair: String,
    pub bound: f64,
    pub en_holds: bool,
    pub g_holds: bool,
}

pub fn markov_checks(rows: &[ScanRow]) -> Vec<MarkovCheck> {
    rows.iter()
        .map(|r| MarkovCheck {
            n: r.n,
            pair: r.pair.clone(),
            bound: r.bound_pair,
            en_holds: r.p_en_pos <= r.bound_pair + MARKOV_SE * r.se_en,
            g_holds: r.p_g_pos <= r.bound_pair + MARKOV_SE * r.se_g,
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnionEntry {
    pub n: usize,
    /// `P(S(A) > 0)`.
    pub lhs: f64,
    /// `Σ_X [P(E_N(A:X) > 0) + P(g(A:X) > 0)]`.
    pub rhs: f64,
    pub se_total: f64,
    /// `lhs ≤ rhs + 4·se_total`.
    pub holds: bool,
    pub margin: f64,
    /// Right side below 0.1 while the left is at least 0.99.
    pub tension: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnionBoundReport {
    pub entries: Vec<UnionEntry>,
    pub any_tension: bool,
}

fn grouped(rows: &[ScanRow]) -> Vec<Vec<&ScanRow>> {
    let mut out: Vec<Vec<&ScanRow>> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some(g) if g[0].n == r.n => g.push(r),
            _ => out.push(vec![r]),
        }
    }
    out
}

/// Pairwise union bound on `P(S(A) > 0)`: if pair quantities captured all
/// entanglement of `A`, the left side could not exceed the right.
pub fn union_bound_report(rows: &[ScanRow]) -> Result<UnionBoundReport> {
    if rows.is_empty() {
        return Err(Error::Config("no scan rows".into()));
    }
    let entries: Vec<UnionEntry> = grouped(rows)
        .into_iter()
        .map(|g| {
            let lhs = g[0].p_sa_pos;
            let rhs: f64 = g.iter().map(|r| r.p_en_pos + r.p_g_pos).sum();
            let var: f64 = g[0].se_sa_pos.powi(2) + g.iter().map(|r| r.se_en.powi(2) + r.se_g.powi(2)).sum::<f64>();
            let se_total = var.sqrt();
            UnionEntry {
                n: g[0].n,
                lhs,
                rhs,
                se_total,
                holds: lhs <= rhs + UNION_SE * se_total,
                margin: rhs - lhs,
                tension: rhs < 0.1 && lhs >= 0.99,
            }
        })
        .collect();
    let any_tension = entries.iter().any(|e| e.tension);
    Ok(UnionBoundReport { entries, any_tension })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PageEntry {
    pub n: usize,
    pub mean_sa: f64,
    pub se: f64,
    pub bound: f64,
    /// `N_A log 2`.
    pub ceiling: f64,
    pub holds: bool,
}

/// Mean `S(A)` against `log D_min − D_min/D_max` from below and
/// `N_A log 2` from above.
pub fn page_bound_report(rows: &[ScanRow]) -> Vec<PageEntry> {
    grouped(rows)
        .into_iter()
        .map(|g| {
            let r = g[0];
            let ceiling = r.party_sizes[0] as f64 * LN2;
            PageEntry {
                n: r.n,
                mean_sa: r.mean_sa,
                se: r.se_mean_sa,
                bound: r.bound_page,
                ceiling,
                holds: r.mean_sa >= r.bound_page - MARKOV_SE * r.se_mean_sa && r.mean_sa <= ceiling + 1e-12,
            }
        })
        .collect()
}

/// Everything `scan` reports besides the CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanSummary {
    pub schema_version: u32,
    pub config: ScanConfig,
    pub rows: Vec<ScanRow>,
    pub markov: Vec<MarkovCheck>,
    pub all_markov_hold: bool,
    pub union: UnionBoundReport,
    pub page: Vec<PageEntry>,
    pub all_page_hold: bool,
}

pub fn summarize(cfg: &ScanConfig, rows: Vec<ScanRow>) -> Result<ScanSummary> {
    let markov = markov_checks(&rows);
    let union = union_bound_report(&rows)?;
    let page = page_bound_report(&rows);
    Ok(ScanSummary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        all_markov_hold: markov.iter().all(|m| m.en_holds && m.g_holds),
        all_page_hold: page.iter().all(|p| p.holds),
        rows,
        markov,
        union,
        page,
    })
}

/// Fraction of random stabilizer states on `n` qubits, split evenly into
/// four parties, that admit a generalized Schmidt decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GsdPrevalence {
    pub n: usize,
    pub samples: usize,
    pub fraction: f64,
}

pub fn gsd_prevalence(n_list: &[usize], samples: usize, seed: u64) -> Result<Vec<GsdPrevalence>> {
    n_list
        .iter()
        .map(|&n| {
            if n % 4 != 0 || n == 0 {
                return Err(Error::Config(format!("N = {n} is not a positive multiple of 4")));
            }
            let groups: Vec<(String, Region)> = qubit_ranges(&[n / 4; 4])
                .into_iter()
                .enumerate()
                .map(|(p, qs)| (default_label(p), Region::new(qs.iter().map(|q| format!("q{q}")))))
                .collect();
            let hits: Vec<bool> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let tab = stab::random_stabilizer(n, sample_seed(seed ^ 0x0067_7364, n, i))?;
                    let psi = to_dense(&tab)?.regroup(&groups)?;
                    Ok(gsd_detect(&psi).form.is_some())
                })
                .collect::<Result<_>>()?;
            let k = hits.iter().filter(|&&h| h).count();
            Ok(GsdPrevalence {
                n,
                samples,
                fraction: k as f64 / samples as f64,
            })
        })
        .collect()
}
