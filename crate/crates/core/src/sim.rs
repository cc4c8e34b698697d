//! Monte Carlo size and power experiments.
//!
//! A cell draws `R` pairs of samples from two copulas, optionally maps them
//! through normal margins, runs a permutation test on each pair and reports
//! the fraction of replications with `p <= α`.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copulas::{sample, tau_to_params, CopulaSpec, Family, TauAux};
use crate::error::{Error, Result};
use crate::numeric::norm_quantile;
use crate::permute::{sample_distribution, Method, PermutationPlan, Thm31Options};
use crate::ranks::Sample;
use crate::rng::{derive_seed, substream};
use crate::stats::StatisticKind;

/// Marginal distributions applied to copula draws.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Margins {
    #[default]
    Uniform,
    /// `(mean, sd)` for every coordinate of each group.
    Normal { group1: Vec<[f64; 2]>, group2: Vec<[f64; 2]> },
}

impl Margins {
    pub fn label(&self) -> &'static str {
        match self {
            Margins::Uniform => "uniform",
            Margins::Normal { .. } => "normal",
        }
    }

    /// The same normal margins `N(mean, sd)` on every coordinate of each group.
    pub fn normal(d: usize, group1: (f64, f64), group2: (f64, f64)) -> Self {
        Margins::Normal {
            group1: vec![[group1.0, group1.1]; d],
            group2: vec![[group2.0, group2.1]; d],
        }
    }

    fn validate(&self, d: usize) -> std::result::Result<(), String> {
        if let Margins::Normal { group1, group2 } = self {
            for (name, g) in [("group1", group1), ("group2", group2)] {
                if g.len() != d {
                    return Err(format!("{name} lists {} margins for dimension {d}", g.len()));
                }
                if let Some(bad) = g.iter().find(|p| !(p[1] > 0.0) || !p[0].is_finite() || !p[1].is_finite()) {
                    return Err(format!("{name} margin ({}, {}) needs a finite mean and positive sd", bad[0], bad[1]));
                }
            }
        }
        Ok(())
    }

    /// Map copula draws of group `group` (0 or 1) to the margins.
    pub fn apply(&self, u: &Sample, group: usize) -> Result<Sample> {
        match self {
            Margins::Uniform => Ok(u.clone()),
            Margins::Normal { group1, group2 } => {
                let params = if group == 0 { group1 } else { group2 };
                if params.len() != u.d() {
                    return Err(Error::DimensionMismatch {
                        expected: u.d(),
                        found: params.len(),
                    });
                }
                let top = 1.0 - f64::EPSILON / 2.0;
                u.map_columns(|q, v| params[q][0] + params[q][1] * norm_quantile(v.clamp(f64::MIN_POSITIVE, top)))
            }
        }
    }
}

/// One experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub copula1: CopulaSpec,
    pub copula2: CopulaSpec,
    pub margins: Margins,
    pub n: usize,
    pub m: usize,
    pub alpha: Vec<f64>,
    pub kinds: Vec<StatisticKind>,
    pub method: Method,
    pub replications: usize,
    pub permutations: usize,
    pub seed: u64,
}

impl SimConfig {
    /// A cell with uniform margins, `α = 0.05`, the CvM statistic, the
    /// re-ranking method and `R = B = 500`.
    pub fn new(copula1: CopulaSpec, copula2: CopulaSpec, n: usize, m: usize) -> Self {
        SimConfig {
            copula1,
            copula2,
            margins: Margins::Uniform,
            n,
            m,
            alpha: vec![0.05],
            kinds: vec![StatisticKind::Cvm],
            method: Method::Thm32,
            replications: 500,
            permutations: 500,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| Error::Config {
            path: field.to_string(),
            message,
        };
        if self.copula1.dim() != self.copula2.dim() {
            return Err(bad("copula2.dim", format!("{} differs from copula1.dim {}", self.copula2.dim(), self.copula1.dim())));
        }
        if self.n < 2 || self.m < 2 {
            return Err(bad("n", format!("group sizes ({}, {}) must be at least 2", self.n, self.m)));
        }
        if self.replications == 0 {
            return Err(bad("replications", "must be at least 1".into()));
        }
        if self.permutations == 0 {
            return Err(bad("permutations", "must be at least 1".into()));
        }
        if self.alpha.is_empty() {
            return Err(bad("alpha", "needs at least one level".into()));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(bad("alpha", format!("level {a} outside (0, 1)")));
        }
        if self.kinds.is_empty() {
            return Err(bad("kinds", "needs at least one statistic".into()));
        }
        for k in &self.kinds {
            k.validate().map_err(|e| bad("kinds", e.to_string()))?;
        }
        self.margins.validate(self.copula1.dim()).map_err(|e| bad("margins", e))?;
        Ok(())
    }

    /// FNV-1a hash of the canonical JSON form, as 16 hex digits.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let h = json.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        format!("{h:016x}")
    }
}

/// Rejection frequency for one `(alpha, kind)` pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellRate {
    pub alpha: f64,
    pub kind: StatisticKind,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub config: SimConfig,
    pub config_hash: String,
    pub rates: Vec<CellRate>,
    pub seconds: f64,
}

impl SimResult {
    pub fn rate(&self, alpha: f64, kind: StatisticKind) -> Option<&CellRate> {
        self.rates.iter().find(|r| r.alpha == alpha && r.kind == kind)
    }

    pub fn rows(&self) -> Vec<ResultRow> {
        let c = &self.config;
        let tau = |s: &CopulaSpec| s.kendall_tau().map_or(f64::NAN, |t| (t * 1e12).round() / 1e12);
        let (tau1, tau2) = (tau(&c.copula1), tau(&c.copula2));
        self.rates
            .iter()
            .map(|r| ResultRow {
                family1: c.copula1.family().to_string(),
                family2: c.copula2.family().to_string(),
                tau1,
                tau2,
                margins: c.margins.label().to_string(),
                n: c.n,
                m: c.m,
                alpha: r.alpha,
                kind: r.kind.to_string(),
                method: c.method.to_string(),
                replications: c.replications,
                permutations: c.permutations,
                rejection_rate: r.rejection_rate,
                stderr: r.stderr,
                seconds: self.seconds,
                config_hash: self.config_hash.clone(),
            })
            .collect()
    }
}

/// One line of a results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub family1: String,
    pub family2: String,
    pub tau1: f64,
    pub tau2: f64,
    pub margins: String,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub kind: String,
    pub method: String,
    #[serde(rename = "R")]
    pub replications: usize,
    #[serde(rename = "B")]
    pub permutations: usize,
    pub rejection_rate: f64,
    pub stderr: f64,
    pub seconds: f64,
    pub config_hash: String,
}

/// Column names of results CSV files.
pub const RESULT_HEADER: [&str; 16] = [
    "family1",
    "family2",
    "tau1",
    "tau2",
    "margins",
    "n",
    "m",
    "alpha",
    "kind",
    "method",
    "R",
    "B",
    "rejection_rate",
    "stderr",
    "seconds",
    "config_hash",
];

/// Write a header and the rows of every result as CSV.
pub fn write_results<W: std::io::Write>(results: &[SimResult], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(RESULT_HEADER)?;
    for r in results {
        for row in r.rows() {
            w.serialize(row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Draw the two groups of replication `rep`, already mapped to the margins.
pub fn replication_samples(cfg: &SimConfig, rep: usize) -> Result<(Sample, Sample)> {
    let seed = derive_seed(cfg.seed, rep as u64);
    let u1 = sample(&cfg.copula1, cfg.n, &mut substream(seed, 0))?;
    let u2 = sample(&cfg.copula2, cfg.m, &mut substream(seed, 1))?;
    let x1 = cfg.margins.apply(&u1, 0)?;
    let x2 = cfg.margins.apply(&u2, 1)?;
    if cfg!(debug_assertions) {
        use crate::ranks::pseudo_obs;
        debug_assert_eq!(pseudo_obs(&u1)?, pseudo_obs(&x1)?, "margin transform changed ranks");
        debug_assert_eq!(pseudo_obs(&u2)?, pseudo_obs(&x2)?, "margin transform changed ranks");
    }
    Ok((x1, x2))
}

/// p-values of every statistic for replication `rep`.
fn replication_p_values(cfg: &SimConfig, rep: usize) -> Result<Vec<f64>> {
    let (x1, x2) = replication_samples(cfg, rep)?;
    let plan = PermutationPlan::monte_carlo(cfg.permutations, derive_seed(derive_seed(cfg.seed, rep as u64), 2));
    cfg.kinds
        .iter()
        .map(|&kind| Ok(sample_distribution(&x1, &x2, kind, cfg.method, &plan, &Thm31Options::default())?.p_value()))
        .collect()
}

/// Run every replication of a cell.
pub fn run_cell(cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    let start = Instant::now();
    let p_values: Vec<Vec<f64>> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            replication_p_values(cfg, rep).map_err(|e| Error::Replication {
                replication: rep,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let r = cfg.replications as f64;
    let mut rates = Vec::new();
    for &alpha in &cfg.alpha {
        for (k, &kind) in cfg.kinds.iter().enumerate() {
            let rejections = p_values.iter().filter(|p| p[k] <= alpha).count();
            let rate = rejections as f64 / r;
            rates.push(CellRate {
                alpha,
                kind,
                rejections,
                rejection_rate: rate,
                stderr: (rate * (1.0 - rate) / r).sqrt(),
            });
        }
    }
    Ok(SimResult {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        rates,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Outcome of [`run_table`].
#[derive(Debug, Default)]
pub struct TableOutcome {
    pub results: Vec<SimResult>,
    /// Indices of cells whose hash was already present in the output file.
    pub skipped: Vec<usize>,
    pub failures: Vec<(usize, Error)>,
}

/// Config hashes already present in a results file.
pub fn completed_hashes(path: &Path) -> Result<HashSet<String>> {
    if !path.exists() || std::fs::metadata(path)?.len() == 0 {
        return Ok(HashSet::new());
    }
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize::<ResultRow>()
        .map(|r| Ok(r?.config_hash))
        .collect()
}

/// Read a results CSV.
pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Run cells one after another on a pool of `workers` threads.
///
/// With an output path, rows are appended as each cell finishes, and cells
/// whose hash is already in the file are skipped. A failing cell does not stop
/// the others.
pub fn run_table(cfgs: &[SimConfig], workers: usize, output: Option<&Path>) -> Result<TableOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
    let done = match output {
        Some(p) => completed_hashes(p)?,
        None => HashSet::new(),
    };
    let mut writer = match output {
        Some(p) => {
            let fresh = !p.exists() || std::fs::metadata(p)?.len() == 0;
            let file: File = OpenOptions::new().create(true).append(true).open(p)?;
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
            if fresh {
                w.write_record(RESULT_HEADER)?;
                w.flush()?;
            }
            Some(w)
        }
        None => None,
    };
    let mut outcome = TableOutcome::default();
    for (i, cfg) in cfgs.iter().enumerate() {
        if done.contains(&cfg.hash()) {
            outcome.skipped.push(i);
            continue;
        }
        match pool.install(|| run_cell(cfg)) {
            Ok(result) => {
                if let Some(w) = writer.as_mut() {
                    for row in result.rows() {
                        w.serialize(row)?;
                    }
                    w.flush()?;
                }
                outcome.results.push(result);
            }
            Err(e) => outcome.failures.push((i, e)),
        }
    }
    Ok(outcome)
}

/// Copula as written in a config file: a family plus either `params` or a Kendall `tau`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CopulaEntry {
    family: String,
    params: Option<Vec<f64>>,
    tau: Option<f64>,
    dim: Option<usize>,
    /// Degrees of freedom when a Student-t copula is given by `tau`.
    nu: Option<f64>,
}

fn default_alpha() -> Vec<f64> {
    vec![0.05]
}

fn default_kinds() -> Vec<String> {
    vec!["cvm".into()]
}

fn default_method() -> String {
    "thm32".into()
}

fn default_count() -> usize {
    500
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellEntry {
    copula1: CopulaEntry,
    copula2: CopulaEntry,
    #[serde(default)]
    margins: Margins,
    n: usize,
    m: usize,
    #[serde(default = "default_alpha")]
    alpha: Vec<f64>,
    #[serde(default = "default_kinds")]
    kinds: Vec<String>,
    #[serde(default = "default_method")]
    method: String,
    #[serde(default = "default_count")]
    replications: usize,
    #[serde(default = "default_count")]
    permutations: usize,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    cell: Vec<CellEntry>,
}

fn resolve_copula(entry: &CopulaEntry, path: &str) -> Result<CopulaSpec> {
    let err = |field: &str, message: String| Error::Config {
        path: format!("{path}.{field}"),
        message,
    };
    let family: Family = entry.family.parse().map_err(|e: Error| err("family", e.to_string()))?;
    let dim = entry.dim.unwrap_or(2);
    match (&entry.params, entry.tau) {
        (Some(_), Some(_)) => Err(err("tau", "give either params or tau, not both".into())),
        (Some(params), None) => CopulaSpec::new(family, params.clone(), dim).map_err(|e| err("params", e.to_string())),
        (None, Some(tau)) => tau_to_params(family, tau, TauAux { dim, nu: entry.nu }).map_err(|e| err("tau", e.to_string())),
        (None, None) if family == Family::Independence => {
            CopulaSpec::independence(dim).map_err(|e| err("dim", e.to_string()))
        }
        (None, None) => Err(err("params", "missing (give params or tau)".into())),
    }
}

/// Parse a TOML experiment file into validated cells.
pub fn parse_config(text: &str) -> Result<Vec<SimConfig>> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config {
        path: "<file>".into(),
        message: e.to_string(),
    })?;
    file.cell
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let at = format!("cell[{i}]");
            let err = |field: &str, message: String| Error::Config {
                path: format!("{at}.{field}"),
                message,
            };
            let kinds = c
                .kinds
                .iter()
                .map(|k| k.parse::<StatisticKind>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| err("kinds", e.to_string()))?;
            let cfg = SimConfig {
                copula1: resolve_copula(&c.copula1, &format!("{at}.copula1"))?,
                copula2: resolve_copula(&c.copula2, &format!("{at}.copula2"))?,
                margins: c.margins.clone(),
                n: c.n,
                m: c.m,
                alpha: c.alpha.clone(),
                kinds,
                method: c.method.parse().map_err(|e: Error| err("method", e.to_string()))?,
                replications: c.replications,
                permutations: c.permutations,
                seed: c.seed,
            };
            cfg.validate().map_err(|e| match e {
                Error::Config { path, message } => Error::Config {
                    path: format!("{at}.{path}"),
                    message,
                },
                other => other,
            })?;
            Ok(cfg)
        })
        .collect()
}

/// Read and parse a TOML experiment file.
pub fn load_config(path: &Path) -> Result<Vec<SimConfig>> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimConfig {
        let g = CopulaSpec::gaussian(0.5).unwrap();
        let mut cfg = SimConfig::new(g.clone(), g, 6, 7);
        cfg.replications = 20;
        cfg.permutations = 30;
        cfg.alpha = vec![0.1, 0.5];
        cfg.kinds = vec![StatisticKind::Cvm, StatisticKind::Ks];
        cfg
    }

    #[test]
    fn cell_is_reproducible_and_counts_are_consistent() {
        let cfg = small();
        let a = run_cell(&cfg).unwrap();
        let b = run_cell(&cfg).unwrap();
        assert_eq!(a.rates, b.rates);
        assert_eq!(a.rates.len(), 4);
        for r in &a.rates {
            assert!((0.0..=1.0).contains(&r.rejection_rate));
            assert_eq!(r.rejection_rate, r.rejections as f64 / 20.0);
        }
        let lo = a.rate(0.1, StatisticKind::Cvm).unwrap().rejections;
        let hi = a.rate(0.5, StatisticKind::Cvm).unwrap().rejections;
        assert!(lo <= hi);
    }

    #[test]
    fn hash_tracks_config() {
        let cfg = small();
        let mut other = cfg.clone();
        assert_eq!(cfg.hash(), other.hash());
        other.seed = 2;
        assert_ne!(cfg.hash(), other.hash());
        assert_eq!(cfg.hash().len(), 16);
    }

    #[test]
    fn parses_toml_cells() {
        let text = r#"
            [[cell]]
            n = 10
            m = 12
            alpha = [0.05, 0.1]
            kinds = ["cvm", "lp:inf:40"]
            method = "naive-w"
            replications = 5
            permutations = 9
            seed = 3
            copula1 = { family = "gaussian", tau = 0.5 }
            copula2 = { family = "Clayton", params = [2.0] }
            margins = { type = "normal", group1 = [[0.0, 1.0], [0.0, 1.0]], group2 = [[5.0, 1.0], [5.0, 2.0]] }
        "#;
        let cells = parse_config(text).unwrap();
        assert_eq!(cells.len(), 1);
        let c = &cells[0];
        assert_eq!(c.method, Method::NaiveW);
        assert!((c.copula1.params()[0] - (std::f64::consts::PI / 4.0).sin()).abs() < 1e-12);
        assert_eq!(c.margins.label(), "normal");
        assert!(parse_config("").unwrap().is_empty());
    }

    #[test]
    fn config_errors_name_the_field() {
        let unknown = r#"
            [[cell]]
            n = 10
            m = 10
            copula1 = { family = "wavelet", tau = 0.5 }
            copula2 = { family = "gaussian", tau = 0.5 }
        "#;
        match parse_config(unknown) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "cell[0].copula1.family"),
            other => panic!("{other:?}"),
        }
        let bad_alpha = unknown.replace("wavelet", "gaussian").replace("m = 10", "m = 10\nalpha = [1.5]");
        match parse_config(&bad_alpha) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "cell[0].alpha"),
            other => panic!("{other:?}"),
        }
        let typo = unknown.replace("wavelet", "gaussian").replace("n = 10", "n = 10\nreplicatons = 3");
        assert!(matches!(parse_config(&typo), Err(Error::Config { .. })));
    }

    #[test]
    fn normal_margins_preserve_ranks() {
        let cfg = SimConfig {
            margins: Margins::normal(2, (0.0, 1.0), (5.0, 1.0)),
            ..small()
        };
        let (x1, x2) = replication_samples(&cfg, 0).unwrap();
        let (u1, u2) = replication_samples(&small(), 0).unwrap();
        use crate::ranks::pseudo_obs;
        assert_eq!(pseudo_obs(&x1).unwrap(), pseudo_obs(&u1).unwrap());
        assert_eq!(pseudo_obs(&x2).unwrap(), pseudo_obs(&u2).unwrap());
        assert!(x2.data().iter().sum::<f64>() / x2.data().len() as f64 > 3.0);
    }

    #[test]
    fn table_resumes_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("results.csv");
        let cfg = small();
        let first = run_table(std::slice::from_ref(&cfg), 1, Some(&out)).unwrap();
        assert_eq!(first.results.len(), 1);
        let rows = read_results(&out).unwrap();
        assert_eq!(rows, first.results[0].rows());
        let again = run_table(&[cfg.clone()], 1, Some(&out)).unwrap();
        assert_eq!((again.results.len(), again.skipped), (0, vec![0]));
        assert_eq!(read_results(&out).unwrap().len(), 4);
        assert!(run_table(&[], 2, None).unwrap().results.is_empty());
    }
}
