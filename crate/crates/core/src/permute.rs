//! Permutation tests: the re-ranking procedure, the derivative-corrected
//! procedure, two invalid baselines, p-values and the randomized decision.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::derivatives::{Bandwidth, DerivativeEstimate, EvalGrid, PartialEstimator};
use crate::error::{Error, Result};
use crate::ranks::{check_permutation, pool, pseudo_obs, rerank_groups, PooledPseudo, PseudoSample, Sample};
use crate::rng::substream;
use crate::stats::{cumulative_counts, statistic, statistic_value, StatValue, StatisticKind};

/// Default bound on `N` for exhaustive enumeration (`9! = 362880`).
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 9;

/// Which permutation statistic to compare the observed one with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Permute the pooled pseudo-sample and re-rank within each group.
    Thm32,
    /// Permute without re-ranking and subtract the derivative correction.
    Thm31,
    /// Permute the raw observations. Invalid when the margins differ.
    NaiveW,
    /// Permute the pooled pseudo-sample without re-ranking or correction. Invalid.
    NaiveZhat,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Thm32, Method::Thm31, Method::NaiveW, Method::NaiveZhat];

    pub fn name(self) -> &'static str {
        match self {
            Method::Thm32 => "thm32",
            Method::Thm31 => "thm31",
            Method::NaiveW => "naive-w",
            Method::NaiveZhat => "naive-zhat",
        }
    }

    /// Whether the method depends on the data only through ranks within each group.
    pub fn is_rank_based(self) -> bool {
        self != Method::NaiveW
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| Error::Input(format!("unknown method `{s}` (expected thm32, thm31, naive-w or naive-zhat)")))
    }
}

/// How the permutations are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMode {
    /// Every permutation of the `N` pooled rows.
    Exhaustive,
    /// `B` uniformly drawn permutations.
    MonteCarlo(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationPlan {
    pub mode: PlanMode,
    pub seed: u64,
    pub exhaustive_cap: usize,
}

impl PermutationPlan {
    pub fn monte_carlo(perms: usize, seed: u64) -> Self {
        PermutationPlan {
            mode: PlanMode::MonteCarlo(perms),
            seed,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }

    pub fn exhaustive(seed: u64) -> Self {
        PermutationPlan {
            mode: PlanMode::Exhaustive,
            seed,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.exhaustive_cap = cap;
        self
    }

    /// Number of permutation statistics for `total` pooled rows.
    pub fn count(&self, total: usize) -> Result<usize> {
        match self.mode {
            PlanMode::MonteCarlo(0) => Err(Error::Input("number of permutations must be at least 1".into())),
            PlanMode::MonteCarlo(b) => Ok(b),
            PlanMode::Exhaustive if total > self.exhaustive_cap || total > 20 => Err(Error::Resource(format!(
                "exhaustive enumeration of {total}! permutations exceeds the cap N <= {}",
                self.exhaustive_cap
            ))),
            PlanMode::Exhaustive => Ok((1..=total).product()),
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        self.mode == PlanMode::Exhaustive
    }
}

/// Options for the derivative-corrected procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thm31Options {
    /// Points per axis of the evaluation grid; `None` picks [`EvalGrid::default_for`].
    pub grid: Option<usize>,
    pub bandwidth: Bandwidth,
}

impl Default for Thm31Options {
    fn default() -> Self {
        Thm31Options {
            grid: None,
            bandwidth: Bandwidth::default(),
        }
    }
}

/// Uniform random permutation of `0..total`.
pub fn sample_permutation<R: Rng + ?Sized>(total: usize, rng: &mut R) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..total).collect();
    pi.shuffle(rng);
    pi
}

/// The `k`-th permutation of `0..total` in lexicographic order.
pub fn unrank_permutation(mut k: usize, total: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..total).collect();
    let mut fact: usize = (1..total).product::<usize>().max(1);
    let mut pi = Vec::with_capacity(total);
    for left in (1..=total).rev() {
        let digit = k / fact;
        k %= fact;
        pi.push(pool.remove(digit));
        if left > 1 {
            fact /= left - 1;
        }
    }
    pi
}

/// Permute the pooled rows, re-rank each group, and evaluate the statistic.
pub fn thm32_perm_statistic(z: &PooledPseudo, pi: &[usize], kind: StatisticKind) -> Result<f64> {
    let (a, b) = rerank_groups(&z.permuted(pi)?);
    statistic_value(kind, &a, &b)
}

/// Source data for the invalid baselines.
#[derive(Debug, Clone, Copy)]
pub enum NaiveInput<'a> {
    /// Raw observations of both groups, permuted before ranking.
    Raw(&'a Sample, &'a Sample),
    /// The pooled pseudo-sample, permuted and used without re-ranking.
    Pooled(&'a PooledPseudo),
}

/// Naive permutation statistic.
pub fn naive_perm_statistic(input: NaiveInput<'_>, pi: &[usize], kind: StatisticKind) -> Result<f64> {
    match input {
        NaiveInput::Raw(x1, x2) => {
            let w = x1.stack(x2)?;
            check_permutation(pi, w.n())?;
            let w = w.permute_rows(pi);
            let a = pseudo_obs(&w.slice_rows(0, x1.n()))?;
            let b = pseudo_obs(&w.slice_rows(x1.n(), w.n()))?;
            statistic_value(kind, &a, &b)
        }
        NaiveInput::Pooled(z) => {
            let (a, b) = z.permuted(pi)?.raw_blocks();
            statistic_value(kind, &a, &b)
        }
    }
}

/// Precomputed state for the derivative-corrected statistic on a fixed pooled sample.
///
/// The permuted process `T̃(u) = sqrt(nm/N) (C̃1(u) - C̃2(u))` uses the raw
/// distribution functions of the permuted rows, and
/// `𝔗(u) = T̃(u) - Σ_q T̃(u_(q)) ∂̂_q C(u)` where `u_(q)` keeps only coordinate `q`.
#[derive(Debug, Clone)]
pub struct Thm31Context {
    deriv: DerivativeEstimate,
    p: f64,
    n: usize,
    m: usize,
    d: usize,
    index: Vec<usize>,
    total_joint: Vec<u32>,
    total_margin: Vec<Vec<u32>>,
}

impl Thm31Context {
    pub fn new(z: &PooledPseudo, kind: StatisticKind, deriv: DerivativeEstimate) -> Result<Self> {
        kind.validate()?;
        let grid = deriv.grid();
        if grid.d != z.d() {
            return Err(Error::DimensionMismatch {
                expected: z.d(),
                found: grid.d,
            });
        }
        let (g, d) = (grid.resolution, z.d());
        let gp1 = (g + 1) as u128;
        let s = z.scale() as u128;
        // Row value r/s lies below grid point k/(G+1) (1-based k) iff k >= ceil(r(G+1)/s).
        let index: Vec<usize> = z
            .numerators()
            .iter()
            .map(|&r| {
                let k = (r as u128 * gp1).div_ceil(s) as usize;
                if k > g {
                    usize::MAX
                } else {
                    k - 1
                }
            })
            .collect();
        let all: Vec<usize> = (0..z.total()).collect();
        let mut ctx = Thm31Context {
            deriv,
            p: kind.exponent(),
            n: z.n(),
            m: z.m(),
            d,
            index,
            total_joint: Vec::new(),
            total_margin: Vec::new(),
        };
        let (joint, margin) = ctx.block_counts(&all);
        ctx.total_joint = joint;
        ctx.total_margin = margin;
        Ok(ctx)
    }

    /// Build the context with the pooled derivative estimate.
    pub fn with_options(z: &PooledPseudo, kind: StatisticKind, options: &Thm31Options) -> Result<Self> {
        let grid = match options.grid {
            Some(r) => EvalGrid::new(r, z.d())?,
            None => EvalGrid::default_for(z.d()),
        };
        let estimator = PartialEstimator::pooled(z, options.bandwidth)?;
        Self::new(z, kind, DerivativeEstimate::on_grid(&estimator, grid)?)
    }

    pub fn derivative(&self) -> &DerivativeEstimate {
        &self.deriv
    }

    fn block_counts(&self, rows: &[usize]) -> (Vec<u32>, Vec<Vec<u32>>) {
        let (d, g) = (self.d, self.deriv.grid().resolution);
        let mut idx = Vec::with_capacity(rows.len() * d);
        let mut margin = vec![vec![0u32; g]; d];
        for &i in rows {
            let row = &self.index[i * d..(i + 1) * d];
            idx.extend_from_slice(row);
            for (q, &k) in row.iter().enumerate() {
                if k != usize::MAX {
                    margin[q][k] += 1;
                }
            }
        }
        for col in &mut margin {
            for k in 1..g {
                col[k] += col[k - 1];
            }
        }
        (cumulative_counts(&idx, d, &vec![g; d]), margin)
    }

    /// `‖𝔗‖` for rows `pi[0..n]` as group one; `correct = false` drops the derivative term.
    fn norm(&self, pi: &[usize], correct: bool) -> f64 {
        let (joint1, margin1) = self.block_counts(&pi[..self.n]);
        let (nf, mf) = (self.n as f64, self.m as f64);
        let scale = (nf * mf / (nf + mf)).sqrt();
        let diff = |c1: u32, total: u32| scale * (c1 as f64 / nf - (total - c1) as f64 / mf);
        let grid = self.deriv.grid();
        let marg: Vec<Vec<f64>> = (0..self.d)
            .map(|q| (0..grid.resolution).map(|k| diff(margin1[q][k], self.total_margin[q][k])).collect())
            .collect();
        let mut acc = 0.0f64;
        for (i, (&c1, &tot)) in joint1.iter().zip(&self.total_joint).enumerate() {
            let mut v = diff(c1, tot);
            if correct {
                let idx = grid.indices(i);
                for q in 0..self.d {
                    v -= marg[q][idx[q]] * self.deriv.get(i, q);
                }
            }
            if self.p.is_infinite() {
                acc = acc.max(v.abs());
            } else {
                acc += v.abs().powf(self.p);
            }
        }
        if self.p.is_infinite() {
            acc
        } else {
            (acc / grid.len() as f64).powf(1.0 / self.p)
        }
    }

    /// The derivative-corrected permutation statistic.
    pub fn statistic(&self, pi: &[usize]) -> Result<f64> {
        check_permutation(pi, self.n + self.m)?;
        Ok(self.norm(pi, true))
    }

    /// The uncorrected process norm; at the identity this is the observed
    /// statistic on the evaluation grid.
    pub fn uncorrected(&self, pi: &[usize]) -> Result<f64> {
        check_permutation(pi, self.n + self.m)?;
        Ok(self.norm(pi, false))
    }
}

/// The derivative-corrected permutation statistic on the grid of `deriv`.
pub fn thm31_perm_statistic(
    z: &PooledPseudo,
    pi: &[usize],
    kind: StatisticKind,
    deriv: &DerivativeEstimate,
) -> Result<f64> {
    Thm31Context::new(z, kind, deriv.clone())?.statistic(pi)
}

/// The observed statistic and all permutation statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermDistribution {
    pub values: Vec<f64>,
    pub observed: StatValue,
    pub plan: PermutationPlan,
    pub method: Method,
}

/// Decision at the boundary of the rejection region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
    /// The observed value equals the critical value; reject with probability `a`.
    Randomized,
}

/// The critical value and boundary counts of the randomized test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalRegion {
    /// `c_α`, the `h`-th smallest value with `h = count - ⌊α count⌋`.
    pub critical_value: f64,
    /// Values strictly above `c_α`.
    pub m_plus: usize,
    /// Values equal to `c_α`.
    pub m_zero: usize,
    /// Rejection probability on the boundary, `(α count - M⁺) / M⁰`.
    pub a: f64,
}

impl CriticalRegion {
    pub fn from_values(values: &[f64], alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if values.is_empty() {
            return Err(Error::Input("empty permutation distribution".into()));
        }
        let count = values.len();
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let scaled = alpha * count as f64;
        let h = count - scaled.floor() as usize;
        let c = sorted[h - 1];
        let m_plus = sorted.iter().filter(|&&v| v > c).count();
        let m_zero = sorted.iter().filter(|&&v| v == c).count();
        let a = ((scaled - m_plus as f64) / m_zero as f64).clamp(0.0, 1.0);
        Ok(CriticalRegion {
            critical_value: c,
            m_plus,
            m_zero,
            a,
        })
    }

    pub fn decide(&self, observed: f64) -> Decision {
        if observed > self.critical_value {
            Decision::Reject
        } else if observed < self.critical_value {
            Decision::Accept
        } else {
            Decision::Randomized
        }
    }

    /// `φ`: probability of rejecting at `observed`.
    pub fn rejection_probability(&self, observed: f64) -> f64 {
        match self.decide(observed) {
            Decision::Reject => 1.0,
            Decision::Accept => 0.0,
            Decision::Randomized => self.a,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Input(format!("significance level {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

impl PermDistribution {
    /// `#{values >= observed}`.
    pub fn exceedances(&self) -> usize {
        self.values.iter().filter(|&&v| v >= self.observed.value).count()
    }

    /// `(1 + #≥) / (B + 1)` for Monte Carlo plans, `#≥ / N!` for exhaustive ones.
    pub fn p_value(&self) -> f64 {
        let k = self.exceedances() as f64;
        let count = self.values.len() as f64;
        if self.plan.is_exhaustive() {
            k / count
        } else {
            (1.0 + k) / (count + 1.0)
        }
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn critical_region(&self, alpha: f64) -> Result<CriticalRegion> {
        CriticalRegion::from_values(&self.values, alpha)
    }

    pub fn report(&self, alpha: f64, tie_warning: bool) -> Result<TestReport> {
        let region = self.critical_region(alpha)?;
        Ok(TestReport {
            statistic: self.observed.value,
            kind: self.observed.kind,
            p_value: self.p_value(),
            critical_value: region.critical_value,
            alpha,
            decision: region.decide(self.observed.value),
            a: region.a,
            method: self.method,
            permutations: self.values.len(),
            seed: self.plan.seed,
            n: self.observed.n,
            m: self.observed.m,
            d: self.observed.d,
            tie_warning,
        })
    }
}

/// Outcome of one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: f64,
    pub kind: StatisticKind,
    pub p_value: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub decision: Decision,
    pub a: f64,
    pub method: Method,
    #[serde(rename = "B")]
    pub permutations: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub tie_warning: bool,
}

impl TestReport {
    /// Deterministic rule: reject iff the statistic exceeds `c_α`.
    pub fn rejects(&self) -> bool {
        self.decision == Decision::Reject
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let decision = match self.decision {
            Decision::Accept => "accept".to_string(),
            Decision::Reject => "reject".to_string(),
            Decision::Randomized => format!("randomized (reject with probability {:.4})", self.a),
        };
        writeln!(f, "method          {}", self.method)?;
        writeln!(f, "statistic       {} = {:.6}", self.kind, self.statistic)?;
        writeln!(f, "sizes           n = {}, m = {}, d = {}", self.n, self.m, self.d)?;
        writeln!(f, "permutations    {} (seed {})", self.permutations, self.seed)?;
        writeln!(f, "p-value         {:.6}", self.p_value)?;
        writeln!(f, "critical value  {:.6} at alpha = {}", self.critical_value, self.alpha)?;
        write!(f, "decision        {decision}")?;
        if self.tie_warning {
            write!(f, "\nwarning         ties present in the data")?;
        }
        Ok(())
    }
}

fn permutation_values<F>(total: usize, plan: &PermutationPlan, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    let count = plan.count(total)?;
    match plan.mode {
        PlanMode::MonteCarlo(_) => (0..count as u64)
            .into_par_iter()
            .map(|b| f(&sample_permutation(total, &mut substream(plan.seed, b))))
            .collect(),
        PlanMode::Exhaustive => (0..count)
            .into_par_iter()
            .map(|k| f(&unrank_permutation(k, total)))
            .collect(),
    }
}

fn check_sizes(n: usize, m: usize) -> Result<()> {
    if n < 2 || m < 2 {
        return Err(Error::Input(format!("each group needs at least 2 rows, got n = {n}, m = {m}")));
    }
    Ok(())
}

/// Permutation distribution for pseudo-samples (every method but [`Method::NaiveW`]).
pub fn permutation_distribution(
    p1: &PseudoSample,
    p2: &PseudoSample,
    kind: StatisticKind,
    method: Method,
    plan: &PermutationPlan,
    options: &Thm31Options,
) -> Result<PermDistribution> {
    check_sizes(p1.n(), p2.n())?;
    kind.validate()?;
    let z = pool(p1, p2)?;
    let total = z.total();
    let (observed, values) = match method {
        Method::Thm32 => (
            statistic(kind, p1, p2)?,
            permutation_values(total, plan, |pi| thm32_perm_statistic(&z, pi, kind))?,
        ),
        Method::NaiveZhat => (
            statistic(kind, p1, p2)?,
            permutation_values(total, plan, |pi| naive_perm_statistic(NaiveInput::Pooled(&z), pi, kind))?,
        ),
        Method::Thm31 => {
            let ctx = Thm31Context::with_options(&z, kind, options)?;
            let identity: Vec<usize> = (0..total).collect();
            let observed = StatValue {
                value: ctx.uncorrected(&identity)?,
                kind,
                n: p1.n(),
                m: p2.n(),
                d: p1.d(),
            };
            (observed, permutation_values(total, plan, |pi| ctx.statistic(pi))?)
        }
        Method::NaiveW => {
            return Err(Error::Input(
                "the naive-w method permutes raw observations; call run_test_samples".into(),
            ))
        }
    };
    Ok(PermDistribution {
        values,
        observed,
        plan: *plan,
        method,
    })
}

/// Run a test on two pseudo-samples.
pub fn run_test(
    p1: &PseudoSample,
    p2: &PseudoSample,
    kind: StatisticKind,
    method: Method,
    plan: &PermutationPlan,
    alpha: f64,
) -> Result<TestReport> {
    run_test_with(p1, p2, kind, method, plan, alpha, &Thm31Options::default())
}

/// [`run_test`] with explicit options for the derivative-corrected method.
pub fn run_test_with(
    p1: &PseudoSample,
    p2: &PseudoSample,
    kind: StatisticKind,
    method: Method,
    plan: &PermutationPlan,
    alpha: f64,
    options: &Thm31Options,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    let dist = permutation_distribution(p1, p2, kind, method, plan, options)?;
    dist.report(alpha, p1.has_ties() || p2.has_ties())
}

/// Permutation distribution from raw samples; supports every method.
pub fn sample_distribution(
    x1: &Sample,
    x2: &Sample,
    kind: StatisticKind,
    method: Method,
    plan: &PermutationPlan,
    options: &Thm31Options,
) -> Result<PermDistribution> {
    if x1.d() != x2.d() {
        return Err(Error::DimensionMismatch {
            expected: x1.d(),
            found: x2.d(),
        });
    }
    let (p1, p2) = (pseudo_obs(x1)?, pseudo_obs(x2)?);
    if method != Method::NaiveW {
        return permutation_distribution(&p1, &p2, kind, method, plan, options);
    }
    check_sizes(x1.n(), x2.n())?;
    kind.validate()?;
    let observed = statistic(kind, &p1, &p2)?;
    let total = x1.n() + x2.n();
    let values = permutation_values(total, plan, |pi| naive_perm_statistic(NaiveInput::Raw(x1, x2), pi, kind))?;
    Ok(PermDistribution {
        values,
        observed,
        plan: *plan,
        method,
    })
}

/// Run a test on two raw samples.
pub fn run_test_samples(
    x1: &Sample,
    x2: &Sample,
    kind: StatisticKind,
    method: Method,
    plan: &PermutationPlan,
    alpha: f64,
) -> Result<TestReport> {
    run_test_samples_with(x1, x2, kind, method, plan, alpha, &Thm31Options::default())
}

/// [`run_test_samples`] with explicit options for the derivative-corrected method.
pub fn run_test_samples_with(
    x1: &Sample,
    x2: &Sample,
    kind: StatisticKind,
    method: Method,
    plan: &PermutationPlan,
    alpha: f64,
    options: &Thm31Options,
) -> Result<TestReport> {
    check_alpha(alpha)?;
    let dist = sample_distribution(x1, x2, kind, method, plan, options)?;
    let ties = [x1, x2].iter().any(|x| pseudo_obs(x).map(|p| p.has_ties()).unwrap_or(false));
    dist.report(alpha, ties)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::StatisticKind::{Cvm, Ks};

    fn sample(rows: &[[f64; 2]]) -> Sample {
        Sample::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn data() -> (PseudoSample, PseudoSample) {
        let x = sample(&[[0.1, 0.5], [0.7, 0.2], [0.4, 0.9], [0.3, 0.35], [0.8, 0.6]]);
        let y = sample(&[[0.2, 0.1], [0.5, 0.8], [0.9, 0.3], [0.6, 0.7]]);
        (pseudo_obs(&x).unwrap(), pseudo_obs(&y).unwrap())
    }

    #[test]
    fn identity_permutation_reproduces_observed() {
        let (a, b) = data();
        let z = pool(&a, &b).unwrap();
        let id: Vec<usize> = (0..9).collect();
        for kind in [Cvm, Ks, StatisticKind::GridLp { p: 3.0, resolution: 30 }] {
            let obs = statistic(kind, &a, &b).unwrap().value;
            assert_eq!(thm32_perm_statistic(&z, &id, kind).unwrap(), obs);
            assert_eq!(naive_perm_statistic(NaiveInput::Pooled(&z), &id, kind).unwrap(), obs);
        }
    }

    #[test]
    fn group_swap_with_equal_sizes() {
        let (a, _) = data();
        let x = sample(&[[0.2, 0.1], [0.5, 0.8], [0.9, 0.3], [0.6, 0.7], [0.05, 0.15]]);
        let b = pseudo_obs(&x).unwrap();
        let z = pool(&a, &b).unwrap();
        let swap: Vec<usize> = (5..10).chain(0..5).collect();
        let obs = statistic(Cvm, &a, &b).unwrap().value;
        assert_eq!(thm32_perm_statistic(&z, &swap, Cvm).unwrap(), obs);
    }

    #[test]
    fn thm31_identity_without_correction_matches_grid_difference() {
        let (a, b) = data();
        let z = pool(&a, &b).unwrap();
        let grid = EvalGrid::new(4, 2).unwrap();
        let zeros = DerivativeEstimate::from_values(vec![0.0; 32], grid, 0.1, 9).unwrap();
        let ctx = Thm31Context::new(&z, Cvm, zeros.clone()).unwrap();
        let id: Vec<usize> = (0..9).collect();
        let mut acc = 0.0;
        for i in 0..grid.len() {
            let u = grid.point(i);
            let c1 = crate::ranks::empirical_copula(&a, &u).unwrap();
            let c2 = crate::ranks::empirical_copula(&b, &u).unwrap();
            acc += (c1 - c2).powi(2);
        }
        let expected = (20.0f64 / 9.0).sqrt() * (acc / 16.0).sqrt();
        assert!((ctx.statistic(&id).unwrap() - expected).abs() < 1e-14);
        assert_eq!(ctx.statistic(&id).unwrap(), ctx.uncorrected(&id).unwrap());
        assert_eq!(thm31_perm_statistic(&z, &id, Cvm, &zeros).unwrap(), ctx.statistic(&id).unwrap());
    }

    #[test]
    fn unranking_enumerates_all_permutations() {
        let mut seen: Vec<Vec<usize>> = (0..24).map(|k| unrank_permutation(k, 4)).collect();
        assert_eq!(seen[0], vec![0, 1, 2, 3]);
        assert_eq!(seen[23], vec![3, 2, 1, 0]);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn critical_region_accounting() {
        let values: Vec<f64> = vec![1.0, 2.0, 2.0, 2.0, 3.0, 0.5, 0.1, 2.0, 1.5, 0.2];
        // count 10, alpha 0.2: h = 8, sorted = [.1 .2 .5 1 1.5 2 2 2 2 3] → c = 2
        let r = CriticalRegion::from_values(&values, 0.2).unwrap();
        assert_eq!(r.critical_value, 2.0);
        assert_eq!((r.m_plus, r.m_zero), (1, 4));
        assert!((r.a - 0.25).abs() < 1e-15);
        assert_eq!(r.decide(2.5), Decision::Reject);
        assert_eq!(r.decide(1.9), Decision::Accept);
        assert_eq!(r.decide(2.0), Decision::Randomized);
        assert!(r.m_plus + r.m_zero >= 10 - 8 + 1);
        assert!(CriticalRegion::from_values(&values, 1.0).is_err());
        assert!(CriticalRegion::from_values(&[], 0.1).is_err());
    }

    #[test]
    fn copied_data_accepts_with_unit_p_value() {
        let (a, _) = data();
        let plan = PermutationPlan::monte_carlo(99, 3);
        let r = run_test(&a, &a, Cvm, Method::Thm32, &plan, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.decision, Decision::Accept);
    }

    #[test]
    fn reports_are_deterministic_and_serialize() {
        let (a, b) = data();
        let plan = PermutationPlan::monte_carlo(200, 11);
        for method in [Method::Thm32, Method::Thm31, Method::NaiveZhat] {
            let r1 = run_test(&a, &b, Cvm, method, &plan, 0.1).unwrap();
            let r2 = run_test(&a, &b, Cvm, method, &plan, 0.1).unwrap();
            assert_eq!(r1, r2);
            let json = r1.to_json().unwrap();
            for key in [
                "statistic", "kind", "p_value", "critical_value", "alpha", "decision", "\"a\"", "method", "\"B\"",
                "seed", "\"n\"", "\"m\"", "\"d\"", "tie_warning",
            ] {
                assert!(json.contains(key), "{key} missing from {json}");
            }
            let back: TestReport = serde_json::from_str(&json).unwrap();
            assert_eq!(back, r1);
        }
        assert!(run_test(&a, &b, Cvm, Method::NaiveW, &plan, 0.1).is_err());
    }

    #[test]
    fn input_errors() {
        let (a, b) = data();
        let one = PseudoSample::from_ranks(vec![1, 1], 1, 2, 1).unwrap();
        let plan = PermutationPlan::monte_carlo(10, 0);
        assert!(run_test(&a, &one, Cvm, Method::Thm32, &plan, 0.05).is_err());
        assert!(run_test(&a, &b, Cvm, Method::Thm32, &plan, 0.0).is_err());
        assert!(run_test(&a, &b, Cvm, Method::Thm32, &PermutationPlan::monte_carlo(0, 0), 0.05).is_err());
        assert!(matches!(
            run_test(&a, &b, Cvm, Method::Thm32, &PermutationPlan::exhaustive(0).with_cap(8), 0.05),
            Err(Error::Resource(_))
        ));
        let z = pool(&a, &b).unwrap();
        assert!(thm32_perm_statistic(&z, &[0, 1, 2], Cvm).is_err());
        assert!(thm32_perm_statistic(&z, &[0, 0, 1, 2, 3, 4, 5, 6, 7], Cvm).is_err());
    }

    #[test]
    fn exhaustive_p_value_counts_all_permutations() {
        let x = sample(&[[0.1, 0.5], [0.7, 0.2], [0.4, 0.9]]);
        let y = sample(&[[0.2, 0.1], [0.5, 0.8], [0.9, 0.3]]);
        let (a, b) = (pseudo_obs(&x).unwrap(), pseudo_obs(&y).unwrap());
        let plan = PermutationPlan::exhaustive(0);
        let dist = permutation_distribution(&a, &b, Cvm, Method::Thm32, &plan, &Thm31Options::default()).unwrap();
        assert_eq!(dist.values.len(), 720);
        let k = dist.values.iter().filter(|&&v| v >= dist.observed.value).count();
        assert_eq!(dist.p_value(), k as f64 / 720.0);
        assert!(dist.p_value() >= 1.0 / 720.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!("bootstrap".parse::<Method>().is_err());
    }
}
