//! Kendall's τ, exceedance Kendall's τ and Pearson correlation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ranks::PseudoSample;

/// Exceedance levels used by default in sweeps.
pub const DEFAULT_LEVELS: [f64; 7] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];

/// Pair counts behind Kendall's τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    /// Pairs tied in at least one coordinate.
    pub tied: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.concordant + self.discordant + self.tied
    }

    pub fn tau(&self) -> f64 {
        (self.concordant as f64 - self.discordant as f64) / self.total() as f64
    }
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Input(format!("need at least 2 observations, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Data("NaN in input".into()));
    }
    Ok(())
}

/// O(n²) pair enumeration.
pub fn concordance_counts(x: &[f64], y: &[f64]) -> Result<PairCounts> {
    check_pair(x, y)?;
    let mut c = PairCounts {
        concordant: 0,
        discordant: 0,
        tied: 0,
    };
    for i in 0..x.len() {
        for j in 0..i {
            let s = (x[i] - x[j]) * (y[i] - y[j]);
            if x[i] == x[j] || y[i] == y[j] {
                c.tied += 1;
            } else if s > 0.0 {
                c.concordant += 1;
            } else {
                c.discordant += 1;
            }
        }
    }
    Ok(c)
}

/// Kendall's τ by direct pair enumeration; ties count as neither concordant nor discordant.
pub fn kendall_tau_naive(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(concordance_counts(x, y)?.tau())
}

/// Number of pairs `(a, b)`, `a < b`, in runs of equal consecutive keys.
fn tied_pairs<T: PartialEq>(keys: impl Iterator<Item = T>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut last: Option<T> = None;
    for k in keys {
        if last.as_ref() == Some(&k) {
            run += 1;
        } else {
            total += run * (run.saturating_sub(1)) / 2;
            run = 1;
            last = Some(k);
        }
    }
    total + run * run.saturating_sub(1) / 2
}

/// Merge sort of `v` counting inversions (pairs out of order, strictly).
fn sort_counting_swaps(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut v[..mid], &mut buf[..mid]) + sort_counting_swaps(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..n].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's τ in O(n log n) (Knight's algorithm), same convention as [`kendall_tau_naive`].
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as u64;
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_unstable_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
    let key = |v: f64| (v + 0.0).to_bits();
    let tied_x = tied_pairs(idx.iter().map(|&i| key(x[i])));
    let tied_xy = tied_pairs(idx.iter().map(|&i| (key(x[i]), key(y[i]))));
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; ys.len()];
    let swaps = sort_counting_swaps(&mut ys, &mut buf);
    let tied_y = tied_pairs(ys.iter().map(|&v| key(v)));
    let pairs = n * (n - 1) / 2;
    // Pairs untied in both coordinates split into concordant and discordant;
    // the discordant ones are exactly the strict inversions of y after sorting by x.
    let untied = pairs + tied_xy - tied_x - tied_y;
    let concordant_minus_discordant = untied as i64 - 2 * swaps as i64;
    Ok(concordant_minus_discordant as f64 / pairs as f64)
}

/// Sample Pearson correlation.
pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Data("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Kendall's τ within the lower and upper joint tails at level `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceTau {
    pub c: f64,
    /// τ among rows with both coordinates below `c`; `None` with fewer than 2 rows.
    pub lower: Option<f64>,
    /// τ among rows with both coordinates above `1 - c`.
    pub upper: Option<f64>,
    pub n_lower: usize,
    pub n_upper: usize,
}

fn subset_tau(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() < 2 {
        return Ok(None);
    }
    kendall_tau(x, y).map(Some)
}

/// Exceedance Kendall's τ of a bivariate pseudo-sample.
pub fn exceedance_tau(p: &PseudoSample, c: f64) -> Result<ExceedanceTau> {
    if p.d() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: p.d(),
        });
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("exceedance level {c} outside (0, 1)")));
    }
    let (u, v) = (p.column(0), p.column(1));
    let (mut lx, mut ly, mut ux, mut uy) = (vec![], vec![], vec![], vec![]);
    for (&a, &b) in u.iter().zip(&v) {
        if a < c && b < c {
            lx.push(a);
            ly.push(b);
        }
        if a > 1.0 - c && b > 1.0 - c {
            ux.push(a);
            uy.push(b);
        }
    }
    Ok(ExceedanceTau {
        c,
        lower: subset_tau(&lx, &ly)?,
        upper: subset_tau(&ux, &uy)?,
        n_lower: lx.len(),
        n_upper: ux.len(),
    })
}

/// Exceedance τ at every level.
pub fn exceedance_sweep(p: &PseudoSample, levels: &[f64]) -> Result<Vec<ExceedanceTau>> {
    levels.iter().map(|&c| exceedance_tau(p, c)).collect()
}

/// Header of exceedance CSV files.
pub const EXCEEDANCE_HEADER: [&str; 5] = ["c", "tau_lower", "tau_upper", "n_lower", "n_upper"];

/// Write a sweep as CSV; undefined values are written as `NA`.
pub fn write_exceedance_csv<W: Write>(rows: &[ExceedanceTau], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EXCEEDANCE_HEADER)?;
    let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |t| t.to_string());
    for r in rows {
        w.write_record([r.c.to_string(), opt(r.lower), opt(r.upper), r.n_lower.to_string(), r.n_upper.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
