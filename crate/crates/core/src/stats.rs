//! Two-sample Cramér–von Mises, Kolmogorov–Smirnov and grid-based `L_p`
//! distances between empirical copulas.
//!
//! All statistics are `sqrt(nm/(n+m)) * ||C1 - C2||_p` for the empirical
//! copulas (or, more generally, empirical distribution functions) of the two
//! point sets. Every intermediate count is an integer, so the results do not
//! depend on row order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ranks::{lcm, PseudoSample};

/// Default bound on `resolution^d` for [`grid_lp_statistic`].
pub const DEFAULT_GRID_CAP: f64 = 1e10;

/// Bound on the number of lattice cells any statistic may allocate.
pub const MAX_CELLS: usize = 50_000_000;

/// Which norm of the empirical copula difference to use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatisticKind {
    /// `p = 2`, closed form.
    Cvm,
    /// `p = ∞` over the index sets of the two rank lattices.
    Ks,
    /// Any `p >= 1` (including `∞`) on a uniform tensor grid with `resolution` points per axis.
    GridLp { p: f64, resolution: usize },
}

impl StatisticKind {
    pub fn validate(&self) -> Result<()> {
        if let StatisticKind::GridLp { p, resolution } = *self {
            if !(p >= 1.0) {
                return Err(Error::Input(format!("L_p exponent {p} must be at least 1")));
            }
            if resolution < 2 {
                return Err(Error::Input(format!("grid resolution {resolution} must be at least 2")));
            }
        }
        Ok(())
    }

    /// The exponent `p` of the norm.
    pub fn exponent(&self) -> f64 {
        match *self {
            StatisticKind::Cvm => 2.0,
            StatisticKind::Ks => f64::INFINITY,
            StatisticKind::GridLp { p, .. } => p,
        }
    }
}

impl fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StatisticKind::Cvm => f.write_str("cvm"),
            StatisticKind::Ks => f.write_str("ks"),
            StatisticKind::GridLp { p, resolution } if p.is_infinite() => write!(f, "lp:inf:{resolution}"),
            StatisticKind::GridLp { p, resolution } => write!(f, "lp:{p}:{resolution}"),
        }
    }
}

impl FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "cvm" => StatisticKind::Cvm,
            "ks" => StatisticKind::Ks,
            other => {
                let parts: Vec<&str> = other.split(':').collect();
                let bad = || Error::Input(format!("unknown statistic `{s}` (expected cvm, ks or lp:<p>:<grid>)"));
                if parts.len() != 3 || parts[0] != "lp" {
                    return Err(bad());
                }
                let p = if parts[1] == "inf" {
                    f64::INFINITY
                } else {
                    parts[1].parse().map_err(|_| bad())?
                };
                let resolution = parts[2].parse().map_err(|_| bad())?;
                StatisticKind::GridLp { p, resolution }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl Serialize for StatisticKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StatisticKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A computed statistic together with the sizes it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatValue {
    pub value: f64,
    pub kind: StatisticKind,
    pub n: usize,
    pub m: usize,
    pub d: usize,
}

fn check_dims(a: &PseudoSample, b: &PseudoSample) -> Result<()> {
    if a.d() != b.d() {
        return Err(Error::DimensionMismatch {
            expected: a.d(),
            found: b.d(),
        });
    }
    Ok(())
}

fn scaling(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (n * m / (n + m)).sqrt()
}

/// Complements `D - v` of all numerators over the common denominator `D`.
fn complements(p: &PseudoSample, common: u64) -> Vec<u64> {
    let f = common / p.scale();
    p.ranks().iter().map(|&r| common - r * f).collect()
}

fn self_sum(c: &[u64], n: usize, d: usize) -> u128 {
    let mut diag: u128 = 0;
    let mut off: u128 = 0;
    for i in 0..n {
        let ri = &c[i * d..(i + 1) * d];
        diag += ri.iter().map(|&x| x as u128).product::<u128>();
        for j in 0..i {
            let rj = &c[j * d..(j + 1) * d];
            off += product_of_mins(ri, rj);
        }
    }
    diag + 2 * off
}

fn cross_sum(a: &[u64], n: usize, b: &[u64], m: usize, d: usize) -> u128 {
    let mut acc: u128 = 0;
    for i in 0..n {
        let ri = &a[i * d..(i + 1) * d];
        for j in 0..m {
            acc += product_of_mins(ri, &b[j * d..(j + 1) * d]);
        }
    }
    acc
}

#[inline]
fn product_of_mins(x: &[u64], y: &[u64]) -> u128 {
    if x.len() == 2 {
        return (x[0].min(y[0]) as u128) * (x[1].min(y[1]) as u128);
    }
    x.iter().zip(y).map(|(&a, &b)| a.min(b) as u128).product()
}

/// Closed-form `L_2` statistic in exact integer arithmetic, when it fits.
///
/// `T² = (m²·AA + n²·BB - 2nm·AB) / ((n+m)·n·m·D^d)` where the sums run over
/// `∏_q min(D - x_q, D - y_q)` and `D` is the common denominator.
fn cvm_exact(a: &PseudoSample, b: &PseudoSample) -> Option<f64> {
    let (n, m, d) = (a.n(), b.n(), a.d());
    let common = lcm(a.scale(), b.scale());
    let bits = 2.0 * (n as f64).log2() + 2.0 * (m as f64).log2() + d as f64 * (common as f64).log2() + 3.0;
    if bits >= 126.0 {
        return None;
    }
    let ca = complements(a, common);
    let cb = complements(b, common);
    let aa = self_sum(&ca, n, d) as i128;
    let bb = self_sum(&cb, m, d) as i128;
    let ab = cross_sum(&ca, n, &cb, m, d) as i128;
    let (ni, mi) = (n as i128, m as i128);
    let num = mi * mi * aa + ni * ni * bb - 2 * ni * mi * ab;
    debug_assert!(num >= 0);
    let denom = (n + m) as f64 * n as f64 * m as f64 * (common as f64).powi(d as i32);
    Some((num.max(0) as f64 / denom).sqrt())
}

/// Floating-point fallback for very large denominators.
fn cvm_float(a: &PseudoSample, b: &PseudoSample) -> f64 {
    let (n, m, d) = (a.n(), b.n(), a.d());
    let va: Vec<f64> = a.values().iter().map(|v| 1.0 - v).collect();
    let vb: Vec<f64> = b.values().iter().map(|v| 1.0 - v).collect();
    let pm = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(p, q)| p.min(*q)).product() };
    let sum = |x: &[f64], nx: usize, y: &[f64], ny: usize| -> f64 {
        let mut s = 0.0;
        for i in 0..nx {
            for j in 0..ny {
                s += pm(&x[i * d..(i + 1) * d], &y[j * d..(j + 1) * d]);
            }
        }
        s
    };
    let (nf, mf) = (n as f64, m as f64);
    let sq = sum(&va, n, &va, n) / (nf * nf) + sum(&vb, m, &vb, m) / (mf * mf) - 2.0 * sum(&va, n, &vb, m) / (nf * mf);
    scaling(n, m) * sq.max(0.0).sqrt()
}

pub(crate) fn cvm_value(a: &PseudoSample, b: &PseudoSample) -> f64 {
    cvm_exact(a, b).unwrap_or_else(|| cvm_float(a, b))
}

/// `counts[k] = #{rows : index[row][q] <= k_q for all q}` over a row-major
/// lattice with axis lengths `dims`. Rows carrying `usize::MAX` are skipped.
pub(crate) fn cumulative_counts(index: &[usize], d: usize, dims: &[usize]) -> Vec<u32> {
    let total: usize = dims.iter().product();
    let mut counts = vec![0u32; total];
    let mut strides = vec![1usize; d];
    for q in (0..d.saturating_sub(1)).rev() {
        strides[q] = strides[q + 1] * dims[q + 1];
    }
    'rows: for row in index.chunks_exact(d) {
        let mut flat = 0;
        for q in 0..d {
            if row[q] >= dims[q] {
                continue 'rows;
            }
            flat += row[q] * strides[q];
        }
        counts[flat] += 1;
    }
    for q in 0..d {
        let (stride, len) = (strides[q], dims[q]);
        for block in counts.chunks_exact_mut(stride * len) {
            for k in 1..len {
                let (done, rest) = block.split_at_mut(k * stride);
                let prev = &done[(k - 1) * stride..];
                for (c, p) in rest[..stride].iter_mut().zip(prev) {
                    *c += *p;
                }
            }
        }
    }
    counts
}

/// Smallest `i` with `r/s <= i/k`.
#[inline]
fn lattice_index(r: u64, s: u64, k: u64) -> usize {
    ((r as u128 * k as u128).div_ceil(s as u128)) as usize
}

fn lattice_counts(p: &PseudoSample, k: usize) -> Vec<u32> {
    let d = p.d();
    let index: Vec<usize> = p
        .ranks()
        .iter()
        .map(|&r| lattice_index(r, p.scale(), k as u64))
        .collect();
    cumulative_counts(&index, d, &vec![k + 1; d])
}

fn check_cells(dims_len: usize, d: usize) -> Result<()> {
    let cells = (dims_len as f64).powi(d as i32);
    if cells > MAX_CELLS as f64 {
        return Err(Error::Resource(format!(
            "lattice with {cells:.0} cells exceeds the limit of {MAX_CELLS}"
        )));
    }
    Ok(())
}

pub(crate) fn ks_value(a: &PseudoSample, b: &PseudoSample) -> Result<f64> {
    let (n, m, d) = (a.n(), b.n(), a.d());
    check_cells(n.max(m) + 1, d)?;
    let ca = lattice_counts(a, n);
    let cb = lattice_counts(b, m);
    // S1: i ∈ {1..n}^d with j_q = ⌊m i_q / n⌋, then S2 with the roles swapped.
    let mut best: u64 = 0;
    for (own, other, own_counts, other_counts, forward) in [(n, m, &ca, &cb, true), (m, n, &cb, &ca, false)] {
        let map: Vec<usize> = (0..=own).map(|i| i * other / own).collect();
        let mut i = vec![1usize; d];
        loop {
            let (mut fi, mut fj) = (0usize, 0usize);
            for &iq in &i {
                fi = fi * (own + 1) + iq;
                fj = fj * (other + 1) + map[iq];
            }
            let (c_own, c_other) = (own_counts[fi] as i64, other_counts[fj] as i64);
            let (a, b) = if forward { (c_own, c_other) } else { (c_other, c_own) };
            best = best.max((a * m as i64 - b * n as i64).unsigned_abs());
            if !advance(&mut i, 1, own) {
                break;
            }
        }
    }
    Ok(scaling(n, m) * best as f64 / (n as f64 * m as f64))
}

/// Odometer increment over `{lo..=hi}^d`; false once it wraps.
fn advance(idx: &mut [usize], lo: usize, hi: usize) -> bool {
    for q in (0..idx.len()).rev() {
        if idx[q] < hi {
            idx[q] += 1;
            return true;
        }
        idx[q] = lo;
    }
    false
}

pub(crate) fn grid_value(a: &PseudoSample, b: &PseudoSample, p: f64, resolution: usize, cap: f64) -> Result<f64> {
    let (n, m, d) = (a.n(), b.n(), a.d());
    let grid_points = (resolution as f64).powi(d as i32);
    if grid_points > cap {
        return Err(Error::Resource(format!(
            "grid of {grid_points:.0} points exceeds the cap of {cap:.0}"
        )));
    }
    let common = lcm(a.scale(), b.scale());
    let (fa, fb) = (common / a.scale(), common / b.scale());
    let res = resolution as u128;
    let big = common as u128;
    // Grid point j (1-based) as a test `v/D <= g_j`.
    let below = |v: u64, j: usize| -> bool {
        if p.is_infinite() {
            v as u128 * res <= j as u128 * big
        } else {
            2 * res * v as u128 <= (2 * j as u128 - 1) * big
        }
    };

    // Per axis: sorted distinct breakpoints, grid weight of each cell, and the
    // 1-based breakpoint position of every row.
    let mut dims = Vec::with_capacity(d);
    let mut weights: Vec<Vec<u64>> = Vec::with_capacity(d);
    let mut pos_a = vec![0usize; n * d];
    let mut pos_b = vec![0usize; m * d];
    for q in 0..d {
        let mut bp: Vec<u64> = (0..n)
            .map(|i| a.ranks()[i * d + q] * fa)
            .chain((0..m).map(|i| b.ranks()[i * d + q] * fb))
            .collect();
        bp.sort_unstable();
        bp.dedup();
        let mut w = vec![0u64; bp.len() + 1];
        for jg in 1..=resolution {
            let k = bp.partition_point(|&v| below(v, jg));
            w[k] += 1;
        }
        for i in 0..n {
            pos_a[i * d + q] = bp.binary_search(&(a.ranks()[i * d + q] * fa)).expect("breakpoint") + 1;
        }
        for i in 0..m {
            pos_b[i * d + q] = bp.binary_search(&(b.ranks()[i * d + q] * fb)).expect("breakpoint") + 1;
        }
        dims.push(bp.len() + 1);
        weights.push(w);
    }
    let cells: f64 = dims.iter().map(|&k| k as f64).product();
    if cells > MAX_CELLS as f64 {
        return Err(Error::Resource(format!(
            "grid evaluation needs {cells:.0} cells, more than {MAX_CELLS}"
        )));
    }
    let ca = cumulative_counts(&pos_a, d, &dims);
    let cb = cumulative_counts(&pos_b, d, &dims);
    let nm = (n * m) as f64;
    let mut acc = 0.0f64;
    let mut idx = vec![0usize; d];
    for flat in 0..ca.len() {
        let mut rem = flat;
        for q in (0..d).rev() {
            idx[q] = rem % dims[q];
            rem /= dims[q];
        }
        let w: f64 = idx.iter().enumerate().map(|(q, &k)| weights[q][k] as f64).product();
        if w == 0.0 {
            continue;
        }
        let diff = (ca[flat] as f64 * m as f64 - cb[flat] as f64 * n as f64).abs() / nm;
        if p.is_infinite() {
            acc = acc.max(diff);
        } else {
            acc += w * diff.powf(p);
        }
    }
    let norm = if p.is_infinite() {
        acc
    } else {
        (acc / grid_points).powf(1.0 / p)
    };
    Ok(scaling(n, m) * norm)
}

/// Cramér–von Mises statistic `T^(2)` via the closed-form double sum.
pub fn cvm_statistic(p1: &PseudoSample, p2: &PseudoSample) -> Result<StatValue> {
    check_dims(p1, p2)?;
    Ok(StatValue {
        value: cvm_value(p1, p2),
        kind: StatisticKind::Cvm,
        n: p1.n(),
        m: p2.n(),
        d: p1.d(),
    })
}

/// Kolmogorov–Smirnov statistic `T^(∞)` over the union of the two rank-lattice index sets.
pub fn ks_statistic(p1: &PseudoSample, p2: &PseudoSample) -> Result<StatValue> {
    check_dims(p1, p2)?;
    Ok(StatValue {
        value: ks_value(p1, p2)?,
        kind: StatisticKind::Ks,
        n: p1.n(),
        m: p2.n(),
        d: p1.d(),
    })
}

/// `L_p` statistic approximated on a uniform grid.
///
/// For finite `p` the grid holds the cell midpoints `(2j-1)/(2r)`; for
/// `p = ∞` it holds `j/r`, so a resolution that is a multiple of the sample
/// sizes contains every jump point. The grid mean of the step-function
/// integrand is evaluated exactly by collapsing grid points that fall between
/// the same pair of data breakpoints.
pub fn grid_lp_statistic(p1: &PseudoSample, p2: &PseudoSample, p: f64, resolution: usize) -> Result<StatValue> {
    grid_lp_statistic_capped(p1, p2, p, resolution, DEFAULT_GRID_CAP)
}

/// [`grid_lp_statistic`] with an explicit bound on `resolution^d`.
pub fn grid_lp_statistic_capped(
    p1: &PseudoSample,
    p2: &PseudoSample,
    p: f64,
    resolution: usize,
    cap: f64,
) -> Result<StatValue> {
    check_dims(p1, p2)?;
    let kind = StatisticKind::GridLp { p, resolution };
    kind.validate()?;
    Ok(StatValue {
        value: grid_value(p1, p2, p, resolution, cap)?,
        kind,
        n: p1.n(),
        m: p2.n(),
        d: p1.d(),
    })
}

/// Dispatch on `kind`.
pub fn statistic(kind: StatisticKind, p1: &PseudoSample, p2: &PseudoSample) -> Result<StatValue> {
    match kind {
        StatisticKind::Cvm => cvm_statistic(p1, p2),
        StatisticKind::Ks => ks_statistic(p1, p2),
        StatisticKind::GridLp { p, resolution } => grid_lp_statistic(p1, p2, p, resolution),
    }
}

/// Statistic value only; used in permutation loops.
pub(crate) fn statistic_value(kind: StatisticKind, p1: &PseudoSample, p2: &PseudoSample) -> Result<f64> {
    match kind {
        StatisticKind::Cvm => Ok(cvm_value(p1, p2)),
        StatisticKind::Ks => ks_value(p1, p2),
        StatisticKind::GridLp { p, resolution } => grid_value(p1, p2, p, resolution, DEFAULT_GRID_CAP),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranks::{empirical_copula, pseudo_obs, Sample};

    fn ps(rows: &[&[u64]], scale: u64) -> PseudoSample {
        let d = rows[0].len();
        PseudoSample::from_ranks(rows.concat(), rows.len(), d, scale).unwrap()
    }

    #[test]
    fn identical_samples_give_zero() {
        let p = ps(&[&[1, 3], &[2, 1], &[3, 2]], 3);
        assert_eq!(cvm_statistic(&p, &p).unwrap().value, 0.0);
        assert_eq!(ks_statistic(&p, &p).unwrap().value, 0.0);
        assert_eq!(grid_lp_statistic(&p, &p, 1.5, 50).unwrap().value, 0.0);
        let one = ps(&[&[1, 1]], 1);
        assert_eq!(cvm_statistic(&one, &one).unwrap().value, 0.0);
    }

    #[test]
    fn indicator_integral_identity() {
        // ∫₀¹ 1(a <= u) 1(b <= u) du = 1 - max(a, b) = min(1 - a, 1 - b)
        for &(a, b) in &[(0.2, 0.7), (0.5, 0.5), (0.9, 0.1), (1.0, 0.3)] {
            let k = 200_000;
            let numeric = (0..k)
                .map(|j| (j as f64 + 0.5) / k as f64)
                .filter(|&u| a <= u && b <= u)
                .count() as f64
                / k as f64;
            let closed: f64 = f64::min(1.0 - a, 1.0 - b);
            assert!((numeric - closed).abs() < 1e-5);
        }
    }

    #[test]
    fn cvm_two_by_two_against_grid() {
        let a = ps(&[&[1, 1], &[2, 2]], 2);
        let b = ps(&[&[1, 2], &[2, 1]], 2);
        let cvm = cvm_statistic(&a, &b).unwrap().value;
        let grid = grid_lp_statistic(&a, &b, 2.0, 2000).unwrap().value;
        assert!((cvm - grid).abs() < 1e-3, "{cvm} vs {grid}");
        // Exact value: difference 1/2 on [1/2,1)^2 → sqrt(1 * 1/4 * 1/4) = 1/4
        assert!((cvm - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ks_equal_sizes_uses_common_lattice() {
        let a = ps(&[&[1, 1], &[2, 2]], 2);
        let b = ps(&[&[1, 2], &[2, 1]], 2);
        // max |C1 - C2| on {1/2, 1}^2 is at (1/2, 1/2): 1/2 - 0
        assert!((ks_statistic(&a, &b).unwrap().value - 0.5).abs() < 1e-15);
        let grid = grid_lp_statistic(&a, &b, f64::INFINITY, 4).unwrap().value;
        assert_eq!(grid, ks_statistic(&a, &b).unwrap().value);
    }

    #[test]
    fn ks_matches_brute_force_over_printed_sets() {
        let a = ps(&[&[2, 1], &[1, 2]], 2);
        let b = ps(&[&[3, 1], &[1, 3], &[2, 2]], 3);
        let (n, m) = (2usize, 3usize);
        let mut best: f64 = 0.0;
        for i1 in 1..=n {
            for i2 in 1..=n {
                let (j1, j2) = (i1 * m / n, i2 * m / n);
                let c1 = empirical_copula(&a, &[i1 as f64 / n as f64, i2 as f64 / n as f64]).unwrap();
                let c2 = empirical_copula(&b, &[j1 as f64 / m as f64, j2 as f64 / m as f64]).unwrap();
                best = best.max((c1 - c2).abs());
            }
        }
        for j1 in 1..=m {
            for j2 in 1..=m {
                let (i1, i2) = (j1 * n / m, j2 * n / m);
                let c1 = empirical_copula(&a, &[i1 as f64 / n as f64, i2 as f64 / n as f64]).unwrap();
                let c2 = empirical_copula(&b, &[j1 as f64 / m as f64, j2 as f64 / m as f64]).unwrap();
                best = best.max((c1 - c2).abs());
            }
        }
        let expected = (6.0f64 / 5.0).sqrt() * best;
        assert!((ks_statistic(&a, &b).unwrap().value - expected).abs() < 1e-12);
    }

    #[test]
    fn statistics_are_row_order_invariant_and_symmetric() {
        let x = Sample::from_rows(&[vec![0.3, 0.1], vec![0.2, 0.9], vec![0.8, 0.4], vec![0.5, 0.6]]).unwrap();
        let y = Sample::from_rows(&[vec![0.1, 0.2], vec![0.7, 0.3], vec![0.4, 0.8], vec![0.9, 0.5]]).unwrap();
        let (a, b) = (pseudo_obs(&x).unwrap(), pseudo_obs(&y).unwrap());
        let a2 = pseudo_obs(&x.permute_rows(&[2, 0, 3, 1])).unwrap();
        for kind in [StatisticKind::Cvm, StatisticKind::Ks, StatisticKind::GridLp { p: 3.0, resolution: 40 }] {
            let v = statistic(kind, &a, &b).unwrap().value;
            assert_eq!(v, statistic(kind, &a2, &b).unwrap().value);
            assert_eq!(v, statistic(kind, &b, &a).unwrap().value);
        }
    }

    #[test]
    fn errors() {
        let a = ps(&[&[1, 1]], 1);
        let b = ps(&[&[1, 1, 1]], 1);
        assert!(matches!(cvm_statistic(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(grid_lp_statistic(&a, &a, 0.5, 10).is_err());
        assert!(grid_lp_statistic(&a, &a, 2.0, 1).is_err());
        assert!(matches!(
            grid_lp_statistic_capped(&a, &a, 2.0, 1000, 1e5),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("cvm".parse::<StatisticKind>().unwrap(), StatisticKind::Cvm);
        assert_eq!(
            "lp:inf:30".parse::<StatisticKind>().unwrap(),
            StatisticKind::GridLp { p: f64::INFINITY, resolution: 30 }
        );
        let k: StatisticKind = "lp:3:100".parse().unwrap();
        assert_eq!(k.to_string(), "lp:3:100");
        assert!("lp:0.5:10".parse::<StatisticKind>().is_err());
        assert!("wasserstein".parse::<StatisticKind>().is_err());
    }

    #[test]
    fn float_fallback_agrees_with_exact() {
        let x = Sample::from_rows(&[vec![0.3, 0.1], vec![0.2, 0.9], vec![0.8, 0.4]]).unwrap();
        let y = Sample::from_rows(&[vec![0.1, 0.2], vec![0.7, 0.3], vec![0.4, 0.8], vec![0.9, 0.5]]).unwrap();
        let (a, b) = (pseudo_obs(&x).unwrap(), pseudo_obs(&y).unwrap());
        assert!((cvm_exact(&a, &b).unwrap() - cvm_float(&a, &b)).abs() < 1e-14);
    }
}
