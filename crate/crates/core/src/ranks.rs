//! Raw samples, pseudo-observations and empirical copulas.
//!
//! Pseudo-observations are stored exactly, as integer numerators over a common
//! denominator (`scale`). Re-ranking, pooling and every statistic then work in
//! integer arithmetic, which makes them independent of row order and keeps
//! ties between permutation statistics exact.

use crate::error::{Error, Result};

/// An `n × d` matrix of finite observations for one group (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl Sample {
    pub fn new(data: Vec<f64>, n: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Input(format!("a sample needs at least 2 columns, got {d}")));
        }
        if n < 1 {
            return Err(Error::Input("a sample needs at least one row".into()));
        }
        if data.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value {} at row {}, column {}",
                data[pos],
                pos / d + 1,
                pos % d + 1
            )));
        }
        Ok(Sample { data, n, d })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        Self::new(rows.concat(), rows.len(), d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn column(&self, q: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.d + q]).collect()
    }

    /// Apply `f(column, value)` to every entry.
    pub fn map_columns(&self, f: impl Fn(usize, f64) -> f64) -> Result<Sample> {
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(k, &x)| f(k % self.d, x))
            .collect();
        Sample::new(data, self.n, self.d)
    }

    /// Keep the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Sample> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.d) {
            return Err(Error::Input(format!(
                "column {} out of range (sample has {} columns)",
                bad + 1,
                self.d
            )));
        }
        let mut data = Vec::with_capacity(self.n * cols.len());
        for i in 0..self.n {
            data.extend(cols.iter().map(|&c| self.data[i * self.d + c]));
        }
        Sample::new(data, self.n, cols.len())
    }

    /// Stack `self` on top of `other`.
    pub fn stack(&self, other: &Sample) -> Result<Sample> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: other.d,
            });
        }
        Sample::new([self.data.as_slice(), other.data.as_slice()].concat(), self.n + other.n, self.d)
    }

    /// Rows `pi[0], pi[1], …` of `self`.
    pub fn permute_rows(&self, pi: &[usize]) -> Sample {
        let mut data = Vec::with_capacity(self.data.len());
        for &i in pi {
            data.extend_from_slice(self.row(i));
        }
        Sample {
            data,
            n: pi.len(),
            d: self.d,
        }
    }

    /// Rows `start..end`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Sample {
        Sample {
            data: self.data[start * self.d..end * self.d].to_vec(),
            n: end - start,
            d: self.d,
        }
    }
}

/// An `n × d` matrix of values in `(0, 1]`, each `rank / scale` exactly.
///
/// Built by [`pseudo_obs`], each column holds normalized max-ranks
/// `#{i' : x[i', q] <= x[i, q]} / n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoSample {
    ranks: Vec<u64>,
    n: usize,
    d: usize,
    scale: u64,
    ties: bool,
}

impl PseudoSample {
    /// Build from raw numerators; every entry must lie in `1..=scale`.
    pub fn from_ranks(ranks: Vec<u64>, n: usize, d: usize, scale: u64) -> Result<Self> {
        if ranks.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: ranks.len(),
            });
        }
        if n == 0 || d == 0 || scale == 0 {
            return Err(Error::Input("empty pseudo-sample".into()));
        }
        if let Some(&bad) = ranks.iter().find(|&&r| r == 0 || r > scale) {
            return Err(Error::Data(format!("rank {bad} outside 1..={scale}")));
        }
        let ties = (0..d).any(|q| column_has_ties(&ranks, n, d, q));
        Ok(PseudoSample {
            ranks,
            n,
            d,
            scale,
            ties,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    /// Raw numerators, row-major.
    pub fn ranks(&self) -> &[u64] {
        &self.ranks
    }

    pub fn value(&self, i: usize, q: usize) -> f64 {
        self.ranks[i * self.d + q] as f64 / self.scale as f64
    }

    /// Values as a row-major `f64` matrix.
    pub fn values(&self) -> Vec<f64> {
        let s = self.scale as f64;
        self.ranks.iter().map(|&r| r as f64 / s).collect()
    }

    pub fn column(&self, q: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i, q)).collect()
    }

    /// Whether some column contains repeated values.
    pub fn has_ties(&self) -> bool {
        self.ties
    }
}

fn column_has_ties(ranks: &[u64], n: usize, d: usize, q: usize) -> bool {
    let mut col: Vec<u64> = (0..n).map(|i| ranks[i * d + q]).collect();
    col.sort_unstable();
    col.windows(2).any(|w| w[0] == w[1])
}

/// Max-rank of every entry of one column: `#{j : v[j] <= v[i]}`.
fn max_ranks<T: PartialOrd + Copy>(values: &[T], out: &mut [u64]) {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("comparable values"));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        for &k in &idx[start..end] {
            out[k] = end as u64;
        }
        start = end;
    }
}

fn rank_matrix<T: PartialOrd + Copy>(get: impl Fn(usize, usize) -> T, n: usize, d: usize) -> (Vec<u64>, bool) {
    let mut ranks = vec![0u64; n * d];
    let mut col = Vec::with_capacity(n);
    let mut out = vec![0u64; n];
    let mut ties = false;
    for q in 0..d {
        col.clear();
        col.extend((0..n).map(|i| get(i, q)));
        max_ranks(&col, &mut out);
        let mut seen = vec![false; n + 1];
        for (i, &r) in out.iter().enumerate() {
            ranks[i * d + q] = r;
            let slot = &mut seen[r as usize];
            ties |= *slot;
            *slot = true;
        }
    }
    (ranks, ties)
}

/// Normalized max-ranks of every column.
pub fn pseudo_obs(x: &Sample) -> Result<PseudoSample> {
    if let Some(pos) = x.data.iter().position(|v| v.is_nan()) {
        return Err(Error::Data(format!("NaN at row {}, column {}", pos / x.d + 1, pos % x.d + 1)));
    }
    let (ranks, ties) = rank_matrix(|i, q| x.data[i * x.d + q], x.n, x.d);
    Ok(PseudoSample {
        ranks,
        n: x.n,
        d: x.d,
        scale: x.n as u64,
        ties,
    })
}

/// Re-rank the rows of a pseudo-sample among themselves.
pub fn rerank(p: &PseudoSample) -> PseudoSample {
    let (ranks, ties) = rank_matrix(|i, q| p.ranks[i * p.d + q], p.n, p.d);
    PseudoSample {
        ranks,
        n: p.n,
        d: p.d,
        scale: p.n as u64,
        ties,
    }
}

/// Fraction of rows that are componentwise `<= u`.
pub fn empirical_copula(p: &PseudoSample, u: &[f64]) -> Result<f64> {
    if u.len() != p.d {
        return Err(Error::DimensionMismatch {
            expected: p.d,
            found: u.len(),
        });
    }
    if let Some(bad) = u.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("evaluation point {bad} outside [0, 1]")));
    }
    let s = p.scale as f64;
    let count = p
        .ranks
        .chunks_exact(p.d)
        .filter(|row| row.iter().zip(u).all(|(&r, &uq)| r as f64 / s <= uq))
        .count();
    Ok(count as f64 / p.n as f64)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// The stacked pseudo-sample of both groups, first `n` rows from group one.
///
/// Values are held as numerators over `lcm(scale1, scale2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PooledPseudo {
    num: Vec<u64>,
    n: usize,
    m: usize,
    d: usize,
    scale: u64,
    scale1: u64,
    scale2: u64,
}

/// Stack two pseudo-samples.
pub fn pool(p1: &PseudoSample, p2: &PseudoSample) -> Result<PooledPseudo> {
    if p1.d != p2.d {
        return Err(Error::DimensionMismatch {
            expected: p1.d,
            found: p2.d,
        });
    }
    let scale = lcm(p1.scale, p2.scale);
    let (f1, f2) = (scale / p1.scale, scale / p2.scale);
    let mut num = Vec::with_capacity(p1.ranks.len() + p2.ranks.len());
    num.extend(p1.ranks.iter().map(|&r| r * f1));
    num.extend(p2.ranks.iter().map(|&r| r * f2));
    Ok(PooledPseudo {
        num,
        n: p1.n,
        m: p2.n,
        d: p1.d,
        scale,
        scale1: p1.scale,
        scale2: p2.scale,
    })
}

impl PooledPseudo {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `N = n + m`.
    pub fn total(&self) -> usize {
        self.n + self.m
    }

    /// `n / N`.
    pub fn lambda(&self) -> f64 {
        self.n as f64 / self.total() as f64
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn numerators(&self) -> &[u64] {
        &self.num
    }

    pub fn value(&self, i: usize, q: usize) -> f64 {
        self.num[i * self.d + q] as f64 / self.scale as f64
    }

    /// Recover the two input pseudo-samples exactly.
    pub fn split(&self) -> (PseudoSample, PseudoSample) {
        let cut = self.n * self.d;
        let (f1, f2) = (self.scale / self.scale1, self.scale / self.scale2);
        let a = self.num[..cut].iter().map(|&v| v / f1).collect();
        let b = self.num[cut..].iter().map(|&v| v / f2).collect();
        (
            PseudoSample::from_ranks(a, self.n, self.d, self.scale1).expect("valid split"),
            PseudoSample::from_ranks(b, self.m, self.d, self.scale2).expect("valid split"),
        )
    }

    /// Row `pi[k]` becomes row `k`.
    pub fn permuted(&self, pi: &[usize]) -> Result<PooledPseudo> {
        check_permutation(pi, self.total())?;
        let mut num = Vec::with_capacity(self.num.len());
        for &i in pi {
            num.extend_from_slice(&self.num[i * self.d..(i + 1) * self.d]);
        }
        Ok(PooledPseudo {
            num,
            scale1: self.scale,
            scale2: self.scale,
            ..*self
        })
    }

    /// The two blocks without re-ranking, both over the pooled scale.
    pub fn raw_blocks(&self) -> (PseudoSample, PseudoSample) {
        let cut = self.n * self.d;
        (
            PseudoSample::from_ranks(self.num[..cut].to_vec(), self.n, self.d, self.scale).expect("valid block"),
            PseudoSample::from_ranks(self.num[cut..].to_vec(), self.m, self.d, self.scale).expect("valid block"),
        )
    }

    /// Pseudo-observations of all `N` rows taken together.
    pub fn rerank_all(&self) -> PseudoSample {
        let (ranks, ties) = rank_matrix(|i, q| self.num[i * self.d + q], self.total(), self.d);
        PseudoSample {
            ranks,
            n: self.total(),
            d: self.d,
            scale: self.total() as u64,
            ties,
        }
    }
}

pub(crate) fn check_permutation(pi: &[usize], total: usize) -> Result<()> {
    if pi.len() != total {
        return Err(Error::Input(format!("permutation of length {} for {total} rows", pi.len())));
    }
    let mut seen = vec![false; total];
    for &i in pi {
        if i >= total || seen[i] {
            return Err(Error::Input(format!("invalid permutation entry {i}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Pseudo-observations of rows `1..n` and `n+1..N` computed separately.
pub fn rerank_groups(z: &PooledPseudo) -> (PseudoSample, PseudoSample) {
    let (d, n, m) = (z.d, z.n, z.m);
    let cut = n * d;
    let (a, ta) = rank_matrix(|i, q| z.num[i * d + q], n, d);
    let (b, tb) = rank_matrix(|i, q| z.num[cut + i * d + q], m, d);
    (
        PseudoSample {
            ranks: a,
            n,
            d,
            scale: n as u64,
            ties: ta,
        },
        PseudoSample {
            ranks: b,
            n: m,
            d,
            scale: m as u64,
            ties: tb,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(p: &PseudoSample, q: usize) -> Vec<f64> {
        p.column(q)
    }

    #[test]
    fn ranks_of_a_column() {
        let x = Sample::from_rows(&[vec![3.0, 0.0], vec![1.0, 0.0], vec![2.0, 1.0]]).unwrap();
        let p = pseudo_obs(&x).unwrap();
        assert_eq!(col(&p, 0), vec![1.0, 1.0 / 3.0, 2.0 / 3.0]);
        // tie in the second column → max-rank convention
        assert_eq!(col(&p, 1), vec![2.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert!(p.has_ties());
    }

    #[test]
    fn nan_and_shape_errors() {
        assert!(matches!(Sample::new(vec![1.0, f64::NAN], 1, 2), Err(Error::Data(_))));
        assert!(Sample::new(vec![1.0, 2.0], 2, 1).is_err());
        assert!(Sample::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
    }

    #[test]
    fn empirical_copula_counts() {
        let p = PseudoSample::from_ranks(vec![1, 2, 2, 1], 2, 2, 2).unwrap();
        assert_eq!(empirical_copula(&p, &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(empirical_copula(&p, &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(empirical_copula(&p, &[0.5, 1.0]).unwrap(), 0.5);
        assert!(empirical_copula(&p, &[0.5]).is_err());
        assert!(empirical_copula(&p, &[0.5, 1.1]).is_err());
    }

    #[test]
    fn pooling_and_splitting() {
        let ones = PseudoSample::from_ranks(vec![1, 1], 1, 2, 1).unwrap();
        let z = pool(&ones, &ones).unwrap();
        assert_eq!(z.total(), 2);
        assert!((0..2).all(|i| z.value(i, 0) == 1.0 && z.value(i, 1) == 1.0));

        let p1 = pseudo_obs(&Sample::from_rows(&[vec![0.1, 0.5], vec![0.4, 0.2]]).unwrap()).unwrap();
        let p2 = pseudo_obs(
            &Sample::from_rows(&[vec![1.0, 3.0], vec![2.0, 1.0], vec![3.0, 2.0]]).unwrap(),
        )
        .unwrap();
        let z = pool(&p1, &p2).unwrap();
        assert_eq!(z.total(), 5);
        assert!((z.lambda() - 0.4).abs() < 1e-15);
        assert_eq!(z.split(), (p1.clone(), p2.clone()));
        assert_eq!(rerank_groups(&z), (p1, p2));
    }

    #[test]
    fn rerank_after_a_swap() {
        // group one {(1/2,1/2),(1,1)}, group two {(1/2,1),(1,1/2)}
        let p1 = PseudoSample::from_ranks(vec![1, 1, 2, 2], 2, 2, 2).unwrap();
        let p2 = PseudoSample::from_ranks(vec![1, 2, 2, 1], 2, 2, 2).unwrap();
        let z = pool(&p1, &p2).unwrap();
        // swap row 1 (1,1) with row 2 (1/2,1)
        let zp = z.permuted(&[0, 2, 1, 3]).unwrap();
        let (a, b) = rerank_groups(&zp);
        // group one now {(1/2,1/2),(1/2,1)} → x ranks tie at 2/2, y ranks 1/2, 1
        assert_eq!(a.ranks(), &[2, 1, 2, 2]);
        // group two {(1,1),(1,1/2)} → x tie, y ranks 2, 1
        assert_eq!(b.ranks(), &[2, 2, 2, 1]);
        assert!(z.permuted(&[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn rerank_is_idempotent() {
        let x = Sample::from_rows(&[vec![0.3, 0.1], vec![0.2, 0.9], vec![0.8, 0.4], vec![0.5, 0.6]]).unwrap();
        let p = pseudo_obs(&x).unwrap();
        let z = pool(&p, &p).unwrap().permuted(&[0, 5, 2, 7, 4, 1, 6, 3]).unwrap();
        let (a, b) = rerank_groups(&z);
        let (a2, b2) = rerank_groups(&pool(&a, &b).unwrap());
        assert_eq!((a, b), (a2, b2));
    }

    #[test]
    fn column_helpers() {
        let x = Sample::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let y = x.select_columns(&[2, 0]).unwrap();
        assert_eq!(y.data(), &[3.0, 1.0, 6.0, 4.0]);
        assert!(x.select_columns(&[3]).is_err());
        let s = x.stack(&x).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.permute_rows(&[3, 0, 1, 2]).row(0), &[4.0, 5.0, 6.0]);
    }
}
