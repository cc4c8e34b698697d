//! Finite-difference estimates of the partial derivatives `∂_q C` of a copula
//! from the empirical copula of a pseudo-sample.

use crate::error::{Error, Result};
use crate::ranks::{PooledPseudo, PseudoSample};

/// Step size of the central difference as a function of the sample size `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// `h = N^(-exponent)`.
    Power(f64),
    /// A fixed `h`.
    Fixed(f64),
}

/// `h = N^(-1/5)`, the rate that balances the `O(h²)` bias of a central
/// difference against its `O(1/(Nh))` variance.
impl Default for Bandwidth {
    fn default() -> Self {
        Bandwidth::Power(0.2)
    }
}

impl Bandwidth {
    pub fn step(&self, size: usize) -> Result<f64> {
        let h = match *self {
            Bandwidth::Power(e) => (size as f64).powf(-e),
            Bandwidth::Fixed(h) => h,
        };
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::ParameterDomain(format!("bandwidth {h} must be positive")));
        }
        Ok(h)
    }
}

/// Central-difference estimator over the empirical copula of one pseudo-sample.
#[derive(Debug, Clone)]
pub struct PartialEstimator {
    sample: PseudoSample,
    h: f64,
}

impl PartialEstimator {
    /// Estimator for the common copula of a pooled sample, after re-ranking
    /// all `N` rows together.
    pub fn pooled(z: &PooledPseudo, bandwidth: Bandwidth) -> Result<Self> {
        Self::from_sample(z.rerank_all(), bandwidth)
    }

    pub fn from_sample(sample: PseudoSample, bandwidth: Bandwidth) -> Result<Self> {
        let h = bandwidth.step(sample.n())?;
        Ok(PartialEstimator { sample, h })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn source_size(&self) -> usize {
        self.sample.n()
    }

    fn ecdf(&self, u: &[f64]) -> f64 {
        let s = self.sample.scale() as f64;
        let d = self.sample.d();
        let count = self
            .sample
            .ranks()
            .chunks_exact(d)
            .filter(|row| row.iter().zip(u).all(|(&r, &uq)| r as f64 / s <= uq))
            .count();
        count as f64 / self.sample.n() as f64
    }

    /// Estimate of `∂_q C(u)` (0-based `q`), clipped to `[0, 1]`.
    pub fn at(&self, q: usize, u: &[f64]) -> Result<f64> {
        let d = self.sample.d();
        if u.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: u.len() });
        }
        if q >= d {
            return Err(Error::Domain(format!("coordinate {} outside 1..={d}", q + 1)));
        }
        if let Some(bad) = u.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain(format!("evaluation point {bad} outside [0, 1]")));
        }
        let lo = (u[q] - self.h).max(0.0);
        let hi = (u[q] + self.h).min(1.0);
        let mut point = u.to_vec();
        point[q] = hi;
        let upper = self.ecdf(&point);
        point[q] = lo;
        let lower = self.ecdf(&point);
        Ok(((upper - lower) / (hi - lo)).clamp(0.0, 1.0))
    }
}

/// Estimate `∂_q C(u)` from the re-ranked pooled sample (`q` is 0-based).
pub fn estimate_partial(z: &PooledPseudo, q: usize, u: &[f64], bandwidth: Bandwidth) -> Result<f64> {
    PartialEstimator::pooled(z, bandwidth)?.at(q, u)
}

/// The interior lattice `{1/(G+1), …, G/(G+1)}^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalGrid {
    pub resolution: usize,
    pub d: usize,
}

impl EvalGrid {
    pub fn new(resolution: usize, d: usize) -> Result<Self> {
        if resolution == 0 || d == 0 {
            return Err(Error::Input("evaluation grid needs at least one point per axis".into()));
        }
        let size = (resolution as f64).powi(d as i32);
        if size > crate::stats::MAX_CELLS as f64 {
            return Err(Error::Resource(format!("evaluation grid of {size:.0} points is too large")));
        }
        Ok(EvalGrid { resolution, d })
    }

    /// About 400 points in total: 20 per axis for `d = 2`, 7 for `d = 3`, 4 for `d = 4`.
    pub fn default_for(d: usize) -> Self {
        let resolution = (400f64.powf(1.0 / d as f64).round() as usize).max(2);
        EvalGrid { resolution, d }
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis value of 0-based index `k`.
    pub fn axis(&self, k: usize) -> f64 {
        (k + 1) as f64 / (self.resolution + 1) as f64
    }

    /// Per-axis indices of point `i` (row-major, last axis fastest).
    pub fn indices(&self, mut i: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for q in (0..self.d).rev() {
            idx[q] = i % self.resolution;
            i /= self.resolution;
        }
        idx
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.indices(i).into_iter().map(|k| self.axis(k)).collect()
    }
}

/// `∂̂_q C` tabulated on an [`EvalGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeEstimate {
    values: Vec<f64>,
    grid: EvalGrid,
    bandwidth: f64,
    source_size: usize,
}

impl DerivativeEstimate {
    pub fn on_grid(estimator: &PartialEstimator, grid: EvalGrid) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * grid.d);
        for i in 0..grid.len() {
            let u = grid.point(i);
            for q in 0..grid.d {
                values.push(estimator.at(q, &u)?);
            }
        }
        Ok(DerivativeEstimate {
            values,
            grid,
            bandwidth: estimator.bandwidth(),
            source_size: estimator.source_size(),
        })
    }

    /// A table of given values, point-major with `d` entries per grid point.
    pub fn from_values(values: Vec<f64>, grid: EvalGrid, bandwidth: f64, source_size: usize) -> Result<Self> {
        if values.len() != grid.len() * grid.d {
            return Err(Error::State(format!(
                "{} derivative values for a grid needing {}",
                values.len(),
                grid.len() * grid.d
            )));
        }
        if !(bandwidth > 0.0) {
            return Err(Error::ParameterDomain(format!("bandwidth {bandwidth} must be positive")));
        }
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(DerivativeEstimate { values, grid, bandwidth, source_size })
    }

    pub fn grid(&self) -> EvalGrid {
        self.grid
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn source_size(&self) -> usize {
        self.source_size
    }

    /// `∂̂_q C` at grid point `i`.
    pub fn get(&self, i: usize, q: usize) -> f64 {
        self.values[i * self.grid.d + q]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranks::{pool, pseudo_obs, Sample};
    use crate::rng::substream;
    use rand::Rng;

    fn independent(n: usize, seed: u64) -> PseudoSample {
        let mut rng = substream(seed, 0);
        let data: Vec<f64> = (0..2 * n).map(|_| rng.random()).collect();
        pseudo_obs(&Sample::new(data, n, 2).unwrap()).unwrap()
    }

    #[test]
    fn independence_derivative_is_other_coordinate() {
        let z = pool(&independent(5000, 1), &independent(5000, 2)).unwrap();
        let est = estimate_partial(&z, 0, &[0.5, 0.5], Bandwidth::default()).unwrap();
        assert!((est - 0.5).abs() < 0.1, "{est}");
    }

    #[test]
    fn boundary_and_degenerate_points_stay_in_unit_interval() {
        let z = pool(&independent(200, 3), &independent(300, 4)).unwrap();
        let e = PartialEstimator::pooled(&z, Bandwidth::default()).unwrap();
        for u in [[0.0, 0.4], [1.0, 0.4], [0.3, 0.0], [0.3, 1.0]] {
            let v = e.at(0, &u).unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
        let ranks: Vec<u64> = (1..=50).flat_map(|r| [r, r]).collect();
        let comonotone = PseudoSample::from_ranks(ranks, 50, 2, 50).unwrap();
        let e = PartialEstimator::from_sample(comonotone, Bandwidth::default()).unwrap();
        let v = e.at(0, &[0.5, 0.5]).unwrap();
        assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn one_sided_difference_at_edge() {
        // Ĉ(u, 1) = u exactly on the rank lattice, so the slope is one at any step.
        let p = independent(100, 5);
        let e = PartialEstimator::from_sample(p, Bandwidth::Fixed(0.1)).unwrap();
        assert!((e.at(0, &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((e.at(0, &[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let z = pool(&independent(10, 6), &independent(10, 7)).unwrap();
        assert!(estimate_partial(&z, 2, &[0.5, 0.5], Bandwidth::default()).is_err());
        assert!(estimate_partial(&z, 0, &[0.5, 1.5], Bandwidth::default()).is_err());
        assert!(estimate_partial(&z, 0, &[0.5], Bandwidth::default()).is_err());
        assert!(estimate_partial(&z, 0, &[0.5, 0.5], Bandwidth::Fixed(0.0)).is_err());
        let grid = EvalGrid::new(3, 2).unwrap();
        assert!(DerivativeEstimate::from_values(vec![0.0; 5], grid, 0.1, 10).is_err());
    }

    #[test]
    fn grid_layout() {
        let g = EvalGrid::default_for(2);
        assert_eq!((g.resolution, g.len()), (20, 400));
        assert_eq!(EvalGrid::default_for(3).resolution, 7);
        assert_eq!(EvalGrid::default_for(4).resolution, 4);
        let g = EvalGrid::new(3, 2).unwrap();
        assert_eq!(g.point(0), vec![0.25, 0.25]);
        assert_eq!(g.point(5), vec![0.5, 0.75]);
    }
}
