use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1, Gamma, StandardNormal};

use super::cdf::JoeClayton;
use super::{CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::numeric::{norm_cdf, t_cdf};
use crate::ranks::Sample;

/// Draw `n` i.i.d. points from the copula.
pub fn sample<R: Rng + ?Sized>(spec: &CopulaSpec, n: usize, rng: &mut R) -> Result<Sample> {
    if n == 0 {
        return Err(Error::Input("sample size must be at least 1".into()));
    }
    let d = spec.dim;
    let mut data = Vec::with_capacity(n * d);
    let p = &spec.params;
    match spec.family {
        Family::Independence => {
            for _ in 0..n * d {
                data.push(rng.random::<f64>());
            }
        }
        Family::Gaussian => {
            let mut z = vec![0.0; d];
            for _ in 0..n {
                correlated_normals(p[0], rng, &mut z);
                data.extend(z.iter().map(|&x| norm_cdf(x)));
            }
        }
        Family::StudentT => {
            let chi = ChiSquared::new(p[1]).map_err(|e| Error::ParameterDomain(e.to_string()))?;
            let mut z = vec![0.0; d];
            for _ in 0..n {
                correlated_normals(p[0], rng, &mut z);
                let w = (chi.sample(rng) / p[1]).sqrt();
                data.extend(z.iter().map(|&x| t_cdf(x / w, p[1])));
            }
        }
        Family::Clayton => {
            let theta = p[0];
            let gamma = Gamma::new(1.0 / theta, 1.0).map_err(|e| Error::ParameterDomain(e.to_string()))?;
            for _ in 0..n {
                let v: f64 = gamma.sample(rng);
                for _ in 0..d {
                    let e: f64 = Exp1.sample(rng);
                    data.push((-(e / v).ln_1p() / theta).exp());
                }
            }
        }
        Family::Gumbel => {
            let theta = p[0];
            for _ in 0..n {
                let v = positive_stable(1.0 / theta, rng);
                for _ in 0..d {
                    let e: f64 = Exp1.sample(rng);
                    data.push((-(e / v).powf(1.0 / theta)).exp());
                }
            }
        }
        Family::Frank if d == 2 => {
            let theta = p[0];
            for _ in 0..n {
                let u: f64 = rng.random();
                let t: f64 = rng.random();
                data.push(u);
                data.push(frank_conditional_inverse(theta, u, t));
            }
        }
        Family::Frank => {
            let theta = p[0];
            for _ in 0..n {
                let v = logarithmic(theta, rng) as f64;
                for _ in 0..d {
                    let e: f64 = Exp1.sample(rng);
                    // ψ(s) = -ln(1 - (1 - e^{-θ}) e^{-s}) / θ
                    let inner = (-theta).exp_m1() * (-e / v).exp();
                    data.push(-inner.ln_1p() / theta);
                }
            }
        }
        Family::Plackett => {
            let theta = p[0];
            for _ in 0..n {
                let u: f64 = rng.random();
                let t: f64 = rng.random();
                data.push(u);
                data.push(plackett_conditional_inverse(theta, u, t));
            }
        }
        Family::SymJoeClayton => {
            let (lu, ll) = (p[0], p[1]);
            let upper = JoeClayton::new(lu, ll);
            let survival = JoeClayton::new(ll, lu);
            for _ in 0..n {
                let flip = rng.random::<bool>();
                let u: f64 = rng.random();
                let t: f64 = rng.random();
                if flip {
                    let v = joe_clayton_conditional_inverse(&survival, u, t);
                    data.push(1.0 - u);
                    data.push(1.0 - v);
                } else {
                    data.push(u);
                    data.push(joe_clayton_conditional_inverse(&upper, u, t));
                }
            }
        }
    }
    for x in data.iter_mut() {
        *x = x.clamp(0.0, 1.0);
    }
    Sample::new(data, n, d)
}

/// Exchangeable standard normals with pairwise correlation `rho`.
fn correlated_normals<R: Rng + ?Sized>(rho: f64, rng: &mut R, out: &mut [f64]) {
    if out.len() == 2 {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        out[0] = a;
        out[1] = rho * a + (1.0 - rho * rho).sqrt() * b;
        return;
    }
    let common: f64 = rng.sample(StandardNormal);
    let (sr, sc) = (rho.sqrt(), (1.0 - rho).sqrt());
    for x in out.iter_mut() {
        let e: f64 = rng.sample(StandardNormal);
        *x = sr * common + sc * e;
    }
}

/// Positive stable variate with Laplace transform `exp(-s^alpha)`, `0 < alpha <= 1` (Kanter).
fn positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let u = std::f64::consts::PI * rng.random::<f64>();
    let e: f64 = Exp1.sample(rng);
    let a = ((alpha * u).sin() / u.sin()).powf(1.0 / (1.0 - alpha)) * ((1.0 - alpha) * u).sin()
        / (alpha * u).sin();
    (a / e).powf((1.0 - alpha) / alpha)
}

/// Logarithmic series variate with parameter `1 - e^{-θ}` (Kemp's LK algorithm).
fn logarithmic<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> u64 {
    let p = -(-theta).exp_m1();
    let u2: f64 = rng.random();
    if u2 > p {
        return 1;
    }
    let u1: f64 = rng.random();
    // ln(1 - p) = -θ
    let q = -(-theta * u1).exp_m1();
    if u2 < q * q {
        let k = 1.0 + (u2.ln() / q.ln()).floor();
        if k.is_finite() && k >= 1.0 {
            return k as u64;
        }
        return 1;
    }
    if u2 > q {
        1
    } else {
        2
    }
}

pub(super) fn frank_conditional_inverse(theta: f64, u: f64, t: f64) -> f64 {
    // Solve ∂₁C(u, v) = t for v.
    let a = (-theta * u).exp();
    let num = t * (-theta).exp_m1();
    let den = t + (1.0 - t) * a;
    (-(num / den).ln_1p() / theta).clamp(0.0, 1.0)
}

pub(super) fn plackett_conditional_inverse(theta: f64, u: f64, t: f64) -> f64 {
    if (theta - 1.0).abs() < 1e-9 {
        return t;
    }
    let a = t * (1.0 - t);
    let b = theta + a * (theta - 1.0) * (theta - 1.0);
    let c = 2.0 * a * (u * theta * theta + 1.0 - u) + theta * (1.0 - 2.0 * a);
    let d = theta.sqrt() * (theta + 4.0 * a * u * (1.0 - u) * (1.0 - theta) * (1.0 - theta)).sqrt();
    ((c - (1.0 - 2.0 * t) * d) / (2.0 * b)).clamp(0.0, 1.0)
}

/// Solve `∂₁C(u, v) = t` for the Joe–Clayton copula.
///
/// `∂₁C = φ'(u)/φ'(c)` with `c = C(u, v)`, so first find `c` (on a log scale,
/// since it can be tiny), then `v = φ⁻¹(φ(c) - φ(u))`.
pub(super) fn joe_clayton_conditional_inverse(jc: &JoeClayton, u: f64, t: f64) -> f64 {
    if u <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let target = jc.ln_abs_dphi(u) - t.ln();
    // ln|φ'(c)| is decreasing in c; find where it equals `target`.
    let (mut lo, mut hi) = (-700.0f64, u.ln());
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if jc.ln_abs_dphi(mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let c = (0.5 * (lo + hi)).exp();
    let s = jc.phi(c) - jc.phi(u);
    jc.phi_inv(s.max(0.0)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::super::partial_1;
    use super::*;
    use crate::rng::substream;

    #[test]
    fn conditional_inverses_solve_the_partial_derivative() {
        let frank = CopulaSpec::frank(-4.0).unwrap();
        let plackett = CopulaSpec::plackett(7.5).unwrap();
        let jc = JoeClayton::new(0.35, 0.65);
        for &u in &[0.05, 0.3, 0.5, 0.77, 0.96] {
            for &t in &[0.01, 0.2, 0.5, 0.8, 0.99] {
                let v = frank_conditional_inverse(-4.0, u, t);
                assert!((partial_1(&frank, u, v).unwrap() - t).abs() < 1e-10);
                let v = plackett_conditional_inverse(7.5, u, t);
                assert!((partial_1(&plackett, u, v).unwrap() - t).abs() < 1e-10, "u={u} t={t}");
                let v = joe_clayton_conditional_inverse(&jc, u, t);
                assert!((jc.h(u, v) - t).abs() < 1e-8, "u={u} t={t}");
            }
        }
    }

    #[test]
    fn samples_lie_in_unit_cube_and_are_reproducible() {
        for family in Family::ALL {
            let params = match family {
                Family::Independence => vec![],
                Family::StudentT => vec![0.3, 4.0],
                Family::SymJoeClayton => vec![0.3, 0.5],
                Family::Gumbel => vec![1.8],
                _ => vec![0.6],
            };
            let spec = CopulaSpec::new(family, params, 2).unwrap();
            let a = sample(&spec, 200, &mut substream(5, 1)).unwrap();
            let b = sample(&spec, 200, &mut substream(5, 1)).unwrap();
            assert_eq!(a, b);
            assert!(a.data().iter().all(|x| (0.0..=1.0).contains(x)));
        }
        assert!(sample(&CopulaSpec::gaussian(0.1).unwrap(), 0, &mut substream(0, 0)).is_err());
    }

    #[test]
    fn logarithmic_mean_matches() {
        let theta = 3.0f64;
        let p = 1.0 - (-theta).exp();
        let mean = p / ((1.0 - p) * theta);
        let mut rng = substream(11, 0);
        let n = 200_000;
        let total: u64 = (0..n).map(|_| logarithmic(theta, &mut rng)).sum();
        assert!((total as f64 / n as f64 - mean).abs() < 0.05 * mean);
    }
}
