use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::numeric::{integrate, norm_cdf, norm_quantile, t_cdf, t_quantile};

const QUAD_TOL: f64 = 1e-13;

/// Evaluate the copula distribution function at `u`.
///
/// Coordinates equal to one are dropped (margins of the exchangeable families
/// stay in the family) and any zero coordinate returns zero, so groundedness
/// and uniform margins hold exactly.
pub fn cdf(spec: &CopulaSpec, u: &[f64]) -> Result<f64> {
    if u.len() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            found: u.len(),
        });
    }
    if let Some(bad) = u.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::Domain(format!("copula argument {bad} outside [0, 1]")));
    }
    if u.iter().any(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let active: Vec<f64> = u.iter().copied().filter(|&x| x < 1.0).collect();
    match active.len() {
        0 => return Ok(1.0),
        1 => return Ok(active[0]),
        _ => {}
    }
    let value = match spec.family {
        Family::Independence => active.iter().product(),
        Family::Clayton => clayton(spec.params[0], &active),
        Family::Frank => frank(spec.params[0], &active),
        Family::Gumbel => gumbel(spec.params[0], &active),
        Family::Gaussian if active.len() == 2 => gaussian2(spec.params[0], active[0], active[1]),
        Family::Gaussian => gaussian_exchangeable(spec.params[0], &active),
        Family::StudentT if active.len() == 2 => student2(spec.params[0], spec.params[1], active[0], active[1]),
        Family::StudentT => student_exchangeable(spec.params[0], spec.params[1], &active),
        Family::Plackett => plackett(spec.params[0], active[0], active[1]),
        Family::SymJoeClayton => sym_joe_clayton(spec.params[0], spec.params[1], active[0], active[1]),
    };
    let upper = active.iter().copied().fold(1.0, f64::min);
    let lower = (active.iter().sum::<f64>() - active.len() as f64 + 1.0).max(0.0);
    Ok(value.clamp(lower, upper))
}

/// Partial derivative `∂C(u, v)/∂u` of the bivariate margin (the conditional
/// distribution function of `V` given `U = u`).
pub fn partial_1(spec: &CopulaSpec, u: f64, v: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
        return Err(Error::Domain(format!("({u}, {v}) outside the unit square")));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    if v == 1.0 {
        return Ok(1.0);
    }
    let p = &spec.params;
    let value = match spec.family {
        Family::Independence => v,
        Family::Gaussian => gaussian_h(p[0], u, v),
        Family::StudentT => student_h(p[0], p[1], u, v),
        Family::Clayton => {
            let t = p[0];
            if u == 0.0 {
                1.0
            } else {
                let s = u.powf(-t) + v.powf(-t) - 1.0;
                (u.powf(-t - 1.0)) * s.powf(-1.0 / t - 1.0)
            }
        }
        Family::Frank => frank_h(p[0], u, v),
        Family::Gumbel => {
            let t = p[0];
            if u == 0.0 {
                if t > 1.0 {
                    1.0
                } else {
                    v
                }
            } else if u == 1.0 {
                if t > 1.0 {
                    0.0
                } else {
                    v
                }
            } else {
                let (a, b) = (-u.ln(), -v.ln());
                let s = a.powf(t) + b.powf(t);
                let c = (-s.powf(1.0 / t)).exp();
                c * s.powf(1.0 / t - 1.0) * a.powf(t - 1.0) / u
            }
        }
        Family::Plackett => plackett_h(p[0], u, v),
        Family::SymJoeClayton => {
            let (lu, ll) = (p[0], p[1]);
            0.5 * (JoeClayton::new(lu, ll).h(u, v) - JoeClayton::new(ll, lu).h(1.0 - u, 1.0 - v) + 1.0)
        }
    };
    Ok(value.clamp(0.0, 1.0))
}

fn clayton(theta: f64, u: &[f64]) -> f64 {
    let s: f64 = u.iter().map(|x| x.powf(-theta)).sum::<f64>() - (u.len() as f64 - 1.0);
    s.powf(-1.0 / theta)
}

fn frank(theta: f64, u: &[f64]) -> f64 {
    let denom = (-theta).exp_m1();
    let prod: f64 = u.iter().map(|&x| (-theta * x).exp_m1() / denom).product::<f64>() * denom;
    -(prod.ln_1p()) / theta
}

pub(super) fn frank_h(theta: f64, u: f64, v: f64) -> f64 {
    let a = (-theta * u).exp();
    let bv = (-theta * v).exp_m1();
    let au = (-theta * u).exp_m1();
    let d = (-theta).exp_m1();
    a * bv / (d + au * bv)
}

fn gumbel(theta: f64, u: &[f64]) -> f64 {
    let s: f64 = u.iter().map(|x| (-x.ln()).powf(theta)).sum();
    (-s.powf(1.0 / theta)).exp()
}

fn gaussian_h(rho: f64, s: f64, v: f64) -> f64 {
    if s <= 0.0 {
        return if rho > 0.0 { 1.0 } else if rho < 0.0 { 0.0 } else { v };
    }
    if s >= 1.0 {
        return if rho > 0.0 { 0.0 } else if rho < 0.0 { 1.0 } else { v };
    }
    norm_cdf((norm_quantile(v) - rho * norm_quantile(s)) / (1.0 - rho * rho).sqrt())
}

fn student_h(rho: f64, nu: f64, s: f64, v: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return gaussian_h(rho, s, v);
    }
    let xs = t_quantile(s, nu);
    let xv = t_quantile(v, nu);
    let scale = ((nu + xs * xs) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
    t_cdf((xv - rho * xs) / scale, nu + 1.0)
}

fn gaussian2(rho: f64, u: f64, v: f64) -> f64 {
    if rho == 0.0 {
        return u * v;
    }
    let (u, v) = if u <= v { (u, v) } else { (v, u) };
    integrate(|s| gaussian_h(rho, s, v), 0.0, u, QUAD_TOL)
}

fn student2(rho: f64, nu: f64, u: f64, v: f64) -> f64 {
    let xv = t_quantile(v, nu);
    let h = |s: f64| {
        let xs = t_quantile(s, nu);
        let scale = ((nu + xs * xs) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
        t_cdf((xv - rho * xs) / scale, nu + 1.0)
    };
    integrate(h, 0.0, u, QUAD_TOL)
}

/// One-factor representation `X_i = √ρ Z + √(1-ρ) ε_i`, `ρ >= 0`.
fn gaussian_exchangeable(rho: f64, u: &[f64]) -> f64 {
    if rho == 0.0 {
        return u.iter().product();
    }
    let a: Vec<f64> = u.iter().map(|&x| norm_quantile(x)).collect();
    let (sr, sc) = (rho.sqrt(), (1.0 - rho).sqrt());
    integrate(
        |s| {
            let z = norm_quantile(s);
            a.iter().map(|&ai| norm_cdf((ai - sr * z) / sc)).product()
        },
        0.0,
        1.0,
        1e-12,
    )
}

fn student_exchangeable(rho: f64, nu: f64, u: &[f64]) -> f64 {
    let t: Vec<f64> = u.iter().map(|&x| t_quantile(x, nu)).collect();
    let chi = ChiSquared::new(nu).expect("positive degrees of freedom");
    let (sr, sc) = (rho.sqrt(), (1.0 - rho).sqrt());
    integrate(
        |s1| {
            let w = (chi.inverse_cdf(s1) / nu).sqrt();
            integrate(
                |s2| {
                    let z = norm_quantile(s2);
                    t.iter().map(|&ti| norm_cdf((ti * w - sr * z) / sc)).product()
                },
                0.0,
                1.0,
                1e-11,
            )
        },
        0.0,
        1.0,
        1e-10,
    )
}

fn plackett(theta: f64, u: f64, v: f64) -> f64 {
    if (theta - 1.0).abs() < 1e-9 {
        return u * v;
    }
    let s = 1.0 + (theta - 1.0) * (u + v);
    let disc = (s * s - 4.0 * u * v * theta * (theta - 1.0)).max(0.0);
    // Rationalized form of (s - sqrt(disc)) / (2(θ-1)) avoids cancellation.
    2.0 * u * v * theta / (s + disc.sqrt())
}

fn plackett_h(theta: f64, u: f64, v: f64) -> f64 {
    if (theta - 1.0).abs() < 1e-9 {
        return v;
    }
    let s = 1.0 + (theta - 1.0) * (u + v);
    let disc = (s * s - 4.0 * u * v * theta * (theta - 1.0)).max(0.0).sqrt();
    if disc == 0.0 {
        return 0.5;
    }
    0.5 * (1.0 - (s - 2.0 * theta * v) / disc)
}

fn sym_joe_clayton(lambda_upper: f64, lambda_lower: f64, u: f64, v: f64) -> f64 {
    let a = JoeClayton::new(lambda_upper, lambda_lower).cdf(u, v);
    let b = JoeClayton::new(lambda_lower, lambda_upper).cdf(1.0 - u, 1.0 - v);
    0.5 * (a + b + u + v - 1.0)
}

/// The Joe–Clayton (BB7) copula parameterized by its tail-dependence coefficients.
///
/// Generator `φ(t) = (1 - (1-t)^κ)^(-γ) - 1` with `κ = 1/log2(2 - λU)` and `γ = -1/log2(λL)`.
#[derive(Debug, Clone, Copy)]
pub(super) struct JoeClayton {
    kappa: f64,
    gamma: f64,
}

impl JoeClayton {
    pub(super) fn new(lambda_upper: f64, lambda_lower: f64) -> Self {
        JoeClayton {
            kappa: 1.0 / (2.0 - lambda_upper).log2(),
            gamma: -1.0 / lambda_lower.log2(),
        }
    }

    /// `1 - (1-t)^κ`, accurate for small `t`.
    fn inner(&self, t: f64) -> f64 {
        -(self.kappa * (-t).ln_1p()).exp_m1()
    }

    pub(super) fn phi(&self, t: f64) -> f64 {
        (-self.gamma * self.inner(t).ln()).exp_m1()
    }

    pub(super) fn phi_inv(&self, s: f64) -> f64 {
        if s.is_infinite() {
            return 0.0;
        }
        // 1 - (1 - (1+s)^(-1/γ))^(1/κ)
        let a = -((-1.0 / self.gamma) * s.ln_1p()).exp_m1();
        -(a.ln() / self.kappa).exp_m1()
    }

    /// `ln |φ'(t)|`.
    pub(super) fn ln_abs_dphi(&self, t: f64) -> f64 {
        self.gamma.ln() + self.kappa.ln() - (self.gamma + 1.0) * self.inner(t).ln()
            + (self.kappa - 1.0) * (-t).ln_1p()
    }

    pub(super) fn cdf(&self, u: f64, v: f64) -> f64 {
        if u <= 0.0 || v <= 0.0 {
            return 0.0;
        }
        if u >= 1.0 {
            return v;
        }
        if v >= 1.0 {
            return u;
        }
        self.phi_inv(self.phi(u) + self.phi(v)).clamp(0.0, u.min(v))
    }

    /// `∂C/∂u = φ'(u) / φ'(C(u, v))`.
    pub(super) fn h(&self, u: f64, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if v >= 1.0 {
            return 1.0;
        }
        if u <= 0.0 {
            return 1.0;
        }
        if u >= 1.0 {
            return if self.kappa > 1.0 { 0.0 } else { v };
        }
        let c = self.cdf(u, v);
        if c <= 0.0 {
            return 0.0;
        }
        (self.ln_abs_dphi(u) - self.ln_abs_dphi(c)).exp().clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_specs() -> Vec<CopulaSpec> {
        vec![
            CopulaSpec::independence(2).unwrap(),
            CopulaSpec::gaussian(0.5).unwrap(),
            CopulaSpec::gaussian(-0.7).unwrap(),
            CopulaSpec::student_t(0.5, 4.0).unwrap(),
            CopulaSpec::clayton(2.0).unwrap(),
            CopulaSpec::frank(5.0).unwrap(),
            CopulaSpec::frank(-3.0).unwrap(),
            CopulaSpec::gumbel(2.0).unwrap(),
            CopulaSpec::sym_joe_clayton(0.4, 0.6).unwrap(),
            CopulaSpec::plackett(6.0).unwrap(),
            CopulaSpec::plackett(0.2).unwrap(),
        ]
    }

    #[test]
    fn independence_and_corners() {
        let ind = CopulaSpec::independence(2).unwrap();
        assert!((cdf(&ind, &[0.3, 0.5]).unwrap() - 0.15).abs() < 1e-15);
        for spec in all_specs() {
            assert_eq!(cdf(&spec, &[1.0, 1.0]).unwrap(), 1.0);
            assert_eq!(cdf(&spec, &[0.0, 0.4]).unwrap(), 0.0);
            assert_eq!(cdf(&spec, &[0.37, 1.0]).unwrap(), 0.37);
        }
    }

    #[test]
    fn clayton_matches_generator_form() {
        let spec = CopulaSpec::clayton(0.5).unwrap();
        let expected = (2.0 * 0.5f64.powf(-0.5) - 1.0).powf(-2.0);
        assert!((cdf(&spec, &[0.5, 0.5]).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let spec = CopulaSpec::gaussian(0.2).unwrap();
        assert!(matches!(cdf(&spec, &[0.2, 1.5]), Err(Error::Domain(_))));
        assert!(matches!(cdf(&spec, &[0.2]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gaussian_quadrant_probability() {
        // P(X < 0, Y < 0) = 1/4 + asin(ρ)/(2π)
        for &rho in &[-0.8, -0.3, 0.5, 0.95] {
            let spec = CopulaSpec::gaussian(rho).unwrap();
            let expected = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
            assert!((cdf(&spec, &[0.5, 0.5]).unwrap() - expected).abs() < 1e-10, "rho={rho}");
        }
        // Same orthant formula holds for the t copula.
        let spec = CopulaSpec::student_t(0.5, 4.0).unwrap();
        let expected = 0.25 + 0.5f64.asin() / (2.0 * std::f64::consts::PI);
        assert!((cdf(&spec, &[0.5, 0.5]).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn exchangeable_reduces_to_bivariate() {
        let g3 = CopulaSpec::new(Family::Gaussian, vec![0.4], 3).unwrap();
        let g2 = CopulaSpec::gaussian(0.4).unwrap();
        let direct = gaussian_exchangeable(0.4, &[0.3, 0.6]);
        assert!((direct - cdf(&g2, &[0.3, 0.6]).unwrap()).abs() < 1e-9);
        assert_eq!(cdf(&g3, &[0.3, 1.0, 0.6]).unwrap(), cdf(&g2, &[0.3, 0.6]).unwrap());
        let t3 = student_exchangeable(0.4, 4.0, &[0.3, 0.6]);
        let t2 = CopulaSpec::student_t(0.4, 4.0).unwrap();
        assert!((t3 - cdf(&t2, &[0.3, 0.6]).unwrap()).abs() < 1e-7);
        // Trivariate Gaussian orthant: 1/8 + 3 asin(ρ)/(4π)
        let expected = 0.125 + 3.0 * 0.4f64.asin() / (4.0 * std::f64::consts::PI);
        assert!((cdf(&g3, &[0.5, 0.5, 0.5]).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn partial_derivative_matches_finite_difference() {
        for spec in all_specs() {
            for &(u, v) in &[(0.2, 0.3), (0.5, 0.5), (0.8, 0.25), (0.35, 0.9)] {
                let h = 1e-5;
                let fd = (cdf(&spec, &[u + h, v]).unwrap() - cdf(&spec, &[u - h, v]).unwrap()) / (2.0 * h);
                let an = partial_1(&spec, u, v).unwrap();
                assert!((fd - an).abs() < 2e-5, "{spec:?} at ({u},{v}): fd {fd} vs {an}");
            }
        }
    }

    #[test]
    fn joe_clayton_generator_inverts() {
        let jc = JoeClayton::new(0.3, 0.7);
        for &t in &[1e-6, 0.1, 0.5, 0.9, 0.999] {
            assert!((jc.phi_inv(jc.phi(t)) - t).abs() < 1e-10);
        }
    }
}
