use std::f64::consts::PI;

use super::cdf::partial_1;
use super::{CopulaSpec, Family};
use crate::error::{Error, Result};
use crate::numeric::{bisect_increasing, composite_gauss_legendre_unit, integrate};

/// Degrees of freedom used for the Student-t family when none is given.
pub const DEFAULT_STUDENT_T_DOF: f64 = 4.0;

const TAU_TOLERANCE: f64 = 1e-6;

/// Family-specific extras for [`tau_to_params`].
#[derive(Debug, Clone, Copy)]
pub struct TauAux {
    pub dim: usize,
    /// Student-t degrees of freedom.
    pub nu: Option<f64>,
}

impl Default for TauAux {
    fn default() -> Self {
        TauAux { dim: 2, nu: None }
    }
}

/// Population Kendall τ of a bivariate margin of `spec`.
pub fn population_tau(spec: &CopulaSpec) -> Result<f64> {
    let p = spec.params();
    Ok(match spec.family() {
        Family::Independence => 0.0,
        Family::Gaussian | Family::StudentT => 2.0 / PI * p[0].asin(),
        Family::Clayton => p[0] / (p[0] + 2.0),
        Family::Gumbel => 1.0 - 1.0 / p[0],
        Family::Frank => frank_tau(p[0]),
        Family::Plackett | Family::SymJoeClayton => numeric_tau(spec)?,
    })
}

/// Debye function of order one, `D1(x) = x⁻¹ ∫₀ˣ t / (eᵗ - 1) dt`, for `x > 0`.
fn debye1(x: f64) -> f64 {
    let f = |t: f64| if t == 0.0 { 1.0 } else { t / t.exp_m1() };
    integrate(f, 0.0, x, 1e-10 * x.max(1.0)) / x
}

fn frank_tau(theta: f64) -> f64 {
    let a = theta.abs();
    if a < 1e-8 {
        return theta / 9.0;
    }
    let tau = 1.0 - 4.0 / a * (1.0 - debye1(a));
    tau.copysign(theta)
}

/// `τ = 1 - 4 ∫∫ ∂₁C ∂₂C du dv` on a tensor Gauss–Legendre grid.
///
/// Equivalent to `4 E[C(U, V)] - 1` after integrating by parts, but needs only
/// the conditional distribution functions.
fn numeric_tau(spec: &CopulaSpec) -> Result<f64> {
    let spec = if spec.dim() == 2 { spec.clone() } else { spec.with_dim(2)? };
    let (nodes, weights) = composite_gauss_legendre_unit(48, 8);
    let k = nodes.len();
    // Every family here is exchangeable, so ∂₂C(u, v) = ∂₁C(v, u).
    let mut d1 = vec![0.0; k * k];
    for (i, &u) in nodes.iter().enumerate() {
        for (j, &v) in nodes.iter().enumerate() {
            d1[i * k + j] = partial_1(&spec, u, v)?;
        }
    }
    let mut acc = 0.0;
    for i in 0..k {
        let mut row = 0.0;
        for j in 0..k {
            row += weights[j] * d1[i * k + j] * d1[j * k + i];
        }
        acc += weights[i] * row;
    }
    Ok(1.0 - 4.0 * acc)
}

/// Build a spec of `family` whose population Kendall τ equals `tau`.
pub fn tau_to_params(family: Family, tau: f64, aux: TauAux) -> Result<CopulaSpec> {
    if !(tau > -1.0 && tau < 1.0) {
        return Err(Error::Domain(format!("Kendall tau {tau} outside (-1, 1)")));
    }
    let inadmissible = || Error::Domain(format!("Kendall tau {tau} is not attainable by {family}"));
    let dim = aux.dim;
    let spec = match family {
        Family::Independence => {
            if tau != 0.0 {
                return Err(inadmissible());
            }
            CopulaSpec::new(family, vec![], dim)?
        }
        Family::Gaussian => CopulaSpec::new(family, vec![(PI * tau / 2.0).sin()], dim)?,
        Family::StudentT => {
            let nu = aux.nu.unwrap_or(DEFAULT_STUDENT_T_DOF);
            CopulaSpec::new(family, vec![(PI * tau / 2.0).sin(), nu], dim)?
        }
        Family::Clayton => {
            if tau <= 0.0 {
                return Err(inadmissible());
            }
            CopulaSpec::new(family, vec![2.0 * tau / (1.0 - tau)], dim)?
        }
        Family::Gumbel => {
            if tau < 0.0 {
                return Err(inadmissible());
            }
            CopulaSpec::new(family, vec![1.0 / (1.0 - tau)], dim)?
        }
        Family::Frank => {
            if tau == 0.0 {
                return Err(inadmissible());
            }
            let a = tau.abs();
            // Frank τ grows like 1 - 4/θ, so θ = 8/(1-|τ|) brackets the root.
            let hi = 8.0 / (1.0 - a) + 10.0;
            let theta = bisect_increasing(|t| frank_tau(t) - a, 1e-9, hi, 1e-13, "Frank tau inversion")?;
            CopulaSpec::new(family, vec![theta.copysign(tau)], dim)?
        }
        Family::Plackett => {
            let f = |log_theta: f64| -> f64 {
                match CopulaSpec::plackett(log_theta.exp()).and_then(|s| numeric_tau(&s)) {
                    Ok(t) => t - tau,
                    Err(_) => f64::NAN,
                }
            };
            let lt = bisect_increasing(f, -25.0, 25.0, 1e-11, "Plackett tau inversion")?;
            CopulaSpec::new(family, vec![lt.exp()], dim)?
        }
        Family::SymJoeClayton => {
            if tau <= 0.0 {
                return Err(inadmissible());
            }
            let f = |lambda: f64| -> f64 {
                match CopulaSpec::sym_joe_clayton(lambda, lambda).and_then(|s| numeric_tau(&s)) {
                    Ok(t) => t - tau,
                    Err(_) => f64::NAN,
                }
            };
            let lambda = bisect_increasing(f, 1e-9, 1.0 - 1e-9, 1e-12, "SymJoeClayton tau inversion")?;
            CopulaSpec::new(family, vec![lambda, lambda], dim)?
        }
    };
    let achieved = population_tau(&spec)?;
    if (achieved - tau).abs() > TAU_TOLERANCE {
        return Err(Error::Convergence(format!(
            "{family}: target tau {tau}, achieved {achieved} with params {:?}",
            spec.params()
        )));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_inversions() {
        let c = tau_to_params(Family::Clayton, 0.5, TauAux::default()).unwrap();
        assert!((c.params()[0] - 2.0).abs() < 1e-15);
        let g = tau_to_params(Family::Gumbel, 0.5, TauAux::default()).unwrap();
        assert!((g.params()[0] - 2.0).abs() < 1e-15);
        let n = tau_to_params(Family::Gaussian, 0.2, TauAux::default()).unwrap();
        assert!((n.params()[0] - 0.309_016_994_374_947_4).abs() < 1e-12);
        let t = tau_to_params(Family::StudentT, 0.2, TauAux::default()).unwrap();
        assert_eq!(t.params()[1], DEFAULT_STUDENT_T_DOF);
    }

    #[test]
    fn numeric_functional_agrees_with_closed_forms() {
        for spec in [
            CopulaSpec::clayton(2.0).unwrap(),
            CopulaSpec::gumbel(1.5).unwrap(),
            CopulaSpec::frank(4.0).unwrap(),
            CopulaSpec::frank(-2.0).unwrap(),
            CopulaSpec::gaussian(0.5).unwrap(),
            CopulaSpec::student_t(0.3, 4.0).unwrap(),
        ] {
            let closed = population_tau(&spec).unwrap();
            let numeric = numeric_tau(&spec).unwrap();
            assert!((closed - numeric).abs() < 2e-4, "{spec:?}: {closed} vs {numeric}");
        }
    }

    #[test]
    fn frank_tau_known_value() {
        // θ = 5.74 gives τ ≈ 0.5 (standard tables).
        assert!((frank_tau(5.736_282_7) - 0.5).abs() < 1e-6);
        assert_eq!(frank_tau(-3.0), -frank_tau(3.0));
    }

    #[test]
    fn numeric_inversions_hit_targets() {
        for family in [Family::Frank, Family::Plackett, Family::SymJoeClayton] {
            for &tau in &[0.2, 1.0 / 3.0, 0.7] {
                let spec = tau_to_params(family, tau, TauAux::default()).unwrap();
                assert!((population_tau(&spec).unwrap() - tau).abs() < 1e-6);
            }
        }
        let p = tau_to_params(Family::Plackett, -0.4, TauAux::default()).unwrap();
        assert!(p.params()[0] < 1.0);
    }

    #[test]
    fn inadmissible_targets() {
        assert!(tau_to_params(Family::Clayton, -0.1, TauAux::default()).is_err());
        assert!(tau_to_params(Family::Gaussian, 1.0, TauAux::default()).is_err());
        assert!(tau_to_params(Family::Independence, 0.1, TauAux::default()).is_err());
        assert!(tau_to_params(Family::SymJoeClayton, 0.0, TauAux::default()).is_err());
    }
}
