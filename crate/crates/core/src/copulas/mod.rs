//! Parametric copula families: evaluation, sampling and Kendall-τ calibration.

mod cdf;
mod sample;
mod tau;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cdf::{cdf, partial_1};
pub use sample::sample;
pub use tau::{population_tau, tau_to_params, TauAux, DEFAULT_STUDENT_T_DOF};

/// Copula family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Independence,
    Gaussian,
    StudentT,
    Clayton,
    Frank,
    Gumbel,
    SymJoeClayton,
    Plackett,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Independence,
        Family::Gaussian,
        Family::StudentT,
        Family::Clayton,
        Family::Frank,
        Family::Gumbel,
        Family::SymJoeClayton,
        Family::Plackett,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Independence => "Independence",
            Family::Gaussian => "Gaussian",
            Family::StudentT => "StudentT",
            Family::Clayton => "Clayton",
            Family::Frank => "Frank",
            Family::Gumbel => "Gumbel",
            Family::SymJoeClayton => "SymJoeClayton",
            Family::Plackett => "Plackett",
        }
    }

    /// Number of parameters carried by a spec of this family.
    pub fn arity(self) -> usize {
        match self {
            Family::Independence => 0,
            Family::StudentT | Family::SymJoeClayton => 2,
            _ => 1,
        }
    }

    /// Whether the family is implemented above dimension two.
    pub fn supports_dim(self, dim: usize) -> bool {
        match self {
            Family::SymJoeClayton | Family::Plackett => dim == 2,
            _ => dim >= 2,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Input(format!("unknown copula family `{s}`")))
    }
}

/// A validated parametric copula.
///
/// Parameter layout: `Gaussian [rho]`, `StudentT [rho, nu]`, `Clayton/Frank/Gumbel/Plackett [theta]`,
/// `SymJoeClayton [lambda_upper, lambda_lower]`, `Independence []`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct CopulaSpec {
    family: Family,
    params: Vec<f64>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    family: Family,
    #[serde(default)]
    params: Vec<f64>,
    dim: usize,
}

impl TryFrom<RawSpec> for CopulaSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        CopulaSpec::new(raw.family, raw.params, raw.dim)
    }
}

impl From<CopulaSpec> for RawSpec {
    fn from(spec: CopulaSpec) -> Self {
        RawSpec {
            family: spec.family,
            params: spec.params,
            dim: spec.dim,
        }
    }
}

fn domain(family: Family, msg: impl Into<String>) -> Error {
    Error::ParameterDomain(format!("{family}: {}", msg.into()))
}

impl CopulaSpec {
    pub fn new(family: Family, params: Vec<f64>, dim: usize) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(domain(
                family,
                format!("expected {} parameter(s), got {}", family.arity(), params.len()),
            ));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(domain(family, "parameters must be finite"));
        }
        if !family.supports_dim(dim) {
            return Err(domain(family, format!("dimension {dim} is not supported")));
        }
        let p = &params;
        match family {
            Family::Independence => {}
            Family::Gaussian | Family::StudentT => {
                let rho = p[0];
                if !(rho > -1.0 && rho < 1.0) {
                    return Err(domain(family, format!("rho = {rho} must lie in (-1, 1)")));
                }
                if dim > 2 && rho < 0.0 {
                    return Err(domain(family, "exchangeable correlation must be nonnegative for dim > 2"));
                }
                if family == Family::StudentT && p[1] <= 0.0 {
                    return Err(domain(family, format!("nu = {} must be positive", p[1])));
                }
            }
            Family::Clayton => {
                if p[0] <= 0.0 {
                    return Err(domain(family, format!("theta = {} must be positive", p[0])));
                }
            }
            Family::Frank => {
                if p[0] == 0.0 {
                    return Err(domain(family, "theta must be nonzero"));
                }
                if dim > 2 && p[0] < 0.0 {
                    return Err(domain(family, "theta must be positive for dim > 2"));
                }
            }
            Family::Gumbel => {
                if p[0] < 1.0 {
                    return Err(domain(family, format!("theta = {} must be at least 1", p[0])));
                }
            }
            Family::SymJoeClayton => {
                if p.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
                    return Err(domain(family, "tail dependence parameters must lie in (0, 1)"));
                }
            }
            Family::Plackett => {
                if p[0] <= 0.0 {
                    return Err(domain(family, format!("theta = {} must be positive", p[0])));
                }
            }
        }
        Ok(CopulaSpec { family, params, dim })
    }

    pub fn independence(dim: usize) -> Result<Self> {
        Self::new(Family::Independence, vec![], dim)
    }

    pub fn gaussian(rho: f64) -> Result<Self> {
        Self::new(Family::Gaussian, vec![rho], 2)
    }

    pub fn student_t(rho: f64, nu: f64) -> Result<Self> {
        Self::new(Family::StudentT, vec![rho, nu], 2)
    }

    pub fn clayton(theta: f64) -> Result<Self> {
        Self::new(Family::Clayton, vec![theta], 2)
    }

    pub fn frank(theta: f64) -> Result<Self> {
        Self::new(Family::Frank, vec![theta], 2)
    }

    pub fn gumbel(theta: f64) -> Result<Self> {
        Self::new(Family::Gumbel, vec![theta], 2)
    }

    pub fn sym_joe_clayton(lambda_upper: f64, lambda_lower: f64) -> Result<Self> {
        Self::new(Family::SymJoeClayton, vec![lambda_upper, lambda_lower], 2)
    }

    pub fn plackett(theta: f64) -> Result<Self> {
        Self::new(Family::Plackett, vec![theta], 2)
    }

    /// Same family and parameters in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.family, self.params.clone(), dim)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Population Kendall τ of any bivariate margin.
    pub fn kendall_tau(&self) -> Result<f64> {
        population_tau(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_validation() {
        let spec = CopulaSpec::student_t(0.3, 4.0).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"family":"StudentT","params":[0.3,4.0],"dim":2}"#);
        let back: CopulaSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);

        let bad = serde_json::from_str::<CopulaSpec>(r#"{"family":"Clayton","params":[-1.0],"dim":2}"#);
        assert!(bad.is_err());
        let bad = serde_json::from_str::<CopulaSpec>(r#"{"family":"Bogus","params":[],"dim":2}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn parameter_domains() {
        assert!(CopulaSpec::gaussian(1.0).is_err());
        assert!(CopulaSpec::frank(0.0).is_err());
        assert!(CopulaSpec::gumbel(0.99).is_err());
        assert!(CopulaSpec::plackett(0.0).is_err());
        assert!(CopulaSpec::sym_joe_clayton(0.5, 1.0).is_err());
        assert!(CopulaSpec::new(Family::Plackett, vec![2.0], 3).is_err());
        assert!(CopulaSpec::new(Family::Clayton, vec![2.0], 4).is_ok());
        assert!(CopulaSpec::new(Family::Gaussian, vec![-0.2], 3).is_err());
        assert!(CopulaSpec::new(Family::Independence, vec![], 1).is_err());
        assert!(CopulaSpec::new(Family::Gumbel, vec![1.0, 2.0], 2).is_err());
    }

    #[test]
    fn family_names_parse_case_insensitively() {
        for f in Family::ALL {
            assert_eq!(f.name().to_lowercase().parse::<Family>().unwrap(), f);
        }
        assert!("copula".parse::<Family>().is_err());
    }
}
