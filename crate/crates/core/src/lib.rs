//! Randomization tests for equality of the copulas of two samples.
//!
//! The two groups are reduced to pseudo-observations (normalized ranks), and
//! the distance between their empirical copulas is compared with its
//! permutation distribution. Two valid permutation schemes are provided:
//! re-ranking within each group after permuting the pooled pseudo-sample,
//! and a derivative-corrected version without re-ranking. Two invalid
//! "naive" schemes are kept for diagnostics.
//!
//! ```
//! use copeq::{pseudo_obs, run_test, Method, PermutationPlan, Sample, StatisticKind};
//!
//! let x = Sample::from_rows(&[vec![0.1, 0.3], vec![0.5, 0.2], vec![0.9, 0.8], vec![0.4, 0.6]])?;
//! let y = Sample::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0], vec![2.0, 4.0], vec![5.0, 3.0]])?;
//! let (p1, p2) = (pseudo_obs(&x)?, pseudo_obs(&y)?);
//! let plan = PermutationPlan::monte_carlo(199, 7);
//! let report = run_test(&p1, &p2, StatisticKind::Cvm, Method::Thm32, &plan, 0.05)?;
//! assert!(report.p_value > 0.0 && report.p_value <= 1.0);
//! # Ok::<(), copeq::Error>(())
//! ```

pub mod cli;
pub mod copulas;
pub mod derivatives;
pub mod error;
pub mod measures;
pub mod numeric;
pub mod permute;
pub mod ranks;
pub mod rng;
pub mod sim;
pub mod stats;

pub use copulas::{CopulaSpec, Family};
pub use error::{Error, Result};
pub use ranks::{empirical_copula, pool, pseudo_obs, rerank, rerank_groups, PooledPseudo, PseudoSample, Sample};
pub use stats::{cvm_statistic, grid_lp_statistic, ks_statistic, statistic, StatValue, StatisticKind};
pub use permute::{
    run_test, run_test_samples, run_test_with, Decision, Method, PermDistribution, PermutationPlan, TestReport,
    Thm31Options,
};
pub use sim::{run_cell, run_table, Margins, SimConfig, SimResult};
