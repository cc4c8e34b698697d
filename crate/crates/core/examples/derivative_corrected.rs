//! Derivative-corrected permutation test and its tuning knobs.

use copeq::copulas::{sample, tau_to_params, TauAux};
use copeq::derivatives::Bandwidth;
use copeq::rng::substream;
use copeq::{pseudo_obs, run_test_with, Family, Method, PermutationPlan, StatisticKind, Thm31Options};

fn main() -> copeq::Result<()> {
    let c1 = tau_to_params(Family::Frank, 0.3, TauAux::default())?;
    let c2 = tau_to_params(Family::Frank, 0.55, TauAux::default())?;
    let p1 = pseudo_obs(&sample(&c1, 80, &mut substream(3, 0))?)?;
    let p2 = pseudo_obs(&sample(&c2, 80, &mut substream(3, 1))?)?;
    let plan = PermutationPlan::monte_carlo(499, 11);

    for (grid, bandwidth) in [(None, Bandwidth::default()), (Some(30), Bandwidth::Fixed(0.1))] {
        let opts = Thm31Options { grid, bandwidth };
        let r = run_test_with(&p1, &p2, StatisticKind::Cvm, Method::Thm31, &plan, 0.05, &opts)?;
        println!("grid {grid:?}, bandwidth {bandwidth:?}: T = {:.4}, p = {:.4}, {:?}", r.statistic, r.p_value, r.decision);
    }
    let r = run_test_with(&p1, &p2, StatisticKind::Cvm, Method::Thm32, &plan, 0.05, &Thm31Options::default())?;
    println!("re-ranked test for comparison: T = {:.4}, p = {:.4}", r.statistic, r.p_value);
    Ok(())
}
