//! Two-sample copula equality test on simulated data with different margins.

use copeq::copulas::{sample, tau_to_params, TauAux};
use copeq::rng::substream;
use copeq::{run_test_samples, Family, Method, PermutationPlan, StatisticKind};

fn main() -> copeq::Result<()> {
    let clayton = tau_to_params(Family::Clayton, 0.4, TauAux::default())?;
    let gumbel = tau_to_params(Family::Gumbel, 0.4, TauAux::default())?;

    let x1 = sample(&clayton, 150, &mut substream(1, 0))?;
    // Margins are irrelevant: put group 2 on a different scale.
    let x2 = sample(&gumbel, 120, &mut substream(1, 1))?.map_columns(|q, u| if q == 0 { u.ln() } else { 10.0 * u })?;

    let plan = PermutationPlan::monte_carlo(999, 42);
    for kind in [StatisticKind::Cvm, StatisticKind::Ks] {
        let report = run_test_samples(&x1, &x2, kind, Method::Thm32, &plan, 0.05)?;
        println!("{report}\n");
    }
    Ok(())
}
