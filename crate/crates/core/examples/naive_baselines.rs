//! Why raw-row permutation fails when the margins differ.

use copeq::copulas::{tau_to_params, TauAux};
use copeq::sim::{run_cell, Margins, SimConfig};
use copeq::{Family, Method};

fn main() -> copeq::Result<()> {
    let g = tau_to_params(Family::Gaussian, 1.0 / 3.0, TauAux::default())?;
    println!("{:<11} {:<9} rejection rate at 5%", "method", "margins");
    for margins in [Margins::Uniform, Margins::normal(2, (0.0, 1.0), (5.0, 1.0))] {
        for method in [Method::Thm32, Method::NaiveW, Method::NaiveZhat] {
            let mut cfg = SimConfig::new(g.clone(), g.clone(), 60, 60);
            cfg.margins = margins.clone();
            cfg.method = method;
            cfg.replications = 200;
            cfg.permutations = 200;
            cfg.seed = 17;
            let r = run_cell(&cfg)?;
            println!("{:<11} {:<9} {:.3}", method.name(), margins.label(), r.rates[0].rejection_rate);
        }
    }
    Ok(())
}
