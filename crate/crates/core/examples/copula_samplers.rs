//! Sample every family at a target Kendall's tau and compare with the empirical tau.

use copeq::copulas::{cdf, population_tau, sample, tau_to_params, TauAux};
use copeq::measures::kendall_tau;
use copeq::rng::substream;
use copeq::Family;

fn main() -> copeq::Result<()> {
    let families = [
        Family::Gaussian,
        Family::StudentT,
        Family::Clayton,
        Family::Frank,
        Family::Gumbel,
        Family::SymJoeClayton,
        Family::Plackett,
    ];
    println!("{:<14} {:>8} {:>10} {:>10} {:>12}", "family", "target", "model", "sample", "C(.5,.5)");
    for (i, family) in families.into_iter().enumerate() {
        let spec = tau_to_params(family, 0.5, TauAux::default())?;
        let x = sample(&spec, 20_000, &mut substream(5, i as u64))?;
        println!(
            "{:<14} {:>8.3} {:>10.4} {:>10.4} {:>12.4}",
            family.name(),
            0.5,
            population_tau(&spec)?,
            kendall_tau(&x.column(0), &x.column(1))?,
            cdf(&spec, &[0.5, 0.5])?
        );
    }
    Ok(())
}
