//! Lower and upper exceedance Kendall's tau for two tail-asymmetric copulas.

use copeq::copulas::{sample, tau_to_params, TauAux};
use copeq::measures::{exceedance_sweep, write_exceedance_csv, DEFAULT_LEVELS};
use copeq::rng::substream;
use copeq::{pseudo_obs, Family};

fn main() -> copeq::Result<()> {
    for family in [Family::Clayton, Family::Gumbel] {
        let spec = tau_to_params(family, 0.5, TauAux::default())?;
        let p = pseudo_obs(&sample(&spec, 5000, &mut substream(8, 0))?)?;
        println!("# {}", family.name());
        write_exceedance_csv(&exceedance_sweep(&p, &DEFAULT_LEVELS)?, std::io::stdout())?;
    }
    Ok(())
}
