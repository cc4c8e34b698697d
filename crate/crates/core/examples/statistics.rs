//! Closed-form and grid versions of the statistics on the same pair of samples.

use copeq::copulas::{sample, tau_to_params, TauAux};
use copeq::rng::substream;
use copeq::{cvm_statistic, grid_lp_statistic, ks_statistic, pseudo_obs, Family};

fn main() -> copeq::Result<()> {
    let a = tau_to_params(Family::Plackett, 0.3, TauAux::default())?;
    let b = tau_to_params(Family::SymJoeClayton, 0.3, TauAux::default())?;
    let p1 = pseudo_obs(&sample(&a, 60, &mut substream(4, 0))?)?;
    let p2 = pseudo_obs(&sample(&b, 45, &mut substream(4, 1))?)?;

    println!("L2 closed form  {:.6}", cvm_statistic(&p1, &p2)?.value);
    for r in [10, 100, 1000] {
        println!("L2 grid {r:>5}   {:.6}", grid_lp_statistic(&p1, &p2, 2.0, r)?.value);
    }
    println!("sup exact       {:.6}", ks_statistic(&p1, &p2)?.value);
    println!("sup grid   180  {:.6}", grid_lp_statistic(&p1, &p2, f64::INFINITY, 180)?.value);
    println!("L1 grid    200  {:.6}", grid_lp_statistic(&p1, &p2, 1.0, 200)?.value);
    Ok(())
}
