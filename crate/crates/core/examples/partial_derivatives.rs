//! Finite-difference estimate of the first partial derivative against the Gaussian closed form.

use copeq::copulas::{partial_1, sample, CopulaSpec};
use copeq::derivatives::{Bandwidth, PartialEstimator};
use copeq::rng::substream;
use copeq::pseudo_obs;

fn main() -> copeq::Result<()> {
    let spec = CopulaSpec::gaussian(0.5)?;
    let x = sample(&spec, 5000, &mut substream(2, 0))?;
    let est = PartialEstimator::from_sample(pseudo_obs(&x)?, Bandwidth::default())?;
    println!("bandwidth {:.4}", est.bandwidth());
    println!("{:>5} {:>5} {:>9} {:>9}", "u", "v", "estimate", "exact");
    for u in [0.1, 0.5, 0.9] {
        for v in [0.2, 0.5, 0.8] {
            println!("{u:>5} {v:>5} {:>9.4} {:>9.4}", est.at(0, &[u, v])?, partial_1(&spec, u, v)?);
        }
    }
    Ok(())
}
