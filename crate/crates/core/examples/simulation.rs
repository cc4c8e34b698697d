//! A small size-and-power table written as CSV.

use copeq::copulas::{tau_to_params, TauAux};
use copeq::sim::{parse_config, run_table, write_results, SimConfig};
use copeq::{Family, StatisticKind};

const CONFIG: &str = r#"
[[cell]]
copula1 = { family = "clayton", tau = 0.3 }
copula2 = { family = "clayton", tau = 0.3 }
n = 20
m = 20
alpha = [0.05, 0.1]
kinds = ["cvm", "ks"]
replications = 100
permutations = 100
seed = 1
"#;

fn main() -> copeq::Result<()> {
    let mut cells = parse_config(CONFIG)?;
    let mut power = SimConfig::new(
        tau_to_params(Family::Gaussian, 0.2, TauAux::default())?,
        tau_to_params(Family::Gaussian, 0.6, TauAux::default())?,
        40,
        40,
    );
    power.kinds = vec![StatisticKind::Cvm, StatisticKind::Ks];
    power.replications = 100;
    power.permutations = 100;
    cells.push(power);

    let outcome = run_table(&cells, 2, None)?;
    write_results(&outcome.results, std::io::stdout())
}
