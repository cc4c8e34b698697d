use std::path::Path;

use copeq::sim::{load_config, run_table};

#[test]
fn bundled_config_holds_size() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/size_small_cvm.cfg");
    let cells = load_config(&path).unwrap();
    assert_eq!(cells.len(), 21);
    let outcome = run_table(&cells, std::thread::available_parallelism().map_or(1, |n| n.get()), None).unwrap();
    assert!(outcome.failures.is_empty());
    for result in &outcome.results {
        for rate in &result.rates {
            assert!(
                rate.rejection_rate <= rate.alpha + 3.0 * rate.stderr,
                "{} ({}, {}) at alpha {}: rate {}",
                result.config.copula1.family(),
                result.config.n,
                result.config.m,
                rate.alpha,
                rate.rejection_rate
            );
        }
    }
}
