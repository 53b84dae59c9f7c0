//! Times map-plus-scan unions at growing map sizes in the three attribution
//! modes and prints the medians.

use polymap::bench::{growth_exponent, run_bench, BenchConfig, BenchMode, BenchRow};

fn main() {
    let config = BenchConfig {
        trials: 3,
        ..BenchConfig::default()
    };
    println!("{}", BenchRow::CSV_HEADER);
    let rows = run_bench(&config, |r| println!("{}", r.to_csv()));
    for mode in BenchMode::ALL {
        if let Some(k) = growth_exponent(&rows, mode) {
            println!("{}: time ~ vertices^{k:.2}", mode.name());
        }
    }
}
