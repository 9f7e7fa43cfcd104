//! A desk-scale empirical size and power study of the goodness-of-fit test
//! across error distributions.
//!
//! ```sh
//! cargo run --example size_power
//! ```

use ordcert::gof::{GofConfig, TestFunctionSet};
use ordcert::simlab::{run_size_power, DistSpec, ErrorDist};

fn main() -> ordcert::Result<()> {
    let tf = TestFunctionSet::default();
    let cfg = GofConfig::default().with_seed(11).with_reps(199);
    let (p, n, reps, alpha) = (10, 100, 100, 0.1);

    println!("p = {p}, n = {n}, alpha = {alpha}, {reps} replicates per cell\n");
    println!("{:<12} {:>8} {:>8}", "errors", "size", "power");
    for dist in [ErrorDist::Gamma, ErrorDist::Lognormal, ErrorDist::Uniform] {
        let report = run_size_power(p, n, DistSpec::Fixed(dist), reps, alpha, &tf, &cfg)?;
        let cell = format!("p={p},n={n},dist={:?}", dist).to_lowercase();
        let size = report.metric(&cell, "size").unwrap();
        let power = report.metric(&cell, "power").unwrap();
        println!("{:<12} {:>8.3} {:>8.3}", format!("{dist:?}").to_lowercase(), size, power);
    }
    println!("\nskewed errors give the test power; uniform errors leave it nearly blind.");
    Ok(())
}
