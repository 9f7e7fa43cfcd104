//! Build a confidence set of causal orderings with the branch-and-bound
//! search and inspect its diagnostics.
//!
//! ```sh
//! cargo run --example confidence_set
//! ```

use ordcert::gof::{GofConfig, TestFunctionSet};
use ordcert::ordering::confidence_set;
use ordcert::simlab::{gen_graph_confset, sample_sem, ErrorDist, SemSpec};

fn main() -> ordcert::Result<()> {
    let (p, n) = (7, 1500);
    let dag = gen_graph_confset(p, n, 21);
    let spec = SemSpec::homogeneous(dag.clone(), ErrorDist::Gamma, n, true);
    let data = sample_sem(&spec, 21)?;

    let tf = TestFunctionSet::default();
    let cfg = GofConfig::default().with_seed(21).with_reps(199);
    let cs = confidence_set(&data, 0.1, &tf, &cfg, None)?;

    let factorial: f64 = (1..=p).map(|k| k as f64).product();
    println!(
        "accepted {} of {} orderings ({:.4}%)",
        cs.count_orderings(),
        factorial,
        100.0 * cs.count_orderings() as f64 / factorial
    );
    println!(
        "tests run: {}, wall time: {:.2}s",
        cs.diagnostics.tests_run, cs.diagnostics.wall_time_secs
    );
    println!(
        "prefixes alive per level: {:?}",
        cs.diagnostics.prefixes_alive_per_level
    );

    let covered = cs.orderings.iter().any(|a| dag.is_valid_ordering(&a.ordering()));
    println!("some valid ordering of the true graph accepted: {covered}");

    for a in cs.orderings.iter().take(5) {
        let perm: Vec<usize> = a.perm.iter().map(|v| v + 1).collect();
        println!("  {:?}  min_gamma {:.3}  Gamma {:.3}", perm, a.min_gamma, a.gamma);
    }
    if cs.count_orderings() > 5 {
        println!("  ... and {} more", cs.count_orderings() - 5);
    }
    Ok(())
}
