//! Generate a random SEM instance, sample from it, and write the sample to
//! CSV for use with the `ordcert` binary.
//!
//! ```sh
//! cargo run --example simulate_sem -- /tmp/sem.csv
//! ordcert confset --data /tmp/sem.csv --alpha 0.1 --seed 1
//! ```

use ordcert::simlab::{gen_graph_gof, sample_sem, DistSpec, ErrorDist, SemSpec};

fn main() -> ordcert::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "/tmp/sem.csv".to_string());
    let (p, n) = (8, 1000);

    let dag = gen_graph_gof(p, 42);
    println!("graph on {p} nodes with {} edges", dag.edge_count());

    // mixed errors: each node gets one of the five distributions at random
    let mut rng = {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(42)
    };
    let spec = SemSpec::with_dist_spec(dag, DistSpec::Mixed, n, false, &mut rng);
    println!("per-node error distributions: {:?}", spec.error_dists);

    let data = sample_sem(&spec, 42)?;
    data.write_csv(&path)?;
    println!("wrote {} rows x {} columns to {path}", data.n(), data.p());

    // the five centered distributions, for reference
    for dist in ErrorDist::ALL {
        println!("available error distribution: {dist:?}");
    }
    Ok(())
}
