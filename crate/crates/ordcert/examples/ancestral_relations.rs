//! Extract certified ancestral relations and the Frechet-mean summary from
//! a confidence set of orderings.
//!
//! ```sh
//! cargo run --example ancestral_relations
//! ```

use ordcert::effects::{ancestral_bounds, frechet_mean, ordering_distance};
use ordcert::gof::{GofConfig, TestFunctionSet};
use ordcert::ordering::{confidence_set, Ordering};
use ordcert::simlab::{gen_graph_confset, sample_sem, ErrorDist, SemSpec};

fn main() -> ordcert::Result<()> {
    let (p, n) = (6, 2000);
    let dag = gen_graph_confset(p, n, 2);
    let spec = SemSpec::homogeneous(dag.clone(), ErrorDist::Lognormal, n, true);
    let data = sample_sem(&spec, 2)?;

    let tf = TestFunctionSet::default();
    let cfg = GofConfig::default().with_seed(2).with_reps(199);
    let cs = confidence_set(&data, 0.05, &tf, &cfg, None)?;
    println!("confidence set holds {} orderings", cs.count_orderings());
    if cs.is_empty() {
        println!("every ordering was rejected: the model class does not fit this data");
        return Ok(());
    }

    let bounds = ancestral_bounds(&cs)?;
    println!("\ncertified in every accepted ordering (lower bound):");
    for (u, v) in &bounds.lower {
        let truly = dag.ancestral_pairs().contains(&(*u, *v));
        println!("  Y{} precedes Y{}   (true ancestor: {})", u + 1, v + 1, truly);
    }
    println!(
        "upper bound holds {} of {} ordered pairs",
        bounds.upper.len(),
        p * (p - 1)
    );

    let fm = frechet_mean(&cs)?;
    let perm: Vec<usize> = fm.ordering.perm().iter().map(|v| v + 1).collect();
    println!("\nFrechet mean ordering: {perm:?}");
    println!("distance histogram (distance, count): {:?}", fm.histogram());

    let identity = Ordering::new((0..p).collect(), p)?;
    println!(
        "distance from the mean to the generation order: {}",
        ordering_distance(&fm.ordering, &identity)?
    );
    Ok(())
}
