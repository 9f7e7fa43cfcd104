//! Confidence intervals for total and direct causal effects that account
//! for model uncertainty: one interval per plausible adjustment set,
//! unioned, with the point {0} attached when some accepted ordering makes
//! the effect impossible.
//!
//! ```sh
//! cargo run --example effect_intervals
//! ```

use ordcert::effects::{direct_effect_ci, total_effect_ci};
use ordcert::gof::{GofConfig, TestFunctionSet};
use ordcert::ordering::confidence_set;
use ordcert::simlab::{gen_graph, sample_sem, CoefficientLaw, ErrorDist, SemSpec};

fn main() -> ordcert::Result<()> {
    let (p, n) = (6, 800);
    let (cause, effect) = (1usize, 4usize); // 0-based: Y2 onto Y5
    let alpha = 0.2; // 80% intervals

    let dag = gen_graph(p, 1.0 / 3.0, CoefficientLaw::RademacherGamma { shape: 0.5 }, 5);
    let truth = dag.total_effects()[(effect, cause)];
    let direct_truth = dag
        .edges()
        .find(|&(u, v, _)| u == cause && v == effect)
        .map_or(0.0, |(_, _, w)| w);

    // raw data for the effect regressions, standardized copy for the search
    let spec = SemSpec::homogeneous(dag, ErrorDist::Gamma, n, false);
    let raw = sample_sem(&spec, 5)?;
    let std_data = raw.standardize()?;

    let tf = TestFunctionSet::default();
    let cfg = GofConfig::default().with_seed(5).with_reps(199);
    let cs = confidence_set(&std_data, alpha / 2.0, &tf, &cfg, None)?;
    println!("confidence set holds {} orderings", cs.count_orderings());

    let total = total_effect_ci(&raw, &cs, cause, effect, alpha)?;
    println!(
        "\ntotal effect of Y{} onto Y{} (truth {:.3}):",
        cause + 1,
        effect + 1,
        truth
    );
    print_union(&total.interval, total.adjustment_sets_used);

    let direct = direct_effect_ci(&raw, &cs, cause, effect, alpha)?;
    println!(
        "\ndirect effect of Y{} onto Y{} (truth {:.3}):",
        cause + 1,
        effect + 1,
        direct_truth
    );
    print_union(&direct.interval, direct.adjustment_sets_used);
    Ok(())
}

fn print_union(u: &ordcert::effects::IntervalUnion, sets: usize) {
    let mut parts = Vec::new();
    if u.includes_zero_point() {
        parts.push("{0}".to_string());
    }
    for (lo, hi) in u.intervals() {
        parts.push(format!("[{lo:.3}, {hi:.3}]"));
    }
    println!("  {}   ({} adjustment sets)", parts.join(" u "), sets);
}
