//! Post-processing a confidence set of orderings into causal conclusions.
//!
//! Every ordering in the set implies an adjustment set for a given
//! cause-effect pair; running the effect regression once per distinct
//! adjustment set and taking the union of the per-set confidence intervals
//! yields an interval that accounts for model uncertainty, not just
//! sampling noise. The set also bounds the ancestral relations from below
//! (pairs ordered the same way in every accepted ordering) and above (pairs
//! ordered that way in at least one), and can be summarized by its Frechet
//! mean under a rank-disagreement distance.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::dataset::Dataset;
use crate::design::FactoredDesign;
use crate::error::{Error, Result};
use crate::ordering::{ConfidenceSet, Ordering};

// ---------------------------------------------------------------------------
// Interval unions
// ---------------------------------------------------------------------------

/// A finite union of disjoint closed intervals, possibly with the isolated
/// point {0} attached.
///
/// Construction normalizes: intervals are sorted and overlapping or touching
/// intervals are merged, so the stored representation is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    #[serde(rename = "includes_zero")]
    include_zero_point: bool,
}

impl IntervalUnion {
    pub fn new(raw: Vec<(f64, f64)>, include_zero_point: bool) -> Result<Self> {
        let mut cleaned = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(Error::NonFiniteInput { context: "interval endpoints" });
            }
            if lo > hi {
                return Err(Error::InvalidParameter(format!(
                    "interval [{lo}, {hi}] has lo > hi"
                )));
            }
            cleaned.push((lo, hi));
        }
        cleaned.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(cleaned.len());
        for (lo, hi) in cleaned {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self {
            intervals: merged,
            include_zero_point,
        })
    }

    /// The empty union.
    pub fn empty() -> Self {
        Self {
            intervals: Vec::new(),
            include_zero_point: false,
        }
    }

    /// Just the point {0}.
    pub fn zero_point() -> Self {
        Self {
            intervals: Vec::new(),
            include_zero_point: true,
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn includes_zero_point(&self) -> bool {
        self.include_zero_point
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.include_zero_point && x == 0.0)
            || self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Sum of interval lengths; the {0} atom contributes nothing.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && !self.include_zero_point
    }
}

// ---------------------------------------------------------------------------
// Effect confidence intervals
// ---------------------------------------------------------------------------

/// Which causal quantity an effect interval targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectKind {
    Total,
    Direct,
}

/// An effect interval with its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct EffectCi {
    pub interval: IntervalUnion,
    /// Number of distinct adjustment sets behind the union.
    pub adjustment_sets_used: usize,
    pub kind: EffectKind,
    pub cause: usize,
    pub effect: usize,
    pub alpha: f64,
}

/// 1-alpha confidence interval for the total effect of `cause` onto
/// `effect`, accounting for model uncertainty.
///
/// For every distinct adjustment set S = pr(cause) over accepted orderings
/// that place the cause before the effect, regresses Y_effect onto
/// {intercept, Y_S, Y_cause} and takes the two-sided 1-alpha/2 t-interval
/// for the Y_cause coefficient; the result is the union. The point {0}
/// joins the union when some accepted ordering places the cause after the
/// effect, since those orderings are consistent with no effect at all.
///
/// `cs` must have been computed at level alpha/2, so the union inherits
/// 1-alpha coverage.
pub fn total_effect_ci(
    d: &Dataset,
    cs: &ConfidenceSet,
    cause: usize,
    effect: usize,
    alpha: f64,
) -> Result<EffectCi> {
    effect_ci(d, cs, cause, effect, alpha, EffectKind::Total)
}

/// 1-alpha confidence interval for the direct effect of `cause` onto
/// `effect`. Identical to [`total_effect_ci`] except the adjustment set is
/// pr(effect), which automatically contains the cause for the orderings
/// considered.
pub fn direct_effect_ci(
    d: &Dataset,
    cs: &ConfidenceSet,
    cause: usize,
    effect: usize,
    alpha: f64,
) -> Result<EffectCi> {
    effect_ci(d, cs, cause, effect, alpha, EffectKind::Direct)
}

fn effect_ci(
    d: &Dataset,
    cs: &ConfidenceSet,
    cause: usize,
    effect: usize,
    alpha: f64,
    kind: EffectKind,
) -> Result<EffectCi> {
    if cause == effect {
        return Err(Error::InvalidParameter(
            "cause and effect must differ".into(),
        ));
    }
    if cause >= d.p() {
        return Err(Error::IndexOutOfRange { index: cause, p: d.p() });
    }
    if effect >= d.p() {
        return Err(Error::IndexOutOfRange { index: effect, p: d.p() });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    if (cs.alpha - alpha / 2.0).abs() > 1e-12 {
        return Err(Error::AlphaMismatch {
            cs_alpha: cs.alpha,
            expected: alpha / 2.0,
        });
    }
    if cs.is_empty() {
        return Err(Error::EmptyConfidenceSet);
    }

    // Distinct adjustment sets from orderings placing cause before effect;
    // {0} joins when any ordering reverses them.
    let mut adjustment_sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut include_zero = false;
    for acc in &cs.orderings {
        let pos_cause = acc.perm.iter().position(|&x| x == cause).unwrap();
        let pos_effect = acc.perm.iter().position(|&x| x == effect).unwrap();
        if pos_cause < pos_effect {
            let mut s: Vec<usize> = match kind {
                EffectKind::Total => acc.perm[..pos_cause].to_vec(),
                EffectKind::Direct => acc.perm[..pos_effect]
                    .iter()
                    .copied()
                    .filter(|&x| x != cause)
                    .collect(),
            };
            s.sort_unstable();
            adjustment_sets.insert(s);
        } else {
            include_zero = true;
        }
    }

    let sets: Vec<&Vec<usize>> = adjustment_sets.iter().collect();
    let intervals: Result<Vec<(f64, f64)>> = sets
        .par_iter()
        .map(|s| single_adjustment_ci(d, effect, cause, s, 1.0 - alpha / 2.0))
        .collect();
    let interval = IntervalUnion::new(intervals?, include_zero)?;
    Ok(EffectCi {
        interval,
        adjustment_sets_used: adjustment_sets.len(),
        kind,
        cause,
        effect,
        alpha,
    })
}

/// Two-sided `level` t-interval for the coefficient of `target_var` when
/// regressing `response` onto {intercept} ∪ adjust ∪ {target_var}: the
/// single-adjustment-set building block of the unions above.
pub fn single_adjustment_ci(
    d: &Dataset,
    response: usize,
    target_var: usize,
    adjust: &[usize],
    level: f64,
) -> Result<(f64, f64)> {
    let mut regressors: Vec<usize> = adjust.to_vec();
    if !regressors.contains(&target_var) {
        regressors.push(target_var);
    }
    regressors.sort_unstable();
    let x = crate::design::build_design(d, &regressors, &crate::design::BasisSpec::Linear)?;
    let factor = FactoredDesign::new(&x)?;
    let fit = factor.fit(d.column(response)?)?;
    let n = d.n();
    let k = x.ncols();
    let df = (n - k) as f64;
    let sigma2 = fit.rss() / df;
    let diag = factor.xtx_inverse_diagonal()?;
    let coef_index = 1 + regressors.iter().position(|&u| u == target_var).unwrap();
    let se = (sigma2 * diag[coef_index]).sqrt();
    let t = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InvalidParameter(format!("t distribution: {e}")))?;
    let q = t.inverse_cdf(1.0 - (1.0 - level) / 2.0);
    let b = fit.coefficients[coef_index];
    Ok((b - q * se, b + q * se))
}

// ---------------------------------------------------------------------------
// Ancestral bounds
// ---------------------------------------------------------------------------

/// Lower and upper bounds on the ancestral relation implied by a confidence
/// set: `lower` holds (u, v) pairs with u before v in *every* accepted
/// ordering, `upper` those with u before v in *at least one*.
#[derive(Debug, Clone, Serialize)]
pub struct AncestralBounds {
    pub lower: BTreeSet<(usize, usize)>,
    pub upper: BTreeSet<(usize, usize)>,
}

pub fn ancestral_bounds(cs: &ConfidenceSet) -> Result<AncestralBounds> {
    if cs.is_empty() {
        return Err(Error::EmptyConfidenceSet);
    }
    let p = cs.p;
    let mut lower = BTreeSet::new();
    let mut upper = BTreeSet::new();
    let positions: Vec<Vec<usize>> = cs.orderings.iter().map(|a| positions_of(&a.perm)).collect();
    for u in 0..p {
        for v in 0..p {
            if u == v {
                continue;
            }
            let mut all = true;
            let mut any = false;
            for pos in &positions {
                if pos[u] < pos[v] {
                    any = true;
                } else {
                    all = false;
                }
            }
            if all {
                lower.insert((u, v));
            }
            if any {
                upper.insert((u, v));
            }
        }
    }
    Ok(AncestralBounds { lower, upper })
}

fn positions_of(perm: &[usize]) -> Vec<usize> {
    let mut pos = vec![0usize; perm.len()];
    for (i, &v) in perm.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

// ---------------------------------------------------------------------------
// Ordering distance and Frechet mean
// ---------------------------------------------------------------------------

/// Number of ordered pairs ranked one way by `a` and the other way by `b`
/// (the pair-disagreement distance between total orderings; symmetric).
pub fn ordering_distance(a: &Ordering, b: &Ordering) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::OrderingLengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let pos_a = positions_of(a.perm());
    let pos_b = positions_of(b.perm());
    Ok(distance_from_positions(&pos_a, &pos_b))
}

fn distance_from_positions(pos_a: &[usize], pos_b: &[usize]) -> usize {
    let p = pos_a.len();
    let mut d = 0;
    for u in 0..p {
        for v in (u + 1)..p {
            if (pos_a[u] < pos_a[v]) != (pos_b[u] < pos_b[v]) {
                d += 1;
            }
        }
    }
    d
}

/// The Frechet mean of a confidence set with its distance profile.
#[derive(Debug, Clone, Serialize)]
pub struct FrechetMean {
    pub ordering: Ordering,
    /// Sum of squared distances from the mean to every member.
    pub sum_squared: u64,
    /// Distance from the mean to each member, in the set's stored order.
    pub distances: Vec<usize>,
}

impl FrechetMean {
    /// Histogram of the distance profile as (distance, count) pairs.
    pub fn histogram(&self) -> Vec<(usize, usize)> {
        let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
        for &d in &self.distances {
            *counts.entry(d).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }
}

/// The member of the confidence set minimizing the sum of squared distances
/// to all members (a medoid). Ties break lexicographically; the orderings
/// are stored in lexicographic order, so the first minimizer wins.
pub fn frechet_mean(cs: &ConfidenceSet) -> Result<FrechetMean> {
    if cs.is_empty() {
        return Err(Error::EmptyConfidenceSet);
    }
    let positions: Vec<Vec<usize>> = cs.orderings.iter().map(|a| positions_of(&a.perm)).collect();
    let sums: Vec<u64> = positions
        .par_iter()
        .map(|pa| {
            positions
                .iter()
                .map(|pb| {
                    let d = distance_from_positions(pa, pb) as u64;
                    d * d
                })
                .sum()
        })
        .collect();
    let best = sums
        .iter()
        .enumerate()
        .min_by_key(|(_, &s)| s)
        .map(|(i, _)| i)
        .unwrap();
    let distances: Vec<usize> = positions
        .iter()
        .map(|pb| distance_from_positions(&positions[best], pb))
        .collect();
    Ok(FrechetMean {
        ordering: cs.orderings[best].ordering(),
        sum_squared: sums[best],
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{AcceptedOrdering, SearchDiagnostics};
    use approx::assert_abs_diff_eq;

    fn fake_cs(perms: Vec<Vec<usize>>, p: usize, alpha: f64) -> ConfidenceSet {
        ConfidenceSet {
            alpha,
            p,
            orderings: perms
                .into_iter()
                .map(|perm| AcceptedOrdering {
                    perm,
                    min_gamma: 0.5,
                    gamma: 0.9,
                })
                .collect(),
            diagnostics: SearchDiagnostics::default(),
            exhausted: true,
        }
    }

    fn line_dataset(n: usize, slope: f64, seed: u64) -> Dataset {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| slope * v + 0.3 * rng.random_range(-1.0..1.0_f64))
            .collect();
        Dataset::from_columns(vec![x, y], vec!["Y1".into(), "Y2".into()]).unwrap()
    }

    #[test]
    fn interval_union_merges_and_sorts() {
        let u = IntervalUnion::new(vec![(1.0, 2.0), (-1.0, 0.5), (0.4, 1.2), (3.0, 4.0)], true)
            .unwrap();
        assert_eq!(u.intervals(), &[(-1.0, 2.0), (3.0, 4.0)]);
        assert!(u.includes_zero_point());
        assert!(u.contains(0.0));
        assert!(u.contains(1.5));
        assert!(!u.contains(2.5));
        assert_abs_diff_eq!(u.total_length(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn interval_union_normalization_idempotent_and_membership_preserved() {
        let raw = vec![(0.0, 1.0), (0.5, 2.0), (2.0, 3.0), (5.0, 5.0)];
        let u = IntervalUnion::new(raw.clone(), false).unwrap();
        let again = IntervalUnion::new(u.intervals().to_vec(), false).unwrap();
        assert_eq!(u, again);
        for x in [-0.1, 0.0, 0.7, 1.5, 2.5, 3.0, 4.0, 5.0, 5.1] {
            let in_raw = raw.iter().any(|&(lo, hi)| lo <= x && x <= hi);
            assert_eq!(u.contains(x), in_raw, "x = {x}");
        }
    }

    #[test]
    fn interval_union_rejects_bad_input() {
        assert!(IntervalUnion::new(vec![(2.0, 1.0)], false).is_err());
        assert!(IntervalUnion::new(vec![(f64::NAN, 1.0)], false).is_err());
    }

    #[test]
    fn total_effect_single_adjustment_set() {
        // cause first in every ordering with empty pr(cause): one regression,
        // no {0} atom
        let d = line_dataset(400, 1.7, 3);
        let cs = fake_cs(vec![vec![0, 1]], 2, 0.05);
        let ci = total_effect_ci(&d, &cs, 0, 1, 0.1).unwrap();
        assert_eq!(ci.adjustment_sets_used, 1);
        assert!(!ci.interval.includes_zero_point());
        assert_eq!(ci.interval.intervals().len(), 1);
        assert!(ci.interval.contains(1.7));
    }

    #[test]
    fn effect_is_zero_point_when_cause_always_after_effect() {
        let d = line_dataset(100, 0.9, 4);
        let cs = fake_cs(vec![vec![1, 0]], 2, 0.05);
        let ci = total_effect_ci(&d, &cs, 0, 1, 0.1).unwrap();
        assert!(ci.interval.includes_zero_point());
        assert!(ci.interval.intervals().is_empty());
        assert_eq!(ci.adjustment_sets_used, 0);
    }

    #[test]
    fn direct_equals_total_for_p2_single_ordering() {
        let d = line_dataset(300, -0.8, 5);
        let cs = fake_cs(vec![vec![0, 1]], 2, 0.05);
        let total = total_effect_ci(&d, &cs, 0, 1, 0.1).unwrap();
        let direct = direct_effect_ci(&d, &cs, 0, 1, 0.1).unwrap();
        assert_eq!(total.interval, direct.interval);
    }

    #[test]
    fn effect_ci_validates_inputs() {
        let d = line_dataset(50, 1.0, 6);
        let cs = fake_cs(vec![vec![0, 1]], 2, 0.05);
        assert!(matches!(
            total_effect_ci(&d, &cs, 0, 0, 0.1).unwrap_err(),
            Error::InvalidParameter(_)
        ));
        // cs at wrong level
        assert!(matches!(
            total_effect_ci(&d, &cs, 0, 1, 0.2).unwrap_err(),
            Error::AlphaMismatch { .. }
        ));
        let empty = fake_cs(vec![], 2, 0.05);
        assert!(matches!(
            total_effect_ci(&d, &empty, 0, 1, 0.1).unwrap_err(),
            Error::EmptyConfidenceSet
        ));
    }

    #[test]
    fn ancestral_bounds_singleton_and_full() {
        let cs = fake_cs(vec![vec![2, 0, 1]], 3, 0.05);
        let b = ancestral_bounds(&cs).unwrap();
        let expected: BTreeSet<(usize, usize)> = [(2, 0), (2, 1), (0, 1)].into_iter().collect();
        assert_eq!(b.lower, expected);
        assert_eq!(b.upper, expected);

        let all_perms = fake_cs(
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0],
            ],
            3,
            0.05,
        );
        let b = ancestral_bounds(&all_perms).unwrap();
        assert!(b.lower.is_empty());
        assert_eq!(b.upper.len(), 6); // every ordered pair appears somewhere
    }

    #[test]
    fn ancestral_bounds_complement_relation() {
        let cs = fake_cs(
            vec![vec![0, 1, 2, 3], vec![0, 2, 1, 3], vec![1, 0, 2, 3]],
            4,
            0.05,
        );
        let b = ancestral_bounds(&cs).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                if u == v {
                    continue;
                }
                assert_eq!(
                    b.lower.contains(&(u, v)),
                    !b.upper.contains(&(v, u)),
                    "pair ({u},{v})"
                );
            }
        }
        assert!(b.lower.is_subset(&b.upper));
    }

    #[test]
    fn distance_axioms() {
        let t123 = Ordering::new(vec![0, 1, 2], 3).unwrap();
        let t321 = Ordering::new(vec![2, 1, 0], 3).unwrap();
        let t213 = Ordering::new(vec![1, 0, 2], 3).unwrap();
        assert_eq!(ordering_distance(&t123, &t123).unwrap(), 0);
        assert_eq!(ordering_distance(&t123, &t321).unwrap(), 3);
        assert_eq!(ordering_distance(&t123, &t213).unwrap(), 1);
        assert_eq!(
            ordering_distance(&t123, &t321).unwrap(),
            ordering_distance(&t321, &t123).unwrap()
        );
        let short = Ordering::new(vec![0, 1], 3).unwrap();
        assert!(ordering_distance(&t123, &short).is_err());
    }

    #[test]
    fn frechet_mean_three_ordering_example() {
        // exhaustive evaluation over the three candidates picks (1,2,3)
        let cs = fake_cs(vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2]], 3, 0.05);
        let fm = frechet_mean(&cs).unwrap();
        assert_eq!(fm.ordering.perm(), &[0, 1, 2]);
        assert_eq!(fm.sum_squared, 2); // 1^2 + 1^2
        assert_eq!(fm.distances, vec![0, 1, 1]);
        assert_eq!(fm.histogram(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn frechet_mean_singleton_is_that_ordering() {
        let cs = fake_cs(vec![vec![1, 2, 0]], 3, 0.05);
        let fm = frechet_mean(&cs).unwrap();
        assert_eq!(fm.ordering.perm(), &[1, 2, 0]);
        assert_eq!(fm.sum_squared, 0);
    }

    #[test]
    fn effect_ci_nests_across_levels_on_fixed_data() {
        // a smaller nominal alpha pairs a larger confidence set with wider
        // per-set intervals, so its union must contain the looser one's
        use crate::gof::{GofConfig, TestFunctionSet};
        use crate::ordering::{confidence_set_cached, PrefixCache};
        use crate::simlab::{gen_graph_gof, sample_sem, ErrorDist, SemSpec};

        let dag = gen_graph_gof(4, 33);
        let spec = SemSpec::homogeneous(dag, ErrorDist::Gamma, 400, false);
        let raw = sample_sem(&spec, 33).unwrap();
        let std_data = raw.standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(33).with_reps(199);
        let cache = PrefixCache::new();
        let (alpha_tight, alpha_loose) = (0.1, 0.2);
        let cs_tight =
            confidence_set_cached(&std_data, alpha_tight / 2.0, &tf, &cfg, None, &cache).unwrap();
        let cs_loose =
            confidence_set_cached(&std_data, alpha_loose / 2.0, &tf, &cfg, None, &cache).unwrap();
        let wide = total_effect_ci(&raw, &cs_tight, 0, 3, alpha_tight).unwrap();
        let narrow = total_effect_ci(&raw, &cs_loose, 0, 3, alpha_loose).unwrap();
        for i in 0..=400 {
            let x = -2.0 + 4.0 * i as f64 / 400.0;
            if narrow.interval.contains(x) {
                assert!(wide.interval.contains(x), "x = {x} escaped the wider union");
            }
        }
        if narrow.interval.includes_zero_point() {
            assert!(wide.interval.includes_zero_point() || wide.interval.contains(0.0));
        }
    }
}
