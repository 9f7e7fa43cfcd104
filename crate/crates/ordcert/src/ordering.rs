//! Testing causal orderings and enumerating the confidence set.
//!
//! A total ordering is tested by running the goodness-of-fit test at every
//! position beyond the first (target = the variable at that position,
//! regressors = everything before it), taking the minimum p-value, and
//! referring it to Beta(1, p-1) — the law of the minimum of p-1 independent
//! uniforms. The confidence set gathers every total ordering whose
//! aggregated p-value clears the level.
//!
//! Enumeration is a level-synchronous branch-and-bound: at level z all
//! surviving prefixes of length z-1 are grouped by their underlying
//! *unordered* set, each (set, candidate) pair is tested once, and a prefix
//! survives only while its running minimum p-value stays at or above the
//! Beta(1, p-1) alpha quantile. Because the survival threshold equals the
//! final acceptance threshold, pruning never changes the accepted set
//! relative to exhaustive enumeration.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrd};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::gof::{
    aggregate_pvalue, min_pvalue_quantile, GofConfig, GofOutcome, PreparedGof, TestFunctionSet,
};

/// A sequence of distinct variable indices; a causal ordering when total.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ordering {
    perm: Vec<usize>,
}

impl Ordering {
    /// Validates indices: distinct, all below `p`.
    pub fn new(perm: Vec<usize>, p: usize) -> Result<Self> {
        let mut seen = vec![false; p];
        for &v in &perm {
            if v >= p {
                return Err(Error::IndexOutOfRange { index: v, p });
            }
            if seen[v] {
                return Err(Error::DuplicateIndex { index: v });
            }
            seen[v] = true;
        }
        Ok(Self { perm })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// 0-based position of `v`, if present.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.perm.iter().position(|&u| u == v)
    }

    /// The set of variables preceding `v`, in ordering order.
    pub fn preceding(&self, v: usize) -> Option<&[usize]> {
        self.position(v).map(|z| &self.perm[..z])
    }
}

/// One accepted total ordering with its test summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcceptedOrdering {
    pub perm: Vec<usize>,
    /// Minimum p-value over the p-1 per-position tests.
    pub min_gamma: f64,
    /// Ordering-level p-value: Beta(1, p-1) CDF of `min_gamma`.
    #[serde(rename = "Gamma")]
    pub gamma: f64,
}

impl AcceptedOrdering {
    pub fn ordering(&self) -> Ordering {
        Ordering {
            perm: self.perm.clone(),
        }
    }
}

/// Counters describing a branch-and-bound run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SearchDiagnostics {
    /// Goodness-of-fit tests actually computed (cache hits excluded).
    pub tests_run: u64,
    pub cache_hits: u64,
    /// Candidate prefixes eliminated at each level z = 2..=p.
    pub prefixes_pruned_per_level: Vec<u64>,
    /// Surviving prefixes after each level z = 2..=p.
    pub prefixes_alive_per_level: Vec<u64>,
    pub wall_time_secs: f64,
}

/// Optional limits on the search. When a limit trips, the search returns
/// with `exhausted = false` and whatever diagnostics were gathered; no
/// ordering is reported as accepted unless it was fully tested.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_tests: Option<u64>,
    pub max_seconds: Option<f64>,
}

/// The set of total orderings not rejected at level alpha.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfidenceSet {
    pub alpha: f64,
    pub p: usize,
    /// Accepted orderings in lexicographic order.
    pub orderings: Vec<AcceptedOrdering>,
    pub diagnostics: SearchDiagnostics,
    /// False when a budget stopped the search before completion.
    pub exhausted: bool,
}

impl ConfidenceSet {
    /// Membership by exact permutation equality. Errors when `theta` is not
    /// a total ordering over the same p.
    pub fn contains(&self, theta: &Ordering) -> Result<bool> {
        if theta.len() != self.p {
            return Err(Error::OrderingLengthMismatch {
                expected: self.p,
                found: theta.len(),
            });
        }
        Ok(self.orderings.iter().any(|a| a.perm == theta.perm))
    }

    pub fn count_orderings(&self) -> usize {
        self.orderings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orderings.is_empty()
    }
}

/// Summary of a single-ordering test.
#[derive(Debug, Clone)]
pub struct OrderingTest {
    /// Minimum p-value across positions 2..=p.
    pub gamma_hat: f64,
    /// Aggregated Beta(1, p-1) p-value for the whole ordering.
    pub gamma_agg: f64,
    /// Per-position outcomes, positions 2..=p in order.
    pub per_level: Vec<GofOutcome>,
}

/// Tests one total ordering by aggregating the per-position
/// goodness-of-fit tests.
pub fn test_ordering(
    d: &Dataset,
    theta: &Ordering,
    tf: &TestFunctionSet,
    cfg: &GofConfig,
) -> Result<OrderingTest> {
    let p = d.p();
    if theta.len() != p {
        return Err(Error::OrderingLengthMismatch {
            expected: p,
            found: theta.len(),
        });
    }
    let mut per_level = Vec::with_capacity(p - 1);
    let mut gamma_hat = f64::INFINITY;
    for z in 2..=p {
        let v = theta.perm[z - 1];
        let prefix = &theta.perm[..z - 1];
        let prepared = PreparedGof::new(d, prefix, tf, cfg)?;
        let outcome = prepared.run(d, v, cfg, None)?;
        gamma_hat = gamma_hat.min(outcome.p_value);
        per_level.push(outcome);
    }
    Ok(OrderingTest {
        gamma_hat,
        gamma_agg: aggregate_pvalue(gamma_hat, p),
        per_level,
    })
}

// ---------------------------------------------------------------------------
// Prefix cache
// ---------------------------------------------------------------------------

/// Slimmed per-test record kept by the cache. The search only consumes the
/// p-value; retaining full fits and replicate vectors for thousands of
/// cached tests would dominate memory.
#[derive(Debug, Clone, Copy)]
pub struct CachedTest {
    pub p_value: f64,
    pub t_obs: f64,
}

/// Write-once memo from (target, canonical regressor set) to a test result.
///
/// First writer wins; concurrent duplicate computation is harmless because
/// the keyed RNG makes both writers hold identical values.
#[derive(Default)]
pub struct PrefixCache {
    map: Mutex<HashMap<(usize, Vec<usize>), CachedTest>>,
}

impl PrefixCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: usize, set: &[usize]) -> Option<CachedTest> {
        self.map.lock().unwrap().get(&(v, set.to_vec())).copied()
    }

    /// Inserts unless the key is already present.
    pub fn insert(&self, v: usize, set: Vec<usize>, value: CachedTest) {
        self.map.lock().unwrap().entry((v, set)).or_insert(value);
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

struct PrefixNode {
    perm: Vec<u8>,
    min_gamma: f64,
}

/// Per-level progress snapshot handed to the search's progress callback.
#[derive(Debug, Clone)]
pub struct LevelProgress {
    /// Level z, i.e. prefix length after this extension step.
    pub level: usize,
    /// Unique unordered sets underlying the surviving prefixes.
    pub unique_sets: usize,
    /// Prefixes alive after the level.
    pub alive: usize,
    /// Candidate extensions pruned at the level.
    pub pruned: u64,
    /// Tests computed so far.
    pub tests_run: u64,
}

/// Computes the confidence set of causal orderings at level `alpha` with a
/// fresh internal cache.
pub fn confidence_set(
    d: &Dataset,
    alpha: f64,
    tf: &TestFunctionSet,
    cfg: &GofConfig,
    budget: Option<SearchBudget>,
) -> Result<ConfidenceSet> {
    confidence_set_cached(d, alpha, tf, cfg, budget, &PrefixCache::new())
}

/// [`confidence_set`] with a caller-owned cache, so repeated searches on the
/// same data (for example at different levels) can share test results.
pub fn confidence_set_cached(
    d: &Dataset,
    alpha: f64,
    tf: &TestFunctionSet,
    cfg: &GofConfig,
    budget: Option<SearchBudget>,
    cache: &PrefixCache,
) -> Result<ConfidenceSet> {
    confidence_set_with_progress(d, alpha, tf, cfg, budget, cache, None)
}

/// [`confidence_set_cached`] with a per-level progress callback, for long
/// searches that want to report to a terminal.
pub fn confidence_set_with_progress(
    d: &Dataset,
    alpha: f64,
    tf: &TestFunctionSet,
    cfg: &GofConfig,
    budget: Option<SearchBudget>,
    cache: &PrefixCache,
    on_level: Option<&(dyn Fn(&LevelProgress) + Sync)>,
) -> Result<ConfidenceSet> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be in (0,1), got {alpha}"
        )));
    }
    let start = Instant::now();
    let p = d.p();
    let threshold = min_pvalue_quantile(alpha, p);
    let budget = budget.unwrap_or_default();
    let tests_run = AtomicU64::new(0);
    let cache_hits = AtomicU64::new(0);
    let tripped = AtomicBool::new(false);

    let over_budget = |tests: &AtomicU64| -> bool {
        if let Some(max) = budget.max_tests {
            if tests.load(AtomicOrd::Relaxed) >= max {
                return true;
            }
        }
        if let Some(max) = budget.max_seconds {
            if start.elapsed().as_secs_f64() >= max {
                return true;
            }
        }
        false
    };

    let mut nodes: Vec<PrefixNode> = (0..p as u8)
        .map(|v| PrefixNode {
            perm: vec![v],
            min_gamma: 1.0,
        })
        .collect();
    let mut pruned_per_level = Vec::with_capacity(p - 1);
    let mut alive_per_level = Vec::with_capacity(p - 1);

    for z in 2..=p {
        // Group surviving prefixes by their unordered set of indices.
        let mut groups: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (idx, node) in nodes.iter().enumerate() {
            let mut set: Vec<usize> = node.perm.iter().map(|&v| v as usize).collect();
            set.sort_unstable();
            groups.entry(set).or_default().push(idx);
        }
        let mut sets: Vec<&Vec<usize>> = groups.keys().collect();
        sets.sort(); // deterministic evaluation order

        // Evaluate the unique (set, candidate) pairs, one prepared design
        // per set.
        let results: Vec<Result<Vec<(usize, f64)>>> = sets
            .par_iter()
            .map(|set| {
                let mut out = Vec::with_capacity(p - set.len());
                let mut prepared: Option<PreparedGof> = None;
                for v in 0..p {
                    if set.binary_search(&v).is_ok() {
                        continue;
                    }
                    if let Some(hit) = cache.get(v, set) {
                        cache_hits.fetch_add(1, AtomicOrd::Relaxed);
                        out.push((v, hit.p_value));
                        continue;
                    }
                    if tripped.load(AtomicOrd::Relaxed) || over_budget(&tests_run) {
                        tripped.store(true, AtomicOrd::Relaxed);
                        return Ok(out);
                    }
                    if prepared.is_none() {
                        prepared = Some(PreparedGof::new(d, set, tf, cfg)?);
                    }
                    let outcome = prepared.as_ref().unwrap().run(d, v, cfg, None)?;
                    tests_run.fetch_add(1, AtomicOrd::Relaxed);
                    cache.insert(
                        v,
                        set.to_vec(),
                        CachedTest {
                            p_value: outcome.p_value,
                            t_obs: outcome.t_obs,
                        },
                    );
                    out.push((v, outcome.p_value));
                }
                Ok(out)
            })
            .collect();

        let mut pvals: HashMap<&Vec<usize>, Vec<(usize, f64)>> = HashMap::new();
        for (set, result) in sets.iter().zip(results) {
            pvals.insert(*set, result?);
        }

        if tripped.load(AtomicOrd::Relaxed) {
            return Ok(ConfidenceSet {
                alpha,
                p,
                orderings: Vec::new(),
                diagnostics: SearchDiagnostics {
                    tests_run: tests_run.into_inner(),
                    cache_hits: cache_hits.into_inner(),
                    prefixes_pruned_per_level: pruned_per_level,
                    prefixes_alive_per_level: alive_per_level,
                    wall_time_secs: start.elapsed().as_secs_f64(),
                },
                exhausted: false,
            });
        }

        // Extend every surviving prefix with every candidate that clears the
        // threshold. Ties at the threshold survive.
        let mut next = Vec::new();
        let mut pruned = 0u64;
        for set in &sets {
            let pv_list = &pvals[*set];
            for &idx in &groups[*set] {
                let node = &nodes[idx];
                for &(v, pv) in pv_list {
                    let min_gamma = node.min_gamma.min(pv);
                    if min_gamma >= threshold {
                        let mut perm = node.perm.clone();
                        perm.push(v as u8);
                        next.push(PrefixNode { perm, min_gamma });
                    } else {
                        pruned += 1;
                    }
                }
            }
        }
        pruned_per_level.push(pruned);
        alive_per_level.push(next.len() as u64);
        if let Some(cb) = on_level {
            cb(&LevelProgress {
                level: z,
                unique_sets: sets.len(),
                alive: next.len(),
                pruned,
                tests_run: tests_run.load(AtomicOrd::Relaxed),
            });
        }
        nodes = next;
        if nodes.is_empty() {
            break;
        }
    }

    let mut orderings: Vec<AcceptedOrdering> = nodes
        .into_iter()
        .map(|node| AcceptedOrdering {
            perm: node.perm.iter().map(|&v| v as usize).collect(),
            min_gamma: node.min_gamma,
            gamma: aggregate_pvalue(node.min_gamma, p),
        })
        .collect();
    orderings.sort_by(|a, b| a.perm.cmp(&b.perm));

    Ok(ConfidenceSet {
        alpha,
        p,
        orderings,
        diagnostics: SearchDiagnostics {
            tests_run: tests_run.into_inner(),
            cache_hits: cache_hits.into_inner(),
            prefixes_pruned_per_level: pruned_per_level,
            prefixes_alive_per_level: alive_per_level,
            wall_time_secs: start.elapsed().as_secs_f64(),
        },
        exhausted: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn gaussian_dataset(seed: u64, n: usize, p: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = (0..p)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        Dataset::from_columns(cols, (1..=p).map(|j| format!("Y{j}")).collect()).unwrap()
    }

    /// Chain SEM Y1 -> Y2 -> ... with centered-exponential errors.
    fn chain_sem(seed: u64, n: usize, p: usize, weight: f64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(p);
        for v in 0..p {
            let col: Vec<f64> = (0..n)
                .map(|i| {
                    let eps = -rng.random::<f64>().ln() - 1.0;
                    if v == 0 {
                        eps
                    } else {
                        weight * cols[v - 1][i] + eps
                    }
                })
                .collect();
            cols.push(col);
        }
        Dataset::from_columns(cols, (1..=p).map(|j| format!("Y{j}")).collect()).unwrap()
    }

    #[test]
    fn ordering_validation() {
        assert!(Ordering::new(vec![0, 2, 1], 3).is_ok());
        assert!(matches!(
            Ordering::new(vec![0, 0], 3).unwrap_err(),
            Error::DuplicateIndex { index: 0 }
        ));
        assert!(matches!(
            Ordering::new(vec![0, 5], 3).unwrap_err(),
            Error::IndexOutOfRange { index: 5, p: 3 }
        ));
        let theta = Ordering::new(vec![2, 0, 1], 3).unwrap();
        assert_eq!(theta.position(0), Some(1));
        assert_eq!(theta.preceding(1).unwrap(), &[2, 0]);
    }

    #[test]
    fn p2_gamma_equals_single_test_pvalue() {
        let d = chain_sem(1, 200, 2, 0.8);
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(5).with_reps(99);
        let theta = Ordering::new(vec![0, 1], 2).unwrap();
        let res = test_ordering(&d, &theta, &tf, &cfg).unwrap();
        let single = crate::gof::test_an(&d, 1, &[0], &tf, &cfg).unwrap();
        assert_eq!(res.per_level.len(), 1);
        assert_abs_diff_eq!(res.gamma_hat, single.p_value, epsilon = 1e-15);
        // Beta(1,1) is uniform: aggregation is the identity
        assert_abs_diff_eq!(res.gamma_agg, single.p_value, epsilon = 1e-12);
    }

    #[test]
    fn reversed_chain_ordering_is_rejected_with_high_power() {
        let tf = TestFunctionSet::default();
        let p = 5;
        let mut rejections = 0;
        let sims = 30;
        for s in 0..sims {
            let d = chain_sem(100 + s, 2000, p, 0.9).standardize().unwrap();
            let cfg = GofConfig::default().with_seed(s).with_reps(99);
            let theta = Ordering::new(vec![4, 3, 2, 1, 0], p).unwrap();
            let res = test_ordering(&d, &theta, &tf, &cfg).unwrap();
            if res.gamma_agg < 0.1 {
                rejections += 1;
            }
        }
        assert!(rejections >= 27, "only {rejections}/{sims} rejected");
    }

    #[test]
    fn no_signal_gaussian_keeps_every_ordering() {
        let d = gaussian_dataset(9, 400, 4).standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(2).with_reps(199);
        let cs = confidence_set(&d, 0.05, &tf, &cfg, None).unwrap();
        assert_eq!(cs.count_orderings(), 24);
        assert!(cs.exhausted);
        // with nothing pruned, level-z work is exactly |Psi_z| * (p - z + 1):
        // sum over z = 2..=p of C(p, z-1) * (p - z + 1) = p * 2^(p-1) - p
        assert_eq!(cs.diagnostics.tests_run, 4 * 8 - 4);
        assert_eq!(cs.diagnostics.cache_hits, 0);
    }

    #[test]
    fn contains_and_count() {
        let d = gaussian_dataset(10, 300, 3).standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(3).with_reps(99);
        let cs = confidence_set(&d, 0.05, &tf, &cfg, None).unwrap();
        if let Some(first) = cs.orderings.first() {
            assert!(cs.contains(&first.ordering()).unwrap());
        }
        let wrong_len = Ordering::new(vec![0, 1], 3).unwrap();
        assert!(matches!(
            cs.contains(&wrong_len).unwrap_err(),
            Error::OrderingLengthMismatch { expected: 3, found: 2 }
        ));
    }

    #[test]
    fn branch_and_bound_matches_exhaustive_enumeration() {
        // independent oracle: test every permutation directly
        let p = 4;
        let d = chain_sem(42, 500, p, 0.7).standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(7).with_reps(99);
        let alpha = 0.1;
        let cs = confidence_set(&d, alpha, &tf, &cfg, None).unwrap();

        let mut accepted_brute = Vec::new();
        let mut perm: Vec<usize> = (0..p).collect();
        let mut all = Vec::new();
        permutations(&mut perm, 0, &mut all);
        for candidate in all {
            let theta = Ordering::new(candidate.clone(), p).unwrap();
            let res = test_ordering(&d, &theta, &tf, &cfg).unwrap();
            if res.gamma_agg >= alpha {
                accepted_brute.push(candidate);
            }
        }
        accepted_brute.sort();
        let accepted_bb: Vec<Vec<usize>> = cs.orderings.iter().map(|a| a.perm.clone()).collect();
        assert_eq!(accepted_bb, accepted_brute);
    }

    fn permutations(perm: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == perm.len() {
            out.push(perm.clone());
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permutations(perm, k + 1, out);
            perm.swap(k, i);
        }
    }

    #[test]
    fn shared_cache_gives_identical_results_and_records_hits() {
        let d = chain_sem(8, 400, 3, 0.8).standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(11).with_reps(99);
        let cache = PrefixCache::new();
        let a = confidence_set_cached(&d, 0.1, &tf, &cfg, None, &cache).unwrap();
        let b = confidence_set_cached(&d, 0.1, &tf, &cfg, None, &cache).unwrap();
        let fresh = confidence_set(&d, 0.1, &tf, &cfg, None).unwrap();
        assert_eq!(a.orderings.len(), b.orderings.len());
        assert_eq!(a.orderings.len(), fresh.orderings.len());
        for ((x, y), z) in a.orderings.iter().zip(&b.orderings).zip(&fresh.orderings) {
            assert_eq!(x.perm, y.perm);
            assert_eq!(x.perm, z.perm);
            assert_eq!(x.min_gamma, y.min_gamma);
            assert_eq!(x.min_gamma, z.min_gamma);
        }
        assert_eq!(b.diagnostics.tests_run, 0);
        assert!(b.diagnostics.cache_hits > 0);
    }

    #[test]
    fn alpha_monotonicity_on_shared_seed() {
        let d = chain_sem(21, 400, 4, 0.6).standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(13).with_reps(199);
        let cache = PrefixCache::new();
        let loose = confidence_set_cached(&d, 0.02, &tf, &cfg, None, &cache).unwrap();
        let tight = confidence_set_cached(&d, 0.2, &tf, &cfg, None, &cache).unwrap();
        // every ordering accepted at the larger alpha is accepted at the smaller
        for a in &tight.orderings {
            assert!(loose.contains(&a.ordering()).unwrap());
        }
    }

    #[test]
    fn accepted_orderings_clear_threshold_per_level() {
        let d = chain_sem(31, 300, 4, 0.7).standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(17).with_reps(99);
        let alpha = 0.1;
        let threshold = min_pvalue_quantile(alpha, 4);
        let cs = confidence_set(&d, alpha, &tf, &cfg, None).unwrap();
        for acc in &cs.orderings {
            assert!(acc.min_gamma >= threshold);
            assert_abs_diff_eq!(acc.gamma, aggregate_pvalue(acc.min_gamma, 4), epsilon = 1e-15);
            assert!(acc.gamma >= alpha);
            let res = test_ordering(&d, &acc.ordering(), &tf, &cfg).unwrap();
            for out in &res.per_level {
                assert!(out.p_value >= threshold);
            }
            assert_eq!(res.gamma_hat, acc.min_gamma);
        }
    }

    #[test]
    fn budget_stops_search_without_accepting() {
        let d = gaussian_dataset(5, 200, 5).standardize().unwrap();
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(19).with_reps(99);
        let budget = SearchBudget {
            max_tests: Some(10),
            max_seconds: None,
        };
        let cs = confidence_set(&d, 0.1, &tf, &cfg, Some(budget)).unwrap();
        assert!(!cs.exhausted);
        assert!(cs.orderings.is_empty());
        assert!(cs.diagnostics.tests_run >= 10);
    }
}
