//! Residual-bootstrap goodness-of-fit test for a single regression.
//!
//! Tests the null hypothesis that the residuals of regressing a target
//! variable onto a regressor set are independent of the regressors. Under
//! an additive-noise SEM this holds exactly when the set contains all
//! parents of the target and none of its descendants, so the test is the
//! building block for certifying causal orderings.
//!
//! The statistic correlates nonlinear transforms of each regressor (the
//! test functions) with the regression residuals. Calibration resamples the
//! empirical residuals conditional on the regressors, recomputes the
//! statistic on the same design, and ranks the observed value among the
//! replicates.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use crate::dataset::Dataset;
use crate::design::{build_design, BasisSpec, FactoredDesign, Fit};
use crate::error::{Error, Result};
use crate::rng::{stream, StreamKind};

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

/// A univariate map applied to a regressor column before correlating it with
/// the residuals. Affine maps are useless here (least squares already makes
/// residuals orthogonal to affine transforms of the design), so construction
/// rejects them.
#[derive(Clone)]
pub enum TestFunction {
    /// y^k for integer k.
    Power(u32),
    /// sign(y) * |y|^e; evaluates to 0 at y = 0.
    SignedAbsPower(f64),
    /// Arbitrary user map with a display name.
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl TestFunction {
    pub fn eval(&self, y: f64) -> f64 {
        match self {
            TestFunction::Power(k) => y.powi(*k as i32),
            TestFunction::SignedAbsPower(e) => y.signum() * y.abs().powf(*e),
            TestFunction::Custom { f, .. } => f(y),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::Power(k) => format!("y^{k}"),
            TestFunction::SignedAbsPower(e) => format!("sign(y)|y|^{e}"),
            TestFunction::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// The set H of test functions used by a goodness-of-fit test.
///
/// With `standardize_outputs` set (the default), each h_j applied to each
/// regressor column is centered and scaled to unit sample variance once, on
/// the observed data, before entering the statistic.
#[derive(Debug, Clone)]
pub struct TestFunctionSet {
    funcs: Vec<TestFunction>,
    pub standardize_outputs: bool,
}

impl Default for TestFunctionSet {
    /// H = { y^2, sign(y)|y|^2.5, y^3 }, standardized.
    fn default() -> Self {
        Self {
            funcs: vec![
                TestFunction::Power(2),
                TestFunction::SignedAbsPower(2.5),
                TestFunction::Power(3),
            ],
            standardize_outputs: true,
        }
    }
}

impl TestFunctionSet {
    /// Validates and wraps a set of test functions. Rejects empty sets,
    /// functions that produce non-finite output on a probe grid, and affine
    /// functions.
    pub fn new(funcs: Vec<TestFunction>, standardize_outputs: bool) -> Result<Self> {
        if funcs.is_empty() {
            return Err(Error::InvalidParameter(
                "test function set must contain at least one function".into(),
            ));
        }
        for (index, f) in funcs.iter().enumerate() {
            check_not_affine(f, index)?;
        }
        Ok(Self {
            funcs,
            standardize_outputs,
        })
    }

    /// Constructs without the affinity check. Only for internal diagnostics
    /// that deliberately exercise the degenerate zero-statistic case.
    #[doc(hidden)]
    pub fn new_unchecked(funcs: Vec<TestFunction>, standardize_outputs: bool) -> Self {
        Self {
            funcs,
            standardize_outputs,
        }
    }

    pub fn funcs(&self) -> &[TestFunction] {
        &self.funcs
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }
}

/// Probes `f` on a fixed grid and rejects it if it is affine (within fp
/// noise) or non-finite there.
fn check_not_affine(f: &TestFunction, index: usize) -> Result<()> {
    let grid: Vec<f64> = (0..21).map(|i| -3.0 + 0.3 * i as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { context: "test function probe" });
    }
    // fit a + b x over the grid and look at the worst deviation
    let m = grid.len() as f64;
    let mean_x = grid.iter().sum::<f64>() / m;
    let mean_y = vals.iter().sum::<f64>() / m;
    let sxx: f64 = grid.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = grid
        .iter()
        .zip(&vals)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let b = sxy / sxx;
    let a = mean_y - b * mean_x;
    let scale = vals.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let worst = grid
        .iter()
        .zip(&vals)
        .map(|(x, y)| (y - (a + b * x)).abs())
        .fold(0.0, f64::max);
    if worst <= 1e-9 * scale {
        return Err(Error::AffineTestFunction { index });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Configuration and outcome
// ---------------------------------------------------------------------------

/// How the per-regressor contributions are aggregated into one statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    T1,
    T2,
}

/// Normalizing denominator of each replicate tau_j.
///
/// The observed statistic always divides by sqrt(n). `SqrtNMinusK` divides
/// the recalibration draws by sqrt(n - K) instead, inflating them by
/// sqrt(n/(n-K)); this offsets the variance the fitted residuals lose to
/// the K-column projection and lowers the finite-sample Type I error.
/// `SqrtN` applies sqrt(n) to both sides, recovering the exact rank
/// formula a uniformity argument needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    SqrtN,
    SqrtNMinusK,
}

/// How the null distribution of the statistic is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calibration {
    /// Resample the empirical residuals (the default, and the method of
    /// record).
    Bootstrap,
    /// Draw Gaussian noise with the plug-in variance estimate
    /// ||residuals||^2 / (n - K). Known to over-reject for skewed errors;
    /// kept for comparison studies.
    GaussianPlugin,
    /// Draw from a caller-supplied error sampler. Simulation use only:
    /// requires knowing the true error distribution.
    Oracle,
}

/// Settings for a single goodness-of-fit test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GofConfig {
    pub stat: Statistic,
    /// Number of bootstrap replicates L.
    pub bootstrap_reps: usize,
    pub denominator: Denominator,
    pub calibration: Calibration,
    pub basis: BasisSpec,
    pub seed: u64,
    /// Use the 1/|U| inner normalization for T2 instead of 1/sqrt(|U|).
    #[serde(default)]
    pub proof_normalization: bool,
}

impl Default for GofConfig {
    fn default() -> Self {
        Self {
            stat: Statistic::T2,
            bootstrap_reps: 500,
            denominator: Denominator::SqrtNMinusK,
            calibration: Calibration::Bootstrap,
            basis: BasisSpec::Linear,
            seed: 0,
            proof_normalization: false,
        }
    }
}

impl GofConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.bootstrap_reps = reps.max(1);
        self
    }
}

/// Result of one goodness-of-fit test.
#[derive(Debug, Clone)]
pub struct GofOutcome {
    /// (1 + #{l : t_obs < t_reps[l]}) / (L + 1); always in (0, 1].
    pub p_value: f64,
    pub t_obs: f64,
    pub t_reps: Vec<f64>,
    pub fit: Fit,
    pub config: GofConfig,
}

/// Supplies fresh error draws for oracle calibration.
pub trait NoiseSampler: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64>;
}

impl<F> NoiseSampler for F
where
    F: Fn(&mut ChaCha8Rng, usize) -> Vec<f64> + Sync,
{
    fn sample(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        self(rng, n)
    }
}

// ---------------------------------------------------------------------------
// Statistic pieces
// ---------------------------------------------------------------------------

/// Correlation of one test-function column with the residual vector,
/// normalized by `denom`: (1/denom) * h' residuals.
pub fn tau_j(h_col: &[f64], residuals: &[f64], denom: f64) -> Result<f64> {
    if h_col.len() != residuals.len() {
        return Err(Error::InvalidParameter(format!(
            "tau_j length mismatch: {} vs {}",
            h_col.len(),
            residuals.len()
        )));
    }
    let dot: f64 = h_col.iter().zip(residuals).map(|(a, b)| a * b).sum();
    if !dot.is_finite() {
        return Err(Error::NonFiniteInput { context: "tau_j" });
    }
    Ok(dot / denom)
}

/// Ranks the observed statistic among the replicates:
/// (1 + #{l : t_obs < t_reps[l]}) / (L + 1).
pub fn replicate_rank_pvalue(t_obs: f64, t_reps: &[f64]) -> f64 {
    let exceed = t_reps.iter().filter(|&&t| t_obs < t).count();
    (1 + exceed) as f64 / (t_reps.len() + 1) as f64
}

/// The alpha quantile of Beta(1, p-1): the threshold a minimum of p-1
/// independent uniform p-values must clear to keep an ordering alive at
/// level alpha.
pub fn min_pvalue_quantile(alpha: f64, p: usize) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0 && p >= 2);
    1.0 - (1.0 - alpha).powf(1.0 / (p - 1) as f64)
}

/// Converts a minimum p-value over p-1 tests into an ordering-level p-value
/// via the Beta(1, p-1) law of the minimum of independent uniforms.
pub fn aggregate_pvalue(min_gamma: f64, p: usize) -> f64 {
    debug_assert!(min_gamma > 0.0 && min_gamma <= 1.0 && p >= 2);
    1.0 - (1.0 - min_gamma).powi((p - 1) as i32)
}

// ---------------------------------------------------------------------------
// Prepared machinery shared by the observed statistic and the replicates
// ---------------------------------------------------------------------------

/// A design factored once, with the test-function columns already projected
/// onto the orthogonal complement of the design span.
///
/// Everything here depends only on the regressor set, never on the target
/// variable, so one `PreparedGof` serves every candidate target during the
/// branch-and-bound search. For a projected column g = (I - P) h and any
/// response w, g'w equals h' applied to the residuals of w, which is what
/// makes each bootstrap replicate a handful of dot products instead of a
/// fresh regression.
pub(crate) struct PreparedGof {
    pub(crate) factor: FactoredDesign,
    /// Projected standardized test columns, (u, j) in ascending-u, then-j
    /// order.
    g_cols: Vec<Vec<f64>>,
    set: Vec<usize>,
    m: usize,
    denom_obs: f64,
    denom_rep: f64,
    k: usize,
}

impl PreparedGof {
    pub(crate) fn new(
        d: &Dataset,
        set: &[usize],
        tf: &TestFunctionSet,
        cfg: &GofConfig,
    ) -> Result<Self> {
        let sorted = d.validate_set(set)?;
        if sorted.is_empty() {
            return Err(Error::EmptyRegressorSet);
        }
        let x = build_design(d, &sorted, &cfg.basis)?;
        let k = x.ncols();
        let n = d.n();
        let factor = FactoredDesign::new(&x)?;
        let denom_obs = (n as f64).sqrt();
        let denom_rep = match cfg.denominator {
            Denominator::SqrtN => (n as f64).sqrt(),
            Denominator::SqrtNMinusK => ((n - k) as f64).sqrt(),
        };
        let mut g_cols = Vec::with_capacity(sorted.len() * tf.len());
        for &u in &sorted {
            let base = d.column(u)?;
            for f in tf.funcs() {
                let mut h: Vec<f64> = base.iter().map(|&y| f.eval(y)).collect();
                if h.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteInput { context: "test function output" });
                }
                if tf.standardize_outputs {
                    standardize_in_place(&mut h);
                }
                g_cols.push(factor.project_out(&h));
            }
        }
        Ok(Self {
            factor,
            g_cols,
            m: sorted.len(),
            set: sorted,
            denom_obs,
            denom_rep,
            k,
        })
    }

    /// Aggregates tau over regressors for one response-side vector (observed
    /// residuals or a noise draw), with the given tau_j denominator.
    fn aggregate(&self, w: &[f64], denom: f64, cfg: &GofConfig) -> f64 {
        let j = self.g_cols.len() / self.m;
        let mut acc = 0.0;
        for u in 0..self.m {
            let mut sq = 0.0;
            for g in &self.g_cols[u * j..(u + 1) * j] {
                let t: f64 = g.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / denom;
                sq += t * t;
            }
            let tau = sq.sqrt();
            acc += match cfg.stat {
                Statistic::T1 => tau,
                Statistic::T2 => {
                    let inner = if cfg.proof_normalization {
                        self.m as f64
                    } else {
                        (self.m as f64).sqrt()
                    };
                    tau * tau / inner
                }
            };
        }
        match cfg.stat {
            Statistic::T1 => acc / self.m as f64,
            Statistic::T2 => acc.sqrt(),
        }
    }

    /// Runs the full test for target `v`, drawing replicate noise according
    /// to the calibration mode.
    pub(crate) fn run(
        &self,
        d: &Dataset,
        v: usize,
        cfg: &GofConfig,
        sampler: Option<&dyn NoiseSampler>,
    ) -> Result<GofOutcome> {
        if self.set.binary_search(&v).is_ok() {
            return Err(Error::TargetInRegressors { v });
        }
        let y = d.column(v)?;
        let fit = self.factor.fit(y)?;
        let t_obs = self.aggregate(&fit.residuals, self.denom_obs, cfg);
        let n = y.len();
        let sigma_hat = (fit.rss() / (n - self.k) as f64).sqrt();
        if matches!(cfg.calibration, Calibration::Oracle) && sampler.is_none() {
            return Err(Error::OracleSamplerMissing);
        }
        let l = cfg.bootstrap_reps.max(1);
        let t_reps: Vec<f64> = (0..l)
            .into_par_iter()
            .map(|rep| {
                let mut rng = stream(
                    cfg.seed,
                    StreamKind::GofReplicate,
                    v as u64,
                    &self.set,
                    rep as u64,
                );
                let noise = match cfg.calibration {
                    Calibration::Bootstrap => (0..n)
                        .map(|_| fit.residuals[rng.random_range(0..n)])
                        .collect::<Vec<f64>>(),
                    Calibration::GaussianPlugin => {
                        let normal = Normal::new(0.0, sigma_hat).expect("finite sigma");
                        (0..n).map(|_| normal.sample(&mut rng)).collect()
                    }
                    Calibration::Oracle => sampler.expect("checked above").sample(&mut rng, n),
                };
                self.aggregate(&noise, self.denom_rep, cfg)
            })
            .collect();
        let p_value = replicate_rank_pvalue(t_obs, &t_reps);
        Ok(GofOutcome {
            p_value,
            t_obs,
            t_reps,
            fit,
            config: cfg.clone(),
        })
    }
}

fn standardize_in_place(col: &mut [f64]) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
    for x in col.iter_mut() {
        *x = (*x - mean) / sd;
    }
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Computes the statistic for target `v` given regressor set `set`,
/// optionally replacing the response with an override vector (as the
/// bootstrap does). Returns the statistic and the underlying fit.
///
/// The configured denominator applies uniformly here; [`test_an`] instead
/// pairs a sqrt(n)-normalized observed statistic with replicates at the
/// configured denominator.
pub fn statistic(
    d: &Dataset,
    v: usize,
    set: &[usize],
    tf: &TestFunctionSet,
    cfg: &GofConfig,
    response_override: Option<&[f64]>,
) -> Result<(f64, Fit)> {
    let prepared = PreparedGof::new(d, set, tf, cfg)?;
    if prepared.set.binary_search(&v).is_ok() {
        return Err(Error::TargetInRegressors { v });
    }
    let fit = match response_override {
        Some(y) => prepared.factor.fit(y)?,
        None => prepared.factor.fit(d.column(v)?)?,
    };
    let t = prepared.aggregate(&fit.residuals, prepared.denom_rep, cfg);
    Ok((t, fit))
}

/// The residual-bootstrap goodness-of-fit test: observed statistic, L
/// recalibration replicates on the same design, and the rank p-value.
///
/// Deterministic given (dataset, v, set, tf, cfg): replicate draws are keyed
/// by (seed, v, set, replicate), so thread scheduling cannot change the
/// outcome.
pub fn test_an(
    d: &Dataset,
    v: usize,
    set: &[usize],
    tf: &TestFunctionSet,
    cfg: &GofConfig,
) -> Result<GofOutcome> {
    if matches!(cfg.calibration, Calibration::Oracle) {
        return Err(Error::OracleSamplerMissing);
    }
    PreparedGof::new(d, set, tf, cfg)?.run(d, v, cfg, None)
}

/// [`test_an`] with a caller-supplied error distribution for oracle
/// calibration. Simulation use only.
pub fn test_an_with_sampler(
    d: &Dataset,
    v: usize,
    set: &[usize],
    tf: &TestFunctionSet,
    cfg: &GofConfig,
    sampler: &dyn NoiseSampler,
) -> Result<GofOutcome> {
    PreparedGof::new(d, set, tf, cfg)?.run(d, v, cfg, Some(sampler))
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

    /// y2 = 0.8 y1 + eps with skewed errors; the (y1 -> y2) direction is the
    /// true null for U = {0}, v = 1.
    fn chain_dataset(seed: u64, n: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y1: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().ln() - 1.0).collect();
        let y2: Vec<f64> = y1
            .iter()
            .map(|&a| 0.8 * a + (-rng.random::<f64>().ln() - 1.0))
            .collect();
        Dataset::from_columns(vec![y1, y2], vec!["Y1".into(), "Y2".into()]).unwrap()
    }

    #[test]
    fn tau_j_direct_arithmetic() {
        let denom = 3.0_f64.sqrt();
        let zero = tau_j(&[1.0, 1.0, 1.0], &[-1.0, 0.0, 1.0], denom).unwrap();
        assert_abs_diff_eq!(zero, 0.0, epsilon = 1e-15);
        let t = tau_j(&[1.0, 2.0, 3.0], &[1.0, 1.0, 1.0], denom).unwrap();
        assert_abs_diff_eq!(t, 6.0 / denom, epsilon = 1e-12);
        assert_abs_diff_eq!(t, 3.464101615137754, epsilon = 1e-9);
    }

    #[test]
    fn tau_j_vanishes_for_affine_transform_of_design_column() {
        let d = gaussian_dataset(1, 80, 3);
        let x = build_design(&d, &[0, 2], &BasisSpec::Linear).unwrap();
        let fit = crate::design::least_squares(&x, d.column(1).unwrap()).unwrap();
        let h: Vec<f64> = d.column(2).unwrap().iter().map(|y| 4.0 - 2.5 * y).collect();
        let t = tau_j(&h, &fit.residuals, (80.0_f64).sqrt()).unwrap();
        assert!(t.abs() < 1e-8);
    }

    #[test]
    fn affine_test_functions_are_rejected_at_construction() {
        let err = TestFunctionSet::new(vec![TestFunction::Power(1)], true).unwrap_err();
        assert!(matches!(err, Error::AffineTestFunction { index: 0 }));
        let custom = TestFunction::Custom {
            name: "affine".into(),
            f: Arc::new(|y| 3.0 * y - 1.0),
        };
        assert!(TestFunctionSet::new(vec![custom], true).is_err());
        assert!(TestFunctionSet::new(vec![TestFunction::Power(2)], true).is_ok());
    }

    #[test]
    fn signed_abs_power_is_zero_at_zero() {
        let f = TestFunction::SignedAbsPower(2.5);
        assert_eq!(f.eval(0.0), 0.0);
        assert!(f.eval(-2.0) < 0.0);
    }

    #[test]
    fn statistic_is_zero_for_affine_test_functions() {
        let d = gaussian_dataset(2, 60, 4);
        let tf = TestFunctionSet::new_unchecked(
            vec![TestFunction::Power(1)],
            false, // standardization keeps it affine anyway
        );
        let cfg = GofConfig::default();
        for v in [1usize, 3] {
            let (t, _) = statistic(&d, v, &[0, 2], &tf, &cfg, None).unwrap();
            assert!(t.abs() < 1e-8, "affine statistic {t}");
        }
    }

    #[test]
    fn t1_equals_t2_for_single_regressor() {
        let d = chain_dataset(3, 150);
        let tf = TestFunctionSet::default();
        let mut cfg = GofConfig::default();
        cfg.stat = Statistic::T1;
        let (t1, _) = statistic(&d, 1, &[0], &tf, &cfg, None).unwrap();
        cfg.stat = Statistic::T2;
        let (t2, _) = statistic(&d, 1, &[0], &tf, &cfg, None).unwrap();
        assert_abs_diff_eq!(t1, t2, epsilon = 1e-12);
    }

    #[test]
    fn rank_pvalue_examples() {
        // L = 4, two replicates exceed
        let p = replicate_rank_pvalue(0.7, &[0.1, 0.5, 0.9, 1.3]);
        assert_abs_diff_eq!(p, 0.6, epsilon = 1e-15);
        // observed beats every replicate
        let p = replicate_rank_pvalue(2.0, &[0.1, 0.5, 0.9, 1.3]);
        assert_abs_diff_eq!(p, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn rank_pvalue_monotone_in_observed() {
        let reps = [0.3, 0.6, 0.6, 1.2, 2.0];
        let mut last = f64::INFINITY;
        for t in [0.0, 0.3, 0.5, 0.6, 1.0, 3.0] {
            let p = replicate_rank_pvalue(t, &reps);
            assert!(p <= last);
            last = p;
        }
    }

    #[test]
    fn beta_quantile_closed_forms() {
        assert_abs_diff_eq!(min_pvalue_quantile(0.3, 2), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(min_pvalue_quantile(0.1, 11), 0.010480, epsilon = 1e-6);
        assert!(min_pvalue_quantile(1e-12, 5) < 1e-9);
    }

    #[test]
    fn aggregate_pvalue_inverts_quantile() {
        assert_abs_diff_eq!(aggregate_pvalue(1.0, 7), 1.0, epsilon = 1e-15);
        let q = min_pvalue_quantile(0.1, 11);
        assert_abs_diff_eq!(aggregate_pvalue(q, 11), 0.1, epsilon = 1e-9);
    }

    #[test]
    fn aggregated_minimum_of_uniforms_is_uniform() {
        // Monte Carlo oracle for the Beta(1, p-1) aggregation: taking the
        // minimum of p-1 independent uniforms and mapping through the
        // aggregation must give a Uniform(0,1) variate.
        let p = 11usize;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let sims = 10_000;
        let mut gammas: Vec<f64> = (0..sims)
            .map(|_| {
                let min = (0..p - 1)
                    .map(|_| rng.random::<f64>())
                    .fold(f64::INFINITY, f64::min);
                aggregate_pvalue(min, p)
            })
            .collect();
        gammas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks = gammas
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let ecdf_hi = (i + 1) as f64 / sims as f64;
                let ecdf_lo = i as f64 / sims as f64;
                (ecdf_hi - g).abs().max((g - ecdf_lo).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn test_an_deterministic_and_on_lattice() {
        let d = chain_dataset(5, 120);
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default().with_seed(42).with_reps(37);
        let a = test_an(&d, 1, &[0], &tf, &cfg).unwrap();
        let b = test_an(&d, 1, &[0], &tf, &cfg).unwrap();
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(a.t_obs, b.t_obs);
        assert_eq!(a.t_reps, b.t_reps);
        let lattice = (a.p_value * 38.0).round() / 38.0;
        assert_abs_diff_eq!(a.p_value, lattice, epsilon = 1e-12);
        assert!(a.p_value > 0.0 && a.p_value <= 1.0);
    }

    #[test]
    fn oracle_without_sampler_errors() {
        let d = chain_dataset(6, 60);
        let tf = TestFunctionSet::default();
        let mut cfg = GofConfig::default();
        cfg.calibration = Calibration::Oracle;
        assert!(matches!(
            test_an(&d, 1, &[0], &tf, &cfg).unwrap_err(),
            Error::OracleSamplerMissing
        ));
    }

    #[test]
    fn gaussian_plugin_mode_runs() {
        let d = chain_dataset(7, 100);
        let tf = TestFunctionSet::default();
        let mut cfg = GofConfig::default().with_seed(1).with_reps(50);
        cfg.calibration = Calibration::GaussianPlugin;
        let out = test_an(&d, 1, &[0], &tf, &cfg).unwrap();
        assert!(out.p_value > 0.0 && out.p_value <= 1.0);
    }

    #[test]
    fn statistic_rejects_bad_inputs() {
        let d = gaussian_dataset(8, 50, 3);
        let tf = TestFunctionSet::default();
        let cfg = GofConfig::default();
        assert!(matches!(
            statistic(&d, 1, &[], &tf, &cfg, None).unwrap_err(),
            Error::EmptyRegressorSet
        ));
        assert!(matches!(
            statistic(&d, 1, &[0, 1], &tf, &cfg, None).unwrap_err(),
            Error::TargetInRegressors { v: 1 }
        ));
    }

    /// Two-sample Kolmogorov-Smirnov distance.
    fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (mut i, mut j, mut ks) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            let d = (i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs();
            ks = ks.max(d);
        }
        ks
    }

    #[test]
    fn observed_statistic_matches_bootstrap_distribution_under_null() {
        // Monte Carlo oracle: under a true null the statistic from fresh
        // datasets and the bootstrap replicates from one dataset should be
        // close in distribution. The exact-formula denominator keeps both
        // sides on the same scale.
        let tf = TestFunctionSet::default();
        let mut cfg = GofConfig::default().with_seed(11).with_reps(200);
        cfg.denominator = Denominator::SqrtN;
        let mut fresh: Vec<f64> = (0..200)
            .map(|r| {
                let d = gaussian_dataset(1000 + r, 200, 2);
                statistic(&d, 1, &[0], &tf, &cfg, None).unwrap().0
            })
            .collect();
        let d = gaussian_dataset(500, 200, 2);
        let out = test_an(&d, 1, &[0], &tf, &cfg).unwrap();
        let mut reps = out.t_reps.clone();
        let ks = ks_two_sample(&mut fresh, &mut reps);
        assert!(ks < 0.15, "KS distance {ks}");
    }
}
