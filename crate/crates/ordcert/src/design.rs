//! Regression design matrices and the least-squares kernel.
//!
//! Designs always carry an intercept column, so the constant function is in
//! the span of every basis. Least squares is solved through a rank-revealing
//! orthogonal factorization; rank-deficient systems fall back to a
//! minimum-norm SVD solve instead of aborting, because bootstrap resamples
//! occasionally produce near-collinear designs mid-search.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Relative tolerance for rank decisions in the orthogonal factorizations.
const RANK_EPS: f64 = 1e-10;

/// Which function basis a regression uses.
///
/// `Linear` spans the intercept plus one column per regressor. `Polynomial`
/// spans, for each regressor, the powers 1..=degree, optionally augmented
/// with cross monomials of total degree <= degree. Column order is
/// canonical: intercept first, then per-variable powers (ascending variable,
/// ascending power), then interaction monomials in graded lexicographic
/// order of their exponent vectors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSpec {
    #[default]
    Linear,
    Polynomial { degree: u32, interaction: bool },
}

impl BasisSpec {
    /// Polynomial sieve with the default degree of 3 and no interactions.
    pub fn default_polynomial() -> Self {
        BasisSpec::Polynomial {
            degree: 3,
            interaction: false,
        }
    }

    /// Number of design columns for a regressor set of size `m`.
    pub fn column_count(&self, m: usize) -> usize {
        match *self {
            BasisSpec::Linear => m + 1,
            BasisSpec::Polynomial { degree, interaction } => {
                let pure = 1 + m * degree as usize;
                if !interaction || m < 2 {
                    pure
                } else {
                    pure + interaction_exponents(m, degree).len()
                }
            }
        }
    }
}

/// Exponent vectors for interaction monomials: total degree 2..=degree with
/// at least two nonzero entries, graded lexicographic order.
fn interaction_exponents(m: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; m];
    fn rec(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
        if pos == current.len() {
            if remaining == 0 && current.iter().filter(|&&e| e > 0).count() >= 2 {
                out.push(current.clone());
            }
            return;
        }
        for e in 0..=remaining {
            current[pos] = e;
            rec(current, pos + 1, remaining - e, out);
        }
        current[pos] = 0;
    }
    for total in 2..=degree {
        rec(&mut current, 0, total, &mut out);
    }
    out
}

/// The result of a least-squares fit.
///
/// `fitted + residuals` reconstructs the response elementwise, and the
/// residuals are orthogonal to every design column. `basis_rank < k`
/// signals a rank-deficient design resolved by a minimum-norm solution.
#[derive(Debug, Clone)]
pub struct Fit {
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub basis_rank: usize,
}

impl Fit {
    /// Residual sum of squares.
    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

/// Builds the n x K design matrix for regressing onto the variables in `set`
/// under `spec`. The first column is the all-ones intercept; an empty set
/// yields the intercept alone.
pub fn build_design(d: &Dataset, set: &[usize], spec: &BasisSpec) -> Result<DMatrix<f64>> {
    let sorted = d.validate_set(set)?;
    let n = d.n();
    let k = spec.column_count(sorted.len());
    if k >= n {
        return Err(Error::Underdetermined { n, k });
    }
    let mut x = DMatrix::zeros(n, k);
    x.column_mut(0).fill(1.0);
    let mut col = 1;
    match *spec {
        BasisSpec::Linear => {
            for &v in &sorted {
                x.column_mut(col).copy_from_slice(d.column(v)?);
                col += 1;
            }
        }
        BasisSpec::Polynomial { degree, interaction } => {
            for &v in &sorted {
                let base = d.column(v)?;
                for pow in 1..=degree {
                    for (i, &y) in base.iter().enumerate() {
                        x[(i, col)] = y.powi(pow as i32);
                    }
                    col += 1;
                }
            }
            if interaction && sorted.len() >= 2 {
                for expo in interaction_exponents(sorted.len(), degree) {
                    for i in 0..n {
                        let mut prod = 1.0;
                        for (j, &e) in expo.iter().enumerate() {
                            if e > 0 {
                                prod *= d.column(sorted[j])?[i].powi(e as i32);
                            }
                        }
                        x[(i, col)] = prod;
                    }
                    col += 1;
                }
            }
        }
    }
    debug_assert_eq!(col, k);
    Ok(x)
}

/// A factored design matrix that can fit many responses cheaply.
///
/// Holds an orthonormal basis `q1` of the design's column space, so fitting
/// a response or projecting a vector onto the orthogonal complement costs
/// O(nk) per call. The bootstrap re-uses one factorization across all
/// replicates of a test.
pub struct FactoredDesign {
    q1: DMatrix<f64>,
    solver: Solver,
    n: usize,
    k: usize,
}

enum Solver {
    /// Column-pivoted QR at full rank: R (k x k upper triangular) and the
    /// column permutation.
    Qr {
        r: DMatrix<f64>,
        perm: nalgebra::linalg::PermutationSequence<nalgebra::Dyn>,
    },
    /// Minimum-norm fallback for rank-deficient designs.
    Svd {
        v: DMatrix<f64>,
        sigma_inv: DVector<f64>,
    },
}

impl FactoredDesign {
    pub fn new(x: &DMatrix<f64>) -> Result<Self> {
        let (n, k) = x.shape();
        if k >= n {
            return Err(Error::Underdetermined { n, k });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { context: "design matrix" });
        }
        let qr = x.clone().col_piv_qr();
        let r_full = qr.r();
        let max_diag = (0..k).map(|i| r_full[(i, i)].abs()).fold(0.0, f64::max);
        let rank = (0..k)
            .take_while(|&i| r_full[(i, i)].abs() > RANK_EPS * max_diag)
            .count();
        if rank == k {
            let (q, r, perm) = qr.unpack();
            return Ok(Self {
                q1: q,
                solver: Solver::Qr { r, perm },
                n,
                k,
            });
        }
        // Rank deficient: switch to SVD for the minimum-norm solution. The
        // leading `rank` left singular vectors give the projector basis.
        let svd = x.clone().svd(true, true);
        let u = svd.u.as_ref().expect("svd with u");
        let vt = svd.v_t.as_ref().expect("svd with v_t");
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|s| **s > RANK_EPS * smax)
            .count();
        let mut sigma_inv = DVector::zeros(k);
        for i in 0..rank {
            sigma_inv[i] = 1.0 / svd.singular_values[i];
        }
        Ok(Self {
            q1: u.columns(0, rank).into_owned(),
            solver: Solver::Svd {
                v: vt.transpose(),
                sigma_inv,
            },
            n,
            k: rank,
        })
    }

    /// Effective rank of the design.
    pub fn rank(&self) -> usize {
        self.k
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Fits a response vector, returning coefficients, fitted values, and
    /// residuals.
    pub fn fit(&self, y: &[f64]) -> Result<Fit> {
        if y.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "response length {} does not match design rows {}",
                y.len(),
                self.n
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { context: "response" });
        }
        let yv = DVector::from_column_slice(y);
        let qty = self.q1.tr_mul(&yv);
        let fitted_v = &self.q1 * &qty;
        let coefficients = match &self.solver {
            Solver::Qr { r, perm } => {
                let mut b = qty.clone();
                if !r.solve_upper_triangular_mut(&mut b) {
                    return Err(Error::NonFiniteInput { context: "triangular solve" });
                }
                perm.inv_permute_rows(&mut b);
                b.iter().copied().collect()
            }
            Solver::Svd { v, sigma_inv } => {
                // min-norm solution: V * diag(1/sigma) * U1' y
                let mut scaled = DVector::zeros(v.ncols());
                for i in 0..qty.len() {
                    scaled[i] = qty[i] * sigma_inv[i];
                }
                (v * scaled).iter().copied().collect()
            }
        };
        let fitted: Vec<f64> = fitted_v.iter().copied().collect();
        let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        Ok(Fit {
            coefficients,
            fitted,
            residuals,
            basis_rank: self.k,
        })
    }

    /// Projects `col` onto the orthogonal complement of the design's column
    /// space: returns (I - Q1 Q1') col.
    pub fn project_out(&self, col: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(col);
        let qtv = self.q1.tr_mul(&v);
        let proj = &self.q1 * qtv;
        col.iter().zip(proj.iter()).map(|(a, b)| a - b).collect()
    }

    /// Diagonal of (X'X)^-1, used for homoskedastic coefficient standard
    /// errors. Only available at full rank.
    pub fn xtx_inverse_diagonal(&self) -> Result<Vec<f64>> {
        match &self.solver {
            Solver::Qr { r, perm } => {
                // (X'X)^-1 = P R^-1 R^-T P'; diagonal entries are squared row
                // norms of R^-1 mapped back through the permutation.
                let k = r.ncols();
                let identity = DMatrix::identity(k, k);
                let rinv = r
                    .solve_upper_triangular(&identity)
                    .ok_or(Error::NonFiniteInput { context: "R inverse" })?;
                let mut diag = DVector::from_iterator(
                    k,
                    (0..k).map(|pos| rinv.row(pos).iter().map(|x| x * x).sum::<f64>()),
                );
                perm.inv_permute_rows(&mut diag);
                Ok(diag.iter().copied().collect())
            }
            Solver::Svd { .. } => Err(Error::InvalidParameter(
                "standard errors are unavailable for a rank-deficient design".into(),
            )),
        }
    }
}

/// Solves min_b ||y - X b||_2 and reports fitted values and residuals.
pub fn least_squares(x: &DMatrix<f64>, y: &[f64]) -> Result<Fit> {
    FactoredDesign::new(x)?.fit(y)
}
