//! Goodness-of-fit driven confidence sets for causal orderings in
//! additive-noise structural equation models.
//!
//! The crate tests whether the residuals of a regression are independent of
//! the regressors via a residual bootstrap, aggregates such tests into a
//! test for an entire causal ordering, and enumerates the set of orderings
//! a dataset cannot reject with a memoized branch-and-bound search. The
//! resulting confidence set is post-processed into causal-effect confidence
//! intervals, ancestral-relation bounds, and summary orderings.
//!
//! Entry points:
//! - [`dataset::Dataset`] — ingestion and standardization of samples.
//! - [`gof::test_an`] — the residual-bootstrap test for a single regression.
//! - [`ordering::confidence_set`] — the branch-and-bound search.
//! - [`effects`] — effect intervals, ancestral bounds, Frechet means.
//! - [`simlab`] — random SEM generators and Monte Carlo studies.
//!
//! The `ordcert` binary exposes the same functionality as subcommands; the
//! `examples/` directory demonstrates each capability as a runnable program.

pub mod cli;
pub mod dataset;
pub mod design;
pub mod effects;
pub mod error;
pub mod gof;
pub mod ordering;
pub mod rng;
pub mod simlab;

pub use dataset::Dataset;
pub use design::{BasisSpec, Fit};
pub use error::{Error, Result};
pub use gof::{Calibration, GofConfig, GofOutcome, Statistic, TestFunctionSet};
pub use ordering::{ConfidenceSet, Ordering, SearchBudget};
