//! Two readings of the same two-group pre/post data.
//!
//! The difference of mean gains and the baseline-adjusted group coefficient
//! can disagree without either analysis being wrong. This crate computes both,
//! measures how much of the gap comes from unequal baseline distributions,
//! rebuilds the adjusted regression from the residuals of the unadjusted one,
//! and checks the residual conditions under which a coefficient reads as an
//! effect.

pub mod binning;
pub mod data;
pub mod decomposition;
pub mod diagnostics;
pub mod error;
pub mod ols;
pub mod overlap;
pub mod rng;
pub mod simulate;
pub mod supermodel;

pub use binning::{assign_bins, BinAssignment, BinningSpec};
pub use data::{load_csv, read_csv, save_csv, write_csv, ColumnMap, Dataset, Group, Observation, Variable};
pub use error::{Error, Result};
pub use ols::{fit, predict, reverse_fit, DesignSpec, FitResult, Term};
pub use overlap::{support_overlap, OverlapReport};
