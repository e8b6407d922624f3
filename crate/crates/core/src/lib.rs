//! Finite-horizon analysis of real sequences.
//!
//! The crate turns limit statements of the form
//! `lim (1/n) |{k <= n : P(k)}| = 0` into three-valued [`Verdict`]s backed by
//! exact counts, and builds on that to classify sequences (statistical,
//! one-sided "ward" and slowly oscillating classes), probe set compactness
//! through boundedness, and test whether real functions preserve those
//! classes.
//!
//! ```
//! use wardlab::{catalogue, classify::stat_qc_verdict, AnalysisConfig, Status};
//!
//! let sqrt = catalogue::get("sqrt", &Default::default()).unwrap();
//! let config = AnalysisConfig::with_horizon(10_000);
//! assert_eq!(stat_qc_verdict(&sqrt, &config).unwrap().status, Status::Satisfied);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(a > b)` deliberately rejects NaN

pub mod catalogue;
pub mod classify;
pub mod compact;
pub mod config;
pub mod continuity;
pub mod density;
pub mod error;
pub mod expr;
pub mod methods;
pub mod sequence;
pub mod set;

pub use classify::{ClassReport, SequenceClass};
pub use config::AnalysisConfig;
pub use density::{DensityTrace, IndexPredicate, Status, Verdict};
pub use error::{Error, Result};
pub use methods::{LacunaryScheme, Method, MethodVerdict};
pub use sequence::{IndexMap, Prefix, Sequence};
pub use set::RealSet;
