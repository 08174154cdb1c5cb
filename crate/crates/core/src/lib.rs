//! Nonconvex low-rank optimization: concave penalties, their scalar proximal
//! operators, generalized singular value thresholding (GSVT), and proximal
//! gradient solvers for matrix completion.
//!
//! ```
//! use gsvt::{penalty::Penalty, scalar_prox::{prox, FixedPointConfig}};
//!
//! let log = Penalty::logarithm(1.0, 1.5).unwrap();
//! let out = prox(&log, 10.0, &FixedPointConfig::default()).unwrap();
//! assert!(out.minimizer > 8.0 && out.minimizer < 10.0);
//! ```

pub mod data;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod penalty;
pub mod scalar_prox;
pub mod solvers;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{svd, Matrix, SvdFactors};
pub use penalty::{ExtendedReal, Family, Penalty};
pub use scalar_prox::{prox, FixedPointConfig, ProxOutcome};
pub use solvers::{CompletionProblem, SolveTrace, SolverConfig, SolverKind};
pub use spectral::{gsvt, weighted_svt, GsvtResult};
