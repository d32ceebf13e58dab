//! Stability analysis for geodesic flows of left-invariant pseudo-Riemannian
//! metrics on step-two nilpotent Lie groups.

pub mod algebra;
pub mod cartan;
pub mod cli;
pub mod constructors;
pub mod dynamics;
pub mod error;
pub mod expm;
pub mod jmap;
pub mod linalg;
pub mod spectrum;
pub mod tol;

pub use algebra::{AlgebraVector, ScalarProduct, Splitting, StepTwoAlgebra};
pub use error::{Error, Result};
pub use jmap::{JOperator, Metivier};
pub use spectrum::{SpectrumReport, Verdict, WilliamsonCounts};
pub use tol::Tolerances;
