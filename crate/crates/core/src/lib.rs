//! Exponential-polynomial expansions of mean-periodic entire functions.
//!
//! Given a convolution operator `T`, described by its Fourier–Borel
//! transform `Φ`, and a solution `f` of `T ⋆ f = 0`, this crate locates the
//! zero variety of `Φ`, extracts the expansion coefficients of `f` along it,
//! re-synthesises `f` from them, and tests whether the variety is
//! interpolating.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod entire;
pub mod error;
pub mod expansion;
pub mod functionals;
pub mod growth;
pub mod jet;
pub mod newton;
pub mod quadrature;
pub mod variety;
pub mod zeros;

pub use num_complex::Complex64 as C64;

pub use entire::{EntireFunctionSpec, ExpPolyTerm, MultiplicityVariety, TaylorStream, ZeroPoint};
pub use error::{Error, Result};
pub use expansion::{ExpansionCoefficients, Flavor};
pub use functionals::AnalyticFunctional;
pub use growth::{GrowthBound, YoungSpec};
pub use newton::{DividedDifferenceTable, DoublyIndexed};
pub use variety::Verdict;
