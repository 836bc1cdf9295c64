//! Nilsolitons and Einstein nilradicals from structure constants.
//!
//! Brackets live in [`bracket::BracketTensor`], over exact rationals or
//! `f64`. Everything above that layer is a pure function of the bracket.

pub mod bracket;
pub mod catalog;
pub mod curvature;
pub mod error;
pub mod io;
pub mod kempf_ness;
pub mod linalg;
pub mod lp;
pub mod minnorm;
pub mod nice;
pub mod poly;
pub mod pre_einstein;
pub mod scalar;
pub mod soliton;
pub mod strata;

pub use bracket::{BracketTensor, DerivationSpace, FloatBracket, RationalBracket, Weight};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use scalar::{Rational, Scalar, DEFAULT_TOL};
