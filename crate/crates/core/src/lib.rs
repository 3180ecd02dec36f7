//! Decomposition of homogeneous polynomials over the rationals into minimal
//! sums of powers of linear forms (Waring mode), tangential pieces
//! `L^{d-1}·M`, or cactus pieces `L^{d-k+1}·N` supported on points with
//! multiplicities.
//!
//! The pipeline: reduce to essential variables, dehomogenize, build the
//! moment table of the dual functional, search complete-staircase bases for
//! parameter assignments that make the shifted Hankel blocks commute, read
//! the decomposition off the joint eigenstructure of the multiplication
//! operators, and verify by exact or numeric re-expansion.

pub mod binary;
pub mod config;
pub mod conciseness;
pub mod cpoly;
pub mod decompose;
pub mod error;
pub mod exact;
pub mod moments;
pub mod numeric;
pub mod paramsolve;
pub mod polyring;
pub mod roots;
pub mod spectral;
pub mod staircases;

pub use config::{Config, DegreeCap};
pub use error::{Error, Result};
pub use polyring::{MultiIndex, Polynomial};
