//! Computational arboreal Galois theory for quadratic polynomials z^2 + c
//! whose critical point is periodic.
//!
//! The crate realizes the finite-depth objects attached to such a map: the
//! automorphism group of the binary preimage tree, truncated 2-adic parity
//! functionals cutting out the residue-consistent subgroup and its unit
//! kernel, the self-similar generator family with closed order formulas,
//! preimage trees over finite fields with canonical labelings, the Frobenius
//! automorphism and its cyclotomic residue, and the square-class criteria
//! governing maximality of the arboreal image over the rationals.

pub mod arith;
pub mod error;
pub mod fq;
pub mod parity;
pub mod pink;
pub mod preimage;
pub mod squares;
pub mod suite;
pub mod tree;

pub use error::{Error, Result};
