//! Exact checks for expansion maps of self-affine tilings.
//!
//! The crate is organised bottom-up:
//!
//! * [`numbers`]: integer/rational polynomials, factorisation over Q,
//!   certified complex root isolation, composed products and number-field
//!   arithmetic with per-axis embeddings.
//! * [`expansion`]: eigenvalue data of an expansion map, Perron and complex
//!   Perron classification, the multiplicity condition on Galois conjugates
//!   and the companion-matrix growth witness.
//! * [`substitution`]: tile substitution rules with exact offsets,
//!   subdivision matrices, control points and patch expansion.
//! * [`addressmap`]: the group generated by control points, its Hermite
//!   basis, the address map and the integer matrix `M` with `φV = VM`.
//! * [`boundary`]: reduced words in a free group, endomorphisms and the
//!   boundary polylines `φ^{-n} ψ^n(w)`, plus SVG output.
//! * [`files`]: JSON input formats shared with the command-line tool.

pub mod addressmap;
pub mod boundary;
mod error;
pub mod expansion;
pub mod files;
pub mod numbers;
pub mod substitution;
pub mod svg;

pub use error::{Error, Result};
