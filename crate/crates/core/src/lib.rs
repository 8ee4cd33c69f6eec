//! Exact computation and certification of modular cocycles, transverse
//! densities and transverse orientability for Lie algebroids given in a
//! global frame and for concrete Lie groupoid models.
//!
//! The layers, bottom-up:
//!
//! * [`symcore`]: rational functions over ℚ in canonical form, formal
//!   logarithms, parsing and quadrature.
//! * [`chars`]: one-dimensional characters `|det|^m · sign(det)^ε` of `GL_r`.
//! * [`algebroid`]: algebroid validation, `d_A`, line representations and the
//!   modular cocycle.
//! * [`groupoid`]: pair, discrete-action and Lie-action groupoids, the action
//!   on the transverse density bundle, cocycles and obstructions.
//! * [`vanest`]: the degree-one Van Est map for Lie-action models.
//! * [`cech`]: parity graphs over covers and the `ℤ₂` orientability verdicts.

pub mod algebroid;
pub mod catalog;
pub mod cech;
pub mod chars;
mod error;
pub mod groupoid;
pub mod random;
pub mod symcore;
pub mod vanest;

pub use algebroid::{AlgCocycle1, AlgLineRep, LieAlgebroid};
pub use cech::{CoverDecl, ParityGraph};
pub use chars::{Character, FormalScalar};
pub use error::{Error, Result};
pub use groupoid::{GpdLineRep, GroupoidModel, MultCocycle};
pub use symcore::{Chart, LogSum, RatExpr, Rational};
