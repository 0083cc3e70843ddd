//! Exact computer algebra for Nijenhuis Lie algebras and Nijenhuis Lie algebroids.
//!
//! Every scalar is an arbitrary-precision rational; every identity is checked
//! exactly. Modules, bottom up:
//!
//! - [`exact`]: rationals, permutations, Koszul signs, shuffles, exact rank.
//! - [`lie`]: Lie algebras by structure constants, Nijenhuis operators, representations.
//! - [`cochain`]: Chevalley-Eilenberg, Nijenhuis-operator and mapping-cone complexes.
//! - [`brace`]: suspended maps, shuffle braces, the L-infinity algebra on the deformation complex.
//! - [`poly`], [`forms`], [`fn_geometry`]: polynomial forms on R^n and the Frolicher-Nijenhuis calculus.
//! - [`algebroid`]: polynomial Lie algebroids, the homological field Q, B_X and the map Phi.
//! - [`sample`]: seeded generators of random valid inputs.

pub mod algebroid;
pub mod brace;
pub mod cochain;
pub mod error;
pub mod exact;
pub mod fn_geometry;
pub mod forms;
pub mod lie;
pub mod poly;
pub mod sample;

pub use error::{Error, Result};
pub use exact::Rational;
