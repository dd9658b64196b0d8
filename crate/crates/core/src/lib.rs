//! Exact Hamming weights of codewords of decreasing monomial codes (polar
//! and Reed–Muller codes), computed from algebraic structure and checked
//! against brute-force evaluation.
//!
//! * [`monomial`] and [`eval`]: the ring `R_m` and truth tables.
//! * [`weight`]: inclusion–exclusion weights, `Σ(F)` and dyadic digits.
//! * [`lta`]: the lower-triangular affine group, orbits and collisions.
//! * [`templates`]: closed-form weight templates.
//! * [`code`]: decreasing sets, Reed–Muller codes, generator matrices.
//! * [`enumerate`]: orbit-based multiplicity formulas.
//! * [`oracle`]: exhaustive weight distributions and classification.

pub mod code;
pub mod dyadic;
pub mod enumerate;
pub mod error;
pub mod eval;
pub mod lta;
pub mod monomial;
pub mod oracle;
mod ser;
pub mod templates;
pub mod weight;

pub use code::{leq_decreasing, BitMatrix, CodeSpec, DecreasingSet};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use eval::{BitRow, EvalVector, EVAL_M_CAP};
pub use lta::{LtaElement, OrbitSummary, ORBIT_M_DEFAULT, ORBIT_M_MAX};
pub use monomial::{lcm, Monomial, Poly};
pub use enumerate::{EnumerationReport, SeedDescriptor};
pub use oracle::WeightDistribution;
pub use templates::{TemplateInstance, TemplateKind};
pub use weight::{dyadic_decompose, dyadic_of, pie_weight, DyadicWeight, ResidualFamily};
