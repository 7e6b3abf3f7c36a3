//! Exact computations for depth-zero local Shimura data: root data and the
//! slope cocharacter, Deligne-Lusztig varieties over finite fields, the
//! KGL_n fan, Puiseux-series lifting and Lubin-Tate specialization.

pub mod alcove;
pub mod cartan;
pub mod dl_variety;
pub mod dossier;
pub mod error;
pub mod fan;
pub mod finite_field;
pub mod finite_linear;
pub mod lambda;
pub mod lt_specialize;
pub mod matrix;
pub mod puiseux;
pub mod root_datum;
pub mod scalar;
pub mod smith;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{Exact, Field, PrimeField, Ring};

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::BigRational;

/// Context for exact rational arithmetic.
pub type Q = Exact<Rat>;
/// Context for machine-integer arithmetic.
pub type Z = Exact<i64>;

pub type IntMatrix = Matrix<i64>;
pub type RatMatrix = Matrix<Rat>;
