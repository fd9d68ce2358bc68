//! Exact local–global calculus on the projective line over Q: truncated
//! Laurent expansions with lazy re-expansion from closed forms, restricted
//! adeles and ideles, tame symbols and reciprocity, prime forms and their
//! factorization calculus, a bosonic Fock representation of the local
//! Heisenberg algebras, and correlation functions evaluated by residue
//! pairings. Everything runs over arbitrary-precision rationals; no floats.

pub mod error;
pub mod scalar;
pub mod point;
pub mod laurent;
pub mod rational;
pub mod adele;
pub mod symbols;
pub mod model;
pub mod fock;
pub mod expectation;
pub mod parse;

pub use adele::{Adele, Idele};
pub use error::{CoreError, Result};
pub use expectation::Correlator;
pub use parse::{parse_divisor, parse_multiplicative, parse_point, parse_rational, parse_state, StateExpr};
pub use fock::{ChargedFockVector, DualMonomial, DualVector, FockMonomial, FockVector};
pub use laurent::{LaurentSeries, LocalDifferential, DEFAULT_PRECISION};
pub use model::{p1_model, CurveModel, P1Model, TabulatedModel};
pub use point::{Divisor, Point};
pub use rational::RationalFunction;
pub use symbols::MultiplicativeFunction;
pub use scalar::Rat;
