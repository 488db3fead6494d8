//! Exact scalar arithmetic: base fields, sparse polynomials, rational
//! function towers, square classes, and tame residues.

pub mod base;
pub mod parse;
pub mod poly;
pub mod scalar;

pub use base::{BaseClass, BaseElem, BaseKind};
pub use parse::{parse_scalar, parse_tower};
pub use poly::Poly;
pub use scalar::{FieldTower, Scalar, SquareClassSupport, TamePlace};
