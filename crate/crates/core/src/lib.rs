//! Exact verification toolkit for class-number divisibility in imaginary
//! quadratic fields, built on Lehmer sequences, half-integer quadratic
//! arithmetic, and binary quadratic form class groups.
//!
//! Everything is computed over arbitrary-precision integers except the
//! form-class enumeration, which runs over machine words under an enforced
//! discriminant bound that makes overflow impossible.

pub mod cache;
pub mod classgroup;
pub mod error;
pub mod intarith;
pub mod lehmer;
pub mod quadring;
pub mod report;
pub mod theorems;

pub use error::{Error, Result};
