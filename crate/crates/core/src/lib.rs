pub mod biconformal;
pub mod classify;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod geometry;
pub mod normalform;
pub mod projectors;

pub use error::{Error, Invariant, Result};
