//! Preprojective algebras of Dynkin quivers, their Hochschild homology and
//! cohomology, and the calculus (cup product, contraction, Gerstenhaber
//! bracket, Connes differential, Lie derivative) relating them.

pub mod algebra;
pub mod error;
pub mod hochschild;
pub mod linalg;
pub mod quiver;
pub mod structure;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
