pub mod ckem;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod par;
pub mod polytope;
pub mod quadrature;
pub mod sasaki;
pub mod soliton;

pub use error::{Error, Result};
