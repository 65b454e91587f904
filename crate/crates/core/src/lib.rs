//! Exact construction of Sheffer polynomial families whose zeros lie on a
//! vertical line, multiprecision root location, Mellin/zeta identity checks,
//! and saddle-point asymptotics for the associated contour integrals.

pub mod asymptotics;
pub mod error;
pub mod roots;
pub mod series;
pub mod sheffer;
pub mod special;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
