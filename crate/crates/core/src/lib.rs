pub mod certificates;
pub mod checks;
pub mod degree;
pub mod error;
pub mod exterior;
pub mod formats;
pub mod hessian;
pub mod irreducibility;
pub mod linalg;
pub mod multiindex;
pub mod node;
pub mod ring;
pub mod rng;

pub use error::{Error, Result};
