pub mod error;
pub mod extensions;
pub mod families;
pub mod linalg;
pub mod lines;
pub mod matrix;
pub mod modularity;
pub mod partition;
pub mod search;
pub mod suite;
mod subdet;

pub use error::{Error, Result};
pub use matrix::{IntMatrix, SubmatrixWitness};
pub use partition::Partition;
