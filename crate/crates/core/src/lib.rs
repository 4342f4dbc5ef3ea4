pub mod assembly;
pub mod elements;
pub mod error;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod polytensor;
pub mod random;
pub mod verify;

pub use error::{Error, Result};
