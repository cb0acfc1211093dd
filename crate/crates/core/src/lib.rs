pub mod error;
pub mod experiments;
pub mod fem_space;
pub mod krylov;
pub mod local_assembly;
pub mod mesh;
pub mod quadrature;
pub mod schwarz;
pub mod system;
pub mod verify;

pub use error::{Error, Result};
