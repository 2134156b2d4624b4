pub mod entfrac;
pub mod error;
pub mod filter;
pub mod optics;
pub mod qcore;
pub mod swap;
pub mod sweep;
pub mod teleport;

pub use error::{Error, Result};
