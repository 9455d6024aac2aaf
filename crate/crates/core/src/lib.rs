#![no_std]

extern crate alloc;

pub mod cheb;
pub mod conditioning;
pub mod construct;
pub mod error;
pub mod index_set;
pub mod matrix;
pub mod net;
mod num;
pub mod train;

pub use error::{Error, Result};
pub use index_set::{validate_downward_closed, IndexSet, IndexSetKind};
pub use matrix::Matrix;
