pub mod error;
pub mod numerics;
pub mod qcore;
pub use error::{Error, Result};
pub use numerics::{q_pow, HPComplex, NumericContext};
pub use rug::Float;
