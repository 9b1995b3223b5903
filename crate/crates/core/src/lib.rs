pub mod error;
pub mod field;
pub mod harness;
pub mod hyp_sums;
pub mod hypergeom;
pub mod modular;
pub mod numeric;
pub mod padic;
pub mod zeta;

pub use error::{Error, Result};
