//! Floating-point and modular numeric kernels.

pub mod dd;
pub mod fft;
pub mod ntt;

pub use dd::{Real, DD};
