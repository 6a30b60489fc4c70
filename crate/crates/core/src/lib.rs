//! Adaptive frequency sampling for frequency-domain transient analysis.
//!
//! The crate is `no_std` (with `alloc`) and contains only numerical code:
//!
//! * [`systems`]: the frequency-domain system interface and built-in systems
//!   (exact rational, analytic fixed-free rod, damped modal oscillators).
//! * [`vecfit`]: common-pole vector fitting with real parameterization.
//! * [`laplace`]: Fourier-series inverse Laplace transform and closed-form
//!   inversion of rational models.
//! * [`afs`]: the adaptive sampling driver built on dual-order fits.
//!
//! File formats, the command-line front end and archives live in the
//! `freqsweep` companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod afs;
pub mod fft;
pub mod laplace;
pub mod linalg;
pub mod systems;
pub mod vecfit;

pub use num_complex::Complex64;

/// One complex frequency together with the response of every channel there.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySample {
    pub s: Complex64,
    pub values: alloc::vec::Vec<Complex64>,
}

impl FrequencySample {
    pub fn new(s: Complex64, values: alloc::vec::Vec<Complex64>) -> Self {
        Self { s, values }
    }
}
