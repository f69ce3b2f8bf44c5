//! Lifting-step factorization of polyphase matrix functions.
//!
//! The crate covers three layers:
//!
//! - Laurent polynomial arithmetic with complex coefficients ([`laurent`]) and
//!   square matrices over that ring ([`polymat`]).
//! - The standard representation of the Cuntz algebra `O_N` on coefficient
//!   sequences: up-sampling isometries, their adjoints and polyphase
//!   split/merge ([`cuntz`]).
//! - Factorization of `SL_N` polynomial matrices into lower/upper lifting
//!   steps via the Euclidean algorithm ([`liftfactor`]), the least-squares
//!   factorization of sampled `L∞(T)` matrix functions ([`gridfun`]), and the
//!   application of a factored chain as an `N`-band filter bank ([`filterbank`]).
//!
//! Everything here is `no_std` and only needs `alloc`. File formats and the
//! command line front end live in the `polylift` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cuntz;
pub mod error;
pub mod filterbank;
pub mod gridfun;
pub mod laurent;
pub mod liftfactor;
pub mod polymat;

pub use error::Error;
pub use laurent::{Degree, LaurentPoly};
pub use num_complex::Complex64;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Shorthand for a complex number from its parts.
#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
