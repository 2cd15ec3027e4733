//! Exact arithmetic over the ground field Q(q, v) with spectral variables.

pub mod poly;
pub mod rat;

pub use poly::{binomial, factorial, gcd_qv, zslot, MPoly, Mono, QEXP, VEXP};
pub use rat::{ratio, Rat, RingError};
