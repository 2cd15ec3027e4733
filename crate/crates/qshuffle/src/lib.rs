//! Exact symbolic computation engine for the matrix-valued shuffle algebras
//! attached to quantum toroidal gl_n.
//!
//! The engine works over the field Q(q, v) where `v^n` is the loop parameter
//! of the torus; everything is exact rational arithmetic, no floating point
//! and no modular tricks.  Elements of the shuffle algebra in spectral degree
//! k are `n^k x n^k` matrices over Q(q, v, z_1, ..., z_k), stored sparsely.
//!
//! Module layout:
//! * [`ring`]: Laurent polynomials and rational functions, residues, series.
//! * [`tensor`]: sparse matrix-valued rational functions and slot calculus.
//! * [`rmatrix`]: the gl_n R-matrix with spectral parameter and its variants.
//! * [`shuffle`]: the braided shuffle product and symmetrization.
//! * [`wheel`]: iterated residues, wheel conditions, membership tests.
//! * [`pbw`]: root generators, degree functionals, slope filtrations.
//! * [`pairing`]: the bialgebra pairing between the two shuffle algebras.
//! * [`classic`]: the scalar (color-symmetric) incarnation for comparison.

pub mod classic;
pub mod pairing;
pub mod pbw;
pub mod ring;
pub mod rmatrix;
pub mod shuffle;
pub mod tensor;
pub mod wheel;
