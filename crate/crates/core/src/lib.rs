//! Computational q-analysis on quantum Lobachevsky spaces.
//!
//! The crate is organised bottom-up:
//! [`qkernels`] (q-calculus), [`qbessel`] (q-Bessel functions),
//! [`ncalg`] (normal-ordered algebras and quantum-group actions),
//! [`qfourier`] (skeleton lattice functions and q-Fourier transforms),
//! [`poisson`] (Poisson kernel, its Fourier image and solutions) and
//! [`verify`] (named numerical checks with reports).

pub mod context;
pub mod error;
pub mod ncalg;
pub mod poisson;
pub mod qbessel;
pub mod qfourier;
pub mod qkernels;
pub mod verify;

pub use context::QContext;
pub use error::{QError, QResult};
