//! Normal-ordered non-commutative algebras, their quantum-group actions
//! and the Casimir operator in monomial and q-difference form.

mod actions;
mod element;
mod ordering;
mod scalar;

pub use actions::{
    act, act_astar_power, c_nu, c_nu_printed, casimir, casimir_composed,
    casimir_composed_with_scale, coproduct_residual, omega_nu,
};
pub use element::{max_rel_diff, max_scaled_diff, Monomial, NormalOrderedElement, TermRecord};
pub use ordering::{normal_multiply, star, yt_left_mul, yt_right_mul};
pub use scalar::{casimir_scalar, casimir_scalar_cone, casimir_scalar_monomial};

use serde::{Deserialize, Serialize};

/// Which generator triple an element is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisTag {
    /// `(z*, H, z)`.
    W,
    /// `(x*, H, x)` with `x = Hz`.
    XT,
    /// Cone `(zeta*, alpha, zeta)`.
    V,
    /// Fourier dual `(y*, H, y)`.
    YT,
}

/// Generators of the quantum group acting on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    A,
    Astar,
    B,
    C,
    /// `D = A^{-1}`.
    D,
}
