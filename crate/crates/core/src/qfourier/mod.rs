//! Skeleton lattice functions, the q-Fourier transform pair and its radial form.

mod hankel;
mod lattice;
mod radial;
mod transform;

pub use hankel::{
    hankel_forward, hankel_inverse, hankel_roundtrip, hankel_roundtrip_residual, HankelImage,
    RadialProfile,
};
pub use lattice::{skeleton_map, LatticeFunction, LatticeKey, LatticePoint, NegativeSector, Sign};
pub use radial::{radial_decompose, radial_reassemble, RadialSeries};
pub use transform::{
    forward_transform, fourier_1d, fourier_2d, inverse_transform, lemma_diagonal, lemma_kernel,
    lemma_kernel_detailed, lemma_kernel_dual, positive_key, roundtrip_lattice, roundtrip_z,
    Direction, KernelValue, Regularization, ZFunction,
};
