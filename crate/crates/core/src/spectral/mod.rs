//! Fourier-space fields on ℝ³: grids, closed-form profiles, norms, the
//! Leray projector, rotations about e₁ and the forward resolvent operator.

pub mod dump;
mod field;
mod grid;
mod norm;
pub mod ops;
mod profile;
mod transform;

pub use field::{GridField, SpectralField};
pub use grid::{PhysicalBox, SpectralGrid};
pub use norm::{exact_l2_sq, lq_norm, LqNorm, NormEntry, NormMethod, NormReport};
pub use ops::{
    apply_resolvent_operator, interior_residual, leray_project, rotate_spectral, rotation_matrix,
    Applied, Mat3,
};
pub use profile::{Monomial, Profile, SlabFamily};
pub use transform::{inverse_transform, PhysicalField};

pub type C64 = num_complex::Complex64;
/// Vector value at one ξ; scalars use slot 0.
pub type V3 = [C64; 3];

pub const ZERO3: V3 = [C64::new(0.0, 0.0); 3];
