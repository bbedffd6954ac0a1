//! Scattering kernels and layer-stripping reconstruction for discrete
//! Schrödinger operators `Ĥ = Ĥ₀ + q̂` on the hexagonal lattice.
//!
//! Module map:
//! - [`lattice`]: ℤ² encoding of the lattice and the distances `d`, `d₁₂`, `d₂₁`.
//! - [`torus`]: exact trigonometric polynomials `α`, `ᾱ`, `r = |α|²`.
//! - [`spectral`]: `Ĥ₀`, the symbol `p(ξ)`, potentials and their file format.
//! - [`resolvent`]: free and full resolvent coefficients.
//! - [`continuation`]: the complex phases `ζ(z, θ)` on the upper half plane.
//! - [`kernels`]: the amplitude kernels `B₀`, `B₁` along `z = 1 + iN`.
//! - [`stripping`]: row-by-row recovery of the potential.
//!
//! Numerics are generic over [`real::Real`], implemented for `f64` and for
//! the fixed-precision [`real::Mp`].

pub mod continuation;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod linalg;
pub mod real;
pub mod resolvent;
pub mod spectral;
pub mod stripping;
pub mod torus;

pub use error::{Error, Result};
pub use lattice::Site;
pub use spectral::PotentialField;
