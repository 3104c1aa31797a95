//! Relative monodromy of elliptic logarithms on products of elliptic
//! surfaces.
//!
//! [`affine`] holds the group `SL₂(ℤ)ᵏ ⋉ ℤ²ᵏ` and presentations, [`lattice`]
//! the exact integer and rational linear algebra, [`periods`] the numeric
//! continuation that produces presentations, and [`search`] the kernel
//! harvest and classification.

pub mod affine;
pub mod error;
pub mod fixtures;
pub mod int;
pub mod lattice;
pub mod par;
pub mod periods;
pub mod search;

pub use affine::{AffineElement, Generator, IsogenyData, IsogenyDirection, Presentation, UniMat2};
pub use error::{Error, Result};
pub use int::Int;
pub use lattice::{IntVector, TranslationLattice};
