//! Finite reflection groups, chamber billiards, conical targets and order
//! spectra for homogeneous harmonic maps from surfaces into Euclidean
//! buildings.

pub mod quadrature;
pub mod reflection;

pub use reflection::{Chamber, Family, FoldResult, GroupElement, GroupError, ReflectionGroup};
pub mod billiards;
pub mod cone;
pub mod hommaps;
pub mod spectrum;
