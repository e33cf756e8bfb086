//! Numerical spectral geometry for surfaces immersed in space forms.
//!
//! The crate computes low eigenvalues of curvature Schrodinger operators
//! `L = -laplacian - (alpha |h|^2 + beta |H|^2)` on closed surfaces, where `h`
//! is the second fundamental form and `H` the mean curvature of an immersion
//! into Euclidean space, the round sphere, or hyperbolic space. On top of the
//! raw spectra it evaluates sphere-comparison bounds for the first two
//! eigenvalues, locates the scale-comparison bifurcation point of torus
//! families, and checks the classical integral identities (Gauss equation,
//! Gauss-Bonnet, Willmore energy) that the bounds rest on.
//!
//! Modules, bottom to top:
//! * [`geometry`]: ambient spaces, parametric immersions, pointwise curvature
//!   data, a catalog of reference surfaces, and panel quadrature.
//! * [`mesh`]: triangulations of the catalog domains (icospheres and periodic
//!   grids) with per-vertex sampled curvature.
//! * [`operator`]: cotangent stiffness, mass, and potential assembly.
//! * [`eigen`]: shift-invert Lanczos and dense solvers, plus Richardson
//!   extrapolation over mesh levels.
//! * [`bounds`]: closed-form reference spectra, comparison predicates, and the
//!   bifurcation-point search.
//!
//! Everything is generic over the scalar via [`Real`]; the `*64`/`*32` aliases
//! below pin the two concrete instantiations.

pub mod error;
pub mod scalar;

pub mod bounds;
pub mod eigen;
pub mod geometry;
pub mod mesh;
pub mod operator;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Immersion64 = geometry::Immersion<f64>;
pub type PointGeometry64 = geometry::PointGeometry<f64>;
pub type CatalogEntry64 = geometry::CatalogEntry<f64>;
pub type SurfaceMesh64 = mesh::SurfaceMesh<f64>;
pub type MeshGeometry64 = mesh::MeshGeometry<f64>;
pub type AssembledOperator64 = operator::AssembledOperator<f64>;
pub type SpectrumResult64 = eigen::SpectrumResult<f64>;
pub type ExtrapolatedValue64 = eigen::ExtrapolatedValue<f64>;
pub type InequalityReport64 = bounds::InequalityReport<f64>;
pub type BifurcationResult64 = bounds::BifurcationResult<f64>;

pub type Immersion32 = geometry::Immersion<f32>;
pub type SurfaceMesh32 = mesh::SurfaceMesh<f32>;
pub type SpectrumResult32 = eigen::SpectrumResult<f32>;
