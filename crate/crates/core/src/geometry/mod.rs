//! Smooth geometry: ambient space forms, analytic charts, immersions with
//! first/second fundamental data, quadrature, and the named surface catalog.

pub mod ambient;
pub mod catalog;
pub mod chart;
pub mod immersion;
pub mod poly;
pub mod quadrature;

pub use ambient::{AmbientSpace, SpaceModel};
pub use catalog::{
    catalog_named, flat_torus_spectrum, standard_catalog, CatalogEntry, CatalogSpec, KnownData,
};
pub use chart::{ChartFn, SphereChart, SphereKind, TorusChart, TorusKind};
pub use immersion::{
    DerivativeProvider, Domain, Identification, Immersion, Jet2, PointGeometry,
};
pub use quadrature::{gauss_legendre, integrate, IntegrationResult, QuadratureRule};
