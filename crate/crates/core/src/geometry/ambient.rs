//! Ambient space forms. Surfaces live in Euclidean space, in the unit sphere
//! realized inside Euclidean coordinates, or in hyperbolic space realized as
//! the upper hyperboloid sheet inside Minkowski coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Coordinate model carrying the ambient space form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceModel {
    /// Flat `R^n`; sectional curvature 0.
    Euclidean,
    /// Unit sphere `S^n` in `R^{n+1}`; sectional curvature +1.
    UnitSphere,
    /// Upper hyperboloid sheet in `R^{1,n}`; sectional curvature -1.
    Hyperboloid,
}

/// A space form `N^n(c)` together with its coordinate realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientSpace {
    model: SpaceModel,
    /// Dimension `n` of the space form itself (not of the coordinate space).
    dim: usize,
}

impl AmbientSpace {
    pub fn new(model: SpaceModel, dim: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::DomainMismatch {
                op: "AmbientSpace::new",
                detail: format!("space form dimension must be >= 3, got {dim}"),
            });
        }
        Ok(Self { model, dim })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(SpaceModel::Euclidean, dim).expect("dim checked by caller")
    }

    pub fn unit_sphere(dim: usize) -> Self {
        Self::new(SpaceModel::UnitSphere, dim).expect("dim checked by caller")
    }

    pub fn hyperboloid(dim: usize) -> Self {
        Self::new(SpaceModel::Hyperboloid, dim).expect("dim checked by caller")
    }

    pub fn model(&self) -> SpaceModel {
        self.model
    }

    /// Space-form dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the coordinate space the model embeds in.
    pub fn coord_dim(&self) -> usize {
        match self.model {
            SpaceModel::Euclidean => self.dim,
            SpaceModel::UnitSphere | SpaceModel::Hyperboloid => self.dim + 1,
        }
    }

    /// Sectional curvature `c` of the space form: -1, 0, or +1.
    pub fn curvature<T: Real>(&self) -> T {
        match self.model {
            SpaceModel::Euclidean => T::zero(),
            SpaceModel::UnitSphere => T::one(),
            SpaceModel::Hyperboloid => -T::one(),
        }
    }

    /// Coordinate inner product: Euclidean, except Minkowski (signature
    /// `- + ... +`, time axis first) for the hyperboloid model.
    pub fn inner<T: Real>(&self, a: &[T], b: &[T]) -> T {
        debug_assert_eq!(a.len(), self.coord_dim());
        debug_assert_eq!(b.len(), self.coord_dim());
        let mut s = T::zero();
        for k in 0..a.len() {
            s += a[k] * b[k];
        }
        if self.model == SpaceModel::Hyperboloid {
            s -= (T::one() + T::one()) * a[0] * b[0];
        }
        s
    }

    pub fn norm2<T: Real>(&self, a: &[T]) -> T {
        self.inner(a, a)
    }

    /// Check that a coordinate point sits on the model surface: `|X| = 1`
    /// within `tol` for the sphere, `<X, X> = -1` with positive time
    /// coordinate for the hyperboloid. Euclidean points are unconstrained.
    pub fn on_model<T: Real>(&self, x: &[T], tol: T) -> bool {
        match self.model {
            SpaceModel::Euclidean => true,
            SpaceModel::UnitSphere => (self.norm2(x) - T::one()).abs() <= tol,
            SpaceModel::Hyperboloid => {
                (self.norm2(x) + T::one()).abs() <= tol && x[0] > T::zero()
            }
        }
    }
}
