//! Composite Gauss quadrature over the parameter rectangle.
//!
//! Nodes are interior, so polar charts are never sampled on their degenerate
//! edges. The error estimate compares the full-resolution value against a
//! half-resolution pass; for the smooth periodic integrands here that is
//! pessimistic, which is the right direction for an estimate that feeds
//! inequality verdicts.

use rayon::prelude::*;

use crate::error::Result;
use crate::geometry::immersion::{Immersion, PointGeometry};
use crate::scalar::Real;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    let nf = T::of_usize(n);
    for i in 0..n {
        // Chebyshev-based initial guess.
        let theta = T::PI() * (T::of_usize(i) + T::of(0.75)) / (nf + T::of(0.5));
        let mut x = theta.cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::of_usize(k);
        let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (p0, T::zero());
    }
    let nf = T::of_usize(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureRule {
    /// Gauss points per cell per axis.
    pub order: usize,
    /// Cells along `u`.
    pub cells_u: usize,
    /// Cells along `v`.
    pub cells_v: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            order: 4,
            cells_u: 48,
            cells_v: 48,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrationResult<T> {
    pub value: T,
    /// Difference against a half-resolution pass plus a roundoff floor.
    pub error_estimate: T,
}

/// Integrate `f(point) dA` over the surface.
pub fn integrate<T, F>(imm: &Immersion<T>, rule: QuadratureRule, f: F) -> Result<IntegrationResult<T>>
where
    T: Real,
    F: Fn(&PointGeometry<T>) -> T + Sync,
{
    let fine = pass(imm, rule.order, rule.cells_u, rule.cells_v, &f)?;
    let coarse = pass(
        imm,
        rule.order,
        (rule.cells_u / 2).max(1),
        (rule.cells_v / 2).max(1),
        &f,
    )?;
    let floor = T::of(16.0) * T::epsilon() * (T::one() + fine.abs());
    Ok(IntegrationResult {
        value: fine,
        error_estimate: (fine - coarse).abs() + floor,
    })
}

fn pass<T, F>(imm: &Immersion<T>, order: usize, cu: usize, cv: usize, f: &F) -> Result<T>
where
    T: Real,
    F: Fn(&PointGeometry<T>) -> T + Sync,
{
    let nodes = gauss_legendre::<T>(order);
    let du = imm.domain().u_max / T::of_usize(cu);
    let dv = imm.domain().v_max / T::of_usize(cv);
    let half = T::of(0.5);
    // Cells evaluate in parallel; the reduction over the collected vector is
    // serial and index-ordered, so results are bitwise reproducible.
    let cells: Result<Vec<T>> = (0..cu * cv)
        .into_par_iter()
        .map(|cell| {
            let i = cell / cv;
            let j = cell % cv;
            let u0 = du * T::of_usize(i);
            let v0 = dv * T::of_usize(j);
            let mut acc = T::zero();
            for &(xu, wu) in &nodes {
                for &(xv, wv) in &nodes {
                    let u = u0 + du * half * (T::one() + xu);
                    let v = v0 + dv * half * (T::one() + xv);
                    let pg = imm.point_geometry(u, v)?;
                    let g = pg.metric;
                    let det = (g[0][0] * g[1][1] - g[0][1] * g[0][1]).max(T::zero());
                    acc += wu * wv * f(&pg) * det.sqrt();
                }
            }
            Ok(acc * du * dv * half * half)
        })
        .collect();
    Ok(cells?.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ambient::AmbientSpace;
    use crate::geometry::chart::{SphereChart, SphereKind, TorusChart, TorusKind};
    use crate::geometry::immersion::{DerivativeProvider, Domain, Identification};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        // n-point Gauss is exact through degree 2n - 1.
        let nodes = gauss_legendre::<f64>(3);
        let int_x4: f64 = nodes.iter().map(|&(x, w)| w * x.powi(4)).sum();
        assert!((int_x4 - 0.4).abs() < 1e-14);
        let total: f64 = nodes.iter().map(|&(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    fn sphere(r: f64) -> Immersion<f64> {
        Immersion::new(
            AmbientSpace::euclidean(3),
            Domain {
                u_max: PI,
                v_max: 2.0 * PI,
                identification: Identification::SpherePolar,
            },
            Arc::new(SphereChart::new(SphereKind::Round { radius: r })),
            DerivativeProvider::Analytic,
        )
        .unwrap()
    }

    #[test]
    fn sphere_area_and_total_curvature() {
        let s = sphere(1.3);
        let rule = QuadratureRule::default();
        let area = integrate(&s, rule, |_| 1.0).unwrap();
        let want = 4.0 * PI * 1.3 * 1.3;
        assert!((area.value - want).abs() < 1e-9, "area {}", area.value);
        assert!(area.error_estimate < 1e-8);
        let total_k = integrate(&s, rule, |pg| pg.gauss).unwrap();
        assert!((total_k.value - 4.0 * PI).abs() < 1e-9);
        // Mean curvature energy of a round sphere is scale invariant.
        let willmore = integrate(&s, rule, |pg| pg.normh_mean2).unwrap();
        assert!((willmore.value - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn torus_areas_match_closed_forms() {
        let rule = QuadratureRule {
            order: 4,
            cells_u: 16,
            cells_v: 16,
        };
        let clifford = Immersion::new(
            AmbientSpace::euclidean(4),
            Domain {
                u_max: 1.0,
                v_max: 1.0,
                identification: Identification::TorusLattice,
            },
            Arc::new(TorusChart {
                kind: TorusKind::Clifford,
            }),
            DerivativeProvider::Analytic,
        )
        .unwrap();
        let a = integrate(&clifford, rule, |_| 1.0).unwrap();
        assert!((a.value - 2.0 * PI * PI).abs() < 1e-9);

        let equilateral = Immersion::new(
            AmbientSpace::euclidean(6),
            Domain {
                u_max: 1.0,
                v_max: 1.0,
                identification: Identification::TorusLattice,
            },
            Arc::new(TorusChart {
                kind: TorusKind::Equilateral,
            }),
            DerivativeProvider::Analytic,
        )
        .unwrap();
        let a = integrate(&equilateral, rule, |_| 1.0).unwrap();
        // Hand value: det g = (8 pi^2 / 3)^2 - (4 pi^2 / 3)^2, area = sqrt of that.
        let want = 4.0 * PI * PI / 3.0f64.sqrt();
        assert!((a.value - want).abs() < 1e-9, "area {}", a.value);
        let k = integrate(&equilateral, rule, |pg| pg.gauss).unwrap();
        assert!(k.value.abs() < 1e-9, "flat torus has no total curvature");
    }

    #[test]
    fn geodesic_sphere_area_tracks_radius() {
        let rho = 1.1f64;
        let imm = Immersion::new(
            AmbientSpace::unit_sphere(3),
            Domain {
                u_max: PI,
                v_max: 2.0 * PI,
                identification: Identification::SpherePolar,
            },
            Arc::new(SphereChart::new(SphereKind::Geodesic {
                rho,
                positive: true,
            })),
            DerivativeProvider::Analytic,
        )
        .unwrap();
        let a = integrate(&imm, QuadratureRule::default(), |_| 1.0).unwrap();
        let want = 4.0 * PI * rho.sin() * rho.sin();
        assert!((a.value - want).abs() < 1e-9);
    }
}
