//! Immersed surfaces: a chart over a parameter rectangle, an ambient space
//! form, and the machinery that turns chart jets into first and second
//! fundamental forms.
//!
//! The second fundamental form is taken inside the space form: the coordinate
//! second derivative is stripped of its tangential part and, in curved
//! ambients, of its component along the position vector (the sphere and
//! hyperboloid models are umbilic inside their coordinate spaces, and that
//! component belongs to the model, not the surface).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::ambient::{AmbientSpace, SpaceModel};
use crate::geometry::chart::{frame_through, ChartFn, Frame3};
use crate::scalar::Real;

/// Degeneracy gate: the chart fails where `det g <= DEGENERACY_EPS * (tr g)^2`.
pub const DEGENERACY_EPS: f64 = 1e-14;
/// Relative step for finite-difference jets.
pub const FD_RELATIVE_STEP: f64 = 1e-4;
/// Two finite-difference step sizes must agree to this relative tolerance.
pub const FD_AGREEMENT_TOL: f64 = 1e-5;

/// How the parameter rectangle closes up into a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Identification {
    /// No identification; integration only.
    Open,
    /// Opposite edges glued: `(0, v) ~ (u_max, v)` and `(u, 0) ~ (u, v_max)`.
    TorusLattice,
    /// Polar chart of a sphere: `u` is the colatitude, `v` wraps, and the
    /// edges `u = 0`, `u = u_max` each collapse to a point.
    SpherePolar,
    /// Polar chart of a hemisphere whose equator is glued antipodally
    /// (projective plane). Quadrature only; no orientable mesh exists.
    HemisphereAntipodal,
}

#[derive(Debug, Clone, Copy)]
pub struct Domain<T> {
    pub u_max: T,
    pub v_max: T,
    pub identification: Identification,
}

/// Where chart derivatives come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeProvider {
    /// The chart supplies closed-form first and second partials.
    Analytic,
    /// Fourth-order central differences of the position map, cross-validated
    /// at a doubled step.
    FiniteDifference,
}

/// Position with first and second coordinate partials.
#[derive(Debug, Clone)]
pub struct Jet2<T> {
    pub x: Vec<T>,
    pub xu: Vec<T>,
    pub xv: Vec<T>,
    pub xuu: Vec<T>,
    pub xuv: Vec<T>,
    pub xvv: Vec<T>,
}

/// First and second fundamental data at one parameter point.
#[derive(Debug, Clone)]
pub struct PointGeometry<T> {
    pub position: Vec<T>,
    /// Pullback metric `g_ij` in chart coordinates.
    pub metric: [[T; 2]; 2],
    /// Normal-valued second fundamental form `(h_uu, h_uv, h_vv)`.
    pub second_form: [Vec<T>; 3],
    /// Mean curvature vector `H = (1/2) g^{ij} h_ij`.
    pub mean: Vec<T>,
    /// `|h|^2`, fully traced against the metric.
    pub normh2: T,
    /// `|H|^2`.
    pub normh_mean2: T,
    /// Gauss curvature from `K = (2c + 4|H|^2 - |h|^2) / 2`.
    pub gauss: T,
    /// Principal curvatures (sorted), available in codimension one.
    pub principal: Option<(T, T)>,
}

impl<T: Real> PointGeometry<T> {
    /// Residual of `|h|^2 + 2K - 4|H|^2 - 2c` with `K` recomputed as
    /// `k1 k2 + c` from the principal curvatures. Exercises the normal
    /// projection along a second route; `None` above codimension one.
    pub fn gauss_residual_via_principal(&self, c: T) -> Option<T> {
        let (k1, k2) = self.principal?;
        Some(self.gauss_residual_against(k1 * k2 + c, c))
    }

    /// Residual of `|h|^2 + 2K - 4|H|^2 - 2c` against an independently known
    /// Gauss curvature.
    pub fn gauss_residual_against(&self, k_reference: T, c: T) -> T {
        let two = T::of(2.0);
        let four = T::of(4.0);
        self.normh2 + two * k_reference - four * self.normh_mean2 - two * c
    }
}

pub struct Immersion<T: Real> {
    ambient: AmbientSpace,
    domain: Domain<T>,
    chart: Arc<dyn ChartFn<T>>,
    provider: DerivativeProvider,
}

impl<T: Real> Immersion<T> {
    pub fn new(
        ambient: AmbientSpace,
        domain: Domain<T>,
        chart: Arc<dyn ChartFn<T>>,
        provider: DerivativeProvider,
    ) -> Result<Self> {
        if chart.coord_dim() != ambient.coord_dim() {
            return Err(Error::DomainMismatch {
                op: "Immersion::new",
                detail: format!(
                    "chart writes {} coordinates, ambient expects {}",
                    chart.coord_dim(),
                    ambient.coord_dim()
                ),
            });
        }
        if provider == DerivativeProvider::Analytic {
            let u = domain.u_max * T::of(0.41);
            let v = domain.v_max * T::of(0.37);
            if chart.first_partials(u, v).is_none() || chart.second_partials(u, v).is_none() {
                return Err(Error::DomainMismatch {
                    op: "Immersion::new",
                    detail: "analytic provider requested but chart has no closed-form partials"
                        .into(),
                });
            }
        }
        Ok(Self {
            ambient,
            domain,
            chart,
            provider,
        })
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn provider(&self) -> DerivativeProvider {
        self.provider
    }

    pub fn chart(&self) -> Arc<dyn ChartFn<T>> {
        Arc::clone(&self.chart)
    }

    pub fn position(&self, u: T, v: T) -> Vec<T> {
        self.chart.position(u, v)
    }

    /// Sphere-domain charts evaluate directly over a unit direction.
    pub fn position_at_direction(&self, d: &[T; 3]) -> Option<Vec<T>> {
        self.chart.position_at_direction(d)
    }

    pub fn jet(&self, u: T, v: T) -> Result<Jet2<T>> {
        match self.provider {
            DerivativeProvider::Analytic => {
                let [xu, xv] = self
                    .chart
                    .first_partials(u, v)
                    .expect("validated at construction");
                let [xuu, xuv, xvv] = self
                    .chart
                    .second_partials(u, v)
                    .expect("validated at construction");
                Ok(Jet2 {
                    x: self.chart.position(u, v),
                    xu,
                    xv,
                    xuu,
                    xuv,
                    xvv,
                })
            }
            DerivativeProvider::FiniteDifference => self.fd_jet(u, v),
        }
    }

    fn fd_jet(&self, u: T, v: T) -> Result<Jet2<T>> {
        let hu = self.domain.u_max * T::of(FD_RELATIVE_STEP);
        let hv = self.domain.v_max * T::of(FD_RELATIVE_STEP);
        let j1 = self.fd_jet_at_step(u, v, hu, hv);
        let j2 = self.fd_jet_at_step(u, v, hu + hu, hv + hv);
        let tol = T::of(FD_AGREEMENT_TOL);
        let fields: [(&str, &Vec<T>, &Vec<T>); 5] = [
            ("xu", &j1.xu, &j2.xu),
            ("xv", &j1.xv, &j2.xv),
            ("xuu", &j1.xuu, &j2.xuu),
            ("xuv", &j1.xuv, &j2.xuv),
            ("xvv", &j1.xvv, &j2.xvv),
        ];
        for (which, a, b) in fields {
            let mut diff = T::zero();
            let mut scale = T::one();
            for k in 0..a.len() {
                diff = diff.max((a[k] - b[k]).abs());
                scale = scale.max(a[k].abs());
            }
            if diff > tol * scale {
                return Err(Error::FiniteDifferenceUnstable {
                    u: u.as_f64(),
                    v: v.as_f64(),
                    which,
                    disagreement: (diff / scale).as_f64(),
                });
            }
        }
        Ok(j1)
    }

    fn fd_jet_at_step(&self, u: T, v: T, hu: T, hv: T) -> Jet2<T> {
        let dim = self.chart.coord_dim();
        let f = |uu: T, vv: T| self.chart.position(uu, vv);
        let x = f(u, v);
        // Fourth-order central stencils.
        let c12 = T::of(12.0);
        let c8 = T::of(8.0);
        let c16 = T::of(16.0);
        let c30 = T::of(30.0);
        let lin = |p2: &[T], p1: &[T], m1: &[T], m2: &[T], h: T| -> Vec<T> {
            (0..dim)
                .map(|k| (-p2[k] + c8 * p1[k] - c8 * m1[k] + m2[k]) / (c12 * h))
                .collect()
        };
        let quad = |p2: &[T], p1: &[T], c0: &[T], m1: &[T], m2: &[T], h: T| -> Vec<T> {
            (0..dim)
                .map(|k| {
                    (-p2[k] + c16 * p1[k] - c30 * c0[k] + c16 * m1[k] - m2[k]) / (c12 * h * h)
                })
                .collect()
        };
        let two = T::of(2.0);
        let up2 = f(u + two * hu, v);
        let up1 = f(u + hu, v);
        let um1 = f(u - hu, v);
        let um2 = f(u - two * hu, v);
        let vp2 = f(u, v + two * hv);
        let vp1 = f(u, v + hv);
        let vm1 = f(u, v - hv);
        let vm2 = f(u, v - two * hv);
        let xu = lin(&up2, &up1, &um1, &um2, hu);
        let xv = lin(&vp2, &vp1, &vm1, &vm2, hv);
        let xuu = quad(&up2, &up1, &x, &um1, &um2, hu);
        let xvv = quad(&vp2, &vp1, &x, &vm1, &vm2, hv);
        // Mixed partial: tensor product of two fourth-order first-derivative
        // stencils (offsets -2, -1, +1, +2 with weights 1, -8, 8, -1 over 12h).
        let offs = [-two, -T::one(), T::one(), two];
        let wgts = [T::one(), -c8, c8, -T::one()];
        let mut xuv = vec![T::zero(); dim];
        for a in 0..4 {
            for b in 0..4 {
                let p = f(u + offs[a] * hu, v + offs[b] * hv);
                let w = wgts[a] * wgts[b];
                for k in 0..dim {
                    xuv[k] += w * p[k];
                }
            }
        }
        let denom = c12 * hu * c12 * hv;
        for k in 0..dim {
            xuv[k] = xuv[k] / denom;
        }
        Jet2 {
            x,
            xu,
            xv,
            xuu,
            xuv,
            xvv,
        }
    }

    /// Pullback metric `g_ij = <X_i, X_j>` with the degeneracy gate applied.
    pub fn pullback_metric(&self, u: T, v: T) -> Result<[[T; 2]; 2]> {
        let jet = self.jet(u, v)?;
        self.metric_of(&jet, u, v)
    }

    fn metric_of(&self, jet: &Jet2<T>, u: T, v: T) -> Result<[[T; 2]; 2]> {
        let guu = self.ambient.inner(&jet.xu, &jet.xu);
        let guv = self.ambient.inner(&jet.xu, &jet.xv);
        let gvv = self.ambient.inner(&jet.xv, &jet.xv);
        let det = guu * gvv - guv * guv;
        let tr = guu + gvv;
        if !(det > T::of(DEGENERACY_EPS) * tr * tr) {
            return Err(Error::DegenerateImmersion {
                u: u.as_f64(),
                v: v.as_f64(),
                det: det.as_f64(),
            });
        }
        Ok([[guu, guv], [guv, gvv]])
    }

    /// Full curvature data at a parameter point.
    pub fn point_geometry(&self, u: T, v: T) -> Result<PointGeometry<T>> {
        let jet = self.jet(u, v)?;
        let g = self.metric_of(&jet, u, v)?;
        let det = g[0][0] * g[1][1] - g[0][1] * g[0][1];
        let ginv = [
            [g[1][1] / det, -g[0][1] / det],
            [-g[0][1] / det, g[0][0] / det],
        ];
        let amb = &self.ambient;
        let dim = amb.coord_dim();
        let x_norm2 = amb.norm2(&jet.x);

        // Normal part of a coordinate vector: strip the component along the
        // position (curved models only) and the tangential components.
        let project_normal = |w: &[T]| -> Vec<T> {
            let mut out = w.to_vec();
            if amb.model() != SpaceModel::Euclidean {
                let coeff = amb.inner(w, &jet.x) / x_norm2;
                for k in 0..dim {
                    out[k] = out[k] - coeff * jet.x[k];
                }
            }
            let wu = amb.inner(&out, &jet.xu);
            let wv = amb.inner(&out, &jet.xv);
            let a = ginv[0][0] * wu + ginv[0][1] * wv;
            let b = ginv[1][0] * wu + ginv[1][1] * wv;
            for k in 0..dim {
                out[k] = out[k] - a * jet.xu[k] - b * jet.xv[k];
            }
            out
        };

        let huu = project_normal(&jet.xuu);
        let huv = project_normal(&jet.xuv);
        let hvv = project_normal(&jet.xvv);
        let h = [huu, huv, hvv];
        let h_at = |i: usize, j: usize| -> &Vec<T> { &h[i + j] };

        let half = T::of(0.5);
        let mut mean = vec![T::zero(); dim];
        for i in 0..2 {
            for j in 0..2 {
                let w = ginv[i][j];
                let hij = h_at(i, j);
                for k in 0..dim {
                    mean[k] += half * w * hij[k];
                }
            }
        }
        let normh_mean2 = amb.norm2(&mean);

        let mut normh2 = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        normh2 += ginv[i][k] * ginv[j][l] * amb.inner(h_at(i, j), h_at(k, l));
                    }
                }
            }
        }

        let c = amb.curvature::<T>();
        let two = T::of(2.0);
        let four = T::of(4.0);
        let gauss = (two * c + four * normh_mean2 - normh2) / two;

        let principal = if amb.dim() == 3 {
            let nu = self.unit_normal(&jet, &ginv, x_norm2);
            nu.map(|nu| {
                let auu = amb.inner(&h[0], &nu);
                let auv = amb.inner(&h[1], &nu);
                let avv = amb.inner(&h[2], &nu);
                // Eigenvalues of g^{-1} A.
                let m00 = ginv[0][0] * auu + ginv[0][1] * auv;
                let m01 = ginv[0][0] * auv + ginv[0][1] * avv;
                let m10 = ginv[1][0] * auu + ginv[1][1] * auv;
                let m11 = ginv[1][0] * auv + ginv[1][1] * avv;
                let tr = m00 + m11;
                let dt = m00 * m11 - m01 * m10;
                let disc = (tr * tr - four * dt).max(T::zero()).sqrt();
                let k1 = (tr - disc) / two;
                let k2 = (tr + disc) / two;
                (k1, k2)
            })
        } else {
            None
        };

        Ok(PointGeometry {
            position: jet.x,
            metric: g,
            second_form: h,
            mean,
            normh2,
            normh_mean2,
            gauss,
            principal,
        })
    }

    /// Unit normal in codimension one, via projection of the best coordinate
    /// axis. Sign is an artifact of the axis choice; curvature invariants do
    /// not depend on it.
    fn unit_normal(
        &self,
        jet: &Jet2<T>,
        ginv: &[[T; 2]; 2],
        x_norm2: T,
    ) -> Option<Vec<T>> {
        let amb = &self.ambient;
        let dim = amb.coord_dim();
        let mut best: Option<(T, Vec<T>)> = None;
        for axis in 0..dim {
            let mut w = vec![T::zero(); dim];
            w[axis] = T::one();
            if amb.model() != SpaceModel::Euclidean {
                let coeff = amb.inner(&w, &jet.x) / x_norm2;
                for k in 0..dim {
                    w[k] = w[k] - coeff * jet.x[k];
                }
            }
            let wu = amb.inner(&w, &jet.xu);
            let wv = amb.inner(&w, &jet.xv);
            let a = ginv[0][0] * wu + ginv[0][1] * wv;
            let b = ginv[1][0] * wu + ginv[1][1] * wv;
            for k in 0..dim {
                w[k] = w[k] - a * jet.xu[k] - b * jet.xv[k];
            }
            let n2 = amb.norm2(&w);
            if best.as_ref().map_or(true, |(bn, _)| n2 > *bn) {
                best = Some((n2, w));
            }
        }
        let (n2, mut w) = best?;
        if n2 <= T::of(DEGENERACY_EPS) {
            return None;
        }
        let inv = n2.sqrt().recip();
        for k in 0..dim {
            w[k] = w[k] * inv;
        }
        Some(w)
    }

    /// Curvature data over a unit direction, for sphere-domain charts. The
    /// polar frame is rotated so the evaluation sits on the chart equator,
    /// which keeps the computation regular at the default chart poles.
    pub fn point_geometry_at_direction(&self, d: &[T; 3]) -> Result<PointGeometry<T>> {
        let frame: Frame3<T> = frame_through(d);
        let chart = self.chart.with_frame(frame).ok_or(Error::DomainMismatch {
            op: "point_geometry_at_direction",
            detail: "chart has no sphere-direction evaluation".into(),
        })?;
        let rotated = Immersion {
            ambient: self.ambient,
            domain: self.domain,
            chart,
            provider: self.provider,
        };
        rotated.point_geometry(T::FRAC_PI_2(), T::zero())
    }

    /// Spot-check that sampled chart points sit on the ambient model, away
    /// from the identification-degenerate edges.
    pub fn validate(&self, samples_per_axis: usize) -> Result<()> {
        let tol = T::of(1e-10);
        let margin = T::of(0.05);
        for i in 0..samples_per_axis {
            for j in 0..samples_per_axis {
                let fi = (T::of_usize(i) + T::of(0.5)) / T::of_usize(samples_per_axis);
                let fj = (T::of_usize(j) + T::of(0.5)) / T::of_usize(samples_per_axis);
                let u = self.domain.u_max * (margin + (T::one() - (margin + margin)) * fi);
                let v = self.domain.v_max * fj;
                let x = self.position(u, v);
                if !self.ambient.on_model(&x, tol) {
                    return Err(Error::DomainMismatch {
                        op: "Immersion::validate",
                        detail: format!(
                            "chart point at ({}, {}) leaves the ambient model",
                            u.as_f64(),
                            v.as_f64()
                        ),
                    });
                }
                self.pullback_metric(u, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{FnChart, SphereChart, SphereKind, TorusChart, TorusKind};
    use std::f64::consts::PI;

    fn round_sphere(r: f64) -> Immersion<f64> {
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

    fn clifford() -> Immersion<f64> {
        Immersion::new(
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
        .unwrap()
    }

    #[test]
    fn unit_sphere_equator_metric_is_identity() {
        let s = round_sphere(1.0);
        let g = s.pullback_metric(PI / 2.0, 0.0).unwrap();
        assert!((g[0][0] - 1.0).abs() < 1e-14);
        assert!((g[1][1] - 1.0).abs() < 1e-14);
        assert!(g[0][1].abs() < 1e-14);
    }

    #[test]
    fn unit_sphere_curvature_scalars() {
        let s = round_sphere(1.0);
        let pg = s.point_geometry(1.1, 0.7).unwrap();
        assert!((pg.normh2 - 2.0).abs() < 1e-12);
        assert!((pg.normh_mean2 - 1.0).abs() < 1e-12);
        assert!((pg.gauss - 1.0).abs() < 1e-12);
        let (k1, k2) = pg.principal.unwrap();
        assert!((k1 * k2 - 1.0).abs() < 1e-12);
        assert!((k1 - k2).abs() < 1e-10, "umbilic");
        assert!(pg.gauss_residual_via_principal(0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sphere_scalars_scale_with_radius() {
        let s = round_sphere(2.0);
        let pg = s.point_geometry(1.3, 2.2).unwrap();
        assert!((pg.normh2 - 0.5).abs() < 1e-12);
        assert!((pg.normh_mean2 - 0.25).abs() < 1e-12);
        assert!((pg.gauss - 0.25).abs() < 1e-12);
    }

    // Differentiating the product-of-circles chart by hand gives
    // g = diag(2 pi^2, 2 pi^2) on the unit square.
    #[test]
    fn clifford_metric_oracle() {
        let t = clifford();
        let g = t.pullback_metric(0.23, 0.81).unwrap();
        let want = 2.0 * PI * PI;
        assert!((g[0][0] - want).abs() < 1e-10);
        assert!((g[1][1] - want).abs() < 1e-10);
        assert!(g[0][1].abs() < 1e-10);
    }

    #[test]
    fn clifford_curvature_scalars() {
        let t = clifford();
        let pg = t.point_geometry(0.45, 0.12).unwrap();
        assert!((pg.normh2 - 4.0).abs() < 1e-10);
        assert!((pg.normh_mean2 - 1.0).abs() < 1e-10);
        assert!(pg.gauss.abs() < 1e-10);
        assert!(pg.gauss_residual_against(0.0, 0.0).abs() < 1e-10);
    }

    #[test]
    fn polar_chart_degenerates_at_pole() {
        let s = round_sphere(1.0);
        match s.pullback_metric(0.0, 0.3) {
            Err(Error::DegenerateImmersion { .. }) => {}
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }

    #[test]
    fn direction_evaluation_agrees_with_chart_and_covers_poles() {
        let s = round_sphere(1.0);
        let pole = s.point_geometry_at_direction(&[0.0, 0.0, 1.0]).unwrap();
        assert!((pole.normh2 - 2.0).abs() < 1e-12);
        let d = [0.48f64, -0.6, 0.64];
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let d = [d[0] / n, d[1] / n, d[2] / n];
        let pg = s.point_geometry_at_direction(&d).unwrap();
        assert!((pg.gauss - 1.0).abs() < 1e-12);
    }

    #[test]
    fn finite_differences_match_analytic_jets() {
        let analytic = round_sphere(1.0);
        let fd = Immersion::new(
            AmbientSpace::euclidean(3),
            Domain {
                u_max: PI,
                v_max: 2.0 * PI,
                identification: Identification::SpherePolar,
            },
            Arc::new(FnChart::new(3, |u: f64, v: f64| {
                vec![u.sin() * v.cos(), u.sin() * v.sin(), u.cos()]
            })),
            DerivativeProvider::FiniteDifference,
        )
        .unwrap();
        let (u, v) = (1.2, 0.9);
        let pa = analytic.point_geometry(u, v).unwrap();
        let pf = fd.point_geometry(u, v).unwrap();
        assert!((pa.normh2 - pf.normh2).abs() < 1e-4);
        assert!((pa.gauss - pf.gauss).abs() < 1e-4);
        assert!((pa.normh_mean2 - pf.normh_mean2).abs() < 1e-4);
    }

    #[test]
    fn noisy_chart_reports_unstable_derivatives() {
        let noisy = Immersion::new(
            AmbientSpace::euclidean(3),
            Domain {
                u_max: PI,
                v_max: 2.0 * PI,
                identification: Identification::SpherePolar,
            },
            Arc::new(FnChart::new(3, |u: f64, v: f64| {
                // Quadratic phase so the jitter is incommensurate with the step.
                let w = 1.0 + 1e-6 * (1e7 * u * u).sin();
                vec![w * u.sin() * v.cos(), w * u.sin() * v.sin(), w * u.cos()]
            })),
            DerivativeProvider::FiniteDifference,
        )
        .unwrap();
        match noisy.jet(1.1, 0.4) {
            Err(Error::FiniteDifferenceUnstable { .. }) => {}
            other => panic!("expected instability, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn geodesic_sphere_in_sphere_ambient_is_umbilic() {
        let rho = 0.7f64;
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
        let pg = imm.point_geometry(1.3, 0.5).unwrap();
        let cot = rho.cos() / rho.sin();
        assert!((pg.normh_mean2 - cot * cot).abs() < 1e-10);
        assert!((pg.normh2 - 2.0 * cot * cot).abs() < 1e-10);
        // K = 1 / sin^2(rho) via the structural identity with c = +1.
        assert!((pg.gauss - 1.0 / (rho.sin() * rho.sin())).abs() < 1e-10);
        assert!(pg.gauss_residual_via_principal(1.0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn geodesic_sphere_in_hyperbolic_ambient() {
        let rho = 0.9f64;
        let imm = Immersion::new(
            AmbientSpace::hyperboloid(3),
            Domain {
                u_max: PI,
                v_max: 2.0 * PI,
                identification: Identification::SpherePolar,
            },
            Arc::new(SphereChart::new(SphereKind::Geodesic {
                rho,
                positive: false,
            })),
            DerivativeProvider::Analytic,
        )
        .unwrap();
        let pg = imm.point_geometry(0.8, 1.7).unwrap();
        let coth = rho.cosh() / rho.sinh();
        assert!((pg.normh_mean2 - coth * coth).abs() < 1e-10);
        assert!((pg.gauss - 1.0 / (rho.sinh() * rho.sinh())).abs() < 1e-10);
        assert!(pg.gauss_residual_via_principal(-1.0).unwrap().abs() < 1e-10);
        imm.validate(5).unwrap();
    }

    #[test]
    fn validate_accepts_catalog_models() {
        round_sphere(1.0).validate(6).unwrap();
        clifford().validate(6).unwrap();
    }
}
