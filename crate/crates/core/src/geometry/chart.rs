//! Parametric charts with closed-form derivatives.
//!
//! Sphere-domain charts factor through the unit direction `n(u, v)` of a polar
//! frame, so the same trigonometric jets serve the round sphere, geodesic
//! spheres in curved ambients, radial bump perturbations, and the quadratic
//! projective-plane chart. The frame can be swapped to move the coordinate
//! poles away from any direction of interest; all reported scalars are
//! invariant under that choice.

use std::sync::Arc;

use crate::geometry::poly::TriPoly;
use crate::scalar::Real;

/// Orthonormal rows `a1, a2, a3`; the polar direction field is
/// `n(u, v) = sin(u) cos(v) a1 + sin(u) sin(v) a2 + cos(u) a3`.
pub type Frame3<T> = [[T; 3]; 3];

pub fn identity_frame<T: Real>() -> Frame3<T> {
    let z = T::zero();
    let o = T::one();
    [[o, z, z], [z, o, z], [z, z, o]]
}

/// Build a frame whose equator passes through `d` at `(u, v) = (pi/2, 0)`.
/// Used to evaluate geometry at directions near the default chart poles.
pub fn frame_through<T: Real>(d: &[T; 3]) -> Frame3<T> {
    let a1 = normalize3(*d);
    // Seed axis least aligned with d keeps the cross products well scaled.
    let mut seed = [T::zero(); 3];
    let mut best = 0;
    for k in 1..3 {
        if a1[k].abs() < a1[best].abs() {
            best = k;
        }
    }
    seed[best] = T::one();
    let a3 = normalize3(cross3(&a1, &seed));
    let a2 = cross3(&a3, &a1);
    [a1, a2, a3]
}

fn cross3<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize3<T: Real>(mut a: [T; 3]) -> [T; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    for x in &mut a {
        *x = *x / n;
    }
    a
}

/// Chart map into ambient coordinates. `position` must always be available;
/// analytic partials are optional (finite differences fill in otherwise).
pub trait ChartFn<T: Real>: Send + Sync {
    fn coord_dim(&self) -> usize;

    fn position(&self, u: T, v: T) -> Vec<T>;

    /// `(X_u, X_v)` in closed form, if the chart carries them.
    fn first_partials(&self, _u: T, _v: T) -> Option<[Vec<T>; 2]> {
        None
    }

    /// `(X_uu, X_uv, X_vv)` in closed form, if the chart carries them.
    fn second_partials(&self, _u: T, _v: T) -> Option<[Vec<T>; 3]> {
        None
    }

    /// Sphere-domain charts: surface point over a unit direction.
    fn position_at_direction(&self, _d: &[T; 3]) -> Option<Vec<T>> {
        None
    }

    /// Sphere-domain charts: the same surface with a different polar frame.
    fn with_frame(&self, _frame: Frame3<T>) -> Option<Arc<dyn ChartFn<T>>> {
        None
    }
}

/// 2-jet of the direction field `n(u, v)` for a given frame.
struct DirJet<T> {
    n: [T; 3],
    nu: [T; 3],
    nv: [T; 3],
    nuu: [T; 3],
    nuv: [T; 3],
    nvv: [T; 3],
}

fn dir_jet<T: Real>(frame: &Frame3<T>, u: T, v: T) -> DirJet<T> {
    let (su, cu) = (u.sin(), u.cos());
    let (sv, cv) = (v.sin(), v.cos());
    let comb = |a: T, b: T, c: T| -> [T; 3] {
        let mut out = [T::zero(); 3];
        for k in 0..3 {
            out[k] = a * frame[0][k] + b * frame[1][k] + c * frame[2][k];
        }
        out
    };
    DirJet {
        n: comb(su * cv, su * sv, cu),
        nu: comb(cu * cv, cu * sv, -su),
        nv: comb(-su * sv, su * cv, T::zero()),
        nuu: comb(-su * cv, -su * sv, -cu),
        nuv: comb(-cu * sv, cu * cv, T::zero()),
        nvv: comb(-su * cv, -su * sv, T::zero()),
    }
}

/// What a sphere-domain chart does with the direction field.
#[derive(Debug, Clone)]
pub enum SphereKind<T> {
    /// `X = r n` in `R^3`.
    Round { radius: T },
    /// Geodesic sphere of radius `rho` about a pole of the curved ambient:
    /// `(sin(rho) n, cos(rho))` in the unit sphere, `(cosh(rho), sinh(rho) n)`
    /// on the hyperboloid.
    Geodesic { rho: T, positive: bool },
    /// Radial graph `X = (1 + s(n)) n` with a polynomial bump field `s`.
    Bumpy { bump: TriPoly<T> },
    /// Quadratic chart of the projective plane in `R^6`.
    Projective,
}

pub struct SphereChart<T> {
    pub frame: Frame3<T>,
    pub kind: SphereKind<T>,
}

impl<T: Real> SphereChart<T> {
    pub fn new(kind: SphereKind<T>) -> Self {
        Self {
            frame: identity_frame(),
            kind,
        }
    }

    fn embed(&self, d: &[T; 3]) -> Vec<T> {
        match &self.kind {
            SphereKind::Round { radius } => d.iter().map(|&x| *radius * x).collect(),
            SphereKind::Geodesic { rho, positive } => {
                if *positive {
                    let s = rho.sin();
                    vec![s * d[0], s * d[1], s * d[2], rho.cos()]
                } else {
                    let s = rho.sinh();
                    vec![rho.cosh(), s * d[0], s * d[1], s * d[2]]
                }
            }
            SphereKind::Bumpy { bump } => {
                let r = T::one() + bump.eval(d);
                d.iter().map(|&x| r * x).collect()
            }
            SphereKind::Projective => veronese_bilinear(d, d),
        }
    }

    /// Push a tangent jet of the direction field through the embedding.
    fn embed_jet(&self, j: &DirJet<T>) -> [Vec<T>; 5] {
        match &self.kind {
            SphereKind::Round { radius } => {
                let r = *radius;
                [
                    scale3(&j.nu, r),
                    scale3(&j.nv, r),
                    scale3(&j.nuu, r),
                    scale3(&j.nuv, r),
                    scale3(&j.nvv, r),
                ]
            }
            SphereKind::Geodesic { rho, positive } => {
                let s = if *positive { rho.sin() } else { rho.sinh() };
                let pad = |w: &[T; 3]| -> Vec<T> {
                    if *positive {
                        vec![s * w[0], s * w[1], s * w[2], T::zero()]
                    } else {
                        vec![T::zero(), s * w[0], s * w[1], s * w[2]]
                    }
                };
                [pad(&j.nu), pad(&j.nv), pad(&j.nuu), pad(&j.nuv), pad(&j.nvv)]
            }
            SphereKind::Bumpy { bump } => {
                let r = T::one() + bump.eval(&j.n);
                let g = bump.gradient(&j.n);
                let hess = bump.hessian(&j.n);
                let d1 = |w: &[T; 3]| g[0] * w[0] + g[1] * w[1] + g[2] * w[2];
                let d2 = |a: &[T; 3], b: &[T; 3]| {
                    let mut s2 = T::zero();
                    for p in 0..3 {
                        for q in 0..3 {
                            s2 += a[p] * hess[p][q] * b[q];
                        }
                    }
                    s2
                };
                let ru = d1(&j.nu);
                let rv = d1(&j.nv);
                let ruu = d2(&j.nu, &j.nu) + d1(&j.nuu);
                let ruv = d2(&j.nu, &j.nv) + d1(&j.nuv);
                let rvv = d2(&j.nv, &j.nv) + d1(&j.nvv);
                // X = r n, so X_a = r_a n + r n_a and
                // X_ab = r_ab n + r_a n_b + r_b n_a + r n_ab.
                let first = |ra: T, na: &[T; 3]| -> Vec<T> {
                    (0..3).map(|k| ra * j.n[k] + r * na[k]).collect()
                };
                let second = |rab: T, ra: T, rb: T, na: &[T; 3], nb: &[T; 3], nab: &[T; 3]| {
                    (0..3)
                        .map(|k| rab * j.n[k] + ra * nb[k] + rb * na[k] + r * nab[k])
                        .collect::<Vec<T>>()
                };
                [
                    first(ru, &j.nu),
                    first(rv, &j.nv),
                    second(ruu, ru, ru, &j.nu, &j.nu, &j.nuu),
                    second(ruv, ru, rv, &j.nu, &j.nv, &j.nuv),
                    second(rvv, rv, rv, &j.nv, &j.nv, &j.nvv),
                ]
            }
            SphereKind::Projective => {
                // X = B(n, n) with B bilinear, so X_a = 2 B(n, n_a) and
                // X_ab = 2 B(n_a, n_b) + 2 B(n, n_ab).
                let two = T::one() + T::one();
                let d1 = |w: &[T; 3]| scale_vec(veronese_bilinear(&j.n, w), two);
                let d2 = |a: &[T; 3], b: &[T; 3], nab: &[T; 3]| {
                    let mut x = veronese_bilinear(a, b);
                    let y = veronese_bilinear(&j.n, nab);
                    for k in 0..x.len() {
                        x[k] = two * (x[k] + y[k]);
                    }
                    x
                };
                [
                    d1(&j.nu),
                    d1(&j.nv),
                    d2(&j.nu, &j.nu, &j.nuu),
                    d2(&j.nu, &j.nv, &j.nuv),
                    d2(&j.nv, &j.nv, &j.nvv),
                ]
            }
        }
    }
}

fn scale3<T: Real>(w: &[T; 3], s: T) -> Vec<T> {
    vec![s * w[0], s * w[1], s * w[2]]
}

fn scale_vec<T: Real>(mut v: Vec<T>, s: T) -> Vec<T> {
    for x in &mut v {
        *x = *x * s;
    }
    v
}

/// Symmetric bilinear map whose diagonal is the quadratic projective chart:
/// `B(p, p) = (p1^2, p2^2, p3^2, sqrt2 p1 p2, sqrt2 p1 p3, sqrt2 p2 p3)`.
fn veronese_bilinear<T: Real>(p: &[T; 3], w: &[T; 3]) -> Vec<T> {
    let half_rt2 = T::of(std::f64::consts::SQRT_2 * 0.5);
    vec![
        p[0] * w[0],
        p[1] * w[1],
        p[2] * w[2],
        half_rt2 * (p[0] * w[1] + p[1] * w[0]),
        half_rt2 * (p[0] * w[2] + p[2] * w[0]),
        half_rt2 * (p[1] * w[2] + p[2] * w[1]),
    ]
}

impl<T: Real> ChartFn<T> for SphereChart<T> {
    fn coord_dim(&self) -> usize {
        match self.kind {
            SphereKind::Round { .. } | SphereKind::Bumpy { .. } => 3,
            SphereKind::Geodesic { .. } => 4,
            SphereKind::Projective => 6,
        }
    }

    fn position(&self, u: T, v: T) -> Vec<T> {
        let j = dir_jet(&self.frame, u, v);
        self.embed(&j.n)
    }

    fn first_partials(&self, u: T, v: T) -> Option<[Vec<T>; 2]> {
        let j = dir_jet(&self.frame, u, v);
        let [xu, xv, _, _, _] = self.embed_jet(&j);
        Some([xu, xv])
    }

    fn second_partials(&self, u: T, v: T) -> Option<[Vec<T>; 3]> {
        let j = dir_jet(&self.frame, u, v);
        let [_, _, xuu, xuv, xvv] = self.embed_jet(&j);
        Some([xuu, xuv, xvv])
    }

    fn position_at_direction(&self, d: &[T; 3]) -> Option<Vec<T>> {
        Some(self.embed(d))
    }

    fn with_frame(&self, frame: Frame3<T>) -> Option<Arc<dyn ChartFn<T>>> {
        Some(Arc::new(SphereChart {
            frame,
            kind: self.kind.clone(),
        }))
    }
}

/// Doubly periodic charts over the unit square.
#[derive(Debug, Clone)]
pub enum TorusKind<T> {
    /// Product of two circles of radius `1/sqrt2` in `R^4`.
    Clifford,
    /// Hexagonal-lattice flat torus in `R^6`; the square chart follows the
    /// lattice basis `(1, 0)` and `(1/2, sqrt3/2)`.
    Equilateral,
    /// Formal flat quotient `X(u, v) = u a + v b` in the `z = 0` plane. Not a
    /// closed immersion; kept as the exactly solvable reference for the
    /// discrete spectrum.
    Flat { a: [T; 2], b: [T; 2] },
}

pub struct TorusChart<T> {
    pub kind: TorusKind<T>,
}

impl<T: Real> ChartFn<T> for TorusChart<T> {
    fn coord_dim(&self) -> usize {
        match self.kind {
            TorusKind::Clifford => 4,
            TorusKind::Equilateral => 6,
            TorusKind::Flat { .. } => 3,
        }
    }

    fn position(&self, u: T, v: T) -> Vec<T> {
        let tau = T::of(std::f64::consts::TAU);
        match &self.kind {
            TorusKind::Clifford => {
                let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
                let (a, b) = (tau * u, tau * v);
                vec![s * a.cos(), s * a.sin(), s * b.cos(), s * b.sin()]
            }
            TorusKind::Equilateral => {
                let s = T::of(1.0 / 3.0f64.sqrt());
                let (a, b, c) = (tau * v, tau * u, tau * (u + v));
                vec![
                    s * a.cos(),
                    s * a.sin(),
                    s * b.cos(),
                    s * b.sin(),
                    s * c.cos(),
                    s * c.sin(),
                ]
            }
            TorusKind::Flat { a, b } => {
                vec![u * a[0] + v * b[0], u * a[1] + v * b[1], T::zero()]
            }
        }
    }

    fn first_partials(&self, u: T, v: T) -> Option<[Vec<T>; 2]> {
        let tau = T::of(std::f64::consts::TAU);
        let z = T::zero();
        match &self.kind {
            TorusKind::Clifford => {
                let s = T::of(std::f64::consts::FRAC_1_SQRT_2) * tau;
                let (a, b) = (tau * u, tau * v);
                Some([
                    vec![-s * a.sin(), s * a.cos(), z, z],
                    vec![z, z, -s * b.sin(), s * b.cos()],
                ])
            }
            TorusKind::Equilateral => {
                let s = T::of(1.0 / 3.0f64.sqrt()) * tau;
                let (a, b, c) = (tau * v, tau * u, tau * (u + v));
                Some([
                    vec![z, z, -s * b.sin(), s * b.cos(), -s * c.sin(), s * c.cos()],
                    vec![
                        -s * a.sin(),
                        s * a.cos(),
                        z,
                        z,
                        -s * c.sin(),
                        s * c.cos(),
                    ],
                ])
            }
            TorusKind::Flat { a, b } => {
                Some([vec![a[0], a[1], z], vec![b[0], b[1], z]])
            }
        }
    }

    fn second_partials(&self, u: T, v: T) -> Option<[Vec<T>; 3]> {
        let tau = T::of(std::f64::consts::TAU);
        let t2 = tau * tau;
        let z = T::zero();
        match &self.kind {
            TorusKind::Clifford => {
                let s = T::of(std::f64::consts::FRAC_1_SQRT_2) * t2;
                let (a, b) = (tau * u, tau * v);
                Some([
                    vec![-s * a.cos(), -s * a.sin(), z, z],
                    vec![z, z, z, z],
                    vec![z, z, -s * b.cos(), -s * b.sin()],
                ])
            }
            TorusKind::Equilateral => {
                let s = T::of(1.0 / 3.0f64.sqrt()) * t2;
                let (a, b, c) = (tau * v, tau * u, tau * (u + v));
                let (ca, sa) = (a.cos(), a.sin());
                let (cb, sb) = (b.cos(), b.sin());
                let (cc, sc) = (c.cos(), c.sin());
                Some([
                    vec![z, z, -s * cb, -s * sb, -s * cc, -s * sc],
                    vec![z, z, z, z, -s * cc, -s * sc],
                    vec![-s * ca, -s * sa, z, z, -s * cc, -s * sc],
                ])
            }
            TorusKind::Flat { .. } => {
                Some([vec![z, z, z], vec![z, z, z], vec![z, z, z]])
            }
        }
    }
}

/// Uniform dilation of another chart (Euclidean ambients only).
pub struct ScaledChart<T: Real> {
    pub inner: Arc<dyn ChartFn<T>>,
    pub factor: T,
}

impl<T: Real> ChartFn<T> for ScaledChart<T> {
    fn coord_dim(&self) -> usize {
        self.inner.coord_dim()
    }

    fn position(&self, u: T, v: T) -> Vec<T> {
        scale_vec(self.inner.position(u, v), self.factor)
    }

    fn first_partials(&self, u: T, v: T) -> Option<[Vec<T>; 2]> {
        self.inner
            .first_partials(u, v)
            .map(|[a, b]| [scale_vec(a, self.factor), scale_vec(b, self.factor)])
    }

    fn second_partials(&self, u: T, v: T) -> Option<[Vec<T>; 3]> {
        self.inner.second_partials(u, v).map(|[a, b, c]| {
            [
                scale_vec(a, self.factor),
                scale_vec(b, self.factor),
                scale_vec(c, self.factor),
            ]
        })
    }

    fn position_at_direction(&self, d: &[T; 3]) -> Option<Vec<T>> {
        self.inner
            .position_at_direction(d)
            .map(|p| scale_vec(p, self.factor))
    }

    fn with_frame(&self, frame: Frame3<T>) -> Option<Arc<dyn ChartFn<T>>> {
        let inner = self.inner.with_frame(frame)?;
        Some(Arc::new(ScaledChart {
            inner,
            factor: self.factor,
        }))
    }
}

/// Position-only chart from a closure; derivatives come from finite
/// differences at the immersion level.
pub struct FnChart<T, F> {
    dim: usize,
    f: F,
    _t: std::marker::PhantomData<T>,
}

impl<T, F> FnChart<T, F>
where
    T: Real,
    F: Fn(T, T) -> Vec<T> + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self {
            dim,
            f,
            _t: std::marker::PhantomData,
        }
    }
}

impl<T, F> ChartFn<T> for FnChart<T, F>
where
    T: Real,
    F: Fn(T, T) -> Vec<T> + Send + Sync,
{
    fn coord_dim(&self) -> usize {
        self.dim
    }

    fn position(&self, u: T, v: T) -> Vec<T> {
        (self.f)(u, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn direction_jet_matches_finite_differences() {
        let frame = frame_through(&[0.3f64, -0.5, 0.81]);
        let (u, v) = (1.1, 2.3);
        let h = 1e-6;
        let j = dir_jet(&frame, u, v);
        let jm = dir_jet(&frame, u - h, v);
        let jp = dir_jet(&frame, u + h, v);
        // Second differences need a larger step to stay above roundoff.
        let h2 = 1e-4;
        let jm2 = dir_jet(&frame, u - h2, v);
        let jp2 = dir_jet(&frame, u + h2, v);
        for k in 0..3 {
            let fd = (jp.n[k] - jm.n[k]) / (2.0 * h);
            assert!((fd - j.nu[k]).abs() < 1e-9);
            let fd2 = (jp2.n[k] - 2.0 * j.n[k] + jm2.n[k]) / (h2 * h2);
            assert!((fd2 - j.nuu[k]).abs() < 1e-6);
        }
        // n stays unit along the chart.
        assert!((dot(&j.n, &j.n) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clifford_partials_match_finite_differences() {
        let chart = TorusChart {
            kind: TorusKind::<f64>::Clifford,
        };
        let (u, v) = (0.37, 0.82);
        let h = 1e-6;
        let [xu, _] = chart.first_partials(u, v).unwrap();
        let pp = chart.position(u + h, v);
        let pm = chart.position(u - h, v);
        for k in 0..4 {
            assert!(((pp[k] - pm[k]) / (2.0 * h) - xu[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn equilateral_lies_on_unit_sphere() {
        let chart = TorusChart {
            kind: TorusKind::<f64>::Equilateral,
        };
        let p = chart.position(0.21, 0.68);
        assert!((dot(&p, &p) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projective_chart_is_antipodal_invariant() {
        let chart = SphereChart::new(SphereKind::<f64>::Projective);
        let d = [0.6, 0.64, 0.48];
        let n = (dot(&d, &d)).sqrt();
        let d = [d[0] / n, d[1] / n, d[2] / n];
        let neg = [-d[0], -d[1], -d[2]];
        let a = chart.position_at_direction(&d).unwrap();
        let b = chart.position_at_direction(&neg).unwrap();
        for k in 0..6 {
            assert!((a[k] - b[k]).abs() < 1e-15);
        }
        assert!((dot(&a, &a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bumpy_second_partials_match_finite_differences() {
        let bump = TriPoly::new(vec![
            (1, 0, 0, 0.05f64),
            (0, 2, 1, -0.04),
            (2, 2, 0, 0.03),
            (0, 0, 3, 0.02),
        ]);
        let chart = SphereChart::new(SphereKind::Bumpy { bump });
        let (u, v) = (1.0, 0.7);
        let h = 1e-5;
        let [xuu, xuv, _] = chart.second_partials(u, v).unwrap();
        let c = chart.position(u, v);
        let pu = chart.position(u + h, v);
        let mu = chart.position(u - h, v);
        for k in 0..3 {
            let fd = (pu[k] - 2.0 * c[k] + mu[k]) / (h * h);
            assert!((fd - xuu[k]).abs() < 1e-5, "xuu[{k}]");
        }
        let pp = chart.position(u + h, v + h);
        let pm = chart.position(u + h, v - h);
        let mp = chart.position(u - h, v + h);
        let mm = chart.position(u - h, v - h);
        for k in 0..3 {
            let fd = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h);
            assert!((fd - xuv[k]).abs() < 1e-5, "xuv[{k}]");
        }
    }

    #[test]
    fn geodesic_chart_sits_on_model() {
        let chart = SphereChart::new(SphereKind::<f64>::Geodesic {
            rho: 0.8,
            positive: true,
        });
        let p = chart.position(1.2, 0.4);
        assert!((dot(&p, &p) - 1.0).abs() < 1e-14);

        let chart = SphereChart::new(SphereKind::<f64>::Geodesic {
            rho: 0.8,
            positive: false,
        });
        let p = chart.position(1.2, 0.4);
        let mink = -p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
        assert!((mink + 1.0).abs() < 1e-14);
    }
}
