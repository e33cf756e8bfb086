//! The surface catalog: named analytic immersions with their known constants.
//!
//! Every entry ships closed-form partials and, where the curvature data is
//! constant, the known scalar values that the verification layer compares
//! against. The abstract flat torus is metric-only: its planar chart fixes
//! lengths and angles but does not close up in space, so ambient curvature
//! functionals are switched off for it (`immersed = false`).

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::ambient::AmbientSpace;
use crate::geometry::chart::{ScaledChart, SphereChart, SphereKind, TorusChart, TorusKind};
use crate::geometry::immersion::{DerivativeProvider, Domain, Identification, Immersion};
use crate::geometry::poly::TriPoly;
use crate::geometry::quadrature::{integrate, QuadratureRule};
use crate::scalar::Real;

/// Maximum admissible bumpy-sphere amplitude; beyond it the radial graph can
/// stop being an immersion.
pub const BUMPY_AMPLITUDE_CAP: f64 = 0.3;

/// Parsed catalog request.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogSpec<T> {
    RoundSphere { radius: T },
    /// Round sphere of prescribed area inside the space form of curvature
    /// `curvature` (one of -1, 0, 1).
    GeodesicSphere { area: T, curvature: i8 },
    CliffordTorus,
    EquilateralTorus,
    /// Abstract flat torus with lattice basis `a`, `b` in the plane.
    FlatTorus { a: [T; 2], b: [T; 2] },
    BumpySphere { seed: u64, amplitude: T },
    Veronese,
}

/// Constants known in closed form for an entry; `None` where not constant.
#[derive(Debug, Clone)]
pub struct KnownData<T> {
    pub genus: usize,
    pub orientable: bool,
    pub area: Option<T>,
    /// Constant `|h|^2` when the surface has one.
    pub normh2: Option<T>,
    /// Constant `|H|^2` when the surface has one.
    pub normh_mean2: Option<T>,
    /// Constant Gauss curvature when the surface has one.
    pub gauss: Option<T>,
    /// First nonzero Laplace eigenvalue, when known in closed form.
    pub laplace_lambda2: Option<T>,
}

impl<T: Real> KnownData<T> {
    /// Orientability factor: 2 for orientable surfaces, 1 otherwise.
    pub fn epsilon(&self) -> T {
        if self.orientable {
            T::of(2.0)
        } else {
            T::one()
        }
    }

    fn unknown(genus: usize, orientable: bool) -> Self {
        Self {
            genus,
            orientable,
            area: None,
            normh2: None,
            normh_mean2: None,
            gauss: None,
            laplace_lambda2: None,
        }
    }
}

pub struct CatalogEntry<T: Real> {
    pub name: String,
    pub spec: CatalogSpec<T>,
    pub immersion: Immersion<T>,
    pub known: KnownData<T>,
    /// False for the abstract flat torus, whose planar picture is not a
    /// closed surface in space.
    pub immersed: bool,
}

impl<T: Real> CatalogSpec<T> {
    /// Parse `name` or `name(key=value, ...)`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (name, args) = match text.find('(') {
            None => (text, Vec::new()),
            Some(open) => {
                if !text.ends_with(')') {
                    return Err(Error::UnknownCatalogName(text.into()));
                }
                let inner = &text[open + 1..text.len() - 1];
                let mut args = Vec::new();
                for piece in inner.split(',') {
                    let piece = piece.trim();
                    if piece.is_empty() {
                        continue;
                    }
                    let (k, v) = piece.split_once('=').ok_or_else(|| Error::BadCatalogParameter {
                        surface: text[..open].into(),
                        name: format!("expected key=value, got `{piece}`"),
                    })?;
                    args.push((k.trim().to_string(), v.trim().to_string()));
                }
                (&text[..open], args)
            }
        };
        let surface = name.to_string();
        let num = |key: &str, raw: &str| -> Result<T> {
            raw.parse::<f64>().map(T::of).map_err(|_| Error::BadCatalogParameter {
                surface: surface.clone(),
                name: format!("{key}={raw} is not a number"),
            })
        };
        let take = |key: &str| args.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone());
        let reject_unknown = |allowed: &[&str]| -> Result<()> {
            for (k, _) in &args {
                if !allowed.contains(&k.as_str()) {
                    return Err(Error::BadCatalogParameter {
                        surface: surface.clone(),
                        name: format!("unknown parameter `{k}`"),
                    });
                }
            }
            Ok(())
        };
        let spec = match name {
            "round_sphere" => {
                let radius = match take("r").or_else(|| take("radius")) {
                    Some(raw) => num("r", &raw)?,
                    None => T::one(),
                };
                reject_unknown(&["r", "radius"])?;
                CatalogSpec::RoundSphere { radius }
            }
            "geodesic_sphere" => {
                let area = match take("a").or_else(|| take("area")) {
                    Some(raw) => num("a", &raw)?,
                    None => T::of(4.0) * T::PI(),
                };
                let curvature = match take("c").or_else(|| take("curvature")) {
                    Some(raw) => {
                        let c = num("c", &raw)?.as_f64();
                        if c != -1.0 && c != 0.0 && c != 1.0 {
                            return Err(Error::BadCatalogParameter {
                                surface: surface.clone(),
                                name: format!("c={c} is not one of -1, 0, 1"),
                            });
                        }
                        c as i8
                    }
                    None => 0,
                };
                reject_unknown(&["a", "area", "c", "curvature"])?;
                CatalogSpec::GeodesicSphere { area, curvature }
            }
            "clifford_torus" => {
                reject_unknown(&[])?;
                CatalogSpec::CliffordTorus
            }
            "equilateral_torus" => {
                reject_unknown(&[])?;
                CatalogSpec::EquilateralTorus
            }
            "flat_torus" => {
                let g = |key: &str, dflt: f64| -> Result<T> {
                    match take(key) {
                        Some(raw) => num(key, &raw),
                        None => Ok(T::of(dflt)),
                    }
                };
                let a = [g("ax", 1.0)?, g("ay", 0.0)?];
                let b = [g("bx", 0.0)?, g("by", 1.0)?];
                reject_unknown(&["ax", "ay", "bx", "by"])?;
                CatalogSpec::FlatTorus { a, b }
            }
            "bumpy_sphere" => {
                let seed = match take("seed") {
                    Some(raw) => raw.parse::<u64>().map_err(|_| Error::BadCatalogParameter {
                        surface: surface.clone(),
                        name: format!("seed={raw} is not an unsigned integer"),
                    })?,
                    None => 1,
                };
                let amplitude = match take("amplitude") {
                    Some(raw) => num("amplitude", &raw)?,
                    None => T::of(0.2),
                };
                reject_unknown(&["seed", "amplitude"])?;
                CatalogSpec::BumpySphere { seed, amplitude }
            }
            "veronese" => {
                reject_unknown(&[])?;
                CatalogSpec::Veronese
            }
            _ => return Err(Error::UnknownCatalogName(text.into())),
        };
        Ok(spec)
    }

    /// Canonical display form (round-trips through `parse`).
    pub fn canonical_name(&self) -> String {
        match self {
            CatalogSpec::RoundSphere { radius } => {
                format!("round_sphere(r={})", radius.as_f64())
            }
            CatalogSpec::GeodesicSphere { area, curvature } => {
                format!("geodesic_sphere(a={}, c={})", area.as_f64(), curvature)
            }
            CatalogSpec::CliffordTorus => "clifford_torus".into(),
            CatalogSpec::EquilateralTorus => "equilateral_torus".into(),
            CatalogSpec::FlatTorus { a, b } => format!(
                "flat_torus(ax={}, ay={}, bx={}, by={})",
                a[0].as_f64(),
                a[1].as_f64(),
                b[0].as_f64(),
                b[1].as_f64()
            ),
            CatalogSpec::BumpySphere { seed, amplitude } => {
                format!("bumpy_sphere(seed={}, amplitude={})", seed, amplitude.as_f64())
            }
            CatalogSpec::Veronese => "veronese".into(),
        }
    }

    pub fn build(&self) -> Result<CatalogEntry<T>> {
        build_entry(self)
    }
}

/// Look up a surface by its textual name.
pub fn catalog_named<T: Real>(text: &str) -> Result<CatalogEntry<T>> {
    CatalogSpec::parse(text)?.build()
}

/// The fixed parameter choices used by the identity suites and the CLI
/// `identities` job.
pub fn standard_catalog<T: Real>() -> Vec<CatalogSpec<T>> {
    vec![
        CatalogSpec::RoundSphere { radius: T::one() },
        CatalogSpec::GeodesicSphere {
            area: T::of(2.0) * T::PI(),
            curvature: 1,
        },
        CatalogSpec::GeodesicSphere {
            area: T::of(4.0) * T::PI(),
            curvature: -1,
        },
        CatalogSpec::CliffordTorus,
        CatalogSpec::EquilateralTorus,
        CatalogSpec::FlatTorus {
            a: [T::one(), T::zero()],
            b: [T::zero(), T::one()],
        },
        CatalogSpec::BumpySphere {
            seed: 1,
            amplitude: T::of(0.2),
        },
        CatalogSpec::Veronese,
    ]
}

fn polar_domain<T: Real>(u_max: T, identification: Identification) -> Domain<T> {
    Domain {
        u_max,
        v_max: T::of(2.0) * T::PI(),
        identification,
    }
}

fn unit_square<T: Real>() -> Domain<T> {
    Domain {
        u_max: T::one(),
        v_max: T::one(),
        identification: Identification::TorusLattice,
    }
}

fn build_entry<T: Real>(spec: &CatalogSpec<T>) -> Result<CatalogEntry<T>> {
    let four_pi = T::of(4.0) * T::PI();
    let entry = match spec {
        CatalogSpec::RoundSphere { radius } => {
            let r = *radius;
            if !(r > T::zero()) {
                return Err(Error::BadCatalogParameter {
                    surface: "round_sphere".into(),
                    name: format!("r={} must be positive", r.as_f64()),
                });
            }
            let immersion = Immersion::new(
                AmbientSpace::euclidean(3),
                polar_domain(T::PI(), Identification::SpherePolar),
                Arc::new(SphereChart::new(SphereKind::Round { radius: r })),
                DerivativeProvider::Analytic,
            )?;
            let r2 = r * r;
            CatalogEntry {
                name: spec.canonical_name(),
                spec: spec.clone(),
                immersion,
                known: KnownData {
                    genus: 0,
                    orientable: true,
                    area: Some(four_pi * r2),
                    normh2: Some(T::of(2.0) / r2),
                    normh_mean2: Some(T::one() / r2),
                    gauss: Some(T::one() / r2),
                    laplace_lambda2: Some(T::of(2.0) / r2),
                },
                immersed: true,
            }
        }
        CatalogSpec::GeodesicSphere { area, curvature } => {
            let a = *area;
            if !(a > T::zero()) {
                return Err(Error::BadCatalogParameter {
                    surface: "geodesic_sphere".into(),
                    name: format!("a={} must be positive", a.as_f64()),
                });
            }
            let ratio = a / four_pi;
            let (ambient, kind) = match curvature {
                0 => (
                    AmbientSpace::euclidean(3),
                    SphereKind::Round { radius: ratio.sqrt() },
                ),
                1 => {
                    if ratio > T::one() {
                        return Err(Error::BadCatalogParameter {
                            surface: "geodesic_sphere".into(),
                            name: format!(
                                "a={} exceeds the maximal sphere area 4*pi in positive curvature",
                                a.as_f64()
                            ),
                        });
                    }
                    (
                        AmbientSpace::unit_sphere(3),
                        SphereKind::Geodesic {
                            rho: ratio.sqrt().asin(),
                            positive: true,
                        },
                    )
                }
                -1 => (
                    AmbientSpace::hyperboloid(3),
                    SphereKind::Geodesic {
                        rho: ratio.sqrt().asinh(),
                        positive: false,
                    },
                ),
                other => {
                    return Err(Error::BadCatalogParameter {
                        surface: "geodesic_sphere".into(),
                        name: format!("c={other} is not one of -1, 0, 1"),
                    })
                }
            };
            let immersion = Immersion::new(
                ambient,
                polar_domain(T::PI(), Identification::SpherePolar),
                Arc::new(SphereChart::new(kind)),
                DerivativeProvider::Analytic,
            )?;
            let c = T::of(*curvature as f64);
            let k = four_pi / a;
            CatalogEntry {
                name: spec.canonical_name(),
                spec: spec.clone(),
                immersion,
                known: KnownData {
                    genus: 0,
                    orientable: true,
                    area: Some(a),
                    normh2: Some(T::of(2.0) * (k - c)),
                    normh_mean2: Some(k - c),
                    gauss: Some(k),
                    laplace_lambda2: Some(T::of(2.0) * k),
                },
                immersed: true,
            }
        }
        CatalogSpec::CliffordTorus => {
            let immersion = Immersion::new(
                AmbientSpace::euclidean(4),
                unit_square(),
                Arc::new(TorusChart {
                    kind: TorusKind::Clifford,
                }),
                DerivativeProvider::Analytic,
            )?;
            CatalogEntry {
                name: spec.canonical_name(),
                spec: spec.clone(),
                immersion,
                known: KnownData {
                    genus: 1,
                    orientable: true,
                    area: Some(T::of(2.0) * T::PI() * T::PI()),
                    normh2: Some(T::of(4.0)),
                    normh_mean2: Some(T::one()),
                    gauss: Some(T::zero()),
                    laplace_lambda2: Some(T::of(2.0)),
                },
                immersed: true,
            }
        }
        CatalogSpec::EquilateralTorus => {
            let immersion = Immersion::new(
                AmbientSpace::euclidean(6),
                unit_square(),
                Arc::new(TorusChart {
                    kind: TorusKind::Equilateral,
                }),
                DerivativeProvider::Analytic,
            )?;
            CatalogEntry {
                name: spec.canonical_name(),
                spec: spec.clone(),
                immersion,
                known: KnownData {
                    genus: 1,
                    orientable: true,
                    // Hand value: sqrt(det g) with g = (4 pi^2 / 3) [[2,1],[1,2]].
                    area: Some(T::of(4.0) * T::PI() * T::PI() / T::of(3.0).sqrt()),
                    normh2: Some(T::of(4.0)),
                    normh_mean2: Some(T::one()),
                    gauss: Some(T::zero()),
                    laplace_lambda2: Some(T::of(2.0)),
                },
                immersed: true,
            }
        }
        CatalogSpec::FlatTorus { a, b } => {
            let det = a[0] * b[1] - a[1] * b[0];
            let scale2 = (a[0] * a[0] + a[1] * a[1]) * (b[0] * b[0] + b[1] * b[1]);
            if !(det * det > T::of(1e-24) * scale2) {
                return Err(Error::BadCatalogParameter {
                    surface: "flat_torus".into(),
                    name: "lattice basis is degenerate".into(),
                });
            }
            let immersion = Immersion::new(
                AmbientSpace::euclidean(3),
                unit_square(),
                Arc::new(TorusChart {
                    kind: TorusKind::Flat { a: *a, b: *b },
                }),
                DerivativeProvider::Analytic,
            )?;
            let lambda2 = flat_torus_spectrum(*a, *b, 2)[1];
            CatalogEntry {
                name: spec.canonical_name(),
                spec: spec.clone(),
                immersion,
                known: KnownData {
                    genus: 1,
                    orientable: true,
                    area: Some(det.abs()),
                    normh2: None,
                    normh_mean2: None,
                    gauss: Some(T::zero()),
                    laplace_lambda2: Some(lambda2),
                },
                immersed: false,
            }
        }
        CatalogSpec::BumpySphere { seed, amplitude } => {
            let amp = *amplitude;
            if !(amp >= T::zero()) || amp.as_f64() > BUMPY_AMPLITUDE_CAP {
                return Err(Error::BadCatalogParameter {
                    surface: "bumpy_sphere".into(),
                    name: format!(
                        "amplitude={} outside [0, {BUMPY_AMPLITUDE_CAP}]",
                        amp.as_f64()
                    ),
                });
            }
            let bump = bumpy_perturbation(*seed, amp);
            let immersion = Immersion::new(
                AmbientSpace::euclidean(3),
                polar_domain(T::PI(), Identification::SpherePolar),
                Arc::new(SphereChart::new(SphereKind::Bumpy { bump })),
                DerivativeProvider::Analytic,
            )?;
            CatalogEntry {
                name: spec.canonical_name(),
                spec: spec.clone(),
                immersion,
                known: KnownData::unknown(0, true),
                immersed: true,
            }
        }
        CatalogSpec::Veronese => {
            // The quadratic chart double-covers its image; the hemisphere
            // domain (with the equator glued antipodally) covers it once.
            let immersion = Immersion::new(
                AmbientSpace::euclidean(6),
                polar_domain(T::FRAC_PI_2(), Identification::HemisphereAntipodal),
                Arc::new(SphereChart::new(SphereKind::Projective)),
                DerivativeProvider::Analytic,
            )?;
            CatalogEntry {
                name: spec.canonical_name(),
                spec: spec.clone(),
                immersion,
                known: KnownData {
                    genus: 1,
                    orientable: false,
                    area: Some(four_pi),
                    normh2: Some(T::of(5.0)),
                    normh_mean2: Some(T::of(1.5)),
                    gauss: Some(T::of(0.5)),
                    laplace_lambda2: Some(T::of(3.0)),
                },
                immersed: true,
            }
        }
    };
    Ok(entry)
}

/// Seeded smooth radial perturbation: polynomial bumps of degree 1 through 4
/// in the direction components, rescaled so the perturbation is bounded by
/// `amplitude` on the sphere.
fn bumpy_perturbation<T: Real>(seed: u64, amplitude: T) -> TriPoly<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    for total in 1u8..=4 {
        for i in 0..=total {
            for j in 0..=(total - i) {
                let k = total - i - j;
                let c: f64 = rng.gen_range(-1.0..1.0);
                terms.push((i, j, k, T::of(c)));
            }
        }
    }
    let mut poly = TriPoly::new(terms);
    let l1 = poly.coeff_l1();
    if l1 > T::zero() {
        poly.scale(amplitude / l1);
    }
    poly
}

impl<T: Real> CatalogEntry<T> {
    /// Measured area via quadrature (falls back to the known closed form for
    /// the abstract flat torus, whose area is exact anyway).
    pub fn area(&self, rule: QuadratureRule) -> Result<T> {
        Ok(integrate(&self.immersion, rule, |_| T::one())?.value)
    }

    /// Dilate a Euclidean surface to a prescribed area. Known scalar data is
    /// rescaled along (curvatures by the inverse square of the dilation).
    pub fn scaled_to_area(&self, target: T, rule: QuadratureRule) -> Result<CatalogEntry<T>> {
        if self.immersion.ambient().curvature::<T>() != T::zero() {
            return Err(Error::DomainMismatch {
                op: "scaled_to_area",
                detail: "dilation is only available in the flat ambient".into(),
            });
        }
        if !(target > T::zero()) {
            return Err(Error::BadCatalogParameter {
                surface: self.name.clone(),
                name: format!("target area {} must be positive", target.as_f64()),
            });
        }
        let current = self.area(rule)?;
        let factor = (target / current).sqrt();
        let inv2 = T::one() / (factor * factor);
        let immersion = Immersion::new(
            *self.immersion.ambient(),
            *self.immersion.domain(),
            Arc::new(ScaledChart {
                inner: self.immersion.chart(),
                factor,
            }),
            self.immersion.provider(),
        )?;
        Ok(CatalogEntry {
            name: format!("{}@area={}", self.name, target.as_f64()),
            spec: self.spec.clone(),
            immersion,
            known: KnownData {
                genus: self.known.genus,
                orientable: self.known.orientable,
                area: Some(target),
                normh2: self.known.normh2.map(|x| x * inv2),
                normh_mean2: self.known.normh_mean2.map(|x| x * inv2),
                gauss: self.known.gauss.map(|x| x * inv2),
                laplace_lambda2: self.known.laplace_lambda2.map(|x| x * inv2),
            },
            immersed: self.immersed,
        })
    }
}

/// Exact Laplace spectrum of the abstract flat torus with lattice basis
/// `a`, `b`: values `4 pi^2 m G^{-1} m^T` over integer frequency pairs,
/// sorted ascending (the leading zero is included).
pub fn flat_torus_spectrum<T: Real>(a: [T; 2], b: [T; 2], count: usize) -> Vec<T> {
    let guu = a[0] * a[0] + a[1] * a[1];
    let guv = a[0] * b[0] + a[1] * b[1];
    let gvv = b[0] * b[0] + b[1] * b[1];
    let det = guu * gvv - guv * guv;
    let four_pi2 = T::of(4.0) * T::PI() * T::PI();
    let range = 24i64;
    assert!(count < ((2 * range + 1) * (2 * range + 1)) as usize);
    let mut values = Vec::new();
    for m in -range..=range {
        for n in -range..=range {
            let mf = T::of(m as f64);
            let nf = T::of(n as f64);
            // (m, n) G^{-1} (m, n)^T expanded through the adjugate.
            let q = (mf * mf * gvv - T::of(2.0) * mf * nf * guv + nf * nf * guu) / det;
            values.push(four_pi2 * q);
        }
    }
    values.sort_by(|x, y| x.partial_cmp(y).unwrap());
    values.truncate(count);
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn parse_round_trips_canonical_names() {
        for spec in standard_catalog::<f64>() {
            let name = spec.canonical_name();
            let reparsed = CatalogSpec::<f64>::parse(&name).unwrap();
            assert_eq!(spec, reparsed, "{name}");
        }
        assert_eq!(
            CatalogSpec::<f64>::parse("round_sphere").unwrap(),
            CatalogSpec::RoundSphere { radius: 1.0 }
        );
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            CatalogSpec::<f64>::parse("mystery_surface"),
            Err(Error::UnknownCatalogName(_))
        ));
        assert!(matches!(
            CatalogSpec::<f64>::parse("bumpy_sphere(amplitude=0.9)").and_then(|s| s.build().map(|_| ())),
            Err(Error::BadCatalogParameter { .. })
        ));
        assert!(matches!(
            CatalogSpec::<f64>::parse("round_sphere(volume=3)"),
            Err(Error::BadCatalogParameter { .. })
        ));
        assert!(matches!(
            CatalogSpec::<f64>::parse("geodesic_sphere(a=20, c=1)").and_then(|s| s.build().map(|_| ())),
            Err(Error::BadCatalogParameter { .. })
        ));
    }

    #[test]
    fn standard_entries_validate() {
        for spec in standard_catalog::<f64>() {
            let entry = spec.build().unwrap();
            entry.immersion.validate(5).unwrap_or_else(|e| {
                panic!("{} failed validation: {e}", entry.name);
            });
        }
    }

    #[test]
    fn geodesic_sphere_area_is_the_parameter() {
        let rule = QuadratureRule::default();
        for c in [-1i8, 0, 1] {
            let entry = CatalogSpec::GeodesicSphere {
                area: 2.0 * PI,
                curvature: c,
            }
            .build()
            .unwrap();
            let area = entry.area(rule).unwrap();
            assert!(
                (area - 2.0 * PI).abs() < 1e-9,
                "c={c}: area {area} vs {}",
                2.0 * PI
            );
        }
    }

    #[test]
    fn flat_ambient_geodesic_sphere_is_a_round_sphere() {
        let entry = CatalogSpec::<f64>::GeodesicSphere {
            area: 4.0 * PI,
            curvature: 0,
        }
        .build()
        .unwrap();
        let pg = entry.immersion.point_geometry(1.0, 1.0).unwrap();
        assert!((pg.gauss - 1.0).abs() < 1e-12);
        assert_eq!(entry.known.laplace_lambda2, Some(2.0));
    }

    #[test]
    fn bumpy_spheres_are_seed_deterministic() {
        let a = CatalogSpec::<f64>::BumpySphere {
            seed: 9,
            amplitude: 0.25,
        }
        .build()
        .unwrap();
        let b = CatalogSpec::<f64>::BumpySphere {
            seed: 9,
            amplitude: 0.25,
        }
        .build()
        .unwrap();
        let c = CatalogSpec::<f64>::BumpySphere {
            seed: 10,
            amplitude: 0.25,
        }
        .build()
        .unwrap();
        let pa = a.immersion.position(1.1, 2.0);
        let pb = b.immersion.position(1.1, 2.0);
        let pc = c.immersion.position(1.1, 2.0);
        assert_eq!(pa, pb);
        assert!(pa.iter().zip(&pc).any(|(x, y)| (x - y).abs() > 1e-6));
        // Radius stays within the amplitude band.
        let r2: f64 = pa.iter().map(|x| x * x).sum();
        assert!(r2.sqrt() > 0.75 && r2.sqrt() < 1.25);
    }

    #[test]
    fn scaling_hits_the_requested_area() {
        let rule = QuadratureRule::default();
        let entry = CatalogSpec::<f64>::BumpySphere {
            seed: 3,
            amplitude: 0.2,
        }
        .build()
        .unwrap();
        let scaled = entry.scaled_to_area(4.0 * PI, rule).unwrap();
        let area = scaled.area(rule).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-8, "area {area}");
    }

    #[test]
    fn square_and_hexagonal_lattice_spectra() {
        let sq = flat_torus_spectrum([1.0f64, 0.0], [0.0, 1.0], 6);
        assert!(sq[0].abs() < 1e-12);
        let want = 4.0 * PI * PI;
        for k in 1..5 {
            assert!((sq[k] - want).abs() < 1e-9, "fourfold first band");
        }
        assert!((sq[5] - 2.0 * want).abs() < 1e-9);

        let hex = flat_torus_spectrum([1.0, 0.0], [0.5, 0.75f64.sqrt()], 2);
        assert!((hex[1] - 16.0 * PI * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn veronese_constants_via_quadrature() {
        let entry = CatalogSpec::<f64>::Veronese.build().unwrap();
        let rule = QuadratureRule::default();
        let area = entry.area(rule).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-9, "area {area}");
        let h2 = integrate(&entry.immersion, rule, |pg| pg.normh2).unwrap();
        assert!((h2.value / area - 5.0).abs() < 1e-9);
        let hm2 = integrate(&entry.immersion, rule, |pg| pg.normh_mean2).unwrap();
        assert!((hm2.value / area - 1.5).abs() < 1e-9);
        let k = integrate(&entry.immersion, rule, |pg| pg.gauss).unwrap();
        assert!((k.value - 2.0 * PI).abs() < 1e-9, "total curvature {}", k.value);
    }
}
