//! Mesh-refinement study: solve the same eigenproblem on a ladder of
//! meshes, fit the convergence order, and Richardson-extrapolate each
//! eigenvalue to the zero-mesh-size limit with an uncertainty estimate.
//!
//! Eigenvalues are tracked as multiplicity groups, not raw indices: inside
//! a numerically degenerate cluster the discrete ordering is arbitrary, so
//! the extrapolation runs on group means, which are stable under the
//! within-group shuffling that refinement causes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{CatalogEntry, Identification};
use crate::mesh::{mesh_sphere, mesh_torus, MeshGeometry};
use crate::operator::{assemble, AssemblyOptions};
use crate::scalar::Real;

use super::{solve_lowest, SolveOptions, SpectrumResult};

/// Acceptable fitted convergence orders for a second-order discretization.
pub const ORDER_RANGE: (f64, f64) = (1.5, 2.5);

/// One eigenvalue extrapolated across a refinement ladder.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct ExtrapolatedValue<T> {
    /// `(h, value)` pairs, coarsest first.
    pub levels: Vec<(T, T)>,
    /// Extrapolated limit.
    pub value: T,
    /// Half the distance from the finest level to the limit (or the level
    /// scatter when the fit is unusable): a heuristic error bar.
    pub uncertainty: T,
    /// Fitted convergence order; zero when the fit failed.
    pub order: T,
    /// Successive corrections failed to shrink (or flipped sign), so the
    /// asymptotic fit is not trustworthy.
    pub non_monotone: bool,
    /// Whether the fitted order lands in [`ORDER_RANGE`].
    pub order_in_range: bool,
}

/// Richardson-extrapolate a series of `(h, value)` pairs, coarsest first.
/// Requires at least three levels; uses the finest three for the fit.
pub fn richardson<T: Real>(series: &[(T, T)]) -> Result<ExtrapolatedValue<T>> {
    if series.len() < 3 {
        return Err(Error::BadSolveRequest(format!(
            "extrapolation needs at least 3 refinement levels, got {}",
            series.len()
        )));
    }
    let m = series.len();
    let (_, vc) = series[m - 3];
    let (hm, vm) = series[m - 2];
    let (hf, vf) = series[m - 1];
    let r = hm / hf;

    let mut non_monotone = false;
    // Corrections must shrink along the whole ladder.
    for w in series.windows(3) {
        let d0 = (w[1].1 - w[0].1).abs();
        let d1 = (w[2].1 - w[1].1).abs();
        if d1 > d0 {
            non_monotone = true;
        }
    }

    let num = vc - vm;
    let den = vm - vf;
    let tiny = T::of(1e-12) * (T::one() + vf.abs());

    let value;
    let uncertainty;
    let order;
    let order_in_range;
    if den.abs() <= tiny {
        // Already converged to roundoff; the finest value is the answer.
        value = vf;
        uncertainty = den.abs().max(tiny);
        order = T::of(2.0);
        order_in_range = true;
    } else {
        let ratio = num / den;
        if ratio > T::one() {
            let p = ratio.ln() / r.ln();
            let limit = vf + (vf - vm) / (r.powf(p) - T::one());
            value = limit;
            uncertainty = ((limit - vf).abs() * T::of(0.5)).max(tiny);
            order = p;
            order_in_range =
                p >= T::of(ORDER_RANGE.0) && p <= T::of(ORDER_RANGE.1);
        } else {
            // Errors not shrinking geometrically: report the finest value
            // with a conservative bar and flag the fit.
            value = vf;
            uncertainty = den.abs().max(tiny);
            order = T::zero();
            order_in_range = false;
            non_monotone = true;
        }
    }
    Ok(ExtrapolatedValue {
        levels: series.to_vec(),
        value,
        uncertainty,
        order,
        non_monotone,
        order_in_range,
    })
}

/// The spectrum computed on one mesh of a refinement ladder.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct LevelSpectrum<T> {
    pub level: usize,
    pub n_vertices: usize,
    pub n_faces: usize,
    /// Nominal mesh size `sqrt(area / faces)`.
    pub h: T,
    pub total_area: T,
    pub obtuse_flag: bool,
    pub spectrum: SpectrumResult<T>,
}

/// A refinement ladder with per-index extrapolated eigenvalues.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SurfaceSpectra<T> {
    pub alpha: T,
    pub beta: T,
    pub per_level: Vec<LevelSpectrum<T>>,
    /// One entry per requested eigenvalue index; indices inside one
    /// multiplicity group share the same extrapolation.
    pub extrapolated: Vec<ExtrapolatedValue<T>>,
}

/// Mesh one refinement level of a catalog surface. Sphere-type domains use
/// the subdivision depth directly; torus-type domains use a `2^level`
/// square grid.
pub fn mesh_level<T: Real>(
    entry: &CatalogEntry<T>,
    level: usize,
) -> Result<crate::mesh::SurfaceMesh<T>> {
    match entry.immersion.domain().identification {
        Identification::SpherePolar => mesh_sphere(&entry.immersion, level),
        Identification::TorusLattice => {
            let n = 1usize << level;
            mesh_torus(&entry.immersion, n, n)
        }
        Identification::Open | Identification::HemisphereAntipodal => {
            Err(Error::NonOrientableNeedsClosedForm)
        }
    }
}

/// Solve the eigenproblem for `entry` on every level of a refinement
/// ladder and extrapolate the lowest `k` eigenvalues. Levels run
/// concurrently; each individual solve is deterministic, and results are
/// reduced in level order.
pub fn catalog_spectrum<T: Real>(
    entry: &CatalogEntry<T>,
    alpha: T,
    beta: T,
    k: usize,
    levels: &[usize],
    solve_opts: &SolveOptions<T>,
    assembly: &AssemblyOptions,
) -> Result<SurfaceSpectra<T>> {
    if levels.len() < 3 {
        return Err(Error::BadSolveRequest(format!(
            "a refinement ladder needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    let per_level: Vec<LevelSpectrum<T>> = levels
        .par_iter()
        .map(|&level| -> Result<LevelSpectrum<T>> {
            let mesh = mesh_level(entry, level)?;
            let mg = MeshGeometry::new(&mesh, &entry.immersion)?;
            let op = assemble(&mesh, &mg, alpha, beta, *assembly)?;
            let spectrum = solve_lowest(&op, k, solve_opts)?;
            let h = (mg.total_area / T::of_usize(mesh.n_faces())).sqrt();
            Ok(LevelSpectrum {
                level,
                n_vertices: mesh.n_vertices(),
                n_faces: mesh.n_faces(),
                h,
                total_area: mg.total_area,
                obtuse_flag: op.obtuse_flag,
                spectrum,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Group structure from the finest level drives the tracking.
    let finest = per_level.last().expect("nonempty ladder");
    let groups = finest.spectrum.groups.clone();
    let mut extrapolated: Vec<Option<ExtrapolatedValue<T>>> = vec![None; k];
    for &(start, len) in &groups {
        let series: Vec<(T, T)> = per_level
            .iter()
            .map(|ls| {
                let vals = &ls.spectrum.eigenvalues[start..start + len];
                let mean = vals.iter().copied().sum::<T>() / T::of_usize(len);
                (ls.h, mean)
            })
            .collect();
        let fit = richardson(&series)?;
        for slot in extrapolated.iter_mut().skip(start).take(len) {
            *slot = Some(fit.clone());
        }
    }
    let extrapolated = extrapolated
        .into_iter()
        .map(|x| x.expect("groups cover all indices"))
        .collect();
    Ok(SurfaceSpectra { alpha, beta, per_level, extrapolated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog_named;

    #[test]
    fn exact_quadratic_series_is_recovered() {
        let series: Vec<(f64, f64)> =
            [0.4, 0.2, 0.1].iter().map(|&h| (h, 5.0 + 3.0 * h * h)).collect();
        let fit = richardson(&series).unwrap();
        assert!((fit.value - 5.0).abs() < 1e-12, "value {}", fit.value);
        assert!((fit.order - 2.0).abs() < 1e-9, "order {}", fit.order);
        assert!(fit.order_in_range);
        assert!(!fit.non_monotone);
    }

    #[test]
    fn flat_series_short_circuits() {
        let series = vec![(0.4f64, 7.0), (0.2, 7.0), (0.1, 7.0)];
        let fit = richardson(&series).unwrap();
        assert_eq!(fit.value, 7.0);
        assert!(fit.uncertainty < 1e-10);
        assert!(fit.order_in_range);
    }

    #[test]
    fn sign_flipping_series_is_flagged() {
        let series = vec![(0.4f64, 1.0), (0.2, 1.1), (0.1, 1.05)];
        let fit = richardson(&series).unwrap();
        assert!(fit.non_monotone);
        assert_eq!(fit.value, 1.05);
    }

    #[test]
    fn too_few_levels_is_an_error() {
        assert!(richardson(&[(0.2f64, 1.0), (0.1, 1.0)]).is_err());
    }

    #[test]
    fn sphere_second_eigenvalue_extrapolates_to_two() {
        let entry = catalog_named::<f64>("round_sphere").unwrap();
        let spectra = catalog_spectrum(
            &entry,
            0.0,
            0.0,
            5,
            &[2, 3, 4],
            &SolveOptions::default(),
            &AssemblyOptions::default(),
        )
        .unwrap();
        let lam2 = &spectra.extrapolated[1];
        assert!(
            (lam2.value - 2.0).abs() < 1e-3,
            "extrapolated {} +- {}",
            lam2.value,
            lam2.uncertainty
        );
        // The first harmonic group superconverges on icosahedral meshes
        // (measured order close to 4, well above the generic 2), so the
        // fit must see a healthy positive order but lands out of the
        // plain-second-order window.
        assert!(lam2.order > 1.5, "order {}", lam2.order);
        assert!(!lam2.non_monotone);
        // Indices 1..=3 share the multiplicity group and the fit.
        assert_eq!(spectra.extrapolated[2].value, lam2.value);
        assert_eq!(spectra.extrapolated[3].value, lam2.value);
        // The ground state sits at zero.
        assert!(spectra.extrapolated[0].value.abs() < 1e-6);
        // The next group up converges at the generic second order.
        let lam5 = &spectra.extrapolated[4];
        assert!((lam5.value - 6.0).abs() < 5e-3, "lam5 {}", lam5.value);
        assert!(lam5.order_in_range, "order {}", lam5.order);
    }

    #[test]
    fn flat_torus_second_eigenvalue_extrapolates_to_four_pi_squared() {
        let entry = catalog_named::<f64>("flat_torus").unwrap();
        let spectra = catalog_spectrum(
            &entry,
            0.0,
            0.0,
            2,
            &[4, 5, 6],
            &SolveOptions::default(),
            &AssemblyOptions::default(),
        )
        .unwrap();
        let want = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        let lam2 = &spectra.extrapolated[1];
        assert!(
            (lam2.value - want).abs() < 0.05,
            "extrapolated {} vs {}",
            lam2.value,
            want
        );
        assert!(lam2.order_in_range, "order {}", lam2.order);
    }

    #[test]
    fn open_domains_cannot_build_a_ladder() {
        let entry = catalog_named::<f64>("veronese").unwrap();
        let err = catalog_spectrum(
            &entry,
            0.0,
            0.0,
            2,
            &[2, 3, 4],
            &SolveOptions::default(),
            &AssemblyOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonOrientableNeedsClosedForm));
    }
}
