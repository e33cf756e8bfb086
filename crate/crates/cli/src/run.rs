//! Job execution: configuration in, self-contained report out.

use crate::config::{CrossingMethod, JobConfig, JobKind, Predicate};
use crate::report::{IdentityChecks, Report, SpectraSection};
use anyhow::{anyhow, bail, Context, Result};
use curvspec_core::bounds::{
    bifurcation_alpha, verify_inequality, willmore_report, BifurcationMethod, BifurcationOptions,
    VerifyOptions, WhichInequality,
};
use curvspec_core::eigen::{catalog_spectrum, SolveOptions};
use curvspec_core::geometry::{
    integrate, standard_catalog, CatalogEntry, Identification, QuadratureRule,
};
use rayon::prelude::*;
use std::f64::consts::PI;

pub fn run(cfg: &JobConfig) -> Result<Report> {
    let mut report = Report::new(cfg.kind.as_str(), cfg.seed, cfg.echo.clone());
    match cfg.kind {
        JobKind::Spectrum => run_spectrum(cfg, &mut report)?,
        JobKind::Verify => run_verify(cfg, &mut report)?,
        JobKind::Bifurcation => run_bifurcation(cfg, &mut report)?,
        JobKind::Identities => run_identities(cfg, &mut report)?,
    }
    Ok(report)
}

fn build_surface(cfg: &JobConfig) -> Result<CatalogEntry<f64>> {
    let spec = cfg
        .surface
        .clone()
        .ok_or_else(|| anyhow!("this job needs a [surface] name"))?;
    spec.build()
        .with_context(|| format!("building surface {}", spec.canonical_name()))
}

/// The config ladder, or the domain-appropriate default.
fn resolve_levels(cfg: &JobConfig, entry: &CatalogEntry<f64>) -> Result<Vec<usize>> {
    if !cfg.levels.is_empty() {
        return Ok(cfg.levels.clone());
    }
    match entry.immersion.domain().identification {
        Identification::SpherePolar => Ok(vec![2, 3, 4]),
        Identification::TorusLattice => Ok(vec![4, 5, 6]),
        _ => bail!(
            "{} has no triangulation; spectrum jobs need a sphere or torus domain",
            entry.name
        ),
    }
}

fn solve_options(cfg: &JobConfig) -> SolveOptions<f64> {
    SolveOptions {
        seed: cfg.seed,
        ..SolveOptions::default()
    }
}

fn pairs(cfg: &JobConfig) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(cfg.alphas.len() * cfg.betas.len());
    for &a in &cfg.alphas {
        for &b in &cfg.betas {
            out.push((a, b));
        }
    }
    out
}

fn run_spectrum(cfg: &JobConfig, report: &mut Report) -> Result<()> {
    let entry = build_surface(cfg)?;
    let levels = resolve_levels(cfg, &entry)?;
    let solve = solve_options(cfg);
    let sweep = pairs(cfg);
    let sections: Vec<SpectraSection> = sweep
        .par_iter()
        .map(|&(alpha, beta)| {
            let spectra = catalog_spectrum(
                &entry,
                alpha,
                beta,
                cfg.k,
                &levels,
                &solve,
                &Default::default(),
            )
            .with_context(|| {
                format!("spectrum of {} at alpha={alpha}, beta={beta}", entry.name)
            })?;
            Ok(SpectraSection {
                surface: entry.name.clone(),
                spectra,
            })
        })
        .collect::<Result<_>>()?;
    report.surfaces.push(entry.name.clone());
    for section in &sections {
        report.count_spectra(&section.spectra);
    }
    report.spectra = sections;
    Ok(())
}

fn run_verify(cfg: &JobConfig, report: &mut Report) -> Result<()> {
    let entry = build_surface(cfg)?;
    let opts = VerifyOptions {
        levels: cfg.levels.clone(),
        k: cfg.k,
        path: cfg.path,
        solve: solve_options(cfg),
        ..VerifyOptions::default()
    };
    let predicates: &[WhichInequality] = match cfg.predicate {
        Predicate::Lambda1 => &[WhichInequality::Lambda1],
        Predicate::Lambda2 => &[WhichInequality::Lambda2],
        Predicate::Both => &[WhichInequality::Lambda1, WhichInequality::Lambda2],
    };
    let jobs: Vec<(f64, f64, WhichInequality)> = pairs(cfg)
        .into_iter()
        .flat_map(|(a, b)| predicates.iter().map(move |&p| (a, b, p)))
        .collect();
    report.inequalities = jobs
        .par_iter()
        .map(|&(alpha, beta, which)| {
            verify_inequality(&entry, alpha, beta, which, &opts).with_context(|| {
                format!(
                    "verifying {which:?} on {} at alpha={alpha}, beta={beta}",
                    entry.name
                )
            })
        })
        .collect::<Result<_>>()?;
    report.surfaces.push(entry.name);
    Ok(())
}

fn run_bifurcation(cfg: &JobConfig, report: &mut Report) -> Result<()> {
    let entry = build_surface(cfg)?;
    let mut opts = BifurcationOptions {
        levels: cfg.levels.clone(),
        solve: solve_options(cfg),
        force_numeric: cfg.method == CrossingMethod::Numeric,
        ..BifurcationOptions::default()
    };
    if cfg.grid > 0 {
        opts.grid = cfg.grid;
    }
    let result = bifurcation_alpha(&entry, &opts)
        .with_context(|| format!("locating the crossing value of {}", entry.name))?;
    if cfg.method == CrossingMethod::ClosedForm && result.method != BifurcationMethod::ClosedForm {
        bail!(
            "{} has no closed-form crossing route; use method = auto or numeric",
            entry.name
        );
    }
    report.surfaces.push(entry.name);
    report.bifurcations.push(result);
    Ok(())
}

/// Interior sample points for the pointwise curvature identity: a Kronecker
/// (golden-ratio) sequence, deterministic and edge-avoiding.
fn identity_points(entry: &CatalogEntry<f64>, count: usize) -> Vec<(f64, f64)> {
    let dom = entry.immersion.domain();
    let (gu, gv) = (0.618_033_988_749_894_9_f64, 0.381_966_011_250_105_1_f64);
    (0..count)
        .map(|i| {
            let fu = (0.5 + gu * i as f64).fract();
            let fv = (0.5 + gv * i as f64).fract();
            (
                (0.05 + 0.9 * fu) * dom.u_max,
                (0.05 + 0.9 * fv) * dom.v_max,
            )
        })
        .collect()
}

fn identity_checks(entry: &CatalogEntry<f64>) -> Result<IdentityChecks> {
    const GAUSS_POINTS: usize = 100;
    let rule = QuadratureRule::default();
    let c = entry.immersion.ambient().curvature::<f64>();

    let mut gauss_residual_max = 0.0f64;
    for (u, v) in identity_points(entry, GAUSS_POINTS) {
        let pg = entry
            .immersion
            .point_geometry(u, v)
            .with_context(|| format!("curvature of {} at ({u}, {v})", entry.name))?;
        let residual = match entry.known.gauss {
            Some(k) => pg.gauss_residual_against(k, c),
            None => pg.gauss_residual_via_principal(c).ok_or_else(|| {
                anyhow!("{} has neither a reference curvature nor codimension one", entry.name)
            })?,
        };
        gauss_residual_max = gauss_residual_max.max(residual.abs());
    }

    let epsilon = if entry.known.orientable { 2.0 } else { 1.0 };
    let target = 2.0 * PI * (2.0 - epsilon * entry.known.genus as f64);
    let total = integrate(&entry.immersion, rule, |pg| pg.gauss)
        .with_context(|| format!("total curvature of {}", entry.name))?;
    let rel_err = (total.value - target).abs() / target.abs().max(4.0 * PI);

    let willmore = if entry.immersed {
        Some(
            willmore_report(entry, rule)
                .with_context(|| format!("bending energy of {}", entry.name))?,
        )
    } else {
        None
    };

    Ok(IdentityChecks {
        surface: entry.name.clone(),
        gauss_residual_max,
        gauss_points: GAUSS_POINTS,
        gauss_tolerance: 1e-8,
        gauss_bonnet_integral: total.value,
        gauss_bonnet_target: target,
        gauss_bonnet_rel_err: rel_err,
        gauss_bonnet_tolerance: 1e-6,
        willmore,
    })
}

fn run_identities(cfg: &JobConfig, report: &mut Report) -> Result<()> {
    let entries: Vec<CatalogEntry<f64>> = match &cfg.surface {
        Some(spec) => vec![spec
            .build()
            .with_context(|| format!("building surface {}", spec.canonical_name()))?],
        None => standard_catalog::<f64>()
            .into_iter()
            .map(|spec| {
                spec.build()
                    .with_context(|| format!("building surface {}", spec.canonical_name()))
            })
            .collect::<Result<_>>()?,
    };
    for entry in &entries {
        report.surfaces.push(entry.name.clone());
        report.identities.push(identity_checks(entry)?);
    }
    Ok(())
}
