//! Finite-element invariants that tie the discrete pipeline to the
//! closed-form layer: weight monotonicity, exact scaling laws, the
//! constant-potential shift, and a randomized sweep of the eigenvalue
//! comparisons over every meshable catalog surface.

use curvspec_core::bounds::{
    verify_inequality, Verdict, VerifyOptions, VerifyPath, WhichInequality,
};
use curvspec_core::eigen::{catalog_spectrum, solve_lowest, SolveOptions};
use curvspec_core::geometry::{catalog_named, QuadratureRule};
use curvspec_core::mesh::{mesh_torus, MeshGeometry};
use curvspec_core::operator::{assemble, AssemblyOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Draw an admissible weight pair: `alpha` in `[0, 1.5]`, `beta` in
/// `[-4 alpha, 3]`.
fn random_weights(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let alpha: f64 = rng.gen_range(0.0..1.5);
    let beta: f64 = rng.gen_range(-4.0 * alpha..3.0);
    (alpha, beta)
}

#[test]
fn second_eigenvalue_decreases_with_alpha_on_the_product_torus() {
    let entry = catalog_named::<f64>("clifford_torus").unwrap();
    let levels = [3usize, 4, 5];
    let solve = SolveOptions::default();
    let assembly = AssemblyOptions::default();
    let mut values = Vec::new();
    for &alpha in &[0.0, 0.5, 1.0] {
        let spectra =
            catalog_spectrum(&entry, alpha, 0.0, 2, &levels, &solve, &assembly).unwrap();
        values.push(spectra.extrapolated[1].value);
    }
    // Closed form: lambda2(alpha) = 2 - 4 alpha; each half step drops it by 2.
    assert!(
        values[0] > values[1] + 1.0 && values[1] > values[2] + 1.0,
        "second eigenvalue not decreasing in alpha: {values:?}"
    );
    assert!((values[0] - 2.0).abs() < 0.05, "{}", values[0]);
    assert!((values[2] - (-2.0)).abs() < 0.05, "{}", values[2]);
}

#[test]
fn constant_potential_shifts_the_whole_spectrum() {
    // On a surface with constant curvature data the potential is a constant
    // q, so every discrete eigenvalue of the operator must equal the
    // corresponding Laplace eigenvalue minus q to solver precision.
    let entry = catalog_named::<f64>("clifford_torus").unwrap();
    let mesh = mesh_torus(&entry.immersion, 16, 16).unwrap();
    let mg = MeshGeometry::new(&mesh, &entry.immersion).unwrap();
    let solve = SolveOptions::default();
    let assembly = AssemblyOptions::default();
    let (alpha, beta) = (0.35, 0.15);
    let q = alpha * 4.0 + beta * 1.0;

    let base = assemble(&mesh, &mg, 0.0, 0.0, assembly).unwrap();
    let shifted = assemble(&mesh, &mg, alpha, beta, assembly).unwrap();
    let lam0 = solve_lowest(&base, 6, &solve).unwrap().eigenvalues;
    let lam1 = solve_lowest(&shifted, 6, &solve).unwrap().eigenvalues;
    for (a, b) in lam0.iter().zip(&lam1) {
        assert!(
            ((a - q) - b).abs() < 1e-10 * (1.0 + a.abs()),
            "shift broken: {a} - {q} vs {b}"
        );
    }
}

#[test]
fn dilation_scales_eigenvalues_by_inverse_area_ratio() {
    // Scaling an immersion by t multiplies the area by t^2 and divides every
    // operator eigenvalue by t^2 (the potential scales with the curvature).
    // The discrete pipeline inherits the law exactly: same mesh topology,
    // exactly scaled samples.
    let rule = QuadratureRule::default();
    let base = catalog_named::<f64>("bumpy_sphere(seed=3, amplitude=0.15)")
        .unwrap()
        .scaled_to_area(4.0 * PI, rule)
        .unwrap();
    let big = catalog_named::<f64>("bumpy_sphere(seed=3, amplitude=0.15)")
        .unwrap()
        .scaled_to_area(16.0 * PI, rule)
        .unwrap();
    let solve = SolveOptions::default();
    let assembly = AssemblyOptions::default();
    let (alpha, beta) = (0.6, 0.3);

    let mesh_b = curvspec_core::mesh::mesh_sphere(&base.immersion, 2).unwrap();
    let mg_b = MeshGeometry::new(&mesh_b, &base.immersion).unwrap();
    let op_b = assemble(&mesh_b, &mg_b, alpha, beta, assembly).unwrap();
    let lam_b = solve_lowest(&op_b, 4, &solve).unwrap().eigenvalues;

    let mesh_g = curvspec_core::mesh::mesh_sphere(&big.immersion, 2).unwrap();
    let mg_g = MeshGeometry::new(&mesh_g, &big.immersion).unwrap();
    let op_g = assemble(&mesh_g, &mg_g, alpha, beta, assembly).unwrap();
    let lam_g = solve_lowest(&op_g, 4, &solve).unwrap().eigenvalues;

    for (b, g) in lam_b.iter().zip(&lam_g) {
        assert!(
            (b / 4.0 - g).abs() < 1e-8 * (1.0 + b.abs()),
            "scale law broken: {b}/4 vs {g}"
        );
    }
}

/// The meshable catalog surfaces and the ladders the sweep uses for them.
fn sweep_surfaces() -> Vec<(&'static str, Vec<usize>)> {
    vec![
        ("round_sphere", vec![1, 2, 3]),
        ("geodesic_sphere(a=6.283185307179586, c=1)", vec![1, 2, 3]),
        ("geodesic_sphere(a=12.566370614359172, c=-1)", vec![1, 2, 3]),
        ("bumpy_sphere(seed=1, amplitude=0.2)", vec![1, 2, 3]),
        ("clifford_torus", vec![3, 4, 5]),
        ("equilateral_torus", vec![3, 4, 5]),
    ]
}

#[test]
fn random_weight_sweep_never_violates_the_bounds() {
    // 200 admissible weight pairs per meshable catalog surface: the
    // extrapolated first eigenvalue must stay at or below its bound within
    // uncertainty, and on genus-zero surfaces the second eigenvalue must
    // stay at or below the reference-sphere value.
    let pairs_per_surface = 200usize;
    for (name, levels) in sweep_surfaces() {
        let entry = catalog_named::<f64>(name).unwrap();
        let opts = VerifyOptions {
            levels: levels.clone(),
            path: VerifyPath::Fem,
            ..VerifyOptions::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
        let pairs: Vec<(f64, f64)> = (0..pairs_per_surface)
            .map(|_| random_weights(&mut rng))
            .collect();
        let genus_zero = entry.known.genus == 0;
        let violations: Vec<String> = pairs
            .par_iter()
            .map(|&(alpha, beta)| {
                let mut bad = Vec::new();
                let r1 =
                    verify_inequality(&entry, alpha, beta, WhichInequality::Lambda1, &opts)
                        .unwrap();
                if r1.verdict == Verdict::Violation {
                    bad.push(format!(
                        "{name} lambda1 at ({alpha:.4}, {beta:.4}): margin {} vs uncertainty {}",
                        r1.margin, r1.uncertainty
                    ));
                }
                if genus_zero {
                    let r2 = verify_inequality(
                        &entry,
                        alpha,
                        beta,
                        WhichInequality::Lambda2,
                        &opts,
                    )
                    .unwrap();
                    if r2.verdict == Verdict::Violation {
                        bad.push(format!(
                            "{name} lambda2 at ({alpha:.4}, {beta:.4}): margin {} vs uncertainty {}",
                            r2.margin, r2.uncertainty
                        ));
                    }
                }
                bad.join("; ")
            })
            .filter(|s| !s.is_empty())
            .collect();
        assert!(
            violations.is_empty(),
            "{} violation(s): {}",
            violations.len(),
            violations.join(" | ")
        );
    }
}
