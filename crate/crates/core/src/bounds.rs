//! Comparison bounds and inequality verdicts.
//!
//! This layer turns the closed-form comparison statements into checkable
//! predicates: reference-sphere eigenvalues, genus-dependent upper bounds for
//! the lowest two eigenvalues of the curvature-Schrödinger operator, verdict
//! reports that carry their numerical uncertainty, the closed-form checks for
//! the quadratic projective-plane embedding, and the crossing value `alpha_X`
//! past which a surface's area-normalized second eigenvalue stays below the
//! round-sphere value.
//!
//! Two evaluation paths feed the reports. Surfaces with constant curvature
//! data (round and geodesic spheres, the product and hexagonal flat tori, the
//! projective-plane embedding) have exact spectra: the potential is a
//! constant, so every operator eigenvalue is a Laplace eigenvalue shifted by
//! `-q`. Everything else goes through the finite-element ladder and Richardson
//! extrapolation, and the measured surface area — itself extrapolated across
//! the ladder — parametrizes the reference sphere, so no immersion is ever
//! rescaled.

use rayon::prelude::*;

use crate::eigen::{catalog_spectrum, richardson, ExtrapolatedValue, SolveOptions, SurfaceSpectra};
use crate::error::{Error, Result};
use crate::geometry::{integrate, CatalogEntry, CatalogSpec, Identification, KnownData, QuadratureRule};
use crate::operator::AssemblyOptions;
use crate::scalar::Real;

/// Default crossing-value search window.
pub const BIFURCATION_WINDOW: (f64, f64) = (0.0, 1.5);
/// Window after the single automatic extension.
pub const BIFURCATION_WINDOW_EXTENDED: (f64, f64) = (0.0, 3.0);
/// Grid resolution for the numeric crossing search.
pub const BIFURCATION_GRID: usize = 256;
/// Bisection tolerance on the crossing value.
pub const BIFURCATION_TOL: f64 = 1e-6;

/// Eigenvalues of the comparison operator on the round sphere `S(a)` of area
/// `a` inside the ambient space form of curvature `c`.
///
/// The closed forms are `lambda1 = -(2a+b)(4pi/area - c)` and
/// `lambda2 = 8pi/area + lambda1`, so the gap `lambda2 - lambda1 = 8pi/area`
/// holds identically — independent of the operator weights and of the ambient
/// curvature.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct SphereReference<T> {
    pub area: T,
    pub curvature: T,
}

impl<T: Real> SphereReference<T> {
    pub fn new(area: T, curvature: T) -> Result<Self> {
        if !(area > T::zero()) {
            return Err(Error::BranchNotApplicable(format!(
                "reference sphere area must be positive, got {}",
                area.as_f64()
            )));
        }
        Ok(Self { area, curvature })
    }

    /// Lowest eigenvalue: `-(2 alpha + beta) (4 pi / area - curvature)`.
    pub fn lambda1(&self, alpha: T, beta: T) -> T {
        let four_pi = T::of(4.0) * T::PI();
        -(T::of(2.0) * alpha + beta) * (four_pi / self.area - self.curvature)
    }

    /// Second eigenvalue: `8 pi / area` above [`Self::lambda1`]. Computed as
    /// that exact sum so the gap identity holds to the last bit.
    pub fn lambda2(&self, alpha: T, beta: T) -> T {
        self.gap() + self.lambda1(alpha, beta)
    }

    /// `lambda2 - lambda1 = 8 pi / area`.
    pub fn gap(&self) -> T {
        T::of(8.0) * T::PI() / self.area
    }
}

/// Genus-dependent window for the conformal-area invariant: at least `4 pi`
/// for every closed surface, at most `4 pi * floor((genus + 3) / 2)` for
/// orientable surfaces and three times that for non-orientable ones.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ConformalAreaBounds<T> {
    pub genus: usize,
    pub orientable: bool,
    pub lower: T,
    pub upper: T,
}

impl<T: Real> ConformalAreaBounds<T> {
    pub fn new(genus: usize, orientable: bool) -> Self {
        let four_pi = T::of(4.0) * T::PI();
        let steps = T::of_usize((genus + 3) / 2);
        let upper = if orientable {
            four_pi * steps
        } else {
            T::of(3.0) * four_pi * steps
        };
        Self {
            genus,
            orientable,
            lower: four_pi,
            upper,
        }
    }
}

/// Outcome of one inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Verdict {
    /// `lhs <= rhs` with nonnegative margin.
    #[serde(rename = "holds")]
    Holds,
    /// Margin negative but smaller than the numerical uncertainty: the
    /// inequality is satisfied within the resolution of the computation
    /// (this is what an equality case looks like numerically).
    #[serde(rename = "holds-within-uncertainty")]
    HoldsWithinUncertainty,
    /// Margin negative beyond the uncertainty.
    #[serde(rename = "VIOLATION")]
    Violation,
}

/// One checked inequality `lhs <= rhs`, with the margin `rhs - lhs`, the
/// numerical uncertainty of both sides combined, and the verdict the two
/// imply.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct InequalityReport<T> {
    /// Stable identifier of the checked predicate.
    pub predicate: String,
    /// Display name of the surface the check ran on.
    pub surface: String,
    pub alpha: T,
    pub beta: T,
    pub lhs: T,
    pub rhs: T,
    /// `rhs - lhs`; nonnegative means the inequality holds as computed.
    pub margin: T,
    /// Combined error bar: eigenvalue extrapolation, area measurement, and a
    /// roundoff floor.
    pub uncertainty: T,
    pub verdict: Verdict,
}

impl<T: Real> InequalityReport<T> {
    pub fn new(
        predicate: &str,
        surface: String,
        alpha: T,
        beta: T,
        lhs: T,
        rhs: T,
        uncertainty: T,
    ) -> Self {
        let margin = rhs - lhs;
        let verdict = if margin >= T::zero() {
            Verdict::Holds
        } else if -margin <= uncertainty {
            Verdict::HoldsWithinUncertainty
        } else {
            Verdict::Violation
        };
        Self {
            predicate: predicate.into(),
            surface,
            alpha,
            beta,
            lhs,
            rhs,
            margin,
            uncertainty,
            verdict,
        }
    }
}

/// Which of the two eigenvalue inequalities to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WhichInequality {
    Lambda1,
    Lambda2,
}

/// How [`verify_inequality`] obtains the surface's eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum VerifyPath {
    /// Closed form when the surface has constant curvature data, otherwise
    /// the finite-element ladder.
    Auto,
    ClosedForm,
    Fem,
}

/// Options for [`verify_inequality`].
#[derive(Clone, Debug)]
pub struct VerifyOptions<T> {
    /// Refinement ladder for the FEM path; empty picks a default by domain
    /// type (subdivision levels 2-4 for sphere charts, grid levels 4-6 for
    /// torus charts).
    pub levels: Vec<usize>,
    /// Eigenpairs to compute on the FEM path (at least 2).
    pub k: usize,
    pub path: VerifyPath,
    pub solve: SolveOptions<T>,
    pub assembly: AssemblyOptions,
    /// Quadrature for closed-form-path area measurement and integral checks.
    pub rule: QuadratureRule,
}

impl<T: Real> Default for VerifyOptions<T> {
    fn default() -> Self {
        Self {
            levels: Vec::new(),
            k: 2,
            path: VerifyPath::Auto,
            solve: SolveOptions::default(),
            assembly: AssemblyOptions::default(),
            rule: QuadratureRule::default(),
        }
    }
}

fn require_admissible<T: Real>(alpha: T, beta: T) -> Result<()> {
    if T::of(4.0) * alpha + beta < T::zero() {
        return Err(Error::HypothesisViolated {
            alpha: alpha.as_f64(),
            beta: beta.as_f64(),
        });
    }
    Ok(())
}

fn require_reference<T: Real>(epsilon: usize, area: T) -> Result<()> {
    if epsilon != 1 && epsilon != 2 {
        return Err(Error::BranchNotApplicable(format!(
            "orientability factor must be 1 (non-orientable) or 2 (orientable), got {epsilon}"
        )));
    }
    if !(area > T::zero()) {
        return Err(Error::BranchNotApplicable(format!(
            "reference area must be positive, got {}",
            area.as_f64()
        )));
    }
    Ok(())
}

/// Upper bound for the lowest eigenvalue of the comparison operator on a
/// closed immersed surface of the given genus: the reference-sphere value
/// minus `(4 epsilon pi / area) * alpha * genus`, where `epsilon` is 2 for
/// orientable surfaces and 1 otherwise.
///
/// Requires the admissibility hypothesis `4 alpha + beta >= 0`.
pub fn lambda1_bound<T: Real>(
    genus: usize,
    epsilon: usize,
    area: T,
    curvature: T,
    alpha: T,
    beta: T,
) -> Result<T> {
    require_admissible(alpha, beta)?;
    require_reference(epsilon, area)?;
    let sphere = SphereReference { area, curvature };
    let correction =
        T::of(4.0) * T::of_usize(epsilon) * T::PI() / area * alpha * T::of_usize(genus);
    Ok(sphere.lambda1(alpha, beta) - correction)
}

/// Saturated branch of [`lambda2_gap`], valid when `4 alpha + beta >= 2`:
/// `-(4 pi / area) * epsilon * alpha * genus`.
fn gap_saturated<T: Real>(genus: usize, epsilon: usize, area: T, alpha: T) -> T {
    let four_pi_over_a = T::of(4.0) * T::PI() / area;
    -four_pi_over_a * T::of_usize(epsilon) * alpha * T::of_usize(genus)
}

/// Subcritical branch of [`lambda2_gap`], valid when `0 <= 4 alpha + beta
/// <= 2` and `genus >= 1`. The coefficient pattern depends on orientability
/// and on the parity of the genus; all four cases agree with the saturated
/// branch exactly on the boundary `4 alpha + beta = 2`.
fn gap_subcritical<T: Real>(
    genus: usize,
    epsilon: usize,
    area: T,
    alpha: T,
    beta: T,
) -> T {
    let four_pi_over_a = T::of(4.0) * T::PI() / area;
    let g = T::of_usize(genus);
    let two = T::of(2.0);
    let four = T::of(4.0);
    let (factor, slope) = if epsilon == 2 {
        if genus % 2 == 0 {
            (g / two, T::of(8.0))
        } else {
            let gp1 = g + T::one();
            (gp1 / two, four * (two * g + T::one()) / gp1)
        }
    } else if genus % 2 == 0 {
        let m = T::of(3.0) * g + four;
        (m / two, four + two * g / m)
    } else {
        let m = T::of(3.0) * g + T::of(5.0);
        (m / two, four + two * g / m)
    };
    -four_pi_over_a * factor * (slope * alpha + beta - two)
}

/// Upper bound for the amount by which the surface's second eigenvalue can
/// exceed the reference sphere's: zero in genus zero, and a strictly
/// negative genus correction otherwise (when the hypotheses of a branch
/// hold). The ambient curvature of the reference cancels in the eigenvalue
/// difference, so it does not enter the value.
///
/// Branches: `4 alpha + beta >= 2` gives `-(4 pi/area) epsilon alpha genus`;
/// `0 <= 4 alpha + beta <= 2` gives a parity- and orientability-dependent
/// affine form that matches the first branch on the boundary. A
/// non-orientable request in genus zero has no applicable branch (no closed
/// non-orientable surface has genus zero).
pub fn lambda2_gap<T: Real>(
    genus: usize,
    epsilon: usize,
    area: T,
    curvature: T,
    alpha: T,
    beta: T,
) -> Result<T> {
    require_admissible(alpha, beta)?;
    require_reference(epsilon, area)?;
    let _ = curvature;
    if genus == 0 {
        if epsilon == 1 {
            return Err(Error::BranchNotApplicable(
                "no closed non-orientable surface has genus zero".into(),
            ));
        }
        return Ok(T::zero());
    }
    let s = T::of(4.0) * alpha + beta;
    if s >= T::of(2.0) {
        Ok(gap_saturated(genus, epsilon, area, alpha))
    } else {
        Ok(gap_subcritical(genus, epsilon, area, alpha, beta))
    }
}

/// Genus-dependent cap on the crossing value [`bifurcation_alpha`]: zero in
/// genus zero, `1/4` for positive even genus, `(genus + 1) / (4 genus + 2)`
/// for odd genus.
pub fn corollary_bounds<T: Real>(genus: usize) -> T {
    if genus == 0 {
        T::zero()
    } else if genus % 2 == 0 {
        T::of(0.25)
    } else {
        T::of_usize(genus + 1) / T::of_usize(4 * genus + 2)
    }
}

fn epsilon_of<T: Real>(known: &KnownData<T>) -> usize {
    if known.orientable {
        2
    } else {
        1
    }
}

/// True when the entry carries enough constant data for exact operator
/// eigenvalues: with a constant potential `q = alpha |h|^2 + beta |H|^2`,
/// the spectrum is the Laplace spectrum shifted by `-q`.
fn closed_form_ready<T: Real>(known: &KnownData<T>) -> bool {
    known.laplace_lambda2.is_some()
        && known.normh2.is_some()
        && known.normh_mean2.is_some()
        && known.area.is_some()
}

fn roundoff_floor<T: Real>(lhs: T, rhs: T) -> T {
    T::of(256.0) * T::epsilon() * (T::one() + lhs.abs() + rhs.abs())
}

fn default_levels<T: Real>(entry: &CatalogEntry<T>) -> Result<Vec<usize>> {
    match entry.immersion.domain().identification {
        Identification::SpherePolar => Ok(vec![2, 3, 4]),
        Identification::TorusLattice => Ok(vec![4, 5, 6]),
        Identification::Open | Identification::HemisphereAntipodal => {
            Err(Error::NonOrientableNeedsClosedForm)
        }
    }
}

fn resolve_levels<T: Real>(entry: &CatalogEntry<T>, chosen: &[usize]) -> Result<Vec<usize>> {
    if chosen.is_empty() {
        default_levels(entry)
    } else {
        Ok(chosen.to_vec())
    }
}

/// Richardson fit of the per-level measured areas of a ladder.
fn extrapolated_area<T: Real>(spectra: &SurfaceSpectra<T>) -> Result<ExtrapolatedValue<T>> {
    let series: Vec<(T, T)> = spectra
        .per_level
        .iter()
        .map(|ls| (ls.h, ls.total_area))
        .collect();
    richardson(&series)
}

fn rhs_for<T: Real>(
    which: WhichInequality,
    genus: usize,
    epsilon: usize,
    area: T,
    curvature: T,
    alpha: T,
    beta: T,
) -> Result<(T, &'static str)> {
    match which {
        WhichInequality::Lambda1 => Ok((
            lambda1_bound(genus, epsilon, area, curvature, alpha, beta)?,
            "lambda1_upper_bound",
        )),
        WhichInequality::Lambda2 => {
            let sphere = SphereReference::new(area, curvature)?;
            let gap = lambda2_gap(genus, epsilon, area, curvature, alpha, beta)?;
            Ok((sphere.lambda2(alpha, beta) + gap, "lambda2_upper_bound"))
        }
    }
}

fn verify_closed_form<T: Real>(
    entry: &CatalogEntry<T>,
    alpha: T,
    beta: T,
    which: WhichInequality,
) -> Result<InequalityReport<T>> {
    let known = &entry.known;
    let (Some(lam2_lap), Some(h2), Some(hm2), Some(area)) = (
        known.laplace_lambda2,
        known.normh2,
        known.normh_mean2,
        known.area,
    ) else {
        return Err(Error::BranchNotApplicable(format!(
            "{} has no closed-form spectrum; use the FEM path",
            entry.name
        )));
    };
    let q = alpha * h2 + beta * hm2;
    let lhs = match which {
        WhichInequality::Lambda1 => -q,
        WhichInequality::Lambda2 => lam2_lap - q,
    };
    let curvature = entry.immersion.ambient().curvature::<T>();
    let (rhs, predicate) = rhs_for(
        which,
        known.genus,
        epsilon_of(known),
        area,
        curvature,
        alpha,
        beta,
    )?;
    Ok(InequalityReport::new(
        predicate,
        entry.name.clone(),
        alpha,
        beta,
        lhs,
        rhs,
        roundoff_floor(lhs, rhs),
    ))
}

fn verify_fem<T: Real>(
    entry: &CatalogEntry<T>,
    alpha: T,
    beta: T,
    which: WhichInequality,
    opts: &VerifyOptions<T>,
) -> Result<InequalityReport<T>> {
    if !entry.known.orientable {
        return Err(Error::NonOrientableNeedsClosedForm);
    }
    let levels = resolve_levels(entry, &opts.levels)?;
    let k = opts.k.max(2);
    let spectra = catalog_spectrum(entry, alpha, beta, k, &levels, &opts.solve, &opts.assembly)?;
    let index = match which {
        WhichInequality::Lambda1 => 0,
        WhichInequality::Lambda2 => 1,
    };
    let eig = &spectra.extrapolated[index];
    let lhs = eig.value;

    let area_fit = extrapolated_area(&spectra)?;
    let area = area_fit.value;
    let curvature = entry.immersion.ambient().curvature::<T>();
    let genus = entry.known.genus;
    let epsilon = epsilon_of(&entry.known);
    let (rhs, predicate) = rhs_for(which, genus, epsilon, area, curvature, alpha, beta)?;

    // Propagate the area measurement error into the bound: evaluate the
    // right-hand side at the ends of the area error bar and take the larger
    // excursion.
    let ua = area_fit.uncertainty.min(area * T::of(0.5));
    let (rhs_lo, _) = rhs_for(which, genus, epsilon, area - ua, curvature, alpha, beta)?;
    let (rhs_hi, _) = rhs_for(which, genus, epsilon, area + ua, curvature, alpha, beta)?;
    let rhs_spread = (rhs_lo - rhs).abs().max((rhs_hi - rhs).abs());

    let uncertainty = eig.uncertainty + rhs_spread + roundoff_floor(lhs, rhs);
    Ok(InequalityReport::new(
        predicate,
        entry.name.clone(),
        alpha,
        beta,
        lhs,
        rhs,
        uncertainty,
    ))
}

/// Check one of the two eigenvalue inequalities on a catalog surface.
///
/// The left-hand side is the surface's eigenvalue (closed form where the
/// curvature data is constant, otherwise extrapolated across a refinement
/// ladder); the right-hand side is the reference-sphere bound evaluated at
/// the surface's measured area. Fails with `HypothesisViolated` outside
/// `4 alpha + beta >= 0` and with `NonOrientableNeedsClosedForm` when a
/// non-orientable surface is forced onto the FEM path.
pub fn verify_inequality<T: Real>(
    entry: &CatalogEntry<T>,
    alpha: T,
    beta: T,
    which: WhichInequality,
    opts: &VerifyOptions<T>,
) -> Result<InequalityReport<T>> {
    require_admissible(alpha, beta)?;
    if !entry.immersed {
        return Err(Error::DomainMismatch {
            op: "verify_inequality",
            detail: format!(
                "{} is a metric-only surface: its planar picture carries no \
                 curvature, so the comparison operator is undefined on it",
                entry.name
            ),
        });
    }
    let use_closed = match opts.path {
        VerifyPath::ClosedForm => true,
        VerifyPath::Fem => false,
        VerifyPath::Auto => closed_form_ready(&entry.known),
    };
    if use_closed {
        verify_closed_form(entry, alpha, beta, which)
    } else {
        verify_fem(entry, alpha, beta, which, opts)
    }
}

/// Lower-bound report for the total `|H|^2 + c` energy: every closed
/// immersed surface carries at least `4 pi` of it, with equality exactly
/// for round (geodesic) spheres. Used as a precondition audit before the
/// eigenvalue comparisons.
pub fn willmore_report<T: Real>(
    entry: &CatalogEntry<T>,
    rule: QuadratureRule,
) -> Result<InequalityReport<T>> {
    if !entry.immersed {
        return Err(Error::DomainMismatch {
            op: "willmore_report",
            detail: format!("{} is a metric-only surface without curvature data", entry.name),
        });
    }
    let c = entry.immersion.ambient().curvature::<T>();
    let total = integrate(&entry.immersion, rule, |pg| pg.normh_mean2 + c)?;
    let four_pi = T::of(4.0) * T::PI();
    Ok(InequalityReport::new(
        "willmore_lower_bound",
        entry.name.clone(),
        T::zero(),
        T::zero(),
        four_pi,
        total.value,
        total.error_estimate + roundoff_floor(four_pi, total.value),
    ))
}

fn check_constant<T: Real>(name: &str, got: T, want: T) -> Result<()> {
    let tol = T::of(1e-6) * (T::one() + want.abs());
    if (got - want).abs() > tol {
        return Err(Error::DomainMismatch {
            op: "veronese_check",
            detail: format!(
                "{name}: quadrature gives {}, closed form says {}",
                got.as_f64(),
                want.as_f64()
            ),
        });
    }
    Ok(())
}

/// Check both eigenvalue inequalities on the quadratic projective-plane
/// embedding, using its closed forms, with [`QuadratureRule::default`] for
/// the cross-checks. See [`veronese_check_with`].
pub fn veronese_check<T: Real>(alpha: T, beta: T) -> Result<[InequalityReport<T>; 2]> {
    veronese_check_with(alpha, beta, QuadratureRule::default())
}

/// Check both eigenvalue inequalities on the quadratic projective-plane
/// embedding (constant `|h|^2 = 5`, `|H|^2 = 3/2`, Gauss curvature `1/2`,
/// area `4 pi`, second Laplace eigenvalue `3`). With the constant potential
/// `q = 5 alpha + (3/2) beta` the operator eigenvalues are
/// `lambda1 = -5 alpha - (3/2) beta` and `lambda2 = 3 - 5 alpha - (3/2) beta`;
/// both are compared against the genus-one non-orientable reference bounds.
/// The constants are cross-checked against quadrature over the chart before
/// any verdict is produced.
pub fn veronese_check_with<T: Real>(
    alpha: T,
    beta: T,
    rule: QuadratureRule,
) -> Result<[InequalityReport<T>; 2]> {
    require_admissible(alpha, beta)?;
    let entry = CatalogSpec::<T>::Veronese.build()?;
    let known = &entry.known;
    let area = integrate(&entry.immersion, rule, |_| T::one())?.value;
    check_constant("area", area, known.area.expect("catalog constant"))?;
    let h2 = integrate(&entry.immersion, rule, |pg| pg.normh2)?.value / area;
    check_constant("|h|^2", h2, known.normh2.expect("catalog constant"))?;
    let hm2 = integrate(&entry.immersion, rule, |pg| pg.normh_mean2)?.value / area;
    check_constant("|H|^2", hm2, known.normh_mean2.expect("catalog constant"))?;
    let gauss = integrate(&entry.immersion, rule, |pg| pg.gauss)?.value / area;
    check_constant("gauss", gauss, known.gauss.expect("catalog constant"))?;
    let lambda1 = verify_closed_form(&entry, alpha, beta, WhichInequality::Lambda1)?;
    let lambda2 = verify_closed_form(&entry, alpha, beta, WhichInequality::Lambda2)?;
    Ok([lambda1, lambda2])
}

/// How [`bifurcation_alpha`] evaluated the crossing curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationMethod {
    ClosedForm,
    Numeric,
}

/// The crossing value of a surface: the infimum of the parameters `alpha`
/// past which `f(alpha) = lambda2(alpha) * area - 4 pi (2 - 2 alpha)` stays
/// nonpositive, certified on a sampled window.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct BifurcationResult<T> {
    pub surface: String,
    pub alpha_x: T,
    /// Sampled crossing curve: `(alpha, f(alpha))` pairs over the window.
    pub samples: Vec<(T, T)>,
    pub method: BifurcationMethod,
    /// `f <= 0` was verified on `[alpha_x, window.1]`; nothing is claimed
    /// beyond the window.
    pub window: (T, T),
    /// False when `f <= 0` already at the window start (the crossing value
    /// is zero by definition, not by a located sign change).
    pub crossing_found: bool,
}

/// Options for [`bifurcation_alpha`].
#[derive(Clone, Debug)]
pub struct BifurcationOptions<T> {
    /// Refinement ladder for the numeric path; empty picks the same default
    /// as [`VerifyOptions`].
    pub levels: Vec<usize>,
    /// Grid points per window pass.
    pub grid: usize,
    pub solve: SolveOptions<T>,
    pub assembly: AssemblyOptions,
    /// Skip the closed form even when the surface has one (the closed form
    /// is still the default because it is exact).
    pub force_numeric: bool,
}

impl<T: Real> Default for BifurcationOptions<T> {
    fn default() -> Self {
        Self {
            levels: Vec::new(),
            grid: BIFURCATION_GRID,
            solve: SolveOptions::default(),
            assembly: AssemblyOptions::default(),
            force_numeric: false,
        }
    }
}

fn affine_samples<T: Real>(p: T, q: T, window: (T, T), n: usize) -> Vec<(T, T)> {
    let n = n.max(2);
    let step = (window.1 - window.0) / T::of_usize(n - 1);
    (0..n)
        .map(|i| {
            let a = window.0 + step * T::of_usize(i);
            (a, p + q * a)
        })
        .collect()
}

/// Exact crossing value for surfaces with constant `|h|^2`: there
/// `lambda2(alpha) = lambda2(-Delta) - alpha |h|^2`, so the crossing curve
/// `f` is affine in `alpha` and its root is a closed form.
fn bifurcation_closed_form<T: Real>(
    entry: &CatalogEntry<T>,
    grid: usize,
) -> Result<BifurcationResult<T>> {
    let known = &entry.known;
    let (Some(lam2_lap), Some(h2), Some(area)) =
        (known.laplace_lambda2, known.normh2, known.area)
    else {
        return Err(Error::BranchNotApplicable(format!(
            "{} has no closed-form crossing curve",
            entry.name
        )));
    };
    let eight_pi = T::of(8.0) * T::PI();
    // f(alpha) = p + q * alpha.
    let p = lam2_lap * area - eight_pi;
    let q = eight_pi - h2 * area;
    let floor = T::of(64.0) * T::epsilon() * (T::one() + (lam2_lap * area).abs() + eight_pi);
    let p_eff = if p.abs() <= floor { T::zero() } else { p };
    let q_eff = if q.abs() <= floor { T::zero() } else { q };

    let window = (T::of(BIFURCATION_WINDOW.0), T::of(BIFURCATION_WINDOW.1));
    let extended = (
        T::of(BIFURCATION_WINDOW_EXTENDED.0),
        T::of(BIFURCATION_WINDOW_EXTENDED.1),
    );
    let (alpha_x, crossing_found, window) = if q_eff > T::zero() {
        // The affine curve is eventually positive: no certification window
        // exists at any resolution.
        return Err(Error::NotEventuallyNegative(BIFURCATION_WINDOW_EXTENDED.1));
    } else if q_eff == T::zero() {
        if p_eff <= T::zero() {
            (T::zero(), false, window)
        } else {
            return Err(Error::NotEventuallyNegative(BIFURCATION_WINDOW_EXTENDED.1));
        }
    } else {
        let root = -p_eff / q_eff;
        if root <= T::zero() {
            (T::zero(), false, window)
        } else if root <= window.1 {
            (root, true, window)
        } else if root <= extended.1 {
            (root, true, extended)
        } else {
            return Err(Error::NotEventuallyNegative(BIFURCATION_WINDOW_EXTENDED.1));
        }
    };
    Ok(BifurcationResult {
        surface: entry.name.clone(),
        alpha_x,
        samples: affine_samples(p, q, window, grid),
        method: BifurcationMethod::ClosedForm,
        window,
        crossing_found,
    })
}

/// One point of the numeric crossing curve: the extrapolated second
/// eigenvalue at `(alpha, 0)` times the extrapolated area, against the
/// genus-zero reference line. Returns the value and its uncertainty.
fn crossing_point<T: Real>(
    entry: &CatalogEntry<T>,
    alpha: T,
    levels: &[usize],
    opts: &BifurcationOptions<T>,
) -> Result<(T, T)> {
    let spectra = catalog_spectrum(
        entry,
        alpha,
        T::zero(),
        2,
        levels,
        &opts.solve,
        &opts.assembly,
    )?;
    let lam = &spectra.extrapolated[1];
    let area_fit = extrapolated_area(&spectra)?;
    let four_pi = T::of(4.0) * T::PI();
    let f = lam.value * area_fit.value - four_pi * (T::of(2.0) - T::of(2.0) * alpha);
    let uf = lam.uncertainty * area_fit.value.abs()
        + lam.value.abs() * area_fit.uncertainty
        + T::of(64.0) * T::epsilon() * (T::one() + f.abs());
    Ok((f, uf))
}

fn bifurcation_numeric<T: Real>(
    entry: &CatalogEntry<T>,
    opts: &BifurcationOptions<T>,
) -> Result<BifurcationResult<T>> {
    let levels = resolve_levels(entry, &opts.levels)?;
    let n = opts.grid.max(8);
    let mut window = (T::of(BIFURCATION_WINDOW.0), T::of(BIFURCATION_WINDOW.1));
    let mut extended = false;
    loop {
        let step = (window.1 - window.0) / T::of_usize(n - 1);
        let alphas: Vec<T> = (0..n).map(|i| window.0 + step * T::of_usize(i)).collect();
        let curve: Vec<(T, T)> = alphas
            .par_iter()
            .map(|&a| crossing_point(entry, a, &levels, opts))
            .collect::<Result<Vec<_>>>()?;
        let samples: Vec<(T, T)> = alphas
            .iter()
            .zip(&curve)
            .map(|(&a, &(f, _))| (a, f))
            .collect();

        let last_pos = curve.iter().rposition(|&(f, _)| f > T::zero());
        let Some(last_pos) = last_pos else {
            // Nonpositive everywhere: the crossing value is the window start.
            return Ok(BifurcationResult {
                surface: entry.name.clone(),
                alpha_x: T::zero(),
                samples,
                method: BifurcationMethod::Numeric,
                window,
                crossing_found: false,
            });
        };
        if curve.iter().all(|&(f, uf)| f.abs() <= uf) {
            // The whole curve is indistinguishable from zero (the equality
            // case): certify the window without hunting for a sign change
            // in noise.
            return Ok(BifurcationResult {
                surface: entry.name.clone(),
                alpha_x: T::zero(),
                samples,
                method: BifurcationMethod::Numeric,
                window,
                crossing_found: false,
            });
        }
        if last_pos == n - 1 {
            if extended {
                return Err(Error::NotEventuallyNegative(window.1.as_f64()));
            }
            extended = true;
            window = (
                T::of(BIFURCATION_WINDOW_EXTENDED.0),
                T::of(BIFURCATION_WINDOW_EXTENDED.1),
            );
            continue;
        }
        // Refine the last sign change: f(lo) > 0 >= f(hi) throughout.
        let mut lo = alphas[last_pos];
        let mut hi = alphas[last_pos + 1];
        let tol = T::of(BIFURCATION_TOL);
        while hi - lo > tol {
            let mid = (lo + hi) * T::of(0.5);
            let (fm, _) = crossing_point(entry, mid, &levels, opts)?;
            if fm > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(BifurcationResult {
            surface: entry.name.clone(),
            alpha_x: (lo + hi) * T::of(0.5),
            samples,
            method: BifurcationMethod::Numeric,
            window,
            crossing_found: true,
        });
    }
}

/// Locate the crossing value `alpha_X` of a surface: the infimum of the
/// weights `alpha >= 0` past which the area-normalized second eigenvalue of
/// the pure-`alpha` operator stays at or below the round-sphere line
/// `4 pi (2 - 2 alpha)`.
///
/// Surfaces with constant `|h|^2` take an exact closed-form path (their
/// crossing curve is affine). Otherwise the curve is sampled on a 256-point
/// grid over `[0, 1.5]`, the last sign change is refined by bisection to
/// `1e-6`, and `f <= 0` is verified on the rest of the window. A curve still
/// positive at the window end gets one automatic window extension to
/// `[0, 3]` before `NotEventuallyNegative` is reported.
pub fn bifurcation_alpha<T: Real>(
    entry: &CatalogEntry<T>,
    opts: &BifurcationOptions<T>,
) -> Result<BifurcationResult<T>> {
    if !entry.immersed {
        return Err(Error::DomainMismatch {
            op: "bifurcation_alpha",
            detail: format!(
                "{} is a metric-only surface: the crossing curve needs `|h|^2`",
                entry.name
            ),
        });
    }
    if !opts.force_numeric && closed_form_ready(&entry.known) {
        bifurcation_closed_form(entry, opts.grid.max(8))
    } else {
        bifurcation_numeric(entry, opts)
    }
}
