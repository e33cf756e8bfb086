//! Generalized symmetric eigensolvers for the assembled operator pencil
//! `(S - Q) u = lambda M u`: a dense path for small problems and
//! shift-invert Lanczos with full reorthogonalization for large ones,
//! plus mesh-refinement extrapolation of the computed eigenvalues.
//!
//! A single solve is deterministic and single-threaded; callers that need
//! many independent solves (parameter sweeps, refinement ladders) run them
//! concurrently and reduce in index order.

pub mod dense;
pub mod extrapolate;
pub mod ldl;
pub mod lanczos;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::AssembledOperator;
use crate::scalar::Real;

pub use extrapolate::{catalog_spectrum, richardson, ExtrapolatedValue, LevelSpectrum, SurfaceSpectra};

/// Hard ceiling for the dense path; beyond this the dense solver refuses.
pub const DENSE_MAX_DIMENSION: usize = 2000;
/// Below this dimension `Method::Auto` prefers the dense path outright.
pub const AUTO_DENSE_THRESHOLD: usize = 600;
/// Relative gap separating eigenvalue multiplicity groups.
pub const GROUP_RELATIVE_GAP: f64 = 1e-6;
/// Default convergence tolerance on true residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default iteration cap for the Lanczos loop.
pub const DEFAULT_MAX_ITERATIONS: usize = 500;

/// Solver selection strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Dense for small problems, Lanczos otherwise, with a dense fallback
    /// if the iteration fails and the problem still fits densely.
    Auto,
    ShiftInvertLanczos,
    Dense,
}

/// Which solver actually produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MethodUsed {
    Dense,
    ShiftInvertLanczos,
}

/// Knobs for [`solve_lowest`].
#[derive(Clone, Debug)]
pub struct SolveOptions<T> {
    pub method: Method,
    pub max_iterations: usize,
    /// Convergence threshold on `|(S-Q)u - lambda M u| / |M u|`,
    /// scaled by `1 + |lambda|`.
    pub tolerance: T,
    /// Spectral shift override; `None` picks `-(sup q) - 1`, which sits
    /// strictly below the bottom of the spectrum.
    pub shift: Option<T>,
    /// Seed for the Lanczos starting vector.
    pub seed: u64,
    pub compute_vectors: bool,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            method: Method::Auto,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: T::of(DEFAULT_TOLERANCE),
            shift: None,
            seed: 7,
            compute_vectors: true,
        }
    }
}

/// The lowest part of a spectrum, eigenvalues ascending.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Serialize",
    deserialize = "T: serde::Deserialize<'de>"
))]
pub struct SpectrumResult<T> {
    pub eigenvalues: Vec<T>,
    /// Mass-orthonormal eigenvectors, one per eigenvalue, when requested.
    #[serde(skip)]
    pub eigenvectors: Option<Vec<Vec<T>>>,
    /// True relative residuals, one per eigenvalue.
    pub residuals: Vec<T>,
    /// Multiplicity clusters as `(first_index, length)` spans.
    pub groups: Vec<(usize, usize)>,
    pub iterations: usize,
    pub method: MethodUsed,
}

/// Cluster an ascending eigenvalue list into near-multiplicity groups:
/// a new group starts where the gap to the previous value exceeds
/// `GROUP_RELATIVE_GAP * (1 + |value|)`.
pub fn cluster_groups<T: Real>(values: &[T]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    if values.is_empty() {
        return groups;
    }
    let tol = T::of(GROUP_RELATIVE_GAP);
    let mut start = 0usize;
    for i in 1..values.len() {
        if (values[i] - values[i - 1]).abs() > tol * (T::one() + values[i].abs()) {
            groups.push((start, i - start));
            start = i;
        }
    }
    groups.push((start, values.len() - start));
    groups
}

/// True relative residual `|(S-Q)u - lambda M u|_2 / |M u|_2` of one pair.
pub fn true_residual<T: Real>(op: &AssembledOperator<T>, lambda: T, u: &[T]) -> T {
    let n = op.dimension();
    let mut au = vec![T::zero(); n];
    op.apply(u, &mut au);
    let mut mu = vec![T::zero(); n];
    op.mass.matvec(u, &mut mu);
    let mut num = T::zero();
    let mut den = T::zero();
    for i in 0..n {
        let r = au[i] - lambda * mu[i];
        num += r * r;
        den += mu[i] * mu[i];
    }
    num.sqrt() / den.sqrt().max(T::min_positive_value())
}

/// Whether the entries of `u` that rise above noise level share one sign;
/// the discrete ground state of a connected mesh should.
pub fn sign_constant<T: Real>(u: &[T]) -> bool {
    let peak = u.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if peak == T::zero() {
        return false;
    }
    let floor = T::of(1e-5) * peak;
    let mut pos = false;
    let mut neg = false;
    for &x in u {
        if x > floor {
            pos = true;
        } else if x < -floor {
            neg = true;
        }
    }
    !(pos && neg)
}

/// Compute the `k` lowest eigenpairs of `(S - Q) u = lambda M u`.
///
/// Requires `1 <= k <= dimension / 4`; the subspace methods degrade when
/// asked for a large fraction of a spectrum, and refining the mesh is the
/// correct way to get more eigenvalues.
pub fn solve_lowest<T: Real>(
    op: &AssembledOperator<T>,
    k: usize,
    opts: &SolveOptions<T>,
) -> Result<SpectrumResult<T>> {
    let n = op.dimension();
    if k == 0 {
        return Err(Error::BadSolveRequest("k must be at least 1".into()));
    }
    if 4 * k > n {
        return Err(Error::BadSolveRequest(format!(
            "k = {k} exceeds dimension/4 = {}; refine the mesh instead",
            n / 4
        )));
    }
    match opts.method {
        Method::Dense => dense_lowest(op, k, opts),
        Method::ShiftInvertLanczos => lanczos::lanczos_lowest(op, k, opts),
        Method::Auto => {
            if n <= AUTO_DENSE_THRESHOLD {
                return dense_lowest(op, k, opts);
            }
            match lanczos::lanczos_lowest(op, k, opts) {
                Ok(result) => Ok(result),
                Err(Error::NoConvergence(_)) | Err(Error::FactorizationFailed { .. })
                    if n <= DENSE_MAX_DIMENSION =>
                {
                    dense_lowest(op, k, opts)
                }
                Err(e) => Err(e),
            }
        }
    }
}

/// Dense path: reduce the pencil to a standard symmetric problem with the
/// mass matrix (diagonal rescale for lumped mass, Cholesky congruence for
/// consistent mass) and solve it completely.
pub fn dense_lowest<T: Real>(
    op: &AssembledOperator<T>,
    k: usize,
    opts: &SolveOptions<T>,
) -> Result<SpectrumResult<T>> {
    let n = op.dimension();
    if n > DENSE_MAX_DIMENSION {
        return Err(Error::DenseTooLarge { n, max: DENSE_MAX_DIMENSION });
    }
    // A = S - Q, dense.
    let mut a = op.stiffness.to_dense();
    for i in 0..n {
        a[i * n + i] -= op.potential_diag[i];
    }
    let (values, vectors) = if let Some(diag) = op.mass.lumped_diag() {
        // B = D^{-1/2} A D^{-1/2}; eigenvectors map back through D^{-1/2}.
        let scale: Vec<T> = diag.iter().map(|&m| T::one() / m.sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] *= scale[i] * scale[j];
            }
        }
        let (vals, mut z) = dense::sym_eig(&mut a, n)?;
        for i in 0..n {
            for j in 0..n {
                z[i * n + j] *= scale[i];
            }
        }
        (vals, z)
    } else {
        let m = mass_to_dense(op);
        let l = dense::cholesky(&m, n).ok_or(Error::FactorizationFailed {
            attempts: 1,
            shift: f64::NAN,
        })?;
        // B = L^{-1} A L^{-T} via two triangular solves.
        let mut c = a.clone();
        forward_solve_columns(&l, &mut c, n);
        transpose_in_place(&mut c, n);
        forward_solve_columns(&l, &mut c, n);
        // c is now B (symmetric up to roundoff); symmetrize before eig.
        for i in 0..n {
            for j in 0..i {
                let avg = (c[i * n + j] + c[j * n + i]) * T::of(0.5);
                c[i * n + j] = avg;
                c[j * n + i] = avg;
            }
        }
        let (vals, mut z) = dense::sym_eig(&mut c, n)?;
        // Map back: u = L^{-T} z, column by column.
        back_solve_columns(&l, &mut z, n);
        (vals, z)
    };

    let lambdas: Vec<T> = values[..k].to_vec();
    let mut vecs: Vec<Vec<T>> = Vec::with_capacity(k);
    for col in 0..k {
        let mut u = vec![T::zero(); n];
        for row in 0..n {
            u[row] = vectors[row * n + col];
        }
        // Mass-normalize explicitly; congruence preserves this only up to
        // roundoff.
        let norm = op.mass.inner(&u, &u).sqrt();
        if norm > T::zero() {
            for x in &mut u {
                *x /= norm;
            }
        }
        vecs.push(u);
    }
    let residuals: Vec<T> = lambdas
        .iter()
        .zip(&vecs)
        .map(|(&l, u)| true_residual(op, l, u))
        .collect();
    let groups = cluster_groups(&lambdas);
    // Discrete ground states are sign-constant only when every cotangent
    // weight is nonnegative (the stiffness matrix is then an M-matrix and the
    // maximum principle holds); obtuse triangles void the guarantee.
    debug_assert!(
        op.obtuse_edge_fraction > 0.0
            || lambdas.len() < 2
            || (lambdas[1] - lambdas[0]).abs() < T::of(GROUP_RELATIVE_GAP) * (T::one() + lambdas[0].abs())
            || sign_constant(&vecs[0]),
        "ground state of a connected non-obtuse mesh should be sign-constant"
    );
    Ok(SpectrumResult {
        eigenvalues: lambdas,
        eigenvectors: if opts.compute_vectors { Some(vecs) } else { None },
        residuals,
        groups,
        iterations: 0,
        method: MethodUsed::Dense,
    })
}

fn mass_to_dense<T: Real>(op: &AssembledOperator<T>) -> Vec<T> {
    let n = op.dimension();
    match &op.mass {
        crate::operator::MassMatrix::Lumped(d) => {
            let mut m = vec![T::zero(); n * n];
            for i in 0..n {
                m[i * n + i] = d[i];
            }
            m
        }
        crate::operator::MassMatrix::Consistent(s) => s.to_dense(),
    }
}

/// Solve `L X = B` in place for every column of the row-major matrix `b`.
fn forward_solve_columns<T: Real>(l: &[T], b: &mut [T], n: usize) {
    for col in 0..n {
        for i in 0..n {
            let mut sum = b[i * n + col];
            for k in 0..i {
                sum -= l[i * n + k] * b[k * n + col];
            }
            b[i * n + col] = sum / l[i * n + i];
        }
    }
}

/// Solve `L^T X = B` in place for every column of the row-major matrix `b`.
fn back_solve_columns<T: Real>(l: &[T], b: &mut [T], n: usize) {
    for col in 0..n {
        for i in (0..n).rev() {
            let mut sum = b[i * n + col];
            for k in (i + 1)..n {
                sum -= l[k * n + i] * b[k * n + col];
            }
            b[i * n + col] = sum / l[i * n + i];
        }
    }
}

fn transpose_in_place<T: Real>(a: &mut [T], n: usize) {
    for i in 0..n {
        for j in 0..i {
            a.swap(i * n + j, j * n + i);
        }
    }
}
