//! Block shift-invert Lanczos for the pencil `(S - Q) u = lambda M u`.
//!
//! With a shift `sigma` strictly below the spectrum, `A - sigma M` is
//! positive definite, and repeatedly applying `(A - sigma M)^{-1} M`
//! amplifies the eigenvectors of the smallest pencil eigenvalues. The
//! subspace grows by a whole block of directions per step and is kept
//! `M`-orthonormal by full reorthogonalization; eigenpairs are extracted
//! by Rayleigh-Ritz on the projected pencil itself, so the reported
//! values never pass through the shift-invert transform.
//!
//! The block size equals the number of requested eigenvalues. That makes
//! multiplicity handling watertight: a single-vector Krylov space contains
//! only one copy of each degenerate eigenvalue, which silently skips
//! repeats, while a block of `k` independent random directions carries as
//! many copies of every eigenspace as the answer can need.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::operator::AssembledOperator;
use crate::scalar::Real;

use super::dense::sym_eig;
use super::ldl::LdlFactor;
use super::{cluster_groups, MethodUsed, SolveOptions, SpectrumResult};

/// Maximum factorization attempts before giving up on finding a workable
/// shift.
const MAX_SHIFT_ATTEMPTS: usize = 3;

fn euclid_dot<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

/// Draw a reproducible vector with entries in (-1, 1).
fn seeded_vector<T: Real>(n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    (0..n).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect()
}

/// The growing trial subspace: an `M`-orthonormal basis, the pencil matrix
/// applied to each basis vector, and the projected pencil (lower rows).
struct Subspace<'a, T: Real> {
    op: &'a AssembledOperator<T>,
    basis: Vec<Vec<T>>,
    applied: Vec<Vec<T>>,
    proj_rows: Vec<Vec<T>>,
    breakdown: T,
}

impl<'a, T: Real> Subspace<'a, T> {
    fn new(op: &'a AssembledOperator<T>) -> Self {
        let eps = T::epsilon();
        Subspace {
            op,
            basis: Vec::new(),
            applied: Vec::new(),
            proj_rows: Vec::new(),
            breakdown: eps.sqrt() * eps.sqrt().sqrt(), // eps^(3/4)
        }
    }

    fn len(&self) -> usize {
        self.basis.len()
    }

    /// M-orthonormalize `v` against the basis (modified Gram-Schmidt,
    /// twice) and append it. Returns false when the direction collapses
    /// into the span.
    fn push(&mut self, mut v: Vec<T>) -> bool {
        for _ in 0..2 {
            for b in &self.basis {
                let c = self.op.mass.inner(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * *bi;
                }
            }
        }
        let norm = self.op.mass.inner(&v, &v).sqrt();
        if !(norm > self.breakdown) {
            return false;
        }
        for x in &mut v {
            *x /= norm;
        }
        let mut av = vec![T::zero(); v.len()];
        self.op.apply(&v, &mut av);
        let mut row: Vec<T> = self.basis.iter().map(|b| euclid_dot(b, &av)).collect();
        row.push(euclid_dot(&v, &av));
        self.basis.push(v);
        self.applied.push(av);
        self.proj_rows.push(row);
        true
    }

    /// Dense symmetric copy of the projected pencil.
    fn projected(&self) -> Vec<T> {
        let m = self.len();
        let mut t = vec![T::zero(); m * m];
        for (i, row) in self.proj_rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                t[i * m + j] = x;
                t[j * m + i] = x;
            }
        }
        t
    }
}

pub fn lanczos_lowest<T: Real>(
    op: &AssembledOperator<T>,
    k: usize,
    opts: &SolveOptions<T>,
) -> Result<SpectrumResult<T>> {
    let n = op.dimension();

    // Find a shift whose matrix factorizes; the default sits below the
    // whole spectrum, so failure indicates roundoff trouble and we move
    // the shift further down and retry.
    let mut sigma = opts
        .shift
        .unwrap_or_else(|| -op.potential_sup() - T::one());
    let mut factor: Option<LdlFactor<T>> = None;
    let mut attempts = 0usize;
    while attempts < MAX_SHIFT_ATTEMPTS {
        attempts += 1;
        let shifted = op.shifted_matrix(sigma);
        match LdlFactor::new(&shifted) {
            Some(f) => {
                factor = Some(f);
                break;
            }
            None => {
                sigma = if sigma < T::zero() { sigma + sigma } else { -T::one() };
            }
        }
    }
    let Some(factor) = factor else {
        return Err(Error::FactorizationFailed { attempts, shift: sigma.as_f64() });
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut space = Subspace::new(op);
    let block = k.max(1);

    // Initial block of independent random directions.
    let mut fresh_tries = 0usize;
    while space.len() < block.min(n) && fresh_tries < 8 * block {
        fresh_tries += 1;
        let v = seeded_vector::<T>(n, &mut rng);
        space.push(v);
    }
    if space.len() == 0 {
        return Err(Error::ZeroVector);
    }

    let mut scratch = vec![T::zero(); n];
    let mut newest = 0..space.len();

    for step in 0..opts.max_iterations {
        // Grow: shift-invert image of each vector in the newest block.
        let before = space.len();
        for idx in newest.clone() {
            if space.len() >= n {
                break;
            }
            op.mass.matvec(&space.basis[idx], &mut scratch);
            let mut image = vec![T::zero(); n];
            factor.solve(&scratch, &mut image);
            if !space.push(image) {
                // Direction collapsed into the span: top up with a fresh
                // random direction so the block keeps its width.
                let f = seeded_vector::<T>(n, &mut rng);
                space.push(f);
            }
        }
        let exhausted = space.len() == before;
        newest = before..space.len();

        let m = space.len();
        if m >= (k + 2).min(n) || m == n {
            if let Some(result) = extract_if_converged(op, k, opts, &space, step + 1)? {
                return Ok(result);
            }
        }
        if exhausted {
            break;
        }
    }

    Err(Error::NoConvergence(opts.max_iterations))
}

/// Rayleigh-Ritz on the projected pencil; accept when every requested
/// pair's true residual clears the tolerance.
fn extract_if_converged<T: Real>(
    op: &AssembledOperator<T>,
    k: usize,
    opts: &SolveOptions<T>,
    space: &Subspace<'_, T>,
    iterations: usize,
) -> Result<Option<SpectrumResult<T>>> {
    let m = space.len();
    if m < k {
        return Ok(None);
    }
    let mut t = space.projected();
    let (mu, y) = sym_eig(&mut t, m)?;

    let n = op.dimension();
    let mut lambdas = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut mu_buf = vec![T::zero(); n];
    for col in 0..k {
        let lambda = mu[col];
        let mut u = vec![T::zero(); n];
        let mut au = vec![T::zero(); n];
        for (t_idx, (b, ab)) in space.basis.iter().zip(&space.applied).enumerate() {
            let w = y[t_idx * m + col];
            for i in 0..n {
                u[i] += w * b[i];
                au[i] += w * ab[i];
            }
        }
        // y columns are orthonormal and the basis is M-orthonormal, so u
        // is M-normalized already up to roundoff; renormalize anyway.
        let norm = op.mass.inner(&u, &u).sqrt();
        if norm > T::zero() {
            for i in 0..n {
                u[i] /= norm;
                au[i] /= norm;
            }
        }
        op.mass.matvec(&u, &mut mu_buf);
        let mut num = T::zero();
        let mut den = T::zero();
        for i in 0..n {
            let r = au[i] - lambda * mu_buf[i];
            num += r * r;
            den += mu_buf[i] * mu_buf[i];
        }
        let res = num.sqrt() / den.sqrt().max(T::min_positive_value());
        if res > opts.tolerance * (T::one() + lambda.abs()) {
            return Ok(None);
        }
        lambdas.push(lambda);
        vectors.push(u);
        residuals.push(res);
    }
    let groups = cluster_groups(&lambdas);
    Ok(Some(SpectrumResult {
        eigenvalues: lambdas,
        eigenvectors: if opts.compute_vectors { Some(vectors) } else { None },
        residuals,
        groups,
        iterations,
        method: MethodUsed::ShiftInvertLanczos,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{dense_lowest, Method};
    use crate::geometry::catalog_named;
    use crate::mesh::{mesh_sphere, mesh_torus, MeshGeometry};
    use crate::operator::{assemble, AssemblyOptions};

    fn sphere_operator(level: usize, alpha: f64, beta: f64) -> AssembledOperator<f64> {
        let entry = catalog_named::<f64>("round_sphere").unwrap();
        let mesh = mesh_sphere(&entry.immersion, level).unwrap();
        let mg = MeshGeometry::new(&mesh, &entry.immersion).unwrap();
        assemble(&mesh, &mg, alpha, beta, AssemblyOptions::default()).unwrap()
    }

    #[test]
    fn lanczos_matches_dense_to_high_accuracy() {
        let op = sphere_operator(3, 1.0, 0.5);
        let opts = SolveOptions::default();
        let dense = dense_lowest(&op, 6, &opts).unwrap();
        let lanczos = lanczos_lowest(&op, 6, &opts).unwrap();
        for i in 0..6 {
            assert!(
                (dense.eigenvalues[i] - lanczos.eigenvalues[i]).abs()
                    < 1e-8 * (1.0 + dense.eigenvalues[i].abs()),
                "index {i}: dense {} vs lanczos {}",
                dense.eigenvalues[i],
                lanczos.eigenvalues[i]
            );
        }
        for &r in &lanczos.residuals {
            assert!(r < 1e-8);
        }
    }

    #[test]
    fn two_different_shifts_agree() {
        let op = sphere_operator(3, 0.25, 0.0);
        let base = SolveOptions::<f64>::default();
        let a =
            lanczos_lowest(&op, 5, &SolveOptions { shift: Some(-3.0), ..base.clone() }).unwrap();
        let b = lanczos_lowest(&op, 5, &SolveOptions { shift: Some(-9.0), ..base }).unwrap();
        for i in 0..5 {
            assert!(
                (a.eigenvalues[i] - b.eigenvalues[i]).abs() < 1e-8 * (1.0 + a.eigenvalues[i].abs()),
                "index {i}"
            );
        }
    }

    #[test]
    fn seeds_do_not_change_eigenvalues() {
        let op = sphere_operator(2, 0.5, -0.5);
        let a = lanczos_lowest(&op, 4, &SolveOptions { seed: 1, ..Default::default() }).unwrap();
        let b = lanczos_lowest(&op, 4, &SolveOptions { seed: 99, ..Default::default() }).unwrap();
        for i in 0..4 {
            assert!((a.eigenvalues[i] - b.eigenvalues[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn flat_torus_spectrum_matches_lattice_formula() {
        let entry = catalog_named::<f64>("flat_torus").unwrap();
        let mesh = mesh_torus(&entry.immersion, 48, 48).unwrap();
        let mg = MeshGeometry::new(&mesh, &entry.immersion).unwrap();
        let op = assemble(&mesh, &mg, 0.0, 0.0, AssemblyOptions::default()).unwrap();
        let got = lanczos_lowest(&op, 6, &SolveOptions::default()).unwrap();
        let want = crate::geometry::flat_torus_spectrum([1.0f64, 0.0], [0.0, 1.0], 6);
        // 0, then 4 pi^2 with multiplicity 4, then 8 pi^2 ...
        assert!(got.eigenvalues[0].abs() < 1e-8);
        for i in 1..6 {
            let rel = (got.eigenvalues[i] - want[i]).abs() / want[i];
            assert!(rel < 0.01, "index {i}: got {} want {}", got.eigenvalues[i], want[i]);
        }
        // The first excited group must come back with its full count.
        assert_eq!(got.groups[1], (1, 4));
    }

    #[test]
    fn vertex_relabeling_leaves_eigenvalues_alone() {
        use crate::mesh::SurfaceMesh;
        let entry = catalog_named::<f64>("clifford_torus").unwrap();
        let mesh = mesh_torus(&entry.immersion, 12, 12).unwrap();
        let mg = MeshGeometry::new(&mesh, &entry.immersion).unwrap();
        let op = assemble(&mesh, &mg, 0.7, 0.1, AssemblyOptions::default()).unwrap();

        // Reverse the vertex numbering and rebuild from raw pieces.
        let n = mesh.n_vertices();
        let cd = mesh.coord_dim();
        let newi = |v: usize| n - 1 - v;
        let mut positions = vec![0.0f64; n * cd];
        let mut params = vec![[0.0f64; 2]; n];
        for v in 0..n {
            let p = mesh.position(v);
            let w = newi(v);
            positions[w * cd..(w + 1) * cd].copy_from_slice(p);
            params[w] = mesh.param(v);
        }
        let faces: Vec<[usize; 3]> = mesh
            .faces()
            .iter()
            .map(|f| [newi(f[0]), newi(f[1]), newi(f[2])])
            .collect();
        let permuted = SurfaceMesh::from_raw(*mesh.ambient(), params, positions, faces);
        let pg = MeshGeometry::new(&permuted, &entry.immersion).unwrap();
        let op2 = assemble(&permuted, &pg, 0.7, 0.1, AssemblyOptions::default()).unwrap();

        let opts = SolveOptions { method: Method::ShiftInvertLanczos, ..Default::default() };
        let a = lanczos_lowest(&op, 4, &opts).unwrap();
        let b = lanczos_lowest(&op2, 4, &opts).unwrap();
        for i in 0..4 {
            assert!(
                (a.eigenvalues[i] - b.eigenvalues[i]).abs() < 1e-8 * (1.0 + a.eigenvalues[i].abs())
            );
        }
    }
}
