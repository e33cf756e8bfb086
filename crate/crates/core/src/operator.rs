//! Finite-element assembly of the curvature Schrodinger operator on a mesh.
//!
//! Linear elements, cotangent stiffness, and a barycentric lumped mass matrix
//! by default. The potential `q = alpha |h|^2 + beta |H|^2` is sampled at
//! vertices and lumped, so its matrix is diagonal; a consistent mass matrix is
//! available behind an option for convergence cross-checks of the Laplacian.
//!
//! All metric input comes from per-face corner positions, so periodic charts
//! assemble correctly across their seams. Negative cotangent weights (obtuse
//! triangles) are legal; their prevalence is reported, not rejected.

use std::io::Write;

use crate::error::{Error, Result};
use crate::mesh::{MeshGeometry, SurfaceMesh};
use crate::scalar::Real;

/// Symmetric sparse matrix; only the upper triangle is stored (CSR, sorted
/// column indices within each row).
#[derive(Debug, Clone)]
pub struct SparseSymmetricMatrix<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseSymmetricMatrix<T> {
    /// Build from (i, j, v) triplets; entries are mirrored into the upper
    /// triangle and duplicates are summed in a deterministic order.
    pub fn from_triplets(n: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut ups: Vec<(usize, usize, T)> = triplets
            .into_iter()
            .map(|(i, j, v)| (i.min(j), i.max(j), v))
            .collect();
        ups.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::new();
        let mut values: Vec<T> = Vec::new();
        for (i, j, v) in ups {
            debug_assert!(j < n);
            // Triplets arrive sorted; merge only with the tail entry of the
            // currently open row (row_ptr[i + 1] is nonzero exactly then).
            if row_ptr[i + 1] > 0 && *col_idx.last().unwrap() == j {
                let last = values.len() - 1;
                values[last] += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] = col_idx.len();
            }
        }
        // Fill gaps for empty rows.
        for i in 1..=n {
            if row_ptr[i] < row_ptr[i - 1] {
                row_ptr[i] = row_ptr[i - 1];
            }
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn nnz_upper(&self) -> usize {
        self.values.len()
    }

    /// Entries of the stored (upper) triangle.
    pub fn entries_upper(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (i, self.col_idx[p], self.values[p]))
        })
    }

    /// y = A x with the full symmetric matrix.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for yi in y.iter_mut() {
            *yi = T::zero();
        }
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[p];
                let v = self.values[p];
                y[i] += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
        }
    }

    pub fn diag(&self) -> Vec<T> {
        let mut d = vec![T::zero(); self.n];
        for (i, j, v) in self.entries_upper() {
            if i == j {
                d[i] = v;
            }
        }
        d
    }

    pub fn row_sums(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.n];
        for (i, j, v) in self.entries_upper() {
            s[i] += v;
            if j != i {
                s[j] += v;
            }
        }
        s
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.n * self.n];
        for (i, j, v) in self.entries_upper() {
            a[i * self.n + j] = v;
            a[j * self.n + i] = v;
        }
        a
    }

    /// MatrixMarket coordinate format, symmetric, 1-based, lower triangle.
    pub fn write_matrix_market(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(out, "{} {} {}", self.n, self.n, self.nnz_upper())?;
        for (i, j, v) in self.entries_upper() {
            // Stored upper entry (i, j), i <= j, emitted as lower (j+1, i+1).
            writeln!(out, "{} {} {}", j + 1, i + 1, v.as_f64())?;
        }
        Ok(())
    }
}

/// Mass matrix: diagonal lumped by default, consistent P1 on request.
#[derive(Debug, Clone)]
pub enum MassMatrix<T> {
    Lumped(Vec<T>),
    Consistent(SparseSymmetricMatrix<T>),
}

impl<T: Real> MassMatrix<T> {
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        match self {
            MassMatrix::Lumped(d) => {
                for i in 0..d.len() {
                    y[i] = d[i] * x[i];
                }
            }
            MassMatrix::Consistent(m) => m.matvec(x, y),
        }
    }

    pub fn inner(&self, x: &[T], y: &[T]) -> T {
        match self {
            MassMatrix::Lumped(d) => (0..d.len()).map(|i| d[i] * x[i] * y[i]).sum(),
            MassMatrix::Consistent(m) => {
                let mut tmp = vec![T::zero(); y.len()];
                m.matvec(y, &mut tmp);
                x.iter().zip(&tmp).map(|(a, b)| *a * *b).sum()
            }
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            MassMatrix::Lumped(d) => d.len(),
            MassMatrix::Consistent(m) => m.dimension(),
        }
    }

    pub fn is_lumped(&self) -> bool {
        matches!(self, MassMatrix::Lumped(_))
    }

    pub fn lumped_diag(&self) -> Option<&[T]> {
        match self {
            MassMatrix::Lumped(d) => Some(d),
            MassMatrix::Consistent(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AssemblyOptions {
    /// Use the consistent P1 mass matrix instead of lumping.
    pub consistent_mass: bool,
}

/// The discrete eigenproblem `(S - Q) u = lambda M u`.
pub struct AssembledOperator<T: Real> {
    pub stiffness: SparseSymmetricMatrix<T>,
    /// Diagonal of the potential matrix: `q(v) * lumped_area(v)`.
    pub potential_diag: Vec<T>,
    pub mass: MassMatrix<T>,
    pub alpha: T,
    pub beta: T,
    /// Ambient curvature, carried for reporting.
    pub c: T,
    /// Fraction of stiffness off-diagonal entries with the wrong sign
    /// (negative summed cotangent weight on the edge).
    pub obtuse_edge_fraction: f64,
    /// Set when more than 30% of edges carry negative weights.
    pub obtuse_flag: bool,
}

/// Cotangent weight at the corner opposite edge `a` in a triangle with
/// squared edge lengths `a2`, `b2`, `c2` and area `area`.
fn cot_weight<T: Real>(a2: T, b2: T, c2: T, area: T) -> T {
    (b2 + c2 - a2) / (T::of(4.0) * area)
}

pub fn assemble<T: Real>(
    mesh: &SurfaceMesh<T>,
    mg: &MeshGeometry<T>,
    alpha: T,
    beta: T,
    options: AssemblyOptions,
) -> Result<AssembledOperator<T>> {
    let n = mesh.n_vertices();
    let half = T::of(0.5);
    let mut s_triplets: Vec<(usize, usize, T)> = Vec::with_capacity(mesh.n_faces() * 6);
    let mut m_triplets: Vec<(usize, usize, T)> = Vec::new();
    for (fi, f) in mesh.faces().iter().enumerate() {
        let l2 = [
            mesh.edge_len2(fi, 0),
            mesh.edge_len2(fi, 1),
            mesh.edge_len2(fi, 2),
        ];
        let area = mg.face_areas[fi];
        for k in 0..3 {
            let a = f[(k + 1) % 3];
            let b = f[(k + 2) % 3];
            let w = half * cot_weight(l2[k], l2[(k + 1) % 3], l2[(k + 2) % 3], area);
            s_triplets.push((a, a, w));
            s_triplets.push((b, b, w));
            s_triplets.push((a, b, -w));
        }
        if options.consistent_mass {
            let twelfth = area / T::of(12.0);
            for k in 0..3 {
                m_triplets.push((f[k], f[k], twelfth + twelfth));
                m_triplets.push((f[k], f[(k + 1) % 3], twelfth));
            }
        }
    }
    let stiffness = SparseSymmetricMatrix::from_triplets(n, s_triplets);
    let mut negative = 0usize;
    let mut offdiag = 0usize;
    for (i, j, v) in stiffness.entries_upper() {
        if i != j {
            offdiag += 1;
            if v > T::zero() {
                negative += 1;
            }
        }
    }
    let obtuse_edge_fraction = if offdiag > 0 {
        negative as f64 / offdiag as f64
    } else {
        0.0
    };
    let mass = if options.consistent_mass {
        MassMatrix::Consistent(SparseSymmetricMatrix::from_triplets(n, m_triplets))
    } else {
        MassMatrix::Lumped(mg.lumped_areas.clone())
    };
    let potential_diag: Vec<T> = (0..n)
        .map(|v| (alpha * mg.normh2[v] + beta * mg.normh_mean2[v]) * mg.lumped_areas[v])
        .collect();
    Ok(AssembledOperator {
        stiffness,
        potential_diag,
        mass,
        alpha,
        beta,
        c: mesh.ambient().curvature(),
        obtuse_edge_fraction,
        obtuse_flag: obtuse_edge_fraction > 0.30,
    })
}

impl<T: Real> AssembledOperator<T> {
    pub fn dimension(&self) -> usize {
        self.stiffness.dimension()
    }

    /// y = (S - Q) x.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        self.stiffness.matvec(x, y);
        for i in 0..x.len() {
            y[i] -= self.potential_diag[i] * x[i];
        }
    }

    /// The sparse matrix `S - Q - sigma M`, for factorization.
    pub fn shifted_matrix(&self, sigma: T) -> SparseSymmetricMatrix<T> {
        let n = self.dimension();
        let mut triplets: Vec<(usize, usize, T)> =
            self.stiffness.entries_upper().collect();
        for i in 0..n {
            triplets.push((i, i, -self.potential_diag[i]));
        }
        match &self.mass {
            MassMatrix::Lumped(d) => {
                for i in 0..n {
                    triplets.push((i, i, -sigma * d[i]));
                }
            }
            MassMatrix::Consistent(m) => {
                for (i, j, v) in m.entries_upper() {
                    triplets.push((i, j, -sigma * v));
                }
            }
        }
        SparseSymmetricMatrix::from_triplets(n, triplets)
    }

    /// Largest vertex value of the potential `q`; `lambda_1 >= -max q`, which
    /// anchors the shift-invert pole.
    pub fn potential_sup(&self) -> T {
        let mut sup = T::neg_infinity();
        match self.mass.lumped_diag() {
            Some(d) => {
                for i in 0..d.len() {
                    sup = sup.max(self.potential_diag[i] / d[i]);
                }
            }
            None => {
                // Consistent mass still lumps the potential; recover q from
                // the assembled diagonal via the mass row sums (partition of
                // unity makes them the lumped areas).
                let sums = match &self.mass {
                    MassMatrix::Consistent(m) => m.row_sums(),
                    MassMatrix::Lumped(d) => d.clone(),
                };
                for i in 0..sums.len() {
                    sup = sup.max(self.potential_diag[i] / sums[i]);
                }
            }
        }
        sup
    }

    /// Rayleigh quotient of the operator pencil at `u`.
    pub fn rayleigh(&self, u: &[T]) -> Result<T> {
        let mut su = vec![T::zero(); u.len()];
        self.apply(u, &mut su);
        let num: T = u.iter().zip(&su).map(|(a, b)| *a * *b).sum();
        let den = self.mass.inner(u, u);
        if !(den > T::zero()) || !den.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(num / den)
    }
}
