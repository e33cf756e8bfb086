//! Triangulations of the catalog domains, with quotient identifications and
//! discrete topology.
//!
//! Meshes store, besides the quotient connectivity, per-face corner positions
//! evaluated at unwrapped parameters: a periodic chart is generally not
//! periodic as a map into coordinates (the planar torus chart is the extreme
//! case), and edge lengths taken between quotient vertex positions would be
//! wrong across the seam. All metric quantities downstream read the corners.
//!
//! Curvature fields at vertices are sampled analytically from the immersion;
//! mesh-based curvature estimates are far noisier and nothing here needs them.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::ambient::AmbientSpace;
use crate::geometry::immersion::{Identification, Immersion};
use crate::scalar::Real;

/// Faces smaller than this fraction of the mean face area are rejected.
pub const DEGENERATE_FACE_FRACTION: f64 = 1e-12;

pub struct SurfaceMesh<T: Real> {
    ambient: AmbientSpace,
    identification: Identification,
    level: usize,
    coord_dim: usize,
    /// Canonical parameter point per vertex.
    params: Vec<[T; 2]>,
    /// Unit directions per vertex, for sphere-domain meshes.
    dirs: Option<Vec<[T; 3]>>,
    /// Quotient vertex positions, `coord_dim` per vertex.
    positions: Vec<T>,
    faces: Vec<[usize; 3]>,
    /// Per-face unwrapped corner positions, `3 * coord_dim` per face.
    corners: Vec<T>,
}

impl<T: Real> SurfaceMesh<T> {
    pub fn n_vertices(&self) -> usize {
        self.params.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn coord_dim(&self) -> usize {
        self.coord_dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn identification(&self) -> Identification {
        self.identification
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn param(&self, v: usize) -> [T; 2] {
        self.params[v]
    }

    pub fn direction(&self, v: usize) -> Option<[T; 3]> {
        self.dirs.as_ref().map(|d| d[v])
    }

    pub fn position(&self, v: usize) -> &[T] {
        &self.positions[v * self.coord_dim..(v + 1) * self.coord_dim]
    }

    /// Unwrapped position of corner `k` of face `f`.
    pub fn corner(&self, f: usize, k: usize) -> &[T] {
        let base = (f * 3 + k) * self.coord_dim;
        &self.corners[base..base + self.coord_dim]
    }

    /// Squared ambient length of the face edge opposite corner `k`.
    pub fn edge_len2(&self, f: usize, k: usize) -> T {
        let a = self.corner(f, (k + 1) % 3);
        let b = self.corner(f, (k + 2) % 3);
        let d: Vec<T> = a.iter().zip(b).map(|(x, y)| *x - *y).collect();
        self.ambient.norm2(&d).max(T::zero())
    }

    /// Wrap loose vertex data into a mesh; corners are copied from the
    /// quotient positions, so this is for fixtures without seams.
    pub fn from_raw(
        ambient: AmbientSpace,
        params: Vec<[T; 2]>,
        positions: Vec<T>,
        faces: Vec<[usize; 3]>,
    ) -> Self {
        let coord_dim = ambient.coord_dim();
        assert_eq!(positions.len(), params.len() * coord_dim);
        let mut corners = Vec::with_capacity(faces.len() * 3 * coord_dim);
        for f in &faces {
            for &v in f {
                corners.extend_from_slice(&positions[v * coord_dim..(v + 1) * coord_dim]);
            }
        }
        Self {
            ambient,
            identification: Identification::Open,
            level: 0,
            coord_dim,
            params,
            dirs: None,
            positions,
            faces,
            corners,
        }
    }

    /// Closedness and orientation consistency of the face structure.
    pub fn validate(&self) -> Result<()> {
        let mut undirected: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                *undirected.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                *directed.entry((a, b)).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &undirected {
            if count != 2 {
                return Err(Error::NotClosed { a, b, count });
            }
        }
        for (&(a, b), &count) in &directed {
            if count != 1 {
                return Err(Error::NotOriented { a, b, count });
            }
        }
        Ok(())
    }

    /// Euler characteristic and orientable genus.
    pub fn euler_genus(&self) -> Result<(i64, usize)> {
        let mut undirected: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                *undirected.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &undirected {
            if count != 2 {
                return Err(Error::NotClosed { a, b, count });
            }
        }
        let chi = self.n_vertices() as i64 - undirected.len() as i64 + self.n_faces() as i64;
        if chi > 2 || chi % 2 != 0 {
            return Err(Error::DomainMismatch {
                op: "euler_genus",
                detail: format!("chi = {chi} is not that of a closed orientable surface"),
            });
        }
        Ok((chi, ((2 - chi) / 2) as usize))
    }

    /// Total angle defect. For any closed triangulation this is `2 pi chi`
    /// up to roundoff, whatever the vertex positions; it exercises the edge
    /// length and angle path end to end.
    pub fn angle_defect_sum(&self) -> T {
        let two_pi = T::of(2.0) * T::PI();
        let mut angle_sum = vec![T::zero(); self.n_vertices()];
        for (fi, f) in self.faces.iter().enumerate() {
            let l2 = [
                self.edge_len2(fi, 0),
                self.edge_len2(fi, 1),
                self.edge_len2(fi, 2),
            ];
            for k in 0..3 {
                // Law of cosines at corner k: opposite edge k.
                let a2 = l2[k];
                let b2 = l2[(k + 1) % 3];
                let c2 = l2[(k + 2) % 3];
                let denom = (b2 * c2).sqrt();
                let cosv = if denom > T::zero() {
                    ((b2 + c2 - a2) / (T::of(2.0) * denom))
                        .max(-T::one())
                        .min(T::one())
                } else {
                    T::one()
                };
                angle_sum[f[k]] += cosv.acos();
            }
        }
        angle_sum.into_iter().map(|s| two_pi - s).sum()
    }

    /// Dump as OFF text (nOFF for coordinate dimension other than 3).
    pub fn write_off(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        if self.coord_dim == 3 {
            writeln!(out, "OFF")?;
        } else {
            writeln!(out, "nOFF {}", self.coord_dim)?;
        }
        writeln!(out, "{} {} 0", self.n_vertices(), self.n_faces())?;
        for v in 0..self.n_vertices() {
            let p = self.position(v);
            let line: Vec<String> = p.iter().map(|x| format!("{}", x.as_f64())).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        for f in &self.faces {
            writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Icosahedral sphere mesh: the icosahedron subdivided `level` times, with
/// vertices carried through the chart by their unit direction. Quasi-uniform,
/// no pole clustering, and `V = 10 * 4^level + 2`.
pub fn mesh_sphere<T: Real>(imm: &Immersion<T>, level: usize) -> Result<SurfaceMesh<T>> {
    if imm.domain().identification != Identification::SpherePolar {
        return Err(Error::DomainMismatch {
            op: "mesh_sphere",
            detail: "immersion domain is not a polar sphere chart".into(),
        });
    }
    let phi = (T::one() + T::of(5.0).sqrt()) / T::of(2.0);
    let raw: [[T; 3]; 12] = [
        [-T::one(), phi, T::zero()],
        [T::one(), phi, T::zero()],
        [-T::one(), -phi, T::zero()],
        [T::one(), -phi, T::zero()],
        [T::zero(), -T::one(), phi],
        [T::zero(), T::one(), phi],
        [T::zero(), -T::one(), -phi],
        [T::zero(), T::one(), -phi],
        [phi, T::zero(), -T::one()],
        [phi, T::zero(), T::one()],
        [-phi, T::zero(), -T::one()],
        [-phi, T::zero(), T::one()],
    ];
    let mut dirs: Vec<[T; 3]> = raw.iter().map(normalize3).collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mids = [0usize; 3];
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                mids[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = [
                        dirs[a][0] + dirs[b][0],
                        dirs[a][1] + dirs[b][1],
                        dirs[a][2] + dirs[b][2],
                    ];
                    dirs.push(normalize3(&m));
                    dirs.len() - 1
                });
            }
            let [a, b, c] = *f;
            let [ab, bc, ca] = mids;
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }

    let coord_dim = imm.ambient().coord_dim();
    let positions_per_vertex: Result<Vec<Vec<T>>> = dirs
        .par_iter()
        .map(|d| {
            imm.position_at_direction(d).ok_or(Error::DomainMismatch {
                op: "mesh_sphere",
                detail: "chart has no sphere-direction evaluation".into(),
            })
        })
        .collect();
    let positions_per_vertex = positions_per_vertex?;
    let mut positions = Vec::with_capacity(dirs.len() * coord_dim);
    for p in &positions_per_vertex {
        positions.extend_from_slice(p);
    }
    let params: Vec<[T; 2]> = dirs
        .iter()
        .map(|d| {
            let u = d[2].max(-T::one()).min(T::one()).acos();
            let mut v = d[1].atan2(d[0]);
            if v < T::zero() {
                v += T::of(2.0) * T::PI();
            }
            [u, v]
        })
        .collect();
    let mut corners = Vec::with_capacity(faces.len() * 3 * coord_dim);
    for f in &faces {
        for &v in f {
            corners.extend_from_slice(&positions_per_vertex[v]);
        }
    }
    Ok(SurfaceMesh {
        ambient: *imm.ambient(),
        identification: Identification::SpherePolar,
        level,
        coord_dim,
        params,
        dirs: Some(dirs),
        positions,
        faces,
        corners,
    })
}

fn normalize3<T: Real>(v: &[T; 3]) -> [T; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Periodic grid mesh of a torus chart: `nu x nv` cells, two triangles per
/// cell, opposite edges identified.
pub fn mesh_torus<T: Real>(imm: &Immersion<T>, nu: usize, nv: usize) -> Result<SurfaceMesh<T>> {
    mesh_torus_with_origin(imm, nu, nv, [T::zero(), T::zero()])
}

/// Same grid, with the parameter origin shifted; total areas and spectra must
/// not depend on the shift for homogeneous charts.
pub fn mesh_torus_with_origin<T: Real>(
    imm: &Immersion<T>,
    nu: usize,
    nv: usize,
    origin: [T; 2],
) -> Result<SurfaceMesh<T>> {
    if imm.domain().identification != Identification::TorusLattice {
        return Err(Error::DomainMismatch {
            op: "mesh_torus",
            detail: "immersion domain is not a torus quotient".into(),
        });
    }
    if nu < 3 || nv < 3 {
        return Err(Error::DomainMismatch {
            op: "mesh_torus",
            detail: format!("grid {nu}x{nv} is below the 3x3 minimum"),
        });
    }
    let coord_dim = imm.ambient().coord_dim();
    let du = imm.domain().u_max / T::of_usize(nu);
    let dv = imm.domain().v_max / T::of_usize(nv);
    let at = |i: usize, j: usize| -> (T, T) {
        (
            origin[0] + du * T::of_usize(i),
            origin[1] + dv * T::of_usize(j),
        )
    };
    let mut params = Vec::with_capacity(nu * nv);
    let mut positions = Vec::with_capacity(nu * nv * coord_dim);
    for i in 0..nu {
        for j in 0..nv {
            let (u, v) = at(i, j);
            params.push([u, v]);
            positions.extend_from_slice(&imm.position(u, v));
        }
    }
    let idx = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    let mut corners = Vec::with_capacity(2 * nu * nv * 3 * coord_dim);
    let push_corner = |corners: &mut Vec<T>, i: usize, j: usize| {
        let (u, v) = at(i, j);
        corners.extend_from_slice(&imm.position(u, v));
    };
    for i in 0..nu {
        for j in 0..nv {
            // Cell (i, j), split along the (i+1, j)-(i, j+1) diagonal.
            faces.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            push_corner(&mut corners, i, j);
            push_corner(&mut corners, i + 1, j);
            push_corner(&mut corners, i, j + 1);
            faces.push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            push_corner(&mut corners, i + 1, j);
            push_corner(&mut corners, i + 1, j + 1);
            push_corner(&mut corners, i, j + 1);
        }
    }
    Ok(SurfaceMesh {
        ambient: *imm.ambient(),
        identification: Identification::TorusLattice,
        level: nu,
        coord_dim,
        params,
        dirs: None,
        positions,
        faces,
        corners,
    })
}

/// Per-vertex curvature fields and discrete measures for a mesh.
pub struct MeshGeometry<T: Real> {
    pub normh2: Vec<T>,
    pub normh_mean2: Vec<T>,
    pub gauss: Vec<T>,
    pub face_areas: Vec<T>,
    /// Barycentric vertex areas (one third of each incident face).
    pub lumped_areas: Vec<T>,
    pub total_area: T,
    pub chi: i64,
    pub genus: usize,
}

impl<T: Real> MeshGeometry<T> {
    pub fn new(mesh: &SurfaceMesh<T>, imm: &Immersion<T>) -> Result<Self> {
        let (chi, genus) = mesh.euler_genus()?;
        let n = mesh.n_vertices();
        let sampled: Result<Vec<(T, T, T)>> = (0..n)
            .into_par_iter()
            .map(|v| {
                let pg = match mesh.direction(v) {
                    Some(d) => imm.point_geometry_at_direction(&d)?,
                    None => {
                        let [u, vv] = mesh.param(v);
                        imm.point_geometry(u, vv)?
                    }
                };
                Ok((pg.normh2, pg.normh_mean2, pg.gauss))
            })
            .collect();
        let sampled = sampled?;
        let mut normh2 = Vec::with_capacity(n);
        let mut normh_mean2 = Vec::with_capacity(n);
        let mut gauss = Vec::with_capacity(n);
        for (a, b, c) in sampled {
            normh2.push(a);
            normh_mean2.push(b);
            gauss.push(c);
        }

        let nf = mesh.n_faces();
        let mut face_areas = Vec::with_capacity(nf);
        for f in 0..nf {
            face_areas.push(stable_face_area(
                mesh.edge_len2(f, 0),
                mesh.edge_len2(f, 1),
                mesh.edge_len2(f, 2),
            ));
        }
        let total_area: T = face_areas.iter().copied().sum();
        let mean = total_area / T::of_usize(nf);
        for (f, &area) in face_areas.iter().enumerate() {
            if area < T::of(DEGENERATE_FACE_FRACTION) * mean {
                return Err(Error::DegenerateFace {
                    face: f,
                    area: area.as_f64(),
                    mean: mean.as_f64(),
                });
            }
        }
        let third = T::of(1.0 / 3.0);
        let mut lumped_areas = vec![T::zero(); n];
        for (f, face) in mesh.faces().iter().enumerate() {
            let share = face_areas[f] * third;
            for &v in face {
                lumped_areas[v] += share;
            }
        }
        Ok(Self {
            normh2,
            normh_mean2,
            gauss,
            face_areas,
            lumped_areas,
            total_area,
            chi,
            genus,
        })
    }

    /// Discrete total curvature from the sampled field.
    pub fn sampled_gauss_bonnet(&self) -> T {
        self.gauss
            .iter()
            .zip(&self.lumped_areas)
            .map(|(&k, &a)| k * a)
            .sum()
    }
}

/// Numerically stable Heron formula from squared edge lengths
/// (Kahan's ordering: operands sorted so no cancellation blows up).
fn stable_face_area<T: Real>(l2a: T, l2b: T, l2c: T) -> T {
    let mut l = [l2a.sqrt(), l2b.sqrt(), l2c.sqrt()];
    l.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let [a, b, c] = l;
    let q = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    T::of(0.25) * q.max(T::zero()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::catalog::CatalogSpec;
    use crate::geometry::quadrature::{integrate, QuadratureRule};
    use std::f64::consts::PI;

    fn entry(spec: CatalogSpec<f64>) -> crate::geometry::catalog::CatalogEntry<f64> {
        spec.build().unwrap()
    }

    #[test]
    fn icosahedron_counts_and_topology() {
        let s = entry(CatalogSpec::RoundSphere { radius: 1.0 });
        let m0 = mesh_sphere(&s.immersion, 0).unwrap();
        assert_eq!(m0.n_vertices(), 12);
        assert_eq!(m0.n_faces(), 20);
        m0.validate().unwrap();
        assert_eq!(m0.euler_genus().unwrap(), (2, 0));

        let m3 = mesh_sphere(&s.immersion, 3).unwrap();
        assert_eq!(m3.n_vertices(), 642);
        assert_eq!(m3.n_faces(), 20 * 64);
        m3.validate().unwrap();
        assert_eq!(m3.euler_genus().unwrap(), (2, 0));
    }

    #[test]
    fn icosphere_orientation_is_outward() {
        let s = entry(CatalogSpec::RoundSphere { radius: 1.0 });
        let m = mesh_sphere(&s.immersion, 1).unwrap();
        // Signed volume: positive iff faces wind counterclockwise seen from
        // outside a star-shaped region around the origin.
        let mut vol6 = 0.0;
        for f in m.faces() {
            let p: Vec<&[f64]> = f.iter().map(|&v| m.position(v)).collect();
            vol6 += p[0][0] * (p[1][1] * p[2][2] - p[1][2] * p[2][1])
                - p[0][1] * (p[1][0] * p[2][2] - p[1][2] * p[2][0])
                + p[0][2] * (p[1][0] * p[2][1] - p[1][1] * p[2][0]);
        }
        assert!(vol6 > 0.0, "signed volume {vol6}");
    }

    #[test]
    fn torus_grid_counts() {
        let t = entry(CatalogSpec::CliffordTorus);
        let m = mesh_torus(&t.immersion, 16, 16).unwrap();
        assert_eq!(m.n_vertices(), 256);
        assert_eq!(m.n_faces(), 512);
        m.validate().unwrap();
        assert_eq!(m.euler_genus().unwrap(), (0, 1));
        assert!(mesh_torus(&t.immersion, 2, 8).is_err());
    }

    #[test]
    fn flat_square_torus_tiles_exactly() {
        let t = entry(CatalogSpec::FlatTorus {
            a: [1.0, 0.0],
            b: [0.0, 1.0],
        });
        let m = mesh_torus(&t.immersion, 32, 32).unwrap();
        let g = MeshGeometry::new(&m, &t.immersion).unwrap();
        assert!((g.total_area - 1.0).abs() < 1e-12);
        assert_eq!((g.chi, g.genus), (0, 1));
    }

    #[test]
    fn equilateral_torus_area_converges() {
        let t = entry(CatalogSpec::EquilateralTorus);
        let m = mesh_torus(&t.immersion, 64, 64).unwrap();
        let g = MeshGeometry::new(&m, &t.immersion).unwrap();
        let want = 4.0 * PI * PI / 3.0f64.sqrt();
        assert!(
            (g.total_area - want).abs() / want < 5e-3,
            "area {} vs {want}",
            g.total_area
        );
    }

    #[test]
    fn bumpy_sphere_mesh_area_matches_quadrature() {
        let e = entry(CatalogSpec::BumpySphere {
            seed: 1,
            amplitude: 0.2,
        });
        let m = mesh_sphere(&e.immersion, 4).unwrap();
        let g = MeshGeometry::new(&m, &e.immersion).unwrap();
        assert_eq!(g.genus, 0);
        let exact = integrate(&e.immersion, QuadratureRule::default(), |_| 1.0)
            .unwrap()
            .value;
        assert!(
            (g.total_area - exact).abs() / exact < 1e-2,
            "mesh {} vs quadrature {exact}",
            g.total_area
        );
    }

    #[test]
    fn discrete_gauss_bonnet_is_combinatorially_exact() {
        let s = entry(CatalogSpec::BumpySphere {
            seed: 4,
            amplitude: 0.25,
        });
        let m = mesh_sphere(&s.immersion, 2).unwrap();
        let defect = m.angle_defect_sum();
        assert!((defect - 4.0 * PI).abs() < 1e-9, "defect {defect}");

        let t = entry(CatalogSpec::CliffordTorus);
        let m = mesh_torus(&t.immersion, 12, 12).unwrap();
        let defect = m.angle_defect_sum();
        assert!(defect.abs() < 1e-9, "defect {defect}");
    }

    #[test]
    fn sampled_curvature_gauss_bonnet_converges_second_order() {
        let s = entry(CatalogSpec::RoundSphere { radius: 1.0 });
        let err_at = |level: usize| {
            let m = mesh_sphere(&s.immersion, level).unwrap();
            let g = MeshGeometry::new(&m, &s.immersion).unwrap();
            (g.sampled_gauss_bonnet() - 4.0 * PI).abs()
        };
        let e2 = err_at(2);
        let e3 = err_at(3);
        let ratio = e2 / e3;
        assert!(
            (2.5..6.0).contains(&ratio),
            "errors {e2:.3e} -> {e3:.3e}, ratio {ratio:.2}"
        );
    }

    #[test]
    fn torus_area_ignores_chart_origin() {
        let t = entry(CatalogSpec::CliffordTorus);
        let a = MeshGeometry::new(
            &mesh_torus(&t.immersion, 32, 32).unwrap(),
            &t.immersion,
        )
        .unwrap()
        .total_area;
        let b = MeshGeometry::new(
            &mesh_torus_with_origin(&t.immersion, 32, 32, [0.31, 0.77]).unwrap(),
            &t.immersion,
        )
        .unwrap()
        .total_area;
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn degenerate_face_is_rejected() {
        // Octahedron with one apex crushed onto an equator edge midpoint:
        // the face through the three collinear points has zero area.
        let s = entry(CatalogSpec::RoundSphere { radius: 1.0 });
        let mut positions = vec![
            1.0, 0.0, 0.0, // 0
            -1.0, 0.0, 0.0, // 1
            0.0, 1.0, 0.0, // 2
            0.0, -1.0, 0.0, // 3
            0.0, 0.0, 1.0, // 4
            0.0, 0.0, -1.0, // 5
        ];
        positions[4 * 3..4 * 3 + 3].copy_from_slice(&[0.5, 0.5, 0.0]);
        let params = vec![[PI / 2.0, 0.0]; 6];
        let faces = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        let m = SurfaceMesh::from_raw(AmbientSpace::euclidean(3), params, positions, faces);
        m.validate().unwrap();
        match MeshGeometry::new(&m, &s.immersion) {
            Err(Error::DegenerateFace { .. }) => {}
            other => panic!("expected degenerate face, got {:?}", other.err()),
        }
    }

    // Two square-torus grids, one face removed from each and the boundary
    // triangles identified, with the second grid's orientation reversed: a
    // closed oriented surface with two handles.
    #[test]
    fn glued_tori_have_genus_two() {
        let t = entry(CatalogSpec::FlatTorus {
            a: [1.0, 0.0],
            b: [0.0, 1.0],
        });
        let m = mesh_torus(&t.immersion, 4, 4).unwrap();
        let nv = m.n_vertices();
        let mut params: Vec<[f64; 2]> = (0..nv).map(|v| m.param(v)).collect();
        let mut positions: Vec<f64> = Vec::new();
        for v in 0..nv {
            positions.extend_from_slice(m.position(v));
        }
        let [ga, gb, gc] = m.faces()[0];
        let mut faces: Vec<[usize; 3]> = m.faces()[1..].to_vec();
        // Second copy: fresh indices except the glued triangle, translated
        // positions, reversed winding.
        let mut map = vec![0usize; nv];
        let mut next = nv;
        for v in 0..nv {
            if v == ga || v == gb || v == gc {
                map[v] = v;
            } else {
                map[v] = next;
                next += 1;
                let p = m.position(v);
                positions.extend_from_slice(&[p[0] + 3.0, p[1], p[2]]);
                params.push(m.param(v));
            }
        }
        for f in &m.faces()[1..] {
            faces.push([map[f[0]], map[f[2]], map[f[1]]]);
        }
        let mesh = SurfaceMesh::from_raw(AmbientSpace::euclidean(3), params, positions, faces);
        mesh.validate().unwrap();
        assert_eq!(mesh.euler_genus().unwrap(), (-2, 2));
    }

    #[test]
    fn off_dump_round_trips_counts() {
        let s = entry(CatalogSpec::RoundSphere { radius: 1.0 });
        let m = mesh_sphere(&s.immersion, 0).unwrap();
        let dir = std::env::temp_dir().join("curvspec-mesh-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ico.off");
        m.write_off(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("12 20 0"));
        assert_eq!(text.lines().count(), 2 + 12 + 20);
    }
}
