//! Programmatic triangulations of the builtin geometries.
//!
//! All generators produce straight-sided panels; the disk is an inscribed
//! polygon. Every panel is labeled Dirichlet; use [`TriMesh::relabeled`] for
//! other assignments.

use super::{BoundaryLabel, Point, TriMesh};
use crate::{Error, Result};
use std::collections::HashMap;
use std::f64::consts::PI;

fn all_dirichlet(_: Point) -> BoundaryLabel {
    BoundaryLabel::Dirichlet
}

/// `[0,1]^2` split into `n x n` cells of two triangles each.
pub fn unit_square(n: usize) -> Result<TriMesh> {
    let n = n.max(1);
    grid_region(&RegionCells::new([0.0, 0.0], 1.0 / n as f64, n, n, |_, _| true))
}

/// `[0,1]^2` minus the centred square hole of side `1/3`, on a `3m x 3m` grid.
pub fn square_with_hole(m: usize) -> Result<TriMesh> {
    let m = m.max(1);
    let n = 3 * m;
    grid_region(&RegionCells::new([0.0, 0.0], 1.0 / n as f64, n, n, move |i, j| {
        !((m..2 * m).contains(&i) && (m..2 * m).contains(&j))
    }))
}

/// Union of axis-aligned grid cells selected by a predicate on the cell
/// indices.
pub struct RegionCells<F: Fn(usize, usize) -> bool> {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub keep: F,
}

impl<F: Fn(usize, usize) -> bool> RegionCells<F> {
    pub fn new(origin: Point, h: f64, nx: usize, ny: usize, keep: F) -> Self {
        RegionCells {
            origin,
            h,
            nx,
            ny,
            keep,
        }
    }
}

/// Triangulates a union of grid cells, alternating the diagonal direction in
/// a checkerboard pattern.
pub fn grid_region<F: Fn(usize, usize) -> bool>(cells: &RegionCells<F>) -> Result<TriMesh> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vid = |i: usize, j: usize, vertices: &mut Vec<Point>| -> usize {
        *index.entry((i, j)).or_insert_with(|| {
            vertices.push([
                cells.origin[0] + i as f64 * cells.h,
                cells.origin[1] + j as f64 * cells.h,
            ]);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::new();
    for j in 0..cells.ny {
        for i in 0..cells.nx {
            if !(cells.keep)(i, j) {
                continue;
            }
            let a = vid(i, j, &mut vertices);
            let b = vid(i + 1, j, &mut vertices);
            let c = vid(i + 1, j + 1, &mut vertices);
            let d = vid(i, j + 1, &mut vertices);
            if (i + j) % 2 == 0 {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
    }
    if triangles.is_empty() {
        return Err(Error::InvalidArgument("grid region selects no cells".into()));
    }
    TriMesh::with_labeler(vertices, triangles, all_dirichlet)
}

/// Regular polygon with `sides` vertices on the circle of radius
/// `circumradius` (first vertex at angle `pi/2`), each side split into `m`
/// panels. Built from a fan of `sides` triangles around the centre, each
/// subdivided into `m^2` similar triangles.
pub fn regular_polygon(sides: usize, circumradius: f64, m: usize) -> Result<TriMesh> {
    if sides < 3 {
        return Err(Error::InvalidArgument("polygon needs at least 3 sides".into()));
    }
    let m = m.max(1);
    let corner = |k: usize| {
        let th = PI / 2.0 + 2.0 * PI * (k % sides) as f64 / sides as f64;
        [circumradius * th.cos(), circumradius * th.sin()]
    };
    // Lattice point (a, b) of fan sector k: centre + a/m (c_k) + b/m (c_{k+1}).
    // Points on sector boundaries are shared through a canonical key.
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut id = |k: usize, a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = if a + b == 0 {
            (0, 0, 0)
        } else if b == 0 {
            (k % sides, a, 0)
        } else if a == 0 {
            ((k + 1) % sides, b, 0)
        } else {
            (k, a, b)
        };
        *index.entry(key).or_insert_with(|| {
            let c0 = corner(k);
            let c1 = corner(k + 1);
            let (fa, fb) = (a as f64 / m as f64, b as f64 / m as f64);
            vertices.push([fa * c0[0] + fb * c1[0], fa * c0[1] + fb * c1[1]]);
            vertices.len() - 1
        })
    };
    let mut triangles = Vec::new();
    for k in 0..sides {
        for a in 0..m {
            for b in 0..(m - a) {
                let p = id(k, a, b, &mut vertices);
                let q = id(k, a + 1, b, &mut vertices);
                let r = id(k, a, b + 1, &mut vertices);
                triangles.push([p, q, r]);
                if a + b + 2 <= m {
                    let s = id(k, a + 1, b + 1, &mut vertices);
                    triangles.push([q, s, r]);
                }
            }
        }
    }
    TriMesh::with_labeler(vertices, triangles, all_dirichlet)
}

/// Disk of given radius whose boundary is the regular `n`-gon with a vertex
/// at angle 0. Interior points sit on concentric rings joined by a zipper
/// triangulation.
pub fn disk(n: usize, radius: f64) -> Result<TriMesh> {
    if n < 3 {
        return Err(Error::InvalidArgument("disk needs at least 3 boundary panels".into()));
    }
    let rings = ((n as f64) / (2.0 * PI)).round().max(1.0) as usize;
    let mut vertices = vec![[0.0, 0.0]];
    let mut ring_ids: Vec<Vec<usize>> = vec![vec![0]];
    let mut ring_angles: Vec<Vec<f64>> = vec![vec![0.0]];
    for k in 1..=rings {
        let count = if k == rings {
            n
        } else {
            ((n as f64 * k as f64 / rings as f64).round() as usize).max(3)
        };
        let r = radius * k as f64 / rings as f64;
        // stagger inner rings slightly to avoid radially aligned slivers
        let offset = if k == rings { 0.0 } else { 0.5 * (k % 2) as f64 };
        let mut ids = Vec::with_capacity(count);
        let mut angles = Vec::with_capacity(count);
        for i in 0..count {
            let th = 2.0 * PI * (i as f64 + offset) / count as f64;
            ids.push(vertices.len());
            angles.push(th);
            vertices.push([r * th.cos(), r * th.sin()]);
        }
        ring_ids.push(ids);
        ring_angles.push(angles);
    }
    let mut triangles = Vec::new();
    // centre fan
    let first = &ring_ids[1];
    for i in 0..first.len() {
        triangles.push([0, first[i], first[(i + 1) % first.len()]]);
    }
    for k in 1..rings {
        zipper(
            &ring_ids[k],
            &ring_angles[k],
            &ring_ids[k + 1],
            &ring_angles[k + 1],
            &mut triangles,
        );
    }
    TriMesh::with_labeler(vertices, triangles, all_dirichlet)
}

fn zipper(
    inner: &[usize],
    inner_th: &[f64],
    outer: &[usize],
    outer_th: &[f64],
    triangles: &mut Vec<[usize; 3]>,
) {
    let p = inner.len();
    let q = outer.len();
    let angle = |th: &[f64], i: usize| th[i % th.len()] + 2.0 * PI * (i / th.len()) as f64;
    // start the outer walk at the outer point nearest in angle to inner[0]
    let base = inner_th[0];
    let mut j0 = 0;
    let mut best = f64::INFINITY;
    for (j, th) in outer_th.iter().enumerate() {
        let d = (th - base).rem_euclid(2.0 * PI);
        let d = d.min(2.0 * PI - d);
        if d < best {
            best = d;
            j0 = j;
        }
    }
    let (mut i, mut j) = (0, 0);
    while i < p || j < q {
        let next_inner = angle(inner_th, i + 1);
        let next_outer = angle(outer_th, j0 + j + 1) - angle(outer_th, j0) + base;
        let a = inner[i % p];
        let b = outer[(j0 + j) % q];
        if j < q && (i >= p || next_outer <= next_inner) {
            triangles.push([a, b, outer[(j0 + j + 1) % q]]);
            j += 1;
        } else {
            triangles.push([a, b, inner[(i + 1) % p]]);
            i += 1;
        }
    }
}

/// U-shaped trapping block: `[-0.5, 0.5]^2` minus the notch
/// `[-0.2, 0.2] x [-0.1, 0.5]`, on a square grid whose spacing divides 0.1.
pub fn trapping(h: f64) -> Result<TriMesh> {
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("mesh size must be positive, got {h}")));
    }
    let per_tenth = ((0.1 / h).round() as usize).max(1);
    let n = 10 * per_tenth;
    let cell = 1.0 / n as f64;
    let notch_x = (3 * per_tenth)..(7 * per_tenth);
    let notch_y = (4 * per_tenth)..n;
    grid_region(&RegionCells::new([-0.5, -0.5], cell, n, n, move |i, j| {
        !(notch_x.contains(&i) && notch_y.contains(&j))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshio::signed_area;

    fn interior_angle_sums(mesh: &TriMesh) -> Vec<(usize, f64)> {
        let mut sums = vec![0.0; mesh.num_vertices()];
        for tri in mesh.triangles() {
            for k in 0..3 {
                let o = mesh.vertices()[tri[k]];
                let a = mesh.vertices()[tri[(k + 1) % 3]];
                let b = mesh.vertices()[tri[(k + 2) % 3]];
                let u = [a[0] - o[0], a[1] - o[1]];
                let v = [b[0] - o[0], b[1] - o[1]];
                let ang = (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
                sums[tri[k]] += ang;
            }
        }
        let mut on_boundary = vec![false; mesh.num_vertices()];
        for p in mesh.panels() {
            on_boundary[p.vertices[0]] = true;
            on_boundary[p.vertices[1]] = true;
        }
        sums.into_iter()
            .enumerate()
            .filter(|(v, _)| !on_boundary[*v])
            .collect()
    }

    fn check_conforming(mesh: &TriMesh) {
        for (v, s) in interior_angle_sums(mesh) {
            assert!((s - 2.0 * PI).abs() < 1e-10, "vertex {v}: angle sum {s}");
        }
        for t in mesh.triangles() {
            let [a, b, c] = t.map(|i| mesh.vertices()[i]);
            assert!(signed_area(a, b, c) > 0.0);
        }
    }

    #[test]
    fn generators_are_conforming() {
        check_conforming(&unit_square(4).unwrap());
        check_conforming(&square_with_hole(2).unwrap());
        check_conforming(&regular_polygon(5, 0.55, 6).unwrap());
        check_conforming(&disk(64, 1.0).unwrap());
        check_conforming(&trapping(0.05).unwrap());
    }

    #[test]
    fn square_has_unit_area() {
        let m = unit_square(7).unwrap();
        assert!((m.area() - 1.0).abs() < 1e-12);
        assert_eq!(unit_square(1).unwrap().num_triangles(), 2);
    }

    #[test]
    fn pentagon_perimeter_and_corners() {
        let r = 0.55;
        let m = regular_polygon(5, r, 1).unwrap();
        assert_eq!(m.loops().len(), 1);
        assert_eq!(m.panels().len(), 5);
        let side = 2.0 * r * (PI / 5.0).sin();
        assert!((m.boundary().perimeter() - 5.0 * side).abs() < 1e-12);
        let fine = regular_polygon(5, r, 9).unwrap();
        assert!((fine.boundary().perimeter() - 5.0 * side).abs() < 1e-12);
        for k in 0..5 {
            let th = PI / 2.0 + 2.0 * PI * k as f64 / 5.0;
            let c = [r * th.cos(), r * th.sin()];
            assert!(fine
                .vertices()
                .iter()
                .any(|v| (v[0] - c[0]).hypot(v[1] - c[1]) < 1e-14));
        }
    }

    #[test]
    fn disk_perimeter_matches_inscribed_polygon() {
        for &n in &[16usize, 64, 128] {
            let m = disk(n, 1.0).unwrap();
            assert_eq!(m.panels().len(), n);
            let exact = 2.0 * n as f64 * (PI / n as f64).sin();
            assert!((m.perimeter() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn hole_loops_are_oriented_outward() {
        let m = square_with_hole(2).unwrap();
        let b = m.boundary();
        assert_eq!(b.loops.len(), 2);
        let areas: Vec<f64> = (0..2).map(|k| b.loop_signed_area(k)).collect();
        // one counter-clockwise outer loop (area 1), one clockwise hole (-1/9)
        let outer = areas.iter().cloned().fold(f64::MIN, f64::max);
        let inner = areas.iter().cloned().fold(f64::MAX, f64::min);
        assert!((outer - 1.0).abs() < 1e-12);
        assert!((inner + 1.0 / 9.0).abs() < 1e-12);
        for p in &b.panels {
            let mid = p.point_at(0.5);
            let out = [mid[0] + 1e-4 * p.normal[0], mid[1] + 1e-4 * p.normal[1]];
            let inn = [mid[0] - 1e-4 * p.normal[0], mid[1] - 1e-4 * p.normal[1]];
            assert!(!m.contains(out));
            assert!(m.contains(inn));
        }
    }
}
