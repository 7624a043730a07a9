//! Triangulations of the solid, their boundary panels and mesh file I/O.

mod generate;
mod msh;

pub use generate::{
    disk, grid_region, regular_polygon, square_with_hole, trapping, unit_square,
    RegionCells,
};
pub use msh::{load_mesh, parse_msh, save_mesh, write_msh};

use crate::{Error, Result};
use std::collections::HashMap;
use std::ops::Range;

pub type Point = [f64; 2];

/// Boundary condition label of a panel for the electric potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryLabel {
    Dirichlet,
    Neumann,
}

impl BoundaryLabel {
    /// Physical tag used in mesh files.
    pub fn tag(self) -> i64 {
        match self {
            BoundaryLabel::Dirichlet => 1,
            BoundaryLabel::Neumann => 2,
        }
    }

    pub fn from_tag(tag: i64) -> Option<Self> {
        match tag {
            1 => Some(BoundaryLabel::Dirichlet),
            2 => Some(BoundaryLabel::Neumann),
            _ => None,
        }
    }
}

/// A boundary edge of the triangulation, oriented with the solid on its left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPanel {
    pub vertices: [usize; 2],
    pub label: BoundaryLabel,
    /// The unique triangle containing this edge.
    pub triangle: usize,
}

/// Conforming triangulation of the solid with labeled, outward-oriented
/// boundary panels.
///
/// Triangles are counter-clockwise, boundary panels are grouped into closed
/// loops (outer boundaries counter-clockwise, holes clockwise) and every panel
/// normal points out of the solid.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    panels: Vec<BoundaryPanel>,
    normals: Vec<Point>,
    loops: Vec<Range<usize>>,
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TriMesh {
    /// Builds and validates a mesh from raw parts.
    ///
    /// `labeled_edges` must list every boundary edge exactly once (in either
    /// orientation). Clockwise triangles are flipped.
    pub fn new(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        labeled_edges: &[([usize; 2], BoundaryLabel)],
    ) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::Topology(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Topology(format!("triangle {t} repeats a vertex")));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area == 0.0 || !area.is_finite() {
                return Err(Error::Topology(format!("triangle {t} is degenerate")));
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }

        // Directed edges (a -> b) with the owning triangle on the left.
        let mut edge_owners: HashMap<(usize, usize), Vec<(usize, [usize; 2])>> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                edge_owners.entry(edge_key(a, b)).or_default().push((t, [a, b]));
            }
        }
        let mut boundary: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for (key, owners) in &edge_owners {
            match owners.len() {
                1 => {
                    boundary.insert(*key, owners[0]);
                }
                2 => {
                    if owners[0].1 == owners[1].1 {
                        return Err(Error::Topology(format!(
                            "edge {key:?} is traversed in the same direction by two triangles"
                        )));
                    }
                }
                n => {
                    return Err(Error::Topology(format!(
                        "non-manifold edge {key:?} shared by {n} triangles"
                    )))
                }
            }
        }

        let mut labels: HashMap<(usize, usize), BoundaryLabel> = HashMap::new();
        for (edge, label) in labeled_edges {
            let key = edge_key(edge[0], edge[1]);
            match edge_owners.get(&key).map(Vec::len) {
                None => {
                    return Err(Error::Topology(format!(
                        "labeled edge {edge:?} is not an edge of the triangulation"
                    )))
                }
                Some(1) => {}
                Some(n) => {
                    return Err(Error::Topology(format!(
                        "labeled boundary edge {edge:?} is shared by {n} triangles"
                    )))
                }
            }
            if labels.insert(key, *label).is_some() {
                return Err(Error::Label(format!("edge {edge:?} labeled twice")));
            }
        }
        if let Some(key) = boundary.keys().find(|k| !labels.contains_key(k)) {
            return Err(Error::Label(format!("boundary edge {key:?} has no label")));
        }

        // Chain the directed boundary edges into closed loops.
        let mut next: HashMap<usize, ((usize, usize), usize)> = HashMap::new();
        for (key, (t, [a, b])) in &boundary {
            if next.insert(*a, (*key, *t)).is_some() {
                return Err(Error::Topology(format!(
                    "boundary pinches at vertex {a} (two outgoing boundary edges)"
                )));
            }
            let _ = b;
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut panels = Vec::with_capacity(boundary.len());
        let mut loops = Vec::new();
        for &start in &starts {
            if visited.contains_key(&start) {
                continue;
            }
            let first = panels.len();
            let mut v = start;
            loop {
                visited.insert(v, true);
                let (key, t) = next[&v];
                let [_, b] = boundary[&key].1;
                panels.push(BoundaryPanel {
                    vertices: [v, b],
                    label: labels[&key],
                    triangle: t,
                });
                v = b;
                if v == start {
                    break;
                }
                if !next.contains_key(&v) {
                    return Err(Error::Topology(format!("open boundary loop at vertex {v}")));
                }
                if visited.contains_key(&v) {
                    return Err(Error::Topology(format!(
                        "boundary loop revisits vertex {v}"
                    )));
                }
            }
            loops.push(first..panels.len());
        }

        let normals = panels
            .iter()
            .map(|p| {
                let a = vertices[p.vertices[0]];
                let b = vertices[p.vertices[1]];
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = dx.hypot(dy);
                [dy / len, -dx / len]
            })
            .collect();

        Ok(TriMesh {
            vertices,
            triangles,
            panels,
            normals,
            loops,
        })
    }

    /// Builds a mesh whose boundary labels come from a function of the panel
    /// midpoint.
    pub fn with_labeler(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        labeler: impl Fn(Point) -> BoundaryLabel,
    ) -> Result<Self> {
        let unlabeled = Self::boundary_edges_of(&vertices, &triangles)?;
        let labeled: Vec<_> = unlabeled
            .into_iter()
            .map(|[a, b]| {
                let pa = vertices[a];
                let pb = vertices[b];
                let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                ([a, b], labeler(mid))
            })
            .collect();
        Self::new(vertices, triangles, &labeled)
    }

    fn boundary_edges_of(vertices: &[Point], triangles: &[[usize; 3]]) -> Result<Vec<[usize; 2]>> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in triangles {
            for k in 0..3 {
                if tri[k] >= vertices.len() {
                    return Err(Error::Topology("triangle references a missing vertex".into()));
                }
                *count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut edges: Vec<[usize; 2]> = count
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|((a, b), _)| [a, b])
            .collect();
        edges.sort_unstable();
        Ok(edges)
    }

    /// Returns a copy with every panel relabeled by `labeler(midpoint)`.
    pub fn relabeled(&self, labeler: impl Fn(Point) -> BoundaryLabel) -> TriMesh {
        let mut out = self.clone();
        for p in &mut out.panels {
            let a = self.vertices[p.vertices[0]];
            let b = self.vertices[p.vertices[1]];
            p.label = labeler([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
        }
        out
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn panels(&self) -> &[BoundaryPanel] {
        &self.panels
    }

    pub fn panel_normals(&self) -> &[Point] {
        &self.normals
    }

    /// Panel index ranges of the closed boundary loops.
    pub fn loops(&self) -> &[Range<usize>] {
        &self.loops
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.panels
            .iter()
            .map(|p| {
                let a = self.vertices[p.vertices[0]];
                let b = self.vertices[p.vertices[1]];
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum()
    }

    pub fn has_label(&self, label: BoundaryLabel) -> bool {
        self.panels.iter().any(|p| p.label == label)
    }

    /// Longest triangle edge.
    pub fn max_edge_length(&self) -> f64 {
        let mut h: f64 = 0.0;
        for tri in &self.triangles {
            for k in 0..3 {
                let a = self.vertices[tri[k]];
                let b = self.vertices[tri[(k + 1) % 3]];
                h = h.max((b[0] - a[0]).hypot(b[1] - a[1]));
            }
        }
        h
    }

    /// Whether `p` lies in the closed solid region (boundary included).
    pub fn contains(&self, p: Point) -> bool {
        self.locate(p).is_some()
    }

    /// Triangle containing `p` (with a small tolerance) and its barycentric
    /// coordinates.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        for (t, tri) in self.triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|v| self.vertices[v]);
            let area = signed_area(a, b, c);
            let l0 = signed_area(p, b, c) / area;
            let l1 = signed_area(a, p, c) / area;
            let l2 = 1.0 - l0 - l1;
            let tol = -1e-12;
            if l0 >= tol && l1 >= tol && l2 >= tol {
                return Some((t, [l0, l1, l2]));
            }
        }
        None
    }

    /// Signed distance-free test: whether `p` is strictly outside the solid by
    /// at least `margin` from every boundary panel.
    pub fn is_exterior_point(&self, p: Point, margin: f64) -> bool {
        if self.contains(p) {
            return false;
        }
        self.distance_to_boundary(p) > margin
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.panels
            .iter()
            .map(|panel| {
                segment_distance(
                    p,
                    self.vertices[panel.vertices[0]],
                    self.vertices[panel.vertices[1]],
                )
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Boundary curve with panel geometry, grouped in loops.
    pub fn boundary(&self) -> BoundaryCurve {
        boundary_of(self)
    }
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    let q = [a[0] + t * d[0], a[1] + t * d[1]];
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Straight boundary panel with its geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub start: Point,
    pub end: Point,
    pub length: f64,
    /// Unit tangent from `start` to `end`.
    pub tangent: Point,
    /// Unit normal pointing out of the solid.
    pub normal: Point,
    /// Mesh vertex indices of `start` and `end`.
    pub vertices: [usize; 2],
    pub label: BoundaryLabel,
}

impl Panel {
    pub fn point_at(&self, t: f64) -> Point {
        [
            self.start[0] + t * (self.end[0] - self.start[0]),
            self.start[1] + t * (self.end[1] - self.start[1]),
        ]
    }
}

/// Ordered boundary panels; consecutive panels inside a loop share an endpoint.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    pub panels: Vec<Panel>,
    pub loops: Vec<Range<usize>>,
}

impl BoundaryCurve {
    /// Builds a curve from explicit closed polygons (each listed in traversal
    /// order, outward normal on the right). Used for boundary-only problems.
    pub fn from_polygons(polygons: &[Vec<Point>]) -> BoundaryCurve {
        let mut panels = Vec::new();
        let mut loops = Vec::new();
        let mut offset = 0;
        for poly in polygons {
            let first = panels.len();
            let n = poly.len();
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                panels.push(make_panel(a, b, [offset + i, offset + (i + 1) % n], BoundaryLabel::Dirichlet));
            }
            offset += n;
            loops.push(first..panels.len());
        }
        BoundaryCurve { panels, loops }
    }

    /// Regular `n`-gon inscribed in the circle of given radius and centre,
    /// traversed counter-clockwise.
    pub fn circle(n: usize, radius: f64, centre: Point) -> BoundaryCurve {
        let poly: Vec<Point> = (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [centre[0] + radius * th.cos(), centre[1] + radius * th.sin()]
            })
            .collect();
        Self::from_polygons(&[poly])
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.panels.iter().map(|p| p.length).sum()
    }

    /// Number of distinct vertices used by the panels.
    pub fn num_vertices(&self) -> usize {
        self.panels
            .iter()
            .flat_map(|p| p.vertices)
            .max()
            .map_or(0, |m| m + 1)
    }

    pub fn max_panel_length(&self) -> f64 {
        self.panels.iter().map(|p| p.length).fold(0.0, f64::max)
    }

    pub fn distance(&self, p: Point) -> f64 {
        self.panels
            .iter()
            .map(|q| segment_distance(p, q.start, q.end))
            .fold(f64::INFINITY, f64::min)
    }

    /// Signed area enclosed by loop `k` (positive for counter-clockwise).
    pub fn loop_signed_area(&self, k: usize) -> f64 {
        self.panels[self.loops[k].clone()]
            .iter()
            .map(|p| 0.5 * (p.start[0] * p.end[1] - p.end[0] * p.start[1]))
            .sum()
    }
}

fn make_panel(a: Point, b: Point, vertices: [usize; 2], label: BoundaryLabel) -> Panel {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let length = dx.hypot(dy);
    let tangent = [dx / length, dy / length];
    Panel {
        start: a,
        end: b,
        length,
        tangent,
        normal: [tangent[1], -tangent[0]],
        vertices,
        label,
    }
}

/// Extracts the ordered boundary curve of a mesh.
pub fn boundary_of(mesh: &TriMesh) -> BoundaryCurve {
    let panels = mesh
        .panels
        .iter()
        .zip(&mesh.normals)
        .map(|(p, n)| {
            let a = mesh.vertices[p.vertices[0]];
            let b = mesh.vertices[p.vertices[1]];
            let mut panel = make_panel(a, b, p.vertices, p.label);
            panel.normal = *n;
            panel
        })
        .collect();
    BoundaryCurve {
        panels,
        loops: mesh.loops.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangle_square() -> TriMesh {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        // second triangle deliberately clockwise
        let t = vec![[0, 1, 2], [0, 3, 2]];
        TriMesh::with_labeler(v, t, |_| BoundaryLabel::Dirichlet).unwrap()
    }

    #[test]
    fn unit_square_two_triangles() {
        let m = two_triangle_square();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.panels().len(), 4);
        assert!((m.perimeter() - 4.0).abs() < 1e-15);
        for t in 0..2 {
            assert!(m.triangle_area(t) > 0.0);
        }
        let b = m.boundary();
        assert_eq!(b.loops.len(), 1);
        assert_eq!(b.loops[0], 0..4);
        for w in b.panels.windows(2) {
            assert_eq!(w[0].vertices[1], w[1].vertices[0]);
        }
        // outward normals
        for p in &b.panels {
            let mid = p.point_at(0.5);
            let probe = [mid[0] + 1e-3 * p.normal[0], mid[1] + 1e-3 * p.normal[1]];
            assert!(!m.contains(probe));
        }
    }

    #[test]
    fn interior_edge_labeled_as_boundary_is_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 2, 3]];
        let mut edges: Vec<_> = [[0, 1], [1, 2], [2, 3], [3, 0]]
            .iter()
            .map(|e| (*e, BoundaryLabel::Dirichlet))
            .collect();
        edges.push(([0, 2], BoundaryLabel::Dirichlet));
        assert!(matches!(TriMesh::new(v, t, &edges), Err(Error::Topology(_))));
    }

    #[test]
    fn non_manifold_edge_is_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [0.5, 0.5]];
        let t = vec![[0, 1, 2], [0, 3, 1], [0, 1, 4]];
        let err = TriMesh::with_labeler(v, t, |_| BoundaryLabel::Dirichlet).unwrap_err();
        assert!(matches!(err, Error::Topology(_)), "{err}");
    }

    #[test]
    fn unlabeled_boundary_edge_is_rejected() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t = vec![[0, 1, 2], [0, 2, 3]];
        let edges: Vec<_> = [[0, 1], [1, 2], [2, 3]]
            .iter()
            .map(|e| (*e, BoundaryLabel::Neumann))
            .collect();
        assert!(matches!(TriMesh::new(v, t, &edges), Err(Error::Label(_))));
    }

    #[test]
    fn panel_frames_are_orthonormal() {
        let m = disk(40, 1.0).unwrap();
        for p in &m.boundary().panels {
            let nt = p.normal[0] * p.tangent[0] + p.normal[1] * p.tangent[1];
            assert!(nt.abs() < 1e-14);
            assert!((p.normal[0].hypot(p.normal[1]) - 1.0).abs() < 1e-14);
        }
    }
}
