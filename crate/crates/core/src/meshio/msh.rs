//! Gmsh MSH 2.2 ASCII subset.
//!
//! Supported: `$MeshFormat` (version 2.x, ASCII), `$Nodes`, `$Elements` with
//! element type 2 (3-node triangle) and type 1 (2-node boundary line), and
//! optionally type 15 (point, ignored). The first tag of a line element is its
//! physical tag: 1 = Dirichlet, 2 = Neumann. `$PhysicalNames` and unknown
//! sections are skipped. The z coordinate is ignored.

use super::{BoundaryLabel, Point, TriMesh};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_msh(&text)
}

pub fn save_mesh(mesh: &TriMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_msh(mesh))?;
    Ok(())
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next_nonempty(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Some(l);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<&'a str> {
        let line = self.line;
        self.next_nonempty().ok_or_else(|| Error::Parse {
            line,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(lines: &Lines, tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| lines.err(format!("missing {what}")))?
        .parse()
        .map_err(|_| lines.err(format!("malformed {what}")))
}

pub fn parse_msh(text: &str) -> Result<TriMesh> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    let mut seen_format = false;
    let mut node_index: HashMap<i64, usize> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut edges: Vec<([usize; 2], BoundaryLabel)> = Vec::new();
    let mut raw_triangles: Vec<[i64; 3]> = Vec::new();
    let mut raw_lines: Vec<([i64; 2], i64)> = Vec::new();

    while let Some(header) = lines.next_nonempty() {
        match header {
            "$MeshFormat" => {
                let l = lines.expect("format line")?;
                let mut it = l.split_whitespace();
                let version: f64 = parse_num(&lines, it.next(), "version")?;
                let file_type: i64 = parse_num(&lines, it.next(), "file type")?;
                if !(2.0..3.0).contains(&version) {
                    return Err(lines.err(format!("unsupported MSH version {version}")));
                }
                if file_type != 0 {
                    return Err(lines.err("binary MSH files are not supported"));
                }
                if lines.expect("$EndMeshFormat")? != "$EndMeshFormat" {
                    return Err(lines.err("expected $EndMeshFormat"));
                }
                seen_format = true;
            }
            "$Nodes" => {
                let tok = lines.expect("node count")?;
                let n: usize = parse_num(&lines, Some(tok), "node count")?;
                for _ in 0..n {
                    let l = lines.expect("node")?;
                    let mut it = l.split_whitespace();
                    let id: i64 = parse_num(&lines, it.next(), "node id")?;
                    let x: f64 = parse_num(&lines, it.next(), "x coordinate")?;
                    let y: f64 = parse_num(&lines, it.next(), "y coordinate")?;
                    if node_index.insert(id, vertices.len()).is_some() {
                        return Err(lines.err(format!("duplicate node id {id}")));
                    }
                    vertices.push([x, y]);
                }
                if lines.expect("$EndNodes")? != "$EndNodes" {
                    return Err(lines.err("expected $EndNodes"));
                }
            }
            "$Elements" => {
                let tok = lines.expect("element count")?;
                let n: usize = parse_num(&lines, Some(tok), "element count")?;
                for _ in 0..n {
                    let l = lines.expect("element")?;
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    if toks.len() < 3 {
                        return Err(lines.err("truncated element line"));
                    }
                    let etype: i64 = parse_num(&lines, Some(toks[1]), "element type")?;
                    let ntags: usize = parse_num(&lines, Some(toks[2]), "tag count")?;
                    let tags_end = 3 + ntags;
                    if toks.len() < tags_end {
                        return Err(lines.err("truncated element tags"));
                    }
                    let node_toks = &toks[tags_end..];
                    let mut nodes = Vec::with_capacity(node_toks.len());
                    for t in node_toks {
                        nodes.push(parse_num::<i64>(&lines, Some(t), "element node")?);
                    }
                    match etype {
                        1 => {
                            if nodes.len() != 2 {
                                return Err(lines.err("line element needs 2 nodes"));
                            }
                            if ntags == 0 {
                                return Err(Error::Label(format!(
                                    "line element at line {} has no physical tag",
                                    lines.line
                                )));
                            }
                            let tag: i64 = parse_num(&lines, Some(toks[3]), "physical tag")?;
                            raw_lines.push(([nodes[0], nodes[1]], tag));
                        }
                        2 => {
                            if nodes.len() != 3 {
                                return Err(lines.err("triangle element needs 3 nodes"));
                            }
                            raw_triangles.push([nodes[0], nodes[1], nodes[2]]);
                        }
                        15 => {}
                        other => {
                            return Err(lines.err(format!("unsupported element type {other}")))
                        }
                    }
                }
                if lines.expect("$EndElements")? != "$EndElements" {
                    return Err(lines.err("expected $EndElements"));
                }
            }
            other if other.starts_with('$') && !other.starts_with("$End") => {
                let end = format!("$End{}", &other[1..]);
                loop {
                    let l = lines.expect(&end)?;
                    if l == end {
                        break;
                    }
                }
            }
            other => return Err(lines.err(format!("unexpected content `{other}`"))),
        }
    }
    if !seen_format {
        return Err(Error::Parse {
            line: 0,
            msg: "missing $MeshFormat section".into(),
        });
    }

    let lookup = |id: i64| {
        node_index.get(&id).copied().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("element references unknown node {id}"),
        })
    };
    for t in raw_triangles {
        triangles.push([lookup(t[0])?, lookup(t[1])?, lookup(t[2])?]);
    }
    for (e, tag) in raw_lines {
        let label = BoundaryLabel::from_tag(tag)
            .ok_or_else(|| Error::Label(format!("unknown physical tag {tag} on boundary line")))?;
        edges.push(([lookup(e[0])?, lookup(e[1])?], label));
    }
    if triangles.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "mesh has no triangles".into(),
        });
    }
    TriMesh::new(vertices, triangles, &edges)
}

/// Serializes a mesh; coordinates use shortest round-trip formatting so that
/// reloading is bit-exact.
pub fn write_msh(mesh: &TriMesh) -> String {
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(out, "$Nodes\n{}", mesh.num_vertices());
    for (i, v) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(out, "{} {:?} {:?} 0", i + 1, v[0], v[1]);
    }
    out.push_str("$EndNodes\n");
    let n = mesh.panels().len() + mesh.num_triangles();
    let _ = writeln!(out, "$Elements\n{n}");
    let mut id = 1;
    for p in mesh.panels() {
        let tag = p.label.tag();
        let _ = writeln!(
            out,
            "{id} 1 2 {tag} {tag} {} {}",
            p.vertices[0] + 1,
            p.vertices[1] + 1
        );
        id += 1;
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "{id} 2 2 0 1 {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        id += 1;
    }
    out.push_str("$EndElements\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: &str = "$MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
6
1 1 2 1 1 1 2
2 1 2 1 1 2 3
3 1 2 2 1 3 4
4 1 2 2 1 4 1
5 2 2 0 1 1 2 3
6 2 2 0 1 1 3 4
$EndElements
";

    #[test]
    fn parses_square() {
        let m = parse_msh(SQUARE).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_triangles(), 2);
        assert_eq!(m.panels().len(), 4);
        assert!((m.perimeter() - 4.0).abs() < 1e-15);
        let n_neumann = m.panels().iter().filter(|p| p.label == BoundaryLabel::Neumann).count();
        assert_eq!(n_neumann, 2);
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        let bad = SQUARE.replace("2 1 0 0", "2 one 0 0");
        assert!(matches!(parse_msh(&bad), Err(Error::Parse { .. })));
        let truncated = &SQUARE[..SQUARE.find("$Elements").unwrap()];
        // no elements section: no triangles
        assert!(matches!(parse_msh(truncated), Err(Error::Parse { .. })));
    }

    #[test]
    fn boundary_line_on_interior_edge_is_a_topology_error() {
        let bad = SQUARE
            .replace("$Elements\n6", "$Elements\n7")
            .replace("$EndElements", "7 1 2 1 1 1 3\n$EndElements");
        assert!(matches!(parse_msh(&bad), Err(Error::Topology(_))));
    }

    #[test]
    fn missing_boundary_line_is_a_label_error() {
        let bad = SQUARE
            .replace("$Elements\n6", "$Elements\n5")
            .replace("4 1 2 2 1 4 1\n", "");
        assert!(matches!(parse_msh(&bad), Err(Error::Label(_))));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = crate::meshio::disk(30, 0.7).unwrap();
        let again = parse_msh(&write_msh(&m)).unwrap();
        assert_eq!(m.vertices(), again.vertices());
        assert_eq!(m.triangles(), again.triangles());
        assert_eq!(m.panels(), again.panels());
    }
}
