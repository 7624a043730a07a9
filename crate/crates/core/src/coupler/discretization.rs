//! Frequency-independent pieces of the coupled discretization.

use crate::bem::BoundarySpaces;
use crate::fem::{trace_coupling, FemBlocks, FemSpaces, NeumannLoad};
use crate::incident::BoundaryNodes;
use crate::material::PiezoMaterial;
use crate::meshio::{BoundaryCurve, TriMesh};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Interior (solid) part: FEM spaces, blocks and the boundary couplings.
pub struct SolidPart {
    pub spaces: FemSpaces,
    pub blocks: FemBlocks,
    /// `T[j, i] = <zeta_j, gamma w_i . nu>`, `Y_h` rows, vector FEM columns.
    pub trace: CsrMatrix,
    /// `<beta0, gamma w_i . nu>` from samples at the boundary nodes.
    pub beta0_load: CsrMatrix,
    pub neumann: NeumannLoad,
}

/// Everything needed to assemble the frequency systems of one scenario.
pub struct Discretization {
    pub curve: BoundaryCurve,
    pub bspaces: BoundarySpaces,
    pub material: PiezoMaterial,
    /// `None` freezes the solid (acoustic-only mode).
    pub solid: Option<SolidPart>,
    /// Sampling nodes for incident data on the whole boundary.
    pub nodes: BoundaryNodes,
    /// `<beta1, zeta_j>` from samples at the nodes.
    pub beta1_load: CsrMatrix,
    /// `<chi_i, zeta_j>`, `X_h` rows.
    pub mixed_mass: CsrMatrix,
    pub y_mass: CsrMatrix,
}

impl Discretization {
    /// Fully coupled discretization on a labelled triangulation.
    pub fn coupled(mesh: &TriMesh, material: PiezoMaterial, fem_order: usize, bem_order: usize) -> Result<Self> {
        let spaces = FemSpaces::new(mesh, fem_order)?;
        let blocks = FemBlocks::assemble(&spaces, &material)?;
        let curve = mesh.boundary();
        let bspaces = BoundarySpaces::new(&curve, bem_order)?;
        let nodes = BoundaryNodes::gauss(&curve, node_order(fem_order.max(bem_order)));
        let trace = trace_coupling(&spaces, &bspaces, &curve);
        let beta0_load = normal_trace_load(&spaces, &nodes);
        let neumann = NeumannLoad::new(&spaces, &curve);
        let mut d = Self::boundary_only(curve, bspaces, material, nodes);
        d.solid = Some(SolidPart {
            spaces,
            blocks,
            trace,
            beta0_load,
            neumann,
        });
        Ok(d)
    }

    /// Acoustic-only discretization: the solid is frozen and the exterior
    /// sees a rigid obstacle.
    pub fn acoustic_only(curve: BoundaryCurve, material: PiezoMaterial, bem_order: usize) -> Result<Self> {
        if curve.is_empty() {
            return Err(Error::InvalidArgument("empty boundary".into()));
        }
        let bspaces = BoundarySpaces::new(&curve, bem_order)?;
        let nodes = BoundaryNodes::gauss(&curve, node_order(bem_order));
        Ok(Self::boundary_only(curve, bspaces, material, nodes))
    }

    fn boundary_only(curve: BoundaryCurve, bspaces: BoundarySpaces, material: PiezoMaterial, nodes: BoundaryNodes) -> Self {
        let beta1_load = y_load(&bspaces, &nodes);
        let mixed_mass = bspaces.mixed_mass(&curve);
        let y_mass = bspaces.y_mass(&curve);
        Discretization {
            curve,
            bspaces,
            material,
            solid: None,
            nodes,
            beta1_load,
            mixed_mass,
            y_mass,
        }
    }

    pub fn is_acoustic_only(&self) -> bool {
        self.solid.is_none()
    }

    pub fn sound_speed(&self) -> f64 {
        self.material.c_sound()
    }

    pub fn num_x(&self) -> usize {
        self.bspaces.num_x()
    }

    pub fn num_y(&self) -> usize {
        self.bspaces.num_y()
    }
}

fn node_order(order: usize) -> usize {
    order + 2
}

fn y_load(bspaces: &BoundarySpaces, nodes: &BoundaryNodes) -> CsrMatrix {
    let w = &nodes.weights;
    let mut t = Vec::new();
    for q in 0..nodes.len() {
        let dofs = bspaces.y_panel_dofs(nodes.panel[q]);
        for (a, v) in bspaces.y_values(nodes.param[q]).iter().enumerate() {
            t.push((dofs[a], q, w[q] * v));
        }
    }
    CsrMatrix::from_triplets(bspaces.num_y(), nodes.len(), &t)
}

fn normal_trace_load(spaces: &FemSpaces, nodes: &BoundaryNodes) -> CsrMatrix {
    let w = &nodes.weights;
    let n = spaces.num_scalar();
    let mut t = Vec::new();
    for q in 0..nodes.len() {
        let dofs = spaces.panel_dofs(nodes.panel[q]);
        let nu = nodes.normals[q];
        for (b, v) in crate::fem::lagrange::lagrange_1d(spaces.order(), nodes.param[q]).iter().enumerate() {
            for c in 0..2 {
                t.push((c * n + dofs[b], q, w[q] * v * nu[c]));
            }
        }
    }
    CsrMatrix::from_triplets(2 * n, nodes.len(), &t)
}
