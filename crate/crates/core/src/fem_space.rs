//! Global numbering of the lowest-order hybrid triple: BDM₁ velocity (two
//! normal-trace values per edge), piecewise-constant edge multiplier and
//! piecewise-constant pressure.
//!
//! Layout: `[0, 2E)` velocity, `[2E, 3E)` multipliers, `[3E, 3E+T)` pressure,
//! then one bordering row for the zero-mean pressure constraint under NVTF.

use crate::error::Error;
use crate::mesh::{Point, Triangulation};
use crate::quadrature::gauss2_nodes;

/// Which velocity component is essential on the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// Tangential velocity given, normal flux `σ_nn` natural.
    Tvnf,
    /// Normal velocity given, tangential flux `σ_nt` natural.
    Nvtf,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Tvnf => "tvnf",
            BoundaryCondition::Nvtf => "nvtf",
        }
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "tvnf" => Ok(BoundaryCondition::Tvnf),
            "nvtf" => Ok(BoundaryCondition::Nvtf),
            other => Err(Error::invalid(format!("unknown boundary condition `{other}`"))),
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Velocity { edge: usize, node: usize },
    Multiplier { edge: usize },
    Pressure { tri: usize },
    MeanPressure,
}

#[derive(Debug, Clone)]
pub struct DofMap {
    n_edges: usize,
    n_tris: usize,
    bc: BoundaryCondition,
    constrained: Vec<bool>,
}

impl DofMap {
    pub fn new(mesh: &Triangulation, bc: BoundaryCondition) -> Self {
        let n_edges = mesh.n_edges();
        let n_tris = mesh.n_triangles();
        let n_total = 3 * n_edges + n_tris + usize::from(bc == BoundaryCondition::Nvtf);
        let mut constrained = vec![false; n_total];
        for e in (0..n_edges).filter(|&e| mesh.is_boundary_edge(e)) {
            match bc {
                BoundaryCondition::Tvnf => constrained[2 * n_edges + e] = true,
                BoundaryCondition::Nvtf => {
                    constrained[2 * e] = true;
                    constrained[2 * e + 1] = true;
                }
            }
        }
        Self {
            n_edges,
            n_tris,
            bc,
            constrained,
        }
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn n_tris(&self) -> usize {
        self.n_tris
    }

    pub fn n_total(&self) -> usize {
        self.constrained.len()
    }

    /// Velocity and multiplier unknowns together.
    pub fn n_hybrid_velocity(&self) -> usize {
        3 * self.n_edges
    }

    #[inline]
    pub fn bdm_dof(&self, edge: usize, node: usize) -> usize {
        debug_assert!(node < 2);
        2 * edge + node
    }

    #[inline]
    pub fn mult_dof(&self, edge: usize) -> usize {
        2 * self.n_edges + edge
    }

    #[inline]
    pub fn pres_dof(&self, tri: usize) -> usize {
        3 * self.n_edges + tri
    }

    pub fn pressure_range(&self) -> std::ops::Range<usize> {
        3 * self.n_edges..3 * self.n_edges + self.n_tris
    }

    pub fn mean_dof(&self) -> Option<usize> {
        (self.bc == BoundaryCondition::Nvtf).then(|| 3 * self.n_edges + self.n_tris)
    }

    pub fn kind(&self, dof: usize) -> DofKind {
        let e = self.n_edges;
        if dof < 2 * e {
            DofKind::Velocity { edge: dof / 2, node: dof % 2 }
        } else if dof < 3 * e {
            DofKind::Multiplier { edge: dof - 2 * e }
        } else if dof < 3 * e + self.n_tris {
            DofKind::Pressure { tri: dof - 3 * e }
        } else {
            DofKind::MeanPressure
        }
    }

    #[inline]
    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn constrained_mask(&self) -> &[bool] {
        &self.constrained
    }

    pub fn constrained_dofs(&self) -> impl Iterator<Item = usize> + '_ {
        self.constrained.iter().enumerate().filter(|(_, &c)| c).map(|(d, _)| d)
    }

    /// Global dofs of a triangle in local order: six velocity values
    /// (local edge `k`, node `m` at `2k + m`), then three multipliers.
    pub fn element_dofs(&self, mesh: &Triangulation, tri: usize) -> [usize; 9] {
        let le = mesh.tri_edges(tri);
        let mut out = [0; 9];
        for k in 0..3 {
            out[2 * k] = self.bdm_dof(le[k].edge, 0);
            out[2 * k + 1] = self.bdm_dof(le[k].edge, 1);
            out[6 + k] = self.mult_dof(le[k].edge);
        }
        out
    }
}

/// Point at which each dof is "located": the two Gauss points of the edge for
/// velocity, the edge midpoint for multipliers, the barycentre for pressure.
/// The mean-pressure row has no location.
pub fn dof_locations(mesh: &Triangulation, dofmap: &DofMap) -> Vec<Option<Point>> {
    let s = gauss2_nodes();
    (0..dofmap.n_total())
        .map(|d| match dofmap.kind(d) {
            DofKind::Velocity { edge, node } => {
                let [a, b] = mesh.edge_points(edge);
                Some([a[0] + s[node] * (b[0] - a[0]), a[1] + s[node] * (b[1] - a[1])])
            }
            DofKind::Multiplier { edge } => Some(mesh.edge_midpoint(edge)),
            DofKind::Pressure { tri } => Some(mesh.barycenter(tri)),
            DofKind::MeanPressure => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Domain;

    #[test]
    fn counts_on_one_cell() {
        let m = Triangulation::generate(Domain::UnitSquare, 1).unwrap();
        let tv = DofMap::new(&m, BoundaryCondition::Tvnf);
        assert_eq!(tv.n_total(), 17);
        let c: Vec<_> = tv.constrained_dofs().collect();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|&d| matches!(tv.kind(d), DofKind::Multiplier { .. })));
        assert_eq!(tv.mean_dof(), None);

        let nv = DofMap::new(&m, BoundaryCondition::Nvtf);
        assert_eq!(nv.n_total(), 18);
        let c: Vec<_> = nv.constrained_dofs().collect();
        assert_eq!(c.len(), 8);
        assert!(c.iter().all(|&d| matches!(nv.kind(d), DofKind::Velocity { .. })));
        assert_eq!(nv.mean_dof(), Some(17));
    }

    #[test]
    fn large_mesh_count() {
        let m = Triangulation::generate(Domain::UnitSquare, 250).unwrap();
        assert_eq!(DofMap::new(&m, BoundaryCondition::Tvnf).n_total(), 689_000);
    }

    #[test]
    fn blocks_are_contiguous() {
        let m = Triangulation::generate(Domain::UnitSquare, 3).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Nvtf);
        let e = m.n_edges();
        assert_eq!(d.kind(0), DofKind::Velocity { edge: 0, node: 0 });
        assert_eq!(d.kind(2 * e - 1), DofKind::Velocity { edge: e - 1, node: 1 });
        assert_eq!(d.kind(2 * e), DofKind::Multiplier { edge: 0 });
        assert_eq!(d.kind(3 * e), DofKind::Pressure { tri: 0 });
        assert_eq!(d.kind(d.n_total() - 1), DofKind::MeanPressure);
        for c in d.constrained_dofs() {
            match d.kind(c) {
                DofKind::Velocity { edge, .. } | DofKind::Multiplier { edge } => {
                    assert!(m.is_boundary_edge(edge))
                }
                k => panic!("unexpected constrained dof {k:?}"),
            }
        }
    }

    #[test]
    fn locations() {
        let m = Triangulation::generate(Domain::UnitSquare, 1).unwrap();
        let d = DofMap::new(&m, BoundaryCondition::Tvnf);
        let loc = dof_locations(&m, &d);
        let bottom = (0..m.n_edges())
            .find(|&e| m.edge_points(e) == [[0.0, 0.0], [1.0, 0.0]])
            .unwrap();
        let p0 = loc[d.bdm_dof(bottom, 0)].unwrap();
        let p1 = loc[d.bdm_dof(bottom, 1)].unwrap();
        assert!((p0[0] - 0.211_324_865_405_187).abs() < 1e-12 && p0[1] == 0.0);
        assert!((p1[0] - 0.788_675_134_594_813).abs() < 1e-12 && p1[1] == 0.0);
        assert_eq!(loc[d.mult_dof(bottom)], Some([0.5, 0.0]));
        let lower = (0..m.n_triangles())
            .find(|&t| m.triangle_points(t).contains(&[1.0, 0.0]))
            .unwrap();
        let pts = m.triangle_points(lower);
        let c = loc[d.pres_dof(lower)].unwrap();
        assert!((c[0] - (pts[0][0] + pts[1][0] + pts[2][0]) / 3.0).abs() < 1e-15);

        let reference = Triangulation::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
        let dr = DofMap::new(&reference, BoundaryCondition::Tvnf);
        let c = dof_locations(&reference, &dr)[dr.pres_dof(0)].unwrap();
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-15 && (c[1] - 1.0 / 3.0).abs() < 1e-15);
    }
}
