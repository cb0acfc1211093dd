//! Overlapping subdomains, their dof sets and the partition of unity.

use super::Partition;
use crate::error::{Error, Result};
use crate::fem_space::DofKind;
use crate::mesh::Triangulation;
use crate::quadrature::gauss2_nodes;
use crate::system::Discretization;

#[derive(Debug, Clone)]
pub struct Decomposition {
    overlap: usize,
    elems_0: Vec<Vec<usize>>,
    elems_l: Vec<Vec<usize>>,
    dofs: Vec<Vec<usize>>,
    weights: Vec<Vec<f64>>,
}

/// Grows every element set by `l` vertex-adjacency layers.
pub fn add_overlap(mesh: &Triangulation, partition: &Partition, l: usize) -> Result<Vec<Vec<usize>>> {
    if l == 0 {
        return Err(Error::invalid("overlap must be at least one layer"));
    }
    let vt = mesh.vertex_triangles();
    let mut out = Vec::with_capacity(partition.n_parts());
    for elems in partition.elements() {
        let mut inside = vec![false; mesh.n_triangles()];
        for &t in &elems {
            inside[t] = true;
        }
        for _ in 0..l {
            let mut touched = vec![false; mesh.n_vertices()];
            for (t, _) in inside.iter().enumerate().filter(|(_, &b)| b) {
                for &v in &mesh.triangles()[t] {
                    touched[v] = true;
                }
            }
            for (v, _) in touched.iter().enumerate().filter(|(_, &b)| b) {
                for &t in &vt[v] {
                    inside[t] = true;
                }
            }
        }
        out.push((0..mesh.n_triangles()).filter(|&t| inside[t]).collect());
    }
    Ok(out)
}

/// Sorted dofs attached to a set of triangles (velocity and multipliers of
/// their edges, their pressures, and the mean-pressure border if present).
pub fn attached_dofs(disc: &Discretization, tris: &[usize]) -> Vec<usize> {
    let dm = disc.dofmap();
    let mut flag = vec![false; dm.n_total()];
    for &t in tris {
        for d in dm.element_dofs(disc.mesh(), t) {
            flag[d] = true;
        }
        flag[dm.pres_dof(t)] = true;
    }
    if let Some(m) = dm.mean_dof() {
        flag[m] = true;
    }
    (0..flag.len()).filter(|&d| flag[d]).collect()
}

impl Decomposition {
    pub fn new(disc: &Discretization, partition: &Partition, overlap: usize) -> Result<Self> {
        let mesh = disc.mesh();
        if partition.parts().len() != mesh.n_triangles() {
            return Err(Error::validation(format!(
                "partition covers {} triangles, mesh has {}",
                partition.parts().len(),
                mesh.n_triangles()
            )));
        }
        let elems_0 = partition.elements();
        let elems_l = add_overlap(mesh, partition, overlap)?;
        let dofs: Vec<Vec<usize>> = elems_l.iter().map(|e| attached_dofs(disc, e)).collect();
        let weights = partition_of_unity(disc, &elems_0, &dofs)?;
        Ok(Self {
            overlap,
            elems_0,
            elems_l,
            dofs,
            weights,
        })
    }

    pub fn n_subdomains(&self) -> usize {
        self.elems_0.len()
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn elems_0(&self, i: usize) -> &[usize] {
        &self.elems_0[i]
    }

    pub fn elems_l(&self, i: usize) -> &[usize] {
        &self.elems_l[i]
    }

    /// Sorted global dofs `𝒩_i` of subdomain `i`.
    pub fn dofs(&self, i: usize) -> &[usize] {
        &self.dofs[i]
    }

    /// Diagonal of `D_i`, aligned with [`Self::dofs`].
    pub fn weights(&self, i: usize) -> &[f64] {
        &self.weights[i]
    }

    /// `R_i x`.
    pub fn restrict(&self, i: usize, x: &[f64]) -> Vec<f64> {
        self.dofs[i].iter().map(|&d| x[d]).collect()
    }

    /// `y += R_iᵀ D_i z`.
    pub fn extend_weighted(&self, i: usize, z: &[f64], y: &mut [f64]) {
        for ((&d, &w), &v) in self.dofs[i].iter().zip(&self.weights[i]).zip(z) {
            y[d] += w * v;
        }
    }

    /// Diagonal of `Σ_i R_iᵀ D_i R_i`.
    pub fn weight_sum(&self, n_total: usize) -> Vec<f64> {
        let mut s = vec![0.0; n_total];
        for i in 0..self.n_subdomains() {
            for (&d, &w) in self.dofs[i].iter().zip(&self.weights[i]) {
                s[d] += w;
            }
        }
        s
    }
}

/// Nodal `χ_i = χ̃_i / Σ_j χ̃_j` with `χ̃_i` the indicator of the vertices of
/// `elems_0[i]`, interpolated linearly at every dof location of `𝒩_i`.
fn partition_of_unity(disc: &Discretization, elems_0: &[Vec<usize>], dofs: &[Vec<usize>]) -> Result<Vec<Vec<f64>>> {
    let mesh = disc.mesh();
    let dm = disc.dofmap();
    let n_sub = elems_0.len();
    let mut indicator = vec![vec![0.0; mesh.n_vertices()]; n_sub];
    let mut total = vec![0.0; mesh.n_vertices()];
    for (i, elems) in elems_0.iter().enumerate() {
        for &t in elems {
            for &v in &mesh.triangles()[t] {
                indicator[i][v] = 1.0;
            }
        }
        for (tv, iv) in total.iter_mut().zip(&indicator[i]) {
            *tv += iv;
        }
    }
    if let Some(v) = total.iter().position(|&s| s == 0.0) {
        return Err(Error::Internal(format!("vertex {v} is not covered by any subdomain")));
    }
    let s = gauss2_nodes();
    let weights = (0..n_sub)
        .map(|i| {
            let chi: Vec<f64> = indicator[i].iter().zip(&total).map(|(a, b)| a / b).collect();
            let on_edge = |e: usize, frac: f64| {
                let [a, b] = mesh.edges()[e];
                (1.0 - frac) * chi[a] + frac * chi[b]
            };
            dofs[i]
                .iter()
                .map(|&d| match dm.kind(d) {
                    DofKind::Velocity { edge, node } => on_edge(edge, s[node]),
                    DofKind::Multiplier { edge } => on_edge(edge, 0.5),
                    DofKind::Pressure { tri } => mesh.triangles()[tri].iter().map(|&v| chi[v]).sum::<f64>() / 3.0,
                    DofKind::MeanPressure => 1.0 / n_sub as f64,
                })
                .collect()
        })
        .collect();
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem_space::BoundaryCondition;
    use crate::local_assembly::Params;
    use crate::mesh::Domain;
    use crate::schwarz::{decompose, PartitionStrategy};
    use std::collections::VecDeque;

    fn disc(n: usize, bc: BoundaryCondition) -> Discretization {
        Discretization::new(Triangulation::generate(Domain::UnitSquare, n).unwrap(), bc, Params::default()).unwrap()
    }

    #[test]
    fn zero_overlap_rejected() {
        let d = disc(2, BoundaryCondition::Tvnf);
        let p = Partition::single(d.mesh().n_triangles()).unwrap();
        assert!(matches!(Decomposition::new(&d, &p, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn single_subdomain_is_identity() {
        let d = disc(3, BoundaryCondition::Nvtf);
        let p = Partition::single(d.mesh().n_triangles()).unwrap();
        let dec = Decomposition::new(&d, &p, 2).unwrap();
        assert_eq!(dec.elems_l(0).len(), d.mesh().n_triangles());
        assert_eq!(dec.dofs(0).len(), d.dofmap().n_total());
        assert!(dec.weights(0).iter().all(|&w| w == 1.0));
    }

    #[test]
    fn overlap_grows_and_covers() {
        let d = disc(4, BoundaryCondition::Tvnf);
        let p = decompose(d.mesh(), &PartitionStrategy::Uniform { px: 2, py: 2 }).unwrap();
        let dec = Decomposition::new(&d, &p, 1).unwrap();
        let mut covered = vec![false; d.mesh().n_triangles()];
        for i in 0..4 {
            assert!(dec.elems_l(i).len() > dec.elems_0(i).len());
            for &t in dec.elems_l(i) {
                covered[t] = true;
            }
        }
        assert!(covered.iter().all(|&c| c));
    }

    /// Vertex-layer distance from a set of triangles, by breadth-first search.
    fn layer_distance(mesh: &Triangulation, seed: &[usize]) -> Vec<usize> {
        let vt = mesh.vertex_triangles();
        let mut dist = vec![usize::MAX; mesh.n_triangles()];
        let mut q = VecDeque::new();
        for &t in seed {
            dist[t] = 0;
            q.push_back(t);
        }
        while let Some(t) = q.pop_front() {
            for &v in &mesh.triangles()[t] {
                for &s in &vt[v] {
                    if dist[s] == usize::MAX {
                        dist[s] = dist[t] + 1;
                        q.push_back(s);
                    }
                }
            }
        }
        dist
    }

    #[test]
    fn overlap_matches_bfs_oracle() {
        let d = disc(8, BoundaryCondition::Tvnf);
        let p = decompose(d.mesh(), &PartitionStrategy::Uniform { px: 2, py: 1 }).unwrap();
        for l in 1..=3 {
            let dec = Decomposition::new(&d, &p, l).unwrap();
            for i in 0..2 {
                let dist = layer_distance(d.mesh(), dec.elems_0(i));
                let expected: Vec<usize> = (0..d.mesh().n_triangles()).filter(|&t| dist[t] <= l).collect();
                assert_eq!(dec.elems_l(i), &expected[..]);
            }
        }
    }

    #[test]
    fn partition_of_unity_identity() {
        for bc in [BoundaryCondition::Tvnf, BoundaryCondition::Nvtf] {
            let d = disc(6, bc);
            for strat in [
                PartitionStrategy::Uniform { px: 2, py: 2 },
                PartitionStrategy::Uniform { px: 3, py: 3 },
                PartitionStrategy::Bisect(5),
            ] {
                let p = decompose(d.mesh(), &strat).unwrap();
                for l in [1, 2] {
                    let dec = Decomposition::new(&d, &p, l).unwrap();
                    let s = dec.weight_sum(d.dofmap().n_total());
                    assert!(s.iter().all(|w| (w - 1.0).abs() <= 1e-12), "{strat} l={l}");
                }
            }
        }
    }

    #[test]
    fn interface_midpoint_gets_half() {
        let d = disc(4, BoundaryCondition::Tvnf);
        let p = decompose(d.mesh(), &PartitionStrategy::Uniform { px: 2, py: 1 }).unwrap();
        let dec = Decomposition::new(&d, &p, 1).unwrap();
        let mesh = d.mesh();
        // vertical edge on x = 0.5 between y = 0.25 and 0.5
        let e = (0..mesh.n_edges())
            .find(|&e| mesh.edge_points(e) == [[0.5, 0.25], [0.5, 0.5]])
            .unwrap();
        let m = d.dofmap().mult_dof(e);
        for i in 0..2 {
            let k = dec.dofs(i).binary_search(&m).unwrap();
            assert!((dec.weights(i)[k] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn restriction_extension_transpose() {
        let d = disc(4, BoundaryCondition::Nvtf);
        let p = decompose(d.mesh(), &PartitionStrategy::Bisect(3)).unwrap();
        let dec = Decomposition::new(&d, &p, 1).unwrap();
        let x: Vec<f64> = (0..d.dofmap().n_total()).map(|i| i as f64).collect();
        for i in 0..3 {
            let r = dec.restrict(i, &x);
            assert!(dec.dofs(i).iter().zip(&r).all(|(&g, &v)| v == g as f64));
        }
        let mut covered = vec![false; x.len()];
        for i in 0..3 {
            for &g in dec.dofs(i) {
                covered[g] = true;
            }
        }
        assert!(covered.iter().all(|&c| c));
    }
}
