//! Global saddle-point assembly with essential constraints and the NVTF
//! zero-mean pressure border.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem_space::{BoundaryCondition, DofMap};
use crate::krylov::{lu_factor, SparseMatrix};
use crate::local_assembly::{edge_load, local_a, local_b, local_load, ElementKernel, Params, Vec2};
use crate::mesh::{Point, Triangulation};
use crate::quadrature::{gauss2_nodes, LineRule, TriangleRule};
use crate::verify::ExactSolution;

/// Mesh, dof numbering, parameters and precomputed element kernels.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh: Triangulation,
    dofmap: DofMap,
    params: Params,
    kernels: Vec<ElementKernel>,
}

impl Discretization {
    pub fn new(mesh: Triangulation, bc: BoundaryCondition, params: Params) -> Result<Self> {
        params.validate()?;
        let kernels = (0..mesh.n_triangles())
            .into_par_iter()
            .map(|t| ElementKernel::new(&mesh, t))
            .collect::<Result<Vec<_>>>()?;
        let dofmap = DofMap::new(&mesh, bc);
        Ok(Self {
            mesh,
            dofmap,
            params,
            kernels,
        })
    }

    pub fn mesh(&self) -> &Triangulation {
        &self.mesh
    }

    pub fn dofmap(&self) -> &DofMap {
        &self.dofmap
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.dofmap.bc()
    }

    pub fn kernel(&self, t: usize) -> &ElementKernel {
        &self.kernels[t]
    }

    pub fn kernels(&self) -> &[ElementKernel] {
        &self.kernels
    }

    /// The nine velocity/multiplier coefficients of triangle `t` in `x`.
    pub fn local_coefficients(&self, t: usize, x: &[f64]) -> [f64; 9] {
        self.dofmap.element_dofs(&self.mesh, t).map(|d| x[d])
    }

    /// Unconstrained element contributions (velocity block, both pressure
    /// blocks) of the triangles in `tris`, as global triplets.
    pub fn element_triplets(&self, tris: &[usize]) -> Result<Vec<(usize, usize, f64)>> {
        let chunks = tris
            .par_iter()
            .map(|&t| {
                let k = &self.kernels[t];
                let a = local_a(k, &self.params)?;
                let b = local_b(k);
                let dofs = self.dofmap.element_dofs(&self.mesh, t);
                let q = self.dofmap.pres_dof(t);
                let mut out = Vec::with_capacity(81 + 12);
                for (i, &gi) in dofs.iter().enumerate() {
                    for (j, &gj) in dofs.iter().enumerate() {
                        if a[i][j] != 0.0 {
                            out.push((gi, gj, a[i][j]));
                        }
                    }
                }
                for (j, &gj) in dofs.iter().enumerate().take(6) {
                    out.push((q, gj, b[j]));
                    out.push((gj, q, b[j]));
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(chunks.concat())
    }

    /// Bordering entries of the zero-mean pressure row (NVTF only).
    pub fn mean_triplets(&self) -> Vec<(usize, usize, f64)> {
        let Some(m) = self.dofmap.mean_dof() else {
            return Vec::new();
        };
        (0..self.mesh.n_triangles())
            .flat_map(|t| {
                let q = self.dofmap.pres_dof(t);
                let area = self.mesh.area(t);
                [(m, q, area), (q, m, area)]
            })
            .collect()
    }
}

/// Body force, natural boundary datum and (optionally) essential boundary
/// velocity for the constrained dofs.
pub struct ProblemData<'a> {
    pub f: Box<dyn Fn(Point) -> Vec2 + Send + Sync + 'a>,
    /// `g(x, n_outward, t_edge)`.
    pub g: Box<dyn Fn(Point, Vec2, Vec2) -> f64 + Send + Sync + 'a>,
    /// Boundary velocity; `None` means homogeneous essential data.
    pub essential: Option<Box<dyn Fn(Point) -> Vec2 + Send + Sync + 'a>>,
}

impl<'a> ProblemData<'a> {
    pub fn zero() -> Self {
        Self {
            f: Box::new(|_| [0.0, 0.0]),
            g: Box::new(|_, _, _| 0.0),
            essential: None,
        }
    }
}

/// `f = −νΔu + ∇p`, `g = σ_nn` (TVNF) or `σ_nt` (NVTF), essential data from `u`.
pub fn manufactured_data<'a>(exact: &'a dyn ExactSolution, nu: f64, bc: BoundaryCondition) -> ProblemData<'a> {
    ProblemData {
        f: Box::new(move |x| exact.f(nu, x)),
        g: Box::new(move |x, n, t| exact.boundary_datum(nu, bc, x, n, t)),
        essential: Some(Box::new(move |x| exact.u(x))),
    }
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Prescribed values of the constrained dofs (zero elsewhere).
    pub essential_values: Vec<f64>,
}

impl AssembledSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Direct solve with one round of iterative refinement.
    pub fn solve_direct(&self) -> Result<Vec<f64>> {
        let f = lu_factor(&self.matrix)?;
        Ok(f.solve_refined(&self.matrix, &self.rhs, 1))
    }

    pub fn write_matrix_market(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.matrix.to_matrix_market())?;
        Ok(())
    }
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Edge moments `2∫_E (u·n_E) ℓ_m` against the Lagrange basis on the Gauss
/// nodes, i.e. the coefficients of the L² projection of `u·n_E` onto P₁(E).
fn normal_moments(mesh: &Triangulation, e: usize, u: &dyn Fn(Point) -> Vec2) -> [f64; 2] {
    let [s0, s1] = gauss2_nodes();
    let n = mesh.edge_normal(e);
    let [a, b] = mesh.edge_points(e);
    let rule = LineRule::gauss(4);
    let mut out = [0.0; 2];
    for (&s, &w) in rule.points.iter().zip(&rule.weights) {
        let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
        let un = dot(u(x), n);
        out[0] += 2.0 * w * un * (s - s1) / (s0 - s1);
        out[1] += 2.0 * w * un * (s - s0) / (s1 - s0);
    }
    out
}

/// Edge average of `u·t_E`.
fn tangential_mean(mesh: &Triangulation, e: usize, u: &dyn Fn(Point) -> Vec2) -> f64 {
    let t = mesh.edge_tangent(e);
    let [a, b] = mesh.edge_points(e);
    LineRule::gauss(4).on(a, b).map(|(x, w)| w * dot(u(x), t)).sum::<f64>() / mesh.edge_length(e)
}

/// Prescribed values for every constrained dof.
fn essential_values(disc: &Discretization, data: &ProblemData<'_>) -> Vec<f64> {
    let dm = disc.dofmap();
    let mesh = disc.mesh();
    let mut vals = vec![0.0; dm.n_total()];
    let Some(ess) = data.essential.as_deref() else {
        return vals;
    };
    for e in (0..mesh.n_edges()).filter(|&e| mesh.is_boundary_edge(e)) {
        match dm.bc() {
            BoundaryCondition::Tvnf => vals[dm.mult_dof(e)] = tangential_mean(mesh, e, ess),
            BoundaryCondition::Nvtf => {
                let m = normal_moments(mesh, e, ess);
                vals[dm.bdm_dof(e, 0)] = m[0];
                vals[dm.bdm_dof(e, 1)] = m[1];
            }
        }
    }
    vals
}

/// Assembles `[[A, Bᵀ], [B, 0]]` (bordered by the mean row under NVTF), the
/// load vector, and eliminates the constrained dofs symmetrically.
pub fn assemble(disc: &Discretization, data: &ProblemData<'_>) -> Result<AssembledSystem> {
    let dm = disc.dofmap();
    let mesh = disc.mesh();
    let n = dm.n_total();
    let all: Vec<usize> = (0..mesh.n_triangles()).collect();
    let mut triplets = disc.element_triplets(&all)?;
    triplets.extend(disc.mean_triplets());

    let mut rhs = vec![0.0; n];
    let loads: Vec<([usize; 9], [f64; 6])> = all
        .par_iter()
        .map(|&t| (dm.element_dofs(mesh, t), local_load(disc.kernel(t), &*data.f)))
        .collect();
    for (dofs, l) in loads {
        for (d, v) in dofs.iter().zip(l) {
            rhs[*d] += v;
        }
    }
    for e in (0..mesh.n_edges()).filter(|&e| mesh.is_boundary_edge(e)) {
        for (d, v) in edge_load(mesh, dm, e, &*data.g)? {
            rhs[d] += v;
        }
    }

    let values = essential_values(disc, data);
    let mask = dm.constrained_mask();
    let mut kept = Vec::with_capacity(triplets.len());
    for (i, j, v) in triplets {
        if i >= n || j >= n {
            return Err(Error::Internal(format!("entry ({i}, {j}) outside system of size {n}")));
        }
        if mask[i] {
            continue;
        }
        if mask[j] {
            rhs[i] -= v * values[j];
            continue;
        }
        kept.push((i, j, v));
    }
    for c in dm.constrained_dofs() {
        kept.push((c, c, 1.0));
        rhs[c] = values[c];
    }
    let matrix = SparseMatrix::from_triplets(n, kept)?;
    Ok(AssembledSystem {
        matrix,
        rhs,
        essential_values: values,
    })
}

/// Interpolant `(Πu, Φ⁰u_t, Ψ⁰p)` of an exact solution; under NVTF the
/// pressure is shifted to zero mean and the border multiplier is zero.
pub fn interpolate(disc: &Discretization, exact: &dyn ExactSolution) -> Vec<f64> {
    let dm = disc.dofmap();
    let mesh = disc.mesh();
    let u = |x: Point| exact.u(x);
    let mut out = vec![0.0; dm.n_total()];
    for e in 0..mesh.n_edges() {
        let m = normal_moments(mesh, e, &u);
        out[dm.bdm_dof(e, 0)] = m[0];
        out[dm.bdm_dof(e, 1)] = m[1];
        out[dm.mult_dof(e)] = tangential_mean(mesh, e, &u);
    }
    let rule = TriangleRule::degree5();
    for t in 0..mesh.n_triangles() {
        let area = mesh.area(t);
        let tri = mesh.triangle_points(t);
        out[dm.pres_dof(t)] = rule.on(&tri, area).map(|(x, w)| w * exact.p(x)).sum::<f64>() / area;
    }
    if dm.bc() == BoundaryCondition::Nvtf {
        let mean = pressure_mean(disc, &out);
        for d in dm.pressure_range() {
            out[d] -= mean;
        }
    }
    out
}

/// Area-weighted mean of the discrete pressure.
pub fn pressure_mean(disc: &Discretization, x: &[f64]) -> f64 {
    let dm = disc.dofmap();
    let mesh = disc.mesh();
    let s: f64 = (0..mesh.n_triangles()).map(|t| mesh.area(t) * x[dm.pres_dof(t)]).sum();
    s / mesh.total_area()
}

/// `max_K |∇·u_h|`.
pub fn max_divergence(disc: &Discretization, x: &[f64]) -> f64 {
    (0..disc.mesh().n_triangles())
        .map(|t| disc.kernel(t).div(&disc.local_coefficients(t, x)[..6]).abs())
        .fold(0.0, f64::max)
}

/// Euclidean norm of the velocity (BDM) part of `x`.
pub fn velocity_norm(disc: &Discretization, x: &[f64]) -> f64 {
    x[..2 * disc.dofmap().n_edges()].iter().map(|v| v * v).sum::<f64>().sqrt()
}
