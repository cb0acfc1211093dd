//! Element kernels for the hybrid velocity/multiplier/pressure triple.
//!
//! The BDM₁ basis is built directly in physical coordinates: its degrees of
//! freedom are the values of `v·n_E` (global edge normal) at the two Gauss
//! points of each edge, so the basis is the inverse of the 6×6 matrix of those
//! functionals applied to a scaled monomial basis of `[P₁]²`. Because the
//! functionals use the global normal, neighbouring elements share velocity
//! dofs without sign fix-ups.
//!
//! Local unknown order: velocity `2k + m` (local edge `k`, Gauss node `m`),
//! then multipliers `6 + k`.

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::fem_space::{BoundaryCondition, DofMap};
use crate::mesh::{Point, Triangulation};
use crate::quadrature::{gauss2_nodes, LineRule, TriangleRule};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

pub const N_LOCAL: usize = 9;

/// Switch between the symmetric (`ε = −1`) and non-symmetric (`ε = +1`) forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Symmetric,
    NonSymmetric,
}

impl Symmetry {
    pub fn epsilon(self) -> f64 {
        match self {
            Symmetry::Symmetric => -1.0,
            Symmetry::NonSymmetric => 1.0,
        }
    }

    pub fn from_epsilon(eps: i32) -> Result<Self> {
        match eps {
            -1 => Ok(Symmetry::Symmetric),
            1 => Ok(Symmetry::NonSymmetric),
            other => Err(Error::invalid(format!("epsilon must be -1 or 1, got {other}"))),
        }
    }
}

/// Viscosity, stabilisation and symmetry switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub nu: f64,
    pub tau: f64,
    pub symmetry: Symmetry,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            nu: 1.0,
            tau: 6.0,
            symmetry: Symmetry::Symmetric,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::invalid(format!("stabilisation tau must be positive, got {}", self.tau)));
        }
        if !(self.nu > 0.0) {
            return Err(Error::invalid(format!("viscosity nu must be positive, got {}", self.nu)));
        }
        Ok(())
    }
}

/// Affine vector field `v(x) = value + grad·(x − center)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub value: Vec2,
    pub grad: Mat2,
}

impl AffineField {
    pub fn at(&self, center: Point, x: Point) -> Vec2 {
        let d = [x[0] - center[0], x[1] - center[1]];
        [
            self.value[0] + self.grad[0][0] * d[0] + self.grad[0][1] * d[1],
            self.value[1] + self.grad[1][0] * d[0] + self.grad[1][1] * d[1],
        ]
    }

    pub fn div(&self) -> f64 {
        self.grad[0][0] + self.grad[1][1]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EdgeGeometry {
    pub edge: usize,
    pub length: f64,
    /// Orientation sign of the edge seen from this triangle.
    pub sign: f64,
    /// Outward unit normal of the triangle.
    pub normal: Vec2,
    /// Global (lower → higher) unit tangent; multipliers live along it.
    pub tangent: Vec2,
    /// Lower and higher vertex.
    pub endpoints: [Point; 2],
    pub midpoint: Point,
}

impl EdgeGeometry {
    pub fn global_normal(&self) -> Vec2 {
        [self.sign * self.normal[0], self.sign * self.normal[1]]
    }

    /// Location of the velocity dof `node` on this edge.
    pub fn node(&self, node: usize) -> Point {
        let s = gauss2_nodes()[node];
        let [a, b] = self.endpoints;
        [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
    }
}

#[derive(Debug, Clone)]
pub struct ElementKernel {
    pub tri: usize,
    pub area: f64,
    pub diameter: f64,
    pub center: Point,
    pub vertices: [Point; 3],
    pub basis: [AffineField; 6],
    pub edges: [EdgeGeometry; 3],
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn frobenius(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

impl ElementKernel {
    /// Builds the BDM₁ basis of triangle `t`.
    pub fn new(mesh: &Triangulation, t: usize) -> Result<Self> {
        let vertices = mesh.triangle_points(t);
        let area = mesh.area(t);
        let diameter = mesh.diameter(t);
        let center = mesh.barycenter(t);
        let edges = mesh.tri_edges(t).map(|le| {
            let endpoints = mesh.edge_points(le.edge);
            let n = mesh.edge_normal(le.edge);
            let sign = f64::from(le.sign);
            EdgeGeometry {
                edge: le.edge,
                length: mesh.edge_length(le.edge),
                sign,
                normal: [sign * n[0], sign * n[1]],
                tangent: mesh.edge_tangent(le.edge),
                endpoints,
                midpoint: mesh.edge_midpoint(le.edge),
            }
        });

        // monomials (1,0) (ξ,0) (η,0) (0,1) (0,ξ) (0,η) with ξ = (x − x_c)/h
        let h = diameter;
        let mono = |x: Point| -> [Vec2; 6] {
            let xi = (x[0] - center[0]) / h;
            let eta = (x[1] - center[1]) / h;
            [[1.0, 0.0], [xi, 0.0], [eta, 0.0], [0.0, 1.0], [0.0, xi], [0.0, eta]]
        };
        let mut functionals = SMatrix::<f64, 6, 6>::zeros();
        for (k, eg) in edges.iter().enumerate() {
            let n = eg.global_normal();
            for m in 0..2 {
                let values = mono(eg.node(m));
                for (c, v) in values.iter().enumerate() {
                    functionals[(2 * k + m, c)] = dot(*v, n);
                }
            }
        }
        let det = functionals.determinant();
        let coeffs = functionals
            .try_inverse()
            .filter(|_| det.abs() > 1e-10)
            .ok_or_else(|| Error::Geometry(format!("BDM functional matrix of triangle {t} is singular (det {det:e})")))?;

        let basis = std::array::from_fn(|j| AffineField {
            value: [coeffs[(0, j)], coeffs[(3, j)]],
            grad: [
                [coeffs[(1, j)] / h, coeffs[(2, j)] / h],
                [coeffs[(4, j)] / h, coeffs[(5, j)] / h],
            ],
        });

        Ok(Self {
            tri: t,
            area,
            diameter,
            center,
            vertices,
            basis,
            edges,
        })
    }

    /// Velocity at `x` for local coefficients `c`.
    pub fn eval(&self, c: &[f64], x: Point) -> Vec2 {
        let mut v = [0.0; 2];
        for (phi, &cj) in self.basis.iter().zip(c) {
            let p = phi.at(self.center, x);
            v[0] += cj * p[0];
            v[1] += cj * p[1];
        }
        v
    }

    /// Constant gradient `∂v_i/∂x_j` for local coefficients `c`.
    pub fn grad(&self, c: &[f64]) -> Mat2 {
        let mut g = [[0.0; 2]; 2];
        for (phi, &cj) in self.basis.iter().zip(c) {
            for (r, row) in g.iter_mut().enumerate() {
                row[0] += cj * phi.grad[r][0];
                row[1] += cj * phi.grad[r][1];
            }
        }
        g
    }

    pub fn div(&self, c: &[f64]) -> f64 {
        self.basis.iter().zip(c).map(|(phi, cj)| cj * phi.div()).sum()
    }

    /// Velocity dofs of an arbitrary field: `v·n_E` at the edge Gauss nodes.
    pub fn interpolate(&self, field: impl Fn(Point) -> Vec2) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (k, eg) in self.edges.iter().enumerate() {
            for m in 0..2 {
                out[2 * k + m] = dot(field(eg.node(m)), eg.global_normal());
            }
        }
        out
    }

    /// Per-edge rows giving `mean_e((v)_t − ṽ)` and `(∂_n v)_t` on each local edge.
    fn edge_rows(&self) -> [([f64; N_LOCAL], [f64; N_LOCAL]); 3] {
        std::array::from_fn(|k| {
            let eg = &self.edges[k];
            let mut jump = [0.0; N_LOCAL];
            let mut flux = [0.0; N_LOCAL];
            for (j, phi) in self.basis.iter().enumerate() {
                // (v)_t is linear along the edge, so its mean is the midpoint value
                jump[j] = dot(phi.at(self.center, eg.midpoint), eg.tangent);
                flux[j] = dot(eg.tangent, mat_vec(&phi.grad, eg.normal));
            }
            jump[6 + k] = -1.0;
            (jump, flux)
        })
    }
}

/// Element matrices: velocity/multiplier block, pressure row and load.
#[derive(Debug, Clone)]
pub struct LocalMatrices {
    pub a: [[f64; N_LOCAL]; N_LOCAL],
    pub b: [f64; N_LOCAL],
}

impl LocalMatrices {
    pub fn new(kernel: &ElementKernel, params: &Params) -> Result<Self> {
        Ok(Self {
            a: local_a(kernel, params)?,
            b: local_b(kernel),
        })
    }
}

/// Local contribution of the velocity bilinear form; entry `[i][j]` is
/// `a(φ_j, φ_i)`.
pub fn local_a(kernel: &ElementKernel, params: &Params) -> Result<[[f64; N_LOCAL]; N_LOCAL]> {
    params.validate()?;
    let Params { nu, tau, symmetry } = *params;
    let eps = symmetry.epsilon();
    let mut a = [[0.0; N_LOCAL]; N_LOCAL];
    for i in 0..6 {
        for j in 0..6 {
            a[i][j] = nu * kernel.area * frobenius(&kernel.basis[i].grad, &kernel.basis[j].grad);
        }
    }
    let penalty = tau / kernel.diameter;
    for ((jump, flux), eg) in kernel.edge_rows().iter().zip(&kernel.edges) {
        let w = nu * eg.length;
        for i in 0..N_LOCAL {
            for j in 0..N_LOCAL {
                a[i][j] += w * (-flux[j] * jump[i] + eps * jump[j] * flux[i] + penalty * jump[i] * jump[j]);
            }
        }
    }
    Ok(a)
}

/// Pressure row `−∫_K ∇·φ_j` for the constant test function.
pub fn local_b(kernel: &ElementKernel) -> [f64; N_LOCAL] {
    let mut b = [0.0; N_LOCAL];
    for (bj, phi) in b.iter_mut().zip(&kernel.basis) {
        *bj = -kernel.area * phi.div();
    }
    b
}

/// `∫_K f·φ_j` with the degree-5 rule.
pub fn local_load(kernel: &ElementKernel, f: &dyn Fn(Point) -> Vec2) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (x, w) in TriangleRule::degree5().on(&kernel.vertices, kernel.area) {
        let fx = f(x);
        for (o, phi) in out.iter_mut().zip(&kernel.basis) {
            *o += w * dot(fx, phi.at(kernel.center, x));
        }
    }
    out
}

/// Boundary datum `g(x, n, t)`: point, outward normal, global edge tangent.
pub type BoundaryDatum<'a> = &'a dyn Fn(Point, Vec2, Vec2) -> f64;

/// Natural boundary term of edge `edge` (which must lie on the boundary).
///
/// TVNF loads the two velocity dofs with `∫_E g (v)_n`; NVTF loads the
/// multiplier with `∫_E g ṽ`.
pub fn edge_load(
    mesh: &Triangulation,
    dofmap: &DofMap,
    edge: usize,
    g: BoundaryDatum<'_>,
) -> Result<Vec<(usize, f64)>> {
    let (tri, other) = mesh.edge_triangles(edge);
    if other.is_some() {
        return Err(Error::invalid(format!("edge {edge} is interior; boundary loads need a boundary edge")));
    }
    let sign = mesh
        .tri_edges(tri)
        .iter()
        .find(|le| le.edge == edge)
        .map(|le| f64::from(le.sign))
        .ok_or_else(|| Error::Internal(format!("triangle {tri} does not list edge {edge}")))?;
    let n_global = mesh.edge_normal(edge);
    let normal = [sign * n_global[0], sign * n_global[1]];
    let tangent = mesh.edge_tangent(edge);
    let [a, b] = mesh.edge_points(edge);
    let rule = LineRule::gauss(4);
    let len = mesh.edge_length(edge);
    match dofmap.bc() {
        BoundaryCondition::Tvnf => {
            // normal trace of the node-m basis function is the Lagrange
            // polynomial through the two Gauss nodes
            let [s0, s1] = gauss2_nodes();
            let mut load = [0.0; 2];
            for (&s, &w) in rule.points.iter().zip(&rule.weights) {
                let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                let gx = g(x, normal, tangent);
                load[0] += w * len * gx * sign * (s - s1) / (s0 - s1);
                load[1] += w * len * gx * sign * (s - s0) / (s1 - s0);
            }
            Ok(vec![(dofmap.bdm_dof(edge, 0), load[0]), (dofmap.bdm_dof(edge, 1), load[1])])
        }
        BoundaryCondition::Nvtf => {
            let total: f64 = rule.on(a, b).map(|(x, w)| w * g(x, normal, tangent)).sum();
            Ok(vec![(dofmap.mult_dof(edge), total)])
        }
    }
}
