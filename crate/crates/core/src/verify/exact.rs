//! Closed-form Stokes solutions used for manufactured-solution studies.

use crate::error::{Error, Result};
use crate::fem_space::BoundaryCondition;
use crate::local_assembly::{Mat2, Vec2};
use crate::mesh::Point;

/// A smooth velocity/pressure pair with analytic derivatives.
pub trait ExactSolution: Send + Sync {
    fn name(&self) -> &str;
    fn u(&self, x: Point) -> Vec2;
    /// `[i][j] = ∂u_i/∂x_j`.
    fn grad_u(&self, x: Point) -> Mat2;
    fn laplace_u(&self, x: Point) -> Vec2;
    fn p(&self, x: Point) -> f64;
    fn grad_p(&self, x: Point) -> Vec2;

    /// Body force `f = −νΔu + ∇p`.
    fn f(&self, nu: f64, x: Point) -> Vec2 {
        let l = self.laplace_u(x);
        let g = self.grad_p(x);
        [-nu * l[0] + g[0], -nu * l[1] + g[1]]
    }

    /// Traction `σn = ν(∇u)n − p n`.
    fn traction(&self, nu: f64, x: Point, n: Vec2) -> Vec2 {
        let gu = self.grad_u(x);
        let p = self.p(x);
        [
            nu * (gu[0][0] * n[0] + gu[0][1] * n[1]) - p * n[0],
            nu * (gu[1][0] * n[0] + gu[1][1] * n[1]) - p * n[1],
        ]
    }

    /// Natural boundary datum: `σ_nn` for TVNF, `σ_nt` for NVTF.
    fn boundary_datum(&self, nu: f64, bc: BoundaryCondition, x: Point, n: Vec2, t: Vec2) -> f64 {
        let s = self.traction(nu, x, n);
        match bc {
            BoundaryCondition::Tvnf => s[0] * n[0] + s[1] * n[1],
            BoundaryCondition::Nvtf => s[0] * t[0] + s[1] * t[1],
        }
    }
}

/// The built-in catalogue on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// `u = curl ψ`, `ψ = 100 (1−cos((1−x)²)) sin(x²) sin(y²) (1−cos((1−y)²))`, `p = tan(xy)`.
    CurlTrig,
    /// `u = curl[x²(1−x)²y²(1−y)²]`, `p = x − y`.
    Bubble,
    /// `u = (4y(1−y), 0)`, `p = 4 − 8x`.
    Poiseuille,
    /// `u = (y, x)`, `p = 1`; lies in the discrete space.
    Linear,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::CurlTrig, Case::Bubble, Case::Poiseuille, Case::Linear];

    pub fn as_str(self) -> &'static str {
        match self {
            Case::CurlTrig => "curl_trig",
            Case::Bubble => "bubble",
            Case::Poiseuille => "poiseuille",
            Case::Linear => "linear",
        }
    }

    pub fn supports(self, bc: BoundaryCondition) -> bool {
        !matches!((self, bc), (Case::Poiseuille, BoundaryCondition::Nvtf))
    }

    pub fn check_compatible(self, bc: BoundaryCondition) -> Result<()> {
        if self.supports(bc) {
            Ok(())
        } else {
            Err(Error::invalid(format!("case `{}` cannot be run with {} boundary conditions", self.as_str(), bc)))
        }
    }
}

impl std::str::FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown case `{s}` (expected curl_trig, bubble, poiseuille or linear)")))
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `F(s)` and its first three derivatives.
type Jet = [f64; 4];

fn trig_factor(s: f64) -> Jet {
    // F = P·Q, P = 1 − cos r, r = (1−s)², Q = sin q, q = s²
    let r = (1.0 - s) * (1.0 - s);
    let r1 = -2.0 * (1.0 - s);
    let r2 = 2.0;
    let (sr, cr) = r.sin_cos();
    let p = [
        1.0 - cr,
        sr * r1,
        cr * r1 * r1 + sr * r2,
        -sr * r1 * r1 * r1 + 3.0 * cr * r1 * r2,
    ];
    let q1 = 2.0 * s;
    let (sq, cq) = (s * s).sin_cos();
    let q = [sq, cq * q1, -sq * q1 * q1 + 2.0 * cq, -cq * q1 * q1 * q1 - 6.0 * sq * q1];
    product(p, q)
}

fn product(p: Jet, q: Jet) -> Jet {
    [
        p[0] * q[0],
        p[1] * q[0] + p[0] * q[1],
        p[2] * q[0] + 2.0 * p[1] * q[1] + p[0] * q[2],
        p[3] * q[0] + 3.0 * p[2] * q[1] + 3.0 * p[1] * q[2] + p[0] * q[3],
    ]
}

fn bubble_factor(s: f64) -> Jet {
    let t = s * (1.0 - s);
    [t * t, 2.0 * s - 6.0 * s * s + 4.0 * s * s * s, 2.0 - 12.0 * s + 12.0 * s * s, -12.0 + 24.0 * s]
}

/// Velocity data of `u = c·curl(F(x)F(y))`.
fn curl_u(fx: Jet, fy: Jet, c: f64) -> Vec2 {
    [c * fx[0] * fy[1], -c * fx[1] * fy[0]]
}

fn curl_grad(fx: Jet, fy: Jet, c: f64) -> Mat2 {
    [[c * fx[1] * fy[1], c * fx[0] * fy[2]], [-c * fx[2] * fy[0], -c * fx[1] * fy[1]]]
}

fn curl_laplace(fx: Jet, fy: Jet, c: f64) -> Vec2 {
    [
        c * (fx[2] * fy[1] + fx[0] * fy[3]),
        -c * (fx[3] * fy[0] + fx[1] * fy[2]),
    ]
}

impl Case {
    fn stream(self, x: Point) -> Option<(Jet, Jet, f64)> {
        match self {
            Case::CurlTrig => Some((trig_factor(x[0]), trig_factor(x[1]), 100.0)),
            Case::Bubble => Some((bubble_factor(x[0]), bubble_factor(x[1]), 1.0)),
            _ => None,
        }
    }
}

impl ExactSolution for Case {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn u(&self, x: Point) -> Vec2 {
        match self {
            Case::Poiseuille => [4.0 * x[1] * (1.0 - x[1]), 0.0],
            Case::Linear => [x[1], x[0]],
            _ => {
                let (fx, fy, c) = self.stream(x).unwrap();
                curl_u(fx, fy, c)
            }
        }
    }

    fn grad_u(&self, x: Point) -> Mat2 {
        match self {
            Case::Poiseuille => [[0.0, 4.0 - 8.0 * x[1]], [0.0, 0.0]],
            Case::Linear => [[0.0, 1.0], [1.0, 0.0]],
            _ => {
                let (fx, fy, c) = self.stream(x).unwrap();
                curl_grad(fx, fy, c)
            }
        }
    }

    fn laplace_u(&self, x: Point) -> Vec2 {
        match self {
            Case::Poiseuille => [-8.0, 0.0],
            Case::Linear => [0.0, 0.0],
            _ => {
                let (fx, fy, c) = self.stream(x).unwrap();
                curl_laplace(fx, fy, c)
            }
        }
    }

    fn p(&self, x: Point) -> f64 {
        match self {
            Case::CurlTrig => (x[0] * x[1]).tan(),
            Case::Bubble => x[0] - x[1],
            Case::Poiseuille => 4.0 - 8.0 * x[0],
            Case::Linear => 1.0,
        }
    }

    fn grad_p(&self, x: Point) -> Vec2 {
        match self {
            Case::CurlTrig => {
                let c = (x[0] * x[1]).cos();
                let sec2 = 1.0 / (c * c);
                [x[1] * sec2, x[0] * sec2]
            }
            Case::Bubble => [1.0, -1.0],
            Case::Poiseuille => [-8.0, 0.0],
            Case::Linear => [0.0, 0.0],
        }
    }
}
