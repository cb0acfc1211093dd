//! Discrete error norms and observed convergence orders.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::ExactSolution;
use crate::fem_space::BoundaryCondition;
use crate::local_assembly::{Mat2, Vec2};
use crate::mesh::Point;
use crate::quadrature::{LineRule, TriangleRule};
use crate::system::{pressure_mean, Discretization};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    /// `|||(u − u_h, ũ − ũ_h)|||`.
    pub err_energy: f64,
    /// `|||·|||` plus `ν^{-1/2}‖p − p_h‖`.
    pub err_h: f64,
    pub err_l2_u: f64,
    pub err_l2_p: f64,
}

/// Per-element pieces of the energy norm.
#[derive(Debug, Clone, Copy, Default)]
struct Pieces {
    h1: f64,
    flux: f64,
    jump: f64,
    l2_u: f64,
}

impl std::ops::Add for Pieces {
    type Output = Pieces;
    fn add(self, o: Pieces) -> Pieces {
        Pieces {
            h1: self.h1 + o.h1,
            flux: self.flux + o.flux,
            jump: self.jump + o.jump,
            l2_u: self.l2_u + o.l2_u,
        }
    }
}

fn sub2(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn sub22(a: Mat2, b: Mat2) -> Mat2 {
    [sub2(a[0], b[0]), sub2(a[1], b[1])]
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Energy pieces of `w = u − u_h` where `u` is `exact` (or zero).
fn pieces(disc: &Discretization, x: &[f64], exact: Option<&dyn ExactSolution>) -> Pieces {
    let mesh = disc.mesh();
    let tri_rule = TriangleRule::degree5();
    let line = LineRule::gauss(4);
    let zero_u = |_: Point| [0.0; 2];
    let zero_g = |_: Point| [[0.0; 2]; 2];
    (0..mesh.n_triangles())
        .into_par_iter()
        .map(|t| {
            let k = disc.kernel(t);
            let c = disc.local_coefficients(t, x);
            let gh = k.grad(&c[..6]);
            let u = |p: Point| exact.map_or_else(|| zero_u(p), |e| e.u(p));
            let gu = |p: Point| exact.map_or_else(|| zero_g(p), |e| e.grad_u(p));
            let mut out = Pieces::default();
            for (p, w) in tri_rule.on(&k.vertices, k.area) {
                let d = sub22(gu(p), gh);
                out.h1 += w * (d[0][0].powi(2) + d[0][1].powi(2) + d[1][0].powi(2) + d[1][1].powi(2));
                let e = sub2(u(p), k.eval(&c[..6], p));
                out.l2_u += w * dot(e, e);
            }
            for (j, eg) in k.edges.iter().enumerate() {
                let mut flux = 0.0;
                let mut w_t = 0.0;
                let mut u_t = 0.0;
                for (p, w) in line.on(eg.endpoints[0], eg.endpoints[1]) {
                    let d = sub22(gu(p), gh);
                    let dn = [dot(d[0], eg.normal), dot(d[1], eg.normal)];
                    flux += w * dot(dn, dn);
                    let up = u(p);
                    w_t += w * dot(sub2(up, k.eval(&c[..6], p)), eg.tangent);
                    u_t += w * dot(up, eg.tangent);
                }
                let len = eg.length;
                // Φ⁰((w)_t − w̃) with w̃ = ũ − ũ_h and ũ the edge mean of u_t
                let jump = w_t / len - (u_t / len - c[6 + j]);
                out.flux += k.diameter * flux;
                out.jump += disc.params().tau / k.diameter * len * jump * jump;
            }
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Pieces::default(), |a, b| a + b)
}

/// `|||(v, ṽ)|||` of the discrete field stored in `x`.
pub fn energy_norm(disc: &Discretization, x: &[f64]) -> f64 {
    let p = pieces(disc, x, None);
    (disc.params().nu * (p.h1 + p.flux + p.jump)).sqrt()
}

/// Squared energy norm split as `(ν|·|²_H1, ν Σ h‖∂_n·‖², ν Σ τ/h‖Φ⁰(·)‖²)`.
pub fn energy_terms(disc: &Discretization, x: &[f64]) -> [f64; 3] {
    let p = pieces(disc, x, None);
    let nu = disc.params().nu;
    [nu * p.h1, nu * p.flux, nu * p.jump]
}

/// All error measures of the discrete solution `x` against `exact`. Under
/// NVTF both pressures are compared after removing their means.
pub fn error_norms(disc: &Discretization, x: &[f64], exact: &dyn ExactSolution) -> ErrorReport {
    let nu = disc.params().nu;
    let pc = pieces(disc, x, Some(exact));
    let err_energy = (nu * (pc.h1 + pc.flux + pc.jump)).sqrt();

    let mesh = disc.mesh();
    let dm = disc.dofmap();
    let rule = TriangleRule::degree5();
    let (shift_exact, shift_h) = if dm.bc() == BoundaryCondition::Nvtf {
        let total: f64 = (0..mesh.n_triangles())
            .map(|t| rule.on(&mesh.triangle_points(t), mesh.area(t)).map(|(p, w)| w * exact.p(p)).sum::<f64>())
            .sum();
        (total / mesh.total_area(), pressure_mean(disc, x))
    } else {
        (0.0, 0.0)
    };
    let p_sq: f64 = (0..mesh.n_triangles())
        .map(|t| {
            let ph = x[dm.pres_dof(t)] - shift_h;
            rule.on(&mesh.triangle_points(t), mesh.area(t))
                .map(|(p, w)| w * (exact.p(p) - shift_exact - ph).powi(2))
                .sum::<f64>()
        })
        .sum();
    let err_l2_p = p_sq.sqrt();
    ErrorReport {
        h: mesh.h(),
        err_energy,
        err_h: err_energy + err_l2_p / nu.sqrt(),
        err_l2_u: pc.l2_u.sqrt(),
        err_l2_p,
    }
}

/// Errors below this are rounding noise for the O(1) manufactured solutions.
pub const ROUNDOFF_ERROR: f64 = 1e-11;

/// Observed order between consecutive levels; `None` where either error is
/// at rounding level (or the mesh size did not change).
pub fn eoc(h: &[f64], err: &[f64]) -> Vec<Option<f64>> {
    h.windows(2)
        .zip(err.windows(2))
        .map(|(hh, ee)| {
            if ee[0] > ROUNDOFF_ERROR && ee[1] > ROUNDOFF_ERROR && hh[0] != hh[1] {
                Some((ee[0] / ee[1]).ln() / (hh[0] / hh[1]).ln())
            } else {
                None
            }
        })
        .collect()
}

/// Convergence table: one row per level, EOC columns empty on the first
/// level and `nan` where undefined.
pub fn convergence_csv(reports: &[ErrorReport]) -> String {
    let h: Vec<f64> = reports.iter().map(|r| r.h).collect();
    let en: Vec<f64> = reports.iter().map(|r| r.err_energy).collect();
    let l2: Vec<f64> = reports.iter().map(|r| r.err_l2_u).collect();
    let eoc_en = eoc(&h, &en);
    let eoc_l2 = eoc(&h, &l2);
    let fmt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |s| format!("{s:.4}"));
    let mut s = String::from("h,err_energy,err_h,err_l2_u,err_l2_p,eoc_energy,eoc_l2_u\n");
    for (i, r) in reports.iter().enumerate() {
        let (a, b) = if i == 0 {
            (String::new(), String::new())
        } else {
            (fmt(eoc_en[i - 1]), fmt(eoc_l2[i - 1]))
        };
        let _ = writeln!(
            s,
            "{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{a},{b}",
            r.h, r.err_energy, r.err_h, r.err_l2_u, r.err_l2_p
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eoc_examples() {
        let h = [0.1, 0.05];
        assert!((eoc(&h, &[0.1, 0.05])[0].unwrap() - 1.0).abs() < 1e-12);
        assert!((eoc(&h, &[0.04, 0.01])[0].unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(eoc(&h, &[0.3, 0.3])[0], Some(0.0));
        assert_eq!(eoc(&h, &[0.0, 0.0])[0], None);
        assert_eq!(eoc(&h, &[6.5e-14, 7.0e-14])[0], None);
        assert!(eoc(&[0.1], &[0.2]).is_empty());
    }

    #[test]
    fn csv_layout() {
        let r = ErrorReport {
            h: 0.5,
            err_energy: 1.0,
            err_h: 2.0,
            err_l2_u: 0.1,
            err_l2_p: 0.2,
        };
        let r2 = ErrorReport { h: 0.25, err_energy: 0.5, err_l2_u: 0.025, ..r };
        let csv = convergence_csv(&[r, r2]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "h,err_energy,err_h,err_l2_u,err_l2_p,eoc_energy,eoc_l2_u");
        assert!(lines[1].ends_with(",,"));
        assert!(lines[2].ends_with(",1.0000,2.0000"));
    }
}
