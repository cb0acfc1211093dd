//! Right-preconditioned GMRES with modified Gram–Schmidt Arnoldi.

use std::fmt::Write as _;

use super::{LinearOperator, Vector};
use crate::error::{Error, Result};

/// Quantity monitored for stopping.
#[derive(Debug, Clone, Copy)]
pub enum Stop<'a> {
    /// `‖b − A x_k‖₂ / ‖b‖₂ ≤ tol` (absolute if `b = 0`).
    Residual { tol: f64 },
    /// `‖x_k − x_ref‖₂ ≤ tol`.
    VsReference { tol: f64, reference: &'a [f64] },
}

impl Stop<'_> {
    pub fn tol(&self) -> f64 {
        match *self {
            Stop::Residual { tol } | Stop::VsReference { tol, .. } => tol,
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            Stop::Residual { .. } => "residual",
            Stop::VsReference { .. } => "vs_reference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GmresOptions {
    pub max_iter: usize,
    /// Restart length; `None` runs full GMRES.
    pub restart: Option<usize>,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            restart: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovReport {
    pub iterations: usize,
    /// Stop quantity before the first iteration and after each iteration.
    pub history: Vec<f64>,
    pub converged: bool,
    pub mode: &'static str,
    pub tol: f64,
}

impl KrylovReport {
    /// `iter,value` rows under a comment header.
    pub fn history_csv(&self, seed: Option<u64>) -> String {
        let mut s = String::new();
        let seed = seed.map_or_else(|| "none".to_string(), |v| v.to_string());
        let _ = writeln!(s, "# stop={} tol={:e} seed={}", self.mode, self.tol, seed);
        s.push_str("iter,value\n");
        for (k, v) in self.history.iter().enumerate() {
            let _ = writeln!(s, "{k},{v:.6e}");
        }
        s
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn check_dims(a: &dyn LinearOperator, m: &dyn LinearOperator, n: usize) -> Result<()> {
    if a.dim() != n || m.dim() != n {
        return Err(Error::Internal(format!(
            "dimension mismatch: operator {}, preconditioner {}, vector {n}",
            a.dim(),
            m.dim()
        )));
    }
    Ok(())
}

/// Modified Gram–Schmidt of `w` against `basis`, writing coefficients into
/// `col`. A second sweep runs when cancellation shrinks `w` by more than
/// `1/√2`, which keeps the basis orthonormal once the Krylov space saturates.
fn orthogonalize(w: &mut [f64], basis: &[Vector], col: &mut [f64]) -> f64 {
    let before = norm(w);
    for (i, vi) in basis.iter().enumerate() {
        col[i] = dot(w, vi);
        axpy(-col[i], vi, w);
    }
    let mut after = norm(w);
    if after < std::f64::consts::FRAC_1_SQRT_2 * before {
        for (i, vi) in basis.iter().enumerate() {
            let c = dot(w, vi);
            col[i] += c;
            axpy(-c, vi, w);
        }
        after = norm(w);
    }
    after
}

/// Back substitution with the leading `k × k` block of the rotated Hessenberg
/// matrix (stored by columns).
fn upper_solve(h: &[Vec<f64>], g: &[f64], k: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    y
}

/// Solves `A x = b` with right preconditioner `M⁻¹` starting from `x0`.
pub fn gmres(
    a: &dyn LinearOperator,
    m: &dyn LinearOperator,
    b: &[f64],
    x0: &[f64],
    stop: Stop<'_>,
    options: GmresOptions,
) -> Result<(Vector, KrylovReport)> {
    let n = b.len();
    check_dims(a, m, n)?;
    if x0.len() != n {
        return Err(Error::Internal(format!("initial guess has length {}, expected {n}", x0.len())));
    }
    if let Stop::VsReference { reference, .. } = stop {
        if reference.len() != n {
            return Err(Error::Internal("reference solution has the wrong length".into()));
        }
    }
    let tol = stop.tol();
    let bnorm = norm(b);
    let measure = |x: &[f64], res: f64| -> f64 {
        match stop {
            Stop::Residual { .. } => {
                if bnorm > 0.0 {
                    res / bnorm
                } else {
                    res
                }
            }
            Stop::VsReference { reference, .. } => {
                x.iter().zip(reference).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
            }
        }
    };

    let restart = options.restart.unwrap_or(options.max_iter).max(1);
    let mut x = x0.to_vec();
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];

    loop {
        a.apply(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let beta = norm(&r);
        if history.is_empty() {
            history.push(measure(&x, beta));
        }
        let current = *history.last().unwrap();
        if current <= tol || beta == 0.0 {
            return Ok((x, report(iterations, history, true, stop)));
        }
        if iterations >= options.max_iter {
            return Ok((x, report(iterations, history, false, stop)));
        }

        let cycle = restart.min(options.max_iter - iterations);
        let mut v: Vec<Vector> = vec![r.iter().map(|ri| ri / beta).collect()];
        let mut z: Vec<Vector> = Vec::with_capacity(cycle);
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(cycle);
        let mut cs: Vec<f64> = Vec::with_capacity(cycle);
        let mut sn: Vec<f64> = Vec::with_capacity(cycle);
        let mut g = vec![0.0; cycle + 1];
        g[0] = beta;
        let mut y = Vec::new();
        let mut done = false;

        for j in 0..cycle {
            let mut zj = vec![0.0; n];
            m.apply(&v[j], &mut zj);
            a.apply(&zj, &mut w);
            z.push(zj);
            let mut col = vec![0.0; j + 2];
            let hnext = orthogonalize(&mut w, &v, &mut col);
            col[j + 1] = hnext;
            let wnorm_scale = col.iter().fold(0.0f64, |s, c| s.max(c.abs()));

            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let d = col[j].hypot(col[j + 1]);
            let (c, s) = if d == 0.0 { (1.0, 0.0) } else { (col[j] / d, col[j + 1] / d) };
            cs.push(c);
            sn.push(s);
            col[j] = d;
            col[j + 1] = 0.0;
            g[j + 1] = -s * g[j];
            g[j] *= c;
            h.push(col);
            iterations += 1;

            let breakdown = hnext <= 1e-14 * wnorm_scale.max(f64::MIN_POSITIVE);
            y = upper_solve(&h, &g, j + 1);
            let q = match stop {
                Stop::Residual { .. } => measure(&x, g[j + 1].abs()),
                Stop::VsReference { .. } => {
                    let mut xk = x.clone();
                    for (yi, zi) in y.iter().zip(&z) {
                        axpy(*yi, zi, &mut xk);
                    }
                    measure(&xk, 0.0)
                }
            };
            history.push(q);
            if q <= tol || breakdown {
                done = true;
                break;
            }
            if j + 1 < cycle {
                v.push(w.iter().map(|wi| wi / hnext).collect());
            }
        }

        for (yi, zi) in y.iter().zip(&z) {
            axpy(*yi, zi, &mut x);
        }
        if done {
            return Ok((x, report(iterations, history, true, stop)));
        }
        if iterations >= options.max_iter {
            return Ok((x, report(iterations, history, false, stop)));
        }
    }
}

fn report(iterations: usize, history: Vec<f64>, converged: bool, stop: Stop<'_>) -> KrylovReport {
    KrylovReport {
        iterations,
        history,
        converged,
        mode: stop.mode(),
        tol: stop.tol(),
    }
}

/// `k` steps of preconditioned Arnoldi from `v0`; returns the basis
/// `v_0 … v_k` and the `(k+1) × k` Hessenberg matrix (row-major). Stops early
/// on breakdown.
pub fn arnoldi(
    a: &dyn LinearOperator,
    m: &dyn LinearOperator,
    v0: &[f64],
    k: usize,
) -> Result<(Vec<Vector>, Vec<Vec<f64>>)> {
    let n = v0.len();
    check_dims(a, m, n)?;
    let beta = norm(v0);
    if beta == 0.0 {
        return Err(Error::invalid("Arnoldi start vector is zero"));
    }
    let mut v = vec![v0.iter().map(|x| x / beta).collect::<Vector>()];
    let mut hess = vec![vec![0.0; k]; k + 1];
    let mut z = vec![0.0; n];
    let mut w = vec![0.0; n];
    for j in 0..k {
        m.apply(&v[j], &mut z);
        a.apply(&z, &mut w);
        let mut col = vec![0.0; v.len()];
        let hn = orthogonalize(&mut w, &v, &mut col);
        for (i, c) in col.into_iter().enumerate() {
            hess[i][j] = c;
        }
        hess[j + 1][j] = hn;
        if hn == 0.0 {
            break;
        }
        v.push(w.iter().map(|x| x / hn).collect());
    }
    Ok((v, hess))
}
