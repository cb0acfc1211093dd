//! Quadrature rules on triangles (barycentric) and on the unit interval.

use crate::mesh::Point;

/// Rule on a triangle: barycentric points and weights summing to one.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Gauss–Legendre rule on `[0, 1]` with weights summing to one.
#[derive(Debug, Clone)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

fn orbit3(a: f64, w: f64, pts: &mut Vec<[f64; 3]>, wts: &mut Vec<f64>) {
    let b = 1.0 - 2.0 * a;
    for p in [[a, a, b], [a, b, a], [b, a, a]] {
        pts.push(p);
        wts.push(w);
    }
}

impl TriangleRule {
    /// Six points, exact for degree 4.
    pub fn degree4() -> Self {
        let mut points = Vec::with_capacity(6);
        let mut weights = Vec::with_capacity(6);
        orbit3(0.445_948_490_915_964_886_32, 0.223_381_589_678_011_465_70, &mut points, &mut weights);
        orbit3(0.091_576_213_509_770_743_46, 0.109_951_743_655_321_867_64, &mut points, &mut weights);
        Self { points, weights }
    }

    /// Seven points, exact for degree 5.
    pub fn degree5() -> Self {
        let s15 = 15f64.sqrt();
        let mut points = vec![[1.0 / 3.0; 3]];
        let mut weights = vec![9.0 / 40.0];
        orbit3((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0, &mut points, &mut weights);
        orbit3((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0, &mut points, &mut weights);
        Self { points, weights }
    }

    /// Maps the rule onto a triangle: `(x, w·|K|)` pairs.
    pub fn on(&self, tri: &[Point; 3], area: f64) -> impl Iterator<Item = (Point, f64)> + '_ {
        let tri = *tri;
        self.points.iter().zip(&self.weights).map(move |(l, &w)| {
            let x = l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0];
            let y = l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1];
            ([x, y], w * area)
        })
    }
}

impl LineRule {
    pub fn gauss(n: usize) -> Self {
        let (pts, wts): (Vec<f64>, Vec<f64>) = match n {
            1 => (vec![0.0], vec![2.0]),
            2 => {
                let a = 1.0 / 3f64.sqrt();
                (vec![-a, a], vec![1.0, 1.0])
            }
            3 => {
                let a = (3.0f64 / 5.0).sqrt();
                (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
            }
            4 => {
                let r = 2.0 / 7.0 * (6.0f64 / 5.0).sqrt();
                let inner = (3.0 / 7.0 - r).sqrt();
                let outer = (3.0 / 7.0 + r).sqrt();
                let wi = (18.0 + 30f64.sqrt()) / 36.0;
                let wo = (18.0 - 30f64.sqrt()) / 36.0;
                (vec![-outer, -inner, inner, outer], vec![wo, wi, wi, wo])
            }
            _ => panic!("Gauss rules with 1..=4 points are available, asked for {n}"),
        };
        Self {
            points: pts.iter().map(|x| 0.5 * (1.0 + x)).collect(),
            weights: wts.iter().map(|w| 0.5 * w).collect(),
        }
    }

    /// Maps the rule onto the segment `a → b`: `(x, w·|ab|)` pairs.
    pub fn on(&self, a: Point, b: Point) -> impl Iterator<Item = (Point, f64)> + '_ {
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        self.points.iter().zip(&self.weights).map(move |(&s, &w)| {
            ([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])], w * len)
        })
    }
}

/// The two 2-point Gauss abscissae on `[0, 1]`, in increasing order.
pub fn gauss2_nodes() -> [f64; 2] {
    let a = 0.5 / 3f64.sqrt();
    [0.5 - a, 0.5 + a]
}
