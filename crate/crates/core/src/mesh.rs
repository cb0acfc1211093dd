//! Conforming triangulations with edge topology.
//!
//! Edges are stored as `(lower, higher)` vertex pairs. The global unit normal of
//! an edge is the lower→higher tangent rotated by +90°, and every triangle
//! records, per local edge, whether its outward normal agrees with it.
//! Local edge `k` of triangle `[a, b, c]` is the edge opposite vertex `k`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Domains the structured generator knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    /// `(0,1)²`
    UnitSquare,
    /// `Int([0,1.5]×[0,1] ∪ [0.5,1]×[−1,0])`
    TShape,
}

impl std::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit_square" => Ok(Domain::UnitSquare),
            "t_shape" => Ok(Domain::TShape),
            other => Err(Error::invalid(format!("unknown domain `{other}`"))),
        }
    }
}

/// A triangle's view of one of its edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalEdge {
    pub edge: usize,
    /// `+1` when the triangle's outward normal equals the global edge normal.
    pub sign: i8,
}

#[derive(Debug, Clone)]
pub struct Triangulation {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    tri_edges: Vec<[LocalEdge; 3]>,
    edge_tris: Vec<(usize, Option<usize>)>,
    diameters: Vec<f64>,
    n_boundary_edges: usize,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

impl Triangulation {
    /// Builds the edge topology of a triangle soup and validates it.
    pub fn from_parts(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.iter().find(|&&v| v >= nv) {
                return Err(Error::validation(format!(
                    "triangle {t} references vertex {v}, but only {nv} vertices exist"
                )));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::validation(format!("triangle {t} repeats a vertex")));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let twice_area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            if !(twice_area > 0.0) {
                return Err(Error::validation(format!(
                    "triangle {t} is not counter-clockwise (signed area {})",
                    0.5 * twice_area
                )));
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(triangles.len() * 2);
        let mut edges = Vec::new();
        let mut edge_tris: Vec<(usize, Option<usize>)> = Vec::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [LocalEdge { edge: 0, sign: 0 }; 3];
            for (k, slot) in local.iter_mut().enumerate() {
                let a = tri[(k + 1) % 3];
                let b = tri[(k + 2) % 3];
                let key = (a.min(b), a.max(b));
                let sign = if a > b { 1 } else { -1 };
                let e = match lookup.get(&key) {
                    Some(&e) => {
                        let entry = &mut edge_tris[e];
                        if entry.1.is_some() {
                            return Err(Error::validation(format!(
                                "edge ({}, {}) is shared by more than two triangles",
                                key.0, key.1
                            )));
                        }
                        let other = entry.0;
                        let other_sign = tri_edges_sign(&tri_edges, other, e);
                        if other_sign == sign {
                            return Err(Error::validation(format!(
                                "triangles {other} and {t} overlap along edge ({}, {})",
                                key.0, key.1
                            )));
                        }
                        entry.1 = Some(t);
                        e
                    }
                    None => {
                        let e = edges.len();
                        edges.push([key.0, key.1]);
                        edge_tris.push((t, None));
                        lookup.insert(key, e);
                        e
                    }
                };
                *slot = LocalEdge { edge: e, sign };
            }
            tri_edges.push(local);
        }

        let diameters = triangles
            .iter()
            .map(|tri| {
                let [a, b, c] = tri.map(|v| vertices[v]);
                norm(sub(a, b)).max(norm(sub(b, c))).max(norm(sub(c, a)))
            })
            .collect();
        let n_boundary_edges = edge_tris.iter().filter(|e| e.1.is_none()).count();

        Ok(Self {
            vertices,
            triangles,
            edges,
            tri_edges,
            edge_tris,
            diameters,
            n_boundary_edges,
        })
    }

    /// Structured mesh of `domain` with `n` cells per unit length; every cell is
    /// split by its SW–NE diagonal.
    pub fn generate(domain: Domain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("need at least one subdivision per unit length"));
        }
        let h = 1.0 / n as f64;
        match domain {
            Domain::UnitSquare => {
                let (v, t) = structured_rectangle([0.0, 0.0], n, n, h);
                Self::from_parts(v, t)
            }
            Domain::TShape => {
                if n % 2 != 0 {
                    return Err(Error::invalid(format!(
                        "the T-shaped domain needs an even n so x = 0.5 lies on the grid (got {n})"
                    )));
                }
                let bar = structured_rectangle([0.0, 0.0], 3 * n / 2, n, h);
                let stem = structured_rectangle([0.5, -1.0], n / 2, n, h);
                let (v, t) = merge_meshes(&[bar, stem]);
                Self::from_parts(v, t)
            }
        }
    }

    /// Splits every triangle into four through its edge midpoints.
    pub fn refine_uniform(&self) -> Self {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend(self.edges.iter().map(|&[a, b]| {
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
        }));
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (tri, local) in self.triangles.iter().zip(&self.tri_edges) {
            // midpoint opposite vertex k
            let m = local.map(|le| nv + le.edge);
            let [a, b, c] = *tri;
            triangles.push([a, m[2], m[1]]);
            triangles.push([m[2], b, m[0]]);
            triangles.push([m[1], m[0], c]);
            triangles.push([m[0], m[1], m[2]]);
        }
        Self::from_parts(vertices, triangles).expect("refining a valid mesh yields a valid mesh")
    }

    /// Triangle adjacency across shared edges.
    pub fn dual_graph(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::with_capacity(3); self.triangles.len()];
        for &(a, b) in &self.edge_tris {
            if let Some(b) = b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Triangles incident to each vertex.
    pub fn vertex_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                out[v].push(t);
            }
        }
        out
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn tri_edges(&self, t: usize) -> &[LocalEdge; 3] {
        &self.tri_edges[t]
    }

    /// The one or two triangles adjacent to edge `e`.
    pub fn edge_triangles(&self, e: usize) -> (usize, Option<usize>) {
        self.edge_tris[e]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_boundary_edges(&self) -> usize {
        self.n_boundary_edges
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_tris[e].1.is_none()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    /// `diam(K)`
    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    /// Largest triangle diameter.
    pub fn h(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }

    pub fn barycenter(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn edge_points(&self, e: usize) -> [Point; 2] {
        self.edges[e].map(|v| self.vertices[v])
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edge_points(e);
        norm(sub(b, a))
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edge_points(e);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    /// Unit tangent pointing from the lower to the higher vertex id.
    pub fn edge_tangent(&self, e: usize) -> Point {
        let [a, b] = self.edge_points(e);
        let d = sub(b, a);
        let l = norm(d);
        [d[0] / l, d[1] / l]
    }

    /// Global unit normal: the tangent rotated by +90°.
    pub fn edge_normal(&self, e: usize) -> Point {
        let t = self.edge_tangent(e);
        [-t[1], t[0]]
    }

    /// Checks the topological invariants of the triangulation.
    pub fn check_invariants(&self) -> Result<()> {
        let nt = self.n_triangles();
        if 2 * self.n_edges() != 3 * nt + self.n_boundary_edges {
            return Err(Error::validation("Euler edge relation violated"));
        }
        for t in 0..nt {
            if !(self.area(t) > 0.0) {
                return Err(Error::validation(format!("triangle {t} has non-positive area")));
            }
            for le in &self.tri_edges[t] {
                let [a, b] = self.edge_points(le.edge);
                let centroid = self.barycenter(t);
                let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                let n = self.edge_normal(le.edge);
                let outward = (mid[0] - centroid[0]) * n[0] + (mid[1] - centroid[1]) * n[1] > 0.0;
                if outward != (le.sign == 1) {
                    return Err(Error::validation(format!(
                        "orientation sign of edge {} in triangle {t} is inconsistent",
                        le.edge
                    )));
                }
            }
        }
        Ok(())
    }

    /// Text serialisation: `nv nt`, then `x y` per vertex, then `i j k` per triangle.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} {}", self.n_vertices(), self.n_triangles()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{} {}", v[0], v[1]).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        parse_mesh(text, None)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        parse_mesh(&text, Some(path))
    }
}

fn tri_edges_sign(tri_edges: &[[LocalEdge; 3]], t: usize, e: usize) -> i8 {
    tri_edges[t]
        .iter()
        .find(|le| le.edge == e)
        .map(|le| le.sign)
        .expect("adjacent triangle lists the edge")
}

fn parse_mesh(text: &str, path: Option<&Path>) -> Result<Triangulation> {
    let perr = |line: usize, message: String| Error::Parse {
        path: path.map(Path::to_path_buf),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    fn fields<T: std::str::FromStr, const N: usize>(l: &str) -> Option<[T; N]> {
        let parts: Vec<T> = l.split_whitespace().map(|f| f.parse().ok()).collect::<Option<_>>()?;
        parts.try_into().ok()
    }

    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty mesh file".into()))?;
    let [nv, nt]: [usize; 2] =
        fields(header).ok_or_else(|| perr(ln, format!("expected `nv nt`, found `{header}`")))?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| perr(text.lines().count(), "unexpected end of file in vertex block".into()))?;
        let xy: [f64; 2] = fields(l).ok_or_else(|| perr(ln, format!("expected `x y`, found `{l}`")))?;
        vertices.push(xy);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| perr(text.lines().count(), "unexpected end of file in triangle block".into()))?;
        let ijk: [usize; 3] = fields(l).ok_or_else(|| perr(ln, format!("expected `i j k`, found `{l}`")))?;
        triangles.push(ijk);
    }
    if let Some((ln, l)) = lines.next() {
        return Err(perr(ln, format!("trailing content `{l}`")));
    }
    Triangulation::from_parts(vertices, triangles)
}

fn structured_rectangle(origin: Point, nx: usize, ny: usize, h: f64) -> (Vec<Point>, Vec<[usize; 3]>) {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([origin[0] + i as f64 * h, origin[1] + j as f64 * h]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v11, v01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    (vertices, triangles)
}

/// Union of meshes; vertices closer than 1e-12 collapse onto one id.
fn merge_meshes(parts: &[(Vec<Point>, Vec<[usize; 3]>)]) -> (Vec<Point>, Vec<[usize; 3]>) {
    const TOL: f64 = 1e-12;
    let key = |p: Point| ((p[0] / TOL).round() as i64, (p[1] / TOL).round() as i64);
    let mut ids: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (verts, tris) in parts {
        let map: Vec<usize> = verts
            .iter()
            .map(|&p| {
                *ids.entry(key(p)).or_insert_with(|| {
                    vertices.push(p);
                    vertices.len() - 1
                })
            })
            .collect();
        triangles.extend(tris.iter().map(|t| t.map(|v| map[v])));
    }
    (vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_one_cell() {
        let m = Triangulation::generate(Domain::UnitSquare, 1).unwrap();
        assert_eq!(m.n_vertices(), 4);
        assert_eq!(m.n_triangles(), 2);
        assert_eq!(m.n_edges(), 5);
        assert_eq!(m.n_boundary_edges(), 4);
        m.check_invariants().unwrap();
    }

    #[test]
    fn zero_subdivisions_rejected() {
        assert!(matches!(
            Triangulation::generate(Domain::UnitSquare, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn large_mesh_triangle_count() {
        let m = Triangulation::generate(Domain::UnitSquare, 250).unwrap();
        assert_eq!(m.n_triangles(), 125_000);
        assert_eq!(m.n_edges(), 188_000);
    }

    #[test]
    fn t_shape_cell_count() {
        // bar: 3 x 2 cells, stem: 1 x 2 cells at h = 1/2
        let m = Triangulation::generate(Domain::TShape, 2).unwrap();
        assert_eq!(m.n_triangles(), 2 * (6 + 2));
        assert!((m.total_area() - 2.0).abs() < 1e-12);
        m.check_invariants().unwrap();
        assert!(Triangulation::generate(Domain::TShape, 3).is_err());
    }

    #[test]
    fn refinement_counts() {
        let m = Triangulation::generate(Domain::UnitSquare, 1).unwrap();
        let r = m.refine_uniform();
        assert_eq!(r.n_triangles(), 8);
        assert_eq!(r.n_edges(), 2 * 5 + 3 * 2);
        assert_eq!(r.refine_uniform().n_triangles(), 32);
        r.check_invariants().unwrap();
    }

    #[test]
    fn refined_square_matches_finer_structured_mesh() {
        let r = Triangulation::generate(Domain::UnitSquare, 2).unwrap().refine_uniform();
        let s = Triangulation::generate(Domain::UnitSquare, 4).unwrap();
        assert_eq!(r.n_triangles(), s.n_triangles());
        assert_eq!(r.n_edges(), s.n_edges());
        assert_eq!(r.n_vertices(), s.n_vertices());
        let key = |m: &Triangulation| {
            let mut v: Vec<(i64, i64)> = (0..m.n_edges())
                .map(|e| {
                    let p = m.edge_midpoint(e);
                    ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64)
                })
                .collect();
            v.sort_unstable();
            v
        };
        assert_eq!(key(&r), key(&s));
    }

    #[test]
    fn dual_graph_small_meshes() {
        let m = Triangulation::generate(Domain::UnitSquare, 1).unwrap();
        assert_eq!(m.dual_graph(), vec![vec![1], vec![0]]);

        let m = Triangulation::generate(Domain::UnitSquare, 2).unwrap();
        let g = m.dual_graph();
        let interior = (0..m.n_edges()).filter(|&e| !m.is_boundary_edge(e)).count();
        assert_eq!(g.iter().map(Vec::len).sum::<usize>(), 2 * interior);
        // the two triangles touching the SW corner (0,0) and the NE corner (1,1)
        for corner in [[0.0, 0.0], [1.0, 1.0]] {
            for t in 0..m.n_triangles() {
                if m.triangle_points(t).contains(&corner) {
                    assert!(g[t].len() <= 2, "corner triangle {t} has degree {}", g[t].len());
                }
            }
        }
        for (t, nbrs) in g.iter().enumerate() {
            for &s in nbrs {
                assert!(g[s].contains(&t));
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let m = Triangulation::generate(Domain::TShape, 4).unwrap();
        let back = Triangulation::from_text(&m.to_text()).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.edges(), m.edges());
    }

    #[test]
    fn malformed_files() {
        let bad_index = "3 1\n0 0\n1 0\n0 1\n0 1 3\n";
        assert!(matches!(Triangulation::from_text(bad_index), Err(Error::Validation(_))));

        let three_way = "5 3\n0 0\n1 0\n0 1\n-1 0\n0 -1\n0 1 2\n0 2 3\n1 0 4\n";
        // edge (0,1) appears twice, (0,2) twice; add a fan making (0,2) thrice
        let fan = "6 3\n0 0\n1 0\n0 1\n-1 0\n1 1\n-1 1\n0 1 2\n0 2 3\n0 4 2\n";
        assert!(Triangulation::from_text(three_way).is_ok());
        assert!(matches!(Triangulation::from_text(fan), Err(Error::Validation(_))));

        let garbage = "3 1\n0 0\n1 zero\n0 1\n0 1 2\n";
        match Triangulation::from_text(garbage) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn clockwise_triangle_rejected() {
        let cw = "3 1\n0 0\n0 1\n1 0\n0 1 2\n";
        assert!(matches!(Triangulation::from_text(cw), Err(Error::Validation(_))));
    }
}
