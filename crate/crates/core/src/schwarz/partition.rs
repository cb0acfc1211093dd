//! Non-overlapping element partitions.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh::Triangulation;

/// How to split the triangles into subdomains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionStrategy {
    /// `px × py` boxes over the bounding box, triangles assigned by barycentre.
    Uniform { px: usize, py: usize },
    /// Recursive coordinate bisection of triangle barycentres into `n` parts.
    Bisect(usize),
    /// One part id per line, one line per triangle (METIS `.epart` layout).
    File(PathBuf),
}

impl std::str::FromStr for PartitionStrategy {
    type Err = Error;

    /// `uniform:PXxPY`, `bisect:N` or `file:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad partition `{s}` (expected uniform:PXxPY, bisect:N or file:PATH)"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "uniform" => {
                let (a, b) = arg.split_once(['x', 'X']).ok_or_else(bad)?;
                let px = a.trim().parse().map_err(|_| bad())?;
                let py = b.trim().parse().map_err(|_| bad())?;
                if px == 0 || py == 0 {
                    return Err(bad());
                }
                Ok(PartitionStrategy::Uniform { px, py })
            }
            "bisect" => match arg.trim().parse() {
                Ok(n) if n > 0 => Ok(PartitionStrategy::Bisect(n)),
                _ => Err(bad()),
            },
            "file" if !arg.is_empty() => Ok(PartitionStrategy::File(PathBuf::from(arg))),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for PartitionStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PartitionStrategy::Uniform { px, py } => write!(f, "uniform:{px}x{py}"),
            PartitionStrategy::Bisect(n) => write!(f, "bisect:{n}"),
            PartitionStrategy::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Part id of every triangle; every part is non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<usize>,
    n_parts: usize,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let n_parts = parts.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![0usize; n_parts];
        for &p in &parts {
            counts[p] += 1;
        }
        if let Some(empty) = counts.iter().position(|&c| c == 0) {
            return Err(Error::validation(format!("part {empty} of {n_parts} is empty")));
        }
        if parts.is_empty() {
            return Err(Error::validation("partition of an empty mesh"));
        }
        Ok(Self { parts, n_parts })
    }

    pub fn single(n_tris: usize) -> Result<Self> {
        Self::new(vec![0; n_tris])
    }

    pub fn n_parts(&self) -> usize {
        self.n_parts
    }

    pub fn part_of(&self, t: usize) -> usize {
        self.parts[t]
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Triangles of each part, increasing.
    pub fn elements(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_parts];
        for (t, &p) in self.parts.iter().enumerate() {
            out[p].push(t);
        }
        out
    }

    pub fn to_text(&self) -> String {
        self.parts.iter().map(|p| format!("{p}\n")).collect()
    }

    pub fn from_text(text: &str, path: Option<&Path>, n_tris: usize) -> Result<Self> {
        let mut parts = Vec::with_capacity(n_tris);
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let p = line.parse::<usize>().map_err(|e| Error::Parse {
                path: path.map(Path::to_path_buf),
                line: i + 1,
                message: format!("bad part id `{line}`: {e}"),
            })?;
            parts.push(p);
        }
        if parts.len() != n_tris {
            return Err(Error::validation(format!(
                "partition lists {} triangles but the mesh has {n_tris}",
                parts.len()
            )));
        }
        Self::new(parts)
    }
}

pub fn decompose(mesh: &Triangulation, strategy: &PartitionStrategy) -> Result<Partition> {
    match strategy {
        PartitionStrategy::Uniform { px, py } => uniform(mesh, *px, *py),
        PartitionStrategy::Bisect(n) => bisect(mesh, *n),
        PartitionStrategy::File(path) => {
            let text = std::fs::read_to_string(path)?;
            Partition::from_text(&text, Some(path), mesh.n_triangles())
        }
    }
}

fn bounding_box(mesh: &Triangulation) -> [f64; 4] {
    mesh.vertices().iter().fold(
        [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY],
        |b, v| [b[0].min(v[0]), b[1].min(v[1]), b[2].max(v[0]), b[3].max(v[1])],
    )
}

fn uniform(mesh: &Triangulation, px: usize, py: usize) -> Result<Partition> {
    if px == 0 || py == 0 {
        return Err(Error::invalid("uniform partition needs px, py ≥ 1"));
    }
    let [x0, y0, x1, y1] = bounding_box(mesh);
    let cell = |v: f64, lo: f64, hi: f64, n: usize| -> usize {
        let f = ((v - lo) / (hi - lo) * n as f64).floor();
        (f.max(0.0) as usize).min(n - 1)
    };
    let parts = (0..mesh.n_triangles())
        .map(|t| {
            let c = mesh.barycenter(t);
            cell(c[0], x0, x1, px) + px * cell(c[1], y0, y1, py)
        })
        .collect();
    Partition::new(parts)
}

fn bisect(mesh: &Triangulation, n: usize) -> Result<Partition> {
    if n == 0 {
        return Err(Error::invalid("bisection needs at least one part"));
    }
    if n > mesh.n_triangles() {
        return Err(Error::invalid(format!("cannot split {} triangles into {n} parts", mesh.n_triangles())));
    }
    let centres: Vec<[f64; 2]> = (0..mesh.n_triangles()).map(|t| mesh.barycenter(t)).collect();
    let mut parts = vec![0; centres.len()];
    let mut next = 0;
    let all: Vec<usize> = (0..centres.len()).collect();
    split(&centres, all, n, &mut next, &mut parts);
    Partition::new(parts)
}

fn split(centres: &[[f64; 2]], mut tris: Vec<usize>, n: usize, next: &mut usize, parts: &mut [usize]) {
    if n == 1 {
        for t in tris {
            parts[t] = *next;
        }
        *next += 1;
        return;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &t in &tris {
        for k in 0..2 {
            lo[k] = lo[k].min(centres[t][k]);
            hi[k] = hi[k].max(centres[t][k]);
        }
    }
    let axis = usize::from(hi[1] - lo[1] > hi[0] - lo[0]);
    tris.sort_by(|&a, &b| {
        centres[a][axis]
            .total_cmp(&centres[b][axis])
            .then(centres[a][1 - axis].total_cmp(&centres[b][1 - axis]))
            .then(a.cmp(&b))
    });
    let n1 = n / 2;
    let cut = (tris.len() * n1 + n / 2) / n;
    let right = tris.split_off(cut);
    split(centres, tris, n1, next, parts);
    split(centres, right, n - n1, next, parts);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Domain;

    fn square(n: usize) -> Triangulation {
        Triangulation::generate(Domain::UnitSquare, n).unwrap()
    }

    fn sizes(p: &Partition) -> Vec<usize> {
        p.elements().iter().map(Vec::len).collect()
    }

    #[test]
    fn uniform_splits() {
        let p = decompose(&square(2), &PartitionStrategy::Uniform { px: 2, py: 1 }).unwrap();
        assert_eq!(sizes(&p), vec![4, 4]);
        let p = decompose(&square(4), &PartitionStrategy::Uniform { px: 2, py: 2 }).unwrap();
        assert_eq!(sizes(&p), vec![8, 8, 8, 8]);
    }

    #[test]
    fn bisection_is_balanced() {
        let mesh = square(20);
        for n in [2, 3, 5, 7] {
            let p = decompose(&mesh, &PartitionStrategy::Bisect(n)).unwrap();
            assert_eq!(p.n_parts(), n);
            let ideal = mesh.n_triangles() as f64 / n as f64;
            for s in sizes(&p) {
                assert!((s as f64) >= 0.8 * ideal && (s as f64) <= 1.2 * ideal);
            }
        }
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("uniform:3x2".parse::<PartitionStrategy>().unwrap(), PartitionStrategy::Uniform { px: 3, py: 2 });
        assert_eq!("bisect:5".parse::<PartitionStrategy>().unwrap(), PartitionStrategy::Bisect(5));
        assert_eq!("file:a.epart".parse::<PartitionStrategy>().unwrap(), PartitionStrategy::File("a.epart".into()));
        for bad in ["uniform:3", "bisect:0", "metis:4", "uniform:0x2", "file:"] {
            assert!(bad.parse::<PartitionStrategy>().is_err(), "{bad}");
        }
    }

    #[test]
    fn file_round_trip_and_errors() {
        let mesh = square(2);
        let p = decompose(&mesh, &PartitionStrategy::Uniform { px: 2, py: 2 }).unwrap();
        let back = Partition::from_text(&p.to_text(), None, mesh.n_triangles()).unwrap();
        assert_eq!(back, p);
        assert!(matches!(Partition::from_text("0\n1\n", None, 8), Err(Error::Validation(_))));
        assert!(matches!(Partition::from_text("0\n2\n0\n0\n0\n0\n0\n0\n", None, 8), Err(Error::Validation(_))));
        assert!(matches!(Partition::from_text("0\nx\n", None, 2), Err(Error::Parse { line: 2, .. })));
    }
}
