//! Restricted additive Schwarz preconditioners.

use rayon::prelude::*;

use super::Decomposition;
use crate::error::{Error, Result};
use crate::fem_space::BoundaryCondition;
use crate::krylov::{lu_factor, Factorization, LinearOperator, SparseMatrix};
use crate::system::Discretization;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreconditionerKind {
    Ras,
    /// RAS with local problems closed by tangential-velocity conditions.
    MrasTvnf,
    /// RAS with local problems closed by normal-velocity conditions.
    MrasNvtf,
}

impl PreconditionerKind {
    pub const ALL: [PreconditionerKind; 3] =
        [PreconditionerKind::Ras, PreconditionerKind::MrasTvnf, PreconditionerKind::MrasNvtf];

    pub fn as_str(self) -> &'static str {
        match self {
            PreconditionerKind::Ras => "ras",
            PreconditionerKind::MrasTvnf => "mras-tvnf",
            PreconditionerKind::MrasNvtf => "mras-nvtf",
        }
    }

    /// Interface condition of the MRAS variants.
    pub fn interface_condition(self) -> Option<BoundaryCondition> {
        match self {
            PreconditionerKind::Ras => None,
            PreconditionerKind::MrasTvnf => Some(BoundaryCondition::Tvnf),
            PreconditionerKind::MrasNvtf => Some(BoundaryCondition::Nvtf),
        }
    }
}

impl std::str::FromStr for PreconditionerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PreconditionerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.to_ascii_lowercase().replace('_', "-"))
            .ok_or_else(|| Error::invalid(format!("unknown preconditioner `{s}` (expected ras, mras-tvnf or mras-nvtf)")))
    }
}

impl std::fmt::Display for PreconditionerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the MRAS local matrices are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalOperator {
    /// Element assembly over the overlapped subdomain only, so interface rows
    /// carry no contributions from outside triangles.
    #[default]
    Assembled,
    /// Principal submatrix of the global matrix with interface rows/columns
    /// of the interface-condition kind replaced by identity.
    Restricted,
}

struct Subdomain {
    dofs: Vec<usize>,
    weights: Vec<f64>,
    /// Local indices forced to zero by the interface condition.
    zeroed: Vec<usize>,
    /// Local system size, including an appended mean-pressure row.
    size: usize,
    factor: Factorization,
}

/// `M⁻¹ v = Σ_i R_iᵀ D_i A_i⁻¹ R_i v`.
pub struct SchwarzPreconditioner {
    kind: PreconditionerKind,
    n: usize,
    subdomains: Vec<Subdomain>,
}

impl std::fmt::Debug for SchwarzPreconditioner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SchwarzPreconditioner")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("subdomains", &self.subdomains.len())
            .finish()
    }
}

/// Local matrix of one subdomain before factorisation, plus bookkeeping.
#[derive(Debug, Clone)]
pub struct LocalProblem {
    pub matrix: SparseMatrix,
    /// Local indices eliminated by the interface condition.
    pub zeroed: Vec<usize>,
    /// Whether a local mean-pressure row was appended.
    pub augmented: bool,
}

/// Edges with exactly one adjacent triangle inside `tris_mask` that are
/// interior to the global mesh.
pub fn interface_edges(disc: &Discretization, tris_mask: &[bool]) -> Vec<usize> {
    let mesh = disc.mesh();
    (0..mesh.n_edges())
        .filter(|&e| match mesh.edge_triangles(e) {
            (a, Some(b)) => tris_mask[a] != tris_mask[b],
            _ => false,
        })
        .collect()
}

/// Local interface dofs of the kind eliminated by `ic`.
fn interface_dofs(disc: &Discretization, interface: &[usize], ic: BoundaryCondition) -> Vec<usize> {
    let dm = disc.dofmap();
    let mut out = Vec::new();
    for &e in interface {
        match ic {
            BoundaryCondition::Tvnf => out.push(dm.mult_dof(e)),
            BoundaryCondition::Nvtf => out.extend([dm.bdm_dof(e, 0), dm.bdm_dof(e, 1)]),
        }
    }
    out.sort_unstable();
    out
}

/// Builds the local matrix of subdomain `i`.
pub fn local_problem(
    disc: &Discretization,
    global: &SparseMatrix,
    dec: &Decomposition,
    i: usize,
    kind: PreconditionerKind,
    operator: LocalOperator,
) -> Result<LocalProblem> {
    let dofs = dec.dofs(i);
    let Some(ic) = kind.interface_condition() else {
        return Ok(LocalProblem {
            matrix: global.principal_submatrix(dofs),
            zeroed: Vec::new(),
            augmented: false,
        });
    };
    let mesh = disc.mesh();
    let dm = disc.dofmap();
    let mut mask = vec![false; mesh.n_triangles()];
    for &t in dec.elems_l(i) {
        mask[t] = true;
    }
    let interface = interface_edges(disc, &mask);
    let ic_dofs = interface_dofs(disc, &interface, ic);

    let mut local = vec![usize::MAX; dm.n_total()];
    for (k, &g) in dofs.iter().enumerate() {
        local[g] = k;
    }
    let mut fixed = vec![false; dofs.len()];
    for &g in &ic_dofs {
        fixed[local[g]] = true;
    }
    for (k, &g) in dofs.iter().enumerate() {
        if dm.is_constrained(g) {
            fixed[k] = true;
        }
    }

    let mut triplets: Vec<(usize, usize, f64)> = match operator {
        LocalOperator::Restricted => global.principal_submatrix(dofs).triplets().collect(),
        LocalOperator::Assembled => {
            let mut t = disc.element_triplets(dec.elems_l(i))?;
            if let Some(m) = dm.mean_dof() {
                t.extend(dec.elems_l(i).iter().flat_map(|&tri| {
                    let q = dm.pres_dof(tri);
                    let a = mesh.area(tri);
                    [(m, q, a), (q, m, a)]
                }));
            }
            t.into_iter().map(|(r, c, v)| (local[r], local[c], v)).collect()
        }
    };
    triplets.retain(|&(r, c, _)| !fixed[r] && !fixed[c]);
    triplets.extend((0..dofs.len()).filter(|&k| fixed[k]).map(|k| (k, k, 1.0)));

    // the pressure floats when no boundary edge of the subdomain leaves a
    // normal velocity free and there is no mean row to pin it
    let floating = dm.mean_dof().is_none() && {
        let mut boundary = interface.clone();
        boundary.extend(
            dec.elems_l(i)
                .iter()
                .flat_map(|&t| mesh.tri_edges(t).iter().map(|le| le.edge))
                .filter(|&e| mesh.is_boundary_edge(e)),
        );
        boundary
            .iter()
            .all(|&e| fixed[local[dm.bdm_dof(e, 0)]] && fixed[local[dm.bdm_dof(e, 1)]])
    };
    let mut size = dofs.len();
    if floating {
        let r = size;
        size += 1;
        for &t in dec.elems_l(i) {
            let q = local[dm.pres_dof(t)];
            let a = mesh.area(t);
            triplets.push((r, q, a));
            triplets.push((q, r, a));
        }
    }
    let zeroed = (0..dofs.len()).filter(|&k| fixed[k] && !dm.is_constrained(dofs[k])).collect();
    Ok(LocalProblem {
        matrix: SparseMatrix::from_triplets(size, triplets)?,
        zeroed,
        augmented: floating,
    })
}

impl SchwarzPreconditioner {
    /// Factorises every local problem (in parallel).
    pub fn new(
        disc: &Discretization,
        global: &SparseMatrix,
        dec: &Decomposition,
        kind: PreconditionerKind,
        operator: LocalOperator,
    ) -> Result<Self> {
        if global.dim() != disc.dofmap().n_total() {
            return Err(Error::Internal("global matrix does not match the dof map".into()));
        }
        let subdomains = (0..dec.n_subdomains())
            .into_par_iter()
            .map(|i| {
                let lp = local_problem(disc, global, dec, i, kind, operator)?;
                let factor = lu_factor(&lp.matrix).map_err(|e| match e {
                    Error::Factorization(m) => Error::Factorization(format!("subdomain {i} ({kind}): {m}")),
                    other => other,
                })?;
                Ok(Subdomain {
                    dofs: dec.dofs(i).to_vec(),
                    weights: dec.weights(i).to_vec(),
                    zeroed: lp.zeroed,
                    size: lp.matrix.dim(),
                    factor,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            kind,
            n: global.dim(),
            subdomains,
        })
    }

    pub fn ras(disc: &Discretization, global: &SparseMatrix, dec: &Decomposition) -> Result<Self> {
        Self::new(disc, global, dec, PreconditionerKind::Ras, LocalOperator::default())
    }

    pub fn mras(
        disc: &Discretization,
        global: &SparseMatrix,
        dec: &Decomposition,
        ic: BoundaryCondition,
    ) -> Result<Self> {
        let kind = match ic {
            BoundaryCondition::Tvnf => PreconditionerKind::MrasTvnf,
            BoundaryCondition::Nvtf => PreconditionerKind::MrasNvtf,
        };
        Self::new(disc, global, dec, kind, LocalOperator::default())
    }

    pub fn kind(&self) -> PreconditionerKind {
        self.kind
    }

    pub fn n_subdomains(&self) -> usize {
        self.subdomains.len()
    }
}

impl LinearOperator for SchwarzPreconditioner {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let parts: Vec<Vec<f64>> = self
            .subdomains
            .par_iter()
            .map(|s| {
                let mut z = vec![0.0; s.size];
                for (zk, &g) in z.iter_mut().zip(&s.dofs) {
                    *zk = x[g];
                }
                for &k in &s.zeroed {
                    z[k] = 0.0;
                }
                s.factor.solve_in_place(&mut z);
                z.truncate(s.dofs.len());
                for (zk, w) in z.iter_mut().zip(&s.weights) {
                    *zk *= w;
                }
                z
            })
            .collect();
        y.fill(0.0);
        // fixed subdomain order keeps the sum reproducible
        for (s, z) in self.subdomains.iter().zip(&parts) {
            for (&g, v) in s.dofs.iter().zip(z) {
                y[g] += v;
            }
        }
    }
}
