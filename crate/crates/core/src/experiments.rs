//! Batch drivers behind the command-line tool: convergence studies,
//! preconditioner comparisons, mesh statistics and solution export.
//!
//! Every driver returns its CSV as a string whose first line is a comment
//! recording the full configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fem_space::BoundaryCondition;
use crate::krylov::{gmres, lu_factor, GmresOptions, Identity, KrylovReport, LinearOperator, Stop};
use crate::local_assembly::{Params, Symmetry};
use crate::mesh::{Domain, Triangulation};
use crate::schwarz::{decompose, Decomposition, LocalOperator, PartitionStrategy, PreconditionerKind, SchwarzPreconditioner};
use crate::system::{assemble, manufactured_data, max_divergence, velocity_norm, Discretization};
use crate::verify::{convergence_csv, error_norms, Case, ErrorReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guess {
    Random,
    Zero,
}

impl std::str::FromStr for Guess {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Guess::Random),
            "zero" => Ok(Guess::Zero),
            other => Err(Error::invalid(format!("unknown initial guess `{other}` (expected random or zero)"))),
        }
    }
}

/// Preconditioner selection for a comparison run; `None` is plain GMRES.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Choice {
    None,
    Schwarz(PreconditionerKind),
}

impl Choice {
    pub fn as_str(self) -> &'static str {
        match self {
            Choice::None => "none",
            Choice::Schwarz(k) => k.as_str(),
        }
    }
}

impl std::str::FromStr for Choice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            Ok(Choice::None)
        } else {
            s.parse().map(Choice::Schwarz)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: Case,
    pub bc: BoundaryCondition,
    pub eps: i32,
    pub tau: f64,
    pub nu: f64,
    pub domain: Domain,
    /// Mesh parameter for single-mesh commands.
    pub n: usize,
    /// Coarsest mesh of a convergence study.
    pub n0: usize,
    pub levels: usize,
    pub parts: PartitionStrategy,
    pub overlap: usize,
    pub precond: Vec<Choice>,
    pub local_operator: LocalOperator,
    pub tol: f64,
    pub max_iter: usize,
    pub restart: Option<usize>,
    pub seed: u64,
    pub guess: Guess,
    pub out: Option<PathBuf>,
    pub history_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: Case::Bubble,
            bc: BoundaryCondition::Tvnf,
            eps: -1,
            tau: 6.0,
            nu: 1.0,
            domain: Domain::UnitSquare,
            n: 16,
            n0: 8,
            levels: 4,
            parts: PartitionStrategy::Uniform { px: 2, py: 2 },
            overlap: 1,
            precond: vec![
                Choice::Schwarz(PreconditionerKind::Ras),
                Choice::Schwarz(PreconditionerKind::MrasTvnf),
                Choice::Schwarz(PreconditionerKind::MrasNvtf),
            ],
            local_operator: LocalOperator::default(),
            tol: 1e-6,
            max_iter: 2000,
            restart: None,
            seed: 42,
            guess: Guess::Random,
            out: None,
            history_dir: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("bad value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn params(&self) -> Result<Params> {
        let p = Params {
            nu: self.nu,
            tau: self.tau,
            symmetry: Symmetry::from_epsilon(self.eps)?,
        };
        p.validate()?;
        Ok(p)
    }

    /// Sets one option from its textual form; keys match the long flag names
    /// (`-` and `_` are interchangeable).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "case" => self.case = value.parse()?,
            "bc" => self.bc = value.parse()?,
            "eps" => self.eps = parse_num(key, value)?,
            "tau" => self.tau = parse_num(key, value)?,
            "nu" => self.nu = parse_num(key, value)?,
            "domain" => self.domain = value.parse()?,
            "n" => self.n = parse_num(key, value)?,
            "n0" => self.n0 = parse_num(key, value)?,
            "levels" => self.levels = parse_num(key, value)?,
            "parts" => self.parts = value.parse()?,
            "overlap" => self.overlap = parse_num(key, value)?,
            "precond" => {
                self.precond = value.split(',').map(|s| s.trim().parse()).collect::<Result<_>>()?;
            }
            "mras-local" => {
                self.local_operator = match value {
                    "assembled" => LocalOperator::Assembled,
                    "restricted" => LocalOperator::Restricted,
                    other => return Err(Error::invalid(format!("unknown mras-local `{other}`"))),
                }
            }
            "tol" => self.tol = parse_num(key, value)?,
            "max-iter" => self.max_iter = parse_num(key, value)?,
            "restart" => self.restart = Some(parse_num(key, value)?),
            "seed" => self.seed = parse_num(key, value)?,
            "guess" => self.guess = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "history-dir" => self.history_dir = Some(PathBuf::from(value)),
            other => return Err(Error::invalid(format!("unknown option `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, path: Option<&Path>) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.map(Path::to_path_buf),
                line: i + 1,
                message: format!("expected key=value, found `{line}`"),
            })?;
            self.set(k, v).map_err(|e| Error::Parse {
                path: path.map(Path::to_path_buf),
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text, Some(path))
    }

    /// Rejects inconsistent settings before any work is done.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.case.check_compatible(self.bc)?;
        if self.overlap == 0 {
            return Err(Error::invalid("overlap must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if self.n == 0 || self.n0 == 0 || self.levels == 0 {
            return Err(Error::invalid("n, n0 and levels must be positive"));
        }
        if self.precond.is_empty() {
            return Err(Error::invalid("no preconditioner selected"));
        }
        Ok(())
    }

    fn domain_name(&self) -> &'static str {
        match self.domain {
            Domain::UnitSquare => "unit_square",
            Domain::TShape => "t_shape",
        }
    }

    /// One-line comment embedding the whole configuration.
    pub fn header(&self, command: &str) -> String {
        let precond: Vec<&str> = self.precond.iter().map(|c| c.as_str()).collect();
        let local = match self.local_operator {
            LocalOperator::Assembled => "assembled",
            LocalOperator::Restricted => "restricted",
        };
        format!(
            "# hdg-stokes {command} case={} bc={} eps={} tau={} nu={} domain={} n={} n0={} levels={} parts={} overlap={} precond={} mras_local={local} tol={:e} max_iter={} restart={} seed={} guess={}\n",
            self.case,
            self.bc,
            self.eps,
            self.tau,
            self.nu,
            self.domain_name(),
            self.n,
            self.n0,
            self.levels,
            self.parts,
            self.overlap,
            precond.join(","),
            self.tol,
            self.max_iter,
            self.restart.map_or_else(|| "none".into(), |r| r.to_string()),
            self.seed,
            match self.guess {
                Guess::Random => "random",
                Guess::Zero => "zero",
            },
        )
    }
}

fn unit_square_discretization(cfg: &RunConfig, n: usize) -> Result<Discretization> {
    let mesh = Triangulation::generate(Domain::UnitSquare, n)?;
    Discretization::new(mesh, cfg.bc, cfg.params()?)
}

/// Errors on the mesh sequence `n0, 2n0, …` (direct solves).
pub fn convergence_reports(cfg: &RunConfig) -> Result<Vec<ErrorReport>> {
    cfg.validate()?;
    let mut mesh = Triangulation::generate(Domain::UnitSquare, cfg.n0)?;
    let mut reports = Vec::with_capacity(cfg.levels);
    for level in 0..cfg.levels {
        if level > 0 {
            mesh = mesh.refine_uniform();
        }
        let disc = Discretization::new(mesh.clone(), cfg.bc, cfg.params()?)?;
        let sys = assemble(&disc, &manufactured_data(&cfg.case, cfg.nu, cfg.bc))?;
        let x = sys.solve_direct()?;
        reports.push(error_norms(&disc, &x, &cfg.case));
    }
    Ok(reports)
}

pub fn run_converge(cfg: &RunConfig) -> Result<String> {
    let reports = convergence_reports(cfg)?;
    Ok(cfg.header("converge") + &convergence_csv(&reports))
}

/// One preconditioned GMRES run of a comparison.
#[derive(Debug, Clone)]
pub struct PrecondRun {
    pub n_sub: usize,
    pub choice: Choice,
    pub report: KrylovReport,
}

#[derive(Debug, Clone)]
pub struct PrecondStudy {
    pub header: String,
    pub runs: Vec<PrecondRun>,
}

impl PrecondStudy {
    pub fn table_csv(&self) -> String {
        let mut s = self.header.clone();
        s.push_str("n_sub,kind,iterations,converged,final_error\n");
        for r in &self.runs {
            let _ = writeln!(
                s,
                "{},{},{},{},{:.6e}",
                r.n_sub,
                r.choice.as_str(),
                r.report.iterations,
                r.report.converged,
                r.report.history.last().copied().unwrap_or(f64::NAN)
            );
        }
        s
    }

    pub fn iterations(&self, choice: Choice) -> Option<usize> {
        self.runs.iter().find(|r| r.choice == choice).map(|r| r.report.iterations)
    }
}

pub fn initial_guess(cfg: &RunConfig, n: usize) -> Vec<f64> {
    match cfg.guess {
        Guess::Zero => vec![0.0; n],
        Guess::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
        }
    }
}

/// Assembles once, solves directly for the reference, then runs GMRES with
/// each selected preconditioner until `‖x_k − x_ref‖₂ ≤ tol`.
pub fn precond_study(cfg: &RunConfig) -> Result<PrecondStudy> {
    cfg.validate()?;
    let disc = unit_square_discretization(cfg, cfg.n)?;
    let sys = assemble(&disc, &manufactured_data(&cfg.case, cfg.nu, cfg.bc))?;
    let reference = lu_factor(&sys.matrix)?.solve_refined(&sys.matrix, &sys.rhs, 1);
    let x0 = initial_guess(cfg, sys.dim());
    let partition = decompose(disc.mesh(), &cfg.parts)?;
    let needs_dec = cfg.precond.iter().any(|c| matches!(c, Choice::Schwarz(_)));
    let dec = needs_dec.then(|| Decomposition::new(&disc, &partition, cfg.overlap)).transpose()?;
    let options = GmresOptions {
        max_iter: cfg.max_iter,
        restart: cfg.restart,
    };
    let stop = Stop::VsReference {
        tol: cfg.tol,
        reference: &reference,
    };
    let mut runs = Vec::new();
    for &choice in &cfg.precond {
        let m: Box<dyn LinearOperator> = match (choice, &dec) {
            (Choice::None, _) => Box::new(Identity(sys.dim())),
            (Choice::Schwarz(kind), Some(dec)) => {
                Box::new(SchwarzPreconditioner::new(&disc, &sys.matrix, dec, kind, cfg.local_operator)?)
            }
            (Choice::Schwarz(_), None) => unreachable!("decomposition is built whenever a Schwarz method is selected"),
        };
        let (_, report) = gmres(&sys.matrix, m.as_ref(), &sys.rhs, &x0, stop, options)?;
        runs.push(PrecondRun {
            n_sub: partition.n_parts(),
            choice,
            report,
        });
    }
    Ok(PrecondStudy {
        header: cfg.header("precond"),
        runs,
    })
}

pub fn run_precond(cfg: &RunConfig) -> Result<String> {
    Ok(precond_study(cfg)?.table_csv())
}

/// `triangles=… edges=… dofs=…` for the configured domain and boundary
/// condition.
pub fn run_info(cfg: &RunConfig) -> Result<String> {
    let mesh = Triangulation::generate(cfg.domain, cfg.n)?;
    let dm = crate::fem_space::DofMap::new(&mesh, cfg.bc);
    Ok(format!(
        "triangles={} edges={} dofs={}\n",
        mesh.n_triangles(),
        mesh.n_edges(),
        dm.n_total()
    ))
}

/// Per-triangle barycentre, velocity there and pressure.
pub fn run_solve(cfg: &RunConfig) -> Result<String> {
    if cfg.domain != Domain::UnitSquare {
        return Err(Error::invalid(
            "solve supports the unit square only; the T-shaped channel needs mixed Dirichlet/TVNF conditions, which are not implemented",
        ));
    }
    cfg.validate()?;
    let disc = unit_square_discretization(cfg, cfg.n)?;
    let sys = assemble(&disc, &manufactured_data(&cfg.case, cfg.nu, cfg.bc))?;
    let x = sys.solve_direct()?;
    let div = max_divergence(&disc, &x);
    let mut s = cfg.header("solve");
    let _ = writeln!(s, "# max_div={:.3e} velocity_norm={:.6e}", div, velocity_norm(&disc, &x));
    s.push_str("x,y,u1,u2,p\n");
    for t in 0..disc.mesh().n_triangles() {
        let k = disc.kernel(t);
        let c = disc.local_coefficients(t, &x);
        let u = k.eval(&c[..6], k.center);
        let _ = writeln!(
            s,
            "{:.6},{:.6},{:.9e},{:.9e},{:.9e}",
            k.center[0],
            k.center[1],
            u[0],
            u[1],
            x[disc.dofmap().pres_dof(t)]
        );
    }
    Ok(s)
}
