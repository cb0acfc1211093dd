//! GMRES on a saddle-point system with and without a preconditioner, using
//! both stopping rules.
//!
//! ```text
//! cargo run --release --example gmres_basics -- [n]
//! ```

use hdg_stokes::fem_space::BoundaryCondition;
use hdg_stokes::krylov::{gmres, lu_factor, GmresOptions, Identity, Stop};
use hdg_stokes::local_assembly::Params;
use hdg_stokes::mesh::{Domain, Triangulation};
use hdg_stokes::schwarz::{decompose, Decomposition, PartitionStrategy, SchwarzPreconditioner};
use hdg_stokes::system::{assemble, manufactured_data, Discretization};
use hdg_stokes::verify::Case;

fn main() -> hdg_stokes::Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    let n: usize = std::env::args().nth(1).map_or(Ok(12), |s| s.parse()).expect("n must be an integer");
    let bc = BoundaryCondition::Nvtf;
    let disc = Discretization::new(Triangulation::generate(Domain::UnitSquare, n)?, bc, Params::default())?;
    let sys = assemble(&disc, &manufactured_data(&Case::Bubble, 1.0, bc))?;
    let reference = lu_factor(&sys.matrix)?.solve_refined(&sys.matrix, &sys.rhs, 1);
    let x0 = vec![0.0; sys.dim()];

    let partition = decompose(disc.mesh(), &PartitionStrategy::Uniform { px: 2, py: 2 })?;
    let dec = Decomposition::new(&disc, &partition, 1)?;
    let ras = SchwarzPreconditioner::ras(&disc, &sys.matrix, &dec)?;
    let none = Identity(sys.dim());

    let options = GmresOptions::default();
    for (name, stop) in [
        ("residual", Stop::Residual { tol: 1e-8 }),
        ("error vs reference", Stop::VsReference { tol: 1e-6, reference: &reference }),
    ] {
        let (_, plain) = gmres(&sys.matrix, &none, &sys.rhs, &x0, stop, options)?;
        let (_, pre) = gmres(&sys.matrix, &ras, &sys.rhs, &x0, stop, options)?;
        println!("{name}: unpreconditioned {} iterations, RAS {} iterations", plain.iterations, pre.iterations);
    }

    let stop = Stop::VsReference { tol: 1e-6, reference: &reference };
    let (_, report) = gmres(&sys.matrix, &ras, &sys.rhs, &x0, stop, options)?;
    print!("{}", report.history_csv(None));
    Ok(())
}
