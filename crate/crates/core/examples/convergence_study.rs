//! Energy and L² convergence of the hybrid method on manufactured solutions.
//!
//! ```text
//! cargo run --release --example convergence_study -- [case] [bc] [eps] [levels]
//! ```

use hdg_stokes::fem_space::BoundaryCondition;
use hdg_stokes::local_assembly::{Params, Symmetry};
use hdg_stokes::mesh::{Domain, Triangulation};
use hdg_stokes::system::{assemble, manufactured_data, Discretization};
use hdg_stokes::verify::{convergence_csv, error_norms, Case};

fn main() -> hdg_stokes::Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    let args: Vec<String> = std::env::args().skip(1).collect();
    let case: Case = args.first().map_or("bubble", String::as_str).parse()?;
    let bc: BoundaryCondition = args.get(1).map_or("nvtf", String::as_str).parse()?;
    let eps: i32 = args.get(2).map_or(Ok(-1), |s| s.parse()).expect("eps must be -1 or 1");
    let levels: usize = args.get(3).map_or(Ok(4), |s| s.parse()).expect("levels must be an integer");
    let params = Params {
        symmetry: Symmetry::from_epsilon(eps)?,
        ..Params::default()
    };

    let mut mesh = Triangulation::generate(Domain::UnitSquare, 8)?;
    let mut reports = Vec::new();
    for level in 0..levels {
        if level > 0 {
            mesh = mesh.refine_uniform();
        }
        let disc = Discretization::new(mesh.clone(), bc, params)?;
        let sys = assemble(&disc, &manufactured_data(&case, params.nu, bc))?;
        let x = sys.solve_direct()?;
        reports.push(error_norms(&disc, &x, &case));
        eprintln!("level {level}: {} triangles, {} dofs", mesh.n_triangles(), sys.dim());
    }
    print!("{}", convergence_csv(&reports));
    Ok(())
}
