//! The analytic test cases: data they induce and how well the discrete
//! space interpolates them.
//!
//! ```text
//! cargo run --example manufactured_solutions -- [n]
//! ```

use hdg_stokes::fem_space::BoundaryCondition;
use hdg_stokes::local_assembly::Params;
use hdg_stokes::mesh::{Domain, Triangulation};
use hdg_stokes::system::{interpolate, max_divergence, Discretization};
use hdg_stokes::verify::{error_norms, Case, ExactSolution};

fn main() -> hdg_stokes::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(Ok(16), |s| s.parse()).expect("n must be an integer");
    let x = [0.3, 0.7];
    for case in Case::ALL {
        let u = case.u(x);
        let f = case.f(1.0, x);
        let du = case.grad_u(x);
        println!(
            "{case}: u{x:?} = ({:.4}, {:.4}), p = {:.4}, f = ({:.4}, {:.4}), div u = {:.1e}",
            u[0],
            u[1],
            case.p(x),
            f[0],
            f[1],
            du[0][0] + du[1][1]
        );
        for bc in [BoundaryCondition::Tvnf, BoundaryCondition::Nvtf] {
            if !case.supports(bc) {
                println!("  {bc}: not available");
                continue;
            }
            let mesh = Triangulation::generate(Domain::UnitSquare, n)?;
            let disc = Discretization::new(mesh, bc, Params::default())?;
            let xi = interpolate(&disc, &case);
            let r = error_norms(&disc, &xi, &case);
            println!(
                "  {bc}: interpolation error energy {:.3e}, L² velocity {:.3e}, max |div| {:.1e}",
                r.err_energy,
                r.err_l2_u,
                max_divergence(&disc, &xi)
            );
        }
    }
    Ok(())
}
