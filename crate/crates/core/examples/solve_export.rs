//! One direct solve, exported as a per-triangle CSV and a MatrixMarket file.
//!
//! ```text
//! cargo run --release --example solve_export -- [n] [outdir]
//! ```

use std::path::PathBuf;

use hdg_stokes::experiments::{run_solve, RunConfig};
use hdg_stokes::system::{assemble, manufactured_data, Discretization};
use hdg_stokes::mesh::{Domain, Triangulation};
use hdg_stokes::verify::Case;

fn main() -> hdg_stokes::Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(16), |s| s.parse()).expect("n must be an integer");
    let dir = args.get(1).map_or_else(std::env::temp_dir, PathBuf::from);

    let cfg = RunConfig {
        case: Case::CurlTrig,
        n,
        ..RunConfig::default()
    };
    let csv = run_solve(&cfg)?;
    let out = dir.join("hdg_stokes_solution.csv");
    std::fs::write(&out, &csv)?;
    println!("{} rows -> {}", csv.lines().count() - 3, out.display());

    let disc = Discretization::new(Triangulation::generate(Domain::UnitSquare, n)?, cfg.bc, cfg.params()?)?;
    let sys = assemble(&disc, &manufactured_data(&cfg.case, cfg.nu, cfg.bc))?;
    let mtx = dir.join("hdg_stokes_matrix.mtx");
    sys.write_matrix_market(&mtx)?;
    println!(
        "{}x{} matrix with {} nonzeros, asymmetry {:.1e} -> {}",
        sys.dim(),
        sys.dim(),
        sys.matrix.nnz(),
        sys.matrix.asymmetry(),
        mtx.display()
    );
    Ok(())
}
