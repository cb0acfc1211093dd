//! Structured meshes: entity counts, refinement and the text format.
//!
//! ```text
//! cargo run --release --example mesh_info -- [n]
//! ```

use hdg_stokes::fem_space::{BoundaryCondition, DofMap};
use hdg_stokes::mesh::{Domain, Triangulation};

fn main() -> hdg_stokes::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(Ok(8), |s| s.parse()).expect("n must be an integer");
    for domain in [Domain::UnitSquare, Domain::TShape] {
        let n = if domain == Domain::TShape { n + n % 2 } else { n };
        let mesh = Triangulation::generate(domain, n)?;
        mesh.check_invariants()?;
        println!(
            "{domain:?} n={n}: {} vertices, {} triangles, {} edges ({} on the boundary), h = {:.4}, area = {}",
            mesh.n_vertices(),
            mesh.n_triangles(),
            mesh.n_edges(),
            mesh.n_boundary_edges(),
            mesh.h(),
            mesh.total_area()
        );
        for bc in [BoundaryCondition::Tvnf, BoundaryCondition::Nvtf] {
            let dm = DofMap::new(&mesh, bc);
            println!(
                "  {bc}: {} dofs, {} constrained, mean-pressure row: {}",
                dm.n_total(),
                dm.constrained_dofs().count(),
                dm.mean_dof().is_some()
            );
        }
    }

    let coarse = Triangulation::generate(Domain::UnitSquare, n)?;
    let fine = coarse.refine_uniform();
    println!("refined: {} -> {} triangles, h {:.4} -> {:.4}", coarse.n_triangles(), fine.n_triangles(), coarse.h(), fine.h());

    let path = std::env::temp_dir().join("hdg_stokes_mesh.txt");
    coarse.write(&path)?;
    let back = Triangulation::read(&path)?;
    assert_eq!(back.n_edges(), coarse.n_edges());
    println!("round trip through {}", path.display());
    Ok(())
}
