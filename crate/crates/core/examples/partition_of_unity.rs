//! Overlapping decompositions and the weights that glue local solutions
//! back together.
//!
//! ```text
//! cargo run --example partition_of_unity -- [n] [partition] [overlap]
//! ```

use hdg_stokes::fem_space::{BoundaryCondition, DofKind};
use hdg_stokes::local_assembly::Params;
use hdg_stokes::mesh::{Domain, Triangulation};
use hdg_stokes::schwarz::{decompose, Decomposition, PartitionStrategy};
use hdg_stokes::system::Discretization;

fn main() -> hdg_stokes::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(12), |s| s.parse()).expect("n must be an integer");
    let strategy: PartitionStrategy = args.get(1).map_or("bisect:5", String::as_str).parse()?;
    let overlap: usize = args.get(2).map_or(Ok(1), |s| s.parse()).expect("overlap must be an integer");

    let mesh = Triangulation::generate(Domain::UnitSquare, n)?;
    let disc = Discretization::new(mesh, BoundaryCondition::Nvtf, Params::default())?;
    let partition = decompose(disc.mesh(), &strategy)?;
    let dec = Decomposition::new(&disc, &partition, overlap)?;

    println!("{strategy}, overlap {overlap}:");
    for i in 0..dec.n_subdomains() {
        let w = dec.weights(i);
        let partial = w.iter().filter(|&&x| x > 0.0 && x < 1.0).count();
        let zero = w.iter().filter(|&&x| x == 0.0).count();
        println!(
            "  subdomain {i}: {} owned / {} overlapped triangles, {} dofs ({partial} shared, {zero} with weight 0)",
            dec.elems_0(i).len(),
            dec.elems_l(i).len(),
            dec.dofs(i).len()
        );
    }

    let sum = dec.weight_sum(disc.dofmap().n_total());
    let worst = sum.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    println!("max |Σ Rᵢᵀ Dᵢ Rᵢ - I| = {worst:.2e}");

    let dm = disc.dofmap();
    let shared_mult = (0..dec.n_subdomains())
        .flat_map(|i| dec.dofs(i).iter().zip(dec.weights(i)))
        .filter(|(&d, &w)| matches!(dm.kind(d), DofKind::Multiplier { .. }) && w > 0.0 && w < 1.0)
        .count();
    println!("{shared_mult} multiplier weights are fractional");
    Ok(())
}
