//! GMRES iterations with RAS and both MRAS variants as the number of
//! subdomains grows.
//!
//! ```text
//! cargo run --release --example precond_comparison -- [n] [overlap] [max parts per side]
//! ```

use hdg_stokes::experiments::{precond_study, Choice, RunConfig};
use hdg_stokes::schwarz::{PartitionStrategy, PreconditionerKind};

fn main() -> hdg_stokes::Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("arguments are integers"))
        .collect();
    let mut cfg = RunConfig {
        n: args.first().copied().unwrap_or(32),
        overlap: args.get(1).copied().unwrap_or(1),
        ..RunConfig::default()
    };
    cfg.precond = PreconditionerKind::ALL.into_iter().map(Choice::Schwarz).collect();
    let max_side = args.get(2).copied().unwrap_or(4);

    println!("N,ras,mras-nvtf,mras-tvnf");
    for p in 1..=max_side {
        cfg.parts = PartitionStrategy::Uniform { px: p, py: p };
        let study = precond_study(&cfg)?;
        let it = |k| study.iterations(Choice::Schwarz(k)).unwrap();
        println!(
            "{},{},{},{}",
            p * p,
            it(PreconditionerKind::Ras),
            it(PreconditionerKind::MrasNvtf),
            it(PreconditionerKind::MrasTvnf)
        );
    }
    Ok(())
}
