//! Overlapping domain decomposition: partitions, overlap, partition of unity,
//! and the RAS/MRAS preconditioners.

mod decomposition;
mod partition;
mod precond;

pub use decomposition::{add_overlap, attached_dofs, Decomposition};
pub use partition::{decompose, Partition, PartitionStrategy};
pub use precond::{interface_edges, local_problem, LocalOperator, LocalProblem, PreconditionerKind, SchwarzPreconditioner};
