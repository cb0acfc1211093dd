//! Exact solutions, error norms and convergence orders.

mod exact;
mod norms;

pub use exact::{Case, ExactSolution};
pub use norms::{convergence_csv, energy_norm, energy_terms, eoc, error_norms, ErrorReport};
