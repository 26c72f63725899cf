//! Eigenphases of the quantized map, degeneracies, the quantum period, and
//! scarred quasi-eigenstates.

mod degeneracy;
mod diag;
mod period;
mod scar;

pub use degeneracy::{
    degeneracy_clusters, eigenphase_csv, project_degenerate, project_onto_phase, Cluster,
    DegeneracyReport, Projection, DEFAULT_DEGENERACY_TOL,
};
pub use diag::{diagonalize, EigenDecomposition};
pub use period::{circular_distance, integer_period, order_mod, quantum_period, QuantumPeriod, PERIOD_TOL};
pub use scar::{scarred_state, scarred_state_at, scarred_state_with, ScarredState};
