//! Relative entropy of entanglement for charge-sector states.

mod oracle;
mod sector_state;
mod theorem;

pub use oracle::{oracle_min_relative_entropy, OracleConfig, OracleResult, MAX_LOCAL_DIM};
pub use sector_state::{
    closest_separable_diagonal, g_factor, gradient_condition_value, relative_entropy_entanglement, sector_states,
    AnsatzComponent, ComplexVectorJson, ComponentRecord, SectorState, SeparableAnsatz, CAUCHY_SCHWARZ_TOL,
    DEGENERATE_DIAGONAL_TOL,
};
pub use theorem::{verify_theorem, TheoremCheck, THEOREM_TOL};
