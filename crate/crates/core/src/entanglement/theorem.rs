use serde::Serialize;

use super::sector_state::{relative_entropy_entanglement, SectorState};
use crate::charge::{decompose_internal_states, BipartiteSystem};
use crate::error::Result;
use crate::measures::shared_asymmetry;
use crate::operator::{DensityOperator, ToleranceConfig};

/// Largest accepted `|A^(sh) - Σ w_M E_R(ρ_M)|`.
pub const THEOREM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub shared_asymmetry: f64,
    pub sector_sum: f64,
    pub difference: f64,
}

impl TheoremCheck {
    pub fn holds(&self) -> bool {
        self.difference <= THEOREM_TOL
    }
}

/// Shared asymmetry against the weighted entanglement of the sector internal states.
///
/// The two sides are computed independently: the left from global and local
/// dephasing of the full state, the right from the closed-form `E_R` of each
/// normalized sector block.
pub fn verify_theorem(
    rho: &DensityOperator,
    system: &BipartiteSystem,
    tol: &ToleranceConfig,
) -> Result<TheoremCheck> {
    let lhs = shared_asymmetry(rho, system, tol)?;
    let decomposition = decompose_internal_states(rho, system, tol)?;
    let mut rhs = 0.0;
    for sector in &decomposition.sectors {
        let state = SectorState::from_sector(sector)?;
        rhs += sector.weight * relative_entropy_entanglement(&state, tol)?;
    }
    Ok(TheoremCheck {
        shared_asymmetry: lhs,
        sector_sum: rhs,
        difference: (lhs - rhs).abs(),
    })
}
