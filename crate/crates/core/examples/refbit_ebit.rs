//! Refbit `|+>|+>` and ebit `(|01> + |10>)/√2`, with their sector decompositions.

use shared_asymmetry::charge::decompose_internal_states;
use shared_asymmetry::entanglement::{relative_entropy_entanglement, SectorState};
use shared_asymmetry::measures::shared_asymmetry;
use shared_asymmetry::{states, BipartiteSystem, Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();
    let system = BipartiteSystem::ladder(2, 2)?;
    let (refbit, ebit) = states::build_refbit_and_ebit();
    for (name, rho) in [("refbit", refbit), ("ebit", ebit)] {
        println!("{name}: A^(sh) = {}", shared_asymmetry(&rho, &system, &tol)?);
        for sector in decompose_internal_states(&rho, &system, &tol)?.sectors {
            let e_r = relative_entropy_entanglement(&SectorState::from_sector(&sector)?, &tol)?;
            println!("  M={} weight {:.3} E_R {:.3}", sector.charge, sector.weight, e_r);
        }
    }
    Ok(())
}
