//! Numerical minimization of `S(ρ||σ)` over separable `σ`, compared with the
//! closed form `S(diag ρ) - S(ρ)` for random sector states.
//!
//! Restarts default to 8 here; the CLI default is 32.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shared_asymmetry::entanglement::{
    oracle_min_relative_entropy, relative_entropy_entanglement, OracleConfig, SectorState,
};
use shared_asymmetry::states::random_mixed;
use shared_asymmetry::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let restarts = std::env::args().nth(1).map_or(8, |a| a.parse().expect("restart count"));
    let tol = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [2, 3, 3] {
        let state = SectorState::new(random_mixed(n, &mut rng))?;
        let closed = relative_entropy_entanglement(&state, &tol)?;
        let (rho, d1, d2) = state.embed();
        let config = OracleConfig::for_dims(d1, d2, 0).with_restarts(restarts);
        let found = oracle_min_relative_entropy(&rho, d1, d2, &config, &tol)?;
        println!(
            "n={n}: closed {closed:.8}  oracle {:.8}  gap <= {:.1e}  converged {} ({} of {} restarts did not)",
            found.value, found.gap, found.converged, found.unconverged_restarts, found.restarts
        );
    }
    Ok(())
}
