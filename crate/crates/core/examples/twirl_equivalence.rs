//! Discrete U(1) twirl against sector projection. With more phases than the
//! charge range the average is exact; one phase fewer and it is not.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shared_asymmetry::charge::{default_twirl_points, dephase_global, twirl_phase_average};
use shared_asymmetry::states::{random_state_with, RandomKind};
use shared_asymmetry::{BipartiteSystem, Result};

fn main() -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let system = BipartiteSystem::ladder(3, 4)?;
    let rho = random_state_with(&system, RandomKind::Mixed, &mut rng)?;
    let projected = dephase_global(&rho, &system)?;
    let exact = default_twirl_points(&system);
    for points in 1..=exact + 2 {
        let diff = twirl_phase_average(&rho, &system, points)?.max_abs_diff(&projected);
        println!("{points:>2} phases: max |difference| {diff:.2e}");
    }
    Ok(())
}
