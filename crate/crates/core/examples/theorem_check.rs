//! Shared asymmetry against the weighted relative entropy of entanglement of the
//! sector internal states, over seeded random states.
//!
//! ```text
//! cargo run --example theorem_check -- 500 42
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shared_asymmetry::entanglement::{verify_theorem, THEOREM_TOL};
use shared_asymmetry::states::{random_state_with, RandomKind};
use shared_asymmetry::{BipartiteSystem, Result, ToleranceConfig};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let samples: usize = args.next().map_or(100, |a| a.parse().expect("sample count"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed"));
    let tol = ToleranceConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for kind in RandomKind::ALL {
        let mut worst = 0.0f64;
        for (d_s, d_r) in [(2, 2), (2, 3), (3, 3), (3, 4), (4, 4)] {
            let system = BipartiteSystem::ladder(d_s, d_r)?;
            for _ in 0..samples {
                let rho = random_state_with(&system, kind, &mut rng)?;
                worst = worst.max(verify_theorem(&rho, &system, &tol)?.difference);
            }
        }
        println!("{:<12} max |difference| = {worst:.2e} (tolerance {THEOREM_TOL:e})", kind.name());
    }
    Ok(())
}
