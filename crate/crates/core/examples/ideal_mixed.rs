//! The block-mixed state that saturates `min{log d_S, log d_R}` on a `(d-1) x d`
//! ladder, next to the maximally coherent product on the same system.

use shared_asymmetry::measures::{shared_asymmetry, upper_bound};
use shared_asymmetry::states::{build_ideal_block_state, ideal_block_system, max_coherent_product};
use shared_asymmetry::{Result, ToleranceConfig};

fn main() -> Result<()> {
    for (label, tol) in [("base 2", ToleranceConfig::default()), ("base e", ToleranceConfig::natural_log())] {
        println!("{label}");
        for d in 3..=8 {
            let system = ideal_block_system(d)?;
            let ideal = shared_asymmetry(&build_ideal_block_state(d)?, &system, &tol)?;
            let product = shared_asymmetry(&max_coherent_product(d - 1, d)?, &system, &tol)?;
            let bound = upper_bound(&system, None, &tol)?;
            println!("  d={d}: ideal {ideal:.6}  product {product:.6}  bound {bound:.6}");
        }
    }
    Ok(())
}
