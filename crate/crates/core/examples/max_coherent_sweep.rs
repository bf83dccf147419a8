//! Maximally coherent system against a growing maximally coherent reference.
//! The printed closed form is evaluated independently of the density matrices.
//!
//! ```text
//! cargo run --example max_coherent_sweep -- 3 24
//! ```

use shared_asymmetry::measures::{closed_form_max_coherent, shared_asymmetry, upper_bound};
use shared_asymmetry::{states, BipartiteSystem, Result, ToleranceConfig};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let d_s = args.next().unwrap_or(2);
    let d_max = args.next().unwrap_or(16);
    let tol = ToleranceConfig::default();

    println!("{:>4} {:>12} {:>12} {:>8}", "d_r", "A^(sh)", "closed", "bound");
    for d_r in d_s..=d_max {
        let system = BipartiteSystem::ladder(d_s, d_r)?;
        let rho = states::max_coherent_product(d_s, d_r)?;
        let a = shared_asymmetry(&rho, &system, &tol)?;
        let closed = closed_form_max_coherent(d_s, d_r, &tol)?;
        println!(
            "{d_r:>4} {a:>12.9} {closed:>12.9} {:>8.5}",
            upper_bound(&system, None, &tol)?
        );
    }
    Ok(())
}
