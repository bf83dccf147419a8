//! Two qubit clocks with `σ_z` charges, both in `|+>`.
//!
//! ```text
//! cargo run --example qubit_clock
//! ```

use shared_asymmetry::measures::{holevo_asymmetry, internal_coherence, shared_asymmetry};
use shared_asymmetry::operator::{partial_trace, Subsystem};
use shared_asymmetry::{states, BipartiteSystem, ChargeSpectrum, Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::default();
    let system = BipartiteSystem::new(ChargeSpectrum::sigma_z(), ChargeSpectrum::sigma_z());
    let rho = states::refbit();

    let rho_s = partial_trace(&rho, 2, 2, Subsystem::S)?;
    println!("A_G(S)      = {:.6}", holevo_asymmetry(&rho_s, &system.spectrum_s, &tol)?);
    println!("A^(sh)      = {:.6}", shared_asymmetry(&rho, &system, &tol)?);
    println!("C(S:R)      = {:.6}", internal_coherence(&rho, &system, &tol)?);
    Ok(())
}
