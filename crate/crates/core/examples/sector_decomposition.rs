//! Reads a density matrix (`{"dim", "re", "im"}`) and prints its charge sectors
//! under ladder spectra on a square split.
//!
//! ```text
//! cargo run --example sector_decomposition -- state.json
//! ```

use std::fs::File;

use shared_asymmetry::charge::decompose_internal_states;
use shared_asymmetry::operator::read_density;
use shared_asymmetry::{BipartiteSystem, Error, Result, ToleranceConfig};

fn main() -> Result<()> {
    let tol = ToleranceConfig::from_env()?;
    let rho = match std::env::args().nth(1) {
        Some(path) => read_density(File::open(&path).map_err(|e| Error::Input(format!("{path}: {e}")))?, &tol)?,
        None => shared_asymmetry::states::max_coherent_product(3, 3)?,
    };
    let d = (rho.dim() as f64).sqrt().round() as usize;
    let system = BipartiteSystem::ladder(d, d)?;
    let decomposition = decompose_internal_states(&rho, &system, &tol)?;
    println!("{}", serde_json::to_string_pretty(&decomposition)?);
    println!("total weight {:.12}", decomposition.total_weight());
    Ok(())
}
