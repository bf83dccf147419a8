//! `(|0> + |g>)/√2` against a maximally coherent `d`-level reference, for every gap `g`.
//!
//! Only `n_m = d - g` sectors hold two product states, so `A^(sh) = n_m/d` bits.

use shared_asymmetry::scenario::{export, run_scenario, Format, ScenarioName, ScenarioSpec};
use shared_asymmetry::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let d = std::env::args().nth(1).map_or(8, |a| a.parse().expect("integer d"));
    let spec = ScenarioSpec::new(ScenarioName::GapSweep).with("d", d);
    let sweep = run_scenario(&spec, &ToleranceConfig::default())?;
    export(&sweep, Format::Csv, std::io::stdout().lock())?;
    eprintln!("all rows match n_m/d: {}", sweep.all_pass());
    Ok(())
}
