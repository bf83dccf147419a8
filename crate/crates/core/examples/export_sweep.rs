//! Runs every named scenario at its defaults and writes JSON and CSV next to each other.
//!
//! ```text
//! cargo run --example export_sweep -- out/
//! ```

use std::fs::{self, File};
use std::path::PathBuf;

use shared_asymmetry::scenario::{export, run_scenario, Format, ScenarioName, ScenarioSpec};
use shared_asymmetry::{Result, ToleranceConfig};

fn main() -> Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sweeps".into()));
    fs::create_dir_all(&dir)?;
    let tol = ToleranceConfig::from_env()?;
    for name in ScenarioName::ALL {
        let sweep = run_scenario(&ScenarioSpec::new(name), &tol)?;
        for (format, ext) in [(Format::Json, "json"), (Format::Csv, "csv")] {
            export(&sweep, format, File::create(dir.join(format!("{name}.{ext}")))?)?;
        }
        println!("{name}: {} rows, {} failing", sweep.rows.len(), sweep.failures().len());
    }
    Ok(())
}
