use shared_asymmetry::measures::coherence_work_bound;
use shared_asymmetry::{states, BipartiteSystem, Result, ToleranceConfig};

/// Work extractable from internal coherence is at most `k_B T A^(sh)` (nats).
fn main() -> Result<()> {
    let tol = ToleranceConfig::default();
    let system = BipartiteSystem::ladder(2, 2)?;
    for temperature in [0.5, 1.0, 2.0] {
        let w = coherence_work_bound(&states::ebit(), &system, temperature, &tol)?;
        println!("T = {temperature}: W <= {w:.6} k_B");
    }
    Ok(())
}
