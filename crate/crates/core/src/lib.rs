//! Shared asymmetry, internal coherence and sector entanglement for U(1)-charged
//! bipartite states.
//!
//! ```
//! use shared_asymmetry::{states, BipartiteSystem, ToleranceConfig};
//! use shared_asymmetry::measures::shared_asymmetry;
//!
//! let tol = ToleranceConfig::default();
//! let system = BipartiteSystem::ladder(2, 2).unwrap();
//! let a = shared_asymmetry(&states::ebit(), &system, &tol).unwrap();
//! assert!((a - 1.0).abs() < 1e-12);
//! ```

pub mod charge;
pub mod entanglement;
pub mod error;
pub mod measures;
pub mod operator;
pub mod scenario;
pub mod states;

pub use charge::{BipartiteSystem, ChargeSpectrum, SectorDecomposition};
pub use error::{Error, Result};
pub use operator::{DensityOperator, ToleranceConfig};
