//! Named states and seeded random populations.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::charge::{dephase_global, BipartiteSystem};
use crate::error::{Error, Result};
use crate::operator::{tensor_product, CMatrix, CVector, DensityOperator, ToleranceConfig};

/// `(1/√d) Σ_m |m>` as a density operator; every entry is `1/d`.
pub fn build_maximally_coherent(d: usize) -> Result<DensityOperator> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    DensityOperator::pure_real(&vec![1.0; d])
}

/// `(|0> + |gap_target>)/√2` inside a `d`-level ladder.
pub fn build_gap_qubit(d: usize, gap_target: usize) -> Result<DensityOperator> {
    if d < 2 || gap_target == 0 || gap_target >= d {
        return Err(Error::InvalidArgument(format!(
            "gap target must lie in [1, {}], got {gap_target}",
            d.saturating_sub(1)
        )));
    }
    let mut amps = vec![0.0; d];
    amps[0] = 1.0;
    amps[gap_target] = 1.0;
    DensityOperator::pure_real(&amps)
}

/// `|+><+| ⊗ |+><+|`.
pub fn refbit() -> DensityOperator {
    DensityOperator::pure_real(&[1.0; 4]).expect("nonzero amplitudes")
}

/// `|ψ+><ψ+|` with `ψ+ = (|01> + |10>)/√2`.
pub fn ebit() -> DensityOperator {
    DensityOperator::pure_real(&[0.0, 1.0, 1.0, 0.0]).expect("nonzero amplitudes")
}

/// Refbit and ebit, both on qubits with ladder spectra `[0, 1]`.
pub fn build_refbit_and_ebit() -> (DensityOperator, DensityOperator) {
    (refbit(), ebit())
}

/// Maximally coherent `d_s`-level system times maximally coherent `d_r`-level reference.
pub fn max_coherent_product(d_s: usize, d_r: usize) -> Result<DensityOperator> {
    let tol = ToleranceConfig::default();
    tensor_product(
        &build_maximally_coherent(d_s)?,
        &build_maximally_coherent(d_r)?,
        &tol,
    )
}

/// The saturating mixed state on a `(d-1) x d` ladder system: normalized all-ones
/// blocks on the two sectors of rank `d-1` (`M = d-2` and `M = d-1`), zero elsewhere.
pub fn build_ideal_block_state(d: usize) -> Result<DensityOperator> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("ideal block state needs d >= 3, got {d}")));
    }
    let system = ideal_block_system(d)?;
    let n = system.dim();
    let scale = 1.0 / (2.0 * (d - 1) as f64);
    let support = |i: usize| {
        let m = system.total_charge(i);
        (m == d as i64 - 2 || m == d as i64 - 1).then_some(m)
    };
    Ok(DensityOperator::from_trusted(CMatrix::from_fn(n, n, |i, j| {
        match (support(i), support(j)) {
            (Some(a), Some(b)) if a == b => Complex64::new(scale, 0.0),
            _ => Complex64::new(0.0, 0.0),
        }
    })))
}

/// Ladder spectra `[0..d-1)` and `[0..d)` used by [`build_ideal_block_state`].
pub fn ideal_block_system(d: usize) -> Result<BipartiteSystem> {
    BipartiteSystem::ladder(d.saturating_sub(1), d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomKind {
    /// Normalized complex Gaussian vector.
    Pure,
    /// `G G† / Tr(G G†)` for a square complex Gaussian `G`.
    Mixed,
    /// Globally dephased mixed draw.
    BlockMixed,
}

impl RandomKind {
    pub const ALL: [RandomKind; 3] = [RandomKind::Pure, RandomKind::Mixed, RandomKind::BlockMixed];

    pub fn name(self) -> &'static str {
        match self {
            RandomKind::Pure => "pure",
            RandomKind::Mixed => "mixed",
            RandomKind::BlockMixed => "block-mixed",
        }
    }
}

impl std::str::FromStr for RandomKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(RandomKind::Pure),
            "mixed" => Ok(RandomKind::Mixed),
            "block-mixed" => Ok(RandomKind::BlockMixed),
            other => Err(Error::InvalidArgument(format!("unknown random state kind `{other}`"))),
        }
    }
}

pub(crate) fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Unit vector from a complex Gaussian draw.
pub fn random_unit_vector(dim: usize, rng: &mut impl Rng) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

pub fn random_pure(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let v = random_unit_vector(dim, rng);
    DensityOperator::from_trusted(&v * v.adjoint())
}

pub fn random_mixed(dim: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = CMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityOperator::from_trusted(w / Complex64::new(tr, 0.0))
}

/// Reproducible random state on `system`; identical seeds give identical matrices.
pub fn random_state(system: &BipartiteSystem, kind: RandomKind, seed: u64) -> Result<DensityOperator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_state_with(system, kind, &mut rng)
}

pub fn random_state_with(
    system: &BipartiteSystem,
    kind: RandomKind,
    rng: &mut impl Rng,
) -> Result<DensityOperator> {
    let dim = system.dim();
    match kind {
        RandomKind::Pure => Ok(random_pure(dim, rng)),
        RandomKind::Mixed => Ok(random_mixed(dim, rng)),
        RandomKind::BlockMixed => dephase_global(&random_mixed(dim, rng), system),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{eigen_spectrum, validate_density};

    #[test]
    fn maximally_coherent_states() {
        assert_eq!(build_maximally_coherent(1).unwrap().get(0, 0).re, 1.0);
        let plus = build_maximally_coherent(2).unwrap();
        assert!(plus.max_abs_diff(&DensityOperator::pure_real(&[1.0, 1.0]).unwrap()) < 1e-15);
        let four = build_maximally_coherent(4).unwrap();
        assert!(four.matrix().iter().all(|z| (z.re - 0.25).abs() < 1e-15 && z.im == 0.0));
        assert!(build_maximally_coherent(0).is_err());
    }

    #[test]
    fn gap_qubits() {
        let g = build_gap_qubit(5, 1).unwrap();
        assert!((g.get(0, 1).re - 0.5).abs() < 1e-15);
        assert_eq!(g.dim(), 5);
        let g = build_gap_qubit(4, 2).unwrap();
        assert!((g.get(0, 2).re - 0.5).abs() < 1e-15);
        assert_eq!(g.get(1, 1).re, 0.0);
        let g = build_gap_qubit(6, 5).unwrap();
        assert!((g.get(5, 0).re - 0.5).abs() < 1e-15);
        assert!(build_gap_qubit(4, 0).is_err());
        assert!(build_gap_qubit(4, 4).is_err());
    }

    #[test]
    fn ideal_block_state_is_valid() {
        let tol = ToleranceConfig::default();
        for d in 3..8 {
            let rho = build_ideal_block_state(d).unwrap();
            assert_eq!(rho.dim(), d * (d - 1));
            assert!(validate_density(rho.matrix().clone(), &tol).is_ok());
            let spec = eigen_spectrum(&rho, &tol).unwrap();
            assert!((spec[0] - 0.5).abs() < 1e-12 && (spec[1] - 0.5).abs() < 1e-12);
        }
        assert!(build_ideal_block_state(2).is_err());
    }

    #[test]
    fn random_states_are_seeded() {
        let sys = BipartiteSystem::ladder(2, 3).unwrap();
        let tol = ToleranceConfig::default();
        for kind in RandomKind::ALL {
            let a = random_state(&sys, kind, 42).unwrap();
            let b = random_state(&sys, kind, 42).unwrap();
            assert_eq!(a, b);
            assert!(validate_density(a.matrix().clone(), &tol).is_ok());
        }
        let pure = random_state(&sys, RandomKind::Pure, 1).unwrap();
        let spec = eigen_spectrum(&pure, &tol).unwrap();
        assert!(spec[1..].iter().all(|&v| v <= tol.eig_clip_tol * 1e3));

        let block = random_state(&sys, RandomKind::BlockMixed, 2).unwrap();
        let h = sys.total_charge_operator();
        let comm = &h * block.matrix() - block.matrix() * &h;
        assert!(comm.iter().all(|z| z.norm() <= 1e-10));
    }
}
