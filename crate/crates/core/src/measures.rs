//! Asymmetry and coherence measures built from the dephasing maps.
//!
//! Every value is reported in units of the configured logarithm base
//! (bits by default), except [`coherence_work_bound`] which is in nats.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::charge::{
    dephase_global, dephase_local, joint_projectors, sector_projectors, BipartiteSystem,
    ChargeSpectrum, SectorDecomposition,
};
use crate::error::{Error, Result};
use crate::operator::{
    spectrum_entropy, tensor_product, von_neumann_entropy, CMatrix, DensityOperator,
    ToleranceConfig,
};

/// A named scalar together with the settings it was computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub name: String,
    pub value: f64,
    pub log_base: f64,
    pub inputs_digest: String,
    #[serde(skip)]
    pub tolerances: ToleranceConfig,
}

impl MeasureReport {
    pub fn new(name: impl Into<String>, value: f64, tol: &ToleranceConfig, inputs_digest: impl Into<String>) -> Self {
        MeasureReport {
            name: name.into(),
            value,
            log_base: tol.log_base,
            inputs_digest: inputs_digest.into(),
            tolerances: *tol,
        }
    }
}

/// Short SHA-256 digest of a state and the spectra it was measured against.
pub fn inputs_digest(rho: &DensityOperator, system: Option<&BipartiteSystem>) -> String {
    let mut h = Sha256::new();
    h.update((rho.dim() as u64).to_le_bytes());
    for z in rho.matrix().iter() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    if let Some(sys) = system {
        for spectrum in [&sys.spectrum_s, &sys.spectrum_r] {
            h.update((spectrum.dim() as u64).to_le_bytes());
            for c in spectrum.charges() {
                h.update(c.to_le_bytes());
            }
        }
    }
    hex::encode(&h.finalize()[..8])
}

/// Single-system dephasing over the sectors of `spectrum`.
pub fn dephase_single(rho: &DensityOperator, spectrum: &ChargeSpectrum) -> Result<DensityOperator> {
    if rho.dim() != spectrum.dim() {
        return Err(Error::DimensionMismatch {
            expected: spectrum.dim(),
            actual: rho.dim(),
        });
    }
    let m = rho.matrix();
    Ok(DensityOperator::from_trusted(CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if spectrum.charge(i) == spectrum.charge(j) {
            m[(i, j)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })))
}

/// Holevo asymmetry `A_G(ρ) = S(G(ρ)) - S(ρ)`.
pub fn holevo_asymmetry(rho: &DensityOperator, spectrum: &ChargeSpectrum, tol: &ToleranceConfig) -> Result<f64> {
    let twirled = dephase_single(rho, spectrum)?;
    Ok(von_neumann_entropy(&twirled, tol)? - von_neumann_entropy(rho, tol)?)
}

/// Shared asymmetry `S(Δ(ρ)) - S(Π_G(ρ))`.
pub fn shared_asymmetry(rho: &DensityOperator, system: &BipartiteSystem, tol: &ToleranceConfig) -> Result<f64> {
    let local = dephase_local(rho, system)?;
    let global = dephase_global(rho, system)?;
    Ok(von_neumann_entropy(&local, tol)? - von_neumann_entropy(&global, tol)?)
}

/// Internal coherence `C(S:R)`, evaluated by sandwiching `ρ` between explicit
/// projector matrices rather than by index masking.
pub fn internal_coherence(rho: &DensityOperator, system: &BipartiteSystem, tol: &ToleranceConfig) -> Result<f64> {
    if rho.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            actual: rho.dim(),
        });
    }
    let m = rho.matrix();
    let global: CMatrix = joint_projectors(system).values().map(|p| p * m * p).sum();
    let ps = sector_projectors(&system.spectrum_s);
    let pr = sector_projectors(&system.spectrum_r);
    let mut local = CMatrix::zeros(m.nrows(), m.ncols());
    for a in ps.values() {
        for b in pr.values() {
            let p = a.kronecker(b);
            local += &p * m * &p;
        }
    }
    let s_local = von_neumann_entropy(&DensityOperator::from_trusted(local), tol)?;
    let s_global = von_neumann_entropy(&DensityOperator::from_trusted(global), tol)?;
    Ok(s_local - s_global)
}

/// `Σ_M w_M (S(Δ_M(ρ_M)) - S(ρ_M))`, where `Δ_M` dephases the local charges
/// inside sector `M` (the plain diagonal for nondegenerate spectra).
pub fn shared_asymmetry_sector_form(
    decomp: &SectorDecomposition,
    system: &BipartiteSystem,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let mut total = 0.0;
    for sector in &decomp.sectors {
        let labels: Vec<i64> = sector
            .basis_map
            .iter()
            .map(|&(i_s, _)| system.spectrum_s.charge(i_s))
            .collect();
        let rho = &sector.internal_state;
        let n = rho.dim();
        let dephased = DensityOperator::from_trusted(CMatrix::from_fn(n, n, |a, b| {
            if labels[a] == labels[b] {
                rho.get(a, b)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }));
        let term = if dephased.is_diagonal(0.0) {
            spectrum_entropy(&dephased.diagonal_probabilities(), tol)
        } else {
            von_neumann_entropy(&dephased, tol)?
        };
        total += sector.weight * (term - von_neumann_entropy(rho, tol)?);
    }
    Ok(total)
}

/// Both sides of `A^(sh)(ρ_S ⊗ ρ_R) = A_G(ρ_S) + A_G(ρ_R) - A_G(ρ_S ⊗ ρ_R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductFormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub difference: f64,
}

pub fn product_form_check(
    rho_s: &DensityOperator,
    rho_r: &DensityOperator,
    system: &BipartiteSystem,
    tol: &ToleranceConfig,
) -> Result<ProductFormCheck> {
    let joint = tensor_product(rho_s, rho_r, tol)?;
    let lhs = shared_asymmetry(&joint, system, tol)?;
    let a_s = holevo_asymmetry(rho_s, &system.spectrum_s, tol)?;
    let a_r = holevo_asymmetry(rho_r, &system.spectrum_r, tol)?;
    let a_sr = von_neumann_entropy(&dephase_global(&joint, system)?, tol)? - von_neumann_entropy(&joint, tol)?;
    let rhs = a_s + a_r - a_sr;
    Ok(ProductFormCheck {
        lhs,
        rhs,
        difference: lhs - rhs,
    })
}

/// Shared asymmetry of maximally coherent `d_s`- and `d_r`-level ladders,
/// `(2/(d_s d_r)) Σ_{x=1}^{d_s-1} x log x - ((d_s-1)/d_r) log d_s + log d_s`.
pub fn closed_form_max_coherent(d_s: usize, d_r: usize, tol: &ToleranceConfig) -> Result<f64> {
    if d_s < 2 || d_s > d_r {
        return Err(Error::InvalidArgument(format!(
            "closed form needs 2 <= d_s <= d_r, got d_s={d_s}, d_r={d_r}"
        )));
    }
    let (ds, dr) = (d_s as f64, d_r as f64);
    let sum: f64 = (1..d_s).map(|x| x as f64 * tol.log(x as f64)).sum();
    Ok(2.0 / (ds * dr) * sum - (ds - 1.0) / dr * tol.log(ds) + tol.log(ds))
}

/// Shared asymmetry `n_m/d` (bits) of `(|0> + |d - n_m>)/√2` against a maximally
/// coherent `d`-level reference.
pub fn closed_form_gap(d: usize, n_m: usize, tol: &ToleranceConfig) -> Result<f64> {
    if d < 2 || n_m == 0 || n_m >= d {
        return Err(Error::InvalidArgument(format!(
            "gap formula needs 1 <= n_m <= d-1, got d={d}, n_m={n_m}"
        )));
    }
    Ok(n_m as f64 / d as f64 * tol.log(2.0))
}

/// `min{log d_s, log d_r}`, or `min{A_G(ρ_S), A_G(ρ_R)}` when the caller supplies
/// the factors of a product state.
pub fn upper_bound(
    system: &BipartiteSystem,
    product_inputs: Option<(&DensityOperator, &DensityOperator)>,
    tol: &ToleranceConfig,
) -> Result<f64> {
    match product_inputs {
        None => Ok(tol.log(system.d_s().min(system.d_r()) as f64)),
        Some((rho_s, rho_r)) => {
            let a_s = holevo_asymmetry(rho_s, &system.spectrum_s, tol)?;
            let a_r = holevo_asymmetry(rho_r, &system.spectrum_r, tol)?;
            Ok(a_s.min(a_r))
        }
    }
}

/// Upper bound on work extractable from internal coherence, `T · A^(sh)` in
/// units of `k_B` times nats.
pub fn coherence_work_bound(
    rho: &DensityOperator,
    system: &BipartiteSystem,
    temperature: f64,
    tol: &ToleranceConfig,
) -> Result<f64> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let value = shared_asymmetry(rho, system, tol)?;
    Ok(temperature * value * tol.log_base.ln())
}
