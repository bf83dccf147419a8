//! U(1) charge sectors: projectors, the two dephasing maps, the phase-averaged
//! twirl, and the split of a bipartite state into normalized internal states.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{CMatrix, DensityOperator, MatrixJson, ToleranceConfig};

/// Integer charge of each basis vector; the local generator is `Σ m |m><m|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeSpectrum {
    charges: Vec<i64>,
}

impl ChargeSpectrum {
    pub fn new(charges: Vec<i64>) -> Result<Self> {
        if charges.is_empty() {
            return Err(Error::InvalidSpectrum("spectrum must be nonempty".into()));
        }
        Ok(ChargeSpectrum { charges })
    }

    /// Equidistant spectrum `0, 1, ..., d-1`.
    pub fn ladder(d: usize) -> Result<Self> {
        Self::new((0..d as i64).collect())
    }

    /// Eigenvalues of sigma_z on `|0>, |1>`.
    pub fn sigma_z() -> Self {
        ChargeSpectrum { charges: vec![1, -1] }
    }

    pub fn dim(&self) -> usize {
        self.charges.len()
    }

    pub fn charges(&self) -> &[i64] {
        &self.charges
    }

    pub fn charge(&self, index: usize) -> i64 {
        self.charges[index]
    }

    /// Distinct charges, ascending.
    pub fn distinct(&self) -> Vec<i64> {
        let mut c = self.charges.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn is_degenerate(&self) -> bool {
        self.distinct().len() != self.charges.len()
    }

    /// Diagonal generator `H = Σ m |m><m|`.
    pub fn generator(&self) -> CMatrix {
        diagonal_of(self.charges.iter().map(|&m| m as f64))
    }
}

fn diagonal_of(values: impl Iterator<Item = f64>) -> CMatrix {
    let v: Vec<Complex64> = values.map(|x| Complex64::new(x, 0.0)).collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
}

/// One projector per distinct charge, keyed by charge.
pub fn sector_projectors(spectrum: &ChargeSpectrum) -> BTreeMap<i64, CMatrix> {
    let n = spectrum.dim();
    spectrum
        .distinct()
        .into_iter()
        .map(|m| {
            let p = diagonal_of((0..n).map(|i| if spectrum.charge(i) == m { 1.0 } else { 0.0 }));
            (m, p)
        })
        .collect()
}

/// Two subsystems with their charge spectra; the product basis is row-major
/// (system index major, reference index minor).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteSystem {
    pub spectrum_s: ChargeSpectrum,
    pub spectrum_r: ChargeSpectrum,
}

impl BipartiteSystem {
    pub fn new(spectrum_s: ChargeSpectrum, spectrum_r: ChargeSpectrum) -> Self {
        BipartiteSystem {
            spectrum_s,
            spectrum_r,
        }
    }

    /// Both factors with ladder spectra `0..d`.
    pub fn ladder(d_s: usize, d_r: usize) -> Result<Self> {
        Ok(Self::new(ChargeSpectrum::ladder(d_s)?, ChargeSpectrum::ladder(d_r)?))
    }

    pub fn d_s(&self) -> usize {
        self.spectrum_s.dim()
    }

    pub fn d_r(&self) -> usize {
        self.spectrum_r.dim()
    }

    pub fn dim(&self) -> usize {
        self.d_s() * self.d_r()
    }

    pub fn split_index(&self, index: usize) -> (usize, usize) {
        (index / self.d_r(), index % self.d_r())
    }

    pub fn join_index(&self, i_s: usize, i_r: usize) -> usize {
        i_s * self.d_r() + i_r
    }

    pub fn total_charge(&self, index: usize) -> i64 {
        let (i_s, i_r) = self.split_index(index);
        self.spectrum_s.charge(i_s) + self.spectrum_r.charge(i_r)
    }

    /// `H_S ⊗ I + I ⊗ H_R`.
    pub fn total_charge_operator(&self) -> CMatrix {
        diagonal_of((0..self.dim()).map(|i| self.total_charge(i) as f64))
    }

    /// Achievable total charges, ascending.
    pub fn total_charges(&self) -> Vec<i64> {
        let mut c: Vec<i64> = (0..self.dim()).map(|i| self.total_charge(i)).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// `max M - min M`.
    pub fn charge_range(&self) -> u64 {
        let c = self.total_charges();
        (c[c.len() - 1] - c[0]) as u64
    }

    /// Product-basis pairs `(i_s, i_r)` of total charge `m`, in row-major order.
    pub fn sector_basis(&self, m: i64) -> Vec<(usize, usize)> {
        (0..self.dim())
            .filter(|&i| self.total_charge(i) == m)
            .map(|i| self.split_index(i))
            .collect()
    }

    fn check(&self, rho: &DensityOperator) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rho.dim(),
            });
        }
        Ok(())
    }
}

/// `Π_M = Σ_{m_s + m_r = M} Π_{m_s} ⊗ Π_{m_r}`, keyed by total charge.
pub fn joint_projectors(system: &BipartiteSystem) -> BTreeMap<i64, CMatrix> {
    let ps = sector_projectors(&system.spectrum_s);
    let pr = sector_projectors(&system.spectrum_r);
    let mut out: BTreeMap<i64, CMatrix> = BTreeMap::new();
    for (ms, a) in &ps {
        for (mr, b) in &pr {
            let term = a.kronecker(b);
            out.entry(ms + mr)
                .and_modify(|p| *p += &term)
                .or_insert(term);
        }
    }
    out
}

/// Which superoperator produced a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuperoperatorTag {
    DephaseGlobal,
    DephaseLocal,
    TwirlNumeric,
}

fn mask(rho: &DensityOperator, keep: impl Fn(usize, usize) -> bool) -> DensityOperator {
    let m = rho.matrix();
    let zero = Complex64::new(0.0, 0.0);
    DensityOperator::from_trusted(CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if keep(i, j) {
            m[(i, j)]
        } else {
            zero
        }
    }))
}

/// Global dephasing `Σ_M Π_M ρ Π_M`: drops coherence between different total charges.
pub fn dephase_global(rho: &DensityOperator, system: &BipartiteSystem) -> Result<DensityOperator> {
    system.check(rho)?;
    Ok(mask(rho, |i, j| system.total_charge(i) == system.total_charge(j)))
}

/// Local dephasing `Σ (Π_{m_s} ⊗ Π_{m_r}) ρ (Π_{m_s} ⊗ Π_{m_r})`.
pub fn dephase_local(rho: &DensityOperator, system: &BipartiteSystem) -> Result<DensityOperator> {
    system.check(rho)?;
    let local = |i: usize| {
        let (a, b) = system.split_index(i);
        (system.spectrum_s.charge(a), system.spectrum_r.charge(b))
    };
    Ok(mask(rho, |i, j| local(i) == local(j)))
}

/// Uniform average of `U_φ ρ U_φ†` over `n_points` phases `2πk/n`, with
/// `U_φ = exp(-iφ H_total)`. Exact once `n_points` exceeds the charge range.
pub fn twirl_phase_average(
    rho: &DensityOperator,
    system: &BipartiteSystem,
    n_points: usize,
) -> Result<DensityOperator> {
    system.check(rho)?;
    if n_points == 0 {
        return Err(Error::InvalidArgument("n_points must be at least 1".into()));
    }
    let n = rho.dim();
    let charges: Vec<f64> = (0..n).map(|i| system.total_charge(i) as f64).collect();
    let mut acc = CMatrix::zeros(n, n);
    for k in 0..n_points {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / n_points as f64;
        let u: Vec<Complex64> = charges
            .iter()
            .map(|&q| Complex64::from_polar(1.0, -phi * q))
            .collect();
        acc += CMatrix::from_fn(n, n, |i, j| u[i] * rho.get(i, j) * u[j].conj());
    }
    Ok(DensityOperator::from_trusted(
        acc / Complex64::new(n_points as f64, 0.0),
    ))
}

/// Phase count that makes the discrete twirl exact: charge range + 1.
pub fn default_twirl_points(system: &BipartiteSystem) -> usize {
    system.charge_range() as usize + 1
}

/// Normalized restriction of a state to one total-charge sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sector {
    pub charge: i64,
    /// `Tr(Π_M ρ Π_M)`.
    pub weight: f64,
    /// State on the sector basis, dimension `basis_map.len()`.
    pub internal_state: DensityOperator,
    /// Product-basis pair `(i_s, i_r)` of each sector basis vector.
    pub basis_map: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SectorDecomposition {
    /// Ascending in total charge; zero-weight sectors omitted.
    pub sectors: Vec<Sector>,
}

impl SectorDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.sectors.iter().map(|s| s.weight).sum()
    }

    /// `Σ_M w_M ρ_M` embedded back into the product space.
    pub fn reconstruct(&self, system: &BipartiteSystem) -> DensityOperator {
        let n = system.dim();
        let mut out = CMatrix::zeros(n, n);
        for s in &self.sectors {
            let w = Complex64::new(s.weight, 0.0);
            for (a, &(ia_s, ia_r)) in s.basis_map.iter().enumerate() {
                for (b, &(ib_s, ib_r)) in s.basis_map.iter().enumerate() {
                    out[(system.join_index(ia_s, ia_r), system.join_index(ib_s, ib_r))] +=
                        w * s.internal_state.get(a, b);
                }
            }
        }
        DensityOperator::from_trusted(out)
    }

    pub fn to_records(&self) -> Vec<SectorRecord> {
        self.sectors
            .iter()
            .map(|s| SectorRecord {
                charge: s.charge,
                weight: s.weight,
                dim: s.basis_map.len(),
                basis_map: s.basis_map.iter().map(|&(a, b)| [a, b]).collect(),
                state: s.internal_state.to_json(),
            })
            .collect()
    }
}

/// Export row: `{"M", "weight", "dim", "basis_map", "state"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorRecord {
    #[serde(rename = "M")]
    pub charge: i64,
    pub weight: f64,
    pub dim: usize,
    pub basis_map: Vec<[usize; 2]>,
    pub state: MatrixJson,
}

impl Serialize for SectorDecomposition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_records().serialize(serializer)
    }
}

/// Splits `ρ` into sector weights `Tr(Π_M ρ Π_M)` and normalized internal states,
/// each compressed to its sector basis.
pub fn decompose_internal_states(
    rho: &DensityOperator,
    system: &BipartiteSystem,
    tol: &ToleranceConfig,
) -> Result<SectorDecomposition> {
    system.check(rho)?;
    let mut sectors = Vec::new();
    for m in system.total_charges() {
        let basis_map = system.sector_basis(m);
        let idx: Vec<usize> = basis_map
            .iter()
            .map(|&(a, b)| system.join_index(a, b))
            .collect();
        let block = CMatrix::from_fn(idx.len(), idx.len(), |a, b| rho.get(idx[a], idx[b]));
        let weight: f64 = block.diagonal().iter().map(|z| z.re).sum();
        if weight <= tol.eig_clip_tol {
            continue;
        }
        sectors.push(Sector {
            charge: m,
            weight,
            internal_state: DensityOperator::from_trusted(block / Complex64::new(weight, 0.0)),
            basis_map,
        });
    }
    Ok(SectorDecomposition { sectors })
}

/// Size of the support of `ρ` inside each occupied sector, ascending in charge.
///
/// A sector basis vector is in the support when its diagonal weight exceeds
/// `eig_clip_tol`; for a positive operator a zero diagonal forces a zero row.
pub fn block_sizes(
    rho: &DensityOperator,
    system: &BipartiteSystem,
    tol: &ToleranceConfig,
) -> Result<Vec<usize>> {
    system.check(rho)?;
    Ok(system
        .total_charges()
        .into_iter()
        .map(|m| {
            system
                .sector_basis(m)
                .into_iter()
                .filter(|&(a, b)| rho.get(system.join_index(a, b), system.join_index(a, b)).re > tol.eig_clip_tol)
                .count()
        })
        .filter(|&n| n > 0)
        .collect())
}
