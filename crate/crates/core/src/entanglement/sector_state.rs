use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charge::{BipartiteSystem, Sector};
use crate::error::{Error, Result};
use crate::operator::{spectrum_entropy, von_neumann_entropy, CMatrix, CVector, DensityOperator, ToleranceConfig};

/// Slack allowed on `|c_{n,n'}| <= sqrt(c_{n,n} c_{n',n'})`.
pub const CAUCHY_SCHWARZ_TOL: f64 = 1e-9;

/// Below this gap between two diagonal entries `g` uses its analytic limit.
pub const DEGENERATE_DIAGONAL_TOL: f64 = 1e-10;

/// State `Σ c_{n1,n2} |n1, N-n1><n2, N-n2|` on the sector basis `{|n, N-n>}`.
///
/// Basis vector `n` is the product vector `|n>_S |N-n>_R`, so every state of this
/// class is Schmidt-correlated and its embedding lives on `(N+1) x (N+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    state: DensityOperator,
}

impl SectorState {
    pub fn new(state: DensityOperator) -> Result<Self> {
        let n = state.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                let bound = (state.get(i, i).re.max(0.0) * state.get(j, j).re.max(0.0)).sqrt();
                let c = state.get(i, j).norm();
                if c > bound + CAUCHY_SCHWARZ_TOL {
                    return Err(Error::InvalidSectorState(format!(
                        "|c[{i},{j}]| = {c:e} exceeds sqrt(c[{i},{i}] c[{j},{j}]) = {bound:e}"
                    )));
                }
            }
        }
        Ok(SectorState { state })
    }

    /// Internal state of a decomposition sector; its product-basis pairs must use
    /// every local index at most once.
    pub fn from_sector(sector: &Sector) -> Result<Self> {
        let mut seen_s = std::collections::HashSet::new();
        let mut seen_r = std::collections::HashSet::new();
        for &(i_s, i_r) in &sector.basis_map {
            if !seen_s.insert(i_s) {
                return Err(Error::NotSchmidtCorrelated {
                    charge: sector.charge,
                    index: i_s,
                });
            }
            if !seen_r.insert(i_r) {
                return Err(Error::NotSchmidtCorrelated {
                    charge: sector.charge,
                    index: i_r,
                });
            }
        }
        Self::new(sector.internal_state.clone())
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn coefficient(&self, n: usize, n_prime: usize) -> Complex64 {
        self.state.get(n, n_prime)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.state.diagonal_probabilities()
    }

    pub fn as_density(&self) -> &DensityOperator {
        &self.state
    }

    /// Row-major product index of sector basis vector `n` in the `(N+1) x (N+1)` embedding.
    pub fn embedded_index(&self, n: usize) -> usize {
        let d = self.dim();
        n * d + (d - 1 - n)
    }

    /// The state on `(N+1) x (N+1)`, returned with its local dimensions.
    pub fn embed(&self) -> (DensityOperator, usize, usize) {
        let d = self.dim();
        let mut m = CMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                m[(self.embedded_index(a), self.embedded_index(b))] = self.state.get(a, b);
            }
        }
        (DensityOperator::from_trusted(m), d, d)
    }
}

/// `σ* = Σ c_{n,n} |n, N-n><n, N-n|`: the diagonal of the sector state.
pub fn closest_separable_diagonal(rho: &SectorState) -> DensityOperator {
    let d = rho.dim();
    let diag = CVector::from_iterator(d, rho.diagonal().into_iter().map(|c| Complex64::new(c, 0.0)));
    DensityOperator::from_trusted(CMatrix::from_diagonal(&diag))
}

/// `E_R(ρ) = S(σ*) - S(ρ)`.
pub fn relative_entropy_entanglement(rho: &SectorState, tol: &ToleranceConfig) -> Result<f64> {
    let s_diag = spectrum_entropy(&rho.diagonal(), tol);
    Ok(s_diag - von_neumann_entropy(rho.as_density(), tol)?)
}

/// `g(n, n') = c_{n,n'} (ln c_{n,n} - ln c_{n',n'}) / (c_{n,n} - c_{n',n'})`,
/// with `g(n, n) = 1` and the limit `c_{n,n'} / c_{n,n}` for equal diagonals.
pub fn g_factor(rho: &SectorState, n: usize, n_prime: usize) -> Result<Complex64> {
    let d = rho.dim();
    if n >= d || n_prime >= d {
        return Err(Error::InvalidArgument(format!(
            "sector index out of range for dimension {d}"
        )));
    }
    let a = rho.coefficient(n, n).re;
    let b = rho.coefficient(n_prime, n_prime).re;
    if a <= 0.0 {
        return Err(Error::ZeroDiagonal(n));
    }
    if b <= 0.0 {
        return Err(Error::ZeroDiagonal(n_prime));
    }
    if n == n_prime {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let c = rho.coefficient(n, n_prime);
    if (a - b).abs() < DEGENERATE_DIAGONAL_TOL {
        return Ok(c / a);
    }
    Ok(c * ((a.ln() - b.ln()) / (a - b)))
}

/// One weighted product vector `|a> ⊗ |b>` of a separable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzComponent {
    pub weight: f64,
    pub a: CVector,
    pub b: CVector,
}

impl AnsatzComponent {
    pub fn product_vector(&self) -> CVector {
        self.a.kronecker(&self.b)
    }
}

/// `σ = Σ_k p_k |a_k><a_k| ⊗ |b_k><b_k|`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeparableAnsatz {
    pub components: Vec<AnsatzComponent>,
}

impl SeparableAnsatz {
    pub fn product(a: CVector, b: CVector) -> Result<Self> {
        let s = SeparableAnsatz {
            components: vec![AnsatzComponent { weight: 1.0, a, b }],
        };
        s.validate()?;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if self.components.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("ansatz weights sum to {total}, not 1")));
        }
        for (k, c) in self.components.iter().enumerate() {
            if c.weight < 0.0 || (c.a.norm() - 1.0).abs() > 1e-9 || (c.b.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "ansatz component {k} has a negative weight or a non-unit vector"
                )));
            }
        }
        Ok(())
    }

    pub fn density(&self) -> DensityOperator {
        let dim = self.components[0].a.len() * self.components[0].b.len();
        let mut m = CMatrix::zeros(dim, dim);
        for c in &self.components {
            let v = c.product_vector();
            m += (&v * v.adjoint()) * Complex64::new(c.weight, 0.0);
        }
        DensityOperator::from_trusted(m)
    }

    pub fn to_records(&self) -> Vec<ComponentRecord> {
        let split = |v: &CVector| ComplexVectorJson {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        };
        self.components
            .iter()
            .map(|c| ComponentRecord {
                weight: c.weight,
                a: split(&c.a),
                b: split(&c.b),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexVectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

/// Export form of one ansatz component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub weight: f64,
    pub a: ComplexVectorJson,
    pub b: ComplexVectorJson,
}

/// Directional derivative of `x -> S(ρ || (1-x)σ* + xσ)` at `x = 0` for a product
/// state `σ = |a><a| ⊗ |b><b|` on the `(N+1) x (N+1)` embedding, in nats:
/// `1 - Σ_{n1,n2} g(n1,n2) a_{n2} b_{N-n2} conj(a_{n1}) conj(b_{N-n1})`.
///
/// Basis vectors with `c_{n,n} <= eig_clip_tol` are outside the support of `σ*`
/// and are skipped; if such a row still carries off-diagonal weight the support
/// test fails.
pub fn gradient_condition_value(
    rho: &SectorState,
    product_state: &SeparableAnsatz,
    tol: &ToleranceConfig,
) -> Result<f64> {
    if product_state.k() != 1 {
        return Err(Error::InvalidArgument(format!(
            "gradient condition takes a single product state, got K={}",
            product_state.k()
        )));
    }
    product_state.validate()?;
    let d = rho.dim();
    let comp = &product_state.components[0];
    if comp.a.len() != d || comp.b.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: comp.a.len().max(comp.b.len()),
        });
    }
    let diag = rho.diagonal();
    let support: Vec<usize> = (0..d).filter(|&n| diag[n] > tol.eig_clip_tol).collect();
    for n in (0..d).filter(|n| !support.contains(n)) {
        if (0..d).any(|m| m != n && rho.coefficient(n, m).norm() > CAUCHY_SCHWARZ_TOL) {
            return Err(Error::SupportFailure(n));
        }
    }
    // Overlap <n, N-n | a, b> for each sector basis vector.
    let overlap: Vec<Complex64> = (0..d).map(|n| comp.a[n] * comp.b[d - 1 - n]).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for &n1 in &support {
        for &n2 in &support {
            acc += g_factor(rho, n1, n2)? * overlap[n2] * overlap[n1].conj();
        }
    }
    Ok(1.0 - acc.re)
}

/// Internal states of every sector as sector states; fails for sectors that are
/// not Schmidt-correlated (degenerate local charges).
pub fn sector_states(
    decomposition: &crate::charge::SectorDecomposition,
    _system: &BipartiteSystem,
) -> Result<Vec<(f64, SectorState)>> {
    decomposition
        .sectors
        .iter()
        .map(|s| Ok((s.weight, SectorState::from_sector(s)?)))
        .collect()
}
