//! Validated density operators and the entropy functionals built on them.
//!
//! Product spaces use row-major ordering throughout: index `i = i_s * d_r + i_r`,
//! with the first (system) factor major and the second (reference) factor minor.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;


/// Squared overlap with the kernel of `sigma` above which the support test fails.
pub const SUPPORT_OVERLAP_TOL: f64 = 1e-9;

/// Numerical tolerances and the logarithm base shared by every measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub hermiticity_tol: f64,
    pub psd_tol: f64,
    pub trace_tol: f64,
    pub eig_clip_tol: f64,
    pub log_base: f64,
    /// Largest total dimension any constructed operator may have.
    pub max_dim: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            hermiticity_tol: 1e-10,
            psd_tol: 1e-9,
            trace_tol: 1e-9,
            eig_clip_tol: 1e-12,
            log_base: 2.0,
            max_dim: 256,
        }
    }
}

impl ToleranceConfig {
    /// Environment variable read by [`ToleranceConfig::from_env`].
    pub const ENV_VAR: &'static str = "SHASYM_TOLERANCES";

    pub fn with_log_base(mut self, base: f64) -> Result<Self> {
        self.log_base = base;
        self.validate()
    }

    pub fn natural_log() -> Self {
        ToleranceConfig {
            log_base: std::f64::consts::E,
            ..Default::default()
        }
    }

    pub fn validate(self) -> Result<Self> {
        let named = [
            ("hermiticity_tol", self.hermiticity_tol),
            ("psd_tol", self.psd_tol),
            ("trace_tol", self.trace_tol),
            ("eig_clip_tol", self.eig_clip_tol),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        if !(self.log_base.is_finite() && self.log_base > 1.0) {
            return Err(Error::InvalidTolerance(format!(
                "log_base must exceed 1, got {}",
                self.log_base
            )));
        }
        if self.max_dim == 0 {
            return Err(Error::InvalidTolerance("max_dim must be positive".into()));
        }
        Ok(self)
    }

    /// Applies comma-separated `key=value` overrides, e.g. `psd_tol=1e-8,log_base=e`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidTolerance(format!("expected key=value, got `{item}`")))?;
            let value = value.trim();
            let parse = |v: &str| -> Result<f64> {
                if v == "e" {
                    return Ok(std::f64::consts::E);
                }
                v.parse::<f64>()
                    .map_err(|_| Error::InvalidTolerance(format!("`{v}` is not a number")))
            };
            match key.trim() {
                "hermiticity_tol" => self.hermiticity_tol = parse(value)?,
                "psd_tol" => self.psd_tol = parse(value)?,
                "trace_tol" => self.trace_tol = parse(value)?,
                "eig_clip_tol" => self.eig_clip_tol = parse(value)?,
                "log_base" => self.log_base = parse(value)?,
                "max_dim" => {
                    self.max_dim = value
                        .parse()
                        .map_err(|_| Error::InvalidTolerance(format!("`{value}` is not an integer")))?
                }
                other => {
                    return Err(Error::InvalidTolerance(format!("unknown key `{other}`")));
                }
            }
        }
        self.validate()
    }

    /// Defaults, overridden by [`Self::ENV_VAR`] when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(spec) => Self::default().with_overrides(&spec),
            Err(_) => Ok(Self::default()),
        }
    }

    /// Converts a natural-log quantity to the configured base.
    pub fn from_nats(&self, nats: f64) -> f64 {
        nats / self.log_base.ln()
    }

    pub fn log(&self, x: f64) -> f64 {
        x.ln() / self.log_base.ln()
    }
}

/// Hermitian, positive semidefinite, unit-trace complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    entries: CMatrix,
}

impl DensityOperator {
    /// Wraps a matrix that is a density operator by construction, symmetrizing away rounding.
    pub(crate) fn from_trusted(entries: CMatrix) -> Self {
        DensityOperator {
            entries: hermitian_part(&entries),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    /// `|psi><psi|` for the normalized direction of `amplitudes`.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = CVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if amplitudes.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidArgument(
                "pure state needs a nonzero, finite amplitude vector".into(),
            ));
        }
        let v = v / Complex64::new(norm, 0.0);
        Ok(Self::from_trusted(&v * v.adjoint()))
    }

    pub fn pure_real(amplitudes: &[f64]) -> Result<Self> {
        let v: Vec<Complex64> = amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        Self::pure(&v)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probabilities: &[f64], tol: &ToleranceConfig) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        validate_density(m, tol)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDensity(Violation::Empty));
        }
        let p = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(DensityOperator {
            entries: CMatrix::from_diagonal_element(dim, dim, p),
        })
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Real parts of the diagonal.
    pub fn diagonal_probabilities(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        max_abs_diff(&self.entries, &other.entries)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.entries[(i, j)].norm() <= tol))
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from_matrix(&self.entries)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

/// Row-major JSON form `{"dim": n, "re": [[..]], "im": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        MatrixJson {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }

    /// Checks the declared shape and assembles the matrix; no density checks.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::Input(format!(
                "matrix object declares dim {n} but `re`/`im` are not {n}x{n}"
            )));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }

    pub fn to_density(&self, tol: &ToleranceConfig) -> Result<DensityOperator> {
        validate_density(self.to_matrix()?, tol)
    }
}

/// Parses a matrix object and validates it as a density operator.
pub fn read_density<R: std::io::Read>(reader: R, tol: &ToleranceConfig) -> Result<DensityOperator> {
    let json: MatrixJson = serde_json::from_reader(reader)?;
    json.to_density(tol)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Checks every density-operator invariant and reports the first violation.
pub fn validate_density(entries: CMatrix, tol: &ToleranceConfig) -> Result<DensityOperator> {
    let (rows, cols) = entries.shape();
    if rows != cols {
        return Err(Error::InvalidDensity(Violation::NotSquare { rows, cols }));
    }
    if rows == 0 {
        return Err(Error::InvalidDensity(Violation::Empty));
    }
    if rows > tol.max_dim {
        return Err(Error::DimensionOverflow {
            dim: rows,
            max: tol.max_dim,
        });
    }
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidDensity(Violation::NonFinite));
    }
    let deviation = max_abs_diff(&entries, &entries.adjoint());
    if deviation > tol.hermiticity_tol {
        return Err(Error::InvalidDensity(Violation::NotHermitian {
            max_deviation: deviation,
            tolerance: tol.hermiticity_tol,
        }));
    }
    let herm = hermitian_part(&entries);
    let trace: f64 = herm.diagonal().iter().map(|z| z.re).sum();
    if (trace - 1.0).abs() > tol.trace_tol {
        return Err(Error::InvalidDensity(Violation::TraceMismatch {
            trace,
            tolerance: tol.trace_tol,
        }));
    }
    let min_eigenvalue = raw_eigenvalues(&herm)?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -tol.psd_tol {
        return Err(Error::InvalidDensity(Violation::NotPositive {
            min_eigenvalue,
            tolerance: tol.psd_tol,
        }));
    }
    Ok(DensityOperator { entries: herm })
}

/// Kronecker product `a ⊗ b` with row-major index `i = i_a * dim(b) + i_b`.
pub fn tensor_product(
    a: &DensityOperator,
    b: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<DensityOperator> {
    let dim = a
        .dim()
        .checked_mul(b.dim())
        .ok_or(Error::DimensionOverflow {
            dim: usize::MAX,
            max: tol.max_dim,
        })?;
    if dim > tol.max_dim {
        return Err(Error::DimensionOverflow {
            dim,
            max: tol.max_dim,
        });
    }
    Ok(DensityOperator::from_trusted(a.entries.kronecker(&b.entries)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    /// First factor (the system).
    S,
    /// Second factor (the reference).
    R,
}

/// Reduced state of the kept factor of a `d_s x d_r` bipartite operator.
pub fn partial_trace(
    rho: &DensityOperator,
    d_s: usize,
    d_r: usize,
    keep: Subsystem,
) -> Result<DensityOperator> {
    let expected = d_s * d_r;
    if rho.dim() != expected || expected == 0 {
        return Err(Error::DimensionMismatch {
            expected,
            actual: rho.dim(),
        });
    }
    let m = &rho.entries;
    let reduced = match keep {
        Subsystem::S => CMatrix::from_fn(d_s, d_s, |i, j| {
            (0..d_r).map(|k| m[(i * d_r + k, j * d_r + k)]).sum()
        }),
        Subsystem::R => CMatrix::from_fn(d_r, d_r, |i, j| {
            (0..d_s).map(|k| m[(k * d_r + i, k * d_r + j)]).sum()
        }),
    };
    Ok(DensityOperator::from_trusted(reduced))
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending. Only the lower
/// triangle is read.
///
/// Backed by faer: nalgebra's complex `SymmetricEigen` can stall on a wrong
/// deflation for nearly singular input while still returning a unitary basis.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.nrows();
    let fm = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let eig = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::EigenNonConvergence { dim: n })?;
    let (s, u) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values: Vec<f64> = order.iter().map(|&k| s[k].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNonConvergence { dim: n });
    }
    let vectors = CMatrix::from_fn(n, n, |i, j| {
        let z = u[(i, order[j])];
        Complex64::new(z.re, z.im)
    });
    Ok((values, vectors))
}

/// Groups indices into blocks connected by nonzero entries.
fn exact_blocks(m: &CMatrix) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[(i, j)] != Complex64::new(0.0, 0.0) || m[(j, i)] != Complex64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut blocks: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        blocks.entry(root).or_default().push(i);
    }
    blocks.into_values().collect()
}

/// Unprocessed eigenvalues. Matrices that are block diagonal up to a permutation
/// are diagonalized block by block.
fn raw_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(m.nrows());
    for block in exact_blocks(m) {
        if block.len() == 1 {
            values.push(m[(block[0], block[0])].re);
            continue;
        }
        let sub = CMatrix::from_fn(block.len(), block.len(), |i, j| m[(block[i], block[j])]);
        values.extend(hermitian_eigen(&sub)?.0);
    }
    Ok(values)
}

/// Eigenvalues in descending order, negatives within `psd_tol` clipped to zero and
/// the spectrum renormalized to unit sum.
pub fn eigen_spectrum(rho: &DensityOperator, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let mut values = raw_eigenvalues(&rho.entries)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol.psd_tol {
        return Err(Error::InvalidDensity(Violation::NotPositive {
            min_eigenvalue: min,
            tolerance: tol.psd_tol,
        }));
    }
    for v in values.iter_mut() {
        *v = v.max(0.0);
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > tol.trace_tol {
        return Err(Error::InvalidDensity(Violation::TraceMismatch {
            trace: sum,
            tolerance: tol.trace_tol,
        }));
    }
    for v in values.iter_mut() {
        *v /= sum;
    }
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// `-Σ p log p` over entries above `clip`, in nats.
pub(crate) fn shannon_nats(probabilities: impl IntoIterator<Item = f64>, clip: f64) -> f64 {
    -probabilities
        .into_iter()
        .filter(|&p| p > clip)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Shannon entropy of a probability vector at the configured base, `0 log 0 = 0`.
pub fn spectrum_entropy(probabilities: &[f64], tol: &ToleranceConfig) -> f64 {
    tol.from_nats(shannon_nats(probabilities.iter().copied(), tol.eig_clip_tol))
        .max(0.0)
}

/// Von Neumann entropy `S(rho) = -Tr rho log rho`.
pub fn von_neumann_entropy(rho: &DensityOperator, tol: &ToleranceConfig) -> Result<f64> {
    Ok(spectrum_entropy(&eigen_spectrum(rho, tol)?, tol))
}

/// Quantum relative entropy `S(rho || sigma) = Tr rho (log rho - log sigma)`.
///
/// Returns `f64::INFINITY` when the support of `rho` is not contained in the
/// support of `sigma`: some eigenvector of `rho` with eigenvalue above
/// `eig_clip_tol` has squared overlap at least [`SUPPORT_OVERLAP_TOL`] with the
/// kernel of `sigma`.
pub fn relative_entropy(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let clip = tol.eig_clip_tol;
    let (rho_vals, rho_vecs) = hermitian_eigen(&rho.entries)?;
    let (sigma_vals, sigma_vecs) = hermitian_eigen(&sigma.entries)?;
    let kernel: Vec<usize> = (0..sigma_vals.len()).filter(|&k| sigma_vals[k] <= clip).collect();
    for (j, &lambda) in rho_vals.iter().enumerate() {
        if lambda <= clip {
            continue;
        }
        let v = rho_vecs.column(j);
        let overlap: f64 = kernel
            .iter()
            .map(|&k| sigma_vecs.column(k).dotc(&v).norm_sqr())
            .sum();
        if overlap >= SUPPORT_OVERLAP_TOL {
            return Ok(f64::INFINITY);
        }
    }
    let neg_entropy: f64 = -shannon_nats(rho_vals.iter().copied(), clip);
    let cross: f64 = (0..sigma_vals.len())
        .filter(|&k| sigma_vals[k] > clip)
        .map(|k| {
            let w = sigma_vecs.column(k);
            let weight = (w.adjoint() * &rho.entries * w)[(0, 0)].re;
            weight * sigma_vals[k].ln()
        })
        .sum();
    Ok(tol.from_nats(neg_entropy - cross))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn reconstruction_error(m: &CMatrix) -> f64 {
        let (values, vectors) = hermitian_eigen(m).unwrap();
        let scaled = CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| vectors[(i, j)] * values[j]);
        (scaled * vectors.adjoint() - m).norm()
    }

    #[test]
    fn nearly_singular_separable_states_decompose() {
        // nalgebra's complex sweep reconstructs this one with error ~4e-3.
        let json: MatrixJson =
            serde_json::from_str(include_str!("../tests/data/stalled_eigen_sigma.json")).unwrap();
        let m = json.to_matrix().unwrap();
        assert!(reconstruction_error(&m) < 1e-13);
        let near_degenerate = CMatrix::from_row_slice(
            3,
            3,
            &[
                Complex64::new(0.9999985736763857, 0.0),
                Complex64::new(-1.3461124259356332e-6, 4.2683508810292155e-6),
                Complex64::new(6.973136510017284e-6, -3.3996646198966005e-5),
                Complex64::new(-1.3461124259356332e-6, -4.2683508810292155e-6),
                Complex64::new(4.384410882165731e-11, 0.0),
                Complex64::new(-1.1803639459018257e-10, 7.127530328008888e-11),
                Complex64::new(6.973136510017284e-6, 3.3996646198966005e-5),
                Complex64::new(-1.1803639459018257e-10, -7.127530328008888e-11),
                Complex64::new(1.1405425720688934e-9, 0.0),
            ],
        );
        assert!(reconstruction_error(&near_degenerate) < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for t in 0..60 {
            let n = 1 + t % 12;
            let g = CMatrix::from_fn(n, n, |_, _| crate::states::gaussian(&mut rng));
            let h = &g + g.adjoint();
            assert!(reconstruction_error(&h) < 1e-12 * h.norm().max(1.0));
            let (values, vectors) = hermitian_eigen(&h).unwrap();
            assert!(values.windows(2).all(|w| w[0] <= w[1]));
            assert!((vectors.adjoint() * &vectors - CMatrix::identity(n, n)).norm() < 1e-12);
        }
    }

    fn plus() -> DensityOperator {
        DensityOperator::pure_real(&[1.0, 1.0]).unwrap()
    }

    fn random_mixed(dim: usize, rng: &mut impl Rng) -> DensityOperator {
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let w = &g * g.adjoint();
        let tr = w.trace().re;
        DensityOperator::from_trusted(w / c(tr))
    }

    /// The qubit-clock dephased matrix: 1/4 [1; 1 1; 1 1; 1].
    fn clock_matrix() -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 3)] {
            m[(i, j)] = c(0.25);
        }
        m
    }

    #[test]
    fn tensor_of_plus_states_is_uniform() {
        let tol = ToleranceConfig::default();
        let t = tensor_product(&plus(), &plus(), &tol).unwrap();
        assert_eq!(t.dim(), 4);
        for z in t.matrix().iter() {
            assert_abs_diff_eq!(z.re, 0.25, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn tensor_of_maximally_mixed() {
        let tol = ToleranceConfig::default();
        let half = DensityOperator::maximally_mixed(2).unwrap();
        let t = tensor_product(&half, &half, &tol).unwrap();
        assert!(t.max_abs_diff(&DensityOperator::maximally_mixed(4).unwrap()) < 1e-15);
    }

    #[test]
    fn tensor_matches_elementwise_kronecker() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_mixed(2, &mut rng);
        let b = random_mixed(3, &mut rng);
        let t = tensor_product(&a, &b, &tol).unwrap();
        for ia in 0..2 {
            for ja in 0..2 {
                for ib in 0..3 {
                    for jb in 0..3 {
                        let expect = a.get(ia, ja) * b.get(ib, jb);
                        let got = t.get(ia * 3 + ib, ja * 3 + jb);
                        assert!((expect - got).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_respects_max_dim() {
        let tol = ToleranceConfig {
            max_dim: 8,
            ..Default::default()
        };
        let a = DensityOperator::maximally_mixed(3).unwrap();
        assert!(matches!(
            tensor_product(&a, &a, &tol),
            Err(Error::DimensionOverflow { dim: 9, max: 8 })
        ));
    }

    #[test]
    fn partial_trace_cases() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_mixed(2, &mut rng);
        let b = random_mixed(3, &mut rng);
        let ab = tensor_product(&a, &b, &tol).unwrap();
        assert!(partial_trace(&ab, 2, 3, Subsystem::S).unwrap().max_abs_diff(&a) < 1e-12);
        assert!(partial_trace(&ab, 2, 3, Subsystem::R).unwrap().max_abs_diff(&b) < 1e-12);

        let psi_plus = DensityOperator::pure_real(&[0.0, 1.0, 1.0, 0.0]).unwrap();
        let reduced = partial_trace(&psi_plus, 2, 2, Subsystem::S).unwrap();
        assert!(reduced.max_abs_diff(&DensityOperator::maximally_mixed(2).unwrap()) < 1e-15);

        assert!(matches!(
            partial_trace(&psi_plus, 2, 3, Subsystem::S),
            Err(Error::DimensionMismatch { expected: 6, actual: 4 })
        ));
    }

    #[test]
    fn partial_trace_matches_index_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_mixed(4, &mut rng);
        let m = rho.matrix();
        let reduced = partial_trace(&rho, 2, 2, Subsystem::R).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut sum = c(0.0);
                for traced in 0..2 {
                    sum += m[(traced * 2 + i, traced * 2 + j)];
                }
                assert!((sum - reduced.get(i, j)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn spectra_of_named_states() {
        let tol = ToleranceConfig::default();
        let quarter = eigen_spectrum(&DensityOperator::maximally_mixed(4).unwrap(), &tol).unwrap();
        assert_eq!(quarter, vec![0.25; 4]);

        let clock = validate_density(clock_matrix(), &tol).unwrap();
        let spec = eigen_spectrum(&clock, &tol).unwrap();
        for (got, want) in spec.iter().zip([0.5, 0.25, 0.25, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }

        let pure = DensityOperator::pure_real(&[0.3, -0.2, 0.9]).unwrap();
        let spec = eigen_spectrum(&pure, &tol).unwrap();
        assert_abs_diff_eq!(spec[0], 1.0, epsilon = 1e-12);
        assert!(spec[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn entropies_of_named_states() {
        let tol = ToleranceConfig::default();
        let pure = DensityOperator::pure_real(&[1.0, 2.0, -1.0]).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&pure, &tol).unwrap(), 0.0, epsilon = 1e-10);
        for d in [2usize, 3, 5, 8] {
            let mixed = DensityOperator::maximally_mixed(d).unwrap();
            assert_abs_diff_eq!(
                von_neumann_entropy(&mixed, &tol).unwrap(),
                (d as f64).log2(),
                epsilon = 1e-12
            );
        }
        let clock = validate_density(clock_matrix(), &tol).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&clock, &tol).unwrap(), 1.5, epsilon = 1e-12);
        let nat = ToleranceConfig::natural_log();
        assert_abs_diff_eq!(
            von_neumann_entropy(&clock, &nat).unwrap(),
            1.5 * 2f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn relative_entropy_cases() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_mixed(3, &mut rng);
        assert_abs_diff_eq!(relative_entropy(&rho, &rho, &tol).unwrap(), 0.0, epsilon = 1e-10);

        let zero = DensityOperator::pure_real(&[1.0, 0.0]).unwrap();
        let one = DensityOperator::pure_real(&[0.0, 1.0]).unwrap();
        assert_eq!(relative_entropy(&zero, &one, &tol).unwrap(), f64::INFINITY);

        // Class state and its diagonal: S(rho || sigma*) = S(sigma*) - S(rho).
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.7);
        m[(1, 1)] = c(0.3);
        m[(0, 1)] = Complex64::new(0.2, 0.1);
        m[(1, 0)] = Complex64::new(0.2, -0.1);
        let class = validate_density(m, &tol).unwrap();
        let sigma = DensityOperator::diagonal(&[0.7, 0.3], &tol).unwrap();
        let want = von_neumann_entropy(&sigma, &tol).unwrap() - von_neumann_entropy(&class, &tol).unwrap();
        assert_abs_diff_eq!(relative_entropy(&class, &sigma, &tol).unwrap(), want, epsilon = 1e-12);

        assert!(matches!(
            relative_entropy(&zero, &rho, &tol),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validation_reports() {
        let tol = ToleranceConfig::default();
        assert!(validate_density(CMatrix::identity(2, 2) * c(0.5), &tol).is_ok());
        assert!(validate_density(clock_matrix(), &tol).is_ok());

        let heavy = CMatrix::identity(2, 2) * c(0.55);
        match validate_density(heavy, &tol) {
            Err(Error::InvalidDensity(Violation::TraceMismatch { trace, .. })) => {
                assert_abs_diff_eq!(trace, 1.1, epsilon = 1e-12)
            }
            other => panic!("expected trace violation, got {other:?}"),
        }

        let mut skew = CMatrix::identity(2, 2) * c(0.5);
        skew[(0, 1)] = c(0.1);
        assert!(matches!(
            validate_density(skew, &tol),
            Err(Error::InvalidDensity(Violation::NotHermitian { .. }))
        ));

        let negative = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.2), c(-0.2)]));
        assert!(matches!(
            validate_density(negative, &tol),
            Err(Error::InvalidDensity(Violation::NotPositive { .. }))
        ));

        assert!(matches!(
            validate_density(CMatrix::zeros(2, 3), &tol),
            Err(Error::InvalidDensity(Violation::NotSquare { rows: 2, cols: 3 }))
        ));
    }

    #[test]
    fn tolerance_overrides() {
        let tol = ToleranceConfig::default()
            .with_overrides("psd_tol=1e-7, log_base=e")
            .unwrap();
        assert_eq!(tol.psd_tol, 1e-7);
        assert_eq!(tol.log_base, std::f64::consts::E);
        assert!(ToleranceConfig::default().with_overrides("psd_tol=0").is_err());
        assert!(ToleranceConfig::default().with_overrides("log_base=1").is_err());
        assert!(ToleranceConfig::default().with_overrides("nope=1").is_err());
    }

    #[test]
    fn matrix_json_shape_is_checked() {
        let bad = MatrixJson {
            dim: 2,
            re: vec![vec![1.0, 0.0]],
            im: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        };
        assert!(matches!(bad.to_matrix(), Err(Error::Input(_))));
        let tol = ToleranceConfig::default();
        let rho = plus();
        let text = serde_json::to_string(&rho).unwrap();
        let back = read_density(text.as_bytes(), &tol).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-15);
    }
}

