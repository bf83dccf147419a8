//! Numerical minimization of `S(ρ || σ)` over separable `σ`.
//!
//! `σ = Σ_k p_k |a_k><a_k| ⊗ |b_k><b_k|` with unnormalized complex `a_k`, `b_k`
//! (normalized on evaluation) and `p = softmax(θ)`, so the search space is
//! unconstrained. Each restart draws a random ansatz and runs L-BFGS on the
//! analytic gradient. After the run the best product state for the final
//! gradient gives the Frank–Wolfe duality gap, an upper bound on `value - min`.

use std::cell::RefCell;

use argmin::core::{CostFunction, Executor, Gradient, State, TerminationReason, TerminationStatus};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::sector_state::{AnsatzComponent, SeparableAnsatz};
use crate::error::{Error, Result};
use crate::operator::{hermitian_eigen, shannon_nats, CMatrix, CVector, DensityOperator, ToleranceConfig};
use crate::states::random_unit_vector;

pub const MAX_LOCAL_DIM: usize = 4;

const EIGEN_FLOOR: f64 = 1e-15;
const LBFGS_MEMORY: usize = 10;
const ALTERNATION_STEPS: usize = 100;
const CERTIFICATE_STARTS: usize = 16;
const KERNEL_CUT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Product components in the ansatz.
    #[serde(rename = "K")]
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once one L-BFGS step changes the objective by less than this, in nats.
    pub step_tolerance: f64,
    pub seed: u64,
}

impl OracleConfig {
    pub fn for_dims(d1: usize, d2: usize, seed: u64) -> Self {
        let n = d1 * d2;
        OracleConfig {
            k: n * n,
            restarts: 32,
            max_iters: 1000,
            step_tolerance: 1e-10,
            seed,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 || self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument("oracle K, restarts and max_iters must be positive".into()));
        }
        if !(self.step_tolerance > 0.0 && self.step_tolerance.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step tolerance must be positive, got {}",
                self.step_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Best `S(ρ || σ)` over restarts, at the configured log base.
    pub value: f64,
    /// Whether the best restart met `step_tolerance` within `max_iters`.
    pub converged: bool,
    #[serde(rename = "K")]
    pub k: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Duality gap of the best restart: `value - min <= gap`.
    #[serde(skip)]
    pub gap: f64,
    #[serde(skip)]
    pub unconverged_restarts: usize,
    #[serde(skip)]
    pub best_ansatz: SeparableAnsatz,
}

/// Minimizes `S(ρ || σ)` over separable `σ` on `d1 x d2`.
///
/// An exhausted iteration budget is not an error: the best point found is
/// returned with `converged = false`.
pub fn oracle_min_relative_entropy(
    rho: &DensityOperator,
    d1: usize,
    d2: usize,
    config: &OracleConfig,
    tol: &ToleranceConfig,
) -> Result<OracleResult> {
    config.validate()?;
    if d1 == 0 || d2 == 0 || d1 > MAX_LOCAL_DIM || d2 > MAX_LOCAL_DIM {
        return Err(Error::DimensionOverflow {
            dim: d1.max(d2),
            max: MAX_LOCAL_DIM,
        });
    }
    if rho.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            actual: rho.dim(),
        });
    }
    let objective = Objective::new(rho, d1, d2, config.k)?;
    let mut best: Option<RestartOutcome> = None;
    let mut unconverged = 0;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(restart as u64);
        let outcome = objective.run(config, &mut rng)?;
        if !outcome.converged {
            unconverged += 1;
        }
        if best.as_ref().is_none_or(|b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    let best = best.expect("at least one restart");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(config.restarts as u64);
    let gap = objective.duality_gap(&best.ansatz, &mut rng)?;
    Ok(OracleResult {
        value: tol.from_nats(best.value),
        converged: best.converged,
        k: config.k,
        restarts: config.restarts,
        seed: config.seed,
        gap: tol.from_nats(gap),
        unconverged_restarts: unconverged,
        best_ansatz: best.ansatz,
    })
}

struct RestartOutcome {
    value: f64,
    converged: bool,
    ansatz: SeparableAnsatz,
}

/// The objective in nats and `M = -∇` with `∇` the gradient of `σ -> S(ρ || σ)`.
struct Point {
    value: f64,
    m: CMatrix,
}

type Evaluation = (Vec<f64>, f64, Vec<f64>);

struct Objective {
    rho: CMatrix,
    entropy: f64,
    d1: usize,
    d2: usize,
    k: usize,
    cache: RefCell<Option<Evaluation>>,
}

/// `(ln a - ln b) / (a - b)`, the divided difference of `ln`.
fn log_divided_difference(a: f64, b: f64) -> f64 {
    if (a - b).abs() <= 1e-12 * a.max(b) {
        2.0 / (a + b)
    } else {
        (a.ln() - b.ln()) / (a - b)
    }
}


fn normalized(v: CVector) -> (CVector, f64) {
    let norm = v.norm();
    (v / Complex64::new(norm, 0.0), norm)
}

impl Objective {
    fn new(rho: &DensityOperator, d1: usize, d2: usize, k: usize) -> Result<Self> {
        let (values, _) = hermitian_eigen(rho.matrix())?;
        Ok(Objective {
            rho: rho.matrix().clone(),
            entropy: shannon_nats(values.into_iter().map(|v| v.max(0.0)), 0.0),
            d1,
            d2,
            k,
            cache: RefCell::new(None),
        })
    }

    fn stride(&self) -> usize {
        1 + 2 * self.d1 + 2 * self.d2
    }

    /// Entries of `M` between two eigenvectors of `σ` with eigenvalues at most
    /// `kernel_cut` are set to zero: `ρ` has no weight there at a minimizer, and
    /// at finite precision they are roundoff divided by roundoff.
    fn evaluate(&self, sigma: &CMatrix, kernel_cut: f64) -> Result<Point> {
        let (lambda, vecs) = hermitian_eigen(sigma)?;
        let lambda: Vec<f64> = lambda.into_iter().map(|l| l.max(EIGEN_FLOOR)).collect();
        let rho_t = vecs.adjoint() * &self.rho * &vecs;
        let n = lambda.len();
        let cross: f64 = (0..n).map(|k| rho_t[(k, k)].re * lambda[k].ln()).sum();
        let m_t = CMatrix::from_fn(n, n, |i, j| {
            if lambda[i] <= kernel_cut && lambda[j] <= kernel_cut {
                Complex64::new(0.0, 0.0)
            } else {
                rho_t[(i, j)] * log_divided_difference(lambda[i], lambda[j])
            }
        });
        Ok(Point {
            value: -cross - self.entropy,
            m: &vecs * m_t * vecs.adjoint(),
        })
    }

    /// `Σ_{k,l} conj(b_k) M[(i,k),(j,l)] b_l`.
    fn contract_b(&self, m: &CMatrix, b: &CVector) -> CMatrix {
        let (d1, d2) = (self.d1, self.d2);
        CMatrix::from_fn(d1, d1, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d2 {
                for l in 0..d2 {
                    acc += b[k].conj() * m[(i * d2 + k, j * d2 + l)] * b[l];
                }
            }
            acc
        })
    }

    /// `Σ_{i,j} conj(a_i) M[(i,k),(j,l)] a_j`.
    fn contract_a(&self, m: &CMatrix, a: &CVector) -> CMatrix {
        let (d1, d2) = (self.d1, self.d2);
        CMatrix::from_fn(d2, d2, |k, l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..d1 {
                for j in 0..d1 {
                    acc += a[i].conj() * m[(i * d2 + k, j * d2 + l)] * a[j];
                }
            }
            acc
        })
    }

    fn random_params(&self, rng: &mut impl Rng) -> Vec<f64> {
        (0..self.k * self.stride())
            .map(|i| if i % self.stride() == 0 { 0.0 } else { rng.sample(StandardNormal) })
            .collect()
    }

    /// Softmax weights and unit factors (with the norms they had) of each component.
    #[allow(clippy::type_complexity)]
    fn decode(&self, params: &[f64]) -> (Vec<f64>, Vec<(CVector, f64)>, Vec<(CVector, f64)>) {
        let (d1, d2, stride) = (self.d1, self.d2, self.stride());
        let theta_max = params.iter().step_by(stride).copied().fold(f64::NEG_INFINITY, f64::max);
        let mut weights: Vec<f64> = params.iter().step_by(stride).map(|t| (t - theta_max).exp()).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut a = Vec::with_capacity(self.k);
        let mut b = Vec::with_capacity(self.k);
        for c in params.chunks(stride) {
            let va = CVector::from_fn(d1, |i, _| Complex64::new(c[1 + i], c[1 + d1 + i]));
            let off = 1 + 2 * d1;
            let vb = CVector::from_fn(d2, |i, _| Complex64::new(c[off + i], c[off + d2 + i]));
            a.push(normalized(va));
            b.push(normalized(vb));
        }
        (weights, a, b)
    }

    fn ansatz(&self, params: &[f64]) -> SeparableAnsatz {
        let (weights, a, b) = self.decode(params);
        SeparableAnsatz {
            components: weights
                .into_iter()
                .zip(a.into_iter().zip(b))
                .map(|(weight, ((a, _), (b, _)))| AnsatzComponent { weight, a, b })
                .collect(),
        }
    }

    fn cost_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        if let Some((p, f, g)) = self.cache.borrow().as_ref() {
            if p.as_slice() == params {
                return Ok((*f, g.clone()));
            }
        }
        let (d1, d2, stride) = (self.d1, self.d2, self.stride());
        let (weights, a, b) = self.decode(params);
        // Columns sqrt(p_k) |a_k b_k>, so σ = P P†.
        let mut p = CMatrix::zeros(d1 * d2, self.k);
        for k in 0..self.k {
            let scale = weights[k].sqrt();
            for i in 0..d1 {
                for j in 0..d2 {
                    p[(i * d2 + j, k)] = a[k].0[i] * b[k].0[j] * scale;
                }
            }
        }
        let sigma = &p * p.adjoint();
        let point = self.evaluate(&sigma, 0.0)?;
        let mp = &point.m * &p;

        let mut q = vec![0.0; self.k];
        for k in 0..self.k {
            if weights[k] > 0.0 {
                q[k] = p.column(k).dotc(&mp.column(k)).re / weights[k];
            }
        }
        let mean_q: f64 = q.iter().zip(&weights).map(|(q, w)| q * w).sum();

        // With x = |x| u, d/d(Re x) + i d/d(Im x) of -w <x|N|x>/<x|x> is -2w (N u - q u)/|x|,
        // and N u for either factor is a partial contraction of M|a b>.
        let mut grad = vec![0.0; params.len()];
        for k in 0..self.k {
            let g = &mut grad[k * stride..(k + 1) * stride];
            let w = weights[k];
            g[0] = w * (mean_q - q[k]);
            if w == 0.0 {
                continue;
            }
            let ((ua, na), (ub, nb)) = (&a[k], &b[k]);
            let col = mp.column(k);
            let inv = 1.0 / w.sqrt();
            let off = 1 + 2 * d1;
            for i in 0..d1 {
                let mut n_u = Complex64::new(0.0, 0.0);
                for j in 0..d2 {
                    n_u += ub[j].conj() * col[i * d2 + j];
                }
                let gi = (n_u * inv - ua[i] * q[k]) * (-2.0 * w / na);
                g[1 + i] = gi.re;
                g[1 + d1 + i] = gi.im;
            }
            for j in 0..d2 {
                let mut n_u = Complex64::new(0.0, 0.0);
                for i in 0..d1 {
                    n_u += ua[i].conj() * col[i * d2 + j];
                }
                let gj = (n_u * inv - ub[j] * q[k]) * (-2.0 * w / nb);
                g[off + j] = gj.re;
                g[off + d2 + j] = gj.im;
            }
        }
        *self.cache.borrow_mut() = Some((params.to_vec(), point.value, grad.clone()));
        Ok((point.value, grad))
    }

    fn run(&self, config: &OracleConfig, rng: &mut ChaCha8Rng) -> Result<RestartOutcome> {
        let init = self.random_params(rng);
        let solver = LBFGS::new(MoreThuenteLineSearch::new(), LBFGS_MEMORY)
            .with_tolerance_cost(config.step_tolerance)
            .and_then(|s| s.with_tolerance_grad(1e-12))
            .map_err(|e| Error::Optimizer(e.to_string()))?;
        let result = Executor::new(self, solver)
            .configure(|state| state.param(init.clone()).max_iters(config.max_iters as u64))
            .run();
        let (params, converged) = match result {
            Ok(res) => {
                let state = res.state();
                let converged = matches!(
                    state.get_termination_status(),
                    TerminationStatus::Terminated(TerminationReason::SolverConverged)
                );
                let params = state.get_best_param().cloned().unwrap_or(init);
                (params, converged)
            }
            // The line search can fail to bracket on a flat or ill-conditioned
            // stretch; the starting point is still a valid, unconverged answer.
            Err(_) => (init, false),
        };
        let value = self.cost_and_gradient(&params)?.0;
        Ok(RestartOutcome {
            value,
            converged,
            ansatz: self.ansatz(&params),
        })
    }

    fn top_vector(m: &CMatrix) -> Result<(f64, CVector)> {
        let (values, vecs) = hermitian_eigen(m)?;
        let last = values.len() - 1;
        Ok((values[last], vecs.column(last).into_owned()))
    }

    /// Local maximum of `<ab|M|ab>` by alternating top eigenvectors over the two factors.
    fn alternate(&self, m: &CMatrix, mut a: CVector) -> Result<f64> {
        let mut value = f64::NEG_INFINITY;
        for _ in 0..ALTERNATION_STEPS {
            let b = Self::top_vector(&self.contract_a(m, &a))?.1;
            let (v, next_a) = Self::top_vector(&self.contract_b(m, &b))?;
            a = next_a;
            let improved = v - value;
            value = v;
            if improved.abs() <= 1e-14 {
                break;
            }
        }
        Ok(value)
    }

    /// `max_{ab} <ab|M|ab> - Tr(M σ)` at the ansatz, searched from every ansatz
    /// component, the leading factor of each eigenvector of `M` and random starts.
    fn duality_gap(&self, ansatz: &SeparableAnsatz, rng: &mut impl Rng) -> Result<f64> {
        let sigma = ansatz.density().into_matrix();
        let point = self.evaluate(&sigma, KERNEL_CUT)?;
        let current: f64 = point.m.iter().zip(sigma.transpose().iter()).map(|(x, y)| (x * y).re).sum();
        let mut starts: Vec<CVector> = ansatz.components.iter().map(|c| c.a.clone()).collect();
        let (_, vecs) = hermitian_eigen(&point.m)?;
        for col in 0..vecs.ncols() {
            let psi = CMatrix::from_fn(self.d1, self.d2, |i, k| vecs[(i * self.d2 + k, col)]);
            let svd = psi.svd(true, false);
            let u = svd.u.expect("u requested");
            let first = (0..svd.singular_values.len())
                .max_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]))
                .unwrap_or(0);
            starts.push(u.column(first).into_owned());
        }
        for _ in 0..CERTIFICATE_STARTS {
            starts.push(random_unit_vector(self.d1, rng));
        }
        let mut top = f64::NEG_INFINITY;
        for a in starts {
            top = top.max(self.alternate(&point.m, a)?);
        }
        Ok((top - current).max(0.0))
    }
}

impl CostFunction for &Objective {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, params: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.cost_and_gradient(params)?.0)
    }
}

impl Gradient for &Objective {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, params: &Self::Param) -> std::result::Result<Vec<f64>, argmin::core::Error> {
        Ok(self.cost_and_gradient(params)?.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{relative_entropy_entanglement, SectorState};
    use crate::operator::relative_entropy;
    use crate::states::{ebit, random_mixed};

    fn quick(d1: usize, d2: usize, seed: u64) -> OracleConfig {
        OracleConfig::for_dims(d1, d2, seed).with_restarts(2)
    }

    #[test]
    fn separable_input_gives_zero() {
        let tol = ToleranceConfig::default();
        let rho = DensityOperator::diagonal(&[0.1, 0.2, 0.3, 0.4], &tol).unwrap();
        let out = oracle_min_relative_entropy(&rho, 2, 2, &quick(2, 2, 1), &tol).unwrap();
        assert!(out.value.abs() <= 1e-6, "{}", out.value);
    }

    #[test]
    fn ebit_reaches_one_bit() {
        let tol = ToleranceConfig::default();
        let out = oracle_min_relative_entropy(&ebit(), 2, 2, &quick(2, 2, 3), &tol).unwrap();
        assert!((out.value - 1.0).abs() <= 5e-3, "{}", out.value);
        assert!(out.gap <= 5e-3, "{}", out.gap);
    }

    #[test]
    fn reported_value_matches_ansatz() {
        let tol = ToleranceConfig::default();
        let rho = ebit();
        let out = oracle_min_relative_entropy(&rho, 2, 2, &quick(2, 2, 5), &tol).unwrap();
        out.best_ansatz.validate().unwrap();
        let direct = relative_entropy(&rho, &out.best_ansatz.density(), &tol).unwrap();
        assert!((direct - out.value).abs() < 1e-8, "{direct} vs {}", out.value);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rho = random_mixed(6, &mut rng);
        let objective = Objective::new(&rho, 2, 3, 8).unwrap();
        let params = objective.random_params(&mut rng);
        let (_, grad) = objective.cost_and_gradient(&params).unwrap();
        let h = 1e-6;
        for i in 0..params.len() {
            let mut up = params.clone();
            let mut down = params.clone();
            up[i] += h;
            down[i] -= h;
            let fd = (objective.cost_and_gradient(&up).unwrap().0 - objective.cost_and_gradient(&down).unwrap().0)
                / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-6, "param {i}: fd {fd} vs {}", grad[i]);
        }
    }

    #[test]
    fn sector_state_agrees_with_closed_form() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let st = SectorState::new(random_mixed(3, &mut rng)).unwrap();
        let (rho, d1, d2) = st.embed();
        let out = oracle_min_relative_entropy(&rho, d1, d2, &quick(d1, d2, 9), &tol).unwrap();
        let closed = relative_entropy_entanglement(&st, &tol).unwrap();
        assert!((out.value - closed).abs() <= 5e-3, "{} vs {closed}", out.value);
        assert!(out.value - closed <= out.gap + 1e-9);
    }

    #[test]
    fn seeded_runs_repeat() {
        let tol = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_mixed(4, &mut rng);
        let a = oracle_min_relative_entropy(&rho, 2, 2, &quick(2, 2, 11), &tol).unwrap();
        let b = oracle_min_relative_entropy(&rho, 2, 2, &quick(2, 2, 11), &tol).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_ansatz, b.best_ansatz);
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let tol = ToleranceConfig::default();
        let config = OracleConfig {
            max_iters: 1,
            ..quick(2, 2, 1)
        };
        let out = oracle_min_relative_entropy(&ebit(), 2, 2, &config, &tol).unwrap();
        assert!(!out.converged);
        assert!(out.value >= 1.0 - 5e-3);
    }

    #[test]
    fn json_fields() {
        let tol = ToleranceConfig::default();
        let out = oracle_min_relative_entropy(&ebit(), 2, 2, &quick(2, 2, 4), &tol).unwrap();
        let v = serde_json::to_value(&out).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["K", "converged", "restarts", "seed", "value"]);
        assert_eq!(v["K"], 16);
    }

    #[test]
    fn rejects_large_or_mismatched_dims() {
        let tol = ToleranceConfig::default();
        let rho = DensityOperator::maximally_mixed(25).unwrap();
        assert!(oracle_min_relative_entropy(&rho, 5, 5, &quick(5, 5, 1), &tol).is_err());
        assert!(oracle_min_relative_entropy(&ebit(), 3, 2, &quick(3, 2, 1), &tol).is_err());
    }

    #[test]
    fn divided_difference_limits() {
        assert!((log_divided_difference(0.5, 0.5) - 2.0).abs() < 1e-15);
        let (a, b) = (0.3, 0.2);
        assert!((log_divided_difference(a, b) - (a.ln() - b.ln()) / (a - b)).abs() < 1e-15);
    }
}
