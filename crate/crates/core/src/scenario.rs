//! Named reproduction scenarios, parameter sweeps and their export.

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charge::{dephase_global, twirl_phase_average, BipartiteSystem, ChargeSpectrum};
use crate::entanglement::{verify_theorem, THEOREM_TOL};
use crate::error::{Error, Result};
use crate::measures::{
    closed_form_gap, closed_form_max_coherent, holevo_asymmetry, inputs_digest, internal_coherence, shared_asymmetry,
    upper_bound, MeasureReport,
};
use crate::operator::{tensor_product, DensityOperator, ToleranceConfig};
use crate::states::{
    build_gap_qubit, build_ideal_block_state, build_maximally_coherent, ebit, ideal_block_system,
    max_coherent_product, random_state_with, refbit, RandomKind,
};

/// Agreement required between a measured value and its closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Slack on `A^(sh) <= bound` in the bound audit.
pub const BOUND_SLACK: f64 = 1e-9;
/// Largest accepted max-norm gap between quadrature twirl and projector dephasing.
pub const TWIRL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    QubitClock,
    MaxCoherent,
    GapSweep,
    IdealMixed,
    RefbitEbit,
    TheoremRandom,
    BoundAudit,
    TwirlEquivalence,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 8] = [
        ScenarioName::QubitClock,
        ScenarioName::MaxCoherent,
        ScenarioName::GapSweep,
        ScenarioName::IdealMixed,
        ScenarioName::RefbitEbit,
        ScenarioName::TheoremRandom,
        ScenarioName::BoundAudit,
        ScenarioName::TwirlEquivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioName::QubitClock => "qubit-clock",
            ScenarioName::MaxCoherent => "max-coherent",
            ScenarioName::GapSweep => "gap-sweep",
            ScenarioName::IdealMixed => "ideal-mixed",
            ScenarioName::RefbitEbit => "refbit-ebit",
            ScenarioName::TheoremRandom => "theorem-random",
            ScenarioName::BoundAudit => "bound-audit",
            ScenarioName::TwirlEquivalence => "twirl-equivalence",
        }
    }

    /// Accepted parameters with their defaults.
    pub fn defaults(self) -> &'static [(&'static str, i64)] {
        match self {
            ScenarioName::QubitClock | ScenarioName::RefbitEbit => &[],
            ScenarioName::MaxCoherent => &[("d_s", 2), ("d_min", 2), ("d_max", 64)],
            ScenarioName::GapSweep => &[("d", 16)],
            ScenarioName::IdealMixed => &[("d", 4)],
            ScenarioName::TheoremRandom => &[("d_max", 4), ("samples", 200), ("seed", 0)],
            ScenarioName::BoundAudit => &[("d_max", 4), ("samples", 1000), ("seed", 0)],
            ScenarioName::TwirlEquivalence => &[("d_max", 4), ("samples", 20), ("seed", 0)],
        }
    }

    /// Parameter set by the CLI's `--d`.
    pub fn dimension_param(self) -> Option<&'static str> {
        match self {
            ScenarioName::QubitClock | ScenarioName::RefbitEbit => None,
            ScenarioName::GapSweep | ScenarioName::IdealMixed => Some("d"),
            _ => Some("d_max"),
        }
    }
}

impl std::fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ScenarioName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: ScenarioName,
    pub params: BTreeMap<String, i64>,
}

impl ScenarioSpec {
    pub fn new(name: ScenarioName) -> Self {
        ScenarioSpec {
            name,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: i64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Defaults overlaid with the given parameters; unknown keys are rejected.
    pub fn resolved(&self) -> Result<BTreeMap<String, i64>> {
        let mut out: BTreeMap<String, i64> =
            self.name.defaults().iter().map(|&(k, v)| (k.to_string(), v)).collect();
        for (k, &v) in &self.params {
            if !out.contains_key(k) {
                return Err(Error::InvalidArgument(format!(
                    "scenario {} takes no parameter `{k}`",
                    self.name
                )));
            }
            out.insert(k.clone(), v);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub measures: Vec<MeasureReport>,
    /// Closed-form or reference value the first measure is checked against.
    pub expected: Option<f64>,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: ScenarioName,
    pub params: BTreeMap<String, i64>,
    /// Which charge spectra the states were measured against.
    pub spectra: String,
    pub log_base: f64,
    pub axis: String,
    pub rows: Vec<SweepRow>,
    pub bound_curve: Option<Vec<f64>>,
}

impl SweepResult {
    /// Rows whose identity or bound check failed.
    pub fn failures(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.pass == Some(false)).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }
}

fn param(params: &BTreeMap<String, i64>, key: &str) -> i64 {
    params[key]
}

fn dim_param(params: &BTreeMap<String, i64>, key: &str, min: i64, max: i64) -> Result<usize> {
    let v = param(params, key);
    if v < min || v > max {
        return Err(Error::InvalidArgument(format!("{key} must lie in [{min}, {max}], got {v}")));
    }
    Ok(v as usize)
}

fn report(name: &str, value: f64, tol: &ToleranceConfig, rho: &DensityOperator, system: &BipartiteSystem) -> MeasureReport {
    MeasureReport::new(name, value, tol, inputs_digest(rho, Some(system)))
}

fn row_rng(seed: i64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    rng.set_stream(row as u64);
    rng
}

/// Runs a scenario; numeric failures carry the scenario name.
pub fn run_scenario(spec: &ScenarioSpec, tol: &ToleranceConfig) -> Result<SweepResult> {
    let params = spec.resolved()?;
    run_resolved(spec.name, &params, tol).map_err(|e| match e {
        Error::InvalidArgument(_) => e,
        other => Error::Scenario {
            scenario: spec.name.to_string(),
            source: Box::new(other),
        },
    })
}

fn run_resolved(name: ScenarioName, params: &BTreeMap<String, i64>, tol: &ToleranceConfig) -> Result<SweepResult> {
    let (axis, spectra, rows) = match name {
        ScenarioName::QubitClock => ("row", "sigma_z x sigma_z".to_string(), qubit_clock(tol)?),
        ScenarioName::MaxCoherent => {
            let d_s = dim_param(params, "d_s", 2, 64)?;
            let d_max = dim_param(params, "d_max", 2, 256)?;
            let d_min = dim_param(params, "d_min", 2, 256)?.max(d_s);
            ("d_r", format!("ladder {d_s} x ladder d_r"), max_coherent(d_s, d_min, d_max, tol)?)
        }
        ScenarioName::GapSweep => {
            let d = dim_param(params, "d", 3, 64)?;
            ("gap_target", format!("ladder {d} x ladder {d}"), gap_sweep(d, tol)?)
        }
        ScenarioName::IdealMixed => {
            let d = dim_param(params, "d", 3, 16)?;
            ("d", "ladder d-1 x ladder d".to_string(), ideal_mixed(d, tol)?)
        }
        ScenarioName::RefbitEbit => ("ebit", "ladder 2 x ladder 2".to_string(), refbit_ebit(tol)?),
        ScenarioName::TheoremRandom => {
            let d_max = dim_param(params, "d_max", 2, 8)?;
            let samples = dim_param(params, "samples", 1, 1_000_000)?;
            let rows = theorem_random(d_max, samples, param(params, "seed"), tol)?;
            ("sample", format!("ladder d_s x ladder d_r, 2 <= d <= {d_max}"), rows)
        }
        ScenarioName::BoundAudit => {
            let d_max = dim_param(params, "d_max", 2, 8)?;
            let samples = dim_param(params, "samples", 1, 1_000_000)?;
            let rows = bound_audit(d_max, samples, param(params, "seed"), tol)?;
            ("sample", format!("ladder d_s x ladder d_r, 2 <= d <= {d_max}"), rows)
        }
        ScenarioName::TwirlEquivalence => {
            let d_max = dim_param(params, "d_max", 2, 8)?;
            let samples = dim_param(params, "samples", 1, 1_000_000)?;
            let rows = twirl_equivalence(d_max, samples, param(params, "seed"), tol)?;
            ("sample", format!("ladder d_s x ladder d_r, 2 <= d <= {d_max}"), rows)
        }
    };
    let bounds: Vec<f64> = rows.iter().filter_map(|r| r.bound).collect();
    let bound_curve = (!bounds.is_empty() && bounds.len() == rows.len()).then_some(bounds);
    Ok(SweepResult {
        scenario: name,
        params: params.clone(),
        spectra,
        log_base: tol.log_base,
        axis: axis.to_string(),
        rows,
        bound_curve,
    })
}

fn close(value: f64, expected: f64) -> bool {
    (value - expected).abs() <= CLOSED_FORM_TOL
}

fn qubit_clock(tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    let system = BipartiteSystem::new(ChargeSpectrum::sigma_z(), ChargeSpectrum::sigma_z());
    let plus = build_maximally_coherent(2)?;
    let rho = refbit();
    let a = shared_asymmetry(&rho, &system, tol)?;
    let expected = tol.log(2.0) / 2.0;
    Ok(vec![SweepRow {
        param: 0.0,
        measures: vec![
            report("shared_asymmetry", a, tol, &rho, &system),
            report("internal_coherence", internal_coherence(&rho, &system, tol)?, tol, &rho, &system),
            report("holevo_asymmetry_s", holevo_asymmetry(&plus, &system.spectrum_s, tol)?, tol, &rho, &system),
            report("holevo_asymmetry_r", holevo_asymmetry(&plus, &system.spectrum_r, tol)?, tol, &rho, &system),
        ],
        expected: Some(expected),
        bound: Some(upper_bound(&system, Some((&plus, &plus)), tol)?),
        pass: Some(close(a, expected)),
    }])
}

fn max_coherent(d_s: usize, d_min: usize, d_max: usize, tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    (d_min..=d_max)
        .map(|d_r| {
            let system = BipartiteSystem::ladder(d_s, d_r)?;
            let rho = max_coherent_product(d_s, d_r)?;
            let a = shared_asymmetry(&rho, &system, tol)?;
            let expected = closed_form_max_coherent(d_s, d_r, tol)?;
            Ok(SweepRow {
                param: d_r as f64,
                measures: vec![report("shared_asymmetry", a, tol, &rho, &system)],
                expected: Some(expected),
                bound: Some(upper_bound(&system, None, tol)?),
                pass: Some(close(a, expected)),
            })
        })
        .collect()
}

fn gap_sweep(d: usize, tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    let reference = build_maximally_coherent(d)?;
    let system = BipartiteSystem::ladder(d, d)?;
    (1..d)
        .map(|gap| {
            let s = build_gap_qubit(d, gap)?;
            let rho = tensor_product(&s, &reference, tol)?;
            let a = shared_asymmetry(&rho, &system, tol)?;
            let expected = closed_form_gap(d, d - gap, tol)?;
            Ok(SweepRow {
                param: gap as f64,
                measures: vec![report("shared_asymmetry", a, tol, &rho, &system)],
                expected: Some(expected),
                bound: Some(upper_bound(&system, Some((&s, &reference)), tol)?),
                pass: Some(close(a, expected)),
            })
        })
        .collect()
}

fn ideal_mixed(d_max: usize, tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    (3..=d_max)
        .map(|d| {
            let system = ideal_block_system(d)?;
            let ideal = build_ideal_block_state(d)?;
            let comparison = max_coherent_product(d - 1, d)?;
            let a_ideal = shared_asymmetry(&ideal, &system, tol)?;
            let a_cmp = shared_asymmetry(&comparison, &system, tol)?;
            let bound = upper_bound(&system, None, tol)?;
            Ok(SweepRow {
                param: d as f64,
                measures: vec![
                    report("shared_asymmetry_ideal", a_ideal, tol, &ideal, &system),
                    report("shared_asymmetry_comparison", a_cmp, tol, &comparison, &system),
                ],
                expected: Some(bound),
                bound: Some(bound),
                pass: Some(close(a_ideal, bound) && a_ideal > a_cmp),
            })
        })
        .collect()
}

fn refbit_ebit(tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    let system = BipartiteSystem::ladder(2, 2)?;
    [(refbit(), 0.5), (ebit(), 1.0)]
        .into_iter()
        .enumerate()
        .map(|(k, (rho, bits))| {
            let a = shared_asymmetry(&rho, &system, tol)?;
            let expected = bits * tol.log(2.0);
            Ok(SweepRow {
                param: k as f64,
                measures: vec![report("shared_asymmetry", a, tol, &rho, &system)],
                expected: Some(expected),
                bound: Some(upper_bound(&system, None, tol)?),
                pass: Some(close(a, expected)),
            })
        })
        .collect()
}

/// Random dimension pair in `[2, d_max]^2`, a random state kind and a seeded state.
fn random_case(rng: &mut ChaCha8Rng, d_max: usize) -> Result<(BipartiteSystem, DensityOperator)> {
    let d_s = rng.gen_range(2..=d_max);
    let d_r = rng.gen_range(2..=d_max);
    let kind = RandomKind::ALL[rng.gen_range(0..RandomKind::ALL.len())];
    let system = BipartiteSystem::ladder(d_s, d_r)?;
    let rho = random_state_with(&system, kind, rng)?;
    Ok((system, rho))
}

fn theorem_random(d_max: usize, samples: usize, seed: i64, tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    (0..samples)
        .map(|k| {
            let (system, rho) = random_case(&mut row_rng(seed, k), d_max)?;
            let check = verify_theorem(&rho, &system, tol)?;
            Ok(SweepRow {
                param: k as f64,
                measures: vec![
                    report("shared_asymmetry", check.shared_asymmetry, tol, &rho, &system),
                    report("sector_sum", check.sector_sum, tol, &rho, &system),
                ],
                expected: Some(check.sector_sum),
                bound: None,
                pass: Some(check.difference <= THEOREM_TOL),
            })
        })
        .collect()
}

fn bound_audit(d_max: usize, samples: usize, seed: i64, tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    (0..samples)
        .map(|k| {
            let (system, rho) = random_case(&mut row_rng(seed, k), d_max)?;
            let a = shared_asymmetry(&rho, &system, tol)?;
            let bound = upper_bound(&system, None, tol)?;
            Ok(SweepRow {
                param: k as f64,
                measures: vec![report("shared_asymmetry", a, tol, &rho, &system)],
                expected: None,
                bound: Some(bound),
                pass: Some(a <= bound + BOUND_SLACK),
            })
        })
        .collect()
}

fn twirl_equivalence(d_max: usize, samples: usize, seed: i64, tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    (0..samples)
        .map(|k| {
            let (system, rho) = random_case(&mut row_rng(seed, k), d_max)?;
            let n_points = system.charge_range() as usize + 1;
            let twirled = twirl_phase_average(&rho, &system, n_points)?;
            let dephased = dephase_global(&rho, &system)?;
            let diff = twirled.max_abs_diff(&dephased);
            Ok(SweepRow {
                param: k as f64,
                measures: vec![report("twirl_max_abs_diff", diff, tol, &rho, &system)],
                expected: Some(0.0),
                bound: None,
                pass: Some(diff <= TWIRL_TOL),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidArgument(format!("unknown export format `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct CsvLine<'a> {
    param: f64,
    measure: &'a str,
    value: f64,
    log_base: f64,
    bound: Option<f64>,
    pass: Option<bool>,
}

/// Writes a sweep as pretty JSON or as CSV with one line per (row, measure).
pub fn export(result: &SweepResult, format: Format, out: impl Write) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, result)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in &result.rows {
                for m in &row.measures {
                    w.serialize(CsvLine {
                        param: row.param,
                        measure: &m.name,
                        value: m.value,
                        log_base: m.log_base,
                        bound: row.bound,
                        pass: row.pass,
                    })?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn export_to_string(result: &SweepResult, format: Format) -> Result<String> {
    let mut buf = Vec::new();
    export(result, format, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Input(e.to_string()))
}

pub fn import_json(reader: impl std::io::Read) -> Result<SweepResult> {
    Ok(serde_json::from_reader(reader)?)
}
