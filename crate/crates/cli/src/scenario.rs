//! Scenario files: parsing, validation, default resolution and canonical
//! re-emission.
//!
//! A scenario is one JSON document. [`parse_scenario_str`] lists every
//! unknown key before anything else is checked, then resolves all defaults
//! so that [`Scenario::canonical_json`] writes a file which parses back to
//! the same value.

use std::path::Path;

use fluidclock_core::madelung::HydroOptions;
use fluidclock_core::propagator::{default_dt, NormFault};
use fluidclock_core::subquantum::{characteristic_frequency, clock_ladder, Binning, StudyWalkers};
use fluidclock_core::{
    build_grid, make_potential, Grid, GridSpec, InitialState, Method, NodePolicy, PhysicalConstants, Potential,
    PotentialSpec, Wavefunction,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::tolerances::ToleranceOverrides;

const DEFAULT_STEPS: usize = 100;
const DEFAULT_VERIFY_STEPS: usize = 200;
const DEFAULT_LADDER_STEPS: usize = 50;
const DEFAULT_CLOCK_LEVELS: u32 = 6;
const DEFAULT_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub n: usize,
    pub seed: u64,
    pub bins: usize,
    pub binning: Binning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClockSpec {
    pub dt_list: Vec<f64>,
    pub total_time: f64,
    pub reference_refinement: usize,
    pub fit_max_ratio: f64,
    pub breakdown_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walkers: Option<StudyWalkers>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {
    /// Step of the balance-check trajectory; defaults to the scenario `dt`.
    pub dt: f64,
    /// Steps of the stride-1 trajectory the balance checks run on.
    pub max_steps: usize,
    /// Optional dt-halving ladder for measured orders; empty to skip.
    pub ladder: Vec<f64>,
    /// Horizon of each ladder run, in multiples of the largest ladder step.
    pub ladder_steps: usize,
}

/// Interference profile read along a line `axis = position`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenSpec {
    pub axis: usize,
    pub position: f64,
    pub min_maxima: usize,
    /// Maxima below `floor·max P` on the screen are ignored.
    pub floor: f64,
}

/// A fully resolved scenario. Every field is concrete.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub grid: GridSpec,
    pub constants: PhysicalConstants,
    pub initial_state: InitialState,
    pub potential: PotentialSpec,
    pub dt: f64,
    pub n_steps: usize,
    pub record_stride: usize,
    pub method: Method,
    pub nodes: NodePolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clock: Option<ClockSpec>,
    pub verify: VerifySpec,
    pub tolerances: ToleranceOverrides,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub screen: Option<ScreenSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inject_norm_scale: Option<NormFault>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

/// A scenario plus a note for every default that was filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScenario {
    pub scenario: Scenario,
    pub defaults: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnsembleFile {
    n: usize,
    seed: u64,
    bins: Option<usize>,
    binning: Option<Binning>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClockFile {
    dt_list: Option<Vec<f64>>,
    total_time: Option<f64>,
    reference_refinement: Option<usize>,
    fit_max_ratio: Option<f64>,
    breakdown_ratio: Option<f64>,
    walkers: Option<StudyWalkers>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyFile {
    dt: Option<f64>,
    max_steps: Option<usize>,
    ladder: Option<Vec<f64>>,
    ladder_steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScreenFile {
    axis: Option<usize>,
    position: f64,
    min_maxima: Option<usize>,
    floor: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    grid: GridSpec,
    constants: Option<PhysicalConstants>,
    initial_state: InitialState,
    potential: Option<PotentialSpec>,
    dt: Option<f64>,
    n_steps: Option<usize>,
    record_stride: Option<usize>,
    method: Option<Method>,
    nodes: Option<NodePolicy>,
    ensemble: Option<EnsembleFile>,
    clock: Option<ClockFile>,
    verify: Option<VerifyFile>,
    tolerances: Option<ToleranceOverrides>,
    screen: Option<ScreenFile>,
    inject_norm_scale: Option<NormFault>,
    output_dir: Option<String>,
}

const TOP_KEYS: &[&str] = &[
    "name",
    "grid",
    "constants",
    "initial_state",
    "potential",
    "dt",
    "n_steps",
    "record_stride",
    "method",
    "nodes",
    "ensemble",
    "clock",
    "verify",
    "tolerances",
    "screen",
    "inject_norm_scale",
    "output_dir",
];

fn check_keys(value: &Value, path: &str, allowed: &[&str], out: &mut Vec<String>) {
    if let Value::Object(map) = value {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                out.push(format!("{path}.{key}"));
            }
        }
    }
}

fn child<'a>(value: &'a Value, key: &str) -> Option<&'a Value> {
    value.as_object().and_then(|m: &Map<String, Value>| m.get(key))
}

fn check_state_keys(value: &Value, path: &str, out: &mut Vec<String>) {
    let allowed: &[&str] = match child(value, "kind").and_then(Value::as_str) {
        Some("plane-wave") => &["kind", "k"],
        Some("gaussian") => &["kind", "center", "sigma", "k0"],
        Some("ho-ground") => &["kind", "omega"],
        Some("ho-coherent") => &["kind", "omega", "displacement"],
        Some("superposition") => &["kind", "terms"],
        // unknown kinds are reported by the typed parser
        _ => return,
    };
    check_keys(value, path, allowed, out);
    if let Some(Value::Array(terms)) = child(value, "terms") {
        for (i, term) in terms.iter().enumerate() {
            let p = format!("{path}.terms[{i}]");
            check_keys(term, &p, &["amplitude", "state"], out);
            if let Some(state) = child(term, "state") {
                check_state_keys(state, &format!("{p}.state"), out);
            }
        }
    }
}

fn check_potential_keys(value: &Value, path: &str, out: &mut Vec<String>) {
    let allowed: &[&str] = match child(value, "kind").and_then(Value::as_str) {
        Some("free") => &["kind"],
        Some("harmonic") => &["kind", "omega"],
        Some("box-barrier") => &["kind", "height", "intervals"],
        Some("double-slit") => &["kind", "wall_position", "wall_thickness", "slit_centers", "slit_widths", "height"],
        Some("sampled") => &["kind", "values"],
        _ => return,
    };
    check_keys(value, path, allowed, out);
}

/// Every key in `value` that the scenario format does not define, as
/// dotted paths.
pub fn unknown_keys(value: &Value) -> Vec<String> {
    let mut out = Vec::new();
    check_keys(value, "", TOP_KEYS, &mut out);
    let sections: &[(&str, &[&str])] = &[
        ("grid", &["extent", "points"]),
        ("constants", &["hbar", "mass"]),
        ("nodes", &["epsilon", "max_fraction"]),
        ("ensemble", &["n", "seed", "bins", "binning"]),
        ("clock", &["dt_list", "total_time", "reference_refinement", "fit_max_ratio", "breakdown_ratio", "walkers"]),
        ("verify", &["dt", "max_steps", "ladder", "ladder_steps"]),
        ("tolerances", ToleranceOverrides::KEYS),
        ("screen", &["axis", "position", "min_maxima", "floor"]),
        ("inject_norm_scale", &["step", "factor"]),
    ];
    for (key, allowed) in sections {
        if let Some(v) = child(value, key) {
            check_keys(v, &format!(".{key}"), allowed, &mut out);
        }
    }
    if let Some(w) = child(value, "clock").and_then(|c| child(c, "walkers")) {
        check_keys(w, ".clock.walkers", &["n", "seed", "bins"], &mut out);
    }
    if let Some(s) = child(value, "initial_state") {
        check_state_keys(s, ".initial_state", &mut out);
    }
    if let Some(p) = child(value, "potential") {
        check_potential_keys(p, ".potential", &mut out);
    }
    out.iter_mut().for_each(|p| {
        p.remove(0);
    });
    out
}

pub fn parse_scenario(path: &Path) -> CliResult<ParsedScenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> CliResult<ParsedScenario> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Scenario(format!("malformed JSON: {e}")))?;
    parse_scenario_value(value)
}

pub fn parse_scenario_value(value: Value) -> CliResult<ParsedScenario> {
    let unknown = unknown_keys(&value);
    if !unknown.is_empty() {
        return Err(CliError::UnknownKeys(unknown));
    }
    let file: ScenarioFile = serde_json::from_value(value).map_err(|e| CliError::Scenario(e.to_string()))?;
    resolve(file)
}

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Scenario(msg.into()))
}

fn resolve(f: ScenarioFile) -> CliResult<ParsedScenario> {
    let mut defaults = Vec::new();
    let mut note = |s: String| defaults.push(s);

    if f.name.trim().is_empty() {
        return invalid("name must not be empty");
    }
    let method = f.method.unwrap_or_else(|| {
        note("method = split-step".into());
        Method::SplitStep
    });
    let constants = f.constants.unwrap_or_else(|| {
        note("constants: hbar = 1, mass = 1".into());
        PhysicalConstants::default()
    });
    constants.validate()?;
    let potential = f.potential.unwrap_or_else(|| {
        note("potential = free".into());
        PotentialSpec::Free
    });
    potential.validate(f.grid.extent.len())?;
    let grid = build_grid(&f.grid, method == Method::SplitStep)?;
    let nodes = f.nodes.unwrap_or_else(|| {
        let n = NodePolicy::default();
        note(format!("nodes: epsilon = {}, max_fraction = {}", n.epsilon, n.max_fraction));
        n
    });
    if !(nodes.epsilon > 0.0 && nodes.epsilon < 1.0) || !(nodes.max_fraction > 0.0 && nodes.max_fraction <= 1.0) {
        return invalid("nodes.epsilon must lie in (0, 1) and nodes.max_fraction in (0, 1]");
    }

    let initial = f.initial_state.build(&grid, &constants)?;
    let v = make_potential(&potential, &grid, &constants)?;
    let backend = method.backend();
    let omega = characteristic_frequency(&initial, &v, backend).ok().map(|c| c.omega);

    let dt = match f.dt {
        Some(dt) => dt,
        None => {
            let dt = default_dt(&grid, &constants, omega.unwrap_or(0.0));
            note(format!("dt = {dt:e} from min(0.1/omega_char, 0.25·m·dx²/ħ)"));
            dt
        }
    };
    if !(dt.is_finite() && dt != 0.0) {
        return invalid(format!("dt must be finite and nonzero, got {dt}"));
    }
    let n_steps = f.n_steps.unwrap_or_else(|| {
        note(format!("n_steps = {DEFAULT_STEPS}"));
        DEFAULT_STEPS
    });
    let record_stride = f.record_stride.unwrap_or_else(|| {
        note("record_stride = 1".into());
        1
    });
    if record_stride == 0 {
        return invalid("record_stride must be at least 1");
    }

    let ensemble = match f.ensemble {
        Some(e) => {
            let bins = e.bins.unwrap_or_else(|| {
                note(format!("ensemble.bins = {DEFAULT_BINS}"));
                DEFAULT_BINS
            });
            let binning = e.binning.unwrap_or_else(|| default_binning(&grid, &mut note));
            if e.n == 0 {
                return invalid("ensemble.n must be at least 1");
            }
            if bins < 16 {
                return invalid(format!("ensemble.bins must be at least 16, got {bins}"));
            }
            if let Binning::Marginal(axis) = binning {
                if axis >= grid.dims() {
                    return invalid(format!("ensemble.binning axis {axis} exceeds the grid dims"));
                }
            }
            Some(EnsembleSpec { n: e.n, seed: e.seed, bins, binning })
        }
        None => None,
    };

    let clock = resolve_clock(f.clock, omega, &mut note)?;

    let v_file = f.verify.unwrap_or_default();
    let verify = VerifySpec {
        dt: v_file.dt.unwrap_or(dt),
        max_steps: v_file.max_steps.unwrap_or_else(|| {
            note(format!("verify.max_steps = {DEFAULT_VERIFY_STEPS}"));
            DEFAULT_VERIFY_STEPS
        }),
        ladder: v_file.ladder.unwrap_or_default(),
        ladder_steps: v_file.ladder_steps.unwrap_or(DEFAULT_LADDER_STEPS),
    };
    if !(verify.dt.is_finite() && verify.dt != 0.0) {
        return invalid(format!("verify.dt must be finite and nonzero, got {}", verify.dt));
    }
    if verify.max_steps < 2 {
        return invalid("verify.max_steps must be at least 2");
    }
    if verify.ladder.iter().any(|d| !(d.is_finite() && *d > 0.0)) || verify.ladder.len() == 1 {
        return invalid("verify.ladder must be empty or hold at least two positive steps");
    }

    let screen = match f.screen {
        Some(s) => {
            let axis = s.axis.unwrap_or(0);
            if grid.dims() != 2 {
                return invalid("screen requires 2 dims");
            }
            if axis >= grid.dims() {
                return invalid(format!("screen.axis {axis} exceeds the grid dims"));
            }
            let half = 0.5 * grid.extent(axis);
            if !(-half..half).contains(&s.position) {
                return invalid(format!("screen.position {} lies outside the grid", s.position));
            }
            Some(ScreenSpec {
                axis,
                position: s.position,
                min_maxima: s.min_maxima.unwrap_or(3),
                floor: s.floor.unwrap_or(0.05),
            })
        }
        None => None,
    };

    let scenario = Scenario {
        name: f.name,
        grid: f.grid,
        constants,
        initial_state: f.initial_state,
        potential,
        dt,
        n_steps,
        record_stride,
        method,
        nodes,
        ensemble,
        clock,
        verify,
        tolerances: f.tolerances.unwrap_or_default(),
        screen,
        inject_norm_scale: f.inject_norm_scale,
        output_dir: f.output_dir,
    };
    Ok(ParsedScenario { scenario, defaults })
}

fn default_binning(grid: &Grid, note: &mut impl FnMut(String)) -> Binning {
    if grid.dims() == 1 {
        note("ensemble.binning = full".into());
        Binning::Full
    } else {
        note(format!("ensemble.binning = marginal along axis {}", grid.dims() - 1));
        Binning::Marginal(grid.dims() - 1)
    }
}

fn resolve_clock(
    file: Option<ClockFile>,
    omega: Option<f64>,
    note: &mut impl FnMut(String),
) -> CliResult<Option<ClockSpec>> {
    let Some(file) = file else {
        return Ok(None);
    };
    let dt_list = match (file.dt_list, omega) {
        (Some(list), _) => list,
        (None, Some(w)) => {
            note(format!("clock.dt_list = 2δt and δt·2^-k for k = 0..{DEFAULT_CLOCK_LEVELS}, δt = 1/omega"));
            clock_ladder(1.0 / w, DEFAULT_CLOCK_LEVELS, &[2.0])
        }
        (None, None) => return invalid("clock.dt_list is required when the mean energy is not positive"),
    };
    if dt_list.is_empty() || dt_list.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return invalid("clock.dt_list must hold positive, finite steps");
    }
    let max_dt = dt_list.iter().cloned().fold(0.0, f64::max);
    let total_time = file.total_time.unwrap_or_else(|| {
        note("clock.total_time = 2·max(dt_list)".into());
        2.0 * max_dt
    });
    Ok(Some(ClockSpec {
        dt_list,
        total_time,
        reference_refinement: file.reference_refinement.unwrap_or(16),
        fit_max_ratio: file.fit_max_ratio.unwrap_or(0.125),
        breakdown_ratio: file.breakdown_ratio.unwrap_or(2.0),
        walkers: file.walkers,
    }))
}

impl Scenario {
    /// Pretty JSON with every default written out; parses back to `self`.
    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialises");
        s.push('\n');
        s
    }

    pub fn build_grid(&self) -> CliResult<Grid> {
        Ok(build_grid(&self.grid, self.method == Method::SplitStep)?)
    }

    pub fn build(&self) -> CliResult<(Wavefunction, Potential)> {
        let grid = self.build_grid()?;
        let wf = self.initial_state.build(&grid, &self.constants)?;
        let v = make_potential(&self.potential, &grid, &self.constants)?;
        Ok((wf, v))
    }

    pub fn hydro_options(&self) -> HydroOptions {
        HydroOptions { backend: self.method.backend(), nodes: self.nodes }
    }
}
