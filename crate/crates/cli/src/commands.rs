//! Command dispatch: each command runs one scenario, writes its CSV files
//! and records checks into the run summary.

use std::path::PathBuf;

use fluidclock_core::madelung::{cross_term_relation, decompose, momentum_fields, momentum_identity_residual};
use fluidclock_core::ops::integrate_values;
use fluidclock_core::propagator::{observables, Propagator, NORM_DRIFT_LIMIT};
use fluidclock_core::subquantum::{
    coarse_time_study, compare_histogram, drift_field, init_ensemble, step_ensemble, Binning, CoarseTimeConfig,
    Ensemble, HistogramReport,
};
use fluidclock_core::variational::{
    action_integral, continuity_residual, fluctuation_balance, ladder_order, schroedinger_residual,
};
use fluidclock_core::{
    evolve, Error, EvolveConfig, Grid, Method, Observables, PhysicalConstants, Potential, RealField, Trajectory,
    VectorField, Wavefunction,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::output::{emit_complex_field, emit_csv, emit_fields, emit_real_field, emit_summary, OutputDir};
use crate::scenario::{parse_scenario_value, ParsedScenario, Scenario};
use crate::summary::{Check, RunSummary};
use crate::tolerances::{Profile, Tolerances};

/// Environment variable that overrides a scenario's `output_dir`.
pub const OUT_ENV: &str = "FLUIDCLOCK_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Decompose,
    Verify,
    Walkers,
    Clock,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Decompose => "decompose",
            Command::Verify => "verify",
            Command::Walkers => "walkers",
            Command::Clock => "clock",
            Command::All => "all",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    pub scenario: PathBuf,
    /// Takes precedence over the scenario's `output_dir`.
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub method: Option<Method>,
    pub dt: Option<f64>,
    pub profile: Profile,
    /// Write `ψ` every this many steps in `evolve`; by default only the
    /// first and last states are written.
    pub snapshot_stride: Option<usize>,
}

impl RunOptions {
    pub fn new(command: Command, scenario: impl Into<PathBuf>) -> Self {
        Self {
            command,
            scenario: scenario.into(),
            out: None,
            seed: None,
            method: None,
            dt: None,
            profile: Profile::Default,
            snapshot_stride: None,
        }
    }
}

/// Reads the scenario and applies command-line overrides before defaults
/// are resolved.
pub fn load_scenario(opts: &RunOptions) -> CliResult<ParsedScenario> {
    let path = &opts.scenario;
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Scenario(format!("malformed JSON: {e}")))?;
    let mut notes = Vec::new();
    if let Value::Object(map) = &mut value {
        if let Some(m) = opts.method {
            map.insert("method".into(), json!(m.name()));
            notes.push(format!("method = {} from the command line", m.name()));
        }
        if let Some(dt) = opts.dt {
            map.insert("dt".into(), json!(dt));
            notes.push(format!("dt = {dt:e} from the command line"));
        }
        if let Some(seed) = opts.seed {
            if let Some(Value::Object(e)) = map.get_mut("ensemble") {
                e.insert("seed".into(), json!(seed));
                notes.push(format!("ensemble.seed = {seed} from the command line"));
            }
            if let Some(Value::Object(w)) = map.get_mut("clock").and_then(|c| c.get_mut("walkers")) {
                w.insert("seed".into(), json!(seed));
                notes.push(format!("clock.walkers.seed = {seed} from the command line"));
            }
        }
    }
    let mut parsed = parse_scenario_value(value)?;
    notes.append(&mut parsed.defaults);
    parsed.defaults = notes;
    Ok(parsed)
}

/// Runs one command and writes `summary.json`. The summary is returned even
/// when the command failed; `Err` means the summary itself could not be
/// written.
pub fn run(opts: &RunOptions) -> CliResult<RunSummary> {
    let parsed = load_scenario(opts);
    let root = opts
        .out
        .clone()
        .or_else(|| parsed.as_ref().ok().and_then(|p| p.scenario.output_dir.clone()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let overrides = parsed.as_ref().map(|p| p.scenario.tolerances).unwrap_or_default();
    let tol = Tolerances::resolve(opts.profile, &overrides);
    let mut summary = RunSummary::new(opts.command.name(), opts.profile.name(), tol);
    let mut out = OutputDir::create(root)?;

    match parsed {
        Ok(p) => {
            summary.scenario_name = Some(p.scenario.name.clone());
            summary.resolved_defaults = p.defaults;
            if let Some(e) = &p.scenario.ensemble {
                summary.seeds.insert("ensemble".into(), e.seed);
            }
            if let Some(w) = p.scenario.clock.as_ref().and_then(|c| c.walkers.as_ref()) {
                summary.seeds.insert("clock.walkers".into(), w.seed);
            }
            let path = out.file("scenario.json");
            std::fs::write(&path, p.scenario.canonical_json()).map_err(|source| CliError::Write { path, source })?;
            let mut r = Runner {
                sc: &p.scenario,
                tol,
                out: &mut out,
                summary: &mut summary,
                snapshot_stride: opts.snapshot_stride,
            };
            r.dispatch(opts.command);
            summary.scenario = Some(p.scenario);
        }
        Err(e) => summary.error = Some(e.record()),
    }

    let path = out.file("summary.json");
    summary.outputs = out.written().to_vec();
    summary.finish();
    emit_summary(&summary, &path)?;
    Ok(summary)
}

struct Runner<'a> {
    sc: &'a Scenario,
    tol: Tolerances,
    out: &'a mut OutputDir,
    summary: &'a mut RunSummary,
    snapshot_stride: Option<usize>,
}

fn obs_row(o: &Observables) -> Vec<f64> {
    let mut row = vec![o.time, o.norm, o.energy];
    for a in 0..o.mean_x.len() {
        row.extend([o.mean_x[a], o.mean_p[a], o.sigma_x[a]]);
    }
    row
}

fn obs_header(dims: usize) -> Vec<&'static str> {
    let mut h = vec!["t", "norm", "E", "x_mean", "p_mean", "sigma_x"];
    if dims == 2 {
        h.extend(["y_mean", "p_y_mean", "sigma_y"]);
    }
    h
}

/// Local maxima of `p` (ends excluded) at or above `floor·max p`.
fn count_maxima(p: &[f64], floor: f64) -> usize {
    let top = p.iter().cloned().fold(0.0, f64::max);
    p.windows(3).filter(|w| w[1] > w[0] && w[1] >= w[2] && w[1] >= floor * top).count()
}

fn nearest_index(grid: &Grid, axis: usize, x: f64) -> usize {
    let j = ((x + 0.5 * grid.extent(axis)) / grid.spacing(axis)).round() as usize;
    j.min(grid.points(axis) - 1)
}

fn variance(values: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (x, p) in values {
        w += p;
        m1 += p * x;
        m2 += p * x * x;
    }
    m2 / w - (m1 / w).powi(2)
}

#[derive(Serialize)]
struct EnergySplit {
    convective: f64,
    osmotic: f64,
    potential: f64,
    total: f64,
}

#[derive(Serialize)]
struct LadderRow {
    dt: f64,
    steps: usize,
    continuity_l2: f64,
    schroedinger_l2: f64,
}

impl Runner<'_> {
    fn dispatch(&mut self, command: Command) {
        let result = match command {
            Command::Evolve => self.evolve(),
            Command::Decompose => self.decompose(),
            Command::Verify => self.verify(),
            Command::Walkers => self.walkers(),
            Command::Clock => self.clock(),
            Command::All => {
                let mut skipped = Vec::new();
                let mut first_err = None;
                for (name, step) in [
                    ("evolve", Runner::evolve as fn(&mut Self) -> CliResult<()>),
                    ("decompose", Runner::decompose),
                    ("verify", Runner::verify),
                    ("walkers", Runner::walkers),
                    ("clock", Runner::clock),
                ] {
                    let configured = match name {
                        "walkers" => self.sc.ensemble.is_some(),
                        "clock" => self.sc.clock.is_some(),
                        _ => true,
                    };
                    if !configured {
                        skipped.push(name);
                        continue;
                    }
                    if let Err(e) = step(self) {
                        first_err.get_or_insert(e);
                    }
                }
                self.summary.section("skipped", &skipped);
                first_err.map_or(Ok(()), Err)
            }
        };
        if let Err(e) = result {
            self.summary.error = Some(e.record());
        }
    }

    fn write_csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> CliResult<()> {
        let path = self.out.file(name);
        emit_csv(&path, header, rows)
    }

    fn evolve(&mut self) -> CliResult<()> {
        let sc = self.sc;
        let (wf, v) = sc.build()?;
        let backend = sc.method.backend();
        let dims = wf.grid().dims();
        let mut prop = Propagator::new(&wf, &v, sc.dt, sc.method)?;
        let norm0 = wf.norm();
        let first = observables(&wf, &v, backend)?;
        let e0 = first.energy;
        let energy_scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
        let mut rows = vec![obs_row(&first)];
        let (mut norm_drift, mut energy_drift) = (0.0f64, 0.0f64);
        let mut last = first.clone();
        emit_complex_field(&self.out.file("psi_000000.csv"), wf.psi())?;

        for n in 1..=sc.n_steps {
            prop.step()?;
            if let Some(f) = sc.inject_norm_scale {
                if f.step == n {
                    prop.scale(f.factor);
                }
            }
            let drift = (prop.norm() - norm0).abs();
            norm_drift = norm_drift.max(drift);
            if drift.is_nan() || drift > NORM_DRIFT_LIMIT {
                self.write_csv("observables.csv", &obs_header(dims), rows)?;
                self.summary.check(Check::at_most("evolve.norm_drift", drift, self.tol.norm_drift));
                return Err(Error::NormDrift { drift, limit: NORM_DRIFT_LIMIT, step: n }.into());
            }
            if n % sc.record_stride == 0 || n == sc.n_steps {
                last = observables(&prop.wavefunction(), &v, backend)?;
                energy_drift = energy_drift.max((last.energy - e0).abs() / energy_scale);
                rows.push(obs_row(&last));
            }
            if self.snapshot_stride.is_some_and(|s| s > 0 && n % s == 0) || n == sc.n_steps {
                emit_complex_field(&self.out.file(&format!("psi_{n:06}.csv")), prop.wavefunction().psi())?;
            }
        }
        self.write_csv("observables.csv", &obs_header(dims), rows)?;
        self.summary.check(Check::at_most("evolve.norm_drift", norm_drift, self.tol.norm_drift));
        self.summary.check(Check::at_most("evolve.energy_drift", energy_drift, self.tol.energy_drift));

        if let Some(screen) = &sc.screen {
            let fin = prop.wavefunction();
            let grid = *fin.grid();
            let j = nearest_index(&grid, screen.axis, screen.position);
            let other = 1 - screen.axis;
            let p = fin.density();
            let profile: Vec<f64> = (0..grid.points(other))
                .map(|i| {
                    let k = if screen.axis == 0 { grid.index(j, i) } else { grid.index(i, j) };
                    p.values()[k]
                })
                .collect();
            let maxima = count_maxima(&profile, screen.floor);
            let coords = grid.coordinates(other);
            let header = if other == 1 { ["y", "P"] } else { ["x", "P"] };
            let rows = coords.iter().zip(&profile).map(|(x, p)| vec![*x, *p]).collect();
            self.write_csv("screen.csv", &header, rows)?;
            self.summary.check(Check::at_least("evolve.screen_maxima", maxima as f64, screen.min_maxima as f64));
            self.summary.section(
                "screen",
                &json!({"axis": screen.axis, "position": grid.coordinate(screen.axis, j), "maxima": maxima}),
            );
        }
        self.summary.section(
            "evolve",
            &json!({
                "steps": sc.n_steps,
                "final_time": prop.time(),
                "initial": first,
                "final": last,
                "max_norm_drift": norm_drift,
                "max_energy_drift": energy_drift,
            }),
        );
        Ok(())
    }

    fn decompose(&mut self) -> CliResult<()> {
        let sc = self.sc;
        let (wf, v) = sc.build()?;
        let opts = sc.hydro_options();
        let grid = *wf.grid();
        let polar = decompose(&wf, sc.nodes.epsilon)?;
        let mom = momentum_fields(&wf, &opts)?;
        let ident = momentum_identity_residual(&wf, &opts)?;
        let cross = cross_term_relation(&wf, &opts)?;
        let obs = observables(&wf, &v, opts.backend)?;

        let mass = sc.constants.mass;
        let p = polar.density.values();
        let kinetic = |field: &VectorField<f64>| {
            let e: Vec<f64> = (0..grid.len())
                .map(|k| {
                    let sq: f64 = field.components().iter().map(|c| c[k] * c[k]).sum();
                    if sq.is_nan() {
                        0.0
                    } else {
                        p[k] * sq / (2.0 * mass)
                    }
                })
                .collect();
            integrate_values(&grid, &e)
        };
        let convective = kinetic(&mom.convective);
        let osmotic = kinetic(&mom.osmotic);
        let pv: Vec<f64> = p.iter().zip(v.values.values()).map(|(a, b)| a * b).collect();
        let potential = integrate_values(&grid, &pv);
        let split = EnergySplit { convective, osmotic, potential, total: convective + osmotic + potential };

        let mut names = vec!["R", "S", "P"];
        let mut cols: Vec<&[f64]> = vec![polar.amplitude.values(), polar.phase.values(), p];
        let axis_names: [[&str; 2]; 2] = [["p_conv_x", "p_osm_x"], ["p_conv_y", "p_osm_y"]];
        for (a, pair) in axis_names.iter().enumerate().take(grid.dims()) {
            names.push(pair[0]);
            cols.push(mom.convective.component(a));
        }
        for (a, pair) in axis_names.iter().enumerate().take(grid.dims()) {
            names.push(pair[1]);
            cols.push(mom.osmotic.component(a));
        }
        names.extend(["dE", "identity_residual"]);
        cols.push(mom.energy_fluctuation.values());
        cols.push(ident.field.values());
        emit_fields(&self.out.file("fields.csv"), &grid, &names, &cols)?;
        emit_complex_field(&self.out.file("psi.csv"), wf.psi())?;

        self.summary.check(Check::at_most(
            "decompose.identity_residual",
            ident.max_residual,
            self.tol.identity_residual,
        ));
        self.summary.check(Check::at_most("decompose.cross_term", cross.relation_residual, self.tol.cross_term));
        self.summary.section(
            "decompose",
            &json!({
                "observables": obs,
                "energy": split,
                "cross_term": cross,
                "identity_residual": ident.max_residual,
                "masked_fraction": mom.masked_fraction(),
            }),
        );
        Ok(())
    }

    fn trajectory(&self, wf: &Wavefunction, v: &Potential, dt: f64, steps: usize) -> CliResult<Trajectory> {
        Ok(evolve(wf, v, &EvolveConfig::new(dt, steps, self.sc.method))?)
    }

    fn verify(&mut self) -> CliResult<()> {
        let sc = self.sc;
        let (wf, v) = sc.build()?;
        let opts = sc.hydro_options();
        let steps = sc.verify.max_steps.min(sc.n_steps);
        let traj = self.trajectory(&wf, &v, sc.verify.dt, steps)?;
        let cont = continuity_residual(&traj, &opts)?;
        let fluct = fluctuation_balance(&traj, &opts)?;
        let action = action_integral(&traj, &opts)?;
        let schr = schroedinger_residual(&traj, opts.backend)?;
        let ident = momentum_identity_residual(&wf, &opts)?;
        let cross = cross_term_relation(&wf, &opts)?;

        let rows = (0..cont.times.len())
            .map(|i| {
                vec![
                    cont.times[i],
                    cont.snapshot_l2[i],
                    cont.snapshot_linf[i],
                    fluct.balance.snapshot_linf[i],
                    schr.snapshot_l2[i],
                ]
            })
            .collect();
        self.write_csv(
            "balance.csv",
            &["t", "continuity_l2", "continuity_linf", "fluctuation_linf", "schroedinger_l2"],
            rows,
        )?;
        let rows = (0..action.times.len())
            .map(|i| vec![action.times[i], action.classical_integrand[i], action.psi_integrand[i]])
            .collect();
        self.write_csv("action.csv", &["t", "classical", "lagrangian"], rows)?;
        emit_real_field(&self.out.file("continuity_residual.csv"), &cont.residual_field)?;
        emit_real_field(&self.out.file("fluctuation_residual.csv"), &fluct.balance.residual_field)?;
        emit_real_field(&self.out.file("lagrangian_density.csv"), &action.lagrangian_sample)?;

        let t = self.tol;
        let s = &mut *self.summary;
        s.check(Check::at_most("verify.continuity", cont.linf_residual, t.continuity));
        s.check(Check::at_most("verify.fluctuation", fluct.balance.linf_residual, t.fluctuation));
        s.check(Check::at_most("verify.fluctuation_agreement", fluct.agreement, t.fluctuation_agreement));
        s.check(Check::at_most("verify.action", action.rel_difference, t.action));
        s.check(Check::at_most("verify.schroedinger", schr.l2_residual, t.schroedinger));
        s.check(Check::at_most("verify.identity_residual", ident.max_residual, t.identity_residual));
        s.check(Check::at_most("verify.cross_term", cross.relation_residual, t.cross_term));
        s.section(
            "verify",
            &json!({
                "steps": steps,
                "dt": sc.verify.dt,
                "continuity": cont,
                "fluctuation": fluct,
                "action": action,
                "schroedinger": schr,
                "identity_residual": ident.max_residual,
                "cross_term": cross,
            }),
        );

        if !sc.verify.ladder.is_empty() {
            self.ladder(&wf, &v)?;
        }
        Ok(())
    }

    fn ladder(&mut self, wf: &Wavefunction, v: &Potential) -> CliResult<()> {
        let sc = self.sc;
        let opts = sc.hydro_options();
        let max_dt = sc.verify.ladder.iter().cloned().fold(0.0, f64::max);
        let horizon = sc.verify.ladder_steps as f64 * max_dt;
        let mut reports = Vec::new();
        let mut rows = Vec::new();
        for &dt in &sc.verify.ladder {
            let steps = (horizon / dt).round() as usize;
            let traj = self.trajectory(wf, v, dt, steps)?;
            let cont = continuity_residual(&traj, &opts)?;
            let schr = schroedinger_residual(&traj, opts.backend)?;
            rows.push(LadderRow { dt, steps, continuity_l2: cont.l2_residual, schroedinger_l2: schr.l2_residual });
            reports.push((dt, cont, schr));
        }
        let cont: Vec<_> = reports.iter().map(|(dt, c, _)| (*dt, c)).collect();
        let schr: Vec<_> = reports.iter().map(|(dt, _, s)| (*dt, s)).collect();
        let cont_fit = ladder_order(&cont)?;
        let schr_fit = ladder_order(&schr)?;
        self.write_csv(
            "ladder.csv",
            &["dt", "continuity_l2", "schroedinger_l2"],
            rows.iter().map(|r| vec![r.dt, r.continuity_l2, r.schroedinger_l2]).collect(),
        )?;
        let t = self.tol;
        self.summary.check(Check::within("verify.continuity_order", cont_fit.order, t.order_min, t.order_max));
        self.summary.check(Check::within("verify.schroedinger_order", schr_fit.order, t.order_min, t.order_max));
        self.summary.section(
            "ladder",
            &json!({"horizon": horizon, "rows": rows, "continuity_fit": cont_fit, "schroedinger_fit": schr_fit}),
        );
        Ok(())
    }

    fn walkers(&mut self) -> CliResult<()> {
        let sc = self.sc;
        let spec =
            sc.ensemble.as_ref().ok_or_else(|| CliError::Scenario("walkers needs an ensemble section".into()))?;
        let (wf, v) = sc.build()?;
        let opts = sc.hydro_options();
        let grid = *wf.grid();
        let PhysicalConstants { hbar, mass } = *wf.constants();
        let mut prop = Propagator::new(&wf, &v, sc.dt, sc.method)?;
        let mut ens = init_ensemble(&wf.density(), spec.n, spec.seed, wf.time())?;

        let mut series = Vec::new();
        let mut worst_tv = 0.0f64;
        let mut record = |ens: &Ensemble, density: &RealField, t: f64| -> CliResult<HistogramReport> {
            let h = compare_histogram(ens, density, spec.bins, spec.binning)?;
            worst_tv = worst_tv.max(h.total_variation);
            series.push(vec![t, h.total_variation, h.chi_squared, ens.node_fallbacks as f64]);
            Ok(h)
        };
        let mut hist = record(&ens, &wf.density(), wf.time())?;
        for n in 1..=sc.n_steps {
            let drift = drift_field(&prop.wavefunction(), &opts)?;
            step_ensemble(&mut ens, &drift, sc.dt, hbar, mass)?;
            prop.step()?;
            if n % sc.record_stride == 0 || n == sc.n_steps {
                hist = record(&ens, &prop.wavefunction().density(), prop.time())?;
            }
        }
        self.write_csv("walkers_tv.csv", &["t", "tv", "chi_squared", "node_fallbacks"], series)?;

        let fin = prop.wavefunction();
        let density = fin.density();
        let axes: Vec<usize> = match spec.binning {
            Binning::Full => (0..grid.dims()).collect(),
            Binning::Marginal(a) => vec![a],
        };
        let n = ens.n_walkers() as f64;
        let centre = |a: usize, b: usize| -0.5 * grid.extent(a) + (b as f64 + 0.5) * grid.extent(a) / spec.bins as f64;
        let rows: Vec<Vec<f64>> = (0..hist.counts.len())
            .map(|flat| {
                let mut row = if axes.len() == 2 {
                    vec![centre(axes[0], flat / spec.bins), centre(axes[1], flat % spec.bins)]
                } else {
                    vec![centre(axes[0], flat)]
                };
                row.extend([hist.counts[flat] as f64 / n, hist.expected[flat]]);
                row
            })
            .collect();
        let coord_names = ["x", "y"];
        let mut header: Vec<&str> = axes.iter().map(|&a| coord_names[a]).collect();
        header.extend(["observed", "expected"]);
        self.write_csv("histogram.csv", &header, rows)?;
        let positions = ens.positions.iter().map(|p| p[..grid.dims()].to_vec()).collect();
        self.write_csv("positions.csv", &coord_names[..grid.dims()], positions)?;

        self.summary.check(Check::at_most("walkers.tv", worst_tv, self.tol.walker_tv));
        let mut variances = Vec::new();
        for &a in &axes {
            let sample = variance(ens.positions.iter().map(|p| (p[a], 1.0)));
            let exact = variance((0..grid.len()).map(|k| (grid.position(k)[a], density.values()[k])));
            let rel = (sample - exact).abs() / exact;
            self.summary.check(Check::at_most(
                format!("walkers.variance_{}", coord_names[a]),
                rel,
                self.tol.walker_variance,
            ));
            variances.push(json!({"axis": a, "walkers": sample, "density": exact, "relative_difference": rel}));
        }
        self.summary.section(
            "walkers",
            &json!({
                "n": spec.n,
                "bins": spec.bins,
                "binning": spec.binning,
                "steps": sc.n_steps,
                "final_time": prop.time(),
                "max_tv": worst_tv,
                "final_tv": hist.total_variation,
                "final_chi_squared": hist.chi_squared,
                "degrees_of_freedom": hist.degrees_of_freedom,
                "node_fallbacks": ens.node_fallbacks,
                "variances": variances,
            }),
        );
        Ok(())
    }

    fn clock(&mut self) -> CliResult<()> {
        let sc = self.sc;
        let spec = sc.clock.as_ref().ok_or_else(|| CliError::Scenario("clock needs a clock section".into()))?;
        let (wf, v) = sc.build()?;
        let cfg = CoarseTimeConfig {
            dt_list: spec.dt_list.clone(),
            total_time: Some(spec.total_time),
            reference_refinement: spec.reference_refinement,
            fit_max_ratio: spec.fit_max_ratio,
            breakdown_ratio: spec.breakdown_ratio,
            breakdown_threshold: self.tol.breakdown_error,
            method: sc.method,
            walkers: spec.walkers.clone(),
        };
        let report = coarse_time_study(&wf, &v, &cfg, &sc.hydro_options())?;
        let rows = report.rows.iter().map(|r| vec![r.dt, r.dt_omega, r.terminal_error, r.residual]).collect();
        self.write_csv("clock.csv", &["dt", "dt_omega", "terminal_error", "residual"], rows)?;
        if spec.walkers.is_some() {
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.dt,
                        r.dt_omega,
                        r.walker_tv.unwrap_or(f64::NAN),
                        r.walker_fallbacks.map_or(f64::NAN, |f| f as f64),
                    ]
                })
                .collect();
            self.write_csv("clock_walkers.csv", &["dt", "dt_omega", "tv", "node_fallbacks"], rows)?;
        }
        let t = self.tol;
        let order = report.fitted_order.unwrap_or(f64::NAN);
        self.summary.check(Check::within("clock.order", order, t.order_min, t.order_max));
        let coarse = report
            .rows
            .iter()
            .filter(|r| r.dt_omega >= report.breakdown_ratio * (1.0 - 1e-12))
            .map(|r| r.terminal_error)
            .fold(f64::NAN, f64::min);
        self.summary.check(Check::at_least("clock.breakdown_error", coarse, t.breakdown_error));
        self.summary.section("clock", &report);
        Ok(())
    }
}
