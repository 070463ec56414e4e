//! Time-dependent Schrödinger propagation with static potentials.

mod crank_nicolson;
mod observables;
mod split_step;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::grid::Grid;
use crate::madelung::Wavefunction;
use crate::ops::Backend;
use crate::potential::Potential;
use crate::units::PhysicalConstants;

pub use observables::{observables, Observables};

use crank_nicolson::CrankNicolson;
use split_step::SplitStepper;

/// Norm drift beyond which [`evolve`] aborts.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    SplitStep,
    CrankNicolson,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SplitStep => "split-step",
            Method::CrankNicolson => "crank-nicolson",
        }
    }

    /// Derivative backend consistent with the method's own Hamiltonian.
    pub fn backend(self) -> Backend {
        match self {
            Method::SplitStep => Backend::Spectral,
            Method::CrankNicolson => Backend::CentralDifference,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split-step" => Ok(Method::SplitStep),
            "crank-nicolson" => Ok(Method::CrankNicolson),
            other => config(format!("unknown method {other:?} (expected split-step or crank-nicolson)")),
        }
    }
}

/// Test hook: multiply the state by `factor` right after step `step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormFault {
    pub step: usize,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub method: Method,
    pub record_stride: usize,
    pub fault: Option<NormFault>,
}

impl EvolveConfig {
    pub fn new(dt: f64, n_steps: usize, method: Method) -> Self {
        Self { dt, n_steps, method, record_stride: 1, fault: None }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }
}

/// `min(0.1/ω_char, 0.25·m·dx²/ħ)` with `dx` the finest spacing.
pub fn default_dt(grid: &Grid, constants: &PhysicalConstants, omega_char: f64) -> f64 {
    let dx = (0..grid.dims()).map(|a| grid.spacing(a)).fold(f64::INFINITY, f64::min);
    let dispersion = 0.25 * constants.mass * dx * dx / constants.hbar;
    if omega_char > 0.0 && omega_char.is_finite() {
        (0.1 / omega_char).min(dispersion)
    } else {
        dispersion
    }
}

enum Kind {
    Split(SplitStepper),
    CrankNicolson(CrankNicolson),
}

/// Stateful single-trajectory stepper.
pub struct Propagator {
    kind: Kind,
    method: Method,
    constants: PhysicalConstants,
    grid: Grid,
    dt: f64,
    psi: Vec<Complex64>,
    time: f64,
    steps_taken: usize,
}

impl Propagator {
    pub fn new(initial: &Wavefunction, potential: &Potential, dt: f64, method: Method) -> Result<Self> {
        let grid = *initial.grid();
        potential.values.check_same_grid(&grid)?;
        if !dt.is_finite() {
            return config(format!("time step must be finite, got {dt}"));
        }
        let constants = *initial.constants();
        let kind = match method {
            Method::SplitStep => Kind::Split(SplitStepper::new(potential, &constants, dt)?),
            Method::CrankNicolson => Kind::CrankNicolson(CrankNicolson::new(potential, &constants, dt)?),
        };
        Ok(Self {
            kind,
            method,
            constants,
            grid,
            dt,
            psi: initial.values().to_vec(),
            time: initial.time(),
            steps_taken: 0,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        match &self.kind {
            Kind::Split(s) => s.step(&mut self.psi),
            Kind::CrankNicolson(c) => c.step(&mut self.psi)?,
        }
        self.steps_taken += 1;
        self.time += self.dt;
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &[Complex64] {
        &self.psi
    }

    /// Scales the state in place (fault injection only).
    pub fn scale(&mut self, factor: f64) {
        self.psi.iter_mut().for_each(|z| *z *= factor);
    }

    pub fn norm(&self) -> f64 {
        crate::ops::integrate_with(&self.grid, |k| self.psi[k].norm_sqr())
    }

    /// Current state; the norm is not re-checked.
    pub fn wavefunction(&self) -> Wavefunction {
        let psi =
            crate::field::ComplexField::new(self.grid, self.psi.clone()).expect("propagator state matches its grid");
        Wavefunction::new_unchecked(psi, self.constants, self.time)
    }
}

/// Advances one split-step of size `dt`.
pub fn step_split_fourier(wf: &Wavefunction, potential: &Potential, dt: f64) -> Result<Wavefunction> {
    let mut p = Propagator::new(wf, potential, dt, Method::SplitStep)?;
    p.step()?;
    Ok(p.wavefunction())
}

/// Advances one Crank–Nicolson step of size `dt`.
pub fn step_crank_nicolson(wf: &Wavefunction, potential: &Potential, dt: f64) -> Result<Wavefunction> {
    let mut p = Propagator::new(wf, potential, dt, Method::CrankNicolson)?;
    p.step()?;
    Ok(p.wavefunction())
}

/// Recorded snapshots of one propagation run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Wavefunction>,
    /// Step index of each snapshot.
    pub steps: Vec<usize>,
    pub dt: f64,
    pub method: Method,
    pub record_stride: usize,
    pub potential: Potential,
}

impl Trajectory {
    /// Wraps externally produced snapshots spaced by `dt` (stride 1).
    pub fn from_snapshots(snapshots: Vec<Wavefunction>, dt: f64, method: Method, potential: Potential) -> Result<Self> {
        if snapshots.is_empty() {
            return config("a trajectory needs at least one snapshot");
        }
        for s in &snapshots {
            s.psi().check_same_grid(potential.grid())?;
        }
        let steps = (0..snapshots.len()).collect();
        Ok(Self { snapshots, steps, dt, method, record_stride: 1, potential })
    }

    pub fn grid(&self) -> &Grid {
        self.snapshots[0].grid()
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time()).collect()
    }

    /// Spacing between stored snapshots.
    pub fn snapshot_dt(&self) -> f64 {
        self.dt * self.record_stride as f64
    }

    pub fn last(&self) -> &Wavefunction {
        self.snapshots.last().expect("trajectory is never empty")
    }

    pub fn backend(&self) -> Backend {
        self.method.backend()
    }
}

/// Propagates `initial` for `config.n_steps` steps, keeping every
/// `record_stride`-th state (including the initial one).
///
/// Aborts with a numerical error once the norm drifts by more than
/// [`NORM_DRIFT_LIMIT`] from its initial value.
pub fn evolve(initial: &Wavefunction, potential: &Potential, config: &EvolveConfig) -> Result<Trajectory> {
    if config.record_stride == 0 {
        return crate::error::config("record_stride must be at least 1");
    }
    let mut prop = Propagator::new(initial, potential, config.dt, config.method)?;
    let norm0 = initial.norm();
    let mut snapshots = vec![initial.clone()];
    let mut steps = vec![0];
    for n in 1..=config.n_steps {
        prop.step()?;
        if let Some(f) = config.fault {
            if f.step == n {
                prop.scale(f.factor);
            }
        }
        let drift = (prop.norm() - norm0).abs();
        if !(drift <= NORM_DRIFT_LIMIT) {
            return Err(Error::NormDrift { drift, limit: NORM_DRIFT_LIMIT, step: n });
        }
        if n % config.record_stride == 0 {
            snapshots.push(prop.wavefunction());
            steps.push(n);
        }
    }
    Ok(Trajectory {
        snapshots,
        steps,
        dt: config.dt,
        method: config.method,
        record_stride: config.record_stride,
        potential: potential.clone(),
    })
}
