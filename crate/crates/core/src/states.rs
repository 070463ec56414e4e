//! Benchmark initial states.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::field::ComplexField;
use crate::grid::Grid;
use crate::madelung::Wavefunction;
use crate::units::PhysicalConstants;

/// Declarative initial state, as written in scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    PlaneWave {
        k: Vec<f64>,
    },
    Gaussian {
        center: Vec<f64>,
        sigma: f64,
        #[serde(default)]
        k0: Vec<f64>,
    },
    HoGround {
        omega: f64,
    },
    HoCoherent {
        omega: f64,
        displacement: Vec<f64>,
    },
    Superposition {
        terms: Vec<SuperpositionTerm>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperpositionTerm {
    /// Complex weight as `[re, im]`.
    pub amplitude: [f64; 2],
    pub state: InitialState,
}

impl InitialState {
    pub fn build(&self, grid: &Grid, constants: &PhysicalConstants) -> Result<Wavefunction> {
        match self {
            InitialState::PlaneWave { k } => plane_wave(grid, constants, k),
            InitialState::Gaussian { center, sigma, k0 } => gaussian(grid, constants, center, *sigma, k0),
            InitialState::HoGround { omega } => ho_ground(grid, constants, *omega),
            InitialState::HoCoherent { omega, displacement } => ho_coherent(grid, constants, *omega, displacement),
            InitialState::Superposition { terms } => {
                let parts = terms
                    .iter()
                    .map(|t| Ok((Complex64::new(t.amplitude[0], t.amplitude[1]), t.state.build(grid, constants)?)))
                    .collect::<Result<Vec<_>>>()?;
                superposition(&parts)
            }
        }
    }

    /// Oscillator frequency for states tied to a harmonic trap.
    pub fn trap_frequency(&self) -> Option<f64> {
        match self {
            InitialState::HoGround { omega } | InitialState::HoCoherent { omega, .. } => Some(*omega),
            _ => None,
        }
    }
}

fn axis_vector(grid: &Grid, v: &[f64], what: &str) -> Result<[f64; 2]> {
    if v.is_empty() {
        return Ok([0.0; 2]);
    }
    if v.len() != grid.dims() {
        return config(format!("{what} has {} components on a {}D grid", v.len(), grid.dims()));
    }
    let mut out = [0.0; 2];
    out[..v.len()].copy_from_slice(v);
    Ok(out)
}

/// `exp(ik·x)/√V`. Each `k` component must fit the periodic box.
pub fn plane_wave(grid: &Grid, constants: &PhysicalConstants, k: &[f64]) -> Result<Wavefunction> {
    let k = axis_vector(grid, k, "wave vector")?;
    for axis in 0..grid.dims() {
        let cycles = k[axis] * grid.extent(axis) / (2.0 * PI);
        if (cycles - cycles.round()).abs() > 1e-9 {
            return config(format!("plane wave k = {} is not periodic on axis {axis} (k·L/2π = {cycles})", k[axis]));
        }
    }
    let psi = ComplexField::from_fn(*grid, |x, y| Complex64::from_polar(1.0, k[0] * x + k[1] * y));
    Wavefunction::normalized(psi, *constants, 0.0)
}

/// Gaussian packet with position spread `sigma` (of `|ψ|²`) and mean
/// wave vector `k0`: `ψ ∝ exp(−|x−c|²/4σ² + ik0·x)`.
pub fn gaussian(
    grid: &Grid,
    constants: &PhysicalConstants,
    center: &[f64],
    sigma: f64,
    k0: &[f64],
) -> Result<Wavefunction> {
    if !(sigma > 0.0) {
        return config(format!("gaussian sigma must be positive, got {sigma}"));
    }
    let c = axis_vector(grid, center, "center")?;
    let k = axis_vector(grid, k0, "k0")?;
    let psi = ComplexField::from_fn(*grid, |x, y| {
        let r2 = (x - c[0]).powi(2) + (y - c[1]).powi(2);
        Complex64::from_polar((-r2 / (4.0 * sigma * sigma)).exp(), k[0] * x + k[1] * y)
    });
    Wavefunction::normalized(psi, *constants, 0.0)
}

fn oscillator_gaussian(
    grid: &Grid,
    constants: &PhysicalConstants,
    omega: f64,
    center: [f64; 2],
) -> Result<Wavefunction> {
    if !(omega > 0.0) {
        return config(format!("oscillator frequency must be positive, got {omega}"));
    }
    let a = constants.mass * omega / (2.0 * constants.hbar);
    let psi = ComplexField::from_fn(*grid, |x, y| {
        Complex64::new((-a * ((x - center[0]).powi(2) + (y - center[1]).powi(2))).exp(), 0.0)
    });
    Wavefunction::normalized(psi, *constants, 0.0)
}

/// Ground state of `V = mω²|x|²/2`.
pub fn ho_ground(grid: &Grid, constants: &PhysicalConstants, omega: f64) -> Result<Wavefunction> {
    oscillator_gaussian(grid, constants, omega, [0.0; 2])
}

/// Ground state displaced by `displacement`, released at rest.
pub fn ho_coherent(
    grid: &Grid,
    constants: &PhysicalConstants,
    omega: f64,
    displacement: &[f64],
) -> Result<Wavefunction> {
    let a = axis_vector(grid, displacement, "displacement")?;
    oscillator_gaussian(grid, constants, omega, a)
}

/// Stationary state of the Strang split-step map for the oscillator.
///
/// The split map `e^{−iVdt/2ħ} e^{−iTdt/ħ} e^{−iVdt/2ħ}` is the exact
/// propagator of an oscillator with frequency `ω·√(1 − ω²dt²/4)`, so its
/// invariant Gaussian is slightly wider than the continuum ground state.
pub fn ho_ground_split_step(grid: &Grid, constants: &PhysicalConstants, omega: f64, dt: f64) -> Result<Wavefunction> {
    let s = 1.0 - 0.25 * (omega * dt).powi(2);
    if !(s > 0.0) {
        return config(format!("split-step oscillator is unstable for ω·dt = {}", omega * dt));
    }
    oscillator_gaussian(grid, constants, omega * s.sqrt(), [0.0; 2])
}

/// Normalised `Σ c_i ψ_i`.
pub fn superposition(terms: &[(Complex64, Wavefunction)]) -> Result<Wavefunction> {
    let Some((_, first)) = terms.first() else {
        return config("superposition needs at least one term");
    };
    let grid = *first.grid();
    let mut acc = ComplexField::zeros(grid);
    for (c, wf) in terms {
        wf.psi().check_same_grid(&grid)?;
        for (a, b) in acc.values_mut().iter_mut().zip(wf.values()) {
            *a += c * b;
        }
    }
    Wavefunction::normalized(acc, *first.constants(), 0.0)
}
