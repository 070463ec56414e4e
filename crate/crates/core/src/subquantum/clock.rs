//! Clock frequencies: the state's own `ω = ⟨E⟩/ħ` and the light clock.

use serde::Serialize;

use crate::error::{config, Result};
use crate::madelung::Wavefunction;
use crate::ops::Backend;
use crate::potential::Potential;
use crate::propagator::observables;

/// A state viewed as a clock ticking at `ω = ⟨E⟩/ħ`, with resolution
/// `δt = 1/ω` and zero-point energy `ħω/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluidClock {
    pub omega: f64,
    pub delta_t: f64,
    pub zero_point: f64,
}

impl FluidClock {
    pub fn from_energy(energy: f64, hbar: f64) -> Result<Self> {
        if !(energy > 0.0) {
            return config(format!("mean energy {energy} is not positive; shift the potential by a constant"));
        }
        let omega = energy / hbar;
        Ok(Self { omega, delta_t: 1.0 / omega, zero_point: 0.5 * hbar * omega })
    }
}

pub fn characteristic_frequency(wf: &Wavefunction, potential: &Potential, backend: Backend) -> Result<FluidClock> {
    let obs = observables(wf, potential, backend)?;
    FluidClock::from_energy(obs.energy, wf.constants().hbar)
}

/// A light clock of radius `r`: `Ω = c/r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LightClock {
    pub c: f64,
    pub r: f64,
    pub omega: f64,
}

pub fn light_clock_frequency(c: f64, r: f64) -> Result<LightClock> {
    if !(c > 0.0 && r > 0.0 && c.is_finite() && r.is_finite()) {
        return config(format!("light clock needs positive c and r, got c = {c}, r = {r}"));
    }
    Ok(LightClock { c, r, omega: c / r })
}
