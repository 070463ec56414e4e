use serde::Serialize;

use crate::error::Result;
use crate::madelung::Wavefunction;
use crate::ops::{self, Backend};
use crate::potential::Potential;

/// Expectation values of a single state. Vector quantities have one entry
/// per axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    pub time: f64,
    pub norm: f64,
    /// `Re ∫ψ̄Hψ`.
    pub energy: f64,
    /// `Im ∫ψ̄Hψ`, a discretisation diagnostic.
    pub energy_imag: f64,
    pub mean_x: Vec<f64>,
    /// `∫P·∇S = ħ∫Im(ψ̄∇ψ)`.
    pub mean_p: Vec<f64>,
    pub sigma_x: Vec<f64>,
}

pub fn observables(wf: &Wavefunction, potential: &Potential, backend: Backend) -> Result<Observables> {
    let grid = *wf.grid();
    potential.values.check_same_grid(&grid)?;
    let hbar = wf.constants().hbar;
    let mass = wf.constants().mass;
    let psi = wf.values();
    let v = potential.values.values();
    let lap = ops::laplacian(wf.psi(), backend)?;
    let lap = lap.values();
    let h_re =
        ops::integrate_with(&grid, |k| (psi[k].conj() * (lap[k] * (-hbar * hbar / (2.0 * mass)) + psi[k] * v[k])).re);
    let h_im = ops::integrate_with(&grid, |k| (psi[k].conj() * (lap[k] * (-hbar * hbar / (2.0 * mass)))).im);
    let norm = wf.norm();
    let grad = ops::gradient(wf.psi(), backend)?;
    let mut mean_x = Vec::new();
    let mut mean_p = Vec::new();
    let mut sigma_x = Vec::new();
    for axis in 0..grid.dims() {
        let m1 = ops::integrate_with(&grid, |k| grid.position(k)[axis] * psi[k].norm_sqr()) / norm;
        let m2 = ops::integrate_with(&grid, |k| grid.position(k)[axis].powi(2) * psi[k].norm_sqr()) / norm;
        let c = grad.component(axis);
        let p = hbar * ops::integrate_with(&grid, |k| (psi[k].conj() * c[k]).im);
        mean_x.push(m1);
        mean_p.push(p);
        sigma_x.push((m2 - m1 * m1).max(0.0).sqrt());
    }
    Ok(Observables { time: wf.time(), norm, energy: h_re, energy_imag: h_im, mean_x, mean_p, sigma_x })
}
