use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::fft::SpectralPlan;
use crate::potential::Potential;
use crate::units::PhysicalConstants;

/// Strang splitting `e^{−iVdt/2ħ} e^{−iTdt/ħ} e^{−iVdt/2ħ}` with the kinetic
/// factor applied in Fourier space.
pub(crate) struct SplitStepper {
    plan: Arc<SpectralPlan>,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

impl SplitStepper {
    pub fn new(potential: &Potential, constants: &PhysicalConstants, dt: f64) -> Result<Self> {
        let grid = *potential.grid();
        let plan = SpectralPlan::for_grid(&grid)?;
        let PhysicalConstants { hbar, mass } = *constants;
        let half_potential =
            potential.values.values().iter().map(|&v| Complex64::from_polar(1.0, -0.5 * v * dt / hbar)).collect();
        let kinetic = (0..grid.len())
            .map(|k| Complex64::from_polar(1.0, -hbar * plan.k_squared(k) * dt / (2.0 * mass)))
            .collect();
        Ok(Self { plan, half_potential, kinetic })
    }

    pub fn step(&self, psi: &mut [Complex64]) {
        for (z, f) in psi.iter_mut().zip(&self.half_potential) {
            *z *= f;
        }
        self.plan.forward(psi);
        for (z, f) in psi.iter_mut().zip(&self.kinetic) {
            *z *= f;
        }
        self.plan.inverse(psi);
        for (z, f) in psi.iter_mut().zip(&self.half_potential) {
            *z *= f;
        }
    }
}
