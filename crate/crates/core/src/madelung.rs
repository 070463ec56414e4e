//! Polar (Madelung) decomposition `ψ = R·exp(iS/ħ)` and the hydrodynamic
//! fields built from it.
//!
//! Every dynamical quantity is computed from the logarithmic derivatives
//! `w = ∇ψ/ψ` and `q = ∇²ψ/ψ`, never by differentiating `R`, `S` or `P`
//! directly:
//!
//! * `∇R/R = Re w`, `∇S/ħ = Im w`, `∇P/P = 2 Re w`
//! * `∇²S/ħ = Im(q − w·w)`
//!
//! Grid points where `R < ε·max R` are nodes. Quantities that divide by `ψ`
//! are undefined there; they are stored as `NaN` and excluded from every norm
//! and integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ComplexField, RealField, VectorField};
use crate::grid::Grid;
use crate::ops::{self, Backend};
use crate::units::PhysicalConstants;

/// Normalisation tolerance enforced when a [`Wavefunction`] is built.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodePolicy {
    /// Node threshold relative to `max R`.
    pub epsilon: f64,
    /// Masked grid fraction above which a state counts as degenerate.
    pub max_fraction: f64,
}

impl Default for NodePolicy {
    fn default() -> Self {
        Self { epsilon: 1e-6, max_fraction: 0.99 }
    }
}

impl NodePolicy {
    pub fn check(&self, masked_fraction: f64) -> Result<()> {
        if masked_fraction > self.max_fraction {
            return Err(Error::DegenerateState { masked_fraction, limit: self.max_fraction });
        }
        Ok(())
    }
}

/// Options shared by the hydrodynamic analyses.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HydroOptions {
    pub backend: Backend,
    pub nodes: NodePolicy,
}

impl HydroOptions {
    pub fn with_backend(backend: Backend) -> Self {
        Self { backend, ..Self::default() }
    }
}

/// A normalised state `ψ` with its physical constants and time stamp.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    psi: ComplexField,
    constants: PhysicalConstants,
    time: f64,
}

impl Wavefunction {
    /// Wraps `psi`, rejecting it unless `∫|ψ|² = 1` within [`NORM_TOLERANCE`].
    pub fn new(psi: ComplexField, constants: PhysicalConstants, time: f64) -> Result<Self> {
        constants.validate()?;
        let wf = Self { psi, constants, time };
        let norm = wf.norm();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::InvalidState(format!("wavefunction norm is {norm}, expected 1")));
        }
        Ok(wf)
    }

    /// Rescales `psi` to unit norm.
    pub fn normalized(psi: ComplexField, constants: PhysicalConstants, time: f64) -> Result<Self> {
        constants.validate()?;
        let norm = norm_of(&psi);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalise a state with norm {norm}")));
        }
        let s = 1.0 / norm.sqrt();
        Ok(Self { psi: psi.map(|z| z * s), constants, time })
    }

    /// Skips the normalisation check. Only for fault injection in
    /// verification runs; every analysis still assumes a normalised state.
    pub fn new_unchecked(psi: ComplexField, constants: PhysicalConstants, time: f64) -> Self {
        Self { psi, constants, time }
    }

    pub fn grid(&self) -> &Grid {
        self.psi.grid()
    }

    pub fn psi(&self) -> &ComplexField {
        &self.psi
    }

    pub fn values(&self) -> &[Complex64] {
        self.psi.values()
    }

    pub fn constants(&self) -> &PhysicalConstants {
        &self.constants
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.psi)
    }

    pub fn density(&self) -> RealField {
        self.psi.map(|z| z.norm_sqr())
    }

    /// Multiplies by `exp(iφ)`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let f = Complex64::from_polar(1.0, phi);
        Self { psi: self.psi.map(|z| z * f), constants: self.constants, time: self.time }
    }
}

fn norm_of(psi: &ComplexField) -> f64 {
    ops::integrate_with(psi.grid(), |k| psi.values()[k].norm_sqr())
}

/// `true` where `|ψ| < ε·max|ψ|`.
pub fn node_mask(psi: &ComplexField, epsilon: f64) -> Vec<bool> {
    let max_r = psi.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let threshold = epsilon * max_r;
    psi.values().iter().map(|z| z.norm() < threshold).collect()
}

pub fn masked_fraction(mask: &[bool]) -> f64 {
    if mask.is_empty() {
        return 0.0;
    }
    mask.iter().filter(|&&m| m).count() as f64 / mask.len() as f64
}

/// Amplitude, action-phase and density fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFields {
    /// `R = |ψ|`.
    pub amplitude: RealField,
    /// `S` in action units, unwrapped from `gauge_ref`.
    pub phase: RealField,
    /// `P = R²`.
    pub density: RealField,
    pub node_mask: Vec<bool>,
    /// Flat index where `S` takes its principal value.
    pub gauge_ref: usize,
}

impl PolarFields {
    pub fn masked_fraction(&self) -> f64 {
        masked_fraction(&self.node_mask)
    }
}

fn wrap_angle(d: f64) -> f64 {
    d - 2.0 * PI * (d / (2.0 * PI)).round()
}

/// Unwraps `arg` along a run of flat indices starting at `run[0]`, whose
/// value must already be set in `out`.
fn unwrap_run(arg: &[f64], out: &mut [f64], run: impl Iterator<Item = usize>) {
    let mut prev: Option<usize> = None;
    for k in run {
        if let Some(p) = prev {
            out[k] = out[p] + wrap_angle(arg[k] - arg[p]);
        }
        prev = Some(k);
    }
}

/// Splits `ψ` into `(R, S, P)`. The phase is unwrapped outward from the
/// point nearest the coordinate origin; in 2D first along that row, then
/// along every column.
pub fn decompose(wf: &Wavefunction, epsilon: f64) -> Result<PolarFields> {
    let grid = *wf.grid();
    let values = wf.values();
    let max_r = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(max_r > 0.0) || !max_r.is_finite() {
        return Err(Error::InvalidState("cannot decompose a vanishing state".into()));
    }
    let hbar = wf.constants().hbar;
    let amplitude = wf.psi().map(|z| z.norm());
    let density = wf.psi().map(|z| z.norm_sqr());
    let arg: Vec<f64> = values.iter().map(|z| z.arg()).collect();

    let gauge_ref = grid.origin_index();
    let [i0, j0] = grid.unravel(gauge_ref);
    let (n0, n1) = (grid.points(0), grid.points(1));
    let mut theta = vec![0.0; grid.len()];
    theta[gauge_ref] = arg[gauge_ref];

    unwrap_run(&arg, &mut theta, (j0..n1).map(|j| grid.index(i0, j)));
    unwrap_run(&arg, &mut theta, (0..=j0).rev().map(|j| grid.index(i0, j)));
    for j in 0..n1 {
        unwrap_run(&arg, &mut theta, (i0..n0).map(|i| grid.index(i, j)));
        unwrap_run(&arg, &mut theta, (0..=i0).rev().map(|i| grid.index(i, j)));
    }

    let phase = RealField::new(grid, theta.into_iter().map(|t| hbar * t).collect())?;
    Ok(PolarFields { amplitude, phase, density, node_mask: node_mask(wf.psi(), epsilon), gauge_ref })
}

/// Rebuilds `ψ = R·exp(iS/ħ)`.
pub fn recompose(polar: &PolarFields, constants: &PhysicalConstants) -> Result<Wavefunction> {
    let r = polar.amplitude.values();
    if let Some(bad) = r.iter().find(|&&v| !(v >= 0.0)) {
        return Err(Error::InvalidState(format!("negative or NaN amplitude {bad}")));
    }
    let inconsistent =
        r.iter().zip(polar.density.values()).any(|(&a, &p)| (a * a - p).abs() > 1e-12 * (a * a).max(1e-300));
    if inconsistent {
        return Err(Error::InvalidState("density is not the squared amplitude".into()));
    }
    let psi = polar.amplitude.zip_map(&polar.phase, |a, s| Complex64::from_polar(a, s / constants.hbar))?;
    Wavefunction::new(psi, *constants, 0.0)
}

/// `w = ∇ψ/ψ` per axis and `q = ∇²ψ/ψ`, `NaN` on nodes.
#[derive(Debug, Clone)]
pub struct LogDerivatives {
    pub grid: Grid,
    pub gradient: Vec<Vec<Complex64>>,
    pub laplacian: Vec<Complex64>,
    pub mask: Vec<bool>,
}

const NAN_C: Complex64 = Complex64::new(f64::NAN, f64::NAN);

impl LogDerivatives {
    pub fn compute(wf: &Wavefunction, backend: Backend, epsilon: f64) -> Result<Self> {
        let grid = *wf.grid();
        let grad = ops::gradient(wf.psi(), backend)?;
        let lap = ops::laplacian(wf.psi(), backend)?;
        let mask = node_mask(wf.psi(), epsilon);
        let psi = wf.values();
        let divide = |num: &[Complex64]| -> Vec<Complex64> {
            num.iter().zip(psi).zip(&mask).map(|((&n, &p), &m)| if m { NAN_C } else { n / p }).collect()
        };
        let gradient = grad.components().iter().map(|c| divide(c)).collect();
        let laplacian = divide(lap.values());
        Ok(Self { grid, gradient, laplacian, mask })
    }

    pub fn masked_fraction(&self) -> f64 {
        masked_fraction(&self.mask)
    }

    /// `Im(q − w·w) = ∇²S/ħ`.
    pub fn phase_laplacian(&self, k: usize) -> f64 {
        let ww: Complex64 = self.gradient.iter().map(|c| c[k] * c[k]).sum();
        (self.laplacian[k] - ww).im
    }

    fn map_components(&self, f: impl Fn(Complex64) -> f64) -> Vec<Vec<f64>> {
        self.gradient.iter().map(|c| c.iter().map(|&z| f(z)).collect()).collect()
    }
}

/// Convective and osmotic momentum fields with their derived quantities.
#[derive(Debug, Clone)]
pub struct MomentumFields {
    /// `p = ∇S`.
    pub convective: VectorField<f64>,
    /// `p_u = −ħ∇R/R`.
    pub osmotic: VectorField<f64>,
    /// `v = ∇S/m`.
    pub velocity: VectorField<f64>,
    /// `k_u = p_u/ħ`.
    pub osmotic_wavenumber: VectorField<f64>,
    /// `δE = (ħ/2)∇·v`.
    pub energy_fluctuation: RealField,
    pub node_mask: Vec<bool>,
}

impl MomentumFields {
    pub fn masked_fraction(&self) -> f64 {
        masked_fraction(&self.node_mask)
    }
}

pub fn momentum_fields(wf: &Wavefunction, opts: &HydroOptions) -> Result<MomentumFields> {
    let logd = LogDerivatives::compute(wf, opts.backend, opts.nodes.epsilon)?;
    opts.nodes.check(logd.masked_fraction())?;
    let PhysicalConstants { hbar, mass } = *wf.constants();
    let grid = logd.grid;
    let convective = VectorField::new(grid, logd.map_components(|z| hbar * z.im))?;
    let osmotic = VectorField::new(grid, logd.map_components(|z| -hbar * z.re))?;
    let velocity = VectorField::new(grid, logd.map_components(|z| hbar * z.im / mass))?;
    let osmotic_wavenumber = VectorField::new(grid, logd.map_components(|z| -z.re))?;
    let energy_fluctuation =
        RealField::new(grid, (0..grid.len()).map(|k| hbar * hbar / (2.0 * mass) * logd.phase_laplacian(k)).collect())?;
    Ok(MomentumFields { convective, osmotic, velocity, osmotic_wavenumber, energy_fluctuation, node_mask: logd.mask })
}

/// Pointwise defect of `|∇ψ/ψ|² = (∇R/R)² + (∇S/ħ)²`.
#[derive(Debug, Clone)]
pub struct IdentityResidual {
    /// Relative residual, `NaN` on nodes.
    pub field: RealField,
    pub max_residual: f64,
    pub masked_fraction: f64,
}

/// Floor added to `|∇ψ/ψ|²` in the relative residual (units of 1/length²).
pub const IDENTITY_FLOOR: f64 = 1e-12;

/// Compares the directly evaluated `|∇ψ|²/|ψ|²` with the sum of the squared
/// amplitude and phase log-gradients, `Re(ψ̄∇ψ)/P` and `Im(ψ̄∇ψ)/P`.
pub fn momentum_identity_residual(wf: &Wavefunction, opts: &HydroOptions) -> Result<IdentityResidual> {
    let grid = *wf.grid();
    let grad = ops::gradient(wf.psi(), opts.backend)?;
    let mask = node_mask(wf.psi(), opts.nodes.epsilon);
    let psi = wf.values();
    let values: Vec<f64> = (0..grid.len())
        .map(|k| {
            if mask[k] {
                return f64::NAN;
            }
            let p = psi[k].norm_sqr();
            let mut total = 0.0;
            let mut parts = 0.0;
            for c in grad.components() {
                total += c[k].norm_sqr() / p;
                let j = psi[k].conj() * c[k];
                parts += (j.re / p).powi(2) + (j.im / p).powi(2);
            }
            (total - parts).abs() / (total + IDENTITY_FLOOR)
        })
        .collect();
    let max_residual = values.iter().filter(|v| !v.is_nan()).fold(0.0, |a: f64, &b| a.max(b));
    Ok(IdentityResidual { field: RealField::new(grid, values)?, max_residual, masked_fraction: masked_fraction(&mask) })
}

/// Averaged fluctuation energy, the `k·k_u` cross term, and the defect of
/// the integration-by-parts relation `X = (m/ħ²)⟨δE⟩` linking them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossTermReport {
    pub mean_energy_fluctuation: f64,
    pub cross_term: f64,
    pub relation_residual: f64,
    pub masked_fraction: f64,
}

pub fn cross_term_relation(wf: &Wavefunction, opts: &HydroOptions) -> Result<CrossTermReport> {
    let logd = LogDerivatives::compute(wf, opts.backend, opts.nodes.epsilon)?;
    opts.nodes.check(logd.masked_fraction())?;
    let PhysicalConstants { hbar, mass } = *wf.constants();
    let grid = logd.grid;
    let psi = wf.values();
    let mean_de = ops::integrate_with(&grid, |k| {
        if logd.mask[k] {
            0.0
        } else {
            psi[k].norm_sqr() * hbar * hbar / (2.0 * mass) * logd.phase_laplacian(k)
        }
    });
    let cross = ops::integrate_with(&grid, |k| {
        if logd.mask[k] {
            0.0
        } else {
            // k = Im w, k_u = −Re w
            -psi[k].norm_sqr() * logd.gradient.iter().map(|c| c[k].im * c[k].re).sum::<f64>()
        }
    });
    Ok(CrossTermReport {
        mean_energy_fluctuation: mean_de,
        cross_term: cross,
        relation_residual: (cross - mass / (hbar * hbar) * mean_de).abs(),
        masked_fraction: logd.masked_fraction(),
    })
}

/// `⟨δE⟩ = ∫P·(ħ/2)∇·v`.
pub fn mean_energy_fluctuation(wf: &Wavefunction, opts: &HydroOptions) -> Result<f64> {
    Ok(cross_term_relation(wf, opts)?.mean_energy_fluctuation)
}

/// `X = ∫P·k·k_u`.
pub fn cross_term(wf: &Wavefunction, opts: &HydroOptions) -> Result<f64> {
    Ok(cross_term_relation(wf, opts)?.cross_term)
}

/// Largest relative disagreement between the two osmotic forms
/// `−ħ∇R/R` (from `ψ`) and `−(ħ/2)∇P/P` (differentiating `P` itself), over
/// points that are not nodes under `epsilon`. The scale floor is `1/L`
/// with `L` the smallest grid extent.
///
/// The `P` route loses accuracy like `u/P` (`u` the unit roundoff) where
/// `P` is small, so the agreement is only meaningful for thresholds around
/// `1e-3` and above.
pub fn osmotic_form_consistency(wf: &Wavefunction, backend: Backend, epsilon: f64) -> Result<f64> {
    let grid = *wf.grid();
    let logd = LogDerivatives::compute(wf, backend, epsilon)?;
    let density = wf.density();
    let grad_p = ops::gradient(&density, backend)?;
    let floor = 1.0 / (0..grid.dims()).map(|a| grid.extent(a)).fold(f64::INFINITY, f64::min);
    let mut worst = 0.0f64;
    for k in (0..grid.len()).filter(|&k| !logd.mask[k]) {
        let p = density.values()[k];
        for axis in 0..grid.dims() {
            let from_psi = logd.gradient[axis][k].re;
            let from_p = 0.5 * grad_p.component(axis)[k] / p;
            let rel = (from_psi - from_p).abs() / (from_psi.abs() + from_p.abs() + floor);
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridSpec};
    use crate::states;

    fn grid(l: f64, n: usize) -> Grid {
        build_grid(&GridSpec::new_1d(l, n), true).unwrap()
    }

    #[test]
    fn constant_state_decomposes_trivially() {
        let l = 10.0;
        let g = grid(l, 64);
        let c = PhysicalConstants::default();
        let wf = Wavefunction::new(ComplexField::from_fn(g, |_, _| (1.0 / l.sqrt()).into()), c, 0.0).unwrap();
        let polar = decompose(&wf, 1e-6).unwrap();
        for k in 0..g.len() {
            assert!((polar.amplitude.values()[k] - 1.0 / l.sqrt()).abs() < 1e-15);
            assert!(polar.phase.values()[k].abs() < 1e-15);
            assert!((polar.density.values()[k] - 1.0 / l).abs() < 1e-15);
        }
        let back = recompose(&polar, &c).unwrap();
        for (a, b) in back.values().iter().zip(wf.values()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn plane_wave_phase_is_linear() {
        let l = 20.0;
        let g = grid(l, 128);
        let c = PhysicalConstants::default();
        let k = 8.0 * PI / l;
        let wf = states::plane_wave(&g, &c, &[k]).unwrap();
        let polar = decompose(&wf, 1e-6).unwrap();
        let s0 = polar.phase.values()[polar.gauge_ref] - k * g.position(polar.gauge_ref)[0];
        for j in 0..g.len() {
            let expected = c.hbar * k * g.coordinate(0, j) + s0;
            assert!((polar.phase.values()[j] - expected).abs() < 1e-12);
            assert!((polar.amplitude.values()[j] - 1.0 / l.sqrt()).abs() < 1e-14);
        }
        assert!(polar.node_mask.iter().all(|m| !m));
    }

    #[test]
    fn gaussian_has_flat_phase_and_tail_mask() {
        let g = grid(40.0, 512);
        let c = PhysicalConstants::default();
        let wf = states::gaussian(&g, &c, &[0.0], 1.0, &[0.0]).unwrap();
        let polar = decompose(&wf, 1e-6).unwrap();
        assert!(polar.phase.values().iter().all(|s| s.abs() < 1e-15));
        // R/max R = exp(−x²/4) < 1e-6 exactly when |x| > 2·sqrt(ln 1e6)
        let edge = 2.0 * (1e6f64).ln().sqrt();
        for (j, &m) in polar.node_mask.iter().enumerate() {
            let x = g.coordinate(0, j);
            if (x.abs() - edge).abs() > 1e-3 {
                assert_eq!(m, x.abs() > edge, "x = {x}");
            }
        }
    }

    #[test]
    fn zero_state_is_invalid() {
        let g = grid(10.0, 16);
        let wf = Wavefunction::new_unchecked(ComplexField::zeros(g), PhysicalConstants::default(), 0.0);
        assert!(matches!(decompose(&wf, 1e-6), Err(Error::InvalidState(_))));
        assert!(Wavefunction::normalized(ComplexField::zeros(g), PhysicalConstants::default(), 0.0).is_err());
    }

    #[test]
    fn unnormalised_state_rejected() {
        let g = grid(10.0, 16);
        let psi = ComplexField::from_fn(g, |_, _| Complex64::new(1.0, 0.0));
        assert!(Wavefunction::new(psi, PhysicalConstants::default(), 0.0).is_err());
    }

    #[test]
    fn negative_amplitude_rejected() {
        let g = grid(10.0, 16);
        let c = PhysicalConstants::default();
        let wf = states::gaussian(&g, &c, &[0.0], 1.0, &[0.0]).unwrap();
        let mut polar = decompose(&wf, 1e-6).unwrap();
        polar.amplitude.values_mut()[3] = -0.1;
        assert!(matches!(recompose(&polar, &c), Err(Error::InvalidState(_))));
    }

    #[test]
    fn plane_wave_momenta() {
        let l = 20.0;
        let g = grid(l, 128);
        let c = PhysicalConstants::default();
        let k = 2.0 * 2.0 * PI / l;
        let wf = states::plane_wave(&g, &c, &[k]).unwrap();
        let m = momentum_fields(&wf, &HydroOptions::default()).unwrap();
        assert!(m.convective.component(0).iter().all(|p| (p - c.hbar * k).abs() < 1e-12));
        assert!(m.osmotic.component(0).iter().all(|p| p.abs() < 1e-12));
        assert!(m.energy_fluctuation.values().iter().all(|e| e.abs() < 1e-10));
    }

    #[test]
    fn gaussian_osmotic_momentum_is_linear() {
        let g = grid(40.0, 512);
        let c = PhysicalConstants::default();
        let sigma = 1.0;
        let wf = states::gaussian(&g, &c, &[0.0], sigma, &[0.0]).unwrap();
        let m = momentum_fields(&wf, &HydroOptions::default()).unwrap();
        for j in (0..g.len()).filter(|&j| !m.node_mask[j]) {
            let x = g.coordinate(0, j);
            let expected = c.hbar * x / (2.0 * sigma * sigma);
            assert!((m.osmotic.component(0)[j] - expected).abs() < 1e-8, "x = {x}");
            assert!(m.convective.component(0)[j].abs() < 1e-8);
        }
        for j in (0..g.len()).filter(|&j| m.node_mask[j]) {
            assert!(m.osmotic.component(0)[j].is_nan());
        }
    }

    #[test]
    fn ground_state_has_no_energy_fluctuation() {
        let g = grid(20.0, 512);
        let c = PhysicalConstants::default();
        let wf = states::ho_ground(&g, &c, 1.0).unwrap();
        let m = momentum_fields(&wf, &HydroOptions::default()).unwrap();
        for j in (0..g.len()).filter(|&j| !m.node_mask[j]) {
            assert!(m.energy_fluctuation.values()[j].abs() < 1e-6);
        }
    }

    #[test]
    fn degenerate_node_fraction_is_an_error() {
        let g = grid(40.0, 512);
        let c = PhysicalConstants::default();
        let wf = states::gaussian(&g, &c, &[0.0], 0.2, &[0.0]).unwrap();
        let opts = HydroOptions { nodes: NodePolicy { epsilon: 1e-6, max_fraction: 0.5 }, ..Default::default() };
        assert!(matches!(momentum_fields(&wf, &opts), Err(Error::DegenerateState { .. })));
    }

    #[test]
    fn quadratic_phase_cross_term() {
        let g = grid(40.0, 512);
        let c = PhysicalConstants::default();
        let (sigma, alpha): (f64, f64) = (1.0, 0.3);
        let base = states::gaussian(&g, &c, &[0.0], sigma, &[0.0]).unwrap();
        let psi = base.psi().zip_map(&RealField::from_fn(g, |x, _| x), |z, x| {
            z * Complex64::from_polar(1.0, alpha * x * x / (2.0 * c.hbar))
        });
        let wf = Wavefunction::new(psi.unwrap(), c, 0.0).unwrap();
        let r = cross_term_relation(&wf, &HydroOptions::default()).unwrap();
        // ∫P·x²/(2σ²)·α/ħ = α/(2ħ), and (m/ħ²)·(ħ/2)·(α/m) = α/(2ħ)
        let expected = alpha / (2.0 * c.hbar);
        assert!((r.cross_term - expected).abs() < 1e-8 * expected);
        assert!((r.mean_energy_fluctuation * c.mass / c.hbar.powi(2) - expected).abs() < 1e-8 * expected);
        assert!(r.relation_residual < 1e-8 * expected);
    }
}
