//! Trajectory-level balance checks: continuity, the fluctuation balance,
//! the two forms of the action, the Lagrangian density and the
//! Schrödinger (Euler–Lagrange) residual.
//!
//! Time derivatives are centred differences of adjacent snapshots, so every
//! check requires `record_stride = 1`. Residual norms cover interior
//! snapshots only.

use num_complex::Complex64;
use serde::Serialize;

use crate::convergence::{fit_order, OrderFit};
use crate::error::{config, Error, Result};
use crate::field::RealField;
use crate::grid::Grid;
use crate::madelung::{masked_fraction, node_mask, HydroOptions, LogDerivatives, Wavefunction};
use crate::ops::{self, Backend};
use crate::potential::Potential;
use crate::propagator::Trajectory;
use crate::units::PhysicalConstants;

/// Residual summary over the interior snapshots of a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceReport {
    /// Pointwise residual at the snapshot with the largest `L∞` residual;
    /// `NaN` on masked points.
    #[serde(skip)]
    pub residual_field: RealField,
    /// Largest per-snapshot `(∫r²)^{1/2}`.
    pub l2_residual: f64,
    /// Largest unmasked pointwise residual.
    pub linf_residual: f64,
    /// Largest masked fraction over the snapshots used.
    pub masked_fraction: f64,
    pub convergence_order: Option<f64>,
    pub times: Vec<f64>,
    pub snapshot_l2: Vec<f64>,
    pub snapshot_linf: Vec<f64>,
}

impl BalanceReport {
    /// Ratio of the largest to the median per-snapshot `L∞` residual.
    pub fn peak_to_median(&self) -> f64 {
        let mut v = self.snapshot_linf.clone();
        v.sort_by(f64::total_cmp);
        let median = v[v.len() / 2];
        v[v.len() - 1] / median
    }

    /// Index of the interior snapshot with the largest `L∞` residual.
    pub fn worst_snapshot(&self) -> usize {
        self.snapshot_linf.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0)
    }
}

/// Fits the order of `l2_residual` against `dt` over a refinement ladder.
pub fn ladder_order(reports: &[(f64, &BalanceReport)]) -> Result<OrderFit> {
    let dts: Vec<f64> = reports.iter().map(|r| r.0).collect();
    let errs: Vec<f64> = reports.iter().map(|r| r.1.l2_residual).collect();
    fit_order(&dts, &errs)
}

fn check_trajectory(traj: &Trajectory) -> Result<()> {
    if traj.record_stride != 1 {
        return config(format!("balance checks need record_stride = 1, trajectory has {}", traj.record_stride));
    }
    if traj.len() < 3 {
        return config(format!("balance checks need at least 3 snapshots, got {}", traj.len()));
    }
    if !(traj.dt != 0.0 && traj.dt.is_finite()) {
        return config("balance checks need a nonzero time step");
    }
    Ok(())
}

/// `ψ̇` at snapshot `n`: centred inside, second-order one-sided at the ends.
pub fn time_derivative(traj: &Trajectory, n: usize) -> Vec<Complex64> {
    let s = &traj.snapshots;
    let dt = traj.snapshot_dt();
    let last = s.len() - 1;
    let combine = |terms: &[(f64, usize)]| -> Vec<Complex64> {
        (0..s[0].values().len())
            .map(|k| terms.iter().map(|&(c, i)| s[i].values()[k] * c).sum::<Complex64>() / dt)
            .collect()
    };
    if n == 0 {
        combine(&[(-1.5, 0), (2.0, 1), (-0.5, 2)])
    } else if n == last {
        combine(&[(1.5, last), (-2.0, last - 1), (0.5, last - 2)])
    } else {
        combine(&[(0.5, n + 1), (-0.5, n - 1)])
    }
}

/// `∂ₜP` at interior snapshot `n` by centred differences.
fn density_rate(traj: &Trajectory, n: usize) -> Vec<f64> {
    let a = traj.snapshots[n + 1].values();
    let b = traj.snapshots[n - 1].values();
    let inv = 0.5 / traj.snapshot_dt();
    a.iter().zip(b).map(|(p, m)| (p.norm_sqr() - m.norm_sqr()) * inv).collect()
}

struct Accumulator {
    grid: Grid,
    times: Vec<f64>,
    l2: Vec<f64>,
    linf: Vec<f64>,
    masked: f64,
    worst: Option<(f64, Vec<f64>)>,
}

impl Accumulator {
    fn new(grid: Grid) -> Self {
        Self { grid, times: Vec::new(), l2: Vec::new(), linf: Vec::new(), masked: 0.0, worst: None }
    }

    fn push(&mut self, time: f64, field: Vec<f64>, masked: f64) {
        let sq: Vec<f64> = field.iter().map(|r| if r.is_nan() { 0.0 } else { r * r }).collect();
        let l2 = ops::integrate_values(&self.grid, &sq).sqrt();
        let linf = field.iter().filter(|r| !r.is_nan()).fold(0.0, |a: f64, &b| a.max(b.abs()));
        self.times.push(time);
        self.l2.push(l2);
        self.linf.push(linf);
        self.masked = self.masked.max(masked);
        if self.worst.as_ref().is_none_or(|w| linf > w.0) {
            self.worst = Some((linf, field));
        }
    }

    fn finish(self) -> Result<BalanceReport> {
        let (_, field) = self.worst.expect("at least one interior snapshot");
        Ok(BalanceReport {
            residual_field: RealField::new(self.grid, field)?,
            l2_residual: self.l2.iter().fold(0.0, |a, &b| a.max(b)),
            linf_residual: self.linf.iter().fold(0.0, |a, &b| a.max(b)),
            masked_fraction: self.masked,
            convergence_order: None,
            times: self.times,
            snapshot_l2: self.l2,
            snapshot_linf: self.linf,
        })
    }
}

/// `j·m/ħ = Im(ψ̄∇ψ)` has divergence `Im(ψ̄∇²ψ)`; returns `∇·(vP)`.
fn flux_divergence(wf: &Wavefunction, backend: Backend) -> Result<Vec<f64>> {
    let lap = ops::laplacian(wf.psi(), backend)?;
    let c = wf.constants().hbar / wf.constants().mass;
    Ok(wf.values().iter().zip(lap.values()).map(|(p, l)| c * (p.conj() * l).im).collect())
}

/// Pointwise `∂ₜP + ∇·(vP)`. The flux is regular at nodes, so no point is
/// excluded; the node fraction is still reported.
pub fn continuity_residual(traj: &Trajectory, opts: &HydroOptions) -> Result<BalanceReport> {
    check_trajectory(traj)?;
    let mut acc = Accumulator::new(*traj.grid());
    for n in 1..traj.len() - 1 {
        let wf = &traj.snapshots[n];
        let dp = density_rate(traj, n);
        let div = flux_divergence(wf, opts.backend)?;
        let field: Vec<f64> = dp.iter().zip(&div).map(|(a, b)| a + b).collect();
        let masked = masked_fraction(&node_mask(wf.psi(), opts.nodes.epsilon));
        acc.push(wf.time(), field, masked);
    }
    acc.finish()
}

/// Fluctuation balance and its agreement with the continuity residual.
#[derive(Debug, Clone, Serialize)]
pub struct FluctuationReport {
    pub balance: BalanceReport,
    /// Largest off-node `|r_fluct − r_cont/P|`.
    pub agreement: f64,
}

/// Pointwise `∂ₜP/P − (2/ħ)(δp·v − δE)` with `δp = −ħ∇R/R`, `v = ∇S/m` and
/// `δE = (ħ/2)∇·v`, masked at nodes. Algebraically this is the continuity
/// residual divided by `P`; that agreement is evaluated alongside.
pub fn fluctuation_balance(traj: &Trajectory, opts: &HydroOptions) -> Result<FluctuationReport> {
    check_trajectory(traj)?;
    let mut acc = Accumulator::new(*traj.grid());
    let mut agreement = 0.0f64;
    for n in 1..traj.len() - 1 {
        let wf = &traj.snapshots[n];
        let PhysicalConstants { hbar, mass } = *wf.constants();
        let logd = LogDerivatives::compute(wf, opts.backend, opts.nodes.epsilon)?;
        opts.nodes.check(logd.masked_fraction())?;
        let dp = density_rate(traj, n);
        let div = flux_divergence(wf, opts.backend)?;
        let psi = wf.values();
        let field: Vec<f64> = (0..psi.len())
            .map(|k| {
                if logd.mask[k] {
                    return f64::NAN;
                }
                let p = psi[k].norm_sqr();
                let mut dp_dot_v = 0.0;
                for c in &logd.gradient {
                    let osmotic = -hbar * c[k].re;
                    let velocity = hbar * c[k].im / mass;
                    dp_dot_v += osmotic * velocity;
                }
                let de = 0.5 * hbar * (hbar / mass) * logd.phase_laplacian(k);
                dp[k] / p - (2.0 / hbar) * (dp_dot_v - de)
            })
            .collect();
        for k in (0..psi.len()).filter(|&k| !logd.mask[k]) {
            let cont_over_p = (dp[k] + div[k]) / psi[k].norm_sqr();
            agreement = agreement.max((field[k] - cont_over_p).abs());
        }
        acc.push(wf.time(), field, logd.masked_fraction());
    }
    Ok(FluctuationReport { balance: acc.finish()?, agreement })
}

/// Both forms of the action along a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct ActionReport {
    /// `∫∫P(∂ₜS + ħ²k_tot²/2m + V)`, nodes excluded.
    pub a_classical: f64,
    /// `∫∫[|ψ|²(∂ₜS + V) + (ħ²/2m)|∇ψ|²]` over the full grid.
    pub a_psi: f64,
    /// `|A_c − A_ψ| / (|A_ψ| + scale)`.
    pub rel_difference: f64,
    /// `∫∫` of the summed absolute values of the integrand terms.
    pub scale: f64,
    pub masked_fraction: f64,
    pub times: Vec<f64>,
    /// Spatial integrals of the classical-form integrand per snapshot.
    pub classical_integrand: Vec<f64>,
    /// Spatial integrals of the Lagrangian density per snapshot.
    pub psi_integrand: Vec<f64>,
    /// Lagrangian density at the middle snapshot.
    #[serde(skip)]
    pub lagrangian_sample: RealField,
}

/// Trapezoidal rule on a uniform time grid.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (ops::pairwise_sum(&values[1..n - 1]) + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Lagrangian density
/// `L = −(iħ/2)(ψ̄ψ̇ − ψ̇̄ψ) + (ħ²/2m)∇ψ·∇ψ̄ + V|ψ|²`.
///
/// Evaluated in complex arithmetic; a numerical error is returned if the
/// imaginary part exceeds `1e-10` anywhere.
pub fn lagrangian_density(
    wf: &Wavefunction,
    psi_dot: &[Complex64],
    potential: &Potential,
    backend: Backend,
) -> Result<RealField> {
    let grid = *wf.grid();
    potential.values.check_same_grid(&grid)?;
    if psi_dot.len() != grid.len() {
        return Err(Error::GridMismatch("ψ̇ length differs from the grid".into()));
    }
    let PhysicalConstants { hbar, mass } = *wf.constants();
    let grad = ops::gradient(wf.psi(), backend)?;
    let psi = wf.values();
    let v = potential.values.values();
    let i_half_hbar = Complex64::new(0.0, 0.5 * hbar);
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let time_part = -i_half_hbar * (psi[k].conj() * psi_dot[k] - psi_dot[k].conj() * psi[k]);
        let kinetic: Complex64 = grad.components().iter().map(|c| c[k] * c[k].conj()).sum();
        let l = time_part + kinetic * (hbar * hbar / (2.0 * mass)) + psi[k].conj() * psi[k] * v[k];
        if l.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!("Lagrangian density has imaginary part {:.3e} at point {k}", l.im)));
        }
        values.push(l.re);
    }
    RealField::new(grid, values)
}

pub fn action_integral(traj: &Trajectory, opts: &HydroOptions) -> Result<ActionReport> {
    check_trajectory(traj)?;
    let grid = *traj.grid();
    let potential = &traj.potential;
    potential.values.check_same_grid(&grid)?;
    let v = potential.values.values();
    let mut classical = Vec::with_capacity(traj.len());
    let mut lagrangian = Vec::with_capacity(traj.len());
    let mut magnitude = Vec::with_capacity(traj.len());
    let mut masked = 0.0f64;
    let mut sample = None;
    let mid = traj.len() / 2;
    for n in 0..traj.len() {
        let wf = &traj.snapshots[n];
        let PhysicalConstants { hbar, mass } = *wf.constants();
        let psi_dot = time_derivative(traj, n);
        let logd = LogDerivatives::compute(wf, opts.backend, opts.nodes.epsilon)?;
        opts.nodes.check(logd.masked_fraction())?;
        masked = masked.max(logd.masked_fraction());
        let psi = wf.values();
        let ke = hbar * hbar / (2.0 * mass);
        classical.push(ops::integrate_with(&grid, |k| {
            if logd.mask[k] {
                return 0.0;
            }
            let p = psi[k].norm_sqr();
            let p_dt_s = hbar * (psi[k].conj() * psi_dot[k]).im;
            let k_tot2: f64 = logd.gradient.iter().map(|c| c[k].re * c[k].re + c[k].im * c[k].im).sum();
            p_dt_s + p * (ke * k_tot2 + v[k])
        }));
        let l = lagrangian_density(wf, &psi_dot, potential, opts.backend)?;
        lagrangian.push(ops::integrate(&l));
        let grad = ops::gradient(wf.psi(), opts.backend)?;
        magnitude.push(ops::integrate_with(&grid, |k| {
            let kin: f64 = grad.components().iter().map(|c| c[k].norm_sqr()).sum();
            hbar * (psi[k].conj() * psi_dot[k]).im.abs() + ke * kin + (psi[k].norm_sqr() * v[k]).abs()
        }));
        if n == mid {
            sample = Some(l);
        }
    }
    let dt = traj.snapshot_dt();
    let a_classical = trapezoid(&classical, dt);
    let a_psi = trapezoid(&lagrangian, dt);
    let scale = trapezoid(&magnitude, dt).abs();
    Ok(ActionReport {
        a_classical,
        a_psi,
        rel_difference: (a_classical - a_psi).abs() / (a_psi.abs() + scale),
        scale,
        masked_fraction: masked,
        times: traj.times(),
        classical_integrand: classical,
        psi_integrand: lagrangian,
        lagrangian_sample: sample.expect("trajectory has a middle snapshot"),
    })
}

/// Pointwise `|iħψ̇ − Hψ|` with a centred `ψ̇`.
pub fn schroedinger_residual(traj: &Trajectory, backend: Backend) -> Result<BalanceReport> {
    check_trajectory(traj)?;
    let mut acc = Accumulator::new(*traj.grid());
    let v = traj.potential.values.values();
    for n in 1..traj.len() - 1 {
        let wf = &traj.snapshots[n];
        let PhysicalConstants { hbar, mass } = *wf.constants();
        let psi_dot = time_derivative(traj, n);
        let lap = ops::laplacian(wf.psi(), backend)?;
        let psi = wf.values();
        let field: Vec<f64> = (0..psi.len())
            .map(|k| {
                let h = lap.values()[k] * (-hbar * hbar / (2.0 * mass)) + psi[k] * v[k];
                (Complex64::new(0.0, hbar) * psi_dot[k] - h).norm()
            })
            .collect();
        acc.push(wf.time(), field, 0.0);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, GridSpec};
    use crate::potential::{make_potential, PotentialSpec};
    use crate::propagator::{evolve, EvolveConfig, Method};
    use crate::states;

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let v: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        assert!((trapezoid(&v, 0.1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_short_or_strided_trajectories() {
        let g = Grid::new(&GridSpec::new_1d(20.0, 64)).unwrap();
        let c = PhysicalConstants::default();
        let wf = states::ho_ground(&g, &c, 1.0).unwrap();
        let v = make_potential(&PotentialSpec::Harmonic { omega: 1.0 }, &g, &c).unwrap();
        let short = evolve(&wf, &v, &EvolveConfig::new(1e-3, 1, Method::SplitStep)).unwrap();
        assert!(continuity_residual(&short, &HydroOptions::default()).is_err());
        let strided = evolve(&wf, &v, &EvolveConfig::new(1e-3, 6, Method::SplitStep).with_stride(2)).unwrap();
        assert!(schroedinger_residual(&strided, Backend::Spectral).is_err());
    }

    #[test]
    fn one_sided_derivative_is_second_order_exact_for_quadratics() {
        let g = Grid::new(&GridSpec::new_1d(20.0, 16)).unwrap();
        let c = PhysicalConstants::default();
        let base = states::ho_ground(&g, &c, 1.0).unwrap();
        // ψ(t) = (1 + t + t²)ψ₀ has ψ̇ = (1 + 2t)ψ₀
        let snaps: Vec<Wavefunction> = (0..4)
            .map(|n| {
                let t = 0.1 * n as f64;
                Wavefunction::new_unchecked(base.psi().map(|z| z * (1.0 + t + t * t)), c, t)
            })
            .collect();
        let traj = Trajectory::from_snapshots(snaps, 0.1, Method::SplitStep, Potential::free(&g)).unwrap();
        for n in [0, 1, 3] {
            let d = time_derivative(&traj, n);
            let t = 0.1 * n as f64;
            for (a, b) in d.iter().zip(base.values()) {
                assert!((a - b * (1.0 + 2.0 * t)).norm() < 1e-12);
            }
        }
    }
}
