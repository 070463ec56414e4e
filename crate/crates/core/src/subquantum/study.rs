//! Coarse-time study: how propagation error behaves as `dt` crosses the
//! state's own clock period `δt = 1/ω`.

use serde::{Deserialize, Serialize};

use crate::convergence::fit_order;
use crate::error::{config, Result};
use crate::madelung::{HydroOptions, Wavefunction};
use crate::ops;
use crate::potential::Potential;
use crate::propagator::{evolve, EvolveConfig, Method, Propagator};
use crate::variational::schroedinger_residual;

use super::clock::{characteristic_frequency, FluidClock};
use super::ensemble::{compare_histogram, drift_field, init_ensemble, step_ensemble, Binning};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyWalkers {
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_bins() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseTimeConfig {
    pub dt_list: Vec<f64>,
    /// Defaults to twice the largest step.
    pub total_time: Option<f64>,
    /// The reference run uses `min(dt_list)/reference_refinement`.
    pub reference_refinement: usize,
    /// Rows with `dt·ω` at most this enter the order fit.
    pub fit_max_ratio: f64,
    /// Rows with `dt·ω` at least this are checked for breakdown.
    pub breakdown_ratio: f64,
    /// Relative terminal error that counts as breakdown.
    pub breakdown_threshold: f64,
    pub method: Method,
    pub walkers: Option<StudyWalkers>,
}

impl CoarseTimeConfig {
    pub fn new(dt_list: Vec<f64>, method: Method) -> Self {
        Self {
            dt_list,
            total_time: None,
            reference_refinement: 16,
            fit_max_ratio: 0.125,
            breakdown_ratio: 2.0,
            breakdown_threshold: 0.1,
            method,
            walkers: None,
        }
    }
}

/// `δt·2^{−k}` for `k = 0..=k_max`, plus `extra` multiples of `δt`.
pub fn clock_ladder(delta_t: f64, k_max: u32, extra: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = extra.iter().map(|m| m * delta_t).collect();
    v.extend((0..=k_max).map(|k| delta_t / 2f64.powi(k as i32)));
    v.sort_by(|a, b| b.total_cmp(a));
    v.dedup();
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub dt: f64,
    pub dt_omega: f64,
    pub steps: usize,
    /// `‖ψ_dt(T) − ψ_ref(T)‖₂ / ‖ψ_ref(T)‖₂`.
    pub terminal_error: f64,
    /// Largest per-snapshot `L2` Schrödinger residual.
    pub residual: f64,
    /// Walker histogram distance to `|ψ_ref(T)|²`, when walkers are run.
    pub walker_tv: Option<f64>,
    pub walker_fallbacks: Option<u64>,
    pub in_fit: bool,
    pub breakdown: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyReport {
    pub clock: FluidClock,
    pub total_time: f64,
    pub reference_dt: f64,
    pub rows: Vec<StudyRow>,
    /// Order fitted on rows with `dt·ω ≤ fit_max_ratio`.
    pub fitted_order: Option<f64>,
    pub fit_max_ratio: f64,
    pub breakdown_ratio: f64,
    pub breakdown_threshold: f64,
    /// Every row at or beyond `breakdown_ratio` has error above the threshold.
    pub breakdown_confirmed: bool,
}

fn steps_for(total: f64, dt: f64) -> Result<usize> {
    let n = total / dt;
    let rounded = n.round();
    if !(rounded >= 1.0) || (n - rounded).abs() > 1e-6 * n.max(1.0) {
        return config(format!("total time {total} is not a whole number of steps of {dt}"));
    }
    Ok(rounded as usize)
}

pub fn coarse_time_study(
    initial: &Wavefunction,
    potential: &Potential,
    cfg: &CoarseTimeConfig,
    opts: &HydroOptions,
) -> Result<StudyReport> {
    let dts = &cfg.dt_list;
    if dts.is_empty() || dts.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return config("dt list must hold positive, finite steps");
    }
    let max_dt = dts.iter().cloned().fold(0.0, f64::max);
    let min_dt = dts.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_dt / min_dt < 16.0 * (1.0 - 1e-12) {
        return config(format!("dt list spans a factor {:.3}, at least 16 is required", max_dt / min_dt));
    }
    let backend = cfg.method.backend();
    let clock = characteristic_frequency(initial, potential, backend)?;
    if !(max_dt >= clock.delta_t && min_dt < clock.delta_t) {
        return config(format!(
            "dt list must straddle the clock period δt = {} (got {min_dt}..{max_dt})",
            clock.delta_t
        ));
    }
    if cfg.reference_refinement == 0 {
        return config("reference_refinement must be at least 1");
    }
    let total = cfg.total_time.unwrap_or(2.0 * max_dt);
    let reference_dt = min_dt / cfg.reference_refinement as f64;

    let mut reference = Propagator::new(initial, potential, reference_dt, cfg.method)?;
    for _ in 0..steps_for(total, reference_dt)? {
        reference.step()?;
    }
    let psi_ref = reference.wavefunction();
    let ref_norm = psi_ref.norm().sqrt();
    let grid = *initial.grid();
    let (hbar, mass) = (initial.constants().hbar, initial.constants().mass);

    let mut rows = Vec::new();
    for &dt in dts {
        let steps = steps_for(total, dt)?;
        let traj = evolve(initial, potential, &EvolveConfig::new(dt, steps, cfg.method))?;
        let last = traj.last();
        let terminal_error =
            ops::integrate_with(&grid, |k| (last.values()[k] - psi_ref.values()[k]).norm_sqr()).sqrt() / ref_norm;
        let residual = if traj.len() >= 3 { schroedinger_residual(&traj, backend)?.l2_residual } else { f64::NAN };
        let (walker_tv, walker_fallbacks) = match &cfg.walkers {
            Some(w) => {
                let mut ens = init_ensemble(&initial.density(), w.n, w.seed, initial.time())?;
                for snap in &traj.snapshots[..traj.len() - 1] {
                    let drift = drift_field(snap, opts)?;
                    step_ensemble(&mut ens, &drift, dt, hbar, mass)?;
                }
                let binning = if grid.dims() == 1 { Binning::Full } else { Binning::Marginal(grid.dims() - 1) };
                let h = compare_histogram(&ens, &psi_ref.density(), w.bins, binning)?;
                (Some(h.total_variation), Some(ens.node_fallbacks))
            }
            None => (None, None),
        };
        let dt_omega = dt * clock.omega;
        rows.push(StudyRow {
            dt,
            dt_omega,
            steps,
            terminal_error,
            residual,
            walker_tv,
            walker_fallbacks,
            in_fit: dt_omega <= cfg.fit_max_ratio * (1.0 + 1e-12),
            breakdown: dt_omega >= cfg.breakdown_ratio * (1.0 - 1e-12) && terminal_error > cfg.breakdown_threshold,
        });
    }
    let fit: Vec<&StudyRow> = rows.iter().filter(|r| r.in_fit && r.terminal_error > 0.0).collect();
    let fitted_order = if fit.len() >= 2 {
        let h: Vec<f64> = fit.iter().map(|r| r.dt).collect();
        let e: Vec<f64> = fit.iter().map(|r| r.terminal_error).collect();
        Some(fit_order(&h, &e)?.order)
    } else {
        None
    };
    let coarse: Vec<&StudyRow> = rows.iter().filter(|r| r.dt_omega >= cfg.breakdown_ratio * (1.0 - 1e-12)).collect();
    let breakdown_confirmed = !coarse.is_empty() && coarse.iter().all(|r| r.breakdown);
    Ok(StudyReport {
        clock,
        total_time: total,
        reference_dt,
        rows,
        fitted_order,
        fit_max_ratio: cfg.fit_max_ratio,
        breakdown_ratio: cfg.breakdown_ratio,
        breakdown_threshold: cfg.breakdown_threshold,
        breakdown_confirmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_descending_and_unique() {
        let v = clock_ladder(0.4, 3, &[2.0, 1.0]);
        assert_eq!(v, vec![0.8, 0.4, 0.2, 0.1, 0.05]);
    }

    #[test]
    fn whole_step_counts() {
        assert_eq!(steps_for(1.6, 0.4).unwrap(), 4);
        assert!(steps_for(1.0, 0.3).is_err());
    }
}
