//! Cached FFT plans for 1D/2D periodic grids.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{config, Result};
use crate::grid::Grid;

pub struct SpectralPlan {
    grid: Grid,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
    /// Angular wavenumbers in FFT order; the Nyquist entry is `-π/dx`.
    wavenumbers: Vec<Vec<f64>>,
}

type PlanKey = (usize, [usize; 2], [u64; 2]);

fn cache() -> &'static Mutex<HashMap<PlanKey, Arc<SpectralPlan>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<SpectralPlan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl SpectralPlan {
    /// Shared plan for `grid`; errors unless every axis is a power of two.
    pub fn for_grid(grid: &Grid) -> Result<Arc<SpectralPlan>> {
        if !grid.is_spectral_capable() {
            return config("spectral operators need power-of-two points on every axis");
        }
        let key = (grid.dims(), [grid.points(0), grid.points(1)], [grid.extent(0).to_bits(), grid.extent(1).to_bits()]);
        let mut map = cache().lock().expect("fft plan cache poisoned");
        if let Some(plan) = map.get(&key) {
            return Ok(plan.clone());
        }
        let plan = Arc::new(Self::build(grid));
        map.insert(key, plan.clone());
        Ok(plan)
    }

    fn build(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let mut forward = Vec::new();
        let mut inverse = Vec::new();
        let mut wavenumbers = Vec::new();
        for axis in 0..grid.dims() {
            let n = grid.points(axis);
            forward.push(planner.plan_fft_forward(n));
            inverse.push(planner.plan_fft_inverse(n));
            let dk = 2.0 * PI / grid.extent(axis);
            wavenumbers
                .push((0..n).map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect());
        }
        Self { grid: *grid, forward, inverse, wavenumbers }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// First-derivative multiplier along `axis`, with the Nyquist mode zeroed.
    pub fn derivative_wavenumber(&self, axis: usize, j: usize) -> f64 {
        if j == self.grid.points(axis) / 2 {
            0.0
        } else {
            self.wavenumbers[axis][j]
        }
    }

    /// `|k|²` at a flat spectral index.
    pub fn k_squared(&self, flat: usize) -> f64 {
        let [i, j] = self.grid.unravel(flat);
        let mut k2 = self.wavenumbers[0][i].powi(2);
        if self.grid.dims() == 2 {
            k2 += self.wavenumbers[1][j].powi(2);
        }
        k2
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform including the `1/N` normalisation.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let s = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>]) {
        debug_assert_eq!(data.len(), self.grid.len());
        if self.grid.dims() == 1 {
            plans[0].process(data);
            return;
        }
        let (n0, n1) = (self.grid.points(0), self.grid.points(1));
        // rows are contiguous along axis 1
        plans[1].process(data);
        let mut column = vec![Complex64::default(); n0 * n1];
        for i in 0..n0 {
            for j in 0..n1 {
                column[j * n0 + i] = data[i * n1 + j];
            }
        }
        plans[0].process(&mut column);
        for i in 0..n0 {
            for j in 0..n1 {
                data[i * n1 + j] = column[j * n0 + i];
            }
        }
    }
}
