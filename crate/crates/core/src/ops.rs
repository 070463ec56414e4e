//! Differential and integral operators on periodic grids.
//!
//! Two derivative backends are available: Fourier-spectral (power-of-two
//! grids only) and second-order central differences.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::SpectralPlan;
use crate::field::{Field, FieldScalar, RealField, VectorField};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    #[default]
    Spectral,
    CentralDifference,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Spectral => "spectral",
            Backend::CentralDifference => "central-difference",
        }
    }
}

fn to_complex<T: FieldScalar>(values: &[T]) -> Vec<Complex64> {
    values.iter().map(|v| v.to_complex()).collect()
}

fn from_complex<T: FieldScalar>(values: Vec<Complex64>) -> Vec<T> {
    values.into_iter().map(T::from_complex).collect()
}

/// Periodic neighbour offsets along `axis` for flat index `k`.
fn neighbours(grid: &Grid, k: usize, axis: usize) -> (usize, usize) {
    let [i, j] = grid.unravel(k);
    if axis == 0 {
        let n = grid.points(0);
        (grid.index((i + 1) % n, j), grid.index((i + n - 1) % n, j))
    } else {
        let n = grid.points(1);
        (grid.index(i, (j + 1) % n), grid.index(i, (j + n - 1) % n))
    }
}

fn cd_partial<T: FieldScalar>(grid: &Grid, values: &[T], axis: usize) -> Vec<T> {
    let inv = 0.5 / grid.spacing(axis);
    (0..grid.len())
        .map(|k| {
            let (up, down) = neighbours(grid, k, axis);
            values[up].sub(values[down]).scale(inv)
        })
        .collect()
}

fn cd_second<T: FieldScalar>(grid: &Grid, values: &[T], axis: usize) -> Vec<T> {
    let inv = 1.0 / grid.spacing(axis).powi(2);
    (0..grid.len())
        .map(|k| {
            let (up, down) = neighbours(grid, k, axis);
            values[up].add(values[down]).sub(values[k].scale(2.0)).scale(inv)
        })
        .collect()
}

fn check_axis(grid: &Grid, axis: usize) -> Result<()> {
    if axis >= grid.dims() {
        return Err(Error::Config(format!("axis {axis} out of range for a {}D grid", grid.dims())));
    }
    Ok(())
}

/// Spectral partials along every axis from a single forward transform.
fn spectral_partials(plan: &SpectralPlan, values: Vec<Complex64>) -> Vec<Vec<Complex64>> {
    let grid = *plan.grid();
    let mut hat = values;
    plan.forward(&mut hat);
    (0..grid.dims())
        .map(|axis| {
            let mut d = hat.clone();
            for (k, z) in d.iter_mut().enumerate() {
                let idx = grid.unravel(k)[axis];
                *z *= Complex64::new(0.0, plan.derivative_wavenumber(axis, idx));
            }
            plan.inverse(&mut d);
            d
        })
        .collect()
}

/// Partial derivative along one axis.
pub fn partial<T: FieldScalar>(f: &Field<T>, axis: usize, backend: Backend) -> Result<Field<T>> {
    let grid = *f.grid();
    check_axis(&grid, axis)?;
    let values = match backend {
        Backend::CentralDifference => cd_partial(&grid, f.values(), axis),
        Backend::Spectral => {
            let plan = SpectralPlan::for_grid(&grid)?;
            let mut parts = spectral_partials(&plan, to_complex(f.values()));
            from_complex(parts.swap_remove(axis))
        }
    };
    Field::new(grid, values)
}

pub fn gradient<T: FieldScalar>(f: &Field<T>, backend: Backend) -> Result<VectorField<T>> {
    let grid = *f.grid();
    let components = match backend {
        Backend::CentralDifference => (0..grid.dims()).map(|a| cd_partial(&grid, f.values(), a)).collect(),
        Backend::Spectral => {
            let plan = SpectralPlan::for_grid(&grid)?;
            spectral_partials(&plan, to_complex(f.values())).into_iter().map(from_complex).collect()
        }
    };
    VectorField::new(grid, components)
}

pub fn laplacian<T: FieldScalar>(f: &Field<T>, backend: Backend) -> Result<Field<T>> {
    let grid = *f.grid();
    let values = match backend {
        Backend::CentralDifference => {
            let mut acc = cd_second(&grid, f.values(), 0);
            if grid.dims() == 2 {
                for (a, b) in acc.iter_mut().zip(cd_second(&grid, f.values(), 1)) {
                    *a = a.add(b);
                }
            }
            acc
        }
        Backend::Spectral => {
            let plan = SpectralPlan::for_grid(&grid)?;
            let mut hat = to_complex(f.values());
            plan.forward(&mut hat);
            for (k, z) in hat.iter_mut().enumerate() {
                *z *= -plan.k_squared(k);
            }
            plan.inverse(&mut hat);
            from_complex(hat)
        }
    };
    Field::new(grid, values)
}

pub fn divergence<T: FieldScalar>(v: &VectorField<T>, backend: Backend) -> Result<Field<T>> {
    let grid = *v.grid();
    let mut acc = vec![T::default(); grid.len()];
    for axis in 0..grid.dims() {
        let comp = Field::new(grid, v.component(axis).to_vec())?;
        let d = partial(&comp, axis, backend)?;
        for (a, b) in acc.iter_mut().zip(d.values()) {
            *a = a.add(*b);
        }
    }
    Field::new(grid, acc)
}

/// Pairwise (cascade) summation; fixed order, so results do not depend on
/// how a caller might split work.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Riemann sum `Σ f_j · dV`.
pub fn integrate(f: &RealField) -> f64 {
    integrate_values(f.grid(), f.values())
}

pub fn integrate_values(grid: &Grid, values: &[f64]) -> f64 {
    pairwise_sum(values) * grid.cell_volume()
}

/// Integral of `f(k)` over grid points, without allocating a field.
pub fn integrate_with(grid: &Grid, f: impl Fn(usize) -> f64) -> f64 {
    let values: Vec<f64> = (0..grid.len()).map(f).collect();
    integrate_values(grid, &values)
}
