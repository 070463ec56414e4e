#![allow(dead_code)]

use fluidclock_core::potential::{make_potential, Potential, PotentialSpec};
use fluidclock_core::{build_grid, Complex64, Grid, GridSpec, PhysicalConstants, Wavefunction};

pub fn grid1(extent: f64, points: usize) -> Grid {
    build_grid(&GridSpec::new_1d(extent, points), true).unwrap()
}

pub fn units() -> PhysicalConstants {
    PhysicalConstants::default()
}

pub fn harmonic(grid: &Grid, omega: f64) -> Potential {
    make_potential(&PotentialSpec::Harmonic { omega }, grid, &units()).unwrap()
}

/// `(∫|a − b|²)^{1/2}`.
pub fn l2_distance(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (s * grid.cell_volume()).sqrt()
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().filter(|v| !v.is_nan()).fold(0.0, |a, b| a.max(b.abs()))
}

/// Least-squares log-log slope, written out independently of the library.
pub fn slope(h: &[f64], e: &[f64]) -> f64 {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let num: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

/// Lowest eigenvector of the periodic central-difference Hamiltonian,
/// normalised on the grid.
pub fn discrete_ground_state(grid: &Grid, v: &[f64], c: &PhysicalConstants) -> Wavefunction {
    let n = grid.points(0);
    let dx = grid.spacing(0);
    let t = c.hbar * c.hbar / (2.0 * c.mass * dx * dx);
    let h = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * t + v[i]
        } else if (i + 1) % n == j || (j + 1) % n == i {
            -t
        } else {
            0.0
        }
    });
    let eig = nalgebra::SymmetricEigen::new(h);
    let (imin, _) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let col = eig.eigenvectors.column(imin);
    let values: Vec<Complex64> = col.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let psi = fluidclock_core::ComplexField::new(*grid, values).unwrap();
    Wavefunction::normalized(psi, *c, 0.0).unwrap()
}
