use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::Potential;
use crate::units::PhysicalConstants;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Prefactored solve of `(1 + iHτ/2ħ)x = (1 − iHτ/2ħ)y` along one periodic
/// line, with `H = −(ħ²/2m)∂² + V` discretised by central differences.
/// The cyclic system is reduced to a plain tridiagonal one by the
/// Sherman–Morrison correction.
struct LineSolver {
    /// Diagonal of `1 − iHτ/2ħ`.
    rhs_diag: Vec<Complex64>,
    /// Off-diagonal of `1 + iHτ/2ħ`; the right-hand side uses `−off`.
    off: Complex64,
    gamma: Complex64,
    /// Thomas-sweep coefficients for the modified matrix.
    cprime: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    /// Solution of the modified system for the correction vector.
    z: Vec<Complex64>,
    /// `1 + z₀ + β z_{n−1}/γ`.
    corr_den: Complex64,
}

impl LineSolver {
    fn new(v: &[f64], dx: f64, tau: f64, constants: &PhysicalConstants) -> Result<Self> {
        let PhysicalConstants { hbar, mass } = *constants;
        let n = v.len();
        let kin = hbar * hbar / (mass * dx * dx);
        let c = I * (tau / (2.0 * hbar));
        let off = c * (-0.5 * kin);
        let lhs_diag: Vec<Complex64> = v.iter().map(|&vk| 1.0 + c * (kin + vk)).collect();
        let rhs_diag = v.iter().map(|&vk| 1.0 - c * (kin + vk)).collect();

        let gamma = -lhs_diag[0];
        let mut diag = lhs_diag;
        diag[0] -= gamma;
        diag[n - 1] -= off * off / gamma;

        let mut cprime = vec![Complex64::default(); n];
        let mut inv_pivot = vec![Complex64::default(); n];
        let mut pivot = diag[0];
        for k in 0..n {
            if k > 0 {
                pivot = diag[k] - off * cprime[k - 1];
            }
            if !(pivot.norm() > 1e-300) {
                return Err(Error::Numerical(format!("Crank–Nicolson pivot vanished at row {k}")));
            }
            inv_pivot[k] = 1.0 / pivot;
            cprime[k] = off * inv_pivot[k];
        }
        let mut solver = Self {
            rhs_diag,
            off,
            gamma,
            cprime,
            inv_pivot,
            z: vec![Complex64::default(); n],
            corr_den: Complex64::default(),
        };
        let mut u = vec![Complex64::default(); n];
        u[0] = gamma;
        u[n - 1] = off;
        solver.thomas(&mut u);
        solver.corr_den = 1.0 + u[0] + off * u[n - 1] / gamma;
        if !(solver.corr_den.norm() > 1e-300) {
            return Err(Error::Numerical("Crank–Nicolson cyclic correction is singular".into()));
        }
        solver.z = u;
        Ok(solver)
    }

    fn thomas(&self, r: &mut [Complex64]) {
        let n = r.len();
        r[0] *= self.inv_pivot[0];
        for k in 1..n {
            r[k] = (r[k] - self.off * r[k - 1]) * self.inv_pivot[k];
        }
        for k in (0..n - 1).rev() {
            let next = r[k + 1];
            r[k] -= self.cprime[k] * next;
        }
    }

    /// Advances one line in place; `line` is scratch of the line length.
    fn apply(&self, line: &mut [Complex64], scratch: &mut [Complex64]) {
        let n = line.len();
        for k in 0..n {
            let up = line[(k + 1) % n];
            let down = line[(k + n - 1) % n];
            scratch[k] = self.rhs_diag[k] * line[k] - self.off * (up + down);
        }
        self.thomas(scratch);
        let factor = (scratch[0] + self.off * scratch[n - 1] / self.gamma) / self.corr_den;
        for k in 0..n {
            line[k] = scratch[k] - factor * self.z[k];
        }
    }
}

/// One sweep direction: a solver per grid line along `axis`.
struct Sweep {
    axis: usize,
    lines: Vec<LineSolver>,
}

impl Sweep {
    fn new(grid: &Grid, v: &[f64], axis: usize, fraction: f64, tau: f64, c: &PhysicalConstants) -> Result<Self> {
        let (n_along, n_across) = line_shape(grid, axis);
        let lines = (0..n_across)
            .map(|m| {
                let vl: Vec<f64> = (0..n_along).map(|k| fraction * v[line_index(grid, axis, m, k)]).collect();
                LineSolver::new(&vl, grid.spacing(axis), tau, c)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axis, lines })
    }

    fn apply(&self, grid: &Grid, psi: &mut [Complex64]) {
        let (n_along, _) = line_shape(grid, self.axis);
        let mut line = vec![Complex64::default(); n_along];
        let mut scratch = vec![Complex64::default(); n_along];
        for (m, solver) in self.lines.iter().enumerate() {
            for k in 0..n_along {
                line[k] = psi[line_index(grid, self.axis, m, k)];
            }
            solver.apply(&mut line, &mut scratch);
            for k in 0..n_along {
                psi[line_index(grid, self.axis, m, k)] = line[k];
            }
        }
    }
}

fn line_shape(grid: &Grid, axis: usize) -> (usize, usize) {
    if grid.dims() == 1 {
        (grid.points(0), 1)
    } else if axis == 0 {
        (grid.points(0), grid.points(1))
    } else {
        (grid.points(1), grid.points(0))
    }
}

fn line_index(grid: &Grid, axis: usize, across: usize, along: usize) -> usize {
    if axis == 0 {
        grid.index(along, across)
    } else {
        grid.index(across, along)
    }
}

/// Crank–Nicolson with central-difference kinetic energy. In 2D the step is
/// the symmetric direction splitting `Cx(dt/2)·Cy(dt)·Cx(dt/2)`, each
/// direction carrying half the potential.
pub(crate) struct CrankNicolson {
    grid: Grid,
    sweeps: Vec<Sweep>,
}

impl CrankNicolson {
    pub fn new(potential: &Potential, constants: &PhysicalConstants, dt: f64) -> Result<Self> {
        let grid = *potential.grid();
        let v = potential.values.values();
        let sweeps = if grid.dims() == 1 {
            vec![Sweep::new(&grid, v, 0, 1.0, dt, constants)?]
        } else {
            let outer = Sweep::new(&grid, v, 0, 0.5, 0.5 * dt, constants)?;
            let inner = Sweep::new(&grid, v, 1, 0.5, dt, constants)?;
            let outer_again = Sweep::new(&grid, v, 0, 0.5, 0.5 * dt, constants)?;
            vec![outer, inner, outer_again]
        };
        Ok(Self { grid, sweeps })
    }

    pub fn step(&self, psi: &mut [Complex64]) -> Result<()> {
        for sweep in &self.sweeps {
            sweep.apply(&self.grid, psi);
        }
        if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numerical("Crank–Nicolson solve produced non-finite values".into()));
        }
        Ok(())
    }
}
