//! Nelson walker ensembles driven by the forward drift `b = v + u`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::field::{RealField, VectorField};
use crate::grid::Grid;
use crate::madelung::{HydroOptions, LogDerivatives, Wavefunction};

use super::rng;

/// Step index reserved for initial sampling; never reached by stepping.
const INIT_STREAM: u64 = u64::MAX;

/// Forward drift `b = ∇S/m + (ħ/2m)∇P/P` on the grid, `NaN` at nodes.
#[derive(Debug, Clone)]
pub struct DriftField {
    grid: Grid,
    components: [Vec<f64>; 2],
    masked_fraction: f64,
}

impl DriftField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn masked_fraction(&self) -> f64 {
        self.masked_fraction
    }

    pub fn to_vector_field(&self) -> VectorField<f64> {
        VectorField::new(self.grid, self.components[..self.grid.dims()].to_vec())
            .expect("drift components match the grid")
    }

    /// Zero drift everywhere.
    pub fn zero(grid: &Grid) -> Self {
        Self { grid: *grid, components: [vec![0.0; grid.len()], vec![0.0; grid.len()]], masked_fraction: 0.0 }
    }

    /// Periodic (bi)linear interpolation; `None` if any stencil point is a node.
    #[inline]
    pub fn interpolate(&self, x: [f64; 2]) -> Option<[f64; 2]> {
        let g = &self.grid;
        let mut base = [0usize; 2];
        let mut next = [0usize; 2];
        let mut t = [0.0; 2];
        for axis in 0..g.dims() {
            let n = g.points(axis);
            let f = (x[axis] + 0.5 * g.extent(axis)) / g.spacing(axis);
            let fl = f.floor();
            t[axis] = f - fl;
            base[axis] = (fl as i64).rem_euclid(n as i64) as usize;
            next[axis] = (base[axis] + 1) % n;
        }
        let mut out = [0.0; 2];
        if g.dims() == 1 {
            let (a, b) = (base[0], next[0]);
            let c = &self.components[0];
            out[0] = (1.0 - t[0]) * c[a] + t[0] * c[b];
        } else {
            let corners = [
                (g.index(base[0], base[1]), (1.0 - t[0]) * (1.0 - t[1])),
                (g.index(next[0], base[1]), t[0] * (1.0 - t[1])),
                (g.index(base[0], next[1]), (1.0 - t[0]) * t[1]),
                (g.index(next[0], next[1]), t[0] * t[1]),
            ];
            for axis in 0..2 {
                let c = &self.components[axis];
                out[axis] = corners.iter().map(|&(k, w)| w * c[k]).sum();
            }
        }
        if out[0].is_nan() || out[1].is_nan() {
            None
        } else {
            Some(out)
        }
    }
}

pub fn drift_field(wf: &Wavefunction, opts: &HydroOptions) -> Result<DriftField> {
    let logd = LogDerivatives::compute(wf, opts.backend, opts.nodes.epsilon)?;
    opts.nodes.check(logd.masked_fraction())?;
    let c = wf.constants().hbar / wf.constants().mass;
    let grid = *wf.grid();
    let mut components = [Vec::new(), vec![0.0; grid.len()]];
    for (axis, w) in logd.gradient.iter().enumerate() {
        components[axis] = w.iter().map(|z| c * (z.im + z.re)).collect();
    }
    Ok(DriftField { grid, components, masked_fraction: logd.masked_fraction() })
}

/// Walker positions and the stream state needed to continue them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub dims: usize,
    /// One entry per walker; the second coordinate is 0 in 1D.
    pub positions: Vec<[f64; 2]>,
    pub master_seed: u64,
    pub time: f64,
    pub step_index: u64,
    /// Walker-steps taken without drift because the walker sat on a node.
    pub node_fallbacks: u64,
}

impl Ensemble {
    pub fn n_walkers(&self) -> usize {
        self.positions.len()
    }

    pub fn coordinates(&self, axis: usize) -> Vec<f64> {
        self.positions.iter().map(|p| p[axis]).collect()
    }
}

/// Draws `n` walkers i.i.d. from the density `P`, treated as constant on
/// each grid cell `[x_j − dx/2, x_j + dx/2)`. In 2D the cell is chosen by
/// inverse CDF over the flattened grid.
pub fn init_ensemble(density: &RealField, n: usize, master_seed: u64, time: f64) -> Result<Ensemble> {
    if n == 0 {
        return config("an ensemble needs at least one walker");
    }
    let grid = *density.grid();
    let p = density.values();
    if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return config("walker density must be finite and non-negative");
    }
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &v in p {
        acc += v;
        cdf.push(acc);
    }
    if !(acc > 0.0 && acc.is_finite()) {
        return config("walker density is not normalisable");
    }
    let positions = (0..n as u64)
        .into_par_iter()
        .map(|w| {
            let [u_cell, u_x] = rng::uniforms(master_seed, w, INIT_STREAM);
            let target = u_cell * acc;
            let mut k = cdf.partition_point(|&c| c <= target).min(p.len() - 1);
            // never land on a zero-mass cell through rounding
            while p[k] == 0.0 && k > 0 {
                k -= 1;
            }
            let mut pos = grid.position(k);
            pos[0] = grid.wrap(0, pos[0] + (u_x - 0.5) * grid.spacing(0));
            if grid.dims() == 2 {
                let [u_y, _] = rng::uniforms(master_seed, w, INIT_STREAM - 1);
                pos[1] = grid.wrap(1, pos[1] + (u_y - 0.5) * grid.spacing(1));
            }
            pos
        })
        .collect();
    Ok(Ensemble { dims: grid.dims(), positions, master_seed, time, step_index: 0, node_fallbacks: 0 })
}

/// One Euler–Maruyama step `x ← x + b(x)dt + √(ħdt/m)·ξ` with periodic
/// wrapping. Walkers whose interpolation stencil touches a node take a
/// diffusion-only step. Returns the number of such walkers.
pub fn step_ensemble(ens: &mut Ensemble, drift: &DriftField, dt: f64, hbar: f64, mass: f64) -> Result<u64> {
    let grid = *drift.grid();
    if grid.dims() != ens.dims {
        return config("ensemble and drift field dimensions differ");
    }
    if !(dt >= 0.0 && dt.is_finite()) {
        return config(format!("walker time step must be non-negative, got {dt}"));
    }
    if dt == 0.0 {
        ens.step_index += 1;
        return Ok(0);
    }
    let sigma = (hbar * dt / mass).sqrt();
    let seed = ens.master_seed;
    let step = ens.step_index;
    let dims = grid.dims();
    let fallbacks: u64 = ens
        .positions
        .par_iter_mut()
        .enumerate()
        .map(|(w, x)| {
            let xi = rng::normals(seed, w as u64, step);
            let (b, fell_back) = match drift.interpolate(*x) {
                Some(b) => (b, 0),
                None => ([0.0; 2], 1),
            };
            for axis in 0..dims {
                let moved = x[axis] + b[axis] * dt + sigma * xi[axis];
                let half = 0.5 * grid.extent(axis);
                x[axis] = if (-half..half).contains(&moved) { moved } else { grid.wrap(axis, moved) };
            }
            fell_back
        })
        .sum();
    ens.step_index += 1;
    ens.time += dt;
    ens.node_fallbacks += fallbacks;
    Ok(fallbacks)
}

/// How walker positions are binned for [`compare_histogram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// `bins` per axis over the whole grid.
    Full,
    /// `bins` along one axis, summing over the others.
    Marginal(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramReport {
    pub bins: usize,
    pub n_walkers: usize,
    pub total_variation: f64,
    pub chi_squared: f64,
    /// Bins with positive expected mass.
    pub degrees_of_freedom: usize,
    /// Walker count landing in bins with zero expected mass.
    pub unexpected: u64,
    pub counts: Vec<u64>,
    pub expected: Vec<f64>,
}

/// Spreads a cell `[c − h/2, c + h/2)` over `out.len()` equal periodic bins
/// of `[−L/2, L/2)` in proportion to overlap.
fn spread_cell(out: &mut [f64], centre: f64, h: f64, l: f64) {
    let bins = out.len();
    let width = l / bins as f64;
    let lo = (centre - 0.5 * h + 0.5 * l) / width;
    let hi = (centre + 0.5 * h + 0.5 * l) / width;
    let mut b = lo.floor();
    while b < hi {
        let overlap = hi.min(b + 1.0) - lo.max(b);
        if overlap > 0.0 {
            out[(b as i64).rem_euclid(bins as i64) as usize] += overlap * width / h;
        }
        b += 1.0;
    }
}

fn bin_index(x: f64, l: f64, bins: usize) -> usize {
    let s = (x + 0.5 * l).rem_euclid(l);
    ((s / l * bins as f64).floor() as usize).min(bins - 1)
}

/// Compares the walker histogram with `P` integrated over the same bins.
pub fn compare_histogram(
    ens: &Ensemble,
    density: &RealField,
    bins: usize,
    binning: Binning,
) -> Result<HistogramReport> {
    if bins < 16 {
        return config(format!("histograms need at least 16 bins, got {bins}"));
    }
    let grid = *density.grid();
    if grid.dims() != ens.dims {
        return config("ensemble and density dimensions differ");
    }
    let axes: Vec<usize> = match binning {
        Binning::Full => (0..grid.dims()).collect(),
        Binning::Marginal(a) if a < grid.dims() => vec![a],
        Binning::Marginal(a) => return config(format!("marginal axis {a} out of range")),
    };
    let total_bins = bins.pow(axes.len() as u32);

    let mut expected = vec![0.0; total_bins];
    let p = density.values();
    for (k, &pk) in p.iter().enumerate() {
        if pk == 0.0 {
            continue;
        }
        let pos = grid.position(k);
        let mut per_axis: Vec<Vec<f64>> = Vec::new();
        for &a in &axes {
            let mut w = vec![0.0; bins];
            spread_cell(&mut w, pos[a], grid.spacing(a), grid.extent(a));
            per_axis.push(w);
        }
        if per_axis.len() == 1 {
            for (b, w) in per_axis[0].iter().enumerate() {
                expected[b] += pk * w;
            }
        } else {
            for (b0, w0) in per_axis[0].iter().enumerate().filter(|(_, w)| **w > 0.0) {
                for (b1, w1) in per_axis[1].iter().enumerate().filter(|(_, w)| **w > 0.0) {
                    expected[b0 * bins + b1] += pk * w0 * w1;
                }
            }
        }
    }
    let mass: f64 = expected.iter().sum();
    if !(mass > 0.0) {
        return config("reference density has no mass");
    }
    expected.iter_mut().for_each(|e| *e /= mass);

    let mut counts = vec![0u64; total_bins];
    for x in &ens.positions {
        let mut flat = 0;
        for &a in &axes {
            flat = flat * bins + bin_index(x[a], grid.extent(a), bins);
        }
        counts[flat] += 1;
    }
    let n = ens.n_walkers() as f64;
    let mut tv = 0.0;
    let mut chi2 = 0.0;
    let mut dof = 0;
    let mut unexpected = 0;
    for (&c, &e) in counts.iter().zip(&expected) {
        tv += (c as f64 / n - e).abs();
        if e > 0.0 {
            chi2 += (c as f64 - n * e).powi(2) / (n * e);
            dof += 1;
        } else {
            unexpected += c;
        }
    }
    Ok(HistogramReport {
        bins,
        n_walkers: ens.n_walkers(),
        total_variation: 0.5 * tv,
        chi_squared: chi2,
        degrees_of_freedom: dof,
        unexpected,
        counts,
        expected,
    })
}
