//! Static external potentials sampled on a grid.

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::field::RealField;
use crate::grid::Grid;
use crate::units::PhysicalConstants;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Free,
    /// `V = mω²|x|²/2`.
    Harmonic { omega: f64 },
    /// `V = height` where the axis-0 coordinate falls in any `[a, b)`.
    BoxBarrier { height: f64, intervals: Vec<[f64; 2]> },
    /// A wall of the given thickness centred at `wall_position` on axis 0,
    /// open where `|y − c| < w/2` for each slit centre `c` and width `w`.
    DoubleSlit { wall_position: f64, wall_thickness: f64, slit_centers: Vec<f64>, slit_widths: Vec<f64>, height: f64 },
    /// Raw values in flat grid order.
    Sampled { values: Vec<f64> },
}

impl PotentialSpec {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::Free => "free",
            PotentialSpec::Harmonic { .. } => "harmonic",
            PotentialSpec::BoxBarrier { .. } => "box-barrier",
            PotentialSpec::DoubleSlit { .. } => "double-slit",
            PotentialSpec::Sampled { .. } => "sampled",
        }
    }

    /// Checks parameters that do not depend on a grid.
    pub fn validate(&self, dims: usize) -> Result<()> {
        match self {
            PotentialSpec::Free => Ok(()),
            PotentialSpec::Harmonic { omega } => {
                if !(omega.is_finite() && *omega > 0.0) {
                    return config(format!("harmonic omega must be positive, got {omega}"));
                }
                Ok(())
            }
            PotentialSpec::BoxBarrier { height, intervals } => {
                if !height.is_finite() {
                    return config("box-barrier height must be finite");
                }
                if let Some([a, b]) = intervals.iter().find(|[a, b]| !(a < b)) {
                    return config(format!("box-barrier interval [{a}, {b}] is empty"));
                }
                Ok(())
            }
            PotentialSpec::DoubleSlit { wall_thickness, slit_centers, slit_widths, height, .. } => {
                if dims != 2 {
                    return config(format!("double-slit requires 2 dims, grid has {dims}"));
                }
                if slit_centers.len() != slit_widths.len() {
                    return config("double-slit needs one width per slit centre");
                }
                if !(*wall_thickness > 0.0) || slit_widths.iter().any(|w| !(*w > 0.0)) {
                    return config("double-slit wall thickness and slit widths must be positive");
                }
                if !height.is_finite() {
                    return config("double-slit height must be finite");
                }
                Ok(())
            }
            PotentialSpec::Sampled { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return config("sampled potential has non-finite values");
                }
                Ok(())
            }
        }
    }
}

/// A potential realised on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub spec: PotentialSpec,
    pub values: RealField,
}

impl Potential {
    pub fn free(grid: &Grid) -> Self {
        Self { spec: PotentialSpec::Free, values: RealField::zeros(*grid) }
    }

    pub fn grid(&self) -> &Grid {
        self.values.grid()
    }

    pub fn is_free(&self) -> bool {
        self.values.values().iter().all(|&v| v == 0.0)
    }
}

pub fn make_potential(spec: &PotentialSpec, grid: &Grid, constants: &PhysicalConstants) -> Result<Potential> {
    spec.validate(grid.dims())?;
    let values = match spec {
        PotentialSpec::Free => RealField::zeros(*grid),
        PotentialSpec::Harmonic { omega } => {
            let c = 0.5 * constants.mass * omega * omega;
            RealField::from_fn(*grid, |x, y| c * (x * x + y * y))
        }
        PotentialSpec::BoxBarrier { height, intervals } => {
            RealField::from_fn(
                *grid,
                |x, _| {
                    if intervals.iter().any(|&[a, b]| x >= a && x < b) {
                        *height
                    } else {
                        0.0
                    }
                },
            )
        }
        PotentialSpec::DoubleSlit { wall_position, wall_thickness, slit_centers, slit_widths, height } => {
            RealField::from_fn(*grid, |x, y| {
                let in_wall = (x - wall_position).abs() < 0.5 * wall_thickness;
                let in_slit = slit_centers.iter().zip(slit_widths).any(|(c, w)| (y - c).abs() < 0.5 * w);
                if in_wall && !in_slit {
                    *height
                } else {
                    0.0
                }
            })
        }
        PotentialSpec::Sampled { values } => {
            if values.len() != grid.len() {
                return config(format!(
                    "sampled potential has {} values, grid has {} points",
                    values.len(),
                    grid.len()
                ));
            }
            RealField::new(*grid, values.clone())?
        }
    };
    Ok(Potential { spec: spec.clone(), values })
}
