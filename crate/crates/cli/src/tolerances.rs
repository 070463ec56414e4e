//! Pass/fail thresholds and the named profiles that scale them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    Default,
    /// Every residual threshold divided by ten.
    Strict,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Default => "default",
            Profile::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Largest `|‖ψ(t)‖² − ‖ψ(0)‖²|`.
    pub norm_drift: f64,
    /// Largest `|E(t) − E(0)|/|E(0)|`.
    pub energy_drift: f64,
    pub identity_residual: f64,
    pub cross_term: f64,
    /// `L∞` continuity residual.
    pub continuity: f64,
    /// `L∞` fluctuation-balance residual.
    pub fluctuation: f64,
    /// Pointwise fluctuation vs continuity/P agreement.
    pub fluctuation_agreement: f64,
    /// Relative action difference.
    pub action: f64,
    /// Largest per-snapshot `L2` Schrödinger residual.
    pub schroedinger: f64,
    pub order_min: f64,
    pub order_max: f64,
    pub walker_tv: f64,
    /// Relative difference between walker and `|ψ|²` variances.
    pub walker_variance: f64,
    /// Terminal error that must be exceeded on the coarse clock branch.
    pub breakdown_error: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm_drift: 1e-6,
            energy_drift: 1e-6,
            identity_residual: 1e-8,
            cross_term: 1e-8,
            continuity: 1e-8,
            fluctuation: 1e-4,
            fluctuation_agreement: 1e-10,
            action: 1e-8,
            schroedinger: 1e-6,
            order_min: 1.9,
            order_max: 2.1,
            walker_tv: 0.03,
            walker_variance: 0.03,
            breakdown_error: 0.1,
        }
    }
}

/// Per-scenario replacements for individual thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_term: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fluctuation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fluctuation_agreement: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schroedinger: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walker_tv: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walker_variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakdown_error: Option<f64>,
}

impl ToleranceOverrides {
    pub const KEYS: &'static [&'static str] = &[
        "norm_drift",
        "energy_drift",
        "identity_residual",
        "cross_term",
        "continuity",
        "fluctuation",
        "fluctuation_agreement",
        "action",
        "schroedinger",
        "order_min",
        "order_max",
        "walker_tv",
        "walker_variance",
        "breakdown_error",
    ];
}

impl Tolerances {
    /// Overrides replace the built-in values; the profile then scales the
    /// residual thresholds. Order bounds and the breakdown level are kept.
    pub fn resolve(profile: Profile, o: &ToleranceOverrides) -> Self {
        let d = Self::default();
        let s = match profile {
            Profile::Default => 1.0,
            Profile::Strict => 0.1,
        };
        Self {
            norm_drift: s * o.norm_drift.unwrap_or(d.norm_drift),
            energy_drift: s * o.energy_drift.unwrap_or(d.energy_drift),
            identity_residual: s * o.identity_residual.unwrap_or(d.identity_residual),
            cross_term: s * o.cross_term.unwrap_or(d.cross_term),
            continuity: s * o.continuity.unwrap_or(d.continuity),
            fluctuation: s * o.fluctuation.unwrap_or(d.fluctuation),
            fluctuation_agreement: s * o.fluctuation_agreement.unwrap_or(d.fluctuation_agreement),
            action: s * o.action.unwrap_or(d.action),
            schroedinger: s * o.schroedinger.unwrap_or(d.schroedinger),
            order_min: o.order_min.unwrap_or(d.order_min),
            order_max: o.order_max.unwrap_or(d.order_max),
            walker_tv: s * o.walker_tv.unwrap_or(d.walker_tv),
            walker_variance: s * o.walker_variance.unwrap_or(d.walker_variance),
            breakdown_error: o.breakdown_error.unwrap_or(d.breakdown_error),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_scales_residuals_only() {
        let o = ToleranceOverrides { continuity: Some(1e-5), ..Default::default() };
        let t = Tolerances::resolve(Profile::Strict, &o);
        assert!((t.continuity - 1e-6).abs() < 1e-20);
        assert_eq!(t.order_min, 1.9);
        assert_eq!(Tolerances::resolve(Profile::Default, &o).continuity, 1e-5);
    }
}
