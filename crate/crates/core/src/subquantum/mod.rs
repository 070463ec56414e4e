//! The sub-quantum particle picture: clock frequencies, Nelson walker
//! ensembles, and the coarse-time study.

pub mod clock;
pub mod ensemble;
pub mod rng;
pub mod study;

pub use clock::{characteristic_frequency, light_clock_frequency, FluidClock, LightClock};
pub use ensemble::{
    compare_histogram, drift_field, init_ensemble, step_ensemble, Binning, DriftField, Ensemble, HistogramReport,
};
pub use study::{clock_ladder, coarse_time_study, CoarseTimeConfig, StudyReport, StudyRow, StudyWalkers};
