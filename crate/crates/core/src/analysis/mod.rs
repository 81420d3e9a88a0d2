//! Estimators built on the partition and replica layers.

pub mod checks;
pub mod free_energy;
pub mod moments;

pub use checks::{diagonal_tilt, tilted_annealed, zhom_negative_check, DiagonalOptions, DiagonalTilt, ZhomCheck};
pub use free_energy::{
    critical_point_bisect, free_energy_estimate, free_energy_profile, homogeneous_exponent_fit, smoothing_curve, CriticalPoint,
    ExponentFit, FreeEnergyProfile, SmoothingCurve,
};
pub use moments::{coarse_grain_constant, coarse_grain_rho, fractional_moment, n_beta_estimate, FracMomentTable, NBeta, RhoOptions, RhoSums};
