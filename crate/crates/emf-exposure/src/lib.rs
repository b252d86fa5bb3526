//! Human RF exposure simulator for cellular downlinks and uplinks.
//!
//! Computes incident power density (PD, W/m²) and surface specific absorption
//! rate (SAR, W/kg) for 5G / 4G / 3.9G system profiles, runs seeded Monte
//! Carlo distance sweeps with TDD time-averaging, and checks the results
//! against ICNIRP / FCC exposure limits, including a minimum-separation-
//! distance solver.
//!
//! Modules:
//! - [`profiles`]: system parameter sets (built-in NR 28 GHz, LTE 2 GHz,
//!   pre-LTE 1.9 GHz profiles) and validation.
//! - [`radio`]: EIRP composition, free-space and urban-macro LOS propagation.
//! - [`exposure`]: PD → SAR conversion, skin penetration depth, Fresnel
//!   reflection for lossy tissue.
//! - [`montecarlo`]: deterministic seeded sweep campaigns.
//! - [`compliance`]: limit registry, verdicts, min-safe-distance bisection.
//! - [`cli`]: run configuration, CSV export, orchestration for the binary.
//! - [`plot`]: standalone SVG exposure charts with guideline overlays.

pub mod cli;
pub mod compliance;
pub mod error;
pub mod exposure;
pub mod montecarlo;
pub mod plot;
pub mod profiles;
pub mod radio;

pub use error::Error;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, H/m.
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
