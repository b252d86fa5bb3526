//! Power density to specific absorption rate conversion, skin penetration
//! depth in a lossy dielectric, and Fresnel reflection at the air-skin
//! interface.
//!
//! Surface SAR follows SAR = 2·PD·(1 − R²)/(δ·ρ) with R the reflection
//! coefficient, δ the skin penetration depth, and ρ the tissue mass density.
//! Absorbed power decays with depth as e^(−2z/δ).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{VACUUM_PERMEABILITY, VACUUM_PERMITTIVITY};

/// One row of a measured skin dielectric table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DielectricPoint {
    pub frequency_hz: f64,
    pub eps_r: f64,
    pub sigma_s_per_m: f64,
}

/// Skin absorption parameters.
///
/// Defaults use δ = 10⁻³ m and ρ = 1 g/cm³ (= 1000 kg/m³). The reflection
/// coefficient has no canonical value; the 0.6 default is explicit
/// configuration, and [`reflection_coefficient`] derives R from dielectric
/// data when available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TissueModel {
    pub reflection_coefficient: f64,
    pub penetration_depth_m: f64,
    pub mass_density_kg_m3: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dielectric_table: Option<Vec<DielectricPoint>>,
}

/// Conversion factor from g/cm³ to kg/m³.
pub const G_PER_CM3_TO_KG_PER_M3: f64 = 1000.0;

impl Default for TissueModel {
    fn default() -> Self {
        TissueModel {
            reflection_coefficient: 0.6,
            penetration_depth_m: 1e-3,
            mass_density_kg_m3: 1.0 * G_PER_CM3_TO_KG_PER_M3,
            dielectric_table: None,
        }
    }
}

impl TissueModel {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.reflection_coefficient) {
            return Err(Error::InvalidSpec(format!(
                "reflection coefficient {} outside [0, 1]",
                self.reflection_coefficient
            )));
        }
        if !(self.penetration_depth_m > 0.0) {
            return Err(Error::InvalidSpec("penetration depth must be > 0".into()));
        }
        if !(self.mass_density_kg_m3 > 0.0) {
            return Err(Error::InvalidSpec("mass density must be > 0".into()));
        }
        if let Some(table) = &self.dielectric_table {
            for pair in table.windows(2) {
                if pair[1].frequency_hz <= pair[0].frequency_hz {
                    return Err(Error::InvalidSpec(
                        "dielectric table must be sorted by frequency".into(),
                    ));
                }
            }
            for row in table {
                if !(row.eps_r > 0.0) || row.sigma_s_per_m < 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "bad dielectric row at {} Hz",
                        row.frequency_hz
                    )));
                }
            }
        }
        Ok(())
    }

    /// Linear interpolation in the dielectric table, clamped at the ends.
    pub fn dielectric_at(&self, f_hz: f64) -> Option<DielectricPoint> {
        let table = self.dielectric_table.as_deref()?;
        let first = table.first()?;
        if f_hz <= first.frequency_hz {
            return Some(DielectricPoint {
                frequency_hz: f_hz,
                ..*first
            });
        }
        let last = table.last()?;
        if f_hz >= last.frequency_hz {
            return Some(DielectricPoint {
                frequency_hz: f_hz,
                ..*last
            });
        }
        let idx = table.partition_point(|row| row.frequency_hz < f_hz);
        let (lo, hi) = (&table[idx - 1], &table[idx]);
        let t = (f_hz - lo.frequency_hz) / (hi.frequency_hz - lo.frequency_hz);
        Some(DielectricPoint {
            frequency_hz: f_hz,
            eps_r: lo.eps_r + t * (hi.eps_r - lo.eps_r),
            sigma_s_per_m: lo.sigma_s_per_m + t * (hi.sigma_s_per_m - lo.sigma_s_per_m),
        })
    }
}

/// Exposure at one distance: incident power density plus the absorbed-rate
/// figure when a tissue model was applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExposureSample {
    pub distance_m: f64,
    pub pd_w_m2: f64,
    pub sar_w_kg: Option<f64>,
    pub near_field: bool,
    pub time_averaged: bool,
}

/// Surface SAR from incident power density: 2·pd·(1 − R²)/(δ·ρ).
pub fn sar_from_pd(pd_w_m2: f64, tissue: &TissueModel) -> f64 {
    let r = tissue.reflection_coefficient;
    pd_w_m2 * (2.0 * (1.0 - r * r) / (tissue.penetration_depth_m * tissue.mass_density_kg_m3))
}

/// Field penetration depth δ = 1/α in a lossy dielectric,
/// α = ω·sqrt(μ₀ε/2)·sqrt(sqrt(1 + (σ/ωε)²) − 1). Lossless media (σ = 0)
/// give infinite depth.
pub fn penetration_depth(f_hz: f64, eps_r: f64, sigma_s_per_m: f64) -> Result<f64> {
    if !(f_hz > 0.0) {
        return Err(Error::NonPositiveFrequency(f_hz));
    }
    if sigma_s_per_m == 0.0 {
        return Ok(f64::INFINITY);
    }
    let omega = 2.0 * std::f64::consts::PI * f_hz;
    let eps = VACUUM_PERMITTIVITY * eps_r;
    let loss_tangent = sigma_s_per_m / (omega * eps);
    let alpha = omega
        * (VACUUM_PERMEABILITY * eps / 2.0).sqrt()
        * ((1.0 + loss_tangent * loss_tangent).sqrt() - 1.0).sqrt();
    Ok(1.0 / alpha)
}

/// |Γ| for normal incidence from free space onto the lossy half-space with
/// complex relative permittivity ε_r − jσ/(ωε₀).
pub fn reflection_coefficient(eps_r: f64, sigma_s_per_m: f64, f_hz: f64) -> Result<f64> {
    if !(f_hz > 0.0) {
        return Err(Error::NonPositiveFrequency(f_hz));
    }
    let omega = 2.0 * std::f64::consts::PI * f_hz;
    let eps_c = Complex64::new(eps_r, -sigma_s_per_m / (omega * VACUUM_PERMITTIVITY));
    let index = eps_c.sqrt();
    let gamma = (Complex64::new(1.0, 0.0) - index) / (Complex64::new(1.0, 0.0) + index);
    Ok(gamma.norm().min(1.0))
}

/// SAR depth profile: SAR(z) = SAR(0)·e^(−2z/δ), sampled at `steps + 1`
/// evenly spaced depths in [0, max_depth].
pub fn sar_depth_profile(
    surface_sar: f64,
    penetration_depth_m: f64,
    max_depth_m: f64,
    steps: usize,
) -> Vec<(f64, f64)> {
    (0..=steps)
        .map(|i| {
            let z = max_depth_m * i as f64 / steps as f64;
            (z, surface_sar * (-2.0 * z / penetration_depth_m).exp())
        })
        .collect()
}

/// Reads a dielectric table CSV with header `frequency_hz,eps_r,sigma_s_per_m`.
pub fn load_dielectric_table(path: &std::path::Path) -> Result<Vec<DielectricPoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io("reading", path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == "frequency_hz,eps_r,sigma_s_per_m" => {}
        other => {
            return Err(Error::parse(
                path,
                format!(
                    "expected header `frequency_hz,eps_r,sigma_s_per_m`, got {:?}",
                    other.unwrap_or("")
                ),
            ))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, format!("line {}: expected 3 fields", lineno + 2)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::parse(path, format!("line {}: bad number `{s}`", lineno + 2)))
        };
        rows.push(DielectricPoint {
            frequency_hz: parse(fields[0])?,
            eps_r: parse(fields[1])?,
            sigma_s_per_m: parse(fields[2])?,
        });
    }
    let model = TissueModel {
        dielectric_table: Some(rows.clone()),
        ..TissueModel::default()
    };
    model.validate()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn paper_constants_give_20_w_per_kg() {
        let tissue = TissueModel {
            reflection_coefficient: 0.0,
            ..TissueModel::default()
        };
        assert_eq!(sar_from_pd(10.0, &tissue), 20.0);
    }

    #[test]
    fn total_reflection_absorbs_nothing() {
        let tissue = TissueModel {
            reflection_coefficient: 1.0,
            ..TissueModel::default()
        };
        assert_eq!(sar_from_pd(123.4, &tissue), 0.0);
    }

    #[test]
    fn hand_arithmetic_case() {
        let tissue = TissueModel::default(); // R = 0.6
        assert!(rel_err(sar_from_pd(1.0, &tissue), 1.28) < 1e-12);
    }

    #[test]
    fn lossless_medium_has_infinite_depth() {
        assert_eq!(penetration_depth(1e9, 40.0, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn depth_decreases_with_frequency() {
        let d1 = penetration_depth(1.9e9, 40.0, 10.0).unwrap();
        let d2 = penetration_depth(2e9, 40.0, 10.0).unwrap();
        let d3 = penetration_depth(28e9, 40.0, 10.0).unwrap();
        assert!(d1 > d2 && d2 > d3);
    }

    #[test]
    fn good_dielectric_limit() {
        // sigma/(omega eps) = 1e-3 with eps_r = 1
        let f = 1e9;
        let omega = 2.0 * std::f64::consts::PI * f;
        let sigma = 1e-3 * omega * VACUUM_PERMITTIVITY;
        let exact = penetration_depth(f, 1.0, sigma).unwrap();
        let approx = (2.0 / sigma) * (VACUUM_PERMITTIVITY / VACUUM_PERMEABILITY).sqrt();
        assert!(rel_err(exact, approx) < 1e-3);
    }

    #[test]
    fn fresnel_matched_and_conductor_limits() {
        assert!(reflection_coefficient(1.0, 0.0, 1e9).unwrap() < 1e-12);
        assert!(reflection_coefficient(1.0, 1e6, 1e9).unwrap() > 0.99);
    }

    #[test]
    fn fresnel_closed_form_eps4() {
        let r = reflection_coefficient(4.0, 0.0, 1e9).unwrap();
        assert!(rel_err(r, 1.0 / 3.0) < 1e-12);
    }

    #[test]
    fn depth_profile_follows_exponential_decay() {
        let profile = sar_depth_profile(8.0, 1e-3, 5e-3, 50);
        assert_eq!(profile.len(), 51);
        assert_eq!(profile[0], (0.0, 8.0));
        for (z, sar) in &profile {
            assert!(rel_err(*sar, 8.0 * (-2.0 * z / 1e-3).exp()) < 1e-12);
        }
    }

    #[test]
    fn dielectric_interpolation_clamps_and_blends() {
        let model = TissueModel {
            dielectric_table: Some(vec![
                DielectricPoint { frequency_hz: 1e9, eps_r: 40.0, sigma_s_per_m: 1.0 },
                DielectricPoint { frequency_hz: 3e9, eps_r: 38.0, sigma_s_per_m: 2.0 },
            ]),
            ..TissueModel::default()
        };
        let mid = model.dielectric_at(2e9).unwrap();
        assert!(rel_err(mid.eps_r, 39.0) < 1e-12);
        assert!(rel_err(mid.sigma_s_per_m, 1.5) < 1e-12);
        assert_eq!(model.dielectric_at(1e8).unwrap().eps_r, 40.0);
        assert_eq!(model.dielectric_at(1e12).unwrap().eps_r, 38.0);
    }

    #[test]
    fn unsorted_table_rejected() {
        let model = TissueModel {
            dielectric_table: Some(vec![
                DielectricPoint { frequency_hz: 3e9, eps_r: 38.0, sigma_s_per_m: 2.0 },
                DielectricPoint { frequency_hz: 1e9, eps_r: 40.0, sigma_s_per_m: 1.0 },
            ]),
            ..TissueModel::default()
        };
        assert!(model.validate().is_err());
    }

    proptest! {
        #[test]
        fn sar_linear_in_pd(pd in 0.0f64..1e4, scale_exp in -20i32..20) {
            let tissue = TissueModel::default();
            // powers of two keep the scaling exact in f64
            let a = 2f64.powi(scale_exp);
            prop_assert_eq!(sar_from_pd(a * pd, &tissue), a * sar_from_pd(pd, &tissue));
        }

        #[test]
        fn sar_monotone_in_tissue_parameters(
            r in 0.0f64..0.99,
            dr in 0.001f64..0.01,
            delta in 1e-4f64..1e-2,
            rho in 500.0f64..2000.0,
        ) {
            let base = TissueModel {
                reflection_coefficient: r,
                penetration_depth_m: delta,
                mass_density_kg_m3: rho,
                dielectric_table: None,
            };
            let more_r = TissueModel { reflection_coefficient: (r + dr).min(1.0), ..base.clone() };
            let more_delta = TissueModel { penetration_depth_m: delta * 1.5, ..base.clone() };
            let more_rho = TissueModel { mass_density_kg_m3: rho * 1.5, ..base.clone() };
            let s = sar_from_pd(1.0, &base);
            prop_assert!(sar_from_pd(1.0, &more_r) <= s);
            prop_assert!(sar_from_pd(1.0, &more_delta) < s);
            prop_assert!(sar_from_pd(1.0, &more_rho) < s);
        }

        #[test]
        fn reflection_always_in_unit_interval(
            eps_r in 1.0f64..100.0,
            sigma in 0.0f64..1e3,
            f in 1e8f64..1e11,
        ) {
            let r = reflection_coefficient(eps_r, sigma, f).unwrap();
            prop_assert!((0.0..=1.0).contains(&r));
        }

        #[test]
        fn depth_strictly_decreasing_in_f_and_sigma(
            f in 1e8f64..1e10,
            eps_r in 2.0f64..80.0,
            sigma in 0.1f64..100.0,
        ) {
            let d = penetration_depth(f, eps_r, sigma).unwrap();
            prop_assert!(penetration_depth(f * 1.5, eps_r, sigma).unwrap() < d);
            prop_assert!(penetration_depth(f, eps_r, sigma * 1.5).unwrap() < d);
        }

        #[test]
        fn sar_round_trip(pd in 1e-9f64..1e6) {
            let tissue = TissueModel::default();
            let sar = sar_from_pd(pd, &tissue);
            let r = tissue.reflection_coefficient;
            let back = sar * tissue.penetration_depth_m * tissue.mass_density_kg_m3
                / (2.0 * (1.0 - r * r));
            prop_assert!(rel_err(back, pd) < 1e-12);
        }
    }
}
