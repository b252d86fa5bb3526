//! EIRP composition and propagation: free-space spreading and the urban-macro
//! line-of-sight pathloss, plus the far-field (Fraunhofer) boundary used to
//! flag near-field evaluations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::StationConfig;
use crate::SPEED_OF_LIGHT;

/// Geometry of one link: horizontal separation plus the two antenna heights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub horizontal_distance_m: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
}

impl LinkGeometry {
    pub fn new(horizontal_distance_m: f64, tx_height_m: f64, rx_height_m: f64) -> Self {
        LinkGeometry {
            horizontal_distance_m,
            tx_height_m,
            rx_height_m,
        }
    }

    /// Slant (3D) distance between the antennas.
    pub fn distance_3d_m(&self) -> f64 {
        let dh = self.tx_height_m - self.rx_height_m;
        (self.horizontal_distance_m * self.horizontal_distance_m + dh * dh).sqrt()
    }
}

/// Pathloss flavor. FreeSpace is the default for exposure work (unobstructed
/// worst case); UMa LOS echoes the urban-macro system layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PathlossModel {
    #[default]
    FreeSpace,
    UMaLineOfSight,
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}

/// Composes EIRP from a station configuration.
///
/// Aggregate figures are summed directly. Per-element figures pick up a
/// 10·log10(N) term each: once for total conducted power, once for coherent
/// beamforming gain.
pub fn eirp_dbm(s: &StationConfig) -> f64 {
    let array_db = 10.0 * (s.antenna_count as f64).log10();
    let power = s.tx_power_dbm + if s.power_is_total { 0.0 } else { array_db };
    let gain = s.element_gain_dbi + if s.gain_is_total { 0.0 } else { array_db };
    power + gain
}

/// Free-space pathloss, dB: 20·log10(4π·d·f/c).
pub fn free_space_pathloss_db(d_m: f64, f_hz: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * d_m * f_hz / SPEED_OF_LIGHT).log10()
}

/// Urban-macro LOS pathloss result. `in_validity_range` is false when the
/// inputs fall outside the model's stated range; the value is still computed
/// by extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UmaPathloss {
    pub db: f64,
    pub in_validity_range: bool,
}

/// Dual-slope urban-macro LOS pathloss in breakpoint-distance form.
///
/// Coefficients follow the 3GPP UMa LOS formula (see
/// `docs/model-assumptions.md` for the pinned values):
///
/// ```text
/// PL1 = 28 + 22·log10(d3d) + 20·log10(f_GHz)              d2d <= d'bp
/// PL2 = 28 + 40·log10(d3d) + 20·log10(f_GHz)
///          - 9·log10(d'bp² + (hbs - hue)²)                 d2d >  d'bp
/// d'bp = 4·(hbs - 1)·(hue - 1)·f/c
/// ```
///
/// The two branches meet exactly at d2d = d'bp, so the curve is continuous
/// and non-decreasing in d3d.
pub fn uma_los_pathloss_db(d3d_m: f64, f_hz: f64, hbs_m: f64, hue_m: f64) -> Result<UmaPathloss> {
    if !(f_hz > 0.0) {
        return Err(Error::NonPositiveFrequency(f_hz));
    }
    let f_ghz = f_hz / 1e9;
    let dh = hbs_m - hue_m;
    let d2d = (d3d_m * d3d_m - dh * dh).max(0.0).sqrt();

    // Effective antenna heights subtract the 1 m environment height.
    let h_bs_eff = (hbs_m - 1.0).max(0.0);
    let h_ue_eff = (hue_m - 1.0).max(0.0);
    let d_bp = 4.0 * h_bs_eff * h_ue_eff * f_hz / SPEED_OF_LIGHT;

    let freq_term = 20.0 * f_ghz.log10();
    let db = if d2d <= d_bp {
        28.0 + 22.0 * d3d_m.log10() + freq_term
    } else {
        28.0 + 40.0 * d3d_m.log10() + freq_term - 9.0 * (d_bp * d_bp + dh * dh).log10()
    };

    let in_validity_range = (10.0..=5000.0).contains(&d2d) && (0.5..=100.0).contains(&f_ghz);
    Ok(UmaPathloss {
        db,
        in_validity_range,
    })
}

/// Incident power density at the receiver, W/m².
///
/// FreeSpace: EIRP_W / (4π·d3d²). UMa LOS: the free-space density further
/// attenuated by the excess of the UMa LOS pathloss over free-space pathloss,
/// with the excess clamped at >= 0 dB so the urban model never exceeds the
/// unobstructed bound.
pub fn power_density(
    eirp_dbm: f64,
    geometry: &LinkGeometry,
    model: PathlossModel,
    carrier_hz: f64,
) -> Result<f64> {
    let d = geometry.distance_3d_m();
    if d <= 0.0 {
        return Err(Error::SingularGeometry);
    }
    let spherical = dbm_to_watts(eirp_dbm) / (4.0 * std::f64::consts::PI * d * d);
    match model {
        PathlossModel::FreeSpace => Ok(spherical),
        PathlossModel::UMaLineOfSight => {
            let uma = uma_los_pathloss_db(d, carrier_hz, geometry.tx_height_m, geometry.rx_height_m)?;
            let excess_db = (uma.db - free_space_pathloss_db(d, carrier_hz)).max(0.0);
            Ok(spherical * 10f64.powf(-excess_db / 10.0))
        }
    }
}

/// Far-field (Fraunhofer) boundary 2D²/λ for an N-element array at λ/2
/// spacing, assuming a square panel of side ceil(sqrt(N)) elements. A single
/// element has no extended aperture and returns 0.
pub fn fraunhofer_distance_m(antenna_count: u32, f_hz: f64) -> f64 {
    let lambda = SPEED_OF_LIGHT / f_hz;
    let side = (antenna_count as f64).sqrt().ceil();
    let aperture = (side - 1.0) * lambda / 2.0;
    2.0 * aperture * aperture / lambda
}
