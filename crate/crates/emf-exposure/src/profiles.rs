//! System parameter profiles for the three compared wireless generations.
//!
//! A [`SystemProfile`] captures one generation's deployment parameters:
//! carrier frequency, inter-site distance, bandwidth, and the base-station /
//! user-equipment antenna and power configuration. Three built-ins ship with
//! the crate: `nr5g` (28 GHz small cells), `lte4g` (2 GHz), and `g39`
//! (1.9 GHz, the last pre-LTE release).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Antenna element spacing used by all built-in arrays, in wavelengths.
/// Recorded as deployment metadata; per-element patterns are not simulated.
pub const ELEMENT_SPACING_WAVELENGTHS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Duplexing {
    Tdd,
}

/// Names of the built-in profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinProfile {
    Nr5g,
    Lte4g,
    G39,
}

impl BuiltinProfile {
    pub const ALL: [BuiltinProfile; 3] =
        [BuiltinProfile::Nr5g, BuiltinProfile::Lte4g, BuiltinProfile::G39];

    pub fn id(self) -> &'static str {
        match self {
            BuiltinProfile::Nr5g => "nr5g",
            BuiltinProfile::Lte4g => "lte4g",
            BuiltinProfile::G39 => "g39",
        }
    }
}

impl fmt::Display for BuiltinProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for BuiltinProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nr5g" | "5g" => Ok(BuiltinProfile::Nr5g),
            "lte4g" | "4g" => Ok(BuiltinProfile::Lte4g),
            "g39" | "3.9g" | "39g" => Ok(BuiltinProfile::G39),
            other => Err(Error::UnknownProfile(other.to_string())),
        }
    }
}

/// Antenna/power configuration of one station (BS or UE).
///
/// Power and gain figures come in two conventions: per-element (the total is
/// composed from the element count) or already-aggregate. The `*_is_total`
/// flags record which convention each figure uses; EIRP composition in
/// [`crate::radio`] consumes them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationConfig {
    /// Max antenna gain, dBi. Per element unless `gain_is_total`.
    pub element_gain_dbi: f64,
    /// Transmit power, dBm. Per element unless `power_is_total`.
    pub tx_power_dbm: f64,
    pub antenna_count: u32,
    pub antenna_height_m: f64,
    pub noise_figure_db: f64,
    /// When true, `element_gain_dbi` is the full aggregate gain and no
    /// array-gain term is added.
    pub gain_is_total: bool,
    /// When true, `tx_power_dbm` is the total conducted power.
    pub power_is_total: bool,
}

/// Full parameter set of one wireless generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemProfile {
    pub name: String,
    pub carrier_frequency_hz: f64,
    pub inter_site_distance_m: f64,
    pub bandwidth_hz: f64,
    pub bs: StationConfig,
    pub ue: StationConfig,
    pub sectors_per_site: u32,
    pub duplexing: Duplexing,
    pub users_per_sector: u32,
    /// Deployment metadata: fraction of users outdoors. Indoor penetration
    /// loss is not modeled.
    pub outdoor_fraction: f64,
}

/// One failed invariant, reported as data rather than an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Returns one of the three built-in profiles, populated from the case-study
/// parameter table.
pub fn builtin_profile(name: BuiltinProfile) -> SystemProfile {
    match name {
        BuiltinProfile::Nr5g => SystemProfile {
            name: "nr5g".into(),
            carrier_frequency_hz: 28.0e9,
            inter_site_distance_m: 200.0,
            bandwidth_hz: 850.0e6,
            bs: StationConfig {
                element_gain_dbi: 8.0,
                tx_power_dbm: 18.0,
                antenna_count: 256,
                antenna_height_m: 25.0,
                noise_figure_db: 5.0,
                gain_is_total: false,
                power_is_total: false,
            },
            ue: StationConfig {
                element_gain_dbi: 20.0,
                tx_power_dbm: 35.0,
                antenna_count: 16,
                antenna_height_m: 1.5,
                noise_figure_db: 9.0,
                gain_is_total: true,
                power_is_total: true,
            },
            sectors_per_site: 3,
            duplexing: Duplexing::Tdd,
            users_per_sector: 10,
            outdoor_fraction: 1.0,
        },
        BuiltinProfile::Lte4g => SystemProfile {
            name: "lte4g".into(),
            carrier_frequency_hz: 2.0e9,
            inter_site_distance_m: 500.0,
            bandwidth_hz: 20.0e6,
            bs: StationConfig {
                element_gain_dbi: 8.0,
                tx_power_dbm: 44.0,
                antenna_count: 4,
                antenna_height_m: 35.0,
                noise_figure_db: 5.0,
                gain_is_total: false,
                power_is_total: true,
            },
            ue: StationConfig {
                element_gain_dbi: 1.0,
                tx_power_dbm: 23.0,
                antenna_count: 4,
                antenna_height_m: 1.5,
                noise_figure_db: 9.0,
                gain_is_total: true,
                power_is_total: true,
            },
            sectors_per_site: 3,
            duplexing: Duplexing::Tdd,
            users_per_sector: 10,
            outdoor_fraction: 1.0,
        },
        BuiltinProfile::G39 => SystemProfile {
            name: "g39".into(),
            carrier_frequency_hz: 1.9e9,
            inter_site_distance_m: 1000.0,
            bandwidth_hz: 20.0e6,
            bs: StationConfig {
                element_gain_dbi: 17.0,
                tx_power_dbm: 43.0,
                antenna_count: 4,
                antenna_height_m: 32.0,
                noise_figure_db: 5.0,
                gain_is_total: true,
                power_is_total: true,
            },
            ue: StationConfig {
                element_gain_dbi: 1.0,
                tx_power_dbm: 33.0,
                antenna_count: 1, // omni-directional
                antenna_height_m: 1.5,
                noise_figure_db: 9.0,
                gain_is_total: true,
                power_is_total: true,
            },
            sectors_per_site: 3,
            duplexing: Duplexing::Tdd,
            users_per_sector: 10,
            outdoor_fraction: 1.0,
        },
    }
}

fn check_station(prefix: &str, s: &StationConfig, out: &mut Vec<Violation>) {
    if s.antenna_count < 1 {
        out.push(Violation {
            field: format!("{prefix}.antenna_count"),
            rule: "must be >= 1".into(),
        });
    }
    if !(s.antenna_height_m > 0.0) {
        out.push(Violation {
            field: format!("{prefix}.antenna_height_m"),
            rule: "must be > 0".into(),
        });
    }
    if !s.element_gain_dbi.is_finite() {
        out.push(Violation {
            field: format!("{prefix}.element_gain_dbi"),
            rule: "must be finite".into(),
        });
    }
    if !s.tx_power_dbm.is_finite() {
        out.push(Violation {
            field: format!("{prefix}.tx_power_dbm"),
            rule: "must be finite".into(),
        });
    }
}

/// Checks every profile invariant; returns the list of violations, empty when
/// the profile is valid.
pub fn validate_profile(p: &SystemProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(p.carrier_frequency_hz > 0.0) {
        out.push(Violation {
            field: "carrier_frequency_hz".into(),
            rule: "must be > 0".into(),
        });
    }
    if !(p.inter_site_distance_m > 0.0) {
        out.push(Violation {
            field: "inter_site_distance_m".into(),
            rule: "must be > 0".into(),
        });
    }
    if !(p.bandwidth_hz > 0.0) {
        out.push(Violation {
            field: "bandwidth_hz".into(),
            rule: "must be > 0".into(),
        });
    }
    if p.sectors_per_site < 1 {
        out.push(Violation {
            field: "sectors_per_site".into(),
            rule: "must be >= 1".into(),
        });
    }
    if p.users_per_sector < 1 {
        out.push(Violation {
            field: "users_per_sector".into(),
            rule: "must be >= 1".into(),
        });
    }
    if !(0.0..=1.0).contains(&p.outdoor_fraction) {
        out.push(Violation {
            field: "outdoor_fraction".into(),
            rule: "must be in [0, 1]".into(),
        });
    }
    check_station("bs", &p.bs, &mut out);
    check_station("ue", &p.ue, &mut out);
    out
}

/// Loads a profile from a TOML file following the same schema the built-ins
/// serialize to.
pub fn load_profile(path: &std::path::Path) -> Result<SystemProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io("reading", path, e))?;
    let profile: SystemProfile =
        toml::from_str(&text).map_err(|e| Error::parse(path, e.to_string()))?;
    let violations = validate_profile(&profile);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::parse(path, msgs.join("; ")));
    }
    Ok(profile)
}

/// Resolves a profile selector: a built-in name or a path to a profile file.
pub fn resolve_profile(selector: &str) -> Result<SystemProfile> {
    if let Ok(builtin) = selector.parse::<BuiltinProfile>() {
        return Ok(builtin_profile(builtin));
    }
    let path = std::path::Path::new(selector);
    if path.exists() {
        load_profile(path)
    } else {
        Err(Error::UnknownProfile(selector.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_match_case_study_table() {
        let nr = builtin_profile(BuiltinProfile::Nr5g);
        assert_eq!(nr.carrier_frequency_hz, 28.0e9);
        assert_eq!(nr.inter_site_distance_m, 200.0);
        assert_eq!(nr.bandwidth_hz, 850.0e6);
        assert_eq!(nr.bs.antenna_count, 256);
        assert_eq!(nr.bs.tx_power_dbm, 18.0);
        assert!(!nr.bs.power_is_total);
        assert_eq!(nr.ue.element_gain_dbi, 20.0);
        assert!(nr.ue.gain_is_total);

        let lte = builtin_profile(BuiltinProfile::Lte4g);
        assert_eq!(lte.bs.antenna_height_m, 35.0);
        assert_eq!(lte.bs.noise_figure_db, 5.0);
        assert_eq!(lte.inter_site_distance_m, 500.0);

        let g39 = builtin_profile(BuiltinProfile::G39);
        assert_eq!(g39.ue.antenna_count, 1);
        assert_eq!(g39.ue.tx_power_dbm, 33.0);
        assert_eq!(g39.inter_site_distance_m, 1000.0);
    }

    #[test]
    fn builtins_are_valid_and_pure() {
        for name in BuiltinProfile::ALL {
            let p = builtin_profile(name);
            assert!(validate_profile(&p).is_empty(), "{name} has violations");
            assert_eq!(p, builtin_profile(name));
        }
    }

    #[test]
    fn zero_isd_is_one_violation() {
        let mut p = builtin_profile(BuiltinProfile::Nr5g);
        p.inter_site_distance_m = 0.0;
        let v = validate_profile(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "inter_site_distance_m");
    }

    #[test]
    fn zero_antenna_count_is_one_violation() {
        let mut p = builtin_profile(BuiltinProfile::Lte4g);
        p.ue.antenna_count = 0;
        let v = validate_profile(&p);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "ue.antenna_count");
    }

    #[test]
    fn toml_round_trip_is_identity() {
        for name in BuiltinProfile::ALL {
            let p = builtin_profile(name);
            let text = toml::to_string(&p).unwrap();
            let back: SystemProfile = toml::from_str(&text).unwrap();
            assert_eq!(p, back);
        }
    }

    #[test]
    fn unknown_selector_is_distinct_error() {
        match resolve_profile("6g") {
            Err(Error::UnknownProfile(name)) => assert_eq!(name, "6g"),
            other => panic!("expected UnknownProfile, got {other:?}"),
        }
    }
}
