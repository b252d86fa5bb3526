//! Regulatory limit registry, compliance verdicts, and the minimum safe
//! separation distance solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::{sar_from_pd, ExposureSample, TissueModel};
use crate::montecarlo::{run_campaign, CampaignSpec, Direction, SweepSpec};
use crate::profiles::SystemProfile;
use crate::radio::{dbm_to_watts, eirp_dbm, fraunhofer_distance_m};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Authority {
    Icnirp,
    Fcc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Pd,
    Sar,
}

/// One exposure limit: threshold value plus its averaging basis and the
/// frequency range it formally applies to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegulatoryLimit {
    pub authority: Authority,
    pub metric: Metric,
    /// W/m² for PD, W/kg for SAR.
    pub value: f64,
    pub averaging_basis: String,
    pub frequency_range_hz: (f64, f64),
    /// Set when the evaluated carrier lies outside `frequency_range_hz`.
    pub extrapolated: bool,
    /// True for entries whose numeric value comes from the regulation text
    /// rather than the case study this crate reproduces.
    pub sourced_outside_paper: bool,
}

impl RegulatoryLimit {
    pub fn id(&self) -> &'static str {
        match (self.authority, self.metric) {
            (Authority::Icnirp, Metric::Pd) => "icnirp-pd",
            (Authority::Icnirp, Metric::Sar) => "icnirp-sar",
            (Authority::Fcc, Metric::Sar) => "fcc-sar",
            (Authority::Fcc, Metric::Pd) => "fcc-pd",
        }
    }

    /// Copy of the limit with the extrapolation flag evaluated at a carrier
    /// frequency.
    pub fn at_frequency(&self, f_hz: f64) -> RegulatoryLimit {
        let (lo, hi) = self.frequency_range_hz;
        RegulatoryLimit {
            extrapolated: !(lo..=hi).contains(&f_hz),
            ..self.clone()
        }
    }

    pub fn unit(&self) -> &'static str {
        match self.metric {
            Metric::Pd => "W/m²",
            Metric::Sar => "W/kg",
        }
    }
}

/// The limits this tool knows about. ICNIRP general-public figures are the
/// ones the case study compares against; the FCC SAR entry carries the 1 g
/// averaging basis and is flagged as sourced outside the study.
pub fn limit_registry() -> Vec<RegulatoryLimit> {
    vec![
        RegulatoryLimit {
            authority: Authority::Icnirp,
            metric: Metric::Pd,
            value: 10.0,
            averaging_basis: "plane-wave equivalent power density, general public".into(),
            frequency_range_hz: (2.0e9, 300.0e9),
            extrapolated: false,
            sourced_outside_paper: false,
        },
        RegulatoryLimit {
            authority: Authority::Icnirp,
            metric: Metric::Sar,
            value: 2.0,
            averaging_basis: "10 g tissue".into(),
            // The 2 W/kg localized SAR guideline applies below 10 GHz.
            frequency_range_hz: (100.0e3, 10.0e9),
            extrapolated: false,
            sourced_outside_paper: false,
        },
        RegulatoryLimit {
            authority: Authority::Fcc,
            metric: Metric::Sar,
            value: 1.6,
            averaging_basis: "1 g tissue".into(),
            frequency_range_hz: (100.0e3, 6.0e9),
            extrapolated: false,
            sourced_outside_paper: true,
        },
    ]
}

pub fn find_limit(id: &str) -> Result<RegulatoryLimit> {
    limit_registry()
        .into_iter()
        .find(|l| l.id() == id)
        .ok_or_else(|| Error::UnknownLimit(id.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplianceVerdict {
    pub pass: bool,
    /// Positive margin = headroom below the limit.
    pub margin_db: f64,
    pub limit: RegulatoryLimit,
    pub extrapolated: bool,
}

/// Checks one sample against a limit. The margin is 10·log10(limit/value).
pub fn check(sample: &ExposureSample, limit: &RegulatoryLimit) -> Result<ComplianceVerdict> {
    let value = match limit.metric {
        Metric::Pd => sample.pd_w_m2,
        Metric::Sar => sample.sar_w_kg.ok_or(Error::MetricMismatch(limit.metric))?,
    };
    Ok(ComplianceVerdict {
        pass: value <= limit.value,
        margin_db: 10.0 * (limit.value / value).log10(),
        limit: limit.clone(),
        extrapolated: limit.extrapolated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Station {
    Bs,
    Ue,
}

/// Solver outcome: the crossing distance, or a flag when the source never
/// exceeds the limit anywhere in the search bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinDistanceOutcome {
    pub distance_m: f64,
    pub always_compliant: bool,
    /// The crossing lies inside the transmitter's Fraunhofer region, where
    /// the far-field formula is an extrapolation.
    pub near_field: bool,
}

const BRACKET_LO_M: f64 = 1e-4;
const BRACKET_HI_M: f64 = 1e4;

fn exposure_metric_at(
    d_m: f64,
    eirp_w: f64,
    duty: f64,
    metric: Metric,
    tissue: &TissueModel,
) -> f64 {
    let pd = eirp_w * duty / (4.0 * std::f64::consts::PI * d_m * d_m);
    match metric {
        Metric::Pd => pd,
        Metric::Sar => sar_from_pd(pd, tissue),
    }
}

/// Minimum separation distance d* with exposure(d*) = limit, found by
/// bisection on [10⁻⁴, 10⁴] m under free-space spreading with duty-cycle
/// time-averaging.
pub fn min_safe_distance(
    profile: &SystemProfile,
    station: Station,
    limit: &RegulatoryLimit,
    tissue: &TissueModel,
    duty: f64,
) -> Result<MinDistanceOutcome> {
    tissue.validate()?;
    if !(duty > 0.0 && duty <= 1.0) {
        return Err(Error::InvalidSpec("duty must be in (0, 1]".into()));
    }
    let config = match station {
        Station::Bs => &profile.bs,
        Station::Ue => &profile.ue,
    };
    let eirp_w = dbm_to_watts(eirp_dbm(config));
    let fraunhofer = fraunhofer_distance_m(config.antenna_count, profile.carrier_frequency_hz);
    let f = |d: f64| exposure_metric_at(d, eirp_w, duty, limit.metric, tissue);

    if f(BRACKET_LO_M) <= limit.value {
        return Ok(MinDistanceOutcome {
            distance_m: 0.0,
            always_compliant: true,
            near_field: false,
        });
    }
    if f(BRACKET_HI_M) > limit.value {
        return Err(Error::BracketExhausted {
            limit: limit.value,
            bracket_m: BRACKET_HI_M,
        });
    }

    let (mut lo, mut hi) = (BRACKET_LO_M, BRACKET_HI_M);
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi && hi - lo <= 1e-6 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > limit.value {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d = 0.5 * (lo + hi);
    Ok(MinDistanceOutcome {
        distance_m: d,
        always_compliant: false,
        near_field: d < fraunhofer,
    })
}

// ---------------------------------------------------------------------------
// Exposure report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    pub trials: u64,
    pub seed: u64,
    pub uplink_duty: f64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            trials: 1000,
            seed: 1,
            uplink_duty: 0.5,
        }
    }
}

/// Every modelling assumption that shaped the numbers in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionBlock {
    pub pathloss: crate::radio::PathlossModel,
    pub reflection_coefficient: f64,
    pub penetration_depth_m: f64,
    pub mass_density_kg_m3: f64,
    pub uplink_duty: f64,
    pub users_per_sector: u32,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub direction: Direction,
    /// Distance at which the verdicts below were evaluated (cell edge for
    /// downlink, sweep end for uplink).
    pub checked_distance_m: f64,
    pub mean_pd_w_m2: f64,
    pub mean_sar_w_kg: f64,
    pub near_field_fraction: f64,
    pub verdicts: Vec<ComplianceVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinDistanceEntry {
    pub station: Station,
    pub limit_id: String,
    pub limit_value: f64,
    pub outcome: MinDistanceOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExposureReport {
    pub profile: SystemProfile,
    pub assumptions: AssumptionBlock,
    pub scenarios: Vec<ScenarioSummary>,
    pub min_safe_distances: Vec<MinDistanceEntry>,
}

/// Builds the audit report: sweep summaries with per-limit verdicts, min-safe
/// distances for both stations, and the full assumption block.
pub fn exposure_report(
    profile: &SystemProfile,
    scenarios: &[SweepSpec],
    options: &ReportOptions,
) -> Result<ExposureReport> {
    let mut summaries = Vec::new();
    let mut tissue = TissueModel::default();
    let mut pathloss = crate::radio::PathlossModel::FreeSpace;
    let carrier = profile.carrier_frequency_hz;

    for sweep in scenarios {
        tissue = sweep.tissue.clone();
        pathloss = sweep.pathloss;
        let mut campaign = CampaignSpec::new(sweep.clone());
        campaign.trials = options.trials;
        campaign.seed = options.seed;
        campaign.uplink_duty = options.uplink_duty;
        let result = run_campaign(&campaign)?;

        let checked = match sweep.direction {
            Direction::Downlink => profile.inter_site_distance_m / 2.0,
            Direction::Uplink => sweep.stop_m,
        };
        let record = result
            .records
            .iter()
            .min_by(|a, b| {
                (a.distance_m - checked)
                    .abs()
                    .partial_cmp(&(b.distance_m - checked).abs())
                    .unwrap()
            })
            .ok_or(Error::EmptyResult)?;

        let sample = ExposureSample {
            distance_m: record.distance_m,
            pd_w_m2: record.mean_pd_w_m2,
            sar_w_kg: Some(record.mean_sar_w_kg),
            near_field: record.near_field_fraction > 0.0,
            time_averaged: true,
        };
        let verdicts: Result<Vec<ComplianceVerdict>> = limit_registry()
            .iter()
            .map(|l| check(&sample, &l.at_frequency(carrier)))
            .collect();
        summaries.push(ScenarioSummary {
            direction: sweep.direction,
            checked_distance_m: record.distance_m,
            mean_pd_w_m2: record.mean_pd_w_m2,
            mean_sar_w_kg: record.mean_sar_w_kg,
            near_field_fraction: record.near_field_fraction,
            verdicts: verdicts?,
        });
    }

    let mut min_safe_distances = Vec::new();
    for limit in limit_registry() {
        let limit = limit.at_frequency(carrier);
        for station in [Station::Bs, Station::Ue] {
            let duty = match station {
                Station::Bs => 1.0 / profile.users_per_sector as f64,
                Station::Ue => options.uplink_duty,
            };
            let outcome = min_safe_distance(profile, station, &limit, &tissue, duty)?;
            min_safe_distances.push(MinDistanceEntry {
                station,
                limit_id: limit.id().to_string(),
                limit_value: limit.value,
                outcome,
            });
        }
    }

    Ok(ExposureReport {
        profile: profile.clone(),
        assumptions: AssumptionBlock {
            pathloss,
            reflection_coefficient: tissue.reflection_coefficient,
            penetration_depth_m: tissue.penetration_depth_m,
            mass_density_kg_m3: tissue.mass_density_kg_m3,
            uplink_duty: options.uplink_duty,
            users_per_sector: profile.users_per_sector,
            trials: options.trials,
            seed: options.seed,
        },
        scenarios: summaries,
        min_safe_distances,
    })
}

impl ExposureReport {
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Exposure report for profile `{}`\n", self.profile.name));
        out.push_str(&format!(
            "  carrier {:.3} GHz, ISD {} m, BS {} elements @ {} m, UE {} elements @ {} m\n",
            self.profile.carrier_frequency_hz / 1e9,
            self.profile.inter_site_distance_m,
            self.profile.bs.antenna_count,
            self.profile.bs.antenna_height_m,
            self.profile.ue.antenna_count,
            self.profile.ue.antenna_height_m,
        ));
        let a = &self.assumptions;
        out.push_str(&format!(
            "Assumptions: pathloss {:?}, R={}, delta={} m, rho={} kg/m3, uplink duty {}, {} users/sector, {} trials, seed {}\n",
            a.pathloss, a.reflection_coefficient, a.penetration_depth_m, a.mass_density_kg_m3,
            a.uplink_duty, a.users_per_sector, a.trials, a.seed,
        ));
        for s in &self.scenarios {
            out.push_str(&format!(
                "Scenario {}: at {:.3} m mean PD {:.4e} W/m², mean SAR {:.4e} W/kg (near-field fraction {:.2})\n",
                s.direction, s.checked_distance_m, s.mean_pd_w_m2, s.mean_sar_w_kg, s.near_field_fraction,
            ));
            for v in &s.verdicts {
                out.push_str(&format!(
                    "  {} {} {} {}: {} (margin {:+.2} dB){}\n",
                    v.limit.id(),
                    v.limit.value,
                    v.limit.unit(),
                    v.limit.averaging_basis,
                    if v.pass { "PASS" } else { "FAIL" },
                    v.margin_db,
                    if v.extrapolated { " [extrapolated beyond limit's frequency range]" } else { "" },
                ));
            }
        }
        for m in &self.min_safe_distances {
            if m.outcome.always_compliant {
                out.push_str(&format!(
                    "Min distance {:?} vs {}: always compliant\n",
                    m.station, m.limit_id
                ));
            } else {
                out.push_str(&format!(
                    "Min distance {:?} vs {} ({} limit): {:.4} m{}\n",
                    m.station,
                    m.limit_id,
                    m.limit_value,
                    m.outcome.distance_m,
                    if m.outcome.near_field { " [inside Fraunhofer region]" } else { "" },
                ));
            }
        }
        out
    }
}
