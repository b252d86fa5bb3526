//! Seeded Monte Carlo exposure campaigns.
//!
//! Two sweep scenarios mirror the case studies: a downlink walk past a line
//! of base stations (exposure from the serving, i.e. nearest, BS at each
//! distance mark) and an uplink head-device proximity sweep. Both apply TDD
//! time-averaging and aggregate statistics over independent trials.
//!
//! Determinism contract: every per-trial random stream is derived from
//! (seed, mark index, trial index), so results are bit-identical for a given
//! spec and seed regardless of execution order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exposure::{sar_from_pd, TissueModel};
use crate::profiles::SystemProfile;
use crate::radio::{eirp_dbm, fraunhofer_distance_m, power_density, LinkGeometry, PathlossModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Downlink,
    Uplink,
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Direction::Downlink => f.write_str("downlink"),
            Direction::Uplink => f.write_str("uplink"),
        }
    }
}

/// Distance sweep definition for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub direction: Direction,
    pub start_m: f64,
    pub stop_m: f64,
    pub step_m: f64,
    pub profile: SystemProfile,
    pub pathloss: PathlossModel,
    pub tissue: TissueModel,
    /// Downlink only: BSs stand at 0, ISD, 2·ISD, ... up to this extent.
    pub bs_line_extent_m: f64,
}

impl SweepSpec {
    /// Default downlink walk: 0 to 1000 m past BSs every ISD.
    pub fn downlink(profile: SystemProfile, tissue: TissueModel) -> Self {
        SweepSpec {
            direction: Direction::Downlink,
            start_m: 0.0,
            stop_m: 1000.0,
            step_m: 5.0,
            profile,
            pathloss: PathlossModel::FreeSpace,
            tissue,
            bs_line_extent_m: 1000.0,
        }
    }

    /// Default uplink proximity sweep: 1 cm to 1 m (contact excluded).
    pub fn uplink(profile: SystemProfile, tissue: TissueModel) -> Self {
        SweepSpec {
            direction: Direction::Uplink,
            start_m: 0.01,
            stop_m: 1.0,
            step_m: 0.01,
            profile,
            pathloss: PathlossModel::FreeSpace,
            tissue,
            bs_line_extent_m: 0.0,
        }
    }

    /// Distance marks: start, start+step, ..., floor((stop-start)/step)+1 of
    /// them.
    pub fn marks(&self) -> Vec<f64> {
        let n = ((self.stop_m - self.start_m) / self.step_m + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.start_m + i as f64 * self.step_m).collect()
    }
}

/// A full campaign: a sweep repeated over seeded random trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub sweep: SweepSpec,
    pub trials: u64,
    pub users_per_sector: u32,
    pub seed: u64,
    /// Jitter scale in [0, 1]; 0 disables randomness entirely.
    pub jitter: f64,
    /// Fraction of time the UE transmits (TDD uplink share).
    pub uplink_duty: f64,
    /// When true, downlink exposure sums every BS on the line instead of the
    /// serving BS only.
    pub aggregate_all_bs: bool,
}

impl CampaignSpec {
    pub fn new(sweep: SweepSpec) -> Self {
        let users = sweep.profile.users_per_sector;
        CampaignSpec {
            sweep,
            trials: 10_000,
            users_per_sector: users,
            seed: 1,
            jitter: 1.0,
            uplink_duty: 0.5,
            aggregate_all_bs: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        if !(s.start_m >= 0.0) {
            return Err(Error::InvalidSpec("start must be >= 0".into()));
        }
        if !(s.stop_m > s.start_m) {
            return Err(Error::InvalidSpec("stop must be > start".into()));
        }
        if !(s.step_m > 0.0) {
            return Err(Error::InvalidSpec("step must be > 0".into()));
        }
        if s.direction == Direction::Uplink && s.start_m == 0.0 {
            return Err(Error::InvalidSpec(
                "uplink start must be > 0 (contact singularity)".into(),
            ));
        }
        if s.direction == Direction::Downlink && !(s.bs_line_extent_m > 0.0) {
            return Err(Error::InvalidSpec("bs_line_extent must be > 0".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidSpec("trials must be >= 1".into()));
        }
        if self.users_per_sector < 1 {
            return Err(Error::InvalidSpec("users_per_sector must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.jitter) {
            return Err(Error::InvalidSpec("jitter must be in [0, 1]".into()));
        }
        if !(self.uplink_duty > 0.0 && self.uplink_duty <= 1.0) {
            return Err(Error::InvalidSpec("uplink duty must be in (0, 1]".into()));
        }
        s.tissue.validate()?;
        let violations = crate::profiles::validate_profile(&s.profile);
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidSpec(msgs.join("; ")));
        }
        Ok(())
    }
}

/// Aggregate statistics at one distance mark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub distance_m: f64,
    pub mean_pd_w_m2: f64,
    pub std_pd: f64,
    pub p95_pd: f64,
    pub mean_sar_w_kg: f64,
    pub std_sar: f64,
    pub p95_sar: f64,
    pub near_field_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub records: Vec<DistanceRecord>,
}

pub const CSV_HEADER: &str =
    "distance_m,mean_pd_w_m2,std_pd,p95_pd,mean_sar_w_kg,std_sar,p95_sar,near_field_fraction";

fn fmt_sig9(v: f64) -> String {
    format!("{v:.8e}")
}

impl CampaignResult {
    /// CSV rendering with 9 significant digits and LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                fmt_sig9(r.distance_m),
                fmt_sig9(r.mean_pd_w_m2),
                fmt_sig9(r.std_pd),
                fmt_sig9(r.p95_pd),
                fmt_sig9(r.mean_sar_w_kg),
                fmt_sig9(r.std_sar),
                fmt_sig9(r.p95_sar),
                fmt_sig9(r.near_field_fraction),
            ));
        }
        out
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn trial_rng(seed: u64, mark: u64, trial: u64) -> ChaCha8Rng {
    let mixed = splitmix64(seed ^ splitmix64(mark ^ splitmix64(trial)));
    ChaCha8Rng::seed_from_u64(mixed)
}

fn percentile_95(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let idx = ((n as f64 * 0.95).ceil() as usize).clamp(1, n);
    sorted[idx - 1]
}

struct TrialSample {
    pd: f64,
    sar: f64,
    near_field: bool,
}

fn summarize(distance_m: f64, samples: &[TrialSample]) -> DistanceRecord {
    let n = samples.len() as f64;
    let mean = |f: &dyn Fn(&TrialSample) -> f64| samples.iter().map(|s| f(s)).sum::<f64>() / n;
    let mean_pd = mean(&|s| s.pd);
    let mean_sar = mean(&|s| s.sar);
    let var_pd = mean(&|s| (s.pd - mean_pd) * (s.pd - mean_pd));
    let var_sar = mean(&|s| (s.sar - mean_sar) * (s.sar - mean_sar));
    let mut pd_sorted: Vec<f64> = samples.iter().map(|s| s.pd).collect();
    let mut sar_sorted: Vec<f64> = samples.iter().map(|s| s.sar).collect();
    pd_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sar_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let near = samples.iter().filter(|s| s.near_field).count() as f64 / n;
    DistanceRecord {
        distance_m,
        mean_pd_w_m2: mean_pd,
        std_pd: var_pd.max(0.0).sqrt(),
        p95_pd: percentile_95(&pd_sorted),
        mean_sar_w_kg: mean_sar,
        std_sar: var_sar.max(0.0).sqrt(),
        p95_sar: percentile_95(&sar_sorted),
        near_field_fraction: near,
    }
}

fn bs_positions(extent_m: f64, isd_m: f64) -> Vec<f64> {
    let n = (extent_m / isd_m + 1e-9).floor() as usize + 1;
    (0..n).map(|i| i as f64 * isd_m).collect()
}

fn downlink_trial(c: &CampaignSpec, mark_m: f64, rng: &mut ChaCha8Rng) -> Result<TrialSample> {
    let sweep = &c.sweep;
    let profile = &sweep.profile;
    let lateral = if c.jitter > 0.0 {
        rng.gen_range(-1.0..1.0) * (profile.inter_site_distance_m / 4.0) * c.jitter
    } else {
        0.0
    };
    let positions = bs_positions(sweep.bs_line_extent_m, profile.inter_site_distance_m);
    let eirp = eirp_dbm(&profile.bs);
    let fraunhofer = fraunhofer_distance_m(profile.bs.antenna_count, profile.carrier_frequency_hz);

    let horiz = |bs_x: f64| {
        let dx = mark_m - bs_x;
        (dx * dx + lateral * lateral).sqrt()
    };
    let serving_x = positions
        .iter()
        .copied()
        .min_by(|a, b| horiz(*a).partial_cmp(&horiz(*b)).unwrap())
        .expect("at least one BS on the line");

    let pd_at = |bs_x: f64| -> Result<f64> {
        let g = LinkGeometry::new(horiz(bs_x), profile.bs.antenna_height_m, profile.ue.antenna_height_m);
        power_density(eirp, &g, sweep.pathloss, profile.carrier_frequency_hz)
    };

    let beam_on_pd = if c.aggregate_all_bs {
        let mut sum = 0.0;
        for x in &positions {
            sum += pd_at(*x)?;
        }
        sum
    } else {
        pd_at(serving_x)?
    };

    // Equal-slot TDD round-robin: the user holds the beam 1/users of the time.
    let pd = beam_on_pd / c.users_per_sector as f64;
    let serving_geom = LinkGeometry::new(
        horiz(serving_x),
        profile.bs.antenna_height_m,
        profile.ue.antenna_height_m,
    );
    Ok(TrialSample {
        pd,
        sar: sar_from_pd(pd, &sweep.tissue),
        near_field: serving_geom.distance_3d_m() < fraunhofer,
    })
}

fn uplink_trial(c: &CampaignSpec, mark_m: f64, rng: &mut ChaCha8Rng) -> Result<TrialSample> {
    let sweep = &c.sweep;
    let profile = &sweep.profile;
    let jittered = if c.jitter > 0.0 {
        mark_m + rng.gen_range(-1.0..1.0) * (sweep.step_m / 2.0) * c.jitter
    } else {
        mark_m
    };
    let d = jittered.max(sweep.start_m / 2.0).max(1e-4);
    // Head and device share a height: the separation is purely radial.
    let g = LinkGeometry::new(d, profile.ue.antenna_height_m, profile.ue.antenna_height_m);
    let beam_on =
        power_density(eirp_dbm(&profile.ue), &g, PathlossModel::FreeSpace, profile.carrier_frequency_hz)?;
    let pd = beam_on * c.uplink_duty;
    let fraunhofer = fraunhofer_distance_m(profile.ue.antenna_count, profile.carrier_frequency_hz);
    Ok(TrialSample {
        pd,
        sar: sar_from_pd(pd, &sweep.tissue),
        near_field: d < fraunhofer,
    })
}

fn sweep_with(
    c: &CampaignSpec,
    trial: impl Fn(&CampaignSpec, f64, &mut ChaCha8Rng) -> Result<TrialSample> + Sync,
) -> Result<CampaignResult> {
    let marks = c.sweep.marks();
    let records: Result<Vec<DistanceRecord>> = marks
        .par_iter()
        .enumerate()
        .map(|(mark_idx, &mark_m)| {
            let mut samples = Vec::with_capacity(c.trials as usize);
            for t in 0..c.trials {
                let mut rng = trial_rng(c.seed, mark_idx as u64, t);
                samples.push(trial(c, mark_m, &mut rng)?);
            }
            Ok(summarize(mark_m, &samples))
        })
        .collect();
    Ok(CampaignResult { records: records? })
}

/// Downlink walk past the BS line; exposure from the serving (nearest) BS,
/// TDD time-averaged.
pub fn downlink_sweep(c: &CampaignSpec) -> Result<CampaignResult> {
    c.validate()?;
    if c.sweep.direction != Direction::Downlink {
        return Err(Error::InvalidSpec("downlink_sweep requires a downlink spec".into()));
    }
    sweep_with(c, downlink_trial)
}

/// Uplink head-device proximity sweep under free-space spreading, duty-cycle
/// time-averaged.
pub fn uplink_sweep(c: &CampaignSpec) -> Result<CampaignResult> {
    c.validate()?;
    if c.sweep.direction != Direction::Uplink {
        return Err(Error::InvalidSpec("uplink_sweep requires an uplink spec".into()));
    }
    sweep_with(c, uplink_trial)
}

/// Dispatches on the sweep direction.
pub fn run_campaign(c: &CampaignSpec) -> Result<CampaignResult> {
    match c.sweep.direction {
        Direction::Downlink => downlink_sweep(c),
        Direction::Uplink => uplink_sweep(c),
    }
}

/// Indices of strict local maxima (boundaries count when they dominate their
/// single neighbor).
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || values[i] > values[i - 1];
            let right_ok = i == n - 1 || values[i] > values[i + 1];
            left_ok && right_ok
        })
        .collect()
}
