//! Command-line front end: argument parsing, run configuration, campaign
//! execution, CSV/SVG emission, and compliance reporting.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::compliance::{
    exposure_report, find_limit, limit_registry, min_safe_distance, Metric, ReportOptions, Station,
};
use crate::error::{Error, Result};
use crate::exposure::{load_dielectric_table, penetration_depth, reflection_coefficient,
    sar_depth_profile, TissueModel};
use crate::montecarlo::{run_campaign, CampaignResult, CampaignSpec, Direction, SweepSpec};
use crate::plot::{render_svg, Series};
use crate::profiles::{builtin_profile, resolve_profile, BuiltinProfile, SystemProfile};
use crate::radio::{eirp_dbm, PathlossModel};

/// Sparse overrides applied on top of a profile's defaults. Unknown keys are
/// rejected at parse time (strict CLI flags, `deny_unknown_fields` for
/// files).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflection_coefficient: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duty: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pathloss: Option<PathlossModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bs_antenna_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_m: Option<f64>,
}

/// Everything one `sweep` invocation needs; serializable for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Built-in names or profile file paths.
    pub profiles: Vec<String>,
    pub scenario: Direction,
    #[serde(default)]
    pub overrides: Overrides,
    pub out_dir: PathBuf,
    pub emit_plots: bool,
}

#[derive(Parser, Debug)]
#[command(name = "emf-exposure", version, about = "RF exposure (PD/SAR) simulator for cellular links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a Monte Carlo distance sweep and export CSV (and optionally SVG).
    Sweep(SweepArgs),
    /// Solve the minimum separation distance for a regulatory limit.
    MinDistance(MinDistanceArgs),
    /// List the built-in system profiles with their full parameter sets.
    Profiles,
    /// Compute skin penetration depth and emit a SAR depth profile CSV.
    DepthProfile(DepthProfileArgs),
}

#[derive(clap::Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// Built-in profile name (nr5g, lte4g, g39) or profile TOML path.
    /// Repeatable; every profile lands in the same charts.
    #[arg(long, required = true)]
    pub profile: Vec<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = "EMF_EXPOSURE_OUT", default_value = ".")]
    pub out: PathBuf,
    /// Air-skin reflection coefficient override.
    #[arg(long)]
    pub reflection_coefficient: Option<f64>,
    /// Uplink transmit duty fraction.
    #[arg(long)]
    pub duty: Option<f64>,
    #[arg(long, value_enum)]
    pub pathloss: Option<PathlossModel>,
    /// BS antenna count override (e.g. 64 for the smaller 5G array).
    #[arg(long)]
    pub bs_antenna_count: Option<u32>,
    /// Placement jitter scale in [0, 1]; 0 is fully deterministic.
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Distance step in meters.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub emit_plots: bool,
}

impl SweepArgs {
    pub fn to_run_config(&self) -> RunConfig {
        RunConfig {
            profiles: self.profile.clone(),
            scenario: self.direction,
            overrides: Overrides {
                trials: self.trials,
                seed: self.seed,
                reflection_coefficient: self.reflection_coefficient,
                duty: self.duty,
                pathloss: self.pathloss,
                bs_antenna_count: self.bs_antenna_count,
                jitter: self.jitter,
                step_m: self.step,
            },
            out_dir: self.out.clone(),
            emit_plots: self.emit_plots,
        }
    }
}

#[derive(clap::Args, Debug)]
pub struct MinDistanceArgs {
    #[arg(long)]
    pub profile: String,
    #[arg(long, value_enum)]
    pub station: Station,
    /// Limit id: icnirp-sar, icnirp-pd, or fcc-sar.
    #[arg(long)]
    pub limit: String,
    /// Transmit duty fraction (1.0 = continuous, the conservative default).
    #[arg(long, default_value_t = 1.0)]
    pub duty: f64,
    #[arg(long)]
    pub reflection_coefficient: Option<f64>,
}

#[derive(clap::Args, Debug)]
pub struct DepthProfileArgs {
    /// Carrier frequency, Hz.
    #[arg(long)]
    pub frequency: f64,
    /// Dielectric table CSV (header: frequency_hz,eps_r,sigma_s_per_m).
    #[arg(long)]
    pub dielectrics: PathBuf,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io("creating", parent, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io("writing", path, e))
}

/// Writes a campaign result as CSV (LF endings, 9 significant digits).
pub fn emit_csv(result: &CampaignResult, path: &Path) -> Result<()> {
    write_file(path, &result.to_csv())
}

fn apply_overrides(profile: &mut SystemProfile, tissue: &mut TissueModel, o: &Overrides) {
    if let Some(n) = o.bs_antenna_count {
        profile.bs.antenna_count = n;
    }
    if let Some(r) = o.reflection_coefficient {
        tissue.reflection_coefficient = r;
    }
}

fn campaign_for(profile: SystemProfile, config: &RunConfig) -> CampaignSpec {
    let mut tissue = TissueModel::default();
    let mut profile = profile;
    apply_overrides(&mut profile, &mut tissue, &config.overrides);
    let mut sweep = match config.scenario {
        Direction::Downlink => SweepSpec::downlink(profile, tissue),
        Direction::Uplink => SweepSpec::uplink(profile, tissue),
    };
    if let Some(pl) = config.overrides.pathloss {
        sweep.pathloss = pl;
    }
    if let Some(step) = config.overrides.step_m {
        sweep.step_m = step;
    }
    let mut campaign = CampaignSpec::new(sweep);
    if let Some(t) = config.overrides.trials {
        campaign.trials = t;
    }
    if let Some(s) = config.overrides.seed {
        campaign.seed = s;
    }
    if let Some(j) = config.overrides.jitter {
        campaign.jitter = j;
    }
    if let Some(d) = config.overrides.duty {
        campaign.uplink_duty = d;
    }
    campaign
}

fn assumptions_text(campaigns: &[CampaignSpec], config: &RunConfig) -> String {
    let mut out = String::from("Model assumptions for this run\n");
    out.push_str(&format!("scenario: {}\n", config.scenario));
    for c in campaigns {
        let s = &c.sweep;
        out.push_str(&format!(
            "profile {}: pathloss={:?} R={} delta_m={} rho_kg_m3={} users_per_sector={} trials={} seed={} jitter={} uplink_duty={} sweep=[{}, {}] step {} m\n",
            s.profile.name,
            s.pathloss,
            s.tissue.reflection_coefficient,
            s.tissue.penetration_depth_m,
            s.tissue.mass_density_kg_m3,
            c.users_per_sector,
            c.trials,
            c.seed,
            c.jitter,
            c.uplink_duty,
            s.start_m,
            s.stop_m,
            s.step_m,
        ));
    }
    out.push_str(
        "notes: free-space spreading is the conservative default; beams always point at the evaluated user; \
         near-field marks flag distances inside the transmitter's Fraunhofer region where the far-field \
         formula is an extrapolation.\n",
    );
    out
}

/// Executes a `sweep` run end to end.
pub fn run_sweep(config: &RunConfig) -> Result<()> {
    let mut campaigns = Vec::new();
    for selector in &config.profiles {
        let profile = resolve_profile(selector)?;
        campaigns.push(campaign_for(profile, config));
    }

    let mut pd_series = Vec::new();
    let mut sar_series = Vec::new();
    let mut first_report: Option<(SystemProfile, SweepSpec, CampaignSpec)> = None;

    for campaign in &campaigns {
        let result = run_campaign(campaign)?;
        let name = campaign.sweep.profile.name.clone();
        let csv_path = config.out_dir.join(format!("{}_{}.csv", name, config.scenario));
        emit_csv(&result, &csv_path)?;
        println!(
            "{}: {} marks -> {}",
            name,
            result.records.len(),
            csv_path.display()
        );
        pd_series.push(Series {
            name: name.clone(),
            points: result.records.iter().map(|r| (r.distance_m, r.mean_pd_w_m2)).collect(),
        });
        sar_series.push(Series {
            name: name.clone(),
            points: result.records.iter().map(|r| (r.distance_m, r.mean_sar_w_kg)).collect(),
        });
        if first_report.is_none() {
            first_report = Some((
                campaign.sweep.profile.clone(),
                campaign.sweep.clone(),
                campaign.clone(),
            ));
        }
    }

    if config.emit_plots {
        let limits = limit_registry();
        let title = |m: &str| format!("{} {} vs distance", config.scenario, m);
        let pd_svg = render_svg(&pd_series, &limits, Metric::Pd, &title("PD"))?;
        let sar_svg = render_svg(&sar_series, &limits, Metric::Sar, &title("SAR"))?;
        write_file(&config.out_dir.join(format!("{}_pd.svg", config.scenario)), &pd_svg)?;
        write_file(&config.out_dir.join(format!("{}_sar.svg", config.scenario)), &sar_svg)?;
    }

    write_file(
        &config.out_dir.join("assumptions.txt"),
        &assumptions_text(&campaigns, config),
    )?;

    // Audit report for the first profile, in both structured and plain form.
    if let Some((profile, sweep, campaign)) = first_report {
        let options = ReportOptions {
            trials: campaign.trials.min(1000),
            seed: campaign.seed,
            uplink_duty: campaign.uplink_duty,
        };
        let report = exposure_report(&profile, &[sweep], &options)?;
        write_file(&config.out_dir.join("report.toml"), &report.to_toml())?;
        write_file(&config.out_dir.join("report.txt"), &report.to_text())?;
    }
    Ok(())
}

fn run_min_distance(args: &MinDistanceArgs) -> Result<()> {
    let profile = resolve_profile(&args.profile)?;
    let limit = find_limit(&args.limit)?.at_frequency(profile.carrier_frequency_hz);
    let mut tissue = TissueModel::default();
    if let Some(r) = args.reflection_coefficient {
        tissue.reflection_coefficient = r;
    }
    let outcome = min_safe_distance(&profile, args.station, &limit, &tissue, args.duty)?;
    let station_cfg = match args.station {
        Station::Bs => &profile.bs,
        Station::Ue => &profile.ue,
    };
    println!(
        "profile {} station {:?}: EIRP {:.3} dBm, limit {} = {} {}{}",
        profile.name,
        args.station,
        eirp_dbm(station_cfg),
        limit.id(),
        limit.value,
        limit.unit(),
        if limit.extrapolated {
            " (extrapolated beyond the limit's frequency range)"
        } else {
            ""
        },
    );
    println!(
        "assumptions: free-space spreading, duty {}, R {}, delta {} m, rho {} kg/m3",
        args.duty,
        tissue.reflection_coefficient,
        tissue.penetration_depth_m,
        tissue.mass_density_kg_m3
    );
    if outcome.always_compliant {
        println!("always compliant: exposure stays below the limit at any distance");
    } else {
        println!(
            "minimum separation distance: {:.6} m{}",
            outcome.distance_m,
            if outcome.near_field {
                " (inside the Fraunhofer region; far-field extrapolation)"
            } else {
                ""
            }
        );
    }
    Ok(())
}

fn run_profiles() -> Result<()> {
    for name in BuiltinProfile::ALL {
        let p = builtin_profile(name);
        println!("{}:", p.name);
        println!(
            "  carrier {} GHz, ISD {} m, bandwidth {} MHz, {} sectors/site, {:?}, {} users/sector, outdoor {}%",
            p.carrier_frequency_hz / 1e9,
            p.inter_site_distance_m,
            p.bandwidth_hz / 1e6,
            p.sectors_per_site,
            p.duplexing,
            p.users_per_sector,
            p.outdoor_fraction * 100.0,
        );
        for (label, s) in [("bs", &p.bs), ("ue", &p.ue)] {
            println!(
                "  {label}: gain {} dBi{}, power {} dBm{}, {} antennas, height {} m, NF {} dB -> EIRP {:.3} dBm",
                s.element_gain_dbi,
                if s.gain_is_total { " (total)" } else { "/element" },
                s.tx_power_dbm,
                if s.power_is_total { " (total)" } else { "/element" },
                s.antenna_count,
                s.antenna_height_m,
                s.noise_figure_db,
                eirp_dbm(s),
            );
        }
    }
    Ok(())
}

fn run_depth_profile(args: &DepthProfileArgs) -> Result<()> {
    let table = load_dielectric_table(&args.dielectrics)?;
    let tissue = TissueModel {
        dielectric_table: Some(table),
        ..TissueModel::default()
    };
    let point = tissue
        .dielectric_at(args.frequency)
        .ok_or_else(|| Error::InvalidSpec("dielectric table is empty".into()))?;
    let depth = penetration_depth(args.frequency, point.eps_r, point.sigma_s_per_m)?;
    let r = reflection_coefficient(point.eps_r, point.sigma_s_per_m, args.frequency)?;
    eprintln!(
        "f = {} Hz: eps_r = {:.4}, sigma = {:.4} S/m, penetration depth = {:.6e} m, |R| = {:.4}",
        args.frequency, point.eps_r, point.sigma_s_per_m, depth, r
    );

    let max_depth = if depth.is_finite() { 5.0 * depth } else { 1.0 };
    let profile = sar_depth_profile(1.0, depth, max_depth, args.steps.max(1));
    let mut csv = String::from("depth_m,sar_fraction\n");
    for (z, frac) in profile {
        csv.push_str(&format!("{z:.8e},{frac:.8e}\n"));
    }
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// Dispatches a parsed command line. Runtime failures bubble up for exit
/// code 1; usage errors never reach here (clap exits with 2).
pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep(args) => run_sweep(&args.to_run_config()),
        Command::MinDistance(args) => run_min_distance(args),
        Command::Profiles => run_profiles(),
        Command::DepthProfile(args) => run_depth_profile(args),
    }
}
