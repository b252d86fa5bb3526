//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use emf_exposure::compliance::{find_limit, limit_registry, min_safe_distance, Station};
use emf_exposure::exposure::{penetration_depth, sar_from_pd, TissueModel};
use emf_exposure::montecarlo::{local_maxima, run_campaign, CampaignSpec, SweepSpec};
use emf_exposure::profiles::{builtin_profile, BuiltinProfile, StationConfig};
use emf_exposure::radio::{dbm_to_watts, power_density, LinkGeometry, PathlossModel};

fn criterion<F: FnOnce() + UnwindSafe>(name: &str, body: F) {
    match catch_unwind(body) {
        Ok(()) => println!("ACCEPTANCE {name}: PASS"),
        Err(e) => {
            println!("ACCEPTANCE {name}: FAIL");
            resume_unwind(e);
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn assert_within(elapsed: Duration, budget: Duration, what: &str) {
    assert!(
        elapsed <= budget,
        "{what} took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn sar_formula_identity() {
    criterion("SAR formula identity", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let pd = rng.gen_range(0.0..1e4);
            let r = rng.gen_range(0.0..1.0);
            let delta = rng.gen_range(1e-5..1e-1);
            let rho = rng.gen_range(100.0..3000.0);
            let tissue = TissueModel {
                reflection_coefficient: r,
                penetration_depth_m: delta,
                mass_density_kg_m3: rho,
                dielectric_table: None,
            };
            let expected = 2.0 * pd * (1.0 - r * r) / (delta * rho);
            assert!(rel_err(sar_from_pd(pd, &tissue), expected) <= 1e-12);
        }
        // study constants: delta = 1e-3 m, rho = 1 g/cm^3, pd = 10, R = 0
        let tissue = TissueModel {
            reflection_coefficient: 0.0,
            ..TissueModel::default()
        };
        assert_eq!(sar_from_pd(10.0, &tissue), 20.0);
        assert_within(start.elapsed(), Duration::from_secs(1), "SAR identity");
    });
}

#[test]
fn inverse_square_law() {
    criterion("Inverse-square law", || {
        let start = Instant::now();
        for i in 0..=400 {
            let d = 0.01 * 10f64.powf(5.0 * i as f64 / 400.0); // log grid [0.01, 1000]
            let g1 = LinkGeometry::new(d, 0.0, 0.0);
            let g2 = LinkGeometry::new(2.0 * d, 0.0, 0.0);
            let p1 = power_density(60.0, &g1, PathlossModel::FreeSpace, 28e9).unwrap();
            let p2 = power_density(60.0, &g2, PathlossModel::FreeSpace, 28e9).unwrap();
            assert!(rel_err(p2, p1 / 4.0) <= 1e-12);
        }
        assert_within(start.elapsed(), Duration::from_secs(1), "inverse-square");
    });
}

#[test]
fn parameter_table_fidelity() {
    criterion("Parameter table fidelity", || {
        let check_station =
            |s: &StationConfig, gain: f64, power: f64, count: u32, height: f64, nf: f64| {
                assert_eq!(s.element_gain_dbi, gain);
                assert_eq!(s.tx_power_dbm, power);
                assert_eq!(s.antenna_count, count);
                assert_eq!(s.antenna_height_m, height);
                assert_eq!(s.noise_figure_db, nf);
            };

        let nr = builtin_profile(BuiltinProfile::Nr5g);
        assert_eq!(nr.carrier_frequency_hz, 28.0e9);
        assert_eq!(nr.inter_site_distance_m, 200.0);
        assert_eq!(nr.bandwidth_hz, 850.0e6);
        check_station(&nr.bs, 8.0, 18.0, 256, 25.0, 5.0);
        assert!(!nr.bs.power_is_total && !nr.bs.gain_is_total);
        check_station(&nr.ue, 20.0, 35.0, 16, 1.5, 9.0);
        assert!(nr.ue.power_is_total && nr.ue.gain_is_total);

        let lte = builtin_profile(BuiltinProfile::Lte4g);
        assert_eq!(lte.carrier_frequency_hz, 2.0e9);
        assert_eq!(lte.inter_site_distance_m, 500.0);
        assert_eq!(lte.bandwidth_hz, 20.0e6);
        check_station(&lte.bs, 8.0, 44.0, 4, 35.0, 5.0);
        check_station(&lte.ue, 1.0, 23.0, 4, 1.5, 9.0);

        let g39 = builtin_profile(BuiltinProfile::G39);
        assert_eq!(g39.carrier_frequency_hz, 1.9e9);
        assert_eq!(g39.inter_site_distance_m, 1000.0);
        assert_eq!(g39.bandwidth_hz, 20.0e6);
        check_station(&g39.bs, 17.0, 43.0, 4, 32.0, 5.0);
        check_station(&g39.ue, 1.0, 33.0, 1, 1.5, 9.0);
    });
}

fn deterministic_downlink(name: BuiltinProfile) -> CampaignSpec {
    let sweep = SweepSpec {
        step_m: 10.0,
        ..SweepSpec::downlink(builtin_profile(name), TissueModel::default())
    };
    let mut c = CampaignSpec::new(sweep);
    c.trials = 1;
    c.jitter = 0.0;
    c
}

#[test]
fn downlink_bounce_structure() {
    criterion("Downlink bounce structure", || {
        let start = Instant::now();
        let cases = [
            (BuiltinProfile::Nr5g, vec![0.0, 200.0, 400.0, 600.0, 800.0, 1000.0]),
            (BuiltinProfile::Lte4g, vec![0.0, 500.0, 1000.0]),
            (BuiltinProfile::G39, vec![0.0, 1000.0]),
        ];
        for (name, expected_marks) in cases {
            let result = run_campaign(&deterministic_downlink(name)).unwrap();
            let pd: Vec<f64> = result.records.iter().map(|r| r.mean_pd_w_m2).collect();
            let peaks: Vec<f64> = local_maxima(&pd)
                .into_iter()
                .map(|i| result.records[i].distance_m)
                .collect();
            assert_eq!(peaks, expected_marks, "{name}: peaks {peaks:?}");
        }
        assert_within(start.elapsed(), Duration::from_secs(10), "bounce structure");
    });
}

#[test]
fn monte_carlo_convergence() {
    criterion("Monte Carlo convergence", || {
        let start = Instant::now();
        let make = |trials: u64| {
            let mut c = CampaignSpec::new(SweepSpec::uplink(
                builtin_profile(BuiltinProfile::Nr5g),
                TissueModel::default(),
            ));
            c.trials = trials;
            c.jitter = 1.0;
            c.seed = 11;
            c
        };
        let small = run_campaign(&make(100)).unwrap();
        let large = run_campaign(&make(10_000)).unwrap();
        // std-error of the mean = std / sqrt(trials); average the ratio over
        // marks to damp the noise in the N=100 std estimate.
        let mut ratios = Vec::new();
        for (a, b) in small.records.iter().zip(&large.records) {
            if a.std_pd > 0.0 && b.std_pd > 0.0 {
                let se_small = a.std_pd / (100f64).sqrt();
                let se_large = b.std_pd / (10_000f64).sqrt();
                ratios.push(se_small / se_large);
            }
        }
        assert!(!ratios.is_empty());
        let mean_ratio: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!(
            (5.0..=20.0).contains(&mean_ratio),
            "std-error shrink factor {mean_ratio}"
        );
        assert_within(start.elapsed(), Duration::from_secs(60), "convergence");
    });
}

/// Closed-form inversion of the free-space SAR exposure; independent oracle.
fn analytic_sar_distance(eirp_w: f64, r: f64, duty: f64, limit: f64, tissue: &TissueModel) -> f64 {
    (eirp_w * duty * 2.0 * (1.0 - r * r)
        / (4.0 * std::f64::consts::PI
            * tissue.penetration_depth_m
            * tissue.mass_density_kg_m3
            * limit))
        .sqrt()
}

fn profile_with_ue_eirp(eirp_dbm: f64) -> emf_exposure::profiles::SystemProfile {
    let mut p = builtin_profile(BuiltinProfile::Nr5g);
    p.ue.tx_power_dbm = eirp_dbm;
    p.ue.element_gain_dbi = 0.0;
    p.ue.gain_is_total = true;
    p.ue.power_is_total = true;
    p
}

#[test]
fn min_distance_solver_matches_closed_form() {
    criterion("Min-distance solver vs closed form", || {
        let start = Instant::now();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base_limit = find_limit("icnirp-sar").unwrap();
        for case in 0..100 {
            let eirp = rng.gen_range(30.0..70.0);
            let r = rng.gen_range(0.0..0.95);
            let duty = rng.gen_range(0.05..1.0);
            let limit_value = rng.gen_range(0.5..10.0);
            let tissue = TissueModel {
                reflection_coefficient: r,
                ..TissueModel::default()
            };
            let mut limit = base_limit.clone();
            limit.value = limit_value;
            let profile = profile_with_ue_eirp(eirp);
            let out = min_safe_distance(&profile, Station::Ue, &limit, &tissue, duty).unwrap();
            let oracle =
                analytic_sar_distance(dbm_to_watts(eirp), r, duty, limit_value, &tissue);
            assert!(
                rel_err(out.distance_m, oracle) <= 1e-6,
                "case {case}: got {} want {oracle}",
                out.distance_m
            );
        }
        // worked case: EIRP 55 dBm, R 0.6, duty 1, limit 2 W/kg
        let tissue = TissueModel::default();
        let out = min_safe_distance(
            &profile_with_ue_eirp(55.0),
            Station::Ue,
            &base_limit,
            &tissue,
            1.0,
        )
        .unwrap();
        let oracle = analytic_sar_distance(dbm_to_watts(55.0), 0.6, 1.0, 2.0, &tissue);
        assert!(rel_err(out.distance_m, oracle) <= 1e-6);
        assert!((oracle - 4.0132).abs() < 1e-3);
        assert_within(start.elapsed(), Duration::from_secs(1), "min-distance");
    });
}

#[test]
fn uplink_threshold_existence() {
    criterion("Uplink threshold existence", || {
        // One admissible assumption set (UE transmitting 5% of the time)
        // puts the 2 W/kg crossing inside (0, 1] m. See README "Model
        // assumptions" for why the exact crossing value is configuration-
        // dependent.
        let duty = 0.05;
        let mut c = CampaignSpec::new(SweepSpec::uplink(
            builtin_profile(BuiltinProfile::Nr5g),
            TissueModel::default(),
        ));
        c.trials = 1;
        c.jitter = 0.0;
        c.uplink_duty = duty;
        let result = run_campaign(&c).unwrap();
        let limit = find_limit("icnirp-sar").unwrap();

        let first = result.records.first().unwrap();
        let last = result.records.last().unwrap();
        assert!(first.mean_sar_w_kg > limit.value, "no exceedance near contact");
        assert!(last.mean_sar_w_kg < limit.value, "still above limit at 1 m");

        // bracketing marks around the crossing
        let crossing = result
            .records
            .windows(2)
            .find(|w| w[0].mean_sar_w_kg >= limit.value && w[1].mean_sar_w_kg < limit.value)
            .expect("crossing exists within (0, 1] m");

        // the solver lands inside the same bracket
        let out = min_safe_distance(
            &builtin_profile(BuiltinProfile::Nr5g),
            Station::Ue,
            &limit,
            &TissueModel::default(),
            duty,
        )
        .unwrap();
        assert!(!out.always_compliant);
        assert!(out.distance_m > 0.0 && out.distance_m <= 1.0);
        assert!(
            out.distance_m >= crossing[0].distance_m && out.distance_m <= crossing[1].distance_m,
            "solver {} outside sweep bracket [{}, {}]",
            out.distance_m,
            crossing[0].distance_m,
            crossing[1].distance_m
        );
    });
}

#[test]
fn limit_registry_contents() {
    criterion("Limit registry", || {
        let limits = limit_registry();
        let pd = limits.iter().find(|l| l.id() == "icnirp-pd").unwrap();
        assert_eq!(pd.value, 10.0);
        let sar = limits.iter().find(|l| l.id() == "icnirp-sar").unwrap();
        assert_eq!(sar.value, 2.0);
        assert_eq!(sar.averaging_basis, "10 g tissue");
        assert!(sar.at_frequency(28e9).extrapolated);
        assert!(!sar.at_frequency(2e9).extrapolated);
    });
}

#[test]
fn penetration_depth_ordering() {
    criterion("Penetration-depth ordering", || {
        let start = Instant::now();
        // fixed lossy dielectric
        let (eps_r, sigma) = (35.0, 15.0);
        let d_5g = penetration_depth(28e9, eps_r, sigma).unwrap();
        let d_4g = penetration_depth(2e9, eps_r, sigma).unwrap();
        let d_39g = penetration_depth(1.9e9, eps_r, sigma).unwrap();
        assert!(d_5g < d_4g && d_4g < d_39g);

        // equal incident PD: shallower penetration concentrates absorption
        let sar_at = |delta: f64| {
            let tissue = TissueModel {
                penetration_depth_m: delta,
                ..TissueModel::default()
            };
            sar_from_pd(1.0, &tissue)
        };
        assert!(sar_at(d_5g) > sar_at(d_4g) && sar_at(d_4g) > sar_at(d_39g));
        assert_within(start.elapsed(), Duration::from_secs(1), "depth ordering");
    });
}

#[test]
fn determinism_across_parallelism() {
    criterion("Determinism", || {
        let mut c = CampaignSpec::new(SweepSpec::uplink(
            builtin_profile(BuiltinProfile::Nr5g),
            TissueModel::default(),
        ));
        c.trials = 500;
        c.jitter = 1.0;
        c.seed = 99;

        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_campaign(&c).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_campaign(&c).unwrap());
        assert_eq!(single.to_csv().into_bytes(), many.to_csv().into_bytes());
        assert_eq!(single.to_csv(), run_campaign(&c).unwrap().to_csv());
    });
}
