use std::path::PathBuf;

use qcrystal::dataio::*;
use qcrystal::events::LevelScheme;
use qcrystal::synthetic::{debye_series, linspace, model_series, with_relative_noise};
use qcrystal::thermal::CrystalModel;
use qcrystal::units::GAS_CONSTANT;
use qcrystal::{units, Error};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn ice_series() -> HeatCapacitySeries {
    model_series(&CrystalModel::ice_ih(), &linspace(10.0, 270.0, 100)).unwrap()
}

#[test]
fn save_and_load_round_trip() {
    let noisy = with_relative_noise(&ice_series(), 0.01, 5, 0, true).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    save_series(&noisy, &path).unwrap();
    let back = load_series(&path, SeriesFormat::Csv).unwrap();
    assert_eq!(back, noisy);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = "# provenance: hand typed\nT_K,Cp_J_per_molK\n10,1.0\n20,abc\n";
    match parse_series(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("unexpected {other:?}"),
    }
    assert!(parse_series("T_K,Cp_J_per_molK\n").is_err());
    assert!(parse_series("T_K,Cp_J_per_molK,sigma\n10,1,0.1\n20,2,\n").is_err());
}

#[test]
fn noiseless_ice_law_recovers_its_parameters() {
    let report = fit_linear_law(&ice_series(), &LinearLawOptions::default()).unwrap();
    let aleph_tt = report.value("aleph_tt").unwrap();
    let t_f = report.value("t_fusion").unwrap();
    assert!((aleph_tt / 7.0 - 1.0).abs() < 1e-8, "{aleph_tt}");
    assert!((t_f / 273.15 - 1.0).abs() < 1e-8, "{t_f}");
    let slope = 4.5 * GAS_CONSTANT / 266.15;
    assert!((report.value("slope").unwrap() / slope - 1.0).abs() < 1e-8);
    assert!(report.rmse < 1e-10);
}

#[test]
fn noiseless_debye_recovers_its_parameters() {
    let series = debye_series(222.0, 1.0, &linspace(10.0, 270.0, 100)).unwrap();
    let report = fit_debye(&series, &DebyeOptions::default()).unwrap();
    assert!((report.value("theta_d").unwrap() / 222.0 - 1.0).abs() < 1e-8);
    assert!((report.value("amplitude").unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn noisy_intercept_is_calibrated() {
    let base = ice_series();
    let mut hits = 0;
    for rep in 0..100 {
        let noisy = with_relative_noise(&base, 0.01, 7, rep, true).unwrap();
        let report = fit_linear_law(&noisy, &LinearLawOptions::default()).unwrap();
        if (report.value("aleph_tt").unwrap() - 7.0).abs() <= 1.5 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "{hits}/100 within ±1.5 K");
}

#[test]
fn comparison_picks_the_generating_model() {
    let temps = linspace(10.0, 270.0, 100);
    let linear = ice_series();
    let debye = debye_series(222.0, 1.0, &temps).unwrap();
    let candidates = Candidate::defaults();
    let mut linear_hits = 0;
    let mut debye_hits = 0;
    for rep in 0..100 {
        let a = with_relative_noise(&linear, 0.01, 11, rep, true).unwrap();
        let b = with_relative_noise(&debye, 0.01, 12, rep, true).unwrap();
        let results = compare_many(&[a, b], &candidates);
        if results[0].as_ref().unwrap().best() == Some(CONDENSATE_LINEAR_ID) {
            linear_hits += 1;
        }
        if results[1].as_ref().unwrap().best() == Some(DEBYE_ID) {
            debye_hits += 1;
        }
    }
    assert!(linear_hits >= 95, "linear {linear_hits}/100");
    assert!(debye_hits >= 95, "debye {debye_hits}/100");
}

#[test]
fn equal_sigma_weighting_changes_nothing() {
    let noisy = with_relative_noise(&ice_series(), 0.01, 3, 0, false).unwrap();
    let weighted = HeatCapacitySeries::new(
        noisy
            .points
            .iter()
            .map(|p| DataPoint {
                sigma: Some(0.25),
                ..*p
            })
            .collect(),
        "equal sigma",
    )
    .unwrap();
    let a = fit_linear_law(&noisy, &LinearLawOptions::default()).unwrap();
    let b = fit_linear_law(&weighted, &LinearLawOptions::default()).unwrap();
    assert!(!a.weighted && b.weighted);
    for name in ["slope", "aleph_tt", "t_fusion"] {
        let (x, y) = (a.value(name).unwrap(), b.value(name).unwrap());
        assert!((x / y - 1.0).abs() < 1e-10, "{name}: {x} vs {y}");
    }
    let a = fit_debye(&noisy, &DebyeOptions::default()).unwrap();
    let b = fit_debye(&weighted, &DebyeOptions::default()).unwrap();
    assert!((a.value("theta_d").unwrap() / b.value("theta_d").unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn reports_round_trip_through_json() {
    let noisy = with_relative_noise(&ice_series(), 0.01, 3, 0, true).unwrap();
    let cmp = compare_models(&noisy, &Candidate::defaults()).unwrap();
    let text = serde_json::to_string(&cmp).unwrap();
    let back: Comparison = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cmp);
}

#[test]
fn identical_candidates_tie_in_id_order() {
    let series = ice_series();
    let mut b = Candidate::condensate_linear();
    b.model_id = "b-linear".into();
    let mut a = Candidate::condensate_linear();
    a.model_id = "a-linear".into();
    let cmp = compare_models(&series, &[b, a, Candidate::debye()]).unwrap();
    assert_eq!(&cmp.ranking[..2], ["a-linear", "b-linear"]);
    assert_eq!(
        cmp.ties,
        vec![("a-linear".to_string(), "b-linear".to_string())]
    );
}

#[test]
fn failed_candidate_gives_partial_report() {
    let flat = HeatCapacitySeries::new(
        (1..=10)
            .map(|i| DataPoint {
                t: 10.0 * i as f64,
                cp: 0.0,
                sigma: None,
            })
            .collect(),
        "all zero",
    )
    .unwrap();
    let cmp = compare_models(&flat, &Candidate::defaults()).unwrap();
    assert!(cmp.partial);
    assert!(cmp.results.iter().any(|r| r.failure.is_some()));
}

#[test]
fn shipped_fixtures_match_their_recipe() {
    let temps = linspace(10.0, 270.0, 100);
    let ice = ice_series();
    let read = |name: &str| std::fs::read_to_string(fixture(name)).unwrap();
    assert_eq!(read("synthetic_ice.csv"), ice.to_csv());
    assert_eq!(
        read("synthetic_ice_noisy.csv"),
        with_relative_noise(&ice, 0.01, 2024, 0, true)
            .unwrap()
            .to_csv()
    );
    assert_eq!(
        read("synthetic_debye.csv"),
        debye_series(222.0, 1.0, &temps).unwrap().to_csv()
    );
    let levels = LevelScheme::harmonic(12, units::cm1_to_joule(200.0)).unwrap();
    assert_eq!(read("levels_harmonic12.csv"), levels.to_csv());
    assert_eq!(read("ice.model"), CrystalModel::ice_ih().to_config());
    assert_eq!(read("kdp.model"), CrystalModel::kdp().to_config());
}
