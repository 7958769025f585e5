use proptest::prelude::*;

use qcrystal::dataio::*;
use qcrystal::potentials::TwoLevelParams;
use qcrystal::synthetic::linspace;
use qcrystal::thermal::*;

fn ice_like() -> impl Strategy<Value = CrystalModel> {
    (1u32..20, 0.1f64..5.0, 50.0f64..400.0, 1.0f64..20.0).prop_filter_map(
        "floor below transition",
        |(aleph, t_t, t_f, dof)| {
            let model = CrystalModel {
                name: "prop".into(),
                kind: CrystalKind::IceLike,
                aleph,
                t_tunnel: t_t,
                t_transition: t_f,
                dof_equipartition: dof,
                t_max_valid: t_f,
            };
            (model.floor() < 0.9 * t_f).then_some(model)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixing_weights_are_a_partition(model in ice_like(), u in 0.0f64..=1.0) {
        let t = model.floor() + u * (model.t_transition - model.floor());
        let s = mix_state(t, &model).unwrap();
        prop_assert!((s.alpha_sq + s.beta_sq - 1.0).abs() < 1e-12);
        prop_assert!(s.alpha_sq >= 0.0 && s.beta_sq >= 0.0);
        prop_assert!(s.theta >= 0.0);
    }

    #[test]
    fn ice_heat_capacity_is_non_decreasing(model in ice_like(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let t = |u: f64| u * model.t_transition;
        prop_assert!(heat_capacity(t(lo), &model).unwrap() <= heat_capacity(t(hi), &model).unwrap());
    }

    #[test]
    fn fusion_round_trip(model in ice_like(), t_f in 1.0f64..2000.0, log_nut in 3.0f64..13.0) {
        let nut = 10f64.powf(log_nut);
        let nu1 = fusion_asymmetry(t_f, nut, &model).unwrap();
        let back = fusion_temperature(&TwoLevelParams::new(nu1, nut).unwrap(), &model).unwrap();
        prop_assert!((back / t_f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn debye_is_increasing_and_bounded(theta in 10.0f64..2000.0, t1 in 0.1f64..5000.0, t2 in 0.1f64..5000.0) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let a = debye_heat_capacity(lo, theta, 1.0).unwrap();
        let b = debye_heat_capacity(hi, theta, 1.0).unwrap();
        prop_assert!(a <= b * (1.0 + 1e-12));
        prop_assert!(b <= 3.0 * qcrystal::units::GAS_CONSTANT * (1.0 + 1e-12));
    }

    #[test]
    fn series_csv_round_trip(values in prop::collection::vec((0.0f64..1e3, 0.001f64..10.0), 1..40)) {
        let temps = linspace(1.0, 500.0, values.len());
        let points = temps
            .iter()
            .zip(&values)
            .map(|(&t, &(cp, s))| DataPoint { t, cp, sigma: Some(s) })
            .collect();
        let series = HeatCapacitySeries::new(points, "generated").unwrap();
        prop_assert_eq!(parse_series(&series.to_csv()).unwrap(), series);
    }

    #[test]
    fn exact_lines_are_recovered(slope in 0.01f64..2.0, x0 in 0.5f64..50.0) {
        let temps = linspace(x0 + 1.0, x0 + 300.0, 30);
        let series = HeatCapacitySeries::from_fn(&temps, "line", |t| Ok(slope * (t - x0))).unwrap();
        let report = fit_linear_law(&series, &LinearLawOptions::default()).unwrap();
        prop_assert!((report.value("aleph_tt").unwrap() - x0).abs() < 1e-8 * x0.max(1.0));
        prop_assert!((report.value("slope").unwrap() / slope - 1.0).abs() < 1e-9);
    }
}
