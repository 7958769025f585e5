use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qcrystal::condensate::{self, AmplitudeMode, PhaseModel, ScalingConfig};
use qcrystal::config::{parse_quantity, Dimension, KeyValues};
use qcrystal::dataio::{self, Candidate, DebyeOptions, LinearLawOptions, ModelSpec, SeriesFormat};
use qcrystal::events::{self, LevelScheme, SamplerConfig};
use qcrystal::potentials::{self, DoubleWellSpec};
use qcrystal::thermal::{self, CrystalKind, CrystalModel};
use qcrystal::units::{self, GAS_CONSTANT};
use qcrystal::{rng, Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::args::*;

/// What a subcommand produced, before it is routed to files or streams.
pub struct Outcome {
    /// Primary machine-readable output (CSV or JSON).
    pub data: String,
    /// Secondary JSON output: (explicit path, default suffix, content).
    pub report: Option<(Option<PathBuf>, &'static str, String)>,
    /// Human-readable lines.
    pub summary: String,
}

impl Outcome {
    fn new(data: String, summary: String) -> Self {
        Self {
            data,
            report: None,
            summary,
        }
    }
}

fn schema_line(kind: &str) -> String {
    format!("# schema: qcrystal/{kind}/1\n")
}

fn to_json(value: &impl Serialize) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::InvalidInput(format!("cannot serialize output: {e}")))
}

fn flag_error(flag: &str, err: Error) -> Error {
    match err {
        Error::Parse { message, .. } => Error::InvalidInput(format!("--{flag}: {message}")),
        other => other,
    }
}

/// Energy-like quantity in joules; `Hz` is accepted as a frequency unit.
fn parse_frequency(flag: &str, text: &str) -> Result<f64> {
    let trimmed = text.trim();
    if let Some(number) = trimmed.strip_suffix("Hz") {
        return number
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("--{flag}: `{text}` is not a frequency")));
    }
    parse_quantity(trimmed, Dimension::Energy, 0)
        .map(units::joule_to_hz)
        .map_err(|e| flag_error(flag, e))
}

fn parse_energy_default_joule(flag: &str, text: &str) -> Result<f64> {
    let trimmed = text.trim();
    if trimmed.split_whitespace().count() == 1 {
        if let Ok(v) = trimmed.parse::<f64>() {
            return Ok(v);
        }
    }
    parse_quantity(trimmed, Dimension::Energy, 0).map_err(|e| flag_error(flag, e))
}

pub fn load_model(name: &str) -> Result<CrystalModel> {
    if let Some(model) = CrystalModel::preset(name) {
        return Ok(model);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::Configuration(format!(
            "`{name}` is neither a preset (ice, kdp) nor a model file"
        )));
    }
    CrystalModel::from_config(&KeyValues::read(path)?)
}

pub fn spectrum(args: &SpectrumArgs) -> Result<Outcome> {
    let mut kv = match &args.config {
        Some(path) => KeyValues::read(path)?,
        None => KeyValues::default(),
    };
    let defaults = [
        ("barrier_height", "4000 cm-1"),
        ("well_separation", "0.7"),
        ("asymmetry_bias", "0 cm-1"),
        ("grid_min", "-1.0"),
        ("grid_max", "1.0"),
        ("grid_points", "4096"),
    ];
    for (key, value) in defaults {
        if !kv.contains(key) {
            kv.insert(key, value);
        }
    }
    let overrides = [
        ("barrier_height", &args.barrier),
        ("well_separation", &args.separation),
        ("asymmetry_bias", &args.bias),
        ("particle_mass", &args.mass),
        ("grid_min", &args.grid_min),
        ("grid_max", &args.grid_max),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            kv.insert(key, v.as_str());
        }
    }
    if let Some(points) = args.points {
        kv.insert("grid_points", points.to_string());
    }
    let spec = DoubleWellSpec::from_config(&kv)?;
    let hamiltonian = potentials::build_hamiltonian(&spec)?;
    let spectrum = potentials::solve_levels(&hamiltonian, args.levels)?;

    let mut summary = String::new();
    for level in &spectrum.levels {
        let _ = writeln!(
            summary,
            "E{} = {:.6} cm-1",
            level.index,
            units::joule_to_cm1(level.energy)
        );
    }
    match potentials::two_level_parameters(&spectrum) {
        Ok(p) => {
            let _ = writeln!(
                summary,
                "nu1 = {:.6e} Hz ({:.6} cm-1), nut = {:.6e} Hz ({:.6} cm-1), T_t = {:.6} K, lower well {:?}",
                p.nu1,
                units::joule_to_cm1(units::hz_to_joule(p.nu1)),
                p.nut,
                units::joule_to_cm1(units::hz_to_joule(p.nut)),
                p.tunnelling_temperature(),
                p.lower_well
            );
        }
        Err(e) => {
            let _ = writeln!(summary, "two-level reduction unavailable: {e}");
        }
    }
    Ok(Outcome::new(
        schema_line("spectrum") + &spectrum.to_csv(),
        summary,
    ))
}

pub fn condensate(args: &CondensateArgs, seed: u64) -> Result<Outcome> {
    let config = ScalingConfig {
        phases: match args.phases {
            PhaseArg::Random => PhaseModel::Random,
            PhaseArg::Coherent => PhaseModel::Coherent,
        },
        amplitudes: match args.amplitudes {
            AmplitudeArg::Uniform => AmplitudeMode::Uniform,
            AmplitudeArg::Normalized => AmplitudeMode::Normalized,
        },
        ..ScalingConfig::new(args.n.clone(), args.trials, seed)
    };
    let study = condensate::scaling_study(&config)?;
    let mut summary = format!(
        "slope = {:.4} ± {:.4} (log-log fit over {} term counts, {} trials each)\n",
        study.slope,
        study.slope_stderr,
        study.rows.len(),
        args.trials
    );
    for row in &study.rows {
        let _ = writeln!(
            summary,
            "n = {}: mean |Phi|^2 = {:.6e} (expected {:.6e}), isotropy p = {:.3}",
            row.n,
            row.mean_abs_phi_sq,
            row.expected_abs_phi_sq,
            row.isotropy_p_value(args.trials)
        );
    }
    let _ = writeln!(summary, "rng: {}", study.rng_algorithm);
    Ok(Outcome::new(
        schema_line("condensate") + &study.to_csv(),
        summary,
    ))
}

fn default_range(model: &CrystalModel) -> (f64, f64) {
    match model.kind {
        CrystalKind::IceLike => (model.floor(), model.t_transition),
        CrystalKind::KdpLike => (1.0, model.t_max_valid),
    }
}

pub fn heat_capacity(args: &HeatCapacityArgs) -> Result<Outcome> {
    let model = load_model(&args.model)?;
    let points = match args.at {
        Some(t) => vec![thermal::heat_capacity_point(t, &model)?],
        None => {
            let (lo, hi) = default_range(&model);
            thermal::heat_capacity_table(
                &model,
                args.from.unwrap_or(lo),
                args.to.unwrap_or(hi),
                args.step,
            )?
        }
    };
    let mut summary = String::new();
    if let Some(t) = args.at {
        let cp = points[0].cp;
        let _ = writeln!(summary, "{cp:.4} J/(mol·K)");
        let _ = writeln!(
            summary,
            "C_P({t} K) = {cp} J/(mol·K) = {:.6} R for model {}",
            cp / GAS_CONSTANT,
            model.name
        );
    } else {
        let _ = writeln!(
            summary,
            "{} rows for model {} ({} K to {} K)",
            points.len(),
            model.name,
            points[0].t,
            points[points.len() - 1].t
        );
    }
    let beyond = points.iter().filter(|p| p.beyond_validity).count();
    if beyond > 0 {
        let _ = writeln!(
            summary,
            "warning: {beyond} row(s) lie above the validated limit {} K",
            model.t_max_valid
        );
    }
    Ok(Outcome::new(
        schema_line("heat-capacity") + &thermal::heat_capacity_csv(&points),
        summary,
    ))
}

pub fn q_temperature(args: &QTemperatureArgs) -> Result<Outcome> {
    let model = load_model(&args.model)?;
    if let Some(nut_text) = &args.nut {
        let nut = parse_frequency("nut", nut_text)?;
        let (nu1, t) = match (&args.nu1, args.transition_temperature) {
            (Some(nu1_text), None) => {
                let nu1 = parse_frequency("nu1", nu1_text)?;
                let params = potentials::TwoLevelParams::new(nu1, nut)?;
                let t = match model.kind {
                    CrystalKind::IceLike => thermal::fusion_temperature(&params, &model)?,
                    CrystalKind::KdpLike => thermal::kdp_transition_temperature(&params, &model)?,
                };
                (nu1, t)
            }
            (None, Some(t)) => {
                let nu1 = match model.kind {
                    CrystalKind::IceLike => thermal::fusion_asymmetry(t, nut, &model)?,
                    CrystalKind::KdpLike => thermal::kdp_asymmetry(t, nut, &model)?,
                };
                (nu1, t)
            }
            _ => {
                return Err(Error::InvalidInput(
                    "--nut needs exactly one of --nu1 or --transition-temperature".into(),
                ))
            }
        };
        let doc = json!({
            "schema": "qcrystal/transition/1",
            "model": model.name,
            "kind": model.kind,
            "nu1_hz": nu1,
            "nut_hz": nut,
            "transition_temperature_k": t,
        });
        let summary = format!(
            "{} transition at {t:.6} K for nu1 = {nu1:.6e} Hz, nut = {nut:.6e} Hz\n",
            model.name
        );
        return Ok(Outcome::new(to_json(&doc)?, summary));
    }

    let temperatures = match args.at {
        Some(t) => vec![t],
        None => {
            let (lo, hi) = default_range(&model);
            thermal::temperature_grid(args.from.unwrap_or(lo), args.to.unwrap_or(hi), args.step)?
        }
    };
    let mut data = schema_line("q-temperature");
    data.push_str("T_K,theta_K,alpha_sq,beta_sq,v_theta_J_per_mol\n");
    for &t in &temperatures {
        match model.kind {
            CrystalKind::IceLike => {
                let m = thermal::mix_state(t, &model)?;
                let _ = writeln!(
                    data,
                    "{t},{},{},{},{}",
                    m.theta, m.alpha_sq, m.beta_sq, m.v_theta
                );
            }
            CrystalKind::KdpLike => {
                let theta = thermal::q_temperature(t, &model)?;
                let _ = writeln!(data, "{t},{theta},,,");
            }
        }
    }
    let summary = match args.at {
        Some(t) => format!("Theta({t} K) = {} K\n", thermal::q_temperature(t, &model)?),
        None => format!("{} rows for model {}\n", temperatures.len(), model.name),
    };
    Ok(Outcome::new(data, summary))
}

#[derive(Serialize)]
struct EventsReport<'a> {
    schema: &'static str,
    v_target_j: f64,
    tolerance_j: f64,
    samples: usize,
    theta_k: Option<f64>,
    theta_source: &'static str,
    fit: Option<events::BoltzmannFit>,
    fit_error: Option<String>,
    diagnostics: &'a [events::ChainDiagnostics],
    burn_in_sweeps: usize,
    thin_sweeps: usize,
    rng_algorithm: &'static str,
}

pub fn sample_events(args: &SampleEventsArgs, seed: u64) -> Result<Outcome> {
    let mut scheme = LevelScheme::read(&args.levels)?;
    if let Some(j_max) = args.truncate {
        scheme = scheme.truncate(j_max)?;
    }
    let v_target = parse_energy_default_joule("v-target", &args.v_target)?;
    let tolerance = args
        .tol
        .as_deref()
        .map(|t| parse_energy_default_joule("tol", t))
        .transpose()?;
    let config = SamplerConfig {
        samples: args.samples,
        seed,
        tolerance,
        chains: args.chains,
        burn_in_sweeps: args.burn_in,
        thin_sweeps: args.thin,
    };
    let run = events::sample_constrained_states(&scheme, v_target, &config)?;
    let stats = events::occupation_statistics(&scheme, &run.states)?;

    let (theta, theta_source, theta_error) = match args.theta {
        Some(t) => (Some(t), "given", None),
        None => match events::canonical_theta(&scheme, v_target) {
            Ok(t) => (Some(t), "canonical", None),
            Err(e) => (None, "unavailable", Some(e.to_string())),
        },
    };
    let (fit, fit_error) = match theta {
        Some(t) => match events::boltzmann_fit(&stats, t) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, theta_error),
    };
    let report = EventsReport {
        schema: "qcrystal/events-fit/1",
        v_target_j: v_target,
        tolerance_j: run.tolerance,
        samples: run.states.len(),
        theta_k: theta,
        theta_source,
        fit: fit.clone(),
        fit_error: fit_error.clone(),
        diagnostics: &run.diagnostics,
        burn_in_sweeps: args.burn_in,
        thin_sweeps: args.thin,
        rng_algorithm: rng::RNG_ALGORITHM,
    };
    let mut summary = format!(
        "{} samples over {} levels, shell {:.3e} ± {:.3e} J\n",
        run.states.len(),
        scheme.len(),
        v_target,
        run.tolerance
    );
    match (&fit, &fit_error) {
        (Some(f), _) => {
            let _ = writeln!(
                summary,
                "Boltzmann fit at Theta = {:.4} K ({theta_source}): slope {:.4}, R^2 {:.4}, KL {:.3e}",
                f.theta, f.slope, f.r_squared, f.kl_divergence
            );
            for w in &f.warnings {
                let _ = writeln!(summary, "warning: {w}");
            }
        }
        (None, Some(e)) => {
            let _ = writeln!(summary, "Boltzmann fit unavailable: {e}");
        }
        (None, None) => {}
    }
    Ok(Outcome {
        data: schema_line("occupations") + &stats.to_csv(),
        report: Some((args.report.clone(), ".fit.json", to_json(&report)?)),
        summary,
    })
}

fn linear_options(options: &ModelOptions) -> Result<LinearLawOptions> {
    if !(options.dof > 0.0 && options.dof.is_finite()) {
        return Err(Error::InvalidInput("--dof must be positive".into()));
    }
    Ok(LinearLawOptions {
        plateau: 0.5 * options.dof * GAS_CONSTANT,
        fix_aleph_tt: options.fix_aleph_tt,
    })
}

fn candidates(options: &ModelOptions, model: FitModelArg) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    if matches!(model, FitModelArg::Condensate | FitModelArg::Both) {
        out.push(Candidate {
            model_id: dataio::CONDENSATE_LINEAR_ID.into(),
            model: ModelSpec::CondensateLinear(linear_options(options)?),
        });
    }
    if matches!(model, FitModelArg::Debye | FitModelArg::Both) {
        out.push(Candidate {
            model_id: dataio::DEBYE_ID.into(),
            model: ModelSpec::Debye(DebyeOptions {
                n_atoms: options.n_atoms,
                ..DebyeOptions::default()
            }),
        });
    }
    Ok(out)
}

fn report_summary(summary: &mut String, report: &dataio::FitReport) {
    let params: Vec<String> = report
        .parameters
        .iter()
        .map(|p| format!("{} = {:.6} ± {:.2e}", p.name, p.value, p.stderr))
        .collect();
    let _ = writeln!(
        summary,
        "{}: {}; rmse {:.4e}, R^2 {:.6}",
        report.model_id,
        params.join(", "),
        report.rmse,
        report.r_squared
    );
    for w in &report.warnings {
        let _ = writeln!(summary, "  warning: {w}");
    }
}

pub fn fit(args: &FitArgs) -> Result<Outcome> {
    let series = dataio::load_series(&args.input, SeriesFormat::Csv)?;
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    let mut last_error = None;
    for candidate in candidates(&args.options, args.model)? {
        match candidate.fit(&series) {
            Ok(r) => reports.push(r),
            Err(e) => {
                failures.push(json!({ "model_id": candidate.model_id, "error": e.to_string() }));
                last_error = Some(e);
            }
        }
    }
    if reports.is_empty() {
        return Err(last_error.unwrap_or_else(|| Error::InvalidInput("no model selected".into())));
    }
    let mut summary = String::new();
    for r in &reports {
        report_summary(&mut summary, r);
    }
    let doc = json!({
        "schema": "qcrystal/fit-report/1",
        "provenance": series.provenance,
        "n_points": series.len(),
        "reports": reports,
        "failures": failures,
    });
    Ok(Outcome::new(to_json(&doc)?, summary))
}

pub fn compare(args: &CompareArgs) -> Result<Outcome> {
    let series = args
        .input
        .iter()
        .map(|p| dataio::load_series(p, SeriesFormat::Csv))
        .collect::<Result<Vec<_>>>()?;
    let candidates = candidates(&args.options, FitModelArg::Both)?;
    let results = dataio::compare_many(&series, &candidates);
    let mut comparisons = Vec::new();
    let mut summary = String::new();
    for (path, result) in args.input.iter().zip(results) {
        let cmp = result?;
        let _ = writeln!(
            summary,
            "{}: ranking {}{}{}",
            path.display(),
            cmp.ranking.join(" > "),
            if cmp.ties.is_empty() { "" } else { " (tie)" },
            if cmp.partial { " (partial)" } else { "" }
        );
        comparisons.push(json!({ "input": path, "comparison": cmp }));
    }
    let doc = json!({
        "schema": "qcrystal/comparison/1",
        "comparisons": comparisons,
    });
    Ok(Outcome::new(to_json(&doc)?, summary))
}
