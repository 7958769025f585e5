use serde::{Deserialize, Serialize};

use super::series::HeatCapacitySeries;
use crate::error::{ensure_finite, Error, Result};
use crate::stats;
use crate::thermal;
use crate::units::GAS_CONSTANT;

pub const CONDENSATE_LINEAR_ID: &str = "condensate-linear";
pub const DEBYE_ID: &str = "debye";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub value: f64,
    pub stderr: f64,
}

impl Parameter {
    fn new(name: &str, value: f64, stderr: f64) -> Self {
        Self {
            name: name.into(),
            value,
            stderr: if stderr.is_finite() { stderr } else { 0.0 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub t: f64,
    pub observed: f64,
    pub fitted: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model_id: String,
    pub parameters: Vec<Parameter>,
    pub n_points: usize,
    pub weighted: bool,
    pub rmse: f64,
    pub r_squared: f64,
    /// Small-sample-corrected Akaike criterion; absent when n is too small.
    pub aicc: Option<f64>,
    /// The fit cannot determine every derived quantity (e.g. a flat line).
    pub degenerate: bool,
    pub residuals: Vec<Residual>,
    pub warnings: Vec<String>,
}

impl FitReport {
    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.parameter(name).map(|p| p.value)
    }
}

struct Goodness {
    rmse: f64,
    r_squared: f64,
    aicc: Option<f64>,
    residuals: Vec<Residual>,
}

/// `fitted_params` excludes the noise scale, which is counted when no sigma is given.
fn goodness(
    t: &[f64],
    y: &[f64],
    fitted: &[f64],
    sigma: Option<&[f64]>,
    fitted_params: usize,
) -> Goodness {
    let n = y.len();
    let w: Vec<f64> = match sigma {
        Some(s) => s.iter().map(|s| 1.0 / (s * s)).collect(),
        None => vec![1.0; n],
    };
    let sw: f64 = w.iter().sum();
    let ym = y.iter().zip(&w).map(|(y, w)| w * y).sum::<f64>() / sw;
    let mut rss = 0.0;
    let mut wrss = 0.0;
    let mut syy = 0.0;
    let mut residuals = Vec::with_capacity(n);
    for i in 0..n {
        let r = y[i] - fitted[i];
        rss += r * r;
        wrss += w[i] * r * r;
        syy += w[i] * (y[i] - ym).powi(2);
        residuals.push(Residual {
            t: t[i],
            observed: y[i],
            fitted: fitted[i],
            residual: r,
        });
    }
    let r_squared = if syy > 0.0 {
        (1.0 - wrss / syy).clamp(0.0, 1.0)
    } else if wrss == 0.0 {
        1.0
    } else {
        0.0
    };
    let nf = n as f64;
    let (k, base) = match sigma {
        Some(_) => (fitted_params as f64, wrss),
        None => (
            fitted_params as f64 + 1.0,
            nf * (wrss.max(f64::MIN_POSITIVE) / nf).ln(),
        ),
    };
    let aicc = (nf - k - 1.0 > 0.0).then(|| base + 2.0 * k + 2.0 * k * (k + 1.0) / (nf - k - 1.0));
    Goodness {
        rmse: (rss / nf).sqrt(),
        r_squared,
        aicc,
        residuals,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearLawOptions {
    /// C_P reached at the fusion temperature, J/(mol·K); (9/2)ℛ for ice.
    pub plateau: f64,
    /// Fixes the x-intercept ℵT_t (K) and fits the slope alone.
    pub fix_aleph_tt: Option<f64>,
}

impl Default for LinearLawOptions {
    fn default() -> Self {
        Self {
            plateau: 4.5 * GAS_CONSTANT,
            fix_aleph_tt: None,
        }
    }
}

/// Fits C_P = a·(T − ℵT_t) and reports ℵT_t and T_F where the line reaches the plateau.
///
/// Points with C_P = 0 lie below the mixing range and are left out.
pub fn fit_linear_law(
    series: &HeatCapacitySeries,
    options: &LinearLawOptions,
) -> Result<FitReport> {
    series.validate()?;
    ensure_finite("plateau", options.plateau)?;
    let mut warnings = Vec::new();
    let used: Vec<_> = series.points.iter().filter(|p| p.cp > 0.0).collect();
    let skipped = series.len() - used.len();
    if skipped > 0 {
        warnings.push(format!(
            "{skipped} point(s) with zero heat capacity excluded"
        ));
    }
    let min_points = 3;
    if used.len() < min_points {
        return Err(Error::InsufficientDesign(format!(
            "the linear law needs at least {min_points} points with C_P > 0, got {}",
            used.len()
        )));
    }
    let t: Vec<f64> = used.iter().map(|p| p.t).collect();
    let y: Vec<f64> = used.iter().map(|p| p.cp).collect();
    let sigma: Option<Vec<f64>> = used.iter().map(|p| p.sigma).collect();
    let plateau = options.plateau;
    let t_range = t[t.len() - 1] - t[0];
    let y_scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let flat = |slope: f64| slope.abs() * t_range <= 1e-9 * y_scale;

    let (parameters, fitted, fitted_params, degenerate) = match options.fix_aleph_tt {
        None => {
            let line = stats::fit_line(&t, &y, sigma.as_deref())?;
            let (a, b) = (line.slope, line.intercept);
            let (va, vb, cov) = (
                line.slope_stderr.powi(2),
                line.intercept_stderr.powi(2),
                line.covariance,
            );
            let mut params = vec![
                Parameter::new("slope", a, line.slope_stderr),
                Parameter::new("cp_offset", b, line.intercept_stderr),
            ];
            let degenerate = flat(a);
            if !degenerate {
                let x0 = -b / a;
                let (dxa, dxb) = (b / (a * a), -1.0 / a);
                let x0_var = dxa * dxa * va + dxb * dxb * vb + 2.0 * dxa * dxb * cov;
                let tf = (plateau - b) / a;
                let (dta, dtb) = (-(plateau - b) / (a * a), -1.0 / a);
                let tf_var = dta * dta * va + dtb * dtb * vb + 2.0 * dta * dtb * cov;
                params.push(Parameter::new("aleph_tt", x0, x0_var.max(0.0).sqrt()));
                params.push(Parameter::new("t_fusion", tf, tf_var.max(0.0).sqrt()));
            }
            let fitted: Vec<f64> = t.iter().map(|t| a * t + b).collect();
            (params, fitted, 2, degenerate)
        }
        Some(x0) => {
            ensure_finite("fixed aleph_tt", x0)?;
            let w: Vec<f64> = match &sigma {
                Some(s) => s.iter().map(|s| 1.0 / (s * s)).collect(),
                None => vec![1.0; t.len()],
            };
            let sxx: f64 = t.iter().zip(&w).map(|(t, w)| w * (t - x0).powi(2)).sum();
            if sxx <= 0.0 {
                return Err(Error::DegenerateFit(
                    "every point sits at the fixed intercept".into(),
                ));
            }
            let sxy: f64 = (0..t.len()).map(|i| w[i] * (t[i] - x0) * y[i]).sum();
            let a = sxy / sxx;
            let fitted: Vec<f64> = t.iter().map(|t| a * (t - x0)).collect();
            let wrss: f64 = (0..t.len())
                .map(|i| w[i] * (y[i] - fitted[i]).powi(2))
                .sum();
            let scale = if sigma.is_some() {
                1.0
            } else if t.len() > 1 {
                wrss / (t.len() as f64 - 1.0)
            } else {
                0.0
            };
            let va = scale / sxx;
            let mut params = vec![
                Parameter::new("slope", a, va.sqrt()),
                Parameter::new("aleph_tt", x0, 0.0),
            ];
            let degenerate = flat(a);
            if !degenerate {
                let tf = x0 + plateau / a;
                params.push(Parameter::new(
                    "t_fusion",
                    tf,
                    plateau / (a * a) * va.sqrt(),
                ));
            }
            (params, fitted, 1, degenerate)
        }
    };
    if degenerate {
        warnings.push("slope is zero: the intercept and T_F are undefined".into());
    } else if parameters[0].value < 0.0 {
        warnings.push("negative slope: the data do not rise towards the plateau".into());
    }
    let g = goodness(&t, &y, &fitted, sigma.as_deref(), fitted_params);
    Ok(FitReport {
        model_id: CONDENSATE_LINEAR_ID.into(),
        parameters,
        n_points: t.len(),
        weighted: sigma.is_some(),
        rmse: g.rmse,
        r_squared: g.r_squared,
        aicc: g.aicc,
        degenerate,
        residuals: g.residuals,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DebyeOptions {
    /// Fixes the amplitude (atoms per formula unit); free when absent.
    pub n_atoms: Option<f64>,
    /// Search interval for θ_D, K.
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Default for DebyeOptions {
    fn default() -> Self {
        Self {
            n_atoms: None,
            theta_min: 1.0,
            theta_max: 1e4,
        }
    }
}

struct DebyeProfile {
    theta: f64,
    amplitude: f64,
    wrss: f64,
}

/// Profiles the amplitude out for fixed θ_D (variable projection).
fn debye_profile(
    theta: f64,
    t: &[f64],
    y: &[f64],
    w: &[f64],
    fixed: Option<f64>,
) -> Result<DebyeProfile> {
    let basis = t
        .iter()
        .map(|&t| thermal::debye_heat_capacity(t, theta, 1.0))
        .collect::<Result<Vec<f64>>>()?;
    let amplitude = match fixed {
        Some(n) => n,
        None => {
            let num: f64 = (0..t.len()).map(|i| w[i] * basis[i] * y[i]).sum();
            let den: f64 = (0..t.len()).map(|i| w[i] * basis[i] * basis[i]).sum();
            if den > 0.0 {
                num / den
            } else {
                0.0
            }
        }
    };
    let wrss = (0..t.len())
        .map(|i| w[i] * (y[i] - amplitude * basis[i]).powi(2))
        .sum();
    Ok(DebyeProfile {
        theta,
        amplitude,
        wrss,
    })
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Fits the Debye heat capacity with θ_D free (and the amplitude free unless fixed).
pub fn fit_debye(series: &HeatCapacitySeries, options: &DebyeOptions) -> Result<FitReport> {
    series.validate()?;
    if !(options.theta_min > 0.0 && options.theta_max > options.theta_min) {
        return Err(Error::invalid("need 0 < theta_min < theta_max"));
    }
    if let Some(n) = options.n_atoms {
        ensure_finite("n_atoms", n)?;
        if n <= 0.0 {
            return Err(Error::invalid("n_atoms must be positive"));
        }
    }
    let free_params = if options.n_atoms.is_some() { 1 } else { 2 };
    if series.len() <= free_params {
        return Err(Error::InsufficientDesign(format!(
            "the Debye fit needs more than {free_params} points"
        )));
    }
    let t = series.temperatures();
    let y = series.values();
    let sigma = series.sigmas();
    let w: Vec<f64> = match &sigma {
        Some(s) => s.iter().map(|s| 1.0 / (s * s)).collect(),
        None => vec![1.0; t.len()],
    };
    let profile = |log_theta: f64| debye_profile(log_theta.exp(), &t, &y, &w, options.n_atoms);

    // Coarse scan in log θ, then golden-section refinement around the best node.
    let (lo, hi) = (options.theta_min.ln(), options.theta_max.ln());
    let nodes = 64;
    let grid: Vec<f64> = (0..=nodes)
        .map(|i| lo + (hi - lo) * i as f64 / nodes as f64)
        .collect();
    let scan = grid
        .iter()
        .map(|&g| profile(g).map(|p| p.wrss))
        .collect::<Result<Vec<f64>>>()?;
    let best = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(nodes)];
    let mut x1 = a + GOLDEN * (b - a);
    let mut x2 = b - GOLDEN * (b - a);
    let mut f1 = profile(x1)?.wrss;
    let mut f2 = profile(x2)?.wrss;
    for _ in 0..200 {
        if b - a < 1e-12 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + GOLDEN * (b - a);
            f1 = profile(x1)?.wrss;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - GOLDEN * (b - a);
            f2 = profile(x2)?.wrss;
        }
    }
    let fit = profile(0.5 * (a + b))?;
    let mut warnings = Vec::new();
    let edge = 1e-6;
    if (fit.theta / options.theta_min).ln() < edge || (options.theta_max / fit.theta).ln() < edge {
        warnings.push(format!(
            "theta_D = {} K sits on the search boundary",
            fit.theta
        ));
    }

    // Parameter covariance from the Jacobian at the optimum.
    let n = t.len();
    let basis = |theta: f64| -> Result<Vec<f64>> {
        t.iter()
            .map(|&t| thermal::debye_heat_capacity(t, theta, 1.0))
            .collect()
    };
    let f0 = basis(fit.theta)?;
    let h = 1e-5 * fit.theta;
    let fp = basis(fit.theta + h)?;
    let fm = basis(fit.theta - h)?;
    let d_theta: Vec<f64> = (0..n)
        .map(|i| fit.amplitude * (fp[i] - fm[i]) / (2.0 * h))
        .collect();
    let scale = if sigma.is_some() {
        1.0
    } else {
        fit.wrss / (n - free_params) as f64
    };
    let j11: f64 = (0..n).map(|i| w[i] * d_theta[i] * d_theta[i]).sum();
    let (theta_var, amp_var) = if options.n_atoms.is_some() {
        (scale / j11, 0.0)
    } else {
        let j12: f64 = (0..n).map(|i| w[i] * d_theta[i] * f0[i]).sum();
        let j22: f64 = (0..n).map(|i| w[i] * f0[i] * f0[i]).sum();
        let det = j11 * j22 - j12 * j12;
        (scale * j22 / det, scale * j11 / det)
    };
    let fitted: Vec<f64> = f0.iter().map(|f| fit.amplitude * f).collect();
    let g = goodness(&t, &y, &fitted, sigma.as_deref(), free_params);
    Ok(FitReport {
        model_id: DEBYE_ID.into(),
        parameters: vec![
            Parameter::new("theta_d", fit.theta, theta_var.max(0.0).sqrt()),
            Parameter::new("amplitude", fit.amplitude, amp_var.max(0.0).sqrt()),
        ],
        n_points: n,
        weighted: sigma.is_some(),
        rmse: g.rmse,
        r_squared: g.r_squared,
        aicc: g.aicc,
        degenerate: false,
        residuals: g.residuals,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::series::DataPoint;

    fn series(points: &[(f64, f64)]) -> HeatCapacitySeries {
        HeatCapacitySeries::new(
            points
                .iter()
                .map(|&(t, cp)| DataPoint { t, cp, sigma: None })
                .collect(),
            "",
        )
        .unwrap()
    }

    #[test]
    fn exact_line_recovers_intercept_and_plateau_crossing() {
        let plateau = 4.5 * GAS_CONSTANT;
        let pts: Vec<(f64, f64)> = (1..=10)
            .map(|i| {
                let t = 20.0 * i as f64;
                (t, plateau * (t - 7.0) / 266.15)
            })
            .collect();
        let report = fit_linear_law(&series(&pts), &LinearLawOptions::default()).unwrap();
        assert!((report.value("aleph_tt").unwrap() - 7.0).abs() < 1e-9);
        assert!((report.value("t_fusion").unwrap() - 273.15).abs() < 1e-9);
        assert!(!report.degenerate);
        assert_eq!(report.residuals.len(), 10);
    }

    #[test]
    fn constant_data_is_degenerate() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 5.0)).collect();
        let report = fit_linear_law(&series(&pts), &LinearLawOptions::default()).unwrap();
        assert!(report.degenerate);
        assert!(report.value("slope").unwrap().abs() < 1e-12);
        assert!(report.value("t_fusion").is_none());
        assert!(serde_json::to_string(&report)
            .unwrap()
            .find("null")
            .is_none());
    }

    #[test]
    fn zero_points_are_excluded() {
        let pts = [
            (1.0, 0.0),
            (2.0, 0.0),
            (10.0, 1.0),
            (20.0, 2.0),
            (30.0, 3.0),
        ];
        let report = fit_linear_law(&series(&pts), &LinearLawOptions::default()).unwrap();
        assert_eq!(report.n_points, 3);
        assert_eq!(report.warnings.len(), 1);
        let too_few = [(1.0, 0.0), (10.0, 1.0), (20.0, 2.0)];
        assert!(matches!(
            fit_linear_law(&series(&too_few), &LinearLawOptions::default()),
            Err(Error::InsufficientDesign(_))
        ));
    }

    #[test]
    fn fixed_intercept_fit() {
        let pts: Vec<(f64, f64)> = (1..=5)
            .map(|i| (10.0 * i as f64, 0.2 * (10.0 * i as f64 - 7.0)))
            .collect();
        let opts = LinearLawOptions {
            fix_aleph_tt: Some(7.0),
            ..Default::default()
        };
        let report = fit_linear_law(&series(&pts), &opts).unwrap();
        assert!((report.value("slope").unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(report.value("aleph_tt"), Some(7.0));
    }

    #[test]
    fn debye_recovers_generating_parameters() {
        let pts: Vec<(f64, f64)> = (1..=30)
            .map(|i| {
                let t = 10.0 * i as f64;
                (t, thermal::debye_heat_capacity(t, 222.0, 2.0).unwrap())
            })
            .collect();
        let report = fit_debye(&series(&pts), &DebyeOptions::default()).unwrap();
        assert!((report.value("theta_d").unwrap() / 222.0 - 1.0).abs() < 1e-6);
        assert!((report.value("amplitude").unwrap() / 2.0 - 1.0).abs() < 1e-6);
        let fixed = DebyeOptions {
            n_atoms: Some(2.0),
            ..Default::default()
        };
        let report = fit_debye(&series(&pts), &fixed).unwrap();
        assert!((report.value("theta_d").unwrap() / 222.0 - 1.0).abs() < 1e-6);
    }
}
