//! Q-temperature state, heat-capacity laws and transition conditions of the
//! condensate model, plus the Debye model as a density-of-states baseline.
//!
//! Ice-like crystals (ℵ, T_t, T_F, ν equipartition pairs):
//!
//! ```text
//! |α|² = (T − ℵT_t)/(T_F − ℵT_t)     |β|² = (T_F − T)/(T_F − ℵT_t)
//! Θ    = T − ℵT_t                    𝒱(Θ) = |α|²·νℛT_F + |β|²·ℵℛT_t
//! C_P  = (ν/2)ℛ·|α|²  on [ℵT_t, T_F],   0 below ℵT_t
//! ℵ𝒩_A h(ν₁ − ν_t/2) = νℛT_F         (fusion)
//! ```
//!
//! KDP-like crystals (transition at T₀, prefactor ν):
//!
//! ```text
//! C_P = νℛ·T/T₀ below T₀, νℛ above     Θ = T below T₀, T − T₀ above
//! ℵ𝒩_A h(ν₁ + ν_t/2) = νℛT₀            (ferroelectric transition)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{Dimension, KeyValues};
use crate::error::{ensure_finite, Error, Result};
use crate::potentials::TwoLevelParams;
use crate::quadrature;
use crate::units::{self, AVOGADRO, GAS_CONSTANT, PLANCK};

/// Measured C_P(T_F)/((9/2)ℛ) reported for ordinary ice.
pub const REPORTED_ICE_FUSION_RATIO: f64 = 1.01;
/// Measured C_P/(12ℛ) reported for KH₂PO₄ near T₀.
pub const REPORTED_KDP_TRANSITION_RATIO: f64 = 1.002;
/// Default upper validity bound for the KDP plateau (decomposition limit unknown).
pub const DEFAULT_KDP_T_MAX_VALID: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrystalKind {
    IceLike,
    KdpLike,
}

impl fmt::Display for CrystalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrystalKind::IceLike => "ice-like",
            CrystalKind::KdpLike => "kdp-like",
        })
    }
}

impl FromStr for CrystalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ice-like" | "ice" => Ok(CrystalKind::IceLike),
            "kdp-like" | "kdp" => Ok(CrystalKind::KdpLike),
            other => Err(Error::Configuration(format!(
                "unknown crystal kind `{other}` (expected ice-like or kdp-like)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrystalModel {
    pub name: String,
    pub kind: CrystalKind,
    /// ℵ: number of two-level entities entering the transition.
    pub aleph: u32,
    /// T_t = hν_t/k_B, K.
    pub t_tunnel: f64,
    /// T_F (ice-like) or T₀ (kdp-like), K.
    pub t_transition: f64,
    /// Equipartition prefactor ν in multiples of ℛ (9 for H₂O, 12 for KH₂PO₄).
    pub dof_equipartition: f64,
    /// Upper end of the validated temperature range, K.
    pub t_max_valid: f64,
}

pub const MODEL_CONFIG_KEYS: [&str; 7] = [
    "name",
    "kind",
    "aleph",
    "t_tunnel",
    "t_transition",
    "dof_equipartition",
    "t_max_valid",
];

impl CrystalModel {
    /// Ordinary ice Iₕ: ℵ = 7, T_t = 1 K, T_F = 273.15 K, 9ℛ.
    pub fn ice_ih() -> Self {
        Self {
            name: "ice-Ih".into(),
            kind: CrystalKind::IceLike,
            aleph: 7,
            t_tunnel: 1.0,
            t_transition: units::ICE_MELTING_POINT,
            dof_equipartition: 9.0,
            t_max_valid: units::ICE_MELTING_POINT,
        }
    }

    /// KH₂PO₄: T₀ = 122 K, 12ℛ, four double wells per formula unit.
    pub fn kdp() -> Self {
        Self {
            name: "KH2PO4".into(),
            kind: CrystalKind::KdpLike,
            aleph: 4,
            t_tunnel: 0.0,
            t_transition: 122.0,
            dof_equipartition: 12.0,
            t_max_valid: DEFAULT_KDP_T_MAX_VALID,
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "ice" | "ice-Ih" | "ice-ih" => Some(Self::ice_ih()),
            "kdp" | "KDP" | "KH2PO4" => Some(Self::kdp()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_finite("t_tunnel", self.t_tunnel)?;
        ensure_finite("t_transition", self.t_transition)?;
        ensure_finite("dof_equipartition", self.dof_equipartition)?;
        if self.aleph < 1 {
            return Err(Error::Configuration("aleph must be at least 1".into()));
        }
        if self.t_tunnel < 0.0 {
            return Err(Error::Configuration("t_tunnel must be non-negative".into()));
        }
        if self.dof_equipartition <= 0.0 || self.t_transition <= 0.0 {
            return Err(Error::Configuration(
                "dof_equipartition and t_transition must be positive".into(),
            ));
        }
        if self.kind == CrystalKind::IceLike && self.t_transition <= self.floor() {
            return Err(Error::Configuration(format!(
                "t_transition ({} K) must exceed aleph·t_tunnel ({} K)",
                self.t_transition,
                self.floor()
            )));
        }
        if !(self.t_max_valid >= self.t_transition) {
            return Err(Error::Configuration(
                "t_max_valid must be at least t_transition".into(),
            ));
        }
        Ok(())
    }

    /// ℵT_t, the lower edge of the ice-like mixing range.
    pub fn floor(&self) -> f64 {
        f64::from(self.aleph) * self.t_tunnel
    }

    pub fn from_config(kv: &KeyValues) -> Result<Self> {
        kv.check_keys(&MODEL_CONFIG_KEYS)?;
        let kind: CrystalKind = kv.require_str("kind")?.parse()?;
        let aleph = kv
            .get_usize("aleph")?
            .ok_or_else(|| Error::Configuration("missing required key `aleph`".into()))?;
        let t_transition = kv.require_quantity("t_transition", Dimension::Temperature)?;
        let model = Self {
            name: kv.get_str("name").unwrap_or("custom").to_string(),
            kind,
            aleph: u32::try_from(aleph)
                .map_err(|_| Error::Configuration("aleph is too large".into()))?,
            t_tunnel: kv
                .get_quantity("t_tunnel", Dimension::Temperature)?
                .unwrap_or(0.0),
            t_transition,
            dof_equipartition: kv.get_f64("dof_equipartition")?.ok_or_else(|| {
                Error::Configuration("missing required key `dof_equipartition`".into())
            })?,
            t_max_valid: kv
                .get_quantity("t_max_valid", Dimension::Temperature)?
                .unwrap_or(match kind {
                    CrystalKind::IceLike => t_transition,
                    CrystalKind::KdpLike => DEFAULT_KDP_T_MAX_VALID,
                }),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn to_config(&self) -> String {
        format!(
            "name = {}\nkind = {}\naleph = {}\nt_tunnel = {} K\nt_transition = {} K\ndof_equipartition = {}\nt_max_valid = {} K\n",
            self.name,
            self.kind,
            self.aleph,
            self.t_tunnel,
            self.t_transition,
            self.dof_equipartition,
            self.t_max_valid
        )
    }

    fn require_kind(&self, kind: CrystalKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "model `{}` is {}, operation needs {kind}",
                self.name, self.kind
            )))
        }
    }
}

fn check_temperature(t: f64) -> Result<()> {
    ensure_finite("temperature", t)?;
    if t < 0.0 {
        return Err(Error::invalid(format!(
            "temperature must be non-negative, got {t} K"
        )));
    }
    Ok(())
}

/// (|α|², |β|², Θ, 𝒱(Θ)) at bath temperature T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixState {
    pub alpha_sq: f64,
    pub beta_sq: f64,
    /// K.
    pub theta: f64,
    /// J/mol.
    pub v_theta: f64,
}

pub fn mix_state(t: f64, model: &CrystalModel) -> Result<MixState> {
    model.validate()?;
    model.require_kind(CrystalKind::IceLike)?;
    check_temperature(t)?;
    let floor = model.floor();
    let t_f = model.t_transition;
    if t < floor {
        return Err(Error::ForbiddenState { t, floor });
    }
    if t > t_f {
        return Err(Error::OutOfPhase { t, ceiling: t_f });
    }
    let width = t_f - floor;
    let alpha_sq = (t - floor) / width;
    let beta_sq = (t_f - t) / width;
    let v_theta = alpha_sq * model.dof_equipartition * GAS_CONSTANT * t_f
        + beta_sq * f64::from(model.aleph) * GAS_CONSTANT * model.t_tunnel;
    Ok(MixState {
        alpha_sq,
        beta_sq,
        theta: t - floor,
        v_theta,
    })
}

/// C_P in J/(mol·K).
pub fn heat_capacity(t: f64, model: &CrystalModel) -> Result<f64> {
    model.validate()?;
    check_temperature(t)?;
    match model.kind {
        CrystalKind::IceLike => {
            let floor = model.floor();
            if t <= floor {
                return Ok(0.0);
            }
            if t > model.t_transition {
                return Err(Error::OutOfPhase {
                    t,
                    ceiling: model.t_transition,
                });
            }
            Ok(0.5 * model.dof_equipartition * GAS_CONSTANT * (t - floor)
                / (model.t_transition - floor))
        }
        CrystalKind::KdpLike => {
            let plateau = model.dof_equipartition * GAS_CONSTANT;
            if t <= model.t_transition {
                Ok(plateau * t / model.t_transition)
            } else {
                Ok(plateau)
            }
        }
    }
}

/// Θ in kelvin.
pub fn q_temperature(t: f64, model: &CrystalModel) -> Result<f64> {
    model.validate()?;
    check_temperature(t)?;
    match model.kind {
        CrystalKind::IceLike => {
            let floor = model.floor();
            if t < floor {
                return Err(Error::ForbiddenState { t, floor });
            }
            if t > model.t_transition {
                return Err(Error::OutOfPhase {
                    t,
                    ceiling: model.t_transition,
                });
            }
            Ok(t - floor)
        }
        CrystalKind::KdpLike => Ok(if t <= model.t_transition {
            t
        } else {
            t - model.t_transition
        }),
    }
}

/// One row of a heat-capacity table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatCapacityPoint {
    pub t: f64,
    pub cp: f64,
    pub theta: Option<f64>,
    pub alpha_sq: Option<f64>,
    pub beta_sq: Option<f64>,
    /// T lies beyond `t_max_valid`.
    pub beyond_validity: bool,
}

pub fn heat_capacity_point(t: f64, model: &CrystalModel) -> Result<HeatCapacityPoint> {
    let cp = heat_capacity(t, model)?;
    let (theta, alpha_sq, beta_sq) = match model.kind {
        CrystalKind::IceLike if t >= model.floor() => {
            let mix = mix_state(t, model)?;
            (Some(mix.theta), Some(mix.alpha_sq), Some(mix.beta_sq))
        }
        CrystalKind::IceLike => (None, None, None),
        CrystalKind::KdpLike => (Some(q_temperature(t, model)?), None, None),
    };
    Ok(HeatCapacityPoint {
        t,
        cp,
        theta,
        alpha_sq,
        beta_sq,
        beyond_validity: t > model.t_max_valid,
    })
}

/// Temperatures `from, from + step, …` up to and including `to`.
pub fn temperature_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    ensure_finite("from", from)?;
    ensure_finite("to", to)?;
    ensure_finite("step", step)?;
    if step <= 0.0 || to < from {
        return Err(Error::invalid("need step > 0 and to ≥ from"));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    let mut ts: Vec<f64> = (0..=count).map(|i| from + i as f64 * step).collect();
    // Rounding can leave the last point a hair either side of `to`.
    match ts.last_mut() {
        Some(last) if (to - *last).abs() <= 1e-9 * step => *last = to,
        _ => ts.push(to),
    }
    Ok(ts)
}

pub fn heat_capacity_table(
    model: &CrystalModel,
    from: f64,
    to: f64,
    step: f64,
) -> Result<Vec<HeatCapacityPoint>> {
    temperature_grid(from, to, step)?
        .into_iter()
        .map(|t| heat_capacity_point(t, model))
        .collect()
}

pub fn heat_capacity_csv(points: &[HeatCapacityPoint]) -> String {
    use std::fmt::Write as _;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("T_K,Cp_J_per_molK,theta_K,alpha_sq,beta_sq\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            p.t,
            p.cp,
            opt(p.theta),
            opt(p.alpha_sq),
            opt(p.beta_sq)
        );
    }
    out
}

fn two_level_inputs(params: &TwoLevelParams) -> Result<()> {
    ensure_finite("nu1", params.nu1)?;
    ensure_finite("nut", params.nut)?;
    if params.nu1 < 0.0 || params.nut < 0.0 {
        return Err(Error::UnphysicalParameter(
            "frequencies must be non-negative".into(),
        ));
    }
    Ok(())
}

/// T_F = ℵ𝒩_A h(ν₁ − ν_t/2)/(νℛ).
pub fn fusion_temperature(params: &TwoLevelParams, model: &CrystalModel) -> Result<f64> {
    model.require_kind(CrystalKind::IceLike)?;
    two_level_inputs(params)?;
    let eigen = params.nu1 - 0.5 * params.nut;
    if eigen <= 0.0 {
        return Err(Error::UnphysicalParameter(format!(
            "fusion needs nu1 > nut/2 (nu1 = {}, nut = {})",
            params.nu1, params.nut
        )));
    }
    Ok(f64::from(model.aleph) * AVOGADRO * PLANCK * eigen
        / (model.dof_equipartition * GAS_CONSTANT))
}

/// ν₁ that gives fusion at `t_fusion` for a fixed splitting `nut`.
pub fn fusion_asymmetry(t_fusion: f64, nut: f64, model: &CrystalModel) -> Result<f64> {
    model.require_kind(CrystalKind::IceLike)?;
    ensure_finite("t_fusion", t_fusion)?;
    ensure_finite("nut", nut)?;
    if t_fusion <= 0.0 || nut < 0.0 {
        return Err(Error::UnphysicalParameter(
            "need t_fusion > 0 and nut ≥ 0".into(),
        ));
    }
    Ok(model.dof_equipartition * GAS_CONSTANT * t_fusion
        / (f64::from(model.aleph) * AVOGADRO * PLANCK)
        + 0.5 * nut)
}

/// T₀ = ℵ𝒩_A h(ν₁ + ν_t/2)/(νℛ).
pub fn kdp_transition_temperature(params: &TwoLevelParams, model: &CrystalModel) -> Result<f64> {
    model.require_kind(CrystalKind::KdpLike)?;
    two_level_inputs(params)?;
    if params.nu1 == 0.0 && params.nut == 0.0 {
        return Err(Error::UnphysicalParameter(
            "nu1 and nut cannot both vanish".into(),
        ));
    }
    Ok(
        f64::from(model.aleph) * AVOGADRO * PLANCK * (params.nu1 + 0.5 * params.nut)
            / (model.dof_equipartition * GAS_CONSTANT),
    )
}

/// ν₁ that puts the transition at `t0` for a fixed splitting `nut`.
pub fn kdp_asymmetry(t0: f64, nut: f64, model: &CrystalModel) -> Result<f64> {
    model.require_kind(CrystalKind::KdpLike)?;
    ensure_finite("t0", t0)?;
    ensure_finite("nut", nut)?;
    if t0 <= 0.0 || nut < 0.0 {
        return Err(Error::UnphysicalParameter("need t0 > 0 and nut ≥ 0".into()));
    }
    let nu1 = model.dof_equipartition * GAS_CONSTANT * t0
        / (f64::from(model.aleph) * AVOGADRO * PLANCK)
        - 0.5 * nut;
    if nu1 < 0.0 {
        return Err(Error::UnphysicalParameter(format!(
            "splitting {nut} Hz alone exceeds the transition energy"
        )));
    }
    Ok(nu1)
}

/// Beyond this reduced upper limit the Debye integrand is below 1e-290.
const DEBYE_X_CUTOFF: f64 = 750.0;

/// ∫₀^y x⁴eˣ/(eˣ − 1)² dx.
pub fn debye_integral(y: f64) -> Result<f64> {
    ensure_finite("upper limit", y)?;
    if y < 0.0 {
        return Err(Error::invalid("Debye integral needs a non-negative limit"));
    }
    let upper = y.min(DEBYE_X_CUTOFF);
    let integrand = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let s = (0.5 * x).sinh();
        x * x * x * x / (4.0 * s * s)
    };
    Ok(quadrature::integrate(integrand, 0.0, upper, 0.0, 1e-12)?.value)
}

/// Debye C_V = 9nℛ(T/θ_D)³ ∫₀^{θ_D/T} x⁴eˣ/(eˣ − 1)² dx, J/(mol·K).
pub fn debye_heat_capacity(t: f64, theta_d: f64, n_atoms: f64) -> Result<f64> {
    check_temperature(t)?;
    ensure_finite("theta_D", theta_d)?;
    ensure_finite("n_atoms", n_atoms)?;
    if theta_d <= 0.0 || n_atoms <= 0.0 {
        return Err(Error::invalid("theta_D and n_atoms must be positive"));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let r = t / theta_d;
    Ok(9.0 * n_atoms * GAS_CONSTANT * r * r * r * debye_integral(theta_d / t)?)
}
