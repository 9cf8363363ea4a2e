//! Experiment configuration: TOML schema, unit handling, defaults, and
//! conversion into the core parameter types.
//!
//! Diffusion coefficients are strings with a mandatory unit suffix,
//! either `um2/s` or `m2/s` (`um^2/s`, `µm²/s` and friends are accepted
//! too); everything is converted to the internal canonical um^2/s.
//! Times are plain seconds, distances plain micrometers.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use mcsbm_core::fhtd::{ClosedForm, FhtdVariant, MobileChannelParams};
use mcsbm_core::sbm::IncrementScheme;
use mcsbm_core::spbs::SimConfig;

/// Configuration errors carry the offending key so the CLI can exit with
/// a actionable diagnostic (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: &str, what: impl fmt::Display) -> ConfigError {
    ConfigError(format!("{key}: {what}"))
}

fn unit_factor(unit: &str) -> Option<f64> {
    match unit {
        "um2/s" | "um^2/s" | "µm2/s" | "µm^2/s" | "µm²/s" | "um²/s" => Some(1.0),
        "m2/s" | "m^2/s" | "m²/s" => Some(1e12),
        _ => None,
    }
}

/// Parses `"<number> <unit>"` into um^2/s. The unit suffix is mandatory.
///
/// The split point is the first position where the prefix is a valid
/// number and the suffix a known unit, so scientific notation (whose `e`
/// is alphabetic) parses fine.
pub fn parse_diffusion(key: &str, raw: &str) -> Result<f64, ConfigError> {
    let s = raw.trim();
    let mut saw_unit_like = false;
    for (pos, c) in s.char_indices() {
        if !(c.is_ascii_alphabetic() || c == 'µ') {
            continue;
        }
        saw_unit_like = true;
        let (num, unit) = s.split_at(pos);
        let (Ok(value), Some(factor)) = (num.trim().parse::<f64>(), unit_factor(unit.trim()))
        else {
            continue;
        };
        let um2s = value * factor;
        if !um2s.is_finite() || um2s < 0.0 {
            return Err(err(key, format!("diffusion coefficient {s:?} must be >= 0")));
        }
        return Ok(um2s);
    }
    if saw_unit_like {
        Err(err(key, format!("unknown unit in {s:?} (use um2/s or m2/s)")))
    } else {
        Err(err(key, format!("missing unit suffix in {s:?} (use um2/s or m2/s)")))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub d_m: String,
    pub d_tx: String,
    pub d_rx: String,
    pub alpha: f64,
    pub t_s: f64,
    pub k: u32,
    pub r0_um: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        // reference setup: molecule at 5 um^2/s released at k = 1, T_s = 1 s,
        // devices 10 um apart
        Self {
            d_m: "5 um2/s".into(),
            d_tx: "0 um2/s".into(),
            d_rx: "0.5 um2/s".into(),
            alpha: 1.0,
            t_s: 1.0,
            k: 1,
            r0_um: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantOpt {
    Printed,
    Normalized,
}

impl From<VariantOpt> for FhtdVariant {
    fn from(v: VariantOpt) -> Self {
        match v {
            VariantOpt::Printed => FhtdVariant::Printed,
            VariantOpt::Normalized => FhtdVariant::Normalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClosedFormOpt {
    Printed,
    Corrected,
}

impl From<ClosedFormOpt> for ClosedForm {
    fn from(v: ClosedFormOpt) -> Self {
        match v {
            ClosedFormOpt::Printed => ClosedForm::Printed,
            ClosedFormOpt::Corrected => ClosedForm::Corrected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeOpt {
    PaperIid,
    Exact,
}

impl From<SchemeOpt> for IncrementScheme {
    fn from(v: SchemeOpt) -> Self {
        match v {
            SchemeOpt::PaperIid => IncrementScheme::PaperIid,
            SchemeOpt::Exact => IncrementScheme::ExactTimeChange,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FhtdSection {
    pub variant: VariantOpt,
    pub alphas: Vec<f64>,
    /// `(d_tx, d_rx)` pairs, unit-suffixed.
    pub device_sets: Vec<(String, String)>,
    pub t_max: f64,
    pub t_step: f64,
    /// Adds an empirical-density column from a particle run.
    pub spbs_overlay: bool,
    pub spbs_particles: u64,
}

impl Default for FhtdSection {
    fn default() -> Self {
        Self {
            variant: VariantOpt::Printed,
            alphas: vec![0.5, 1.0, 1.5],
            device_sets: vec![
                ("5 um2/s".into(), "5 um2/s".into()),
                ("0 um2/s".into(), "5 um2/s".into()),
                ("5 um2/s".into(), "0 um2/s".into()),
            ],
            t_max: 50.0,
            t_step: 0.5,
            spbs_overlay: true,
            spbs_particles: 20_000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HittingSection {
    pub variant: VariantOpt,
    pub closed_form: ClosedFormOpt,
    pub alphas: Vec<f64>,
    pub d_rx_values: Vec<String>,
    pub t_max: f64,
    pub t_step: f64,
}

impl Default for HittingSection {
    fn default() -> Self {
        Self {
            variant: VariantOpt::Printed,
            closed_form: ClosedFormOpt::Corrected,
            alphas: vec![0.5, 1.0, 1.5],
            d_rx_values: vec!["0.5 um2/s".into(), "50 um2/s".into()],
            t_max: 50.0,
            t_step: 0.25,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistancePdfSection {
    pub device_sets: Vec<(String, String)>,
    pub n_points: usize,
    /// Grid reach in units of the largest sigma_k beyond r0.
    pub reach_sigmas: f64,
}

impl Default for DistancePdfSection {
    fn default() -> Self {
        Self {
            device_sets: vec![
                ("1 um2/s".into(), "1 um2/s".into()),
                ("5 um2/s".into(), "5 um2/s".into()),
            ],
            n_points: 4001,
            reach_sigmas: 10.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub dt: f64,
    pub n_particles: u64,
    pub horizon: f64,
    pub seed: u64,
    pub scheme: SchemeOpt,
    pub bridge_correction: bool,
    pub delay_release_on_collision: bool,
    /// `release_time = k * t_s` when absent.
    pub release_time: Option<f64>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            dt: 0.5,
            n_particles: 20_000,
            horizon: 100.0,
            seed: 1,
            scheme: SchemeOpt::PaperIid,
            bridge_correction: false,
            delay_release_on_collision: false,
            release_time: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaMode {
    /// Literal truncated first moment over one sampling interval.
    TruncatedMean,
    /// Truncated mean normalized by the interval hitting mass.
    NormalizedMean,
    /// Explicit threshold from `eta_seconds`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MobilityDevice {
    Tx,
    Rx,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirSection {
    pub variant: VariantOpt,
    pub closed_form: ClosedFormOpt,
    pub alphas: Vec<f64>,
    /// Which device the mobility sweep applies to.
    pub mobility_device: MobilityDevice,
    pub mobility_values: Vec<String>,
    /// Diffusion coefficient of the non-swept device.
    pub d_fixed: String,
    pub t1: f64,
    pub tu: f64,
    pub eta_mode: EtaMode,
    pub eta_seconds: Option<f64>,
    pub beta_step: f64,
}

impl Default for AirSection {
    fn default() -> Self {
        Self {
            variant: VariantOpt::Normalized,
            closed_form: ClosedFormOpt::Corrected,
            alphas: vec![0.9, 1.0, 1.1],
            mobility_device: MobilityDevice::Tx,
            mobility_values: vec!["0.5 um2/s".into(), "5 um2/s".into()],
            d_fixed: "0 um2/s".into(),
            t1: 1.0,
            tu: 40.0,
            eta_mode: EtaMode::TruncatedMean,
            eta_seconds: None,
            beta_step: 0.01,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    /// Shrinks the particle budgets (and widens the Monte Carlo gates
    /// accordingly) for a quick smoke run.
    pub fast: bool,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self { fast: false }
    }
}

/// Whole experiment configuration; every section falls back to defaults
/// mirroring the reference parameter sets.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub channel: ChannelSection,
    #[serde(default)]
    pub fhtd: FhtdSection,
    #[serde(default)]
    pub hitting: HittingSection,
    #[serde(default)]
    pub distance_pdf: DistancePdfSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub air: AirSection,
    #[serde(default)]
    pub validate: ValidateSection,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).map_err(|e| ConfigError(format!("{e}")))?;
        cfg.validated()
    }

    /// Re-validates every cross-field invariant; serde only checks shape.
    pub fn validated(self) -> Result<Self, ConfigError> {
        self.base_params()?; // channel section invariants
        if self.fhtd.alphas.is_empty() {
            return Err(err("fhtd.alphas", "must not be empty"));
        }
        if !(self.fhtd.t_step > 0.0) || !(self.fhtd.t_max >= self.fhtd.t_step) {
            return Err(err("fhtd.t_max/t_step", "need 0 < t_step <= t_max"));
        }
        for (i, &a) in self.fhtd.alphas.iter().enumerate() {
            if !(a > 0.0 && a <= 2.0) {
                return Err(err("fhtd.alphas", format!("entry {i} out of (0, 2]")));
            }
        }
        for (i, (dtx, drx)) in self.fhtd.device_sets.iter().enumerate() {
            let key = format!("fhtd.device_sets[{i}]");
            let tx = parse_diffusion(&key, dtx)?;
            let rx = parse_diffusion(&key, drx)?;
            if tx + rx == 0.0 {
                return Err(err(&key, "mobile density needs d_tx + d_rx > 0"));
            }
        }
        if !(self.hitting.t_step > 0.0) || !(self.hitting.t_max >= self.hitting.t_step) {
            return Err(err("hitting.t_max/t_step", "need 0 < t_step <= t_max"));
        }
        for (i, &a) in self.hitting.alphas.iter().enumerate() {
            if !(a > 0.0 && a <= 2.0) {
                return Err(err("hitting.alphas", format!("entry {i} out of (0, 2]")));
            }
        }
        for (i, v) in self.hitting.d_rx_values.iter().enumerate() {
            parse_diffusion(&format!("hitting.d_rx_values[{i}]"), v)?;
        }
        if self.distance_pdf.n_points < 16 {
            return Err(err("distance_pdf.n_points", "need at least 16 points"));
        }
        if !(self.distance_pdf.reach_sigmas >= 6.0) {
            return Err(err(
                "distance_pdf.reach_sigmas",
                "need >= 6 sigmas for the tail to be negligible",
            ));
        }
        for (i, (dtx, drx)) in self.distance_pdf.device_sets.iter().enumerate() {
            let key = format!("distance_pdf.device_sets[{i}]");
            let tx = parse_diffusion(&key, dtx)?;
            let rx = parse_diffusion(&key, drx)?;
            if tx + rx == 0.0 {
                return Err(err(&key, "distance law needs d_tx + d_rx > 0"));
            }
        }
        self.sim_config()?; // simulate section invariants
        if self.air.alphas.is_empty() {
            return Err(err("air.alphas", "must not be empty"));
        }
        for (i, &a) in self.air.alphas.iter().enumerate() {
            if !(a > 0.0 && a <= 2.0) {
                return Err(err("air.alphas", format!("entry {i} out of (0, 2]")));
            }
        }
        if self.air.mobility_values.is_empty() {
            return Err(err("air.mobility_values", "must not be empty"));
        }
        for (i, v) in self.air.mobility_values.iter().enumerate() {
            parse_diffusion(&format!("air.mobility_values[{i}]"), v)?;
        }
        parse_diffusion("air.d_fixed", &self.air.d_fixed)?;
        if !(self.air.t1 > 0.0 && self.air.tu > self.air.t1) {
            return Err(err("air.t1/tu", "need 0 < t1 < tu"));
        }
        if !(self.air.beta_step > 0.0 && self.air.beta_step <= 0.5) {
            return Err(err("air.beta_step", "need 0 < beta_step <= 0.5"));
        }
        if self.air.eta_mode == EtaMode::Fixed {
            match self.air.eta_seconds {
                Some(v) if v > 0.0 && v < self.air.tu => {}
                _ => {
                    return Err(err(
                        "air.eta_seconds",
                        "eta_mode = \"fixed\" needs eta_seconds in (0, tu)",
                    ))
                }
            }
        }
        Ok(self)
    }

    /// Channel parameters from the `[channel]` section.
    pub fn base_params(&self) -> Result<MobileChannelParams, ConfigError> {
        let c = &self.channel;
        MobileChannelParams::new(
            parse_diffusion("channel.d_m", &c.d_m)?,
            parse_diffusion("channel.d_tx", &c.d_tx)?,
            parse_diffusion("channel.d_rx", &c.d_rx)?,
            c.alpha,
            c.t_s,
            c.k,
            c.r0_um,
        )
        .map_err(|e| err("channel", e))
    }

    /// Simulation configuration from `[channel]` + `[simulate]`.
    pub fn sim_config(&self) -> Result<SimConfig, ConfigError> {
        let params = self.base_params()?;
        let s = &self.simulate;
        let release_time = s
            .release_time
            .unwrap_or(params.k as f64 * params.t_s);
        let cfg = SimConfig {
            params,
            dt: s.dt,
            n_particles: s.n_particles,
            horizon: s.horizon,
            seed: s.seed,
            scheme: s.scheme.into(),
            release_time,
            bridge_correction: s.bridge_correction,
            delay_release_on_collision: s.delay_release_on_collision,
        };
        cfg.validate().map_err(|e| err("simulate", e))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_parsing() {
        assert_eq!(parse_diffusion("k", "5 um2/s").unwrap(), 5.0);
        assert_eq!(parse_diffusion("k", "5um2/s").unwrap(), 5.0);
        assert_eq!(parse_diffusion("k", "0.5e-12 m2/s").unwrap(), 0.5);
        assert_eq!(parse_diffusion("k", "50e-12 m^2/s").unwrap(), 50.0);
        assert_eq!(parse_diffusion("k", "5 µm²/s").unwrap(), 5.0);
        assert!(parse_diffusion("k", "5").unwrap_err().0.contains("unit"));
        assert!(parse_diffusion("k", "5 cm2/s").unwrap_err().0.contains("unknown unit"));
        assert!(parse_diffusion("k", "-1 um2/s").is_err());
        // the key survives into the message for diagnostics
        assert!(parse_diffusion("channel.d_m", "5")
            .unwrap_err()
            .0
            .starts_with("channel.d_m"));
    }

    #[test]
    fn defaults_validate() {
        let cfg = ExperimentConfig::default().validated().unwrap();
        let p = cfg.base_params().unwrap();
        assert_eq!(p.d_m, 5.0);
        assert_eq!(p.r0, 10.0);
        let sim = cfg.sim_config().unwrap();
        assert_eq!(sim.release_time, 1.0); // k * t_s
    }

    #[test]
    fn toml_roundtrip_with_overrides() {
        let text = r#"
            [channel]
            d_m = "5 um2/s"
            d_tx = "0 um2/s"
            d_rx = "50e-12 m2/s"
            alpha = 1.5
            t_s = 1.0
            k = 2
            r0_um = 10.0

            [simulate]
            dt = 0.01
            n_particles = 100
            horizon = 10.0
            seed = 7
            scheme = "exact"
            bridge_correction = false
            delay_release_on_collision = false
        "#;
        let cfg: ExperimentConfig = toml::from_str(text).unwrap();
        let cfg = cfg.validated().unwrap();
        let p = cfg.base_params().unwrap();
        assert_eq!(p.d_rx, 50.0);
        assert_eq!(p.alpha, 1.5);
        let sim = cfg.sim_config().unwrap();
        assert_eq!(sim.release_time, 2.0);
        assert_eq!(sim.scheme, IncrementScheme::ExactTimeChange);
    }

    #[test]
    fn unknown_keys_are_rejected_with_names() {
        let e = toml::from_str::<ExperimentConfig>("[channel]\nd_mm = \"5 um2/s\"")
            .unwrap_err()
            .to_string();
        assert!(e.contains("d_mm"), "{e}");
    }

    #[test]
    fn bad_values_name_the_key() {
        let mut cfg = ExperimentConfig::default();
        cfg.air.beta_step = 0.0;
        let e = cfg.validated().unwrap_err();
        assert!(e.0.contains("beta_step"), "{}", e.0);

        let mut cfg = ExperimentConfig::default();
        cfg.simulate.n_particles = 0;
        let e = cfg.validated().unwrap_err();
        assert!(e.0.contains("simulate"), "{}", e.0);
    }
}
