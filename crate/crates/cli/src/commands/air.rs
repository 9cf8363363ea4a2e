//! `air`: mutual information of the timing channel as a function of the
//! input distribution, one column per `(alpha, mobility)` combination,
//! with trailing `beta_star` / `air_bits` summary rows from the
//! maximizer.

use std::path::{Path, PathBuf};

use anyhow::Context;

use mcsbm_core::channel::{
    maximize_air, mutual_information, transition_probs, TimingScheme, TransitionProbs,
};
use mcsbm_core::fhtd::{
    decision_threshold_eta_normalized, eta_with_form, hitting_cdf_with_form,
    hitting_prob_total_with_form, ClosedForm, FhtdVariant, MobileChannelParams,
};
use mcsbm_core::quad::QuadratureSettings;

use crate::config::{parse_diffusion, EtaMode, ExperimentConfig, MobilityDevice};
use crate::csvout::{fmt_f64, name_tag, CsvFile};

/// One evaluated channel: everything the CSV and the validation suite
/// need about a single `(alpha, mobility)` combination.
pub struct ChannelPoint {
    pub alpha: f64,
    pub mobility: f64,
    pub eta: f64,
    pub probs: TransitionProbs,
    pub beta_star: f64,
    pub air_bits: f64,
    pub clipped: bool,
    pub slot_overlap: bool,
}

/// Builds the transition probabilities for one parameter set under the
/// configured variant/closed-form, applying the paper-faithful clip of
/// `F` to `[0, 1]` in printed mode.
pub fn evaluate_channel(
    params: &MobileChannelParams,
    variant: FhtdVariant,
    form: ClosedForm,
    t1: f64,
    tu: f64,
    eta_mode: EtaMode,
    eta_seconds: Option<f64>,
) -> anyhow::Result<ChannelPoint> {
    let quad = QuadratureSettings::default().with_abs_tol(1e-9);
    let eta_raw = match eta_mode {
        EtaMode::TruncatedMean => eta_with_form(params, variant, form, &quad)
            .map_err(|e| anyhow::anyhow!("eta: {e}"))?,
        EtaMode::NormalizedMean => {
            decision_threshold_eta_normalized(params, variant, &quad)
                .map_err(|e| anyhow::anyhow!("eta: {e}"))?
        }
        EtaMode::Fixed => eta_seconds.expect("validated config"),
    };
    // the literal truncated mean can underflow to zero when no density
    // mass falls inside the sampling interval; keep the scheme legal
    let eta = eta_raw.max(1e-300);

    let clip = variant == FhtdVariant::Printed;
    let mut clipped_any = false;
    let total = hitting_prob_total_with_form(params, variant, form, &quad)
        .map_err(|e| anyhow::anyhow!("F_total: {e}"))?;
    let mut f_total = total.value;
    if clip && f_total > 1.0 {
        f_total = 1.0;
        clipped_any = true;
    }

    let scheme =
        TimingScheme::new(t1, tu, eta).map_err(|e| anyhow::anyhow!("timing scheme: {e}"))?;

    // the four CDF queries the transition algebra needs
    let mut eval = |t: f64| -> anyhow::Result<f64> {
        let v = hitting_cdf_with_form(t, params, variant, form, &quad)
            .map_err(|e| anyhow::anyhow!("F({t}): {e}"))?;
        if clip && v > 1.0 {
            clipped_any = true;
            return Ok(1.0);
        }
        Ok(v)
    };
    let f_eta = eval(eta)?;
    let f_tu = eval(tu)?;
    let f_tu_t1 = eval(tu - t1)?;
    let f_eta_t1 = if eta - t1 > 0.0 { eval(eta - t1)? } else { 0.0 };
    let lookup = move |t: f64| -> f64 {
        if t == eta {
            f_eta
        } else if t == tu {
            f_tu
        } else if t == tu - t1 {
            f_tu_t1
        } else {
            f_eta_t1
        }
    };
    let probs = transition_probs(&scheme, lookup, f_total)
        .map_err(|e| anyhow::anyhow!("transition probabilities: {e}"))?;
    let (beta_star, air_bits) =
        maximize_air(&probs, 1e-9).map_err(|e| anyhow::anyhow!("maximize_air: {e}"))?;

    Ok(ChannelPoint {
        alpha: params.alpha,
        mobility: f64::NAN, // caller fills in
        eta,
        probs,
        beta_star,
        air_bits,
        clipped: clipped_any,
        slot_overlap: scheme.slot_overlap(),
    })
}

/// Evaluates the configured `(alpha, mobility)` sweep.
pub fn evaluate_sweep(cfg: &ExperimentConfig) -> anyhow::Result<Vec<ChannelPoint>> {
    let base = cfg.base_params()?;
    let section = &cfg.air;
    let d_fixed = parse_diffusion("air.d_fixed", &section.d_fixed)?;
    let mut points = Vec::new();
    for &alpha in &section.alphas {
        for (i, mob_raw) in section.mobility_values.iter().enumerate() {
            let key = format!("air.mobility_values[{i}]");
            let mobility = parse_diffusion(&key, mob_raw)?;
            let (d_tx, d_rx) = match section.mobility_device {
                MobilityDevice::Tx => (mobility, d_fixed),
                MobilityDevice::Rx => (d_fixed, mobility),
            };
            let params = MobileChannelParams::new(
                base.d_m, d_tx, d_rx, alpha, base.t_s, base.k, base.r0,
            )
            .map_err(|e| anyhow::anyhow!("{key}: {e}"))?;
            let mut point = evaluate_channel(
                &params,
                section.variant.into(),
                section.closed_form.into(),
                section.t1,
                section.tu,
                section.eta_mode,
                section.eta_seconds,
            )
            .with_context(|| format!("alpha {alpha}, mobility {mobility}"))?;
            point.mobility = mobility;
            points.push(point);
        }
    }
    Ok(points)
}

pub fn run(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let section = &cfg.air;
    let points = evaluate_sweep(cfg)?;

    for p in &points {
        if p.clipped {
            eprintln!(
                "warning: air: hitting probability exceeded 1 and was clipped \
                 (alpha {}, mobility {}, printed mode)",
                p.alpha, p.mobility
            );
        }
        if p.slot_overlap {
            eprintln!(
                "warning: air: eta {} >= T_1 {}; the decision window overlaps the \
                 bit-1 release slot",
                p.eta, section.t1
            );
        }
    }

    let mut header = vec!["beta".to_string()];
    for p in &points {
        header.push(format!(
            "i_alpha{}_m{}[bits]",
            name_tag(p.alpha),
            name_tag(p.mobility)
        ));
    }
    let mut csv = CsvFile::new(header);
    let n = (1.0 / section.beta_step).round() as usize;
    for i in 0..=n {
        let beta = if i == n {
            1.0
        } else {
            i as f64 * section.beta_step
        };
        let mut row = vec![fmt_f64(beta)];
        for p in &points {
            row.push(fmt_f64(mutual_information(&p.probs, beta)));
        }
        csv.push_row(row);
    }
    let mut star_row = vec!["beta_star".to_string()];
    let mut air_row = vec!["air_bits".to_string()];
    for p in &points {
        star_row.push(fmt_f64(p.beta_star));
        air_row.push(fmt_f64(p.air_bits));
    }
    csv.push_row(star_row);
    csv.push_row(air_row);

    Ok(vec![csv.write(out, "air.csv")?])
}
