//! `fhtd`: first-hitting-time density curves. One CSV per
//! `(alpha, device set)` combination with the printed closed form, the
//! corrected closed form, the averaging-integral quadrature, and an
//! optional empirical density from a particle run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

use mcsbm_core::fhtd::{
    mobile_fhtd_corrected, mobile_fhtd_printed, mobile_fhtd_quadrature, FhtdVariant,
    MobileChannelParams,
};
use mcsbm_core::quad::QuadratureSettings;
use mcsbm_core::spbs::SimConfig;

use crate::config::{parse_diffusion, ExperimentConfig};
use crate::csvout::{fmt_f64, name_tag, CsvFile};
use crate::runner::simulate_parallel;

pub fn run(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let base = cfg.base_params()?;
    let section = &cfg.fhtd;
    let variant: FhtdVariant = section.variant.into();
    let quad = QuadratureSettings::default();
    let variant_tag = match section.variant {
        crate::config::VariantOpt::Printed => "printed",
        crate::config::VariantOpt::Normalized => "normalized",
    };

    let n_steps = (section.t_max / section.t_step).round() as usize;
    let grid: Vec<f64> = (1..=n_steps).map(|i| i as f64 * section.t_step).collect();
    if grid.is_empty() {
        bail!("fhtd grid is empty (t_max {} t_step {})", section.t_max, section.t_step);
    }

    let mut written = Vec::new();
    for &alpha in &section.alphas {
        for (i, (dtx_raw, drx_raw)) in section.device_sets.iter().enumerate() {
            let key = format!("fhtd.device_sets[{i}]");
            let d_tx = parse_diffusion(&key, dtx_raw)?;
            let d_rx = parse_diffusion(&key, drx_raw)?;
            let params = MobileChannelParams::new(
                base.d_m, d_tx, d_rx, alpha, base.t_s, base.k, base.r0,
            )
            .map_err(|e| anyhow::anyhow!("{key}: {e}"))?;

            // optional empirical overlay: hits binned per grid step
            let spbs_density = if section.spbs_overlay {
                Some(spbs_histogram(cfg, &params, &grid, section.t_step)?)
            } else {
                None
            };

            let mut header = vec![
                "t[s]".to_string(),
                "fhtd_printed_eq4[1/s]".to_string(),
                "fhtd_corrected[1/s]".to_string(),
                "fhtd_quadrature[1/s]".to_string(),
            ];
            if spbs_density.is_some() {
                header.push("fhtd_spbs[1/s]".to_string());
            }
            header.push("variant".to_string());

            let mut csv = CsvFile::new(header);
            for (j, &t) in grid.iter().enumerate() {
                let printed = mobile_fhtd_printed(t, &params)
                    .with_context(|| format!("printed form at t = {t}"))?;
                let corrected = mobile_fhtd_corrected(t, &params, variant)
                    .with_context(|| format!("corrected form at t = {t}"))?;
                let oracle = mobile_fhtd_quadrature(t, &params, variant, &quad)
                    .with_context(|| format!("quadrature at t = {t}"))?;
                let mut row = vec![
                    fmt_f64(t),
                    fmt_f64(printed),
                    fmt_f64(corrected),
                    fmt_f64(oracle),
                ];
                if let Some(d) = &spbs_density {
                    row.push(fmt_f64(d[j]));
                }
                row.push(variant_tag.to_string());
                csv.push_row(row);
            }

            let name = format!(
                "fhtd_alpha{}_dtx{}_drx{}.csv",
                name_tag(alpha),
                name_tag(d_tx),
                name_tag(d_rx)
            );
            written.push(csv.write(out, &name)?);
        }
    }
    Ok(written)
}

/// Empirical density over bins `(t_{j-1}, t_j]`, measured from release.
fn spbs_histogram(
    cfg: &ExperimentConfig,
    params: &MobileChannelParams,
    grid: &[f64],
    t_step: f64,
) -> anyhow::Result<Vec<f64>> {
    let base_sim = cfg.sim_config()?;
    let release_time = params.k as f64 * params.t_s;
    let sim = SimConfig {
        params: *params,
        n_particles: cfg.fhtd.spbs_particles,
        release_time,
        horizon: release_time + grid.last().copied().unwrap_or(1.0),
        ..base_sim
    };
    sim.validate().map_err(|e| anyhow::anyhow!("fhtd spbs overlay: {e}"))?;
    let outcome = simulate_parallel(&sim).map_err(|e| anyhow::anyhow!("fhtd spbs overlay: {e}"))?;
    let n = outcome.n_particles() as f64;
    let mut counts = vec![0u64; grid.len()];
    for &hit in &outcome.hit_times {
        let idx = (hit / t_step).ceil() as usize;
        if idx >= 1 && idx <= grid.len() {
            counts[idx - 1] += 1;
        }
    }
    Ok(counts
        .iter()
        .map(|&c| c as f64 / (n * t_step))
        .collect())
}
