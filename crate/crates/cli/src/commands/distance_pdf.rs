//! `distance-pdf`: density of the random TX-RX distance at the release
//! instant for each configured device pair, on a shared grid wide enough
//! that the analytic tail beyond it is negligible.

use std::path::{Path, PathBuf};

use anyhow::Context;

use mcsbm_core::fhtd::{distance_pdf, MobileChannelParams};

use crate::config::{parse_diffusion, ExperimentConfig};
use crate::csvout::{fmt_f64, name_tag, CsvFile};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let base = cfg.base_params()?;
    let section = &cfg.distance_pdf;

    let mut sets = Vec::new();
    let mut sigma_max: f64 = 0.0;
    for (i, (dtx_raw, drx_raw)) in section.device_sets.iter().enumerate() {
        let key = format!("distance_pdf.device_sets[{i}]");
        let d_tx = parse_diffusion(&key, dtx_raw)?;
        let d_rx = parse_diffusion(&key, drx_raw)?;
        let params = MobileChannelParams::new(
            base.d_m, d_tx, d_rx, base.alpha, base.t_s, base.k, base.r0,
        )
        .map_err(|e| anyhow::anyhow!("{key}: {e}"))?;
        sigma_max = sigma_max.max(params.sigma_k());
        sets.push(params);
    }

    let r_max = base.r0 + section.reach_sigmas * sigma_max;
    let n = section.n_points;
    let step = r_max / (n - 1) as f64;

    let mut header = vec!["r_k[um]".to_string()];
    for p in &sets {
        header.push(format!(
            "pdf_dtx{}_drx{}[1/um]",
            name_tag(p.d_tx),
            name_tag(p.d_rx)
        ));
    }
    let mut csv = CsvFile::new(header);
    for i in 0..n {
        let r = if i == n - 1 { r_max } else { i as f64 * step };
        let mut row = vec![fmt_f64(r)];
        for p in &sets {
            let v = distance_pdf(r, p).with_context(|| format!("distance pdf at r = {r}"))?;
            row.push(fmt_f64(v));
        }
        csv.push_row(row);
    }
    Ok(vec![csv.write(out, "distance_pdf.csv")?])
}
