//! `hitting`: hitting probability `F_h(t)` as a function of time, one
//! column per `(alpha, D_rx)` combination. In printed mode each curve
//! carries a companion flag column marking values above 1 (the printed
//! density integrates to `1/alpha`, so sub-diffusive curves exceed 1).

use std::path::{Path, PathBuf};

use anyhow::Context;

use mcsbm_core::fhtd::{tabulate_hitting_curve, FhtdVariant, MobileChannelParams};
use mcsbm_core::quad::QuadratureSettings;

use crate::config::{parse_diffusion, ExperimentConfig, VariantOpt};
use crate::csvout::{fmt_f64, name_tag, CsvFile};

pub fn run(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let base = cfg.base_params()?;
    let section = &cfg.hitting;
    let variant: FhtdVariant = section.variant.into();
    let flag_gt1 = section.variant == VariantOpt::Printed;
    let quad = QuadratureSettings::default().with_abs_tol(1e-9);

    let n_steps = (section.t_max / section.t_step).round() as usize;
    let mut grid: Vec<f64> = Vec::with_capacity(n_steps + 1);
    grid.push(0.0);
    grid.extend((1..=n_steps).map(|i| i as f64 * section.t_step));

    let mut header = vec!["t[s]".to_string()];
    let mut curves = Vec::new();
    for &alpha in &section.alphas {
        for (i, drx_raw) in section.d_rx_values.iter().enumerate() {
            let key = format!("hitting.d_rx_values[{i}]");
            let d_rx = parse_diffusion(&key, drx_raw)?;
            let params = MobileChannelParams::new(
                base.d_m, base.d_tx, d_rx, alpha, base.t_s, base.k, base.r0,
            )
            .map_err(|e| anyhow::anyhow!("{key}: {e}"))?;
            let curve = tabulate_hitting_curve(
                &grid,
                &params,
                variant,
                section.closed_form.into(),
                &quad,
            )
            .with_context(|| format!("hitting curve alpha {alpha}, D_rx {d_rx}"))?;
            header.push(format!(
                "fh_alpha{}_drx{}[1]",
                name_tag(alpha),
                name_tag(d_rx)
            ));
            if flag_gt1 {
                header.push(format!(
                    "gt1_alpha{}_drx{}[flag]",
                    name_tag(alpha),
                    name_tag(d_rx)
                ));
            }
            curves.push(curve);
        }
    }

    let mut csv = CsvFile::new(header);
    for (row_idx, &t) in grid.iter().enumerate() {
        let mut row = vec![fmt_f64(t)];
        for curve in &curves {
            let v = curve.values[row_idx];
            row.push(fmt_f64(v));
            if flag_gt1 {
                row.push(if v > 1.0 { "1".into() } else { "0".into() });
            }
        }
        csv.push_row(row);
    }
    Ok(vec![csv.write(out, "hitting.csv")?])
}
