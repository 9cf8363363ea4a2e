//! Subcommand implementations. Each command takes the effective (merged)
//! configuration and an output directory, writes its files, and returns
//! the paths it produced.

pub mod air;
pub mod distance_pdf;
pub mod fhtd;
pub mod hitting;
pub mod simulate;
pub mod validate;

use crate::config::{ClosedFormOpt, ExperimentConfig, SchemeOpt, VariantOpt};

/// Command-line overrides applied on top of the loaded configuration.
#[derive(Debug, Default, Clone, Copy)]
pub struct Overrides {
    pub variant: Option<VariantOpt>,
    pub closed_form: Option<ClosedFormOpt>,
    pub scheme: Option<SchemeOpt>,
    pub seed: Option<u64>,
}

pub fn apply_overrides(cfg: &mut ExperimentConfig, ov: &Overrides) {
    if let Some(v) = ov.variant {
        cfg.fhtd.variant = v;
        cfg.hitting.variant = v;
        cfg.air.variant = v;
    }
    if let Some(f) = ov.closed_form {
        cfg.hitting.closed_form = f;
        cfg.air.closed_form = f;
    }
    if let Some(s) = ov.scheme {
        cfg.simulate.scheme = s;
    }
    if let Some(s) = ov.seed {
        cfg.simulate.seed = s;
    }
}

/// Short stable fingerprint of the effective configuration, embedded in
/// summaries and reports so outputs can be traced to their inputs.
pub fn config_fingerprint(cfg: &ExperimentConfig) -> String {
    use sha2::{Digest, Sha256};
    let canonical = format!("{cfg:?}");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in &digest[..8] {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}
