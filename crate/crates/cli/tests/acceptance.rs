//! Acceptance suite: every release gate in one place, one test per
//! criterion, each printing a `criterion N: PASS/FAIL` line (visible
//! under `--nocapture`, or automatically when a test fails).
//!
//! Two sub-criteria are expected to fail and do so honestly:
//!
//! * criterion 5 (mobile): the collision-revert rule constrains the
//!   receiver to stay above the transmitter, which the free-device
//!   analytic law does not model. A free-device control simulation in
//!   this file matches the analytic curve to Monte Carlo noise,
//!   isolating the revert rule as the cause.
//! * criterion 9 (mobility ordering): with the literal decision
//!   threshold (truncated mean over one sampling interval, ~3e-3 s) the
//!   achievable rate *rises* with device mobility, because the
//!   near-zero-distance mass that arrives within the threshold grows
//!   with mobility.

use std::time::Instant;

use mcsbm_cli::commands::air::evaluate_channel;
use mcsbm_cli::commands::validate::{comparison_grid, sup_distance};
use mcsbm_cli::config::EtaMode;
use mcsbm_cli::runner::{sample_distances_parallel, simulate_parallel};

use mcsbm_core::channel::{maximize_air, mutual_information, TransitionProbs};
use mcsbm_core::erf::erfc;
use mcsbm_core::fhtd::{
    distance_cdf, distance_pdf, hitting_cdf, mobile_fhtd_corrected, mobile_fhtd_printed,
    mobile_fhtd_quadrature, static_fhtd, tabulate_hitting_curve, ClosedForm, FhtdVariant,
    HittingCurve, MobileChannelParams,
};
use mcsbm_core::quad::QuadratureSettings;
use mcsbm_core::sbm::IncrementScheme;
use mcsbm_core::spbs::{empirical_cdf, SimConfig};

fn quad() -> QuadratureSettings {
    QuadratureSettings::default()
}

#[test]
fn c01_corrected_form_matches_quadrature_oracle() {
    let start = Instant::now();
    let mut max_rel: f64 = 0.0;
    let mut worst = String::new();
    for (p, t) in comparison_grid() {
        let oracle = mobile_fhtd_quadrature(t, &p, FhtdVariant::Normalized, &quad()).unwrap();
        let corrected = mobile_fhtd_corrected(t, &p, FhtdVariant::Normalized).unwrap();
        let rel = (corrected - oracle).abs() / oracle.abs().max(1e-300);
        if rel > max_rel {
            max_rel = rel;
            worst = format!("alpha {} t {t} k {} D=({},{},{})", p.alpha, p.k, p.d_m, p.d_tx, p.d_rx);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = max_rel <= 1e-8 && elapsed <= 60.0;
    println!(
        "criterion 1: {} - corrected vs quadrature on 144-point grid: max rel err {max_rel:.3e} \
         (gate 1e-8, worst at {worst}), runtime {elapsed:.1}s (budget 60s)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(max_rel <= 1e-8, "max rel err {max_rel:.3e} at {worst}");
    assert!(elapsed <= 60.0, "grid took {elapsed:.1}s");
}

#[test]
fn c02_printed_form_audit() {
    // quantify the printed transcription's deviation; the build fails
    // only if the CORRECTED form deviates from the oracle
    let mut printed_worst: f64 = 1.0;
    let mut corrected_max_rel: f64 = 0.0;
    for (p, t) in comparison_grid() {
        let oracle = mobile_fhtd_quadrature(t, &p, FhtdVariant::Printed, &quad()).unwrap();
        let printed = mobile_fhtd_printed(t, &p).unwrap();
        let corrected = mobile_fhtd_corrected(t, &p, FhtdVariant::Printed).unwrap();
        corrected_max_rel = corrected_max_rel
            .max((corrected - oracle).abs() / oracle.abs().max(1e-300));
        if printed > 0.0 && oracle > 1e-300 {
            printed_worst = printed_worst.max((oracle / printed).max(printed / oracle));
        }
    }
    let p_ref = MobileChannelParams::new(5.0, 5.0, 5.0, 1.0, 1.0, 1, 10.0).unwrap();
    let oracle_ref = mobile_fhtd_quadrature(5.0, &p_ref, FhtdVariant::Printed, &quad()).unwrap();
    let printed_ref = mobile_fhtd_printed(5.0, &p_ref).unwrap();
    let ratio = oracle_ref / printed_ref;
    let pass = corrected_max_rel <= 1e-8;
    println!(
        "criterion 2: {} - printed-form audit: worked example oracle/printed = {ratio:.3} \
         (printed {printed_ref:.5e} vs oracle {oracle_ref:.5e}); worst factor on grid \
         {printed_worst:.3e}; corrected stays at {corrected_max_rel:.3e} rel",
        if pass { "PASS" } else { "FAIL" }
    );
    // sanity of the audit itself: the mismatch is large and real
    assert!(ratio > 5.0, "expected a large printed-form deviation, got {ratio}");
    assert!(pass, "corrected form deviated: {corrected_max_rel:.3e}");
}

#[test]
fn c03_reduction_to_static_at_b_zero() {
    let mut worst_reduction: f64 = 0.0;
    let mut worst_continuity: f64 = 0.0;
    for &alpha in &[0.5, 1.0, 1.5] {
        for &t in &[0.5, 5.0, 50.0] {
            let p = MobileChannelParams::new(5.0, 0.0, 0.0, alpha, 1.0, 1, 10.0).unwrap();
            let reduced = mobile_fhtd_corrected(t, &p, FhtdVariant::Printed).unwrap();
            let direct = static_fhtd(t, 10.0, 5.0, alpha, FhtdVariant::Printed).unwrap();
            worst_reduction = worst_reduction.max((reduced - direct).abs() / direct);

            let a = p.d_mr() * t.powf(alpha);
            let mut tiny = p;
            tiny.d_tx = 1e-8 * a; // k = t_s = 1, so b = d_tr
            let near = mobile_fhtd_corrected(t, &tiny, FhtdVariant::Printed).unwrap();
            worst_continuity = worst_continuity.max((near - direct).abs() / direct);
        }
    }
    let pass = worst_reduction <= 1e-12 && worst_continuity <= 1e-6;
    println!(
        "criterion 3: {} - b=0 reduction rel err {worst_reduction:.3e} (gate 1e-12); \
         b->0+ continuity rel err {worst_continuity:.3e} (gate 1e-6)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn c04_normalization_law() {
    use mcsbm_core::fhtd::hitting_prob_total;
    let start = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for &alpha in &[0.5, 1.0, 1.5] {
        let p = MobileChannelParams::new(5.0, 0.0, 0.0, alpha, 1.0, 1, 10.0).unwrap();
        let q = quad().with_abs_tol(1e-5);
        let normalized = hitting_prob_total(&p, FhtdVariant::Normalized, &q).unwrap();
        let printed = hitting_prob_total(&p, FhtdVariant::Printed, &q).unwrap();
        pass &= (normalized.value - 1.0).abs() <= 1e-3;
        pass &= (printed.value - 1.0 / alpha).abs() <= 1e-3 + printed.tail_estimate;
        detail += &format!(
            "alpha {alpha}: N {:.6} (want 1), P {:.6} (want {:.4}); ",
            normalized.value,
            printed.value,
            1.0 / alpha
        );
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 4: {} - static normalization integrals: {detail}runtime {elapsed:.2}s",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{detail}");
    assert!(elapsed < 30.0, "normalization took {elapsed}s");
}

#[test]
fn c05_monte_carlo_static_ground_truth() {
    let start = Instant::now();
    let params = MobileChannelParams::new(5.0, 0.0, 0.0, 1.0, 1.0, 1, 10.0).unwrap();
    let sim = SimConfig {
        params,
        dt: 0.01,
        n_particles: 200_000,
        horizon: 200.0,
        seed: 11,
        scheme: IncrementScheme::PaperIid,
        release_time: 0.0,
        bridge_correction: true,
        delay_release_on_collision: false,
    };
    let outcome = simulate_parallel(&sim).unwrap();
    let sup = sup_distance(&outcome, 200.0, |t| erfc(10.0 / (20.0 * t).sqrt()));
    let f5 = empirical_cdf(&outcome, 5.0);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = sup <= 0.01 && elapsed <= 300.0;
    println!(
        "criterion 5 (static): {} - sup|F_emp - erfc| = {sup:.5} (gate 0.01) at n = 2e5, \
         dt = 0.01, exact-bridge detection; F_emp(5) = {f5:.5} vs 0.15730; \
         runtime {elapsed:.0}s (budget 300s)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(sup <= 0.01, "sup distance {sup}");
    assert!(elapsed <= 300.0, "static run took {elapsed:.0}s");
}

// Free-device control for the mobile comparison: same stepping and
// detection, no collision rule, private randomness. Matches the analytic
// law and thereby isolates the revert rule as the source of the deficit.
fn free_device_cdf(n: u64, ts: &[f64]) -> Vec<f64> {
    struct Mix(u64);
    impl Mix {
        fn next(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^ (z >> 31)
        }
        fn unit(&mut self) -> f64 {
            ((self.next() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
        }
        fn gauss(&mut self) -> f64 {
            // polar method; independent of the library's sampler
            loop {
                let v1 = 2.0 * self.unit() - 1.0;
                let v2 = 2.0 * self.unit() - 1.0;
                let s = v1 * v1 + v2 * v2;
                if s > 0.0 && s < 1.0 {
                    return v1 * (-2.0 * s.ln() / s).sqrt();
                }
            }
        }
    }
    let (dt, horizon, release) = (0.01f64, 21.0f64, 1.0f64);
    let (s_tx, s_rx, s_m) = ((0.1f64).sqrt(), (0.1f64).sqrt(), (0.1f64).sqrt());
    let v_rel = 2.0 * 10.0 * dt;
    let mut hits = Vec::new();
    for i in 0..n {
        let mut rng = Mix(0x5eed_0000 + i);
        let (mut z_tx, mut z_rx) = (0.0f64, 10.0f64);
        for _ in 0..((release / dt).round() as u64) {
            z_tx += s_tx * rng.gauss();
            z_rx += s_rx * rng.gauss();
        }
        let mut z_m = z_tx;
        let mut d0 = z_m - z_rx;
        let n_post = ((horizon - release) / dt).round() as u64;
        for j in 1..=n_post {
            z_rx += s_rx * rng.gauss();
            z_m += s_m * rng.gauss();
            let d1 = z_m - z_rx;
            if d1 == 0.0 || (d0 < 0.0) != (d1 < 0.0) {
                hits.push(j as f64 * dt);
                break;
            }
            if rng.unit() < (-2.0 * d0 * d1 / v_rel).exp() {
                hits.push(j as f64 * dt);
                break;
            }
            d0 = d1;
        }
    }
    ts.iter()
        .map(|&t| hits.iter().filter(|&&h| h <= t).count() as f64 / n as f64)
        .collect()
}

#[test]
fn c05_monte_carlo_mobile_vs_analytic() {
    let start = Instant::now();
    let params = MobileChannelParams::new(5.0, 5.0, 5.0, 1.0, 1.0, 1, 10.0).unwrap();
    let sim = SimConfig {
        params,
        dt: 0.01,
        n_particles: 200_000,
        horizon: 21.0,
        seed: 12,
        scheme: IncrementScheme::PaperIid,
        release_time: 1.0,
        bridge_correction: true,
        delay_release_on_collision: false,
    };
    let outcome = simulate_parallel(&sim).unwrap();
    let ts = [2.0, 5.0, 10.0, 20.0];
    let analytic: Vec<f64> = ts
        .iter()
        .map(|&t| hitting_cdf(t, &params, FhtdVariant::Normalized, &quad()).unwrap())
        .collect();
    let empirical: Vec<f64> = ts.iter().map(|&t| empirical_cdf(&outcome, t)).collect();
    let control = free_device_cdf(40_000, &ts);
    let elapsed = start.elapsed().as_secs_f64();

    let mut detail = String::new();
    let mut worst: f64 = 0.0;
    for i in 0..ts.len() {
        let d = empirical[i] - analytic[i];
        worst = worst.max(d.abs());
        detail += &format!(
            "t={}: sim {:.4} vs analytic {:.4} (d={:+.4}, free-device control {:.4}); ",
            ts[i], empirical[i], analytic[i], d, control[i]
        );
    }
    let pass = worst <= 0.015;
    println!(
        "criterion 5 (mobile): {} - {detail}runtime {elapsed:.0}s. The control (identical \
         stepping without the collision-revert rule) matches the analytic law, so the \
         deficit is the revert rule constraining the receiver to stay above the \
         transmitter - a model/simulation inconsistency in the source formulation, \
         documented in the decisions ledger.",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        worst <= 0.015,
        "mobile empirical CDF deviates from the analytic law by {worst:.4} \
         (tolerance 0.015). {detail}"
    );
    assert!(elapsed <= 300.0);
}

#[test]
fn c06_distance_law() {
    // KS: one PaperIID step of size T_s with collisions impossible
    let params = MobileChannelParams::new(5.0, 5.0, 5.0, 1.0, 1.0, 1, 50.0).unwrap();
    let sim = SimConfig {
        params,
        dt: 1.0,
        n_particles: 1,
        horizon: 2.0,
        seed: 13,
        scheme: IncrementScheme::PaperIid,
        release_time: 1.0,
        bridge_correction: false,
        delay_release_on_collision: false,
    };
    let n: u64 = 100_000;
    let mut samples = sample_distances_parallel(&sim, n);
    samples.sort_by(|a, b| a.total_cmp(b));
    let mut ks: f64 = 0.0;
    for (i, &r) in samples.iter().enumerate() {
        let f = distance_cdf(r, &params).unwrap();
        ks = ks
            .max((f - i as f64 / n as f64).abs())
            .max(((i + 1) as f64 / n as f64 - f).abs());
    }

    // grid-integral + contact probability on the reference parameter sets
    let mut detail = String::new();
    let mut integral_ok = true;
    for &(d_tx, d_rx) in &[(1.0, 1.0), (5.0, 5.0)] {
        let p = MobileChannelParams::new(5.0, d_tx, d_rx, 1.0, 1.0, 1, 10.0).unwrap();
        let hi = p.r0 + 10.0 * p.sigma_k();
        let n_grid = 4001;
        let step = hi / (n_grid - 1) as f64;
        let mut total = 0.0;
        for i in 0..n_grid {
            let r = i as f64 * step;
            let w = if i == 0 || i == n_grid - 1 { 0.5 } else { 1.0 };
            total += w * distance_pdf(r, &p).unwrap() * step;
        }
        total += 1.0 - distance_cdf(hi, &p).unwrap();
        let at_zero = distance_pdf(0.0, &p).unwrap();
        integral_ok &= (total - 1.0).abs() <= 1e-6 && at_zero > 0.0;
        detail += &format!("(D={d_tx},{d_rx}): integral {total:.8}, pdf(0) {at_zero:.3e}; ");
    }

    let pass = ks <= 0.01 && integral_ok;
    println!(
        "criterion 6: {} - distance-law KS {ks:.5} at n = 1e5 (gate 0.01); {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(ks <= 0.01, "KS {ks}");
    assert!(integral_ok, "{detail}");
}

fn hitting_curves_printed(d_rx: f64, alphas: &[f64], grid: &[f64]) -> Vec<HittingCurve> {
    alphas
        .iter()
        .map(|&alpha| {
            let p = MobileChannelParams::new(5.0, 0.0, d_rx, alpha, 1.0, 1, 10.0).unwrap();
            tabulate_hitting_curve(
                grid,
                &p,
                FhtdVariant::Printed,
                ClosedForm::Corrected,
                &quad().with_abs_tol(1e-9),
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn c07_hitting_probability_orderings() {
    let alphas = [0.5, 1.0, 1.5];
    let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.25).collect();
    let window: Vec<usize> = grid
        .iter()
        .enumerate()
        .filter(|(_, &t)| (2.0..=15.0).contains(&t))
        .map(|(i, _)| i)
        .collect();

    let low = hitting_curves_printed(0.5, &alphas, &grid);
    let high = hitting_curves_printed(50.0, &alphas, &grid);

    let mut ok_low = true;
    let mut ok_high = true;
    for &i in &window {
        for a in 0..alphas.len() - 1 {
            ok_low &= low[a].values[i] < low[a + 1].values[i];
            ok_high &= high[a].values[i] > high[a + 1].values[i];
        }
    }
    let mut monotone = true;
    for curve in low.iter().chain(high.iter()) {
        for w in curve.values.windows(2) {
            monotone &= w[1] >= w[0];
        }
    }
    let at10 = |curves: &[HittingCurve]| -> String {
        let idx = grid.iter().position(|&t| t == 10.0).unwrap();
        curves
            .iter()
            .map(|c| format!("{:.4}", c.values[idx]))
            .collect::<Vec<_>>()
            .join("/")
    };
    let pass = ok_low && ok_high && monotone;
    println!(
        "criterion 7: {} - printed-variant orderings on t in [2,15]: F increases with alpha \
         at D_rx = 0.5 ({}) and decreases with alpha at D_rx = 50 ({}) [values at t = 10 for \
         alpha = 0.5/1/1.5]; all curves monotone in t: {monotone}",
        if pass { "PASS" } else { "FAIL" },
        at10(&low),
        at10(&high)
    );
    assert!(ok_low, "low-mobility ordering violated");
    assert!(ok_high, "high-mobility ordering violated");
    assert!(monotone);
}

#[test]
fn c08_channel_sanity() {
    let h_b = |p: f64| -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
        }
    };

    // symmetric erasure: I(beta) = (1 - eps) H_b(beta) to 1e-9
    let mut worst_identity: f64 = 0.0;
    for &eps in &[0.1, 0.2, 0.5, 0.9] {
        let probs = TransitionProbs::new(1.0 - eps, 1.0 - eps, eps, eps).unwrap();
        for i in 0..=100 {
            let beta = i as f64 / 100.0;
            let diff = (mutual_information(&probs, beta) - (1.0 - eps) * h_b(beta)).abs();
            worst_identity = worst_identity.max(diff);
        }
    }

    let probs = TransitionProbs::new(0.8, 0.8, 0.2, 0.2).unwrap();
    let (beta_star, air) = maximize_air(&probs, 1e-9).unwrap();
    let opt_ok = (beta_star - 0.5).abs() <= 1e-6 && (air - 0.8).abs() <= 1e-6;

    // endpoint zeros + concavity on 50 seeded random channels
    struct Mix(u64);
    impl Mix {
        fn unit(&mut self) -> f64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
        }
    }
    let mut rng = Mix(7);
    let mut endpoints_ok = true;
    let mut concavity_worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let p0 = rng.unit();
        let p1 = rng.unit();
        let e0 = rng.unit() * (1.0 - p0);
        let e1 = rng.unit() * (1.0 - p1);
        let probs = TransitionProbs::new(p0, p1, e0, e1).unwrap();
        endpoints_ok &= mutual_information(&probs, 0.0) == 0.0;
        endpoints_ok &= mutual_information(&probs, 1.0) == 0.0;
        let h = 0.01;
        for i in 1..100 {
            let b = i as f64 * h;
            let second = mutual_information(&probs, b - h)
                - 2.0 * mutual_information(&probs, b)
                + mutual_information(&probs, b + h);
            concavity_worst = concavity_worst.max(second);
        }
    }

    let pass =
        worst_identity <= 1e-9 && opt_ok && endpoints_ok && concavity_worst <= 1e-9;
    println!(
        "criterion 8: {} - symmetric-erasure identity worst diff {worst_identity:.2e} \
         (gate 1e-9); maximize_air -> ({beta_star:.7}, {air:.7}) vs (0.5, 0.8) at 1e-6; \
         I(0)=I(1)=0 on 50 random channels: {endpoints_ok}; worst concavity second \
         difference {concavity_worst:.2e} (gate 1e-9)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

fn air_at(alpha: f64, d_tx: f64, d_rx: f64) -> f64 {
    let params = MobileChannelParams::new(5.0, d_tx, d_rx, alpha, 1.0, 1, 10.0).unwrap();
    let point = evaluate_channel(
        &params,
        FhtdVariant::Normalized,
        ClosedForm::Corrected,
        1.0,  // T_1 (not stated in the source; see ledger)
        40.0, // T_u
        EtaMode::TruncatedMean,
        None,
    )
    .unwrap();
    point.air_bits
}

#[test]
fn c09_air_alpha_ordering() {
    // super-diffusion must carry the lowest rate of the three phenomena
    let mut detail = String::new();
    let mut pass = true;
    for &(d_tx, d_rx) in &[(0.5, 0.0), (5.0, 0.0)] {
        let sub = air_at(0.9, d_tx, d_rx);
        let normal = air_at(1.0, d_tx, d_rx);
        let sup = air_at(1.1, d_tx, d_rx);
        pass &= sup < normal && sup < sub;
        detail += &format!(
            "D_tx={d_tx}: AIR(0.9)={sub:.4e}, AIR(1.0)={normal:.4e}, AIR(1.1)={sup:.4e}; "
        );
    }
    println!(
        "criterion 9 (alpha ordering): {} - normalized variant, T_u=40, T_1=1, literal eta: \
         {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{detail}");
}

#[test]
fn c09_air_mobility_ordering() {
    let mut detail = String::new();
    let mut pass = true;
    for &alpha in &[0.9, 1.0, 1.1] {
        let slow = air_at(alpha, 0.5, 0.0);
        let fast = air_at(alpha, 5.0, 0.0);
        pass &= fast < slow;
        detail += &format!("alpha {alpha}: AIR(0.5)={slow:.4e} vs AIR(5)={fast:.4e}; ");
    }
    println!(
        "criterion 9 (mobility ordering): {} - claim: AIR decreases when TX mobility rises \
         0.5 -> 5 um2/s. {detail}With the literal decision threshold (truncated mean over \
         T_s = 1 s, eta ~ 3e-3 s) the rate instead RISES with mobility: the folded distance \
         law puts mass near zero separation, that mass arrives within eta, and p0 = F(eta) \
         grows with mobility. Documented in the decisions ledger.",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(
        pass,
        "AIR did not decrease with device mobility under the literal eta. {detail}"
    );
}

#[test]
fn c10_simulate_determinism_across_parallelism() {
    use std::fs;
    use std::process::Command;
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("det.toml");
    fs::write(
        &cfg,
        "[channel]\nd_tx = \"1 um2/s\"\nd_rx = \"1 um2/s\"\n\
         [simulate]\nn_particles = 3000\nhorizon = 30.0\nseed = 5\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for (threads, sub) in [("1", "a"), ("4", "b"), ("4", "c")] {
        let dir = tmp.path().join(sub);
        let status = Command::new(env!("CARGO_BIN_EXE_mcsbm"))
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&dir)
            .env("RAYON_NUM_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push((
            fs::read(dir.join("simulate_hist.csv")).unwrap(),
            fs::read(dir.join("simulate_summary.toml")).unwrap(),
        ));
    }
    let pass = outputs[0] == outputs[1] && outputs[1] == outputs[2];
    println!(
        "criterion 10: {} - `simulate` byte-identical across repeated runs and thread \
         counts 1 vs 4",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}
