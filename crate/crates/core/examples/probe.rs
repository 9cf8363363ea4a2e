use mcsbm_core::channel::*;
use mcsbm_core::fhtd::*;
use mcsbm_core::quad::*;

fn air(p: &MobileChannelParams, variant: FhtdVariant, t1: f64, tu: f64) -> (f64, f64, f64) {
    let q = QuadratureSettings::default().with_abs_tol(1e-9);
    let eta = decision_threshold_eta(p, variant, &q).unwrap().max(1e-12);
    let total = hitting_prob_total(p, variant, &q).unwrap();
    // paper-faithful printed mode clips the CDF (and its total) at 1
    let clip = variant == FhtdVariant::Printed;
    let f_total = if clip { total.value.min(1.0) } else { total.value };
    let f = |t: f64| {
        let v = hitting_cdf(t, p, variant, &q).unwrap();
        if clip { v.min(1.0) } else { v }
    };
    let scheme = TimingScheme::new(t1, tu, eta).unwrap();
    let probs = transition_probs(&scheme, f, f_total).unwrap();
    let (b, a) = maximize_air(&probs, 1e-9).unwrap();
    (eta, b, a)
}

fn main() {
    let q = QuadratureSettings::default();

    // --- criterion 7: hitting orderings, printed + normalized, window [2,15] ---
    for variant in [FhtdVariant::Printed, FhtdVariant::Normalized] {
        println!("== hitting F(t) per alpha, variant {:?}", variant);
        for d_rx in [0.5, 50.0] {
            for t in [2.0, 5.0, 10.0, 15.0] {
                let mut row = format!("D_rx={d_rx:>4} t={t:>4}: ");
                for alpha in [0.5, 1.0, 1.5] {
                    let p = MobileChannelParams::new(5.0, 0.0, d_rx, alpha, 1.0, 1, 10.0).unwrap();
                    let f = hitting_cdf(t, &p, variant, &q).unwrap();
                    row += &format!("a{alpha}: {f:.4}  ");
                }
                println!("{row}");
            }
        }
    }

    // --- criterion 9: AIR orderings ---
    // mobility interpretation A: D_tx varied (paper text), D_rx = 0
    // mobility interpretation B: D_rx varied, D_tx = 0
    for variant in [FhtdVariant::Printed, FhtdVariant::Normalized] {
        println!("== AIR, variant {:?} (T1=1, Tu=40)", variant);
        for (label, dtx, drx) in [
            ("vary TX: D_tx=0.5, D_rx=0", 0.5, 0.0),
            ("vary TX: D_tx=5,   D_rx=0", 5.0, 0.0),
            ("vary RX: D_tx=0, D_rx=0.5", 0.0, 0.5),
            ("vary RX: D_tx=0, D_rx=5  ", 0.0, 5.0),
        ] {
            let mut row = format!("{label}: ");
            for alpha in [0.9, 1.0, 1.1] {
                let p = MobileChannelParams::new(5.0, dtx, drx, alpha, 1.0, 1, 10.0).unwrap();
                let (eta, bstar, a) = air(&p, variant, 1.0, 40.0);
                row += &format!("a{alpha}: AIR={a:.4e} (b*={bstar:.3}, eta={eta:.2e})  ");
            }
            println!("{row}");
        }
    }
}
