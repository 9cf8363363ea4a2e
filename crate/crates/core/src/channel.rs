//! Timing-modulated binary erasure channel on top of a hitting CDF.
//!
//! A single molecule is released at `T_0 = 0` for bit 0 or at `T_1` for
//! bit 1, within a channel use of duration `T_u`. The receiver decides
//! 0 if the molecule is absorbed in `[0, eta]`, decides 1 if absorbed in
//! `(eta, T_u]`, and declares an erasure if nothing arrives in the
//! channel use. The ternary output alphabet is `{0, 1, erasure}`; the
//! cross-detection masses (a bit-0 molecule arriving after `eta`, a
//! bit-1 molecule arriving before it) are implied by the transition
//! algebra and are not free parameters.

use core::fmt;

use crate::quad::{maximize_unimodal, QuadError};

// resolves f64 math under no_std; std-linked test builds shadow it with
// inherent methods, which makes the import look unused there
#[allow(unused_imports)]
use num_traits::Float;

/// Release-slot layout and decision threshold (seconds). `T_0` is pinned
/// to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingScheme {
    /// Release time of bit 1; `0 < T_1 < T_u`.
    pub t1: f64,
    /// Channel-use duration.
    pub tu: f64,
    /// Decision threshold separating "detected 0" from "detected 1".
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    InvalidScheme(&'static str),
    InvalidProbability(&'static str),
    /// The hitting curve reported less total mass than its own value at
    /// `T_u`; the curve is not a CDF.
    InconsistentCurve { f_total: f64, f_tu: f64 },
    /// Optimizer failure.
    Opt(QuadError),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::InvalidScheme(what) => write!(f, "invalid timing scheme: {what}"),
            ChannelError::InvalidProbability(what) => write!(f, "invalid probability: {what}"),
            ChannelError::InconsistentCurve { f_total, f_tu } => write!(
                f,
                "hitting curve inconsistent: F_total = {f_total} < F(T_u) = {f_tu}"
            ),
            ChannelError::Opt(e) => write!(f, "maximization failed: {e}"),
        }
    }
}

impl core::error::Error for ChannelError {}

impl From<QuadError> for ChannelError {
    fn from(e: QuadError) -> Self {
        ChannelError::Opt(e)
    }
}

impl TimingScheme {
    pub fn new(t1: f64, tu: f64, eta: f64) -> Result<Self, ChannelError> {
        if !(t1 > 0.0) || !t1.is_finite() {
            return Err(ChannelError::InvalidScheme("T_1 must be > 0"));
        }
        if !(tu > t1) || !tu.is_finite() {
            return Err(ChannelError::InvalidScheme("T_u must exceed T_1"));
        }
        if !(eta > 0.0 && eta < tu) {
            return Err(ChannelError::InvalidScheme("eta must lie in (0, T_u)"));
        }
        Ok(Self { t1, tu, eta })
    }

    /// `eta >= T_1` is legal but means a bit-1 molecule released at `T_1`
    /// can still land in the bit-0 decision window; callers should surface
    /// this to the user.
    pub fn slot_overlap(&self) -> bool {
        self.eta >= self.t1
    }
}

/// Transition probabilities of the equivalent discrete channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionProbs {
    /// Bit 0 detected as 0: `F(eta)`.
    pub p0: f64,
    /// Bit 1 detected as 1: `F(T_u - T_1) - F(eta - T_1)`.
    pub p1: f64,
    /// Bit 0 erased: `F_total - F(T_u)`.
    pub eps0: f64,
    /// Bit 1 erased: `F_total - F(T_u - T_1)`.
    pub eps1: f64,
}

impl TransitionProbs {
    pub fn new(p0: f64, p1: f64, eps0: f64, eps1: f64) -> Result<Self, ChannelError> {
        let probs = Self { p0, p1, eps0, eps1 };
        probs.validate()?;
        Ok(probs)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        for (v, name) in [
            (self.p0, "p0 out of [0, 1]"),
            (self.p1, "p1 out of [0, 1]"),
            (self.eps0, "eps0 out of [0, 1]"),
            (self.eps1, "eps1 out of [0, 1]"),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(ChannelError::InvalidProbability(name));
            }
        }
        if self.p0 + self.eps0 > 1.0 + 1e-12 {
            return Err(ChannelError::InvalidProbability("p0 + eps0 exceeds 1"));
        }
        if self.p1 + self.eps1 > 1.0 + 1e-12 {
            return Err(ChannelError::InvalidProbability("p1 + eps1 exceeds 1"));
        }
        Ok(())
    }

    /// Cross-detection mass of bit 0 (arrives, but after `eta`).
    #[inline]
    pub fn cross0(&self) -> f64 {
        (1.0 - self.p0 - self.eps0).max(0.0)
    }

    /// Cross-detection mass of bit 1 (arrives before `eta`).
    #[inline]
    pub fn cross1(&self) -> f64 {
        (1.0 - self.p1 - self.eps1).max(0.0)
    }
}

/// Builds the transition probabilities from a hitting-CDF accessor.
///
/// `f` is evaluated at non-negative arguments only; the convention
/// `F(x) = 0` for `x < 0` is applied here. `f_total` is the estimated
/// `F(infinity)`; it must not fall below `F(T_u)` (beyond jitter), or the
/// curve is rejected as inconsistent.
pub fn transition_probs<F: Fn(f64) -> f64>(
    scheme: &TimingScheme,
    f: F,
    f_total: f64,
) -> Result<TransitionProbs, ChannelError> {
    let eval = |x: f64| if x < 0.0 { 0.0 } else { f(x) };
    let f_eta = eval(scheme.eta);
    let f_tu = eval(scheme.tu);
    let f_tu_t1 = eval(scheme.tu - scheme.t1);
    let f_eta_t1 = eval(scheme.eta - scheme.t1);
    if f_total < f_tu - 1e-9 {
        return Err(ChannelError::InconsistentCurve { f_total, f_tu });
    }
    // clamp away quadrature jitter at the boundaries
    let clamp = |v: f64| v.clamp(0.0, 1.0);
    TransitionProbs::new(
        clamp(f_eta),
        clamp(f_tu_t1 - f_eta_t1),
        clamp(f_total - f_tu),
        clamp(f_total - f_tu_t1),
    )
}

/// Output distribution over `{0, 1, erasure}` for input distribution
/// `Pr(bit 0) = beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputDist {
    pub pr0: f64,
    pub pr1: f64,
    pub pr_eps: f64,
}

impl OutputDist {
    #[inline]
    pub fn as_array(&self) -> [f64; 3] {
        [self.pr0, self.pr1, self.pr_eps]
    }
}

/// Mixes the two conditional rows with weights `beta` and `1 - beta`.
pub fn output_distribution(probs: &TransitionProbs, beta: f64) -> OutputDist {
    let b = beta;
    let nb = 1.0 - beta;
    OutputDist {
        pr0: b * probs.p0 + nb * probs.cross1(),
        pr1: nb * probs.p1 + b * probs.cross0(),
        pr_eps: nb * probs.eps1 + b * probs.eps0,
    }
}

/// Shannon entropy (bits) of a distribution over the ternary output
/// alphabet, with `0 log 0 = 0`.
pub fn ternary_entropy(dist: &[f64; 3]) -> Result<f64, ChannelError> {
    let mut sum = 0.0;
    for &p in dist {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(ChannelError::InvalidProbability(
                "entropy argument has a negative or non-finite component",
            ));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(ChannelError::InvalidProbability(
            "entropy argument does not sum to 1",
        ));
    }
    Ok(entropy_unchecked(dist))
}

#[inline]
fn entropy_unchecked(dist: &[f64; 3]) -> f64 {
    let mut h = 0.0;
    for &p in dist {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Mutual information `I(T_r; T_a)` in bits between the release slot and
/// the ternary arrival outcome, for input distribution `beta`.
///
/// `I(0) = I(1) = 0` holds exactly in floating point because the marginal
/// entropy is evaluated on the same numbers as the conditional one.
pub fn mutual_information(probs: &TransitionProbs, beta: f64) -> f64 {
    let out = output_distribution(probs, beta);
    let h_out = entropy_unchecked(&out.as_array());
    let h_given_0 = entropy_unchecked(&[probs.p0, probs.cross0(), probs.eps0]);
    let h_given_1 = entropy_unchecked(&[probs.cross1(), probs.p1, probs.eps1]);
    h_out - beta * h_given_0 - (1.0 - beta) * h_given_1
}

/// Maximizes [`mutual_information`] over the input distribution.
///
/// Mutual information is concave in the input distribution for a fixed
/// channel, hence unimodal on `[0, 1]`; returns `(beta_star, air_bits)`.
pub fn maximize_air(probs: &TransitionProbs, tol: f64) -> Result<(f64, f64), ChannelError> {
    probs.validate()?;
    let (beta_star, air) = maximize_unimodal(|b| mutual_information(probs, b), 0.0, 1.0, tol)?;
    Ok((beta_star, air.max(0.0)))
}
