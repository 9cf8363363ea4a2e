//! Numerical backbone: adaptive Gauss–Kronrod quadrature on finite and
//! semi-infinite intervals, and a bounded unimodal maximizer.

use alloc::collections::BinaryHeap;
// resolves f64 math under no_std; std-linked test builds shadow it with
// inherent methods, which makes the import look unused there
#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;


/// Tolerances and budgets shared by all integration routines.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureSettings {
    /// Absolute tolerance on the integral (also the horizon-doubling stop
    /// increment for [`improper_quad`]).
    pub abs_tol: f64,
    /// Relative tolerance on the integral.
    pub rel_tol: f64,
    /// Maximum number of interval subdivisions before giving up.
    pub max_subdivisions: usize,
    /// Geometric horizon growth factor for improper integrals.
    pub horizon_growth: f64,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        // FHTD values at the channel scales of interest span roughly
        // 1e-6..1e-1; the closed-form-vs-oracle comparisons are made at
        // 1e-8 relative, so the integrator needs headroom below that.
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            horizon_growth: 2.0,
        }
    }
}

impl QuadratureSettings {
    /// Same tolerances, different horizon-doubling stop increment.
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(QuadError::BadSettings("tolerances must be positive"));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadError::BadSettings("max_subdivisions must be >= 1"));
        }
        if !(self.horizon_growth > 1.0) {
            return Err(QuadError::BadSettings("horizon_growth must be > 1"));
        }
        Ok(())
    }
}

/// Failure modes of the numerics layer. A partial or unreliable value is
/// never returned silently.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadError {
    /// Square-bracket interval was invalid (`a > b` or non-finite).
    BadInterval,
    /// Settings failed validation.
    BadSettings(&'static str),
    /// The integrand produced a NaN/infinite value.
    NonFiniteIntegrand { at: f64 },
    /// Subdivision budget exhausted before the error dropped below tolerance.
    NonConvergent { value: f64, error_estimate: f64 },
    /// An improper integral's horizon doubling did not settle within budget.
    TailNotConverging { value: f64, last_increment: f64 },
    /// The 33-point pre-scan saw two separated local maxima.
    NonUnimodal,
}

impl fmt::Display for QuadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadError::BadInterval => write!(f, "invalid integration interval"),
            QuadError::BadSettings(what) => write!(f, "invalid quadrature settings: {what}"),
            QuadError::NonFiniteIntegrand { at } => {
                write!(f, "integrand is not finite at x = {at}")
            }
            QuadError::NonConvergent {
                value,
                error_estimate,
            } => write!(
                f,
                "quadrature did not converge (value {value}, error estimate {error_estimate})"
            ),
            QuadError::TailNotConverging {
                value,
                last_increment,
            } => write!(
                f,
                "improper-integral tail did not settle (value {value}, last increment {last_increment})"
            ),
            QuadError::NonUnimodal => write!(f, "pre-scan found multiple separated maxima"),
        }
    }
}

impl core::error::Error for QuadError {}

/// Result of a finite-interval integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Result of a semi-infinite integration.
#[derive(Debug, Clone, Copy)]
pub struct ImproperResult {
    pub value: f64,
    /// Increment contributed by the final horizon doubling. For power-law
    /// tails the true remainder can be several times this; pick `abs_tol`
    /// with that margin in mind.
    pub tail_estimate: f64,
}

// 15-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 7-point Gauss weights -- the classic QUADPACK dqk15 rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod 7-15 pass over `[a, b]`.
///
/// Returns `(kronrod, error_estimate)` or the abscissa at which the
/// integrand turned non-finite.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), f64> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    if !fc.is_finite() {
        return Err(center);
    }
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv = [0.0f64; 15];
    fv[7] = fc;

    for j in 0..7 {
        let x = half * XGK[j];
        let x1 = center - x;
        let x2 = center + x;
        let f1 = f(x1);
        if !f1.is_finite() {
            return Err(x1);
        }
        let f2 = f(x2);
        if !f2.is_finite() {
            return Err(x2);
        }
        fv[j] = f1;
        fv[14 - j] = f2;
        let sum = f1 + f2;
        resk += WGK[j] * sum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            // odd Kronrod indices carry the embedded Gauss nodes
            resg += WG[j / 2] * sum;
        }
    }

    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fv[7] - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let resk = resk * half;
    let resg = resg * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();

    // QUADPACK's empirical error rescaling.
    let mut err = (resk - resg).abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    let min_positive = f64::MIN_POSITIVE / (50.0 * f64::EPSILON);
    if resabs > min_positive {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Ok((resk, err))
}

struct Interval {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive quadrature of `f` over the finite interval `[a, b]`.
///
/// The worst interval (largest error estimate) is bisected until the total
/// estimated error satisfies `max(abs_tol, rel_tol * |value|)` or the
/// subdivision budget runs out, which is reported as
/// [`QuadError::NonConvergent`] rather than returned as a partial value.
/// Integrable endpoint singularities are handled by the bisection cascade;
/// endpoints themselves are never evaluated.
pub fn adaptive_quad<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    settings: &QuadratureSettings,
) -> Result<QuadResult, QuadError> {
    settings.validate()?;
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(QuadError::BadInterval);
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
        });
    }

    let (value, error) = gk15(&f, a, b).map_err(|at| QuadError::NonFiniteIntegrand { at })?;
    let mut heap = BinaryHeap::new();
    heap.push(Interval {
        a,
        b,
        value,
        error,
    });
    let mut total_value = value;
    let mut total_error = error;

    for _ in 0..settings.max_subdivisions {
        if total_error <= settings.abs_tol.max(settings.rel_tol * total_value.abs()) {
            return Ok(QuadResult {
                value: total_value,
                error_estimate: total_error,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval hit floating-point resolution; keep its estimate
            heap.push(worst);
            break;
        }
        total_value -= worst.value;
        total_error -= worst.error;
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gk15(&f, lo, hi).map_err(|at| QuadError::NonFiniteIntegrand { at })?;
            total_value += v;
            total_error += e;
            heap.push(Interval {
                a: lo,
                b: hi,
                value: v,
                error: e,
            });
        }
    }

    if total_error <= settings.abs_tol.max(settings.rel_tol * total_value.abs()) {
        Ok(QuadResult {
            value: total_value,
            error_estimate: total_error,
        })
    } else {
        Err(QuadError::NonConvergent {
            value: total_value,
            error_estimate: total_error,
        })
    }
}

/// Integral of a non-negative, eventually decaying `f` over `[a, infinity)`.
///
/// The horizon is grown geometrically (`horizon_growth`) and each new
/// segment integrated adaptively; iteration stops once a segment
/// contributes less than `abs_tol`. The last increment is reported as the
/// tail estimate.
pub fn improper_quad<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    settings: &QuadratureSettings,
) -> Result<ImproperResult, QuadError> {
    settings.validate()?;
    if !a.is_finite() {
        return Err(QuadError::BadInterval);
    }

    const MAX_SEGMENTS: usize = 256;
    let mut lo = a;
    let mut span = 1.0;
    let mut value = 0.0;
    let mut increment = f64::INFINITY;

    for _ in 0..MAX_SEGMENTS {
        let hi = lo + span;
        let seg = adaptive_quad(&f, lo, hi, settings)?;
        increment = seg.value;
        value += increment;
        if increment.abs() < settings.abs_tol {
            return Ok(ImproperResult {
                value,
                tail_estimate: increment,
            });
        }
        lo = hi;
        span *= settings.horizon_growth;
    }

    Err(QuadError::TailNotConverging {
        value,
        last_increment: increment,
    })
}

const PRESCAN_POINTS: usize = 33;

/// Maximize a continuous unimodal `g` on `[lo, hi]`.
///
/// A 33-point pre-scan locates the best cell (and flags clearly separated
/// maxima as [`QuadError::NonUnimodal`] instead of guessing); the cell is
/// then refined by golden-section search until the bracket is narrower
/// than `tol`. Returns `(argmax, g(argmax))`.
pub fn maximize_unimodal<F: Fn(f64) -> f64>(
    g: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64), QuadError> {
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(QuadError::BadInterval);
    }
    if !(tol > 0.0) {
        return Err(QuadError::BadSettings("tolerance must be positive"));
    }

    let step = (hi - lo) / (PRESCAN_POINTS - 1) as f64;
    let mut xs = [0.0f64; PRESCAN_POINTS];
    let mut vs = [0.0f64; PRESCAN_POINTS];
    let mut best = 0;
    let mut scale = 0.0f64;
    for i in 0..PRESCAN_POINTS {
        let x = if i == PRESCAN_POINTS - 1 {
            hi
        } else {
            lo + step * i as f64
        };
        let v = g(x);
        if !v.is_finite() {
            return Err(QuadError::NonFiniteIntegrand { at: x });
        }
        xs[i] = x;
        vs[i] = v;
        scale = scale.max(v.abs());
        if v > vs[best] {
            best = i;
        }
    }

    // Two local maxima only count as separate modes when the valley
    // between them dips below both by more than floating-point noise.
    let noise = 1e-12 * (1.0 + scale);
    let mut maxima: Vec<usize> = Vec::new();
    for i in 0..PRESCAN_POINTS {
        let left_ok = i == 0 || vs[i] >= vs[i - 1];
        let right_ok = i == PRESCAN_POINTS - 1 || vs[i] >= vs[i + 1];
        if left_ok && right_ok {
            maxima.push(i);
        }
    }
    for w in maxima.windows(2) {
        let (m1, m2) = (w[0], w[1]);
        if m2 == m1 + 1 {
            continue; // plateau
        }
        let valley = vs[m1 + 1..m2].iter().fold(f64::INFINITY, |acc, &v| acc.min(v));
        if vs[m1] - valley > noise && vs[m2] - valley > noise {
            return Err(QuadError::NonUnimodal);
        }
    }

    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(PRESCAN_POINTS - 1)];

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    while b - a > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2);
        }
        if x1 >= x2 {
            break; // bracket collapsed to floating-point resolution
        }
    }
    let (xm, fm) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    // the pre-scan best may still beat the refined point on a plateau edge
    if vs[best] > fm {
        Ok((xs[best], vs[best]))
    } else {
        Ok((xm, fm))
    }
}
