//! Scalar convex per-measurement losses and stable Gaussian tail primitives.
//!
//! Every detector in this crate minimizes `Σᵢ g(bᵢᵀx)` for one of three
//! convex, non-increasing scalar losses `g`:
//!
//! * probit negative log-likelihood `g(t) = −log Φ(t/σ)` (maximum-likelihood
//!   detection),
//! * hinge `g(t) = max(−t, 0)` (the L1 amplitude-retrieval form),
//! * squared hinge `g(t) = max(−t, 0)²` (the L2 amplitude-retrieval form).
//!
//! The probit loss needs `log Φ` and its derivative kernel, the inverse
//! Mills ratio `φ/Φ`, far into the left tail where naive evaluation
//! underflows; both are built here on a scaled complementary error function.

use crate::linalg;
use crate::model::RealInstance;

/// Target relative accuracy of [`log_phi`] on `[-40, 40]` (checked against a
/// high-precision fixture table; outputs below the double-precision normal
/// range are exempt).
pub const LOG_PHI_REL_TOL: f64 = 1e-12;

/// Target relative accuracy of [`mills_ratio`] on `[-40, 40]` (same caveat).
pub const MILLS_REL_TOL: f64 = 1e-10;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
/// 1/√π
const SQRPI: f64 = 0.5641895835477562869;
/// √(2/π)
const SQRT_2_OVER_PI: f64 = 0.7978845608028653559;
/// 1/√(2π)
const INV_SQRT_2PI: f64 = 0.3989422804014326779;

// Rational approximations for erf/erfc/erfcx (Cody's classic minimax fits;
// relative error around 1e-16 in each regime).
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];
const ERF_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERF_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];
const ERF_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERF_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

/// erf(x) for |x| ≤ 0.46875.
fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut num = ERF_A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + ERF_A[i]) * z;
        den = (den + ERF_B[i]) * z;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// Scaled complementary error function `erfcx(x) = exp(x²)·erfc(x)` for
/// `x ≥ 0`. Decays like `1/(x√π)` instead of underflowing, which is what
/// makes the far-tail Gaussian formulas below possible.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "erfcx implemented for non-negative arguments");
    if x <= 0.46875 {
        // Small range: no cancellation in 1 − erf here.
        (x * x).exp() * (1.0 - erf_small(x))
    } else if x <= 4.0 {
        let mut num = ERF_C[8] * x;
        let mut den = x;
        for i in 0..7 {
            num = (num + ERF_C[i]) * x;
            den = (den + ERF_D[i]) * x;
        }
        (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        let z = 1.0 / (x * x);
        let mut num = ERF_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERF_P[i]) * z;
            den = (den + ERF_Q[i]) * z;
        }
        let r = z * (num + ERF_P[4]) / (den + ERF_Q[4]);
        (SQRPI - r) / x
    }
}

/// Complementary error function for any finite argument. For large positive
/// `x` the exponent is split (`x² = ⌊16x⌋²/256 + correction`) so the result
/// stays accurate down to the underflow threshold.
pub fn erfc(x: f64) -> f64 {
    if x < -0.46875 {
        2.0 - erfc(-x)
    } else if x <= 0.46875 {
        1.0 - erf_small(x)
    } else {
        let ysq = (x * 16.0).trunc() / 16.0;
        let del = (x - ysq) * (x + ysq);
        (-ysq * ysq).exp() * (-del).exp() * erfcx(x)
    }
}

/// `log Φ(z)` for the standard normal CDF Φ, accurate over `[-40, 40]`
/// without premature underflow.
///
/// Branches: in the far left tail (`z < −8`) the identity
/// `Φ(z) = ½·erfcx(−z/√2)·exp(−z²/2)` turns the log into a sum that never
/// underflows; for moderate `z ≤ 0` the direct `ln(½·erfc(−z/√2))` is exact
/// enough; for `z > 0`, `ln Φ = ln1p(−Q)` with the upper tail
/// `Q = ½·erfc(z/√2)`.
pub fn log_phi(z: f64) -> f64 {
    if z < -8.0 {
        let x = -z * FRAC_1_SQRT_2;
        (0.5 * erfcx(x)).ln() - 0.5 * z * z
    } else if z <= 0.0 {
        (0.5 * erfc(-z * FRAC_1_SQRT_2)).ln()
    } else {
        let q = 0.5 * erfc(z * FRAC_1_SQRT_2);
        (-q).ln_1p()
    }
}

/// Inverse Mills ratio `φ(z)/Φ(z)`: the derivative kernel of `−log Φ`.
/// Behaves like `−z` as `z → −∞`; computed through `erfcx` on the left half
/// line so that the ratio of two underflowing quantities is never formed.
pub fn mills_ratio(z: f64) -> f64 {
    if z <= 0.0 {
        SQRT_2_OVER_PI / erfcx(-z * FRAC_1_SQRT_2)
    } else {
        let phi = (-0.5 * z * z).exp() * INV_SQRT_2PI;
        let cap = 1.0 - 0.5 * erfc(z * FRAC_1_SQRT_2);
        phi / cap
    }
}

/// One of the three per-measurement convex losses. The probit loss carries
/// its noise level so downstream solvers stay σ-agnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkFunction {
    /// `g(t) = −log Φ(t/σ)`
    Ml { sigma: f64 },
    /// `g(t) = max(−t, 0)`
    ArL1,
    /// `g(t) = max(−t, 0)²`
    ArL2,
}

impl LinkFunction {
    pub fn ml(sigma: f64) -> Self {
        assert!(sigma > 0.0, "probit loss needs a positive noise level");
        LinkFunction::Ml { sigma }
    }

    /// True only for the hinge loss, whose outer linearization is exact with
    /// finitely many pieces.
    pub fn piecewise_linear(&self) -> bool {
        matches!(self, LinkFunction::ArL1)
    }

    /// Loss value and derivative at `t`. For the hinge the subgradient at
    /// the kink `t = 0` is taken as 0 (the flat piece), which linearizes to
    /// the trivially valid bound `w ≥ 0`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match *self {
            LinkFunction::Ml { sigma } => {
                let z = t / sigma;
                (-log_phi(z), -mills_ratio(z) / sigma)
            }
            LinkFunction::ArL1 => {
                if t < 0.0 {
                    (-t, -1.0)
                } else {
                    (0.0, 0.0)
                }
            }
            LinkFunction::ArL2 => {
                if t < 0.0 {
                    (t * t, 2.0 * t)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }
}

/// Objective value and gradient of `f(x) = Σᵢ g(bᵢᵀx)` at a point.
#[derive(Debug, Clone)]
pub struct ObjectiveEval {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Evaluates `f(x) = Σᵢ g(bᵢᵀx)` and `∇f(x) = Σᵢ g′(bᵢᵀx)·bᵢ`.
pub fn objective(inst: &RealInstance, link: &LinkFunction, x: &[f64]) -> ObjectiveEval {
    assert_eq!(x.len(), inst.n());
    let t = inst.b.matvec(x);
    let mut value = 0.0;
    let mut slopes = vec![0.0; inst.m()];
    for (i, &ti) in t.iter().enumerate() {
        let (g, gp) = link.eval(ti);
        value += g;
        slopes[i] = gp;
    }
    ObjectiveEval { value, gradient: inst.b.tr_matvec(&slopes) }
}

/// Objective value only (skips the gradient accumulation).
pub fn objective_value(inst: &RealInstance, link: &LinkFunction, x: &[f64]) -> f64 {
    assert_eq!(x.len(), inst.n());
    let mut value = 0.0;
    for i in 0..inst.m() {
        value += link.eval(linalg::dot(inst.b.row(i), x)).0;
    }
    value
}
