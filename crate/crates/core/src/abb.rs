//! Fast approximate hinge-loss detection: smooth the per-row hinge, add a
//! concave penalty that pushes iterates toward the ±1 vertices, and run a
//! projected-gradient method with alternating Barzilai-Borwein step sizes
//! and a nonmonotone (GLL) line search, growing the penalty in stages.
//!
//! The smoothed objective at penalty weight λ is
//!
//! ```text
//!   F_λ(x) = Σᵢ v_ρ(bᵢᵀx) − λ‖x‖²,   x ∈ [−1, 1]ᴺ,
//! ```
//!
//! where v_ρ is the hinge max(−t, 0) smoothed over the weight simplex with
//! parameter ρ: v_ρ(t) = max(−t,0) − ρ/2 at worst and never exceeds the
//! hinge itself. Once λ outgrows half the gradient's Lipschitz constant the
//! stationary points sit at vertices, so the final iterate rounds cleanly.

use crate::detectors::{DetectionResult, DetectorStats, Method};
use crate::linalg::{dot, norm2, norm_inf};
use crate::links::{objective_value, LinkFunction};
use crate::model::{sgn, RealInstance};
use std::time::Instant;

/// Tunables. `new` fills in the working defaults for an N-dimensional
/// instance with noise level σ; every field can be overridden afterwards.
#[derive(Debug, Clone)]
pub struct AbbParams {
    /// Starting penalty weight, clamped so at least one growth step fits
    /// under `lambda_max`.
    pub lambda_init: f64,
    pub lambda_max: f64,
    /// Per-stage penalty growth factor.
    pub growth_c: f64,
    /// Smoothing width.
    pub rho: f64,
    /// Sufficient-decrease coefficient in the line search, in (0,1).
    pub tau: f64,
    /// Nonmonotone memory: acceptance compares against the max of this many
    /// previous objective values.
    pub gll_memory_kappa: usize,
    /// Stop a stage when the iterate moves less than this (ℓ₂).
    pub eps_stop: f64,
    pub max_inner_iters: usize,
    /// Line-search step shrink factor in (0,1).
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
}

impl AbbParams {
    pub fn new(n: usize, sigma: f64) -> Self {
        let lambda_max = 100.0;
        let growth_c = 5.0;
        AbbParams {
            lambda_init: (0.1 * n as f64).min(lambda_max / growth_c),
            lambda_max,
            growth_c,
            rho: 0.3 + (1.0 + sigma).ln(),
            tau: 0.1,
            gll_memory_kappa: 4,
            eps_stop: 1e-6 * (n as f64).sqrt(),
            max_inner_iters: 500,
            backtrack_factor: 0.5,
            max_backtracks: 40,
        }
    }

    fn validate(&self) {
        assert!(self.lambda_init > 0.0 && self.lambda_max > 0.0);
        assert!(self.growth_c > 1.0);
        assert!(self.rho > 0.0);
        assert!(self.tau > 0.0 && self.tau < 1.0);
        assert!(self.gll_memory_kappa >= 1);
        assert!(self.eps_stop > 0.0);
        assert!(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0);
    }
}

/// Iteration state of one penalty stage.
#[derive(Debug, Clone)]
pub struct AbbState {
    pub x_prev: Vec<f64>,
    pub x_curr: Vec<f64>,
    pub grad_prev: Vec<f64>,
    pub grad_curr: Vec<f64>,
    /// Last κ objective values (ring, oldest first).
    pub f_history: Vec<f64>,
    pub lambda: f64,
    pub iter: usize,
}

/// Smoothed hinge term and its maximizing weight θ ∈ [0,1]:
/// θ = clip((ρ−t)/(2ρ)); v = −t−ρ/2 left of −ρ, −ρ/2 right of ρ, and the
/// interpolated quadratic in between. v′(t) = −θ everywhere.
fn smoothed_term(t: f64, rho: f64) -> (f64, f64) {
    if t <= -rho {
        (-t - rho / 2.0, 1.0)
    } else if t >= rho {
        (-rho / 2.0, 0.0)
    } else {
        let th = (rho - t) / (2.0 * rho);
        let v = th * -t - rho / 2.0 * (th * th + (1.0 - th) * (1.0 - th));
        (v, th)
    }
}

fn smoothed_value(inst: &RealInstance, rho: f64, lambda: f64, x: &[f64]) -> f64 {
    let t = inst.b.matvec(x);
    let mut f = 0.0;
    for &ti in &t {
        f += smoothed_term(ti, rho).0;
    }
    f - lambda * dot(x, x)
}

/// F_λ(x) and ∇F_λ(x) = −Σᵢ θᵢ bᵢ − 2λx.
pub fn smoothed_value_and_grad(
    inst: &RealInstance,
    rho: f64,
    lambda: f64,
    x: &[f64],
) -> (f64, Vec<f64>) {
    assert!(rho > 0.0);
    let t = inst.b.matvec(x);
    let mut f = 0.0;
    let mut theta = vec![0.0; t.len()];
    for (i, &ti) in t.iter().enumerate() {
        let (v, th) = smoothed_term(ti, rho);
        f += v;
        theta[i] = th;
    }
    let bt = inst.b.tr_matvec(&theta);
    let grad: Vec<f64> = bt
        .iter()
        .zip(x)
        .map(|(&btj, &xj)| -btj - 2.0 * lambda * xj)
        .collect();
    (f - lambda * dot(x, x), grad)
}

/// Gradient Lipschitz bound of the smoothed (unpenalized) loss:
/// (1/ρ)·Σᵢ‖bᵢ‖². Seeds the first step size of every stage.
pub fn lipschitz_bound(inst: &RealInstance, rho: f64) -> f64 {
    assert!(rho > 0.0);
    let mut acc = 0.0;
    for i in 0..inst.m() {
        let row = inst.b.row(i);
        acc += dot(row, row);
    }
    acc / rho
}

/// Alternating Barzilai-Borwein step from displacement s = x_ℓ − x_{ℓ−1}
/// and gradient change β: ‖s‖²/|⟨s,β⟩| on even iterations, |⟨s,β⟩|/‖β‖² on
/// odd ones (absolute values because the penalty makes the model
/// indefinite). Degenerate quotients fall back to the supplied step.
pub fn abb_step_size(s: &[f64], beta: &[f64], iter: usize, fallback: f64) -> f64 {
    let sb = dot(s, beta).abs();
    let raw = if iter % 2 == 0 {
        if sb < 1e-14 {
            return fallback;
        }
        dot(s, s) / sb
    } else {
        let bb = dot(beta, beta);
        if bb < 1e-14 {
            return fallback;
        }
        sb / bb
    };
    if raw.is_finite() && raw >= 1e-14 {
        raw
    } else {
        fallback
    }
}

#[derive(Debug, Clone)]
pub struct LineSearchResult {
    pub eta: f64,
    pub x_next: Vec<f64>,
    pub f_next: f64,
    /// True when no trial step passed the acceptance test and the smallest
    /// one was taken anyway.
    pub exhausted: bool,
}

/// Backtracks η ∈ {1, b, b², …} until
/// F(x + ηd) ≤ max(f_history) + τ·η·⟨grad, d⟩. The direction d must point
/// from x to a feasible point (d = projection − x), so every trial stays in
/// the box by convexity.
pub fn gll_line_search(
    inst: &RealInstance,
    rho: f64,
    lambda: f64,
    x: &[f64],
    d: &[f64],
    grad: &[f64],
    f_history: &[f64],
    params: &AbbParams,
) -> LineSearchResult {
    let f_r = f_history.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let gd = dot(grad, d);
    debug_assert!(gd <= 1e-10, "projected direction must not ascend: ⟨g,d⟩ = {gd}");
    let mut eta = 1.0;
    let mut last: Option<(Vec<f64>, f64)> = None;
    for _ in 0..=params.max_backtracks {
        let x_try: Vec<f64> = x
            .iter()
            .zip(d)
            .map(|(&xj, &dj)| (xj + eta * dj).clamp(-1.0, 1.0))
            .collect();
        let f_try = smoothed_value(inst, rho, lambda, &x_try);
        if f_try <= f_r + params.tau * eta * gd {
            return LineSearchResult { eta, x_next: x_try, f_next: f_try, exhausted: false };
        }
        last = Some((x_try, f_try));
        eta *= params.backtrack_factor;
    }
    let (x_next, f_next) = last.expect("at least one trial step");
    LineSearchResult { eta: eta / params.backtrack_factor, x_next, f_next, exhausted: true }
}

struct RunOutcome {
    x_relaxed: Vec<f64>,
    inner_iterations: usize,
    stages: usize,
    stage_limit_hits: usize,
    backtrack_exhausted: usize,
}

/// The full homotopy: run a stage at the current λ until the iterate stalls
/// (or the per-stage budget runs out), then grow λ, stopping once the grown
/// value reaches λ_max. The first stage always runs even if λ starts high.
fn run_abb(inst: &RealInstance, params: &AbbParams, x0: &[f64]) -> RunOutcome {
    params.validate();
    let n = inst.n();
    assert_eq!(x0.len(), n);
    let lip = lipschitz_bound(inst, params.rho).max(1e-12);
    let mut x: Vec<f64> = x0.iter().map(|&v| v.clamp(-1.0, 1.0)).collect();
    let mut out = RunOutcome {
        x_relaxed: Vec::new(),
        inner_iterations: 0,
        stages: 0,
        stage_limit_hits: 0,
        backtrack_exhausted: 0,
    };
    let mut lambda = params.lambda_init;
    // The iterate pair and iteration counter persist across homotopy stages
    // (the path-tracing carries BB curvature through each λ switch); only
    // the objective history restarts, since F_λ jumps when λ changes.
    let mut x_prev_carry = x.clone();
    let mut ell = 0usize;
    loop {
        out.stages += 1;
        let (f0, g0) = smoothed_value_and_grad(inst, params.rho, lambda, &x);
        let gp = if x_prev_carry == x {
            g0.clone()
        } else {
            smoothed_value_and_grad(inst, params.rho, lambda, &x_prev_carry).1
        };
        let mut st = AbbState {
            x_prev: x_prev_carry,
            x_curr: x,
            grad_prev: gp,
            grad_curr: g0,
            f_history: vec![f0],
            lambda,
            iter: ell,
        };
        let fallback = 1.0 / lip;
        let mut alpha = {
            let s: Vec<f64> =
                st.x_curr.iter().zip(&st.x_prev).map(|(a, b)| a - b).collect();
            let beta: Vec<f64> =
                st.grad_curr.iter().zip(&st.grad_prev).map(|(a, b)| a - b).collect();
            abb_step_size(&s, &beta, st.iter, fallback).clamp(1e-12, 1e12)
        };
        let stage_iter_cap = st.iter + params.max_inner_iters;
        let mut converged = false;
        while st.iter < stage_iter_cap {
            let d: Vec<f64> = st
                .x_curr
                .iter()
                .zip(&st.grad_curr)
                .map(|(&xj, &gj)| (xj - alpha * gj).clamp(-1.0, 1.0) - xj)
                .collect();
            let ls = gll_line_search(
                inst,
                params.rho,
                lambda,
                &st.x_curr,
                &d,
                &st.grad_curr,
                &st.f_history,
                params,
            );
            out.backtrack_exhausted += ls.exhausted as usize;
            let (f_next, g_next) =
                smoothed_value_and_grad(inst, params.rho, lambda, &ls.x_next);
            debug_assert!(
                f_next
                    <= st.f_history.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1e-10,
                "accepted step broke the nonmonotone bound"
            );
            st.x_prev = std::mem::replace(&mut st.x_curr, ls.x_next);
            st.grad_prev = std::mem::replace(&mut st.grad_curr, g_next);
            st.f_history.push(f_next);
            if st.f_history.len() > params.gll_memory_kappa {
                st.f_history.remove(0);
            }
            let s: Vec<f64> =
                st.x_curr.iter().zip(&st.x_prev).map(|(a, b)| a - b).collect();
            let step_norm = norm2(&s);
            out.inner_iterations += 1;
            if step_norm <= params.eps_stop {
                converged = true;
                break;
            }
            let beta: Vec<f64> =
                st.grad_curr.iter().zip(&st.grad_prev).map(|(a, b)| a - b).collect();
            let fallback = 1.0_f64.min(1.0 / norm_inf(&st.grad_curr).max(1e-12));
            alpha = abb_step_size(&s, &beta, st.iter, fallback).clamp(1e-12, 1e12);
            st.iter += 1;
        }
        if !converged {
            out.stage_limit_hits += 1;
        }
        ell = st.iter;
        x = st.x_curr;
        x_prev_carry = st.x_prev;
        lambda *= params.growth_c;
        if lambda >= params.lambda_max {
            break;
        }
    }
    out.x_relaxed = x;
    out
}

/// Runs the smoothed-penalty homotopy from `x0` (clipped into the box) and
/// rounds the final iterate to signs. The reported objective is the true
/// hinge loss of the sign vector, comparable with the exact solvers.
pub fn solve_abb(inst: &RealInstance, params: &AbbParams, x0: &[f64]) -> DetectionResult {
    let start = Instant::now();
    let out = run_abb(inst, params, x0);
    let x_hat: Vec<f64> = out.x_relaxed.iter().map(|&v| sgn(v)).collect();
    let objective = objective_value(inst, &LinkFunction::ArL1, &x_hat);
    DetectionResult {
        x_hat,
        objective,
        method: Method::ArL1Abb,
        stats: DetectorStats {
            wall_time: start.elapsed(),
            inner_iterations: out.inner_iterations,
            stages: out.stages,
            stage_iteration_limit_hits: out.stage_limit_hits,
            backtrack_exhausted: out.backtrack_exhausted,
            ..DetectorStats::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::bussgang_zf_init;
    use crate::model::{generate_instance, InstanceRng, Mat};

    fn single_row(b: Vec<f64>) -> RealInstance {
        let n = b.len();
        RealInstance::from_parts(Mat::from_vec(1, n, b), vec![1.0], 1.0, None)
    }

    #[test]
    fn smoothed_term_closed_form_values() {
        // ρ=1, t=0: θ=1/2, value −1/4.
        let (v, th) = smoothed_term(0.0, 1.0);
        assert!((th - 0.5).abs() < 1e-15);
        assert!((v + 0.25).abs() < 1e-15);
        // Deep left tail saturates θ at 1.
        let rho = 0.7;
        let t = -10.0 * rho;
        let (v, th) = smoothed_term(t, rho);
        assert_eq!(th, 1.0);
        assert!((v - (-t - rho / 2.0)).abs() < 1e-15);
        // Continuity at both kinks.
        for rho in [0.3, 1.0, 2.5] {
            for t in [-rho, rho] {
                let eps = 1e-9;
                let (a, _) = smoothed_term(t - eps, rho);
                let (b, _) = smoothed_term(t + eps, rho);
                assert!((a - b).abs() < 1e-8, "kink at {t}");
            }
        }
    }

    #[test]
    fn smoothing_sandwich_on_grid() {
        for rho in [0.31f64, 1.0, 2.0] {
            let mut t = -5.0 * rho;
            while t <= 5.0 * rho {
                let hinge = (-t).max(0.0);
                let (v, _) = smoothed_term(t, rho);
                assert!(v >= hinge - rho / 2.0 - 1e-12, "t={t} rho={rho}");
                assert!(v <= hinge + 1e-12, "t={t} rho={rho}");
                t += rho / 37.0;
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let inst = generate_instance(6, 2, 5.0, 42);
        let mut rng = InstanceRng::new(7);
        let n = inst.n();
        let (rho, lambda) = (0.9, 1.0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| 2.0 * rng.uniform01() - 1.0).collect();
            let (_, grad) = smoothed_value_and_grad(&inst, rho, lambda, &x);
            for j in 0..n {
                let h = 1e-6;
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fd = (smoothed_value(&inst, rho, lambda, &xp)
                    - smoothed_value(&inst, rho, lambda, &xm))
                    / (2.0 * h);
                let scale = grad[j].abs().max(1.0);
                assert!(
                    (grad[j] - fd).abs() / scale < 1e-5,
                    "coord {j}: analytic {} vs fd {fd}",
                    grad[j]
                );
            }
        }
    }

    #[test]
    fn step_size_formulas() {
        let s = [1.0, 1.0];
        let beta = [2.0, 0.0];
        assert!((abb_step_size(&s, &beta, 0, 9.0) - 1.0).abs() < 1e-15);
        assert!((abb_step_size(&s, &beta, 1, 9.0) - 0.5).abs() < 1e-15);
        // s = β: both quotients are 1.
        let v = [0.3, -0.4, 1.1];
        assert!((abb_step_size(&v, &v, 0, 9.0) - 1.0).abs() < 1e-12);
        assert!((abb_step_size(&v, &v, 1, 9.0) - 1.0).abs() < 1e-12);
        // Orthogonal s, β: degenerate on both parities → fallback.
        let s = [1.0, 0.0];
        let beta = [0.0, 1.0];
        assert_eq!(abb_step_size(&s, &beta, 0, 0.25), 0.25);
        assert_eq!(abb_step_size(&s, &beta, 1, 0.25), 0.25);
        assert_eq!(abb_step_size(&s, &[0.0, 0.0], 1, 0.125), 0.125);
    }

    #[test]
    fn line_search_accepts_full_step_under_loose_history() {
        let inst = single_row(vec![1.0]);
        let params = AbbParams::new(1, 1.0);
        let x = vec![0.0];
        let (_, g) = smoothed_value_and_grad(&inst, params.rho, 0.0, &x);
        let alpha = 0.1;
        let d: Vec<f64> =
            vec![(x[0] - alpha * g[0]).clamp(-1.0, 1.0) - x[0]];
        let hist = vec![f64::INFINITY];
        let ls = gll_line_search(&inst, params.rho, 0.0, &x, &d, &g, &hist, &params);
        assert_eq!(ls.eta, 1.0);
        assert!(!ls.exhausted);
    }

    #[test]
    fn line_search_backtracks_on_overshoot() {
        // Two opposed rows make the smoothed loss a symmetric bowl; a huge
        // step from the slope overshoots the minimum and must be shrunk.
        let inst = RealInstance::from_parts(
            Mat::from_vec(2, 1, vec![1.0, -1.0]),
            vec![1.0, 1.0],
            1.0,
            None,
        );
        let mut params = AbbParams::new(1, 1.0);
        params.rho = 1.0;
        let x = vec![-0.5];
        let (f, g) = smoothed_value_and_grad(&inst, 1.0, 0.0, &x);
        let alpha = 4.0;
        let d: Vec<f64> = vec![(x[0] - alpha * g[0]).clamp(-1.0, 1.0) - x[0]];
        let hist = vec![f];
        let ls = gll_line_search(&inst, 1.0, 0.0, &x, &d, &g, &hist, &params);
        assert!(ls.eta < 1.0, "full step should overshoot, got eta {}", ls.eta);
        let gd = dot(&g, &d);
        assert!(ls.f_next <= f + params.tau * ls.eta * gd + 1e-10);
    }

    #[test]
    fn lipschitz_bound_examples() {
        let inst = single_row(vec![3.0, 4.0]);
        assert!((lipschitz_bound(&inst, 1.0) - 25.0).abs() < 1e-12);
        let scaled = single_row(vec![6.0, 8.0]);
        assert!((lipschitz_bound(&scaled, 1.0) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_gradient_variation_within_bound() {
        let inst = generate_instance(5, 2, 10.0, 3);
        let rho = 0.8;
        let lip = lipschitz_bound(&inst, rho);
        let mut rng = InstanceRng::new(11);
        let n = inst.n();
        for _ in 0..50 {
            let a: Vec<f64> = (0..n).map(|_| 2.0 * rng.uniform01() - 1.0).collect();
            let b: Vec<f64> = (0..n).map(|_| 2.0 * rng.uniform01() - 1.0).collect();
            let (_, ga) = smoothed_value_and_grad(&inst, rho, 0.0, &a);
            let (_, gb) = smoothed_value_and_grad(&inst, rho, 0.0, &b);
            let dg: Vec<f64> = ga.iter().zip(&gb).map(|(p, q)| p - q).collect();
            let dx: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
            assert!(norm2(&dg) <= lip * norm2(&dx) + 1e-9);
        }
    }

    #[test]
    fn stage_count_follows_growth_schedule() {
        // N=16 defaults: λ runs 1.6 → 8 → 40, i.e. three stages.
        let inst = generate_instance(8, 8, 10.0, 2);
        let params = AbbParams::new(inst.n(), inst.sigma);
        let x0 = vec![0.0; inst.n()];
        let res = solve_abb(&inst, &params, &x0);
        assert_eq!(res.stats.stages, 3);
        // λ already at the cap: exactly one stage.
        let mut one = params.clone();
        one.lambda_init = 150.0;
        let res = solve_abb(&inst, &one, &x0);
        assert_eq!(res.stats.stages, 1);
    }

    #[test]
    fn recovers_signs_without_noise() {
        // Effectively noiseless channel; the hinge optimum is the true
        // vector with overwhelming probability at this aspect ratio.
        for seed in 1..=5u64 {
            let inst = generate_instance(16, 2, 80.0, seed);
            let x0 = bussgang_zf_init(&inst, seed);
            let res = solve_abb(&inst, &AbbParams::new(inst.n(), inst.sigma), &x0);
            let truth = inst.x_true.as_ref().unwrap();
            assert_eq!(&res.x_hat, truth, "seed {seed}");
            assert_eq!(res.objective, 0.0, "seed {seed}");
        }
    }

    #[test]
    fn iterates_land_near_vertices() {
        // The growing penalty should park nearly every coordinate at ±1.
        let mut near = 0usize;
        let mut total = 0usize;
        for seed in 0..20u64 {
            let inst = generate_instance(16, 4, 10.0, 500 + seed);
            let x0 = bussgang_zf_init(&inst, seed);
            let out = run_abb(&inst, &AbbParams::new(inst.n(), inst.sigma), &x0);
            near += out.x_relaxed.iter().filter(|v| v.abs() >= 0.99).count();
            total += inst.n();
        }
        assert!(
            near as f64 >= 0.95 * total as f64,
            "only {near}/{total} coordinates near vertices"
        );
    }

    #[test]
    fn deterministic_given_start() {
        let inst = generate_instance(12, 3, 8.0, 9);
        let x0 = bussgang_zf_init(&inst, 4);
        let p = AbbParams::new(inst.n(), inst.sigma);
        let a = solve_abb(&inst, &p, &x0);
        let b = solve_abb(&inst, &p, &x0);
        assert_eq!(a.x_hat, b.x_hat);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.stats.inner_iterations, b.stats.inner_iterations);
    }

    #[test]
    fn start_point_outside_box_is_clipped() {
        let inst = generate_instance(6, 2, 10.0, 1);
        let x0 = vec![5.0; inst.n()];
        let res = solve_abb(&inst, &AbbParams::new(inst.n(), inst.sigma), &x0);
        assert!(res.x_hat.iter().all(|&v| v == 1.0 || v == -1.0));
    }
}
