//! Baseline and oracle detectors, plus a single dispatch façade over every
//! method in the crate (exact solvers, the fast approximate solver, and the
//! classical baselines) so the benchmark driver treats them uniformly.

use crate::abb::{solve_abb, AbbParams};
use crate::bnb::{solve_alg1, solve_global, BnbError, GlobalResult, SolverOptions};
use crate::linalg::{lstsq, solve_spd};
use crate::links::LinkFunction;
use crate::model::{sgn, InstanceRng, RealInstance};
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Exhaustive search refuses instances beyond this many sign variables.
pub const EXHAUSTIVE_N_CAP: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Exact maximum-likelihood detection (branch and bound).
    Gml,
    /// Exact hinge-loss (amplitude-retrieval, ℓ₁) detection.
    ArL1,
    /// Exact squared-hinge (amplitude-retrieval, ℓ₂) detection.
    ArL2,
    /// Fast approximate hinge-loss detection (smoothed projected gradient).
    ArL1Abb,
    /// Sign of the least-squares fit of the observed signs.
    QuantZf,
    /// Brute force over all sign vectors under the ML criterion.
    Exhaustive,
    /// Exact ML via outer-level delayed cut generation.
    Alg1Gml,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Gml,
        Method::ArL1,
        Method::ArL2,
        Method::ArL1Abb,
        Method::QuantZf,
        Method::Exhaustive,
        Method::Alg1Gml,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::Gml => "gML",
            Method::ArL1 => "AR-L1",
            Method::ArL2 => "AR-L2",
            Method::ArL1Abb => "AR-L1-ABB",
            Method::QuantZf => "quantZF",
            Method::Exhaustive => "exhaustive",
            Method::Alg1Gml => "alg1-gML",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.tag() == tag)
    }
}

/// Method-specific counters; fields not meaningful for a method stay zero.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DetectorStats {
    pub wall_time: Duration,
    pub nodes: usize,
    pub lp_solves: usize,
    pub cuts: usize,
    pub cut_pool_ratio: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub stages: usize,
    pub stage_iteration_limit_hits: usize,
    pub backtrack_exhausted: usize,
    pub proven_optimal: bool,
}

#[derive(Debug, Clone)]
pub struct DetectionResult {
    /// Detected symbols, entries exactly ±1.
    pub x_hat: Vec<f64>,
    /// Value under the method's own criterion (ML negative log-likelihood,
    /// hinge loss, or least-squares residual for quantized ZF).
    pub objective: f64,
    pub method: Method,
    pub stats: DetectorStats,
}

#[derive(Debug, thiserror::Error)]
pub enum DetectError {
    #[error("channel matrix is rank deficient")]
    RankDeficient,
    #[error("instance has {n} sign variables, method caps at {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Solver(#[from] BnbError),
}

/// Ground-truth oracle: evaluates every sign vector. Ties go to the
/// lexicographically smallest vector (−1 before +1). The per-candidate
/// score reuses the running products bᵢᵀx, updated on the flipped
/// coordinates of the binary counter and refreshed periodically.
pub fn exhaustive_search(
    inst: &RealInstance,
    link: &LinkFunction,
) -> Result<DetectionResult, DetectError> {
    let start = Instant::now();
    let n = inst.n();
    let m = inst.m();
    if n > EXHAUSTIVE_N_CAP {
        return Err(DetectError::DimensionTooLarge { n, cap: EXHAUSTIVE_N_CAP });
    }
    let mut x = vec![-1.0; n];
    let mut t = inst.b.matvec(&x);
    let score = |t: &[f64]| t.iter().map(|&ti| link.eval(ti).0).sum::<f64>();
    let mut best_x = x.clone();
    let mut best_val = score(&t);
    for k in 1..1u64 << n {
        // Incrementing the counter flips the trailing ones and the bit
        // above them; bit b corresponds to coordinate n−1−b.
        for b in 0..=k.trailing_zeros() {
            let j = n - 1 - b as usize;
            x[j] = -x[j];
            let delta = 2.0 * x[j];
            for (i, ti) in t.iter_mut().enumerate() {
                *ti += delta * inst.b.get(i, j);
            }
        }
        if k % 4096 == 0 {
            t = inst.b.matvec(&x);
        }
        let val = score(&t);
        if val < best_val {
            best_val = val;
            best_x.copy_from_slice(&x);
        }
    }
    let _ = m;
    Ok(DetectionResult {
        x_hat: best_x,
        objective: best_val,
        method: Method::Exhaustive,
        stats: DetectorStats { wall_time: start.elapsed(), ..DetectorStats::default() },
    })
}

fn least_squares_fit(inst: &RealInstance, rhs: &[f64]) -> Option<Vec<f64>> {
    let gram = inst.h.gram();
    let hty = inst.h.tr_matvec(rhs);
    solve_spd(&gram, &hty).or_else(|| lstsq(&inst.h, rhs))
}

/// Classical baseline: sign of the least-squares estimate fitted to the
/// observed signs. Objective is the least-squares residual ‖H·x̂ − r‖².
pub fn quantized_zf(inst: &RealInstance) -> Result<DetectionResult, DetectError> {
    let start = Instant::now();
    let z = least_squares_fit(inst, &inst.r).ok_or(DetectError::RankDeficient)?;
    let x_hat: Vec<f64> = z.iter().map(|&v| sgn(v)).collect();
    let fit = inst.h.matvec(&x_hat);
    let objective = fit
        .iter()
        .zip(&inst.r)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();
    Ok(DetectionResult {
        x_hat,
        objective,
        method: Method::QuantZf,
        stats: DetectorStats { wall_time: start.elapsed(), ..DetectorStats::default() },
    })
}

/// The dithered-ZF start point before clipping: with d ~ N(0, (1−2/π)I),
/// returns √(π(N+σ²))/2 · (HᵀH + σ²I)⁻¹ Hᵀ(r − d).
pub fn bussgang_zf_unclipped(inst: &RealInstance, seed: u64) -> Vec<f64> {
    let m = inst.m();
    let n = inst.n();
    let mut rng = InstanceRng::new(seed);
    let dev = (1.0 - 2.0 / std::f64::consts::PI).sqrt();
    let mut d = Vec::with_capacity(m + 1);
    while d.len() < m {
        let (a, b) = rng.normal_pair();
        d.push(dev * a);
        d.push(dev * b);
    }
    d.truncate(m);
    let rhs: Vec<f64> = inst.r.iter().zip(&d).map(|(ri, di)| ri - di).collect();
    let mut a = inst.h.gram();
    let s2 = inst.sigma * inst.sigma;
    for j in 0..n {
        let v = a.get(j, j) + s2;
        a.set(j, j, v);
    }
    let hty = inst.h.tr_matvec(&rhs);
    let z = solve_spd(&a, &hty)
        .expect("regularized normal equations are positive definite");
    let scale = (std::f64::consts::PI * (n as f64 + s2)).sqrt() / 2.0;
    z.into_iter().map(|v| scale * v).collect()
}

/// Start point for the projected-gradient solver, clipped into the box so
/// the iterate invariant holds from the first step.
pub fn bussgang_zf_init(inst: &RealInstance, seed: u64) -> Vec<f64> {
    bussgang_zf_unclipped(inst, seed)
        .into_iter()
        .map(|v| v.clamp(-1.0, 1.0))
        .collect()
}

#[derive(Debug, Clone, Default)]
pub struct DetectOpts {
    pub solver: SolverOptions,
    /// Overrides the per-instance defaults when set.
    pub abb: Option<AbbParams>,
    /// Seed for the dithered start point of the approximate solver.
    pub init_seed: u64,
}

fn from_global(res: GlobalResult, method: Method) -> DetectionResult {
    DetectionResult {
        x_hat: res.x,
        objective: res.objective,
        method,
        stats: DetectorStats {
            wall_time: res.stats.wall_time,
            nodes: res.stats.nodes_processed,
            lp_solves: res.stats.lp_solves,
            cuts: res.stats.cuts_generated,
            cut_pool_ratio: res.stats.cut_pool_ratio,
            outer_iterations: res.stats.outer_iterations,
            proven_optimal: res.stats.proven_optimal,
            ..DetectorStats::default()
        },
    }
}

/// Runs the requested method on the instance. Every method reports its
/// symbols, its own objective, and wall time measured around the solve.
pub fn detect(
    inst: &RealInstance,
    method: Method,
    opts: &DetectOpts,
) -> Result<DetectionResult, DetectError> {
    match method {
        Method::Gml => {
            let link = LinkFunction::ml(inst.sigma);
            Ok(from_global(solve_global(inst, &link, &opts.solver)?, method))
        }
        Method::ArL1 => {
            Ok(from_global(solve_global(inst, &LinkFunction::ArL1, &opts.solver)?, method))
        }
        Method::ArL2 => {
            Ok(from_global(solve_global(inst, &LinkFunction::ArL2, &opts.solver)?, method))
        }
        Method::Alg1Gml => {
            let link = LinkFunction::ml(inst.sigma);
            Ok(from_global(solve_alg1(inst, &link, &opts.solver)?, method))
        }
        Method::ArL1Abb => {
            let params = opts
                .abb
                .clone()
                .unwrap_or_else(|| AbbParams::new(inst.n(), inst.sigma));
            let x0 = bussgang_zf_init(inst, opts.init_seed);
            Ok(solve_abb(inst, &params, &x0))
        }
        Method::QuantZf => quantized_zf(inst),
        Method::Exhaustive => exhaustive_search(inst, &LinkFunction::ml(inst.sigma)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::links::objective_value;
    use crate::model::{generate_instance, Mat};

    fn tiny(h_rows: Vec<Vec<f64>>, r: Vec<f64>, sigma: f64) -> RealInstance {
        let rows = h_rows.len();
        let cols = h_rows[0].len();
        let flat: Vec<f64> = h_rows.into_iter().flatten().collect();
        RealInstance::from_parts(Mat::from_vec(rows, cols, flat), r, sigma, None)
    }

    #[test]
    fn method_tags_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_tag(m.tag()), Some(m));
        }
        assert_eq!(Method::from_tag("unknown"), None);
    }

    #[test]
    fn exhaustive_single_coordinate() {
        let inst = tiny(vec![vec![2.0]], vec![1.0], 1.0);
        let res = exhaustive_search(&inst, &LinkFunction::ArL1).unwrap();
        assert_eq!(res.x_hat, vec![1.0]);
        assert_eq!(res.objective, 0.0);
    }

    #[test]
    fn exhaustive_two_coordinates_enumeration() {
        // (+1,−1) and (+1,+1) both reach hinge loss 0 here (the negative
        // sign vectors cost 2); the lexicographic rule keeps (+1,−1).
        let inst = tiny(vec![vec![1.0, 1.0], vec![1.0, -1.0]], vec![1.0, 1.0], 1.0);
        let res = exhaustive_search(&inst, &LinkFunction::ArL1).unwrap();
        assert_eq!(res.x_hat, vec![1.0, -1.0]);
        assert_eq!(res.objective, 0.0);
    }

    #[test]
    fn exhaustive_tie_breaks_lexicographically() {
        // The objective ignores the second coordinate, so (+1,−1) and
        // (+1,+1) tie; the smaller vector under −1 < +1 must win.
        let inst = tiny(vec![vec![1.0, 0.0]], vec![1.0], 1.0);
        let res = exhaustive_search(&inst, &LinkFunction::ArL1).unwrap();
        assert_eq!(res.x_hat, vec![1.0, -1.0]);
    }

    #[test]
    fn exhaustive_incremental_scores_match_fresh_evaluation() {
        let inst = generate_instance(5, 3, 5.0, 21);
        let link = LinkFunction::ml(inst.sigma);
        let res = exhaustive_search(&inst, &link).unwrap();
        // Recompute the winner's objective from scratch.
        let direct = objective_value(&inst, &link, &res.x_hat);
        assert!((res.objective - direct).abs() < 1e-10);
    }

    #[test]
    fn exhaustive_dimension_guard() {
        let inst = generate_instance(2, 13, 10.0, 3);
        let err = exhaustive_search(&inst, &LinkFunction::ArL1);
        assert!(matches!(err, Err(DetectError::DimensionTooLarge { n: 26, cap: 24 })));
    }

    #[test]
    fn quantized_zf_identity_channel() {
        let inst = tiny(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, -1.0], 1.0);
        let res = quantized_zf(&inst).unwrap();
        assert_eq!(res.x_hat, vec![1.0, -1.0]);
    }

    #[test]
    fn quantized_zf_scale_invariant() {
        let inst = generate_instance(6, 2, 5.0, 8);
        let res = quantized_zf(&inst).unwrap();
        let scaled = RealInstance::from_parts(
            Mat::from_vec(
                inst.h.rows,
                inst.h.cols,
                inst.h.data.iter().map(|v| 5.0 * v).collect(),
            ),
            inst.r.clone(),
            inst.sigma,
            None,
        );
        let res_scaled = quantized_zf(&scaled).unwrap();
        assert_eq!(res.x_hat, res_scaled.x_hat);
    }

    #[test]
    fn quantized_zf_matches_least_squares_oracle() {
        let inst = generate_instance(4, 2, 5.0, 13);
        let res = quantized_zf(&inst).unwrap();
        let oracle = lstsq(&inst.h, &inst.r).unwrap();
        let want: Vec<f64> = oracle.iter().map(|&v| sgn(v)).collect();
        assert_eq!(res.x_hat, want);
    }

    #[test]
    fn quantized_zf_rank_deficient_channel() {
        // Duplicate columns make the normal equations singular.
        let inst = tiny(
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![-1.0, -1.0]],
            vec![1.0, 1.0, -1.0],
            1.0,
        );
        assert!(matches!(quantized_zf(&inst), Err(DetectError::RankDeficient)));
    }

    #[test]
    fn bussgang_formula_matches_stacked_least_squares() {
        // Solving min ‖Hz − (r−d)‖² + σ²‖z‖² via the stacked system
        // [H; σI] z ≈ [r−d; 0] must agree with the normal-equations path.
        let inst = generate_instance(6, 2, 5.0, 17);
        let seed = 99;
        let got = bussgang_zf_unclipped(&inst, seed);
        let m = inst.m();
        let n = inst.n();
        let mut rng = InstanceRng::new(seed);
        let dev = (1.0 - 2.0 / std::f64::consts::PI).sqrt();
        let mut d = Vec::new();
        while d.len() < m {
            let (a, b) = rng.normal_pair();
            d.push(dev * a);
            d.push(dev * b);
        }
        d.truncate(m);
        let mut stacked = Mat::zeros(m + n, n);
        for i in 0..m {
            for j in 0..n {
                stacked.set(i, j, inst.h.get(i, j));
            }
        }
        for j in 0..n {
            stacked.set(m + j, j, inst.sigma);
        }
        let mut rhs: Vec<f64> = inst.r.iter().zip(&d).map(|(a, b)| a - b).collect();
        rhs.extend(std::iter::repeat(0.0).take(n));
        let z = lstsq(&stacked, &rhs).unwrap();
        let s2 = inst.sigma * inst.sigma;
        let scale = (std::f64::consts::PI * (n as f64 + s2)).sqrt() / 2.0;
        for j in 0..n {
            assert!(
                (got[j] - scale * z[j]).abs() < 1e-10,
                "coord {j}: {} vs {}",
                got[j],
                scale * z[j]
            );
        }
    }

    #[test]
    fn bussgang_vanishes_under_huge_noise() {
        let inst = generate_instance(6, 2, -200.0, 5);
        let v = bussgang_zf_unclipped(&inst, 1);
        // σ² ~ 1e20 swamps the data term; the regularized solution is ~0
        // and the √(N+σ²)/σ² scale still shrinks it to nothing.
        assert!(v.iter().all(|&x| x.abs() < 1e-6), "{v:?}");
    }

    #[test]
    fn bussgang_deterministic_and_clipped() {
        let inst = generate_instance(8, 3, 5.0, 6);
        let a = bussgang_zf_init(&inst, 42);
        let b = bussgang_zf_init(&inst, 42);
        assert_eq!(a, b);
        assert!(a.iter().all(|&v| (-1.0..=1.0).contains(&v)));
        let c = bussgang_zf_init(&inst, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn exhaustive_is_never_beaten() {
        for seed in 0..5 {
            let inst = generate_instance(6, 2, 5.0, 300 + seed);
            let link = LinkFunction::ml(inst.sigma);
            let oracle = exhaustive_search(&inst, &link).unwrap();
            let opts = DetectOpts::default();
            for m in [Method::Gml, Method::ArL1, Method::ArL1Abb, Method::QuantZf] {
                let res = detect(&inst, m, &opts).unwrap();
                let ml_val = objective_value(&inst, &link, &res.x_hat);
                assert!(
                    oracle.objective <= ml_val + 1e-10,
                    "seed {seed} {m:?}: {} beats oracle {}",
                    ml_val,
                    oracle.objective
                );
            }
        }
    }

    #[test]
    fn facade_agrees_with_direct_calls() {
        let inst = generate_instance(5, 2, 10.0, 77);
        let opts = DetectOpts::default();
        let gml = detect(&inst, Method::Gml, &opts).unwrap();
        let exh = detect(&inst, Method::Exhaustive, &opts).unwrap();
        assert!((gml.objective - exh.objective).abs() < 1e-8);
        let alg1 = detect(&inst, Method::Alg1Gml, &opts).unwrap();
        assert!((alg1.objective - exh.objective).abs() < 1e-8);
        assert_eq!(gml.method, Method::Gml);
        assert!(gml.stats.proven_optimal);
        assert!(gml.stats.nodes > 0);
    }
}
