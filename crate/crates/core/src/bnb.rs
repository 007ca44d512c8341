//! Exact one-bit detection: branch and bound over x ∈ {−1,+1}ᴺ with an
//! outer-approximation of the convex per-row losses.
//!
//! The continuous relaxation is the LP
//!
//! ```text
//!   min Σᵢ wᵢ   s.t.   wᵢ ≥ g(t̂) + g′(t̂)(bᵢᵀx − t̂)  for collected anchors t̂,
//!                       wᵢ ≥ 0,   −1 ≤ x ≤ 1,
//! ```
//!
//! where each row of the epigraph is under-approximated by gradient cuts of
//! the convex link g. Two drivers share the machinery:
//!
//! * [`solve_global`] — branch and bound with cut generation embedded at the
//!   nodes: when a node relaxation lands on a ±1 vertex whose w values still
//!   undercut the true losses, violated cuts anchored at that vertex are
//!   added and the node is re-solved; vertices whose relaxation is exact
//!   become incumbents. Cuts are globally valid, so one LP engine (and one
//!   growing cut pool) serves the entire tree, re-solved in a few dual
//!   simplex pivots per node.
//! * [`solve_alg1`] — delayed constraint generation at the outer level: solve
//!   the mixed-binary relaxation under the current pool to optimality, then
//!   separate at its optimum; no violation means the w values coincide with
//!   the true losses and the point is a global minimizer.

use crate::linalg::lstsq;
use crate::links::{objective_value, LinkFunction};
use crate::lp::{LpModel, LpRow, LpStatus, Simplex};
use crate::model::{sgn, RealInstance};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

/// Absolute pruning gap: nodes whose relaxation is within this of the
/// incumbent are discarded, so returned objectives are optimal to this
/// tolerance (the integral-point values themselves are recomputed exactly).
const GAP_TOL: f64 = 1e-9;
/// Two cuts on the same row whose anchors differ by no more than this are
/// considered duplicates.
const ANCHOR_TOL: f64 = 1e-9;
/// Certification tolerance for the delayed-generation driver: a point whose
/// largest epigraph violation is below this is accepted as optimal.
const CERT_TOL: f64 = 1e-9;
/// Hard cap on cut-generation rounds at a single node (ordinarily a handful;
/// the anchors are deduplicated so the loop cannot run forever, this guards
/// against tolerance pathologies).
const MAX_CUT_ROUNDS: usize = 10_000;
/// Hard cap on delayed-generation outer iterations.
const MAX_OUTER_ITERS: usize = 1_000;

#[derive(Debug, thiserror::Error)]
pub enum BnbError {
    #[error("instance has {n} binary variables, solver caps at {cap}")]
    DimensionTooLarge { n: usize, cap: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

/// One gradient cut of row `row`'s loss, taken at scalar anchor t̂ = bᵢᵀx̂:
/// `w_row ≥ offset + slope·(bᵢᵀx)` with `offset = g(t̂) − g′(t̂)·t̂`.
#[derive(Debug, Clone, Copy)]
pub struct Cut {
    pub row: usize,
    pub anchor: f64,
    pub slope: f64,
    pub offset: f64,
}

impl Cut {
    fn at(link: &LinkFunction, row: usize, t: f64) -> Cut {
        let (g, dg) = link.eval(t);
        Cut { row, anchor: t, slope: dg, offset: g - dg * t }
    }

    /// LP form: `−slope·bᵢᵀx + w_row ≥ offset`.
    fn to_lp_row(self, inst: &RealInstance) -> LpRow {
        let n = inst.n();
        let b_row = inst.b.row(self.row);
        let mut coeffs = Vec::with_capacity(n + 1);
        if self.slope != 0.0 {
            for (j, &bij) in b_row.iter().enumerate() {
                if bij != 0.0 {
                    coeffs.push((j, -self.slope * bij));
                }
            }
        }
        coeffs.push((n + self.row, 1.0));
        LpRow { coeffs, rhs: self.offset }
    }
}

/// Deduplicated cut collection (per-row anchor lists).
struct CutPool {
    anchors: Vec<Vec<f64>>,
    cuts: Vec<Cut>,
}

impl CutPool {
    fn new(num_rows: usize) -> Self {
        CutPool { anchors: vec![Vec::new(); num_rows], cuts: Vec::new() }
    }

    fn try_add(&mut self, cut: Cut) -> bool {
        let seen = &mut self.anchors[cut.row];
        if seen.iter().any(|&a| (a - cut.anchor).abs() <= ANCHOR_TOL) {
            return false;
        }
        seen.push(cut.anchor);
        self.cuts.push(cut);
        true
    }

    fn len(&self) -> usize {
        self.cuts.len()
    }
}

/// Returns the cuts violated by `(x, w)`: rows where w_i undercuts the true
/// loss at t_i = bᵢᵀx by more than `tol`, each anchored at t_i.
pub fn separate(
    inst: &RealInstance,
    link: &LinkFunction,
    x: &[f64],
    w: &[f64],
    tol: f64,
) -> Vec<Cut> {
    let t = inst.b.matvec(x);
    let mut out = Vec::new();
    for (i, &ti) in t.iter().enumerate() {
        let (g, _) = link.eval(ti);
        if w[i] < g - tol {
            out.push(Cut::at(link, i, ti));
        }
    }
    out
}

/// Seed cuts before any search: the piecewise-linear link contributes its
/// single nontrivial facet per row (w ≥ −bᵢᵀx; the other facet is the w ≥ 0
/// bound), making the epigraph exact from the start. The smooth links get
/// one tangent per row at the sign of the least-squares fit of r (matched
/// filter when the channel is rank-deficient).
pub fn initial_cut_pool(inst: &RealInstance, link: &LinkFunction) -> Vec<Cut> {
    let m = inst.m();
    if matches!(link, LinkFunction::ArL1) {
        return (0..m)
            .map(|i| Cut { row: i, anchor: -1.0, slope: -1.0, offset: 0.0 })
            .collect();
    }
    let x0 = match lstsq(&inst.h, &inst.r) {
        Some(z) => z.iter().map(|&v| sgn(v)).collect::<Vec<f64>>(),
        None => inst.h.tr_matvec(&inst.r).iter().map(|&v| sgn(v)).collect(),
    };
    let t = inst.b.matvec(&x0);
    (0..m)
        .map(|i| Cut::at(link, i, t[i]))
        .filter(|c| c.slope != 0.0 || c.offset > 0.0)
        .collect()
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Stop after this many processed nodes (best incumbent is returned,
    /// flagged unproven).
    pub node_limit: usize,
    /// Optional wall-clock budget.
    pub time_limit: Option<Duration>,
    /// |x_j| ≥ 1 − this counts as integral.
    pub integrality_tol: f64,
    /// Epigraph violations above this trigger cut generation.
    pub violation_tol: f64,
    /// Evaluate the rounded relaxation point at every node as a candidate
    /// incumbent (cheap, tightens pruning early).
    pub incumbent_shortcut: bool,
    /// Dimension guard: refuse instances with more binary variables.
    pub n_cap: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            node_limit: 50_000_000,
            time_limit: None,
            integrality_tol: 1e-6,
            violation_tol: 1e-7,
            incumbent_shortcut: true,
            n_cap: 64,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub nodes_processed: usize,
    pub lp_solves: usize,
    pub cuts_generated: usize,
    /// |pool| / (M·2ᴺ), evaluated in log space to survive large N.
    pub cut_pool_ratio: f64,
    pub max_cut_rounds: usize,
    /// Outer delayed-generation iterations (0 for the embedded-cut driver).
    pub outer_iterations: usize,
    pub proven_optimal: bool,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct GlobalResult {
    /// Optimal ±1 assignment.
    pub x: Vec<f64>,
    /// True link objective at `x` (recomputed, not the LP bound).
    pub objective: f64,
    pub stats: SolveStats,
}

/// Heap entry; ordered so the pop order is lowest bound, then deepest, then
/// first-pushed. Fixings are bitmasks (bit j set in `fixed` means x_j is
/// pinned to +1 or −1 per `vals`), which is why N is capped at 64.
#[derive(Debug, Clone, Copy)]
struct Node {
    bound: f64,
    depth: u32,
    seq: u64,
    fixed: u64,
    vals: u64,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap pops the maximum, so "better" must compare greater.
        other
            .bound
            .partial_cmp(&self.bound)
            .unwrap_or(Ordering::Equal)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CutMode {
    /// Generate violated cuts at integral nodes and re-solve (embedded).
    Dynamic,
    /// Pool is frozen; integral relaxation optima become incumbents at their
    /// LP value (the mixed-binary subproblem of the delayed-generation loop).
    FixedPool,
}

struct CoreOutcome {
    best_x: Option<Vec<f64>>,
    best_obj: f64,
    best_w: Option<Vec<f64>>,
    proven: bool,
    nodes: usize,
    lp_solves: usize,
    cuts_generated: usize,
    max_cut_rounds: usize,
}

fn check_dims(inst: &RealInstance, opts: &SolverOptions) -> Result<(), BnbError> {
    let n = inst.n();
    let cap = opts.n_cap.min(64);
    if n > cap {
        return Err(BnbError::DimensionTooLarge { n, cap });
    }
    assert!(inst.m() > 0 && n > 0, "instance must have at least one row and column");
    Ok(())
}

fn pool_ratio(cuts: usize, m: usize, n: usize) -> f64 {
    if cuts == 0 {
        return 0.0;
    }
    ((cuts as f64).ln() - (m as f64).ln() - n as f64 * std::f64::consts::LN_2).exp()
}

/// Shared search over x ∈ {±1}ᴺ with the given cut pool.
fn solve_core(
    inst: &RealInstance,
    link: &LinkFunction,
    opts: &SolverOptions,
    pool: &mut CutPool,
    mode: CutMode,
    deadline: Option<Instant>,
) -> Result<CoreOutcome, BnbError> {
    let n = inst.n();
    let m = inst.m();
    let mut objective = vec![0.0; n + m];
    objective[n..].fill(1.0);
    let mut lower = vec![-1.0; n + m];
    lower[n..].fill(0.0);
    let mut upper = vec![1.0; n + m];
    upper[n..].fill(f64::INFINITY);
    let mut lp = LpModel::new(objective, lower, upper);
    lp.add_rows(pool.cuts.iter().map(|c| c.to_lp_row(inst)));
    let mut engine = Simplex::new(&lp);

    let mut out = CoreOutcome {
        best_x: None,
        best_obj: f64::INFINITY,
        best_w: None,
        proven: true,
        nodes: 0,
        lp_solves: 0,
        cuts_generated: 0,
        max_cut_rounds: 0,
    };
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node { bound: f64::NEG_INFINITY, depth: 0, seq, fixed: 0, vals: 0 });

    while let Some(node) = heap.pop() {
        if node.bound >= out.best_obj - GAP_TOL {
            // Best-first order: every remaining node is at least as bad.
            break;
        }
        if out.nodes >= opts.node_limit
            || deadline.is_some_and(|d| Instant::now() >= d)
        {
            out.proven = false;
            break;
        }
        out.nodes += 1;
        for j in 0..n {
            if node.fixed >> j & 1 == 1 {
                let v = if node.vals >> j & 1 == 1 { 1.0 } else { -1.0 };
                engine.set_struct_bounds(j, v, v);
            } else {
                engine.set_struct_bounds(j, -1.0, 1.0);
            }
        }
        let mut rounds = 0usize;
        loop {
            let sol = engine.reoptimize();
            out.lp_solves += 1;
            if sol.status != LpStatus::Optimal {
                return Err(BnbError::Numerical(format!(
                    "node relaxation ended {:?} after {} cuts",
                    sol.status,
                    pool.len()
                )));
            }
            if sol.objective_value >= out.best_obj - GAP_TOL {
                break;
            }
            let x_rel = &sol.primal[..n];
            if mode == CutMode::Dynamic && opts.incumbent_shortcut {
                let cand: Vec<f64> = x_rel.iter().map(|&v| sgn(v)).collect();
                let val = objective_value(inst, link, &cand);
                if val < out.best_obj {
                    out.best_obj = val;
                    out.best_x = Some(cand);
                }
            }
            let integral = x_rel.iter().all(|&v| v.abs() >= 1.0 - opts.integrality_tol);
            if !integral {
                // Branch on the most fractional coordinate.
                let mut j_star = usize::MAX;
                let mut best_mag = f64::INFINITY;
                for (j, &v) in x_rel.iter().enumerate() {
                    if node.fixed >> j & 1 == 0 && v.abs() < best_mag {
                        best_mag = v.abs();
                        j_star = j;
                    }
                }
                debug_assert!(j_star < n);
                let bound = sol.objective_value;
                for plus in [true, false] {
                    seq += 1;
                    heap.push(Node {
                        bound,
                        depth: node.depth + 1,
                        seq,
                        fixed: node.fixed | 1 << j_star,
                        vals: if plus { node.vals | 1 << j_star } else { node.vals },
                    });
                }
                break;
            }
            let x_int: Vec<f64> = x_rel.iter().map(|&v| sgn(v)).collect();
            if mode == CutMode::FixedPool {
                if sol.objective_value < out.best_obj {
                    out.best_obj = sol.objective_value;
                    out.best_x = Some(x_int);
                    out.best_w = Some(sol.primal[n..].to_vec());
                }
                break;
            }
            let violated = separate(inst, link, &x_int, &sol.primal[n..], opts.violation_tol);
            if violated.is_empty() {
                let val = objective_value(inst, link, &x_int);
                if val < out.best_obj {
                    out.best_obj = val;
                    out.best_x = Some(x_int);
                }
                break;
            }
            // The relaxation undercuts the losses at this vertex: tighten
            // with tangents anchored there and re-solve the same node.
            rounds += 1;
            if rounds > MAX_CUT_ROUNDS {
                return Err(BnbError::Numerical(
                    "cut generation failed to converge at a node".into(),
                ));
            }
            let mut added = Vec::new();
            for cut in violated {
                if pool.try_add(cut) {
                    added.push(cut.to_lp_row(inst));
                }
            }
            if added.is_empty() {
                // Anchors already present: the residual violation is below
                // the LP's resolution. The vertex value still upper-bounds.
                let val = objective_value(inst, link, &x_int);
                if val < out.best_obj {
                    out.best_obj = val;
                    out.best_x = Some(x_int);
                }
                break;
            }
            out.cuts_generated += added.len();
            engine.add_rows(&added);
        }
        out.max_cut_rounds = out.max_cut_rounds.max(rounds);
    }
    Ok(out)
}

/// Branch and bound with cut generation embedded at the nodes. Returns the
/// provably optimal assignment (up to the stated tolerances) unless a node
/// or time limit intervened, which the stats flag reports.
pub fn solve_global(
    inst: &RealInstance,
    link: &LinkFunction,
    opts: &SolverOptions,
) -> Result<GlobalResult, BnbError> {
    let start = Instant::now();
    check_dims(inst, opts)?;
    let deadline = opts.time_limit.map(|d| start + d);
    let mut pool = CutPool::new(inst.m());
    for cut in initial_cut_pool(inst, link) {
        pool.try_add(cut);
    }
    let initial = pool.len();
    let out = solve_core(inst, link, opts, &mut pool, CutMode::Dynamic, deadline)?;
    let x = out.best_x.ok_or_else(|| {
        BnbError::Numerical("search limits reached before any candidate was evaluated".into())
    })?;
    Ok(GlobalResult {
        objective: out.best_obj,
        stats: SolveStats {
            nodes_processed: out.nodes,
            lp_solves: out.lp_solves,
            cuts_generated: initial + out.cuts_generated,
            cut_pool_ratio: pool_ratio(pool.len(), inst.m(), inst.n()),
            max_cut_rounds: out.max_cut_rounds,
            outer_iterations: 0,
            proven_optimal: out.proven,
            wall_time: start.elapsed(),
        },
        x,
    })
}

/// Delayed constraint generation: alternate solving the mixed-binary
/// relaxation under the current pool to optimality and separating at its
/// optimum, until the optimum's w values match the true losses (then the
/// relaxation bound and the true objective coincide, certifying global
/// optimality).
pub fn solve_alg1(
    inst: &RealInstance,
    link: &LinkFunction,
    opts: &SolverOptions,
) -> Result<GlobalResult, BnbError> {
    let start = Instant::now();
    check_dims(inst, opts)?;
    let deadline = opts.time_limit.map(|d| start + d);
    let mut pool = CutPool::new(inst.m());
    for cut in initial_cut_pool(inst, link) {
        pool.try_add(cut);
    }
    let initial = pool.len();
    let mut stats = SolveStats::default();
    for outer in 1..=MAX_OUTER_ITERS {
        let out = solve_core(inst, link, opts, &mut pool, CutMode::FixedPool, deadline)?;
        stats.nodes_processed += out.nodes;
        stats.lp_solves += out.lp_solves;
        stats.outer_iterations = outer;
        let (x, w) = match (out.best_x, out.best_w) {
            (Some(x), Some(w)) => (x, w),
            _ => {
                return Err(BnbError::Numerical(
                    "relaxation produced no integral optimum within limits".into(),
                ))
            }
        };
        let violated = separate(inst, link, &x, &w, CERT_TOL);
        let mut added = 0usize;
        if !violated.is_empty() {
            for cut in violated {
                if pool.try_add(cut) {
                    added += 1;
                }
            }
        }
        let certified = added == 0;
        let limits_hit = !out.proven;
        if certified || limits_hit {
            stats.cuts_generated = initial + (pool.len() - initial);
            stats.cut_pool_ratio = pool_ratio(pool.len(), inst.m(), inst.n());
            stats.proven_optimal = certified && out.proven;
            stats.wall_time = start.elapsed();
            return Ok(GlobalResult {
                objective: objective_value(inst, link, &x),
                x,
                stats,
            });
        }
    }
    Err(BnbError::Numerical("delayed generation failed to certify".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, Mat};

    fn tiny(h_rows: Vec<Vec<f64>>, r: Vec<f64>, sigma: f64) -> RealInstance {
        let rows = h_rows.len();
        let cols = h_rows[0].len();
        let flat: Vec<f64> = h_rows.into_iter().flatten().collect();
        RealInstance::from_parts(Mat::from_vec(rows, cols, flat), r, sigma, None)
    }

    fn brute_force(inst: &RealInstance, link: &LinkFunction) -> (Vec<f64>, f64) {
        let n = inst.n();
        let mut best = (Vec::new(), f64::INFINITY);
        for k in 0..1u64 << n {
            let x: Vec<f64> = (0..n)
                .map(|j| if k >> (n - 1 - j) & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            let val = objective_value(inst, link, &x);
            if val < best.1 {
                best = (x, val);
            }
        }
        best
    }

    fn all_links(sigma: f64) -> [LinkFunction; 3] {
        [LinkFunction::ml(sigma), LinkFunction::ArL1, LinkFunction::ArL2]
    }

    #[test]
    fn single_row_recovers_sign() {
        let inst = tiny(vec![vec![1.0]], vec![1.0], 1.0);
        for link in all_links(1.0) {
            let res = solve_global(&inst, &link, &SolverOptions::default()).unwrap();
            assert_eq!(res.x, vec![1.0], "{link:?}");
            assert!(res.stats.proven_optimal);
        }
    }

    #[test]
    fn opposed_rows_match_direct_minimum() {
        // Contradictory observations: both signs cost the same; the solver
        // must return one of them with the exactly-evaluated objective.
        let inst = tiny(vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0], 0.8);
        for link in all_links(0.8) {
            let res = solve_global(&inst, &link, &SolverOptions::default()).unwrap();
            let (_, direct) = brute_force(&inst, &link);
            assert!((res.objective - direct).abs() < 1e-12, "{link:?}");
        }
        let ml = LinkFunction::ml(0.8);
        let res = solve_global(&inst, &ml, &SolverOptions::default()).unwrap();
        assert!(res.objective > 2.0 * std::f64::consts::LN_2);
    }

    #[test]
    fn random_instances_match_brute_force() {
        for seed in 0..10 {
            let inst = generate_instance(4, 2, 8.0, 1000 + seed);
            for link in all_links(inst.sigma) {
                let res = solve_global(&inst, &link, &SolverOptions::default()).unwrap();
                let (_, direct) = brute_force(&inst, &link);
                assert!(
                    (res.objective - direct).abs() < 1e-8,
                    "seed {seed} {link:?}: got {} want {direct}",
                    res.objective
                );
                assert!(res.stats.proven_optimal);
            }
        }
    }

    #[test]
    fn delayed_generation_matches_embedded() {
        for seed in 0..6 {
            let inst = generate_instance(4, 2, 5.0, 2000 + seed);
            let ml = LinkFunction::ml(inst.sigma);
            let a = solve_alg1(&inst, &ml, &SolverOptions::default()).unwrap();
            let b = solve_global(&inst, &ml, &SolverOptions::default()).unwrap();
            assert!(
                (a.objective - b.objective).abs() < 1e-8,
                "seed {seed}: {} vs {}",
                a.objective,
                b.objective
            );
            assert!(a.stats.outer_iterations >= 1);
            assert!(a.stats.proven_optimal);
        }
    }

    #[test]
    fn piecewise_linear_pool_is_exact_epigraph() {
        // With the hinge link the initial pool makes every node relaxation
        // exact at vertices, so no cut rounds are ever needed.
        let inst = generate_instance(4, 2, 10.0, 77);
        let res = solve_global(&inst, &LinkFunction::ArL1, &SolverOptions::default()).unwrap();
        assert_eq!(res.stats.max_cut_rounds, 0);
    }

    #[test]
    fn node_limit_returns_unproven_incumbent() {
        let inst = generate_instance(6, 3, 0.0, 9);
        let opts = SolverOptions { node_limit: 1, ..SolverOptions::default() };
        let res = solve_global(&inst, &LinkFunction::ml(inst.sigma), &opts).unwrap();
        assert!(!res.stats.proven_optimal);
        assert_eq!(res.x.len(), inst.n());
        assert!(res.x.iter().all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn dimension_guard() {
        let inst = generate_instance(2, 33, 10.0, 1);
        let err = solve_global(&inst, &LinkFunction::ArL1, &SolverOptions::default());
        assert!(matches!(err, Err(BnbError::DimensionTooLarge { n: 66, cap: 64 })));
    }

    #[test]
    fn separation_silent_when_epigraph_satisfied() {
        let inst = generate_instance(3, 2, 10.0, 4);
        let link = LinkFunction::ml(inst.sigma);
        let x: Vec<f64> = vec![1.0, -1.0, 1.0, 1.0];
        let t = inst.b.matvec(&x);
        let w: Vec<f64> = t.iter().map(|&ti| link.eval(ti).0 + 1e-6).collect();
        assert!(separate(&inst, &link, &x, &w, 1e-7).is_empty());
        let w_low: Vec<f64> = t.iter().map(|&ti| link.eval(ti).0 - 1e-3).collect();
        assert_eq!(separate(&inst, &link, &x, &w_low, 1e-7).len(), inst.m());
    }

    #[test]
    fn cut_pool_ratio_is_tiny_fraction() {
        let inst = generate_instance(8, 3, 10.0, 31);
        let res =
            solve_global(&inst, &LinkFunction::ml(inst.sigma), &SolverOptions::default()).unwrap();
        assert!(res.stats.cut_pool_ratio > 0.0);
        assert!(res.stats.cut_pool_ratio < 1.0);
        // M·2ᴺ = 16·64 possible anchors; the pool stays well under that.
        assert!(res.stats.cuts_generated < 200);
    }

    #[test]
    fn deterministic_across_calls() {
        let inst = generate_instance(5, 3, 5.0, 12);
        let ml = LinkFunction::ml(inst.sigma);
        let a = solve_global(&inst, &ml, &SolverOptions::default()).unwrap();
        let b = solve_global(&inst, &ml, &SolverOptions::default()).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.stats.nodes_processed, b.stats.nodes_processed);
        assert_eq!(a.stats.cuts_generated, b.stats.cuts_generated);
    }
}
