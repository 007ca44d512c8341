//! Dense bounded-variable simplex solver for the node relaxations.
//!
//! Models are `min cᵀu` subject to `aᵏᵀu ≥ rhsᵏ` rows and box bounds
//! `l ≤ u ≤ h` (entries may be infinite). Internally each row gets a surplus
//! variable (`aᵀu − s = rhs`, `s ≥ 0`) and the solver runs a revised simplex
//! over the combined column set with an explicitly maintained basis inverse.
//!
//! Cold starts use a primal two-phase method (artificial variables only on
//! violated rows). Warm starts — after appending rows or tightening bounds,
//! both of which keep the previous basis dual-feasible — reoptimize with the
//! dual simplex and finish with a primal cleanup pass that certifies
//! optimality. Memory is O(num_rows² + num_rows·num_vars) for the inverse
//! and columns; fine for the few-hundred-variable node LPs this crate needs.

use serde::{Deserialize, Serialize};

/// Row/bound satisfaction tolerance: a point is primal feasible when every
/// row holds to `FEAS_TOL` and every variable is within bounds to `FEAS_TOL`.
pub const FEAS_TOL: f64 = 1e-8;
/// Reduced-cost (dual feasibility / optimality) tolerance.
pub const OPT_TOL: f64 = 1e-9;
/// Smallest pivot element magnitude the solver will accept.
const PIVOT_TOL: f64 = 1e-10;
/// A step below this counts as a degenerate pivot (anti-cycling bookkeeping).
const DEGEN_STEP: f64 = 1e-11;
/// Basis-inverse rebuild cadence, in pivots.
const REFACTOR_EVERY: usize = 128;

const INF: f64 = f64::INFINITY;

/// One `coeffsᵀ·u ≥ rhs` constraint; `coeffs` is sparse `(var, value)`.
#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A bounded-variable LP: `min objectiveᵀu` s.t. all rows and `lower ≤ u ≤ upper`.
#[derive(Debug, Clone)]
pub struct LpModel {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpModel {
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        let num_vars = objective.len();
        assert_eq!(lower.len(), num_vars);
        assert_eq!(upper.len(), num_vars);
        for j in 0..num_vars {
            assert!(
                !(lower[j].is_finite() && upper[j].is_finite() && lower[j] > upper[j]),
                "variable {j}: lower bound exceeds upper bound"
            );
        }
        LpModel { num_vars, objective, rows: Vec::new(), lower, upper }
    }

    /// Appends constraint rows. A basis obtained before the call remains a
    /// valid warm start afterwards (new rows enter with their surplus basic).
    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = LpRow>) {
        for row in rows {
            for &(j, _) in &row.coeffs {
                assert!(j < self.num_vars, "row references variable {j} out of range");
            }
            self.rows.push(row);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum VStat {
    Basic,
    Lower,
    Upper,
    Free,
}

/// Opaque warm-start token: which columns are basic and where the nonbasic
/// ones sit. Valid across `add_rows` on the same model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpBasis {
    basic: Vec<usize>,
    stat: Vec<VStat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values of the model variables (surplus values are not included).
    pub primal: Vec<f64>,
    pub objective_value: f64,
    pub basis: Option<LpBasis>,
}

/// Solves from scratch or from a warm-start basis.
pub fn solve(model: &LpModel, warm_start: Option<&LpBasis>) -> LpSolution {
    let mut engine = Simplex::new(model);
    if let Some(b) = warm_start {
        if engine.install_basis(b) {
            return engine.reoptimize();
        }
    }
    engine.reoptimize()
}

/// The working engine. `bnb` keeps one alive across nodes: bound changes and
/// row additions leave the factorized basis reusable, so each node re-solve
/// is a handful of dual simplex pivots instead of a fresh factorization.
pub(crate) struct Simplex {
    n_struct: usize,
    m: usize,
    /// Sparse structural columns: `cols[j]` lists `(row, coeff)`.
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    /// Per-column status; indices `n_struct..n_struct+m` are the surpluses,
    /// anything beyond are phase-1 artificials (removed before returning).
    stat: Vec<VStat>,
    /// Basic column per row (slot i ↔ row i).
    basic: Vec<usize>,
    /// Inverse slot lookup: `slot[j]` = basis slot of column j, if basic.
    slot: Vec<i32>,
    /// Row-major dense basis inverse (m×m).
    binv: Vec<f64>,
    /// Values of the basic variables, per slot.
    xb: Vec<f64>,
    /// Rows carrying an artificial during a cold solve: `art_rows[k]` is the
    /// row of artificial column `n_struct + m + k`.
    art_rows: Vec<usize>,
    initialized: bool,
    pivots_since_refactor: usize,
    degen_pivots: usize,
    iters_used: usize,
}

impl Simplex {
    pub(crate) fn new(model: &LpModel) -> Self {
        let n = model.num_vars;
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut rhs = Vec::with_capacity(model.rows.len());
        for (k, row) in model.rows.iter().enumerate() {
            for &(j, c) in &row.coeffs {
                if c != 0.0 {
                    cols[j].push((k, c));
                }
            }
            rhs.push(row.rhs);
        }
        let m = rhs.len();
        Simplex {
            n_struct: n,
            m,
            cols,
            rhs,
            obj: model.objective.clone(),
            lb: model.lower.clone(),
            ub: model.upper.clone(),
            stat: vec![VStat::Lower; n + m],
            basic: Vec::new(),
            slot: vec![-1; n + m],
            binv: Vec::new(),
            xb: Vec::new(),
            art_rows: Vec::new(),
            initialized: false,
            pivots_since_refactor: 0,
            degen_pivots: 0,
            iters_used: 0,
        }
    }

    /// Appends rows, keeping the current factorization valid: each new row's
    /// surplus becomes basic and the inverse is extended in place.
    pub(crate) fn add_rows(&mut self, rows: &[LpRow]) {
        for row in rows {
            let k = self.m;
            for &(j, c) in &row.coeffs {
                assert!(j < self.n_struct);
                if c != 0.0 {
                    self.cols[j].push((k, c));
                }
            }
            self.rhs.push(row.rhs);
            // Shift column ids ≥ n_struct is unnecessary: surplus of row k is
            // column n_struct + k, appended at the end of the id space.
            let surplus = self.n_struct + k;
            self.stat.push(VStat::Basic);
            self.slot.push(k as i32);
            if self.initialized {
                // Extend B⁻¹: with the new surplus basic (coefficient −1),
                // the bordered inverse is [[B⁻¹, 0], [C·B⁻¹, −1]] where C is
                // the new row restricted to the old basic columns.
                let old_m = self.m;
                let mut crow = vec![0.0; old_m];
                for &(j, c) in &row.coeffs {
                    if c != 0.0 && self.stat[j] == VStat::Basic {
                        crow[self.slot[j] as usize] += c;
                    }
                }
                let mut next = vec![0.0; (old_m + 1) * (old_m + 1)];
                for i in 0..old_m {
                    let src = &self.binv[i * old_m..(i + 1) * old_m];
                    next[i * (old_m + 1)..i * (old_m + 1) + old_m].copy_from_slice(src);
                }
                for t in 0..old_m {
                    let mut acc = 0.0;
                    for i in 0..old_m {
                        acc += crow[i] * self.binv[i * old_m + t];
                    }
                    next[old_m * (old_m + 1) + t] = acc;
                }
                next[old_m * (old_m + 1) + old_m] = -1.0;
                self.binv = next;
                // Value of the new basic surplus: row activity − rhs.
                let act = self.row_activity(k, &row.coeffs);
                self.xb.push(act - row.rhs);
            }
            self.basic.push(surplus);
            self.m += 1;
        }
    }

    fn row_activity(&self, _row: usize, coeffs: &[(usize, f64)]) -> f64 {
        let mut act = 0.0;
        for &(j, c) in coeffs {
            let v = if self.stat[j] == VStat::Basic {
                self.xb[self.slot[j] as usize]
            } else {
                self.nb_value(j)
            };
            act += c * v;
        }
        act
    }

    /// Replaces a structural variable's bounds (branch fixing / unfixing).
    pub(crate) fn set_struct_bounds(&mut self, j: usize, lb: f64, ub: f64) {
        assert!(j < self.n_struct && lb <= ub);
        self.lb[j] = lb;
        self.ub[j] = ub;
    }

    #[inline]
    fn lbnd(&self, j: usize) -> f64 {
        if j < self.n_struct {
            self.lb[j]
        } else {
            0.0
        }
    }

    #[inline]
    fn ubnd(&self, j: usize) -> f64 {
        if j < self.n_struct {
            self.ub[j]
        } else {
            INF
        }
    }

    #[inline]
    fn nb_value(&self, j: usize) -> f64 {
        match self.stat[j] {
            VStat::Lower => self.lbnd(j),
            VStat::Upper => self.ubnd(j),
            VStat::Free => 0.0,
            VStat::Basic => unreachable!("basic column has no nonbasic value"),
        }
    }

    #[inline]
    fn cost(&self, j: usize, phase1: bool) -> f64 {
        if phase1 {
            if j >= self.n_struct + self.m {
                1.0
            } else {
                0.0
            }
        } else if j < self.n_struct {
            self.obj[j]
        } else {
            0.0
        }
    }

    #[inline]
    fn num_cols(&self) -> usize {
        self.n_struct + self.m + self.art_rows.len()
    }

    /// Visits the sparse entries of column `j`.
    #[inline]
    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n_struct {
            for &(r, c) in &self.cols[j] {
                f(r, c);
            }
        } else if j < self.n_struct + self.m {
            f(j - self.n_struct, -1.0);
        } else {
            f(self.art_rows[j - self.n_struct - self.m], 1.0);
        }
    }

    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        let mut acc = 0.0;
        self.for_col(j, |r, c| acc += c * v[r]);
        acc
    }

    /// `B⁻¹ · A_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        self.for_col(j, |r, c| {
            if c != 0.0 {
                let col = r;
                for i in 0..m {
                    out[i] += c * self.binv[i * m + col];
                }
            }
        });
        out
    }

    /// Dual prices `y = c_Bᵀ B⁻¹` under the given phase's costs.
    fn duals(&self, phase1: bool) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let cb = self.cost(self.basic[i], phase1);
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, &bk) in y.iter_mut().zip(row) {
                    *yk += cb * bk;
                }
            }
        }
        y
    }

    /// Recomputes basic values from bounds and the factorized inverse.
    fn compute_xb(&mut self) {
        let m = self.m;
        let mut radj = self.rhs.clone();
        for j in 0..self.num_cols() {
            if self.stat[j] == VStat::Basic {
                continue;
            }
            let v = self.nb_value(j);
            if v != 0.0 {
                self.for_col(j, |r, c| radj[r] -= c * v);
            }
        }
        let mut xb = vec![0.0; m];
        for (i, x) in xb.iter_mut().enumerate() {
            let row = &self.binv[i * m..(i + 1) * m];
            *x = row.iter().zip(&radj).map(|(a, b)| a * b).sum();
        }
        self.xb = xb;
    }

    /// Rebuilds the dense inverse from the basis columns (Gauss-Jordan with
    /// partial pivoting). Returns false when the basis matrix is singular.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![0.0; m * m];
        for (s, &j) in self.basic.iter().enumerate() {
            self.for_col(j, |r, c| a[r * m + s] = c);
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = a[k * m + k].abs();
            for i in k + 1..m {
                let v = a[i * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = i;
                }
            }
            if piv_val < 1e-11 {
                return false;
            }
            if piv_row != k {
                for t in 0..m {
                    a.swap(k * m + t, piv_row * m + t);
                    inv.swap(k * m + t, piv_row * m + t);
                }
            }
            let p = a[k * m + k];
            for t in 0..m {
                a[k * m + t] /= p;
                inv[k * m + t] /= p;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = a[i * m + k];
                if f != 0.0 {
                    for t in 0..m {
                        a[i * m + t] -= f * a[k * m + t];
                        inv[i * m + t] -= f * inv[k * m + t];
                    }
                }
            }
        }
        self.binv = inv;
        self.pivots_since_refactor = 0;
        true
    }

    /// Installs a warm-start basis. Rows added after the token was taken get
    /// their surplus basic. Returns false (engine left uninitialized) when
    /// the token does not fit the model or factorizes singular.
    fn install_basis(&mut self, token: &LpBasis) -> bool {
        let m_token = token.basic.len();
        if m_token > self.m || token.stat.len() != self.n_struct + m_token {
            return false;
        }
        for &j in &token.basic {
            if j >= self.n_struct + self.m {
                return false;
            }
        }
        self.stat = token.stat.clone();
        self.basic = token.basic.clone();
        for k in m_token..self.m {
            self.stat.push(VStat::Basic);
            self.basic.push(self.n_struct + k);
        }
        // Sanity: every basic column flagged, each appearing once.
        self.slot = vec![-1; self.n_struct + self.m];
        for (s, &j) in self.basic.iter().enumerate() {
            if self.stat[j] != VStat::Basic || self.slot[j] != -1 {
                self.initialized = false;
                return false;
            }
            self.slot[j] = s as i32;
        }
        for j in 0..self.n_struct + self.m {
            if self.stat[j] == VStat::Basic && self.slot[j] == -1 {
                self.initialized = false;
                return false;
            }
        }
        self.sanitize_nonbasic();
        if !self.refactor() {
            self.initialized = false;
            return false;
        }
        self.compute_xb();
        self.initialized = true;
        true
    }

    /// Nonbasic columns must rest on an existing finite bound.
    fn sanitize_nonbasic(&mut self) {
        for j in 0..self.stat.len() {
            match self.stat[j] {
                VStat::Basic => {}
                VStat::Lower if self.lbnd(j).is_finite() => {}
                VStat::Upper if self.ubnd(j).is_finite() => {}
                _ => {
                    self.stat[j] = if self.lbnd(j).is_finite() {
                        VStat::Lower
                    } else if self.ubnd(j).is_finite() {
                        VStat::Upper
                    } else {
                        VStat::Free
                    };
                }
            }
        }
    }

    fn iter_cap(&self) -> usize {
        50 * (self.n_struct + 2 * self.m)
    }

    fn bland(&self) -> bool {
        self.degen_pivots > 3 * self.m.max(4)
    }

    /// Performs one basis exchange: entering column `j` (moving by `dx` from
    /// its current value), leaving slot `p` whose variable goes to `to`.
    fn pivot(&mut self, j: usize, alpha: &[f64], p: usize, dx: f64, to: VStat, enter_val: f64) {
        let m = self.m;
        for i in 0..m {
            if i != p {
                self.xb[i] -= alpha[i] * dx;
            }
        }
        let leaving = self.basic[p];
        self.stat[leaving] = to;
        self.slot[leaving] = -1;
        self.basic[p] = j;
        self.stat[j] = VStat::Basic;
        self.slot[j] = p as i32;
        self.xb[p] = enter_val;
        // Elementary update of the inverse.
        let piv = alpha[p];
        let (head, tail) = self.binv.split_at_mut(p * m);
        let (prow, rest) = tail.split_at_mut(m);
        for t in 0..m {
            prow[t] /= piv;
        }
        for (i, chunk) in head.chunks_exact_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for t in 0..m {
                    chunk[t] -= f * prow[t];
                }
            }
        }
        for (off, chunk) in rest.chunks_exact_mut(m).enumerate() {
            let f = alpha[p + 1 + off];
            if f != 0.0 {
                for t in 0..m {
                    chunk[t] -= f * prow[t];
                }
            }
        }
        self.pivots_since_refactor += 1;
        if self.pivots_since_refactor >= REFACTOR_EVERY {
            // Rebuild from scratch to shed accumulated roundoff.
            if self.refactor() {
                self.compute_xb();
            }
        }
        if dx.abs() < DEGEN_STEP {
            self.degen_pivots += 1;
        }
    }

    /// Primal simplex under the given phase's costs. Assumes a primal
    /// feasible start (within tolerance). Returns the terminal status.
    fn primal_loop(&mut self, phase1: bool) -> LpStatus {
        let cap = self.iter_cap();
        loop {
            if self.iters_used >= cap {
                return LpStatus::IterationLimit;
            }
            self.iters_used += 1;
            let y = self.duals(phase1);
            // Pricing: most violated reduced cost (or Bland's first index).
            let bland = self.bland();
            let mut enter: Option<(usize, f64, f64)> = None; // (col, violation, direction)
            for j in 0..self.num_cols() {
                if self.stat[j] == VStat::Basic {
                    continue;
                }
                // Fixed columns cannot move; artificials never re-enter.
                if self.lbnd(j) == self.ubnd(j) || j >= self.n_struct + self.m {
                    continue;
                }
                let d = self.cost(j, phase1) - self.col_dot(j, &y);
                let (viol, dir) = match self.stat[j] {
                    VStat::Lower => (-d, 1.0),
                    VStat::Upper => (d, -1.0),
                    VStat::Free => (d.abs(), if d < 0.0 { 1.0 } else { -1.0 }),
                    VStat::Basic => unreachable!(),
                };
                if viol > OPT_TOL {
                    match &enter {
                        Some((_, best, _)) if !bland && viol <= *best => {}
                        Some(_) if bland => {} // keep first (lowest index)
                        _ => enter = Some((j, viol, dir)),
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some((j, _, dir)) = enter else {
                return LpStatus::Optimal;
            };
            let alpha = self.ftran(j);
            // Ratio test: how far can the entering variable move.
            let own_span = self.ubnd(j) - self.lbnd(j); // may be inf
            let mut best_step = if own_span.is_finite() { own_span } else { INF };
            let mut leave: Option<(usize, VStat, f64)> = None; // (slot, to, |alpha|)
            for i in 0..self.m {
                let rate = -dir * alpha[i]; // d(xb_i)/d(step)
                let bi = self.basic[i];
                let candidate = if rate < -PIVOT_TOL && self.lbnd(bi).is_finite() {
                    Some((((self.xb[i] - self.lbnd(bi)) / -rate).max(0.0), VStat::Lower))
                } else if rate > PIVOT_TOL && self.ubnd(bi).is_finite() {
                    Some((((self.ubnd(bi) - self.xb[i]) / rate).max(0.0), VStat::Upper))
                } else {
                    None
                };
                let Some((step, to)) = candidate else { continue };
                // Ties go to the largest pivot normally (stability) or the
                // smallest basic index under Bland (termination).
                let better = match &leave {
                    None => step < best_step,
                    Some((pi, _, a)) => {
                        step < best_step - DEGEN_STEP
                            || (step <= best_step + DEGEN_STEP
                                && if bland {
                                    bi < self.basic[*pi]
                                } else {
                                    alpha[i].abs() > *a
                                })
                    }
                };
                if better {
                    best_step = step.min(best_step);
                    leave = Some((i, to, alpha[i].abs()));
                }
            }
            match leave {
                None if best_step.is_infinite() => return LpStatus::Unbounded,
                None => {
                    // Bound flip: the entering variable crosses its box.
                    let step = best_step;
                    for i in 0..self.m {
                        self.xb[i] += -dir * alpha[i] * step;
                    }
                    self.stat[j] = match self.stat[j] {
                        VStat::Lower => VStat::Upper,
                        VStat::Upper => VStat::Lower,
                        s => s,
                    };
                    if step.abs() < DEGEN_STEP {
                        self.degen_pivots += 1;
                    }
                }
                Some((p, to, _)) => {
                    let step = best_step;
                    let enter_val = self.nb_value(j) + dir * step;
                    self.pivot(j, &alpha, p, dir * step, to, enter_val);
                }
            }
        }
    }

    /// Dual simplex: restores primal feasibility while keeping reduced costs
    /// optimal. Assumes the current basis is dual feasible (true after bound
    /// changes or row additions on an optimal basis).
    fn dual_loop(&mut self) -> LpStatus {
        // Tighter budget than the cold path: a healthy warm reoptimization
        // takes a handful of pivots, and when near-parallel rows make the
        // dual crawl it is far cheaper to bail out and solve cold.
        let cap = (5 * (self.n_struct + 2 * self.m)).max(1000).min(self.iter_cap());
        loop {
            if self.iters_used >= cap {
                return LpStatus::IterationLimit;
            }
            self.iters_used += 1;
            let bland = self.bland();
            // Most-violated leaving row (smallest basic index under Bland).
            let mut leave: Option<(usize, f64, bool)> = None; // (slot, viol, below_lower)
            for i in 0..self.m {
                let bi = self.basic[i];
                let l = self.lbnd(bi);
                let u = self.ubnd(bi);
                let below = l - self.xb[i];
                let above = self.xb[i] - u;
                if below > FEAS_TOL && leave.as_ref().is_none_or(|(_, v, _)| below > *v) {
                    leave = Some((i, below, true));
                }
                if above > FEAS_TOL && leave.as_ref().is_none_or(|(_, v, _)| above > *v) {
                    leave = Some((i, above, false));
                }
                if bland && leave.is_some() {
                    break;
                }
            }
            let Some((p, _, below_lower)) = leave else {
                return LpStatus::Optimal;
            };
            let y = self.duals(false);
            let m = self.m;
            let rho = &self.binv[p * m..(p + 1) * m];
            // Entering column: dual ratio test over direction-compatible
            // nonbasic columns.
            let mut enter: Option<(usize, f64, f64)> = None; // (col, theta, alpha_p)
            for j in 0..self.num_cols() {
                if self.stat[j] == VStat::Basic
                    || self.lbnd(j) == self.ubnd(j)
                    || j >= self.n_struct + self.m
                {
                    continue;
                }
                let mut apj = 0.0;
                self.for_col(j, |r, c| apj += c * rho[r]);
                if apj.abs() <= PIVOT_TOL {
                    continue;
                }
                let ok = match (self.stat[j], below_lower) {
                    (VStat::Lower, true) => apj < 0.0,
                    (VStat::Upper, true) => apj > 0.0,
                    (VStat::Lower, false) => apj > 0.0,
                    (VStat::Upper, false) => apj < 0.0,
                    (VStat::Free, _) => true,
                    (VStat::Basic, _) => unreachable!(),
                };
                if !ok {
                    continue;
                }
                let d = self.cost(j, false) - self.col_dot(j, &y);
                let theta = d.abs() / apj.abs();
                // Minimum ratio keeps the step dual feasible; ties go to the
                // largest pivot normally, or the smallest index under Bland.
                let better = match &enter {
                    None => true,
                    Some((bj, bt, ba)) => {
                        theta < bt - 1e-12
                            || (theta <= bt + 1e-12
                                && if bland { j < *bj } else { apj.abs() > ba.abs() })
                    }
                };
                if better {
                    enter = Some((j, theta, apj));
                }
            }
            let Some((j, theta, apj)) = enter else {
                // Dual unbounded along this row: the primal is infeasible.
                return LpStatus::Infeasible;
            };
            if theta.abs() < DEGEN_STEP {
                self.degen_pivots += 1;
            }
            let target = if below_lower {
                self.lbnd(self.basic[p])
            } else {
                self.ubnd(self.basic[p])
            };
            let dx = (self.xb[p] - target) / apj;
            let to = if below_lower { VStat::Lower } else { VStat::Upper };
            let enter_val = self.nb_value(j) + dx;
            let alpha = self.ftran(j);
            self.pivot(j, &alpha, p, dx, to, enter_val);
        }
    }

    /// Cold start: all-surplus basis, artificials on violated rows, primal
    /// phase 1 then phase 2.
    fn cold_solve(&mut self) -> LpStatus {
        self.art_rows.clear();
        self.stat.truncate(self.n_struct + self.m);
        // Nonbasic structurals on their nearest finite bound.
        for j in 0..self.n_struct {
            self.stat[j] = if self.lb[j].is_finite() {
                VStat::Lower
            } else if self.ub[j].is_finite() {
                VStat::Upper
            } else {
                VStat::Free
            };
        }
        // Row activities at that point.
        let mut act = vec![0.0; self.m];
        for j in 0..self.n_struct {
            let v = self.nb_value(j);
            if v != 0.0 {
                for &(r, c) in &self.cols[j] {
                    act[r] += c * v;
                }
            }
        }
        self.basic.clear();
        self.slot = vec![-1; self.n_struct + self.m];
        let mut diag = vec![0.0; self.m];
        let mut art_stat = Vec::new();
        for k in 0..self.m {
            let s = act[k] - self.rhs[k];
            let surplus = self.n_struct + k;
            if s >= 0.0 {
                self.stat[surplus] = VStat::Basic;
                self.slot[surplus] = k as i32;
                self.basic.push(surplus);
                diag[k] = -1.0;
            } else {
                self.stat[surplus] = VStat::Lower;
                let art = self.n_struct + self.m + self.art_rows.len();
                self.art_rows.push(k);
                art_stat.push(VStat::Basic);
                self.slot.push(k as i32);
                self.basic.push(art);
                diag[k] = 1.0;
            }
        }
        self.stat.extend(art_stat);
        let m = self.m;
        self.binv = vec![0.0; m * m];
        for k in 0..m {
            self.binv[k * m + k] = diag[k];
        }
        self.pivots_since_refactor = 0;
        self.compute_xb();
        self.initialized = true;

        if !self.art_rows.is_empty() {
            let status = self.primal_loop(true);
            if status != LpStatus::Optimal {
                self.drop_artificials();
                return status;
            }
            // Residual infeasibility means the model has none.
            let resid: f64 = self
                .basic
                .iter()
                .zip(&self.xb)
                .filter(|(&j, _)| j >= self.n_struct + self.m)
                .map(|(_, &v)| v.max(0.0))
                .sum();
            if resid > FEAS_TOL {
                self.drop_artificials();
                return LpStatus::Infeasible;
            }
            self.drop_artificials();
        }
        self.primal_loop(false)
    }

    /// Removes artificial columns, swapping any still-basic one for its own
    /// row's surplus (always legal: the surplus of that row cannot be basic
    /// at the same time, and the swap merely negates a row of the inverse).
    fn drop_artificials(&mut self) {
        let base = self.n_struct + self.m;
        let m = self.m;
        for t in 0..self.art_rows.len() {
            let art = base + t;
            if self.stat[art] == VStat::Basic {
                let p = self.slot[art] as usize;
                let surplus = self.n_struct + p;
                debug_assert_eq!(self.art_rows[t], p);
                debug_assert_ne!(self.stat[surplus], VStat::Basic);
                self.basic[p] = surplus;
                self.stat[surplus] = VStat::Basic;
                self.slot[surplus] = p as i32;
                for v in self.binv[p * m..(p + 1) * m].iter_mut() {
                    *v = -*v;
                }
                self.xb[p] = -self.xb[p];
            }
        }
        self.stat.truncate(base);
        self.slot.truncate(base);
        self.art_rows.clear();
    }

    /// Solves from the current state: dual reoptimization when a basis is
    /// live, cold start otherwise; always finishes with a primal cleanup
    /// pass so the returned point carries an optimality certificate.
    pub(crate) fn reoptimize(&mut self) -> LpSolution {
        self.iters_used = 0;
        self.degen_pivots = 0;
        let status = if !self.initialized {
            self.cold_solve()
        } else {
            self.sanitize_nonbasic();
            self.compute_xb();
            let s = self.dual_loop();
            if s == LpStatus::Optimal {
                self.primal_loop(false)
            } else if s == LpStatus::Infeasible {
                s
            } else {
                s
            }
        };
        // A failed warm path gets one cold retry (with a fresh iteration
        // budget) before giving up. Infeasible is retried too: phase 1 from
        // scratch gives an honest certificate, while the warm dual can
        // declare infeasibility spuriously when the factorization has
        // drifted and no pivot clears the tolerance.
        let status = match status {
            LpStatus::IterationLimit | LpStatus::Unbounded | LpStatus::Infeasible
                if self.initialized =>
            {
                self.iters_used = 0;
                self.degen_pivots = 0;
                self.initialized = false;
                let s2 = self.cold_solve();
                self.initialized = true;
                s2
            }
            s => s,
        };
        self.extract(status)
    }

    fn extract(&self, status: LpStatus) -> LpSolution {
        let mut primal = vec![0.0; self.n_struct];
        for (j, val) in primal.iter_mut().enumerate() {
            *val = if self.stat[j] == VStat::Basic {
                self.xb[self.slot[j] as usize]
            } else {
                self.nb_value(j)
            };
        }
        let objective_value = primal.iter().zip(&self.obj).map(|(v, c)| v * c).sum();
        let basis = LpBasis {
            basic: self.basic.clone(),
            stat: self.stat[..self.n_struct + self.m].to_vec(),
        };
        LpSolution { status, primal, objective_value, basis: Some(basis) }
    }
}
