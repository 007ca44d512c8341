//! Shared helpers for the integration suite: the per-criterion result
//! printer and a brute-force oracle for tiny linear programs.

use onebit_mimo::lp::LpModel;
use std::io::Write;

/// Prints one `[criterion NN] PASS/FAIL` line straight to the real stdout,
/// bypassing the test harness capture so the verdicts appear in a plain
/// `cargo test` run.
pub fn report(num: u32, pass: bool, label: &str, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[criterion {num:02}] {verdict} — {label}: {detail}");
    let _ = out.flush();
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleVerdict {
    Optimal(f64),
    Infeasible,
}

/// Solves a small LP by enumerating candidate vertices: every choice of
/// `num_vars` constraints (rows and variable bounds alike, all written as
/// aᵀu ≥ c) is forced to equality, the square system is solved, and the
/// point is kept if it satisfies the whole constraint set. The model must
/// have finite bounds on every variable so the feasible set is a polytope;
/// the optimum, if any, is then attained at such an intersection.
///
/// Intended for n ≤ 5 and a handful of rows — cost is C(#constraints, n)
/// dense solves.
pub fn oracle_solve(model: &LpModel) -> OracleVerdict {
    let n = model.num_vars;
    for j in 0..n {
        assert!(
            model.lower[j].is_finite() && model.upper[j].is_finite(),
            "oracle requires finite bounds (variable {j})"
        );
    }

    // Dense ≥-form constraint list: explicit rows, then l ≤ u ≤ b as
    // u_j ≥ l_j and −u_j ≥ −b_j.
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &model.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] += v;
        }
        cons.push((a, row.rhs));
    }
    for j in 0..n {
        let mut lo = vec![0.0; n];
        lo[j] = 1.0;
        cons.push((lo, model.lower[j]));
        let mut hi = vec![0.0; n];
        hi[j] = -1.0;
        cons.push((hi, -model.upper[j]));
    }

    let total = cons.len();
    let mut best: Option<f64> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        if let Some(u) = solve_square(&cons, &pick, n) {
            if feasible(&cons, &u) {
                let val = model.objective.iter().zip(&u).map(|(&c, &x)| c * x).sum::<f64>();
                best = Some(match best {
                    Some(b) if b <= val => b,
                    _ => val,
                });
            }
        }
        // Advance the combination (lexicographic).
        let mut i = n;
        loop {
            if i == 0 {
                match best {
                    Some(v) => return OracleVerdict::Optimal(v),
                    None => return OracleVerdict::Infeasible,
                }
            }
            i -= 1;
            if pick[i] != i + total - n {
                pick[i] += 1;
                for k in i + 1..n {
                    pick[k] = pick[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Gaussian elimination with partial pivoting on the selected constraint
/// rows taken as equalities. Returns None when the subsystem is (near)
/// singular, i.e. the chosen constraints do not meet in a single point.
fn solve_square(cons: &[(Vec<f64>, f64)], pick: &[usize], n: usize) -> Option<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = pick.iter().map(|&i| cons[i].0.clone()).collect();
    let mut b: Vec<f64> = pick.iter().map(|&i| cons[i].1).collect();
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if mag < 1e-6 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut u = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * u[c];
        }
        u[row] = acc / a[row][row];
    }
    Some(u)
}

fn feasible(cons: &[(Vec<f64>, f64)], u: &[f64]) -> bool {
    cons.iter().all(|(a, rhs)| {
        let lhs = a.iter().zip(u).map(|(&ai, &ui)| ai * ui).sum::<f64>();
        lhs >= rhs - 1e-7
    })
}
