//! Minimal dense linear algebra: row-major matrices, Cholesky, and a
//! column-pivoted Householder QR least-squares solver. Sizes here are small
//! (hundreds of rows at most), so simple dense kernels are fine.

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x` for a vector `x` of length `cols`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ y` for a vector `y` of length `rows`.
    pub fn tr_matvec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        out
    }

    /// Gram matrix `AᵀA` (cols × cols, symmetric).
    pub fn gram(&self) -> Mat {
        let n = self.cols;
        let mut g = Mat::zeros(n, n);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..n {
                let ra = r[a];
                if ra == 0.0 {
                    continue;
                }
                for b in a..n {
                    g.data[a * n + b] += ra * r[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                g.data[a * n + b] = g.data[b * n + a];
            }
        }
        g
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
/// Returns `None` when a non-positive pivot shows up (not PD / singular).
pub fn solve_spd(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(b.len(), a.rows);
    let n = a.rows;
    // Lower-triangular factor, packed row-major in ℓ.
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    // Forward then back substitution.
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Some(y)
}

/// Least squares `min ‖A x − b‖₂` via Householder QR with column pivoting.
/// Returns `None` when `A` is numerically rank-deficient (rank < cols).
pub fn lstsq(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(b.len(), a.rows);
    let (m, n) = (a.rows, a.cols);
    if m < n {
        return None;
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    // Running squared column norms for pivot selection.
    let mut colsq: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| r.get(i, j).powi(2)).sum())
        .collect();
    let scale = colsq.iter().cloned().fold(0.0, f64::max);
    let tol = scale.max(1e-300) * 1e-24; // squared-norm cutoff for rank decisions

    for k in 0..n {
        // Pivot: bring the column with the largest remaining norm to k.
        let (p, &best) = colsq[k..]
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .map(|(i, v)| (i + k, v))
            .unwrap();
        if best <= tol {
            return None;
        }
        if p != k {
            perm.swap(k, p);
            colsq.swap(k, p);
            for i in 0..m {
                let t = r.get(i, k);
                r.set(i, k, r.get(i, p));
                r.set(i, p, t);
            }
        }
        // Householder vector for column k below the diagonal.
        let alpha = {
            let mut s = 0.0;
            for i in k..m {
                s += r.get(i, k).powi(2);
            }
            s.sqrt()
        };
        if alpha == 0.0 {
            return None;
        }
        let alpha = if r.get(k, k) > 0.0 { -alpha } else { alpha };
        let mut v = vec![0.0; m - k];
        v[0] = r.get(k, k) - alpha;
        for i in k + 1..m {
            v[i - k] = r.get(i, k);
        }
        let vv = dot(&v, &v);
        if vv == 0.0 {
            return None;
        }
        r.set(k, k, alpha);
        for i in k + 1..m {
            r.set(i, k, 0.0);
        }
        // Apply the reflector to remaining columns and the RHS.
        for j in k + 1..n {
            let mut s = 0.0;
            for i in k..m {
                s += v[i - k] * r.get(i, j);
            }
            let f = 2.0 * s / vv;
            for i in k..m {
                r.set(i, j, r.get(i, j) - f * v[i - k]);
            }
            colsq[j] -= r.get(k, j).powi(2);
        }
        let mut s = 0.0;
        for i in k..m {
            s += v[i - k] * rhs[i];
        }
        let f = 2.0 * s / vv;
        for i in k..m {
            rhs[i] -= f * v[i - k];
        }
    }
    // Back-substitute R z = rhs[..n], then undo the permutation.
    let mut z = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= r.get(i, j) * z[j];
        }
        let d = r.get(i, i);
        if d.abs() < 1e-12 * scale.sqrt().max(1.0) {
            return None;
        }
        z[i] = s / d;
    }
    let mut x = vec![0.0; n];
    for (k, &j) in perm.iter().enumerate() {
        x[j] = z[k];
    }
    Some(x)
}
