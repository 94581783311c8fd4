//! Small dense linear algebra kernel: row-major matrices, Householder QR
//! without pivoting, and triangular solves.

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Copy of the rectangular block `[r0, r1) × [c0, c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            out.row_mut(i - r0).copy_from_slice(&self.row(i)[c0..c1]);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Induced 1-norm: largest absolute column sum.
    pub fn norm_one(&self) -> T {
        let mut sums = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v.abs();
            }
        }
        sums.into_iter().fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        s += *x * *y;
    }
    s
}

/// Householder QR of an `m × n` matrix, `A = Q R`, with `k = min(m, n)`
/// reflectors `H_i = I − τ_i v_i v_iᵀ` (`v_i[0] = 1` implicit).
#[derive(Debug, Clone)]
pub struct HouseholderQr<T> {
    /// `R` on and above the diagonal, reflector tails below it.
    packed: Matrix<T>,
    tau: Vec<T>,
}

impl<T: Real> HouseholderQr<T> {
    pub fn new(mut a: Matrix<T>) -> Self {
        let (m, n) = (a.rows, a.cols);
        let k = m.min(n);
        let mut tau = vec![T::zero(); k];
        let mut w = vec![T::zero(); n];
        for c in 0..k {
            // Scaled norm of the column tail, guarding against overflow.
            let scale = (c..m).fold(T::zero(), |s, i| s.max(a[(i, c)].abs()));
            if scale == T::zero() {
                continue;
            }
            let mut ss = T::zero();
            for i in c..m {
                let t = a[(i, c)] / scale;
                ss += t * t;
            }
            let norm = scale * ss.sqrt();
            let x0 = a[(c, c)];
            let beta = if x0 >= T::zero() { -norm } else { norm };
            let t = (beta - x0) / beta;
            let inv = T::one() / (x0 - beta);
            for i in c + 1..m {
                a[(i, c)] *= inv;
            }
            a[(c, c)] = beta;
            tau[c] = t;

            // w = vᵀ A[c.., c+1..]
            let tail = &mut w[c + 1..n];
            tail.copy_from_slice(&a.row(c)[c + 1..n]);
            for i in c + 1..m {
                let vi = a[(i, c)];
                if vi == T::zero() {
                    continue;
                }
                for (wj, &aij) in tail.iter_mut().zip(&a.row(i)[c + 1..n]) {
                    *wj += vi * aij;
                }
            }
            for i in c..m {
                let vi = if i == c { T::one() } else { a[(i, c)] };
                let f = t * vi;
                if f == T::zero() {
                    continue;
                }
                let row = &mut a.row_mut(i)[c + 1..n];
                for (aij, &wj) in row.iter_mut().zip(tail.iter()) {
                    *aij -= f * wj;
                }
            }
        }
        Self { packed: a, tau }
    }

    pub fn rows(&self) -> usize {
        self.packed.rows
    }

    pub fn cols(&self) -> usize {
        self.packed.cols
    }

    fn reflectors(&self) -> usize {
        self.tau.len()
    }

    fn apply_reflector(&self, c: usize, b: &mut [T]) {
        let t = self.tau[c];
        if t == T::zero() {
            return;
        }
        let m = self.packed.rows;
        let mut s = b[c];
        for i in c + 1..m {
            s += self.packed[(i, c)] * b[i];
        }
        s *= t;
        b[c] -= s;
        for i in c + 1..m {
            b[i] -= s * self.packed[(i, c)];
        }
    }

    /// `b ← Qᵀ b`.
    pub fn apply_qt(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.packed.rows);
        for c in 0..self.reflectors() {
            self.apply_reflector(c, b);
        }
    }

    /// `b ← Q b`.
    pub fn apply_q(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.packed.rows);
        for c in (0..self.reflectors()).rev() {
            self.apply_reflector(c, b);
        }
    }

    /// Full orthogonal factor `Q` (`m × m`).
    pub fn q(&self) -> Matrix<T> {
        let m = self.packed.rows;
        let mut q = Matrix::zeros(m, m);
        let mut e = vec![T::zero(); m];
        for j in 0..m {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            self.apply_q(&mut e);
            for i in 0..m {
                q[(i, j)] = e[i];
            }
        }
        q
    }

    /// Upper-trapezoidal factor `R` (`k × n`).
    pub fn r(&self) -> Matrix<T> {
        let k = self.reflectors();
        let n = self.packed.cols;
        let mut r = Matrix::zeros(k, n);
        for i in 0..k {
            r.row_mut(i)[i..].copy_from_slice(&self.packed.row(i)[i..]);
        }
        r
    }

    pub fn r_diagonal(&self) -> Vec<T> {
        (0..self.reflectors()).map(|i| self.packed[(i, i)]).collect()
    }

    /// Numerical rank from the diagonal of `R`: entries below
    /// `max(m, n)·ε·max|r_ii|` count as zero.
    pub fn rank(&self) -> usize {
        let d = self.r_diagonal();
        let big = d.iter().fold(T::zero(), |s, v| s.max(v.abs()));
        if big == T::zero() {
            return 0;
        }
        let tol = T::from_count(self.packed.rows.max(self.packed.cols)) * T::epsilon() * big;
        d.iter().filter(|v| v.abs() > tol).count()
    }

    /// Ratio of extreme diagonal magnitudes of `R`, a cheap conditioning
    /// indicator.
    pub fn diagonal_condition(&self) -> T {
        let d = self.r_diagonal();
        let big = d.iter().fold(T::zero(), |s, v| s.max(v.abs()));
        let small = d.iter().fold(T::infinity(), |s, v| s.min(v.abs()));
        if small == T::zero() {
            T::infinity()
        } else {
            big / small
        }
    }

    /// Least-squares solution of `A x ≈ b` for tall full-rank `A`.
    pub fn solve_least_squares(&self, b: &[T]) -> Vec<T> {
        let n = self.packed.cols;
        assert!(self.packed.rows >= n, "least squares needs a tall matrix");
        let mut y = b.to_vec();
        self.apply_qt(&mut y);
        y.truncate(n);
        solve_upper_in_place(&self.packed, &mut y);
        y
    }
}

/// Solves `U x = b` in place using the leading `b.len()` square block of `u`.
pub fn solve_upper_in_place<T: Real>(u: &Matrix<T>, b: &mut [T]) {
    let n = b.len();
    for i in (0..n).rev() {
        let row = u.row(i);
        let mut s = b[i];
        for j in i + 1..n {
            s -= row[j] * b[j];
        }
        b[i] = s / row[i];
    }
}

/// Solves `Uᵀ x = b` in place using the leading square block of `u`.
pub fn solve_upper_transpose_in_place<T: Real>(u: &Matrix<T>, b: &mut [T]) {
    let n = b.len();
    for i in 0..n {
        let mut s = b[i];
        for j in 0..i {
            s -= u[(j, i)] * b[j];
        }
        b[i] = s / u[(i, i)];
    }
}

/// `U⁻¹ B` for the leading `k × k` upper-triangular block of `u`, where `B`
/// has `k` rows.
pub fn solve_upper_matrix<T: Real>(u: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let k = b.rows();
    let mut x = b.clone();
    for i in (0..k).rev() {
        let pivot = u[(i, i)];
        for j in i + 1..k {
            let uij = u[(i, j)];
            if uij == T::zero() {
                continue;
            }
            let (head, tail) = x.data.split_at_mut(j * x.cols);
            let xi = &mut head[i * x.cols..(i + 1) * x.cols];
            let xj = &tail[..x.cols];
            for (a, &b) in xi.iter_mut().zip(xj) {
                *a -= uij * b;
            }
        }
        for v in x.row_mut(i) {
            *v /= pivot;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample_matrix(m: usize, n: usize, seed: u64) -> Matrix<f64> {
        let mut s = seed;
        let data = (0..m * n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        Matrix::from_vec(m, n, data)
    }

    #[test]
    fn qr_reconstructs_tall_and_wide() {
        for &(m, n) in &[(7, 4), (4, 7), (5, 5), (1, 3), (3, 1)] {
            let a = sample_matrix(m, n, (m * 31 + n) as u64);
            let qr = HouseholderQr::new(a.clone());
            let q = qr.q();
            let r = qr.r();
            // Q is m×m, R is k×n: pad R to m rows.
            let mut rp = Matrix::zeros(m, n);
            for i in 0..r.rows() {
                rp.row_mut(i).copy_from_slice(r.row(i));
            }
            let back = q.matmul(&rp);
            for i in 0..m {
                for j in 0..n {
                    assert_relative_eq!(back[(i, j)], a[(i, j)], epsilon = 1e-13);
                }
            }
            let qtq = q.transpose().matmul(&q);
            for i in 0..m {
                for j in 0..m {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert_relative_eq!(qtq[(i, j)], e, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        let a = sample_matrix(30, 5, 4);
        let b: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = HouseholderQr::new(a.clone()).solve_least_squares(&b);
        // Residual must be orthogonal to the column space.
        let ax = a.matvec(&x);
        let res: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let g = a.transpose().matvec(&res);
        assert!(g.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rank_detects_dependent_columns() {
        let mut a = sample_matrix(10, 4, 8);
        for i in 0..10 {
            a[(i, 3)] = a[(i, 0)] + 2.0 * a[(i, 1)];
        }
        assert_eq!(HouseholderQr::new(a).rank(), 3);
        assert_eq!(HouseholderQr::new(Matrix::<f64>::zeros(3, 3)).rank(), 0);
    }

    #[test]
    fn triangular_solves() {
        let a = sample_matrix(6, 6, 1);
        let r = HouseholderQr::new(a).r();
        let b: Vec<f64> = (1..=6).map(f64::from).collect();
        let mut x = b.clone();
        solve_upper_in_place(&r, &mut x);
        let rx = r.matvec(&x);
        for (p, q) in rx.iter().zip(&b) {
            assert_relative_eq!(p, q, epsilon = 1e-11);
        }
        let mut y = b.clone();
        solve_upper_transpose_in_place(&r, &mut y);
        let rty = r.transpose().matvec(&y);
        for (p, q) in rty.iter().zip(&b) {
            assert_relative_eq!(p, q, epsilon = 1e-11);
        }
        let inv = solve_upper_matrix(&r, &Matrix::identity(6));
        let id = r.matmul(&inv);
        for i in 0..6 {
            for j in 0..6 {
                assert_relative_eq!(id[(i, j)], if i == j { 1.0 } else { 0.0 }, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn norm_one_is_max_column_sum() {
        let a = Matrix::from_rows(&[vec![1.0, -4.0], vec![-2.0, 1.0]]);
        assert_eq!(a.norm_one(), 5.0);
    }
}
