//! Dense real linear algebra used by the fitting code: Householder least
//! squares with column pivoting, and eigenvalues of a general real matrix by
//! Hessenberg reduction followed by the shifted double-step QR iteration.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    fn column_norm(&self, col: usize, from_row: usize) -> f64 {
        let mut scale = 0.0f64;
        let mut ssq = 1.0f64;
        for i in from_row..self.rows {
            let v = self[(i, col)].abs();
            if v > 0.0 {
                if scale < v {
                    ssq = 1.0 + ssq * (scale / v) * (scale / v);
                    scale = v;
                } else {
                    ssq += (v / scale) * (v / scale);
                }
            }
        }
        scale * ssq.sqrt()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm without intermediate overflow.
pub fn norm2(v: &[f64]) -> f64 {
    let mut scale = 0.0f64;
    let mut ssq = 1.0f64;
    for &x in v {
        let a = x.abs();
        if a > 0.0 {
            if scale < a {
                ssq = 1.0 + ssq * (scale / a) * (scale / a);
                scale = a;
            } else {
                ssq += (a / scale) * (a / scale);
            }
        }
    }
    scale * ssq.sqrt()
}

/// Applies the Householder reflector that zeroes `a[k+1.., k]` to columns
/// `k..` of `a` and to every right-hand side in `rhs`. Returns the new
/// diagonal entry.
fn householder_step(a: &mut Matrix, k: usize, rhs: &mut [&mut [f64]]) -> f64 {
    let m = a.rows;
    let alpha = a.column_norm(k, k);
    if alpha == 0.0 {
        return 0.0;
    }
    let beta = if a[(k, k)] > 0.0 { -alpha } else { alpha };
    // v = x - beta e1, stored in place; H = I - 2 v v^T / (v^T v)
    a[(k, k)] -= beta;
    let vtv: f64 = (k..m).map(|i| a[(i, k)] * a[(i, k)]).sum();
    if vtv == 0.0 {
        a[(k, k)] = beta;
        return beta;
    }
    for j in k + 1..a.cols {
        let dot: f64 = (k..m).map(|i| a[(i, k)] * a[(i, j)]).sum();
        let f = 2.0 * dot / vtv;
        for i in k..m {
            let vi = a[(i, k)];
            a[(i, j)] -= f * vi;
        }
    }
    for b in rhs.iter_mut() {
        let dot: f64 = (k..m).map(|i| a[(i, k)] * b[i]).sum();
        let f = 2.0 * dot / vtv;
        for i in k..m {
            b[i] -= f * a[(i, k)];
        }
    }
    for i in k + 1..m {
        a[(i, k)] = 0.0;
    }
    a[(k, k)] = beta;
    beta
}

/// Eliminates the leading `lead` columns of `a` with Householder reflections
/// and returns the trailing block `rows lead.., cols lead..` together with the
/// transformed rows `lead..` of `b`. Minimizing over the leading unknowns
/// leaves exactly this reduced least-squares problem in the trailing unknowns.
pub fn eliminate_leading(mut a: Matrix, mut b: Vec<f64>, lead: usize) -> (Matrix, Vec<f64>) {
    assert!(lead <= a.cols && lead <= a.rows);
    for k in 0..lead {
        householder_step(&mut a, k, &mut [&mut b[..]]);
    }
    let rows = a.rows - lead;
    let cols = a.cols - lead;
    let mut reduced = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            reduced[(i, j)] = a[(i + lead, j + lead)];
        }
    }
    (reduced, b.split_off(lead))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    /// Numerical rank after column scaling and pivoting.
    pub rank: usize,
    /// Euclidean norm of `b - A x`.
    pub residual_norm: f64,
}

/// Minimizes `|A x - b|` by Householder QR with column pivoting, after every
/// column has been scaled to unit norm. Pivots with `|R_ii| <= rcond |R_00|`
/// are dropped and their unknowns set to zero (basic solution).
pub fn lstsq(mut a: Matrix, b: &[f64], rcond: f64) -> LeastSquares {
    let (m, n) = (a.rows, a.cols);
    assert_eq!(b.len(), m);
    let mut scales = vec![1.0; n];
    for (j, scale) in scales.iter_mut().enumerate() {
        let norm = a.column_norm(j, 0);
        if norm > 0.0 {
            *scale = norm;
            for i in 0..m {
                a[(i, j)] /= norm;
            }
        }
    }

    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);
    let mut diag = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let norm = a.column_norm(j, k);
            if norm > best_norm {
                best_norm = norm;
                best = j;
            }
        }
        a.swap_cols(k, best);
        perm.swap(k, best);
        diag.push(householder_step(&mut a, k, &mut [&mut rhs[..]]));
    }

    let lead = diag.first().map_or(0.0, |d| d.abs());
    let rank = if lead == 0.0 {
        0
    } else {
        diag.iter().take_while(|d| d.abs() > rcond * lead).count()
    };

    let mut y = vec![0.0; rank];
    for i in (0..rank).rev() {
        let mut acc = rhs[i];
        for j in i + 1..rank {
            acc -= a[(i, j)] * y[j];
        }
        y[i] = acc / a[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in 0..rank {
        x[perm[i]] = y[i] / scales[perm[i]];
    }
    let residual_norm = norm2(&rhs[rank..]);
    LeastSquares {
        x,
        rank,
        residual_norm,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

const DEFLATION_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a real square matrix. Complex eigenvalues are returned as
/// exact conjugate pairs with the positive imaginary member first; real
/// eigenvalues have an imaginary part of exactly zero.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<Complex64>, EigenError> {
    assert_eq!(a.rows, a.cols, "eigenvalues of a non-square matrix");
    let n = a.rows;
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // 1-based working copy keeps the shifted QR sweep readable.
    let mut h = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            h[i + 1][j + 1] = a[(i, j)];
        }
    }
    balance(&mut h, n);
    to_hessenberg(&mut h, n);
    let (wr, wi) = hessenberg_qr(&mut h, n)?;

    let mut out = Vec::with_capacity(n);
    let mut i = 1;
    while i <= n {
        if wi[i] == 0.0 {
            out.push(Complex64::new(wr[i], 0.0));
            i += 1;
        } else {
            let re = 0.5 * (wr[i] + wr[i + 1]);
            let im = wi[i].abs();
            out.push(Complex64::new(re, im));
            out.push(Complex64::new(re, -im));
            i += 2;
        }
    }
    Ok(out)
}

fn balance(a: &mut [Vec<f64>], n: usize) {
    const RADIX: f64 = 2.0;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transforms.
fn to_hessenberg(a: &mut [Vec<f64>], n: usize) {
    for m in 2..n {
        let mut x = 0.0;
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let tmp = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = tmp;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != 0.0 {
                    y /= x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] -= y * a[m][j];
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[m] += y * row[i];
                    }
                }
            }
        }
    }
    for i in 3..=n {
        for j in 1..i - 1 {
            a[i][j] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (1-based storage).
#[allow(clippy::many_single_char_names)]
fn hessenberg_qr(a: &mut [Vec<f64>], n: usize) -> Result<(Vec<f64>, Vec<f64>), EigenError> {
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= DEFLATION_TOL * s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = a[nn - 1][nn - 1];
                let mut w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_SWEEPS {
                        return Err(EigenError::NoConvergence { iterations: its });
                    }
                    if its == 10 || its == 20 || its == 40 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nn {
                            a[i][i] -= x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    let (mut p, mut q, mut r);
                    loop {
                        let z = a[m][m];
                        let r0 = x - z;
                        let s0 = y - z;
                        p = (r0 * s0 - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r0 - s0;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u <= f64::EPSILON * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    pp += r * a[k + 2][j];
                                    a[k + 2][j] -= pp * z;
                                }
                                a[k + 1][j] -= pp * y;
                                a[k][j] -= pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for row in a.iter_mut().take(mmin + 1).skip(l) {
                                let mut pp = x * row[k] + y * row[k + 1];
                                if k != nn - 1 {
                                    pp += z * row[k + 2];
                                    row[k + 2] -= pp * r;
                                }
                                row[k + 1] -= pp * q;
                                row[k] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((wr, wi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .unwrap()
                .then(a.im.partial_cmp(&b.im).unwrap())
        });
        v
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let a = Matrix::from_rows(4, 2, vec![1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let b = [1.0, 3.0, 5.0, 7.0];
        let sol = lstsq(a, &b, 1e-13);
        assert_eq!(sol.rank, 2);
        assert!((sol.x[0] - 1.0).abs() < 1e-13);
        assert!((sol.x[1] - 2.0).abs() < 1e-13);
        assert!(sol.residual_norm < 1e-12);
    }

    #[test]
    fn lstsq_matches_normal_equations_on_overdetermined_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (m, n) = (12, 4);
        let data: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = Matrix::from_rows(m, n, data);
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sol = lstsq(a.clone(), &b, 1e-13);
        // residual must be orthogonal to the columns of A
        let ax = a.mul_vec(&sol.x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
        for j in 0..n {
            let dot: f64 = (0..m).map(|i| a[(i, j)] * r[i]).sum();
            assert!(dot.abs() < 1e-12, "column {j} not orthogonal: {dot}");
        }
        assert!((norm2(&r) - sol.residual_norm).abs() < 1e-12);
    }

    #[test]
    fn lstsq_drops_duplicate_column() {
        let a = Matrix::from_rows(3, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let sol = lstsq(a, &[2.0, 4.0, 6.0], 1e-12);
        assert_eq!(sol.rank, 1);
        assert!((sol.x[0] + sol.x[1] - 2.0).abs() < 1e-12);
        assert!(sol.residual_norm < 1e-12);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let sol = lstsq(Matrix::zeros(3, 2), &[1.0, 0.0, 0.0], 1e-12);
        assert_eq!(sol.rank, 0);
        assert_eq!(sol.x, vec![0.0, 0.0]);
    }

    #[test]
    fn eliminate_leading_reproduces_reduced_problem() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (m, n) = (10, 5);
        let data: Vec<f64> = (0..m * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = Matrix::from_rows(m, n, data);
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let full = lstsq(a.clone(), &b, 1e-14);
        let (reduced, rb) = eliminate_leading(a, b, 2);
        let tail = lstsq(reduced, &rb, 1e-14);
        for j in 0..3 {
            assert!((tail.x[j] - full.x[j + 2]).abs() < 1e-10);
        }
        assert!((tail.residual_norm - full.residual_norm).abs() < 1e-10);
    }

    #[test]
    fn eigenvalues_of_companion_matrix() {
        // (x - 1)(x - 2)(x^2 + 2x + 5): roots 1, 2, -1 +- 2i
        // x^4 - x^3 + x^2 - 11x + 10
        let c = [10.0, -11.0, 1.0, -1.0];
        let mut a = Matrix::zeros(4, 4);
        for i in 1..4 {
            a[(i, i - 1)] = 1.0;
        }
        for i in 0..4 {
            a[(i, 3)] = -c[i];
        }
        let ev = sorted(eigenvalues(&a).unwrap());
        let expected = sorted(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(-1.0, 2.0),
            Complex64::new(-1.0, -2.0),
        ]);
        for (e, x) in ev.iter().zip(&expected) {
            assert!((e - x).norm() < 1e-10, "{e} vs {x}");
        }
    }

    #[test]
    fn eigenvalues_survive_orthogonal_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let known = [
            (Complex64::new(-3.0, 40.0), true),
            (Complex64::new(-0.5, 7.0), true),
            (Complex64::new(2.5, 0.0), false),
            (Complex64::new(-12.0, 0.0), false),
            (Complex64::new(0.3, 90.0), true),
        ];
        let n: usize = known
            .iter()
            .map(|(_, pair)| if *pair { 2 } else { 1 })
            .sum();
        let mut d = Matrix::zeros(n, n);
        let mut i = 0;
        let mut expected = Vec::new();
        for (z, pair) in known {
            if pair {
                d[(i, i)] = z.re;
                d[(i, i + 1)] = z.im;
                d[(i + 1, i)] = -z.im;
                d[(i + 1, i + 1)] = z.re;
                expected.push(z);
                expected.push(z.conj());
                i += 2;
            } else {
                d[(i, i)] = z.re;
                expected.push(z);
                i += 1;
            }
        }
        // Householder reflector Q = I - 2 v v^T / v^T v is symmetric orthogonal
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        let mut q = Matrix::identity(n);
        for r in 0..n {
            for c in 0..n {
                q[(r, c)] -= 2.0 * v[r] * v[c] / vtv;
            }
        }
        let a = q.mul(&d).mul(&q);
        let ev = sorted(eigenvalues(&a).unwrap());
        let expected = sorted(expected);
        for (e, x) in ev.iter().zip(&expected) {
            assert!((e - x).norm() < 1e-9 * x.norm().max(1.0), "{e} vs {x}");
        }
    }

    #[test]
    fn eigenvalue_sum_equals_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 3, 7, 20, 60] {
            let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let a = Matrix::from_rows(n, n, data);
            let ev = eigenvalues(&a).unwrap();
            assert_eq!(ev.len(), n);
            let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
            let sum: Complex64 = ev.iter().sum();
            assert!((sum.re - trace).abs() < 1e-9 * (n as f64) * 10.0);
            assert!(sum.im.abs() < 1e-9);
            // conjugate pairs are adjacent and exact
            let mut i = 0;
            while i < n {
                if ev[i].im != 0.0 {
                    assert!(ev[i].im > 0.0);
                    assert_eq!(ev[i + 1], ev[i].conj());
                    i += 2;
                } else {
                    i += 1;
                }
            }
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let a = Matrix::from_rows(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]);
        assert_eq!(eigenvalues(&a), Err(EigenError::NonFinite));
    }
}
