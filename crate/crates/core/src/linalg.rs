//! Dense complex linear algebra helpers: scaled singularity tests, rank
//! revealing elimination, and power-iteration bounds for Hermitian matrices.
//!
//! Determinants and solves are delegated to nalgebra's LU; the routines here
//! add the tolerance conventions used across the crate and the few
//! factorizations nalgebra does not provide in pivoted form.

use crate::error::{Error, Result};
use crate::numeric::max_abs;
use crate::{CMatrix, C64};

/// Determinant together with a Hadamard-type magnitude scale.
///
/// `scale` is the product of row maximum magnitudes, an upper bound for
/// `|det|`, so `|det| / scale` measures how far the matrix is from singular
/// in a size-independent way. Empty matrices have determinant 1.
pub fn det_scaled(m: &CMatrix) -> (C64, f64) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "determinant of a non-square matrix");
    if n == 0 {
        return (C64::new(1.0, 0.0), 1.0);
    }
    let mut scale = 1.0;
    for i in 0..n {
        let row_max = (0..n).map(|j| m[(i, j)].norm()).fold(0.0, f64::max);
        scale *= row_max.max(f64::MIN_POSITIVE);
    }
    let det = m.clone().lu().determinant();
    (det, scale)
}

/// True when the matrix is invertible with `|det| > rel_tol * scale`.
pub fn is_nonsingular(m: &CMatrix, rel_tol: f64) -> bool {
    let (det, scale) = det_scaled(m);
    det.norm() > rel_tol * scale
}

/// Solves `m x = rhs`, failing when the matrix is numerically singular.
pub fn solve(m: &CMatrix, rhs: &CMatrix, context: &str) -> Result<CMatrix> {
    if m.nrows() == 0 {
        return Ok(CMatrix::zeros(0, rhs.ncols()));
    }
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::ShapeError(format!("singular system in {context}")))
}

/// Matrix inverse via LU, with the scaled singularity test.
pub fn inverse(m: &CMatrix, rel_tol: f64) -> Option<CMatrix> {
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    if !is_nonsingular(m, rel_tol) {
        return None;
    }
    m.clone().try_inverse()
}

/// Rank-revealing factorization by Gaussian elimination with full pivoting.
///
/// Returns `(rank, x, y)` with `mat ~= x * y`, where `x` is `nrows x rank`
/// and `y` is `rank x ncols`. Pivots are accepted while their magnitude
/// exceeds `rel_tol` times the first (largest) pivot.
pub fn full_pivot_factor(mat: &CMatrix, rel_tol: f64) -> (usize, CMatrix, CMatrix) {
    let (nr, nc) = mat.shape();
    let mut u = mat.clone();
    let mut row_perm: Vec<usize> = (0..nr).collect();
    let mut col_perm: Vec<usize> = (0..nc).collect();
    let mut l = CMatrix::zeros(nr, nr.min(nc));
    let mut rank = 0;
    let mut first_pivot = 0.0_f64;

    for k in 0..nr.min(nc) {
        // locate the largest remaining entry
        let (mut pi, mut pj, mut pmax) = (k, k, 0.0_f64);
        for i in k..nr {
            for j in k..nc {
                let v = u[(i, j)].norm();
                if v > pmax {
                    pmax = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if k == 0 {
            first_pivot = pmax;
        }
        if pmax <= rel_tol * first_pivot || pmax == 0.0 {
            break;
        }
        u.swap_rows(k, pi);
        u.swap_columns(k, pj);
        l.swap_rows(k, pi);
        row_perm.swap(k, pi);
        col_perm.swap(k, pj);

        l[(k, k)] = C64::new(1.0, 0.0);
        let piv = u[(k, k)];
        for i in k + 1..nr {
            let factor = u[(i, k)] / piv;
            l[(i, k)] = factor;
            for j in k..nc {
                let ukj = u[(k, j)];
                u[(i, j)] -= factor * ukj;
            }
        }
        rank += 1;
    }

    // x = P_r^T L[:, :rank], y = U[:rank, :] P_c^T
    let mut x = CMatrix::zeros(nr, rank);
    for i in 0..nr {
        for j in 0..rank {
            x[(row_perm[i], j)] = l[(i, j)];
        }
    }
    let mut y = CMatrix::zeros(rank, nc);
    for i in 0..rank {
        for j in 0..nc {
            y[(i, col_perm[j])] = u[(i, j)];
        }
    }
    (rank, x, y)
}

/// Numerical rank via [`full_pivot_factor`].
pub fn rank(mat: &CMatrix, rel_tol: f64) -> usize {
    if mat.nrows() == 0 || mat.ncols() == 0 || max_abs(mat) == 0.0 {
        return 0;
    }
    full_pivot_factor(mat, rel_tol).0
}

/// Least-squares pseudo-inverse application for a full-column-rank matrix:
/// solves `x^* x a = x^* b`.
pub fn solve_normal(x: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let xh = x.adjoint();
    solve(&(&xh * x), &(&xh * b), "normal equations")
}

/// Spectral radius estimate by power iteration with a deterministic start.
pub fn spectral_radius(m: &CMatrix, iterations: usize) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut v = CMatrix::from_fn(n, 1, |i, _| C64::new(1.0, 0.3 + i as f64 * 0.1));
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let w = m * &v;
        let norm = max_abs(&w);
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm / max_abs(&v);
        v = w / C64::new(norm, 0.0);
    }
    lambda
}

/// Extremal eigenvalue estimates of a Hermitian matrix by power iteration
/// with a single spectral shift; returns `(min, max)`.
///
/// The input is symmetrized as `(g + g^*) / 2` first, so a slightly
/// non-Hermitian argument is tolerated.
pub fn hermitian_eigen_range(g: &CMatrix, iterations: usize) -> (f64, f64) {
    let n = g.nrows();
    assert_eq!(n, g.ncols());
    if n == 0 {
        return (0.0, 0.0);
    }
    let h = (g + g.adjoint()) * C64::new(0.5, 0.0);

    let dominant = |m: &CMatrix| -> f64 {
        let mut v = CMatrix::from_fn(n, 1, |i, _| C64::new(1.0 + i as f64 * 0.01, 0.2));
        let nv = (v.adjoint() * &v)[(0, 0)].re.sqrt();
        v /= C64::new(nv, 0.0);
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let w = m * &v;
            lambda = (v.adjoint() * &w)[(0, 0)].re;
            let nw = (w.adjoint() * &w)[(0, 0)].re.sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            v = w / C64::new(nw, 0.0);
        }
        lambda
    };

    // |lambda|_max bound, then shift to expose both ends of the spectrum.
    let bound = {
        let mut b = 0.0_f64;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| h[(i, j)].norm()).sum();
            b = b.max(row);
        }
        b.max(f64::MIN_POSITIVE)
    };
    let id = CMatrix::identity(n, n);
    let lo = &id * C64::new(bound, 0.0) + &h;
    let hi = &id * C64::new(bound, 0.0) - &h;
    let lambda_max = dominant(&lo) - bound;
    let lambda_min = bound - dominant(&hi);
    (lambda_min, lambda_max)
}

/// Coefficients `d_0..d_n` of `det(I - t A)` via Newton's identities on the
/// power sums `tr(A^k)`, plus the adjugate coefficients `G_0..G_{n-1}` with
/// `adj(I - t A) = sum_k t^k G_k`.
pub fn leverrier(a: &CMatrix) -> (Vec<C64>, Vec<CMatrix>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let one = C64::new(1.0, 0.0);
    if n == 0 {
        return (vec![one], Vec::new());
    }

    // power sums p_k = tr(A^k), k = 1..n
    let mut powers: Vec<CMatrix> = Vec::with_capacity(n + 1);
    powers.push(CMatrix::identity(n, n));
    for k in 1..=n {
        let next = &powers[k - 1] * a;
        powers.push(next);
    }
    let p: Vec<C64> = (1..=n).map(|k| powers[k].trace()).collect();

    // elementary symmetric functions e_k of the eigenvalues
    let mut e = vec![one];
    for k in 1..=n {
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..=k {
            let sign = if i % 2 == 1 { one } else { -one };
            acc += sign * e[k - i] * p[i - 1];
        }
        e.push(acc / C64::new(k as f64, 0.0));
    }
    // det(I - tA) = sum_k (-1)^k e_k t^k
    let det: Vec<C64> = (0..=n)
        .map(|k| if k % 2 == 0 { e[k] } else { -e[k] })
        .collect();

    // adj(I - tA) = det(I - tA) * sum_k t^k A^k, truncated to degree n-1
    let mut adj = Vec::with_capacity(n);
    for k in 0..n {
        let mut g = CMatrix::zeros(n, n);
        for j in 0..=k {
            g += &powers[k - j] * det[j];
        }
        adj.push(g);
    }
    (det, adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rank_of_outer_product_is_one() {
        let x = CMatrix::from_fn(4, 1, |i, _| c(1.0 + i as f64, -0.5));
        let y = CMatrix::from_fn(1, 5, |_, j| c(0.3, j as f64));
        let m = &x * &y;
        assert_eq!(rank(&m, 1e-10), 1);
    }

    #[test]
    fn full_pivot_reconstructs() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(2.0, 1.0),
                c(0.0, 0.0),
                c(0.0, -1.0),
                c(1.0, 0.0),
                c(3.0, 0.0),
                c(2.0, 0.0),
                c(5.0, 1.0),
                c(3.0, 0.0),
            ],
        );
        let (r, x, y) = full_pivot_factor(&m, 1e-12);
        let rec = &x * &y;
        assert!(crate::numeric::max_diff(&rec, &m) < 1e-12);
        assert_eq!(r, rank(&m, 1e-10));
    }

    #[test]
    fn leverrier_matches_lu_determinant() {
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.2, 0.1),
                c(-0.3, 0.0),
                c(0.05, 0.0),
                c(0.0, 0.2),
                c(0.1, -0.1),
                c(0.4, 0.0),
                c(0.3, 0.0),
                c(0.0, 0.0),
                c(-0.2, 0.3),
            ],
        );
        let (det_coeffs, adj) = leverrier(&a);
        for &t in &[c(0.0, 0.0), c(0.4, 0.2), c(-0.7, 0.1)] {
            let m = CMatrix::identity(3, 3) - &a * t;
            let lu_det = m.clone().lu().determinant();
            let mut horner = C64::new(0.0, 0.0);
            for k in (0..det_coeffs.len()).rev() {
                horner = horner * t + det_coeffs[k];
            }
            assert!((horner - lu_det).norm() < 1e-12);

            // adjugate identity (I - tA) adj = det * I
            let mut adj_t = CMatrix::zeros(3, 3);
            let mut tk = C64::new(1.0, 0.0);
            for g in &adj {
                adj_t += g * tk;
                tk *= t;
            }
            let lhs = &m * &adj_t;
            let rhs = CMatrix::identity(3, 3) * horner;
            assert!(crate::numeric::max_diff(&lhs, &rhs) < 1e-12);
        }
    }

    #[test]
    fn hermitian_range_of_diagonal() {
        let mut g = CMatrix::zeros(3, 3);
        g[(0, 0)] = c(2.0, 0.0);
        g[(1, 1)] = c(-1.0, 0.0);
        g[(2, 2)] = c(0.5, 0.0);
        let (lo, hi) = hermitian_eigen_range(&g, 300);
        assert!((lo + 1.0).abs() < 1e-8);
        assert!((hi - 2.0).abs() < 1e-8);
    }

    #[test]
    fn spectral_radius_estimate() {
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(0.5, 0.0);
        a[(1, 1)] = c(-0.25, 0.0);
        let rho = spectral_radius(&a, 200);
        assert!((rho - 0.5).abs() < 1e-6);
    }
}
