//! User-facing rational DA functions.
//!
//! A [`RationalDa`] couples an admissible realization with its evaluated
//! values. The module provides the reproducing kernel `K_w`, the polynomial
//! quotient certificate (a scalar DA polynomial `p` with `p I (.) f` again a
//! DA polynomial), and the shift-invariance rank test that characterizes
//! rationality.

use std::sync::Arc;

use crate::calculus::{
    apply_poly, is_analytic, max_difference, monomial_basis, DaFunction, DaPolynomial, ShiftChain,
};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, VertexId};
use crate::linalg;
use crate::numeric::{max_abs, scalar, Tolerance};
use crate::realization::{
    evaluate, product, tau_fraction, tau_inverse, Realization, ScalarRational,
};
use crate::{CMatrix, C64};

/// A rational DA function: an admissible realization together with its
/// cached evaluation on a lattice patch.
#[derive(Debug, Clone)]
pub struct RationalDa {
    realization: Realization,
    values: DaFunction,
}

impl RationalDa {
    /// Evaluates the realization on the patch; fails when the spectrum of
    /// the state matrix meets the forbidden set.
    pub fn new(realization: Realization, lattice: &Arc<Lattice>, tol: Tolerance) -> Result<Self> {
        let values = evaluate(&realization, lattice, tol)?;
        Ok(RationalDa {
            realization,
            values,
        })
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn values(&self) -> &DaFunction {
        &self.values
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        self.values.lattice()
    }

    pub fn state_dim(&self) -> usize {
        self.realization.state_dim()
    }
}

/// The reproducing kernel `K_w(z) = sum_n z^(n) conj(w^(n)) / M^n`, `M > 1`,
/// built exactly as a product of degree-one factors.
///
/// Its `tau`-image is `conj(e_{conj(t)/M}(w))`; along a path from the origin
/// to `w`, each step direction `d` contributes the factor
/// `(2 + (t/M)(1 + conj d)) / (2 + (t/M)(1 - conj d))`, realized with one
/// state and composed with the realization product.
pub fn kernel(lattice: &Arc<Lattice>, w: VertexId, m: f64, tol: Tolerance) -> Result<RationalDa> {
    if m <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "kernel scale M = {m} must exceed 1"
        )));
    }
    let dd = lattice.direction_data();
    let path = lattice.find_path(lattice.origin(), w)?;
    let mut acc = Realization::constant(CMatrix::identity(1, 1));
    let one = C64::new(1.0, 0.0);
    let two_m = C64::new(2.0 * m, 0.0);
    for step in path.0.windows(2) {
        let d = lattice.coordinate(step[1])? - lattice.coordinate(step[0])?;
        let dc = d.conj();
        let fraction =
            ScalarRational::new(vec![one, (one + dc) / two_m], vec![one, (one - dc) / two_m])?;
        let factor = tau_inverse(&fraction, dd, tol)
            .map_err(|e| Error::NotRealizable(format!("kernel factor for step {d}: {e}")))?;
        acc = product(&acc, &factor)?;
    }
    RationalDa::new(acc, lattice, tol)
}

/// Truncated-series oracle for the kernel:
/// `sum_{n <= n_tr} z^(n) conj(w^(n)) / M^n` computed from the pseudo-power
/// basis. Independent of the realization path used by [`kernel`].
pub fn kernel_series(
    lattice: &Arc<Lattice>,
    w: VertexId,
    m: f64,
    n_tr: usize,
    tol: Tolerance,
) -> Result<DaFunction> {
    if m <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "kernel scale M = {m} must exceed 1"
        )));
    }
    let basis = monomial_basis(lattice, n_tr, tol)?;
    let mut acc = DaFunction::constant(lattice, scalar(C64::new(0.0, 0.0)));
    let mut weight = 1.0;
    for b in &basis {
        let at_w = b.scalar_value(w)?;
        acc = acc.add(&b.scale(at_w.conj() * C64::new(1.0 / weight, 0.0)))?;
        weight *= m;
    }
    Ok(acc)
}

/// Gram matrix `G[i][j] = K_{w_j}(w_i)` of kernel values over a vertex
/// subset. Hermitian and positive semidefinite up to rounding.
pub fn gram(
    lattice: &Arc<Lattice>,
    vertices: &[VertexId],
    m: f64,
    tol: Tolerance,
) -> Result<CMatrix> {
    let k = vertices.len();
    let mut g = CMatrix::zeros(k, k);
    for (j, &wj) in vertices.iter().enumerate() {
        let kj = kernel(lattice, wj, m, tol)?;
        for (i, &wi) in vertices.iter().enumerate() {
            g[(i, j)] = kj.values().scalar_value(wi)?;
        }
    }
    Ok(g)
}

/// Quotient certificate of rationality: returns a scalar DA polynomial `p`
/// (nonzero) and a DA polynomial `q` with `p I (.) f = q` pointwise.
///
/// `p` is the pullback of `det(I - tA)` under `tau` and `q` the pullback of
/// `det(I - tA) * tau f`, both read off the Leverrier determinant/adjugate
/// recursion, so no root finding is involved.
pub fn quotient_certificate(
    f: &RationalDa,
    tol: Tolerance,
) -> Result<(DaPolynomial, DaPolynomial)> {
    let (num, den) = tau_fraction(f.realization());
    let dd = f.lattice().direction_data();

    let den_scale = den.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for &pole in &dd.poles {
        let mut value = C64::new(0.0, 0.0);
        for k in (0..den.len()).rev() {
            value = value * pole + den[k];
        }
        if value.norm() <= tol.bound(den_scale) {
            return Err(Error::ForbiddenSpectrum(format!(
                "certificate denominator vanishes at {} in P(Lambda)",
                crate::numeric::fmt_c(pole)
            )));
        }
    }

    let p = DaPolynomial::scalar(&den)?.trimmed(tol.bound(den_scale));
    let num_scale = num.iter().map(max_abs).fold(0.0, f64::max);
    let q = DaPolynomial::new(num)?.trimmed(tol.bound(num_scale));
    Ok((p, q))
}

/// Residual of a certificate: the largest pointwise difference between
/// `p I (.) f` and `q` over the patch.
pub fn certificate_residual(
    f: &RationalDa,
    p: &DaPolynomial,
    q: &DaPolynomial,
    tol: Tolerance,
) -> Result<f64> {
    let m = f.values().shape().0;
    let pi = p.scalar_times_identity(m)?;
    let lhs = apply_poly(&pi, f.values(), tol)?;
    let rhs = q.evaluate(f.lattice(), tol)?;
    max_difference(&lhs, &rhs)
}

/// Numerical rank of the matrix whose rows are the values of
/// `f, Z- f, ..., Z-^K f` over the common domain (columns flatten matrix
/// entries over vertices). Bounds the dimension of the smallest
/// shift-invariant space containing `f`'s columns.
///
/// Each backward shift loses the leashless boundary of the remaining
/// domain, so the chain is capped by the patch radius; when `k` exceeds
/// what the patch supports, the rank is computed from the shifts that
/// exist (which can only lower it).
pub fn shift_rank(f: &DaFunction, k: usize, tol: Tolerance) -> Result<usize> {
    if !is_analytic(f, tol) {
        return Err(Error::NotAnalytic {
            residual: crate::calculus::cr_residual(f),
            bound: 0.0,
        });
    }
    let chain = ShiftChain::compute(f, k, tol)?;
    let support = chain.common_support();
    let (rows_m, cols_n) = f.shape();
    let depth = chain.depth();
    let mut mat = CMatrix::zeros(depth + 1, support.len() * rows_m * cols_n);
    for row in 0..=depth {
        for (vi, &idx) in support.iter().enumerate() {
            let v = chain.value(row, idx).expect("common support");
            for i in 0..rows_m {
                for j in 0..cols_n {
                    mat[(row, vi * rows_m * cols_n + i * cols_n + j)] = v[(i, j)];
                }
            }
        }
    }
    Ok(linalg::rank(&mat, tol.rel))
}
