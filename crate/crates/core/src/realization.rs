//! State-space calculus for rational DA functions.
//!
//! A realization `(A, B, C, D)` represents the DA function
//! `f = D + C (I - zA)^{-(.)} (.) (zB)`; it exists exactly when the spectrum
//! of `A` avoids the forbidden set `S` of the lattice. The transform `tau`
//! sends such functions to ordinary rational functions of one complex
//! variable, `tau f(t) = D + t C (I - tA)^{-1} B`, and is a bijection onto
//! the rational functions with no poles in `P`. Products and inverses of
//! rational DA functions are computed through explicit block formulas on
//! realizations.

use std::sync::Arc;

use crate::calculus::{forward_shift, DaFunction};
use crate::error::{Error, Result};
use crate::lattice::{DirectionData, Lattice, Path};
use crate::linalg;
use crate::numeric::{fmt_c, max_abs, Tolerance};
use crate::series::rational_taylor;
use crate::{CMatrix, C64};

/// A state-space realization `(A, B, C, D)` with state dimension `l` and
/// input/output shape `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

impl Realization {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let l = a.nrows();
        if a.ncols() != l {
            return Err(Error::ShapeError("state matrix A must be square".into()));
        }
        let (m, n) = d.shape();
        if b.nrows() != l || b.ncols() != n || c.nrows() != m || c.ncols() != l {
            return Err(Error::ShapeError(format!(
                "incompatible realization blocks: A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                l,
                l,
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols(),
                m,
                n
            )));
        }
        Ok(Realization { a, b, c, d })
    }

    /// Scalar realization from four complex numbers.
    pub fn from_scalars(a: C64, b: C64, c: C64, d: C64) -> Self {
        let m = |z: C64| CMatrix::from_element(1, 1, z);
        Realization {
            a: m(a),
            b: m(b),
            c: m(c),
            d: m(d),
        }
    }

    /// Constant function `f = D` (state dimension zero).
    pub fn constant(d: CMatrix) -> Self {
        let (m, n) = d.shape();
        Realization {
            a: CMatrix::zeros(0, 0),
            b: CMatrix::zeros(0, n),
            c: CMatrix::zeros(m, 0),
            d,
        }
    }

    /// Realization of the resolvent `(I - zA)^{-(.)}`: the quadruple
    /// `(A, I, A, I)`.
    pub fn resolvent_of(a: CMatrix) -> Self {
        let l = a.nrows();
        Realization {
            b: CMatrix::identity(l, l),
            c: a.clone(),
            d: CMatrix::identity(l, l),
            a,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.d.shape()
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    /// True when the spectrum of `A` avoids the forbidden set of the
    /// lattice.
    pub fn is_admissible(&self, dd: &DirectionData, tol: Tolerance) -> bool {
        check_spectrum(&self.a, dd, tol)
    }
}

/// Spectrum exclusion test: true iff `det(2I + (1+d)A) != 0` for every edge
/// direction `d`, i.e. the spectrum of `A` avoids every `-2/(1+d)`.
pub fn check_spectrum(a: &CMatrix, dd: &DirectionData, tol: Tolerance) -> bool {
    let l = a.nrows();
    if l == 0 {
        return true;
    }
    let id = CMatrix::identity(l, l);
    let two = C64::new(2.0, 0.0);
    let one = C64::new(1.0, 0.0);
    dd.directions.iter().all(|&d| {
        let m = &id * two + a * (one + d);
        linalg::is_nonsingular(&m, tol.rel)
    })
}

fn step_factor(a: &CMatrix, d: C64, tol: Tolerance) -> Result<CMatrix> {
    let l = a.nrows();
    let id = CMatrix::identity(l, l);
    let one = C64::new(1.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let num = &id * two + a * (one + d);
    let den = &id * two + a * (one - d);
    let den_inv = linalg::inverse(&den, tol.rel).ok_or_else(|| {
        Error::ForbiddenSpectrum(format!(
            "2I + (1 - d)A singular for direction d = {}",
            fmt_c(d)
        ))
    })?;
    Ok(num * den_inv)
}

/// Batch resolvent `(I - zA)^{-(.)}` over the whole patch, evaluated along
/// the canonical tree; all step factors are rational in `A`, hence commute,
/// so the value is path independent.
pub fn resolvent(a: &CMatrix, lattice: &Arc<Lattice>, tol: Tolerance) -> Result<DaFunction> {
    let dd = lattice.direction_data();
    if !check_spectrum(a, dd, tol) {
        return Err(Error::ForbiddenSpectrum(
            "spectrum of A meets S(Lambda)".into(),
        ));
    }
    let l = a.nrows();
    let n = lattice.vertex_count();
    let mut factors: Vec<(C64, CMatrix)> = Vec::new();
    let mut vals: Vec<Option<CMatrix>> = vec![None; n];
    for &idx in lattice.bfs_order() {
        match lattice.bfs_parent(idx) {
            None => vals[idx] = Some(CMatrix::identity(l, l)),
            Some(p) => {
                let d = lattice.pos_at(idx) - lattice.pos_at(p);
                let factor = match factors.iter().find(|(dir, _)| (dir - d).norm() <= 1e-12) {
                    Some((_, f)) => f.clone(),
                    None => {
                        let f = step_factor(a, d, tol)?;
                        factors.push((d, f.clone()));
                        f
                    }
                };
                vals[idx] = Some(vals[p].as_ref().unwrap() * factor);
            }
        }
    }
    let values = vals
        .into_iter()
        .map(|v| v.expect("connected lattice"))
        .collect();
    Ok(DaFunction::from_values(Arc::clone(lattice), (l, l), values))
}

/// Resolvent value at the endpoint of an explicit path (for
/// path-independence checks).
pub fn resolvent_along(
    a: &CMatrix,
    lattice: &Arc<Lattice>,
    path: &Path,
    tol: Tolerance,
) -> Result<CMatrix> {
    let dd = lattice.direction_data();
    if !check_spectrum(a, dd, tol) {
        return Err(Error::ForbiddenSpectrum(
            "spectrum of A meets S(Lambda)".into(),
        ));
    }
    let mut acc = CMatrix::identity(a.nrows(), a.nrows());
    for w in path.0.windows(2) {
        if !lattice.contains_edge(w[0], w[1]) {
            return Err(Error::InvalidPath(format!(
                "path step ({},{}) is not a lattice edge",
                w[0], w[1]
            )));
        }
        let d = lattice.coordinate(w[1])? - lattice.coordinate(w[0])?;
        acc *= step_factor(a, d, tol)?;
    }
    Ok(acc)
}

/// Evaluates a realization as a DA function:
/// `f = D + Z+ (C (I - zA)^{-(.)} B)`; `f(0) = D`.
pub fn evaluate(r: &Realization, lattice: &Arc<Lattice>, tol: Tolerance) -> Result<DaFunction> {
    let res = resolvent(&r.a, lattice, tol)?;
    let (m, n) = r.shape();
    let core = res.map((m, n), |v| &r.c * v * &r.b);
    let shifted = forward_shift(&core, tol)?;
    Ok(shifted.map((m, n), |v| v + &r.d))
}

/// Realization of `f1 + f2`: block-diagonal `A`, stacked `B`, concatenated
/// `C`, summed `D`.
pub fn sum(r1: &Realization, r2: &Realization) -> Result<Realization> {
    if r1.shape() != r2.shape() {
        return Err(Error::ShapeError(format!(
            "cannot add shapes {:?} and {:?}",
            r1.shape(),
            r2.shape()
        )));
    }
    let (l1, l2) = (r1.state_dim(), r2.state_dim());
    let (m, n) = r1.shape();
    let mut a = CMatrix::zeros(l1 + l2, l1 + l2);
    a.view_mut((0, 0), (l1, l1)).copy_from(&r1.a);
    a.view_mut((l1, l1), (l2, l2)).copy_from(&r2.a);
    let mut b = CMatrix::zeros(l1 + l2, n);
    b.view_mut((0, 0), (l1, n)).copy_from(&r1.b);
    b.view_mut((l1, 0), (l2, n)).copy_from(&r2.b);
    let mut c = CMatrix::zeros(m, l1 + l2);
    c.view_mut((0, 0), (m, l1)).copy_from(&r1.c);
    c.view_mut((0, l1), (m, l2)).copy_from(&r2.c);
    Realization::new(a, b, c, &r1.d + &r2.d)
}

/// Realization of the convolution product `f1 (.) f2`:
/// `A = [[A2, 0], [B1 C2, A1]]`, `B = [B2; B1 D2]`, `C = [D1 C2, C1]`,
/// `D = D1 D2`.
pub fn product(r1: &Realization, r2: &Realization) -> Result<Realization> {
    if r1.shape().1 != r2.shape().0 {
        return Err(Error::ShapeError(format!(
            "cannot compose shapes {:?} and {:?}",
            r1.shape(),
            r2.shape()
        )));
    }
    let (l1, l2) = (r1.state_dim(), r2.state_dim());
    let (m, k) = (r1.shape().0, r2.shape().1);
    let l = l1 + l2;
    let mut a = CMatrix::zeros(l, l);
    a.view_mut((0, 0), (l2, l2)).copy_from(&r2.a);
    a.view_mut((l2, 0), (l1, l2)).copy_from(&(&r1.b * &r2.c));
    a.view_mut((l2, l2), (l1, l1)).copy_from(&r1.a);
    let mut b = CMatrix::zeros(l, k);
    b.view_mut((0, 0), (l2, k)).copy_from(&r2.b);
    b.view_mut((l2, 0), (l1, k)).copy_from(&(&r1.b * &r2.d));
    let mut c = CMatrix::zeros(m, l);
    c.view_mut((0, 0), (m, l2)).copy_from(&(&r1.d * &r2.c));
    c.view_mut((0, l2), (m, l1)).copy_from(&r1.c);
    Realization::new(a, b, c, &r1.d * &r2.d)
}

/// Realization of the convolution inverse: with `Ax = A - B D^{-1} C`,
/// `f^{-(.)} = D^{-1} - D^{-1} C (I - z Ax)^{-(.)} (.) (z B D^{-1})`.
pub fn inverse(r: &Realization, dd: &DirectionData, tol: Tolerance) -> Result<Realization> {
    let (m, n) = r.shape();
    if m != n {
        return Err(Error::ShapeError(
            "only square functions can be inverted".into(),
        ));
    }
    let d_inv = linalg::inverse(&r.d, tol.rel).ok_or(Error::SingularD)?;
    let a_cross = &r.a - &r.b * &d_inv * &r.c;
    if !check_spectrum(&a_cross, dd, tol) {
        return Err(Error::ForbiddenSpectrum(
            "spectrum of A - B D^-1 C meets S(Lambda)".into(),
        ));
    }
    Realization::new(a_cross, &r.b * &d_inv, -(&d_inv * &r.c), d_inv)
}

/// Evaluates `tau f(t) = D + t C (I - tA)^{-1} B` by a linear solve.
pub fn tau_eval(r: &Realization, t: C64, tol: Tolerance) -> Result<CMatrix> {
    let l = r.state_dim();
    if l == 0 {
        return Ok(r.d.clone());
    }
    let m = CMatrix::identity(l, l) - &r.a * t;
    if !linalg::is_nonsingular(&m, tol.rel) {
        return Err(Error::PoleError(fmt_c(t)));
    }
    let x = linalg::solve(&m, &r.b, "tau evaluation")?;
    Ok(&r.d + &r.c * x * t)
}

/// Markov parameters `[D, CB, CAB, ..., C A^{K-1} B]`: the Taylor data of
/// `tau f` at the origin, equivalently the values `Z-^k f (0)`.
pub fn tau_markov(r: &Realization, k: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(r.d.clone());
    if k == 0 {
        return out;
    }
    let mut power_b = r.b.clone();
    for _ in 1..=k {
        out.push(&r.c * &power_b);
        power_b = &r.a * power_b;
    }
    out
}

/// A scalar rational function `num(t) / den(t)` given by coefficient lists
/// (constant term first).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarRational {
    pub num: Vec<C64>,
    pub den: Vec<C64>,
}

impl ScalarRational {
    pub fn new(num: Vec<C64>, den: Vec<C64>) -> Result<Self> {
        let trim = |mut v: Vec<C64>| {
            while v.len() > 1 && v.last().is_some_and(|c| c.norm() == 0.0) {
                v.pop();
            }
            v
        };
        let num = trim(num);
        let den = trim(den);
        if num.is_empty() {
            return Err(Error::InvalidParameter("empty numerator".into()));
        }
        if den.is_empty() || den.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidParameter(
                "zero denominator polynomial".into(),
            ));
        }
        Ok(ScalarRational { num, den })
    }

    pub fn eval(&self, t: C64) -> C64 {
        horner(&self.num, t) / horner(&self.den, t)
    }

    /// Taylor coefficients at the origin up to degree `order`.
    pub fn taylor(&self, order: usize) -> Vec<C64> {
        rational_taylor(&self.num, &self.den, order)
    }
}

fn horner(poly: &[C64], t: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for c in poly.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

fn poly_abs_at(poly: &[C64], t: C64) -> f64 {
    let mut acc = 0.0;
    let mut tk = 1.0;
    for c in poly {
        acc += c.norm() * tk;
        tk *= t.norm();
    }
    acc
}

/// Inverse of `tau` for scalar rational data: builds the controllable
/// companion realization of `num/den` (denominator normalized to constant
/// term 1). Fails when `den` vanishes on `P`, in particular at `t = 0`.
pub fn tau_inverse(
    fraction: &ScalarRational,
    dd: &DirectionData,
    tol: Tolerance,
) -> Result<Realization> {
    let den0 = fraction.den[0];
    if den0.norm() <= tol.rel * poly_abs_at(&fraction.den, C64::new(1.0, 0.0)).max(1.0) {
        return Err(Error::NotRealizable(
            "denominator vanishes at t = 0, a point of P(Lambda)".into(),
        ));
    }
    let den: Vec<C64> = fraction.den.iter().map(|c| c / den0).collect();
    let num: Vec<C64> = fraction.num.iter().map(|c| c / den0).collect();

    for &p in &dd.poles {
        let value = horner(&den, p);
        let scale = poly_abs_at(&den, p).max(1.0);
        if value.norm() <= tol.rel * scale {
            return Err(Error::NotRealizable(format!(
                "denominator root at {} lies in P(Lambda)",
                fmt_c(p)
            )));
        }
    }

    let d = num[0];
    // n1(t) = (num - D den) / t
    let mut n1: Vec<C64> = Vec::new();
    let deg = num.len().max(den.len());
    for k in 1..deg {
        let nk = num.get(k).copied().unwrap_or_default();
        let dk = den.get(k).copied().unwrap_or_default();
        n1.push(nk - d * dk);
    }
    while n1.last().is_some_and(|c| c.norm() == 0.0) {
        n1.pop();
    }

    let d_mat = CMatrix::from_element(1, 1, d);
    if n1.is_empty() {
        return Ok(Realization::constant(d_mat));
    }

    let l = n1.len().max(den.len() - 1);
    let mut a = CMatrix::zeros(l, l);
    for j in 0..l {
        a[(0, j)] = -den.get(j + 1).copied().unwrap_or_default();
    }
    for i in 1..l {
        a[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    let mut b = CMatrix::zeros(l, 1);
    b[(0, 0)] = C64::new(1.0, 0.0);
    let mut c = CMatrix::zeros(1, l);
    for (j, &coeff) in n1.iter().enumerate() {
        c[(0, j)] = coeff;
    }
    let r = Realization::new(a, b, c, d_mat)?;
    if !r.is_admissible(dd, tol) {
        return Err(Error::NotRealizable(
            "companion spectrum meets S(Lambda)".into(),
        ));
    }
    Ok(r)
}

/// The rational fraction of `tau f` in polynomial form: returns matrix
/// numerator coefficients `q_k` and scalar denominator coefficients `p_k`
/// with `tau f(t) = (sum q_k t^k) / (sum p_k t^k)`, where the denominator
/// is `det(I - tA)` from the Leverrier recursion.
pub fn tau_fraction(r: &Realization) -> (Vec<CMatrix>, Vec<C64>) {
    let (det, adj) = linalg::leverrier(&r.a);
    // numerator = D det(I - tA) + t C adj(I - tA) B
    let mut num: Vec<CMatrix> = det.iter().map(|dk| &r.d * *dk).collect();
    for (k, g) in adj.iter().enumerate() {
        let term = &r.c * g * &r.b;
        if k + 1 < num.len() {
            num[k + 1] += term;
        } else {
            num.push(term);
        }
    }
    (num, det)
}

/// Minimal realization from Markov parameters `[M0, M1, ...]` by the
/// Ho-Kalman construction: a rank-revealing factorization of the block
/// Hankel matrix of `M1..` determines the state dimension; the returned
/// realization reproduces the data within `tol`.
pub fn minimal_realization(markov: &[CMatrix], tol: Tolerance) -> Result<Realization> {
    if markov.is_empty() {
        return Err(Error::RankError("empty Markov sequence".into()));
    }
    let (m, n) = markov[0].shape();
    if markov.iter().any(|mk| mk.shape() != (m, n)) {
        return Err(Error::RankError(
            "Markov parameters of unequal shape".into(),
        ));
    }
    let d = markov[0].clone();
    let h: Vec<&CMatrix> = markov[1..].iter().collect();
    let kk = h.len();
    let scale = h.iter().map(|mk| max_abs(mk)).fold(0.0, f64::max);
    if kk == 0 || scale == 0.0 {
        return Ok(Realization::constant(d));
    }
    if kk < 2 {
        return Err(Error::RankError(
            "need at least three Markov parameters for a nonzero system".into(),
        ));
    }

    // block Hankel H[i][j] = h_{i+j} with p+q = kk so the shifted Hankel
    // H'[i][j] = h_{i+j+1} stays inside the data
    let p = kk / 2;
    let q = kk - p;
    let hankel = CMatrix::from_fn(p * m, q * n, |i, j| {
        let (bi, ri) = (i / m, i % m);
        let (bj, rj) = (j / n, j % n);
        h[bi + bj][(ri, rj)]
    });
    let shifted = CMatrix::from_fn(p * m, q * n, |i, j| {
        let (bi, ri) = (i / m, i % m);
        let (bj, rj) = (j / n, j % n);
        h[bi + bj + 1][(ri, rj)]
    });

    let (rank, x, y) = linalg::full_pivot_factor(&hankel, tol.rel.max(1e-12));
    if rank == 0 {
        return Ok(Realization::constant(d));
    }

    // A = X^+ H' Y^+, B = first block column of Y, C = first block row of X
    let xh_shifted = linalg::solve_normal(&x, &shifted)?; // rank x (q n)
    let yh = y.adjoint();
    let gram = &y * &yh; // rank x rank, Hermitian
                         // right pseudo-inverse: A = (M Y^*) (Y Y^*)^{-1}, via the transposed solve
    let a = linalg::solve(
        &gram.transpose(),
        &(&xh_shifted * &yh).transpose(),
        "Ho-Kalman shift",
    )?
    .transpose();
    let b = CMatrix::from_fn(rank, n, |i, j| y[(i, j)]);
    let c = CMatrix::from_fn(m, rank, |i, j| x[(i, j)]);
    let r = Realization::new(a, b, c, d)?;

    // the returned realization must reproduce the data
    let reproduced = tau_markov(&r, kk);
    for (k, want) in markov.iter().enumerate() {
        let err = crate::numeric::max_diff(&reproduced[k], want);
        if !tol.within(err, scale.max(max_abs(want))) {
            return Err(Error::RankError(format!(
                "Markov parameter {k} mismatches by {err:.3e}"
            )));
        }
    }
    Ok(r)
}
