//! Discrete analytic functions and their calculus.
//!
//! A DA function assigns a complex matrix to every vertex of a lattice patch
//! and satisfies the discrete Cauchy–Riemann equation on every face. The
//! module provides the discrete integral, the forward shift `Z+` (the
//! discrete counterpart of multiplication by `z`), the backward shift `Z-`,
//! the eigenfunctions `e_t`, the pseudo-power basis `z^(n)`, the Duffin
//! basis, and the convolution product of DA polynomials.
//!
//! The backward shift deserves a note. On an infinite lattice every vertex
//! has a leash and `Z-` is uniquely determined. On a finite patch the
//! vertices without in-patch leashes (the rightmost column of the standard
//! patches) carry a genuine degree of freedom: there are nonzero DA
//! functions supported there that `Z+` maps to zero. [`backward_shift`]
//! therefore returns its result on the sub-lattice of leashed vertices,
//! where the result is pinned by the edge relations; ids and coordinates
//! are preserved so values can be compared across domains.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Path, VertexId};
use crate::numeric::{max_abs, max_diff, scalar, Tolerance};
use crate::series::Series;
use crate::{CMatrix, C64};

/// A matrix-valued function on the vertices of a lattice patch.
#[derive(Debug, Clone)]
pub struct DaFunction {
    lattice: Arc<Lattice>,
    shape: (usize, usize),
    values: Vec<CMatrix>,
}

impl DaFunction {
    /// Builds a function from per-vertex values produced by `f(id, coord)`.
    pub fn from_fn<F>(lattice: &Arc<Lattice>, shape: (usize, usize), f: F) -> Self
    where
        F: Fn(VertexId, C64) -> CMatrix,
    {
        let values = lattice
            .vertices()
            .iter()
            .map(|&(id, pos)| {
                let v = f(id, pos);
                assert_eq!(v.shape(), shape, "value shape mismatch at vertex {id}");
                v
            })
            .collect();
        DaFunction {
            lattice: Arc::clone(lattice),
            shape,
            values,
        }
    }

    /// Scalar function from a coordinate formula.
    pub fn scalar_fn<F>(lattice: &Arc<Lattice>, f: F) -> Self
    where
        F: Fn(C64) -> C64,
    {
        Self::from_fn(lattice, (1, 1), |_, z| scalar(f(z)))
    }

    /// The constant function with the given value.
    pub fn constant(lattice: &Arc<Lattice>, value: CMatrix) -> Self {
        let shape = value.shape();
        Self::from_fn(lattice, shape, |_, _| value.clone())
    }

    /// The identity chart `f(z) = z`.
    pub fn coordinate(lattice: &Arc<Lattice>) -> Self {
        Self::scalar_fn(lattice, |z| z)
    }

    pub(crate) fn from_values(
        lattice: Arc<Lattice>,
        shape: (usize, usize),
        values: Vec<CMatrix>,
    ) -> Self {
        debug_assert_eq!(values.len(), lattice.vertex_count());
        DaFunction {
            lattice,
            shape,
            values,
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn is_scalar(&self) -> bool {
        self.shape == (1, 1)
    }

    pub fn value(&self, id: VertexId) -> Result<&CMatrix> {
        Ok(&self.values[self.lattice.index_of(id)?])
    }

    pub fn scalar_value(&self, id: VertexId) -> Result<C64> {
        let v = self.value(id)?;
        if v.shape() != (1, 1) {
            return Err(Error::ShapeError(
                "scalar value of a matrix function".into(),
            ));
        }
        Ok(v[(0, 0)])
    }

    pub fn at_origin(&self) -> &CMatrix {
        &self.values[self.lattice.origin_index()]
    }

    pub(crate) fn value_at_index(&self, index: usize) -> &CMatrix {
        &self.values[index]
    }

    /// Entries of the function in stored vertex order.
    pub fn values(&self) -> impl Iterator<Item = (VertexId, &CMatrix)> {
        self.lattice
            .vertices()
            .iter()
            .map(|v| v.0)
            .zip(self.values.iter())
    }

    /// Largest entry magnitude over the whole patch.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(max_abs).fold(0.0, f64::max)
    }

    /// Applies a matrix-to-matrix map at every vertex.
    pub fn map<F>(&self, shape: (usize, usize), f: F) -> DaFunction
    where
        F: Fn(&CMatrix) -> CMatrix,
    {
        let values = self
            .values
            .iter()
            .map(|v| {
                let w = f(v);
                assert_eq!(w.shape(), shape);
                w
            })
            .collect();
        DaFunction {
            lattice: Arc::clone(&self.lattice),
            shape,
            values,
        }
    }

    /// Pointwise combination of two functions on the same lattice.
    pub fn zip<F>(&self, other: &DaFunction, shape: (usize, usize), f: F) -> Result<DaFunction>
    where
        F: Fn(&CMatrix, &CMatrix) -> CMatrix,
    {
        self.check_same_lattice(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                let w = f(a, b);
                assert_eq!(w.shape(), shape);
                w
            })
            .collect();
        Ok(DaFunction {
            lattice: Arc::clone(&self.lattice),
            shape,
            values,
        })
    }

    pub fn add(&self, other: &DaFunction) -> Result<DaFunction> {
        if self.shape != other.shape {
            return Err(Error::ShapeError(format!(
                "cannot add shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        self.zip(other, self.shape, |a, b| a + b)
    }

    pub fn sub(&self, other: &DaFunction) -> Result<DaFunction> {
        if self.shape != other.shape {
            return Err(Error::ShapeError(format!(
                "cannot subtract shapes {:?} and {:?}",
                self.shape, other.shape
            )));
        }
        self.zip(other, self.shape, |a, b| a - b)
    }

    pub fn scale(&self, factor: C64) -> DaFunction {
        self.map(self.shape, |m| m * factor)
    }

    /// Restriction to a sub-lattice (matched by vertex id).
    pub fn restrict(&self, sub: &Arc<Lattice>) -> Result<DaFunction> {
        let values = sub
            .vertices()
            .iter()
            .map(|&(id, _)| self.value(id).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(DaFunction {
            lattice: Arc::clone(sub),
            shape: self.shape,
            values,
        })
    }

    fn check_same_lattice(&self, other: &DaFunction) -> Result<()> {
        if Arc::ptr_eq(&self.lattice, &other.lattice) || *self.lattice == *other.lattice {
            Ok(())
        } else {
            Err(Error::ShapeError(
                "functions live on different lattices".into(),
            ))
        }
    }
}

/// Maximum entrywise difference over the vertices the two functions share
/// (matched by id). Errors when the shapes differ or no vertex is shared.
pub fn max_difference(a: &DaFunction, b: &DaFunction) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeError(format!(
            "cannot compare shapes {:?} and {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let mut worst = 0.0_f64;
    let mut common = 0usize;
    for (id, va) in a.values() {
        if let Ok(vb) = b.value(id) {
            worst = worst.max(max_diff(va, vb));
            common += 1;
        }
    }
    if common == 0 {
        return Err(Error::ShapeError("functions share no vertices".into()));
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// integral and Cauchy-Riemann residual
// ---------------------------------------------------------------------------

/// Trapezoid-rule discrete integral of `f` along a path:
/// `sum (f(z_{k-1}) + f(z_k))/2 * (z_k - z_{k-1})`.
pub fn discrete_integral(f: &DaFunction, path: &Path) -> Result<CMatrix> {
    let lat = f.lattice();
    let mut acc = CMatrix::zeros(f.shape().0, f.shape().1);
    for w in path.0.windows(2) {
        if !lat.contains_edge(w[0], w[1]) {
            return Err(Error::InvalidPath(format!(
                "path step ({},{}) is not a lattice edge",
                w[0], w[1]
            )));
        }
        let (a, b) = (w[0], w[1]);
        let dz = lat.coordinate(b)? - lat.coordinate(a)?;
        acc += (f.value(a)? + f.value(b)?) * (dz * C64::new(0.5, 0.0));
    }
    if let Some(&first) = path.0.first() {
        lat.index_of(first)?;
    }
    Ok(acc)
}

/// Maximum Cauchy–Riemann residual over all faces:
/// `|(f(a)-f(c))/(a-c) - (f(b)-f(d))/(b-d)|`, entrywise max for matrices.
pub fn cr_residual(f: &DaFunction) -> f64 {
    face_residuals(f)
        .map(|(residual, _)| residual)
        .fold(0.0, f64::max)
}

fn face_residuals(f: &DaFunction) -> impl Iterator<Item = (f64, f64)> + '_ {
    let lat = f.lattice();
    lat.faces().iter().map(move |face| {
        let p: Vec<C64> = face.iter().map(|&id| lat.coordinate(id).unwrap()).collect();
        let v: Vec<&CMatrix> = face.iter().map(|&id| f.value(id).unwrap()).collect();
        let diag1 = (v[0] - v[2]) / (p[0] - p[2]);
        let diag2 = (v[1] - v[3]) / (p[1] - p[3]);
        let residual = max_diff(&diag1, &diag2);
        let scale = v.iter().map(|m| max_abs(m)).fold(0.0, f64::max);
        (residual, scale)
    })
}

/// True when every face residual stays within `tol` of the local scale.
pub fn is_analytic(f: &DaFunction, tol: Tolerance) -> bool {
    face_residuals(f).all(|(residual, scale)| tol.within(residual, scale))
}

fn ensure_analytic(f: &DaFunction, tol: Tolerance) -> Result<()> {
    for (residual, scale) in face_residuals(f) {
        if !tol.within(residual, scale) {
            return Err(Error::NotAnalytic {
                residual,
                bound: tol.bound(scale),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// shifts
// ---------------------------------------------------------------------------

/// Integral primitive `F(z) = integral from 0 to z of f`, evaluated along
/// the canonical breadth-first tree from the origin. For DA input the result
/// is path independent and DA.
pub fn primitive(f: &DaFunction, tol: Tolerance) -> Result<DaFunction> {
    ensure_analytic(f, tol)?;
    Ok(primitive_unchecked(f))
}

fn primitive_unchecked(f: &DaFunction) -> DaFunction {
    let lat = f.lattice();
    let n = lat.vertex_count();
    let mut acc: Vec<Option<CMatrix>> = vec![None; n];
    for &idx in lat.bfs_order() {
        match lat.bfs_parent(idx) {
            None => acc[idx] = Some(CMatrix::zeros(f.shape().0, f.shape().1)),
            Some(p) => {
                let dz = lat.pos_at(idx) - lat.pos_at(p);
                let step =
                    (f.value_at_index(p) + f.value_at_index(idx)) * (dz * C64::new(0.5, 0.0));
                let v = acc[p].as_ref().expect("parent visited first") + step;
                acc[idx] = Some(v);
            }
        }
    }
    let values = acc
        .into_iter()
        .map(|v| v.expect("connected lattice"))
        .collect();
    DaFunction::from_values(Arc::clone(lat), f.shape(), values)
}

/// Forward shift `Z+`: `(Z+ f)(z) = (f(0) - f(z))/2 + integral from 0 to z`.
///
/// The result is DA, vanishes at the origin, and is independent of the path
/// used for the integral (within tolerance).
pub fn forward_shift(f: &DaFunction, tol: Tolerance) -> Result<DaFunction> {
    ensure_analytic(f, tol)?;
    let prim = primitive_unchecked(f);
    let f0 = f.at_origin().clone();
    let lat = f.lattice();
    let values = (0..lat.vertex_count())
        .map(|i| (&f0 - f.value_at_index(i)) * C64::new(0.5, 0.0) + prim.value_at_index(i))
        .collect();
    Ok(DaFunction::from_values(Arc::clone(lat), f.shape(), values))
}

/// Backward shift `Z-`: the unique `h` with `Z+ h = f - f(0)`.
///
/// Computed by the leash algorithm: on every vertex `u` with a right
/// neighbor, `h(u) = g(u+1) - g(u)` where `g = f - f(0)`; the remaining
/// values propagate across non-horizontal edges through the edge relation
/// `h(v)(1 + u - v) - h(u)(1 + v - u) = 2 (g(u) - g(v))`. Every edge with
/// both endpoints assigned is then re-checked against the relation; a
/// violation signals a lattice-assumption failure. The result lives on the
/// sub-lattice of leashed vertices, which is the whole patch minus its
/// rightmost column for the generated square and rhombic patches.
pub fn backward_shift(f: &DaFunction, tol: Tolerance) -> Result<DaFunction> {
    ensure_analytic(f, tol)?;
    let lat = f.lattice();
    let n = lat.vertex_count();
    let mask = vec![true; n];
    let values: Vec<Option<CMatrix>> = (0..n).map(|i| Some(f.value_at_index(i).clone())).collect();
    let h = backward_shift_masked(lat, &values, &mask, tol)?;

    let keep: Vec<bool> = h.iter().map(|v| v.is_some()).collect();
    if h[lat.origin_index()].is_none() {
        return Err(Error::ConsistencyError(
            "origin has no leash inside the patch".into(),
        ));
    }
    if keep.iter().all(|&k| k) {
        let values = h.into_iter().map(|v| v.unwrap()).collect();
        return Ok(DaFunction::from_values(Arc::clone(lat), f.shape(), values));
    }

    let sub = Arc::new(lat.induced(&keep).map_err(|e| {
        Error::ConsistencyError(format!("backward-shift domain is not a valid patch: {e}"))
    })?);
    let report = sub.validate();
    if !report.ok {
        let failing = report
            .failing()
            .first()
            .map(|c| c.name)
            .unwrap_or("unknown");
        return Err(Error::ConsistencyError(format!(
            "backward-shift domain violates '{failing}'"
        )));
    }
    let values = sub
        .vertices()
        .iter()
        .map(|&(id, _)| h[lat.index_of(id).unwrap()].clone().unwrap())
        .collect();
    Ok(DaFunction::from_values(sub, f.shape(), values))
}

/// Backward-shift engine on a masked subgraph: `values` and `mask` describe
/// a function on a subset of the lattice (indexed by the full lattice's
/// vertex positions); the origin must be in the mask. Returns per-vertex
/// results, `None` outside the computable sub-domain.
pub(crate) fn backward_shift_masked(
    lat: &Arc<Lattice>,
    values: &[Option<CMatrix>],
    mask: &[bool],
    tol: Tolerance,
) -> Result<Vec<Option<CMatrix>>> {
    let n = lat.vertex_count();
    let origin = lat.origin_index();
    if !mask[origin] {
        return Err(Error::ConsistencyError(
            "origin has no leash inside the patch".into(),
        ));
    }
    let f0 = values[origin]
        .as_ref()
        .expect("masked vertex carries a value")
        .clone();
    let g: Vec<Option<CMatrix>> = (0..n)
        .map(|i| {
            if mask[i] {
                values[i].as_ref().map(|v| v - &f0)
            } else {
                None
            }
        })
        .collect();
    let in_mask = |i: usize| mask[i] && g[i].is_some();

    let mut h: Vec<Option<CMatrix>> = vec![None; n];
    let mut queue = VecDeque::new();
    for u in 0..n {
        if !in_mask(u) {
            continue;
        }
        if let Some(r) = lat.right_neighbor(u) {
            if in_mask(r) {
                h[u] = Some(g[r].as_ref().unwrap() - g[u].as_ref().unwrap());
                queue.push_back(u);
            }
        }
    }
    while let Some(u) = queue.pop_front() {
        for &v in lat.adjacency(u) {
            if h[v].is_some() || !in_mask(v) || lat.is_horizontal_step(u, v) {
                continue;
            }
            let (pu, pv) = (lat.pos_at(u), lat.pos_at(v));
            let one = C64::new(1.0, 0.0);
            let two = C64::new(2.0, 0.0);
            let hu = h[u].as_ref().unwrap();
            let gu = g[u].as_ref().unwrap();
            let gv = g[v].as_ref().unwrap();
            let hv = ((gu - gv) * two + hu * (one + pv - pu)) / (one + pu - pv);
            h[v] = Some(hv);
            queue.push_back(v);
        }
    }

    // consistency pass over every in-mask edge with both endpoints assigned
    for &(a, b) in lat.edges() {
        let (ia, ib) = (lat.index_of(a)?, lat.index_of(b)?);
        if !in_mask(ia) || !in_mask(ib) {
            continue;
        }
        let (Some(ha), Some(hb)) = (&h[ia], &h[ib]) else {
            continue;
        };
        let (ga, gb) = (g[ia].as_ref().unwrap(), g[ib].as_ref().unwrap());
        let (pa, pb) = (lat.pos_at(ia), lat.pos_at(ib));
        let one = C64::new(1.0, 0.0);
        let two = C64::new(2.0, 0.0);
        let lhs = hb * (one + pa - pb) - ha * (one + pb - pa);
        let rhs = (ga - gb) * two;
        let residual = max_diff(&lhs, &rhs);
        let scale = max_abs(ha)
            .max(max_abs(hb))
            .max(max_abs(ga))
            .max(max_abs(gb))
            * 4.0;
        if !tol.within(residual, scale) {
            return Err(Error::ConsistencyError(format!(
                "edge ({a},{b}) violates the shift relation by {residual:.3e}"
            )));
        }
    }
    Ok(h)
}

/// The chain `f, Z- f, ..., Z-^k f` as masked value tables on `f`'s
/// lattice.
///
/// Iterating the backward shift consumes the patch: each application loses
/// the vertices without in-patch leashes, and once the origin falls outside
/// the remaining domain no further shift is defined. The chain therefore
/// stops early when the patch cannot support the next shift; `depth()`
/// reports how many shifts were actually taken.
pub struct ShiftChain {
    lattice: Arc<Lattice>,
    shape: (usize, usize),
    levels: Vec<Vec<Option<CMatrix>>>,
}

impl ShiftChain {
    pub fn compute(f: &DaFunction, k: usize, tol: Tolerance) -> Result<ShiftChain> {
        ensure_analytic(f, tol)?;
        let lat = f.lattice();
        let n = lat.vertex_count();
        let mut levels: Vec<Vec<Option<CMatrix>>> =
            vec![(0..n).map(|i| Some(f.value_at_index(i).clone())).collect()];
        for _ in 0..k {
            let current = levels.last().unwrap();
            let mask: Vec<bool> = current.iter().map(|v| v.is_some()).collect();
            if !mask[lat.origin_index()] {
                break;
            }
            let next = backward_shift_masked(lat, current, &mask, tol)?;
            if next.iter().all(|v| v.is_none()) {
                break;
            }
            levels.push(next);
        }
        Ok(ShiftChain {
            lattice: Arc::clone(lat),
            shape: f.shape(),
            levels,
        })
    }

    /// Number of shifts taken (levels minus one).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// Vertex indices where every level of the chain is defined.
    pub fn common_support(&self) -> Vec<usize> {
        let last = self.levels.last().unwrap();
        (0..self.lattice.vertex_count())
            .filter(|&i| last[i].is_some())
            .collect()
    }

    pub fn value(&self, level: usize, index: usize) -> Option<&CMatrix> {
        self.levels[level][index].as_ref()
    }
}

// ---------------------------------------------------------------------------
// eigenfunctions and bases
// ---------------------------------------------------------------------------

/// Eigenfunction `e_t` of the backward shift: `e_t(0) = 1` and along any
/// path each step `d` contributes the factor
/// `(2 + t(1 + d)) / (2 + t(1 - d))`.
pub fn exp_basis(lattice: &Arc<Lattice>, t: C64, tol: Tolerance) -> Result<DaFunction> {
    let dd = lattice.direction_data();
    if dd.dist_to_forbidden(t) <= tol.rel {
        return Err(Error::ForbiddenParameter(crate::numeric::fmt_c(t)));
    }
    let n = lattice.vertex_count();
    let mut vals: Vec<Option<C64>> = vec![None; n];
    let one = C64::new(1.0, 0.0);
    let two = C64::new(2.0, 0.0);
    for &idx in lattice.bfs_order() {
        match lattice.bfs_parent(idx) {
            None => vals[idx] = Some(one),
            Some(p) => {
                let d = lattice.pos_at(idx) - lattice.pos_at(p);
                let factor = (two + t * (one + d)) / (two + t * (one - d));
                vals[idx] = Some(vals[p].unwrap() * factor);
            }
        }
    }
    let values = vals
        .into_iter()
        .map(|v| scalar(v.expect("connected lattice")))
        .collect();
    Ok(DaFunction::from_values(Arc::clone(lattice), (1, 1), values))
}

/// Maximum residual of the eigenfunction edge relation
/// `e(u)(2 + t(1 + v - u)) = e(v)(2 + t(1 + u - v))` over all edges.
pub fn eigen_edge_residual(e: &DaFunction, t: C64) -> f64 {
    let lat = e.lattice();
    let one = C64::new(1.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut worst = 0.0_f64;
    for &(a, b) in lat.edges() {
        let (pa, pb) = (lat.coordinate(a).unwrap(), lat.coordinate(b).unwrap());
        let (ea, eb) = (e.scalar_value(a).unwrap(), e.scalar_value(b).unwrap());
        let lhs = ea * (two + t * (one + pb - pa));
        let rhs = eb * (two + t * (one + pa - pb));
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

/// Pseudo-power basis `z^(0), ..., z^(n)`: `z^(0) = 1` and
/// `z^(k) = Z+ z^(k-1)`.
pub fn monomial_basis(lattice: &Arc<Lattice>, n: usize, tol: Tolerance) -> Result<Vec<DaFunction>> {
    let mut basis = Vec::with_capacity(n + 1);
    basis.push(DaFunction::constant(lattice, scalar(C64::new(1.0, 0.0))));
    for _ in 0..n {
        let next = forward_shift(basis.last().unwrap(), tol)?;
        basis.push(next);
    }
    Ok(basis)
}

/// Taylor coefficients of `e_t(z)` in `t`, computed by truncated series
/// arithmetic on the per-edge factors along the canonical tree path. An
/// independent route to the `z^(n)` values for cross-validation.
pub fn monomial_series_values(lattice: &Arc<Lattice>, n_max: usize) -> Vec<Vec<C64>> {
    let n = lattice.vertex_count();
    let one = C64::new(1.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut series: Vec<Option<Series>> = vec![None; n];
    let mut cached: Vec<(C64, Series)> = Vec::new();
    for &idx in lattice.bfs_order() {
        match lattice.bfs_parent(idx) {
            None => series[idx] = Some(Series::one(n_max)),
            Some(p) => {
                let d = lattice.pos_at(idx) - lattice.pos_at(p);
                let factor = cached
                    .iter()
                    .find(|(dir, _)| (dir - d).norm() <= 1e-12)
                    .map(|(_, s)| s.clone())
                    .unwrap_or_else(|| {
                        let num = Series::from_poly(&[two, one + d], n_max);
                        let den = Series::from_poly(&[two, one - d], n_max);
                        let s = num.div(&den);
                        cached.push((d, s.clone()));
                        s
                    });
                series[idx] = Some(series[p].as_ref().unwrap().mul(&factor));
            }
        }
    }
    series
        .into_iter()
        .map(|s| s.expect("connected lattice").coeffs().to_vec())
        .collect()
}

/// Duffin basis: `rho_0 = 1`, `rho_n(z) = n * integral of rho_{n-1}`.
/// Spans the same space as the pseudo-powers.
pub fn duffin_basis(lattice: &Arc<Lattice>, n: usize, tol: Tolerance) -> Result<Vec<DaFunction>> {
    let mut basis = Vec::with_capacity(n + 1);
    basis.push(DaFunction::constant(lattice, scalar(C64::new(1.0, 0.0))));
    for k in 1..=n {
        let prim = primitive(basis.last().unwrap(), tol)?;
        basis.push(prim.scale(C64::new(k as f64, 0.0)));
    }
    Ok(basis)
}

// ---------------------------------------------------------------------------
// DA polynomials and the convolution product
// ---------------------------------------------------------------------------

/// A DA polynomial: matrix coefficients against the basis `z^(0)..z^(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DaPolynomial {
    shape: (usize, usize),
    coeffs: Vec<CMatrix>,
}

impl DaPolynomial {
    /// Builds a polynomial from coefficients (constant term first); trailing
    /// zero coefficients are trimmed so the leading coefficient is nonzero
    /// unless the polynomial is constant.
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        let shape = coeffs[0].shape();
        if coeffs.iter().any(|c| c.shape() != shape) {
            return Err(Error::ShapeError(
                "polynomial coefficients of unequal shape".into(),
            ));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && max_abs(coeffs.last().unwrap()) == 0.0 {
            coeffs.pop();
        }
        Ok(DaPolynomial { shape, coeffs })
    }

    /// Scalar polynomial from complex coefficients.
    pub fn scalar(coeffs: &[C64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| scalar(c)).collect())
    }

    /// The scalar monomial `z^(n)`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![scalar(C64::new(0.0, 0.0)); n + 1];
        coeffs[n] = scalar(C64::new(1.0, 0.0));
        DaPolynomial {
            shape: (1, 1),
            coeffs,
        }
    }

    /// The identity element `I_m z^(0)`.
    pub fn identity(m: usize) -> Self {
        DaPolynomial {
            shape: (m, m),
            coeffs: vec![CMatrix::identity(m, m)],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CMatrix {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| CMatrix::zeros(self.shape.0, self.shape.1))
    }

    /// Drops trailing coefficients whose magnitude falls below `tol_abs`.
    pub fn trimmed(mut self, tol_abs: f64) -> Self {
        while self.coeffs.len() > 1 && max_abs(self.coeffs.last().unwrap()) <= tol_abs {
            self.coeffs.pop();
        }
        self
    }

    /// Embeds a scalar polynomial as `p I_m`.
    pub fn scalar_times_identity(&self, m: usize) -> Result<Self> {
        if self.shape != (1, 1) {
            return Err(Error::ShapeError(
                "scalar_times_identity needs a scalar polynomial".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| CMatrix::identity(m, m) * c[(0, 0)])
            .collect();
        DaPolynomial::new(coeffs)
    }

    /// Pointwise values of the polynomial as a DA function.
    pub fn evaluate(&self, lattice: &Arc<Lattice>, tol: Tolerance) -> Result<DaFunction> {
        let basis = monomial_basis(lattice, self.degree(), tol)?;
        let (m, n) = self.shape;
        let values = (0..lattice.vertex_count())
            .map(|i| {
                let mut acc = CMatrix::zeros(m, n);
                for (k, coeff) in self.coeffs.iter().enumerate() {
                    acc += coeff * basis[k].value_at_index(i)[(0, 0)];
                }
                acc
            })
            .collect();
        Ok(DaFunction::from_values(
            Arc::clone(lattice),
            self.shape,
            values,
        ))
    }
}

/// Convolution product of DA polynomials: coefficient convolution
/// `C_k = sum A_i B_{k-i}`, the product under which
/// `z^(m) (.) z^(n) = z^(m+n)`.
pub fn convolve_poly(p: &DaPolynomial, q: &DaPolynomial) -> Result<DaPolynomial> {
    if p.shape().1 != q.shape().0 {
        return Err(Error::ShapeError(format!(
            "cannot compose shapes {:?} and {:?}",
            p.shape(),
            q.shape()
        )));
    }
    let (m, k) = (p.shape().0, q.shape().1);
    let deg = p.degree() + q.degree();
    let mut coeffs = vec![CMatrix::zeros(m, k); deg + 1];
    for (i, a) in p.coeffs().iter().enumerate() {
        for (j, b) in q.coeffs().iter().enumerate() {
            coeffs[i + j] += a * b;
        }
    }
    DaPolynomial::new(coeffs)
}

/// Convolution of a polynomial with a DA function:
/// `(p (.) f)(z) = sum A_n (Z+^n f)(z)`.
pub fn apply_poly(p: &DaPolynomial, f: &DaFunction, tol: Tolerance) -> Result<DaFunction> {
    if p.shape().1 != f.shape().0 {
        return Err(Error::ShapeError(format!(
            "cannot compose shapes {:?} and {:?}",
            p.shape(),
            f.shape()
        )));
    }
    ensure_analytic(f, tol)?;
    let (m, k) = (p.shape().0, f.shape().1);
    let lat = f.lattice();
    let mut acc: Vec<CMatrix> = (0..lat.vertex_count())
        .map(|i| &p.coeffs()[0] * f.value_at_index(i))
        .collect();
    let mut power = f.clone();
    for coeff in &p.coeffs()[1..] {
        power = forward_shift(&power, tol)?;
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += coeff * power.value_at_index(i);
        }
    }
    Ok(DaFunction::from_values(Arc::clone(lat), (m, k), acc))
}

/// Right-sided convolution `(g (.) p)(z) = sum (Z+^n g)(z) A_n`.
pub fn apply_poly_right(g: &DaFunction, p: &DaPolynomial, tol: Tolerance) -> Result<DaFunction> {
    if g.shape().1 != p.shape().0 {
        return Err(Error::ShapeError(format!(
            "cannot compose shapes {:?} and {:?}",
            g.shape(),
            p.shape()
        )));
    }
    ensure_analytic(g, tol)?;
    let (k, n) = (g.shape().0, p.shape().1);
    let lat = g.lattice();
    let mut acc: Vec<CMatrix> = (0..lat.vertex_count())
        .map(|i| g.value_at_index(i) * &p.coeffs()[0])
        .collect();
    let mut power = g.clone();
    for coeff in &p.coeffs()[1..] {
        power = forward_shift(&power, tol)?;
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += power.value_at_index(i) * coeff;
        }
    }
    Ok(DaFunction::from_values(Arc::clone(lat), (k, n), acc))
}
