//! The consolidated property-verification suite.
//!
//! Every structural identity the library promises is measured here as a
//! numeric residual against a threshold: shift identities, eigenrelations,
//! path independence, basis cross-oracles, realization algebra, the `tau`
//! round trip, kernel positivity and the rationality certificates. The suite
//! is deterministic: all randomness flows from the configured seed, so two
//! runs with the same inputs produce byte-identical reports.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::{
    backward_shift, convolve_poly, cr_residual, discrete_integral, duffin_basis, exp_basis,
    forward_shift, max_difference, monomial_basis, monomial_series_values, primitive, DaFunction,
    DaPolynomial,
};
use crate::error::Result;
use crate::io::lattice_hash;
use crate::lattice::{Lattice, VertexId};
use crate::linalg;
use crate::numeric::{max_abs, max_diff, scalar, Tolerance};
use crate::rational::{
    certificate_residual, gram, kernel, kernel_series, quotient_certificate, RationalDa,
};
use crate::realization::{
    check_spectrum, evaluate, inverse, product, resolvent, resolvent_along, sum, tau_eval,
    tau_inverse, tau_markov, Realization, ScalarRational,
};
use crate::{CMatrix, C64};

/// Configuration of the verification suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Base tolerance; property thresholds scale with `tol.rel`.
    pub tol: Tolerance,
    /// Depth of the pseudo-power span used for random DA functions.
    pub basis_depth: usize,
    /// Truncation order for series comparisons.
    pub truncation: usize,
    /// Seed for all random draws.
    pub seed: u64,
    /// Enabled property groups; `None` runs everything.
    pub groups: Option<Vec<String>>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: Tolerance::default(),
            basis_depth: 8,
            truncation: 200,
            seed: 7,
            groups: None,
        }
    }
}

impl Serialize for Tolerance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Tolerance", 2)?;
        st.serialize_field("rel", &self.rel)?;
        st.serialize_field("abs", &self.abs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Tolerance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            rel: f64,
            abs: f64,
        }
        let raw = Raw::deserialize(d)?;
        Ok(Tolerance {
            rel: raw.rel,
            abs: raw.abs,
        })
    }
}

/// One measured property.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyResult {
    pub group: String,
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Machine-readable verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub lattice_hash: String,
    pub config: VerifyConfig,
    pub properties: Vec<PropertyResult>,
    pub ok: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Human-readable summary, one line per property.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for p in &self.properties {
            out.push_str(&format!(
                "[{}] {}/{}: residual {:.3e} vs threshold {:.3e}\n",
                if p.pass { "PASS" } else { "FAIL" },
                p.group,
                p.name,
                p.residual,
                p.threshold
            ));
        }
        let failed = self.properties.iter().filter(|p| !p.pass).count();
        out.push_str(&format!(
            "{} properties, {} failed -> {}\n",
            self.properties.len(),
            failed,
            if self.ok { "OK" } else { "FAIL" }
        ));
        out
    }
}

struct SuiteCtx<'a> {
    lattice: &'a Arc<Lattice>,
    cfg: &'a VerifyConfig,
    /// tolerance used to gate internal operations; residuals are measured
    /// against the configured tolerance through `scale` instead
    gate: Tolerance,
    rng: ChaCha8Rng,
    results: Vec<PropertyResult>,
    /// property thresholds are given in units of the configured relative
    /// tolerance; this is the multiplier
    scale: f64,
}

impl<'a> SuiteCtx<'a> {
    fn push(&mut self, group: &str, name: &str, residual: f64, base_threshold: f64) {
        let threshold = base_threshold * self.scale;
        self.results.push(PropertyResult {
            group: group.into(),
            name: name.into(),
            residual,
            threshold,
            pass: residual <= threshold,
        });
    }

    fn push_bool(&mut self, group: &str, name: &str, ok: bool) {
        self.results.push(PropertyResult {
            group: group.into(),
            name: name.into(),
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.5,
            pass: ok,
        });
    }

    fn enabled(&self, group: &str) -> bool {
        match &self.cfg.groups {
            None => true,
            Some(gs) => gs.iter().any(|g| g == group),
        }
    }

    fn random_complex(&mut self, radius: f64) -> C64 {
        // uniform in the disk of the given radius, deterministic
        loop {
            let re = self.rng.gen_range(-1.0..1.0);
            let im = self.rng.gen_range(-1.0..1.0);
            let z = C64::new(re, im);
            if z.norm() <= 1.0 {
                return z * radius;
            }
        }
    }

    /// Random scalar DA function from the span of `z^(0)..z^(depth)`.
    fn random_da(&mut self, basis: &[DaFunction]) -> DaFunction {
        let mut acc = DaFunction::constant(self.lattice, scalar(C64::new(0.0, 0.0)));
        for b in basis {
            let coeff = self.random_complex(1.0);
            acc = acc.add(&b.scale(coeff)).expect("same lattice");
        }
        acc
    }

    /// Random square state matrix with spectral radius at most `rho_max`.
    fn random_state(&mut self, l: usize, rho_max: f64) -> CMatrix {
        let mut a = CMatrix::from_fn(l, l, |_, _| C64::new(0.0, 0.0));
        for i in 0..l {
            for j in 0..l {
                a[(i, j)] = self.random_complex(0.5);
            }
        }
        let rho = linalg::spectral_radius(&a, 200);
        if rho > rho_max {
            a *= C64::new(rho_max / rho, 0.0);
        }
        a
    }

    fn random_realization(&mut self, l: usize, m: usize, n: usize, rho_max: f64) -> Realization {
        let a = self.random_state(l, rho_max);
        let b = CMatrix::from_fn(l, n, |_, _| C64::new(0.0, 0.0)).map(|_| self.random_complex(1.0));
        let c = CMatrix::from_fn(m, l, |_, _| C64::new(0.0, 0.0)).map(|_| self.random_complex(1.0));
        let d = CMatrix::from_fn(m, n, |_, _| C64::new(0.0, 0.0)).map(|_| self.random_complex(1.0));
        Realization::new(a, b, c, d).expect("consistent shapes")
    }

    /// Sample of vertices at graph distance >= 2 from the origin.
    fn far_vertices(&mut self, count: usize) -> Vec<VertexId> {
        let lat = self.lattice;
        let mut far: Vec<VertexId> = lat
            .ids()
            .filter(|&id| lat.distance(lat.origin(), id).is_ok_and(|d| d >= 2))
            .collect();
        far.sort();
        let step = (far.len() / count).max(1);
        far.into_iter().step_by(step).take(count).collect()
    }
}

/// Runs the full property suite on a lattice.
pub fn verify_suite(lattice: &Arc<Lattice>, cfg: &VerifyConfig) -> Result<Report> {
    let mut ctx = SuiteCtx {
        lattice,
        cfg,
        gate: Tolerance::default(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        results: Vec::new(),
        scale: cfg.tol.rel,
    };

    if ctx.enabled("lattice") {
        lattice_properties(&mut ctx)?;
    }
    if ctx.enabled("calculus") {
        calculus_properties(&mut ctx)?;
    }
    if ctx.enabled("realization") {
        realization_properties(&mut ctx)?;
    }
    if ctx.enabled("rational") {
        rational_properties(&mut ctx)?;
    }

    let ok = ctx.results.iter().all(|p| p.pass);
    Ok(Report {
        lattice_hash: lattice_hash(lattice),
        config: cfg.clone(),
        properties: ctx.results,
        ok,
    })
}

fn lattice_properties(ctx: &mut SuiteCtx) -> Result<()> {
    let lat = ctx.lattice;
    let euler = lat.vertex_count() as f64 - lat.edge_count() as f64 + lat.face_count() as f64;
    ctx.push(
        "lattice",
        "euler-characteristic",
        (euler - 1.0).abs(),
        0.5 / ctx.scale,
    );

    let mut closure = 0.0_f64;
    for face in lat.faces() {
        let p: Vec<C64> = face.iter().map(|&id| lat.coordinate(id).unwrap()).collect();
        closure = closure.max((p[0] - p[1] + p[2] - p[3]).norm());
    }
    ctx.push("lattice", "face-closure", closure, 1.0);

    let dd = lat.direction_data();
    let min_s = dd
        .forbidden
        .iter()
        .map(|t| t.norm())
        .fold(f64::INFINITY, f64::min);
    ctx.push(
        "lattice",
        "forbidden-outside-disk",
        (1.0 - min_s).max(0.0),
        1e-3,
    );

    let mut dist_err = 0.0_f64;
    let mut multi_path = true;
    let targets = ctx.far_vertices(6);
    for id in targets {
        let d = lat.distance(lat.origin(), id)? as f64;
        let p = lat.find_path(lat.origin(), id)?;
        dist_err = dist_err.max((p.len() as f64 - d).abs());
        let paths = lat.find_paths(lat.origin(), id, 2, p.len() + 4)?;
        if paths.len() < 2 {
            multi_path = false;
        }
    }
    ctx.push("lattice", "bfs-distance", dist_err, 0.5 / ctx.scale);
    ctx.push_bool("lattice", "distinct-paths", multi_path);
    Ok(())
}

fn calculus_properties(ctx: &mut SuiteCtx) -> Result<()> {
    let lat = Arc::clone(ctx.lattice);
    let tol = ctx.gate;
    let depth = ctx.cfg.basis_depth;
    let basis = monomial_basis(&lat, depth.max(12), tol)?;

    // analyticity of the pseudo-powers and eigenfunctions
    let mut cr_mono = 0.0_f64;
    for b in basis.iter().take(11) {
        cr_mono = cr_mono.max(cr_residual(b));
    }
    ctx.push("calculus", "cr-monomials", cr_mono, 1.0);

    let mut cr_eigen = 0.0_f64;
    let mut eigen_rel = 0.0_f64;
    for _ in 0..10 {
        let t = ctx.random_complex(0.8);
        let e = exp_basis(&lat, t, tol)?;
        cr_eigen = cr_eigen.max(cr_residual(&e));
        let h = backward_shift(&e, tol)?;
        eigen_rel = eigen_rel.max(max_difference(&h, &e.scale(t))?);
    }
    ctx.push("calculus", "cr-eigenfunctions", cr_eigen, 1.0);
    ctx.push("calculus", "eigenrelation", eigen_rel, 1.0);

    // shift identities on random DA functions from the pseudo-power span
    let span = &basis[..=depth];
    let mut left_inv = 0.0_f64;
    let mut right_id = 0.0_f64;
    for _ in 0..20 {
        let f = ctx.random_da(span);
        let fwd = forward_shift(&f, tol)?;
        let back = backward_shift(&fwd, tol)?;
        left_inv = left_inv.max(max_difference(&back, &f)?);

        let back_first = backward_shift(&f, tol)?;
        let fwd_back = forward_shift(&back_first, tol)?;
        let f0 = f.at_origin().clone();
        let centered = f.map(f.shape(), |v| v - &f0);
        right_id = right_id.max(max_difference(&fwd_back, &centered)?);
    }
    ctx.push("calculus", "left-inverse", left_inv, 1.0);
    ctx.push("calculus", "right-identity", right_id, 1.0);

    // path independence of the integral and the eigenfunction product
    let targets = ctx.far_vertices(4);
    let mut integral_dev = 0.0_f64;
    let mut eigen_dev = 0.0_f64;
    let f = ctx.random_da(span);
    let t = ctx.random_complex(0.7);
    let e = exp_basis(&lat, t, tol)?;
    for id in &targets {
        let base_len = lat.find_path(lat.origin(), *id)?.len();
        let paths = lat.find_paths(lat.origin(), *id, 3, base_len + 4)?;
        let mut integrals = Vec::new();
        let mut products = Vec::new();
        for p in &paths {
            integrals.push(discrete_integral(&f, p)?);
            // eigenfunction as an explicit product over the path
            let mut acc = C64::new(1.0, 0.0);
            for w in p.0.windows(2) {
                let d = lat.coordinate(w[1])? - lat.coordinate(w[0])?;
                let one = C64::new(1.0, 0.0);
                let two = C64::new(2.0, 0.0);
                acc *= (two + t * (one + d)) / (two + t * (one - d));
            }
            products.push(acc);
        }
        for i in 1..integrals.len() {
            integral_dev = integral_dev.max(max_diff(&integrals[i], &integrals[0]));
        }
        for p in &products {
            eigen_dev = eigen_dev.max((p - e.scalar_value(*id)?).norm());
        }
    }
    ctx.push("calculus", "integral-path-independence", integral_dev, 1.0);
    ctx.push(
        "calculus",
        "eigenfunction-path-independence",
        eigen_dev,
        1.0,
    );

    // the primitive of a DA function is DA
    let mut prim_cr = 0.0_f64;
    for _ in 0..5 {
        let f = ctx.random_da(span);
        prim_cr = prim_cr.max(cr_residual(&primitive(&f, tol)?));
    }
    ctx.push("calculus", "primitive-analytic", prim_cr, 1.0);

    // series-arithmetic cross-oracle for the pseudo-powers
    let series = monomial_series_values(&lat, 12);
    let mut taylor_dev = 0.0_f64;
    for (idx, coeffs) in series.iter().enumerate() {
        for (k, coeff) in coeffs.iter().enumerate() {
            let direct = basis[k].value_at_index(idx)[(0, 0)];
            taylor_dev = taylor_dev.max((coeff - direct).norm());
        }
    }
    ctx.push("calculus", "taylor-cross-oracle", taylor_dev, 1.0);

    // linear independence of the pseudo-powers and the Duffin span
    let n_rank = depth.min(8);
    let nv = lat.vertex_count();
    let mut stacked = CMatrix::zeros(n_rank + 1, nv);
    for (r, b) in basis.iter().take(n_rank + 1).enumerate() {
        for i in 0..nv {
            stacked[(r, i)] = b.value_at_index(i)[(0, 0)];
        }
    }
    ctx.push_bool(
        "calculus",
        "basis-rank",
        linalg::rank(&stacked, 1e-9) == n_rank + 1,
    );

    let n_duffin = 6.min(depth);
    let rho = duffin_basis(&lat, n_duffin, tol)?;
    let mut stacked = CMatrix::zeros(2 * (n_duffin + 1), nv);
    for (r, f) in rho
        .iter()
        .chain(basis.iter().take(n_duffin + 1))
        .enumerate()
    {
        for i in 0..nv {
            stacked[(r, i)] = f.value_at_index(i)[(0, 0)];
        }
    }
    ctx.push_bool(
        "calculus",
        "duffin-span",
        linalg::rank(&stacked, 1e-9) == n_duffin + 1,
    );

    // ring structure z^(m) (.) z^(n) = z^(m+n), pointwise
    let mut ring_dev = 0.0_f64;
    for m in 0..=5usize {
        for n in 0..=(10 - m).min(5) {
            let prod = convolve_poly(&DaPolynomial::monomial(m), &DaPolynomial::monomial(n))?;
            let lhs = prod.evaluate(&lat, tol)?;
            ring_dev = ring_dev.max(max_difference(&lhs, &basis[m + n])?);
        }
    }
    ctx.push("calculus", "ring-structure", ring_dev, 1.0);

    // partial sums of sum t^n z^(n) converge to e_t at t = 0.5
    let t_half = C64::new(0.5, 0.0);
    let deep = monomial_basis(&lat, ctx.cfg.truncation, tol)?;
    let mut acc = DaFunction::constant(&lat, scalar(C64::new(0.0, 0.0)));
    let mut tn = C64::new(1.0, 0.0);
    for b in &deep {
        acc = acc.add(&b.scale(tn))?;
        tn *= t_half;
    }
    let e_half = exp_basis(&lat, t_half, tol)?;
    ctx.push(
        "calculus",
        "partial-sums",
        max_difference(&acc, &e_half)?,
        10.0,
    );
    Ok(())
}

fn realization_properties(ctx: &mut SuiteCtx) -> Result<()> {
    let lat = Arc::clone(ctx.lattice);
    let tol = ctx.gate;
    let dd = lat.direction_data().clone();

    // resolvent inverse identity: R - Z+(R A) = I
    let a = ctx.random_state(2, 0.7);
    let res = resolvent(&a, &lat, tol)?;
    let res_a = res.map((2, 2), |v| v * &a);
    let shifted = forward_shift(&res_a, tol)?;
    let lhs = res.sub(&shifted)?;
    let mut inv_identity = 0.0_f64;
    for (_, v) in lhs.values() {
        inv_identity = inv_identity.max(max_diff(v, &CMatrix::identity(2, 2)));
    }
    ctx.push(
        "realization",
        "resolvent-inverse-identity",
        inv_identity,
        1.0,
    );

    // resolvent path independence
    let targets = ctx.far_vertices(3);
    let mut path_dev = 0.0_f64;
    for id in &targets {
        let base_len = lat.find_path(lat.origin(), *id)?.len();
        let paths = lat.find_paths(lat.origin(), *id, 3, base_len + 4)?;
        let vals: Vec<CMatrix> = paths
            .iter()
            .map(|p| resolvent_along(&a, &lat, p, tol))
            .collect::<Result<_>>()?;
        for v in &vals[1..] {
            path_dev = path_dev.max(max_diff(v, &vals[0]));
        }
    }
    ctx.push("realization", "resolvent-path-independence", path_dev, 1.0);

    // scalar degeneration: 1x1 resolvent equals the eigenfunction
    let mut scalar_dev = 0.0_f64;
    for _ in 0..5 {
        let s = ctx.random_complex(0.9);
        let res = resolvent(&CMatrix::from_element(1, 1, s), &lat, tol)?;
        let e = exp_basis(&lat, s, tol)?;
        scalar_dev = scalar_dev.max(max_difference(&res, &e)?);
    }
    ctx.push("realization", "scalar-degeneration", scalar_dev, 1.0);

    // analyticity of random admissible evaluations
    let mut cr_eval = 0.0_f64;
    for k in 0..5 {
        let (m, n, l) = match k % 3 {
            0 => (1, 1, 1),
            1 => (2, 2, 2),
            _ => (2, 1, 2),
        };
        let r = ctx.random_realization(l, m, n, 0.7);
        debug_assert!(check_spectrum(r.a(), &dd, tol));
        let f = evaluate(&r, &lat, tol)?;
        cr_eval = cr_eval.max(cr_residual(&f));
    }
    ctx.push("realization", "cr-evaluations", cr_eval, 1.0);

    // tau is a homomorphism for sums and products
    let r1 = ctx.random_realization(2, 2, 2, 0.6);
    let r2 = ctx.random_realization(1, 2, 2, 0.6);
    let r_sum = sum(&r1, &r2)?;
    let r_prod = product(&r1, &r2)?;
    let mut hom_dev = 0.0_f64;
    for _ in 0..20 {
        let t = ctx.random_complex(0.5);
        let t1 = tau_eval(&r1, t, tol)?;
        let t2 = tau_eval(&r2, t, tol)?;
        hom_dev = hom_dev.max(max_diff(&tau_eval(&r_sum, t, tol)?, &(&t1 + &t2)));
        hom_dev = hom_dev.max(max_diff(&tau_eval(&r_prod, t, tol)?, &(&t1 * &t2)));
    }
    ctx.push("realization", "tau-homomorphism", hom_dev, 0.1);

    // inverse: evaluate(product(R, inverse(R))) = I pointwise
    let mut inv_dev = 0.0_f64;
    for _ in 0..3 {
        let l = 2;
        let a = ctx.random_state(l, 0.4);
        let b = ctx.random_state(l, 0.4) * C64::new(0.5, 0.0);
        let c = ctx.random_state(l, 0.4) * C64::new(0.5, 0.0);
        let d = CMatrix::identity(l, l) + ctx.random_state(l, 0.2);
        let r = Realization::new(a, b, c, d)?;
        let r_inv = inverse(&r, &dd, tol)?;
        let prod = product(&r, &r_inv)?;
        let f = evaluate(&prod, &lat, tol)?;
        for (_, v) in f.values() {
            inv_dev = inv_dev.max(max_diff(v, &CMatrix::identity(l, l)));
        }
    }
    ctx.push("realization", "inverse-identity", inv_dev, 10.0);

    // series identity for small spectral radius
    let a_small = ctx.random_state(2, 0.5);
    let rho = linalg::spectral_radius(&a_small, 300);
    debug_assert!(rho <= 0.5 + 1e-6);
    let res = resolvent(&a_small, &lat, tol)?;
    let deep = monomial_basis(&lat, ctx.cfg.truncation, tol)?;
    let mut acc_vals: Vec<CMatrix> = (0..lat.vertex_count())
        .map(|_| CMatrix::zeros(2, 2))
        .collect();
    let mut a_pow = CMatrix::identity(2, 2);
    for b in &deep {
        for (i, slot) in acc_vals.iter_mut().enumerate() {
            *slot += &a_pow * b.value_at_index(i)[(0, 0)];
        }
        a_pow = &a_pow * &a_small;
    }
    let mut series_dev = 0.0_f64;
    for (i, acc) in acc_vals.iter().enumerate() {
        series_dev = series_dev.max(max_diff(acc, res.value_at_index(i)));
    }
    ctx.push("realization", "series-identity", series_dev, 10.0);

    // tau round trip through Markov parameters
    let mut round_dev = 0.0_f64;
    for _ in 0..5 {
        let a1 = ctx.random_complex(0.5);
        let a2 = ctx.random_complex(0.5);
        let one = C64::new(1.0, 0.0);
        // den = (1 - a1 t)(1 - a2 t), roots safely outside P
        let den = vec![one, -(a1 + a2), a1 * a2];
        let num = vec![ctx.random_complex(1.0), ctx.random_complex(1.0)];
        let sr = ScalarRational::new(num, den)?;
        let r = tau_inverse(&sr, &dd, tol)?;
        let markov = tau_markov(&r, 20);
        let taylor = sr.taylor(20);
        for (k, want) in taylor.iter().enumerate() {
            round_dev = round_dev.max((markov[k][(0, 0)] - want).norm());
        }
    }
    ctx.push("realization", "tau-roundtrip", round_dev, 1.0);

    // pole rejection: 1/(1+t) must fail because -1 is in P
    let one = C64::new(1.0, 0.0);
    let sr = ScalarRational::new(vec![one], vec![one, one])?;
    ctx.push_bool(
        "realization",
        "tau-rejects-poles",
        tau_inverse(&sr, &dd, tol).is_err(),
    );

    // Markov parameters against the backward-shift chain at the origin
    let r = ctx.random_realization(2, 1, 1, 0.6);
    let k_max = 3usize;
    let markov = tau_markov(&r, k_max);
    let mut cur = evaluate(&r, &lat, tol)?;
    let mut markov_dev = 0.0_f64;
    for (k, m) in markov.iter().take(k_max).enumerate() {
        markov_dev = markov_dev.max(max_diff(cur.at_origin(), m));
        if k + 1 < k_max {
            cur = backward_shift(&cur, tol)?;
        }
    }
    ctx.push("realization", "markov-bwd-oracle", markov_dev, 1.0);
    Ok(())
}

fn rational_properties(ctx: &mut SuiteCtx) -> Result<()> {
    let lat = Arc::clone(ctx.lattice);
    let tol = ctx.gate;
    let m_scale = 2.0;

    // kernel normalization: K_0 = 1 and K_w(0) = 1
    let k0 = kernel(&lat, lat.origin(), m_scale, tol)?;
    let mut norm_dev = 0.0_f64;
    for (_, v) in k0.values().values() {
        norm_dev = norm_dev.max((v[(0, 0)] - C64::new(1.0, 0.0)).norm());
    }
    let witnesses = ctx.far_vertices(3);
    for id in &witnesses {
        let kw = kernel(&lat, *id, m_scale, tol)?;
        norm_dev = norm_dev.max((kw.values().at_origin()[(0, 0)] - C64::new(1.0, 0.0)).norm());
    }
    ctx.push("rational", "kernel-normalization", norm_dev, 1e-3);

    // kernel realization vs truncated series
    let mut oracle_dev = 0.0_f64;
    for id in &witnesses {
        let kw = kernel(&lat, *id, m_scale, tol)?;
        let series = kernel_series(&lat, *id, m_scale, ctx.cfg.truncation, tol)?;
        oracle_dev = oracle_dev.max(max_difference(kw.values(), &series)?);
    }
    ctx.push("rational", "kernel-oracle", oracle_dev, 10.0);

    // Gram positivity over random vertex subsets
    let ids: Vec<VertexId> = lat.ids().collect();
    let mut gram_dev = 0.0_f64;
    for _ in 0..6 {
        let k = 4 + (ctx.rng.gen_range(0..3) as usize);
        let mut subset = Vec::with_capacity(k);
        for _ in 0..k {
            let pick = ctx.rng.gen_range(0..ids.len());
            if !subset.contains(&ids[pick]) {
                subset.push(ids[pick]);
            }
        }
        let g = gram(&lat, &subset, m_scale, tol)?;
        let norm = max_abs(&g).max(f64::MIN_POSITIVE);
        let herm = max_diff(&g, &g.adjoint()) / norm;
        let (lo, _) = linalg::hermitian_eigen_range(&g, 600);
        gram_dev = gram_dev.max(herm).max((-lo / norm).max(0.0));
    }
    ctx.push("rational", "gram-psd", gram_dev, 10.0);

    // rank bound and certificate soundness for random rational functions
    let mut rank_excess = 0.0_f64;
    let mut cert_dev = 0.0_f64;
    for k in 0..5 {
        let l = 1 + (k % 2);
        let r = ctx.random_realization(l, 1, 1, 0.6);
        let f = RationalDa::new(r, &lat, tol)?;
        let rank = crate::rational::shift_rank(f.values(), l + 3, tol)?;
        rank_excess = rank_excess.max((rank as f64 - (l as f64 + 1.0)).max(0.0));
        let (p, q) = quotient_certificate(&f, tol)?;
        cert_dev = cert_dev.max(certificate_residual(&f, &p, &q, tol)?);
    }
    ctx.push_bool("rational", "rank-bound", rank_excess == 0.0);
    ctx.push("rational", "certificate", cert_dev, 10.0);

    // the eigenfunction spans a one-dimensional invariant space
    let e = exp_basis(&lat, C64::new(0.3, 0.0), tol)?;
    ctx.push_bool(
        "rational",
        "eigenfunction-rank",
        crate::rational::shift_rank(&e, 5, tol)? == 1,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeKind;

    #[test]
    fn suite_passes_on_square_patch() {
        let lat = Arc::new(Lattice::generate(LatticeKind::Square, 3).unwrap());
        let report = verify_suite(&lat, &VerifyConfig::default()).unwrap();
        for p in &report.properties {
            assert!(
                p.pass,
                "{}/{}: residual {:.3e} vs {:.3e}",
                p.group, p.name, p.residual, p.threshold
            );
        }
        assert!(report.ok);
    }

    #[test]
    fn unattainable_tolerance_fails_with_named_properties() {
        let lat = Arc::new(Lattice::generate(LatticeKind::Square, 2).unwrap());
        let cfg = VerifyConfig {
            tol: Tolerance {
                rel: 1e-30,
                abs: 1e-32,
            },
            ..VerifyConfig::default()
        };
        let report = verify_suite(&lat, &cfg).unwrap();
        assert!(!report.ok);
        assert!(report.properties.iter().any(|p| !p.pass));
    }

    #[test]
    fn reports_are_deterministic() {
        let lat = Arc::new(Lattice::generate(LatticeKind::Square, 2).unwrap());
        let cfg = VerifyConfig {
            seed: 42,
            ..VerifyConfig::default()
        };
        let a = verify_suite(&lat, &cfg).unwrap().to_json();
        let b = verify_suite(&lat, &cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn group_filter_restricts_output() {
        let lat = Arc::new(Lattice::generate(LatticeKind::Square, 2).unwrap());
        let cfg = VerifyConfig {
            groups: Some(vec!["lattice".into()]),
            ..VerifyConfig::default()
        };
        let report = verify_suite(&lat, &cfg).unwrap();
        assert!(report.properties.iter().all(|p| p.group == "lattice"));
        assert!(!report.properties.is_empty());
    }
}
