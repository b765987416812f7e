//! Acceptance suite: every promised property at its stated tolerance,
//! exercised on square and rhombic (alpha = pi/3) patches at desk scale.
//! Each criterion prints one pass/fail line (visible with `--nocapture`).

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dalat_core::calculus::{
    backward_shift, convolve_poly, cr_residual, discrete_integral, duffin_basis, exp_basis,
    forward_shift, max_difference, monomial_basis, monomial_series_values, DaFunction,
    DaPolynomial,
};
use dalat_core::lattice::{Lattice, LatticeKind, VertexId};
use dalat_core::linalg;
use dalat_core::rational::{
    certificate_residual, gram, kernel, kernel_series, quotient_certificate, shift_rank, RationalDa,
};
use dalat_core::realization::{
    evaluate, inverse, product, resolvent, resolvent_along, sum, tau_eval, tau_inverse, tau_markov,
    Realization, ScalarRational,
};
use dalat_core::{CMatrix, Error, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn square(radius: u32) -> Arc<Lattice> {
    Arc::new(Lattice::generate(LatticeKind::Square, radius).unwrap())
}

fn rhombic(radius: u32) -> Arc<Lattice> {
    Arc::new(
        Lattice::generate(
            LatticeKind::Rhombic {
                alpha: std::f64::consts::PI / 3.0,
            },
            radius,
        )
        .unwrap(),
    )
}

fn patches() -> Vec<(&'static str, Arc<Lattice>)> {
    vec![("square r4", square(4)), ("rhombic r3", rhombic(3))]
}

fn random_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    loop {
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            return z * radius;
        }
    }
}

fn random_da(rng: &mut ChaCha8Rng, basis: &[DaFunction]) -> DaFunction {
    let lat = basis[0].lattice();
    let mut acc = DaFunction::constant(lat, CMatrix::zeros(1, 1));
    for b in basis {
        acc = acc.add(&b.scale(random_disk(rng, 1.0))).unwrap();
    }
    acc
}

fn random_state(rng: &mut ChaCha8Rng, l: usize, rho_max: f64) -> CMatrix {
    let mut a = CMatrix::from_fn(l, l, |_, _| c(0.0, 0.0));
    for i in 0..l {
        for j in 0..l {
            a[(i, j)] = random_disk(rng, 0.5);
        }
    }
    let rho = linalg::spectral_radius(&a, 200);
    if rho > rho_max {
        a *= c(rho_max / rho, 0.0);
    }
    a
}

fn random_realization(rng: &mut ChaCha8Rng, l: usize, m: usize, n: usize) -> Realization {
    let a = random_state(rng, l, 0.7);
    let b = CMatrix::from_fn(l, n, |_, _| c(0.0, 0.0)).map(|_| random_disk(rng, 1.0));
    let cm = CMatrix::from_fn(m, l, |_, _| c(0.0, 0.0)).map(|_| random_disk(rng, 1.0));
    let d = CMatrix::from_fn(m, n, |_, _| c(0.0, 0.0)).map(|_| random_disk(rng, 1.0));
    Realization::new(a, b, cm, d).unwrap()
}

fn far_targets(lat: &Arc<Lattice>, count: usize) -> Vec<VertexId> {
    let mut far: Vec<VertexId> = lat
        .ids()
        .filter(|&id| lat.distance(lat.origin(), id).is_ok_and(|d| d >= 2))
        .collect();
    far.sort();
    let step = (far.len() / count).max(1);
    far.into_iter().step_by(step).take(count).collect()
}

#[test]
fn criterion_01_cr_analyticity() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0_f64;
    for (_, lat) in patches() {
        let basis = monomial_basis(&lat, 10, tol()).unwrap();
        for b in &basis {
            worst = worst.max(cr_residual(b));
        }
        for _ in 0..10 {
            let t = random_disk(&mut rng, 0.8);
            worst = worst.max(cr_residual(&exp_basis(&lat, t, tol()).unwrap()));
        }
        for k in 0..5 {
            let (l, m, n) = match k % 3 {
                0 => (1, 1, 1),
                1 => (2, 2, 2),
                _ => (2, 2, 1),
            };
            let r = random_realization(&mut rng, l, m, n);
            worst = worst.max(cr_residual(&evaluate(&r, &lat, tol()).unwrap()));
        }
    }
    assert!(worst <= 1e-9, "CR residual {worst:.3e}");
    println!("[PASS] criterion 1: CR analyticity (max residual {worst:.3e} <= 1e-9)");
}

#[test]
fn criterion_02_shift_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0_f64;
    for (_, lat) in patches() {
        let basis = monomial_basis(&lat, 8, tol()).unwrap();
        for _ in 0..20 {
            let f = random_da(&mut rng, &basis);
            let round = backward_shift(&forward_shift(&f, tol()).unwrap(), tol()).unwrap();
            worst = worst.max(max_difference(&round, &f).unwrap());

            let back = backward_shift(&f, tol()).unwrap();
            let fwd_back = forward_shift(&back, tol()).unwrap();
            let f0 = f.at_origin().clone();
            let centered = f.map(f.shape(), |v| v - &f0);
            worst = worst.max(max_difference(&fwd_back, &centered).unwrap());
        }
    }
    assert!(worst <= 1e-9, "shift identity residual {worst:.3e}");
    println!("[PASS] criterion 2: shift identities (max residual {worst:.3e} <= 1e-9)");
}

#[test]
fn criterion_03_eigenrelation() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut worst = 0.0_f64;
    for (_, lat) in patches() {
        for _ in 0..10 {
            let t = random_disk(&mut rng, 0.8);
            let e = exp_basis(&lat, t, tol()).unwrap();
            let h = backward_shift(&e, tol()).unwrap();
            worst = worst.max(max_difference(&h, &e.scale(t)).unwrap());
        }
    }
    assert!(worst <= 1e-9, "eigenrelation residual {worst:.3e}");
    println!("[PASS] criterion 3: eigenrelation (max residual {worst:.3e} <= 1e-9)");
}

#[test]
fn criterion_04_path_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut worst = 0.0_f64;
    for (_, lat) in patches() {
        let basis = monomial_basis(&lat, 6, tol()).unwrap();
        let f = random_da(&mut rng, &basis);
        let t = random_disk(&mut rng, 0.7);
        let a = random_state(&mut rng, 2, 0.7);
        for id in far_targets(&lat, 4) {
            let base_len = lat.find_path(lat.origin(), id).unwrap().len();
            let paths = lat.find_paths(lat.origin(), id, 3, base_len + 4).unwrap();
            assert!(paths.len() >= 3, "need three distinct paths to {id}");

            let integrals: Vec<CMatrix> = paths
                .iter()
                .map(|p| discrete_integral(&f, p).unwrap())
                .collect();
            let products: Vec<C64> = paths
                .iter()
                .map(|p| {
                    let mut acc = c(1.0, 0.0);
                    for w in p.0.windows(2) {
                        let d = lat.coordinate(w[1]).unwrap() - lat.coordinate(w[0]).unwrap();
                        acc *= (c(2.0, 0.0) + t * (c(1.0, 0.0) + d))
                            / (c(2.0, 0.0) + t * (c(1.0, 0.0) - d));
                    }
                    acc
                })
                .collect();
            let resolvents: Vec<CMatrix> = paths
                .iter()
                .map(|p| resolvent_along(&a, &lat, p, tol()).unwrap())
                .collect();
            for k in 1..paths.len() {
                worst = worst.max(dalat_core::numeric::max_diff(&integrals[k], &integrals[0]));
                worst = worst.max((products[k] - products[0]).norm());
                worst = worst.max(dalat_core::numeric::max_diff(
                    &resolvents[k],
                    &resolvents[0],
                ));
            }
        }
    }
    assert!(worst <= 1e-9, "path dependence {worst:.3e}");
    println!("[PASS] criterion 4: path independence (max deviation {worst:.3e} <= 1e-9)");
}

#[test]
fn criterion_05_basis_cross_oracle() {
    let mut series_dev = 0.0_f64;
    for (_, lat) in patches() {
        let basis = monomial_basis(&lat, 12, tol()).unwrap();
        let series = monomial_series_values(&lat, 12);
        for (idx, coeffs) in series.iter().enumerate() {
            for (k, coeff) in coeffs.iter().enumerate() {
                let direct = basis[k].value(lat.vertices()[idx].0).unwrap()[(0, 0)];
                series_dev = series_dev.max((coeff - direct).norm());
            }
        }
    }
    assert!(series_dev <= 1e-9, "series cross-oracle {series_dev:.3e}");

    let lat = square(4);
    let basis = monomial_basis(&lat, 2, tol()).unwrap();
    let z = DaFunction::coordinate(&lat);
    let z1_dev = max_difference(&basis[1], &z).unwrap();
    assert!(z1_dev <= 1e-12, "z^(1) = z residual {z1_dev:.3e}");

    let at_i = lat.vertex_at(c(0.0, 1.0), 1e-9).unwrap();
    let z2_dev = (basis[2].scalar_value(at_i).unwrap() - c(-0.5, -0.5)).norm();
    assert!(z2_dev <= 1e-12, "z^(2)(i) residual {z2_dev:.3e}");
    println!(
        "[PASS] criterion 5: basis cross-oracle (series {series_dev:.3e} <= 1e-9, z1 {z1_dev:.3e}, z2(i) {z2_dev:.3e} <= 1e-12)"
    );
}

#[test]
fn criterion_06_ring_structure() {
    let lat = square(4);
    let basis = monomial_basis(&lat, 10, tol()).unwrap();
    let mut ring_dev = 0.0_f64;
    for m in 0..=10usize {
        for n in 0..=(10 - m) {
            let prod =
                convolve_poly(&DaPolynomial::monomial(m), &DaPolynomial::monomial(n)).unwrap();
            let lhs = prod.evaluate(&lat, tol()).unwrap();
            ring_dev = ring_dev.max(max_difference(&lhs, &basis[m + n]).unwrap());
        }
    }
    assert!(ring_dev <= 1e-9, "ring structure residual {ring_dev:.3e}");

    for n in 0..=6usize {
        let rho = duffin_basis(&lat, n, tol()).unwrap();
        let nv = lat.vertex_count();
        let mut stacked = CMatrix::zeros(2 * (n + 1), nv);
        for (r, f) in rho.iter().chain(basis.iter().take(n + 1)).enumerate() {
            for i in 0..nv {
                stacked[(r, i)] = f.value(lat.vertices()[i].0).unwrap()[(0, 0)];
            }
        }
        let rank = linalg::rank(&stacked, 1e-9);
        assert_eq!(rank, n + 1, "Duffin span rank for N = {n}");
    }
    println!(
        "[PASS] criterion 6: ring structure (residual {ring_dev:.3e} <= 1e-9, Duffin ranks OK)"
    );
}

#[test]
fn criterion_07_realization_algebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let lat = square(4);
    let dd = lat.direction_data();

    // tau homomorphism at 20 sample points
    let r1 = random_realization(&mut rng, 2, 2, 2);
    let r2 = random_realization(&mut rng, 1, 2, 2);
    let r_sum = sum(&r1, &r2).unwrap();
    let r_prod = product(&r1, &r2).unwrap();
    let mut hom_dev = 0.0_f64;
    for _ in 0..20 {
        let t = random_disk(&mut rng, 0.5);
        let t1 = tau_eval(&r1, t, tol()).unwrap();
        let t2 = tau_eval(&r2, t, tol()).unwrap();
        hom_dev = hom_dev.max(dalat_core::numeric::max_diff(
            &tau_eval(&r_sum, t, tol()).unwrap(),
            &(&t1 + &t2),
        ));
        hom_dev = hom_dev.max(dalat_core::numeric::max_diff(
            &tau_eval(&r_prod, t, tol()).unwrap(),
            &(&t1 * &t2),
        ));
    }
    assert!(hom_dev <= 1e-10, "tau homomorphism {hom_dev:.3e}");

    // inverse identity, pointwise over the patch
    let mut inv_dev = 0.0_f64;
    for _ in 0..3 {
        let l = 2;
        let a = random_state(&mut rng, l, 0.4);
        let b = random_state(&mut rng, l, 0.4) * c(0.5, 0.0);
        let cm = random_state(&mut rng, l, 0.4) * c(0.5, 0.0);
        let d = CMatrix::identity(l, l) + random_state(&mut rng, l, 0.2);
        let r = Realization::new(a, b, cm, d).unwrap();
        let r_inv = inverse(&r, dd, tol()).unwrap();
        let f = evaluate(&product(&r, &r_inv).unwrap(), &lat, tol()).unwrap();
        for (_, v) in f.values() {
            inv_dev = inv_dev.max(dalat_core::numeric::max_diff(v, &CMatrix::identity(l, l)));
        }
    }
    assert!(inv_dev <= 1e-8, "inverse identity {inv_dev:.3e}");

    // scalar resolvent degenerates to the eigenfunction
    let mut scalar_dev = 0.0_f64;
    for _ in 0..5 {
        let a = random_disk(&mut rng, 0.9);
        let res = resolvent(&CMatrix::from_element(1, 1, a), &lat, tol()).unwrap();
        let e = exp_basis(&lat, a, tol()).unwrap();
        scalar_dev = scalar_dev.max(max_difference(&res, &e).unwrap());
    }
    assert!(scalar_dev <= 1e-9, "scalar degeneration {scalar_dev:.3e}");

    // series identity for spectral radius <= 0.5, truncation 200
    let a = random_state(&mut rng, 2, 0.5);
    assert!(linalg::spectral_radius(&a, 300) <= 0.5 + 1e-9);
    let res = resolvent(&a, &lat, tol()).unwrap();
    let basis = monomial_basis(&lat, 200, tol()).unwrap();
    let mut series_dev = 0.0_f64;
    let mut acc: Vec<CMatrix> = (0..lat.vertex_count())
        .map(|_| CMatrix::zeros(2, 2))
        .collect();
    let mut a_pow = CMatrix::identity(2, 2);
    for b in &basis {
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += &a_pow * b.value(lat.vertices()[i].0).unwrap()[(0, 0)];
        }
        a_pow = &a_pow * &a;
    }
    for (i, slot) in acc.iter().enumerate() {
        series_dev = series_dev.max(dalat_core::numeric::max_diff(
            slot,
            res.value(lat.vertices()[i].0).unwrap(),
        ));
    }
    assert!(series_dev <= 1e-8, "series identity {series_dev:.3e}");
    println!(
        "[PASS] criterion 7: realization algebra (hom {hom_dev:.3e} <= 1e-10, inverse {inv_dev:.3e} <= 1e-8, scalar {scalar_dev:.3e} <= 1e-9, series {series_dev:.3e} <= 1e-8)"
    );
}

#[test]
fn criterion_08_tau_bijection() {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut round_dev = 0.0_f64;
    for (_, lat) in patches() {
        let dd = lat.direction_data();
        for _ in 0..5 {
            let a1 = random_disk(&mut rng, 0.5);
            let a2 = random_disk(&mut rng, 0.5);
            let den = vec![c(1.0, 0.0), -(a1 + a2), a1 * a2];
            let num = vec![random_disk(&mut rng, 1.0), random_disk(&mut rng, 1.0)];
            let sr = ScalarRational::new(num, den).unwrap();
            let r = tau_inverse(&sr, dd, tol()).unwrap();
            let markov = tau_markov(&r, 20);
            for (k, want) in sr.taylor(20).iter().enumerate() {
                round_dev = round_dev.max((markov[k][(0, 0)] - want).norm());
            }
        }
    }
    assert!(round_dev <= 1e-9, "tau round trip {round_dev:.3e}");

    // 1/(1+t) must be rejected on the square lattice: -1 lies in P
    let lat = square(4);
    let sr = ScalarRational::new(vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let rejected = matches!(
        tau_inverse(&sr, lat.direction_data(), tol()),
        Err(Error::NotRealizable(_))
    );
    assert!(
        rejected,
        "1/(1+t) must not be realizable on the square lattice"
    );
    println!(
        "[PASS] criterion 8: tau bijection (round trip {round_dev:.3e} <= 1e-9, pole rejection OK)"
    );
}

#[test]
fn criterion_09_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let lat = square(4);

    // K_0 = 1 exactly
    let k0 = kernel(&lat, lat.origin(), 2.0, tol()).unwrap();
    let mut k0_dev = 0.0_f64;
    for (_, v) in k0.values().values() {
        k0_dev = k0_dev.max((v[(0, 0)] - c(1.0, 0.0)).norm());
    }
    assert!(k0_dev <= 1e-12, "K_0 deviation {k0_dev:.3e}");

    // K_1(1) = 1.5 at M = 2
    let v1 = lat.vertex_at(c(1.0, 0.0), 1e-9).unwrap();
    let k1 = kernel(&lat, v1, 2.0, tol()).unwrap();
    let k1_dev = (k1.values().scalar_value(v1).unwrap() - c(1.5, 0.0)).norm();
    assert!(k1_dev <= 1e-10, "K_1(1) deviation {k1_dev:.3e}");

    // realization vs truncated series, N_tr = 200
    let mut oracle_dev = 0.0_f64;
    for id in far_targets(&lat, 3) {
        let kw = kernel(&lat, id, 2.0, tol()).unwrap();
        let series = kernel_series(&lat, id, 2.0, 200, tol()).unwrap();
        oracle_dev = oracle_dev.max(max_difference(kw.values(), &series).unwrap());
    }
    assert!(
        oracle_dev <= 1e-8,
        "kernel oracle deviation {oracle_dev:.3e}"
    );

    // Gram positivity over 6 random vertex subsets
    let ids: Vec<VertexId> = lat.ids().collect();
    let mut eig_floor = 0.0_f64;
    for _ in 0..6 {
        let k = 4 + rng.gen_range(0..3);
        let mut subset = Vec::new();
        while subset.len() < k {
            let pick = ids[rng.gen_range(0..ids.len())];
            if !subset.contains(&pick) {
                subset.push(pick);
            }
        }
        let g = gram(&lat, &subset, 2.0, tol()).unwrap();
        let (lo, _) = linalg::hermitian_eigen_range(&g, 600);
        let norm = dalat_core::numeric::max_abs(&g);
        assert!(
            lo >= -1e-8 * norm,
            "Gram min eigenvalue {lo:.3e} vs norm {norm:.3e}"
        );
        eig_floor = eig_floor.min(lo / norm);
    }
    println!(
        "[PASS] criterion 9: kernel (K_0 {k0_dev:.3e} <= 1e-12, K_1(1) {k1_dev:.3e} <= 1e-10, oracle {oracle_dev:.3e} <= 1e-8, min eig ratio {eig_floor:.3e} >= -1e-8)"
    );
}

#[test]
fn criterion_10_theorems_as_tests() {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let mut cert_dev = 0.0_f64;
    for (name, lat) in patches() {
        for k in 0..5 {
            let l = 1 + (k % 2);
            let r = random_realization(&mut rng, l, 1, 1);
            let f = RationalDa::new(r, &lat, tol()).unwrap();
            let (p, q) = quotient_certificate(&f, tol()).unwrap();
            cert_dev = cert_dev.max(certificate_residual(&f, &p, &q, tol()).unwrap());
            let rank = shift_rank(f.values(), l + 3, tol()).unwrap();
            assert!(
                rank <= l + 1,
                "{name}: shift rank {rank} exceeds {} for l = {l}",
                l + 1
            );
        }
        let e = exp_basis(&lat, c(0.3, 0.0), tol()).unwrap();
        assert_eq!(
            shift_rank(&e, 5, tol()).unwrap(),
            1,
            "{name}: eigenfunction rank"
        );
    }
    assert!(cert_dev <= 1e-8, "certificate residual {cert_dev:.3e}");
    println!(
        "[PASS] criterion 10: theorems as tests (certificate {cert_dev:.3e} <= 1e-8, shift ranks bounded)"
    );
}
