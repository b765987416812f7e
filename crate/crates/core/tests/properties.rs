//! Property tests over randomized lattices, functions and realizations.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use dalat_core::calculus::{convolve_poly, discrete_integral, DaFunction, DaPolynomial};
use dalat_core::io;
use dalat_core::lattice::{Lattice, LatticeKind};
use dalat_core::realization::{product, tau_eval, Realization};
use dalat_core::{CMatrix, Tolerance};

fn lattice_strategy() -> impl Strategy<Value = Arc<Lattice>> {
    (
        1u32..=3,
        prop_oneof![Just(None), (0.3f64..2.8).prop_map(Some)],
    )
        .prop_map(|(radius, alpha)| {
            let kind = match alpha {
                None => LatticeKind::Square,
                Some(a) => LatticeKind::Rhombic { alpha: a },
            };
            Arc::new(Lattice::generate(kind, radius).unwrap())
        })
}

fn complex_strategy(radius: f64) -> impl Strategy<Value = C64> {
    (-radius..radius, -radius..radius).prop_map(|(re, im)| C64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_lattices_validate(lat in lattice_strategy()) {
        let report = lat.validate();
        prop_assert!(report.ok);
        let euler = lat.vertex_count() as i64 - lat.edge_count() as i64 + lat.face_count() as i64;
        prop_assert_eq!(euler, 1);
        // forbidden parameters stay outside the open unit disk
        for s in &lat.direction_data().forbidden {
            prop_assert!(s.norm() >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn lattice_roundtrip(lat in lattice_strategy()) {
        let back = io::lattice_from_json(&io::lattice_to_json(&lat)).unwrap();
        prop_assert!(*lat == back);
        prop_assert_eq!(io::lattice_hash(&lat), io::lattice_hash(&back));
    }

    #[test]
    fn integral_is_path_independent(
        lat in lattice_strategy(),
        coeffs in proptest::collection::vec(complex_strategy(1.0), 1..5),
        pick in 0usize..1000,
    ) {
        let poly = DaPolynomial::scalar(&coeffs).unwrap();
        let f = poly.evaluate(&lat, Tolerance::default()).unwrap();
        let ids: Vec<_> = lat.ids().collect();
        let target = ids[pick % ids.len()];
        let base_len = lat.find_path(lat.origin(), target).unwrap().len();
        let paths = lat.find_paths(lat.origin(), target, 2, base_len + 4).unwrap();
        if paths.len() >= 2 {
            let v0 = discrete_integral(&f, &paths[0]).unwrap();
            let v1 = discrete_integral(&f, &paths[1]).unwrap();
            prop_assert!(dalat_core::numeric::max_diff(&v0, &v1) < 1e-10);
        }
    }

    #[test]
    fn convolution_is_commutative_for_scalars(
        a in proptest::collection::vec(complex_strategy(1.0), 1..5),
        b in proptest::collection::vec(complex_strategy(1.0), 1..5),
    ) {
        let pa = DaPolynomial::scalar(&a).unwrap();
        let pb = DaPolynomial::scalar(&b).unwrap();
        let ab = convolve_poly(&pa, &pb).unwrap();
        let ba = convolve_poly(&pb, &pa).unwrap();
        prop_assert_eq!(ab.degree(), ba.degree());
        for k in 0..=ab.degree() {
            let d = (ab.coeff(k)[(0, 0)] - ba.coeff(k)[(0, 0)]).norm();
            prop_assert!(d < 1e-12);
        }
    }

    #[test]
    fn tau_of_product_multiplies(
        a1 in complex_strategy(0.4),
        a2 in complex_strategy(0.4),
        b in complex_strategy(1.0),
        cc in complex_strategy(1.0),
        t in complex_strategy(0.4),
    ) {
        let one = C64::new(1.0, 0.0);
        let r1 = Realization::from_scalars(a1, b, cc, one);
        let r2 = Realization::from_scalars(a2, one, b, cc);
        let tol = Tolerance::default();
        let p = product(&r1, &r2).unwrap();
        let lhs = tau_eval(&p, t, tol).unwrap()[(0, 0)];
        let rhs = tau_eval(&r1, t, tol).unwrap()[(0, 0)] * tau_eval(&r2, t, tol).unwrap()[(0, 0)];
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn function_json_roundtrip_bit_exact(
        seed_re in proptest::collection::vec(-5.0f64..5.0, 4),
    ) {
        let lat = Arc::new(Lattice::generate(LatticeKind::Square, 1).unwrap());
        let f = DaFunction::from_fn(&lat, (2, 1), |id, z| {
            CMatrix::from_fn(2, 1, |i, _| {
                C64::new(
                    seed_re[i % 4] * z.re + id.0 as f64 * 0.125,
                    seed_re[(i + 1) % 4] * z.im - 0.33,
                )
            })
        });
        let back = io::function_from_json(&io::function_to_json(&f), &lat).unwrap();
        for (id, v) in f.values() {
            let w = back.value(id).unwrap();
            for i in 0..2 {
                prop_assert_eq!(v[(i, 0)].re.to_bits(), w[(i, 0)].re.to_bits());
                prop_assert_eq!(v[(i, 0)].im.to_bits(), w[(i, 0)].im.to_bits());
            }
        }
    }
}
