//! Randomized invariants over the numerical kernel and the wire formats.
//! Inputs come from proptest rather than the crate's own samplers, so these
//! hold on matrices the library did not choose for itself.

use proptest::prelude::*;
use seqprod::effects::{ceil, floor, seq_product};
use seqprod::json::{effect_from_str, effect_to_string, process_to_string, AnyMap, MatrixJson};
use seqprod::linalg::{
    eig_hermitian, is_positive, is_positive_via_norm, min_eigenvalue_margin, op_norm, sqrt_psd,
};
use seqprod::{Algebra, CMatrix, Complex64, Effect, Process, Tolerances};

fn tols() -> Tolerances {
    Tolerances::default()
}

/// Square matrix with entries drawn from the complex unit box.
fn matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |raw| {
        CMatrix::from_fn(n, n, |i, j| {
            let (re, im) = raw[i * n + j];
            Complex64::new(re, im)
        })
    })
}

fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    matrix(n).prop_map(|m| m.add(&m.adjoint()).unwrap().scale_re(0.5))
}

/// Positive semidefinite with spectrum in `[0, n²]`, often with near-kernel.
fn psd(n: usize) -> impl Strategy<Value = CMatrix> {
    hermitian(n).prop_map(|h| h.mul(&h).unwrap())
}

/// Effect on a single block: a squared Hermitian rescaled into `[0, 1]`.
fn effect_block(n: usize) -> impl Strategy<Value = CMatrix> {
    psd(n).prop_map(move |p| {
        let scale = 1.0 / (op_norm(&p, &tols()) + 0.25);
        p.scale_re(scale)
    })
}

/// Effect on the two-block algebra `[2, 2]`.
fn effect_pair() -> impl Strategy<Value = Effect> {
    (effect_block(2), effect_block(2)).prop_map(|(a, b)| {
        let algebra = Algebra::new(vec![2, 2]).unwrap();
        Effect::new(algebra, vec![a, b], &tols()).expect("rescaled squares are effects")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn eigendecompositions_reconstruct_their_input(h in prop_oneof![hermitian(2), hermitian(3), hermitian(4)]) {
        let t = tols();
        let eig = eig_hermitian(&h, &t).unwrap();
        prop_assert!(eig.reconstruction_error(&h) <= 1e-10);
        prop_assert!(eig.unitarity_error() <= 1e-12);
        let entrywise: f64 = eig.eigenvalues.iter().map(|l| l * l).sum::<f64>().sqrt();
        prop_assert!((entrywise - h.frobenius_norm()).abs() <= 1e-9);
    }

    #[test]
    fn square_roots_square_back(p in prop_oneof![psd(2), psd(3), psd(4)]) {
        let t = tols();
        let s = sqrt_psd(&p, &t).unwrap();
        let back = s.mul(&s).unwrap();
        prop_assert!(back.sub(&p).unwrap().frobenius_norm() <= 1e-8 * (1.0 + p.frobenius_norm()));
        prop_assert!(min_eigenvalue_margin(&s, &t).unwrap() >= -1e-10);
    }

    #[test]
    fn operator_norm_satisfies_the_cstar_identity(a in prop_oneof![matrix(2), matrix(3)]) {
        let t = tols();
        let gram = a.adjoint().mul(&a).unwrap();
        let lhs = op_norm(&gram, &t);
        let rhs = op_norm(&a, &t).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
    }

    #[test]
    fn positivity_routes_agree_away_from_the_boundary(
        h in prop_oneof![hermitian(2), hermitian(3)],
        shift in -0.5..0.5f64,
    ) {
        let t = tols();
        let candidate = h.mul(&h).unwrap()
            .sub(&CMatrix::identity(h.rows()).scale_re(shift)).unwrap();
        let margin = min_eigenvalue_margin(&candidate, &t).unwrap();
        prop_assume!(margin.abs() > 1e-6);
        let by_eig = is_positive(&candidate, 1e-8, &t).unwrap();
        let by_norm = is_positive_via_norm(&candidate, 1e-8, &t).unwrap();
        prop_assert_eq!(by_eig, by_norm);
        prop_assert_eq!(by_eig, margin > 0.0);
    }

    #[test]
    fn matrix_json_survives_a_string_round_trip(m in prop_oneof![matrix(2), matrix(3)]) {
        let encoded = serde_json::to_string(&MatrixJson::from_matrix(&m)).unwrap();
        let decoded: MatrixJson = serde_json::from_str(&encoded).unwrap();
        let back = decoded.to_matrix().unwrap();
        prop_assert_eq!(back.sub(&m).unwrap().max_abs_entry(), 0.0);
    }

    #[test]
    fn effect_json_survives_a_string_round_trip(p in effect_pair()) {
        let t = tols();
        let text = effect_to_string(&p);
        let back = effect_from_str(&text, &t).unwrap();
        prop_assert_eq!(back.algebra().block_dims(), p.algebra().block_dims());
        prop_assert!(back.distance(&p, &t).unwrap() <= 1e-14);
    }

    #[test]
    fn process_json_survives_a_string_round_trip(
        k0 in matrix(2),
        k1 in matrix(2),
    ) {
        let t = tols();
        let gram = k0.adjoint().mul(&k0).unwrap().add(&k1.adjoint().mul(&k1).unwrap()).unwrap();
        let scale = 1.0 / (op_norm(&gram, &t) + 0.01).sqrt();
        let algebra = Algebra::full(2).unwrap();
        let p = Process::from_kraus(
            algebra.clone(),
            algebra,
            vec![((0, 0), vec![k0.scale_re(scale), k1.scale_re(scale)])],
            &t,
        )
        .unwrap();
        let text = process_to_string(&p);
        let map = seqprod::json::map_from_str(&text).unwrap();
        let AnyMap::Kraus(back) = map else {
            return Err(TestCaseError::fail("kraus form must decode as kraus"));
        };
        prop_assert_eq!(process_to_string(&back), text);
    }

    #[test]
    fn sequential_products_fix_the_unit(p in effect_pair()) {
        let t = tols();
        let one = Effect::one(p.algebra().clone());
        let fixed_right = seq_product(&p, &one, &t).unwrap();
        let fixed_left = seq_product(&one, &p, &t).unwrap();
        prop_assert!(fixed_right.distance(&p, &t).unwrap() <= 1e-10);
        prop_assert!(fixed_left.distance(&p, &t).unwrap() <= 1e-10);
    }

    #[test]
    fn ceilings_and_floors_bracket_the_effect(p in effect_pair()) {
        let t = tols();
        let up = ceil(&p, &t).unwrap();
        let down = floor(&p, &t).unwrap();
        prop_assert!(p.is_le(up.as_effect(), 1e-8, &t).unwrap());
        prop_assert!(down.as_effect().is_le(&p, 1e-8, &t).unwrap());
        prop_assert!(down.as_effect().is_le(up.as_effect(), 1e-8, &t).unwrap());
    }

    #[test]
    fn sequential_products_stay_effects(p in effect_pair(), q in effect_pair()) {
        let t = tols();
        // The constructor revalidates membership in the unit interval, so
        // building the product at all is the assertion; the norm bound is a
        // second witness.
        let product = seq_product(&p, &q, &t).unwrap();
        prop_assert!(product.op_norm(&t) <= 1.0 + 1e-9);
        prop_assert!(product.is_le(&Effect::one(p.algebra().clone()), 1e-8, &t).unwrap());
    }
}
