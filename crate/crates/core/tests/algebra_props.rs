use accessor_core::algebra::{rational, Coeff, Exact, Pauli, PauliString, StructuredOperator, Unit};
use num_complex::Complex64;
use proptest::prelude::*;

fn exact_coeff() -> impl Strategy<Value = Exact> {
    (-4i64..=4, 1i64..=3, -4i64..=4, 1i64..=3).prop_map(|(a, b, c, d)| Exact::new(rational(a, b), rational(c, d)))
}

fn pauli_string(m: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(0u8..4, m).prop_map(|v| {
        let labels: Vec<Pauli> = v
            .into_iter()
            .map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k as usize])
            .collect();
        PauliString::new(&labels)
    })
}

fn exact_op(n: usize, m: usize) -> impl Strategy<Value = StructuredOperator<Exact>> {
    prop::collection::vec((1..=n, 1..=n, pauli_string(m), exact_coeff()), 0..6).prop_map(move |terms| {
        StructuredOperator::from_raw_terms(n, m, terms.into_iter().map(|(r, c, p, z)| (Unit::new(r, c), p, z))).unwrap()
    })
}

fn ambient() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=3, 1usize..=3)
}

fn pair() -> impl Strategy<Value = (StructuredOperator<Exact>, StructuredOperator<Exact>)> {
    ambient().prop_flat_map(|(n, m)| (exact_op(n, m), exact_op(n, m)))
}

fn triple() -> impl Strategy<Value = [StructuredOperator<Exact>; 3]> {
    ambient().prop_flat_map(|(n, m)| [exact_op(n, m), exact_op(n, m), exact_op(n, m)])
}

fn dense_mul(a: &[Exact], b: &[Exact], d: usize) -> Vec<Exact> {
    let mut out = vec![Exact::zero(); d * d];
    for r in 0..d {
        for k in 0..d {
            if a[r * d + k].is_zero() {
                continue;
            }
            for c in 0..d {
                out[r * d + c] = out[r * d + c].clone() + a[r * d + k].clone() * b[k * d + c].clone();
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn antisymmetry((a, b) in pair()) {
        prop_assert_eq!(a.commutator(&b).unwrap(), -b.commutator(&a).unwrap());
    }

    #[test]
    fn jacobi([a, b, c] in triple()) {
        let j = &(&a.commutator(&b.commutator(&c).unwrap()).unwrap()
            + &b.commutator(&c.commutator(&a).unwrap()).unwrap())
            + &c.commutator(&a.commutator(&b).unwrap()).unwrap();
        prop_assert!(j.is_zero(), "{}", j);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dense_oracle_exact((a, b) in pair()) {
        let d = a.hilbert_dim();
        let (da, db) = (a.to_dense_entries(), b.to_dense_entries());
        let want: Vec<Exact> = dense_mul(&da, &db, d)
            .into_iter()
            .zip(dense_mul(&db, &da, d))
            .map(|(x, y)| x - y)
            .collect();
        prop_assert_eq!(a.commutator(&b).unwrap().to_dense_entries(), want);
        prop_assert_eq!(a.product(&b).unwrap().to_dense_entries(), dense_mul(&da, &db, d));
    }

    #[test]
    fn dense_oracle_floating((a, b) in pair()) {
        let (fa, fb) = (a.to_floating(), b.to_floating());
        let (da, db) = (fa.to_dense_default(), fb.to_dense_default());
        let want = &da * &db - &db * &da;
        let got = fa.commutator(&fb).unwrap().to_dense_default();
        prop_assert!((got - want).norm() <= 1e-12 * (1.0 + da.norm() * db.norm()));
    }

    #[test]
    fn skew_hermiticity_is_preserved((a, b) in pair()) {
        let (sa, sb) = (&a - &a.adjoint(), &b - &b.adjoint());
        prop_assert!(sa.is_skew_hermitian() && sb.is_skew_hermitian());
        let c = sa.commutator(&sb).unwrap();
        prop_assert!(c.is_skew_hermitian());
        let dense = c.to_floating().to_dense_default();
        prop_assert!((&dense + dense.adjoint()).norm() == 0.0);
    }

    #[test]
    fn commutators_are_traceless((a, b) in pair()) {
        let c = a.commutator(&b).unwrap();
        prop_assert!(c.trace().is_zero());
        let one = StructuredOperator::<Exact>::identity(a.system_dim(), a.accessor_len());
        prop_assert!(one.hs_inner(&c).unwrap().is_zero());
    }

    #[test]
    fn hs_inner_matches_dense_trace((a, b) in pair()) {
        let got = a.hs_inner(&b).unwrap();
        let (da, db) = (a.to_floating().to_dense_default(), b.to_floating().to_dense_default());
        let want = (da.adjoint() * db).trace();
        prop_assert!((got.to_c64() - want).norm() < 1e-9);
        prop_assert_eq!(b.hs_inner(&a).unwrap(), got.conj());
    }

    #[test]
    fn pauli_multiply_matches_dense(m in 1usize..=4, seed in any::<[u8; 8]>()) {
        let labels = |off: usize| -> Vec<Pauli> {
            (0..m).map(|k| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][(seed[(k + off) % 8] % 4) as usize]).collect()
        };
        let (p, q) = (PauliString::new(&labels(0)), PauliString::new(&labels(3)));
        let (phase, r) = p.multiply(&q).unwrap();
        let op = |s: PauliString, c: Exact| StructuredOperator::accessor(2, m, s, c).unwrap();
        let lhs = op(p, Exact::one()).product(&op(q, Exact::one())).unwrap();
        prop_assert_eq!(lhs, op(r, phase.to_coeff()));
    }
}

#[test]
fn floating_and_exact_agree_on_a_fixed_case() {
    let i = Complex64::new(0.0, 1.0);
    let x = StructuredOperator::accessor(2, 1, "X".parse().unwrap(), i).unwrap();
    let y = StructuredOperator::accessor(2, 1, "Y".parse().unwrap(), i).unwrap();
    let z = StructuredOperator::accessor(2, 1, "Z".parse().unwrap(), Complex64::new(0.0, -2.0)).unwrap();
    assert_eq!(x.commutator(&y).unwrap(), z);
}
