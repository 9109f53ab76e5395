//! Property tests for the algebraic laws the engine relies on: ring axioms
//! on random polynomials, substitution functoriality, canonical-form
//! round-trips, base-change multiplicativity, and hom_diff² = 0.

use std::sync::Arc;

use proptest::prelude::*;

use mfcalc::matrix::PolyMatrix;
use mfcalc::mf::{MFMorphism, MatrixFactorization, Parity};
use mfcalc::ring::{coeff_int, Monomial, Poly, Ring, RingMap};

fn ring3() -> Arc<Ring> {
    Ring::new(vec!["a".into(), "b".into(), "c".into()]).unwrap()
}

fn ring2() -> Arc<Ring> {
    Ring::new(vec!["u".into(), "v".into()]).unwrap()
}

prop_compose! {
    fn arb_mono(arity: usize)(exps in prop::collection::vec(0u32..3, arity)) -> Monomial {
        Monomial(exps)
    }
}

fn arb_poly(ring: Arc<Ring>) -> impl Strategy<Value = Poly> {
    let arity = ring.arity();
    prop::collection::vec((arb_mono(arity), -5i64..=5), 0..4).prop_map(move |terms| {
        Poly::from_terms(
            &ring,
            terms
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(m, c)| (m, coeff_int(c))),
        )
    })
}

proptest! {
    #[test]
    fn ring_axioms(
        p in arb_poly(ring3()),
        q in arb_poly(ring3()),
        r in arb_poly(ring3()),
    ) {
        prop_assert_eq!(p.add(&q), q.add(&p));
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.add(&q).add(&r), p.add(&q.add(&r)));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
    }

    #[test]
    fn parse_format_roundtrip(p in arb_poly(ring3())) {
        let text = p.to_string();
        prop_assert_eq!(Poly::parse(&ring3(), &text).unwrap(), p);
    }

    #[test]
    fn substitution_composes(
        p in arb_poly(ring3()),
        img_a in arb_poly(ring2()),
        img_b in arb_poly(ring2()),
        img_c in arb_poly(ring2()),
        img_u in arb_poly(ring3()),
        img_v in arb_poly(ring3()),
    ) {
        let m1 = RingMap::new(ring3(), ring2(), vec![img_a, img_b, img_c]).unwrap();
        let m2 = RingMap::new(ring2(), ring3(), vec![img_u, img_v]).unwrap();
        let lhs = p.substitute(&m1).unwrap().substitute(&m2).unwrap();
        let rhs = p.substitute(&m1.then(&m2).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitute_is_ring_homomorphism(
        p in arb_poly(ring3()),
        q in arb_poly(ring3()),
        img_a in arb_poly(ring2()),
        img_b in arb_poly(ring2()),
        img_c in arb_poly(ring2()),
    ) {
        let m = RingMap::new(ring3(), ring2(), vec![img_a, img_b, img_c]).unwrap();
        prop_assert_eq!(
            p.add(&q).substitute(&m).unwrap(),
            p.substitute(&m).unwrap().add(&q.substitute(&m).unwrap())
        );
        prop_assert_eq!(
            p.mul(&q).substitute(&m).unwrap(),
            p.substitute(&m).unwrap().mul(&q.substitute(&m).unwrap())
        );
    }

    #[test]
    fn base_change_is_multiplicative(
        entries_a in prop::collection::vec(arb_poly(ring3()), 4),
        entries_b in prop::collection::vec(arb_poly(ring3()), 4),
        img_a in arb_poly(ring2()),
        img_b in arb_poly(ring2()),
        img_c in arb_poly(ring2()),
    ) {
        let m = RingMap::new(ring3(), ring2(), vec![img_a, img_b, img_c]).unwrap();
        let mk = |es: Vec<Poly>| {
            PolyMatrix::from_entries(
                &ring3(),
                2,
                2,
                es.into_iter()
                    .enumerate()
                    .map(|(i, p)| (i / 2, i % 2, p)),
            )
            .unwrap()
        };
        let a = mk(entries_a);
        let b = mk(entries_b);
        let lhs = a.compose(&b).unwrap().base_change(&m).unwrap();
        let rhs = a.base_change(&m).unwrap().compose(&b.base_change(&m).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hom_diff_squares_to_zero(
        a in arb_poly(ring3()),
        b in arb_poly(ring3()),
        f1 in arb_poly(ring3()),
        f2 in arb_poly(ring3()),
        odd in any::<bool>(),
    ) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let m = MatrixFactorization::koszul_pair(&a, &b).unwrap();
        let n = MatrixFactorization::koszul_pair(&b, &a).unwrap();
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let f = MFMorphism::new(
            m,
            n,
            parity,
            PolyMatrix::from_entries(&ring3(), 1, 1, [(0, 0, f1)]).unwrap(),
            PolyMatrix::from_entries(&ring3(), 1, 1, [(0, 0, f2)]).unwrap(),
        )
        .unwrap();
        prop_assert!(f.hom_diff().unwrap().hom_diff().unwrap().is_zero());
    }

    #[test]
    fn tensor_adds_potentials_and_validates(
        a in arb_poly(ring3()),
        b in arb_poly(ring3()),
        c in arb_poly(ring3()),
        e in arb_poly(ring3()),
    ) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero() && !e.is_zero());
        let m = MatrixFactorization::koszul_pair(&a, &b).unwrap();
        let n = MatrixFactorization::koszul_pair(&c, &e).unwrap();
        let t = m.tensor(&n).unwrap();
        prop_assert_eq!(t.potential().clone(), a.mul(&b).add(&c.mul(&e)));
        prop_assert!(t.validate().is_ok());
    }

    #[test]
    fn restrict_scalars_multiplicative_on_square_root(
        p in arb_poly(Ring::new(vec!["x".into()]).unwrap()),
        q in arb_poly(Ring::new(vec!["x".into()]).unwrap()),
    ) {
        let rx = Ring::new(vec!["x".into()]).unwrap();
        let ru = Ring::new(vec!["u".into()]).unwrap();
        let phi = RingMap::new(ru, rx.clone(), vec![Poly::parse(&rx, "x^2").unwrap()]).unwrap();
        let basis = vec![Monomial::one(1), Monomial::var(1, 0)];
        let a = PolyMatrix::from_entries(&rx, 1, 1, [(0, 0, p.clone())]).unwrap();
        let b = PolyMatrix::from_entries(&rx, 1, 1, [(0, 0, q.clone())]).unwrap();
        let lhs = a
            .restrict_scalars(&phi, &basis)
            .unwrap()
            .compose(&b.restrict_scalars(&phi, &basis).unwrap())
            .unwrap();
        let rhs = a
            .compose(&b)
            .unwrap()
            .restrict_scalars(&phi, &basis)
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
