//! Randomized invariants of the exact-arithmetic layer and of the engine.

use proptest::prelude::*;

use singular_tr::curve::{load_curve, to_json, BranchPoint, Component, SpectralCurveLocal};
use singular_tr::exactnum::{format_rational, int, parse_rational, rat, CycloNumber, PuiseuxSeries, Rational};
use singular_tr::recursion::{run, EngineOptions};

const ORDERS: [u32; 7] = [1, 2, 3, 4, 5, 6, 12];

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn cyclo(order: u32) -> impl Strategy<Value = CycloNumber> {
    prop::collection::vec(small_rat(), 0..=order as usize).prop_map(move |p| CycloNumber::from_poly(order, p))
}

fn cyclo_triple() -> impl Strategy<Value = (CycloNumber, CycloNumber, CycloNumber)> {
    prop::sample::select(ORDERS.to_vec()).prop_flat_map(|l| (cyclo(l), cyclo(l), cyclo(l)))
}

fn coprime_to(l: u32) -> impl Strategy<Value = i64> {
    (1..=l.max(2) as i64 * 3).prop_filter("coprime", move |c| num_integer::gcd(*c, l as i64) == 1)
}

proptest! {
    #[test]
    fn ring_axioms((a, b, c) in cyclo_triple()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &CycloNumber::one(a.order()), a.clone());
    }

    #[test]
    fn inverse((a, _, _) in cyclo_triple()) {
        prop_assume!(!a.is_zero());
        let inv = a.inv().unwrap();
        prop_assert_eq!(&a * &inv, CycloNumber::one(a.order()));
    }

    #[test]
    fn galois_is_a_field_automorphism(
        (l, a, b, k) in prop::sample::select(ORDERS.to_vec())
            .prop_flat_map(|l| (Just(l), cyclo(l), cyclo(l), coprime_to(l)))
    ) {
        prop_assert_eq!((&a * &b).galois(k), &a.galois(k) * &b.galois(k));
        prop_assert_eq!((&a + &b).galois(k), &a.galois(k) + &b.galois(k));
        prop_assert_eq!(CycloNumber::root(l, 1).galois(k), CycloNumber::root(l, k));
        let q = CycloNumber::from_rational(l, rat(3, 7));
        prop_assert_eq!(q.galois(k), q);
    }

    #[test]
    fn trace_is_rational((l, a) in prop::sample::select(ORDERS.to_vec()).prop_flat_map(|l| (Just(l), cyclo(l)))) {
        let mut tr = CycloNumber::zero(l);
        for k in 1..=l as i64 {
            if num_integer::gcd(k, l as i64) == 1 {
                tr = &tr + &a.galois(k);
            }
        }
        prop_assert!(tr.is_rational());
    }

    #[test]
    fn roots_of_unity(l in prop::sample::select(ORDERS.to_vec()), a in -20i64..20, b in -20i64..20) {
        let z = |e| CycloNumber::root(l, e);
        prop_assert_eq!(&z(a) * &z(b), z(a + b));
        prop_assert_eq!(z(a).pow(l), CycloNumber::one(l));
    }

    #[test]
    fn rational_text_round_trip(q in small_rat()) {
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn series_inverse(
        denom in 1u32..=3,
        head in small_rat().prop_filter("nonzero", |q| *q != int(0)),
        v in -4i64..4,
        tail in prop::collection::vec((1i64..6, small_rat()), 0..4),
    ) {
        let field = 1;
        let mut terms = vec![(v, CycloNumber::from_rational(field, head))];
        terms.extend(tail.into_iter().map(|(e, c)| (v + e, CycloNumber::from_rational(field, c))));
        let a = PuiseuxSeries::from_terms(denom, field, terms, None);
        let target = 8;
        let inv = a.inv(target).unwrap();
        let one = a.mul(&inv).unwrap();
        prop_assert_eq!(one.coefficient(0).unwrap(), CycloNumber::one(field));
        for e in 1..one.trunc().unwrap_or(target) {
            prop_assert!(one.coefficient(e).unwrap().is_zero(), "exponent {}", e);
        }
    }

    #[test]
    fn series_product_commutes(
        xs in prop::collection::vec((-3i64..5, small_rat()), 1..5),
        ys in prop::collection::vec((-3i64..5, small_rat()), 1..5),
        ta in 5i64..9,
    ) {
        let mk = |v: &[(i64, Rational)], t| {
            PuiseuxSeries::from_terms(2, 1, v.iter().map(|(e, c)| (*e, CycloNumber::from_rational(1, c.clone()))), t)
        };
        let a = mk(&xs, Some(ta));
        let b = mk(&ys, None);
        prop_assume!(!b.is_exact_zero());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn curve_json_round_trip(r in 1u32..6, s in 1u32..7, t in small_rat(), q in small_rat(), extra in small_rat()) {
        prop_assume!(t != int(0));
        let a = Component::new(1, r, &[(s, -&t * int(r as i64)), (s + 1, extra)]).with_q(q.clone());
        let b = Component::new(2, 1, &[]).with_q(-q);
        let curve = SpectralCurveLocal::new(vec![BranchPoint::new(0, vec![a, b])], &[], true).unwrap();
        prop_assert_eq!(load_curve(&to_json(&curve)).unwrap(), curve);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// The engine works in Q(zeta_r) internally; every Galois convention
    /// must produce the same rational correlators.
    #[test]
    fn engine_galois_invariance(case in 0usize..3, k in 1i64..6, t in small_rat()) {
        let (r, s) = [(3u32, 4u32), (3, 2), (4, 5)][case];
        prop_assume!(num_integer::gcd(k, r as i64) == 1 && t != int(0));
        let curve = SpectralCurveLocal::monomial(r, s, t).unwrap();
        let base = run(&curve, 2, &EngineOptions::default()).unwrap().store;
        let twisted = run(&curve, 2, &EngineOptions { galois: k, ..EngineOptions::default() }).unwrap().store;
        prop_assert!(base.diff(&twisted).is_empty());
    }
}
