//! Brute-force checks of the finite K-group presentations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wittlab::algebra::{CommRing, Field, TElem, TruncRing, UnitRing};
use wittlab::milnor::SymbolSum;
use wittlab::oracle::presentation::KPresentation;
use wittlab::oracle::units::UnitGroup;

fn ring(q: u64, m: usize) -> TruncRing {
    let (p, d) = match q {
        4 => (2, 2),
        8 => (2, 3),
        9 => (3, 2),
        _ => (q, 1),
    };
    TruncRing::new(Field::galois(p, d).unwrap(), m)
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|d| n % d == 0).collect()
}

#[test]
fn unit_group_matches_torsion_counts() {
    for (q, m) in [(2, 0), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (5, 1), (7, 1), (9, 1)] {
        let r = ring(q, m);
        let units = r.units();
        let n = units.len();
        assert_eq!(n as u64, (q - 1) * q.pow(m as u32));
        let g = UnitGroup::new(&r).unwrap();
        assert_eq!(g.order(), n);
        let orders: Vec<usize> = g.orders.iter().map(|e| e.to_usize().unwrap()).collect();
        for w in orders.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        for d in divisors(n) {
            let brute = units.iter().filter(|u| r.is_one(&r.pow(u, d as u64))).count();
            let from_factors: usize = orders.iter().map(|e| e.gcd(&d)).product();
            assert_eq!(brute, from_factors, "q={q} m={m} d={d}");
        }
    }
}

#[test]
fn k1_is_the_unit_group() {
    for (q, m) in [(2, 2), (3, 1), (4, 1), (5, 2)] {
        let r = ring(q, m);
        let k1 = KPresentation::new(&r, 1).unwrap();
        assert!(k1.verify_snf());
        let g = UnitGroup::new(&r).unwrap();
        assert_eq!(k1.invariant_factors(), g.orders);
    }
}

#[test]
fn k2_of_finite_fields_vanishes() {
    for q in [2, 3, 4, 5, 7, 8, 9] {
        let k2 = KPresentation::new(&ring(q, 0), 2).unwrap();
        assert!(k2.verify_snf());
        assert!(k2.group_order().is_one(), "K2(F_{q})");
    }
}

#[test]
fn relative_k2_vanishes_in_odd_characteristic() {
    for (q, m) in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (9, 1)] {
        let k2 = KPresentation::new(&ring(q, m), 2).unwrap();
        assert!(k2.group_order().is_one(), "q={q} m={m}");
    }
}

#[test]
fn relative_part_is_everything_when_the_field_part_vanishes() {
    for (q, m) in [(2, 1), (2, 2), (4, 1)] {
        let k2 = KPresentation::new(&ring(q, m), 2).unwrap();
        let rel = k2.relative_subgroup().unwrap();
        assert_eq!(rel.invariant_factors, k2.invariant_factors());
    }
}

fn class_is_zero(k: &KPresentation, s: &SymbolSum<TElem>) -> bool {
    k.class_coords(s).unwrap().is_zero()
}

#[test]
fn symbol_relations_hold_in_the_presentation() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (q, m) in [(2, 1), (2, 2), (3, 1), (4, 1), (5, 1)] {
        let r = ring(q, m);
        let k = KPresentation::new(&r, 2).unwrap();
        let units = r.units();
        let one = r.one();
        for _ in 0..40 {
            let a = units.choose(&mut rng).unwrap().clone();
            let b = units.choose(&mut rng).unwrap().clone();
            let c = units.choose(&mut rng).unwrap().clone();
            if q > 2 {
                let antisym =
                    SymbolSum::from_terms(2, [(vec![a.clone(), b.clone()], 1), (vec![b.clone(), a.clone()], 1)]).unwrap();
                assert!(class_is_zero(&k, &antisym));
                let minus = SymbolSum::single(vec![a.clone(), r.neg(&a)]);
                assert!(class_is_zero(&k, &minus));
            }
            let lin = SymbolSum::from_terms(
                2,
                [(vec![r.mul(&a, &b), c.clone()], 1), (vec![a.clone(), c.clone()], -1), (vec![b.clone(), c.clone()], -1)],
            )
            .unwrap();
            assert!(class_is_zero(&k, &lin));
            let one_minus = r.sub(&one, &a);
            if r.is_unit(&one_minus) {
                assert!(class_is_zero(&k, &SymbolSum::single(vec![a.clone(), one_minus])));
            }
        }
        let order = k.group_order();
        if order > BigInt::one() {
            let any_nonzero = units.iter().any(|a| {
                units.iter().any(|b| !class_is_zero(&k, &SymbolSum::single(vec![a.clone(), b.clone()])))
            });
            assert!(any_nonzero, "q={q} m={m}: nontrivial group without nonzero symbols");
        }
    }
}

/// Over `F_2[t]/t^2` the unit `1 + t` has no unit `1 - u` partner, so
/// `{1 + t, -(1 + t)}` survives.
#[test]
fn square_symbol_survives_over_f2() {
    let r = ring(2, 1);
    let k = KPresentation::new(&r, 2).unwrap();
    let u = r.add(&r.one(), &r.t());
    assert!(!class_is_zero(&k, &SymbolSum::single(vec![u.clone(), u])));
    assert_eq!(k.invariant_factors(), vec![BigInt::from(2)]);
}

/// Over `F_2[t]/t^3` no unit `u` has `1 - u` a unit, so the group is
/// `Z/4 (x) Z/4` and `{a, b} + {b, a} = 2 (a (x) b)`.
#[test]
fn antisymmetry_fails_without_steinberg_pairs() {
    let r = ring(2, 2);
    let units = r.units();
    assert!(units.iter().all(|u| !r.is_unit(&r.sub(&r.one(), u))));
    let k = KPresentation::new(&r, 2).unwrap();
    assert_eq!(k.invariant_factors(), vec![BigInt::from(4)]);
    let u = r.add(&r.one(), &r.t());
    let twice = SymbolSum::from_terms(2, [(vec![u.clone(), u.clone()], 2)]).unwrap();
    assert!(!class_is_zero(&k, &twice));
}

#[test]
fn rejects_infinite_rings() {
    let r = TruncRing::new(Field::rationals(), 1);
    assert!(UnitGroup::new(&r).is_err());
}
