//! Property tests for the Witt, Cartier, parser and oracle invariants.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use wittlab::algebra::{FElem, Field, TruncRing};
use wittlab::cartier::{FunctionField, OneForm};
use wittlab::cli::execute;
use wittlab::milnor::{rewrite_basic, RewriteOptions, SymbolSum};
use wittlab::oracle::KPresentation;
use wittlab::witt::{LogSign, WittRing, WittVector};

fn rational(n: i64, d: i64) -> FElem {
    Field::rationals()
        .from_rational(&BigRational::new(BigInt::from(n), BigInt::from(d)))
        .unwrap()
}

fn coords() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-5i64..=5, 1i64..=4), 1..=6)
}

fn vector(c: &[(i64, i64)]) -> WittVector<FElem> {
    WittVector::full(c.iter().map(|&(n, d)| rational(n, d)).collect())
}

fn same_len(a: &[(i64, i64)], b: &[(i64, i64)]) -> (Vec<(i64, i64)>, Vec<(i64, i64)>) {
    let m = a.len().min(b.len());
    (a[..m].to_vec(), b[..m].to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ghost_is_additive_and_multiplicative(a in coords(), b in coords()) {
        let q = Field::rationals();
        let w = WittRing::new(q.clone());
        let (a, b) = same_len(&a, &b);
        let (x, y) = (vector(&a), vector(&b));
        let (gx, gy) = (w.ghost(&x), w.ghost(&y));
        let gs = w.ghost(&w.add(&x, &y).unwrap());
        let gp = w.ghost(&w.mul(&x, &y).unwrap());
        for i in 0..gx.len() {
            prop_assert_eq!(&gs[i], &q.add(&gx[i], &gy[i]));
            prop_assert_eq!(&gp[i], &q.mul(&gx[i], &gy[i]));
        }
    }

    #[test]
    fn series_round_trip_over_finite_fields(p in prop::sample::select(vec![2u64, 3, 5, 7]), raw in prop::collection::vec(0i64..49, 1..=8)) {
        let k = Field::prime(p).unwrap();
        let w = WittRing::new(k.clone());
        let x = WittVector::full(raw.iter().map(|&c| k.from_int(c)).collect());
        let s = w.to_series(&x).unwrap();
        prop_assert_eq!(w.from_series(&s, raw.len()).unwrap(), x);
    }

    #[test]
    fn subtraction_inverts_addition(a in coords(), b in coords()) {
        let w = WittRing::new(Field::rationals());
        let (a, b) = same_len(&a, &b);
        let (x, y) = (vector(&a), vector(&b));
        prop_assert_eq!(w.sub(&w.add(&x, &y).unwrap(), &y).unwrap(), x);
    }

    #[test]
    fn exp_inverts_log(a in coords(), classical in any::<bool>()) {
        let q = Field::rationals();
        let w = WittRing::new(q.clone());
        let x = vector(&a);
        let m = a.len();
        let u = w.to_series(&x).unwrap();
        let sign = if classical { LogSign::Classical } else { LogSign::Printed };
        let l = w.formal_log(&u, m, sign).unwrap();
        prop_assert_eq!(w.formal_exp(&l, m, sign).unwrap(), u);
    }

    #[test]
    fn cartier_undoes_its_inverse(
        p in prop::sample::select(vec![2u64, 3, 5]),
        num in prop::collection::vec(0i64..5, 1..=5),
        den in prop::collection::vec(0i64..5, 0..=2),
        s in 1usize..=2,
    ) {
        let k = Field::prime(p).unwrap();
        let ff = FunctionField::over(&k).unwrap();
        let mut den: Vec<FElem> = den.iter().map(|&c| k.from_int(c)).collect();
        den.push(k.one());
        let f = ff.field.frac(num.iter().map(|&c| k.from_int(c)).collect(), den).unwrap();
        let w = OneForm(f);
        prop_assert_eq!(ff.cartier_iter(&ff.inverse_cartier_iter(&w, s), s).unwrap(), w);
    }

    #[test]
    fn printed_witt_vectors_reparse(a in coords()) {
        let m = a.len().to_string();
        let lit = vector(&a);
        let w = WittRing::new(Field::rationals());
        let text = w.format(&lit);
        let out = execute(["wittlab", "witt", "coords", &format!("({text})"), "--m", &m, "--ring", "QQ"]);
        prop_assert_eq!(out.exit, 0, "{}", out.stderr);
        prop_assert_eq!(out.stdout.lines().next().unwrap(), text);
    }
}

fn small_ring(q: u64, m: usize) -> TruncRing {
    let k = match q {
        4 => Field::galois(2, 2).unwrap(),
        _ => Field::prime(q).unwrap(),
    };
    TruncRing::new(k, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rewriting_preserves_oracle_classes(
        q in prop::sample::select(vec![2u64, 3, 4]),
        m in 1usize..=2,
        n in 1usize..=2,
        picks in prop::collection::vec((prop::collection::vec(any::<prop::sample::Index>(), 2), -2i64..=2), 1..=4),
        steinberg_only in any::<bool>(),
    ) {
        let ring = small_ring(q, m);
        prop_assume!(ring.units().len().pow(n as u32) <= 2_000);
        let units = ring.units();
        let pres = KPresentation::new(&ring, n).unwrap();
        let terms = picks.iter().map(|(idx, c)| (idx[..n].iter().map(|i| i.get(&units).clone()).collect::<Vec<_>>(), *c));
        let s = SymbolSum::from_terms(n, terms).unwrap();
        let r = rewrite_basic(&ring, &s, RewriteOptions { steinberg_only });
        prop_assert_eq!(pres.class_coords(&s).unwrap(), pres.class_coords(&r).unwrap());
    }
}
