//! Symbols, d log and the pushforward of closed points.

use wittlab::algebra::{CommRing, FElem, Field, TruncRing};
use wittlab::bloch::{phi1_pushforward, phi_rational, ClosedPointCycle};
use wittlab::forms::FormSpace;
use wittlab::milnor::{dlog_k, SymbolSum};

/// `prod_i (X - c^(p^i))` over the conjugates of `c`, as base-field
/// coefficients from the constant term up.
fn conjugate_product(base: &Field, ext: &Field, c: &FElem, p: u64) -> Vec<FElem> {
    let mut conj = vec![c.clone()];
    loop {
        let next = ext.pow(conj.last().unwrap(), p);
        if next == *c {
            break;
        }
        conj.push(next);
    }
    let mut f = vec![ext.one()];
    for r in &conj {
        let mut g = vec![ext.zero(); f.len() + 1];
        for (i, a) in f.iter().enumerate() {
            g[i + 1] = ext.add(&g[i + 1], a);
            g[i] = ext.sub(&g[i], &ext.mul(a, r));
        }
        f = g;
    }
    f.iter().map(|a| ext.as_subfield(base, a).expect("coefficient in base")).collect()
}

#[test]
fn pushforward_is_normalized_minimal_polynomial() {
    for (p, d, m) in [(2u64, 2usize, 3usize), (2, 3, 4), (3, 2, 3), (5, 2, 2)] {
        let base = Field::prime(p).unwrap();
        let ext = Field::galois(p, d).unwrap();
        let ring = TruncRing::new(base.clone(), m);
        let theta = ext.generator().unwrap();
        for c in [theta.clone(), ext.add(&theta, &ext.one()), ext.mul(&theta, &theta)] {
            let f = conjugate_product(&base, &ext, &c, p);
            if f.len() != d + 1 {
                continue;
            }
            let point = ClosedPointCycle::new(&base, &ext, vec![c.clone()], 1).unwrap();
            let got = phi1_pushforward(&ring, &point).unwrap();
            let f0 = base.inv(&f[0]).unwrap();
            let want: Vec<FElem> = f.iter().map(|a| base.mul(a, &f0)).collect();
            assert_eq!(got, ring.from_poly(&want), "p={p} d={d} c={c:?}");
            let squared = ClosedPointCycle::new(&base, &ext, vec![c], 2).unwrap();
            let got2 = phi1_pushforward(&ring, &squared).unwrap();
            assert_eq!(got2, ring.mul(&got, &got));
        }
    }
}

#[test]
fn rational_points_give_the_expected_symbol() {
    let k = Field::prime(7).unwrap();
    let ring = TruncRing::new(k.clone(), 2);
    let (a, b) = (k.from_int(3), k.from_int(5));
    let point = ClosedPointCycle::rational(&k, vec![a.clone(), b.clone()], -2).unwrap();
    let s = phi_rational(&ring, &point).unwrap();
    // 1/3 = 5 mod 7
    let first = ring.from_poly(&[k.one(), k.from_int(-5)]);
    let second = ring.from_poly(&[b, k.neg(&a)]);
    let want = SymbolSum::from_terms(2, [(vec![first, second], -2)]).unwrap();
    assert_eq!(s, want);
}

#[test]
fn dlog_of_symbols_in_two_variables() {
    let base = Field::rationals();
    let k = Field::rat_fun(&Field::rat_fun(&base, "x"), "y");
    let forms = FormSpace::new(k.clone());
    let x = k.embed_base(&Field::rat_fun(&base, "x").generator().unwrap());
    let y = k.generator().unwrap();
    let xy = k.mul(&x, &y);
    let inv_xy = k.inv(&xy).unwrap();
    let dxdy = forms.monomial(inv_xy, &[0, 1]);
    assert_eq!(dlog_k(&forms, &SymbolSum::single(vec![x.clone(), y.clone()])).unwrap(), dxdy);
    let swapped = dlog_k(&forms, &SymbolSum::single(vec![y.clone(), x.clone()])).unwrap();
    assert_eq!(swapped, forms.neg(&dxdy));
    let squared = SymbolSum::single(vec![k.mul(&x, &x), y.clone()]);
    assert_eq!(dlog_k(&forms, &squared).unwrap(), forms.scale_int(2, &dxdy));
    let steinberg = SymbolSum::single(vec![x.clone(), k.sub(&k.one(), &x)]);
    assert!(dlog_k(&forms, &steinberg).unwrap().is_zero());
    let sum = SymbolSum::single(vec![k.add(&x, &y), k.sub(&x, &y)]);
    // d(x+y)/(x+y) ^ d(x-y)/(x-y) = -2 dx^dy / (x^2 - y^2)
    let den = k.sub(&k.mul(&x, &x), &k.mul(&y, &y));
    let coef = k.div(&k.from_int(-2), &den).unwrap();
    assert_eq!(dlog_k(&forms, &sum).unwrap(), forms.monomial(coef, &[0, 1]));
}
