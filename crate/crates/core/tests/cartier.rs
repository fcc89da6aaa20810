//! Cartier operators on F_p(x) against the monomial rule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wittlab::algebra::{FElem, Field};
use wittlab::cartier::{FunctionField, OneForm};

fn function_field(p: u64) -> FunctionField {
    FunctionField::over(&Field::prime(p).unwrap()).unwrap()
}

fn poly(ff: &FunctionField, coeffs: &[i64]) -> FElem {
    let k = &ff.constants;
    ff.field
        .frac(coeffs.iter().map(|&c| k.from_int(c)).collect(), vec![k.one()])
        .unwrap()
}

/// `C(sum a_j x^j dx) = sum_{j = kp - 1} a_j x^(k-1) dx` over a prime field.
fn cartier_of_poly(p: usize, coeffs: &[i64]) -> Vec<i64> {
    let mut out = vec![0; coeffs.len() / p + 1];
    for (j, &a) in coeffs.iter().enumerate() {
        if (j + 1) % p == 0 {
            out[(j + 1) / p - 1] = a;
        }
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, p: u64, deg: usize) -> Vec<i64> {
    (0..=deg).map(|_| rng.gen_range(0..p as i64)).collect()
}

#[test]
fn cartier_on_polynomial_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [2u64, 3, 5, 7] {
        let ff = function_field(p);
        for _ in 0..10 {
            let deg = rng.gen_range(0..4 * p as usize);
            let f = random_poly(&mut rng, p, deg);
            let got = ff.cartier(&OneForm(poly(&ff, &f))).unwrap();
            assert_eq!(got.0, poly(&ff, &cartier_of_poly(p as usize, &f)), "p={p} f={f:?}");
        }
    }
}

#[test]
fn cartier_fixes_logarithmic_forms_and_kills_exact_ones() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [2u64, 3, 5] {
        let ff = function_field(p);
        for _ in 0..8 {
            let deg = rng.gen_range(1..5);
            let mut g = random_poly(&mut rng, p, deg);
            *g.last_mut().unwrap() = 1;
            let g = poly(&ff, &g);
            let dlog = OneForm(ff.field.div(&ff.derivative(&g), &g).unwrap());
            assert_eq!(ff.cartier(&dlog).unwrap(), dlog);
            let h = ff.field.div(&poly(&ff, &random_poly(&mut rng, p, 3)), &g).unwrap();
            assert!(ff.is_zero(&ff.cartier(&ff.d(&h)).unwrap()));
        }
    }
}

#[test]
fn inverse_cartier_is_a_section() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in [2u64, 3, 5] {
        let ff = function_field(p);
        for s in 1..=2 {
            let num = poly(&ff, &random_poly(&mut rng, p, 3));
            let mut den = random_poly(&mut rng, p, 2);
            *den.last_mut().unwrap() = 1;
            let w = OneForm(ff.field.div(&num, &poly(&ff, &den)).unwrap());
            let up = ff.inverse_cartier_iter(&w, s);
            assert_eq!(ff.cartier_iter(&up, s).unwrap(), w, "p={p} s={s}");
        }
    }
}

#[test]
fn antiderivative_of_exact_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for p in [3u64, 5, 7] {
        let ff = function_field(p);
        for _ in 0..6 {
            let h = poly(&ff, &random_poly(&mut rng, p, 2 * p as usize));
            let w = ff.d(&h);
            let g = ff.antiderivative(&w).unwrap();
            assert_eq!(ff.d(&g), w);
        }
        let x = ff.x();
        let not_exact = OneForm(ff.field.pow(&x, p - 1));
        assert!(ff.antiderivative(&not_exact).is_err());
    }
}

#[test]
fn decomposition_reassembles() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for p in [2u64, 3, 5] {
        let ff = function_field(p);
        for _ in 0..6 {
            let num = poly(&ff, &random_poly(&mut rng, p, 6));
            let mut den = random_poly(&mut rng, p, 2);
            *den.last_mut().unwrap() = 1;
            let f = ff.field.div(&num, &poly(&ff, &den)).unwrap();
            let dec = ff.p_decompose(&f).unwrap();
            assert_eq!(dec.components.len(), p as usize);
            assert_eq!(ff.reassemble(&dec), f);
        }
    }
}

#[test]
fn rejects_characteristic_zero() {
    assert!(FunctionField::over(&Field::rationals()).is_err());
}
