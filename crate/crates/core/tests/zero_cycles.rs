//! `log_n` on the symbols of rational points over `Q(x)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wittlab::algebra::{FElem, Field, TruncRing};
use wittlab::bloch::{log_n, phi_rational, ClosedPointCycle};
use wittlab::drw::{DrwElement, DrwSpace};
use wittlab::witt::WittRing;

fn qx() -> (Field, Field) {
    let q = Field::rationals();
    let k = Field::rat_fun(&q, "x");
    (q, k)
}

fn small_poly(q: &Field, rng: &mut ChaCha8Rng, deg: usize) -> Vec<FElem> {
    let mut c: Vec<FElem> = (0..=deg).map(|_| q.from_int(rng.gen_range(-3..=3))).collect();
    if q.is_zero(&c[deg]) {
        c[deg] = q.one();
    }
    c
}

fn random_function(q: &Field, k: &Field, rng: &mut ChaCha8Rng) -> FElem {
    let (dn, dd) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
    let num = small_poly(q, rng, dn);
    let den = small_poly(q, rng, dd);
    k.frac(num, den).unwrap()
}

fn expected(space: &DrwSpace, k: &Field, tuple: &[FElem], m: usize) -> DrwElement {
    let w = WittRing::new(k.clone()).teichmuller(&k.inv(&tuple[0]).unwrap(), m);
    space.con(&w, &tuple[1..]).unwrap()
}

fn log_of_point(k: &Field, tuple: &[FElem], m: usize) -> DrwElement {
    let ring = TruncRing::new(k.clone(), m);
    let p = ClosedPointCycle::rational(k, tuple.to_vec(), 1).unwrap();
    log_n(&ring, &phi_rational(&ring, &p).unwrap()).unwrap()
}

#[test]
fn round_trip_for_constant_coordinates() {
    let (q, k) = qx();
    let space = DrwSpace::new(k.clone()).unwrap();
    for m in 1..=4 {
        for t in [vec![2i64, 3], vec![-3, 5, 7], vec![5]] {
            let tuple: Vec<FElem> = t.iter().map(|&c| k.embed_base(&q.from_int(c))).collect();
            assert_eq!(log_of_point(&k, &tuple, m), expected(&space, &k, &tuple, m), "m = {m}, {t:?}");
        }
    }
}

#[test]
fn defect_at_length_two() {
    // {1 - t/a, b - a t} = {1 - t/a, b} + {1 - t/a, 1 - (a/b) t}, and the
    // second symbol puts db / (2 b^2) - da / (a b) in the t^2 slot
    let (_, k) = qx();
    let space = DrwSpace::new(k.clone()).unwrap();
    let x = k.generator().unwrap();
    let (zero, one, two) = (k.zero(), k.one(), k.from_int(2));
    let cases = [
        (k.from_int(2), zero.clone(), x.clone(), one.clone()),
        (k.from_int(-5), zero.clone(), k.add(&x, &k.from_int(3)), one.clone()),
        (k.from_int(3), zero.clone(), k.mul(&x, &x), k.mul(&two, &x)),
        (k.mul(&two, &x), two.clone(), x.clone(), one.clone()),
        (k.add(&x, &one), one.clone(), k.from_int(4), zero.clone()),
    ];
    for (a, da, b, db) in cases {
        let tuple = vec![a.clone(), b.clone()];
        let got = log_of_point(&k, &tuple, 2);
        let want = expected(&space, &k, &tuple, 2);
        let diff = space.add(&got, &space.neg(&want)).unwrap();
        assert!(diff.slot(1).is_zero());
        let first = k.div(&db, &k.mul(&two, &k.mul(&b, &b))).unwrap();
        let second = k.div(&da, &k.mul(&a, &b)).unwrap();
        let coef = k.sub(&first, &second);
        assert_eq!(diff.slot(2), &space.forms.monomial(coef, &[0]), "a = {}, b = {}", k.format(&a), k.format(&b));
    }
}

#[test]
fn round_trip_on_random_points() {
    let (q, k) = qx();
    let space = DrwSpace::new(k.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut failures = Vec::new();
    let mut tried = 0;
    while tried < 100 {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=4);
        let tuple: Vec<FElem> = (0..n).map(|_| random_function(&q, &k, &mut rng)).collect();
        if k.is_zero(&tuple[0]) || tuple[1..].iter().any(|b| k.is_zero(b) || k.is_one(b)) {
            continue;
        }
        tried += 1;
        if log_of_point(&k, &tuple, m) != expected(&space, &k, &tuple, m) {
            let shown: Vec<String> = tuple.iter().map(|c| k.format(c)).collect();
            failures.push(format!("m = {m}, ({})", shown.join(", ")));
        }
    }
    assert!(failures.is_empty(), "{} of 100 points differ, first: {}", failures.len(), failures[0]);
}
