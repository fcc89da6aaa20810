//! Big Witt vectors over Q checked against naive rational series arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wittlab::algebra::{FElem, Field};
use wittlab::witt::{LogSign, WittRing, WittVector};

type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn mul(a: &[Q], b: &[Q], m: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); m + 1];
    for (i, x) in a.iter().enumerate().take(m + 1) {
        for (j, y) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn inverse(a: &[Q], m: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); m + 1];
    out[0] = a[0].recip();
    for n in 1..=m {
        let mut acc = Q::zero();
        for k in 1..=n.min(a.len() - 1) {
            acc += &a[k] * &out[n - k];
        }
        out[n] = -acc * &out[0];
    }
    out
}

/// `prod_i (1 - a_i t^i)`.
fn product_series(coords: &[Q], m: usize) -> Vec<Q> {
    let mut acc = vec![Q::zero(); m + 1];
    acc[0] = Q::one();
    for (i, a) in coords.iter().enumerate() {
        let mut f = vec![Q::zero(); m + 1];
        f[0] = Q::one();
        f[i + 1] = -a.clone();
        acc = mul(&acc, &f, m);
    }
    acc
}

/// `-t u'/u`, whose coefficients are the ghost components.
fn ghost_by_derivative(u: &[Q], m: usize) -> Vec<Q> {
    let du: Vec<Q> = (0..=m).map(|n| if n == 0 { Q::zero() } else { &u[n] * BigInt::from(n) }).collect();
    let r = mul(&du, &inverse(u, m), m);
    r.iter().skip(1).map(|c| -c.clone()).collect()
}

fn ghost_by_divisors(coords: &[Q]) -> Vec<Q> {
    let m = coords.len();
    (1..=m)
        .map(|n| {
            (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| num_traits::pow(coords[d - 1].clone(), n / d) * BigInt::from(d))
                .fold(Q::zero(), |a, b| a + b)
        })
        .collect()
}

/// `log u` by `sum (-1)^(k+1) (u-1)^k / k`.
fn log_series(u: &[Q], m: usize) -> Vec<Q> {
    let mut g = u.to_vec();
    g[0] = Q::zero();
    let mut power = g.clone();
    let mut out = vec![Q::zero(); m + 1];
    for k in 1..=m {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        for n in 0..=m {
            out[n] += &power[n] * q(sign, k as i64);
        }
        power = mul(&power, &g, m);
    }
    out
}

struct Fixture {
    field: Field,
    w: WittRing<Field>,
}

impl Fixture {
    fn new() -> Self {
        let field = Field::rationals();
        Fixture { w: WittRing::new(field.clone()), field }
    }

    fn elem(&self, a: &Q) -> FElem {
        self.field.from_rational(a).unwrap()
    }

    fn rat(&self, a: &FElem) -> Q {
        self.field.as_rational(a).unwrap()
    }

    fn vector(&self, coords: &[Q]) -> WittVector<FElem> {
        WittVector::full(coords.iter().map(|c| self.elem(c)).collect())
    }

    fn rats(&self, v: &[FElem]) -> Vec<Q> {
        v.iter().map(|c| self.rat(c)).collect()
    }
}

fn random_coords(rng: &mut ChaCha8Rng, m: usize) -> Vec<Q> {
    (0..m).map(|_| q(rng.gen_range(-4..=4), rng.gen_range(1..=3))).collect()
}

#[test]
fn series_is_product_of_binomials() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in 1..=7 {
        let coords = random_coords(&mut rng, m);
        let series = fx.w.to_series(&fx.vector(&coords)).unwrap();
        assert_eq!(fx.rats(&series), product_series(&coords, m));
        let back = fx.w.from_series(&series, m).unwrap();
        assert_eq!(fx.rats(&back.coords), coords);
    }
}

#[test]
fn ghost_agrees_with_both_oracles() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in 1..=7 {
        let coords = random_coords(&mut rng, m);
        let ghost = fx.rats(&fx.w.ghost(&fx.vector(&coords)));
        assert_eq!(ghost, ghost_by_divisors(&coords));
        assert_eq!(ghost, ghost_by_derivative(&product_series(&coords, m), m));
    }
}

#[test]
fn addition_and_multiplication_are_ghostwise() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in 1..=6 {
        let a = random_coords(&mut rng, m);
        let b = random_coords(&mut rng, m);
        let (ga, gb) = (ghost_by_divisors(&a), ghost_by_divisors(&b));
        let sum = fx.w.add(&fx.vector(&a), &fx.vector(&b)).unwrap();
        let prod = fx.w.mul(&fx.vector(&a), &fx.vector(&b)).unwrap();
        let want_sum: Vec<Q> = ga.iter().zip(&gb).map(|(x, y)| x + y).collect();
        let want_prod: Vec<Q> = ga.iter().zip(&gb).map(|(x, y)| x * y).collect();
        assert_eq!(ghost_by_divisors(&fx.rats(&sum.coords)), want_sum);
        assert_eq!(ghost_by_divisors(&fx.rats(&prod.coords)), want_prod);
        let sum_series = fx.rats(&fx.w.to_series(&sum).unwrap());
        assert_eq!(sum_series, mul(&product_series(&a, m), &product_series(&b, m), m));
    }
}

#[test]
fn product_of_single_binomials() {
    let fx = Fixture::new();
    // (1 - a t^r) * (1 - b t^s) = (1 - a^(s/g) b^(r/g) t^(rs/g))^g
    for (r, s, a, b) in [(2, 3, 2, 3), (2, 4, 2, 3), (3, 3, -1, 2), (1, 5, 3, 1), (4, 6, 1, -1)] {
        let g = num_integer::gcd(r, s);
        let l = r * s / g;
        let m = 2 * l;
        let mut x = vec![Q::zero(); m];
        x[r - 1] = q(a, 1);
        let mut y = vec![Q::zero(); m];
        y[s - 1] = q(b, 1);
        let prod = fx.w.mul(&fx.vector(&x), &fx.vector(&y)).unwrap();
        let c = num_traits::pow(q(a, 1), s / g) * num_traits::pow(q(b, 1), r / g);
        let mut bin = vec![Q::zero(); m + 1];
        bin[0] = Q::one();
        bin[l] = -c;
        let mut want = vec![Q::zero(); m + 1];
        want[0] = Q::one();
        for _ in 0..g {
            want = mul(&want, &bin, m);
        }
        assert_eq!(fx.rats(&fx.w.to_series(&prod).unwrap()), want, "r={r} s={s}");
    }
}

#[test]
fn teichmuller_is_linear_series() {
    let fx = Fixture::new();
    for a in [q(3, 1), q(-2, 5), q(0, 1)] {
        let t = fx.w.teichmuller(&fx.elem(&a), 5);
        let mut want = vec![Q::zero(); 6];
        want[0] = Q::one();
        want[1] = -a.clone();
        assert_eq!(fx.rats(&fx.w.to_series(&t).unwrap()), want);
        let ghost = ghost_by_divisors(&fx.rats(&t.coords));
        let powers: Vec<Q> = (1..=5).map(|n| num_traits::pow(a.clone(), n)).collect();
        assert_eq!(ghost, powers);
    }
}

#[test]
fn frobenius_and_verschiebung_on_ghosts() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for r in 1..=3 {
        for m in 1..=4 {
            let x = random_coords(&mut rng, m);
            let gx = ghost_by_divisors(&x);
            let v = fx.w.verschiebung_natural(r, &fx.vector(&x)).unwrap();
            let gv = ghost_by_divisors(&fx.rats(&v.coords));
            for (i, g) in gv.iter().enumerate() {
                let n = i + 1;
                let want = if n % r == 0 { &gx[n / r - 1] * BigInt::from(r) } else { Q::zero() };
                assert_eq!(*g, want, "V_{r} ghost {n}");
            }
            let big = random_coords(&mut rng, r * m + r - 1);
            let gbig = ghost_by_divisors(&big);
            let f = fx.w.frobenius(r, &fx.vector(&big)).unwrap();
            let gf = ghost_by_divisors(&fx.rats(&f.coords));
            assert_eq!(gf.len(), m);
            for (i, g) in gf.iter().enumerate() {
                assert_eq!(*g, gbig[r * (i + 1) - 1], "F_{r} ghost {}", i + 1);
            }
        }
    }
}

#[test]
fn log_matches_classical_series_and_exp_inverts() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in 1..=8 {
        let coords = random_coords(&mut rng, m);
        let u = product_series(&coords, m);
        let felems: Vec<FElem> = u.iter().map(|c| fx.elem(c)).collect();
        let classical = fx.w.formal_log(&felems, m, LogSign::Classical).unwrap();
        let want = log_series(&u, m);
        assert_eq!(fx.rats(&classical), want);
        let printed = fx.w.formal_log(&felems, m, LogSign::Printed).unwrap();
        let negated: Vec<Q> = want.iter().map(|c| -c.clone()).collect();
        assert_eq!(fx.rats(&printed), negated);
        for sign in [LogSign::Classical, LogSign::Printed] {
            let l = fx.w.formal_log(&felems, m, sign).unwrap();
            assert_eq!(fx.rats(&fx.w.formal_exp(&l, m, sign).unwrap()), u);
        }
    }
}

#[test]
fn log_rejects_non_one_units() {
    let fx = Fixture::new();
    let u = vec![fx.elem(&q(2, 1)), fx.elem(&q(1, 1))];
    assert!(fx.w.formal_log(&u, 1, LogSign::Printed).is_err());
}
