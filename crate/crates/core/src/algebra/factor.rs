//! Polynomial factorization over finite fields and `QQ`.
//!
//! Finite fields: squarefree, distinct-degree and equal-degree splitting
//! (Cantor-Zassenhaus) driven by a seeded ChaCha stream. `QQ`: squarefree
//! parts are factored modulo a prime larger than twice the coefficient bound
//! of any integral factor, followed by subset recombination.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::error::{AlgebraError, AlgebraResult};
use super::field::{is_prime, FElem, Field, FieldKind};
use super::poly;

pub const DEFAULT_QQ_DEGREE_BOUND: usize = 8;
const SPLIT_SEED: u64 = 0x5eed_f00d;

/// Factorization `unit * prod(factor^mult)` with monic irreducible factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FElem,
    pub factors: Vec<(Vec<FElem>, usize)>,
}

impl Factorization {
    pub fn expand(&self, f: &Field) -> Vec<FElem> {
        let mut acc = poly::constant(f, self.unit.clone());
        for (g, e) in &self.factors {
            acc = poly::mul(f, &acc, &poly::pow(f, g, *e as u64));
        }
        acc
    }
}

pub fn factor(f: &Field, a: &[FElem]) -> AlgebraResult<Factorization> {
    factor_with_bound(f, a, DEFAULT_QQ_DEGREE_BOUND)
}

pub fn factor_with_bound(f: &Field, a: &[FElem], qq_bound: usize) -> AlgebraResult<Factorization> {
    if a.is_empty() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let unit = a.last().unwrap().clone();
    let mut factors = if f.is_finite() {
        factor_finite(f, &poly::monic(f, a))
    } else if matches!(f.kind(), FieldKind::Rationals) {
        let deg = a.len() - 1;
        if deg > qq_bound {
            return Err(AlgebraError::DegreeBoundExceeded {
                degree: deg,
                bound: qq_bound,
            });
        }
        factor_rational(f, &poly::monic(f, a))?
    } else {
        return Err(AlgebraError::UnsupportedField(f.to_string()));
    };
    factors.sort_by(|x, y| poly::cmp_deg_lex(&x.0, &y.0).then(x.1.cmp(&y.1)));
    Ok(Factorization { unit, factors })
}

pub fn is_irreducible(f: &Field, a: &[FElem]) -> AlgebraResult<bool> {
    if a.len() <= 1 {
        return Ok(false);
    }
    if a.len() == 2 {
        return Ok(true);
    }
    if f.is_finite() {
        let m = poly::monic(f, a);
        // Rabin's test: x^{q^n} = x mod m and gcd(x^{q^{n/r}} - x, m) = 1
        let n = m.len() - 1;
        let q = f.size_big().unwrap();
        let xpoly = poly::x(f);
        let mut frob = vec![xpoly.clone()];
        let mut h = xpoly.clone();
        for _ in 0..n {
            h = poly::pow_mod(f, &h, &q, &m);
            frob.push(h.clone());
        }
        if poly::sub(f, &frob[n], &poly::rem(f, &xpoly, &m)).len() > 0 {
            return Ok(false);
        }
        for r in prime_divisors(n as u64) {
            let k = n / r as usize;
            let diff = poly::sub(f, &frob[k], &xpoly);
            let g = poly::gcd(f, &diff, &m);
            if g.len() > 1 {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let fac = factor(f, a)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Squarefree decomposition of a monic polynomial over a finite field.
pub fn squarefree_finite(f: &Field, a: &[FElem]) -> Vec<(Vec<FElem>, usize)> {
    let p = f.characteristic();
    let mut out = Vec::new();
    if a.len() <= 1 {
        return out;
    }
    let da = poly::derivative(f, a);
    let mut c = poly::gcd(f, a, &da);
    let mut w = poly::div_exact(f, a, &c).unwrap();
    let mut i = 1;
    while w.len() > 1 {
        let y = poly::gcd(f, &w, &c);
        let fac = poly::div_exact(f, &w, &y).unwrap();
        if fac.len() > 1 {
            out.push((fac, i));
        }
        w = y;
        c = poly::div_exact(f, &c, &w).unwrap();
        i += 1;
    }
    if c.len() > 1 {
        let mut root = Vec::new();
        for (k, coef) in c.iter().enumerate() {
            if k as u64 % p == 0 {
                root.push(f.pth_root(coef).expect("finite field p-th root"));
            }
        }
        let root = poly::trim(root, f);
        for (g, e) in squarefree_finite(f, &root) {
            out.push((g, e * p as usize));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
fn distinct_degree(f: &Field, a: &[FElem]) -> Vec<(Vec<FElem>, usize)> {
    let q = f.size_big().unwrap();
    let mut out = Vec::new();
    let mut rest = a.to_vec();
    let xpoly = poly::x(f);
    let mut h = poly::rem(f, &xpoly, &rest);
    let mut d = 1;
    while rest.len() > 1 && 2 * d <= rest.len() - 1 {
        h = poly::pow_mod(f, &h, &q, &rest);
        let g = poly::gcd(f, &poly::sub(f, &h, &xpoly), &rest);
        if g.len() > 1 {
            out.push((g.clone(), d));
            rest = poly::div_exact(f, &rest, &g).unwrap();
            h = poly::rem(f, &h, &rest);
        }
        d += 1;
    }
    if rest.len() > 1 {
        let deg = rest.len() - 1;
        out.push((rest, deg));
    }
    out
}

/// Split a product of distinct irreducibles of degree `d`.
fn equal_degree(f: &Field, a: &[FElem], d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<FElem>> {
    let n = a.len() - 1;
    if n == d {
        return vec![a.to_vec()];
    }
    let q = f.size_big().unwrap();
    let p = f.characteristic();
    loop {
        let r: Vec<FElem> = (0..n).map(|_| random_coeff(f, rng)).collect();
        let r = poly::trim(r, f);
        if r.len() <= 1 {
            continue;
        }
        let b = if p == 2 {
            // trace map sum_{i < k d} r^{2^i}
            let kd = f.prime_degree().unwrap() * d;
            let mut acc = Vec::new();
            let mut term = poly::rem(f, &r, a);
            for _ in 0..kd {
                acc = poly::add(f, &acc, &term);
                term = poly::rem(f, &poly::mul(f, &term, &term), a);
            }
            acc
        } else {
            let e: BigUint = (q.pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let s = poly::pow_mod(f, &r, &e, a);
            poly::sub(f, &s, &[f.one()])
        };
        let g = poly::gcd(f, &b, a);
        if g.len() > 1 && g.len() < a.len() {
            let other = poly::div_exact(f, a, &g).unwrap();
            let mut out = equal_degree(f, &g, d, rng);
            out.extend(equal_degree(f, &other, d, rng));
            return out;
        }
    }
}

fn random_coeff(f: &Field, rng: &mut ChaCha8Rng) -> FElem {
    f.random(rng, 1)
}

fn factor_finite(f: &Field, a: &[FElem]) -> Vec<(Vec<FElem>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut out = Vec::new();
    for (sq, mult) in squarefree_finite(f, a) {
        for (block, d) in distinct_degree(f, &sq) {
            for g in equal_degree(f, &block, d, &mut rng) {
                out.push((poly::monic(f, &g), mult));
            }
        }
    }
    out
}

fn rational_to_integer_poly(a: &[FElem]) -> Vec<BigInt> {
    let rats: Vec<BigRational> = a
        .iter()
        .map(|c| match c {
            FElem::Rat(r) => r.clone(),
            _ => unreachable!(),
        })
        .collect();
    let mut den = BigInt::one();
    for r in &rats {
        den = den.lcm(r.denom());
    }
    let ints: Vec<BigInt> = rats
        .iter()
        .map(|r| (r * BigRational::from_integer(den.clone())).to_integer())
        .collect();
    primitive(&ints)
}

fn primitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in v {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = if v.last().map(|c| c.is_negative()).unwrap_or(false) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    v.iter().map(|c| c / &g * &sign).collect()
}

fn int_poly_to_field(f: &Field, v: &[BigInt]) -> Vec<FElem> {
    poly::trim(v.iter().map(|c| f.from_bigint(c)).collect(), f)
}

fn factor_rational(f: &Field, a: &[FElem]) -> AlgebraResult<Vec<(Vec<FElem>, usize)>> {
    // Yun's squarefree decomposition over QQ
    let mut out = Vec::new();
    let da = poly::derivative(f, a);
    let mut b = poly::gcd(f, a, &da);
    let mut c = poly::div_exact(f, a, &b).unwrap();
    let mut i = 1;
    while c.len() > 1 {
        let y = poly::gcd(f, &c, &b);
        let z = poly::div_exact(f, &c, &y).unwrap();
        if z.len() > 1 {
            for g in factor_squarefree_rational(f, &z)? {
                out.push((g, i));
            }
        }
        c = y;
        b = poly::div_exact(f, &b, &c).unwrap();
        i += 1;
    }
    Ok(out)
}

fn factor_squarefree_rational(f: &Field, a: &[FElem]) -> AlgebraResult<Vec<Vec<FElem>>> {
    let n = a.len() - 1;
    if n == 1 {
        return Ok(vec![poly::monic(f, a)]);
    }
    let ints = rational_to_integer_poly(a);
    let lc = ints.last().unwrap().clone();
    let norm2: BigInt = ints.iter().map(|c| c * c).sum();
    let norm = norm2.sqrt() + BigInt::one();
    // |coeff of lc * g| <= |lc| * 2^n * ||f||_2 for any integral factor g
    let bound: BigInt = lc.abs() * (BigInt::one() << n) * norm;
    let min_p = (bound * BigInt::from(2) + BigInt::one()).to_u64().ok_or(AlgebraError::CoefficientBoundExceeded)?;
    if min_p >= (1u64 << 61) {
        return Err(AlgebraError::CoefficientBoundExceeded);
    }
    let mut p = min_p.max(3);
    let fp;
    loop {
        if is_prime(p) && !(&lc % BigInt::from(p)).is_zero() {
            let field = Field::prime(p)?;
            let red = int_poly_to_field(&field, &ints);
            let dr = poly::derivative(&field, &red);
            if poly::gcd(&field, &red, &dr).len() == 1 {
                fp = field;
                break;
            }
        }
        p += 1;
    }
    let red = poly::monic(&fp, &int_poly_to_field(&fp, &ints));
    let modular: Vec<Vec<FElem>> = factor_finite(&fp, &red).into_iter().map(|(g, _)| g).collect();
    let pb = BigInt::from(p);
    let half = &pb / 2;
    let lift = |v: &[FElem]| -> Vec<BigInt> {
        v.iter()
            .map(|c| {
                let r = BigInt::from(match c {
                    FElem::Res(r) => *r,
                    _ => unreachable!(),
                });
                if r > half {
                    r - &pb
                } else {
                    r
                }
            })
            .collect()
    };
    let mut remaining: Vec<usize> = (0..modular.len()).collect();
    let mut target = ints.clone();
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut progressed = false;
        for subset in subsets(&remaining, size) {
            let tlc = target.last().unwrap().clone();
            let mut prod = vec![fp.from_bigint(&tlc)];
            for &k in &subset {
                prod = poly::mul(&fp, &prod, &modular[k]);
            }
            let cand = primitive(&lift(&prod));
            let cand_q = int_poly_to_field(f, &cand);
            let target_q = int_poly_to_field(f, &target);
            if let Some(quot) = poly::div_exact(f, &target_q, &cand_q) {
                found.push(poly::monic(f, &cand_q));
                target = rational_to_integer_poly(&quot);
                remaining.retain(|k| !subset.contains(k));
                progressed = true;
                break;
            }
        }
        if !progressed {
            size += 1;
        }
    }
    if target.len() > 1 {
        found.push(poly::monic(f, &int_poly_to_field(f, &target)));
    }
    Ok(found)
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Roots of `a` lying in `f` (finite fields by enumeration or factoring).
pub fn roots(f: &Field, a: &[FElem]) -> AlgebraResult<Vec<FElem>> {
    let fac = factor(f, a)?;
    Ok(fac
        .factors
        .iter()
        .filter(|(g, _)| g.len() == 2)
        .map(|(g, _)| f.neg(&g[0]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: &Field, c: &[i64]) -> Vec<FElem> {
        poly::trim(c.iter().map(|&x| f.from_int(x)).collect(), f)
    }

    #[test]
    fn x2_plus_1_over_f5_splits() {
        let f = Field::prime(5).unwrap();
        let fac = factor(&f, &p(&f, &[1, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(p(&f, &[2, 1]), 1), (p(&f, &[3, 1]), 1)]);
        // root enumeration oracle
        let rs: Vec<u64> = (0..5).filter(|x| (x * x + 1) % 5 == 0).collect();
        assert_eq!(rs, vec![2, 3]);
    }

    #[test]
    fn x2_plus_1_over_q_irreducible() {
        let f = Field::rationals();
        assert!(is_irreducible(&f, &p(&f, &[1, 0, 1])).unwrap());
    }

    #[test]
    fn noncube_binomial_is_irreducible() {
        // over F7 the cubes are {0,1,6}; 3 is not a cube
        let f = Field::prime(7).unwrap();
        assert!(is_irreducible(&f, &p(&f, &[3, 0, 0, -1])).unwrap());
        assert!(!is_irreducible(&f, &p(&f, &[6, 0, 0, -1])).unwrap());
    }

    #[test]
    fn rational_factorization_round_trip() {
        let f = Field::rationals();
        // (x^2 - 2)(x + 3)^2 (2x - 1)
        let a = poly::mul(
            &f,
            &poly::mul(&f, &p(&f, &[-2, 0, 1]), &poly::pow(&f, &p(&f, &[3, 1]), 2)),
            &p(&f, &[-1, 2]),
        );
        let fac = factor(&f, &a).unwrap();
        assert_eq!(fac.expand(&f), a);
        assert_eq!(fac.factors.len(), 3);
        for (g, _) in &fac.factors {
            assert!(is_irreducible(&f, g).unwrap());
        }
    }

    #[test]
    fn swinnerton_dyer_like_recombination() {
        // x^4 + 1 is irreducible over QQ but splits modulo every prime
        let f = Field::rationals();
        let fac = factor(&f, &p(&f, &[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(fac.factors.len(), 1);
    }

    #[test]
    fn degree_bound_enforced() {
        let f = Field::rationals();
        let a = p(&f, &[1, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert!(matches!(
            factor(&f, &a),
            Err(AlgebraError::DegreeBoundExceeded { .. })
        ));
    }

    #[test]
    fn inseparable_style_input_over_f3() {
        let f = Field::prime(3).unwrap();
        // x^3 - x^0... (x+1)^3 = x^3 + 1
        let fac = factor(&f, &p(&f, &[1, 0, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(p(&f, &[1, 1]), 3)]);
    }

    #[test]
    fn factoring_over_f4() {
        let f = Field::galois(2, 2).unwrap();
        // x^2 + x + 1 splits over F4
        let a = p(&f, &[1, 1, 1]);
        let fac = factor(&f, &a).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(&f), a);
    }
}
