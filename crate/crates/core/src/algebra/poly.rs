//! Dense univariate polynomials over a [`Field`].
//!
//! Coefficients are stored lowest degree first and trimmed, so the zero
//! polynomial is the empty vector.

use std::fmt;

use super::error::{AlgebraError, AlgebraResult};
use super::field::{FElem, Field};

pub fn trim(mut v: Vec<FElem>, f: &Field) -> Vec<FElem> {
    while let Some(last) = v.last() {
        if f.is_zero(last) {
            v.pop();
        } else {
            break;
        }
    }
    v
}

pub fn degree(a: &[FElem]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

pub fn constant(f: &Field, c: FElem) -> Vec<FElem> {
    trim(vec![c], f)
}

pub fn monomial(f: &Field, c: FElem, deg: usize) -> Vec<FElem> {
    if f.is_zero(&c) {
        return Vec::new();
    }
    let mut v = vec![f.zero(); deg + 1];
    v[deg] = c;
    v
}

pub fn x(f: &Field) -> Vec<FElem> {
    monomial(f, f.one(), 1)
}

pub fn add(f: &Field, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s = match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => f.add(x, y),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        };
        out.push(s);
    }
    trim(out, f)
}

pub fn neg(f: &Field, a: &[FElem]) -> Vec<FElem> {
    a.iter().map(|c| f.neg(c)).collect()
}

pub fn sub(f: &Field, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
    add(f, a, &neg(f, b))
}

pub fn scale(f: &Field, a: &[FElem], c: &FElem) -> Vec<FElem> {
    if f.is_zero(c) {
        return Vec::new();
    }
    trim(a.iter().map(|x| f.mul(x, c)).collect(), f)
}

pub fn mul(f: &Field, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if f.is_zero(y) {
                continue;
            }
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(out, f)
}

pub fn pow(f: &Field, a: &[FElem], mut e: u64) -> Vec<FElem> {
    let mut acc = vec![f.one()];
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(f, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(f, &base, &base);
        }
    }
    acc
}

/// Quotient and remainder; panics on a zero divisor.
pub fn divrem(f: &Field, a: &[FElem], b: &[FElem]) -> (Vec<FElem>, Vec<FElem>) {
    assert!(!b.is_empty(), "polynomial division by zero");
    let db = b.len() - 1;
    let lead_inv = f.inv(&b[db]).expect("nonzero leading coefficient");
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![f.zero(); r.len() - db];
    while r.len() >= b.len() {
        let dr = r.len() - 1;
        let c = f.mul(&r[dr], &lead_inv);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            let t = f.mul(&c, bc);
            r[shift + i] = f.sub(&r[shift + i], &t);
        }
        q[shift] = c;
        r = trim(r, f);
    }
    (trim(q, f), r)
}

pub fn rem(f: &Field, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
    divrem(f, a, b).1
}

/// Exact division; returns `None` when `b` does not divide `a`.
pub fn div_exact(f: &Field, a: &[FElem], b: &[FElem]) -> Option<Vec<FElem>> {
    let (q, r) = divrem(f, a, b);
    if r.is_empty() {
        Some(q)
    } else {
        None
    }
}

pub fn monic(f: &Field, a: &[FElem]) -> Vec<FElem> {
    match a.last() {
        None => Vec::new(),
        Some(lc) => {
            let inv = f.inv(lc).expect("nonzero leading coefficient");
            scale(f, a, &inv)
        }
    }
}

pub fn is_monic(f: &Field, a: &[FElem]) -> bool {
    a.last().map(|c| f.is_one(c)).unwrap_or(false)
}

/// Monic gcd; `gcd(0, 0) = 0`.
pub fn gcd(f: &Field, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
    if (a.len() == 1 && !b.is_empty()) || (b.len() == 1 && !a.is_empty()) {
        return vec![f.one()];
    }
    let mut x = monic(f, a);
    let mut y = monic(f, b);
    while !y.is_empty() {
        let r = monic(f, &rem(f, &x, &y));
        x = y;
        y = r;
    }
    x
}

/// Returns `(g, s, t)` with `s*a + t*b = g` and `g` monic.
pub fn ext_gcd(f: &Field, a: &[FElem], b: &[FElem]) -> (Vec<FElem>, Vec<FElem>, Vec<FElem>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![f.one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![f.one()]);
    while !r1.is_empty() {
        let (q, r) = divrem(f, &r0, &r1);
        let s2 = sub(f, &s0, &mul(f, &q, &s1));
        let t2 = sub(f, &t0, &mul(f, &q, &t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
        t0 = t1;
        t1 = t2;
    }
    match r0.last() {
        None => (Vec::new(), s0, t0),
        Some(lc) => {
            let inv = f.inv(lc).expect("nonzero");
            (scale(f, &r0, &inv), scale(f, &s0, &inv), scale(f, &t0, &inv))
        }
    }
}

pub fn derivative(f: &Field, a: &[FElem]) -> Vec<FElem> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let out = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(&f.from_int(i as i64), c))
        .collect();
    trim(out, f)
}

pub fn eval(f: &Field, a: &[FElem], x: &FElem) -> FElem {
    let mut acc = f.zero();
    for c in a.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

/// Evaluate a polynomial whose coefficients live in `f` at a point of the
/// larger field `big`, which must embed `f`.
pub fn eval_in(f: &Field, big: &Field, a: &[FElem], x: &FElem) -> FElem {
    let mut acc = big.zero();
    for c in a.iter().rev() {
        let c = big.embed_from(f, c).expect("field embeds");
        acc = big.add(&big.mul(&acc, x), &c);
    }
    acc
}

/// `a(x)^e mod m` by square and multiply with a big exponent given as bits.
pub fn pow_mod_bits(f: &Field, a: &[FElem], bits: &[bool], m: &[FElem]) -> Vec<FElem> {
    let mut acc = rem(f, &[f.one()], m);
    for &bit in bits {
        acc = rem(f, &mul(f, &acc, &acc), m);
        if bit {
            acc = rem(f, &mul(f, &acc, a), m);
        }
    }
    acc
}

pub fn pow_mod(f: &Field, a: &[FElem], e: &num_bigint::BigUint, m: &[FElem]) -> Vec<FElem> {
    let bits: Vec<bool> = (0..e.bits()).rev().map(|i| e.bit(i)).collect();
    pow_mod_bits(f, &rem(f, a, m), &bits, m)
}

/// Compose `a(b(x))`.
pub fn compose(f: &Field, a: &[FElem], b: &[FElem]) -> Vec<FElem> {
    let mut acc = Vec::new();
    for c in a.iter().rev() {
        acc = add(f, &mul(f, &acc, b), &constant(f, c.clone()));
    }
    acc
}

/// Total order used for deterministic output: degree, then coefficients from
/// the top down.
pub fn cmp_deg_lex(a: &[FElem], b: &[FElem]) -> std::cmp::Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

pub fn format_poly(f: &Field, a: &[FElem], var: &str) -> String {
    if a.is_empty() {
        return "0".to_string();
    }
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in a.iter().enumerate().rev() {
        if f.is_zero(c) {
            continue;
        }
        let cs = f.format(c);
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let term = if i == 0 {
            wrap_if_compound(&cs)
        } else if cs == "1" {
            mono
        } else if cs == "-1" {
            format!("-{mono}")
        } else {
            format!("{}*{mono}", wrap_if_compound(&cs))
        };
        parts.push(term);
    }
    let mut out = String::new();
    for (k, p) in parts.iter().enumerate() {
        if k == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

/// Parenthesise a coefficient string unless it is a plain (signed) atom.
pub fn wrap_if_compound(s: &str) -> String {
    let body = s.strip_prefix('-').unwrap_or(s);
    let atomic = body
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '^' || c == '/');
    if atomic {
        s.to_string()
    } else if s.starts_with('(') && s.ends_with(')') && balanced_outer(s) {
        s.to_string()
    } else {
        format!("({s})")
    }
}

fn balanced_outer(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i != s.len() - 1 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// A polynomial bundled with its coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polynomial {
    pub field: Field,
    pub coeffs: Vec<FElem>,
}

impl Polynomial {
    pub fn new(field: Field, coeffs: Vec<FElem>) -> Self {
        let coeffs = trim(coeffs, &field);
        Polynomial { field, coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        degree(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &Polynomial) -> AlgebraResult<()> {
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn gcd(&self, other: &Polynomial) -> AlgebraResult<Polynomial> {
        self.check(other)?;
        Ok(Polynomial::new(
            self.field.clone(),
            gcd(&self.field, &self.coeffs, &other.coeffs),
        ))
    }

    pub fn mul(&self, other: &Polynomial) -> AlgebraResult<Polynomial> {
        self.check(other)?;
        Ok(Polynomial::new(
            self.field.clone(),
            mul(&self.field, &self.coeffs, &other.coeffs),
        ))
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        rem(&self.field, &other.coeffs, &self.coeffs).is_empty()
    }

    pub fn eval(&self, x: &FElem) -> FElem {
        eval(&self.field, &self.coeffs, x)
    }

    pub fn display_in(&self, var: &str) -> String {
        format_poly(&self.field, &self.coeffs, var)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}", self.display_in("x"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::rationals()
    }

    fn p(f: &Field, c: &[i64]) -> Vec<FElem> {
        trim(c.iter().map(|&x| f.from_int(x)).collect(), f)
    }

    #[test]
    fn gcd_of_difference_of_squares() {
        let f = q();
        let g = gcd(&f, &p(&f, &[-1, 0, 1]), &p(&f, &[-1, 1]));
        assert_eq!(g, p(&f, &[-1, 1]));
    }

    #[test]
    fn gcd_with_zero_is_monic_scaling() {
        let f = q();
        let a = p(&f, &[2, 4]);
        assert_eq!(gcd(&f, &a, &[]), monic(&f, &a));
        assert!(gcd(&f, &[], &[]).is_empty());
    }

    #[test]
    fn gcd_over_f2() {
        let f = Field::prime(2).unwrap();
        let g = gcd(&f, &p(&f, &[1, 0, 1]), &p(&f, &[0, 1, 1]));
        assert_eq!(g, p(&f, &[1, 1]));
        // (x+1)^2 = x^2+1 over F2
        assert_eq!(mul(&f, &g, &g), p(&f, &[1, 0, 1]));
    }

    #[test]
    fn divrem_reassembles() {
        let f = q();
        let a = p(&f, &[3, -2, 0, 5, 1]);
        let b = p(&f, &[1, 2, 3]);
        let (qq, r) = divrem(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &qq, &b), &r), a);
        assert!(r.len() < b.len());
    }

    #[test]
    fn ext_gcd_bezout() {
        let f = Field::prime(7).unwrap();
        let a = p(&f, &[1, 2, 3, 1]);
        let b = p(&f, &[5, 0, 1]);
        let (g, s, t) = ext_gcd(&f, &a, &b);
        assert_eq!(add(&f, &mul(&f, &s, &a), &mul(&f, &t, &b)), g);
    }

    #[test]
    fn format_round_shapes() {
        let f = q();
        assert_eq!(format_poly(&f, &p(&f, &[1, 0, 3]), "x"), "3*x^2 + 1");
        assert_eq!(format_poly(&f, &p(&f, &[-1, 1]), "x"), "x - 1");
        assert_eq!(format_poly(&f, &[], "x"), "0");
    }
}
