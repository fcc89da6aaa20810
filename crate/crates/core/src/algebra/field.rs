//! Runtime field descriptors and their elements.
//!
//! Supported fields compose as towers: `QQ`, `GF(p)`, `GF(p,d)`, simple
//! extensions `k[theta]/(g)` and rational function fields `k(x)`. Every
//! element is stored in a unique reduced form, so structural equality is
//! field equality.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use super::error::{AlgebraError, AlgebraResult};
use super::poly;
use super::ring::{CommRing, UnitRing};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FElem {
    /// Element of `QQ`.
    Rat(BigRational),
    /// Residue in `0..p`.
    Res(u64),
    /// Reduced residue of an extension, coefficients over the base.
    Ext(Vec<FElem>),
    /// Numerator and monic denominator over the base, coprime.
    Frac(Vec<FElem>, Vec<FElem>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rationals,
    Prime(u64),
    Extension {
        base: Field,
        modulus: Vec<FElem>,
        name: String,
        /// `(p, d)` when this is the canonical `GF(p,d)`.
        galois: Option<(u64, usize)>,
    },
    RatFun {
        base: Field,
        var: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Field(Arc<FieldKind>);

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

impl Field {
    pub fn kind(&self) -> &FieldKind {
        &self.0
    }

    pub fn rationals() -> Field {
        Field(Arc::new(FieldKind::Rationals))
    }

    pub fn prime(p: u64) -> AlgebraResult<Field> {
        if !is_prime(p) || p >= (1u64 << 62) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(Field(Arc::new(FieldKind::Prime(p))))
    }

    /// `GF(p^d)` modulo the least monic irreducible of degree `d`, where
    /// polynomials are compared coefficientwise from the top degree down.
    pub fn galois(p: u64, d: usize) -> AlgebraResult<Field> {
        let base = Field::prime(p)?;
        if d == 0 {
            return Err(AlgebraError::BadModulus);
        }
        if d == 1 {
            return Ok(base);
        }
        let modulus = least_irreducible(&base, d);
        Ok(Field(Arc::new(FieldKind::Extension {
            base,
            modulus,
            name: "theta".to_string(),
            galois: Some((p, d)),
        })))
    }

    /// `base[name]/(modulus)`; the modulus must be monic and irreducible.
    pub fn extension(base: &Field, modulus: Vec<FElem>, name: &str) -> AlgebraResult<Field> {
        let modulus = poly::trim(modulus, base);
        if modulus.len() < 2 || !poly::is_monic(base, &modulus) {
            return Err(AlgebraError::BadModulus);
        }
        if !super::factor::is_irreducible(base, &modulus)? {
            return Err(AlgebraError::ReducibleModulus);
        }
        Ok(Field(Arc::new(FieldKind::Extension {
            base: base.clone(),
            modulus,
            name: name.to_string(),
            galois: None,
        })))
    }

    pub fn rat_fun(base: &Field, var: &str) -> Field {
        Field(Arc::new(FieldKind::RatFun {
            base: base.clone(),
            var: var.to_string(),
        }))
    }

    pub fn base(&self) -> Option<&Field> {
        match self.kind() {
            FieldKind::Extension { base, .. } | FieldKind::RatFun { base, .. } => Some(base),
            _ => None,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self.kind() {
            FieldKind::Rationals => 0,
            FieldKind::Prime(p) => *p,
            FieldKind::Extension { base, .. } | FieldKind::RatFun { base, .. } => {
                base.characteristic()
            }
        }
    }

    /// Number of elements for finite fields.
    pub fn size(&self) -> Option<u64> {
        match self.kind() {
            FieldKind::Rationals | FieldKind::RatFun { .. } => None,
            FieldKind::Prime(p) => Some(*p),
            FieldKind::Extension { base, modulus, .. } => {
                let q = base.size()?;
                q.checked_pow((modulus.len() - 1) as u32)
            }
        }
    }

    pub fn size_big(&self) -> Option<BigUint> {
        match self.kind() {
            FieldKind::Rationals | FieldKind::RatFun { .. } => None,
            FieldKind::Prime(p) => Some(BigUint::from(*p)),
            FieldKind::Extension { base, modulus, .. } => {
                Some(base.size_big()?.pow((modulus.len() - 1) as u32))
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size_big().is_some()
    }

    /// Degree over the prime field, for finite fields.
    pub fn prime_degree(&self) -> Option<usize> {
        match self.kind() {
            FieldKind::Prime(_) => Some(1),
            FieldKind::Extension { base, modulus, .. } => {
                Some(base.prime_degree()? * (modulus.len() - 1))
            }
            _ => None,
        }
    }

    /// Enumerate all elements of a finite field in a fixed order.
    pub fn elements(&self) -> Vec<FElem> {
        match self.kind() {
            FieldKind::Prime(p) => (0..*p).map(FElem::Res).collect(),
            FieldKind::Extension { base, modulus, .. } => {
                let be = base.elements();
                let d = modulus.len() - 1;
                let mut out = vec![Vec::new()];
                for _ in 0..d {
                    let mut next = Vec::new();
                    for prefix in &out {
                        for c in &be {
                            let mut v: Vec<FElem> = prefix.clone();
                            v.push(c.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                out.into_iter()
                    .map(|v| FElem::Ext(poly::trim(v, base)))
                    .collect()
            }
            _ => panic!("elements() on an infinite field"),
        }
    }

    pub fn zero(&self) -> FElem {
        match self.kind() {
            FieldKind::Rationals => FElem::Rat(BigRational::zero()),
            FieldKind::Prime(_) => FElem::Res(0),
            FieldKind::Extension { .. } => FElem::Ext(Vec::new()),
            FieldKind::RatFun { base, .. } => FElem::Frac(Vec::new(), vec![base.one()]),
        }
    }

    pub fn one(&self) -> FElem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FElem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FElem {
        match self.kind() {
            FieldKind::Rationals => FElem::Rat(BigRational::from_integer(n.clone())),
            FieldKind::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(*p));
                FElem::Res(r.to_u64().unwrap())
            }
            FieldKind::Extension { base, .. } => {
                FElem::Ext(poly::constant(base, base.from_bigint(n)))
            }
            FieldKind::RatFun { base, .. } => {
                FElem::Frac(poly::constant(base, base.from_bigint(n)), vec![base.one()])
            }
        }
    }

    pub fn from_rational(&self, r: &BigRational) -> AlgebraResult<FElem> {
        let n = self.from_bigint(r.numer());
        let d = self.from_bigint(r.denom());
        self.div(&n, &d)
    }

    pub fn is_zero(&self, a: &FElem) -> bool {
        match a {
            FElem::Rat(r) => r.is_zero(),
            FElem::Res(r) => *r == 0,
            FElem::Ext(v) => v.is_empty(),
            FElem::Frac(n, _) => n.is_empty(),
        }
    }

    pub fn is_one(&self, a: &FElem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &FElem, b: &FElem) -> FElem {
        match (self.kind(), a, b) {
            (FieldKind::Rationals, FElem::Rat(x), FElem::Rat(y)) => FElem::Rat(x + y),
            (FieldKind::Prime(p), FElem::Res(x), FElem::Res(y)) => FElem::Res((x + y) % p),
            (FieldKind::Extension { base, .. }, FElem::Ext(x), FElem::Ext(y)) => {
                FElem::Ext(poly::add(base, x, y))
            }
            (FieldKind::RatFun { base, .. }, FElem::Frac(n1, d1), FElem::Frac(n2, d2)) => {
                if d1 == d2 {
                    return self.normalize_frac(poly::add(base, n1, n2), d1.clone());
                }
                let g = poly::gcd(base, d1, d2);
                if g.len() == 1 {
                    let num = poly::add(base, &poly::mul(base, n1, d2), &poly::mul(base, n2, d1));
                    return self.normalize_frac(num, poly::mul(base, d1, d2));
                }
                let e1 = poly::div_exact(base, d1, &g).unwrap();
                let e2 = poly::div_exact(base, d2, &g).unwrap();
                let num = poly::add(base, &poly::mul(base, n1, &e2), &poly::mul(base, n2, &e1));
                if num.is_empty() {
                    return self.zero();
                }
                // only factors of g can cancel
                let h = poly::gcd(base, &num, &g);
                let (num, g) = if h.len() > 1 {
                    (poly::div_exact(base, &num, &h).unwrap(), poly::div_exact(base, &g, &h).unwrap())
                } else {
                    (num, g)
                };
                let den = poly::mul(base, &poly::mul(base, &e1, &e2), &g);
                let inv = base.inv(den.last().unwrap()).unwrap();
                FElem::Frac(poly::scale(base, &num, &inv), poly::scale(base, &den, &inv))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn neg(&self, a: &FElem) -> FElem {
        match (self.kind(), a) {
            (FieldKind::Rationals, FElem::Rat(x)) => FElem::Rat(-x),
            (FieldKind::Prime(p), FElem::Res(x)) => FElem::Res((p - x) % p),
            (FieldKind::Extension { base, .. }, FElem::Ext(x)) => FElem::Ext(poly::neg(base, x)),
            (FieldKind::RatFun { base, .. }, FElem::Frac(n, d)) => {
                FElem::Frac(poly::neg(base, n), d.clone())
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn sub(&self, a: &FElem, b: &FElem) -> FElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        match (self.kind(), a, b) {
            (FieldKind::Rationals, FElem::Rat(x), FElem::Rat(y)) => FElem::Rat(x * y),
            (FieldKind::Prime(p), FElem::Res(x), FElem::Res(y)) => {
                FElem::Res(mul_mod_u64(*x, *y, *p))
            }
            (FieldKind::Extension { base, modulus, .. }, FElem::Ext(x), FElem::Ext(y)) => {
                FElem::Ext(poly::rem(base, &poly::mul(base, x, y), modulus))
            }
            (FieldKind::RatFun { base, .. }, FElem::Frac(n1, d1), FElem::Frac(n2, d2)) => {
                if n1.is_empty() || n2.is_empty() {
                    return self.zero();
                }
                // cross-cancel before multiplying to keep sizes small
                let cancel = |a: &[FElem], b: &[FElem]| {
                    let g = poly::gcd(base, a, b);
                    if g.len() == 1 {
                        (a.to_vec(), b.to_vec())
                    } else {
                        (poly::div_exact(base, a, &g).unwrap(), poly::div_exact(base, b, &g).unwrap())
                    }
                };
                let (n1, d2) = cancel(n1, d2);
                let (n2, d1) = cancel(n2, d1);
                let num = poly::mul(base, &n1, &n2);
                let den = poly::mul(base, &d1, &d2);
                let lc = den.last().unwrap().clone();
                let inv = base.inv(&lc).unwrap();
                FElem::Frac(poly::scale(base, &num, &inv), poly::scale(base, &den, &inv))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn inv(&self, a: &FElem) -> Option<FElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(match (self.kind(), a) {
            (FieldKind::Rationals, FElem::Rat(x)) => FElem::Rat(x.recip()),
            (FieldKind::Prime(p), FElem::Res(x)) => FElem::Res(pow_mod_u64(*x, p - 2, *p)),
            (FieldKind::Extension { base, modulus, .. }, FElem::Ext(x)) => {
                let (g, s, _) = poly::ext_gcd(base, x, modulus);
                debug_assert!(g.len() == 1);
                FElem::Ext(poly::rem(base, &s, modulus))
            }
            (FieldKind::RatFun { .. }, FElem::Frac(n, d)) => {
                self.normalize_frac(d.clone(), n.clone())
            }
            _ => panic!("element does not belong to {self}"),
        })
    }

    pub fn div(&self, a: &FElem, b: &FElem) -> AlgebraResult<FElem> {
        let inv = self.inv(b).ok_or(AlgebraError::DivisionByZero)?;
        Ok(self.mul(a, &inv))
    }

    pub fn pow(&self, a: &FElem, e: u64) -> FElem {
        let mut acc = self.one();
        let mut base = a.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn pow_big(&self, a: &FElem, e: &BigUint) -> FElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Signed integer power; negative exponents require a nonzero base.
    pub fn powi(&self, a: &FElem, e: i64) -> AlgebraResult<FElem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            let inv = self.inv(a).ok_or(AlgebraError::DivisionByZero)?;
            Ok(self.pow(&inv, e.unsigned_abs()))
        }
    }

    fn normalize_frac(&self, num: Vec<FElem>, den: Vec<FElem>) -> FElem {
        let base = self.base().unwrap();
        assert!(!den.is_empty(), "zero denominator");
        if num.is_empty() {
            return self.zero();
        }
        let g = poly::gcd(base, &num, &den);
        let (num, den) = if g.len() > 1 {
            (
                poly::div_exact(base, &num, &g).unwrap(),
                poly::div_exact(base, &den, &g).unwrap(),
            )
        } else {
            (num, den)
        };
        let lc = den.last().unwrap().clone();
        if base.is_one(&lc) {
            return FElem::Frac(num, den);
        }
        let inv = base.inv(&lc).unwrap();
        FElem::Frac(poly::scale(base, &num, &inv), poly::scale(base, &den, &inv))
    }

    /// Build `num/den` in a rational function field.
    pub fn frac(&self, num: Vec<FElem>, den: Vec<FElem>) -> AlgebraResult<FElem> {
        let base = self
            .base()
            .filter(|_| matches!(self.kind(), FieldKind::RatFun { .. }))
            .ok_or_else(|| AlgebraError::UnsupportedField(self.to_string()))?;
        let den = poly::trim(den, base);
        if den.is_empty() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.normalize_frac(poly::trim(num, base), den))
    }

    /// The adjoined generator of an extension or the variable of `k(x)`.
    pub fn generator(&self) -> Option<FElem> {
        match self.kind() {
            FieldKind::Extension { base, modulus, .. } => {
                Some(FElem::Ext(poly::rem(base, &poly::x(base), modulus)))
            }
            FieldKind::RatFun { base, .. } => Some(FElem::Frac(poly::x(base), vec![base.one()])),
            _ => None,
        }
    }

    pub fn generator_name(&self) -> Option<&str> {
        match self.kind() {
            FieldKind::Extension { name, .. } => Some(name),
            FieldKind::RatFun { var, .. } => Some(var),
            _ => None,
        }
    }

    /// Embed an element of the immediate base field.
    pub fn embed_base(&self, c: &FElem) -> FElem {
        match self.kind() {
            FieldKind::Extension { base, .. } => FElem::Ext(poly::constant(base, c.clone())),
            FieldKind::RatFun { base, .. } => {
                FElem::Frac(poly::constant(base, c.clone()), vec![base.one()])
            }
            _ => panic!("{self} has no base field"),
        }
    }

    /// Embed an element of any field in this field's tower of bases.
    pub fn embed_from(&self, sub: &Field, c: &FElem) -> AlgebraResult<FElem> {
        if self == sub {
            return Ok(c.clone());
        }
        match self.base() {
            Some(b) => {
                let inner = b.embed_from(sub, c)?;
                Ok(self.embed_base(&inner))
            }
            None => Err(AlgebraError::FieldMismatch(sub.to_string(), self.to_string())),
        }
    }

    /// Return the base-field value if `a` lies in the immediate base.
    pub fn as_base(&self, a: &FElem) -> Option<FElem> {
        match (self.kind(), a) {
            (FieldKind::Extension { base, .. }, FElem::Ext(v)) => match v.len() {
                0 => Some(base.zero()),
                1 => Some(v[0].clone()),
                _ => None,
            },
            (FieldKind::RatFun { base, .. }, FElem::Frac(n, d)) => {
                if d.len() == 1 && n.len() <= 1 {
                    Some(n.first().cloned().unwrap_or_else(|| base.zero()))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Return the value in `sub` if `a` lies in that subfield of the tower.
    pub fn as_subfield(&self, sub: &Field, a: &FElem) -> Option<FElem> {
        if self == sub {
            return Some(a.clone());
        }
        let b = self.base()?;
        let inner = self.as_base(a)?;
        b.as_subfield(sub, &inner)
    }

    /// Coefficients of an extension element over its base.
    pub fn ext_coeffs(&self, a: &FElem) -> Vec<FElem> {
        match a {
            FElem::Ext(v) => v.clone(),
            _ => panic!("not an extension element"),
        }
    }

    pub fn modulus(&self) -> Option<&[FElem]> {
        match self.kind() {
            FieldKind::Extension { modulus, .. } => Some(modulus),
            _ => None,
        }
    }

    pub fn ext_degree(&self) -> usize {
        match self.kind() {
            FieldKind::Extension { modulus, .. } => modulus.len() - 1,
            _ => 1,
        }
    }

    /// Number of transcendental variables in the tower.
    pub fn num_vars(&self) -> usize {
        match self.kind() {
            FieldKind::Rationals | FieldKind::Prime(_) => 0,
            FieldKind::Extension { base, .. } => base.num_vars(),
            FieldKind::RatFun { base, .. } => base.num_vars() + 1,
        }
    }

    pub fn var_names(&self) -> Vec<String> {
        match self.kind() {
            FieldKind::Rationals | FieldKind::Prime(_) => Vec::new(),
            FieldKind::Extension { base, .. } => base.var_names(),
            FieldKind::RatFun { base, var } => {
                let mut v = base.var_names();
                v.push(var.clone());
                v
            }
        }
    }

    /// Partial derivative with respect to variable `var` (0 = innermost).
    pub fn partial(&self, a: &FElem, var: usize) -> FElem {
        match (self.kind(), a) {
            (FieldKind::Rationals, _) | (FieldKind::Prime(_), _) => self.zero(),
            (FieldKind::RatFun { base, .. }, FElem::Frac(n, d)) => {
                let own = base.num_vars();
                let (dn, dd) = if var == own {
                    (poly::derivative(base, n), poly::derivative(base, d))
                } else if var < own {
                    let dn = poly::trim(n.iter().map(|c| base.partial(c, var)).collect(), base);
                    let dd = poly::trim(d.iter().map(|c| base.partial(c, var)).collect(), base);
                    (dn, dd)
                } else {
                    return self.zero();
                };
                let num = poly::sub(base, &poly::mul(base, &dn, d), &poly::mul(base, n, &dd));
                if num.is_empty() {
                    return self.zero();
                }
                self.normalize_frac(num, poly::mul(base, d, d))
            }
            (FieldKind::Extension { base, modulus, .. }, FElem::Ext(v)) => {
                if base.num_vars() == 0 {
                    return self.zero();
                }
                // D(theta) = -g^D(theta) / g'(theta)
                let gd: Vec<FElem> = modulus.iter().map(|c| base.partial(c, var)).collect();
                let gd = FElem::Ext(poly::rem(base, &poly::trim(gd, base), modulus));
                let gp = FElem::Ext(poly::rem(base, &poly::derivative(base, modulus), modulus));
                let dtheta = self.neg(&self.div(&gd, &gp).expect("separable modulus"));
                let coeff_part: Vec<FElem> = v.iter().map(|c| base.partial(c, var)).collect();
                let coeff_part = FElem::Ext(poly::trim(coeff_part, base));
                let dv = FElem::Ext(poly::derivative(base, v));
                self.add(&coeff_part, &self.mul(&dv, &dtheta))
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    /// Unique `b` with `b^p = a`.
    pub fn pth_root(&self, a: &FElem) -> AlgebraResult<FElem> {
        let p = self.characteristic();
        if p == 0 {
            return Err(AlgebraError::CharZero);
        }
        match (self.kind(), a) {
            (FieldKind::Prime(_), _) => Ok(a.clone()),
            (FieldKind::Extension { .. }, _) => {
                // Frobenius has order prime_degree on a finite field
                let deg = self
                    .prime_degree()
                    .ok_or_else(|| AlgebraError::UnsupportedField(self.to_string()))?;
                let e = BigUint::from(p).pow((deg - 1) as u32);
                Ok(self.pow_big(a, &e))
            }
            (FieldKind::RatFun { base, .. }, FElem::Frac(n, d)) => {
                let rn = poly_pth_root(base, n, p)?;
                let rd = poly_pth_root(base, d, p)?;
                Ok(self.normalize_frac(rn, rd))
            }
            _ => Err(AlgebraError::UnsupportedField(self.to_string())),
        }
    }

    /// A pseudo-random element; `size` bounds heights and degrees.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, size: u64) -> FElem {
        match self.kind() {
            FieldKind::Rationals => {
                let s = size.max(1) as i64;
                let n = rng.gen_range(-s..=s);
                let d = rng.gen_range(1..=s);
                FElem::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
            FieldKind::Prime(p) => FElem::Res(rng.gen_range(0..*p)),
            FieldKind::Extension { base, modulus, .. } => {
                let v = (0..modulus.len() - 1).map(|_| base.random(rng, size)).collect();
                FElem::Ext(poly::trim(v, base))
            }
            FieldKind::RatFun { base, .. } => {
                let dn = rng.gen_range(0..=2usize);
                let dd = rng.gen_range(0..=1usize);
                let num: Vec<FElem> = (0..=dn).map(|_| base.random(rng, size)).collect();
                let mut den: Vec<FElem> = (0..dd).map(|_| base.random(rng, size)).collect();
                den.push(base.one());
                self.normalize_frac(poly::trim(num, base), den)
            }
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, size: u64) -> FElem {
        loop {
            let a = self.random(rng, size);
            if !self.is_zero(&a) {
                return a;
            }
        }
    }

    pub fn format(&self, a: &FElem) -> String {
        match (self.kind(), a) {
            (FieldKind::Rationals, FElem::Rat(r)) => {
                if r.is_integer() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            (FieldKind::Prime(_), FElem::Res(r)) => r.to_string(),
            (FieldKind::Extension { base, name, .. }, FElem::Ext(v)) => {
                poly::format_poly(base, v, name)
            }
            (FieldKind::RatFun { base, var }, FElem::Frac(n, d)) => {
                let ns = poly::format_poly(base, n, var);
                if d.len() == 1 {
                    ns
                } else {
                    let ds = poly::format_poly(base, d, var);
                    format!("{}/{}", poly::wrap_if_compound(&ns), poly::wrap_if_compound(&ds))
                }
            }
            _ => format!("{a:?}"),
        }
    }

    /// Exact rational value of a `QQ` element.
    pub fn as_rational(&self, a: &FElem) -> Option<BigRational> {
        match a {
            FElem::Rat(r) => Some(r.clone()),
            _ => None,
        }
    }

    /// Integer representative of a prime-field residue, or of an integral rational.
    pub fn as_integer(&self, a: &FElem) -> Option<BigInt> {
        match a {
            FElem::Rat(r) if r.is_integer() => Some(r.numer().clone()),
            FElem::Res(r) => Some(BigInt::from(*r)),
            _ => None,
        }
    }

    pub fn is_negative_rational(&self, a: &FElem) -> bool {
        matches!(a, FElem::Rat(r) if r.is_negative())
    }
}

fn poly_pth_root(base: &Field, a: &[FElem], p: u64) -> AlgebraResult<Vec<FElem>> {
    let mut out = Vec::new();
    for (i, c) in a.iter().enumerate() {
        if i as u64 % p != 0 {
            if !base.is_zero(c) {
                return Err(AlgebraError::NotAPthPower);
            }
            continue;
        }
        out.push(base.pth_root(c)?);
    }
    Ok(poly::trim(out, base))
}

fn least_irreducible(base: &Field, d: usize) -> Vec<FElem> {
    let p = base.size().unwrap();
    let total = p.pow(d as u32);
    // counter digits are read top coefficient first
    for n in 0..total {
        let mut digits = vec![0u64; d];
        let mut k = n;
        for slot in (0..d).rev() {
            digits[slot] = k % p;
            k /= p;
        }
        // digits[0] is the coefficient of x^{d-1}
        let mut coeffs: Vec<FElem> = digits.iter().rev().map(|&c| FElem::Res(c)).collect();
        coeffs.push(base.one());
        if super::factor::is_irreducible(base, &coeffs).unwrap_or(false) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            FieldKind::Rationals => write!(f, "QQ"),
            FieldKind::Prime(p) => write!(f, "GF({p})"),
            FieldKind::Extension {
                base,
                modulus,
                name,
                galois,
            } => match galois {
                Some((p, d)) => write!(f, "GF({p},{d})"),
                None => write!(
                    f,
                    "Ext({base}, {name}, {})",
                    poly::format_poly(base, modulus, name)
                ),
            },
            FieldKind::RatFun { base, var } => write!(f, "RatFun({base}, {var})"),
        }
    }
}

impl CommRing for Field {
    type Elem = FElem;

    fn zero(&self) -> FElem {
        Field::zero(self)
    }
    fn one(&self) -> FElem {
        Field::one(self)
    }
    fn add(&self, a: &FElem, b: &FElem) -> FElem {
        Field::add(self, a, b)
    }
    fn neg(&self, a: &FElem) -> FElem {
        Field::neg(self, a)
    }
    fn mul(&self, a: &FElem, b: &FElem) -> FElem {
        Field::mul(self, a, b)
    }
    fn from_int(&self, n: i64) -> FElem {
        Field::from_int(self, n)
    }
    fn inv_int(&self, n: u64) -> Option<FElem> {
        self.inv(&Field::from_int(self, n as i64))
    }
    fn format(&self, a: &FElem) -> String {
        Field::format(self, a)
    }
    fn describe(&self) -> String {
        self.to_string()
    }
    fn is_zero(&self, a: &FElem) -> bool {
        Field::is_zero(self, a)
    }
    fn pow(&self, a: &FElem, e: u64) -> FElem {
        Field::pow(self, a, e)
    }
}

impl UnitRing for Field {
    fn inverse(&self, a: &FElem) -> Option<FElem> {
        self.inv(a)
    }
    fn characteristic(&self) -> u64 {
        Field::characteristic(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn galois_moduli_are_least() {
        let f4 = Field::galois(2, 2).unwrap();
        assert_eq!(
            f4.modulus().unwrap(),
            &[FElem::Res(1), FElem::Res(1), FElem::Res(1)]
        );
        let f8 = Field::galois(2, 3).unwrap();
        // x^3 + x + 1 precedes x^3 + x^2 + 1 reading from the top
        assert_eq!(
            f8.modulus().unwrap(),
            &[FElem::Res(1), FElem::Res(1), FElem::Res(0), FElem::Res(1)]
        );
        let f9 = Field::galois(3, 2).unwrap();
        assert_eq!(
            f9.modulus().unwrap(),
            &[FElem::Res(1), FElem::Res(0), FElem::Res(1)]
        );
    }

    #[test]
    fn f4_arithmetic() {
        let f = Field::galois(2, 2).unwrap();
        let th = f.generator().unwrap();
        let th2 = f.mul(&th, &th);
        assert_eq!(th2, f.add(&th, &f.one()));
        assert_eq!(f.mul(&th2, &th), f.one());
        for a in f.elements() {
            if !f.is_zero(&a) {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
            }
        }
    }

    #[test]
    fn ratfun_canonical_form() {
        let q = Field::rationals();
        let k = Field::rat_fun(&q, "x");
        let x = k.generator().unwrap();
        let one = k.one();
        let a = k.div(&k.sub(&k.mul(&x, &x), &one), &k.sub(&x, &one)).unwrap();
        assert_eq!(a, k.add(&x, &one));
        let half = k.div(&x, &k.from_int(2)).unwrap();
        assert_eq!(k.format(&half), "1/2*x");
    }

    #[test]
    fn partial_derivatives_in_tower() {
        let q = Field::rationals();
        let kx = Field::rat_fun(&q, "x");
        let kxy = Field::rat_fun(&kx, "y");
        let x = kxy.embed_base(&kx.generator().unwrap());
        let y = kxy.generator().unwrap();
        let xy = kxy.mul(&x, &y);
        assert_eq!(kxy.partial(&xy, 0), y);
        assert_eq!(kxy.partial(&xy, 1), x);
        let inv = kxy.inv(&x).unwrap();
        let expect = kxy.neg(&kxy.inv(&kxy.mul(&x, &x)).unwrap());
        assert_eq!(kxy.partial(&inv, 0), expect);
    }

    #[test]
    fn pth_roots() {
        let f3 = Field::prime(3).unwrap();
        let k = Field::rat_fun(&f3, "x");
        let x = k.generator().unwrap();
        assert_eq!(k.pth_root(&k.pow(&x, 3)).unwrap(), x);
        let f2 = Field::prime(2).unwrap();
        let k2 = Field::rat_fun(&f2, "x");
        assert_eq!(
            k2.pth_root(&k2.generator().unwrap()),
            Err(AlgebraError::NotAPthPower)
        );
        assert_eq!(
            Field::rationals().pth_root(&Field::rationals().one()),
            Err(AlgebraError::CharZero)
        );
        let f9 = Field::galois(3, 2).unwrap();
        for a in f9.elements() {
            assert_eq!(f9.pth_root(&f9.pow(&a, 3)).unwrap(), a);
        }
    }
}
