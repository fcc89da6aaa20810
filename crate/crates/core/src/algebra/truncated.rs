//! Truncated polynomial rings `k_{m+1} = k[t]/(t^{m+1})`.

use std::fmt;

use super::error::{AlgebraError, AlgebraResult};
use super::field::{FElem, Field};
use super::poly;
use super::ring::{CommRing, UnitRing};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncRing {
    pub base: Field,
    /// Elements are reduced modulo `t^{m+1}`.
    pub m: usize,
}

/// Coefficient vector of length exactly `m + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TElem(pub Vec<FElem>);

impl TElem {
    pub fn coeff(&self, i: usize) -> &FElem {
        &self.0[i]
    }
}

impl TruncRing {
    pub fn new(base: Field, m: usize) -> Self {
        TruncRing { base, m }
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Reduce an arbitrary polynomial in `t`.
    pub fn from_poly(&self, p: &[FElem]) -> TElem {
        let mut v: Vec<FElem> = p.iter().take(self.m + 1).cloned().collect();
        v.resize(self.m + 1, self.base.zero());
        TElem(v)
    }

    pub fn to_poly(&self, a: &TElem) -> Vec<FElem> {
        poly::trim(a.0.clone(), &self.base)
    }

    pub fn constant(&self, c: FElem) -> TElem {
        self.from_poly(&[c])
    }

    /// The element `c * t^i`.
    pub fn monomial(&self, c: FElem, i: usize) -> TElem {
        let mut v = vec![self.base.zero(); self.m + 1];
        if i <= self.m {
            v[i] = c;
        }
        TElem(v)
    }

    pub fn t(&self) -> TElem {
        self.monomial(self.base.one(), 1)
    }

    pub fn eval0(&self, a: &TElem) -> FElem {
        a.0[0].clone()
    }

    pub fn is_unit_elem(&self, a: &TElem) -> bool {
        !self.base.is_zero(&a.0[0])
    }

    pub fn inv(&self, a: &TElem) -> AlgebraResult<TElem> {
        let c0 = self
            .base
            .inv(&a.0[0])
            .ok_or(AlgebraError::NotAUnit)?;
        let f = &self.base;
        let mut out = vec![f.zero(); self.m + 1];
        out[0] = c0.clone();
        for n in 1..=self.m {
            let mut s = f.zero();
            for k in 1..=n {
                s = f.add(&s, &f.mul(&a.0[k], &out[n - k]));
            }
            out[n] = f.neg(&f.mul(&s, &c0));
        }
        Ok(TElem(out))
    }

    /// Substitute `t -> c t`.
    pub fn twist(&self, c: &FElem, a: &TElem) -> TElem {
        let f = &self.base;
        let mut pw = f.one();
        let mut out = Vec::with_capacity(self.m + 1);
        for coef in &a.0 {
            out.push(f.mul(coef, &pw));
            pw = f.mul(&pw, c);
        }
        TElem(out)
    }

    /// Substitute `t -> t^r`, staying in the same ring.
    pub fn substitute_power(&self, r: usize, a: &TElem) -> TElem {
        let mut out = vec![self.base.zero(); self.m + 1];
        for (i, c) in a.0.iter().enumerate() {
            if i * r <= self.m {
                out[i * r] = c.clone();
            }
        }
        TElem(out)
    }

    /// Reduce to a smaller truncation.
    pub fn restrict(&self, a: &TElem, m: usize) -> TElem {
        let mut v: Vec<FElem> = a.0.iter().take(m + 1).cloned().collect();
        v.resize(m + 1, self.base.zero());
        TElem(v)
    }

    /// Units of a finite truncated ring, in a fixed order.
    pub fn units(&self) -> Vec<TElem> {
        let elems = self.base.elements();
        let nonzero: Vec<FElem> = elems
            .iter()
            .filter(|c| !self.base.is_zero(c))
            .cloned()
            .collect();
        let mut out: Vec<Vec<FElem>> = nonzero.iter().map(|c| vec![c.clone()]).collect();
        for _ in 0..self.m {
            let mut next = Vec::new();
            for prefix in &out {
                for c in &elems {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(TElem).collect()
    }

    /// Units `1 + t*(...)`.
    pub fn one_units(&self) -> Vec<TElem> {
        self.units()
            .into_iter()
            .filter(|u| self.base.is_one(&u.0[0]))
            .collect()
    }
}

impl fmt::Display for TruncRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[t]/t^{}", self.base, self.m + 1)
    }
}

impl CommRing for TruncRing {
    type Elem = TElem;

    fn zero(&self) -> TElem {
        TElem(vec![self.base.zero(); self.m + 1])
    }
    fn one(&self) -> TElem {
        self.constant(self.base.one())
    }
    fn add(&self, a: &TElem, b: &TElem) -> TElem {
        TElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| self.base.add(x, y))
                .collect(),
        )
    }
    fn neg(&self, a: &TElem) -> TElem {
        TElem(a.0.iter().map(|x| self.base.neg(x)).collect())
    }
    fn mul(&self, a: &TElem, b: &TElem) -> TElem {
        let f = &self.base;
        let mut out = vec![f.zero(); self.m + 1];
        for (i, x) in a.0.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (j, y) in b.0.iter().enumerate().take(self.m + 1 - i) {
                if f.is_zero(y) {
                    continue;
                }
                out[i + j] = f.add(&out[i + j], &f.mul(x, y));
            }
        }
        TElem(out)
    }
    fn from_int(&self, n: i64) -> TElem {
        self.constant(self.base.from_int(n))
    }
    fn inv_int(&self, n: u64) -> Option<TElem> {
        self.base
            .inv(&self.base.from_int(n as i64))
            .map(|c| self.constant(c))
    }
    fn format(&self, a: &TElem) -> String {
        format!(
            "{} (mod t^{})",
            poly::format_poly(&self.base, &self.to_poly(a), "t"),
            self.m + 1
        )
    }
    fn describe(&self) -> String {
        self.to_string()
    }
}

impl UnitRing for TruncRing {
    fn inverse(&self, a: &TElem) -> Option<TElem> {
        self.inv(a).ok()
    }
    fn is_unit(&self, a: &TElem) -> bool {
        self.is_unit_elem(a)
    }
    fn is_one_mod_t(&self, a: &TElem) -> bool {
        self.base.is_one(&a.0[0])
    }
    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_inverse_is_exact() {
        let q = Field::rationals();
        let r = TruncRing::new(q.clone(), 5);
        let u = r.from_poly(&[q.from_int(2), q.from_int(-3), q.from_int(1)]);
        let v = r.inv(&u).unwrap();
        assert_eq!(r.mul(&u, &v), r.one());
    }

    #[test]
    fn non_units_rejected() {
        let f = Field::prime(3).unwrap();
        let r = TruncRing::new(f, 2);
        assert_eq!(r.inv(&r.t()), Err(AlgebraError::NotAUnit));
    }

    #[test]
    fn unit_counts() {
        let f = Field::prime(3).unwrap();
        let r = TruncRing::new(f, 1);
        assert_eq!(r.units().len(), 6);
        assert_eq!(r.one_units().len(), 3);
    }

    #[test]
    fn twist_is_an_action() {
        let f = Field::prime(7).unwrap();
        let r = TruncRing::new(f.clone(), 3);
        let u = r.from_poly(&[f.from_int(3), f.from_int(1), f.from_int(5), f.from_int(2)]);
        let a = f.from_int(3);
        let b = f.from_int(5);
        assert_eq!(r.twist(&a, &r.twist(&b, &u)), r.twist(&f.mul(&a, &b), &u));
        assert_eq!(r.twist(&f.one(), &u), u);
    }
}
