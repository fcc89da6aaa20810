//! The universal coefficient ring `Z[a1, ..., av]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::ring::CommRing;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniversalRing {
    pub vars: Vec<String>,
}

/// Sparse polynomial keyed by exponent vectors in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MPoly(pub BTreeMap<Vec<u32>, BigInt>);

impl UniversalRing {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Self {
        UniversalRing {
            vars: vars.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    /// `Z[a1..an, b1..bn]`.
    pub fn paired(n: usize) -> Self {
        let mut vars: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
        vars.extend((1..=n).map(|i| format!("b{i}")));
        UniversalRing { vars }
    }

    pub fn var(&self, i: usize) -> MPoly {
        let mut e = vec![0; self.vars.len()];
        e[i] = 1;
        let mut m = BTreeMap::new();
        m.insert(e, BigInt::one());
        MPoly(m)
    }

    pub fn var_named(&self, name: &str) -> Option<MPoly> {
        self.vars.iter().position(|v| v == name).map(|i| self.var(i))
    }

    pub fn constant(&self, c: BigInt) -> MPoly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(vec![0; self.vars.len()], c);
        }
        MPoly(m)
    }

    pub fn num_terms(a: &MPoly) -> usize {
        a.0.len()
    }

    /// Random polynomial with at most `terms` terms of total degree <= `deg`.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R, terms: usize, deg: u32, height: i64) -> MPoly {
        let mut acc = self.zero();
        for _ in 0..terms {
            let mut e = vec![0u32; self.vars.len()];
            let d = rng.gen_range(0..=deg);
            for _ in 0..d {
                let i = rng.gen_range(0..self.vars.len());
                e[i] += 1;
            }
            let c = rng.gen_range(-height..=height);
            let mut m = BTreeMap::new();
            if c != 0 {
                m.insert(e, BigInt::from(c));
            }
            acc = self.add(&acc, &MPoly(m));
        }
        acc
    }

    /// Integer value if the polynomial is constant.
    pub fn as_constant(&self, a: &MPoly) -> Option<BigInt> {
        match a.0.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = a.0.iter().next().unwrap();
                if e.iter().all(|&x| x == 0) {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for UniversalRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[{}]", self.vars.join(","))
    }
}

impl CommRing for UniversalRing {
    type Elem = MPoly;

    fn zero(&self) -> MPoly {
        MPoly(BTreeMap::new())
    }
    fn one(&self) -> MPoly {
        self.constant(BigInt::one())
    }
    fn add(&self, a: &MPoly, b: &MPoly) -> MPoly {
        let mut out = a.0.clone();
        for (e, c) in &b.0 {
            let entry = out.entry(e.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                out.remove(e);
            }
        }
        MPoly(out)
    }
    fn neg(&self, a: &MPoly) -> MPoly {
        MPoly(a.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }
    fn mul(&self, a: &MPoly, b: &MPoly) -> MPoly {
        let mut out: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &a.0 {
            for (e2, c2) in &b.0 {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
                let entry = out.entry(e).or_insert_with(BigInt::zero);
                *entry += c1 * c2;
            }
        }
        out.retain(|_, c| !c.is_zero());
        MPoly(out)
    }
    fn from_int(&self, n: i64) -> MPoly {
        self.constant(BigInt::from(n))
    }
    fn inv_int(&self, n: u64) -> Option<MPoly> {
        if n == 1 {
            Some(self.one())
        } else {
            None
        }
    }
    fn format(&self, a: &MPoly) -> String {
        if a.0.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in a.0.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], x)
                    }
                })
                .collect();
            let mono = mono.join("*");
            let term = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono
            } else if *c == -BigInt::one() {
                format!("-{mono}")
            } else {
                format!("{c}*{mono}")
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
    fn describe(&self) -> String {
        self.to_string()
    }
    fn is_zero(&self, a: &MPoly) -> bool {
        a.0.is_empty()
    }
}

impl MPoly {
    pub fn is_negative_constant(&self) -> bool {
        self.0.len() == 1 && self.0.values().next().unwrap().is_negative()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_laws_on_small_polys() {
        let r = UniversalRing::new(&["a", "b"]);
        let a = r.var(0);
        let b = r.var(1);
        let s = r.add(&a, &b);
        let sq = r.mul(&s, &s);
        let expect = r.add(
            &r.add(&r.mul(&a, &a), &r.scale_int(&r.mul(&a, &b), 2)),
            &r.mul(&b, &b),
        );
        assert_eq!(sq, expect);
        assert_eq!(r.format(&expect), "a^2 + 2*a*b + b^2");
        assert!(r.is_zero(&r.sub(&s, &s)));
    }
}
