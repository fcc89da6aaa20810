//! Context-object traits for commutative rings.
//!
//! A ring value carries whatever runtime data its elements need (a prime,
//! a modulus, a list of variable names); elements are plain data and all
//! arithmetic goes through the ring.

use std::fmt::Debug;
use std::hash::Hash;

pub trait CommRing: Clone + Debug + PartialEq {
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Ord;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_int(&self, n: i64) -> Self::Elem;

    /// Inverse of the integer `n` in this ring, if it exists.
    fn inv_int(&self, n: u64) -> Option<Self::Elem>;

    fn format(&self, a: &Self::Elem) -> String;
    fn describe(&self) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
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

    fn scale_int(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        self.mul(&self.from_int(n), a)
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// Rings in which units can be recognised and inverted.
pub trait UnitRing: CommRing {
    fn inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_unit(&self, a: &Self::Elem) -> bool {
        self.inverse(a).is_some()
    }

    /// True when `a` lies in `1 + (t)`; fields have no such ideal.
    fn is_one_mod_t(&self, _a: &Self::Elem) -> bool {
        false
    }

    fn characteristic(&self) -> u64;
}
