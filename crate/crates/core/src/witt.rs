//! Truncated big Witt vectors.
//!
//! A vector of length `m` is stored through its coordinates `(alpha_i)` in
//! the factorization `prod (1 - alpha_i t^i)` of its unit series. With this
//! convention the ghost components are `w_n = sum_{d | n} d * alpha_d^{n/d}`,
//! i.e. the ghost-formula coordinates coincide with the `alpha_i` and the
//! ghost map is the coefficient sequence of `-t d/dt log`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::algebra::CommRing;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WittError {
    #[error("unit series must have constant term 1")]
    NotAOneUnit,
    #[error("truncation set {0:?} is not closed under divisors")]
    NotDivisorClosed(Vec<usize>),
    #[error("truncation set is empty")]
    EmptyTruncation,
    #[error("{0:?} is not a subset of the source truncation set")]
    NotASubset(Vec<usize>),
    #[error("operation needs a full truncation set {{1..m}}")]
    NotFullTruncation,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("integer {0} is not invertible in the coefficient ring")]
    NonInvertibleInteger(u64),
    #[error("target length {target} is too long for source length {from}")]
    TargetTooLong { from: usize, target: usize },
}

pub type WittResult<T> = Result<T, WittError>;

/// A finite set of positive integers closed under divisors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncationSet(BTreeSet<usize>);

impl TruncationSet {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> WittResult<Self> {
        let set: BTreeSet<usize> = members.into_iter().filter(|&n| n > 0).collect();
        if set.is_empty() {
            return Err(WittError::EmptyTruncation);
        }
        for &n in &set {
            for d in 1..n {
                if n % d == 0 && !set.contains(&d) {
                    return Err(WittError::NotDivisorClosed(set.into_iter().collect()));
                }
            }
        }
        Ok(TruncationSet(set))
    }

    pub fn full(m: usize) -> Self {
        TruncationSet((1..=m).collect())
    }

    /// `{1, p, ..., p^k}`.
    pub fn p_typical(p: usize, k: u32) -> Self {
        TruncationSet((0..=k).map(|e| p.pow(e)).collect())
    }

    pub fn members(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }

    pub fn contains(&self, n: usize) -> bool {
        self.0.contains(&n)
    }

    pub fn max(&self) -> usize {
        *self.0.iter().next_back().unwrap()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.max() == self.0.len()
    }

    pub fn is_subset(&self, other: &TruncationSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

/// Coordinates indexed by the members of `trunc` in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittVector<E> {
    pub trunc: TruncationSet,
    pub coords: Vec<E>,
}

impl<E: Clone> WittVector<E> {
    pub fn full(coords: Vec<E>) -> Self {
        WittVector {
            trunc: TruncationSet::full(coords.len()),
            coords,
        }
    }

    /// Length `m` of a full truncation.
    pub fn len(&self) -> usize {
        self.trunc.max()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate at index `n` of the truncation set.
    pub fn coord(&self, n: usize) -> Option<&E> {
        self.trunc
            .members()
            .iter()
            .position(|&k| k == n)
            .map(|i| &self.coords[i])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LogSign {
    /// `Log(1 + tg) = sum (1/i) (-tg)^i`.
    #[default]
    Printed,
    /// The usual `log(1 + tg) = sum (-1)^{i+1} (tg)^i / i`.
    Classical,
}

/// Power series operations truncated after `t^m`.
pub mod series {
    use crate::algebra::CommRing;

    pub fn one<R: CommRing>(ring: &R, m: usize) -> Vec<R::Elem> {
        let mut v = vec![ring.zero(); m + 1];
        v[0] = ring.one();
        v
    }

    pub fn truncate<R: CommRing>(ring: &R, a: &[R::Elem], m: usize) -> Vec<R::Elem> {
        let mut v: Vec<R::Elem> = a.iter().take(m + 1).cloned().collect();
        v.resize(m + 1, ring.zero());
        v
    }

    pub fn mul<R: CommRing>(ring: &R, a: &[R::Elem], b: &[R::Elem], m: usize) -> Vec<R::Elem> {
        let mut out = vec![ring.zero(); m + 1];
        for (i, x) in a.iter().enumerate().take(m + 1) {
            if ring.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(m + 1 - i) {
                if ring.is_zero(y) {
                    continue;
                }
                out[i + j] = ring.add(&out[i + j], &ring.mul(x, y));
            }
        }
        out
    }

    pub fn add<R: CommRing>(ring: &R, a: &[R::Elem], b: &[R::Elem], m: usize) -> Vec<R::Elem> {
        let a = truncate(ring, a, m);
        let b = truncate(ring, b, m);
        a.iter().zip(&b).map(|(x, y)| ring.add(x, y)).collect()
    }

    pub fn scale<R: CommRing>(ring: &R, a: &[R::Elem], c: &R::Elem) -> Vec<R::Elem> {
        a.iter().map(|x| ring.mul(x, c)).collect()
    }

    /// Inverse of a series with constant term 1.
    pub fn inv_one_unit<R: CommRing>(ring: &R, a: &[R::Elem], m: usize) -> Vec<R::Elem> {
        let a = truncate(ring, a, m);
        let mut out = vec![ring.zero(); m + 1];
        out[0] = ring.one();
        for n in 1..=m {
            let mut s = ring.zero();
            for k in 1..=n {
                s = ring.add(&s, &ring.mul(&a[k], &out[n - k]));
            }
            out[n] = ring.neg(&s);
        }
        out
    }

    pub fn pow<R: CommRing>(ring: &R, a: &[R::Elem], e: u64, m: usize) -> Vec<R::Elem> {
        let mut acc = one(ring, m);
        for _ in 0..e {
            acc = mul(ring, &acc, a, m);
        }
        acc
    }

    /// `1 - c t^d`.
    pub fn binomial<R: CommRing>(ring: &R, c: &R::Elem, d: usize, m: usize) -> Vec<R::Elem> {
        let mut v = one(ring, m);
        if d <= m {
            v[d] = ring.neg(c);
        }
        v
    }

    /// Multiply by `(1 - c t^d)^{-1} = sum c^k t^{dk}`.
    pub fn divide_binomial<R: CommRing>(
        ring: &R,
        a: &[R::Elem],
        c: &R::Elem,
        d: usize,
        m: usize,
    ) -> Vec<R::Elem> {
        let mut out = truncate(ring, a, m);
        // out = a + c t^d out, solved in increasing degree
        for n in d..=m {
            let add = ring.mul(c, &out[n - d]);
            out[n] = ring.add(&out[n], &add);
        }
        out
    }

    /// Substitute `t -> t^r`.
    pub fn substitute_power<R: CommRing>(ring: &R, a: &[R::Elem], r: usize, m: usize) -> Vec<R::Elem> {
        let mut out = vec![ring.zero(); m + 1];
        for (i, c) in a.iter().enumerate() {
            if i * r <= m {
                out[i * r] = c.clone();
            }
        }
        out
    }
}

/// Witt vector arithmetic over a fixed coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct WittRing<R: CommRing> {
    pub ring: R,
}

impl<R: CommRing> WittRing<R> {
    pub fn new(ring: R) -> Self {
        WittRing { ring }
    }

    fn check_full(&self, w: &WittVector<R::Elem>) -> WittResult<usize> {
        if w.trunc.is_full() {
            Ok(w.trunc.max())
        } else {
            Err(WittError::NotFullTruncation)
        }
    }

    fn check_same(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> WittResult<usize> {
        let m = self.check_full(x)?;
        let n = self.check_full(y)?;
        if m != n {
            return Err(WittError::LengthMismatch(m, n));
        }
        Ok(m)
    }

    pub fn zero(&self, m: usize) -> WittVector<R::Elem> {
        WittVector::full(vec![self.ring.zero(); m])
    }

    pub fn one(&self, m: usize) -> WittVector<R::Elem> {
        self.teichmuller(&self.ring.one(), m)
    }

    pub fn teichmuller(&self, a: &R::Elem, m: usize) -> WittVector<R::Elem> {
        let mut coords = vec![self.ring.zero(); m];
        if m > 0 {
            coords[0] = a.clone();
        }
        WittVector::full(coords)
    }

    /// Coordinates of a unit series `u = 1 + ...` of length `m + 1`.
    pub fn from_series(&self, u: &[R::Elem], m: usize) -> WittResult<WittVector<R::Elem>> {
        let ring = &self.ring;
        let u = series::truncate(ring, u, m);
        if !ring.is_one(&u[0]) {
            return Err(WittError::NotAOneUnit);
        }
        let mut residual = u;
        let mut coords = Vec::with_capacity(m);
        for i in 1..=m {
            let alpha = ring.neg(&residual[i]);
            if !ring.is_zero(&alpha) {
                residual = series::divide_binomial(ring, &residual, &alpha, i, m);
            }
            coords.push(alpha);
        }
        Ok(WittVector::full(coords))
    }

    pub fn to_series(&self, w: &WittVector<R::Elem>) -> WittResult<Vec<R::Elem>> {
        let m = self.check_full(w)?;
        Ok(self.series_of_coords(&w.coords, m))
    }

    fn series_of_coords(&self, coords: &[R::Elem], m: usize) -> Vec<R::Elem> {
        let ring = &self.ring;
        let mut acc = series::one(ring, m);
        for (i, a) in coords.iter().enumerate() {
            if !ring.is_zero(a) {
                acc = series::mul(ring, &acc, &series::binomial(ring, a, i + 1, m), m);
            }
        }
        acc
    }

    /// Ghost components `w_n` for `n` in the truncation set.
    pub fn ghost(&self, w: &WittVector<R::Elem>) -> Vec<R::Elem> {
        let ring = &self.ring;
        let members = w.trunc.members();
        members
            .iter()
            .map(|&n| {
                let mut s = ring.zero();
                for (k, &d) in members.iter().enumerate() {
                    if n % d == 0 {
                        let term = ring.pow(&w.coords[k], (n / d) as u64);
                        s = ring.add(&s, &ring.scale_int(&term, d as i64));
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> WittResult<WittVector<R::Elem>> {
        let m = self.check_same(x, y)?;
        let s = series::mul(&self.ring, &self.to_series(x)?, &self.to_series(y)?, m);
        self.from_series(&s, m)
    }

    pub fn neg(&self, x: &WittVector<R::Elem>) -> WittResult<WittVector<R::Elem>> {
        let m = self.check_full(x)?;
        let s = series::inv_one_unit(&self.ring, &self.to_series(x)?, m);
        self.from_series(&s, m)
    }

    pub fn sub(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> WittResult<WittVector<R::Elem>> {
        self.add(x, &self.neg(y)?)
    }

    /// `n * x` for an integer `n`.
    pub fn scale_int(&self, x: &WittVector<R::Elem>, n: i64) -> WittResult<WittVector<R::Elem>> {
        let m = self.check_full(x)?;
        let s = self.to_series(x)?;
        let p = series::pow(&self.ring, &s, n.unsigned_abs(), m);
        let p = if n < 0 {
            series::inv_one_unit(&self.ring, &p, m)
        } else {
            p
        };
        self.from_series(&p, m)
    }

    /// Product via `(1 - a t^i) * (1 - b t^j) = (1 - a^{j/g} b^{i/g} t^{ij/g})^g`.
    pub fn mul(&self, x: &WittVector<R::Elem>, y: &WittVector<R::Elem>) -> WittResult<WittVector<R::Elem>> {
        let m = self.check_same(x, y)?;
        let ring = &self.ring;
        let mut acc = series::one(ring, m);
        for (i0, a) in x.coords.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            let i = i0 + 1;
            for (j0, b) in y.coords.iter().enumerate() {
                if ring.is_zero(b) {
                    continue;
                }
                let j = j0 + 1;
                let g = i.gcd(&j);
                let deg = i * j / g;
                if deg > m {
                    continue;
                }
                let c = ring.mul(&ring.pow(a, (j / g) as u64), &ring.pow(b, (i / g) as u64));
                let factor = series::pow(ring, &series::binomial(ring, &c, deg, m), g as u64, m);
                acc = series::mul(ring, &acc, &factor, m);
            }
        }
        self.from_series(&acc, m)
    }

    /// `V_r` into length `target`; the natural target is `r m + r - 1`.
    pub fn verschiebung(&self, r: usize, w: &WittVector<R::Elem>, target: usize) -> WittResult<WittVector<R::Elem>> {
        let m = self.check_full(w)?;
        if target > r * m + r - 1 {
            return Err(WittError::TargetTooLong { from: m, target });
        }
        let mut coords = vec![self.ring.zero(); target];
        for (i, a) in w.coords.iter().enumerate() {
            let slot = r * (i + 1);
            if slot <= target {
                coords[slot - 1] = a.clone();
            }
        }
        Ok(WittVector::full(coords))
    }

    pub fn verschiebung_natural(&self, r: usize, w: &WittVector<R::Elem>) -> WittResult<WittVector<R::Elem>> {
        let m = self.check_full(w)?;
        self.verschiebung(r, w, r * m + r - 1)
    }

    /// `F_r` into length `floor(M / r)`, via `F_r(1 - a t^s) = (1 - a^{r/g} t^{s/g})^g`.
    pub fn frobenius(&self, r: usize, w: &WittVector<R::Elem>) -> WittResult<WittVector<R::Elem>> {
        let big = self.check_full(w)?;
        let m = big / r;
        let ring = &self.ring;
        let mut acc = series::one(ring, m);
        for (s0, a) in w.coords.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            let s = s0 + 1;
            let g = r.gcd(&s);
            let deg = s / g;
            if deg > m {
                continue;
            }
            let c = ring.pow(a, (r / g) as u64);
            let factor = series::pow(ring, &series::binomial(ring, &c, deg, m), g as u64, m);
            acc = series::mul(ring, &acc, &factor, m);
        }
        self.from_series(&acc, m)
    }

    /// Coordinate projection onto a smaller truncation set.
    pub fn restrict(&self, w: &WittVector<R::Elem>, target: &TruncationSet) -> WittResult<WittVector<R::Elem>> {
        if !target.is_subset(&w.trunc) {
            return Err(WittError::NotASubset(target.members()));
        }
        let coords = target
            .members()
            .iter()
            .map(|&n| w.coord(n).cloned().expect("subset member"))
            .collect();
        Ok(WittVector {
            trunc: target.clone(),
            coords,
        })
    }

    /// Restriction `{1..m} -> {1..k}`.
    pub fn truncate(&self, w: &WittVector<R::Elem>, k: usize) -> WittResult<WittVector<R::Elem>> {
        self.restrict(w, &TruncationSet::full(k))
    }

    pub fn format(&self, w: &WittVector<R::Elem>) -> String {
        let coords: Vec<String> = w.coords.iter().map(|c| self.ring.format(c)).collect();
        if w.trunc.is_full() {
            format!("W{{m={}; [{}]}}", w.trunc.max(), coords.join(", "))
        } else {
            let members: Vec<String> = w.trunc.members().iter().map(|n| n.to_string()).collect();
            format!("W{{S={{{}}}; [{}]}}", members.join(","), coords.join(", "))
        }
    }

    pub fn format_series(&self, s: &[R::Elem]) -> String {
        format_series(&self.ring, s)
    }

    fn integer_inverses(&self, m: usize) -> WittResult<Vec<R::Elem>> {
        (1..=m as u64)
            .map(|i| self.ring.inv_int(i).ok_or(WittError::NonInvertibleInteger(i)))
            .collect()
    }

    /// `Log(u)` of a unit series `u = 1 + tg`, truncated after `t^m`.
    pub fn formal_log(&self, u: &[R::Elem], m: usize, sign: LogSign) -> WittResult<Vec<R::Elem>> {
        let ring = &self.ring;
        let u = series::truncate(ring, u, m);
        if !ring.is_one(&u[0]) {
            return Err(WittError::NotAOneUnit);
        }
        let invs = self.integer_inverses(m)?;
        // n l_n = n u_n - sum_{k<n} k l_k u_{n-k}, with l = log u
        let mut out = vec![ring.zero(); m + 1];
        let mut nl = vec![ring.zero(); m + 1];
        for n in 1..=m {
            let mut acc = ring.scale_int(&u[n], n as i64);
            for k in 1..n {
                acc = ring.sub(&acc, &ring.mul(&nl[k], &u[n - k]));
            }
            out[n] = ring.mul(&acc, &invs[n - 1]);
            nl[n] = acc;
        }
        if sign == LogSign::Printed {
            out = out.iter().map(|c| ring.neg(c)).collect();
        }
        Ok(out)
    }

    /// Compositional inverse of [`formal_log`](Self::formal_log).
    pub fn formal_exp(&self, y: &[R::Elem], m: usize, sign: LogSign) -> WittResult<Vec<R::Elem>> {
        let ring = &self.ring;
        let y = series::truncate(ring, y, m);
        if !ring.is_zero(&y[0]) {
            return Err(WittError::NotAOneUnit);
        }
        let invs = self.integer_inverses(m)?;
        let arg: Vec<R::Elem> = match sign {
            LogSign::Printed => y.iter().map(|c| ring.neg(c)).collect(),
            LogSign::Classical => y,
        };
        // n e_n = sum_{k=1}^n k y_k e_{n-k}
        let ky: Vec<R::Elem> = arg.iter().enumerate().map(|(k, c)| ring.scale_int(c, k as i64)).collect();
        let mut out = series::one(ring, m);
        for n in 1..=m {
            let mut acc = ring.zero();
            for k in 1..=n {
                if !ring.is_zero(&ky[k]) {
                    acc = ring.add(&acc, &ring.mul(&ky[k], &out[n - k]));
                }
            }
            out[n] = ring.mul(&acc, &invs[n - 1]);
        }
        Ok(out)
    }
}

pub fn format_series<R: CommRing>(ring: &R, s: &[R::Elem]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in s.iter().enumerate() {
        if ring.is_zero(c) {
            continue;
        }
        let cs = ring.format(c);
        let mono = match i {
            0 => String::new(),
            1 => "t".to_string(),
            _ => format!("t^{i}"),
        };
        let wrapped = crate::algebra::poly::wrap_if_compound(&cs);
        let term = if i == 0 {
            wrapped
        } else if cs == "1" {
            mono
        } else if cs == "-1" {
            format!("-{mono}")
        } else {
            format!("{wrapped}*{mono}")
        };
        parts.push(term);
    }
    if parts.is_empty() {
        return "0".to_string();
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

impl<E: fmt::Debug> fmt::Display for WittVector<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{:?}{:?}", self.trunc.members(), self.coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Field, UniversalRing};

    fn f2() -> Field {
        Field::prime(2).unwrap()
    }

    #[test]
    fn truncation_sets_must_be_divisor_closed() {
        assert!(TruncationSet::new([1, 2, 4]).is_ok());
        assert_eq!(
            TruncationSet::new([1, 4]),
            Err(WittError::NotDivisorClosed(vec![1, 4]))
        );
        assert!(TruncationSet::p_typical(3, 2).contains(9));
    }

    #[test]
    fn series_round_trip_over_f2() {
        let k = f2();
        let w = WittRing::new(k.clone());
        let u = vec![k.one(), k.one(), k.one()];
        let v = w.from_series(&u, 2).unwrap();
        assert_eq!(v.coords, vec![k.one(), k.one()]);
        assert_eq!(w.to_series(&v).unwrap(), u);
    }

    #[test]
    fn non_one_units_rejected() {
        let k = f2();
        let w = WittRing::new(k.clone());
        assert_eq!(w.from_series(&[k.zero(), k.one()], 1), Err(WittError::NotAOneUnit));
    }

    #[test]
    fn ghost_of_two_coordinates() {
        let z = UniversalRing::new(&["a1", "a2"]);
        let w = WittRing::new(z.clone());
        let v = WittVector::full(vec![z.var(0), z.var(1)]);
        let g = w.ghost(&v);
        let expect = z.add(&z.mul(&z.var(0), &z.var(0)), &z.scale_int(&z.var(1), 2));
        assert_eq!(g[1], expect);
    }

    #[test]
    fn star_rule_with_common_factor() {
        let z = UniversalRing::new(&["a", "b"]);
        let w = WittRing::new(z.clone());
        let mut x = vec![z.zero(); 4];
        x[1] = z.var(0);
        let mut y = vec![z.zero(); 4];
        y[1] = z.var(1);
        let prod = w.mul(&WittVector::full(x), &WittVector::full(y)).unwrap();
        let ab = z.mul(&z.var(0), &z.var(1));
        let expect = series::pow(&z, &series::binomial(&z, &ab, 2, 4), 2, 4);
        assert_eq!(w.to_series(&prod).unwrap(), expect);
    }

    #[test]
    fn teichmuller_plus_negative_vanishes_in_length_one() {
        let q = Field::rationals();
        let w = WittRing::new(q.clone());
        let a = q.from_int(5);
        let s = w.add(&w.teichmuller(&a, 1), &w.teichmuller(&q.neg(&a), 1)).unwrap();
        assert_eq!(s, w.zero(1));
    }

    #[test]
    fn log_of_simple_unit() {
        let q = Field::rationals();
        let w = WittRing::new(q.clone());
        let a = q.from_int(3);
        let u = vec![q.one(), q.neg(&q.inv(&a).unwrap()), q.zero()];
        let l = w.formal_log(&u, 2, LogSign::Printed).unwrap();
        let expect = vec![
            q.zero(),
            q.inv(&a).unwrap(),
            q.inv(&q.from_int(18)).unwrap(),
        ];
        assert_eq!(l, expect);
        assert_eq!(w.formal_exp(&l, 2, LogSign::Printed).unwrap(), u);
    }

    #[test]
    fn log_needs_invertible_integers() {
        let k = Field::prime(3).unwrap();
        let w = WittRing::new(k.clone());
        let u = series::one(&k, 3);
        assert_eq!(
            w.formal_log(&u, 3, LogSign::Printed),
            Err(WittError::NonInvertibleInteger(3))
        );
    }

    #[test]
    fn verschiebung_then_frobenius_is_multiplication() {
        let k = Field::prime(7).unwrap();
        let w = WittRing::new(k.clone());
        let x = WittVector::full(vec![k.from_int(3), k.from_int(2), k.from_int(5)]);
        let v = w.verschiebung_natural(2, &x).unwrap();
        assert_eq!(v.len(), 7);
        assert_eq!(w.frobenius(2, &v).unwrap(), w.scale_int(&x, 2).unwrap());
    }

    #[test]
    fn formatting() {
        let k = Field::prime(5).unwrap();
        let w = WittRing::new(k.clone());
        let t = w.teichmuller(&k.from_int(3), 4);
        assert_eq!(w.format(&t), "W{m=4; [3, 0, 0, 0]}");
        assert_eq!(w.format_series(&w.to_series(&t).unwrap()), "1 + 2*t");
    }
}
