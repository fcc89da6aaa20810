//! Milnor K-symbols over fields and truncated polynomial rings.
//!
//! A [`SymbolSum`] is a formal integer combination of symbols
//! `{a_1, ..., a_n}`. Rewrites only apply identities that hold in the
//! Milnor K-group of a local ring; the guards below make sure the unit
//! conditions the standard proofs need are actually met.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{factor, poly, AlgebraError, CommRing, FElem, Field, TElem, TruncRing, UnitRing};
use crate::forms::{Form, FormResult, FormSpace};
use crate::witt::{WittError, WittRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MilnorError {
    #[error("entry {0} is not a unit")]
    NotAUnit(String),
    #[error("factors do not multiply to a unit entry in slot {0}")]
    NotAUnitFactor(usize),
    #[error("symbol lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("slot {slot} is out of range for symbols of length {len}")]
    BadSlot { slot: usize, len: usize },
    #[error("the value at t = 0 is nonzero")]
    NotRelative,
    #[error("cannot decide whether the value at t = 0 vanishes")]
    Undecided,
    #[error("term has no entry congruent to 1 mod t")]
    NoVanishingSlot,
    #[error("improved representatives did not stabilise after {0} rounds")]
    IterationCap(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Witt(#[from] WittError),
}

pub type MilnorResult<T> = Result<T, MilnorError>;

/// How far a sum has been normalised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Normalization {
    #[default]
    Raw,
    SteinbergOnly,
    Rewritten,
}

/// Integer combination of symbols of a common length `n`.
#[derive(Clone, Debug, Eq, Hash)]
pub struct SymbolSum<E: Ord> {
    n: usize,
    terms: BTreeMap<Vec<E>, i64>,
    pub state: Normalization,
}

impl<E: Ord> PartialEq for SymbolSum<E> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl<E: Ord + Clone> SymbolSum<E> {
    pub fn zero(n: usize) -> Self {
        SymbolSum {
            n,
            terms: BTreeMap::new(),
            state: Normalization::Raw,
        }
    }

    pub fn single(entries: Vec<E>) -> Self {
        let mut s = Self::zero(entries.len());
        s.add_term(entries, 1);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<E>, i64)>>(n: usize, terms: I) -> MilnorResult<Self> {
        let mut s = Self::zero(n);
        for (entries, c) in terms {
            if entries.len() != n {
                return Err(MilnorError::LengthMismatch(n, entries.len()));
            }
            s.add_term(entries, c);
        }
        Ok(s)
    }

    /// Symbol length.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<E>, i64)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn coefficient(&self, entries: &[E]) -> i64 {
        self.terms.get(entries).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, entries: Vec<E>, c: i64) {
        debug_assert_eq!(entries.len(), self.n);
        if c == 0 {
            return;
        }
        match self.terms.entry(entries) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
        self.state = Normalization::Raw;
    }

    pub fn add(&self, other: &Self) -> MilnorResult<Self> {
        if self.n != other.n && !self.is_zero() && !other.is_zero() {
            return Err(MilnorError::LengthMismatch(self.n, other.n));
        }
        let mut out = if self.is_zero() { other.clone() } else { self.clone() };
        let rest = if self.is_zero() { &Self::zero(other.n) } else { other };
        for (k, v) in rest.terms() {
            out.add_term(k.clone(), v);
        }
        out.state = Normalization::Raw;
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn sub(&self, other: &Self) -> MilnorResult<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: i64) -> Self {
        let mut out = Self::zero(self.n);
        if c != 0 {
            for (k, v) in self.terms() {
                out.terms.insert(k.clone(), v * c);
            }
        }
        out
    }

    pub fn map_entries<F, E2: Ord + Clone>(&self, mut f: F) -> SymbolSum<E2>
    where
        F: FnMut(&E) -> E2,
    {
        let mut out = SymbolSum::zero(self.n);
        for (k, v) in self.terms() {
            out.add_term(k.iter().map(&mut f).collect(), v);
        }
        out
    }
}

/// Render a sum with a custom entry printer.
pub fn format_sum<E: Ord + Clone, F: Fn(&E) -> String>(s: &SymbolSum<E>, entry: F) -> String {
    if s.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (k, c)) in s.terms().enumerate() {
        let body = format!(
            "{{{}}}",
            k.iter().map(&entry).collect::<Vec<_>>().join(", ")
        );
        let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
        if i == 0 {
            if sign == "-" {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if mag != 1 {
            out.push_str(&format!("{mag}*"));
        }
        out.push_str(&body);
    }
    out
}

/// Entry printer for `k_{m+1}`: a polynomial in `t` without the modulus.
pub fn format_telem(ring: &TruncRing, a: &TElem) -> String {
    poly::format_poly(&ring.base, &ring.to_poly(a), "t")
}

impl<E: Ord + Clone + fmt::Debug> fmt::Display for SymbolSum<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_sum(self, |e| format!("{e:?}")))
    }
}

/// Slots whose entry is `1 mod t`.
pub fn relative_tag<R: UnitRing>(ring: &R, entries: &[R::Elem]) -> Vec<usize> {
    entries
        .iter()
        .enumerate()
        .filter(|(_, e)| ring.is_one_mod_t(e))
        .map(|(i, _)| i)
        .collect()
}

pub fn check_units<R: UnitRing>(ring: &R, s: &SymbolSum<R::Elem>) -> MilnorResult<()> {
    for (k, _) in s.terms() {
        for e in k {
            if !ring.is_unit(e) {
                return Err(MilnorError::NotAUnit(ring.format(e)));
            }
        }
    }
    Ok(())
}

/// Replace `{.., u_1 ... u_r, ..}` by `sum_j {.., u_j, ..}` in every term
/// whose entry in `slot` equals the product of `factors`.
pub fn expand_multilinear<R: UnitRing>(
    ring: &R,
    s: &SymbolSum<R::Elem>,
    slot: usize,
    factors: &[R::Elem],
) -> MilnorResult<SymbolSum<R::Elem>> {
    if slot >= s.n() {
        return Err(MilnorError::BadSlot { slot, len: s.n() });
    }
    if factors.iter().any(|u| !ring.is_unit(u)) {
        return Err(MilnorError::NotAUnitFactor(slot));
    }
    let product = factors.iter().fold(ring.one(), |acc, u| ring.mul(&acc, u));
    let mut out = SymbolSum::zero(s.n());
    let mut hit = false;
    for (k, c) in s.terms() {
        if k[slot] == product {
            hit = true;
            for u in factors {
                let mut e = k.clone();
                e[slot] = u.clone();
                out.add_term(e, c);
            }
        } else {
            out.add_term(k.clone(), c);
        }
    }
    if !hit && !s.is_zero() {
        return Err(MilnorError::NotAUnitFactor(slot));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RewriteOptions {
    /// Only delete adjacent Steinberg pairs and trivial entries.
    pub steinberg_only: bool,
}

fn one_minus<R: UnitRing>(ring: &R, a: &R::Elem) -> R::Elem {
    ring.sub(&ring.one(), a)
}

fn swap_allowed<R: UnitRing>(ring: &R, x: &R::Elem, y: &R::Elem) -> bool {
    let xy = ring.mul(x, y);
    ring.is_unit(&one_minus(ring, x))
        && ring.is_unit(&one_minus(ring, y))
        && (ring.is_unit(&one_minus(ring, &xy)) || ring.is_one(&xy))
}

/// Normalise a single term: `None` when it vanishes, otherwise the new
/// entries with a sign.
fn rewrite_term<R: UnitRing>(ring: &R, entries: &[R::Elem], opts: RewriteOptions) -> Option<(Vec<R::Elem>, i64)> {
    if entries.iter().any(|e| ring.is_one(e)) {
        return None;
    }
    let steinberg = |e: &[R::Elem]| {
        e.windows(2).any(|w| {
            ring.is_unit(&one_minus(ring, &w[0])) && w[1] == one_minus(ring, &w[0])
        })
    };
    if steinberg(entries) {
        return None;
    }
    if opts.steinberg_only {
        return Some((entries.to_vec(), 1));
    }
    let minus_one = ring.neg(&ring.one());
    let has_one_unit = entries.iter().any(|e| ring.is_one_mod_t(e));
    if has_one_unit && entries.iter().any(|e| *e == minus_one) {
        return None;
    }
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let a = &entries[i];
            if entries[j] == ring.neg(a) && ring.is_unit(&one_minus(ring, a)) {
                return None;
            }
        }
    }
    let mut e = entries.to_vec();
    let mut sign = 1;
    loop {
        let mut swapped = false;
        for i in 0..e.len().saturating_sub(1) {
            if e[i + 1] < e[i] && swap_allowed(ring, &e[i], &e[i + 1]) {
                e.swap(i, i + 1);
                sign = -sign;
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
    if steinberg(&e) {
        return None;
    }
    Some((e, sign))
}

/// Apply the basic identities term by term.
pub fn rewrite_basic<R: UnitRing>(ring: &R, s: &SymbolSum<R::Elem>, opts: RewriteOptions) -> SymbolSum<R::Elem> {
    let mut out = SymbolSum::zero(s.n());
    for (k, c) in s.terms() {
        if let Some((e, sign)) = rewrite_term(ring, k, opts) {
            out.add_term(e, sign * c);
        }
    }
    out.state = if opts.steinberg_only {
        Normalization::SteinbergOnly
    } else {
        Normalization::Rewritten
    };
    out
}

/// Append `u` to every term.
pub fn gamma_product<E: Ord + Clone>(s: &SymbolSum<E>, u: &E) -> SymbolSum<E> {
    let mut out = SymbolSum::zero(s.n() + 1);
    for (k, c) in s.terms() {
        let mut e = k.clone();
        e.push(u.clone());
        out.add_term(e, c);
    }
    out
}

/// `dlog a_1 ^ ... ^ dlog a_n`, extended linearly.
pub fn dlog_k(forms: &FormSpace, s: &SymbolSum<FElem>) -> FormResult<Form> {
    let mut acc = Form::zero(s.n());
    for (k, c) in s.terms() {
        let w = forms.dlog_chain(k)?;
        acc = forms.add(&acc, &forms.scale_int(c, &w));
    }
    Ok(acc)
}

/// Value of a sum over `k_{m+1}` at `t = 0`.
pub fn eval_at_zero(ring: &TruncRing, s: &SymbolSum<TElem>) -> SymbolSum<FElem> {
    s.map_entries(|e| ring.eval0(e))
}

/// Whether a sum over a field is zero in `K^M_n(k)`, as far as can be
/// decided without an oracle.
pub fn field_part_vanishes(k: &Field, s: &SymbolSum<FElem>) -> MilnorResult<bool> {
    if s.is_zero() {
        return Ok(true);
    }
    if s.n() == 1 {
        let mut acc = k.one();
        for (e, c) in s.terms() {
            acc = k.mul(&acc, &k.powi(&e[0], c)?);
        }
        return Ok(k.is_one(&acc));
    }
    if k.is_finite() {
        return Ok(true);
    }
    if rewrite_basic(k, s, RewriteOptions::default()).is_zero() {
        return Ok(true);
    }
    Err(MilnorError::Undecided)
}

/// Rewrite a relative sum as a combination of terms that each carry an
/// entry `1 mod t`.
pub fn relative_generators(ring: &TruncRing, s: &SymbolSum<TElem>) -> MilnorResult<SymbolSum<TElem>> {
    check_units(ring, s)?;
    let k = &ring.base;
    let n = s.n();
    let mut relative = SymbolSum::zero(n);
    let mut field_part = SymbolSum::zero(n);
    for (entries, c) in s.terms() {
        let splits: Vec<(TElem, TElem)> = entries
            .iter()
            .map(|u| {
                let c0 = ring.eval0(u);
                let inv = k.inv(&c0).expect("unit");
                (ring.constant(c0), ring.mul(u, &ring.constant(inv)))
            })
            .collect();
        for mask in 0u32..(1 << n) {
            let picked: Vec<TElem> = (0..n)
                .map(|i| {
                    if mask & (1 << i) != 0 {
                        splits[i].1.clone()
                    } else {
                        splits[i].0.clone()
                    }
                })
                .collect();
            if picked.iter().any(|e| ring.is_one(e)) {
                continue;
            }
            if mask == 0 {
                field_part.add_term(picked.iter().map(|e| ring.eval0(e)).collect(), c);
            } else {
                relative.add_term(picked, c);
            }
        }
    }
    match field_part_vanishes(k, &field_part) {
        Ok(true) => Ok(relative),
        Ok(false) => Err(MilnorError::NotRelative),
        Err(e) => Err(e),
    }
}

/// Move the first entry that is `1 mod t` to the front. The sign is that
/// of the cyclic shift.
pub fn move_vanishing_first(ring: &TruncRing, entries: &[TElem]) -> MilnorResult<(Vec<TElem>, i64)> {
    let j = *relative_tag(ring, entries)
        .first()
        .ok_or(MilnorError::NoVanishingSlot)?;
    let mut e = entries.to_vec();
    let v = e.remove(j);
    e.insert(0, v);
    Ok((e, if j % 2 == 0 { 1 } else { -1 }))
}

/// `1 - c t^i` as an element of `k_{m+1}`.
pub fn binomial_unit(ring: &TruncRing, c: &FElem, i: usize) -> TElem {
    let k = &ring.base;
    ring.add(&ring.one(), &ring.monomial(k.neg(c), i))
}

/// If `u = 1 - b t^i` with `b != 0`, return `(b, i)`.
pub fn binomial_shape(ring: &TruncRing, u: &TElem) -> Option<(FElem, usize)> {
    let k = &ring.base;
    if !k.is_one(&u.0[0]) {
        return None;
    }
    let nz: Vec<usize> = (1..=ring.m).filter(|&i| !k.is_zero(&u.0[i])).collect();
    if nz.len() != 1 {
        return None;
    }
    Some((k.neg(&u.0[nz[0]]), nz[0]))
}

/// Padding degree: the least multiple of `i` exceeding `max(m, deg p)`.
pub fn padding_degree(m: usize, deg_p: usize, i: usize) -> usize {
    let floor = m.max(deg_p);
    (floor / i + 1) * i
}

/// Factor `p + c t^D` into irreducibles. When the slot-one binomial is
/// `1 - b t` each factor of degree `e` gets leading coefficient `(-b)^e`,
/// so the factors multiply back exactly; otherwise the constant unit is
/// folded into the first simple factor.
fn padded_factors(
    k: &Field,
    p: &[FElem],
    lead: &FElem,
    d: usize,
    linear_b: Option<&FElem>,
) -> MilnorResult<Vec<(Vec<FElem>, usize)>> {
    let padded = poly::add(k, p, &poly::monomial(k, lead.clone(), d));
    let fac = factor(k, &padded)?;
    if let Some(b) = linear_b {
        let mb = k.neg(b);
        return Ok(fac
            .factors
            .into_iter()
            .map(|(g, e)| {
                let deg = g.len() as u64 - 1;
                (poly::scale(k, &g, &k.pow(&mb, deg)), e)
            })
            .collect());
    }
    let mut out: Vec<(Vec<FElem>, usize)> = Vec::new();
    let mut unit = fac.unit.clone();
    for (g, e) in fac.factors {
        if !k.is_one(&unit) && e == 1 {
            out.push((poly::scale(k, &g, &unit), 1));
            unit = k.one();
        } else {
            out.push((g, e));
        }
    }
    if !k.is_one(&unit) {
        out.push((poly::constant(k, unit), 1));
    }
    Ok(out)
}

/// Improved representatives for a relative sum over `k_{m+1}`.
///
/// Every output term is `{1 - b t^i, p_2, ..., p_n}` where each `p_j` is
/// the reduction of an irreducible polynomial of degree `> m`.
pub fn ks_improved(ring: &TruncRing, s: &SymbolSum<TElem>) -> MilnorResult<SymbolSum<TElem>> {
    let mut out = SymbolSum::zero(s.n());
    for (first, polys, c) in ks_improved_with_polys(ring, s)? {
        let mut e = vec![first];
        e.extend(polys.iter().map(|p| ring.from_poly(p)));
        out.add_term(e, c);
    }
    Ok(out)
}

/// Check the shape produced by [`ks_improved`].
pub fn is_ks_shape(ring: &TruncRing, entries: &[TElem], padded: &[Vec<FElem>]) -> bool {
    binomial_shape(ring, &entries[0]).is_some()
        && padded.len() + 1 == entries.len()
        && padded
            .iter()
            .zip(&entries[1..])
            .all(|(p, e)| ring.from_poly(p) == *e)
}

/// Improved representatives together with the unreduced irreducible
/// polynomials for slots `2..n`.
pub fn ks_improved_with_polys(
    ring: &TruncRing,
    s: &SymbolSum<TElem>,
) -> MilnorResult<Vec<(TElem, Vec<Vec<FElem>>, i64)>> {
    let k = &ring.base;
    let m = ring.m;
    let rel = relative_generators(ring, s)?;
    let witt = WittRing::new(k.clone());
    let mut out = Vec::new();
    for (entries, c) in rel.terms() {
        let (e, sign) = move_vanishing_first(ring, entries)?;
        let coords = witt.from_series(&e[0].0, m)?;
        for (idx, alpha) in coords.coords.iter().enumerate() {
            if k.is_zero(alpha) {
                continue;
            }
            let i = idx + 1;
            let first = binomial_unit(ring, alpha, i);
            let mut partial: Vec<(Vec<Vec<FElem>>, i64)> = vec![(Vec::new(), sign * c)];
            for p_entry in &e[1..] {
                let p = ring.to_poly(p_entry);
                let d = padding_degree(m, poly::degree(&p).unwrap_or(0), i);
                let mut lead = k.pow(alpha, (d / i) as u64);
                if d % 2 == 1 {
                    lead = k.neg(&lead);
                }
                let factors = padded_factors(k, &p, &lead, d, (i == 1).then_some(alpha))?;
                let mut next = Vec::new();
                for (prefix, coef) in &partial {
                    for (g, mult) in &factors {
                        let mut v = prefix.clone();
                        v.push(g.clone());
                        next.push((v, coef * *mult as i64));
                    }
                }
                partial = next;
            }
            for (polys, coef) in partial {
                out.push((first.clone(), polys, coef));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::is_irreducible;

    fn f5() -> Field {
        Field::prime(5).unwrap()
    }

    fn tp(ring: &TruncRing, c: &[i64]) -> TElem {
        let k = &ring.base;
        ring.from_poly(&c.iter().map(|&x| k.from_int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn steinberg_and_trivial_entries_vanish() {
        let q = Field::rationals();
        let a = q.from_int(3);
        let s = SymbolSum::single(vec![a.clone(), q.sub(&q.one(), &a)]);
        assert!(rewrite_basic(&q, &s, RewriteOptions { steinberg_only: true }).is_zero());
        let s = SymbolSum::single(vec![q.one(), a]);
        assert!(rewrite_basic(&q, &s, RewriteOptions::default()).is_zero());
    }

    #[test]
    fn antisymmetry_sorts_with_sign() {
        let q = Field::rationals();
        let s = SymbolSum::single(vec![q.from_int(5), q.from_int(3)]);
        let r = rewrite_basic(&q, &s, RewriteOptions::default());
        assert_eq!(r.coefficient(&[q.from_int(3), q.from_int(5)]), -1);
        let strict = rewrite_basic(&q, &s, RewriteOptions { steinberg_only: true });
        assert_eq!(strict, s);
    }

    #[test]
    fn one_unit_against_minus_one_vanishes() {
        let ring = TruncRing::new(f5(), 2);
        let s = SymbolSum::single(vec![tp(&ring, &[1, 2]), tp(&ring, &[-1])]);
        assert!(rewrite_basic(&ring, &s, RewriteOptions::default()).is_zero());
    }

    #[test]
    fn multilinear_expansion() {
        let q = Field::rationals();
        let (a, b, c) = (q.from_int(2), q.from_int(7), q.from_int(11));
        let s = SymbolSum::single(vec![q.mul(&a, &b), c.clone()]);
        let e = expand_multilinear(&q, &s, 0, &[a.clone(), b.clone()]).unwrap();
        let want = SymbolSum::from_terms(2, [(vec![a, c.clone()], 1), (vec![b, c], 1)]).unwrap();
        assert_eq!(e, want);
    }

    #[test]
    fn relative_split_of_scaled_one_unit() {
        let k = f5();
        let ring = TruncRing::new(k.clone(), 2);
        // {3(1+t), 2}: field part {3,2} vanishes over a finite field
        let s = SymbolSum::single(vec![tp(&ring, &[3, 3]), tp(&ring, &[2])]);
        let r = relative_generators(&ring, &s).unwrap();
        assert_eq!(r, SymbolSum::single(vec![tp(&ring, &[1, 1]), tp(&ring, &[2])]));
    }

    #[test]
    fn rank_one_relativity_is_checked() {
        let ring = TruncRing::new(Field::rationals(), 2);
        let s = SymbolSum::single(vec![tp(&ring, &[2, 1])]);
        assert_eq!(relative_generators(&ring, &s), Err(MilnorError::NotRelative));
    }

    #[test]
    fn noncube_padding_is_irreducible() {
        let k = Field::prime(7).unwrap();
        let ring = TruncRing::new(k.clone(), 2);
        let a = k.from_int(3);
        let c = k.from_int(2);
        let s = SymbolSum::single(vec![binomial_unit(&ring, &a, 1), ring.constant(c.clone())]);
        let terms = ks_improved_with_polys(&ring, &s).unwrap();
        assert_eq!(terms.len(), 1);
        let want = vec![c, k.zero(), k.zero(), k.neg(&k.pow(&a, 3))];
        assert_eq!(terms[0].1[0], want);
        assert!(is_irreducible(&k, &want).unwrap());
    }

    #[test]
    fn cube_splits_into_linear_and_quadratic() {
        let k = Field::prime(5).unwrap();
        let ring = TruncRing::new(k.clone(), 2);
        let a = k.from_int(3);
        let d = k.from_int(2);
        let s = SymbolSum::single(vec![binomial_unit(&ring, &a, 1), ring.constant(k.pow(&d, 3))]);
        let out = ks_improved(&ring, &s).unwrap();
        let linear = ring.from_poly(&[d.clone(), k.neg(&a)]);
        let quad = ring.from_poly(&[k.mul(&d, &d), k.mul(&d, &a), k.mul(&a, &a)]);
        let first = binomial_unit(&ring, &a, 1);
        let want = SymbolSum::from_terms(2, [(vec![first.clone(), linear], 1), (vec![first, quad], 1)]).unwrap();
        assert_eq!(out, want);
    }

    #[test]
    fn slot_one_splits_through_coordinates() {
        let k = Field::prime(2).unwrap();
        let ring = TruncRing::new(k.clone(), 2);
        let s = SymbolSum::single(vec![tp(&ring, &[1, 1, 1])]);
        let out = ks_improved(&ring, &s).unwrap();
        assert_eq!(out.num_terms(), 2);
        for (e, _) in out.terms() {
            assert!(binomial_shape(&ring, &e[0]).is_some());
        }
    }

    #[test]
    fn dlog_of_two_variables() {
        let q = Field::rationals();
        let qx = Field::rat_fun(&q, "x");
        let qxy = Field::rat_fun(&qx, "y");
        let forms = FormSpace::new(qxy.clone());
        let y = qxy.generator().unwrap();
        let x = qxy.embed_base(&qx.generator().unwrap());
        let w = dlog_k(&forms, &SymbolSum::single(vec![x.clone(), y.clone()])).unwrap();
        let expect = forms.wedge(&forms.dlog(&x).unwrap(), &forms.dlog(&y).unwrap());
        assert_eq!(w, expect);
        assert!(!w.is_zero());
    }
}
