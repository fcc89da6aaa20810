//! Additive 0-cycles and their Milnor symbols over `k_{m+1}`.
//!
//! A closed point is recorded as a tuple `(a, b_1, ..., b_{n-1})` over a
//! finite extension `k'` of the base field. Rational points map to
//! `{1 - t/a, b_1 - a t, ..., b_{n-1} - a t}`; points over extensions are
//! evaluated through coefficientwise norms whenever all but one entry come
//! from the base field, and are otherwise reported as unevaluated transfers.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::norm::{lift_coeffs, norm_coeffwise};
use crate::algebra::{factor, poly, AlgebraError, CommRing, FElem, Field, TElem, TruncRing};
use crate::drw::{DrwElement, DrwSpace};
use crate::forms::{Form, FormError, FormSpace, RelFormSpace};
use crate::milnor::{
    binomial_unit, dlog_k, move_vanishing_first, relative_generators, relative_tag, MilnorError, SymbolSum,
};
use crate::witt::{LogSign, WittError, WittRing, WittVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlochError {
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("term has no entry congruent to 1 mod t")]
    NoVanishingSlot,
    #[error("fields are not compatible: {0}")]
    IncompatibleBase(String),
    #[error("no padding found within {0} candidates")]
    PaddingSearchFailed(usize),
    #[error("degree bound exceeded: {0}")]
    DegreeBoundExceeded(String),
    #[error("operation needs n = {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Milnor(#[from] MilnorError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error(transparent)]
    Form(#[from] FormError),
}

pub type BlochResult<T> = Result<T, BlochError>;

pub const DEFAULT_PADDING_BUDGET: usize = 10_000;

/// Degree of `ext` over `base`, if `base` lies in the tower below `ext`.
pub fn tower_degree(base: &Field, ext: &Field) -> Option<usize> {
    if base == ext {
        return Some(1);
    }
    let below = ext.base()?;
    if !matches!(ext.kind(), crate::algebra::FieldKind::Extension { .. }) {
        return None;
    }
    Some(ext.ext_degree() * tower_degree(base, below)?)
}

/// Norm from `ext_{m+1}` down to `base_{m+1}` through the tower.
pub fn norm_to_base(base: &Field, ext: &Field, u: &TElem, m: usize) -> BlochResult<TElem> {
    let mut field = ext.clone();
    let mut cur = u.clone();
    while &field != base {
        let below = field
            .base()
            .cloned()
            .ok_or_else(|| BlochError::IncompatibleBase(format!("{base} is not below {ext}")))?;
        cur = norm_coeffwise(&TruncRing::new(field.clone(), m), &cur)?;
        field = below;
    }
    Ok(cur)
}

/// Characteristic polynomial of `a in ext` over `base`, monic, low degree first.
pub fn char_poly(base: &Field, ext: &Field, a: &FElem) -> BlochResult<Vec<FElem>> {
    let d = tower_degree(base, ext)
        .ok_or_else(|| BlochError::IncompatibleBase(format!("{base} is not below {ext}")))?;
    let big = TruncRing::new(ext.clone(), d);
    let u = big.from_poly(&[ext.one(), ext.neg(a)]);
    let n = norm_to_base(base, ext, &u, d)?;
    // prod (1 - a_j t) reversed is prod (x - a_j)
    let mut rev = n.0.clone();
    rev.reverse();
    Ok(poly::trim(rev, base))
}

/// Minimal polynomial of an element of a separable tower over `base`.
pub fn minimal_poly(base: &Field, ext: &Field, a: &FElem) -> BlochResult<Vec<FElem>> {
    if base == ext {
        return Ok(vec![base.neg(a), base.one()]);
    }
    let cp = char_poly(base, ext, a)?;
    let fac = factor(base, &cp)?;
    Ok(fac.factors[0].0.clone())
}

/// A closed point `(a, b_1, ..., b_{n-1})` over `ext`, pushed forward to `base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedPointCycle {
    pub base: Field,
    pub ext: Field,
    pub tuple: Vec<FElem>,
    pub mult: i64,
}

impl ClosedPointCycle {
    pub fn new(base: &Field, ext: &Field, tuple: Vec<FElem>, mult: i64) -> BlochResult<Self> {
        if tower_degree(base, ext).is_none() {
            return Err(BlochError::IncompatibleBase(format!("{base} is not below {ext}")));
        }
        if tuple.is_empty() {
            return Err(BlochError::InvalidPoint("empty tuple".into()));
        }
        if ext.is_zero(&tuple[0]) {
            return Err(BlochError::InvalidPoint("first coordinate is zero".into()));
        }
        for b in &tuple[1..] {
            if ext.is_zero(b) || ext.is_one(b) {
                return Err(BlochError::InvalidPoint(format!(
                    "coordinate {} lies in {{0, 1}}",
                    ext.format(b)
                )));
            }
        }
        Ok(ClosedPointCycle {
            base: base.clone(),
            ext: ext.clone(),
            tuple,
            mult,
        })
    }

    pub fn rational(k: &Field, tuple: Vec<FElem>, mult: i64) -> BlochResult<Self> {
        Self::new(k, k, tuple, mult)
    }

    pub fn n(&self) -> usize {
        self.tuple.len()
    }

    pub fn is_rational(&self) -> bool {
        self.base == self.ext
    }

    pub fn degree(&self) -> usize {
        tower_degree(&self.base, &self.ext).expect("checked at construction")
    }

    pub fn format(&self) -> String {
        let coords: Vec<String> = self.tuple.iter().map(|c| self.ext.format(c)).collect();
        let pt = format!("({})", coords.join(", "));
        let body = if self.is_rational() {
            pt
        } else {
            format!("{pt} over {}", self.ext)
        };
        match self.mult {
            1 => body,
            m => format!("{m}*{body}"),
        }
    }
}

/// Formal combination of closed points of a common length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveZeroCycle {
    pub n: usize,
    pub points: Vec<ClosedPointCycle>,
    pub single_a1: bool,
}

impl AdditiveZeroCycle {
    pub fn new(n: usize, points: Vec<ClosedPointCycle>) -> BlochResult<Self> {
        if let Some(p) = points.iter().find(|p| p.n() != n) {
            return Err(BlochError::WrongLength { expected: n, got: p.n() });
        }
        let mut c = AdditiveZeroCycle {
            n,
            points,
            single_a1: false,
        };
        c.single_a1 = c.shares_a1_coordinate()?;
        Ok(c)
    }

    /// All first coordinates are conjugate over the base field.
    pub fn shares_a1_coordinate(&self) -> BlochResult<bool> {
        let Some(first) = self.points.first() else {
            return Ok(true);
        };
        let f0 = minimal_poly(&first.base, &first.ext, &first.tuple[0])?;
        for p in &self.points[1..] {
            if minimal_poly(&p.base, &p.ext, &p.tuple[0])? != f0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn add(&self, other: &AdditiveZeroCycle) -> BlochResult<Self> {
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        AdditiveZeroCycle::new(self.n, pts)
    }

    pub fn format(&self) -> String {
        if self.points.is_empty() {
            return "0".into();
        }
        self.points
            .iter()
            .map(ClosedPointCycle::format)
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A symbol tagged as a graph cycle, with its vanishing slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphCycle {
    pub entries: Vec<TElem>,
    pub vanishing: Vec<usize>,
}

pub fn graph(ring: &TruncRing, entries: &[TElem]) -> BlochResult<GraphCycle> {
    for e in entries {
        if !ring.is_unit_elem(e) {
            return Err(MilnorError::NotAUnit(ring.format(e)).into());
        }
    }
    Ok(GraphCycle {
        entries: entries.to_vec(),
        vanishing: relative_tag(ring, entries),
    })
}

/// `{1 - t/a, b_1 - a t, ..., b_{n-1} - a t}` for a rational point.
pub fn phi_rational_symbol(ring: &TruncRing, tuple: &[FElem]) -> BlochResult<Vec<TElem>> {
    let k = &ring.base;
    let a = &tuple[0];
    let inv_a = k
        .inv(a)
        .ok_or_else(|| BlochError::InvalidPoint("first coordinate is zero".into()))?;
    let mut out = vec![ring.from_poly(&[k.one(), k.neg(&inv_a)])];
    for b in &tuple[1..] {
        out.push(ring.from_poly(&[b.clone(), k.neg(a)]));
    }
    Ok(out)
}

pub fn phi_rational(ring: &TruncRing, p: &ClosedPointCycle) -> BlochResult<SymbolSum<TElem>> {
    if !p.is_rational() {
        return Err(BlochError::InvalidPoint("point is not rational".into()));
    }
    if p.base != ring.base {
        return Err(BlochError::IncompatibleBase(format!("{} vs {}", p.base, ring.base)));
    }
    let mut s = SymbolSum::zero(p.n());
    s.add_term(phi_rational_symbol(ring, &p.tuple)?, p.mult);
    Ok(s)
}

/// `N(1 - t/c)` for a point `(c)` of length one, raised to its multiplicity.
pub fn phi1_pushforward(ring: &TruncRing, p: &ClosedPointCycle) -> BlochResult<TElem> {
    if p.n() != 1 {
        return Err(BlochError::WrongLength { expected: 1, got: p.n() });
    }
    let big = TruncRing::new(p.ext.clone(), ring.m);
    let inv_c = p.ext.inv(&p.tuple[0]).expect("nonzero");
    let u = big.from_poly(&[p.ext.one(), p.ext.neg(&inv_c)]);
    let n = norm_to_base(&ring.base, &p.ext, &u, ring.m)?;
    Ok(unit_power(ring, &n, p.mult)?)
}

fn unit_power(ring: &TruncRing, u: &TElem, e: i64) -> Result<TElem, AlgebraError> {
    let base = if e < 0 { ring.inv(u)? } else { u.clone() };
    Ok(ring.pow(&base, e.unsigned_abs()))
}

/// Value of `phi` on a cycle: the evaluated part and the points that
/// need an unevaluated transfer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiValue {
    pub sum: SymbolSum<TElem>,
    pub unevaluated: Vec<ClosedPointCycle>,
}

impl PhiValue {
    pub fn is_complete(&self) -> bool {
        self.unevaluated.is_empty()
    }
}

/// Evaluate `phi` on one point.
pub fn phi_point(ring: &TruncRing, p: &ClosedPointCycle) -> BlochResult<Option<SymbolSum<TElem>>> {
    let k = &ring.base;
    if p.is_rational() {
        return Ok(Some(phi_rational(ring, p)?));
    }
    if p.n() == 1 {
        let u = phi1_pushforward(ring, &ClosedPointCycle { mult: 1, ..p.clone() })?;
        let mut s = SymbolSum::zero(1);
        s.add_term(vec![u], p.mult);
        return Ok(Some(s));
    }
    let ext = &p.ext;
    let Some(a) = ext.as_subfield(k, &p.tuple[0]) else {
        return Ok(None);
    };
    let outside: Vec<usize> = (1..p.n())
        .filter(|&i| ext.as_subfield(k, &p.tuple[i]).is_none())
        .collect();
    if outside.len() > 1 {
        return Ok(None);
    }
    let big = TruncRing::new(ext.clone(), ring.m);
    let a_ext = &p.tuple[0];
    let mut entries = Vec::with_capacity(p.n());
    let inv_a = k.inv(&a).expect("nonzero");
    entries.push(ring.from_poly(&[k.one(), k.neg(&inv_a)]));
    let mut coef = p.mult;
    for i in 1..p.n() {
        if outside.contains(&i) {
            let y = big.from_poly(&[p.tuple[i].clone(), ext.neg(a_ext)]);
            entries.push(norm_to_base(k, ext, &y, ring.m)?);
        } else {
            let b = ext.as_subfield(k, &p.tuple[i]).expect("checked");
            entries.push(ring.from_poly(&[b, k.neg(&a)]));
        }
    }
    if outside.is_empty() {
        coef *= p.degree() as i64;
    }
    let mut s = SymbolSum::zero(p.n());
    s.add_term(entries, coef);
    Ok(Some(s))
}

pub fn evaluate_phi(ring: &TruncRing, c: &AdditiveZeroCycle) -> BlochResult<PhiValue> {
    let mut sum = SymbolSum::zero(c.n);
    let mut unevaluated = Vec::new();
    for p in &c.points {
        match phi_point(ring, p)? {
            Some(s) => sum = sum.add(&s)?,
            None => unevaluated.push(p.clone()),
        }
    }
    Ok(PhiValue { sum, unevaluated })
}

/// Element of `W_m(k) (x) K^M_{n-1}(k)`, stored as symbol -> Witt vector
/// with like terms collected through Witt addition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposedClass {
    pub m: usize,
    pub n: usize,
    pub terms: BTreeMap<Vec<FElem>, Vec<FElem>>,
}

impl DecomposedClass {
    pub fn zero(m: usize, n: usize) -> Self {
        DecomposedClass {
            m,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: &Field, w: &WittVector<FElem>, symbol: Vec<FElem>, coef: i64) -> BlochResult<()> {
        let witt = WittRing::new(k.clone());
        let scaled = witt.scale_int(w, coef)?;
        let cur = match self.terms.get(&symbol) {
            Some(c) => witt.add(&WittVector::full(c.clone()), &scaled)?,
            None => scaled,
        };
        if cur.coords.iter().all(|c| k.is_zero(c)) {
            self.terms.remove(&symbol);
        } else {
            self.terms.insert(symbol, cur.coords);
        }
        Ok(())
    }

    pub fn format(&self, k: &Field) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let witt = WittRing::new(k.clone());
        self.terms
            .iter()
            .map(|(s, w)| {
                let series = witt
                    .to_series(&WittVector::full(w.clone()))
                    .expect("full truncation");
                let sym: Vec<String> = s.iter().map(|c| k.format(c)).collect();
                format!("({}) (x) {{{}}}", witt.format_series(&series), sym.join(", "))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Deconcatenation of a sum of symbols over `k_{m+1}`.
pub fn dec(ring: &TruncRing, s: &SymbolSum<TElem>) -> BlochResult<DecomposedClass> {
    let k = &ring.base;
    let witt = WittRing::new(k.clone());
    let mut out = DecomposedClass::zero(ring.m, s.n());
    for (entries, c) in s.terms() {
        let vanishing = relative_tag(ring, entries);
        match vanishing.len() {
            0 => return Err(BlochError::NoVanishingSlot),
            1 => {}
            _ => continue,
        }
        let j = vanishing[0];
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let w = witt.from_series(&entries[j].0, ring.m)?;
        let symbol: Vec<FElem> = entries
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, e)| ring.eval0(e))
            .collect();
        out.add_term(k, &w, symbol, sign * c)?;
    }
    Ok(out)
}

/// `Con` of a decomposed class in the characteristic-zero model.
pub fn con_class(space: &DrwSpace, class: &DecomposedClass) -> BlochResult<DrwElement> {
    let mut acc = space.zero(class.m, class.n.saturating_sub(1));
    for (symbol, w) in &class.terms {
        let term = space.con(&WittVector::full(w.clone()), symbol)?;
        acc = space.add(&acc, &term)?;
    }
    Ok(acc)
}

/// `rho = Con . Dec`; in positive characteristic the decomposed class is
/// returned as is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhoValue {
    Model(DrwElement),
    Decomposed(DecomposedClass),
}

pub fn rho(ring: &TruncRing, s: &SymbolSum<TElem>) -> BlochResult<RhoValue> {
    let class = dec(ring, s)?;
    if ring.base.characteristic() == 0 {
        let space = DrwSpace::new(ring.base.clone())?;
        Ok(RhoValue::Model(con_class(&space, &class)?))
    } else {
        Ok(RhoValue::Decomposed(class))
    }
}

/// `t -> a t` on a unit.
pub fn twist(ring: &TruncRing, a: &FElem, u: &TElem) -> BlochResult<TElem> {
    if ring.base.is_zero(a) {
        return Err(BlochError::InvalidPoint("twist by zero".into()));
    }
    Ok(ring.twist(a, u))
}

pub fn twist_symbols(ring: &TruncRing, a: &FElem, s: &SymbolSum<TElem>) -> BlochResult<SymbolSum<TElem>> {
    if ring.base.is_zero(a) {
        return Err(BlochError::InvalidPoint("twist by zero".into()));
    }
    Ok(s.map_entries(|e| ring.twist(a, e)))
}

/// The cycle `pi_*{y = c - t}` over `ext`, with multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberPoint {
    pub base: Field,
    pub ext: Field,
    pub c: FElem,
    pub mult: i64,
}

impl FiberPoint {
    /// `N(c - t)` in `k_{m+1}`.
    pub fn norm_series(&self, ring: &TruncRing) -> BlochResult<TElem> {
        let big = TruncRing::new(self.ext.clone(), ring.m);
        let u = big.from_poly(&[self.c.clone(), self.ext.neg(&self.ext.one())]);
        let n = norm_to_base(&self.base, &self.ext, &u, ring.m)?;
        Ok(unit_power(ring, &n, self.mult)?)
    }
}

/// Points of `Spec(K (x)_k k[y]/(g))` with `g` the minimal polynomial of a
/// generator of `E/k`: each irreducible factor of `g` over `K` gives a
/// field `L = K[y]/(h)` and the image of the generator.
fn compositum(point_field: &Field, base: &Field, e: &Field) -> BlochResult<Vec<(Field, FElem)>> {
    if e == base {
        return Ok(vec![(point_field.clone(), point_field.zero())]);
    }
    if e.base() != Some(base) {
        return Err(BlochError::IncompatibleBase(format!("{e} is not a simple extension of {base}")));
    }
    let g: Vec<FElem> = e
        .modulus()
        .expect("extension")
        .iter()
        .map(|c| point_field.embed_from(base, c))
        .collect::<Result<_, _>>()?;
    let fac = factor(point_field, &g)?;
    let mut out = Vec::new();
    for (h, mult) in fac.factors {
        debug_assert_eq!(mult, 1);
        if h.len() == 2 {
            out.push((point_field.clone(), point_field.neg(&h[0])));
        } else {
            let l = Field::extension(point_field, h, &format!("y{}", out.len()))?;
            let root = l.generator().expect("extension");
            out.push((l, root));
        }
    }
    Ok(out)
}

/// Write an element of the simple extension `e = base[theta]` at `root`.
fn eval_at_root(base: &Field, e: &Field, target: &Field, c: &FElem, root: &FElem) -> BlochResult<FElem> {
    if e == base {
        return Ok(target.embed_from(base, c)?);
    }
    let coeffs: Vec<FElem> = e
        .ext_coeffs(c)
        .iter()
        .map(|x| target.embed_from(base, x))
        .collect::<Result<_, _>>()?;
    Ok(poly::eval(target, &coeffs, root))
}

/// Juxtapose every point of `p` with the special fiber point `c` of `z`.
pub fn j_product(p: &AdditiveZeroCycle, z: &FiberPoint) -> BlochResult<AdditiveZeroCycle> {
    let mut pts = Vec::new();
    for q in &p.points {
        if q.base != z.base {
            return Err(BlochError::IncompatibleBase(format!("{} vs {}", q.base, z.base)));
        }
        for (l, root) in compositum(&q.ext, &q.base, &z.ext)? {
            let mut tuple: Vec<FElem> = q
                .tuple
                .iter()
                .map(|x| l.embed_from(&q.ext, x))
                .collect::<Result<_, _>>()?;
            let root_l = if l == q.ext { root.clone() } else { root };
            tuple.push(eval_at_root(&z.base, &z.ext, &l, &z.c, &root_l)?);
            pts.push(ClosedPointCycle::new(&q.base, &l, tuple, q.mult * z.mult)?);
        }
    }
    AdditiveZeroCycle::new(p.n + 1, pts)
}

/// One lifted term: a cycle sharing one A^1-coordinate whose `phi` is the
/// given improved-representative symbol times `coef`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedTerm {
    pub symbol: Vec<TElem>,
    pub coef: i64,
    pub cycle: AdditiveZeroCycle,
}

fn search_values(k: &Field) -> Vec<FElem> {
    if k.is_finite() {
        let mut v = k.elements();
        v.sort_by_key(|x| !k.is_zero(x));
        v
    } else {
        let mut v = vec![k.zero()];
        for i in 1..=4 {
            v.push(k.from_int(i));
            v.push(k.from_int(-i));
        }
        v
    }
}

/// Pad `p` (degree `<= m`) as `p + sum u_e t^e + (-zeta t)^D` with no root
/// at `1/zeta`; returns the padded polynomial.
pub fn lift_padding(
    k: &Field,
    m: usize,
    p: &[FElem],
    zeta: &FElem,
    budget: usize,
) -> BlochResult<Vec<FElem>> {
    let inv_zeta = k.inv(zeta).expect("nonzero");
    let values = search_values(k);
    let deg = poly::degree(p).unwrap_or(0);
    let mut d = m.max(deg) + 1;
    let mut tried = 0usize;
    loop {
        let free = d - (m + 1);
        let tail = poly::monomial(k, k.pow(&k.neg(zeta), d as u64), d);
        let base_poly = poly::add(k, p, &tail);
        let mut digits = vec![0usize; free];
        loop {
            if tried >= budget {
                return Err(BlochError::PaddingSearchFailed(budget));
            }
            tried += 1;
            let mut cand = base_poly.clone();
            for (i, &dg) in digits.iter().enumerate() {
                cand = poly::add(k, &cand, &poly::monomial(k, values[dg].clone(), m + 1 + i));
            }
            if !k.is_zero(&poly::eval(k, &cand, &inv_zeta)) {
                return Ok(cand);
            }
            // next digit vector, most significant first
            let mut pos = free;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < values.len() {
                    break;
                }
                digits[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if free == 0 || pos == usize::MAX {
                break;
            }
        }
        d += 1;
    }
}

/// Points `(zeta, zeta theta)` for the irreducible factors of a padded
/// polynomial, with multiplicities.
fn root_points(k: &Field, zeta: &FElem, padded: &[FElem], mult: i64) -> BlochResult<Vec<ClosedPointCycle>> {
    let fac = factor(k, padded)?;
    let mut out = Vec::new();
    for (h, e) in fac.factors {
        let (ext, theta) = if h.len() == 2 {
            (k.clone(), k.neg(&h[0]))
        } else {
            let ext = Field::extension(k, h, "theta")?;
            let g = ext.generator().expect("extension");
            (ext, g)
        };
        let z = ext.embed_from(k, zeta)?;
        let tuple = vec![z.clone(), ext.mul(&z, &theta)];
        out.push(ClosedPointCycle::new(k, &ext, tuple, mult * e as i64)?);
    }
    Ok(out)
}

/// Lift a relative sum over `k_{m+1}` to 0-cycles, one per improved
/// representative term. Symbols of length one and two are supported.
pub fn lift_symbol_to_cycle(ring: &TruncRing, s: &SymbolSum<TElem>, budget: usize) -> BlochResult<Vec<LiftedTerm>> {
    let k = &ring.base;
    let m = ring.m;
    if s.n() == 0 {
        return Err(BlochError::WrongLength { expected: 1, got: 0 });
    }
    if s.n() == 1 {
        let rel = relative_generators(ring, s)?;
        let mut out = Vec::new();
        for (entries, c) in rel.terms() {
            let f = ring.to_poly(&entries[0]);
            let fac = factor(k, &f)?;
            let mut pts = Vec::new();
            for (h, e) in fac.factors {
                let (ext, root) = if h.len() == 2 {
                    (k.clone(), k.neg(&h[0]))
                } else {
                    let ext = Field::extension(k, h, "theta")?;
                    let g = ext.generator().expect("extension");
                    (ext, g)
                };
                pts.push(ClosedPointCycle::new(k, &ext, vec![root], c * e as i64)?);
            }
            out.push(LiftedTerm {
                symbol: entries.clone(),
                coef: c,
                cycle: AdditiveZeroCycle::new(1, pts)?,
            });
        }
        return Ok(out);
    }
    if s.n() > 2 {
        return Err(BlochError::DegreeBoundExceeded(format!("lifting symbols of length {}", s.n())));
    }
    let witt = WittRing::new(k.clone());
    let mut out = Vec::new();
    for (entries, c) in relative_generators(ring, s)?.terms() {
        let (e, sign) = move_vanishing_first(ring, entries)?;
        let coords = witt.from_series(&e[0].0, m)?.coords;
        if let Some(i) = (2..=m).find(|&i| !k.is_zero(&coords[i - 1])) {
            return Err(BlochError::DegreeBoundExceeded(format!(
                "Witt coordinate at t^{i} needs a root of degree {i}"
            )));
        }
        let b = coords[0].clone();
        if k.is_zero(&b) {
            continue;
        }
        let coef = sign * c;
        let zeta = k.inv(&b).expect("nonzero");
        let p_low = ring.to_poly(&e[1]);
        let padded = lift_padding(k, m, &p_low, &zeta, budget)?;
        let pts = root_points(k, &zeta, &padded, coef)?;
        out.push(LiftedTerm {
            symbol: vec![binomial_unit(ring, &b, 1), e[1].clone()],
            coef,
            cycle: AdditiveZeroCycle::new(2, pts)?,
        });
    }
    Ok(out)
}

/// Sum of the lifted cycles.
pub fn combine_lift(terms: &[LiftedTerm], n: usize) -> BlochResult<AdditiveZeroCycle> {
    let pts = terms.iter().flat_map(|t| t.cycle.points.iter().cloned()).collect();
    AdditiveZeroCycle::new(n, pts)
}

/// The Bloch map in characteristic zero: `Log(a_1) dlog a_2 ^ ...` modulo
/// exact forms, read in the model.
pub fn log_n(ring: &TruncRing, s: &SymbolSum<TElem>) -> BlochResult<DrwElement> {
    let k = &ring.base;
    let space = DrwSpace::new(k.clone())?;
    let rel = RelFormSpace::new(k.clone(), ring.m);
    let witt = WittRing::new(k.clone());
    let mut acc = space.zero(ring.m, s.n().saturating_sub(1));
    for (entries, c) in s.terms() {
        let tag = relative_tag(ring, entries);
        let j = *tag.first().ok_or(BlochError::NoVanishingSlot)?;
        let sign = if j % 2 == 0 { c } else { -c };
        let log = witt.formal_log(&entries[j].0, ring.m, LogSign::Printed)?;
        let mut form = rel.from_telem(&TElem(log));
        let rest: Vec<TElem> = entries
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, e)| e.clone())
            .collect();
        form = rel.wedge(&form, &rel.dlog_chain(&rest)?);
        let class = rel.reduce_mod_exact(&form)?;
        let e = space.decompose(&rel, &class)?;
        acc = space.add(&acc, &space.scale_int(&e, sign))?;
    }
    Ok(acc)
}

/// `d log_t`: the relative part through `d . log_n`, the value at `t = 0`
/// through `dlog` on `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogT {
    pub relative: DrwElement,
    pub field: Form,
}

pub fn log0_and_dlog_t(ring: &TruncRing, s: &SymbolSum<TElem>) -> BlochResult<DlogT> {
    let k = &ring.base;
    let space = DrwSpace::new(k.clone())?;
    let at_zero = s.map_entries(|e| ring.constant(ring.eval0(e)));
    let relative_part = relative_generators(ring, &s.sub(&at_zero)?)?;
    let log = log_n(ring, &relative_part)?;
    let field_sum = s.map_entries(|e| ring.eval0(e));
    let field = dlog_k(&FormSpace::new(k.clone()), &field_sum)?;
    Ok(DlogT {
        relative: space.d(&log),
        field,
    })
}

/// Lift a rational function field element coefficientwise to an extension.
pub fn lift_unit(ext: &Field, u: &TElem) -> TElem {
    lift_coeffs(ext, u)
}
