//! Evaluation of parsed expressions in a ring context.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use super::syntax::{Expr, RingDesc};
use crate::algebra::{AlgebraError, CommRing, FElem, Field, FieldKind, TElem, TruncRing, UniversalRing};
use crate::forms::{sort_wedge, Form, FormSpace, RelForm, RelFormSpace};
use crate::witt::{WittError, WittRing, WittVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown ring: {0}")]
    UnknownRing(String),
    #[error("unknown name '{0}'")]
    UnknownName(String),
    #[error("cannot invert {0}")]
    NotInvertible(String),
    #[error("expected {expected}, got {got}")]
    Shape { expected: String, got: String },
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("{0} needs {1} arguments")]
    Arity(String, usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Witt(#[from] WittError),
}

pub type EvalResult<T> = Result<T, EvalError>;

/// Coefficient rings the evaluator can work over.
pub trait Scalars: CommRing {
    fn literal(&self, n: &BigInt) -> Self::Elem;
    fn named(&self, name: &str) -> Option<Self::Elem>;
    fn try_inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Names `x` for which `dx` is a basis form.
    fn form_vars(&self) -> Vec<String>;
}

impl Scalars for Field {
    fn literal(&self, n: &BigInt) -> FElem {
        self.from_bigint(n)
    }

    fn named(&self, name: &str) -> Option<FElem> {
        if self.generator_name() == Some(name) {
            return self.generator();
        }
        let base = self.base()?;
        let inner = base.named(name)?;
        Some(self.embed_base(&inner))
    }

    fn try_inv(&self, a: &FElem) -> Option<FElem> {
        self.inv(a)
    }

    fn form_vars(&self) -> Vec<String> {
        self.var_names()
    }
}

impl Scalars for UniversalRing {
    fn literal(&self, n: &BigInt) -> Self::Elem {
        self.constant(n.clone())
    }

    fn named(&self, name: &str) -> Option<Self::Elem> {
        self.var_named(name)
    }

    fn try_inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        match self.as_constant(a) {
            Some(c) if c == BigInt::from(1) || c == BigInt::from(-1) => Some(a.clone()),
            _ => None,
        }
    }

    fn form_vars(&self) -> Vec<String> {
        Vec::new()
    }
}

/// A coefficient ring built from a descriptor.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Field(Field),
    Universal(UniversalRing),
}

pub fn build_field(desc: &RingDesc) -> EvalResult<Field> {
    match desc {
        RingDesc::Rationals => Ok(Field::rationals()),
        RingDesc::Galois(p, d) => Ok(Field::galois(*p, *d)?),
        RingDesc::RatFun(base, var) => Ok(Field::rat_fun(&build_field(base)?, var)),
        RingDesc::Ext(base, var, modulus) => {
            let b = build_field(base)?;
            // the modulus is a polynomial in the new variable over the base
            let aux = Field::rat_fun(&b, var);
            let ev = Evaluator::new(&aux, None);
            let val = ev.scalar(modulus)?;
            let FElem::Frac(num, den) = val else {
                return Err(EvalError::UnknownRing(format!("modulus of {var}")));
            };
            if den.len() != 1 {
                return Err(EvalError::Shape {
                    expected: "polynomial modulus".into(),
                    got: aux.format(&FElem::Frac(num, den)),
                });
            }
            let inv = b.inv(&den[0]).expect("nonzero denominator");
            let modulus = crate::algebra::poly::scale(&b, &num, &inv);
            Ok(Field::extension(&b, modulus, var)?)
        }
        RingDesc::Universal(_) => Err(EvalError::UnknownRing(format!("{desc:?} is not a field"))),
        RingDesc::Trunc(..) => Err(EvalError::UnknownRing("truncated ring where a field is needed".into())),
    }
}

pub fn build_coefficients(desc: &RingDesc) -> EvalResult<Coefficients> {
    match desc {
        RingDesc::Universal(vars) => Ok(Coefficients::Universal(UniversalRing::new(vars))),
        d => Ok(Coefficients::Field(build_field(d)?)),
    }
}

/// Build `k_{m+1}` from `R[t]/t^e` or from a field and an explicit modulus.
pub fn build_trunc(desc: &RingDesc, modulus: Option<usize>) -> EvalResult<TruncRing> {
    let (base, e) = match (desc, modulus) {
        (RingDesc::Trunc(b, e), None) => (b.as_ref(), *e),
        (RingDesc::Trunc(b, e), Some(e2)) if *e == e2 => (b.as_ref(), *e),
        (RingDesc::Trunc(_, e), Some(e2)) => {
            return Err(EvalError::Shape {
                expected: format!("modulus t^{e}"),
                got: format!("t^{e2}"),
            })
        }
        (d, Some(e)) => (d, e),
        (_, None) => {
            return Err(EvalError::Shape {
                expected: "a truncation t^e".into(),
                got: "none".into(),
            })
        }
    };
    Ok(TruncRing::new(build_field(base)?, e - 1))
}

/// Formal sums of `t`-series times wedge monomials. Index `0` is `dt`,
/// index `i + 1` is `d` of the `i`-th field variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Val<E> {
    pub terms: BTreeMap<Vec<usize>, Vec<E>>,
}

pub struct Evaluator<'a, R: Scalars> {
    pub ring: &'a R,
    /// Series length `m + 1`, when truncated.
    pub len: Option<usize>,
    vars: Vec<String>,
}

impl<'a, R: Scalars> Evaluator<'a, R> {
    pub fn new(ring: &'a R, len: Option<usize>) -> Self {
        Evaluator {
            ring,
            len,
            vars: ring.form_vars(),
        }
    }

    fn trim(&self, mut s: Vec<R::Elem>) -> Vec<R::Elem> {
        if let Some(l) = self.len {
            s.truncate(l);
        }
        while s.last().is_some_and(|c| self.ring.is_zero(c)) {
            s.pop();
        }
        s
    }

    fn constant(&self, c: R::Elem) -> Val<R::Elem> {
        self.monomial(Vec::new(), vec![c])
    }

    fn monomial(&self, key: Vec<usize>, s: Vec<R::Elem>) -> Val<R::Elem> {
        let s = self.trim(s);
        let mut terms = BTreeMap::new();
        if !s.is_empty() {
            terms.insert(key, s);
        }
        Val { terms }
    }

    fn s_add(&self, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        let n = a.len().max(b.len());
        let z = self.ring.zero();
        let out = (0..n)
            .map(|i| self.ring.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.trim(out)
    }

    fn s_mul(&self, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut n = a.len() + b.len() - 1;
        if let Some(l) = self.len {
            n = n.min(l);
        }
        let mut out = vec![self.ring.zero(); n];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j < n {
                    out[i + j] = self.ring.add(&out[i + j], &self.ring.mul(x, y));
                }
            }
        }
        self.trim(out)
    }

    fn s_inv(&self, a: &[R::Elem]) -> EvalResult<Vec<R::Elem>> {
        let c0 = a.first().ok_or_else(|| EvalError::NotInvertible("0".into()))?;
        let inv0 = self
            .ring
            .try_inv(c0)
            .ok_or_else(|| EvalError::NotInvertible(self.ring.format(c0)))?;
        if a.len() == 1 {
            return Ok(vec![inv0]);
        }
        let Some(l) = self.len else {
            return Err(EvalError::NotInvertible(format!(
                "{} (no truncation given)",
                crate::witt::format_series(self.ring, a)
            )));
        };
        let mut out = vec![inv0.clone()];
        for n in 1..l {
            let mut acc = self.ring.zero();
            for k in 1..=n.min(a.len() - 1) {
                acc = self.ring.add(&acc, &self.ring.mul(&a[k], &out[n - k]));
            }
            out.push(self.ring.neg(&self.ring.mul(&inv0, &acc)));
        }
        Ok(self.trim(out))
    }

    pub fn add(&self, a: &Val<R::Elem>, b: &Val<R::Elem>) -> Val<R::Elem> {
        let mut terms = a.terms.clone();
        for (k, s) in &b.terms {
            let new = match terms.get(k) {
                Some(old) => self.s_add(old, s),
                None => s.clone(),
            };
            if new.is_empty() {
                terms.remove(k);
            } else {
                terms.insert(k.clone(), new);
            }
        }
        Val { terms }
    }

    pub fn neg(&self, a: &Val<R::Elem>) -> Val<R::Elem> {
        Val {
            terms: a
                .terms
                .iter()
                .map(|(k, s)| (k.clone(), s.iter().map(|c| self.ring.neg(c)).collect()))
                .collect(),
        }
    }

    pub fn mul(&self, a: &Val<R::Elem>, b: &Val<R::Elem>) -> Val<R::Elem> {
        let mut out = Val { terms: BTreeMap::new() };
        for (ka, sa) in &a.terms {
            for (kb, sb) in &b.terms {
                let mut key = ka.clone();
                key.extend(kb.iter().copied());
                let Some((sorted, sign)) = sort_wedge(&key) else {
                    continue;
                };
                let mut s = self.s_mul(sa, sb);
                if sign < 0 {
                    s = s.iter().map(|c| self.ring.neg(c)).collect();
                }
                out = self.add(&out, &self.monomial(sorted, s));
            }
        }
        out
    }

    fn inv(&self, a: &Val<R::Elem>) -> EvalResult<Val<R::Elem>> {
        match a.terms.len() {
            1 if a.terms.contains_key(&Vec::new()) => {
                Ok(self.monomial(Vec::new(), self.s_inv(&a.terms[&Vec::new()])?))
            }
            0 => Err(EvalError::NotInvertible("0".into())),
            _ => Err(EvalError::NotInvertible("a form of positive degree".into())),
        }
    }

    fn pow(&self, a: &Val<R::Elem>, e: i64) -> EvalResult<Val<R::Elem>> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        let mut acc = self.constant(self.ring.one());
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Ok(acc)
    }

    fn var(&self, name: &str) -> EvalResult<Val<R::Elem>> {
        if name == "t" {
            return Ok(self.monomial(Vec::new(), vec![self.ring.zero(), self.ring.one()]));
        }
        if let Some(c) = self.ring.named(name) {
            return Ok(self.constant(c));
        }
        if let Some(rest) = name.strip_prefix('d') {
            if rest == "t" {
                return Ok(self.monomial(vec![0], vec![self.ring.one()]));
            }
            if let Some(i) = self.vars.iter().position(|v| v == rest) {
                return Ok(self.monomial(vec![i + 1], vec![self.ring.one()]));
            }
        }
        Err(EvalError::UnknownName(name.to_string()))
    }

    pub fn eval(&self, e: &Expr) -> EvalResult<Val<R::Elem>> {
        match e {
            Expr::Int(n) => Ok(self.constant(self.ring.literal(n))),
            Expr::Var(name) => self.var(name),
            Expr::Group(inner) => self.eval(inner),
            Expr::Neg(a) => Ok(self.neg(&self.eval(a)?)),
            Expr::Add(a, b) => Ok(self.add(&self.eval(a)?, &self.eval(b)?)),
            Expr::Sub(a, b) => Ok(self.add(&self.eval(a)?, &self.neg(&self.eval(b)?))),
            Expr::Mul(a, b) | Expr::Wedge(a, b) => Ok(self.mul(&self.eval(a)?, &self.eval(b)?)),
            Expr::Div(a, b) => Ok(self.mul(&self.eval(a)?, &self.inv(&self.eval(b)?)?)),
            Expr::Pow(a, n) => self.pow(&self.eval(a)?, *n),
            Expr::Call(f, _) => Err(EvalError::UnknownFunction(f.clone())),
            Expr::Witt(..) => Err(EvalError::Shape {
                expected: "a ring element".into(),
                got: "a Witt vector literal".into(),
            }),
        }
    }

    /// A series in `t` (no differentials).
    pub fn series(&self, e: &Expr) -> EvalResult<Vec<R::Elem>> {
        let v = self.eval(e)?;
        match v.terms.len() {
            0 => Ok(Vec::new()),
            1 if v.terms.contains_key(&Vec::new()) => Ok(v.terms[&Vec::new()].clone()),
            _ => Err(EvalError::Shape {
                expected: "a function".into(),
                got: "a differential form".into(),
            }),
        }
    }

    /// A constant (no `t`, no differentials).
    pub fn scalar(&self, e: &Expr) -> EvalResult<R::Elem> {
        let s = self.series(e)?;
        match s.len() {
            0 => Ok(self.ring.zero()),
            1 => Ok(s[0].clone()),
            _ => Err(EvalError::Shape {
                expected: "a constant".into(),
                got: crate::witt::format_series(self.ring, &s),
            }),
        }
    }

    pub fn small_int(&self, e: &Expr) -> EvalResult<usize> {
        match e.ungroup() {
            Expr::Int(n) => usize::try_from(n).map_err(|_| EvalError::Shape {
                expected: "a small positive integer".into(),
                got: n.to_string(),
            }),
            _ => Err(EvalError::Shape {
                expected: "an integer literal".into(),
                got: format!("{e:?}"),
            }),
        }
    }
}

impl Evaluator<'_, Field> {
    /// A form over the field (no `t`, no `dt`).
    pub fn form(&self, e: &Expr) -> EvalResult<Form> {
        let v = self.eval(e)?;
        let space = FormSpace::new(self.ring.clone());
        let mut degree = None;
        let mut out: Option<Form> = None;
        for (key, s) in &v.terms {
            if key.first() == Some(&0) || s.len() > 1 {
                return Err(EvalError::Shape {
                    expected: "a form over the field".into(),
                    got: "a form involving t".into(),
                });
            }
            check_degree(&mut degree, key.len())?;
            let idx: Vec<usize> = key.iter().map(|i| i - 1).collect();
            let mono = space.monomial(s[0].clone(), &idx);
            out = Some(match out {
                Some(acc) => space.add(&acc, &mono),
                None => mono,
            });
        }
        Ok(out.unwrap_or_else(|| Form::zero(0)))
    }

    /// A form over `k_{m+1}`.
    pub fn rel_form(&self, rel: &RelFormSpace, e: &Expr) -> EvalResult<RelForm> {
        let v = self.eval(e)?;
        let space = FormSpace::new(self.ring.clone());
        let mut degree = None;
        for key in v.terms.keys() {
            check_degree(&mut degree, key.len())?;
        }
        let degree = degree.unwrap_or(0);
        let mut out = rel.zero(degree);
        for (key, s) in &v.terms {
            let with_dt = key.first() == Some(&0);
            let idx: Vec<usize> = key.iter().filter(|&&i| i != 0).map(|i| i - 1).collect();
            for (j, c) in s.iter().enumerate() {
                if j > rel.m {
                    break;
                }
                let mono = space.monomial(c.clone(), &idx);
                let term = if with_dt {
                    let mut f = rel.zero(degree);
                    f.dt_part[j] = mono;
                    f
                } else {
                    rel.from_form(j, &mono)
                };
                out = rel.add(&out, &term);
            }
        }
        Ok(out)
    }

    pub fn telem(&self, ring: &TruncRing, e: &Expr) -> EvalResult<TElem> {
        Ok(ring.from_poly(&self.series(e)?))
    }
}

fn check_degree(degree: &mut Option<usize>, d: usize) -> EvalResult<()> {
    match degree {
        Some(x) if *x != d => Err(EvalError::Shape {
            expected: format!("a homogeneous form of degree {x}"),
            got: format!("a term of degree {d}"),
        }),
        _ => {
            *degree = Some(d);
            Ok(())
        }
    }
}

/// Whether an expression is read at the Witt level inside `W(m, R)`.
pub fn is_witt_level(e: &Expr) -> bool {
    match e {
        Expr::Int(_) | Expr::Witt(..) => true,
        Expr::Call(f, _) => matches!(f.as_str(), "teich" | "V" | "F"),
        Expr::Group(g) => is_witt_level(g),
        Expr::Neg(a) => is_witt_operand(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => is_witt_operand(a) && is_witt_operand(b),
        _ => false,
    }
}

/// A parenthesised series counts as a single Witt vector.
fn is_witt_operand(e: &Expr) -> bool {
    matches!(e, Expr::Group(_)) || is_witt_level(e)
}

/// Evaluate inside `W(m, R)`: parenthesised unit series and Teichmuller
/// lifts are combined with Witt addition and multiplication.
pub fn eval_witt<R: Scalars>(ring: &R, m: usize, e: &Expr) -> EvalResult<WittVector<R::Elem>> {
    let witt = WittRing::new(ring.clone());
    let ev = Evaluator::new(ring, Some(m + 1));
    eval_witt_inner(&witt, &ev, m, e)
}

fn eval_witt_inner<R: Scalars>(
    witt: &WittRing<R>,
    ev: &Evaluator<R>,
    m: usize,
    e: &Expr,
) -> EvalResult<WittVector<R::Elem>> {
    if !is_witt_level(e) {
        let s = ev.series(e)?;
        return Ok(witt.from_series(&s, m)?);
    }
    match e {
        Expr::Int(n) => {
            let k = i64::try_from(n).map_err(|_| EvalError::Shape {
                expected: "a machine integer".into(),
                got: n.to_string(),
            })?;
            Ok(witt.scale_int(&witt.one(m), k)?)
        }
        Expr::Witt(len, coords) => {
            if *len != m {
                return Err(EvalError::Shape {
                    expected: format!("W{{m={m}; ...}}"),
                    got: format!("W{{m={len}; ...}}"),
                });
            }
            let c = coords.iter().map(|x| ev.scalar(x)).collect::<EvalResult<Vec<_>>>()?;
            Ok(WittVector::full(c))
        }
        Expr::Group(g) => eval_witt_inner(witt, ev, m, g),
        Expr::Neg(a) => Ok(witt.neg(&eval_witt_inner(witt, ev, m, a)?)?),
        Expr::Add(a, b) => Ok(witt.add(&eval_witt_inner(witt, ev, m, a)?, &eval_witt_inner(witt, ev, m, b)?)?),
        Expr::Sub(a, b) => Ok(witt.sub(&eval_witt_inner(witt, ev, m, a)?, &eval_witt_inner(witt, ev, m, b)?)?),
        Expr::Mul(a, b) => Ok(witt.mul(&eval_witt_inner(witt, ev, m, a)?, &eval_witt_inner(witt, ev, m, b)?)?),
        Expr::Call(f, args) => match f.as_str() {
            "teich" => {
                let [a] = args.as_slice() else {
                    return Err(EvalError::Arity(f.clone(), 1));
                };
                Ok(witt.teichmuller(&ev.scalar(a)?, m))
            }
            "V" => {
                let [r, x] = args.as_slice() else {
                    return Err(EvalError::Arity(f.clone(), 2));
                };
                let r = ev.small_int(r)?.max(1);
                let inner = eval_witt_inner(witt, ev, m / r, x)?;
                Ok(witt.verschiebung(r, &inner, m)?)
            }
            "F" => {
                let [r, x] = args.as_slice() else {
                    return Err(EvalError::Arity(f.clone(), 2));
                };
                let r = ev.small_int(r)?.max(1);
                let inner = eval_witt_inner(witt, ev, m * r + r - 1, x)?;
                Ok(witt.frobenius(r, &inner)?)
            }
            _ => Err(EvalError::UnknownFunction(f.clone())),
        },
        _ => unreachable!("checked by is_witt_level"),
    }
}

/// Whether the field kind has a finite prime subfield.
pub fn is_char_p(f: &Field) -> bool {
    !matches!(f.kind(), FieldKind::Rationals) && f.characteristic() != 0
}

#[cfg(test)]
mod tests {
    use super::super::syntax::{parse_expr, parse_ring};
    use super::*;

    #[test]
    fn teichmuller_literal() {
        let f5 = build_field(&parse_ring("GF(5)").unwrap()).unwrap();
        let w = eval_witt(&f5, 4, &parse_expr("teich(3)").unwrap()).unwrap();
        assert_eq!(w.coords, vec![f5.from_int(3), f5.zero(), f5.zero(), f5.zero()]);
    }

    #[test]
    fn star_product_in_universal_ring() {
        let r = UniversalRing::new(&["a", "b"]);
        let w = eval_witt(&r, 6, &parse_expr("(1-a*t^2) * (1-b*t^3)").unwrap()).unwrap();
        let witt = WittRing::new(r.clone());
        let want = eval_witt(&r, 6, &parse_expr("(1 - a^3*b^2*t^6)").unwrap()).unwrap();
        assert_eq!(w, want);
        let _ = witt;
    }

    #[test]
    fn division_needs_truncation() {
        let q = Field::rationals();
        let ev = Evaluator::new(&q, None);
        assert!(ev.series(&parse_expr("1/(1-t)").unwrap()).is_err());
        let ev = Evaluator::new(&q, Some(3));
        let s = ev.series(&parse_expr("1/(1-t)").unwrap()).unwrap();
        assert_eq!(s, vec![q.one(); 3]);
    }

    #[test]
    fn forms_over_function_field() {
        let k = build_field(&parse_ring("QQ(x,y)").unwrap()).unwrap();
        let ev = Evaluator::new(&k, None);
        let w = ev.form(&parse_expr("(1/x)*dx^dy - dy^dx").unwrap()).unwrap();
        let space = FormSpace::new(k.clone());
        assert_eq!(space.format(&w), "((x + 1)/x)*dx^dy");
    }

    #[test]
    fn extension_descriptor() {
        let f = build_field(&parse_ring("Ext(GF(2), w, w^2 + w + 1)").unwrap()).unwrap();
        assert_eq!(f.size(), Some(4));
        let ev = Evaluator::new(&f, None);
        let w = ev.scalar(&parse_expr("w^3").unwrap()).unwrap();
        assert_eq!(w, f.one());
    }
}
