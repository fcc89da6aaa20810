//! Kähler differential forms over supported fields and over `k_{m+1}`.
//!
//! Over a field tower `k = F(x_1, ..., x_d)` with `F` perfect, `Omega^1_k` has
//! basis `dx_1, ..., dx_d`. A form is a map from strictly increasing index
//! lists to coefficients. Over `k_{m+1}` a form is written
//! `sum t^j omega_j + sum t^j dt ^ eta_j` with `omega_j, eta_j` forms over `k`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{poly, CommRing, FElem, Field, TElem, TruncRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("operation needs characteristic 0 (or p > m)")]
    CharPUnsupported,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("form degrees differ: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("form does not vanish at t = 0")]
    NotRelative,
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("expected {expected} slots, got {got}")]
    SlotCount { expected: usize, got: usize },
}

pub type FormResult<T> = Result<T, FormError>;

/// A homogeneous differential form over a field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub degree: usize,
    pub terms: BTreeMap<Vec<usize>, FElem>,
}

impl Form {
    pub fn zero(degree: usize) -> Self {
        Form {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Sort an index list, returning the permutation sign or `None` on a repeat.
pub fn sort_wedge(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// The exterior algebra `Omega^*_k` of a field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormSpace {
    pub field: Field,
}

impl FormSpace {
    pub fn new(field: Field) -> Self {
        FormSpace { field }
    }

    /// Number of basis differentials.
    pub fn rank(&self) -> usize {
        self.field.num_vars()
    }

    pub fn scalar(&self, c: FElem) -> Form {
        let mut f = Form::zero(0);
        if !self.field.is_zero(&c) {
            f.terms.insert(Vec::new(), c);
        }
        f
    }

    /// `c * dx_{i_1} ^ ... ^ dx_{i_k}` with arbitrary index order.
    pub fn monomial(&self, c: FElem, idx: &[usize]) -> Form {
        let mut f = Form::zero(idx.len());
        if let Some((sorted, sign)) = sort_wedge(idx) {
            let c = self.field.mul(&c, &self.field.from_int(sign));
            if !self.field.is_zero(&c) {
                f.terms.insert(sorted, c);
            }
        }
        f
    }

    fn insert(&self, f: &mut Form, key: Vec<usize>, c: FElem) {
        let k = &self.field;
        let new = match f.terms.get(&key) {
            Some(old) => k.add(old, &c),
            None => c,
        };
        if k.is_zero(&new) {
            f.terms.remove(&key);
        } else {
            f.terms.insert(key, new);
        }
    }

    pub fn add(&self, a: &Form, b: &Form) -> Form {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        debug_assert_eq!(a.degree, b.degree);
        let mut out = a.clone();
        for (key, c) in &b.terms {
            self.insert(&mut out, key.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, a: &Form) -> Form {
        Form {
            degree: a.degree,
            terms: a
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), self.field.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, a: &Form, b: &Form) -> Form {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, c: &FElem, a: &Form) -> Form {
        let mut out = Form::zero(a.degree);
        if self.field.is_zero(c) {
            return out;
        }
        for (key, x) in &a.terms {
            out.terms.insert(key.clone(), self.field.mul(c, x));
        }
        out
    }

    pub fn scale_int(&self, n: i64, a: &Form) -> Form {
        self.scale(&self.field.from_int(n), a)
    }

    pub fn wedge(&self, a: &Form, b: &Form) -> Form {
        let mut out = Form::zero(a.degree + b.degree);
        for (ka, ca) in &a.terms {
            for (kb, cb) in &b.terms {
                let mut idx = ka.clone();
                idx.extend(kb);
                if let Some((sorted, sign)) = sort_wedge(&idx) {
                    let c = self.field.mul(ca, cb);
                    let c = if sign < 0 { self.field.neg(&c) } else { c };
                    self.insert(&mut out, sorted, c);
                }
            }
        }
        out
    }

    /// `dc` for a function `c`.
    pub fn d_scalar(&self, c: &FElem) -> Form {
        let mut out = Form::zero(1);
        for i in 0..self.rank() {
            let p = self.field.partial(c, i);
            if !self.field.is_zero(&p) {
                out.terms.insert(vec![i], p);
            }
        }
        out
    }

    pub fn d(&self, a: &Form) -> Form {
        let mut out = Form::zero(a.degree + 1);
        for (key, c) in &a.terms {
            for i in 0..self.rank() {
                let p = self.field.partial(c, i);
                if self.field.is_zero(&p) {
                    continue;
                }
                let mut idx = vec![i];
                idx.extend(key);
                if let Some((sorted, sign)) = sort_wedge(&idx) {
                    let p = if sign < 0 { self.field.neg(&p) } else { p };
                    self.insert(&mut out, sorted, p);
                }
            }
        }
        out
    }

    pub fn dlog(&self, u: &FElem) -> FormResult<Form> {
        let inv = self.field.inv(u).ok_or(FormError::NotAUnit)?;
        Ok(self.scale(&inv, &self.d_scalar(u)))
    }

    /// `dlog a_1 ^ ... ^ dlog a_n`.
    pub fn dlog_chain(&self, entries: &[FElem]) -> FormResult<Form> {
        let mut acc = self.scalar(self.field.one());
        for a in entries {
            acc = self.wedge(&acc, &self.dlog(a)?);
        }
        Ok(acc)
    }

    pub fn var_name(&self, i: usize) -> String {
        self.field.var_names()[i].clone()
    }

    pub fn format(&self, a: &Form) -> String {
        format_terms(
            a.terms.iter().map(|(key, c)| {
                let gens: Vec<String> = key.iter().map(|&i| format!("d{}", self.var_name(i))).collect();
                (self.field.format(c), gens.join("^"))
            }),
        )
    }
}

/// Join `(coefficient, monomial)` pairs into `c*m + ...`.
pub fn format_terms<I: Iterator<Item = (String, String)>>(terms: I) -> String {
    let mut parts = Vec::new();
    for (cs, mono) in terms {
        let term = if mono.is_empty() {
            poly::wrap_if_compound(&cs)
        } else if cs == "1" {
            mono
        } else if cs == "-1" {
            format!("-{mono}")
        } else {
            format!("{}*{mono}", poly::wrap_if_compound(&cs))
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

/// A form over `k_{m+1}`: `sum_j t^j plain[j] + sum_j t^j dt ^ dt_part[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelForm {
    pub degree: usize,
    pub plain: Vec<Form>,
    pub dt_part: Vec<Form>,
}

impl RelForm {
    pub fn has_dt(&self) -> bool {
        self.dt_part.iter().any(|f| !f.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.plain.iter().all(Form::is_zero) && !self.has_dt()
    }

    /// Vanishes under `t = 0, dt = 0`.
    pub fn is_relative(&self) -> bool {
        self.plain[0].is_zero()
    }
}

/// A relative form together with whether it has been reduced modulo exact forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelativeFormClass {
    pub form: RelForm,
    pub reduced: bool,
}

/// Forms over the truncated ring `k_{m+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelFormSpace {
    pub forms: FormSpace,
    pub m: usize,
}

impl RelFormSpace {
    pub fn new(field: Field, m: usize) -> Self {
        RelFormSpace {
            forms: FormSpace::new(field),
            m,
        }
    }

    pub fn field(&self) -> &Field {
        &self.forms.field
    }

    pub fn ring(&self) -> TruncRing {
        TruncRing::new(self.field().clone(), self.m)
    }

    pub fn zero(&self, degree: usize) -> RelForm {
        RelForm {
            degree,
            plain: vec![Form::zero(degree); self.m + 1],
            dt_part: vec![Form::zero(degree.saturating_sub(1)); self.m + 1],
        }
    }

    /// `t^m dt = 0` whenever `m + 1` is invertible.
    fn normalize(&self, mut a: RelForm) -> RelForm {
        if self.field().inv_int(self.m as u64 + 1).is_some() {
            a.dt_part[self.m] = Form::zero(a.degree.saturating_sub(1));
        }
        a
    }

    pub fn from_telem(&self, u: &TElem) -> RelForm {
        let mut out = self.zero(0);
        for (j, c) in u.0.iter().enumerate() {
            out.plain[j] = self.forms.scalar(c.clone());
        }
        out
    }

    /// Embed `t^j * omega` for a form over `k`.
    pub fn from_form(&self, j: usize, omega: &Form) -> RelForm {
        let mut out = self.zero(omega.degree);
        if j <= self.m {
            out.plain[j] = omega.clone();
        }
        out
    }

    /// The form `dt`.
    pub fn dt(&self) -> RelForm {
        let mut out = self.zero(1);
        out.dt_part[0] = self.forms.scalar(self.field().one());
        self.normalize(out)
    }

    pub fn add(&self, a: &RelForm, b: &RelForm) -> RelForm {
        let f = &self.forms;
        let degree = if a.is_zero() { b.degree } else { a.degree };
        RelForm {
            degree,
            plain: a.plain.iter().zip(&b.plain).map(|(x, y)| f.add(x, y)).collect(),
            dt_part: a.dt_part.iter().zip(&b.dt_part).map(|(x, y)| f.add(x, y)).collect(),
        }
    }

    pub fn neg(&self, a: &RelForm) -> RelForm {
        let f = &self.forms;
        RelForm {
            degree: a.degree,
            plain: a.plain.iter().map(|x| f.neg(x)).collect(),
            dt_part: a.dt_part.iter().map(|x| f.neg(x)).collect(),
        }
    }

    pub fn sub(&self, a: &RelForm, b: &RelForm) -> RelForm {
        self.add(a, &self.neg(b))
    }

    pub fn wedge(&self, a: &RelForm, b: &RelForm) -> RelForm {
        let f = &self.forms;
        let mut out = self.zero(a.degree + b.degree);
        for i in 0..=self.m {
            for j in 0..=self.m - i {
                let k = i + j;
                out.plain[k] = f.add(&out.plain[k], &f.wedge(&a.plain[i], &b.plain[j]));
                // (t^i dt ^ beta) ^ (t^j gamma)
                out.dt_part[k] = f.add(&out.dt_part[k], &f.wedge(&a.dt_part[i], &b.plain[j]));
                // (t^i alpha) ^ (t^j dt ^ delta) = (-1)^{|alpha|} t^k dt ^ alpha ^ delta
                let w = f.wedge(&a.plain[i], &b.dt_part[j]);
                let w = if a.degree % 2 == 1 { f.neg(&w) } else { w };
                out.dt_part[k] = f.add(&out.dt_part[k], &w);
            }
        }
        self.normalize(out)
    }

    pub fn d(&self, a: &RelForm) -> RelForm {
        let f = &self.forms;
        let mut out = self.zero(a.degree + 1);
        for j in 0..=self.m {
            out.plain[j] = f.add(&out.plain[j], &f.d(&a.plain[j]));
            if j > 0 {
                let s = f.scale_int(j as i64, &a.plain[j]);
                out.dt_part[j - 1] = f.add(&out.dt_part[j - 1], &s);
            }
            out.dt_part[j] = f.sub(&out.dt_part[j], &f.d(&a.dt_part[j]));
        }
        self.normalize(out)
    }

    pub fn d_telem(&self, u: &TElem) -> RelForm {
        self.d(&self.from_telem(u))
    }

    pub fn dlog(&self, u: &TElem) -> FormResult<RelForm> {
        let ring = self.ring();
        let inv = ring.inv(u).map_err(|_| FormError::NotAUnit)?;
        Ok(self.wedge(&self.from_telem(&inv), &self.d_telem(u)))
    }

    pub fn dlog_chain(&self, entries: &[TElem]) -> FormResult<RelForm> {
        let mut acc = self.from_telem(&self.ring().one());
        for u in entries {
            acc = self.wedge(&acc, &self.dlog(u)?);
        }
        Ok(acc)
    }

    /// Canonical representative modulo exact forms.
    ///
    /// `t^j dt ^ eta` is replaced by `-t^{j+1}/(j+1) d(eta)`.
    pub fn reduce_mod_exact(&self, a: &RelForm) -> FormResult<RelativeFormClass> {
        let k = self.field();
        if k.characteristic() != 0 {
            return Err(FormError::CharPUnsupported);
        }
        let f = &self.forms;
        let mut out = a.clone();
        for j in 0..=self.m {
            let eta = std::mem::replace(&mut out.dt_part[j], Form::zero(a.degree.saturating_sub(1)));
            if eta.is_zero() || j + 1 > self.m {
                continue;
            }
            let c = k.inv(&k.from_int(-(j as i64 + 1))).expect("char 0");
            out.plain[j + 1] = f.add(&out.plain[j + 1], &f.scale(&c, &f.d(&eta)));
        }
        Ok(RelativeFormClass {
            form: out,
            reduced: true,
        })
    }

    pub fn format(&self, a: &RelForm) -> String {
        let f = &self.forms;
        let mut terms = Vec::new();
        for j in 0..=self.m {
            let tpow = match j {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{j}"),
            };
            for (key, c) in &a.plain[j].terms {
                terms.push((f.field.format(c), join_mono(&tpow, key, f, false)));
            }
            for (key, c) in &a.dt_part[j].terms {
                terms.push((f.field.format(c), join_mono(&tpow, key, f, true)));
            }
        }
        format!("{} (mod t^{})", format_terms(terms.into_iter()), self.m + 1)
    }
}

fn join_mono(tpow: &str, key: &[usize], f: &FormSpace, with_dt: bool) -> String {
    let mut gens: Vec<String> = Vec::new();
    if with_dt {
        gens.push("dt".to_string());
    }
    gens.extend(key.iter().map(|&i| format!("d{}", f.var_name(i))));
    let wedge = gens.join("^");
    match (tpow.is_empty(), wedge.is_empty()) {
        (true, _) => wedge,
        (false, true) => tpow.to_string(),
        (false, false) => format!("{tpow}*{wedge}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qxy() -> Field {
        let q = Field::rationals();
        Field::rat_fun(&Field::rat_fun(&q, "x"), "y")
    }

    #[test]
    fn d_squared_vanishes() {
        let k = qxy();
        let fs = FormSpace::new(k.clone());
        let x = k.embed_base(&k.base().unwrap().generator().unwrap());
        let y = k.generator().unwrap();
        let f = k.div(&k.mul(&x, &y), &k.add(&x, &k.one())).unwrap();
        let df = fs.d_scalar(&f);
        assert!(fs.d(&df).is_zero());
        let w = fs.scale(&x, &fs.d_scalar(&y));
        assert!(fs.d(&fs.d(&w)).is_zero());
    }

    #[test]
    fn dlog_of_product_is_sum() {
        let k = qxy();
        let fs = FormSpace::new(k.clone());
        let x = k.embed_base(&k.base().unwrap().generator().unwrap());
        let y = k.generator().unwrap();
        let lhs = fs.dlog(&k.mul(&x, &y)).unwrap();
        let rhs = fs.add(&fs.dlog(&x).unwrap(), &fs.dlog(&y).unwrap());
        assert_eq!(lhs, rhs);
        let chain = fs.dlog_chain(&[x.clone(), y.clone()]).unwrap();
        let expect = fs.monomial(k.inv(&k.mul(&x, &y)).unwrap(), &[0, 1]);
        assert_eq!(chain, expect);
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let k = qxy();
        let fs = FormSpace::new(k.clone());
        let a = fs.monomial(k.one(), &[0]);
        let b = fs.monomial(k.from_int(3), &[1]);
        assert_eq!(fs.wedge(&a, &b), fs.neg(&fs.wedge(&b, &a)));
        assert!(fs.wedge(&a, &a).is_zero());
    }

    #[test]
    fn exact_forms_reduce_to_zero() {
        let q = Field::rationals();
        let k = Field::rat_fun(&q, "x");
        let rs = RelFormSpace::new(k.clone(), 4);
        let ring = rs.ring();
        let x = k.generator().unwrap();
        let u = ring.from_poly(&[x.clone(), k.from_int(2), k.mul(&x, &x), k.one()]);
        let v = ring.from_poly(&[k.one(), x.clone()]);
        let eta = rs.wedge(&rs.from_telem(&u), &rs.d_telem(&v));
        let red = rs.reduce_mod_exact(&rs.d(&eta)).unwrap();
        assert!(red.form.is_zero());
    }

    #[test]
    fn t_dt_with_constant_coefficient_dies() {
        let q = Field::rationals();
        let k = Field::rat_fun(&q, "x");
        let rs = RelFormSpace::new(k.clone(), 3);
        let ring = rs.ring();
        let b = k.generator().unwrap();
        let w = rs.wedge(&rs.wedge(&rs.from_telem(&ring.t()), &rs.dt()), &rs.from_form(0, &rs.forms.dlog(&b).unwrap()));
        let red = rs.reduce_mod_exact(&w).unwrap();
        assert!(red.form.is_zero());
    }

    #[test]
    fn top_dt_power_vanishes_in_char_zero() {
        let q = Field::rationals();
        let rs = RelFormSpace::new(q.clone(), 2);
        let ring = rs.ring();
        let t2 = ring.monomial(q.one(), 2);
        assert!(rs.wedge(&rs.from_telem(&t2), &rs.dt()).is_zero());
        assert_eq!(rs.format(&rs.d_telem(&ring.t())), "dt (mod t^3)");
    }
}
