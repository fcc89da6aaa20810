//! Cartier calculus on one-variable function fields `F_q(x)`.
//!
//! A 1-form is `f dx`; in one variable every 1-form is closed, so the
//! filtration `B_s` is the kernel of `C^s`.

use num_bigint::BigInt;
use num_integer::binomial;
use thiserror::Error;

use crate::algebra::{poly, AlgebraError, FElem, Field, FieldKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartierError {
    #[error("{0} is not a function field F_q(x)")]
    UnsupportedField(String),
    #[error("Cartier operators need positive characteristic")]
    CharZero,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("form has a nonzero x^(p-1) component and is not exact")]
    NotIntegrable,
    #[error("p = {p} divides m' = {m_prime}")]
    BadDecomposition { p: u64, m_prime: u64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub type CartierResult<T> = Result<T, CartierError>;

/// `f dx`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneForm(pub FElem);

/// `f = sum_i f_i^p x^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDecomposition {
    pub components: Vec<FElem>,
}

/// `F_q(x)` with its Cartier operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionField {
    pub field: Field,
    pub constants: Field,
    pub p: u64,
}

impl FunctionField {
    pub fn new(field: Field) -> CartierResult<Self> {
        let FieldKind::RatFun { base, .. } = field.kind() else {
            return Err(CartierError::UnsupportedField(field.to_string()));
        };
        if !base.is_finite() {
            return Err(if base.characteristic() == 0 {
                CartierError::CharZero
            } else {
                CartierError::UnsupportedField(field.to_string())
            });
        }
        let constants = base.clone();
        let p = field.characteristic();
        Ok(FunctionField { field, constants, p })
    }

    pub fn over(constants: &Field) -> CartierResult<Self> {
        Self::new(Field::rat_fun(constants, "x"))
    }

    pub fn x(&self) -> FElem {
        self.field.generator().expect("function field")
    }

    fn parts<'a>(&self, f: &'a FElem) -> (&'a [FElem], &'a [FElem]) {
        match f {
            FElem::Frac(n, d) => (n, d),
            _ => panic!("not a function field element"),
        }
    }

    pub fn derivative(&self, f: &FElem) -> FElem {
        self.field.partial(f, 0)
    }

    pub fn d(&self, f: &FElem) -> OneForm {
        OneForm(self.derivative(f))
    }

    pub fn add(&self, a: &OneForm, b: &OneForm) -> OneForm {
        OneForm(self.field.add(&a.0, &b.0))
    }

    pub fn sub(&self, a: &OneForm, b: &OneForm) -> OneForm {
        OneForm(self.field.sub(&a.0, &b.0))
    }

    pub fn scale(&self, c: &FElem, a: &OneForm) -> OneForm {
        OneForm(self.field.mul(c, &a.0))
    }

    pub fn is_zero(&self, a: &OneForm) -> bool {
        self.field.is_zero(&a.0)
    }

    pub fn p_decompose(&self, f: &FElem) -> CartierResult<PDecomposition> {
        let k = &self.constants;
        let p = self.p as usize;
        let (n, d) = self.parts(f);
        // f = n d^(p-1) / d^p and d^p is a p-th power
        let num = poly::mul(k, n, &poly::pow(k, d, (p - 1) as u64));
        let mut components = Vec::with_capacity(p);
        for i in 0..p {
            let mut g = Vec::new();
            for (j, c) in num.iter().enumerate().skip(i).step_by(p) {
                let e = (j - i) / p;
                if g.len() <= e {
                    g.resize(e + 1, k.zero());
                }
                g[e] = k.pth_root(c)?;
            }
            let g = poly::trim(g, k);
            components.push(self.field.frac(g, d.to_vec())?);
        }
        Ok(PDecomposition { components })
    }

    pub fn reassemble(&self, dec: &PDecomposition) -> FElem {
        let x = self.x();
        let mut acc = self.field.zero();
        for (i, c) in dec.components.iter().enumerate() {
            let term = self.field.mul(&self.field.pow(c, self.p), &self.field.pow(&x, i as u64));
            acc = self.field.add(&acc, &term);
        }
        acc
    }

    /// `C(f dx) = f_{p-1} dx`.
    pub fn cartier(&self, w: &OneForm) -> CartierResult<OneForm> {
        let dec = self.p_decompose(&w.0)?;
        Ok(OneForm(dec.components[self.p as usize - 1].clone()))
    }

    pub fn cartier_iter(&self, w: &OneForm, s: usize) -> CartierResult<OneForm> {
        let mut cur = w.clone();
        for _ in 0..s {
            cur = self.cartier(&cur)?;
        }
        Ok(cur)
    }

    /// `C^{-1}(r) = r^{p-1} dr`.
    pub fn inverse_cartier_fn(&self, r: &FElem) -> OneForm {
        let f = &self.field;
        OneForm(f.mul(&f.pow(r, self.p - 1), &self.derivative(r)))
    }

    /// `C^{-1}(a db) = a^p b^{p-1} db`.
    pub fn inverse_cartier_form(&self, a: &FElem, b: &FElem) -> OneForm {
        let f = &self.field;
        self.scale(&f.pow(a, self.p), &self.inverse_cartier_fn(b))
    }

    /// `C^{-1}(f dx) = f^p x^{p-1} dx`.
    pub fn inverse_cartier(&self, w: &OneForm) -> OneForm {
        self.inverse_cartier_form(&w.0, &self.x())
    }

    /// `C^{-s}`, well defined modulo `B_s`.
    pub fn inverse_cartier_iter(&self, w: &OneForm, s: usize) -> OneForm {
        let mut cur = w.clone();
        for _ in 0..s {
            cur = self.inverse_cartier(&cur);
        }
        cur
    }

    /// `dP(r_1, r_2)`.
    pub fn d_p_polynomial(&self, r1: &FElem, r2: &FElem) -> CartierResult<OneForm> {
        let f = &self.field;
        let poly_p = p_polynomial(self.p)?;
        let (d1, d2) = (self.derivative(r1), self.derivative(r2));
        let mut acc = f.zero();
        for (i, c) in poly_p.iter().enumerate() {
            // c X^{p-i} Y^i
            let c = f.from_bigint(c);
            let xi = (self.p as usize) - i;
            if c == f.zero() || i == 0 || xi == 0 {
                continue;
            }
            let dx_part = f.mul(
                &f.mul(&f.from_int(xi as i64), &f.pow(r1, xi as u64 - 1)),
                &f.mul(&f.pow(r2, i as u64), &d1),
            );
            let dy_part = f.mul(
                &f.mul(&f.from_int(i as i64), &f.pow(r1, xi as u64)),
                &f.mul(&f.pow(r2, i as u64 - 1), &d2),
            );
            acc = f.add(&acc, &f.mul(&c, &f.add(&dx_part, &dy_part)));
        }
        Ok(OneForm(acc))
    }

    pub fn bs_member(&self, w: &OneForm, s: usize) -> CartierResult<bool> {
        Ok(self.is_zero(&self.cartier_iter(w, s)?))
    }

    pub fn zs_member(&self, _w: &OneForm, _s: usize) -> bool {
        true
    }

    /// `g` with `dg = w`, for `w` in the kernel of `C`.
    pub fn antiderivative(&self, w: &OneForm) -> CartierResult<FElem> {
        let f = &self.field;
        let dec = self.p_decompose(&w.0)?;
        let p = self.p as usize;
        if !f.is_zero(&dec.components[p - 1]) {
            return Err(CartierError::NotIntegrable);
        }
        let x = self.x();
        let mut g = f.zero();
        for (i, c) in dec.components.iter().enumerate().take(p - 1) {
            let coef = f.div(&f.one(), &f.from_int(i as i64 + 1))?;
            let term = f.mul(&coef, &f.mul(&f.pow(c, self.p), &f.pow(&x, i as u64 + 1)));
            g = f.add(&g, &term);
        }
        Ok(g)
    }

    /// `p^s`-th root, if it exists.
    pub fn iterated_root(&self, a: &FElem, s: usize) -> Option<FElem> {
        let mut cur = a.clone();
        for _ in 0..s {
            cur = self.field.pth_root(&cur).ok()?;
        }
        Some(cur)
    }

    pub fn format_form(&self, w: &OneForm) -> String {
        if self.is_zero(w) {
            return "0".into();
        }
        let c = self.field.format(&w.0);
        if c == "1" {
            "dx".into()
        } else {
            format!("{} dx", poly::wrap_if_compound(&c))
        }
    }
}

/// Coefficients of `P(X, Y) = sum_{i=1}^{p-1} (1/p) C(p, i) X^{p-i} Y^i`,
/// indexed by the power of `Y` (entries `0` and `p` are zero).
pub fn p_polynomial(p: u64) -> CartierResult<Vec<BigInt>> {
    if !crate::algebra::field::is_prime(p) {
        return Err(CartierError::NotPrime(p));
    }
    let pb = BigInt::from(p);
    Ok((0..=p)
        .map(|i| {
            if i == 0 || i == p {
                BigInt::from(0)
            } else {
                binomial(pb.clone(), BigInt::from(i)) / &pb
            }
        })
        .collect())
}

/// Splitting `m = m' p^s` with `p` not dividing `m'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrLevel {
    pub m_prime: u64,
    pub s: usize,
}

impl GrLevel {
    pub fn from_m(m: u64, p: u64) -> Self {
        let (mut m_prime, mut s) = (m, 0);
        while m_prime % p == 0 && m_prime > 0 {
            m_prime /= p;
            s += 1;
        }
        GrLevel { m_prime, s }
    }

    pub fn m(&self, p: u64) -> u64 {
        self.m_prime * p.pow(self.s as u32)
    }
}

/// `(omega mod B_s, beta)` for `q = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrClass {
    pub omega: OneForm,
    pub beta: FElem,
    pub level: GrLevel,
}

impl FunctionField {
    fn check_level(&self, level: GrLevel) -> CartierResult<()> {
        if level.m_prime % self.p == 0 {
            return Err(CartierError::BadDecomposition {
                p: self.p,
                m_prime: level.m_prime,
            });
        }
        Ok(())
    }

    /// `theta(alpha) = (C^{-s}(d alpha), m' C^{-s}(alpha))`.
    pub fn theta(&self, alpha: &FElem, level: GrLevel) -> CartierResult<GrClass> {
        self.check_level(level)?;
        let f = &self.field;
        let ps = self.p.pow(level.s as u32);
        let omega = self.scale(&f.pow(alpha, ps - 1), &self.d(alpha));
        let beta = f.mul(&f.from_int(level.m_prime as i64), &f.pow(alpha, ps));
        Ok(GrClass { omega, beta, level })
    }

    pub fn gr_add(&self, a: &GrClass, b: &GrClass) -> GrClass {
        GrClass {
            omega: self.add(&a.omega, &b.omega),
            beta: self.field.add(&a.beta, &b.beta),
            level: a.level,
        }
    }

    /// Whether `c1 - c2` lies in the image of `theta`.
    pub fn grm_equal(&self, c1: &GrClass, c2: &GrClass) -> CartierResult<bool> {
        self.check_level(c1.level)?;
        let f = &self.field;
        let level = c1.level;
        let d_beta = f.sub(&c1.beta, &c2.beta);
        let d_omega = self.sub(&c1.omega, &c2.omega);
        let scaled = f.div(&d_beta, &f.from_int(level.m_prime as i64))?;
        let Some(alpha) = self.iterated_root(&scaled, level.s) else {
            return Ok(false);
        };
        let image = self.theta(&alpha, level)?;
        self.bs_member(&self.sub(&d_omega, &image.omega), level.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ff(p: u64) -> FunctionField {
        FunctionField::over(&Field::prime(p).unwrap()).unwrap()
    }

    fn poly_elem(k: &FunctionField, coeffs: &[i64]) -> FElem {
        let c: Vec<FElem> = coeffs.iter().map(|&n| k.constants.from_int(n)).collect();
        k.field.frac(c, vec![k.constants.one()]).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let k = ff(2);
        let x = k.x();
        let dec = k.p_decompose(&x).unwrap();
        assert_eq!(dec.components, vec![k.field.zero(), k.field.one()]);
        let inv = k.field.inv(&poly_elem(&k, &[1, 1])).unwrap();
        let dec = k.p_decompose(&inv).unwrap();
        assert_eq!(dec.components, vec![inv.clone(), inv.clone()]);
        assert_eq!(k.reassemble(&dec), inv);
        let k3 = ff(3);
        let x3 = k3.field.pow(&k3.x(), 3);
        assert_eq!(k3.p_decompose(&x3).unwrap().components[0], k3.x());
    }

    #[test]
    fn cartier_examples() {
        for p in [2, 3, 5] {
            let k = ff(p);
            let w = OneForm(k.field.pow(&k.x(), p - 1));
            assert_eq!(k.cartier(&w).unwrap(), OneForm(k.field.one()));
            assert!(k.is_zero(&k.cartier(&OneForm(k.field.one())).unwrap()));
            assert!(!k.bs_member(&w, 1).unwrap());
            assert!(k.bs_member(&w, 2).unwrap());
        }
    }

    #[test]
    fn p_polynomials() {
        let as_i64 = |v: Vec<BigInt>| v.iter().map(|c| i64::try_from(c).unwrap()).collect::<Vec<_>>();
        assert_eq!(as_i64(p_polynomial(2).unwrap()), vec![0, 1, 0]);
        assert_eq!(as_i64(p_polynomial(3).unwrap()), vec![0, 1, 1, 0]);
        assert_eq!(as_i64(p_polynomial(5).unwrap()), vec![0, 1, 2, 2, 1, 0]);
        assert_eq!(p_polynomial(4), Err(CartierError::NotPrime(4)));
    }

    #[test]
    fn inverse_cartier_of_x() {
        let k = ff(3);
        let x = k.x();
        assert_eq!(k.inverse_cartier_fn(&x), OneForm(k.field.pow(&x, 2)));
    }

    #[test]
    fn antiderivative_of_exact_form() {
        let k = ff(3);
        let g = k.field.div(&poly_elem(&k, &[1, 2, 0, 1, 1]), &poly_elem(&k, &[2, 1])).unwrap();
        let w = k.d(&g);
        let h = k.antiderivative(&w).unwrap();
        assert_eq!(k.d(&h), w);
    }

    #[test]
    fn theta_is_trivial_in_gr() {
        let k = ff(2);
        let level = GrLevel::from_m(4, 2);
        assert_eq!(level, GrLevel { m_prime: 1, s: 2 });
        let zero = GrClass {
            omega: OneForm(k.field.zero()),
            beta: k.field.zero(),
            level,
        };
        let alpha = poly_elem(&k, &[1, 1, 1]);
        let t = k.theta(&alpha, level).unwrap();
        assert!(k.grm_equal(&t, &zero).unwrap());
        assert!(k.grm_equal(&k.theta(&k.field.zero(), level).unwrap(), &zero).unwrap());
        assert_eq!(
            k.theta(&alpha, GrLevel { m_prime: 2, s: 0 }),
            Err(CartierError::BadDecomposition { p: 2, m_prime: 2 })
        );
    }
}
