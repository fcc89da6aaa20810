//! The characteristic-zero model `W_m Omega^q_k = t Omega^q_k + ... + t^m Omega^q_k`.
//!
//! Slot `n` holds the coefficient of `t^n`. In terms of ghost components
//! `x_n` of the de Rham-Witt complex of a `Q`-algebra, slot `n` is `x_n / n`.
//! This fixes the operators:
//!
//! * `V_r`: slot `i` moves to slot `r i`;
//! * `F_r`: slot `n` becomes `r * slot(r n)`;
//! * `d`: slot `n` becomes `(1/n) d(slot n)`;
//! * product: slot `n` is `n * x_n ^ y_n`;
//! * `[a]`: slot `n` is `a^n / n`, and `dlog [a]` has slot `n` equal to `(1/n) da/a`.

use crate::algebra::{FElem, Field};
use crate::forms::{Form, FormError, FormResult, FormSpace, RelForm, RelFormSpace, RelativeFormClass};
use crate::witt::{WittRing, WittVector};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DrwElement {
    pub m: usize,
    pub degree: usize,
    /// `slots[i]` is the coefficient of `t^{i+1}`.
    pub slots: Vec<Form>,
}

impl DrwElement {
    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(Form::is_zero)
    }

    pub fn slot(&self, n: usize) -> &Form {
        &self.slots[n - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DrwSpace {
    pub forms: FormSpace,
}

impl DrwSpace {
    pub fn new(field: Field) -> FormResult<Self> {
        if field.characteristic() != 0 {
            return Err(FormError::CharPUnsupported);
        }
        Ok(DrwSpace {
            forms: FormSpace::new(field),
        })
    }

    pub fn field(&self) -> &Field {
        &self.forms.field
    }

    fn inv_n(&self, n: usize) -> FElem {
        self.field().inv(&self.field().from_int(n as i64)).expect("char 0")
    }

    pub fn zero(&self, m: usize, degree: usize) -> DrwElement {
        DrwElement {
            m,
            degree,
            slots: vec![Form::zero(degree); m],
        }
    }

    pub fn from_slots(&self, degree: usize, slots: Vec<Form>) -> DrwElement {
        DrwElement {
            m: slots.len(),
            degree,
            slots,
        }
    }

    pub fn add(&self, a: &DrwElement, b: &DrwElement) -> FormResult<DrwElement> {
        if a.m != b.m {
            return Err(FormError::TruncationMismatch(a.m, b.m));
        }
        let degree = if a.is_zero() { b.degree } else { a.degree };
        Ok(DrwElement {
            m: a.m,
            degree,
            slots: a.slots.iter().zip(&b.slots).map(|(x, y)| self.forms.add(x, y)).collect(),
        })
    }

    pub fn neg(&self, a: &DrwElement) -> DrwElement {
        DrwElement {
            m: a.m,
            degree: a.degree,
            slots: a.slots.iter().map(|x| self.forms.neg(x)).collect(),
        }
    }

    pub fn scale_int(&self, a: &DrwElement, n: i64) -> DrwElement {
        DrwElement {
            m: a.m,
            degree: a.degree,
            slots: a.slots.iter().map(|x| self.forms.scale_int(n, x)).collect(),
        }
    }

    pub fn mul(&self, a: &DrwElement, b: &DrwElement) -> FormResult<DrwElement> {
        if a.m != b.m {
            return Err(FormError::TruncationMismatch(a.m, b.m));
        }
        let slots = (1..=a.m)
            .map(|n| {
                let w = self.forms.wedge(a.slot(n), b.slot(n));
                self.forms.scale_int(n as i64, &w)
            })
            .collect();
        Ok(DrwElement {
            m: a.m,
            degree: a.degree + b.degree,
            slots,
        })
    }

    pub fn one(&self, m: usize) -> DrwElement {
        let slots = (1..=m).map(|n| self.forms.scalar(self.inv_n(n))).collect();
        self.from_slots(0, slots)
    }

    pub fn teichmuller(&self, a: &FElem, m: usize) -> DrwElement {
        let k = self.field();
        let slots = (1..=m)
            .map(|n| self.forms.scalar(k.mul(&k.pow(a, n as u64), &self.inv_n(n))))
            .collect();
        self.from_slots(0, slots)
    }

    /// Degree-0 element attached to a Witt vector: slot `n` is `w_n / n`.
    pub fn from_witt(&self, w: &WittVector<FElem>) -> DrwElement {
        let wr = WittRing::new(self.field().clone());
        let ghost = wr.ghost(w);
        let slots = ghost
            .iter()
            .enumerate()
            .map(|(i, g)| self.forms.scalar(self.field().mul(g, &self.inv_n(i + 1))))
            .collect();
        self.from_slots(0, slots)
    }

    /// `dlog [a]`: slot `n` is `(1/n) da/a`.
    pub fn dlog_teichmuller(&self, a: &FElem, m: usize) -> FormResult<DrwElement> {
        let dl = self.forms.dlog(a)?;
        let slots = (1..=m).map(|n| self.forms.scale(&self.inv_n(n), &dl)).collect();
        Ok(self.from_slots(1, slots))
    }

    /// `V_r` into length `target <= r m + r - 1`.
    pub fn verschiebung(&self, r: usize, a: &DrwElement, target: usize) -> DrwElement {
        let mut out = self.zero(target, a.degree);
        for i in 1..=a.m {
            if r * i <= target {
                out.slots[r * i - 1] = a.slot(i).clone();
            }
        }
        out
    }

    pub fn verschiebung_natural(&self, r: usize, a: &DrwElement) -> DrwElement {
        self.verschiebung(r, a, r * a.m + r - 1)
    }

    /// `F_r` into length `floor(m / r)`.
    pub fn frobenius(&self, r: usize, a: &DrwElement) -> DrwElement {
        let m = a.m / r;
        let slots = (1..=m)
            .map(|n| self.forms.scale_int(r as i64, a.slot(r * n)))
            .collect();
        self.from_slots(a.degree, slots)
    }

    pub fn d(&self, a: &DrwElement) -> DrwElement {
        let slots = (1..=a.m)
            .map(|n| self.forms.scale(&self.inv_n(n), &self.forms.d(a.slot(n))))
            .collect();
        self.from_slots(a.degree + 1, slots)
    }

    pub fn restrict(&self, a: &DrwElement, k: usize) -> DrwElement {
        self.from_slots(a.degree, a.slots.iter().take(k).cloned().collect())
    }

    /// `b * dlog[a_1] ^ ... ^ dlog[a_r]`.
    pub fn con(&self, b: &WittVector<FElem>, entries: &[FElem]) -> FormResult<DrwElement> {
        let base = self.from_witt(b);
        let chain = self.forms.dlog_chain(entries)?;
        let slots = base.slots.iter().map(|s| self.forms.wedge(s, &chain)).collect();
        Ok(self.from_slots(entries.len(), slots))
    }

    /// Slot `i` of a reduced relative form is its `t^i` coefficient.
    pub fn decompose(&self, rel: &RelFormSpace, class: &RelativeFormClass) -> FormResult<DrwElement> {
        if !class.reduced || class.form.has_dt() {
            return Err(FormError::NotRelative);
        }
        if !class.form.is_relative() {
            return Err(FormError::NotRelative);
        }
        let slots = class.form.plain[1..=rel.m].to_vec();
        Ok(self.from_slots(class.form.degree, slots))
    }

    pub fn recompose(&self, rel: &RelFormSpace, a: &DrwElement) -> FormResult<RelativeFormClass> {
        if a.m != rel.m {
            return Err(FormError::SlotCount {
                expected: rel.m,
                got: a.m,
            });
        }
        let mut form: RelForm = rel.zero(a.degree);
        for n in 1..=a.m {
            form.plain[n] = a.slot(n).clone();
        }
        Ok(RelativeFormClass {
            form,
            reduced: true,
        })
    }

    pub fn format(&self, a: &DrwElement) -> String {
        let parts: Vec<String> = a.slots.iter().map(|s| self.forms.format(s)).collect();
        format!("DRW{{m={}; [{}]}}", a.m, parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> (DrwSpace, Field) {
        let k = Field::rat_fun(&Field::rationals(), "x");
        (DrwSpace::new(k.clone()).unwrap(), k)
    }

    #[test]
    fn char_p_is_rejected() {
        assert_eq!(
            DrwSpace::new(Field::prime(5).unwrap()),
            Err(FormError::CharPUnsupported)
        );
    }

    #[test]
    fn frobenius_after_verschiebung() {
        let (s, k) = space();
        let x = k.generator().unwrap();
        let a = s.teichmuller(&x, 3);
        let v = s.verschiebung_natural(2, &a);
        assert_eq!(s.frobenius(2, &v), s.scale_int(&a, 2));
        assert_eq!(s.frobenius(2, &s.d(&v)), s.d(&a));
    }

    #[test]
    fn frobenius_of_d_teichmuller() {
        let (s, k) = space();
        let x = k.add(&k.generator().unwrap(), &k.from_int(3));
        let m = 8;
        for r in 1..=4 {
            let lhs = s.frobenius(r, &s.d(&s.teichmuller(&x, m)));
            let small = m / r;
            let pow = s.teichmuller(&k.pow(&x, r as u64 - 1), small);
            let rhs = s.mul(&pow, &s.d(&s.teichmuller(&x, small))).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn unit_is_multiplicative_identity() {
        let (s, k) = space();
        let a = s.dlog_teichmuller(&k.generator().unwrap(), 4).unwrap();
        assert_eq!(s.mul(&s.one(4), &a).unwrap(), a);
    }

    #[test]
    fn decompose_round_trip() {
        let (s, k) = space();
        let rel = RelFormSpace::new(k.clone(), 3);
        let x = k.generator().unwrap();
        let w = rel.from_form(2, &rel.forms.dlog(&x).unwrap());
        let class = rel.reduce_mod_exact(&w).unwrap();
        let e = s.decompose(&rel, &class).unwrap();
        assert!(e.slot(1).is_zero() && e.slot(3).is_zero());
        assert_eq!(e.slot(2), &rel.forms.dlog(&x).unwrap());
        assert_eq!(s.recompose(&rel, &e).unwrap(), class);
    }
}
