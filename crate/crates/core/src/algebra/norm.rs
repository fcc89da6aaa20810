//! Coefficientwise norms from `k'_{m+1}` down to `k_{m+1}`.
//!
//! For `k' = k[theta]/(g)` the ring `k'_{m+1}` is free over `k_{m+1}` on
//! `1, theta, ..., theta^{d-1}`; the norm of `u` is the determinant of
//! multiplication by `u`, which equals the product over conjugates.

use super::error::{AlgebraError, AlgebraResult};
use super::field::{FElem, Field};
use super::poly;
use super::ring::CommRing;
use super::truncated::{TElem, TruncRing};

/// Norm of a unit `u` of `ext_ring = k'_{m+1}` to `k_{m+1}`.
pub fn norm_coeffwise(ext_ring: &TruncRing, u: &TElem) -> AlgebraResult<TElem> {
    let ext = &ext_ring.base;
    let base = ext
        .base()
        .ok_or_else(|| AlgebraError::UnsupportedField(ext.to_string()))?
        .clone();
    let modulus = ext
        .modulus()
        .ok_or_else(|| AlgebraError::UnsupportedField(ext.to_string()))?
        .to_vec();
    let dg = poly::derivative(&base, &modulus);
    if poly::degree(&poly::gcd(&base, &modulus, &dg)) != Some(0) {
        return Err(AlgebraError::InseparableExtension);
    }
    if !ext_ring.is_unit_elem(u) {
        return Err(AlgebraError::NotAUnit);
    }
    let d = ext.ext_degree();
    let small = TruncRing::new(base.clone(), ext_ring.m);
    let theta = ext.generator().expect("extension has a generator");
    // column j of the matrix is u * theta^j written in the theta basis
    let mut matrix = vec![vec![small.zero(); d]; d];
    let mut theta_pow = ext.one();
    for j in 0..d {
        let col: Vec<FElem> = u.0.iter().map(|c| ext.mul(c, &theta_pow)).collect();
        for (k, c) in col.iter().enumerate() {
            let coeffs = ext.ext_coeffs(c);
            for (i, row) in matrix.iter_mut().enumerate() {
                if let Some(ci) = coeffs.get(i) {
                    row[j].0[k] = ci.clone();
                }
            }
        }
        theta_pow = ext.mul(&theta_pow, &theta);
    }
    determinant(&small, matrix)
}

/// Determinant over `k_{m+1}` by elimination with unit pivots.
pub fn determinant(ring: &TruncRing, mut a: Vec<Vec<TElem>>) -> AlgebraResult<TElem> {
    let n = a.len();
    let mut det = ring.one();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| ring.is_unit_elem(&a[r][col]))
            .ok_or(AlgebraError::NotAUnit)?;
        if pivot != col {
            a.swap(pivot, col);
            det = ring.neg(&det);
        }
        let piv = a[col][col].clone();
        det = ring.mul(&det, &piv);
        let piv_inv = ring.inv(&piv)?;
        for r in col + 1..n {
            let factor = ring.mul(&a[r][col], &piv_inv);
            if ring.is_zero(&factor) {
                continue;
            }
            for c in col..n {
                let sub = ring.mul(&factor, &a[col][c]);
                a[r][c] = ring.sub(&a[r][c], &sub);
            }
        }
    }
    Ok(det)
}

/// Embed a `k_{m+1}` element coefficientwise into `k'_{m+1}`.
pub fn lift_coeffs(ext: &Field, a: &TElem) -> TElem {
    TElem(a.0.iter().map(|c| ext.embed_base(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_product_over_f4() {
        let f4 = Field::galois(2, 2).unwrap();
        let f2 = f4.base().unwrap().clone();
        let big = TruncRing::new(f4.clone(), 2);
        let theta = f4.generator().unwrap();
        let u = big.from_poly(&[f4.one(), theta]);
        let n = norm_coeffwise(&big, &u).unwrap();
        let small = TruncRing::new(f2.clone(), 2);
        assert_eq!(n, small.from_poly(&[f2.one(), f2.one(), f2.one()]));
    }

    #[test]
    fn base_elements_raise_to_degree() {
        let f9 = Field::galois(3, 2).unwrap();
        let f3 = f9.base().unwrap().clone();
        let small = TruncRing::new(f3.clone(), 3);
        let v = small.from_poly(&[f3.from_int(2), f3.one(), f3.zero(), f3.from_int(2)]);
        let big = TruncRing::new(f9.clone(), 3);
        let n = norm_coeffwise(&big, &lift_coeffs(&f9, &v)).unwrap();
        assert_eq!(n, small.mul(&v, &v));
    }

    #[test]
    fn root_of_minimal_polynomial_gives_reversed_quotient() {
        // c a root of x^2 - 2 over QQ: N(1 - t/c) = f(t)/f(0) with f = t^2 - 2
        let q = Field::rationals();
        let ext = Field::extension(&q, vec![q.from_int(-2), q.zero(), q.one()], "c").unwrap();
        let c = ext.generator().unwrap();
        let big = TruncRing::new(ext.clone(), 3);
        let u = big.from_poly(&[ext.one(), ext.neg(&ext.inv(&c).unwrap())]);
        let n = norm_coeffwise(&big, &u).unwrap();
        let small = TruncRing::new(q.clone(), 3);
        let half = q.div(&q.one(), &q.from_int(-2)).unwrap();
        assert_eq!(n, small.from_poly(&[q.one(), q.zero(), half]));
    }
}
