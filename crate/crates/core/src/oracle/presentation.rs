//! Presentations of `K^M_n(R)` and symbol class coordinates.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::snf::{self, Matrix, SnfResult};
use super::units::UnitGroup;
use super::{OracleError, OracleResult};
use crate::algebra::{CommRing, TElem, TruncRing, UnitRing};
use crate::milnor::SymbolSum;

pub const DEFAULT_GENERATOR_CAP: u128 = 20_000;

/// Coordinates of a class in the Smith basis, reduced modulo the
/// invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClassCoords {
    #[serde(serialize_with = "ser_big")]
    pub moduli: Vec<BigInt>,
    #[serde(serialize_with = "ser_big")]
    pub values: Vec<BigInt>,
}

fn ser_big<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl ClassCoords {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug)]
pub struct KPresentation {
    pub ring: TruncRing,
    pub n: usize,
    pub units: UnitGroup,
    /// Tensor generators: tuples of cyclic-factor indices of `R^x`.
    pub basis: Vec<Vec<usize>>,
    pub relations: Matrix,
    pub snf: SnfResult,
    /// `|R^x|^n`, the size of the naive generating set.
    pub tuple_count: u128,
    /// Positions of the Smith basis with nontrivial order.
    keep: Vec<usize>,
}

fn tuples(r: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &out {
            for i in 0..r {
                let mut v = t.clone();
                v.push(i);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl KPresentation {
    pub fn new(ring: &TruncRing, n: usize) -> OracleResult<Self> {
        Self::with_cap(ring, n, DEFAULT_GENERATOR_CAP)
    }

    pub fn with_cap(ring: &TruncRing, n: usize, cap: u128) -> OracleResult<Self> {
        if n == 0 {
            return Err(OracleError::ZeroDegree);
        }
        let size = ring
            .base
            .size()
            .ok_or_else(|| OracleError::InfiniteRing(ring.to_string()))? as u128;
        let unit_count = (size - 1) * size.pow(ring.m as u32);
        let tuple_count = unit_count.checked_pow(n as u32).unwrap_or(u128::MAX);
        if tuple_count > cap {
            return Err(OracleError::CapExceeded { tuples: tuple_count, cap });
        }
        let units = UnitGroup::new(ring)?;
        let r = units.rank();
        let basis = tuples(r, n);
        let cols = basis.len();
        let mut rows: BTreeSet<Vec<BigInt>> = BTreeSet::new();
        for (idx, t) in basis.iter().enumerate() {
            let g = t
                .iter()
                .fold(BigInt::zero(), |acc, &i| acc.gcd(&units.orders[i]));
            let mut row = vec![BigInt::zero(); cols];
            row[idx] = g;
            rows.insert(row);
        }
        if n >= 2 {
            let others = tuples(r, n - 2);
            for a in &units.elements {
                let b = ring.sub(&ring.one(), a);
                if !ring.is_unit(&b) {
                    continue;
                }
                let la = units.log(a).expect("unit").to_vec();
                let lb = units.log(&b).expect("unit").to_vec();
                for p in 0..n - 1 {
                    for rest in &others {
                        let mut row = vec![BigInt::zero(); cols];
                        for (i, x) in la.iter().enumerate() {
                            if x.is_zero() {
                                continue;
                            }
                            for (j, y) in lb.iter().enumerate() {
                                if y.is_zero() {
                                    continue;
                                }
                                let mut t = rest.clone();
                                t.insert(p, i);
                                t.insert(p + 1, j);
                                row[index_of(&t, r)] += x * y;
                            }
                        }
                        if row.iter().any(|c| !c.is_zero()) {
                            rows.insert(row);
                        }
                    }
                }
            }
        }
        let relations: Matrix = rows.into_iter().collect();
        let snf = snf::smith(&relations, cols, false);
        let keep = (0..cols)
            .filter(|&j| !snf.cokernel_orders()[j].is_one())
            .collect();
        Ok(KPresentation {
            ring: ring.clone(),
            n,
            units,
            basis,
            relations,
            snf,
            tuple_count,
            keep,
        })
    }

    pub fn num_generators(&self) -> usize {
        self.basis.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn verify_snf(&self) -> bool {
        snf::verify(&self.relations, &self.snf)
    }

    /// Nontrivial invariant factors; `0` would mark a free factor.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let orders = self.snf.cokernel_orders();
        self.keep.iter().map(|&j| orders[j].clone()).collect()
    }

    pub fn group_order(&self) -> BigInt {
        self.invariant_factors().iter().fold(BigInt::one(), |a, b| a * b)
    }

    /// Image of one symbol in the tensor basis.
    pub fn tensor_vector(&self, entries: &[TElem]) -> OracleResult<Vec<BigInt>> {
        if entries.len() != self.n {
            return Err(OracleError::DegreeMismatch {
                expected: self.n,
                got: entries.len(),
            });
        }
        let mut logs = Vec::with_capacity(self.n);
        for e in entries {
            let l = self
                .units
                .log(e)
                .ok_or_else(|| OracleError::RingMismatch(self.ring.to_string()))?;
            logs.push(l.to_vec());
        }
        let mut out = vec![BigInt::zero(); self.basis.len()];
        for (idx, t) in self.basis.iter().enumerate() {
            let mut c = BigInt::one();
            for (slot, &i) in t.iter().enumerate() {
                c *= &logs[slot][i];
                if c.is_zero() {
                    break;
                }
            }
            out[idx] = c;
        }
        Ok(out)
    }

    fn coords_of_vector(&self, x: &[BigInt]) -> ClassCoords {
        let y = snf::vec_mul(x, &self.snf.v, self.basis.len());
        let orders = self.snf.cokernel_orders();
        let moduli: Vec<BigInt> = self.keep.iter().map(|&j| orders[j].clone()).collect();
        let values = self
            .keep
            .iter()
            .map(|&j| {
                if orders[j].is_zero() {
                    y[j].clone()
                } else {
                    y[j].mod_floor(&orders[j])
                }
            })
            .collect();
        ClassCoords { moduli, values }
    }

    pub fn class_coords(&self, s: &SymbolSum<TElem>) -> OracleResult<ClassCoords> {
        if s.n() != self.n && !s.is_zero() {
            return Err(OracleError::DegreeMismatch {
                expected: self.n,
                got: s.n(),
            });
        }
        let mut x = vec![BigInt::zero(); self.basis.len()];
        for (entries, c) in s.terms() {
            let v = self.tensor_vector(entries)?;
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += vi * c;
            }
        }
        Ok(self.coords_of_vector(&x))
    }

    /// Kernel of `K^M_n(R) -> K^M_n(R/(t))`.
    pub fn relative_subgroup(&self) -> OracleResult<RelativeSubgroup> {
        let small = TruncRing::new(self.ring.base.clone(), 0);
        let pk = KPresentation::new(&small, self.n)?;
        let a = self.keep.len();
        let b = pk.keep.len();
        let orders_r = self.invariant_factors();
        let orders_k = pk.invariant_factors();
        // hom on Smith coordinates
        let mut hom: Matrix = Vec::with_capacity(a);
        for &j in &self.keep {
            let x = &self.snf.v_inv[j];
            let mut img = vec![BigInt::zero(); pk.basis.len()];
            for (idx, t) in self.basis.iter().enumerate() {
                if x[idx].is_zero() {
                    continue;
                }
                let entries: Vec<TElem> = t
                    .iter()
                    .map(|&i| small.constant(self.ring.eval0(&self.units.generators[i])))
                    .collect();
                let v = pk.tensor_vector(&entries)?;
                for (o, vi) in img.iter_mut().zip(v) {
                    *o += &x[idx] * vi;
                }
            }
            let c = pk.coords_of_vector(&img);
            hom.push(c.values);
        }
        // preimage of zero: y hom in diag(orders_k)
        let mut stacked = hom.clone();
        for (i, d) in orders_k.iter().enumerate() {
            let mut row = vec![BigInt::zero(); b];
            row[i] = d.clone();
            stacked.push(row);
        }
        let lattice: Matrix = if b == 0 {
            snf::identity(a)
        } else {
            snf::left_kernel(&stacked, b)
                .into_iter()
                .map(|row| row[..a].to_vec())
                .collect()
        };
        // basis of the lattice
        let ls = snf::smith(&lattice, a, false);
        let basis: Matrix = (0..a)
            .map(|i| {
                let d = ls.diag.get(i).cloned().unwrap_or_else(BigInt::zero);
                ls.v_inv[i].iter().map(|x| x * &d).collect()
            })
            .collect();
        // express diag(orders_r) in that basis: c = D_R v diag(1/d)
        let mut rel: Matrix = Vec::with_capacity(a);
        for (i, d) in orders_r.iter().enumerate() {
            let row: Vec<BigInt> = (0..a)
                .map(|j| {
                    let x = d * &ls.v[i][j];
                    let dj = &ls.diag[j];
                    debug_assert!(x.is_multiple_of(dj));
                    x / dj
                })
                .collect();
            rel.push(row);
        }
        let sub = snf::smith(&rel, a, false);
        let invariant_factors = sub.invariant_factors();
        let generators = basis
            .iter()
            .map(|row| ClassCoords {
                moduli: orders_r.clone(),
                values: row
                    .iter()
                    .zip(&orders_r)
                    .map(|(x, d)| x.mod_floor(d))
                    .collect(),
            })
            .filter(|c| !c.is_zero())
            .collect();
        Ok(RelativeSubgroup {
            invariant_factors,
            generators,
        })
    }

    /// Whether a class lies in the relative subgroup.
    pub fn is_relative_class(&self, s: &SymbolSum<TElem>) -> OracleResult<bool> {
        let small = TruncRing::new(self.ring.base.clone(), 0);
        let pk = KPresentation::new(&small, self.n)?;
        let at_zero = s.map_entries(|e| small.constant(self.ring.eval0(e)));
        Ok(pk.class_coords(&at_zero)?.is_zero())
    }
}

fn index_of(t: &[usize], r: usize) -> usize {
    t.iter().fold(0, |acc, &i| acc * r + i)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeSubgroup {
    pub invariant_factors: Vec<BigInt>,
    /// Generators in the Smith coordinates of the ambient group.
    pub generators: Vec<ClassCoords>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn units_of_f5() {
        let p = KPresentation::new(&TruncRing::new(Field::prime(5).unwrap(), 0), 1).unwrap();
        assert_eq!(p.invariant_factors(), big(&[4]));
        assert!(p.verify_snf());
    }

    #[test]
    fn k2_of_finite_fields_vanishes() {
        for q in [2u64, 3, 5] {
            let p = KPresentation::new(&TruncRing::new(Field::prime(q).unwrap(), 0), 2).unwrap();
            assert!(p.invariant_factors().is_empty(), "q = {q}");
        }
        let f4 = Field::galois(2, 2).unwrap();
        assert!(KPresentation::new(&TruncRing::new(f4, 0), 2)
            .unwrap()
            .invariant_factors()
            .is_empty());
    }

    #[test]
    fn dual_numbers_over_f2() {
        let p = KPresentation::new(&TruncRing::new(Field::prime(2).unwrap(), 1), 1).unwrap();
        assert_eq!(p.invariant_factors(), big(&[2]));
    }

    #[test]
    fn relative_units_of_f3_dual_numbers() {
        let ring = TruncRing::new(Field::prime(3).unwrap(), 1);
        let p = KPresentation::new(&ring, 1).unwrap();
        assert_eq!(p.relative_subgroup().unwrap().invariant_factors, big(&[3]));
    }

    #[test]
    fn steinberg_symbol_is_zero() {
        let ring = TruncRing::new(Field::prime(3).unwrap(), 1);
        let p = KPresentation::new(&ring, 2).unwrap();
        let k = &ring.base;
        let a = ring.from_poly(&[k.from_int(2), k.one()]);
        let b = ring.sub(&ring.one(), &a);
        assert!(p.class_coords(&SymbolSum::single(vec![a, b])).unwrap().is_zero());
    }

    #[test]
    fn cap_is_enforced() {
        let ring = TruncRing::new(Field::prime(5).unwrap(), 2);
        assert!(matches!(
            KPresentation::with_cap(&ring, 2, 100),
            Err(OracleError::CapExceeded { .. })
        ));
    }
}
