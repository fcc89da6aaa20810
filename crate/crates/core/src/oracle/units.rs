//! Cyclic decomposition of the unit group of a finite truncated ring.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::snf::{self, Matrix};
use super::{OracleError, OracleResult};
use crate::algebra::{CommRing, TElem, TruncRing};

#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub ring: TruncRing,
    pub elements: Vec<TElem>,
    index: HashMap<TElem, usize>,
    /// Orders `e_1 | e_2 | ...` of the cyclic factors, all `> 1`.
    pub orders: Vec<BigInt>,
    /// Generator of each cyclic factor.
    pub generators: Vec<TElem>,
    logs: Vec<Vec<BigInt>>,
}

impl UnitGroup {
    pub fn new(ring: &TruncRing) -> OracleResult<Self> {
        if !ring.base.is_finite() {
            return Err(OracleError::InfiniteRing(ring.to_string()));
        }
        let elements = ring.units();
        let index: HashMap<TElem, usize> = elements.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let one = ring.one();

        // greedy generating set
        let mut gens: Vec<usize> = Vec::new();
        let mut inside = vec![false; elements.len()];
        inside[index[&one]] = true;
        for i in 0..elements.len() {
            if inside[i] {
                continue;
            }
            gens.push(i);
            let mut queue: VecDeque<usize> = (0..elements.len()).filter(|&j| inside[j]).collect();
            while let Some(x) = queue.pop_front() {
                for &g in &gens {
                    let y = index[&ring.mul(&elements[x], &elements[g])];
                    if !inside[y] {
                        inside[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }

        // breadth-first exponent vectors and the cycle relations
        let s = gens.len();
        let mut vecs: Vec<Option<Vec<i64>>> = vec![None; elements.len()];
        let mut relations: Vec<Vec<i64>> = Vec::new();
        vecs[index[&one]] = Some(vec![0; s]);
        let mut queue = VecDeque::from([index[&one]]);
        while let Some(x) = queue.pop_front() {
            let vx = vecs[x].clone().expect("visited");
            for (k, &g) in gens.iter().enumerate() {
                let y = index[&ring.mul(&elements[x], &elements[g])];
                let mut cand = vx.clone();
                cand[k] += 1;
                match &vecs[y] {
                    None => {
                        vecs[y] = Some(cand);
                        queue.push_back(y);
                    }
                    Some(vy) => {
                        let rel: Vec<i64> = cand.iter().zip(vy).map(|(a, b)| a - b).collect();
                        if rel.iter().any(|&c| c != 0) {
                            relations.push(rel);
                        }
                    }
                }
            }
        }
        let rel_big: Matrix = snf::to_big(&relations);
        let result = snf::smith(&rel_big, s, false);
        debug_assert!(snf::verify(&rel_big, &result));
        let orders_all = result.cokernel_orders();
        let keep: Vec<usize> = (0..s).filter(|&j| !orders_all[j].is_one()).collect();
        let orders: Vec<BigInt> = keep.iter().map(|&j| orders_all[j].clone()).collect();
        let logs: Vec<Vec<BigInt>> = vecs
            .iter()
            .map(|v| {
                let row: Vec<BigInt> = v.as_ref().expect("group is generated").iter().map(|&c| BigInt::from(c)).collect();
                let y = snf::vec_mul(&row, &result.v, s);
                keep.iter().map(|&j| y[j].mod_floor(&orders_all[j])).collect()
            })
            .collect();
        let generators = (0..keep.len())
            .map(|j| {
                let pos = logs
                    .iter()
                    .position(|l| l.iter().enumerate().all(|(i, c)| if i == j { c.is_one() } else { c.is_zero() }))
                    .expect("basis element present");
                elements[pos].clone()
            })
            .collect();
        Ok(UnitGroup {
            ring: ring.clone(),
            elements,
            index,
            orders,
            generators,
            logs,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Coordinates of a unit in the cyclic decomposition.
    pub fn log(&self, u: &TElem) -> Option<&[BigInt]> {
        self.index.get(u).map(|&i| self.logs[i].as_slice())
    }

    /// Unit with the given coordinates.
    pub fn exp(&self, coords: &[BigInt]) -> TElem {
        let mut acc = self.ring.one();
        for (g, c) in self.generators.iter().zip(coords) {
            let e = c.to_u64().expect("reduced coordinate");
            acc = self.ring.mul(&acc, &self.ring.pow(g, e));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    #[test]
    fn unit_groups_of_small_rings() {
        let f5 = Field::prime(5).unwrap();
        let g = UnitGroup::new(&TruncRing::new(f5, 0)).unwrap();
        assert_eq!(g.orders, vec![BigInt::from(4)]);
        let f2 = Field::prime(2).unwrap();
        let g = UnitGroup::new(&TruncRing::new(f2.clone(), 1)).unwrap();
        assert_eq!(g.orders, vec![BigInt::from(2)]);
        let g = UnitGroup::new(&TruncRing::new(f2, 2)).unwrap();
        assert_eq!(g.orders, vec![BigInt::from(4)]);
    }

    #[test]
    fn log_and_exp_agree() {
        let f3 = Field::prime(3).unwrap();
        let g = UnitGroup::new(&TruncRing::new(f3, 2)).unwrap();
        for u in &g.elements {
            assert_eq!(&g.exp(g.log(u).unwrap()), u);
        }
    }
}
