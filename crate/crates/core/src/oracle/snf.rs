//! Smith normal form over the integers with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub rows: usize,
    pub cols: usize,
    /// `u * a * v = diag(d)`, `d_i | d_{i+1}`, `d_i >= 0`.
    pub u: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
    pub diag: Vec<BigInt>,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }

    /// Orders of the cyclic factors of `Z^cols / rowspace(a)`, one per
    /// column; `0` marks a free factor.
    pub fn cokernel_orders(&self) -> Vec<BigInt> {
        (0..self.cols)
            .map(|j| self.diag.get(j).cloned().unwrap_or_else(BigInt::zero))
            .collect()
    }

    /// Nontrivial invariant factors of the cokernel, free parts as `0`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.cokernel_orders().into_iter().filter(|d| !d.is_one()).collect()
    }
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for (k, x) in row.iter().enumerate().take(inner) {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul(x: &[BigInt], m: &Matrix, cols: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); cols];
    for (k, xk) in x.iter().enumerate() {
        if xk.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            if !m[k][j].is_zero() {
                *o += xk * &m[k][j];
            }
        }
    }
    out
}

struct Work {
    a: Matrix,
    u: Option<Matrix>,
    v: Matrix,
    v_inv: Matrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.v {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &BigInt) {
        let src = self.a[j].clone();
        for (x, y) in self.a[i].iter_mut().zip(&src) {
            if !y.is_zero() {
                *x += q * y;
            }
        }
        if let Some(u) = &mut self.u {
            let src = u[j].clone();
            for (x, y) in u[i].iter_mut().zip(&src) {
                if !y.is_zero() {
                    *x += q * y;
                }
            }
        }
    }

    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &BigInt) {
        for row in &mut self.a {
            if !row[j].is_zero() {
                let y = row[j].clone();
                row[i] += q * y;
            }
        }
        for row in &mut self.v {
            if !row[j].is_zero() {
                let y = row[j].clone();
                row[i] += q * y;
            }
        }
        // inverse: row_j -= q * row_i
        let src = self.v_inv[i].clone();
        for (x, y) in self.v_inv[j].iter_mut().zip(&src) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }
}

/// Smith normal form of `a` (`rows x cols`). Pivots are chosen by smallest
/// absolute value, ties broken row-major. The row transform is only
/// accumulated when `with_u` is set.
pub fn smith(a: &Matrix, cols: usize, with_u: bool) -> SnfResult {
    let rows = a.len();
    let mut w = Work {
        a: a.clone(),
        u: with_u.then(|| identity(rows)),
        v: identity(cols),
        v_inv: identity(cols),
    };
    let steps = rows.min(cols);
    for t in 0..steps {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = &w.a[i][j];
                    if x.is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if w.a[bi][bj].abs() <= x.abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            if pi != t {
                w.swap_rows(pi, t);
            }
            if pj != t {
                w.swap_cols(pj, t);
            }
            let p = w.a[t][t].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&p);
                w.add_row(i, t, &-q);
                if !w.a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&p);
                w.add_col(j, t, &-q);
                if !w.a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            let mut bad = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.a[i][j].is_multiple_of(&p) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => w.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
    }
    let diag = (0..steps).map(|i| w.a[i][i].clone()).collect();
    SnfResult {
        rows,
        cols,
        u: w.u.unwrap_or_default(),
        v: w.v,
        v_inv: w.v_inv,
        diag,
    }
}

/// Re-multiply the transforms: `v * v_inv = 1`, and `u a v = diag` when
/// `u` was accumulated.
pub fn verify(a: &Matrix, snf: &SnfResult) -> bool {
    let n = snf.cols;
    if mat_mul(&snf.v, &snf.v_inv, n, n) != identity(n) {
        return false;
    }
    for w in snf.diag.windows(2) {
        if !w[0].is_zero() && !w[1].is_multiple_of(&w[0]) {
            return false;
        }
        if w[0].is_zero() && !w[1].is_zero() {
            return false;
        }
    }
    if snf.u.is_empty() {
        // without u: a v must have the same row lattice as diag, checked
        // through divisibility of every column of a v
        let av = mat_mul(a, &snf.v, n, n);
        return av.iter().all(|row| {
            row.iter().enumerate().all(|(j, x)| match snf.diag.get(j) {
                Some(d) if !d.is_zero() => x.is_multiple_of(d),
                _ => x.is_zero(),
            })
        });
    }
    let uav = mat_mul(&mat_mul(&snf.u, a, snf.rows, n), &snf.v, n, n);
    uav.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, x)| {
            if i == j && i < snf.diag.len() {
                *x == snf.diag[i]
            } else {
                x.is_zero()
            }
        })
    }) && determinant_is_unit(&snf.u)
}

fn determinant_is_unit(m: &Matrix) -> bool {
    // fraction-free elimination (Bareiss)
    let n = m.len();
    if n == 0 {
        return true;
    }
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return false,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = val / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    (sign * &a[n - 1][n - 1]).abs().is_one()
}

/// Generators of the left kernel `{x : x a = 0}` of an integer matrix.
pub fn left_kernel(a: &Matrix, cols: usize) -> Matrix {
    let snf = smith(a, cols, true);
    let r = snf.rank();
    snf.u[r..].to_vec()
}

pub fn to_big(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_example() {
        let a = to_big(&[vec![2, 4], vec![6, 8]]);
        let s = smith(&a, 2, true);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(4)]);
        assert!(verify(&a, &s));
    }

    #[test]
    fn diagonal_is_normalised() {
        let a = to_big(&[vec![6, 0], vec![0, 4]]);
        let s = smith(&a, 2, true);
        assert_eq!(s.diag, vec![BigInt::from(2), BigInt::from(12)]);
        assert!(verify(&a, &s));
    }

    #[test]
    fn empty_matrix_is_free() {
        let s = smith(&Vec::new(), 3, true);
        assert_eq!(s.cokernel_orders(), vec![BigInt::zero(); 3]);
        assert!(verify(&Vec::new(), &s));
    }

    #[test]
    fn kernel_rows_annihilate() {
        let a = to_big(&[vec![1, 2], vec![2, 4], vec![3, 1]]);
        let k = left_kernel(&a, 2);
        assert_eq!(k.len(), 1);
        let prod = vec_mul(&k[0], &a, 2);
        assert!(prod.iter().all(Zero::is_zero));
    }
}
