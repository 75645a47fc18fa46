//! Exact integer linear algebra: column Hermite form, integer solving, kernels and
//! Smith normal form over arbitrary-precision integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * &other[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    // (col a, col b) <- (s a + t b, u a + v b)
    fn mix_cols(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = s * &x + t * &y;
            self[(i, b)] = u * &x + v * &y;
        }
    }

    fn mix_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = s * &x + t * &y;
            self[(b, j)] = u * &x + v * &y;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = -&self[(i, j)];
            self[(i, j)] = x;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = -&self[(i, j)];
            self[(i, j)] = x;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// `A V = H` with `V` unimodular and `H` in column echelon form: column `k < rank`
/// has its first nonzero entry, positive, at row `pivots[k]`, pivots strictly
/// increase, and columns from `rank` on are zero.
#[derive(Debug, Clone)]
pub struct ColumnHermite {
    pub h: IntMatrix,
    pub v: IntMatrix,
    pub pivots: Vec<usize>,
}

impl ColumnHermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn column_hermite(a: &IntMatrix) -> ColumnHermite {
    let mut h = a.clone();
    let mut v = IntMatrix::identity(a.cols);
    let mut pivots = Vec::new();
    let mut c = 0;
    for i in 0..a.rows {
        if c == a.cols {
            break;
        }
        for j in c + 1..a.cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            if h[(i, c)].is_zero() {
                h.swap_cols(c, j);
                v.swap_cols(c, j);
                continue;
            }
            let x = h[(i, c)].clone();
            let y = h[(i, j)].clone();
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let u = -(&y / &g);
            let w = &x / &g;
            h.mix_cols(c, j, &s, &t, &u, &w);
            v.mix_cols(c, j, &s, &t, &u, &w);
        }
        if h[(i, c)].is_zero() {
            continue;
        }
        if h[(i, c)].is_negative() {
            h.negate_col(c);
            v.negate_col(c);
        }
        // reduce the earlier pivot columns against this pivot
        for k in 0..c {
            let q = h[(i, k)].div_floor(&h[(i, c)]);
            if !q.is_zero() {
                let one = BigInt::one();
                let zero = BigInt::zero();
                h.mix_cols(k, c, &one, &-&q, &zero, &one);
                v.mix_cols(k, c, &one, &-&q, &zero, &one);
            }
        }
        pivots.push(i);
        c += 1;
    }
    ColumnHermite { h, v, pivots }
}

/// An integer solution of `A x = b`, if one exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), a.rows);
    let hnf = column_hermite(a);
    let mut y = vec![BigInt::zero(); a.cols];
    for (k, &row) in hnf.pivots.iter().enumerate() {
        let mut rhs = b[row].clone();
        for (j, yj) in y.iter().enumerate().take(k) {
            rhs -= &hnf.h[(row, j)] * yj;
        }
        let (q, r) = rhs.div_rem(&hnf.h[(row, k)]);
        if !r.is_zero() {
            return None;
        }
        y[k] = q;
    }
    if hnf.h.mul_vec(&y) != b {
        return None;
    }
    Some(hnf.v.mul_vec(&y))
}

/// Columns form a basis of the integer kernel `{x : A x = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let hnf = column_hermite(a);
    let rank = hnf.rank();
    let mut k = IntMatrix::zeros(a.cols, a.cols - rank);
    for j in rank..a.cols {
        for i in 0..a.cols {
            k[(i, j - rank)] = hnf.v[(i, j)].clone();
        }
    }
    k
}

/// `U A V = D` with `U`, `V` unimodular and `D` diagonal with nonnegative entries
/// `d_0 | d_1 | ...`; `diagonal` has length `min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub diagonal: Vec<BigInt>,
}

pub fn smith(a: &IntMatrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let one = BigInt::one();
    let zero = BigInt::zero();
    for t in 0..m.min(n) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if !d[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(u, v, d);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..m {
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                if !q.is_zero() {
                    d.mix_rows(i, t, &one, &-&q, &zero, &one);
                    u.mix_rows(i, t, &one, &-&q, &zero, &one);
                }
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                if !q.is_zero() {
                    d.mix_cols(j, t, &one, &-&q, &zero, &one);
                    v.mix_cols(j, t, &one, &-&q, &zero, &one);
                }
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and go again
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)])));
            match bad {
                Some(i) => {
                    d.mix_rows(t, i, &one, &one, &zero, &one);
                    u.mix_rows(t, i, &one, &one, &zero, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish(u, v, d)
}

fn finish(u: IntMatrix, v: IntMatrix, d: IntMatrix) -> Smith {
    let diagonal = (0..d.rows.min(d.cols)).map(|i| d[(i, i)].clone()).collect();
    Smith { u, v, diagonal }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn det2(m: &IntMatrix) -> BigInt {
        &m[(0, 0)] * &m[(1, 1)] - &m[(0, 1)] * &m[(1, 0)]
    }

    #[test]
    fn hermite_is_consistent() {
        let a = IntMatrix::from_rows(&[vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let hnf = column_hermite(&a);
        assert_eq!(a.mul(&hnf.v), hnf.h);
        assert_eq!(hnf.rank(), 3);
    }

    #[test]
    fn solve_finds_integer_solutions() {
        let a = IntMatrix::from_rows(&[vec![2i64, 0], vec![0, 3]]);
        assert_eq!(solve(&a, &bi(&[4, 9])), Some(bi(&[2, 3])));
        assert_eq!(solve(&a, &bi(&[1, 9])), None);
        let a = IntMatrix::from_rows(&[vec![1i64, 1], vec![1, 1]]);
        assert_eq!(solve(&a, &bi(&[1, 2])), None);
        let x = solve(&a, &bi(&[5, 5])).unwrap();
        assert_eq!(a.mul_vec(&x), bi(&[5, 5]));
    }

    #[test]
    fn kernel_of_rank_one() {
        let a = IntMatrix::from_rows(&[vec![2i64, 4, 6]]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).data.iter().all(Zero::is_zero));
    }

    #[test]
    fn smith_of_small_matrix() {
        let a = IntMatrix::from_rows(&[vec![2i64, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.diagonal, bi(&[2, 6, 12]));
        let d = s.u.mul(&a).mul(&s.v);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(d[(i, j)], expected);
            }
        }
        let z2 = smith(&IntMatrix::from_rows(&[vec![-2i64]]));
        assert_eq!(z2.diagonal, bi(&[2]));
        let id = smith(&IntMatrix::from_rows(&[vec![0i64, 1], vec![1, 0]]));
        assert_eq!(id.diagonal, bi(&[1, 1]));
        assert!(det2(&id.u).abs().is_one() && det2(&id.v).abs().is_one());
    }
}
