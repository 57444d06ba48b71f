//! Small dense matrices over commutative rings.
//!
//! Determinants and adjugates are computed without division so they work
//! over `Z/p^k`, `F_p[t]/(t^k)` and polynomial rings alike. Exact scalar
//! matrices of size 4 and up use Bareiss elimination instead.

use std::collections::HashMap;
use std::fmt;

use crate::scalar::Scalar;
use crate::valued::ValuedElement;

/// The ring operations the matrix routines need. `zero_like`/`one_like`
/// build constants in the same ring as `self`.
pub trait RingOps: Clone + PartialEq {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
}

impl RingOps for Scalar {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Scalar::zero_like(self)
    }
    fn one_like(&self) -> Self {
        Scalar::one_like(self)
    }
}

impl RingOps for ValuedElement {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        ValuedElement::neg(self)
    }
    /// Zero at its precision.
    fn is_zero(&self) -> bool {
        self.is_indeterminate_zero()
    }
    fn zero_like(&self) -> Self {
        self.context().zero_element()
    }
    fn one_like(&self) -> Self {
        self.context().int(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: RingOps> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn identity(n: usize, one: &T) -> Self {
        let zero = one.zero_like();
        Self::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// The submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn mul_matrix(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(other.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let mut acc = row[0].mul(&v[0]);
                for k in 1..self.cols {
                    acc = acc.add(&row[k].mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        self.map(|x| x.mul(c))
    }

    /// Division-free determinant: Laplace expansion along rows, memoized
    /// over the remaining column subsets (O(n 2^n) ring operations).
    pub fn det_cofactor(&self) -> T {
        assert!(self.is_square() && self.rows > 0, "determinant of a non-square or empty matrix");
        let n = self.rows;
        let mut memo: HashMap<u64, T> = HashMap::new();
        self.minor_rec(0, (1u64 << n) - 1, &mut memo)
    }

    fn minor_rec(&self, row: usize, cols: u64, memo: &mut HashMap<u64, T>) -> T {
        if row == self.rows - 1 {
            let j = cols.trailing_zeros() as usize;
            return self.get(row, j).clone();
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc: Option<T> = None;
        let mut sign_positive = true;
        for j in 0..self.cols {
            if cols & (1 << j) == 0 {
                continue;
            }
            let entry = self.get(row, j);
            if !entry.is_zero() {
                let term = entry.mul(&self.minor_rec(row + 1, cols & !(1 << j), memo));
                acc = Some(match acc {
                    None if sign_positive => term,
                    None => term.neg(),
                    Some(a) if sign_positive => a.add(&term),
                    Some(a) => a.sub(&term),
                });
            }
            sign_positive = !sign_positive;
        }
        let result = acc.unwrap_or_else(|| self.get(row, 0).zero_like());
        memo.insert(cols, result.clone());
        result
    }

    fn without(&self, skip_row: usize, skip_col: usize) -> Matrix<T> {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| i != skip_row).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&j| j != skip_col).collect();
        self.select(&rows, &cols)
    }

    /// Transposed cofactor matrix, `adj(M) · M = det(M) · I`. The determinant
    /// routine for the minors is passed in.
    pub fn adjugate_with(&self, det: impl Fn(&Matrix<T>) -> T) -> Matrix<T> {
        assert!(self.is_square() && self.rows > 0, "adjugate of a non-square or empty matrix");
        let n = self.rows;
        let one = self.get(0, 0).one_like();
        if n == 1 {
            return Matrix::from_rows(vec![vec![one]]);
        }
        Self::from_fn(n, n, |i, j| {
            let minor = det(&self.without(j, i));
            if (i + j) % 2 == 0 {
                minor
            } else {
                minor.neg()
            }
        })
    }

    pub fn adjugate(&self) -> Matrix<T> {
        self.adjugate_with(Matrix::det_cofactor)
    }
}

impl Matrix<Scalar> {
    /// Exact determinant: cofactor expansion below size 4, fraction-free
    /// Bareiss elimination from size 4 on.
    pub fn det(&self) -> Scalar {
        if self.rows < 4 {
            self.det_cofactor()
        } else {
            self.det_bareiss()
        }
    }

    pub fn det_bareiss(&self) -> Scalar {
        assert!(self.is_square() && self.rows > 0, "determinant of a non-square or empty matrix");
        let n = self.rows;
        let mut a: Vec<Vec<Scalar>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let one = a[0][0].one_like();
        let mut prev = one.clone();
        let mut negate = false;
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        negate = !negate;
                    }
                    None => return one.zero_like(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if negate {
            -&d
        } else {
            d
        }
    }

    /// Exact adjugate, minors by [`Matrix::det`].
    pub fn adjugate_exact(&self) -> Matrix<Scalar> {
        self.adjugate_with(Matrix::det)
    }

    /// Rank over the fraction field, by fraction-free row reduction in the
    /// (integral) coefficient domain.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<Scalar>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&i| !a[i][col].is_zero()) else {
                continue;
            };
            a.swap(rank, pivot);
            for i in rank + 1..self.rows {
                if a[i][col].is_zero() {
                    continue;
                }
                let factor = a[i][col].clone();
                let lead = a[rank][col].clone();
                for j in col..self.cols {
                    a[i][j] = &(&a[i][j] * &lead) - &(&a[rank][j] * &factor);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valued::RingContext;
    use proptest::prelude::*;

    fn int_matrix(rows: &[&[i64]]) -> Matrix<Scalar> {
        let ctx = RingContext::padic(5, 4).unwrap();
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| ctx.scalar(x)).collect()).collect())
    }

    #[test]
    fn adjugate_two_by_two() {
        let m = int_matrix(&[&[1, 1], &[1, -1]]);
        let n = m.adjugate_exact();
        assert_eq!(n, int_matrix(&[&[-1, -1], &[-1, 1]]));
        assert_eq!(n.mul_matrix(&m), int_matrix(&[&[-2, 0], &[0, -2]]));
        let m = int_matrix(&[&[3, 7], &[2, 9]]);
        assert_eq!(m.adjugate_exact(), int_matrix(&[&[9, -7], &[-2, 3]]));
    }

    #[test]
    fn identity_adjugate() {
        let id = int_matrix(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(id.adjugate_exact(), id);
    }

    #[test]
    fn bareiss_with_zero_pivot() {
        let m = int_matrix(&[&[0, 2, 1, 0], &[1, 0, 0, 3], &[2, 1, 0, 1], &[0, 0, 4, 1]]);
        assert_eq!(m.det_bareiss(), m.det_cofactor());
        let singular = int_matrix(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1], &[1, 0, 1, 0]]);
        assert!(singular.det().is_zero());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(int_matrix(&[&[0, 0]]).rank(), 0);
        assert_eq!(int_matrix(&[&[2, 0]]).rank(), 1);
        assert_eq!(int_matrix(&[&[1, 2], &[2, 4], &[0, 0]]).rank(), 1);
        assert_eq!(int_matrix(&[&[1, 0, 0], &[0, 1, 0]]).rank(), 2);
    }

    fn brute_det(m: &[Vec<i64>]) -> i64 {
        // permutation expansion, independent of both determinant routines
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        perms(n)
            .into_iter()
            .map(|p| {
                let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let prod: i64 = (0..n).map(|i| m[i][p[i]]).product();
                if inversions % 2 == 0 {
                    prod
                } else {
                    -prod
                }
            })
            .sum()
    }

    proptest! {
        #[test]
        fn adjugate_identity(n in 1usize..=4, entries in proptest::collection::vec(-6i64..=6, 16)) {
            let rows: Vec<Vec<i64>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let m = int_matrix(&refs);
            let d = m.det();
            let ctx = RingContext::padic(5, 4).unwrap();
            prop_assert_eq!(d.clone(), ctx.scalar(brute_det(&rows)));
            prop_assert_eq!(m.det_bareiss(), d.clone());
            let adj = m.adjugate_exact();
            let expected = Matrix::identity(n, &ctx.one()).scale(&d);
            prop_assert_eq!(adj.mul_matrix(&m), expected.clone());
            prop_assert_eq!(m.mul_matrix(&adj), expected);
        }

        #[test]
        fn rank_bounded_and_detects_singularity(entries in proptest::collection::vec(-3i64..=3, 9)) {
            let rows: Vec<Vec<i64>> = (0..3).map(|i| entries[i * 3..(i + 1) * 3].to_vec()).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            let m = int_matrix(&refs);
            let r = m.rank();
            prop_assert!(r <= 3);
            prop_assert_eq!(r == 3, brute_det(&rows) != 0);
        }
    }
}
