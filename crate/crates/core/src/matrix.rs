//! Sparse square matrices of exact rationals.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::combinatorics::BigRat;

/// Row-major sparse square matrix over [`BigRat`]. Only nonzero entries are
/// stored, so structural equality is mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    dim: usize,
    rows: Vec<BTreeMap<usize, BigRat>>,
}

impl RatMatrix {
    /// The `dim x dim` zero matrix.
    pub fn zeros(dim: usize) -> Self {
        RatMatrix { dim, rows: vec![BTreeMap::new(); dim] }
    }

    /// The identity.
    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![BigRat::from_integer(1.into()); dim])
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diagonal(diag: &[BigRat]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    /// Number of rows (and columns).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stores `value` at `(i, j)`; storing zero clears the entry.
    pub fn set(&mut self, i: usize, j: usize, value: BigRat) {
        assert!(i < self.dim && j < self.dim, "({i}, {j}) out of bounds for dim {}", self.dim);
        if value.is_zero() {
            self.rows[i].remove(&j);
        } else {
            self.rows[i].insert(j, value);
        }
    }

    /// Adds `value` to `(i, j)`.
    pub fn add_to(&mut self, i: usize, j: usize, value: &BigRat) {
        let slot = self.rows[i].entry(j).or_insert_with(BigRat::zero);
        *slot += value;
        if slot.is_zero() {
            self.rows[i].remove(&j);
        }
    }

    /// Entry reference, `None` for structural zeros.
    pub fn get(&self, i: usize, j: usize) -> Option<&BigRat> {
        self.rows[i].get(&j)
    }

    /// Entry by value (zero when absent).
    pub fn entry(&self, i: usize, j: usize) -> BigRat {
        self.get(i, j).cloned().unwrap_or_else(BigRat::zero)
    }

    /// Nonzero entries of row `i`, by increasing column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, &BigRat)> {
        self.rows[i].iter().map(|(j, v)| (*j, v))
    }

    /// All nonzero entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigRat)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v)))
    }

    /// Number of stored nonzeros.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<BigRat> {
        (0..self.dim).map(|i| self.entry(i, i)).collect()
    }

    /// Exact row sums.
    pub fn row_sums(&self) -> Vec<BigRat> {
        self.rows.iter().map(|r| r.values().fold(BigRat::zero(), |a, v| a + v)).collect()
    }

    /// Product `self * rhs`.
    pub fn mul(&self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, LazySum> = BTreeMap::new();
                for (k, a) in row {
                    for (j, b) in &rhs.rows[*k] {
                        acc.entry(*j)
                            .or_insert_with(LazySum::new)
                            .add(a.numer() * b.numer(), a.denom() * b.denom());
                    }
                }
                acc.into_iter()
                    .map(|(j, s)| (j, s.finish()))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        RatMatrix { dim: self.dim, rows }
    }

    /// `self * diag(d)`: scales column `j` by `d[j]`.
    pub fn scale_columns(&self, d: &[BigRat]) -> RatMatrix {
        assert_eq!(self.dim, d.len());
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(j, v)| (*j, v * &d[*j]))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        RatMatrix { dim: self.dim, rows }
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[BigRat]) -> Vec<BigRat> {
        self.rows
            .iter()
            .map(|row| row.iter().fold(BigRat::zero(), |acc, (j, a)| acc + a * &v[*j]))
            .collect()
    }

    /// Row-vector product `v^T * self`.
    pub fn vec_mul(&self, v: &[BigRat]) -> Vec<BigRat> {
        let mut out = vec![BigRat::zero(); self.dim];
        for (i, row) in self.rows.iter().enumerate() {
            if v[i].is_zero() {
                continue;
            }
            for (j, a) in row {
                out[*j] += &v[i] * a;
            }
        }
        out
    }

    /// Column `j` as a dense vector.
    pub fn column(&self, j: usize) -> Vec<BigRat> {
        (0..self.dim).map(|i| self.entry(i, j)).collect()
    }

    /// Row `i` as a dense vector.
    pub fn dense_row(&self, i: usize) -> Vec<BigRat> {
        let mut out = vec![BigRat::zero(); self.dim];
        for (j, v) in &self.rows[i] {
            out[*j] = v.clone();
        }
        out
    }

    /// True if no nonzero lies strictly below the diagonal.
    pub fn is_upper_triangular(&self) -> bool {
        self.iter().all(|(i, j, _)| i <= j)
    }

    /// True if no nonzero lies strictly above the diagonal.
    pub fn is_lower_triangular(&self) -> bool {
        self.iter().all(|(i, j, _)| i >= j)
    }

    /// Dense floating-point copy.
    pub fn to_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.iter() {
            m[(i, j)] = v.to_f64().unwrap_or(f64::NAN);
        }
        m
    }
}

/// Sum of fractions kept unreduced until the end: one gcd per entry instead
/// of one per term. Denominators that divide one another are merged without
/// growing.
struct LazySum {
    num: BigInt,
    den: BigInt,
}

impl LazySum {
    fn new() -> Self {
        LazySum { num: BigInt::zero(), den: BigInt::one() }
    }

    fn add(&mut self, p: BigInt, q: BigInt) {
        if q == self.den {
            self.num += p;
        } else if (&self.den % &q).is_zero() {
            self.num += p * (&self.den / &q);
        } else if (&q % &self.den).is_zero() {
            self.num = &self.num * (&q / &self.den) + p;
            self.den = q;
        } else {
            self.num = &self.num * &q + p * &self.den;
            self.den *= q;
        }
    }

    fn finish(self) -> BigRat {
        BigRat::new(self.num, self.den)
    }
}
