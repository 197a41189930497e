//! Exact combinatorial numbers: factorials, binomials, Stirling numbers of
//! both kinds, Lah and Bell numbers, and ascending factorial powers.
//!
//! Free functions compute their value from scratch with the usual triangular
//! recurrences. Code that needs many lookups builds a [`NumberTable`] once
//! and shares it read-only.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type BigRat = BigRational;

/// Builds the rational `p / q`.
///
/// Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> BigRat {
    BigRat::new(BigInt::from(p), BigInt::from(q))
}

/// Embeds a natural number into the rationals.
pub fn rat_from_uint(u: &BigUint) -> BigRat {
    BigRat::from_integer(BigInt::from(u.clone()))
}

/// Embeds a machine integer into the rationals.
pub fn rat_int(v: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(v))
}

/// `(-1)^k` as a rational.
pub fn sign(k: usize) -> BigRat {
    if k % 2 == 0 {
        BigRat::one()
    } else {
        -BigRat::one()
    }
}

/// `n!`
pub fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

fn triangle(max: usize, step: impl Fn(usize, usize, &[BigUint]) -> BigUint) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(max + 1);
    rows.push(vec![BigUint::one()]);
    for i in 1..=max {
        let prev = &rows[i - 1];
        let mut row = vec![BigUint::zero(); i + 1];
        for (j, slot) in row.iter_mut().enumerate().skip(1) {
            *slot = step(i, j, prev);
        }
        rows.push(row);
    }
    rows
}

fn first_kind_table(max: usize) -> Vec<Vec<BigUint>> {
    // [i, j] = [i-1, j-1] + (i-1) [i-1, j]
    triangle(max, |i, j, prev| {
        let carry = prev.get(j).cloned().unwrap_or_default() * (i - 1) as u64;
        &prev[j - 1] + carry
    })
}

fn second_kind_table(max: usize) -> Vec<Vec<BigUint>> {
    // {i, j} = {i-1, j-1} + j {i-1, j}
    triangle(max, |_, j, prev| {
        let carry = prev.get(j).cloned().unwrap_or_default() * j as u64;
        &prev[j - 1] + carry
    })
}

/// Unsigned Stirling number of the first kind `[i over j]`: permutations of
/// `[i]` with `j` cycles.
pub fn stirling_first(i: usize, j: usize) -> BigUint {
    if j > i {
        return BigUint::zero();
    }
    first_kind_table(i).swap_remove(i).swap_remove(j)
}

/// Stirling number of the second kind `{i over j}`: partitions of an
/// `i`-set into `j` blocks.
pub fn stirling_second(i: usize, j: usize) -> BigUint {
    if j > i {
        return BigUint::zero();
    }
    second_kind_table(i).swap_remove(i).swap_remove(j)
}

/// Unsigned Lah number `L(i, j) = C(i-1, j-1) i! / j!`, with `L(0, 0) = 1`.
pub fn lah(i: usize, j: usize) -> BigUint {
    if j > i || (j == 0) != (i == 0) {
        return BigUint::zero();
    }
    if i == 0 {
        return BigUint::one();
    }
    binomial(i - 1, j - 1) * factorial(i) / factorial(j)
}

/// Bell number `B_n = |P([n])|`, via the Bell triangle.
pub fn bell(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().cloned().unwrap_or_default());
        for v in &row {
            let x = next.last().unwrap() + v;
            next.push(x);
        }
        row = next;
    }
    row.swap_remove(0)
}

/// Ascending factorial power `x (x+1) ... (x+k-1)`; equals one for `k = 0`.
pub fn ascending_factorial(x: &BigRat, k: usize) -> BigRat {
    let mut acc = BigRat::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term += BigRat::one();
    }
    acc
}

/// Precomputed factorials, Stirling numbers and Lah numbers up to a bound.
#[derive(Debug, Clone)]
pub struct NumberTable {
    max: usize,
    factorials: Vec<BigUint>,
    first: Vec<Vec<BigUint>>,
    second: Vec<Vec<BigUint>>,
}

impl NumberTable {
    /// Tables valid for all arguments up to `max` (factorials up to `2 max`,
    /// which the Kingman eigenvector formulas need).
    pub fn new(max: usize) -> Self {
        let mut factorials = Vec::with_capacity(2 * max + 1);
        factorials.push(BigUint::one());
        for k in 1..=2 * max {
            let next = &factorials[k - 1] * k as u64;
            factorials.push(next);
        }
        NumberTable {
            max,
            factorials,
            first: first_kind_table(max),
            second: second_kind_table(max),
        }
    }

    /// Largest Stirling argument covered.
    pub fn max(&self) -> usize {
        self.max
    }

    /// `n!` for `n <= 2 max`.
    pub fn factorial(&self, n: usize) -> &BigUint {
        &self.factorials[n]
    }

    /// `n!` as a rational.
    pub fn factorial_rat(&self, n: usize) -> BigRat {
        rat_from_uint(&self.factorials[n])
    }

    /// `a! / b!` as a rational.
    pub fn factorial_ratio(&self, a: usize, b: usize) -> BigRat {
        BigRat::new(
            BigInt::from(self.factorials[a].clone()),
            BigInt::from(self.factorials[b].clone()),
        )
    }

    /// Table lookup of `[i over j]`.
    pub fn stirling_first(&self, i: usize, j: usize) -> BigUint {
        self.first[i].get(j).cloned().unwrap_or_default()
    }

    /// Table lookup of `{i over j}`.
    pub fn stirling_second(&self, i: usize, j: usize) -> BigUint {
        self.second[i].get(j).cloned().unwrap_or_default()
    }

    /// `L(i, j)` from cached factorials.
    pub fn lah(&self, i: usize, j: usize) -> BigUint {
        if j > i || (j == 0) != (i == 0) {
            return BigUint::zero();
        }
        if i == 0 {
            return BigUint::one();
        }
        let f = &self.factorials;
        // C(i-1, j-1) i!/j! = (i-1)! i! / ((j-1)! (i-j)! j!)
        (&f[i - 1] * &f[i]) / (&f[j - 1] * &f[i - j] * &f[j])
    }
}
