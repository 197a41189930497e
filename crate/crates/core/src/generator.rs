//! Q-matrices of Λ-coalescents restricted to `[n]`, their block-counting
//! generators, and the factored characteristic polynomial.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigUint;
use num_traits::{Signed, Zero};

use crate::combinatorics::{binomial, rat, rat_from_uint, stirling_second, BigRat, NumberTable};
use crate::error::{domain, Error, Result};
use crate::matrix::RatMatrix;
use crate::partition::{PartitionLattice, SetPartition};

/// The two coalescents with closed-form spectral decompositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// Λ uniform on `[0, 1]`.
    BolthausenSznitman,
    /// Λ = δ₀: pairwise mergers only.
    Kingman,
}

impl Model {
    /// Rate table for blocks counts up to `n`.
    pub fn rates(self, n: usize) -> Result<RateTable> {
        match self {
            Model::BolthausenSznitman => bs_rates(n),
            Model::Kingman => kingman_rates(n),
        }
    }

    /// Total jump rate out of a state with `b` blocks.
    pub fn total_rate(self, b: usize) -> BigRat {
        let b = b as i64;
        match self {
            Model::BolthausenSznitman => rat((b - 1).max(0), 1),
            Model::Kingman => rat(b * (b - 1) / 2, 1),
        }
    }

    /// The Q-matrix on a lattice.
    pub fn generator(self, lattice: &Arc<PartitionLattice>) -> Result<TriMatrix> {
        // n = 1 has no rates at all; the generator is the 1x1 zero matrix.
        let rates = self.rates(lattice.n().max(2))?;
        build_generator(lattice, &rates)
    }

    /// Generator of the block-counting process on `{1..n}`.
    pub fn block_generator(self, n: usize) -> RatMatrix {
        match self {
            Model::BolthausenSznitman => bs_block_generator(n),
            Model::Kingman => kingman_block_generator(n),
        }
    }

    /// Short lowercase name (`bs` or `kingman`).
    pub fn name(self) -> &'static str {
        match self {
            Model::BolthausenSznitman => "bs",
            Model::Kingman => "kingman",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bs" | "bolthausen-sznitman" => Ok(Model::BolthausenSznitman),
            "kingman" | "k" => Ok(Model::Kingman),
            _ => Err(Error::Parse(format!("unknown model {s:?}"))),
        }
    }
}

/// Merger rates `lambda_{b,k}`: the rate at which a given `k` of `b` blocks merge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RateTable {
    rates: BTreeMap<(usize, usize), BigRat>,
}

impl RateTable {
    /// Empty table.
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `lambda_{b,k}`. Requires `2 <= k <= b` and a nonnegative rate.
    pub fn insert(&mut self, b: usize, k: usize, rate: BigRat) -> Result<()> {
        if k < 2 || k > b {
            return Err(domain(format!("rate index (b={b}, k={k}) needs 2 <= k <= b")));
        }
        if rate.is_negative() {
            return Err(domain(format!("negative rate for (b={b}, k={k})")));
        }
        self.rates.insert((b, k), rate);
        Ok(())
    }

    /// `lambda_{b,k}`, if present.
    pub fn rate(&self, b: usize, k: usize) -> Option<&BigRat> {
        self.rates.get(&(b, k))
    }

    /// `lambda_{b,k}`, or [`Error::MissingRate`].
    pub fn require(&self, b: usize, k: usize) -> Result<&BigRat> {
        self.rate(b, k).ok_or(Error::MissingRate { b, k })
    }

    /// Total rate `lambda_b = sum_k C(b,k) lambda_{b,k}`; zero for `b < 2`.
    pub fn total_rate(&self, b: usize) -> Result<BigRat> {
        (2..=b).try_fold(BigRat::zero(), |acc, k| {
            Ok(acc + rat_from_uint(&binomial(b, k)) * self.require(b, k)?)
        })
    }

    /// Largest `b` with any entry.
    pub fn max_blocks(&self) -> usize {
        self.rates.keys().map(|(b, _)| *b).max().unwrap_or(0)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(domain(format!("rate tables need n >= 2, got {n}")))
    } else {
        Ok(())
    }
}

/// Bolthausen-Sznitman rates `(k-2)! (b-k)! / (b-1)!`.
pub fn bs_rates(n: usize) -> Result<RateTable> {
    check_n(n)?;
    let t = NumberTable::new(n);
    let mut table = RateTable::new();
    for b in 2..=n {
        for k in 2..=b {
            let r = rat_from_uint(&(t.factorial(k - 2) * t.factorial(b - k))) / t.factorial_rat(b - 1);
            table.insert(b, k, r)?;
        }
    }
    Ok(table)
}

/// Kingman rates: `lambda_{b,2} = 1`, all larger mergers zero.
pub fn kingman_rates(n: usize) -> Result<RateTable> {
    check_n(n)?;
    let mut table = RateTable::new();
    for b in 2..=n {
        for k in 2..=b {
            table.insert(b, k, rat(i64::from(k == 2), 1))?;
        }
    }
    Ok(table)
}

/// A sparse upper-triangular rational matrix indexed by a partition lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriMatrix {
    lattice: Arc<PartitionLattice>,
    matrix: RatMatrix,
}

impl TriMatrix {
    /// Wraps a matrix; fails if its size or support does not fit the lattice.
    pub fn new(lattice: Arc<PartitionLattice>, matrix: RatMatrix) -> Result<Self> {
        if matrix.dim() != lattice.len() {
            return Err(domain("matrix dimension differs from lattice size"));
        }
        if !matrix.is_upper_triangular() {
            return Err(domain("matrix is not upper triangular in lattice order"));
        }
        Ok(TriMatrix { lattice, matrix })
    }

    /// Index lattice.
    pub fn lattice(&self) -> &Arc<PartitionLattice> {
        &self.lattice
    }

    /// Underlying sparse matrix.
    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// Unwraps the sparse matrix.
    pub fn into_matrix(self) -> RatMatrix {
        self.matrix
    }

    /// Entry `(pi, rho)`.
    pub fn get(&self, pi: &SetPartition, rho: &SetPartition) -> Result<BigRat> {
        let i = self.lattice.require_index(pi)?;
        let j = self.lattice.require_index(rho)?;
        Ok(self.matrix.entry(i, j))
    }
}

/// Assembles `q_{pi rho} = lambda_{|pi|, |pi|-|rho|+1}` for single mergers
/// `pi ≺ rho` and `q_{pi pi} = -lambda_{|pi|}`.
pub fn build_generator(lattice: &Arc<PartitionLattice>, rates: &RateTable) -> Result<TriMatrix> {
    let mut q = RatMatrix::zeros(lattice.len());
    let mut totals: BTreeMap<usize, BigRat> = BTreeMap::new();
    for (i, pi) in lattice.elements().iter().enumerate() {
        let b = pi.num_blocks();
        for sigma in pi.merge_covers() {
            let k = b - sigma.num_blocks() + 1;
            let r = rates.require(b, k)?;
            if !r.is_zero() {
                let j = lattice.require_index(&sigma)?;
                q.set(i, j, r.clone());
            }
        }
        if let alloc::collections::btree_map::Entry::Vacant(slot) = totals.entry(b) {
            slot.insert(rates.total_rate(b)?);
        }
        q.set(i, i, -totals[&b].clone());
    }
    TriMatrix::new(lattice.clone(), q)
}

fn block_matrix(n: usize, entry: impl Fn(usize, usize) -> BigRat) -> RatMatrix {
    let mut m = RatMatrix::zeros(n);
    for i in 1..=n {
        for j in 1..=i {
            m.set(i - 1, j - 1, entry(i, j));
        }
    }
    m
}

/// Bolthausen-Sznitman block-counting generator on `{1..n}` (row `i-1` is
/// `i` blocks): `q'_{ij} = i / ((i-j)(i-j+1))` for `i > j`, `q'_{ii} = 1 - i`.
pub fn bs_block_generator(n: usize) -> RatMatrix {
    block_matrix(n, |i, j| {
        let (i, j) = (i as i64, j as i64);
        if i == j {
            rat(1 - i, 1)
        } else {
            rat(i, (i - j) * (i - j + 1))
        }
    })
}

/// Kingman block-counting generator: `q'_{i,i-1} = C(i,2)`, `q'_{ii} = -C(i,2)`.
pub fn kingman_block_generator(n: usize) -> RatMatrix {
    block_matrix(n, |i, j| {
        let c = (i * (i - 1) / 2) as i64;
        match i - j {
            0 => rat(-c, 1),
            1 => rat(c, 1),
            _ => rat(0, 1),
        }
    })
}

/// Eigenvalues of `Q` with algebraic multiplicities, one pair per block
/// count `i = 1..n`: `(-lambda_i, {n over i})`.
///
/// The result is read off the diagonal of `Q` (it is triangular) and checked
/// against the rate table and the Stirling numbers of the second kind.
pub fn characteristic_factorization(
    q: &TriMatrix,
    rates: &RateTable,
) -> Result<Vec<(BigRat, BigUint)>> {
    let lattice = q.lattice();
    let n = lattice.n();
    let mut seen: BTreeMap<usize, (BigRat, BigUint)> = BTreeMap::new();
    for (idx, pi) in lattice.elements().iter().enumerate() {
        let d = q.matrix().entry(idx, idx);
        let slot = seen.entry(pi.num_blocks()).or_insert_with(|| (d.clone(), BigUint::zero()));
        if slot.0 != d {
            return Err(domain(format!("diagonal of Q is not constant on level {}", pi.num_blocks())));
        }
        slot.1 += 1u32;
    }
    (1..=n)
        .map(|i| {
            let (value, mult) = seen.remove(&i).ok_or_else(|| domain("empty lattice level"))?;
            if value != -rates.total_rate(i)? {
                return Err(domain(format!("diagonal at level {i} is not -lambda_{i}")));
            }
            if mult != stirling_second(n, i) {
                return Err(domain(format!("level {i} has the wrong size")));
            }
            Ok((value, mult))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_traits::One;

    fn lattice(n: usize) -> Arc<PartitionLattice> {
        Arc::new(PartitionLattice::enumerate(n).unwrap())
    }

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn rate_examples() {
        let bs = bs_rates(4).unwrap();
        assert_eq!(bs.rate(2, 2), Some(&rat(1, 1)));
        assert_eq!(bs.rate(3, 2), Some(&rat(1, 2)));
        assert_eq!(bs.rate(4, 4), Some(&rat(1, 3)));
        let k = kingman_rates(5).unwrap();
        assert_eq!(k.rate(5, 2), Some(&rat(1, 1)));
        assert_eq!(k.rate(5, 3), Some(&rat(0, 1)));
        assert_eq!(k.rate(2, 2), Some(&rat(1, 1)));
        assert!(bs_rates(1).is_err());
        assert!(kingman_rates(0).is_err());
    }

    #[test]
    fn total_rates_are_closed_forms() {
        let bs = bs_rates(8).unwrap();
        let k = kingman_rates(8).unwrap();
        for b in 1..=8 {
            assert_eq!(bs.total_rate(b).unwrap(), Model::BolthausenSznitman.total_rate(b));
            assert_eq!(k.total_rate(b).unwrap(), Model::Kingman.total_rate(b));
        }
    }

    #[test]
    fn generator_examples() {
        let l4 = lattice(4);
        let q = Model::BolthausenSznitman.generator(&l4).unwrap();
        let d4 = SetPartition::singletons(4);
        assert_eq!(q.get(&d4, &p("1,2|3|4")).unwrap(), rat(1, 3));
        assert_eq!(q.get(&d4, &d4).unwrap(), rat(-3, 1));
        let l3 = lattice(3);
        let qk = Model::Kingman.generator(&l3).unwrap();
        let d3 = SetPartition::singletons(3);
        assert_eq!(qk.get(&d3, &d3).unwrap(), rat(-3, 1));
        assert_eq!(qk.get(&d3, l3.top()).unwrap(), rat(0, 1));
    }

    #[test]
    fn missing_rate_is_reported() {
        let mut table = RateTable::new();
        table.insert(2, 2, rat(1, 1)).unwrap();
        let err = build_generator(&lattice(3), &table).unwrap_err();
        assert!(matches!(err, Error::MissingRate { b: 3, .. }));
        assert!(table.insert(3, 1, rat(1, 1)).is_err());
        assert!(table.insert(3, 2, rat(-1, 1)).is_err());
    }

    #[test]
    fn generic_rates_build_a_generator() {
        // Beta(2-a, a) with a = 1 is BS; a flat table is a different but valid Λ.
        let mut table = RateTable::new();
        for b in 2..=4 {
            for k in 2..=b {
                table.insert(b, k, rat(1, k as i64)).unwrap();
            }
        }
        let q = build_generator(&lattice(4), &table).unwrap();
        assert!(q.matrix().row_sums().iter().all(Zero::is_zero));
    }

    #[test]
    fn generator_structure() {
        for n in 1..=6 {
            let l = lattice(n);
            for model in [Model::BolthausenSznitman, Model::Kingman] {
                let q = model.generator(&l).unwrap();
                let m = q.matrix();
                assert!(m.row_sums().iter().all(Zero::is_zero), "{model} n={n}");
                assert!(m.is_upper_triangular());
                for (i, j, v) in m.iter() {
                    let (a, b) = (l.get(i), l.get(j));
                    if i == j {
                        assert_eq!(*v, -model.total_rate(a.num_blocks()));
                        continue;
                    }
                    assert!(v.is_positive());
                    match model {
                        Model::BolthausenSznitman => assert!(a.merge_covers().contains(b)),
                        Model::Kingman => assert!(a.pair_covers().contains(b)),
                    }
                }
                // every single merger actually carries rate
                for (i, a) in l.elements().iter().enumerate() {
                    let targets = match model {
                        Model::BolthausenSznitman => a.merge_covers(),
                        Model::Kingman => a.pair_covers(),
                    };
                    for b in targets {
                        assert!(m.get(i, l.index_of(&b).unwrap()).is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn aggregation_matches_block_generator() {
        for n in 1..=6 {
            let l = lattice(n);
            for model in [Model::BolthausenSznitman, Model::Kingman] {
                let q = model.generator(&l).unwrap();
                let block = model.block_generator(n);
                for (a, pi) in l.elements().iter().enumerate() {
                    let i = pi.num_blocks();
                    for j in 1..=n {
                        let s = l
                            .with_blocks(j)
                            .fold(BigRat::zero(), |acc, b| acc + q.matrix().entry(a, b));
                        assert_eq!(s, block.entry(i - 1, j - 1), "{model} n={n} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn block_generator_examples() {
        let bs = bs_block_generator(3);
        assert_eq!(bs.entry(2, 1), rat(3, 2));
        assert_eq!(bs.entry(2, 0), rat(1, 2));
        assert_eq!(bs.entry(0, 0), rat(0, 1));
        let k = kingman_block_generator(4);
        assert_eq!(k.entry(3, 2), rat(6, 1));
        assert_eq!(k.entry(0, 0), rat(0, 1));
        assert_eq!(k.entry(2, 1), rat(3, 1));
        for n in 1..=10 {
            for m in [bs_block_generator(n), kingman_block_generator(n)] {
                assert!(m.row_sums().iter().all(Zero::is_zero));
                assert!(m.is_lower_triangular());
            }
        }
    }

    #[test]
    fn characteristic_polynomial_examples() {
        let l3 = lattice(3);
        let bs = characteristic_factorization(
            &Model::BolthausenSznitman.generator(&l3).unwrap(),
            &bs_rates(3).unwrap(),
        )
        .unwrap();
        let as_pairs = |v: Vec<(BigRat, BigUint)>| -> Vec<(BigRat, u32)> {
            v.into_iter().map(|(e, m)| (e, u32::try_from(m).unwrap())).collect()
        };
        assert_eq!(as_pairs(bs), vec![(rat(0, 1), 1), (rat(-1, 1), 3), (rat(-2, 1), 1)]);
        let k = characteristic_factorization(
            &Model::Kingman.generator(&l3).unwrap(),
            &kingman_rates(3).unwrap(),
        )
        .unwrap();
        assert_eq!(as_pairs(k), vec![(rat(0, 1), 1), (rat(-1, 1), 3), (rat(-3, 1), 1)]);
        let l1 = lattice(1);
        let one = characteristic_factorization(
            &Model::Kingman.generator(&l1).unwrap(),
            &kingman_rates(2).unwrap(),
        )
        .unwrap();
        assert_eq!(as_pairs(one), vec![(rat(0, 1), 1)]);
    }

    #[test]
    fn trivial_eigenvectors() {
        for n in 2..=5 {
            let l = lattice(n);
            for model in [Model::BolthausenSznitman, Model::Kingman] {
                let q = model.generator(&l).unwrap();
                let ones = vec![BigRat::one(); l.len()];
                assert!(q.matrix().mul_vec(&ones).iter().all(Zero::is_zero));
                let mut e0 = vec![BigRat::zero(); l.len()];
                e0[0] = BigRat::one();
                let lambda_n = model.total_rate(n);
                let want: Vec<BigRat> = e0.iter().map(|v| -(v * &lambda_n)).collect();
                // right eigenvector: column 0 of a triangular Q is (-lambda_n, 0, ..., 0)
                assert_eq!(q.matrix().mul_vec(&e0), want);
                // the row of the singletons carries all the jump rates, so not a left one
                assert_ne!(q.matrix().vec_mul(&e0), want);
            }
        }
    }
}
