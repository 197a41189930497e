//! Explicit eigenvector matrices `R`, `L` and eigenvalue diagonal `D` with
//! `Q = R D L` and `L = R^{-1}`, for both coalescents on the partition
//! lattice and for their block-counting processes.

use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::combinatorics::{rat, rat_from_uint, sign, BigRat, NumberTable};
use crate::error::Result;
use crate::generator::Model;
use crate::matrix::RatMatrix;
use crate::partition::{PartitionLattice, SetPartition};

/// A factorization `Q = R D L`: columns of `R` are right eigenvectors, rows
/// of `L` left eigenvectors, `D` holds the eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralTriple {
    /// Right eigenvectors (columns).
    pub r: RatMatrix,
    /// Eigenvalues `d_{ii}`.
    pub d: Vec<BigRat>,
    /// Left eigenvectors (rows).
    pub l: RatMatrix,
}

impl SpectralTriple {
    /// Matrix size.
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// `R D L`, exactly.
    pub fn compose(&self) -> RatMatrix {
        self.r.scale_columns(&self.d).mul(&self.l)
    }

    /// `D` as a matrix.
    pub fn d_matrix(&self) -> RatMatrix {
        RatMatrix::from_diagonal(&self.d)
    }
}

/// Exact-equality outcome of the checks run by [`verify_triple`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleReport {
    /// `Q`, `R`, `D`, `L` all have the same size.
    pub dimensions_match: bool,
    /// `Q == R D L`.
    pub q_equals_rdl: bool,
    /// `L R == I`.
    pub lr_is_identity: bool,
    /// `R L == I`.
    pub rl_is_identity: bool,
    /// `r_{ii} = l_{ii} = 1` for every `i`.
    pub unit_diagonals: bool,
    /// `Q`, `R` and `L` are all upper triangular, or all lower triangular.
    pub triangular_support: bool,
}

impl TripleReport {
    /// True if every check passed.
    pub fn all_pass(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }

    /// Named results, in a stable order.
    pub fn checks(&self) -> [(&'static str, bool); 6] {
        [
            ("dimensions_match", self.dimensions_match),
            ("q_equals_rdl", self.q_equals_rdl),
            ("lr_is_identity", self.lr_is_identity),
            ("rl_is_identity", self.rl_is_identity),
            ("unit_diagonals", self.unit_diagonals),
            ("triangular_support", self.triangular_support),
        ]
    }
}

/// Checks a candidate decomposition of `q` with exact rational arithmetic.
/// Failures are reported, never raised.
pub fn verify_triple(q: &RatMatrix, t: &SpectralTriple) -> TripleReport {
    let dim = q.dim();
    let dimensions_match = t.r.dim() == dim && t.l.dim() == dim && t.d.len() == dim;
    if !dimensions_match {
        return TripleReport {
            dimensions_match,
            q_equals_rdl: false,
            lr_is_identity: false,
            rl_is_identity: false,
            unit_diagonals: false,
            triangular_support: false,
        };
    }
    let id = RatMatrix::identity(dim);
    let one = BigRat::one();
    let upper = [q, &t.r, &t.l].iter().all(|m| m.is_upper_triangular());
    let lower = [q, &t.r, &t.l].iter().all(|m| m.is_lower_triangular());
    TripleReport {
        dimensions_match,
        q_equals_rdl: t.compose() == *q,
        lr_is_identity: t.l.mul(&t.r) == id,
        rl_is_identity: t.r.mul(&t.l) == id,
        unit_diagonals: (0..dim).all(|i| t.r.get(i, i) == Some(&one) && t.l.get(i, i) == Some(&one)),
        triangular_support: upper || lower,
    }
}

/// Per-pair data the lattice formulas depend on.
struct Pair {
    i: usize,
    j: usize,
    below: usize,
    above: usize,
    sizes: Vec<usize>,
}

fn comparable_pairs(lattice: &PartitionLattice) -> impl Iterator<Item = Pair> + '_ {
    lattice.elements().iter().enumerate().flat_map(move |(i, pi)| {
        lattice.upper_set(i).into_iter().map(move |j| {
            let rho = lattice.get(j);
            Pair {
                i,
                j,
                below: pi.num_blocks(),
                above: rho.num_blocks(),
                sizes: pi.restriction_sizes(rho),
            }
        })
    })
}

fn lattice_triple(
    lattice: &PartitionLattice,
    right: impl Fn(&Pair) -> BigRat,
    left: impl Fn(&Pair) -> BigRat,
    eigen: impl Fn(usize) -> BigRat,
) -> SpectralTriple {
    let dim = lattice.len();
    let mut r = RatMatrix::zeros(dim);
    let mut l = RatMatrix::zeros(dim);
    for pair in comparable_pairs(lattice) {
        r.set(pair.i, pair.j, right(&pair));
        l.set(pair.i, pair.j, left(&pair));
    }
    let d = lattice.elements().iter().map(|p| eigen(p.num_blocks())).collect();
    SpectralTriple { r, d, l }
}

fn factorial_product(t: &NumberTable, sizes: &[usize], shift: usize) -> BigRat {
    rat_from_uint(&sizes.iter().map(|&m| t.factorial(m - shift).clone()).product::<BigUint>())
}

/// Bolthausen-Sznitman decomposition:
/// `r = ((|rho|-1)!/(|pi|-1)!) ∏_B (|pi|_B|-1)!`,
/// `l = (-1)^{|pi|-|rho|} (|rho|-1)!/(|pi|-1)!`, `d = -(|pi|-1)`.
pub fn bs_triple(lattice: &PartitionLattice) -> SpectralTriple {
    let t = NumberTable::new(lattice.n());
    lattice_triple(
        lattice,
        |p| t.factorial_ratio(p.above - 1, p.below - 1) * factorial_product(&t, &p.sizes, 1),
        |p| sign(p.below - p.above) * t.factorial_ratio(p.above - 1, p.below - 1),
        |b| rat(1 - b as i64, 1),
    )
}

/// Kingman decomposition (product form):
/// `r = ((2|rho|-1)!/(|pi|+|rho|-1)!) ∏_B |pi|_B|!`,
/// `l = (-1)^{|pi|-|rho|} ((|pi|+|rho|-2)!/(2|pi|-2)!) ∏_B |pi|_B|!`,
/// `d = -C(|pi|, 2)`.
pub fn kingman_triple(lattice: &PartitionLattice) -> SpectralTriple {
    let t = NumberTable::new(lattice.n());
    lattice_triple(
        lattice,
        |p| {
            t.factorial_ratio(2 * p.above - 1, p.below + p.above - 1)
                * factorial_product(&t, &p.sizes, 0)
        },
        |p| {
            sign(p.below - p.above)
                * t.factorial_ratio(p.below + p.above - 2, 2 * p.below - 2)
                * factorial_product(&t, &p.sizes, 0)
        },
        kingman_eigenvalue,
    )
}

fn kingman_eigenvalue(b: usize) -> BigRat {
    rat(-((b * b.saturating_sub(1) / 2) as i64), 1)
}

/// Triple for either model on a lattice.
pub fn triple(model: Model, lattice: &PartitionLattice) -> SpectralTriple {
    match model {
        Model::BolthausenSznitman => bs_triple(lattice),
        Model::Kingman => kingman_triple(lattice),
    }
}

/// Block-counting triple for either model.
pub fn block_triple(model: Model, n: usize) -> SpectralTriple {
    match model {
        Model::BolthausenSznitman => bs_block_triple(n),
        Model::Kingman => kingman_block_triple(n),
    }
}

fn chain_weight(
    pi: &SetPartition,
    rho: &SetPartition,
    coeff: impl Fn(usize, usize, &NumberTable) -> BigRat,
) -> Result<BigRat> {
    if !pi.is_refinement(rho)? {
        return Ok(BigRat::zero());
    }
    let (a, b) = (pi.num_blocks(), rho.num_blocks());
    let t = NumberTable::new(a + b);
    let m = rat_from_uint(&pi.count_maximal_chains(rho)?);
    // 2^{a-b} / (a-b)!
    let scale = rat_from_uint(&(BigUint::one() << (a - b))) / t.factorial_rat(a - b);
    Ok(scale * coeff(a, b, &t) * m)
}

/// Kingman right eigenvector entry through maximal chains:
/// `2^{|pi|-|rho|} (2|rho|-1)! m(pi, rho) / ((|pi|-|rho|)! (|pi|+|rho|-1)!)`.
pub fn kingman_right_chain_form(pi: &SetPartition, rho: &SetPartition) -> Result<BigRat> {
    chain_weight(pi, rho, |a, b, t| t.factorial_ratio(2 * b - 1, a + b - 1))
}

/// Kingman left eigenvector entry through maximal chains:
/// `(-1)^{|pi|-|rho|} 2^{|pi|-|rho|} (|pi|+|rho|-2)! m(pi, rho) / ((2|pi|-2)! (|pi|-|rho|)!)`.
pub fn kingman_left_chain_form(pi: &SetPartition, rho: &SetPartition) -> Result<BigRat> {
    chain_weight(pi, rho, |a, b, t| sign(a - b) * t.factorial_ratio(a + b - 2, 2 * a - 2))
}

fn block_triple_from(
    n: usize,
    right: impl Fn(usize, usize) -> BigRat,
    left: impl Fn(usize, usize) -> BigRat,
    eigen: impl Fn(usize) -> BigRat,
) -> SpectralTriple {
    let mut r = RatMatrix::zeros(n);
    let mut l = RatMatrix::zeros(n);
    for i in 1..=n {
        for j in 1..=i {
            r.set(i - 1, j - 1, right(i, j));
            l.set(i - 1, j - 1, left(i, j));
        }
    }
    SpectralTriple { r, d: (1..=n).map(eigen).collect(), l }
}

/// Bolthausen-Sznitman block-counting triple on `{1..n}` (index `i-1` is `i`
/// blocks): `r' = ((j-1)!/(i-1)!) [i over j]`,
/// `l' = (-1)^{i-j} ((j-1)!/(i-1)!) {i over j}`, `d' = 1 - i`.
pub fn bs_block_triple(n: usize) -> SpectralTriple {
    let t = NumberTable::new(n);
    block_triple_from(
        n,
        |i, j| t.factorial_ratio(j - 1, i - 1) * rat_from_uint(&t.stirling_first(i, j)),
        |i, j| sign(i - j) * t.factorial_ratio(j - 1, i - 1) * rat_from_uint(&t.stirling_second(i, j)),
        |i| rat(1 - i as i64, 1),
    )
}

/// Kingman block-counting triple: `r' = ((2j-1)!/(i+j-1)!) L(i,j)`,
/// `l' = (-1)^{i-j} ((i+j-2)!/(2i-2)!) L(i,j)`, `d' = -C(i,2)`.
pub fn kingman_block_triple(n: usize) -> SpectralTriple {
    let t = NumberTable::new(n);
    block_triple_from(
        n,
        |i, j| t.factorial_ratio(2 * j - 1, i + j - 1) * rat_from_uint(&t.lah(i, j)),
        |i, j| sign(i - j) * t.factorial_ratio(i + j - 2, 2 * i - 2) * rat_from_uint(&t.lah(i, j)),
        kingman_eigenvalue,
    )
}
