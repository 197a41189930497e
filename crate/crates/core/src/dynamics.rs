//! Transition probabilities, Green's matrices and hitting probabilities read
//! off the spectral decompositions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Float, One, ToPrimitive, Zero};

use crate::combinatorics::{ascending_factorial, rat, rat_from_uint, sign, BigRat, NumberTable};
use crate::error::{domain, Result};
use crate::matrix::RatMatrix;
use crate::partition::SetPartition;
use crate::spectral::SpectralTriple;

/// An entry of the Green's matrix: expected total time spent in a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreenEntry {
    /// Finite expected occupation time.
    Finite(BigRat),
    /// The absorbing state, reachable from the source, is occupied forever.
    Infinite,
}

impl GreenEntry {
    /// The finite value, if any.
    pub fn finite(&self) -> Option<&BigRat> {
        match self {
            GreenEntry::Finite(v) => Some(v),
            GreenEntry::Infinite => None,
        }
    }

    /// True for the infinite sentinel.
    pub fn is_infinite(&self) -> bool {
        matches!(self, GreenEntry::Infinite)
    }
}

struct PairShape {
    below: usize,
    above: usize,
    sizes: Vec<usize>,
}

/// `Some(shape)` if `pi <= rho`, `None` if not comparable.
fn shape(pi: &SetPartition, rho: &SetPartition) -> Result<Option<PairShape>> {
    Ok(pi.is_refinement(rho)?.then(|| PairShape {
        below: pi.num_blocks(),
        above: rho.num_blocks(),
        sizes: pi.restriction_sizes(rho),
    }))
}

fn float_factorial_ratio(a: usize, b: usize) -> f64 {
    // a!/b! in floating point without overflowing intermediates
    if a >= b {
        (b + 1..=a).fold(1.0, |acc, k| acc * k as f64)
    } else {
        1.0 / (a + 1..=b).fold(1.0, |acc, k| acc * k as f64)
    }
}

/// Bolthausen-Sznitman transition probability `p_{pi rho}(t)`:
/// `(-1)^{|rho|} e^t ((|rho|-1)!/(|pi|-1)!) ∏_{B∈rho} (-e^{-t})^{(|pi|_B|)}`
/// with rising factorial powers.
pub fn bs_transition(pi: &SetPartition, rho: &SetPartition, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(domain(format!("time must be nonnegative, got {t}")));
    }
    let Some(s) = shape(pi, rho)? else {
        return Ok(0.0);
    };
    let x = Float::exp(-t);
    let mut prod = float_factorial_ratio(s.above - 1, s.below - 1);
    for &m in &s.sizes {
        // (-x)^{rising m}
        prod *= (0..m).map(|k| k as f64 - x).product::<f64>();
    }
    let signed = if s.above % 2 == 0 { prod } else { -prod };
    Ok(signed / x)
}

/// The same closed form at an exact `x = e^{-t}`:
/// `(-1)^{|rho|} x^{-1} ((|rho|-1)!/(|pi|-1)!) ∏_B (-x)^{(|pi|_B|)}`.
///
/// This equals `sum_sigma r_{pi sigma} x^{|sigma|-1} l_{sigma rho}` for any
/// nonzero rational `x`; at `x = 1` it is the identity matrix.
pub fn bs_transition_exact(pi: &SetPartition, rho: &SetPartition, x: &BigRat) -> Result<BigRat> {
    if x.is_zero() {
        return Err(domain("x = e^{-t} must be nonzero"));
    }
    let Some(s) = shape(pi, rho)? else {
        return Ok(BigRat::zero());
    };
    let t = NumberTable::new(s.below);
    let neg = -x.clone();
    let prod = s
        .sizes
        .iter()
        .fold(BigRat::one(), |acc, &m| acc * ascending_factorial(&neg, m));
    Ok(sign(s.above) * t.factorial_ratio(s.above - 1, s.below - 1) * prod / x)
}

/// Coefficients of `∏_B sum_k [m_B over k] y^k`.
fn first_kind_product(sizes: &[usize], t: &NumberTable) -> Vec<BigInt> {
    let mut poly = vec![BigInt::one()];
    for &m in sizes {
        let mut next = vec![BigInt::zero(); poly.len() + m];
        for (a, ca) in poly.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for k in 1..=m {
                next[a + k] += ca * BigInt::from(t.stirling_first(m, k));
            }
        }
        poly = next;
    }
    poly
}

/// Bolthausen-Sznitman Green's matrix entry `g_{pi rho}`.
///
/// For `pi <= rho != {[n]}` this is
/// `(-1)^{|rho|} ((|rho|-1)!/(|pi|-1)!) sum_k ((-1)^{|k|}/(|k|-1)) ∏_B [|pi|_B| over k_B]`
/// over tuples `1 <= k_B <= |pi|_B|`. The single-block target is infinite.
pub fn bs_green(pi: &SetPartition, rho: &SetPartition) -> Result<GreenEntry> {
    let Some(s) = shape(pi, rho)? else {
        return Ok(GreenEntry::Finite(BigRat::zero()));
    };
    if s.above == 1 {
        return Ok(GreenEntry::Infinite);
    }
    let t = NumberTable::new(s.below);
    // Group tuples by |k|; |k| >= |rho| >= 2 so 1/(|k|-1) is finite.
    let coeffs = first_kind_product(&s.sizes, &t);
    let sum = coeffs
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, c)| !c.is_zero())
        .fold(BigRat::zero(), |acc, (k, c)| {
            acc + sign(k) * BigRat::new(c.clone(), BigInt::from(k - 1))
        });
    Ok(GreenEntry::Finite(
        sign(s.above) * t.factorial_ratio(s.above - 1, s.below - 1) * sum,
    ))
}

/// Probability that the Bolthausen-Sznitman coalescent started at `pi` ever
/// visits `rho`: `g_{pi rho} (|rho| - 1)`.
///
/// The absorbing state is rejected; it is hit with probability one.
pub fn bs_hitting(pi: &SetPartition, rho: &SetPartition) -> Result<BigRat> {
    if rho.num_blocks() == 1 && pi.ground() == rho.ground() {
        return Err(domain("the absorbing partition is hit with probability 1"));
    }
    match bs_green(pi, rho)? {
        GreenEntry::Finite(g) => Ok(g * rat(rho.num_blocks() as i64 - 1, 1)),
        GreenEntry::Infinite => unreachable!("non-absorbing target"),
    }
}

/// Green's matrix of the Bolthausen-Sznitman block-counting process:
/// `(-1)^j ((j-1)!/(i-1)!) sum_{k=j}^{i} ((-1)^k/(k-1)) [i over k] {k over j}`
/// for `2 <= j <= i <= n`.
pub fn bs_block_green(i: usize, j: usize, n: usize) -> Result<BigRat> {
    if j < 2 {
        return Err(domain("block level 1 is absorbing; its Green entry is infinite"));
    }
    if j > i || i > n {
        return Err(domain(format!("need 2 <= j <= i <= n, got i={i} j={j} n={n}")));
    }
    let t = NumberTable::new(i);
    let sum = (j..=i).fold(BigRat::zero(), |acc, k| {
        acc + sign(k)
            * rat_from_uint(&(t.stirling_first(i, k) * t.stirling_second(k, j)))
            / rat(k as i64 - 1, 1)
    });
    Ok(sign(j) * t.factorial_ratio(j - 1, i - 1) * sum)
}

/// Kingman hitting probability through Lah numbers:
/// `L(|pi|, |rho|)^{-1} ∏_{B∈rho} |pi|_B|!` for `pi <= rho`, else 0.
pub fn kingman_hitting(pi: &SetPartition, rho: &SetPartition) -> Result<BigRat> {
    let Some(s) = shape(pi, rho)? else {
        return Ok(BigRat::zero());
    };
    let t = NumberTable::new(s.below);
    let prod: num_bigint::BigUint = s.sizes.iter().map(|&m| t.factorial(m).clone()).product();
    Ok(rat_from_uint(&prod) / rat_from_uint(&t.lah(s.below, s.above)))
}

/// Kingman hitting probability as a ratio of maximal-chain counts:
/// `m(pi, rho) m(rho, {[n]}) / m(pi, {[n]})`.
pub fn kingman_hitting_chain_ratio(pi: &SetPartition, rho: &SetPartition) -> Result<BigRat> {
    if !pi.is_refinement(rho)? {
        return Ok(BigRat::zero());
    }
    let top = SetPartition::from_blocks(vec![pi.ground()])?;
    let through = pi.count_maximal_chains(rho)? * rho.count_maximal_chains(&top)?;
    Ok(rat_from_uint(&through) / rat_from_uint(&pi.count_maximal_chains(&top)?))
}

/// `P(t) = R exp(tD) L` in floating point.
pub fn transition_via_triple(triple: &SpectralTriple, t: f64) -> DMatrix<f64> {
    let dim = triple.dim();
    let decay: Vec<f64> = triple
        .d
        .iter()
        .map(|d| Float::exp(t * d.to_f64().unwrap_or(f64::NAN)))
        .collect();
    let l_rows: Vec<Vec<(usize, f64)>> = (0..dim)
        .map(|k| triple.l.row(k).map(|(j, v)| (j, v.to_f64().unwrap_or(f64::NAN))).collect())
        .collect();
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for (k, r) in triple.r.row(i) {
            let w = r.to_f64().unwrap_or(f64::NAN) * decay[k];
            if w == 0.0 {
                continue;
            }
            for (j, l) in &l_rows[k] {
                out[(i, *j)] += w * l;
            }
        }
    }
    out
}

/// `P = R diag(x^{-d}) L` at an exact `x = e^{-t}`.
///
/// Both coalescents have eigenvalues `d` that are nonpositive integers, so
/// every entry is a Laurent polynomial in `x`; any nonzero rational is
/// accepted.
pub fn transition_exact_via_triple(triple: &SpectralTriple, x: &BigRat) -> Result<RatMatrix> {
    if x.is_zero() {
        return Err(domain("x = e^{-t} must be nonzero"));
    }
    let powers = triple
        .d
        .iter()
        .map(|d| {
            let k = (-d)
                .to_integer()
                .to_usize()
                .filter(|_| d.is_integer())
                .ok_or_else(|| domain("eigenvalues must be nonpositive integers"))?;
            Ok(num_traits::pow(x.clone(), k))
        })
        .collect::<Result<Vec<BigRat>>>()?;
    Ok(triple.r.scale_columns(&powers).mul(&triple.l))
}
