//! Brute-force references for small lattices.
//!
//! Nothing here uses the closed forms it is meant to check: the matrix
//! exponential is a truncated power series, the Green's matrix is a triangular
//! solve of the generator, chains are enumerated by depth-first search and
//! hitting probabilities come from the jump-chain recursion.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_traits::{Float, One, Zero};

use crate::combinatorics::{bell, BigRat};
use crate::error::{domain, Error, Result};
use crate::generator::{Model, TriMatrix};
use crate::matrix::RatMatrix;
use crate::partition::SetPartition;

/// Largest ground set the enumerating oracles accept.
pub const ORACLE_MAX_N: usize = 6;

/// Default truncation tolerance for [`matexp_series`].
pub const DEFAULT_MATEXP_TOL: f64 = 1e-13;

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| Float::abs(*v)).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(tQ)` by scaling and squaring a Taylor series. The scaled argument
/// has infinity norm below 1/2 and the series is cut once the tail bound
/// drops below `tol / 2^s`.
pub fn matexp_series(q: &DMatrix<f64>, t: f64, tol: f64) -> Result<DMatrix<f64>> {
    if !q.is_square() {
        return Err(domain("matrix exponential needs a square matrix"));
    }
    if tol.is_nan() || tol <= 0.0 || !t.is_finite() {
        return Err(domain("tolerance must be positive and time finite"));
    }
    let dim = q.nrows();
    let mut a = q * t;
    let norm = inf_norm(&a);
    let mut s = 0i32;
    while norm / Float::powi(2.0, s) >= 0.5 {
        s += 1;
    }
    a /= Float::powi(2.0, s);
    let a_norm = norm / Float::powi(2.0, s);
    let target = tol / Float::powi(2.0, s);

    let mut sum = DMatrix::<f64>::identity(dim, dim);
    let mut term = DMatrix::<f64>::identity(dim, dim);
    // tail after term k is at most |A|^(k+1)/(k+1)! * 1/(1-|A|) <= 2 |A|^(k+1)/(k+1)!
    let mut bound = 1.0;
    for k in 1..=60 {
        term = &term * &a / k as f64;
        sum += &term;
        bound *= a_norm / (k + 1) as f64;
        if 2.0 * bound < target {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Expected occupation times `N = (-Q_TT)^{-1}` over the transient states,
/// which are every lattice element except the last (the one-block
/// partition). Row and column `i` of the result is lattice element `i`.
pub fn fundamental_matrix(q: &TriMatrix) -> Result<RatMatrix> {
    let m = q.matrix();
    let dim = m.dim().saturating_sub(1);
    if m.get(dim, dim).is_some() {
        return Err(domain("the last state must be absorbing"));
    }
    let mut n = RatMatrix::zeros(dim);
    for i in (0..dim).rev() {
        let rate = -m.entry(i, i);
        if rate.is_zero() {
            return Err(domain("a transient state has zero total rate"));
        }
        let mut row: BTreeMap<usize, BigRat> = BTreeMap::new();
        row.insert(i, BigRat::one());
        for (k, qik) in m.row(i).filter(|(k, _)| *k > i && *k < dim) {
            for (c, nkc) in n.row(k) {
                *row.entry(c).or_insert_with(BigRat::zero) += qik * nkc;
            }
        }
        for (c, v) in row {
            n.set(i, c, v / &rate);
        }
    }
    Ok(n)
}

fn check_small(p: &SetPartition) -> Result<()> {
    let n = p.ground_len();
    if n > ORACLE_MAX_N {
        return Err(Error::SizeLimit { n, cap: ORACLE_MAX_N, count: bell(n) });
    }
    Ok(())
}

/// Every saturated chain of single pair merges from `pi` up to `rho`.
pub fn enumerate_maximal_chains(pi: &SetPartition, rho: &SetPartition) -> Result<Vec<Vec<SetPartition>>> {
    pi.require_refinement(rho)?;
    check_small(pi)?;
    let mut out = Vec::new();
    let mut stack = alloc::vec![pi.clone()];
    extend_chains(rho, &mut stack, &mut out);
    Ok(out)
}

fn extend_chains(rho: &SetPartition, stack: &mut Vec<SetPartition>, out: &mut Vec<Vec<SetPartition>>) {
    let top = stack.last().expect("nonempty chain");
    if top == rho {
        out.push(stack.clone());
        return;
    }
    for next in top.pair_covers() {
        if next.refines(rho) {
            stack.push(next);
            extend_chains(rho, stack, out);
            stack.pop();
        }
    }
}

/// Probability that the chain started at `pi` ever visits `rho`, from
/// `h(s) = sum_t q(s,t)/q(s) h(t)` over one-jump successors `t <= rho`.
pub fn hitting_bruteforce(model: Model, pi: &SetPartition, rho: &SetPartition) -> Result<BigRat> {
    if !pi.is_refinement(rho)? {
        return Ok(BigRat::zero());
    }
    check_small(pi)?;
    let rates = model.rates(pi.ground_len().max(2))?;
    let mut memo = BTreeMap::new();
    hit(&rates, pi, rho, &mut memo)
}

fn hit(
    rates: &crate::generator::RateTable,
    s: &SetPartition,
    rho: &SetPartition,
    memo: &mut BTreeMap<SetPartition, BigRat>,
) -> Result<BigRat> {
    if s == rho {
        return Ok(BigRat::one());
    }
    if let Some(h) = memo.get(s) {
        return Ok(h.clone());
    }
    let b = s.num_blocks();
    let total = rates.total_rate(b)?;
    let mut acc = BigRat::zero();
    for next in s.merge_covers() {
        if !next.refines(rho) {
            continue;
        }
        let k = b - next.num_blocks() + 1;
        let rate = rates.require(b, k)?;
        if !rate.is_zero() {
            acc += rate * hit(rates, &next, rho, memo)?;
        }
    }
    let h = acc / total;
    memo.insert(s.clone(), h.clone());
    Ok(h)
}
