//! Invariant checks comparing the closed forms with the brute-force oracles.
//!
//! Each check returns an [`Outcome`] whose detail string is deterministic,
//! so reports can be diffed between runs.

use std::sync::Arc;

use coalspec_core::combinatorics::{factorial, rat_from_uint, stirling_second, BigRat};
use coalspec_core::dynamics::{
    bs_block_green, bs_green, bs_hitting, bs_transition, bs_transition_exact, kingman_hitting,
    kingman_hitting_chain_ratio, transition_exact_via_triple, transition_via_triple, GreenEntry,
};
use coalspec_core::generator::characteristic_factorization;
use coalspec_core::oracle::{
    enumerate_maximal_chains, fundamental_matrix, hitting_bruteforce, matexp_series, ORACLE_MAX_N,
};
use coalspec_core::rrt::{count_trees_containing, enumerate_increasing_trees};
use coalspec_core::simulate::Proportion;
use coalspec_core::spectral::{block_triple, triple, verify_triple};
use coalspec_core::{Model, PartitionLattice, RatMatrix, Result, SetPartition, TripleReport};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::format;
use crate::parallel;

/// Result of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Whether the check held.
    pub pass: bool,
    /// Short human-readable summary.
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }

    /// Conjunction of several outcomes, details joined with `; `.
    pub fn all(parts: Vec<Outcome>) -> Outcome {
        let pass = parts.iter().all(|p| p.pass);
        let detail = parts.into_iter().map(|p| p.detail).collect::<Vec<_>>().join("; ");
        Outcome { pass, detail }
    }
}

fn lattice(n: usize) -> Result<Arc<PartitionLattice>> {
    Ok(Arc::new(PartitionLattice::enumerate(n)?))
}

fn comparable_pairs(l: &PartitionLattice) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..l.len()).flat_map(move |i| l.upper_set(i).into_iter().map(move |j| (i, j)))
}

/// `Q = R D L`, `L R = I`, `R L = I` on the partition lattice, exactly.
pub fn factorization(model: Model, n: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let q = model.generator(&l)?;
    Ok(triple_outcome(&verify_triple(q.matrix(), &triple(model, &l)), l.len()))
}

fn triple_outcome(report: &TripleReport, dim: usize) -> Outcome {
    let failed: Vec<&str> = report.checks().iter().filter(|c| !c.1).map(|c| c.0).collect();
    if failed.is_empty() {
        Outcome::new(true, format!("{} exact checks on {dim}x{dim} matrices", report.checks().len()))
    } else {
        Outcome::new(false, format!("failed: {}", failed.join(", ")))
    }
}

/// Same identities for the block-counting generator.
pub fn block_factorization(model: Model, n: usize) -> Result<Outcome> {
    Ok(triple_outcome(&verify_triple(&model.block_generator(n), &block_triple(model, n)), n))
}

/// Closed-form (Bolthausen-Sznitman) or spectral (Kingman) transition
/// matrices against the series exponential of `Q`, plus row sums.
pub fn transitions_vs_matexp(model: Model, n: usize, times: &[f64], tol: f64) -> Result<Outcome> {
    let l = lattice(n)?;
    let qf = model.generator(&l)?.matrix().to_f64();
    let spectral = triple(model, &l);
    let mut max_dev = 0.0f64;
    let mut max_row = 0.0f64;
    for &t in times {
        let oracle = matexp_series(&qf, t, tol.min(1e-13))?;
        let closed = match model {
            Model::BolthausenSznitman => {
                let mut m = nalgebra::DMatrix::zeros(l.len(), l.len());
                for (i, a) in l.elements().iter().enumerate() {
                    for (j, b) in l.elements().iter().enumerate() {
                        m[(i, j)] = bs_transition(a, b, t)?;
                    }
                }
                m
            }
            Model::Kingman => transition_via_triple(&spectral, t),
        };
        max_dev = max_dev.max((&closed - &oracle).amax());
        for r in closed.row_iter() {
            max_row = max_row.max((r.sum() - 1.0).abs());
        }
    }
    Ok(Outcome::new(
        max_dev < tol && max_row < tol,
        format!("max deviation {}, max row-sum error {}", format::real(max_dev), format::real(max_row)),
    ))
}

/// The product formula for `p_{pi rho}` at exact `x = e^{-t}` equals the
/// spectral sum `R diag(x^{|sigma|-1}) L`.
pub fn transition_identity_exact(n: usize, xs: &[BigRat]) -> Result<Outcome> {
    let l = lattice(n)?;
    let spectral = triple(Model::BolthausenSznitman, &l);
    let mut mismatches = 0usize;
    for x in xs {
        let p = transition_exact_via_triple(&spectral, x)?;
        for (i, a) in l.elements().iter().enumerate() {
            for (j, b) in l.elements().iter().enumerate() {
                if bs_transition_exact(a, b, x)? != p.entry(i, j) {
                    mismatches += 1;
                }
            }
        }
        if x.is_one() && p != RatMatrix::identity(l.len()) {
            mismatches += 1;
        }
    }
    let xs: Vec<String> = xs.iter().map(format::rational).collect();
    Ok(Outcome::new(mismatches == 0, format!("x in [{}], {mismatches} mismatches", xs.join(", "))))
}

/// Green's matrix against the exact fundamental matrix; infinite exactly on
/// the absorbing column; block Green's matrix equals level sums.
pub fn green_vs_fundamental(n: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let q = Model::BolthausenSznitman.generator(&l)?;
    let fundamental = fundamental_matrix(&q)?;
    let top = l.len() - 1;
    let mut mismatches = 0usize;
    let mut green = vec![vec![BigRat::zero(); l.len()]; l.len()];
    for (i, a) in l.elements().iter().enumerate() {
        for (j, b) in l.elements().iter().enumerate() {
            match bs_green(a, b)? {
                GreenEntry::Infinite => mismatches += usize::from(j != top),
                GreenEntry::Finite(g) => {
                    if j == top || (i < top && g != fundamental.entry(i, j)) {
                        mismatches += 1;
                    }
                    green[i][j] = g;
                }
            }
        }
    }
    let mut block_mismatches = 0usize;
    for (i, a) in l.elements().iter().enumerate().take(top) {
        for level in 2..=a.num_blocks() {
            let sum = l.with_blocks(level).fold(BigRat::zero(), |acc, j| acc + &green[i][j]);
            if sum != bs_block_green(a.num_blocks(), level, n)? {
                block_mismatches += 1;
            }
        }
    }
    Ok(Outcome::new(
        mismatches == 0 && block_mismatches == 0,
        format!("{mismatches} entry mismatches, {block_mismatches} block-sum mismatches"),
    ))
}

/// Maximal-chain counts against depth-first enumeration for all pairs.
pub fn maximal_chains(n: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let mut mismatches = 0usize;
    for (i, j) in comparable_pairs(&l) {
        let (a, b) = (l.get(i), l.get(j));
        let counted = a.count_maximal_chains(b)?;
        if counted != enumerate_maximal_chains(a, b)?.len().into() {
            mismatches += 1;
        }
    }
    let full = l.bottom().count_maximal_chains(l.top())?;
    Ok(Outcome::new(mismatches == 0, format!("m(bottom, top) = {full}, {mismatches} mismatches")))
}

/// Kingman hitting probabilities three ways: Lah numbers, chain ratio and
/// the jump-chain recursion.
pub fn kingman_hitting_three_ways(n: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let mut mismatches = 0usize;
    for a in l.elements() {
        for b in l.elements() {
            let lah = kingman_hitting(a, b)?;
            if lah != kingman_hitting_chain_ratio(a, b)? || lah != hitting_bruteforce(Model::Kingman, a, b)? {
                mismatches += 1;
            }
        }
    }
    Ok(Outcome::new(mismatches == 0, format!("{} pairs, {mismatches} mismatches", l.len() * l.len())))
}

/// Bolthausen-Sznitman hitting probabilities against the jump-chain
/// recursion.
pub fn bs_hitting_vs_recursion(n: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let top = l.top();
    let mut mismatches = 0usize;
    for a in l.elements() {
        for b in l.elements().iter().filter(|b| *b != top) {
            if bs_hitting(a, b)? != hitting_bruteforce(Model::BolthausenSznitman, a, b)? {
                mismatches += 1;
            }
        }
    }
    Ok(Outcome::new(mismatches == 0, format!("{mismatches} mismatches")))
}

/// Random recursive tree containment: exhaustive counts against the product
/// formula and against the right eigenvector entries.
pub fn rrt_containment(n: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let r = triple(Model::BolthausenSznitman, &l).r;
    let mut mismatches = 0usize;
    for (i, a) in l.elements().iter().enumerate() {
        let trees = enumerate_increasing_trees(a)?;
        for (j, b) in l.elements().iter().enumerate() {
            let mut hits = 0usize;
            for t in &trees {
                hits += usize::from(t.contains(b)?);
            }
            let formula = count_trees_containing(a, b)?;
            let ratio = rat_from_uint(&formula) / rat_from_uint(&factorial(a.num_blocks() - 1));
            if formula != hits.into() || ratio != r.entry(i, j) {
                mismatches += 1;
            }
        }
    }
    Ok(Outcome::new(mismatches == 0, format!("{mismatches} mismatches")))
}

/// The eigenvalue multiset on the diagonal of `D` is
/// `{-lambda_i with multiplicity S(n, i)}`.
pub fn characteristic_polynomial(model: Model, n: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let d = triple(model, &l).d;
    let mut found: Vec<(BigRat, usize)> = Vec::new();
    for v in d {
        match found.iter_mut().find(|(u, _)| *u == v) {
            Some(slot) => slot.1 += 1,
            None => found.push((v, 1)),
        }
    }
    let mut want: Vec<(BigRat, usize)> = (1..=n)
        .map(|i| {
            let mult = stirling_second(n, i).to_usize().expect("small multiplicity");
            (-model.total_rate(i), mult)
        })
        .collect();
    found.sort();
    want.sort();
    let rates = model.rates(n.max(2))?;
    let from_q = characteristic_factorization(&model.generator(&l)?, &rates)?;
    let q_multiset: Vec<(BigRat, usize)> = {
        let mut v: Vec<_> = from_q.into_iter().map(|(e, m)| (e, m.to_usize().unwrap())).collect();
        v.sort();
        v
    };
    let pass = found == want && q_multiset == want;
    let shown: Vec<String> = want.iter().map(|(e, m)| format!("{}^{m}", format::rational(e))).collect();
    Ok(Outcome::new(pass, format!("eigenvalues {}", shown.join(" "))))
}

/// Monte Carlo law of the Bolthausen-Sznitman coalescent at time `t`
/// against the closed form. Passes if at most `allowed` states fall outside
/// `bands` standard errors.
pub fn monte_carlo_bs(n: usize, t: f64, reps: u64, seed: u64, bands: f64, allowed: usize) -> Result<Outcome> {
    let l = lattice(n)?;
    let law = parallel::estimate_transition(Model::BolthausenSznitman, n, t, reps, seed)?;
    let start = l.bottom();
    let mut violations = 0usize;
    let mut worst = 0.0f64;
    for rho in l.elements() {
        let exact = bs_transition(start, rho, t)?;
        let z = law.proportion(rho).z_score(exact).abs();
        worst = worst.max(z);
        violations += usize::from(z > bands);
    }
    Ok(Outcome::new(
        violations <= allowed,
        format!("{} states, {violations} outside {bands} sigma, max |z| {}", l.len(), format::real(worst)),
    ))
}

/// Frequency of containment of `rho` in random recursive trees on `pi`.
pub fn containment_frequency(pi: &SetPartition, rho: &SetPartition, reps: u64, seed: u64) -> Result<Proportion> {
    parallel::estimate_containment(pi, rho, reps, seed)
}

/// One named check at one size.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Check name.
    pub name: &'static str,
    /// Ground-set size.
    pub n: usize,
    /// Outcome.
    pub outcome: Outcome,
}

type CheckFn = fn(usize, f64) -> Result<Outcome>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("bs-factorization", |n, _| factorization(Model::BolthausenSznitman, n)),
    ("kingman-factorization", |n, _| factorization(Model::Kingman, n)),
    ("bs-block-factorization", |n, _| block_factorization(Model::BolthausenSznitman, n)),
    ("kingman-block-factorization", |n, _| block_factorization(Model::Kingman, n)),
    ("bs-transition-matexp", |n, tol| transitions_vs_matexp(Model::BolthausenSznitman, n, &[0.1, 1.0, 5.0], tol)),
    ("kingman-transition-matexp", |n, tol| transitions_vs_matexp(Model::Kingman, n, &[0.1, 1.0, 5.0], tol)),
    ("bs-transition-exact", |n, _| {
        use coalspec_core::combinatorics::rat;
        transition_identity_exact(n, &[rat(1, 1), rat(1, 2), rat(-2, 1)])
    }),
    ("bs-green-fundamental", |n, _| green_vs_fundamental(n)),
    ("bs-hitting-recursion", |n, _| bs_hitting_vs_recursion(n)),
    ("kingman-hitting", |n, _| kingman_hitting_three_ways(n)),
    ("maximal-chains", |n, _| maximal_chains(n)),
    ("rrt-containment", |n, _| rrt_containment(n)),
    ("bs-characteristic-polynomial", |n, _| characteristic_polynomial(Model::BolthausenSznitman, n)),
    ("kingman-characteristic-polynomial", |n, _| characteristic_polynomial(Model::Kingman, n)),
];

/// Runs every check for `n = 2..=n_max` in parallel; results come back in a
/// fixed order.
pub fn suite(n_max: usize, tol: f64) -> Result<Vec<Check>> {
    if !(2..=ORACLE_MAX_N).contains(&n_max) {
        return Err(coalspec_core::Error::Domain(format!(
            "--n-max must lie in 2..={ORACLE_MAX_N}, the range of the brute-force oracles"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(coalspec_core::Error::Domain("--tol must be positive".into()));
    }
    let tasks: Vec<(usize, &str, CheckFn)> =
        (2..=n_max).flat_map(|n| CHECKS.iter().map(move |(name, f)| (n, *name, *f))).collect();
    tasks
        .into_par_iter()
        .map(|(n, name, f)| Ok(Check { name, n, outcome: f(n, tol)? }))
        .collect()
}

/// JSON report for a finished suite.
pub fn report(checks: &[Check], n_max: usize, tol: f64) -> Value {
    json!({
        "n_max": n_max,
        "tol": format::real(tol),
        "all_pass": checks.iter().all(|c| c.outcome.pass),
        "checks": checks.iter().map(|c| json!({
            "check": c.name,
            "n": c.n,
            "pass": c.outcome.pass,
            "detail": c.outcome.detail,
        })).collect::<Vec<_>>(),
    })
}
