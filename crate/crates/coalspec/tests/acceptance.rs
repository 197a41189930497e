//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use coalspec::verify::{self, Outcome};
use coalspec_core::combinatorics::rat;
use coalspec_core::rrt::enumerate_increasing_trees;
use coalspec_core::{Model, Result, SetPartition};

const MC_SEED: u64 = 2024;
const MC_REPS: u64 = 100_000;
const MC_BANDS: f64 = 3.0;
const TRANSITION_TOL: f64 = 1e-10;

type Criterion = fn() -> Result<Outcome>;

fn over<F>(sizes: std::ops::RangeInclusive<usize>, f: F) -> Result<Outcome>
where
    F: Fn(usize) -> Result<Outcome>,
{
    let mut parts = Vec::new();
    for n in sizes {
        let o = f(n)?;
        parts.push(Outcome { pass: o.pass, detail: format!("n={n}: {}", o.detail) });
    }
    let pass = parts.iter().all(|p| p.pass);
    let failing: Vec<String> = parts.iter().filter(|p| !p.pass).map(|p| p.detail.clone()).collect();
    let detail = if pass { format!("{} sizes ok", parts.len()) } else { failing.join("; ") };
    Ok(Outcome { pass, detail })
}

fn within(outcome: Result<Outcome>, limit: Duration, started: Instant) -> Result<Outcome> {
    let mut o = outcome?;
    let elapsed = started.elapsed();
    if elapsed > limit {
        o.pass = false;
    }
    o.detail = format!("{}; {:.2}s (limit {}s)", o.detail, elapsed.as_secs_f64(), limit.as_secs());
    Ok(o)
}

fn criterion_1() -> Result<Outcome> {
    let t = Instant::now();
    within(over(2..=6, |n| verify::factorization(Model::BolthausenSznitman, n)), Duration::from_secs(60), t)
}

fn criterion_2() -> Result<Outcome> {
    let t = Instant::now();
    within(over(2..=6, |n| verify::factorization(Model::Kingman, n)), Duration::from_secs(60), t)
}

fn criterion_3() -> Result<Outcome> {
    Ok(Outcome::all(vec![
        over(2..=5, |n| {
            verify::transitions_vs_matexp(Model::BolthausenSznitman, n, &[0.1, 1.0, 5.0], TRANSITION_TOL)
        })?,
        over(2..=5, |n| verify::transition_identity_exact(n, &[rat(1, 1), rat(1, 2), rat(-2, 1)]))?,
    ]))
}

fn criterion_4() -> Result<Outcome> {
    over(2..=5, verify::green_vs_fundamental)
}

fn criterion_5() -> Result<Outcome> {
    let t = Instant::now();
    let both = over(2..=50, |n| {
        Ok(Outcome::all(vec![
            verify::block_factorization(Model::BolthausenSznitman, n)?,
            verify::block_factorization(Model::Kingman, n)?,
        ]))
    });
    within(both, Duration::from_secs(5), t)
}

fn criterion_6() -> Result<Outcome> {
    let d4 = SetPartition::singletons(4);
    let m = d4.count_maximal_chains(&SetPartition::single_block(4))?;
    Ok(Outcome::all(vec![
        over(1..=5, verify::maximal_chains)?,
        Outcome { pass: m == 18u32.into(), detail: format!("m(bottom4, top4) = {m}") },
    ]))
}

fn criterion_7() -> Result<Outcome> {
    over(1..=5, verify::kingman_hitting_three_ways)
}

fn criterion_8() -> Result<Outcome> {
    let rho: SetPartition = "1,2,3|4".parse()?;
    let trees = enumerate_increasing_trees(&SetPartition::singletons(4))?;
    let mut hits = 0;
    for t in &trees {
        hits += usize::from(t.contains(&rho)?);
    }
    Ok(Outcome::all(vec![
        over(1..=5, verify::rrt_containment)?,
        Outcome {
            pass: hits == 2 && trees.len() == 6,
            detail: format!("{hits} of {} trees contain {rho}", trees.len()),
        },
    ]))
}

fn criterion_9() -> Result<Outcome> {
    let t = Instant::now();
    within(verify::monte_carlo_bs(4, 1.0, MC_REPS, MC_SEED, MC_BANDS, 0), Duration::from_secs(30), t)
}

fn criterion_10() -> Result<Outcome> {
    over(1..=6, |n| {
        Ok(Outcome::all(vec![
            verify::characteristic_polynomial(Model::BolthausenSznitman, n)?,
            verify::characteristic_polynomial(Model::Kingman, n)?,
        ]))
    })
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("BS generator factors as RDL with LR = I, n = 2..6", criterion_1),
        ("Kingman generator factors as RDL with LR = I, n = 2..6", criterion_2),
        ("transition probabilities vs matrix exponential (tol 1e-10) and exact identity at x in {1, 1/2, -2}", criterion_3),
        ("Green's matrix vs exact fundamental matrix, inf column, block sums, n = 2..5", criterion_4),
        ("block-counting decompositions exact for n = 2..50 within 5s", criterion_5),
        ("maximal chain counts vs enumeration, n <= 5; m = 18 at n = 4", criterion_6),
        ("Kingman hitting: Lah form = chain ratio = jump-chain recursion, n <= 5", criterion_7),
        ("random recursive tree containment counts, n <= 5; 2 of 6 trees", criterion_8),
        ("BS tree-cutting simulator: 15 states within 3 sigma at 1e5 reps, within 30s", criterion_9),
        ("eigenvalue multisets {-lambda_i ^ S(n,i)}, n <= 6, both models", criterion_10),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!("[{}] {:>2}. {name} -- {detail}", if pass { "PASS" } else { "FAIL" }, k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
