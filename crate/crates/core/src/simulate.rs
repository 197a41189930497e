//! Continuous-time Monte Carlo for both coalescents and estimators built on
//! it.
//!
//! The Bolthausen-Sznitman chain is run through random recursive trees: each
//! edge carries a rate-1 exponential clock and a ringing clock cuts its edge.
//! Replicate `i` of an estimator with seed `s` draws from the ChaCha8 stream
//! `i` of the generator seeded by `s`, so results do not depend on how
//! replicates are scheduled.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{domain, Result};
use crate::generator::Model;
use crate::partition::SetPartition;
use crate::rrt::{sample_rrt, IncreasingTree};

/// When to stop a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    /// Stop at this time; the last state is the state at the horizon.
    Time(f64),
    /// Run until a single block remains.
    Absorption,
}

impl Horizon {
    fn check(self) -> Result<()> {
        match self {
            Horizon::Time(t) if t.is_nan() || t < 0.0 => Err(domain("time horizon must be a nonnegative number")),
            _ => Ok(()),
        }
    }

    fn reached(self, time: f64) -> bool {
        matches!(self, Horizon::Time(h) if time > h)
    }
}

/// A path of the coalescent: `states[0]` is the all-singletons partition and
/// `states[k]` is entered at `times[k - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SetPartition>,
}

impl Trajectory {
    /// Jump times, increasing.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Visited states, strictly coarsening.
    pub fn states(&self) -> &[SetPartition] {
        &self.states
    }

    /// Number of jumps.
    pub fn jumps(&self) -> usize {
        self.times.len()
    }

    /// The last recorded state.
    pub fn last(&self) -> &SetPartition {
        self.states.last().expect("a trajectory has an initial state")
    }

    /// The state occupied at time `t`.
    pub fn state_at(&self, t: f64) -> &SetPartition {
        let k = self.times.partition_point(|&s| s <= t);
        &self.states[k]
    }

    /// True if the path ever enters `rho`.
    pub fn visits(&self, rho: &SetPartition) -> bool {
        self.states.contains(rho)
    }

    fn push(&mut self, time: f64, state: SetPartition) {
        self.times.push(time);
        self.states.push(state);
    }
}

/// Bolthausen-Sznitman path from `n` singletons via cuts of a uniform
/// random recursive tree.
pub fn simulate_bs<R: Rng + ?Sized>(n: usize, horizon: Horizon, rng: &mut R) -> Result<Trajectory> {
    horizon.check()?;
    let start = singletons(n)?;
    let mut tree: IncreasingTree = sample_rrt(&start, rng);
    let mut path = Trajectory { times: Vec::new(), states: alloc::vec![start] };
    let mut time = 0.0;
    while tree.num_nodes() > 1 {
        let wait: f64 = rng.sample(Exp1);
        time += wait / (tree.num_nodes() - 1) as f64;
        if horizon.reached(time) {
            break;
        }
        tree = tree.cut_random(rng)?;
        path.push(time, tree.labels().clone());
    }
    Ok(path)
}

/// Kingman path from `n` singletons: with `b` blocks, wait an exponential
/// time of rate `b(b-1)/2` and merge a uniform pair.
pub fn simulate_kingman<R: Rng + ?Sized>(n: usize, horizon: Horizon, rng: &mut R) -> Result<Trajectory> {
    horizon.check()?;
    let start = singletons(n)?;
    let mut path = Trajectory { times: Vec::new(), states: alloc::vec![start] };
    let mut time = 0.0;
    loop {
        let state = path.last();
        let b = state.num_blocks();
        if b == 1 {
            break;
        }
        let wait: f64 = rng.sample(Exp1);
        time += wait / (b * (b - 1) / 2) as f64;
        if horizon.reached(time) {
            break;
        }
        let i = rng.random_range(0..b);
        let mut j = rng.random_range(0..b - 1);
        if j >= i {
            j += 1;
        }
        let mut blocks = state.blocks().to_vec();
        let merged = blocks[i].union(blocks[j]);
        blocks[i.min(j)] = merged;
        blocks.remove(i.max(j));
        let next = SetPartition::from_blocks(blocks)?;
        path.push(time, next);
    }
    Ok(path)
}

/// Dispatches on the model.
pub fn simulate<R: Rng + ?Sized>(model: Model, n: usize, horizon: Horizon, rng: &mut R) -> Result<Trajectory> {
    match model {
        Model::BolthausenSznitman => simulate_bs(n, horizon, rng),
        Model::Kingman => simulate_kingman(n, horizon, rng),
    }
}

fn singletons(n: usize) -> Result<SetPartition> {
    if n == 0 || n > crate::partition::MAX_ELEMENT {
        return Err(domain("n must lie in 1..=64"));
    }
    Ok(SetPartition::singletons(n))
}

/// Generator for replicate `i` under `seed`.
pub fn replicate_rng(seed: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    rng
}

/// The state at time `t` of replicate `i`.
pub fn transition_replicate(model: Model, n: usize, t: f64, seed: u64, i: u64) -> Result<SetPartition> {
    let path = simulate(model, n, Horizon::Time(t), &mut replicate_rng(seed, i))?;
    Ok(path.last().clone())
}

/// Whether replicate `i`, run to absorption, visits `rho`.
pub fn hitting_replicate(model: Model, rho: &SetPartition, seed: u64, i: u64) -> Result<bool> {
    let path = simulate(model, rho.ground_len(), Horizon::Absorption, &mut replicate_rng(seed, i))?;
    Ok(path.visits(rho))
}

/// Whether a fresh random recursive tree on `pi` from replicate `i`
/// contains `rho`.
pub fn containment_replicate(pi: &SetPartition, rho: &SetPartition, seed: u64, i: u64) -> Result<bool> {
    sample_rrt(pi, &mut replicate_rng(seed, i)).contains(rho)
}

/// Proportion estimate with its binomial standard error
/// `sqrt(p(1-p)/reps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    /// Successes.
    pub count: u64,
    /// Trials.
    pub reps: u64,
}

impl Proportion {
    /// `count / reps`.
    pub fn estimate(&self) -> f64 {
        self.count as f64 / self.reps as f64
    }

    /// `sqrt(p(1-p)/reps)` at the estimate.
    pub fn std_error(&self) -> f64 {
        let p = self.estimate();
        Float::sqrt(p * (1.0 - p) / self.reps as f64)
    }

    /// `(estimate - exact) / std_error`; infinite when the estimate is
    /// degenerate but disagrees with `exact`, zero when both agree.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = self.estimate() - exact;
        let se = self.std_error();
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }
}

/// Empirical law of a partition-valued sample.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmpiricalLaw {
    reps: u64,
    counts: BTreeMap<SetPartition, u64>,
}

impl EmpiricalLaw {
    /// Records one draw.
    pub fn add(&mut self, state: SetPartition) {
        self.reps += 1;
        *self.counts.entry(state).or_default() += 1;
    }

    /// Pools two independent samples.
    pub fn merge(mut self, other: EmpiricalLaw) -> EmpiricalLaw {
        self.reps += other.reps;
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self
    }

    /// Number of draws.
    pub fn reps(&self) -> u64 {
        self.reps
    }

    /// Exact counts; they sum to [`Self::reps`].
    pub fn counts(&self) -> &BTreeMap<SetPartition, u64> {
        &self.counts
    }

    /// Estimate for one state, zero count if never observed.
    pub fn proportion(&self, state: &SetPartition) -> Proportion {
        Proportion { count: self.counts.get(state).copied().unwrap_or(0), reps: self.reps }
    }
}

impl FromIterator<SetPartition> for EmpiricalLaw {
    fn from_iter<I: IntoIterator<Item = SetPartition>>(iter: I) -> Self {
        let mut law = EmpiricalLaw::default();
        for s in iter {
            law.add(s);
        }
        law
    }
}

fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 {
        Err(domain("at least one replicate is needed"))
    } else {
        Ok(())
    }
}

/// Empirical law of the state at time `t` from `reps` replicates.
pub fn estimate_transition(model: Model, n: usize, t: f64, reps: u64, seed: u64) -> Result<EmpiricalLaw> {
    check_reps(reps)?;
    (0..reps).map(|i| transition_replicate(model, n, t, seed, i)).collect()
}

/// Frequency with which a random recursive tree on `pi` contains `rho`.
pub fn estimate_containment(pi: &SetPartition, rho: &SetPartition, reps: u64, seed: u64) -> Result<Proportion> {
    check_reps(reps)?;
    let mut count = 0;
    for i in 0..reps {
        count += u64::from(containment_replicate(pi, rho, seed, i)?);
    }
    Ok(Proportion { count, reps })
}

/// Frequency with which paths started from singletons visit `rho`.
pub fn estimate_hitting(model: Model, rho: &SetPartition, reps: u64, seed: u64) -> Result<Proportion> {
    check_reps(reps)?;
    let mut count = 0;
    for i in 0..reps {
        count += u64::from(hitting_replicate(model, rho, seed, i)?);
    }
    Ok(Proportion { count, reps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{bs_hitting, bs_transition, transition_via_triple};
    use crate::partition::PartitionLattice;
    use crate::spectral::kingman_block_triple;
    use num_traits::ToPrimitive;

    fn p(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    fn within(prop: Proportion, exact: f64, bands: f64) -> bool {
        let sigma = (exact * (1.0 - exact) / prop.reps as f64).sqrt();
        (prop.estimate() - exact).abs() <= bands * sigma.max(prop.std_error())
    }

    #[test]
    fn trivial_paths() {
        let mut rng = replicate_rng(1, 0);
        for model in [Model::BolthausenSznitman, Model::Kingman] {
            let one = simulate(model, 1, Horizon::Absorption, &mut rng).unwrap();
            assert_eq!(one.jumps(), 0);
            assert_eq!(one.last(), &SetPartition::singletons(1));
            let two = simulate(model, 2, Horizon::Absorption, &mut rng).unwrap();
            assert_eq!(two.jumps(), 1);
            assert_eq!(two.last(), &SetPartition::single_block(2));
            let still = simulate(model, 5, Horizon::Time(0.0), &mut rng).unwrap();
            assert_eq!(still.jumps(), 0);
            assert!(simulate(model, 0, Horizon::Absorption, &mut rng).is_err());
            assert!(simulate(model, 3, Horizon::Time(-1.0), &mut rng).is_err());
            assert!(simulate(model, 3, Horizon::Time(f64::NAN), &mut rng).is_err());
        }
    }

    #[test]
    fn paths_coarsen_strictly() {
        for i in 0..200 {
            let bs = simulate_bs(7, Horizon::Absorption, &mut replicate_rng(3, i)).unwrap();
            let k = simulate_kingman(7, Horizon::Absorption, &mut replicate_rng(3, i)).unwrap();
            for path in [&bs, &k] {
                assert_eq!(path.last(), &SetPartition::single_block(7));
                assert!(path.times().windows(2).all(|w| w[0] < w[1]));
                for w in path.states().windows(2) {
                    assert!(w[0].is_refinement(&w[1]).unwrap() && w[0] != w[1]);
                }
            }
            let sizes: Vec<usize> = k.states().iter().map(SetPartition::num_blocks).collect();
            assert_eq!(sizes, [7, 6, 5, 4, 3, 2, 1]);
            assert!(bs.states().windows(2).all(|w| w[0].num_blocks() > w[1].num_blocks()));
        }
    }

    #[test]
    fn state_lookup() {
        let path = simulate_kingman(3, Horizon::Absorption, &mut replicate_rng(0, 0)).unwrap();
        let t = path.times().to_vec();
        assert_eq!(path.state_at(0.0), &SetPartition::singletons(3));
        assert_eq!(path.state_at(t[0]), &path.states()[1]);
        assert_eq!(path.state_at((t[0] + t[1]) / 2.0), &path.states()[1]);
        assert_eq!(path.state_at(t[1] + 1.0), &SetPartition::single_block(3));
    }

    #[test]
    fn reproducible_streams() {
        let a = simulate_bs(6, Horizon::Time(0.7), &mut replicate_rng(11, 4)).unwrap();
        let b = simulate_bs(6, Horizon::Time(0.7), &mut replicate_rng(11, 4)).unwrap();
        assert_eq!(a, b);
        let c = simulate_bs(6, Horizon::Absorption, &mut replicate_rng(11, 5)).unwrap();
        assert_ne!(a.times().first(), c.times().first());
        let x = estimate_transition(Model::Kingman, 4, 0.3, 500, 9).unwrap();
        let y = estimate_transition(Model::Kingman, 4, 0.3, 500, 9).unwrap();
        assert_eq!(x, y);
        let split = (0..250).chain(250..500).map(|i| transition_replicate(Model::Kingman, 4, 0.3, 9, i).unwrap());
        assert_eq!(split.collect::<EmpiricalLaw>(), x);
    }

    #[test]
    fn transition_extremes() {
        let law = estimate_transition(Model::BolthausenSznitman, 4, 0.0, 100, 0).unwrap();
        assert_eq!(law.proportion(&SetPartition::singletons(4)).count, 100);
        let late = estimate_transition(Model::BolthausenSznitman, 4, 50.0, 1000, 0).unwrap();
        assert!(late.proportion(&SetPartition::single_block(4)).estimate() >= 0.99);
        assert_eq!(late.counts().values().sum::<u64>(), late.reps());
        assert!(estimate_transition(Model::Kingman, 4, 1.0, 0, 0).is_err());
    }

    #[test]
    fn bs_law_at_time_one() {
        let reps = 100_000;
        let law = estimate_transition(Model::BolthausenSznitman, 4, 1.0, reps, 2024).unwrap();
        let d4 = SetPartition::singletons(4);
        for rho in PartitionLattice::enumerate(4).unwrap().elements() {
            let exact = bs_transition(&d4, rho, 1.0).unwrap();
            let prop = law.proportion(rho);
            assert!(within(prop, exact, 3.0), "{rho}: {} vs {exact}", prop.estimate());
        }
    }

    #[test]
    fn bs_first_holding_time() {
        let n = 5;
        let reps = 40_000u64;
        let holds: Vec<f64> = (0..reps)
            .map(|i| simulate_bs(n, Horizon::Absorption, &mut replicate_rng(5, i)).unwrap().times()[0])
            .collect();
        let mean = holds.iter().sum::<f64>() / reps as f64;
        // Exp(n-1): mean and standard deviation both 1/(n-1)
        let target = 1.0 / (n - 1) as f64;
        assert!((mean - target).abs() <= 3.0 * target / (reps as f64).sqrt(), "{mean}");
    }

    #[test]
    fn bs_hitting_frequencies() {
        let reps = 100_000;
        let d4 = SetPartition::singletons(4);
        for rho in ["1,2|3|4", "1,2|3,4", "1,3,4|2", "1|2,3,4"] {
            let rho = p(rho);
            let exact = bs_hitting(&d4, &rho).unwrap().to_f64().unwrap();
            let prop = estimate_hitting(Model::BolthausenSznitman, &rho, reps, 77).unwrap();
            assert!(within(prop, exact, 3.0), "{rho}: {} vs {exact}", prop.estimate());
        }
    }

    #[test]
    fn kingman_block_count_marginal() {
        let reps = 100_000;
        let law = estimate_transition(Model::Kingman, 4, 0.5, reps, 31).unwrap();
        let exact = transition_via_triple(&kingman_block_triple(4), 0.5);
        for j in 1..=4usize {
            let count = law.counts().iter().filter(|(s, _)| s.num_blocks() == j).map(|(_, c)| c).sum();
            let prop = Proportion { count, reps };
            assert!(within(prop, exact[(3, j - 1)], 3.0), "{j}: {} vs {}", prop.estimate(), exact[(3, j - 1)]);
        }
    }

    #[test]
    fn kingman_chains_are_uniform() {
        let reps = 100_000u64;
        let mut counts: BTreeMap<Vec<SetPartition>, u64> = BTreeMap::new();
        for i in 0..reps {
            let path = simulate_kingman(4, Horizon::Absorption, &mut replicate_rng(8, i)).unwrap();
            *counts.entry(path.states().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 18);
        for (chain, &count) in &counts {
            assert!(within(Proportion { count, reps }, 1.0 / 18.0, 3.0), "{chain:?}: {count}");
        }
    }

    #[test]
    fn containment_frequencies() {
        let d4 = SetPartition::singletons(4);
        assert_eq!(estimate_containment(&d4, &d4, 1000, 1).unwrap().count, 1000);
        assert_eq!(estimate_containment(&p("1,2|3|4"), &p("1,3|2,4"), 1000, 1).unwrap().count, 0);
        let prop = estimate_containment(&d4, &p("1,2,3|4"), 100_000, 1).unwrap();
        assert!(within(prop, 1.0 / 3.0, 3.0), "{}", prop.estimate());
    }

    #[test]
    fn proportion_scores() {
        let prop = Proportion { count: 0, reps: 10 };
        assert_eq!(prop.z_score(0.0), 0.0);
        assert_eq!(prop.z_score(0.5), f64::NEG_INFINITY);
        let prop = Proportion { count: 5, reps: 10 };
        assert!((prop.std_error() - 0.5 / 10f64.sqrt()).abs() < 1e-15);
    }
}
