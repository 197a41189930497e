//! Rayon versions of the Monte Carlo estimators. Replicate `i` always uses
//! stream `i`, and pooling only adds counts, so the results equal the
//! sequential ones exactly.

use coalspec_core::simulate::{
    containment_replicate, hitting_replicate, transition_replicate, EmpiricalLaw, Proportion,
};
use coalspec_core::{Model, Result, SetPartition};
use rayon::prelude::*;

fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 {
        return Err(coalspec_core::Error::Domain("at least one replicate is needed".into()));
    }
    Ok(())
}

/// Parallel [`coalspec_core::simulate::estimate_transition`].
pub fn estimate_transition(model: Model, n: usize, t: f64, reps: u64, seed: u64) -> Result<EmpiricalLaw> {
    check_reps(reps)?;
    (0..reps)
        .into_par_iter()
        .map(|i| transition_replicate(model, n, t, seed, i))
        .try_fold(EmpiricalLaw::default, |mut law, state| {
            law.add(state?);
            Ok(law)
        })
        .try_reduce(EmpiricalLaw::default, |a, b| Ok(a.merge(b)))
}

fn proportion<F>(reps: u64, hit: F) -> Result<Proportion>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    check_reps(reps)?;
    let count = (0..reps)
        .into_par_iter()
        .map(|i| hit(i).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Proportion { count, reps })
}

/// Parallel [`coalspec_core::simulate::estimate_containment`].
pub fn estimate_containment(pi: &SetPartition, rho: &SetPartition, reps: u64, seed: u64) -> Result<Proportion> {
    proportion(reps, |i| containment_replicate(pi, rho, seed, i))
}

/// Parallel [`coalspec_core::simulate::estimate_hitting`].
pub fn estimate_hitting(model: Model, rho: &SetPartition, reps: u64, seed: u64) -> Result<Proportion> {
    proportion(reps, |i| hitting_replicate(model, rho, seed, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use coalspec_core::simulate;

    #[test]
    fn parallel_equals_sequential() {
        for model in [Model::BolthausenSznitman, Model::Kingman] {
            let par = estimate_transition(model, 5, 0.8, 3000, 17).unwrap();
            let seq = simulate::estimate_transition(model, 5, 0.8, 3000, 17).unwrap();
            assert_eq!(par, seq);
            let rho: SetPartition = "1,2|3|4,5".parse().unwrap();
            assert_eq!(
                estimate_hitting(model, &rho, 2000, 3).unwrap(),
                simulate::estimate_hitting(model, &rho, 2000, 3).unwrap()
            );
        }
        let pi = SetPartition::singletons(5);
        let rho: SetPartition = "1,2,3|4,5".parse().unwrap();
        assert_eq!(
            estimate_containment(&pi, &rho, 2000, 5).unwrap(),
            simulate::estimate_containment(&pi, &rho, 2000, 5).unwrap()
        );
        assert!(estimate_transition(Model::Kingman, 3, 1.0, 0, 0).is_err());
    }
}
