//! Exhaustive ground truth for small instances.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};

use crate::error::{HspError, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::oracle::{Example, HspInstance};
use crate::rng::RngStream;
use crate::subgroup::Subgroup;

/// Largest group [`min_samples_exhaustive`] accepts.
pub const EXHAUSTIVE_GROUP_LIMIT: usize = 256;

/// The partition that label equality induces on a list of observed points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionPattern {
    pub points: Vec<GroupElement>,
    /// Dense class index per point, numbered in order of first appearance.
    pub classes: Vec<usize>,
}

impl CollisionPattern {
    pub fn from_examples(examples: &[Example]) -> Self {
        let mut ids: HashMap<u64, usize> = HashMap::new();
        let classes = examples
            .iter()
            .map(|e| {
                let next = ids.len();
                *ids.entry(e.label).or_insert(next)
            })
            .collect();
        CollisionPattern {
            points: examples.iter().map(|e| e.point.clone()).collect(),
            classes,
        }
    }

    pub fn class_count(&self) -> usize {
        self.classes.iter().copied().max().map_or(0, |m| m + 1)
    }
}

/// Candidates `H` for which every observed pair satisfies
/// `f(x_i) = f(x_j) <=> x_i^{-1} x_j in H`.
///
/// Repeated points are merged first; a point observed with two different
/// labels rules out every candidate.
pub fn consistent_subgroups(
    group: &GroupSpec,
    examples: &[Example],
    candidates: &[Subgroup],
) -> Result<Vec<Subgroup>> {
    let mut seen: HashMap<&GroupElement, u64> = HashMap::new();
    let mut distinct: Vec<&Example> = Vec::new();
    for e in examples {
        group.check(&e.point)?;
        match seen.get(&e.point) {
            Some(&l) if l != e.label => return Ok(Vec::new()),
            Some(_) => {}
            None => {
                seen.insert(&e.point, e.label);
                distinct.push(e);
            }
        }
    }
    let mut quotients = Vec::with_capacity(distinct.len() * distinct.len().saturating_sub(1) / 2);
    for (i, a) in distinct.iter().enumerate() {
        for b in &distinct[i + 1..] {
            quotients.push((
                a.label == b.label,
                group.quotient_unchecked(&a.point, &b.point),
            ));
        }
    }
    Ok(candidates
        .iter()
        .filter(|h| h.group() == group)
        .filter(|h| {
            quotients
                .iter()
                .all(|(same, q)| *same == h.contains_unchecked(q))
        })
        .cloned()
        .collect())
}

/// Smallest `T` such that a learner which draws `T` uniform examples and
/// outputs a uniformly random consistent candidate succeeds with frequency at
/// least `target_success` over `trials` runs.
///
/// Each trial is scored by its exact conditional success probability
/// `1/|C|` (or 0 when the hidden subgroup is not in the consistent set `C`)
/// instead of a sampled pick. Trial `t` reuses the same example stream for
/// every `T`, so the estimate is nondecreasing in `T`.
pub fn min_samples_exhaustive(
    instance: &HspInstance,
    rng: &mut RngStream,
    target_success: f64,
    trials: usize,
    max_samples: usize,
) -> Result<usize> {
    if !(0.0..=1.0).contains(&target_success) {
        return Err(HspError::domain(format!(
            "target success {target_success} outside [0, 1]"
        )));
    }
    if trials == 0 {
        return Err(HspError::domain("at least one trial is required"));
    }
    let group = instance.group();
    match group.small_order() {
        Some(n) if n <= EXHAUSTIVE_GROUP_LIMIT => {}
        _ => {
            return Err(HspError::capacity(format!(
                "exhaustive probe needs |G| <= {EXHAUSTIVE_GROUP_LIMIT}"
            )))
        }
    }
    let candidates = instance.family().members()?;
    let base: u64 = rng.random();
    let streams: Vec<Vec<Example>> = (0..trials)
        .map(|t| {
            let mut s = instance.sampler(RngStream::seed_from_u64(crate::rng::derive_seed(
                base, "probe", t as u64,
            )));
            s.draw_many(max_samples)
        })
        .collect();
    for t_samples in 1..=max_samples {
        let mut score = 0.0;
        for examples in &streams {
            let consistent = consistent_subgroups(group, &examples[..t_samples], &candidates)?;
            if consistent.contains(instance.hidden()) {
                score += 1.0 / consistent.len() as f64;
            }
        }
        if score / trials as f64 >= target_success - 1e-12 {
            return Ok(t_samples);
        }
    }
    Err(HspError::capacity(format!(
        "target success {target_success} not reached within {max_samples} samples"
    )))
}
