//! The collision-based sample learner.
//!
//! Each iteration draws a probe set `P` of `A` examples and then `9 sr` batches
//! `Q_i` of `B` examples each. Whenever a batch shares a label with the probe
//! set, one collision pair `(a, b)` is chosen uniformly among all `P x Q_i`
//! collisions and `a^{-1} b` is kept. After `ceil(ln(1/delta) / ln(6/5))`
//! iterations the span of everything kept is returned.
//!
//! Every kept element lies in the hidden subgroup, so the output is always a
//! subgroup of it; the learner fails only by returning a proper subgroup.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::error::{HspError, Result};
use crate::family::FamilyDescriptor;
use crate::group::{GroupElement, GroupSpec};
use crate::oracle::{Example, MeteredSampler};
use crate::rng::RngStream;
use crate::subgroup::Subgroup;

/// Number of `Q_i` batches per unit of subgroup rank.
pub const ROUNDS_PER_RANK: u64 = 9;

/// Sample budget of one learner run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerPlan {
    /// `A`, the size of the probe set `P`.
    pub probe_size: u64,
    /// `B`, the size of each batch `Q_i`.
    pub batch_size: u64,
    /// `9 sr`.
    pub rounds_per_iteration: u64,
    pub iterations: u64,
    pub delta: f64,
}

fn ceil_sqrt(v: &BigUint) -> BigUint {
    let r = v.sqrt();
    if &r * &r < *v {
        r + 1u32
    } else {
        r
    }
}

fn to_u64(v: BigUint, what: &str) -> Result<u64> {
    v.to_u64()
        .ok_or_else(|| HspError::capacity(format!("{what} = {v} does not fit in 64 bits")))
}

/// `ceil(ln(1/delta) / ln(6/5))`.
pub fn iteration_count(delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(HspError::domain(format!(
            "delta must lie in (0, 1/2), got {delta}"
        )));
    }
    Ok(((1.0 / delta).ln() / (6.0f64 / 5.0).ln()).ceil() as u64)
}

impl LearnerPlan {
    /// Plan for a family with `max |G|/|H| = max_index` and subgroup rank `sr`.
    ///
    /// If `max_index > sr`: `A = ceil(9 sqrt(max_index * sr))`,
    /// `B = ceil(sqrt(max_index / sr))`. Otherwise `A = 9 max_index`, `B = 1`.
    /// Both are computed exactly in integer arithmetic.
    pub fn new(max_index: &BigUint, sr: usize, delta: f64) -> Result<Self> {
        if max_index.is_zero() {
            return Err(HspError::domain("max index must be at least 1"));
        }
        if sr == 0 {
            return Err(HspError::domain("subgroup rank must be at least 1"));
        }
        let iterations = iteration_count(delta)?;
        let sr_big = BigUint::from(sr);
        let nine = BigUint::from(ROUNDS_PER_RANK);
        let (a, b) = if *max_index > sr_big {
            // 9 sqrt(m sr) = sqrt(81 m sr); ceil(sqrt(m / sr)) = ceil_sqrt(ceil(m / sr)).
            let a = ceil_sqrt(&(&nine * &nine * max_index * &sr_big));
            let b = ceil_sqrt(&num_integer::Integer::div_ceil(max_index, &sr_big));
            (a, b)
        } else {
            (&nine * max_index, BigUint::from(1u32))
        };
        Ok(LearnerPlan {
            probe_size: to_u64(a, "A")?,
            batch_size: to_u64(b, "B")?,
            rounds_per_iteration: ROUNDS_PER_RANK * sr as u64,
            iterations,
            delta,
        })
    }

    /// Plan for the given candidate family, with `sr` clamped to at least 1.
    pub fn for_family(family: &FamilyDescriptor, delta: f64) -> Result<Self> {
        Self::new(family.max_index(), family.planning_rank(), delta)
    }

    /// `A + 9 sr B`.
    pub fn samples_per_iteration(&self) -> u64 {
        self.probe_size + self.rounds_per_iteration * self.batch_size
    }

    /// `(A + 9 sr B) * iterations`.
    pub fn total_samples(&self) -> u64 {
        self.samples_per_iteration() * self.iterations
    }
}

/// Two examples with equal labels, `a` from the probe set and `b` from a batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionPair {
    pub a: GroupElement,
    pub b: GroupElement,
}

impl CollisionPair {
    /// `a^{-1} b`, which lies in the hidden subgroup.
    pub fn quotient(&self, group: &GroupSpec) -> Result<GroupElement> {
        group.quotient(&self.a, &self.b)
    }
}

/// Label-keyed index over a probe set.
pub struct CollisionIndex<'a> {
    probes: &'a [Example],
    by_label: HashMap<u64, Vec<u32>>,
}

impl<'a> CollisionIndex<'a> {
    pub fn new(probes: &'a [Example]) -> Self {
        let mut by_label: HashMap<u64, Vec<u32>> = HashMap::with_capacity(probes.len());
        for (i, ex) in probes.iter().enumerate() {
            by_label.entry(ex.label).or_default().push(i as u32);
        }
        CollisionIndex { probes, by_label }
    }

    fn bucket(&self, label: u64) -> &[u32] {
        self.by_label.get(&label).map_or(&[], Vec::as_slice)
    }

    /// Number of collision pairs between the probe set and `batch`.
    pub fn count(&self, batch: &[Example]) -> usize {
        batch.iter().map(|q| self.bucket(q.label).len()).sum()
    }

    pub fn collides(&self, batch: &[Example]) -> bool {
        batch.iter().any(|q| self.by_label.contains_key(&q.label))
    }

    /// All collision pairs, ordered by batch position then probe position.
    pub fn pairs(&self, batch: &[Example]) -> Vec<CollisionPair> {
        batch
            .iter()
            .flat_map(|q| {
                self.bucket(q.label).iter().map(move |&i| CollisionPair {
                    a: self.probes[i as usize].point.clone(),
                    b: q.point.clone(),
                })
            })
            .collect()
    }

    /// A collision pair chosen uniformly among all pairs, if any exist.
    pub fn choose(&self, batch: &[Example], rng: &mut RngStream) -> Option<CollisionPair> {
        let total = self.count(batch);
        if total == 0 {
            return None;
        }
        let mut pick = rng.random_range(0..total);
        for q in batch {
            let bucket = self.bucket(q.label);
            if pick < bucket.len() {
                return Some(CollisionPair {
                    a: self.probes[bucket[pick] as usize].point.clone(),
                    b: q.point.clone(),
                });
            }
            pick -= bucket.len();
        }
        unreachable!("pick < total")
    }
}

/// Every pair `(a, b)` with `a` in `probes`, `b` in `batch` and equal labels.
pub fn find_collisions(probes: &[Example], batch: &[Example]) -> Vec<CollisionPair> {
    CollisionIndex::new(probes).pairs(batch)
}

/// One iteration: returns the elements `a_i^{-1} b_i` found, at most `9 sr` of them.
/// Draws exactly `A + 9 sr B` examples.
pub fn run_iteration(
    sampler: &mut MeteredSampler<'_>,
    plan: &LearnerPlan,
    rng: &mut RngStream,
) -> Vec<GroupElement> {
    let group = sampler.group();
    let probes = sampler.draw_many(plan.probe_size as usize);
    let index = CollisionIndex::new(&probes);
    let mut found = Vec::new();
    for _ in 0..plan.rounds_per_iteration {
        let batch = sampler.draw_many(plan.batch_size as usize);
        if let Some(pair) = index.choose(&batch, rng) {
            found.push(group.quotient_unchecked(&pair.a, &pair.b));
        }
    }
    found
}

/// Output of a learner run.
#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub subgroup: Subgroup,
    /// Every element collected across iterations.
    pub collected: Vec<GroupElement>,
    pub iterations_run: u64,
}

/// Runs the full plan and returns the span of everything collected.
pub fn learn(
    sampler: &mut MeteredSampler<'_>,
    plan: &LearnerPlan,
    rng: &mut RngStream,
) -> Result<Subgroup> {
    Ok(learn_detailed(sampler, plan, rng, None)?.subgroup)
}

/// Like [`learn`], but optionally stops after the first iteration at which
/// `|<W>|` reaches `stop_at_order`. Stopping early changes the sample count,
/// so acceptance runs never set it.
pub fn learn_detailed(
    sampler: &mut MeteredSampler<'_>,
    plan: &LearnerPlan,
    rng: &mut RngStream,
    stop_at_order: Option<&BigUint>,
) -> Result<LearnOutcome> {
    let group = sampler.group();
    let mut collected = Vec::new();
    let mut iterations_run = 0;
    for _ in 0..plan.iterations {
        collected.extend(run_iteration(sampler, plan, rng));
        iterations_run += 1;
        if let Some(target) = stop_at_order {
            if Subgroup::span(group, &collected)?.order() >= target {
                break;
            }
        }
    }
    Ok(LearnOutcome {
        subgroup: Subgroup::span(group, &collected)?,
        collected,
        iterations_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{random_instance, HspInstance, RahspParams};
    use crate::rng;

    fn ex(label: u64) -> Example {
        Example {
            point: GroupElement::Index(label as u32),
            label,
        }
    }

    #[test]
    fn plan_simon_four() {
        let plan = LearnerPlan::new(&BigUint::from(8u32), 1, 1.0 / 3.0).unwrap();
        assert_eq!(plan.probe_size, 26);
        assert_eq!(plan.batch_size, 3);
        assert_eq!(plan.iterations, 7);
        assert_eq!(plan.total_samples(), 371);
    }

    #[test]
    fn plan_rank_branch() {
        let plan = LearnerPlan::new(&BigUint::from(4u32), 4, 1.0 / 3.0).unwrap();
        assert_eq!((plan.probe_size, plan.batch_size), (36, 1));
        assert_eq!(plan.rounds_per_iteration, 36);
    }

    #[test]
    fn plan_domain() {
        let m = BigUint::from(8u32);
        assert!(LearnerPlan::new(&m, 1, 0.0).is_err());
        assert!(LearnerPlan::new(&m, 1, 0.5).is_err());
        assert!(LearnerPlan::new(&m, 1, f64::NAN).is_err());
        assert!(LearnerPlan::new(&m, 0, 0.1).is_err());
        assert!(LearnerPlan::new(&BigUint::ZERO, 1, 0.1).is_err());
    }

    #[test]
    fn plan_product_covers_index() {
        for m in 1u32..300 {
            for sr in 1..7 {
                let plan = LearnerPlan::new(&BigUint::from(m), sr, 0.25).unwrap();
                assert!(
                    plan.probe_size * plan.batch_size >= 9 * m as u64,
                    "m={m} sr={sr}"
                );
                assert!(plan.iterations >= 1);
            }
        }
    }

    #[test]
    fn collisions_examples() {
        let p = [ex(1), ex(2), ex(3)];
        assert_eq!(find_collisions(&p, &[ex(3), ex(4)]).len(), 1);
        assert!(find_collisions(&p, &[ex(7), ex(8)]).is_empty());
        let same: Vec<Example> = (0..5)
            .map(|i| Example {
                point: GroupElement::Index(i),
                label: 9,
            })
            .collect();
        assert_eq!(find_collisions(&same, &same).len(), 25);
    }

    #[test]
    fn choose_is_uniform_over_pairs() {
        let p: Vec<Example> = (0..3)
            .map(|i| Example {
                point: GroupElement::Index(i),
                label: 1,
            })
            .collect();
        let q = vec![
            Example {
                point: GroupElement::Index(10),
                label: 1,
            },
            ex(5),
        ];
        let index = CollisionIndex::new(&p);
        let mut r = rng::seeded(2);
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            let pair = index.choose(&q, &mut r).unwrap();
            let GroupElement::Index(i) = pair.a else {
                unreachable!()
            };
            counts[i as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / 30_000.0 - 1.0 / 3.0).abs() < 0.02);
        }
    }

    fn whole_group_instance() -> HspInstance {
        let g = GroupSpec::elementary(2, 3).unwrap();
        let h = Subgroup::whole(&g);
        let fam = FamilyDescriptor::explicit(&g, vec![h.clone()]).unwrap();
        HspInstance::new(g, h, fam, 7).unwrap()
    }

    #[test]
    fn whole_group_every_batch_collides() {
        let inst = whole_group_instance();
        let plan = LearnerPlan::for_family(inst.family(), 1.0 / 3.0).unwrap();
        let mut s = inst.sampler(rng::seeded(1));
        let out = run_iteration(&mut s, &plan, &mut rng::seeded(2));
        assert_eq!(out.len() as u64, plan.rounds_per_iteration);
        assert_eq!(s.drawn(), plan.samples_per_iteration());
    }

    #[test]
    fn trivial_hidden_emits_identity() {
        let g = GroupSpec::elementary(2, 4).unwrap();
        let t = Subgroup::trivial(&g);
        let fam = FamilyDescriptor::explicit(&g, vec![t.clone()]).unwrap();
        let inst = HspInstance::new(g.clone(), t.clone(), fam, 3).unwrap();
        let plan = LearnerPlan::new(&BigUint::from(16u32), 1, 1.0 / 3.0).unwrap();
        let mut s = inst.sampler(rng::seeded(9));
        let out = run_iteration(&mut s, &plan, &mut rng::seeded(10));
        assert!(!out.is_empty());
        assert!(out.iter().all(|w| *w == g.identity()));
        assert_eq!(learn(&mut s, &plan, &mut rng::seeded(11)).unwrap(), t);
    }

    #[test]
    fn learn_meters_and_stays_inside_hidden() {
        let params = RahspParams::gsp(2, 5, 2).unwrap();
        for trial in 0..20 {
            let inst = random_instance(&params, &mut rng::stream(1, "inst", trial)).unwrap();
            let plan = LearnerPlan::for_family(inst.family(), 0.2).unwrap();
            let mut s = inst.sampler(rng::stream(1, "sample", trial));
            let h = learn(&mut s, &plan, &mut rng::stream(1, "learn", trial)).unwrap();
            assert!(h.is_subgroup_of(inst.hidden()));
            assert_eq!(s.drawn(), plan.total_samples());
        }
    }

    #[test]
    fn early_stop_is_opt_in() {
        let params = RahspParams::gsp(2, 4, 1).unwrap();
        let inst = random_instance(&params, &mut rng::seeded(1)).unwrap();
        let plan = LearnerPlan::for_family(inst.family(), 1.0 / 3.0).unwrap();
        let mut s = inst.sampler(rng::seeded(2));
        let target = inst.hidden().order().clone();
        let out = learn_detailed(&mut s, &plan, &mut rng::seeded(3), Some(&target)).unwrap();
        assert_eq!(&out.subgroup, inst.hidden());
        assert!(out.iterations_run < plan.iterations);
        assert_eq!(s.drawn(), plan.samples_per_iteration() * out.iterations_run);
    }
}
