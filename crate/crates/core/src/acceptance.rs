//! Acceptance checks, runnable from the test suite and from `hsp selftest`.
//!
//! Each check returns a [`CriterionReport`] with a pass flag and a one-line
//! summary of what was measured. Thresholds are fixed here, not configurable.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::bounds;
use crate::bruteforce::consistent_subgroups;
use crate::error::Result;
use crate::experiment::{self, fit_slope};
use crate::family::FamilyDescriptor;
use crate::group::{Component, GroupElement, GroupSpec};
use crate::learner::{self, CollisionIndex, LearnerPlan};
use crate::oracle::{random_instance, HspInstance, RahspParams};
use crate::rng;
use crate::subgroup::{self, uniform_random_subgroup, Subgroup};
use crate::text::parse_group;

/// Dihedral group of order 8 as a Cayley table.
pub const D4_TABLE: &str = include_str!("../data/d4.group");
/// Quaternion group of order 8 as a Cayley table.
pub const Q8_TABLE: &str = include_str!("../data/q8.group");

/// Default master seed of the acceptance runs.
pub const ACCEPTANCE_SEED: u64 = 20_240_601;

pub const DELTA: f64 = 1.0 / 3.0;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] C{:<2} {:<28} {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "success guarantee"),
    (2, "one-sided error"),
    (3, "sample accounting"),
    (4, "scaling"),
    (5, "subgroup counting"),
    (6, "oracle promise"),
    (7, "collision probability"),
    (8, "per-probe collision bound"),
    (9, "bound evaluators"),
    (10, "brute-force equivalence"),
];

/// Runs criterion `id` with the given master seed.
pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionReport> {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => success_guarantee(seed)?,
        2 => one_sided(seed)?,
        3 => sample_accounting(seed)?,
        4 => scaling(seed)?,
        5 => counting()?,
        6 => oracle_promise(seed)?,
        7 => collision_probability(seed)?,
        8 => probe_collision(seed)?,
        9 => bound_evaluators()?,
        10 => bruteforce_equivalence(seed)?,
        _ => return Err(crate::error::HspError::domain(format!("no criterion {id}"))),
    };
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .unwrap_or("");
    Ok(CriterionReport {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    })
}

pub fn run_all(seed: u64) -> Result<Vec<CriterionReport>> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run_criterion(id, seed))
        .collect()
}

/// Instance classes of the success-rate criteria.
pub fn success_classes() -> Vec<RahspParams> {
    ["2,6,1", "2,6,2", "3,4,1", "2^3:1,3^3:1"]
        .iter()
        .map(|s| s.parse().expect("valid params"))
        .collect()
}

pub const SUCCESS_TRIALS: u64 = 500;

/// `1 - delta - 3 sqrt(delta (1 - delta) / trials)`.
pub fn success_threshold(delta: f64, trials: u64) -> f64 {
    1.0 - delta - 3.0 * (delta * (1.0 - delta) / trials as f64).sqrt()
}

struct ClassRun {
    params: RahspParams,
    successes: u64,
    contained: u64,
    exact_samples: u64,
    expected_samples: u64,
}

fn run_classes(seed: u64) -> Result<Vec<ClassRun>> {
    success_classes()
        .into_iter()
        .map(|params| {
            let outcomes = experiment::run_trials(&params, DELTA, SUCCESS_TRIALS, seed)?;
            let expected = LearnerPlan::for_family(&params.family()?, DELTA)?.total_samples();
            Ok(ClassRun {
                successes: outcomes.iter().filter(|o| o.success).count() as u64,
                contained: outcomes.iter().filter(|o| o.contained).count() as u64,
                exact_samples: outcomes.iter().filter(|o| o.samples == expected).count() as u64,
                expected_samples: expected,
                params,
            })
        })
        .collect()
}

fn success_guarantee(seed: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let threshold = success_threshold(DELTA, SUCCESS_TRIALS);
    let runs = run_classes(seed)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in &runs {
        let rate = r.successes as f64 / SUCCESS_TRIALS as f64;
        ok &= rate >= threshold;
        parts.push(format!("{}={:.3}", r.params, rate));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    Ok((
        ok,
        format!(
            "rates {} >= {:.4}; {:.1}s < 60s",
            parts.join(" "),
            threshold,
            secs
        ),
    ))
}

fn one_sided(seed: u64) -> Result<(bool, String)> {
    let runs = run_classes(seed)?;
    let total = runs.len() as u64 * SUCCESS_TRIALS;
    let contained: u64 = runs.iter().map(|r| r.contained).sum();
    Ok((
        contained == total,
        format!("{contained}/{total} outputs inside the hidden subgroup"),
    ))
}

fn sample_accounting(seed: u64) -> Result<(bool, String)> {
    let gsp = RahspParams::gsp(2, 4, 1)?;
    let inst = random_instance(&gsp, &mut rng::stream(seed, "inst", 0))?;
    let plan = LearnerPlan::for_family(inst.family(), DELTA)?;
    let mut sampler = inst.sampler(rng::stream(seed, "sample", 0));
    learner::learn(&mut sampler, &plan, &mut rng::stream(seed, "learn", 0))?;
    let sr = inst.family().planning_rank() as u64;
    let closed_form = (plan.probe_size + 9 * plan.batch_size * sr) * plan.iterations;
    let mut ok = sampler.drawn() == 371 && closed_form == 371 && plan.total_samples() == 371;
    let runs = run_classes(seed)?;
    let mut parts = Vec::new();
    for r in &runs {
        ok &= r.exact_samples == SUCCESS_TRIALS;
        parts.push(format!("{}:{}", r.params, r.expected_samples));
    }
    Ok((
        ok,
        format!(
            "GSP(2,4,1) drew {} (expected 371); every trial matched closed form [{}]",
            sampler.drawn(),
            parts.join(" ")
        ),
    ))
}

/// Grid of the scaling criterion.
pub fn scaling_grid() -> Vec<RahspParams> {
    [1usize, 2]
        .iter()
        .flat_map(|&k| (6..=12).map(move |n| RahspParams::gsp(2, n, k).expect("valid")))
        .collect()
}

pub const SCALING_TRIALS: u64 = 100;

fn scaling(seed: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let rows = experiment::sweep(&scaling_grid(), DELTA, SCALING_TRIALS, seed)?;
    let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let spread = hi / lo;
    let mut ok = spread <= 8.0;
    let mut slopes = Vec::new();
    for k in [1usize, 2] {
        let sel: Vec<_> = rows.iter().filter(|r| r.k == k).collect();
        let xs: Vec<f64> = sel
            .iter()
            .map(|r| (r.n - r.k) as f64 * (r.p as f64).log2())
            .collect();
        let ys: Vec<f64> = sel.iter().map(|r| (r.samples_used as f64).log2()).collect();
        let s = fit_slope(&xs, &ys);
        ok &= (s - 0.5).abs() <= 0.1;
        slopes.push(format!("k={k}:{s:.3}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 300.0;
    Ok((
        ok,
        format!(
            "ratio band [{lo:.1}, {hi:.1}] spread {spread:.3} <= 8; slopes {} in 0.5±0.1; {secs:.1}s",
            slopes.join(" ")
        ),
    ))
}

fn counting() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut cases = 0;
    let mut failures = Vec::new();
    for p in [2u32, 3, 5] {
        for n in 2..=4usize {
            for k in 1..n {
                cases += 1;
                let formula = subgroup::subgroup_count(p, n, k)?;
                let listed = subgroup::enumerate_subgroups(p, n, k)?;
                let distinct: HashSet<&Subgroup> = listed.iter().collect();
                let floor = BigUint::from(p).pow(((n - k) * k) as u32);
                if BigUint::from(listed.len()) != formula
                    || distinct.len() != listed.len()
                    || formula <= floor
                {
                    failures.push(format!("({p},{n},{k})"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((
        failures.is_empty() && secs < 30.0,
        format!(
            "{cases} cases, mismatches [{}]; {secs:.2}s",
            failures.join(" ")
        ),
    ))
}

/// Every subgroup generated by at most two elements of a table group.
pub fn table_subgroups(group: &GroupSpec) -> Result<Vec<Subgroup>> {
    let els = group.elements(256)?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in &els {
        for b in &els {
            let h = Subgroup::span(group, &[a.clone(), b.clone()])?;
            if seen.insert(h.clone()) {
                out.push(h);
            }
        }
    }
    Ok(out)
}

/// Groups of order at most 256 with subgroup families, used for the
/// exhaustive promise check.
pub fn promise_corpus(seed: u64) -> Result<Vec<(GroupSpec, Vec<Subgroup>)>> {
    let mut corpus = Vec::new();
    let mut r = rng::stream(seed, "corpus", 0);

    for (p, n) in [(2u32, 2usize), (3, 2), (2, 4)] {
        let g = GroupSpec::elementary(p, n)?;
        let mut subs = vec![Subgroup::trivial(&g), Subgroup::whole(&g)];
        for k in 1..n {
            subs.extend(subgroup::enumerate_subgroups(p, n, k)?);
        }
        corpus.push((g, subs));
    }
    for (p, n) in [(2u32, 8usize), (5, 3), (3, 4)] {
        let g = GroupSpec::elementary(p, n)?;
        let mut subs = vec![Subgroup::trivial(&g)];
        for k in 1..n {
            subs.push(uniform_random_subgroup(p, n, k, &mut r)?);
        }
        corpus.push((g, subs));
    }
    for comps in [vec![(2u32, 2usize), (3, 2)], vec![(2, 3), (3, 2)]] {
        let g = GroupSpec::abelian(comps.iter().map(|&(p, n)| Component::new(p, n)).collect())?;
        let ranks = comps.iter().map(|_| 1).collect();
        let subs = FamilyDescriptor::rahsp(&g, ranks)?.members()?;
        corpus.push((g, subs));
    }
    for text in [D4_TABLE, Q8_TABLE] {
        let g = parse_group(text)?;
        let subs = table_subgroups(&g)?;
        corpus.push((g, subs));
    }
    let z2_4 = GroupSpec::elementary(2, 4)?.to_table()?;
    let subs = table_subgroups(&z2_4)?;
    corpus.push((z2_4, subs));
    Ok(corpus)
}

/// Exhaustively checks `f(x) = f(y) <=> x^{-1} y in H` for one instance,
/// both on coset representatives and on labels. Returns the number of
/// violations and the number of distinct labels.
pub fn check_promise(inst: &HspInstance) -> Result<(usize, usize)> {
    let g = inst.group();
    let h = inst.hidden();
    let els = g.elements(256)?;
    let reps: Vec<GroupElement> = els
        .iter()
        .map(|x| inst.coset_rep(x))
        .collect::<Result<_>>()?;
    let labels: Vec<u64> = els.iter().map(|x| inst.label(x)).collect::<Result<_>>()?;
    let mut violations = 0;
    for i in 0..els.len() {
        for j in 0..els.len() {
            let member = h.contains(&g.quotient(&els[i], &els[j])?)?;
            if (reps[i] == reps[j]) != member || (labels[i] == labels[j]) != member {
                violations += 1;
            }
        }
    }
    let distinct: HashSet<u64> = labels.iter().copied().collect();
    Ok((violations, distinct.len()))
}

fn oracle_promise(seed: u64) -> Result<(bool, String)> {
    let mut groups = 0;
    let mut instances = 0;
    let mut violations = 0;
    let mut bad_counts = 0;
    let mut non_abelian = 0;
    for (i, (g, subs)) in promise_corpus(seed)?.into_iter().enumerate() {
        groups += 1;
        non_abelian += usize::from(!g.is_abelian_product() && is_non_abelian(&g)?);
        for (j, h) in subs.iter().enumerate() {
            let fam = FamilyDescriptor::explicit(&g, subs.clone())?;
            let salt = rng::derive_seed(seed, "salt", (i * 1000 + j) as u64);
            let inst = HspInstance::new(g.clone(), h.clone(), fam, salt)?;
            let (v, distinct) = check_promise(&inst)?;
            violations += v;
            if BigUint::from(distinct) != h.index() {
                bad_counts += 1;
            }
            instances += 1;
        }
    }
    Ok((
        violations == 0 && bad_counts == 0 && non_abelian >= 1,
        format!(
            "{groups} groups ({non_abelian} non-abelian), {instances} subgroups: {violations} violations, {bad_counts} label-count mismatches"
        ),
    ))
}

fn is_non_abelian(g: &GroupSpec) -> Result<bool> {
    let els = g.elements(256)?;
    for a in &els {
        for b in &els {
            if g.mul(a, b)? != g.mul(b, a)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub const COLLISION_PAIRS: u64 = 100_000;

fn collision_probability(seed: u64) -> Result<(bool, String)> {
    let inst = random_instance(
        &RahspParams::gsp(2, 4, 1)?,
        &mut rng::stream(seed, "inst", 7),
    )?;
    let mut sampler = inst.sampler(rng::stream(seed, "pairs", 0));
    let hits = (0..COLLISION_PAIRS)
        .filter(|_| sampler.draw().label == sampler.draw().label)
        .count();
    let freq = hits as f64 / COLLISION_PAIRS as f64;
    let expected = 1.0 / inst.hidden().index().to_f64().unwrap_or(f64::INFINITY);
    Ok((
        (freq - 0.125).abs() <= 0.01 && expected == 0.125,
        format!("{freq:.4} over {COLLISION_PAIRS} pairs, expected 1/8 ± 0.01"),
    ))
}

pub const PROBE_ROUNDS: u64 = 10_000;

fn probe_collision(seed: u64) -> Result<(bool, String)> {
    let inst = random_instance(
        &RahspParams::gsp(2, 6, 1)?,
        &mut rng::stream(seed, "inst", 8),
    )?;
    let plan = LearnerPlan::for_family(inst.family(), DELTA)?;
    let mut sampler = inst.sampler(rng::stream(seed, "probe", 0));
    let mut hits = 0;
    for _ in 0..PROBE_ROUNDS {
        let probes = sampler.draw_many(plan.probe_size as usize);
        let batch = sampler.draw_many(plan.batch_size as usize);
        hits += usize::from(CollisionIndex::new(&probes).collides(&batch));
    }
    let freq = hits as f64 / PROBE_ROUNDS as f64;
    Ok((
        freq >= 0.72,
        format!(
            "{freq:.4} over {PROBE_ROUNDS} rounds (A={}, B={}) >= 0.72",
            plan.probe_size, plan.batch_size
        ),
    ))
}

/// Grid points of the entropy inequality sweep: `q = 0.001 i`, `1 <= i <= 500`.
pub fn entropy_violations() -> usize {
    (1..=500)
        .map(|i| i as f64 * 0.001)
        .filter(|&q| {
            let left = -(1.0 - q) * (1.0 - q).log2();
            let right = -q * q.log2();
            let entropy = bounds::binary_entropy(q).expect("q in range");
            left > right || entropy > 2.0 * q * (1.0 / q).log2() + 1e-12
        })
        .count()
}

fn bound_evaluators() -> Result<(bool, String)> {
    let simon3 = bounds::lower_bound(&RahspParams::gsp(2, 3, 1)?.family()?)?;
    let theta = bounds::gsp_theta(3, 5, 2)?;
    let violations = entropy_violations();
    Ok((
        (simon3 - 2.370).abs() <= 0.001 && (theta - 7.348).abs() <= 0.001 && violations == 0,
        format!("lower(Simon n=3)={simon3:.4}, theta(3,5,2)={theta:.4}, entropy sweep violations={violations}/500"),
    ))
}

pub const BRUTEFORCE_TRIALS: u64 = 200;

fn bruteforce_equivalence(seed: u64) -> Result<(bool, String)> {
    let params = RahspParams::gsp(2, 3, 1)?;
    let candidates = params.family()?.members()?;
    let mut sound = 0;
    let mut singletons = 0;
    let mut agree = 0;
    for t in 0..BRUTEFORCE_TRIALS {
        let inst = random_instance(&params, &mut rng::stream(seed, "inst", t))?;
        let plan = LearnerPlan::for_family(inst.family(), DELTA)?;
        let mut sampler = inst.sampler(rng::stream(seed, "sample", t)).recording();
        let learned = learner::learn(&mut sampler, &plan, &mut rng::stream(seed, "learn", t))?;
        let consistent = consistent_subgroups(inst.group(), sampler.transcript(), &candidates)?;
        sound += usize::from(consistent.contains(inst.hidden()));
        if consistent.len() == 1 {
            singletons += 1;
            agree += usize::from(consistent[0] == learned);
        }
    }
    let n = BRUTEFORCE_TRIALS as usize;
    Ok((
        sound == n && agree == singletons,
        format!(
            "true H consistent in {sound}/{n}; learner matched {agree}/{singletons} singleton sets"
        ),
    ))
}

/// Label classes for the whole group, keyed by label. Used by tests.
pub fn label_partition(inst: &HspInstance) -> Result<HashMap<u64, Vec<GroupElement>>> {
    let mut out: HashMap<u64, Vec<GroupElement>> = HashMap::new();
    for x in inst.group().elements(4096)? {
        out.entry(inst.label(&x)?).or_default().push(x);
    }
    Ok(out)
}
