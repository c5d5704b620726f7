use std::collections::HashMap;
use std::hash::Hash;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use hsp_core::acceptance::{D4_TABLE, Q8_TABLE};
use hsp_core::group::Component;
use hsp_core::rng;
use hsp_core::subgroup::{enumerate_subgroups, uniform_random_subgroup};
use hsp_core::text::parse_group;
use hsp_core::GroupSpec;

/// Upper-tail p-value of Pearson's statistic against the uniform law on `cells` outcomes.
fn chi_square_p<K: Eq + Hash>(counts: &HashMap<K, u64>, cells: usize, draws: u64) -> f64 {
    assert!(counts.len() <= cells);
    let expected = draws as f64 / cells as f64;
    let observed: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // Cells never hit contribute `expected` each.
    let stat = observed + (cells - counts.len()) as f64 * expected;
    let dist = ChiSquared::new((cells - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

fn element_counts(g: &GroupSpec, draws: u64, seed: u64) -> HashMap<usize, u64> {
    let mut r = rng::seeded(seed);
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts
            .entry(g.index_of(&g.uniform_element(&mut r)))
            .or_insert(0) += 1;
    }
    counts
}

#[test]
fn z2_squared_sampling_passes_chi_square() {
    let g = GroupSpec::elementary(2, 2).unwrap();
    let counts = element_counts(&g, 40_000, 11);
    let p = chi_square_p(&counts, 4, 40_000);
    assert!(p > 0.001, "p-value {p}");
}

#[test]
fn small_groups_sample_uniformly() {
    let groups = [
        GroupSpec::elementary(2, 4).unwrap(),
        GroupSpec::elementary(3, 2).unwrap(),
        GroupSpec::elementary(5, 1).unwrap(),
        GroupSpec::abelian(vec![Component::new(2, 2), Component::new(3, 1)]).unwrap(),
        parse_group(D4_TABLE).unwrap(),
        parse_group(Q8_TABLE).unwrap(),
    ];
    for (i, g) in groups.iter().enumerate() {
        let n = g.small_order().unwrap();
        assert!(n <= 16);
        let draws = 10_000 * n as u64;
        let counts = element_counts(g, draws, 100 + i as u64);
        let p = chi_square_p(&counts, n, draws);
        assert!(p > 0.001, "group {i}: p-value {p}");
    }
}

#[test]
fn random_lines_of_f2_cubed_are_uniform() {
    let draws = 70_000u64;
    let mut r = rng::seeded(5);
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts
            .entry(uniform_random_subgroup(2, 3, 1, &mut r).unwrap())
            .or_insert(0u64) += 1;
    }
    assert_eq!(counts.len(), 7);
    for (h, &c) in &counts {
        let f = c as f64 / draws as f64;
        assert!((f - 1.0 / 7.0).abs() <= 0.01, "{h:?}: {f}");
    }
    assert!(chi_square_p(&counts, 7, draws) > 0.001);
}

#[test]
fn random_planes_of_f3_cubed_are_uniform() {
    let draws = 26_000u64;
    let mut r = rng::seeded(6);
    let mut counts = HashMap::new();
    for _ in 0..draws {
        *counts
            .entry(uniform_random_subgroup(3, 3, 2, &mut r).unwrap())
            .or_insert(0u64) += 1;
    }
    let all = enumerate_subgroups(3, 3, 2).unwrap();
    assert_eq!(all.len(), 13);
    assert!(counts.keys().all(|h| all.contains(h)));
    assert!(chi_square_p(&counts, 13, draws) > 0.001);
}
