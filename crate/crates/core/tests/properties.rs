use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;
use proptest::prelude::*;

use hsp_core::acceptance::label_partition;
use hsp_core::bounds::{gsp_theta, lower_bound, rahsp_bounds, upper_bound};
use hsp_core::bruteforce::consistent_subgroups;
use hsp_core::group::Component;
use hsp_core::linalg::EchelonBasis;
use hsp_core::oracle::{random_instance, RahspParams};
use hsp_core::subgroup::{enumerate_subgroups, subgroup_count};
use hsp_core::{rng, GroupElement, GroupSpec, Subgroup};

fn elementary() -> impl Strategy<Value = (u32, usize)> {
    (prop::sample::select(vec![2u32, 3, 5]), 1usize..=5)
}

fn vectors(p: u32, n: usize, max: usize) -> impl Strategy<Value = Vec<GroupElement>> {
    prop::collection::vec(
        prop::collection::vec(0..p, n).prop_map(GroupElement::Residues),
        0..=max,
    )
}

fn group_and_gens() -> impl Strategy<Value = (GroupSpec, Vec<GroupElement>)> {
    elementary()
        .prop_flat_map(|(p, n)| (Just(GroupSpec::elementary(p, n).unwrap()), vectors(p, n, 6)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn span_contains_generators_and_is_idempotent((g, w) in group_and_gens()) {
        let h = Subgroup::span(&g, &w).unwrap();
        for x in &w {
            prop_assert!(h.contains(x).unwrap());
        }
        let again = Subgroup::span(&g, &h.elements(10_000).unwrap()).unwrap();
        prop_assert_eq!(&again, &h);
        let doubled: Vec<_> = w.iter().chain(&w).cloned().collect();
        prop_assert_eq!(Subgroup::span(&g, &doubled).unwrap(), h);
    }

    #[test]
    fn span_rank_and_lagrange((g, w) in group_and_gens()) {
        let h = Subgroup::span(&g, &w).unwrap();
        prop_assert!(h.rank() <= w.len());
        let order = g.order();
        prop_assert!((&order % h.order()).is_zero());
        prop_assert_eq!(h.order() * h.index(), order);
        prop_assert_eq!(h.elements(10_000).unwrap().len(), h.order().clone().try_into().unwrap_or(0usize));
    }

    #[test]
    fn coset_reps_are_constant_on_cosets((g, w) in group_and_gens(), seed in any::<u64>()) {
        let h = Subgroup::span(&g, &w).unwrap();
        let mut r = rng::seeded(seed);
        let x = g.uniform_element(&mut r);
        let rep = h.coset_rep(&x).unwrap();
        prop_assert!(h.contains(&g.quotient(&x, &rep).unwrap()).unwrap());
        for y in h.elements(10_000).unwrap().iter().take(20) {
            prop_assert_eq!(h.coset_rep(&g.mul(&x, y).unwrap()).unwrap(), rep.clone());
        }
    }

    #[test]
    fn table_span_matches_structured_span((p, n) in elementary(), seed in any::<u64>()) {
        let g = GroupSpec::elementary(p, n).unwrap();
        prop_assume!(g.small_order().unwrap() <= 81);
        let t = g.to_table().unwrap();
        let mut r = rng::seeded(seed);
        let gens: Vec<GroupElement> = (0..3).map(|_| g.uniform_element(&mut r)).collect();
        let table_gens: Vec<GroupElement> =
            gens.iter().map(|x| GroupElement::Index(g.index_of(x) as u32)).collect();
        let structured = Subgroup::span(&g, &gens).unwrap();
        let table = Subgroup::span(&t, &table_gens).unwrap();
        let mut expect: Vec<u32> =
            structured.elements(100).unwrap().iter().map(|x| g.index_of(x) as u32).collect();
        expect.sort_unstable();
        let mut got = table.table_elements().unwrap().to_vec();
        got.sort_unstable();
        prop_assert_eq!(got, expect);
        prop_assert_eq!(table.rank(), structured.rank());
    }

    #[test]
    fn product_rank_is_max_of_component_ranks(
        k2 in 0usize..=4, k3 in 0usize..=3, seed in any::<u64>()
    ) {
        let g = GroupSpec::abelian(vec![Component::new(2, 4), Component::new(3, 3)]).unwrap();
        let mut r = rng::seeded(seed);
        let b2 = hsp_core::linalg::random_subspace(2, 4, k2, &mut r);
        let b3 = hsp_core::linalg::random_subspace(3, 3, k3, &mut r);
        let h = Subgroup::from_bases(&g, vec![b2, b3]).unwrap();
        prop_assert_eq!(h.rank(), k2.max(k3));
        prop_assert_eq!(h.component_ranks(), vec![k2, k3]);
        let gens = h.minimal_generators().unwrap();
        prop_assert_eq!(gens.len(), k2.max(k3));
        prop_assert_eq!(Subgroup::span(&g, &gens).unwrap(), h);
    }

    #[test]
    fn subgroup_count_exceeds_power_floor(p in prop::sample::select(vec![2u32, 3, 5, 7]), n in 2usize..=12, k in 1usize..12) {
        prop_assume!(k < n);
        let floor = BigUint::from(p).pow(((n - k) * k) as u32);
        prop_assert!(subgroup_count(p, n, k).unwrap() > floor);
        prop_assert_eq!(subgroup_count(p, n, k).unwrap(), subgroup_count(p, n, n - k).unwrap());
    }

    #[test]
    fn learner_output_is_inside_hidden_subgroup(
        p in prop::sample::select(vec![2u32, 3]), n in 2usize..=5, k in 1usize..5, seed in any::<u64>()
    ) {
        prop_assume!(k < n);
        let params = RahspParams::gsp(p, n, k).unwrap();
        let outcome = hsp_core::experiment::run_trial(&params, 0.25, 0, seed).unwrap();
        prop_assert!(outcome.contained);
    }
}

#[test]
fn enumeration_matches_formula() {
    for p in [2u32, 3, 5] {
        for n in 2..=4 {
            for k in 1..n {
                let all = enumerate_subgroups(p, n, k).unwrap();
                let expect: usize = subgroup_count(p, n, k).unwrap().try_into().unwrap();
                assert_eq!(all.len(), expect, "({p},{n},{k})");
                let distinct: HashSet<_> = all.iter().collect();
                assert_eq!(distinct.len(), expect);
                assert!(all.iter().all(|h| h.rank() == k));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn label_partition_ignores_salt(
        p in prop::sample::select(vec![2u32, 3]), n in 2usize..=4, k in 1usize..4,
        seed in any::<u64>(), salt in any::<u64>()
    ) {
        prop_assume!(k < n);
        let inst = random_instance(&RahspParams::gsp(p, n, k).unwrap(), &mut rng::seeded(seed)).unwrap();
        let classes = |m: HashMap<u64, Vec<GroupElement>>| {
            let mut v: Vec<Vec<GroupElement>> = m.into_values().collect();
            v.sort();
            v
        };
        let a = label_partition(&inst).unwrap();
        prop_assert_eq!(BigUint::from(a.len()), inst.hidden().index());
        let b = label_partition(&inst.with_salt(salt)).unwrap();
        prop_assert_eq!(classes(a), classes(b));
    }

    #[test]
    fn more_examples_never_widen_the_consistent_set(seed in any::<u64>(), t in 1usize..12) {
        let params = RahspParams::gsp(2, 3, 1).unwrap();
        let inst = random_instance(&params, &mut rng::seeded(seed)).unwrap();
        let candidates = inst.family().members().unwrap();
        let mut sampler = inst.sampler(rng::seeded(seed ^ 1));
        let examples = sampler.draw_many(t + 4);
        let mut prev = candidates.len();
        for m in 0..=examples.len() {
            let c = consistent_subgroups(inst.group(), &examples[..m], &candidates).unwrap();
            prop_assert!(c.contains(inst.hidden()));
            prop_assert!(c.len() <= prev);
            prev = c.len();
        }
    }
}

#[test]
fn bounds_track_square_root_of_index() {
    for n in 8..=20usize {
        let fam = RahspParams::gsp(2, n, 1).unwrap().family().unwrap();
        let root = 2f64.powf(n as f64 / 2.0);
        for v in [lower_bound(&fam).unwrap(), upper_bound(&fam).unwrap()] {
            let ratio = v / root;
            assert!((0.5..=1.5).contains(&ratio), "n={n}: ratio {ratio}");
        }
    }
}

#[test]
fn theta_agrees_with_rank_family_bounds() {
    for (p, n, k) in [
        (2u32, 6usize, 1usize),
        (2, 6, 2),
        (3, 5, 2),
        (5, 3, 1),
        (2, 10, 8),
    ] {
        let r = rahsp_bounds(&RahspParams::gsp(p, n, k).unwrap()).unwrap();
        let theta = gsp_theta(p, n, k).unwrap();
        assert!((r.lower - theta).abs() < 1e-9 && (r.upper - theta).abs() < 1e-9);
    }
    let mut prev = 0.0;
    for n in 2..40 {
        let t = gsp_theta(3, n, 1).unwrap();
        assert!(t > prev);
        prev = t;
    }
}

#[test]
fn echelon_rows_are_canonical_after_random_inserts() {
    let mut r = rng::seeded(12);
    for _ in 0..200 {
        let b = hsp_core::linalg::random_subspace(5, 6, 3, &mut r);
        let rebuilt = EchelonBasis::from_canonical_rows(5, 6, b.rows().to_vec()).unwrap();
        assert_eq!(rebuilt, b);
        for (row, &piv) in b.rows().iter().zip(b.pivots()) {
            assert_eq!(row[piv], 1);
            assert!(b.rows().iter().filter(|o| *o != row).all(|o| o[piv] == 0));
            assert!(row[..piv].iter().all(|&x| x == 0));
        }
    }
}
