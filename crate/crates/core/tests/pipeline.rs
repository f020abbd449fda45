// End-to-end checks of the extension pipeline against a naive closure.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use spinekit::catalog::{catalog_up_to, is_isomorphic};
use spinekit::extension::extend_to_groupoid;
use spinekit::generators::{gen_affine_config, gen_group_action_spine, gen_latin_square_family, latin_square_spine};
use spinekit::group::extract_group;
use spinekit::model::{FiniteMap, GroupoidSpine};

type Graphs = BTreeMap<(usize, usize), BTreeSet<Vec<usize>>>;

fn compose(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&y| second[y]).collect()
}

fn inverse(f: &[usize]) -> Vec<usize> {
    let mut out = vec![0; f.len()];
    for (x, &y) in f.iter().enumerate() {
        out[y] = x;
    }
    out
}

/// Every composite of listed maps and their inverses, by repeated squaring
/// of the whole table until nothing changes.
fn naive_closure(s: &GroupoidSpine) -> Graphs {
    let mut graphs = Graphs::new();
    for (&(i, j), maps) in s.morphism_table() {
        for f in maps {
            graphs.entry((i, j)).or_default().insert(f.images().to_vec());
            graphs.entry((j, i)).or_default().insert(inverse(f.images()));
        }
    }
    loop {
        let mut next = graphs.clone();
        for (&(i, j), fs) in &graphs {
            for (&(j2, k), gs) in &graphs {
                if j2 != j {
                    continue;
                }
                for f in fs {
                    for g in gs {
                        next.entry((i, k)).or_default().insert(compose(f, g));
                    }
                }
            }
        }
        if next == graphs {
            return graphs;
        }
        graphs = next;
    }
}

fn extended_graphs(s: &GroupoidSpine) -> Graphs {
    s.morphism_table()
        .iter()
        .map(|(&pair, maps)| (pair, maps.iter().map(|f| f.images().to_vec()).collect()))
        .collect()
}

/// Replace each carrier's points by a permuted copy: `f` on `(i, j)` becomes
/// `σ_j ∘ f ∘ σ_i⁻¹`.
fn conjugate(s: &GroupoidSpine, sigmas: &[Vec<usize>]) -> GroupoidSpine {
    let morphisms = s
        .morphism_table()
        .iter()
        .map(|(&(i, j), maps)| {
            let inv = inverse(&sigmas[i]);
            let maps = maps
                .iter()
                .map(|f| {
                    let images = compose(&compose(&inv, f.images()), &sigmas[j]);
                    FiniteMap::new(f.source(), f.target(), images).unwrap()
                })
                .collect();
            ((i, j), maps)
        })
        .collect();
    GroupoidSpine::new(s.sets().to_vec(), s.pairs().clone(), morphisms).unwrap()
}

#[test]
fn closure_matches_naive_closure_on_group_action_spines() {
    for entry in catalog_up_to(8) {
        for objects in 1..=4 {
            let spine = gen_group_action_spine(&entry.group, objects).unwrap();
            let ext = extend_to_groupoid(&spine).unwrap();
            assert_eq!(extended_graphs(&ext.extended), naive_closure(&spine), "{} x{objects}", entry.name);
        }
    }
}

#[test]
fn closure_matches_naive_closure_on_affine_configs() {
    for p in [2, 3, 5, 7] {
        let spine = gen_affine_config(p).unwrap();
        let ext = extend_to_groupoid(&spine).unwrap();
        assert!(ext.conservative);
        assert_eq!(extended_graphs(&ext.extended), naive_closure(&spine), "p={p}");
    }
}

#[test]
fn latin_square_closures_match_naive_closure() {
    for (order, want_coset) in [(4, true), (5, true), (5, false), (6, true)] {
        let family = gen_latin_square_family(order, want_coset, 3).unwrap();
        let spine = latin_square_spine(&family).unwrap();
        let ext = extend_to_groupoid(&spine).unwrap();
        let naive = naive_closure(&spine);
        assert_eq!(extended_graphs(&ext.extended), naive);
        let listed: BTreeSet<Vec<usize>> = family.iter().map(|f| f.images().to_vec()).collect();
        assert_eq!(ext.conservative, naive[&(0, 1)] == listed);
        assert_eq!(ext.conservative, want_coset);
    }
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugated_spines_extend_conservatively(
        (group, objects, sigmas) in (0..catalog_up_to(10).count(), 3usize..=4).prop_flat_map(|(g, objects)| {
            let order = catalog_up_to(10).nth(g).unwrap().group.order();
            (Just(g), Just(objects), proptest::collection::vec(permutation(order), objects))
        })
    ) {
        let g = &catalog_up_to(10).nth(group).unwrap().group;
        let spine = conjugate(&gen_group_action_spine(g, objects).unwrap(), &sigmas);
        let ext = extend_to_groupoid(&spine).unwrap();
        prop_assert!(ext.conservative);
        prop_assert!(ext.regular);
        prop_assert_eq!(extended_graphs(&ext.extended), naive_closure(&spine));
        for object in ext.extended.objects() {
            let action = extract_group(&ext, object).unwrap();
            prop_assert!(is_isomorphic(action.group(), g));
        }
    }
}
