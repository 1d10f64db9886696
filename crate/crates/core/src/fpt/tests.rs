use super::*;
use crate::fixtures;
use crate::kauffman::{homfly_kauffman, ArcOrder};
use crate::link::{generate_braid_closure, random_braid_diagram, Sign};
use proptest::prelude::*;

fn oracle(d: &LinkDiagram) -> BiLaurent {
    homfly_kauffman(d, &ArcOrder::natural(d.arc_count())).unwrap()
}

fn fpt(d: &LinkDiagram) -> BiLaurent {
    homfly_fpt(d, &FptOptions { validate_tables: true, ..FptOptions::default() }).unwrap()
}

#[test]
fn figure_eight_end_to_end() {
    let d = fixtures::figure_eight();
    let (p, stats) = homfly_fpt_with_stats(&d, &FptOptions::default()).unwrap();
    assert_eq!(p.render(), "a^2 + a^-2 - z^2 - 1");
    assert_eq!(*stats.per_bag.last().unwrap(), 1);
    assert!(stats.width <= 3);
}

#[test]
fn twists_and_unlinks_follow_the_empty_convention() {
    assert!(fpt(&fixtures::positive_twist()).is_one());
    assert!(fpt(&fixtures::negative_twist()).is_one());
    assert!(fpt(&LinkDiagram::unlink(1)).is_one());
    assert_eq!(fpt(&LinkDiagram::unlink(2)), crate::poly::delta_value());
    let two = fixtures::positive_twist().disjoint_union(&fixtures::negative_twist());
    assert_eq!(fpt(&two), crate::poly::delta_value());
    assert_eq!(homfly_fpt(&LinkDiagram::unlink(0), &FptOptions::default()), Err(FptError::NoComponents));
}

#[test]
fn named_fixtures_match_the_oracle() {
    for (name, d) in fixtures::all() {
        assert_eq!(fpt(&d), oracle(&d), "{name}");
    }
}

#[test]
fn split_diagrams_match_the_oracle() {
    let d = fixtures::trefoil().disjoint_union(&fixtures::figure_eight());
    assert_eq!(fpt(&d), oracle(&d));
    let d = generate_braid_closure(&[1, 1, 1], 4).unwrap();
    assert_eq!(fpt(&d), oracle(&d));
}

#[test]
fn leaf_tables() {
    let d = fixtures::figure_eight();
    let p = plan(&d, Heuristic::MinDegree).unwrap();
    let (_, ntd) = p.decomposition.as_ref().unwrap();
    let order = tree_arc_order(&p.diagram, ntd, None);
    for w0 in [0, 2] {
        let ctx = DpContext {
            diagram: &p.diagram,
            ntd,
            order: &order,
            w0,
            width_budget: 100,
            parallel: false,
            pairs: PairMode::Eager,
        };
        let leaf = (0..ntd.len()).find(|&i| matches!(ntd.nodes[i].kind, NiceKind::Leaf { .. })).unwrap();
        let t = process_leaf(&ctx, leaf).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[&Configuration::default()], TriLaurent::mono(1, [-(w0 as i32), 0, -1]));
    }
}

#[test]
fn join_of_empty_configurations_multiplies() {
    let d = fixtures::figure_eight();
    let p = plan(&d, Heuristic::MinDegree).unwrap();
    let (_, ntd) = p.decomposition.as_ref().unwrap();
    let order = tree_arc_order(&p.diagram, ntd, None);
    let ctx = DpContext {
        diagram: &p.diagram,
        ntd,
        order: &order,
        w0: 3,
        width_budget: 100,
        parallel: false,
        pairs: PairMode::Eager,
    };
    let Some(join) = (0..ntd.len()).find(|&i| matches!(ntd.nodes[i].kind, NiceKind::Join { .. })) else {
        return;
    };
    let one = |c: i64| EvaluationTable::from([(Configuration::default(), TriLaurent::mono(c, [0, 1, 0]))]);
    let t = process_join(&ctx, join, &one(2), &one(3)).unwrap();
    assert_eq!(t[&Configuration::default()], TriLaurent::mono(6, [3, 2, 1]));
    assert!(process_join(&ctx, join, &EvaluationTable::new(), &one(3)).unwrap().is_empty());
}

#[test]
fn tree_orders_are_tree_based() {
    for (_, d) in fixtures::all() {
        let p = plan(&d, Heuristic::MinFill).unwrap();
        let Some((_, ntd)) = &p.decomposition else { continue };
        for seed in [None, Some(1), Some(2), Some(99)] {
            let o = tree_arc_order(&p.diagram, ntd, seed);
            assert!(o.is_tree_based(&p.diagram, ntd));
            // the arcs into the crossing forgotten last get the lowest ranks
            let first = o.sequence()[0];
            let top = p.diagram.arc(first).to.crossing;
            let root_forget = ntd.nodes[ntd.root()].kind;
            assert!(matches!(root_forget, NiceKind::Forget { vertex, .. } if vertex == top.0));
        }
    }
}

#[test]
fn width_budget_is_enforced() {
    let d = random_braid_diagram(5, 12, 3).unwrap();
    let tight = FptOptions { width_budget: 1, ..FptOptions::default() };
    match homfly_fpt(&d, &tight) {
        Err(FptError::WidthBudgetExceeded { budget, configs, .. }) => assert!(configs > budget),
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn negative_splice_without_closing_multiplies_by_minus_z() {
    // a two-crossing diagram where the last forget closes both loops: the
    // Hopf link; the DP result must match the oracle, which pins the rules
    for word in [[1, 1], [-1, -1], [1, -1]] {
        let d = generate_braid_closure(&word, 2).unwrap();
        assert_eq!(fpt(&d), oracle(&d), "{word:?}");
    }
}

#[test]
fn tag_factors() {
    assert_eq!(Tag::Pass.factor(Sign::Positive), ([1, 0, 0], false));
    assert_eq!(Tag::Pass.factor(Sign::Negative), ([-1, 0, 0], false));
    assert_eq!(Tag::Switch.factor(Sign::Positive), ([-1, 0, 0], false));
    assert_eq!(Tag::Splice.factor(Sign::Positive), ([0, 1, 0], false));
    assert_eq!(Tag::Splice.factor(Sign::Negative), ([0, 1, 0], true));
}

#[test]
fn configuration_bound_values() {
    assert_eq!(configuration_bound(0), 1);
    assert_eq!(configuration_bound(1), 4);
    assert_eq!(configuration_bound(2), 576);
    assert_eq!(configuration_bound(40), u128::MAX);
}

fn twisted(d: &LinkDiagram, twists: &[(prop::sample::Index, bool, bool)]) -> LinkDiagram {
    let mut t = d.clone();
    for (i, pos, over) in twists {
        if t.arc_count() == 0 {
            break;
        }
        let a = ArcId(i.index(t.arc_count()) as u32);
        t = t.add_twist(a, if *pos { Sign::Positive } else { Sign::Negative }, *over);
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracle_equivalence(strands in 2usize..=5, len in 0usize..=10, seed in any::<u64>()) {
        let d = random_braid_diagram(strands, len, seed).unwrap();
        prop_assert_eq!(fpt(&d), oracle(&d));
    }

    #[test]
    fn invariance_over_orders_and_heuristics(strands in 2usize..=4, len in 1usize..=9, seed in any::<u64>(), oseed in any::<u64>()) {
        let d = random_braid_diagram(strands, len, seed).unwrap();
        let base = fpt(&d);
        let alt = FptOptions { heuristic: Heuristic::MinFill, order_seed: Some(oseed), ..FptOptions::default() };
        prop_assert_eq!(homfly_fpt(&d, &alt).unwrap(), base.clone());
        let threads = FptOptions { threads: 4, ..FptOptions::default() };
        prop_assert_eq!(homfly_fpt(&d, &threads).unwrap(), base);
    }

    #[test]
    fn twisted_diagrams(strands in 2usize..=4, len in 0usize..=7, seed in any::<u64>(),
                        twists in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>(), any::<bool>()), 1..4)) {
        let d = random_braid_diagram(strands, len, seed).unwrap();
        let t = twisted(&d, &twists);
        prop_assert_eq!(fpt(&t), oracle(&t));
    }

    #[test]
    fn eager_and_deferred_pairs_agree(strands in 2usize..=3, len in 0usize..=5, seed in any::<u64>()) {
        let d = random_braid_diagram(strands, len, seed).unwrap();
        let eager = FptOptions { pairs: PairMode::Eager, validate_tables: true, ..FptOptions::default() };
        prop_assert_eq!(homfly_fpt(&d, &eager).unwrap(), fpt(&d));
    }

    #[test]
    fn tables_respect_the_bounds(strands in 2usize..=5, len in 1usize..=10, seed in any::<u64>()) {
        let d = random_braid_diagram(strands, len, seed).unwrap();
        prop_assume!(!d.untwist_and_strip().0.is_empty());
        let (_, s) = homfly_fpt_with_stats(&d, &FptOptions::default()).unwrap();
        for (&n, &b) in s.per_bag.iter().zip(&s.bag_sizes) {
            prop_assert!(n as u128 <= configuration_bound(b));
        }
        prop_assert_eq!(*s.per_bag.last().unwrap(), 1);
    }
}
