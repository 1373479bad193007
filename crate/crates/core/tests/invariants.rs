//! Property tests over randomly generated trees, maps, and predictors.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use treeloc_core::{
    classify, predicts, pullback, split_level, tree_to_predictor, FiniteTree, LetterMap,
    Predictor, Seq, Skeleton, TreeDomain, TreeView,
};

fn branches_strategy(b: u8, depth: usize) -> impl Strategy<Value = Vec<Seq>> {
    prop::collection::vec(prop::collection::vec(0..b, depth), 1..12)
        .prop_map(|fs| fs.into_iter().map(Seq::from).collect())
}

proptest! {
    #[test]
    fn closures_are_prefix_closed(branches in branches_strategy(3, 4)) {
        let domain = TreeDomain::uniform(3, 4).unwrap();
        let tree = FiniteTree::downward_closure(domain, branches.clone()).unwrap();
        for node in tree.nodes() {
            if let Some(p) = node.parent() {
                prop_assert!(tree.contains(&p));
            }
        }
        for b in &branches {
            prop_assert!(tree.contains(b));
        }
    }

    #[test]
    fn split_levels_are_sorted_tree_successors(branches in branches_strategy(3, 4), n in 0usize..4) {
        let domain = TreeDomain::uniform(3, 4).unwrap();
        let tree = FiniteTree::downward_closure(domain, branches).unwrap();
        let level = split_level(&tree, &Seq::empty(), n).unwrap();
        let mut sorted = level.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(&level, &sorted);
        for s in &level {
            prop_assert!(tree.contains(s));
        }
    }

    #[test]
    fn pullback_nodes_map_into_the_image_tree(
        branches in branches_strategy(3, 3),
        tail in prop::collection::vec(0..3u8, 0..3),
    ) {
        // closures of at most two branches split at most in two, as pullback requires
        let narrow: Vec<Seq> = branches.into_iter().take(2).collect();
        let domain = TreeDomain::uniform(3, 3).unwrap();
        let tree = FiniteTree::downward_closure(domain, narrow).unwrap();
        let mut map = vec![0u8, 1, 2];
        map.extend(tail);
        let letter_map = LetterMap::new(map.clone(), 3).unwrap();
        let pulled = pullback(&tree, &letter_map).unwrap();
        for node in pulled.nodes() {
            let image: Vec<u8> = node.letters().iter().map(|&x| map[x as usize]).collect();
            prop_assert!(tree.contains(&Seq::from(image)));
        }
        for branch in tree.branches() {
            prop_assert!(pulled.contains(&branch));
        }
    }

    #[test]
    fn predictions_survive_a_later_grace_point(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = rng.random_range(2..4u8);
        let horizon = rng.random_range(1..4usize);
        let k = rng.random_range(1..b as usize + 1);
        let mut table: BTreeMap<Seq, BTreeSet<u8>> = BTreeMap::new();
        let mut level = vec![Seq::empty()];
        for _ in 0..horizon {
            for s in &level {
                let size = rng.random_range(1..=k);
                let mut set = BTreeSet::new();
                while set.len() < size {
                    set.insert(rng.random_range(0..b));
                }
                table.insert(s.clone(), set);
            }
            level = level
                .iter()
                .flat_map(|s| (0..b).map(|x| s.child(x)).collect::<Vec<_>>())
                .collect();
        }
        let p = Predictor::new(b, k, horizon, table).unwrap();
        let f = Seq::from((0..horizon).map(|_| rng.random_range(0..b)).collect::<Vec<_>>());
        for m in 0..horizon.saturating_sub(1) {
            let now = predicts(&p, &f, m).unwrap();
            let later = predicts(&p, &f, m + 1).unwrap();
            if now.predicted {
                prop_assert!(later.predicted);
            }
        }
        let verdict = predicts(&p, &f, 0).unwrap();
        if let Some(g) = verdict.grace {
            prop_assert!(predicts(&p, &f, g).unwrap().predicted);
            if g > 0 {
                prop_assert!(!predicts(&p, &f, g - 1).unwrap().predicted);
            }
        }
    }

    #[test]
    fn skeletons_pair_branches_with_words_bijectively(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(2..4usize);
        let b = rng.random_range(k as u8..5u8);
        let depth = rng.random_range(2..5usize);
        let split_count = rng.random_range(1..=depth);
        let mut split_levels: BTreeSet<usize> = BTreeSet::new();
        while split_levels.len() < split_count {
            split_levels.insert(rng.random_range(0..depth));
        }
        let domain = TreeDomain::uniform(b, depth).unwrap();
        let mut level = vec![Seq::empty()];
        for l in 0..depth {
            let mut next = Vec::new();
            for s in &level {
                if split_levels.contains(&l) {
                    let mut letters = BTreeSet::new();
                    while letters.len() < k {
                        letters.insert(rng.random_range(0..b));
                    }
                    for x in letters {
                        next.push(s.child(x));
                    }
                } else {
                    next.push(s.child(rng.random_range(0..b)));
                }
            }
            level = next;
        }
        let tree = FiniteTree::downward_closure(domain, level.clone()).unwrap();
        let skeleton = Skeleton::of(&tree, k).unwrap();
        prop_assert_eq!(skeleton.split_depth(), split_count);
        let mut seen_words = BTreeSet::new();
        for branch in &level {
            let word = skeleton.word_of(branch).unwrap();
            prop_assert_eq!(word.len(), split_count);
            prop_assert_eq!(skeleton.branch_of(word).unwrap(), branch);
            seen_words.insert(word.clone());
        }
        prop_assert_eq!(seen_words.len(), level.len());
    }

    #[test]
    fn leveled_narrow_trees_translate_to_predictors(branches in branches_strategy(3, 3)) {
        let domain = TreeDomain::uniform(3, 3).unwrap();
        let seed: BTreeSet<Seq> = branches.iter().take(2).cloned().collect();
        let tree = FiniteTree::downward_closure(domain, seed.clone()).unwrap();
        if classify(&tree, 2).is_k_tree {
            let p = tree_to_predictor(&tree, 2).unwrap();
            for b in &seed {
                prop_assert!(predicts(&p, b, 0).unwrap().predicted);
            }
        }
    }

    #[test]
    fn full_trees_classify_at_their_own_width(b in 2..4u8, depth in 1..4usize) {
        let tree = FiniteTree::full(TreeDomain::uniform(b, depth).unwrap()).unwrap();
        let report = classify(&tree, b as usize);
        prop_assert!(report.is_k_tree);
        prop_assert!(report.is_leveled);
        prop_assert!(report.perfect_within_depth);
        let narrow = classify(&tree, b as usize - 1);
        prop_assert!(!narrow.is_k_tree);
    }
}
