use crate::error::{Error, Result};
use crate::name::DecidedName;
use crate::tree::{split_level, EXPLICIT_NODE_BUDGET};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// Reads the letter sets a pruned name runs through: s(n) collects the n-th
/// output letters decided at the nodes just above the (n+1)-st split. Every
/// branch value g of the name then satisfies g(n) ∈ s(n) while the levels
/// last, since labels are monotone along branches.
pub fn slalom_of_decided(name: &DecidedName) -> Result<Vec<BTreeSet<u8>>> {
    let tree = name.condition().tree();
    match tree.node_count() {
        Some(count) if count <= EXPLICIT_NODE_BUDGET as u64 => {}
        _ => {
            return Err(Error::BudgetExceeded {
                context: "slalom level walk",
                at: EXPLICIT_NODE_BUDGET,
            })
        }
    }
    let stem = name.condition().stem();
    let mut out: Vec<BTreeSet<u8>> = Vec::new();
    for n in 0.. {
        let level = split_level(tree, stem, n + 1)?;
        if level.is_empty() {
            break;
        }
        let mut letters = BTreeSet::new();
        for sigma in level {
            let label = name.label(&sigma);
            if label.len() < n + 1 {
                return Err(Error::InvalidInput(
                    "split level node decides too few letters",
                ));
            }
            letters.insert(label.letter(n));
        }
        out.push(letters);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::{build_minimal_accelerating, Condition};
    use crate::domain::TreeDomain;
    use crate::seq::Seq;
    use crate::name::{LabelRule, LabelSource};
    use crate::tree::{FiniteTree, TreeRep};
    use alloc::collections::BTreeMap;
    use alloc::vec;

    #[test]
    fn constant_names_trace_a_singleton_slalom() {
        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(4).unwrap()).unwrap();
        let name = DecidedName::new(
            cond,
            3,
            4,
            LabelSource::Rule(LabelRule::Constant(Seq::from([1, 2, 0, 1]))),
        )
        .unwrap();
        let slalom = slalom_of_decided(&name).unwrap();
        assert_eq!(slalom.len(), 3);
        assert!(slalom.iter().all(|s| s.len() == 1));
        assert_eq!(slalom[0], [1].into_iter().collect());
        assert_eq!(slalom[1], [2].into_iter().collect());
    }

    #[test]
    fn injective_labels_fill_the_split_levels() {
        let domain = TreeDomain::accelerating(3).unwrap();
        let tree = FiniteTree::downward_closure(
            domain,
            (0..2u8).flat_map(|x| (0..3u8).map(move |y| Seq::from([0, x, y]))),
        )
        .unwrap();
        let cond = Condition::new(Seq::from([0]), TreeRep::Explicit(tree.clone())).unwrap();
        let mut labels = BTreeMap::new();
        labels.insert(Seq::empty(), Seq::empty());
        labels.insert(Seq::from([0]), Seq::empty());
        for x in 0..2u8 {
            labels.insert(Seq::from([0, x]), Seq::from([x]));
            for y in 0..3u8 {
                labels.insert(Seq::from([0, x, y]), Seq::from([x, 3 * x + y]));
            }
        }
        let name = DecidedName::new(cond, 6, 2, LabelSource::Map(labels)).unwrap();
        let slalom = slalom_of_decided(&name).unwrap();
        assert_eq!(slalom.len(), 2);
        assert_eq!(slalom[0].len(), split_level(name.condition().tree(), &Seq::from([0]), 1).unwrap().len());
        assert_eq!(slalom[1].len(), split_level(name.condition().tree(), &Seq::from([0]), 2).unwrap().len());
    }

    #[test]
    fn branch_values_pass_through_the_slalom() {
        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(5).unwrap()).unwrap();
        let name = DecidedName::new(
            cond,
            3,
            5,
            LabelSource::Rule(LabelRule::PathDigits { seed: 11, modulus: 3 }),
        )
        .unwrap();
        let slalom = slalom_of_decided(&name).unwrap();
        let explicit = name.condition().tree().to_explicit().unwrap();
        for branch in explicit.branches() {
            let value = name.label(&branch);
            for (n, letters) in slalom.iter().enumerate() {
                assert!(letters.contains(&value.letter(n)));
            }
        }
    }

    #[test]
    fn shallow_decisions_are_rejected() {
        let domain = TreeDomain::accelerating(2).unwrap();
        let tree = FiniteTree::downward_closure(
            domain,
            vec![Seq::from([0, 0]), Seq::from([0, 1])],
        )
        .unwrap();
        let cond = Condition::new(Seq::from([0]), TreeRep::Explicit(tree)).unwrap();
        let mut labels = BTreeMap::new();
        labels.insert(Seq::empty(), Seq::empty());
        labels.insert(Seq::from([0]), Seq::empty());
        labels.insert(Seq::from([0, 0]), Seq::from([0]));
        labels.insert(Seq::from([0, 1]), Seq::empty());
        assert_eq!(
            DecidedName::new(cond.clone(), 3, 1, LabelSource::Map(labels.clone())),
            Err(Error::InvalidInput("maximal label shorter than the target length"))
        );
        labels.insert(Seq::from([0, 1]), Seq::from([1]));
        let name = DecidedName::new(cond, 3, 1, LabelSource::Map(labels)).unwrap();
        assert_eq!(slalom_of_decided(&name).unwrap().len(), 1);
    }
}
