use crate::condition::Condition;
use crate::error::{Error, Result};
use crate::seq::Seq;
use crate::tree::{TreeRep, TreeView};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Rule computing a label from the walk itself, usable without storing a
/// table: either a fixed word every node is labeled a prefix of, or digits
/// hashed from the path so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelRule {
    Constant(Seq),
    PathDigits { seed: u64, modulus: u8 },
}

/// Where a name's labels come from: an explicit table or a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelSource {
    Map(BTreeMap<Seq, Seq>),
    Rule(LabelRule),
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv_step(h: u64, byte: u8) -> u64 {
    (h ^ byte as u64).wrapping_mul(FNV_PRIME)
}

fn path_digit(seed: u64, parts: &[&Seq], position: usize, modulus: u8) -> u8 {
    let mut h = FNV_OFFSET;
    for byte in seed.to_le_bytes() {
        h = fnv_step(h, byte);
    }
    for part in parts {
        for &x in &part.letters()[..position + 1] {
            h = fnv_step(h, x);
        }
        h = fnv_step(h, 0xff);
    }
    (h % modulus as u64) as u8
}

/// Label of a tuple of per-coordinate nodes under a rule. The label length is
/// the shortest coordinate length, and letter `p` depends only on the
/// coordinatewise prefixes of length `p+1`, so labels are monotone in every
/// coordinate. A one-element tuple is the single-tree case.
pub(crate) fn rule_label(rule: &LabelRule, parts: &[&Seq]) -> Seq {
    let n = parts.iter().map(|s| s.len()).min().unwrap_or(0);
    match rule {
        LabelRule::Constant(g) => g.restrict(n.min(g.len())),
        LabelRule::PathDigits { seed, modulus } => {
            let mut letters = Vec::with_capacity(n);
            for p in 0..n {
                letters.push(path_digit(*seed, parts, p, *modulus));
            }
            Seq::from(letters)
        }
    }
}

pub(crate) fn validate_rule(rule: &LabelRule, output_alphabet: u8, target_length: usize) -> Result<()> {
    match rule {
        LabelRule::Constant(g) => {
            if g.letters().iter().any(|&x| x >= output_alphabet) {
                return Err(Error::InvalidInput("label letter outside the output alphabet"));
            }
            if g.len() < target_length {
                return Err(Error::InvalidInput("constant label shorter than the target length"));
            }
        }
        LabelRule::PathDigits { modulus, .. } => {
            if *modulus == 0 {
                return Err(Error::InvalidInput("digit modulus must be at least 1"));
            }
            if *modulus > output_alphabet {
                return Err(Error::InvalidInput("digit modulus exceeds the output alphabet"));
            }
        }
    }
    Ok(())
}

/// Whether every maximal node of the tree has length at least `min_len`, so
/// rule labels read at maximal nodes reach the target length.
pub(crate) fn maximal_lengths_reach(tree: &TreeRep, min_len: usize) -> bool {
    match tree {
        TreeRep::Explicit(t) => t
            .nodes()
            .iter()
            .filter(|n| t.arity(n) == 0)
            .all(|n| n.len() >= min_len),
        TreeRep::Graded(g) => {
            let depth = g.domain().depth();
            (g.frontier().is_empty() || depth >= min_len)
                && g.spine().iter().all(|n| {
                    g.frontier().contains(n) || g.arity(n) > 0 || n.len() >= min_len
                })
        }
    }
}

/// A condition whose every node carries a decided output value: labels are
/// monotone along the tree and reach the target length at maximal nodes, so
/// each branch decides an output word of length ≥ the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecidedName {
    condition: Condition,
    output_alphabet: u8,
    target_length: usize,
    labels: LabelSource,
}

impl DecidedName {
    pub fn new(
        condition: Condition,
        output_alphabet: u8,
        target_length: usize,
        labels: LabelSource,
    ) -> Result<Self> {
        if output_alphabet < 2 {
            return Err(Error::InvalidInput("output alphabet needs at least two letters"));
        }
        if target_length == 0 {
            return Err(Error::InvalidInput("target length must be at least 1"));
        }
        match &labels {
            LabelSource::Rule(rule) => {
                validate_rule(rule, output_alphabet, target_length)?;
                if !maximal_lengths_reach(condition.tree(), target_length) {
                    return Err(Error::InvalidInput(
                        "maximal node too shallow to decide the target length",
                    ));
                }
            }
            LabelSource::Map(map) => {
                let tree = match condition.tree() {
                    TreeRep::Explicit(t) => t,
                    TreeRep::Graded(_) => {
                        return Err(Error::InvalidInput("explicit labels need an explicit tree"))
                    }
                };
                if map.len() != tree.len() || !map.keys().all(|k| tree.contains(k)) {
                    return Err(Error::InvalidInput("labels must cover the tree nodes exactly"));
                }
                for (node, value) in map {
                    if value.letters().iter().any(|&x| x >= output_alphabet) {
                        return Err(Error::InvalidInput(
                            "label letter outside the output alphabet",
                        ));
                    }
                    if let Some(p) = node.parent() {
                        if !map[&p].is_prefix_of(value) {
                            return Err(Error::InvalidInput("labels must be monotone"));
                        }
                    }
                    if tree.arity(node) == 0 && value.len() < target_length {
                        return Err(Error::InvalidInput(
                            "maximal label shorter than the target length",
                        ));
                    }
                }
            }
        }
        Ok(DecidedName {
            condition,
            output_alphabet,
            target_length,
            labels,
        })
    }

    pub fn condition(&self) -> &Condition {
        &self.condition
    }

    pub fn output_alphabet(&self) -> u8 {
        self.output_alphabet
    }

    pub fn target_length(&self) -> usize {
        self.target_length
    }

    pub fn labels(&self) -> &LabelSource {
        &self.labels
    }

    /// The decided value at a tree node.
    pub fn label(&self, node: &Seq) -> Seq {
        match &self.labels {
            LabelSource::Map(map) => map
                .get(node)
                .cloned()
                .expect("labels are total on tree nodes"),
            LabelSource::Rule(rule) => rule_label(rule, &[node]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::build_minimal_accelerating;
    use crate::domain::TreeDomain;
    use crate::tree::FiniteTree;
    use alloc::vec;

    fn minimal_name(depth: usize, seed: u64, modulus: u8) -> DecidedName {
        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(depth).unwrap()).unwrap();
        DecidedName::new(
            cond,
            3,
            depth,
            LabelSource::Rule(LabelRule::PathDigits { seed, modulus }),
        )
        .unwrap()
    }

    #[test]
    fn path_digit_labels_are_monotone_and_full_length() {
        let name = minimal_name(6, 7, 3);
        let a = name.label(&Seq::from([0, 1]));
        let b = name.label(&Seq::from([0, 1, 2, 3]));
        assert_eq!(a.len(), 2);
        assert_eq!(b.len(), 4);
        assert!(a.is_prefix_of(&b));
        assert_eq!(b, name.label(&Seq::from([0, 1, 2, 3])));
        assert!(b.letters().iter().all(|&x| x < 3));
    }

    #[test]
    fn path_digits_depend_on_the_branch() {
        let split = (0..50).any(|seed| {
            let name = minimal_name(4, seed, 2);
            name.label(&Seq::from([0, 0, 0])) != name.label(&Seq::from([0, 1, 0]))
        });
        assert!(split);
    }

    #[test]
    fn tuple_label_length_is_the_shortest_coordinate() {
        let rule = LabelRule::PathDigits { seed: 1, modulus: 2 };
        let a = Seq::from([0, 1, 2]);
        let b = Seq::from([0, 0, 0, 0, 0]);
        assert_eq!(rule_label(&rule, &[&a, &b]).len(), 3);
        assert_eq!(rule_label(&rule, &[&a]), rule_label(&rule, &[&a]));
    }

    #[test]
    fn constant_labels_truncate_to_the_walk() {
        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(3).unwrap()).unwrap();
        let name = DecidedName::new(
            cond,
            3,
            3,
            LabelSource::Rule(LabelRule::Constant(Seq::from([2, 1, 0]))),
        )
        .unwrap();
        assert_eq!(name.label(&Seq::from([0, 0])), Seq::from([2, 1]));
        assert_eq!(name.label(&Seq::from([0, 1, 2])), Seq::from([2, 1, 0]));
    }

    #[test]
    fn rejects_short_constants_and_wide_moduli() {
        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(3).unwrap()).unwrap();
        assert_eq!(
            DecidedName::new(
                cond.clone(),
                3,
                3,
                LabelSource::Rule(LabelRule::Constant(Seq::from([2, 1]))),
            ),
            Err(Error::InvalidInput("constant label shorter than the target length"))
        );
        assert_eq!(
            DecidedName::new(
                cond,
                3,
                3,
                LabelSource::Rule(LabelRule::PathDigits { seed: 0, modulus: 4 }),
            ),
            Err(Error::InvalidInput("digit modulus exceeds the output alphabet"))
        );
    }

    #[test]
    fn explicit_labels_must_be_total_and_monotone() {
        let domain = TreeDomain::accelerating(2).unwrap();
        let tree = FiniteTree::downward_closure(
            domain,
            vec![Seq::from([0, 0]), Seq::from([0, 1])],
        )
        .unwrap();
        let cond = Condition::new(Seq::from([0]), TreeRep::Explicit(tree)).unwrap();

        let mut partial = BTreeMap::new();
        partial.insert(Seq::empty(), Seq::empty());
        assert_eq!(
            DecidedName::new(cond.clone(), 3, 1, LabelSource::Map(partial)),
            Err(Error::InvalidInput("labels must cover the tree nodes exactly"))
        );

        let mut skewed = BTreeMap::new();
        skewed.insert(Seq::empty(), Seq::from([1]));
        skewed.insert(Seq::from([0]), Seq::from([1]));
        skewed.insert(Seq::from([0, 0]), Seq::from([2, 0]));
        skewed.insert(Seq::from([0, 1]), Seq::from([1, 1]));
        assert_eq!(
            DecidedName::new(cond.clone(), 3, 1, LabelSource::Map(skewed)),
            Err(Error::InvalidInput("labels must be monotone"))
        );

        let mut good = BTreeMap::new();
        good.insert(Seq::empty(), Seq::empty());
        good.insert(Seq::from([0]), Seq::from([1]));
        good.insert(Seq::from([0, 0]), Seq::from([1, 0]));
        good.insert(Seq::from([0, 1]), Seq::from([1, 2]));
        let name = DecidedName::new(cond, 3, 2, LabelSource::Map(good)).unwrap();
        assert_eq!(name.label(&Seq::from([0, 1])), Seq::from([1, 2]));
    }

    #[test]
    fn rule_names_need_deep_maximal_nodes() {
        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(3).unwrap()).unwrap();
        assert_eq!(
            DecidedName::new(
                cond,
                3,
                4,
                LabelSource::Rule(LabelRule::PathDigits { seed: 0, modulus: 2 }),
            ),
            Err(Error::InvalidInput(
                "maximal node too shallow to decide the target length"
            ))
        );
    }
}
