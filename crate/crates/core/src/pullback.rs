use crate::classify::classify;
use crate::domain::TreeDomain;
use crate::error::{Error, Result};
use crate::seq::Seq;
use crate::tree::{FiniteTree, TreeView, EXPLICIT_NODE_BUDGET};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// A map between letter alphabets, used to pull trees back along it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterMap {
    map: Vec<u8>,
    onto: u8,
}

impl LetterMap {
    /// `map[x]` is the image of letter `x`; the map must hit every letter
    /// below `onto`.
    pub fn new(map: Vec<u8>, onto: u8) -> Result<Self> {
        if onto < 1 || map.is_empty() {
            return Err(Error::InvalidInput("letter map needs nonempty alphabets"));
        }
        if map.iter().any(|&y| y >= onto) {
            return Err(Error::InvalidInput("letter map image out of range"));
        }
        for y in 0..onto {
            if !map.contains(&y) {
                return Err(Error::InvalidInput("letter map is not surjective"));
            }
        }
        Ok(LetterMap { map, onto })
    }

    pub fn identity(b: u8) -> Self {
        LetterMap {
            map: (0..b).collect(),
            onto: b,
        }
    }

    pub fn domain_size(&self) -> u8 {
        self.map.len() as u8
    }

    pub fn onto(&self) -> u8 {
        self.onto
    }

    pub fn apply(&self, x: u8) -> u8 {
        self.map[x as usize]
    }

    pub fn apply_seq(&self, s: &Seq) -> Seq {
        s.letters().iter().map(|&x| self.apply(x)).collect::<Vec<u8>>().into()
    }
}

/// The preimage of `tree` under the letterwise application of `f`: all
/// sequences over the larger alphabet whose image is a node. The input must
/// be an (s)-tree over the uniform alphabet s+1 = `f.onto()`, where
/// s+1 ≤ `f.domain_size()`; the result is then a (domain_size − 1)-tree.
pub fn pullback(tree: &FiniteTree, f: &LetterMap) -> Result<FiniteTree> {
    let domain = *tree.domain();
    let base = match domain.base() {
        Some(b) => b,
        None => return Err(Error::InvalidInput("pullback needs a uniform domain")),
    };
    if base != f.onto() {
        return Err(Error::InvalidInput("letter map range does not match the tree alphabet"));
    }
    if f.domain_size() < f.onto() {
        return Err(Error::InvalidInput("pullback alphabet smaller than the tree alphabet"));
    }
    if !classify(tree, f.onto() as usize - 1).is_k_tree {
        return Err(Error::InvalidInput("pullback input exceeds its arity bound"));
    }
    let out_domain = TreeDomain::uniform(f.domain_size(), domain.depth())?;
    let mut nodes = BTreeSet::new();
    let mut level: Vec<(Seq, Seq)> = Vec::new(); // (node, image)
    nodes.insert(Seq::empty());
    level.push((Seq::empty(), Seq::empty()));
    while !level.is_empty() {
        let mut next = Vec::new();
        for (node, image) in &level {
            if node.len() == out_domain.depth() {
                continue;
            }
            for x in 0..f.domain_size() {
                let image_child = image.child(f.apply(x));
                if tree.contains(&image_child) {
                    let child = node.child(x);
                    if nodes.len() >= EXPLICIT_NODE_BUDGET {
                        return Err(Error::BudgetExceeded {
                            context: "pullback materialization",
                            at: nodes.len(),
                        });
                    }
                    nodes.insert(child.clone());
                    next.push((child, image_child));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    FiniteTree::new(out_domain, nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identity_map_is_identity() {
        let t = FiniteTree::downward_closure(
            TreeDomain::uniform(3, 2).unwrap(),
            [Seq::from([0, 1]), Seq::from([2, 0])],
        )
        .unwrap();
        let out = pullback(&t, &LetterMap::identity(3)).unwrap();
        assert_eq!(out, t);
    }

    #[test]
    fn folding_letter_doubles_branches() {
        // 4 letters onto 3, with 2 and 3 both mapping to 2
        let f = LetterMap::new(vec![0, 1, 2, 2], 3).unwrap();
        let t = FiniteTree::downward_closure(
            TreeDomain::uniform(3, 2).unwrap(),
            [Seq::from([2, 2])],
        )
        .unwrap();
        let out = pullback(&t, &f).unwrap();
        assert_eq!(
            out.branches(),
            vec![
                Seq::from([2, 2]),
                Seq::from([2, 3]),
                Seq::from([3, 2]),
                Seq::from([3, 3])
            ]
        );
        let report = classify(&out, 3);
        assert!(report.is_k_tree);
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(LetterMap::new(vec![0, 0, 1], 3).is_err()); // misses 2
        assert!(LetterMap::new(vec![0, 3], 3).is_err()); // out of range
        let t = FiniteTree::full(TreeDomain::uniform(3, 1).unwrap()).unwrap();
        // full ternary tree is not a 2-tree, so it cannot be pulled back
        assert!(pullback(&t, &LetterMap::new(vec![0, 1, 2, 2], 3).unwrap()).is_err());
        // alphabet mismatch
        let small = FiniteTree::downward_closure(
            TreeDomain::uniform(2, 1).unwrap(),
            [Seq::from([0])],
        )
        .unwrap();
        assert!(pullback(&small, &LetterMap::identity(3)).is_err());
    }

    #[test]
    fn branch_images_are_input_branches() {
        let f = LetterMap::new(vec![0, 1, 1, 2], 3).unwrap();
        let t = FiniteTree::downward_closure(
            TreeDomain::uniform(3, 3).unwrap(),
            [Seq::from([0, 1, 2]), Seq::from([0, 2, 0])],
        )
        .unwrap();
        let out = pullback(&t, &f).unwrap();
        let input_branches = t.branches();
        for b in out.branches() {
            assert!(input_branches.contains(&f.apply_seq(&b)));
        }
    }
}
