use crate::seq::Seq;
use crate::tree::TreeView;
use alloc::vec::Vec;

/// Structural classes a finite tree can be checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeClass {
    /// Every non-maximal node has between 1 and k successors.
    KTree,
    /// Every non-maximal node has exactly 1 or exactly k successors.
    KBranching,
    /// Every split strictly above n other splits has at least n + 2
    /// successors.
    Accelerating,
    /// Every maximal node sits at the domain depth.
    Leveled,
}

/// Everything a single walk of the tree can report about its shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeClassReport {
    pub k: usize,
    pub is_k_tree: bool,
    pub is_k_branching: bool,
    pub is_accelerating: bool,
    pub is_leveled: bool,
    /// Leveled, and in addition every maximal node lies above a split.
    pub perfect_within_depth: bool,
    /// Each splitting node with its arity, in ascending node order.
    pub split_arities: Vec<(Seq, usize)>,
}

impl TreeClassReport {
    pub fn satisfies(&self, class: TreeClass) -> bool {
        match class {
            TreeClass::KTree => self.is_k_tree,
            TreeClass::KBranching => self.is_k_branching,
            TreeClass::Accelerating => self.is_accelerating,
            TreeClass::Leveled => self.is_leveled,
        }
    }
}

/// Classify in one depth-first walk. The accelerating check counts splits
/// strictly between the root and each node; whether branches could keep
/// splitting beyond the domain depth is not knowable from a finite part, so
/// only the arity growth condition is checked.
pub fn classify<T: TreeView>(tree: &T, k: usize) -> TreeClassReport {
    let mut report = TreeClassReport {
        k,
        is_k_tree: true,
        is_k_branching: true,
        is_accelerating: true,
        is_leveled: true,
        perfect_within_depth: true,
        split_arities: Vec::new(),
    };
    let depth = tree.domain().depth();
    walk(tree, &Seq::empty(), 0, depth, k, &mut report);
    report.split_arities.sort();
    report.perfect_within_depth &= report.is_leveled;
    report
}

fn walk<T: TreeView>(
    tree: &T,
    node: &Seq,
    splits_above: usize,
    depth: usize,
    k: usize,
    report: &mut TreeClassReport,
) {
    let letters = tree.successor_letters(node);
    let arity = letters.len();
    if arity == 0 {
        if node.len() != depth {
            report.is_leveled = false;
        }
        if splits_above == 0 {
            report.perfect_within_depth = false;
        }
        return;
    }
    if arity > k {
        report.is_k_tree = false;
    }
    if arity != 1 && arity != k {
        report.is_k_branching = false;
    }
    let splitting = arity >= 2;
    if splitting {
        if arity < splits_above + 2 {
            report.is_accelerating = false;
        }
        report.split_arities.push((node.clone(), arity));
    }
    for x in letters {
        walk(
            tree,
            &node.child(x),
            splits_above + usize::from(splitting),
            depth,
            k,
            report,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TreeDomain;
    use crate::tree::FiniteTree;
    use alloc::vec;

    fn closure(base: u8, depth: usize, branches: &[&[u8]]) -> FiniteTree {
        FiniteTree::downward_closure(
            TreeDomain::uniform(base, depth).unwrap(),
            branches.iter().map(|b| Seq::from(*b)),
        )
        .unwrap()
    }

    #[test]
    fn full_binary_is_two_branching_and_leveled() {
        let t = FiniteTree::full(TreeDomain::uniform(2, 3).unwrap()).unwrap();
        let r = classify(&t, 2);
        assert!(r.is_k_tree);
        assert!(r.is_k_branching);
        assert!(r.is_leveled);
        assert!(r.perfect_within_depth);
        assert!(!r.is_accelerating);
        assert_eq!(r.split_arities.len(), 7);
    }

    #[test]
    fn mixed_arities_break_branching_but_not_k_tree() {
        let t = closure(3, 2, &[&[0, 0], &[0, 1], &[1, 0], &[2, 0], &[2, 1], &[2, 2]]);
        let r = classify(&t, 3);
        assert!(r.is_k_tree);
        assert!(!r.is_k_branching);
        assert!(r.is_leveled);
        let r2 = classify(&t, 2);
        assert!(!r2.is_k_tree);
    }

    #[test]
    fn arity_growth_along_paths() {
        // root splits 2 ways, the next split on the left path splits 3 ways
        let good = closure(
            3,
            2,
            &[&[0, 0], &[0, 1], &[0, 2], &[1, 0]],
        );
        assert!(classify(&good, 3).is_accelerating);
        // a second-level split with only 2 successors is too narrow
        let bad = closure(3, 2, &[&[0, 0], &[0, 1], &[1, 0]]);
        assert!(!classify(&bad, 3).is_accelerating);
    }

    #[test]
    fn leveled_needs_every_branch_at_depth() {
        let t = closure(2, 2, &[&[0, 0], &[0, 1], &[1]]);
        let r = classify(&t, 2);
        assert!(!r.is_leveled);
        assert!(!r.perfect_within_depth);
        let u = closure(2, 2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert!(classify(&u, 2).perfect_within_depth);
    }

    #[test]
    fn unary_chain() {
        let t = closure(2, 3, &[&[0, 1, 0]]);
        let r = classify(&t, 1);
        assert!(r.is_k_tree);
        assert!(r.is_k_branching);
        assert!(r.is_leveled);
        assert!(!r.perfect_within_depth);
        assert!(r.is_accelerating);
        assert_eq!(r.split_arities, vec![]);
    }

    #[test]
    fn trivial_tree_is_not_leveled_at_positive_depth() {
        let t = FiniteTree::trivial(TreeDomain::uniform(2, 2).unwrap());
        let r = classify(&t, 2);
        assert!(!r.is_leveled);
        assert!(!r.perfect_within_depth);
    }
}
