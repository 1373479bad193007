use crate::domain::TreeDomain;
use crate::error::{Error, Result};
use crate::seq::Seq;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

/// Hard cap on nodes any operation will materialize explicitly.
pub const EXPLICIT_NODE_BUDGET: usize = 4_000_000;

/// Read access to a tree: membership and successor structure. Implementors
/// may store nodes explicitly or generate them on demand.
pub trait TreeView {
    fn domain(&self) -> &TreeDomain;
    fn contains(&self, node: &Seq) -> bool;
    /// Letters `x` with `node + x` in the tree, ascending.
    fn successor_letters(&self, node: &Seq) -> Vec<u8>;

    fn successors(&self, node: &Seq) -> Vec<Seq> {
        self.successor_letters(node)
            .into_iter()
            .map(|x| node.child(x))
            .collect()
    }

    fn arity(&self, node: &Seq) -> usize {
        self.successor_letters(node).len()
    }

    fn is_maximal(&self, node: &Seq) -> bool {
        self.contains(node) && self.successor_letters(node).is_empty()
    }
}

/// A finite tree with an explicit node set: prefix-closed, rooted at the
/// empty sequence, every node admitted by the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTree {
    domain: TreeDomain,
    nodes: BTreeSet<Seq>,
}

impl FiniteTree {
    pub fn new(domain: TreeDomain, nodes: BTreeSet<Seq>) -> Result<Self> {
        if !nodes.contains(&Seq::empty()) {
            return Err(Error::InvalidInput("tree must contain the empty sequence"));
        }
        for node in &nodes {
            if !domain.admits(node) {
                return Err(Error::InvalidInput("tree node outside its domain"));
            }
            if let Some(p) = node.parent() {
                if !nodes.contains(&p) {
                    return Err(Error::InvalidInput("tree is not prefix-closed"));
                }
            }
        }
        Ok(FiniteTree { domain, nodes })
    }

    /// The tree whose nodes are all prefixes of the given sequences.
    pub fn downward_closure(
        domain: TreeDomain,
        seqs: impl IntoIterator<Item = Seq>,
    ) -> Result<Self> {
        let mut nodes = BTreeSet::new();
        nodes.insert(Seq::empty());
        for s in seqs {
            for p in s.proper_prefixes() {
                nodes.insert(p);
            }
            nodes.insert(s);
        }
        FiniteTree::new(domain, nodes)
    }

    /// The single-node tree.
    pub fn trivial(domain: TreeDomain) -> Self {
        let mut nodes = BTreeSet::new();
        nodes.insert(Seq::empty());
        FiniteTree { domain, nodes }
    }

    /// Every node of the domain, up to its depth. Fails rather than
    /// materialize more than `EXPLICIT_NODE_BUDGET` nodes.
    pub fn full(domain: TreeDomain) -> Result<Self> {
        match domain.full_node_count() {
            Some(n) if n <= EXPLICIT_NODE_BUDGET as u64 => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    context: "full tree materialization",
                    at: domain.depth(),
                })
            }
        }
        let mut nodes = BTreeSet::new();
        let mut level: Vec<Seq> = Vec::new();
        level.push(Seq::empty());
        nodes.insert(Seq::empty());
        for depth in 0..domain.depth() {
            let width = domain.letters_at(depth);
            let mut next = Vec::with_capacity(level.len() * width);
            for node in &level {
                for x in 0..width {
                    let c = node.child(x as u8);
                    nodes.insert(c.clone());
                    next.push(c);
                }
            }
            level = next;
        }
        Ok(FiniteTree { domain, nodes })
    }

    pub fn nodes(&self) -> &BTreeSet<Seq> {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Maximal nodes in ascending order.
    pub fn branches(&self) -> Vec<Seq> {
        self.nodes
            .iter()
            .filter(|n| TreeView::is_maximal(self, n))
            .cloned()
            .collect()
    }

    /// The subtree of nodes comparable with `node`, which must be a node.
    pub fn subtree_through(&self, node: &Seq) -> Result<FiniteTree> {
        if !self.nodes.contains(node) {
            return Err(Error::InvalidInput("subtree root is not a node"));
        }
        let nodes = self
            .nodes
            .iter()
            .filter(|t| t.comparable(node))
            .cloned()
            .collect();
        Ok(FiniteTree {
            domain: self.domain,
            nodes,
        })
    }

    /// Union of node sets; domains must agree.
    pub fn union(&self, other: &FiniteTree) -> Result<FiniteTree> {
        if self.domain != *other.domain() {
            return Err(Error::InvalidInput("union of trees over different domains"));
        }
        let mut nodes = self.nodes.clone();
        nodes.extend(other.nodes.iter().cloned());
        Ok(FiniteTree {
            domain: self.domain,
            nodes,
        })
    }
}

impl TreeView for FiniteTree {
    fn domain(&self) -> &TreeDomain {
        &self.domain
    }

    fn contains(&self, node: &Seq) -> bool {
        self.nodes.contains(node)
    }

    fn successor_letters(&self, node: &Seq) -> Vec<u8> {
        let width = self.domain.letters_at(node.len());
        (0..width)
            .filter(|&x| self.nodes.contains(&node.child(x as u8)))
            .map(|x| x as u8)
            .collect()
    }
}

/// A tree over an accelerating domain that is fully branching below a
/// frontier: its nodes are the explicit `spine` together with every domain
/// node strictly extending a frontier node. This represents trees far too
/// large to list, such as the minimal accelerating tree of depth 12.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedTree {
    domain: TreeDomain,
    spine: BTreeSet<Seq>,
    frontier: BTreeSet<Seq>,
}

impl GradedTree {
    pub fn new(domain: TreeDomain, spine: BTreeSet<Seq>, frontier: BTreeSet<Seq>) -> Result<Self> {
        if !domain.is_accelerating() {
            return Err(Error::InvalidInput("graded tree needs an accelerating domain"));
        }
        if !spine.contains(&Seq::empty()) {
            return Err(Error::InvalidInput("tree must contain the empty sequence"));
        }
        for node in &spine {
            if !domain.admits(node) {
                return Err(Error::InvalidInput("tree node outside its domain"));
            }
            if let Some(p) = node.parent() {
                if !spine.contains(&p) {
                    return Err(Error::InvalidInput("tree is not prefix-closed"));
                }
            }
        }
        for f in &frontier {
            if !spine.contains(f) {
                return Err(Error::InvalidInput("frontier node outside the spine"));
            }
        }
        for node in &spine {
            if frontier.iter().any(|f| f.is_proper_prefix_of(node)) {
                return Err(Error::InvalidInput("spine continues below the frontier"));
            }
        }
        Ok(GradedTree {
            domain,
            spine,
            frontier,
        })
    }

    /// The full tree of the accelerating domain of the given depth.
    pub fn full(depth: usize) -> Result<Self> {
        let domain = TreeDomain::accelerating(depth)?;
        let mut spine = BTreeSet::new();
        spine.insert(Seq::empty());
        let mut frontier = BTreeSet::new();
        frontier.insert(Seq::empty());
        GradedTree::new(domain, spine, frontier)
    }

    /// The tree of all nodes comparable with `stem`, fully branching below it.
    pub fn through(depth: usize, stem: &Seq) -> Result<Self> {
        let domain = TreeDomain::accelerating(depth)?;
        if !domain.admits(stem) {
            return Err(Error::InvalidInput("stem outside its domain"));
        }
        let mut spine: BTreeSet<Seq> = stem.proper_prefixes().collect();
        spine.insert(stem.clone());
        let mut frontier = BTreeSet::new();
        frontier.insert(stem.clone());
        GradedTree::new(domain, spine, frontier)
    }

    pub fn spine(&self) -> &BTreeSet<Seq> {
        &self.spine
    }

    pub fn frontier(&self) -> &BTreeSet<Seq> {
        &self.frontier
    }

    /// The subtree of nodes comparable with `node`.
    pub fn subtree_through(&self, node: &Seq) -> Result<GradedTree> {
        if !self.contains(node) {
            return Err(Error::InvalidInput("subtree root is not a node"));
        }
        if self.spine.contains(node) {
            let spine: BTreeSet<Seq> = self
                .spine
                .iter()
                .filter(|t| t.comparable(node))
                .cloned()
                .collect();
            let frontier = self
                .frontier
                .iter()
                .filter(|f| f.comparable(node))
                .cloned()
                .collect();
            GradedTree::new(self.domain, spine, frontier)
        } else {
            GradedTree::through(self.domain.depth(), node)
        }
    }

    /// Total node count, if it fits in u64.
    pub fn node_count(&self) -> Option<u64> {
        let mut total = self.spine.len() as u64;
        for f in &self.frontier {
            // nodes strictly below f: widths multiply level by level
            let mut level_width: u64 = 1;
            for level in f.len()..self.domain.depth() {
                level_width = level_width.checked_mul(self.domain.letters_at(level) as u64)?;
                total = total.checked_add(level_width)?;
            }
        }
        Some(total)
    }

    pub fn to_explicit(&self) -> Result<FiniteTree> {
        match self.node_count() {
            Some(n) if n <= EXPLICIT_NODE_BUDGET as u64 => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    context: "graded tree materialization",
                    at: self.domain.depth(),
                })
            }
        }
        let mut nodes = self.spine.clone();
        for f in &self.frontier {
            let mut level: Vec<Seq> = Vec::new();
            level.push(f.clone());
            for depth in f.len()..self.domain.depth() {
                let width = self.domain.letters_at(depth);
                let mut next = Vec::with_capacity(level.len() * width);
                for node in &level {
                    for x in 0..width {
                        let c = node.child(x as u8);
                        nodes.insert(c.clone());
                        next.push(c);
                    }
                }
                level = next;
            }
        }
        FiniteTree::new(self.domain, nodes)
    }
}

impl TreeView for GradedTree {
    fn domain(&self) -> &TreeDomain {
        &self.domain
    }

    fn contains(&self, node: &Seq) -> bool {
        if self.spine.contains(node) {
            return true;
        }
        self.domain.admits(node) && self.frontier.iter().any(|f| f.is_proper_prefix_of(node))
    }

    fn successor_letters(&self, node: &Seq) -> Vec<u8> {
        if node.len() >= self.domain.depth() || !self.contains(node) {
            return Vec::new();
        }
        if self.spine.contains(node) && !self.frontier.contains(node) {
            let width = self.domain.letters_at(node.len());
            (0..width)
                .filter(|&x| self.spine.contains(&node.child(x as u8)))
                .map(|x| x as u8)
                .collect()
        } else {
            // frontier node or generated region: fully branching
            (0..self.domain.letters_at(node.len()))
                .map(|x| x as u8)
                .collect()
        }
    }
}

/// Either representation of a tree, with uniform read access.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeRep {
    Explicit(FiniteTree),
    Graded(GradedTree),
}

impl TreeRep {
    pub fn subtree_through(&self, node: &Seq) -> Result<TreeRep> {
        match self {
            TreeRep::Explicit(t) => Ok(TreeRep::Explicit(t.subtree_through(node)?)),
            TreeRep::Graded(t) => Ok(TreeRep::Graded(t.subtree_through(node)?)),
        }
    }

    pub fn to_explicit(&self) -> Result<FiniteTree> {
        match self {
            TreeRep::Explicit(t) => Ok(t.clone()),
            TreeRep::Graded(t) => t.to_explicit(),
        }
    }

    pub fn node_count(&self) -> Option<u64> {
        match self {
            TreeRep::Explicit(t) => Some(t.len() as u64),
            TreeRep::Graded(t) => t.node_count(),
        }
    }
}

impl TreeView for TreeRep {
    fn domain(&self) -> &TreeDomain {
        match self {
            TreeRep::Explicit(t) => t.domain(),
            TreeRep::Graded(t) => t.domain(),
        }
    }

    fn contains(&self, node: &Seq) -> bool {
        match self {
            TreeRep::Explicit(t) => t.contains(node),
            TreeRep::Graded(t) => t.contains(node),
        }
    }

    fn successor_letters(&self, node: &Seq) -> Vec<u8> {
        match self {
            TreeRep::Explicit(t) => t.successor_letters(node),
            TreeRep::Graded(t) => t.successor_letters(node),
        }
    }
}

/// The nodes just above the `n`-th split on each path through `stem`,
/// counting a split at `stem` itself. `n = 0` returns `stem` alone.
pub fn split_level<T: TreeView>(tree: &T, stem: &Seq, n: usize) -> Result<Vec<Seq>> {
    if !tree.contains(stem) {
        return Err(Error::InvalidInput("split level stem is not a node"));
    }
    if n == 0 {
        let mut out = Vec::new();
        out.push(stem.clone());
        return Ok(out);
    }
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Seq, usize)> = Vec::new();
    stack.push((stem.clone(), 0));
    while let Some((node, seen)) = stack.pop() {
        let letters = tree.successor_letters(&node);
        if letters.len() >= 2 {
            if seen + 1 == n {
                for x in letters {
                    out.insert(node.child(x));
                }
            } else {
                for x in letters {
                    stack.push((node.child(x), seen + 1));
                }
            }
        } else if letters.len() == 1 {
            stack.push((node.child(letters[0]), seen));
        }
    }
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn tri(depth: usize) -> TreeDomain {
        TreeDomain::uniform(3, depth).unwrap()
    }

    #[test]
    fn rejects_non_prefix_closed() {
        let mut nodes = BTreeSet::new();
        nodes.insert(Seq::empty());
        nodes.insert(Seq::from([0, 1]));
        assert_eq!(
            FiniteTree::new(tri(2), nodes),
            Err(Error::InvalidInput("tree is not prefix-closed"))
        );
    }

    #[test]
    fn rejects_missing_root() {
        let mut nodes = BTreeSet::new();
        nodes.insert(Seq::from([0]));
        assert!(FiniteTree::new(tri(2), nodes).is_err());
    }

    #[test]
    fn full_and_branches() {
        let t = FiniteTree::full(tri(2)).unwrap();
        assert_eq!(t.len(), 13);
        assert_eq!(t.branches().len(), 9);
        assert_eq!(t.successor_letters(&Seq::empty()), vec![0, 1, 2]);
        assert!(t.is_maximal(&Seq::from([2, 2])));
    }

    #[test]
    fn downward_closure_builds_tree() {
        let t = FiniteTree::downward_closure(tri(3), [Seq::from([0, 1, 2]), Seq::from([2])])
            .unwrap();
        assert_eq!(t.len(), 5);
        assert!(t.contains(&Seq::from([0, 1])));
        assert_eq!(t.branches(), vec![Seq::from([0, 1, 2]), Seq::from([2])]);
    }

    #[test]
    fn subtree_through_keeps_comparable() {
        let t = FiniteTree::full(tri(2)).unwrap();
        let s = t.subtree_through(&Seq::from([1])).unwrap();
        assert_eq!(s.len(), 5);
        assert!(s.contains(&Seq::from([1, 2])));
        assert!(!s.contains(&Seq::from([0])));
        assert!(t.subtree_through(&Seq::from([0, 0, 0])).is_err());
    }

    #[test]
    fn graded_full_matches_explicit() {
        let g = GradedTree::full(4).unwrap();
        assert_eq!(g.node_count(), Some(34));
        let e = g.to_explicit().unwrap();
        assert_eq!(e.len(), 34);
        for node in e.nodes() {
            assert!(g.contains(node));
            assert_eq!(g.successor_letters(node), e.successor_letters(node));
        }
        assert!(!g.contains(&Seq::from([0, 0, 0, 0, 0])));
        assert!(!g.contains(&Seq::from([0, 2])));
    }

    #[test]
    fn graded_through_stem() {
        let g = GradedTree::through(4, &Seq::from([0, 1])).unwrap();
        assert!(g.contains(&Seq::from([0])));
        assert!(!g.contains(&Seq::from([0, 0])));
        assert!(g.contains(&Seq::from([0, 1, 2, 3])));
        assert_eq!(g.successor_letters(&Seq::from([0])), vec![1]);
        assert_eq!(g.successor_letters(&Seq::from([0, 1])), vec![0, 1, 2]);
        // 3 comparable-with-stem + 3 + 3*4
        assert_eq!(g.node_count(), Some(18));
    }

    #[test]
    fn graded_depth_twelve_counts_without_materializing() {
        let g = GradedTree::full(12).unwrap();
        // sum of factorials 0! through 12!
        assert_eq!(g.node_count(), Some(522_956_314));
        assert!(g.to_explicit().is_err());
        assert!(g.contains(&Seq::from([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11])));
        assert_eq!(g.successor_letters(&Seq::from([0, 1, 2])).len(), 4);
    }

    #[test]
    fn split_levels_in_explicit_tree() {
        // root splits two ways; <0> runs unary to <0,0>, which splits
        let t = FiniteTree::downward_closure(
            tri(3),
            [
                Seq::from([0, 0, 0]),
                Seq::from([0, 0, 1]),
                Seq::from([1, 2]),
            ],
        )
        .unwrap();
        assert_eq!(
            split_level(&t, &Seq::empty(), 1).unwrap(),
            vec![Seq::from([0]), Seq::from([1])]
        );
        assert_eq!(
            split_level(&t, &Seq::empty(), 2).unwrap(),
            vec![Seq::from([0, 0, 0]), Seq::from([0, 0, 1])]
        );
        assert_eq!(
            split_level(&t, &Seq::from([1]), 1).unwrap(),
            Vec::<Seq>::new()
        );
        assert_eq!(
            split_level(&t, &Seq::from([1]), 0).unwrap(),
            vec![Seq::from([1])]
        );
    }

    #[test]
    fn split_levels_in_graded_tree() {
        let g = GradedTree::full(5).unwrap();
        // <0> is the first node with more than one successor
        assert_eq!(
            split_level(&g, &Seq::empty(), 1).unwrap(),
            vec![Seq::from([0, 0]), Seq::from([0, 1])]
        );
        assert_eq!(split_level(&g, &Seq::empty(), 2).unwrap().len(), 6);
    }
}
