use crate::classify::classify;
use crate::error::{Error, Result};
use crate::seq::Seq;
use crate::tree::{FiniteTree, GradedTree, TreeRep, TreeView, EXPLICIT_NODE_BUDGET};
use alloc::vec::Vec;

/// A stem together with an accelerating tree running through it: every node
/// of the tree is comparable with the stem, so the tree fans out only at or
/// beyond the stem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    stem: Seq,
    tree: TreeRep,
}

impl Condition {
    pub fn new(stem: Seq, tree: TreeRep) -> Result<Self> {
        if !tree.domain().is_accelerating() {
            return Err(Error::InvalidInput(
                "condition tree needs an accelerating domain",
            ));
        }
        if !tree.contains(&stem) {
            return Err(Error::InvalidInput("condition stem is not a node of its tree"));
        }
        if !tree_through_stem(&tree, &stem) {
            return Err(Error::InvalidInput("condition tree is not a tree through its stem"));
        }
        if !rep_is_accelerating(&tree) {
            return Err(Error::InvalidInput("condition tree is not accelerating"));
        }
        Ok(Condition { stem, tree })
    }

    pub fn stem(&self) -> &Seq {
        &self.stem
    }

    pub fn tree(&self) -> &TreeRep {
        &self.tree
    }
}

/// Whether every node of the tree is comparable with `stem`.
pub(crate) fn tree_through_stem(tree: &TreeRep, stem: &Seq) -> bool {
    match tree {
        TreeRep::Explicit(t) => t.nodes().iter().all(|n| n.comparable(stem)),
        TreeRep::Graded(g) => {
            g.spine().iter().all(|n| n.comparable(stem))
                && g.frontier().iter().all(|f| {
                    // a frontier strictly above the stem fans out into nodes
                    // incomparable with it as soon as some level is non-unary
                    stem.is_prefix_of(f)
                        || (f.is_prefix_of(stem) && stem.len() <= f.len().max(1))
                })
        }
    }
}

/// Accelerating check that works on either representation without
/// materializing the generated region.
pub(crate) fn rep_is_accelerating(tree: &TreeRep) -> bool {
    match tree {
        TreeRep::Explicit(t) => {
            let mut stack: Vec<(Seq, usize)> = Vec::new();
            stack.push((Seq::empty(), 0));
            while let Some((node, splits)) = stack.pop() {
                let letters = t.successor_letters(&node);
                let split = letters.len() >= 2;
                if split && letters.len() < splits + 2 {
                    return false;
                }
                let below = splits + usize::from(split);
                for x in letters {
                    stack.push((node.child(x), below));
                }
            }
            true
        }
        TreeRep::Graded(g) => {
            let mut stack: Vec<(Seq, usize)> = Vec::new();
            stack.push((Seq::empty(), 0));
            while let Some((node, splits)) = stack.pop() {
                if g.frontier().contains(&node) {
                    // below the frontier the level-d arity is d+1 and every
                    // level from max(len, 1) on splits, so the requirement
                    // collapses to a single bound on the splits above
                    if splits + 1 > node.len().max(1) {
                        return false;
                    }
                    continue;
                }
                let letters = g.successor_letters(&node);
                let split = letters.len() >= 2;
                if split && letters.len() < splits + 2 {
                    return false;
                }
                let below = splits + usize::from(split);
                for x in letters {
                    stack.push((node.child(x), below));
                }
            }
            true
        }
    }
}

/// The deterministic accelerating tree that splits as early as the grading
/// permits with the least legal arity: unary at the root, then every level
/// takes all letters its grading admits, which is exactly the minimum the
/// accelerating shape allows for that split.
pub fn build_minimal_accelerating(depth: usize) -> Result<TreeRep> {
    if depth < 2 {
        return Err(Error::InvalidInput(
            "minimal accelerating tree needs depth at least 2",
        ));
    }
    Ok(TreeRep::Graded(GradedTree::through(depth, &Seq::from([0]))?))
}

/// Extends the condition to one whose branches all avoid `avoided`: walks in
/// ascending node order to the first split of arity ≥ k+1 at or beyond the
/// stem and restricts the tree through its least successor that is not a node
/// of `avoided`. Since `avoided` is a k-tree, such a split always has an
/// absent successor, and the restricted branches all pass through it.
pub fn avoid_tree(cond: &Condition, avoided: &FiniteTree, k: usize) -> Result<Condition> {
    if k == 0 {
        return Err(Error::InvalidInput("avoidance arity must be at least 1"));
    }
    if !classify(avoided, k).is_k_tree {
        return Err(Error::InvalidInput("avoided tree is not a k-tree"));
    }
    let tree = cond.tree();
    if let TreeRep::Graded(g) = tree {
        let mut widest = 0usize;
        for node in g.spine() {
            if g.frontier().contains(node) {
                if node.len() < g.domain().depth() {
                    widest = widest.max(g.domain().depth());
                }
            } else {
                widest = widest.max(g.arity(node));
            }
        }
        if k + 1 > widest {
            return Err(Error::BudgetExceeded {
                context: "no split wide enough to avoid",
                at: k + 1,
            });
        }
    }
    let mut visited = 0usize;
    let mut stack: Vec<Seq> = Vec::new();
    stack.push(cond.stem().clone());
    while let Some(node) = stack.pop() {
        visited += 1;
        if visited > EXPLICIT_NODE_BUDGET {
            return Err(Error::BudgetExceeded {
                context: "avoidance walk",
                at: visited,
            });
        }
        let letters = tree.successor_letters(&node);
        if letters.len() >= k + 1 {
            for &x in &letters {
                let succ = node.child(x);
                if !avoided.contains(&succ) {
                    return Condition::new(succ.clone(), tree.subtree_through(&succ)?);
                }
            }
        }
        for &x in letters.iter().rev() {
            stack.push(node.child(x));
        }
    }
    Err(Error::BudgetExceeded {
        context: "no split wide enough to avoid",
        at: k + 1,
    })
}
