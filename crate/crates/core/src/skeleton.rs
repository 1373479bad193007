use crate::error::{Error, Result};
use crate::seq::Seq;
use crate::tree::{FiniteTree, TreeView};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// The bijection between the branches of a k-branching tree and the words
/// `k^d`, where `d` is the common number of splits per branch. Unary runs are
/// contracted; at each split the word records the rank of the chosen
/// successor in ascending letter order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Skeleton {
    k: usize,
    split_depth: usize,
    to_word: BTreeMap<Seq, Seq>,
    to_branch: BTreeMap<Seq, Seq>,
}

impl Skeleton {
    /// Requires every split to have exactly `k` successors and every branch
    /// to pass the same number of splits.
    pub fn of(tree: &FiniteTree, k: usize) -> Result<Skeleton> {
        if k < 2 {
            return Err(Error::NotSkeletal("skeleton needs k >= 2"));
        }
        let mut to_word = BTreeMap::new();
        let mut split_depth = None;
        let mut stack: Vec<(Seq, Seq)> = Vec::new();
        stack.push((Seq::empty(), Seq::empty()));
        while let Some((node, word)) = stack.pop() {
            let letters = tree.successor_letters(&node);
            match letters.len() {
                0 => {
                    match split_depth {
                        None => split_depth = Some(word.len()),
                        Some(d) if d == word.len() => {}
                        Some(_) => {
                            return Err(Error::NotSkeletal(
                                "branches pass different numbers of splits",
                            ))
                        }
                    }
                    to_word.insert(node, word);
                }
                1 => stack.push((node.child(letters[0]), word)),
                a if a == k => {
                    for (rank, x) in letters.into_iter().enumerate() {
                        stack.push((node.child(x), word.child(rank as u8)));
                    }
                }
                _ => return Err(Error::NotSkeletal("split without exactly k successors")),
            }
        }
        let to_branch: BTreeMap<Seq, Seq> =
            to_word.iter().map(|(b, w)| (w.clone(), b.clone())).collect();
        Ok(Skeleton {
            k,
            split_depth: split_depth.unwrap_or(0),
            to_word,
            to_branch,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The common number of splits per branch.
    pub fn split_depth(&self) -> usize {
        self.split_depth
    }

    pub fn word_of(&self, branch: &Seq) -> Option<&Seq> {
        self.to_word.get(branch)
    }

    pub fn branch_of(&self, word: &Seq) -> Option<&Seq> {
        self.to_branch.get(word)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Seq, &Seq)> {
        self.to_word.iter()
    }
}
