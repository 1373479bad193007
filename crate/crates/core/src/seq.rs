use alloc::vec::Vec;
use core::fmt;

/// A finite sequence of letters, the nodes of every tree in this crate.
///
/// The derived order compares letters left to right, with a proper prefix
/// sorting before its extensions. All set-valued results use this order, so
/// iterating a node set visits the tree in preorder.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seq(Vec<u8>);

impl Seq {
    pub fn empty() -> Self {
        Seq(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn letter(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    /// The prefix of length `len`. Panics if `len` exceeds the length.
    pub fn restrict(&self, len: usize) -> Seq {
        assert!(len <= self.0.len(), "restriction beyond length");
        Seq(self.0[..len].to_vec())
    }

    pub fn child(&self, letter: u8) -> Seq {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.extend_from_slice(&self.0);
        v.push(letter);
        Seq(v)
    }

    pub fn parent(&self) -> Option<Seq> {
        if self.0.is_empty() {
            None
        } else {
            Some(Seq(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn concat(&self, tail: &Seq) -> Seq {
        let mut v = Vec::with_capacity(self.0.len() + tail.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&tail.0);
        Seq(v)
    }

    pub fn is_prefix_of(&self, other: &Seq) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn is_proper_prefix_of(&self, other: &Seq) -> bool {
        other.0.len() > self.0.len() && self.is_prefix_of(other)
    }

    /// Whether one sequence extends the other (in either direction).
    pub fn comparable(&self, other: &Seq) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// All proper prefixes, shortest first, starting with the empty sequence.
    pub fn proper_prefixes(&self) -> impl Iterator<Item = Seq> + '_ {
        (0..self.0.len()).map(move |l| self.restrict(l))
    }
}

impl From<Vec<u8>> for Seq {
    fn from(v: Vec<u8>) -> Self {
        Seq(v)
    }
}

impl From<&[u8]> for Seq {
    fn from(s: &[u8]) -> Self {
        Seq(s.to_vec())
    }
}

impl<const N: usize> From<[u8; N]> for Seq {
    fn from(s: [u8; N]) -> Self {
        Seq(s.to_vec())
    }
}

impl fmt::Debug for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn prefix_first_order() {
        let empty = Seq::empty();
        let zero = Seq::from([0]);
        let zero_two = Seq::from([0, 2]);
        let one = Seq::from([1]);
        assert!(empty < zero);
        assert!(zero < zero_two);
        assert!(zero_two < one);
        let mut v = vec![one.clone(), zero_two.clone(), empty.clone(), zero.clone()];
        v.sort();
        assert_eq!(v, vec![empty, zero, zero_two, one]);
    }

    #[test]
    fn prefix_relations() {
        let a = Seq::from([0, 1]);
        let b = Seq::from([0, 1, 2]);
        assert!(a.is_prefix_of(&b));
        assert!(a.is_proper_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!(a.comparable(&b));
        assert!(!Seq::from([1]).comparable(&a));
        assert!(a.is_prefix_of(&a));
        assert!(!a.is_proper_prefix_of(&a));
    }

    #[test]
    fn navigation() {
        let a = Seq::from([0, 1]);
        assert_eq!(a.child(2), Seq::from([0, 1, 2]));
        assert_eq!(a.parent(), Some(Seq::from([0])));
        assert_eq!(Seq::empty().parent(), None);
        assert_eq!(a.restrict(1), Seq::from([0]));
        assert_eq!(
            a.proper_prefixes().collect::<Vec<_>>(),
            vec![Seq::empty(), Seq::from([0])]
        );
    }
}
