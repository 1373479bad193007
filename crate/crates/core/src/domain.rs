use crate::error::{Error, Result};
use crate::seq::Seq;

/// How many letters are available at each level of a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    /// Every level offers letters `0..base`.
    Uniform { base: u8 },
    /// Level `n` offers letters `0..=n`, so arity grows with depth.
    Accelerating,
}

/// The ambient space a tree lives in: a grading plus a depth bound.
/// Nodes are sequences of length at most `depth` whose letter at position
/// `n` is admitted at level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TreeDomain {
    grading: Grading,
    depth: usize,
}

impl TreeDomain {
    pub fn uniform(base: u8, depth: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidInput("uniform domain needs base >= 2"));
        }
        if depth == 0 {
            return Err(Error::InvalidInput("domain needs depth >= 1"));
        }
        Ok(TreeDomain {
            grading: Grading::Uniform { base },
            depth,
        })
    }

    pub fn accelerating(depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidInput("domain needs depth >= 1"));
        }
        if depth > 256 {
            return Err(Error::BudgetExceeded {
                context: "accelerating level width exceeds the letter type",
                at: depth,
            });
        }
        Ok(TreeDomain {
            grading: Grading::Accelerating,
            depth,
        })
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_accelerating(&self) -> bool {
        matches!(self.grading, Grading::Accelerating)
    }

    pub fn base(&self) -> Option<u8> {
        match self.grading {
            Grading::Uniform { base } => Some(base),
            Grading::Accelerating => None,
        }
    }

    /// Number of letters available for the position at `level`.
    pub fn letters_at(&self, level: usize) -> usize {
        match self.grading {
            Grading::Uniform { base } => base as usize,
            Grading::Accelerating => level + 1,
        }
    }

    /// Whether the sequence is a node of this domain.
    pub fn admits(&self, seq: &Seq) -> bool {
        seq.len() <= self.depth
            && seq
                .letters()
                .iter()
                .enumerate()
                .all(|(level, &x)| (x as usize) < self.letters_at(level))
    }

    /// Same domain with a different depth bound.
    pub fn with_depth(&self, depth: usize) -> Result<Self> {
        match self.grading {
            Grading::Uniform { base } => TreeDomain::uniform(base, depth),
            Grading::Accelerating => TreeDomain::accelerating(depth),
        }
    }

    /// Number of nodes of the full tree over this domain, if it fits in u64.
    pub fn full_node_count(&self) -> Option<u64> {
        let mut total: u64 = 1;
        let mut level_width: u64 = 1;
        for level in 0..self.depth {
            level_width = level_width.checked_mul(self.letters_at(level) as u64)?;
            total = total.checked_add(level_width)?;
        }
        Some(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_admits() {
        let d = TreeDomain::uniform(3, 2).unwrap();
        assert!(d.admits(&Seq::empty()));
        assert!(d.admits(&Seq::from([2, 0])));
        assert!(!d.admits(&Seq::from([3])));
        assert!(!d.admits(&Seq::from([0, 0, 0])));
        assert_eq!(d.letters_at(5), 3);
    }

    #[test]
    fn accelerating_admits() {
        let d = TreeDomain::accelerating(4).unwrap();
        assert!(d.admits(&Seq::from([0])));
        assert!(!d.admits(&Seq::from([1])));
        assert!(d.admits(&Seq::from([0, 1, 2, 3])));
        assert!(!d.admits(&Seq::from([0, 2])));
        assert_eq!(d.letters_at(0), 1);
        assert_eq!(d.letters_at(3), 4);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(TreeDomain::uniform(1, 3).is_err());
        assert!(TreeDomain::uniform(2, 0).is_err());
        assert!(TreeDomain::accelerating(0).is_err());
        assert!(TreeDomain::accelerating(300).is_err());
    }

    #[test]
    fn node_counts() {
        assert_eq!(TreeDomain::uniform(3, 2).unwrap().full_node_count(), Some(13));
        assert_eq!(TreeDomain::uniform(2, 3).unwrap().full_node_count(), Some(15));
        // 1 + 1 + 2 + 6 + 24
        assert_eq!(TreeDomain::accelerating(4).unwrap().full_node_count(), Some(34));
    }
}
