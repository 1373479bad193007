use crate::classify::classify;
use crate::domain::TreeDomain;
use crate::error::{Error, Result};
use crate::seq::Seq;
use crate::tree::{FiniteTree, TreeView, EXPLICIT_NODE_BUDGET};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

/// A table of guesses: for every history shorter than the horizon, a set of
/// 1 to k candidate next letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predictor {
    b: u8,
    k: usize,
    horizon: usize,
    table: BTreeMap<Seq, BTreeSet<u8>>,
}

impl Predictor {
    pub fn new(
        b: u8,
        k: usize,
        horizon: usize,
        table: BTreeMap<Seq, BTreeSet<u8>>,
    ) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidInput("predictor alphabet needs b >= 2"));
        }
        if k == 0 {
            return Err(Error::InvalidInput("predictor needs k >= 1"));
        }
        if horizon == 0 {
            return Err(Error::InvalidInput("predictor needs a positive horizon"));
        }
        let mut expected: u64 = 0;
        let mut level: u64 = 1;
        for _ in 0..horizon {
            expected = expected
                .checked_add(level)
                .ok_or(Error::BudgetExceeded {
                    context: "predictor table size overflows u64",
                    at: horizon,
                })?;
            level = level.checked_mul(b as u64).ok_or(Error::BudgetExceeded {
                context: "predictor table size overflows u64",
                at: horizon,
            })?;
        }
        if expected > EXPLICIT_NODE_BUDGET as u64 {
            return Err(Error::BudgetExceeded {
                context: "predictor table materialization",
                at: horizon,
            });
        }
        if table.len() as u64 != expected {
            return Err(Error::InvalidInput("predictor table must be total below the horizon"));
        }
        for (s, set) in &table {
            if s.len() >= horizon || s.letters().iter().any(|&x| x >= b) {
                return Err(Error::InvalidInput("predictor table key out of range"));
            }
            if set.is_empty() || set.len() > k {
                return Err(Error::InvalidInput("predictor entry size must be 1..=k"));
            }
            if set.iter().any(|&x| x >= b) {
                return Err(Error::InvalidInput("predictor entry letter out of range"));
            }
        }
        Ok(Predictor {
            b,
            k,
            horizon,
            table,
        })
    }

    /// The predictor that always guesses the same set.
    pub fn constant(b: u8, k: usize, horizon: usize, set: &BTreeSet<u8>) -> Result<Self> {
        let mut table = BTreeMap::new();
        let mut level: Vec<Seq> = Vec::new();
        level.push(Seq::empty());
        for _ in 0..horizon {
            let mut next = Vec::new();
            for s in &level {
                table.insert(s.clone(), set.clone());
                for x in 0..b {
                    next.push(s.child(x));
                }
            }
            level = next;
        }
        Predictor::new(b, k, horizon, table)
    }

    pub fn alphabet(&self) -> u8 {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn table(&self) -> &BTreeMap<Seq, BTreeSet<u8>> {
        &self.table
    }

    /// The guess set for a history; total below the horizon by construction.
    pub fn guess(&self, history: &Seq) -> &BTreeSet<u8> {
        &self.table[history]
    }
}

/// Outcome of matching one function against a predictor: the verdict for the
/// given grace point, plus the least grace point that would succeed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictionVerdict {
    pub predicted: bool,
    /// Least m so that every position after m is guessed. Position 0 is
    /// outside every window, so a miss-free function has grace 0.
    pub grace: Option<usize>,
    /// Least missed position after the given grace point, when not predicted.
    pub first_escape: Option<usize>,
}

/// Match `f` against the predictor with grace point `m`: predicted iff
/// every position in (m, horizon) lands in the table's guess set.
pub fn predicts(predictor: &Predictor, f: &Seq, m: usize) -> Result<PredictionVerdict> {
    if f.len() != predictor.horizon {
        return Err(Error::InvalidInput("function length must equal the horizon"));
    }
    if f.letters().iter().any(|&x| x >= predictor.b) {
        return Err(Error::InvalidInput("function letter out of range"));
    }
    if m >= predictor.horizon {
        return Err(Error::InvalidInput("grace point must be below the horizon"));
    }
    let misses: Vec<usize> = (1..predictor.horizon)
        .filter(|&n| !predictor.guess(&f.restrict(n)).contains(&f.letter(n)))
        .collect();
    let first_escape = misses.iter().copied().find(|&n| n > m);
    Ok(PredictionVerdict {
        predicted: first_escape.is_none(),
        grace: Some(misses.last().copied().unwrap_or(0)),
        first_escape,
    })
}

/// One leveled tree per stem of length m+1: the stem's prefixes plus every
/// extension that follows the table after position m. Branch sets at the
/// horizon partition the predicted functions by their first m+1 letters.
pub fn predictor_to_trees(predictor: &Predictor, m: usize) -> Result<Vec<FiniteTree>> {
    if m >= predictor.horizon {
        return Err(Error::InvalidInput("grace point must be below the horizon"));
    }
    let domain = TreeDomain::uniform(predictor.b, predictor.horizon)?;
    let mut stems: Vec<Seq> = Vec::new();
    stems.push(Seq::empty());
    for _ in 0..=m {
        let mut next = Vec::new();
        for s in &stems {
            for x in 0..predictor.b {
                next.push(s.child(x));
            }
        }
        stems = next;
        if stems.len() > EXPLICIT_NODE_BUDGET {
            return Err(Error::BudgetExceeded {
                context: "stem enumeration",
                at: m,
            });
        }
    }
    let mut out = Vec::with_capacity(stems.len());
    let mut total_nodes = 0usize;
    for stem in stems {
        let mut nodes: BTreeSet<Seq> = stem.proper_prefixes().collect();
        nodes.insert(stem.clone());
        let mut level: Vec<Seq> = Vec::new();
        level.push(stem.clone());
        for _ in (m + 1)..predictor.horizon {
            let mut next = Vec::new();
            for t in &level {
                for &x in predictor.guess(t) {
                    let c = t.child(x);
                    nodes.insert(c.clone());
                    next.push(c);
                }
            }
            level = next;
        }
        total_nodes += nodes.len();
        if total_nodes > EXPLICIT_NODE_BUDGET {
            return Err(Error::BudgetExceeded {
                context: "predictor tree materialization",
                at: m,
            });
        }
        out.push(FiniteTree::new(domain, nodes)?);
    }
    Ok(out)
}

/// Read a predictor off a leveled tree whose nodes split at most k ways:
/// guesses on the tree are its successor letters, guesses off the tree
/// default to the least min(k, b) letters.
pub fn tree_to_predictor(tree: &FiniteTree, k: usize) -> Result<Predictor> {
    let domain = *tree.domain();
    let b = domain
        .base()
        .ok_or(Error::InvalidInput("predictor source tree must be uniform"))?;
    let report = classify(tree, k);
    if !report.is_k_tree {
        return Err(Error::InvalidInput("predictor source tree splits too wide"));
    }
    if !report.is_leveled {
        return Err(Error::InvalidInput("predictor source tree must be leveled"));
    }
    let horizon = domain.depth();
    let default_width = k.min(b as usize).max(1) as u8;
    let default: BTreeSet<u8> = (0..default_width).collect();
    let mut table = BTreeMap::new();
    let mut level: Vec<Seq> = Vec::new();
    level.push(Seq::empty());
    for depth in 0..horizon {
        let mut next = Vec::with_capacity(level.len() * b as usize);
        for s in &level {
            let set = if tree.contains(s) {
                tree.successor_letters(s).into_iter().collect()
            } else {
                default.clone()
            };
            table.insert(s.clone(), set);
            for x in 0..b {
                next.push(s.child(x));
            }
        }
        level = next;
        if table.len() + level.len() > EXPLICIT_NODE_BUDGET {
            return Err(Error::BudgetExceeded {
                context: "predictor table materialization",
                at: depth,
            });
        }
    }
    Predictor::new(b, k, horizon, table)
}

/// Lexicographically least function of length `horizon` over `b` letters
/// that no listed predictor predicts at grace `m`, scanning all b^horizon
/// candidates. Every predictor must share `b` and `horizon`.
pub fn find_evader(
    b: u8,
    horizon: usize,
    predictors: &[Predictor],
    m: usize,
) -> Result<Option<Seq>> {
    if b < 2 || horizon == 0 {
        return Err(Error::InvalidInput("evader search needs b >= 2 and a positive horizon"));
    }
    if m >= horizon {
        return Err(Error::InvalidInput("grace point must be below the horizon"));
    }
    for p in predictors {
        if p.b != b || p.horizon != horizon {
            return Err(Error::InvalidInput("predictors must share alphabet and horizon"));
        }
    }
    let count = (0..horizon).try_fold(1u64, |acc, _| acc.checked_mul(b as u64));
    match count {
        Some(c) if c <= EXPLICIT_NODE_BUDGET as u64 => {}
        _ => {
            return Err(Error::BudgetExceeded {
                context: "evader enumeration",
                at: horizon,
            })
        }
    }
    let mut letters = Vec::new();
    letters.resize(horizon, 0u8);
    loop {
        let f = Seq::from(letters.clone());
        let evades = predictors
            .iter()
            .map(|p| predicts(p, &f, m).map(|v| !v.predicted))
            .try_fold(true, |acc, r| r.map(|x| acc && x))?;
        if evades {
            return Ok(Some(f));
        }
        // increment as a base-b counter, most significant first
        let mut pos = horizon;
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            if letters[pos] + 1 < b {
                letters[pos] += 1;
                break;
            }
            letters[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn constant_set(letters: &[u8]) -> BTreeSet<u8> {
        letters.iter().copied().collect()
    }

    #[test]
    fn table_must_be_total_and_sized() {
        let mut table = BTreeMap::new();
        table.insert(Seq::empty(), constant_set(&[0]));
        assert!(Predictor::new(2, 1, 2, table.clone()).is_err());
        table.insert(Seq::from([0]), constant_set(&[0]));
        table.insert(Seq::from([1]), constant_set(&[0, 1]));
        assert!(Predictor::new(2, 1, 2, table.clone()).is_err()); // entry too big
        table.insert(Seq::from([1]), constant_set(&[1]));
        assert!(Predictor::new(2, 1, 2, table).is_ok());
    }

    #[test]
    fn constant_zero_predictor_verdicts() {
        let p = Predictor::constant(2, 1, 3, &constant_set(&[0])).unwrap();
        let hit = predicts(&p, &Seq::from([1, 0, 0]), 0).unwrap();
        assert!(hit.predicted);
        assert_eq!(hit.grace, Some(0));
        assert_eq!(hit.first_escape, None);
        let miss = predicts(&p, &Seq::from([0, 1, 0]), 0).unwrap();
        assert!(!miss.predicted);
        assert_eq!(miss.first_escape, Some(1));
        assert_eq!(miss.grace, Some(1));
        let late = predicts(&p, &Seq::from([0, 1, 0]), 1).unwrap();
        assert!(late.predicted);
    }

    #[test]
    fn predicted_count_matches_closed_form() {
        let p = Predictor::constant(3, 2, 3, &constant_set(&[0, 1])).unwrap();
        let mut count = 0;
        for i in 0..27 {
            let f = Seq::from([(i / 9 % 3) as u8, (i / 3 % 3) as u8, (i % 3) as u8]);
            if predicts(&p, &f, 0).unwrap().predicted {
                count += 1;
            }
        }
        assert_eq!(count, 12); // 3 * 2^2
    }

    #[test]
    fn chains_from_singleton_tables() {
        let p = Predictor::constant(3, 1, 3, &constant_set(&[0])).unwrap();
        let trees = predictor_to_trees(&p, 0).unwrap();
        assert_eq!(trees.len(), 3);
        for (s, tree) in trees.iter().enumerate() {
            assert_eq!(tree.branches(), vec![Seq::from([s as u8, 0, 0])]);
        }
    }

    #[test]
    fn tree_union_equals_predicted_set() {
        let p = Predictor::constant(3, 2, 2, &constant_set(&[0, 1])).unwrap();
        let trees = predictor_to_trees(&p, 0).unwrap();
        assert_eq!(trees.len(), 3);
        let mut union = BTreeSet::new();
        for tree in &trees {
            assert!(classify(tree, 2).is_k_tree);
            assert!(classify(tree, 2).is_leveled);
            for f in tree.branches() {
                assert_eq!(f.len(), 2);
                union.insert(f);
            }
        }
        assert_eq!(union.len(), 6);
        for i in 0..9 {
            let f = Seq::from([(i / 3 % 3) as u8, (i % 3) as u8]);
            assert_eq!(
                union.contains(&f),
                predicts(&p, &f, 0).unwrap().predicted
            );
        }
    }

    #[test]
    fn vacuous_grace_covers_everything() {
        let p = Predictor::constant(2, 1, 2, &constant_set(&[1])).unwrap();
        let trees = predictor_to_trees(&p, 1).unwrap();
        assert_eq!(trees.len(), 4);
        assert!(trees.iter().all(|t| t.branches().len() == 1));
    }

    #[test]
    fn round_trip_through_a_tree() {
        let tree = FiniteTree::downward_closure(
            TreeDomain::uniform(3, 2).unwrap(),
            [
                Seq::from([0, 0]),
                Seq::from([0, 1]),
                Seq::from([1, 0]),
                Seq::from([1, 1]),
            ],
        )
        .unwrap();
        let p = tree_to_predictor(&tree, 2).unwrap();
        for f in tree.branches() {
            assert!(predicts(&p, &f, 0).unwrap().predicted);
        }
        assert_eq!(p.guess(&Seq::from([2])), &constant_set(&[0, 1])); // off tree
    }

    #[test]
    fn unleveled_or_wide_trees_are_rejected() {
        let chain_short = FiniteTree::downward_closure(
            TreeDomain::uniform(2, 2).unwrap(),
            [Seq::from([0, 0]), Seq::from([1])],
        )
        .unwrap();
        assert!(tree_to_predictor(&chain_short, 1).is_err());
        let wide = FiniteTree::full(TreeDomain::uniform(3, 1).unwrap()).unwrap();
        assert!(tree_to_predictor(&wide, 2).is_err());
    }

    #[test]
    fn evader_is_lex_least() {
        let p = Predictor::constant(2, 1, 2, &constant_set(&[0])).unwrap();
        let evader = find_evader(2, 2, &[p], 0).unwrap();
        assert_eq!(evader, Some(Seq::from([0, 1])));
    }

    #[test]
    fn covering_pair_leaves_no_evader() {
        let p1 = Predictor::constant(3, 2, 2, &constant_set(&[0, 1])).unwrap();
        let p2 = Predictor::constant(3, 2, 2, &constant_set(&[1, 2])).unwrap();
        assert_eq!(find_evader(3, 2, &[p1, p2], 0).unwrap(), None);
    }

    #[test]
    fn empty_list_yields_zeros() {
        assert_eq!(
            find_evader(2, 2, &[], 0).unwrap(),
            Some(Seq::from([0, 0]))
        );
    }

    #[test]
    fn full_tree_predicts_everything() {
        let tree = FiniteTree::full(TreeDomain::uniform(2, 3).unwrap()).unwrap();
        let p = tree_to_predictor(&tree, 2).unwrap();
        assert_eq!(find_evader(2, 3, &[p], 0).unwrap(), None);
    }
}
