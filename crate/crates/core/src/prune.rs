use crate::classify::classify;
use crate::condition::Condition;
use crate::domain::TreeDomain;
use crate::error::{Error, Result};
use crate::extraction::{extract_2tree, FunctionFamily};
use crate::name::DecidedName;
use crate::seq::Seq;
use crate::tree::{FiniteTree, TreeRep, TreeView};
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

const SELECTION_BUDGET: usize = 1_000_000;

/// One selected pool successor together with the unary walk to the node
/// where its value was read off.
pub(crate) struct KeptCandidate {
    pub successor: Seq,
    pub chain: Vec<Seq>,
    pub rho: Seq,
}

/// What one round keeps below a single frontier node: the unary walk to the
/// pool split, the pool node itself, and the selected successors.
pub(crate) struct StemKeep {
    pub chain: Vec<Seq>,
    pub pool: Seq,
    pub kept: Vec<KeptCandidate>,
}

pub(crate) struct RoundOutcome {
    pub decision_length: usize,
    pub keeps: Vec<StemKeep>,
    pub cover: FiniteTree,
}

/// Inputs of one pruning round over one coordinate tree. `stems` are the
/// distinct frontier nodes of that tree, `group_stem` maps each value group
/// to its stem, and `label` reads the value a group decides once the tree
/// is walked to the given node.
pub(crate) struct RoundInput<'a, L: Fn(usize, &Seq) -> Seq> {
    pub tree: &'a TreeRep,
    pub stems: &'a [Seq],
    pub group_stem: &'a [usize],
    pub label: L,
    pub keep: usize,
    /// Keep every pool successor instead of `keep` of them.
    pub keep_all: bool,
    pub want: u64,
    /// Cap on how many pool successors enter the candidate slots.
    pub width_cap: u64,
    pub guard: usize,
    pub target: usize,
    pub output_alphabet: u8,
    pub cover: &'a FiniteTree,
    pub round: usize,
}

/// Leftmost walk from `from` (inclusive): the first node of arity ≥ `want`
/// if the path has one, otherwise its shallowest node of maximal arity.
/// Returns the nodes strictly between `from` and the chosen pool, and the
/// pool itself.
pub(crate) fn descend_to_pool(tree: &TreeRep, from: &Seq, want: u64) -> (Vec<Seq>, Seq) {
    let mut path: Vec<Seq> = Vec::new();
    path.push(from.clone());
    loop {
        let node = path.last().unwrap();
        let letters = tree.successor_letters(node);
        if letters.len() as u64 >= want {
            break;
        }
        match letters.first() {
            Some(&x) => {
                let next = node.child(x);
                path.push(next);
            }
            None => break,
        }
    }
    let reached = path.last().unwrap();
    let pool = if tree.arity(reached) as u64 >= want {
        reached.clone()
    } else {
        let mut best = path[0].clone();
        let mut best_arity = tree.arity(&best);
        for node in &path[1..] {
            let arity = tree.arity(node);
            if arity > best_arity {
                best = node.clone();
                best_arity = arity;
            }
        }
        best
    };
    let chain = path
        .iter()
        .filter(|n| from.is_proper_prefix_of(n) && n.is_proper_prefix_of(&pool))
        .cloned()
        .collect();
    (chain, pool)
}

/// Leftmost walk from `from` (inclusive) to the first node satisfying `ok`,
/// returning the nodes strictly in between and the stop node.
pub(crate) fn descend_until<F: Fn(&Seq) -> bool>(
    tree: &TreeRep,
    from: &Seq,
    ok: F,
) -> Result<(Vec<Seq>, Seq)> {
    let mut node = from.clone();
    let mut chain: Vec<Seq> = Vec::new();
    loop {
        if ok(&node) {
            return Ok((chain, node));
        }
        match tree.successor_letters(&node).first() {
            Some(&x) => {
                if &node != from {
                    chain.push(node.clone());
                }
                node = node.child(x);
            }
            None => {
                return Err(Error::Undecided(
                    "name cannot decide the round's common length",
                ))
            }
        }
    }
}

pub(crate) fn cover_with(values: &[Seq], cover: &FiniteTree) -> Result<FiniteTree> {
    let closure = FiniteTree::downward_closure(*cover.domain(), values.iter().cloned())?;
    cover.union(&closure)
}

fn advance_subset(subset: &mut [usize], width: usize) -> bool {
    let n = subset.len();
    let mut i = n;
    while i > 0 {
        i -= 1;
        if subset[i] < width - (n - i) {
            subset[i] += 1;
            for j in i + 1..n {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Pick `keep` slots out of `0..width` so that every group's values at those
/// slots extend `cover` to a tree still within the branching bound. An exact
/// single-group pool goes through the pigeonhole selection first; otherwise,
/// and when that fails, the lexicographically first valid subset wins.
fn select_slots(
    values: &[Vec<Seq>],
    keep: usize,
    width: usize,
    exact_pool: bool,
    output_alphabet: u8,
    decision_length: usize,
    cover: &FiniteTree,
    round: usize,
) -> Result<(Vec<usize>, FiniteTree)> {
    let k = output_alphabet as usize - 1;
    if exact_pool && values.len() == 1 {
        if let Ok(family) = FunctionFamily::new(output_alphabet, decision_length, values[0].clone())
        {
            if let Ok(sel) = extract_2tree(&family, keep as u32) {
                let chosen: Vec<Seq> = sel.selected.iter().map(|&i| values[0][i].clone()).collect();
                let extended = cover_with(&chosen, cover)?;
                if classify(&extended, k).is_k_tree {
                    return Ok((sel.selected, extended));
                }
            }
        }
    }
    let mut subset: Vec<usize> = (0..keep).collect();
    let mut examined = 0usize;
    loop {
        examined += 1;
        if examined > SELECTION_BUDGET {
            return Err(Error::BudgetExceeded {
                context: "selection search",
                at: round,
            });
        }
        let chosen: Vec<Seq> = values
            .iter()
            .flat_map(|row| subset.iter().map(|&i| row[i].clone()))
            .collect();
        let extended = cover_with(&chosen, cover)?;
        if classify(&extended, k).is_k_tree {
            return Ok((subset, extended));
        }
        if !advance_subset(&mut subset, width) {
            break;
        }
    }
    Err(Error::SelectionFailed { round })
}

/// One round: walk each stem to its pool split, read every group's candidate
/// values at a common decision length, and keep the first selection whose
/// values extend the cover within the branching bound.
pub(crate) fn run_round<L: Fn(usize, &Seq) -> Seq>(input: RoundInput<L>) -> Result<RoundOutcome> {
    let groups = input.group_stem.len();
    if input.stems.is_empty() || groups == 0 {
        return Err(Error::InvalidInput("round needs at least one stem"));
    }
    let mut chains: Vec<Vec<Seq>> = Vec::new();
    let mut pools: Vec<Seq> = Vec::new();
    for stem in input.stems {
        let (chain, pool) = descend_to_pool(input.tree, stem, input.want);
        chains.push(chain);
        pools.push(pool);
    }
    let mut width = usize::MAX;
    for pool in &pools {
        width = width.min((input.tree.arity(pool) as u64).min(input.width_cap) as usize);
    }
    let keep = if input.keep_all { width } else { input.keep };
    if width < keep || keep < 2 {
        return Err(Error::BudgetExceeded {
            context: "pool too narrow for the round",
            at: input.round,
        });
    }
    let mut successors: Vec<Vec<Seq>> = Vec::new();
    for pool in &pools {
        let letters = input.tree.successor_letters(pool);
        successors.push(letters[..width].iter().map(|&x| pool.child(x)).collect());
    }

    let mut longest = 0usize;
    for g in 0..groups {
        for s in &successors[input.group_stem[g]] {
            longest = longest.max((input.label)(g, s).len());
        }
    }
    let decision_length = input.target.min((input.guard + 1).max(longest));

    let mut candidates: Vec<Vec<(Vec<Seq>, Seq)>> = Vec::new();
    for (stem_idx, row) in successors.iter().enumerate() {
        let members: Vec<usize> = (0..groups)
            .filter(|&g| input.group_stem[g] == stem_idx)
            .collect();
        let mut walked = Vec::new();
        for s in row {
            walked.push(descend_until(input.tree, s, |node| {
                members
                    .iter()
                    .all(|&g| (input.label)(g, node).len() >= decision_length)
            })?);
        }
        candidates.push(walked);
    }

    let mut values: Vec<Vec<Seq>> = Vec::new();
    for g in 0..groups {
        let row = &candidates[input.group_stem[g]];
        values.push(
            row.iter()
                .map(|(_, rho)| (input.label)(g, rho).restrict(decision_length))
                .collect(),
        );
    }

    let exact_pool = groups == 1 && width as u64 == input.want;
    let (slots, cover) = select_slots(
        &values,
        keep,
        width,
        exact_pool,
        input.output_alphabet,
        decision_length,
        input.cover,
        input.round,
    )?;

    let mut keeps = Vec::new();
    for (stem_idx, row) in candidates.into_iter().enumerate() {
        let mut kept = Vec::new();
        for (i, (chain, rho)) in row.into_iter().enumerate() {
            if slots.contains(&i) {
                kept.push(KeptCandidate {
                    successor: successors[stem_idx][i].clone(),
                    chain,
                    rho,
                });
            }
        }
        keeps.push(StemKeep {
            chain: core::mem::take(&mut chains[stem_idx]),
            pool: pools[stem_idx].clone(),
            kept,
        });
    }
    Ok(RoundOutcome {
        decision_length,
        keeps,
        cover,
    })
}

/// A pruned condition together with the small tree its decided values all
/// run through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneResult {
    pub pruned: Condition,
    pub cover: FiniteTree,
}

/// Prunes the name's condition round by round. Round r walks every frontier
/// node of the tree built so far to a pool split, keeps r+2 of its
/// successors whose decided values extend the cover within the branching
/// bound of the output alphabet, and makes the connecting paths unary. A
/// final walk decides every remaining branch to the full target length.
pub fn prune_to_cover(name: &DecidedName, target_splits: usize) -> Result<PruneResult> {
    if target_splits == 0 {
        return Err(Error::InvalidInput("pruning needs at least one output split"));
    }
    let out_b = name.output_alphabet();
    let target = name.target_length();
    let tree = name.condition().tree();
    let stem = name.condition().stem();
    let mut cover = FiniteTree::trivial(TreeDomain::uniform(out_b, target)?);
    let mut spine: BTreeSet<Seq> = stem.proper_prefixes().collect();
    spine.insert(stem.clone());
    let mut frontier: Vec<Seq> = Vec::new();
    frontier.push(stem.clone());
    let mut guard = 0usize;
    for round in 0..target_splits {
        let keep = round + 2;
        let want = (out_b as u64).checked_pow(keep as u32).unwrap_or(u64::MAX);
        let group_stem: Vec<usize> = (0..frontier.len()).collect();
        let outcome = run_round(RoundInput {
            tree,
            stems: &frontier,
            group_stem: &group_stem,
            label: |_, node: &Seq| name.label(node),
            keep,
            keep_all: false,
            want,
            width_cap: want,
            guard,
            target,
            output_alphabet: out_b,
            cover: &cover,
            round,
        })?;
        let mut next = Vec::new();
        for piece in &outcome.keeps {
            spine.extend(piece.chain.iter().cloned());
            spine.insert(piece.pool.clone());
            for cand in &piece.kept {
                spine.insert(cand.successor.clone());
                spine.extend(cand.chain.iter().cloned());
                spine.insert(cand.rho.clone());
                next.push(cand.rho.clone());
            }
        }
        frontier = next;
        cover = outcome.cover;
        guard = outcome.decision_length;
    }
    let mut finals = Vec::new();
    for node in &frontier {
        let (chain, tip) = descend_until(tree, node, |n| name.label(n).len() >= target)?;
        spine.extend(chain);
        finals.push(name.label(&tip).restrict(target));
        spine.insert(tip);
    }
    cover = cover_with(&finals, &cover)?;
    if !classify(&cover, out_b as usize - 1).is_k_tree {
        return Err(Error::SelectionFailed {
            round: target_splits,
        });
    }
    let pruned_tree = FiniteTree::new(*tree.domain(), spine)?;
    let pruned = Condition::new(stem.clone(), TreeRep::Explicit(pruned_tree))?;
    Ok(PruneResult { pruned, cover })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::build_minimal_accelerating;
    use crate::name::{LabelRule, LabelSource};
    use alloc::vec;
    use alloc::vec::Vec;

    fn digit_name(depth: usize, seed: u64, modulus: u8) -> DecidedName {
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
    fn constant_name_prunes_to_a_chain_cover() {
        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(4).unwrap()).unwrap();
        let g = Seq::from([2, 1, 0, 1]);
        let name =
            DecidedName::new(cond, 3, 4, LabelSource::Rule(LabelRule::Constant(g.clone())))
                .unwrap();
        let out = prune_to_cover(&name, 1).unwrap();
        assert_eq!(out.cover.branches(), vec![g]);
        let nodes: BTreeSet<Seq> = [
            Seq::empty(),
            Seq::from([0]),
            Seq::from([0, 0]),
            Seq::from([0, 0, 0]),
            Seq::from([0, 0, 0, 0]),
            Seq::from([0, 0, 0, 1]),
        ]
        .into_iter()
        .collect();
        assert_eq!(out.pruned.tree().to_explicit().unwrap().nodes(), &nodes);
    }

    #[test]
    fn digit_name_pruning_invariants() {
        let name = digit_name(12, 41, 2);
        let out = prune_to_cover(&name, 2).unwrap();
        let pruned = out.pruned.tree().to_explicit().unwrap();
        assert_eq!(pruned.len(), 21);
        let original = name.condition().tree();
        assert!(pruned.nodes().iter().all(|n| original.contains(n)));
        assert!(classify(&out.cover, 2).is_k_tree);
        let report = classify(&pruned, 2);
        let mut arities: Vec<usize> =
            report.split_arities.iter().map(|(_, a)| *a).collect();
        arities.sort_unstable();
        assert_eq!(arities, vec![2, 3, 3]);
        let branches = out.cover.branches();
        for node in pruned.nodes() {
            if pruned.arity(node) == 0 {
                assert!(branches.contains(&name.label(node).restrict(12)));
            }
        }
    }

    #[test]
    fn first_round_selection_matches_direct_extraction() {
        let name = digit_name(12, 7, 2);
        let pool = Seq::from([0; 8]);
        let labels: Vec<Seq> = (0..9u8)
            .map(|x| name.label(&pool.child(x)).restrict(9))
            .collect();
        let family = FunctionFamily::new(3, 9, labels).unwrap();
        let sel = extract_2tree(&family, 2).unwrap();
        let out = prune_to_cover(&name, 1).unwrap();
        let pruned = out.pruned.tree().to_explicit().unwrap();
        for (i, x) in (0..9u8).enumerate() {
            assert_eq!(pruned.contains(&pool.child(x)), sel.selected.contains(&i));
        }
    }

    #[test]
    fn depth_runs_out_for_a_third_round() {
        let name = digit_name(12, 3, 2);
        assert_eq!(
            prune_to_cover(&name, 3),
            Err(Error::BudgetExceeded {
                context: "pool too narrow for the round",
                at: 2,
            })
        );
    }

    #[test]
    fn pruning_needs_a_round() {
        let name = digit_name(4, 0, 2);
        assert_eq!(
            prune_to_cover(&name, 0),
            Err(Error::InvalidInput("pruning needs at least one output split"))
        );
    }

    #[test]
    fn subset_stepping_is_lexicographic() {
        let mut s = vec![0, 1, 2];
        let mut seen = vec![s.clone()];
        while advance_subset(&mut s, 5) {
            seen.push(s.clone());
        }
        assert_eq!(seen.len(), 10);
        assert_eq!(seen[1], vec![0, 1, 3]);
        assert_eq!(seen[9], vec![2, 3, 4]);
    }
}
