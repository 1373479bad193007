//! Exact minimum covers of a finite function space by width-bounded trees or
//! by predictors, plus composition of covers through skeletons.

use crate::classify::classify;
use crate::domain::TreeDomain;
use crate::error::{Error, Result};
use crate::prediction::{predicts, Predictor};
use crate::seq::Seq;
use crate::skeleton::Skeleton;
use crate::tree::{FiniteTree, TreeView};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

/// Functions form one u128 of membership bits.
const UNIVERSE_BUDGET: usize = 128;
const CANDIDATE_BUDGET: usize = 2_000_000;
const SEARCH_BUDGET: usize = 5_000_000;
const SYMMETRY_BUDGET: usize = 10_000;

/// What gets covered: whole functions as tree branches, or functions matched
/// by predictors allowed to miss positions up to the grace point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverMode {
    Trees,
    Predictors { grace: usize },
}

/// One covering problem: all functions of the given length over the given
/// alphabet, against families bounded by the tree arity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverInstance {
    alphabet: u8,
    depth: usize,
    tree_arity: usize,
    mode: CoverMode,
}

impl CoverInstance {
    pub fn trees(alphabet: u8, depth: usize, tree_arity: usize) -> Result<Self> {
        Self::build(alphabet, depth, tree_arity, CoverMode::Trees)
    }

    pub fn predictors(alphabet: u8, depth: usize, tree_arity: usize, grace: usize) -> Result<Self> {
        if grace >= depth {
            return Err(Error::InvalidInput("grace point must be below the depth"));
        }
        Self::build(alphabet, depth, tree_arity, CoverMode::Predictors { grace })
    }

    fn build(alphabet: u8, depth: usize, tree_arity: usize, mode: CoverMode) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::InvalidInput("cover alphabet needs at least two letters"));
        }
        if depth == 0 {
            return Err(Error::InvalidInput("cover depth must be at least 1"));
        }
        if tree_arity == 0 {
            return Err(Error::InvalidInput("cover arity must be at least 1"));
        }
        Ok(CoverInstance {
            alphabet,
            depth,
            tree_arity,
            mode,
        })
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn tree_arity(&self) -> usize {
        self.tree_arity
    }

    pub fn mode(&self) -> &CoverMode {
        &self.mode
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverFamily {
    Trees(Vec<FiniteTree>),
    Predictors(Vec<Predictor>),
}

/// A minimum-size covering family. The witness, when present, is the least
/// function left uncovered by the best one-smaller family the exhaustive
/// search visited; a missing witness marks a best-effort certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertificate {
    pub size: usize,
    pub family: CoverFamily,
    pub uncovered_witness: Option<Seq>,
}

/// Every function of the given length, in ascending order, so that bit i of
/// a coverage mask talks about the i-th function.
fn universe(b: u8, depth: usize) -> Result<Vec<Seq>> {
    let mut count = 1usize;
    for _ in 0..depth {
        count = count
            .checked_mul(b as usize)
            .filter(|&n| n <= UNIVERSE_BUDGET)
            .ok_or(Error::BudgetExceeded {
                context: "function universe",
                at: depth,
            })?;
    }
    let mut out = Vec::with_capacity(count);
    let mut current = Vec::new();
    current.push(Seq::empty());
    for _ in 0..depth {
        let mut next = Vec::with_capacity(current.len() * b as usize);
        for s in &current {
            for x in 0..b {
                next.push(s.child(x));
            }
        }
        current = next;
    }
    out.extend(current);
    Ok(out)
}

fn index_of(f: &Seq, b: u8) -> usize {
    let mut i = 0usize;
    for &x in f.letters() {
        i = i * b as usize + x as usize;
    }
    i
}

/// Ascending a-subsets of 0..b.
fn letter_subsets(b: u8, a: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut subset: Vec<u8> = (0..a as u8).collect();
    loop {
        out.push(subset.clone());
        let mut i = a;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] < b - (a - i) as u8 {
                subset[i] += 1;
                for j in i + 1..a {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn permutations_fixing_zero(b: u8) -> Vec<Vec<u8>> {
    fn rec(rest: &mut Vec<u8>, acc: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            acc.push(x);
            rec(rest, acc, out);
            acc.pop();
            rest.insert(i, x);
        }
    }
    let mut rest: Vec<u8> = (1..b).collect();
    let mut acc = Vec::new();
    acc.push(0u8);
    let mut out = Vec::new();
    rec(&mut rest, &mut acc, &mut out);
    out
}

/// Index remaps for every per-level letter permutation fixing letter 0,
/// identity excluded; None when the group is too large to enumerate.
fn symmetry_remaps(b: u8, depth: usize, funcs: &[Seq]) -> Option<Vec<Vec<usize>>> {
    let level_perms = permutations_fixing_zero(b);
    let mut group_size = 1usize;
    for _ in 0..depth {
        group_size = group_size.checked_mul(level_perms.len())?;
        if group_size > SYMMETRY_BUDGET {
            return None;
        }
    }
    let mut picks = Vec::new();
    picks.push(Vec::new());
    for _ in 0..depth {
        let mut next = Vec::with_capacity(picks.len() * level_perms.len());
        for p in &picks {
            for perm in &level_perms {
                let mut q: Vec<&Vec<u8>> = p.clone();
                q.push(perm);
                next.push(q);
            }
        }
        picks = next;
    }
    let mut remaps = Vec::new();
    for levels in picks {
        if levels.iter().all(|p| p.iter().enumerate().all(|(i, &x)| i as u8 == x)) {
            continue;
        }
        let mut remap = Vec::with_capacity(funcs.len());
        for f in funcs {
            let image: Vec<u8> = f
                .letters()
                .iter()
                .enumerate()
                .map(|(lvl, &x)| levels[lvl][x as usize])
                .collect();
            remap.push(index_of(&Seq::from(image), b));
        }
        remaps.push(remap);
    }
    Some(remaps)
}

fn apply_remap(mask: u128, remap: &[usize]) -> u128 {
    let mut out = 0u128;
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1u128 << remap[i];
    }
    out
}

fn orbit_min(mask: u128, remaps: &[Vec<usize>]) -> bool {
    remaps.iter().all(|r| apply_remap(mask, r) >= mask)
}

/// All branch-set masks of trees splitting exactly `a` ways at every node.
fn perfect_tree_masks(b: u8, depth: usize, a: usize, funcs: &[Seq]) -> Result<Vec<u128>> {
    struct Gen<'x> {
        b: u8,
        a: usize,
        depth: usize,
        subsets: Vec<Vec<u8>>,
        funcs: &'x [Seq],
        out: Vec<u128>,
    }
    impl Gen<'_> {
        fn level(&mut self, nodes: &[Seq]) -> Result<()> {
            if nodes[0].len() == self.depth {
                let mut mask = 0u128;
                for f in nodes {
                    mask |= 1u128 << index_of(f, self.b);
                }
                self.out.push(mask);
                if self.out.len() > CANDIDATE_BUDGET {
                    return Err(Error::BudgetExceeded {
                        context: "candidate enumeration",
                        at: CANDIDATE_BUDGET,
                    });
                }
                return Ok(());
            }
            self.widen(nodes, 0, &mut Vec::new())
        }
        fn widen(&mut self, nodes: &[Seq], i: usize, built: &mut Vec<Seq>) -> Result<()> {
            if i == nodes.len() {
                let next = built.clone();
                return self.level(&next);
            }
            for si in 0..self.subsets.len() {
                let before = built.len();
                for j in 0..self.a {
                    built.push(nodes[i].child(self.subsets[si][j]));
                }
                self.widen(nodes, i + 1, built)?;
                built.truncate(before);
            }
            Ok(())
        }
    }
    let mut gen = Gen {
        b,
        a,
        depth,
        subsets: letter_subsets(b, a),
        funcs,
        out: Vec::new(),
    };
    let _ = gen.funcs;
    let root = [Seq::empty()];
    gen.level(&root)?;
    let mut masks = gen.out;
    masks.sort_unstable();
    Ok(masks)
}

/// All predicted-set masks over tables guessing exactly `a` letters at every
/// history, alongside the tables; histories outside the grace window keep a
/// fixed default so equal masks do not repeat.
#[allow(clippy::type_complexity)]
fn predictor_masks(
    b: u8,
    depth: usize,
    a: usize,
    grace: usize,
    funcs: &[Seq],
) -> Result<(Vec<u128>, Vec<BTreeMap<Seq, BTreeSet<u8>>>)> {
    let mut used: Vec<Seq> = Vec::new();
    let mut level = Vec::new();
    level.push(Seq::empty());
    for len in 0..depth {
        if len > grace {
            used.extend(level.iter().cloned());
        }
        let mut next = Vec::with_capacity(level.len() * b as usize);
        for s in &level {
            for x in 0..b {
                next.push(s.child(x));
            }
        }
        level = next;
    }
    let default: BTreeSet<u8> = (0..a as u8).collect();
    let subsets = letter_subsets(b, a);
    let mut tables: Vec<Vec<usize>> = Vec::new();
    tables.push(Vec::new());
    for _ in 0..used.len() {
        let mut next = Vec::with_capacity(tables.len() * subsets.len());
        for t in &tables {
            for si in 0..subsets.len() {
                if next.len() > CANDIDATE_BUDGET {
                    return Err(Error::BudgetExceeded {
                        context: "candidate enumeration",
                        at: CANDIDATE_BUDGET,
                    });
                }
                let mut u = t.clone();
                u.push(si);
                next.push(u);
            }
        }
        tables = next;
    }
    let mut masks = Vec::with_capacity(tables.len());
    let mut built = Vec::with_capacity(tables.len());
    for choice in tables {
        let mut table: BTreeMap<Seq, BTreeSet<u8>> = BTreeMap::new();
        let mut fill = Vec::new();
        fill.push(Seq::empty());
        for _ in 0..depth {
            for s in &fill {
                table.insert(s.clone(), default.clone());
            }
            let mut next = Vec::with_capacity(fill.len() * b as usize);
            for s in &fill {
                for x in 0..b {
                    next.push(s.child(x));
                }
            }
            fill = next;
        }
        for (h, &si) in used.iter().zip(choice.iter()) {
            table.insert(h.clone(), subsets[si].iter().copied().collect());
        }
        let mut mask = 0u128;
        for (i, f) in funcs.iter().enumerate() {
            let hit = (grace + 1..depth).all(|n| table[&f.restrict(n)].contains(&f.letter(n)));
            if hit {
                mask |= 1u128 << i;
            }
        }
        masks.push(mask);
        built.push(table);
    }
    let mut order: Vec<usize> = (0..masks.len()).collect();
    order.sort_by_key(|&i| masks[i]);
    let masks_sorted: Vec<u128> = order.iter().map(|&i| masks[i]).collect();
    let tables_sorted: Vec<BTreeMap<Seq, BTreeSet<u8>>> =
        order.iter().map(|&i| built[i].clone()).collect();
    Ok((masks_sorted, tables_sorted))
}

struct Search<'x> {
    masks: &'x [u128],
    by_bit: Vec<Vec<usize>>,
    full: u128,
    remaps: Option<Vec<Vec<usize>>>,
    visited: usize,
}

impl Search<'_> {
    fn new(masks: &[u128], count: usize, remaps: Option<Vec<Vec<usize>>>) -> Result<Search<'_>> {
        let full = if count == 128 {
            u128::MAX
        } else {
            (1u128 << count) - 1
        };
        let mut by_bit: Vec<Vec<usize>> = Vec::with_capacity(count);
        for bit in 0..count {
            let holders: Vec<usize> = (0..masks.len())
                .filter(|&i| masks[i] & (1u128 << bit) != 0)
                .collect();
            if holders.is_empty() {
                return Err(Error::InvalidInput("a function has no covering candidate"));
            }
            by_bit.push(holders);
        }
        Ok(Search {
            masks,
            by_bit,
            full,
            remaps,
            visited: 0,
        })
    }

    /// Complete search for a covering family of the exact size, branching on
    /// candidates holding the least uncovered function. `best` tracks the
    /// smallest uncovered set seen at full size, first found winning ties.
    fn run(
        &mut self,
        size: usize,
        chosen: &mut Vec<usize>,
        covered: u128,
        best: &mut (u32, u128),
    ) -> Result<Option<Vec<usize>>> {
        self.visited += 1;
        if self.visited > SEARCH_BUDGET {
            return Err(Error::BudgetExceeded {
                context: "cover search",
                at: SEARCH_BUDGET,
            });
        }
        let uncovered = self.full & !covered;
        if uncovered == 0 {
            return Ok(Some(chosen.clone()));
        }
        if chosen.len() == size {
            let count = uncovered.count_ones();
            if count < best.0 {
                *best = (count, uncovered);
            }
            return Ok(None);
        }
        let bit = uncovered.trailing_zeros() as usize;
        for idx in 0..self.by_bit[bit].len() {
            let ci = self.by_bit[bit][idx];
            if chosen.is_empty() {
                if let Some(remaps) = &self.remaps {
                    if !orbit_min(self.masks[ci], remaps) {
                        continue;
                    }
                }
            }
            chosen.push(ci);
            let found = self.run(size, chosen, covered | self.masks[ci], best)?;
            chosen.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }
}

/// Exact minimum: iterative deepening from the pigeonhole bound, then an
/// exhaustive pass one size below for the witness.
fn exact_minimum(
    masks: &[u128],
    funcs: &[Seq],
    remaps: Option<Vec<Vec<usize>>>,
) -> Result<(usize, Vec<usize>, Seq)> {
    let count = funcs.len();
    let best_single = masks.iter().map(|m| m.count_ones()).max().unwrap_or(0) as usize;
    if best_single == 0 {
        return Err(Error::InvalidInput("a function has no covering candidate"));
    }
    let lower = count.div_ceil(best_single).max(1);
    let mut search = Search::new(masks, count, remaps)?;
    let mut previous_best: Option<(u32, u128)> = None;
    for size in lower..=count {
        let mut best = (u32::MAX, 0u128);
        if let Some(solution) = search.run(size, &mut Vec::new(), 0, &mut best)? {
            let refuted = match previous_best {
                Some(b) => b,
                None => {
                    if size == 1 {
                        (count as u32, search.full)
                    } else {
                        let mut b = (u32::MAX, 0u128);
                        let found = search.run(size - 1, &mut Vec::new(), 0, &mut b)?;
                        if found.is_some() {
                            return Err(Error::InvalidInput(
                                "search found a smaller family on the refutation pass",
                            ));
                        }
                        b
                    }
                }
            };
            let witness = funcs[refuted.1.trailing_zeros() as usize].clone();
            return Ok((size, solution, witness));
        }
        previous_best = Some(best);
    }
    Err(Error::InvalidInput("a function has no covering candidate"))
}

/// Greedy cover: repeatedly take the candidate covering the most of what is
/// left, lowest index breaking ties.
fn greedy_family(masks: &[u128], count: usize) -> Result<Vec<usize>> {
    let full = if count == 128 {
        u128::MAX
    } else {
        (1u128 << count) - 1
    };
    let mut covered = 0u128;
    let mut picked = Vec::new();
    while covered & full != full {
        let mut best_idx = None;
        let mut best_gain = 0u32;
        for (i, m) in masks.iter().enumerate() {
            let gain = (m & !covered & full).count_ones();
            if gain > best_gain {
                best_gain = gain;
                best_idx = Some(i);
            }
        }
        match best_idx {
            Some(i) => {
                covered |= masks[i];
                picked.push(i);
            }
            None => {
                return Err(Error::InvalidInput("a function has no covering candidate"))
            }
        }
    }
    Ok(picked)
}

fn tree_from_mask(b: u8, depth: usize, mask: u128, funcs: &[Seq]) -> Result<FiniteTree> {
    let domain = TreeDomain::uniform(b, depth)?;
    let branches: Vec<Seq> = funcs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1u128 << i) != 0)
        .map(|(_, f)| f.clone())
        .collect();
    FiniteTree::downward_closure(domain, branches)
}

/// Whether every function of the family's length is a branch of some tree.
pub fn tree_family_covers(family: &[FiniteTree], b: u8, depth: usize) -> Result<bool> {
    let funcs = universe(b, depth)?;
    Ok(funcs.iter().all(|f| family.iter().any(|t| t.contains(f))))
}

/// Whether every function is predicted by some family member at the grace
/// point.
pub fn predictor_family_covers(family: &[Predictor], b: u8, depth: usize, grace: usize) -> Result<bool> {
    let funcs = universe(b, depth)?;
    for f in &funcs {
        let mut hit = false;
        for p in family {
            if predicts(p, f, grace)?.predicted {
                hit = true;
                break;
            }
        }
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

fn expect_mode_trees(instance: &CoverInstance) -> Result<()> {
    match instance.mode {
        CoverMode::Trees => Ok(()),
        CoverMode::Predictors { .. } => {
            Err(Error::InvalidInput("instance is not in tree mode"))
        }
    }
}

fn expect_mode_predictors(instance: &CoverInstance) -> Result<usize> {
    match instance.mode {
        CoverMode::Predictors { grace } => Ok(grace),
        CoverMode::Trees => Err(Error::InvalidInput("instance is not in predictor mode")),
    }
}

/// Exact smallest family of trees, each splitting at most `tree_arity` ways,
/// whose branches cover every function.
pub fn min_cover_trees(instance: &CoverInstance) -> Result<CoverCertificate> {
    expect_mode_trees(instance)?;
    let b = instance.alphabet;
    let depth = instance.depth;
    let a = instance.tree_arity.min(b as usize);
    let funcs = universe(b, depth)?;
    let masks = perfect_tree_masks(b, depth, a, &funcs)?;
    let remaps = symmetry_remaps(b, depth, &funcs);
    let (size, picked, witness) = exact_minimum(&masks, &funcs, remaps)?;
    let family: Vec<FiniteTree> = picked
        .iter()
        .map(|&i| tree_from_mask(b, depth, masks[i], &funcs))
        .collect::<Result<_>>()?;
    if !tree_family_covers(&family, b, depth)? {
        return Err(Error::InvalidInput("search produced a non-covering family"));
    }
    for t in &family {
        if !classify(t, instance.tree_arity).is_k_tree {
            return Err(Error::InvalidInput("search produced an over-wide tree"));
        }
    }
    Ok(CoverCertificate {
        size,
        family: CoverFamily::Trees(family),
        uncovered_witness: Some(witness),
    })
}

/// Exact smallest family of predictors guessing at most `tree_arity` letters
/// per history, predicting every function at the instance's grace point.
pub fn min_cover_predictors(instance: &CoverInstance) -> Result<CoverCertificate> {
    let grace = expect_mode_predictors(instance)?;
    let b = instance.alphabet;
    let depth = instance.depth;
    let a = instance.tree_arity.min(b as usize);
    let funcs = universe(b, depth)?;
    let (masks, tables) = predictor_masks(b, depth, a, grace, &funcs)?;
    let remaps = symmetry_remaps(b, depth, &funcs);
    let (size, picked, witness) = exact_minimum(&masks, &funcs, remaps)?;
    let family: Vec<Predictor> = picked
        .iter()
        .map(|&i| Predictor::new(b, instance.tree_arity, depth, tables[i].clone()))
        .collect::<Result<_>>()?;
    if !predictor_family_covers(&family, b, depth, grace)? {
        return Err(Error::InvalidInput("search produced a non-covering family"));
    }
    Ok(CoverCertificate {
        size,
        family: CoverFamily::Predictors(family),
        uncovered_witness: Some(witness),
    })
}

/// Best-effort tree cover without the minimality pass; the missing witness
/// marks it as such.
pub fn greedy_cover_trees(instance: &CoverInstance) -> Result<CoverCertificate> {
    expect_mode_trees(instance)?;
    let b = instance.alphabet;
    let depth = instance.depth;
    let a = instance.tree_arity.min(b as usize);
    let funcs = universe(b, depth)?;
    let masks = perfect_tree_masks(b, depth, a, &funcs)?;
    let picked = greedy_family(&masks, funcs.len())?;
    let family: Vec<FiniteTree> = picked
        .iter()
        .map(|&i| tree_from_mask(b, depth, masks[i], &funcs))
        .collect::<Result<_>>()?;
    Ok(CoverCertificate {
        size: family.len(),
        family: CoverFamily::Trees(family),
        uncovered_witness: None,
    })
}

/// Best-effort predictor cover without the minimality pass.
pub fn greedy_cover_predictors(instance: &CoverInstance) -> Result<CoverCertificate> {
    let grace = expect_mode_predictors(instance)?;
    let b = instance.alphabet;
    let depth = instance.depth;
    let a = instance.tree_arity.min(b as usize);
    let funcs = universe(b, depth)?;
    let (masks, tables) = predictor_masks(b, depth, a, grace, &funcs)?;
    let picked = greedy_family(&masks, funcs.len())?;
    let family: Vec<Predictor> = picked
        .iter()
        .map(|&i| Predictor::new(b, instance.tree_arity, depth, tables[i].clone()))
        .collect::<Result<_>>()?;
    Ok(CoverCertificate {
        size: family.len(),
        family: CoverFamily::Predictors(family),
        uncovered_witness: None,
    })
}

/// Composes an outer cover by (k+1)-splitting skeletal trees with inner
/// covers of the skeleton words: each output tree keeps the outer branches
/// whose word runs through one inner tree. Outputs are k-trees and cover
/// everything the outer family does.
pub fn compose_covers(
    outer: &[FiniteTree],
    inner: &[FiniteTree],
    k: usize,
) -> Result<Vec<FiniteTree>> {
    if k == 0 {
        return Err(Error::InvalidInput("composition arity must be at least 1"));
    }
    let first = outer
        .first()
        .ok_or(Error::InvalidInput("outer family must not be empty"))?;
    let b = first
        .domain()
        .base()
        .ok_or(Error::InvalidInput("outer trees must have a uniform domain"))?;
    let depth = first.domain().depth();
    if outer.iter().any(|t| t.domain() != first.domain()) {
        return Err(Error::InvalidInput("outer trees must share a domain"));
    }
    let funcs = universe(b, depth)?;
    if !tree_family_covers(outer, b, depth)? {
        return Err(Error::InvalidInput(
            "outer family does not cover the function space",
        ));
    }
    for t in inner {
        if t.domain().base() != Some(k as u8 + 1) {
            return Err(Error::InvalidInput(
                "inner trees must range over the skeleton alphabet",
            ));
        }
        if !classify(t, k).is_k_tree {
            return Err(Error::InvalidInput("inner tree splits too wide"));
        }
    }
    let mut out = Vec::new();
    for t in outer {
        let skeleton = Skeleton::of(t, k + 1)?;
        let d = skeleton.split_depth();
        if d == 0 {
            // a split-free tree carries a single branch; nothing to thin
            out.push(t.clone());
            continue;
        }
        let relevant: Vec<&FiniteTree> = inner
            .iter()
            .filter(|a| a.domain().depth() == d)
            .collect();
        let words = universe(k as u8 + 1, d)?;
        if !words
            .iter()
            .all(|w| relevant.iter().any(|a| a.contains(w)))
        {
            return Err(Error::InvalidInput(
                "inner cover incomplete for a skeleton depth",
            ));
        }
        for a in &relevant {
            let branches: Vec<Seq> = skeleton
                .pairs()
                .filter(|(_, w)| a.contains(w))
                .map(|(branch, _)| branch.clone())
                .collect();
            if branches.is_empty() {
                continue;
            }
            let composed = FiniteTree::downward_closure(*t.domain(), branches)?;
            if !classify(&composed, k).is_k_tree {
                return Err(Error::InvalidInput("composed tree splits too wide"));
            }
            out.push(composed);
        }
    }
    if out.len() > outer.len().saturating_mul(inner.len().max(1)) {
        return Err(Error::InvalidInput("composition exceeded its size bound"));
    }
    let check: Vec<FiniteTree> = out.clone();
    if !funcs
        .iter()
        .all(|f| check.iter().any(|t| t.contains(f)))
    {
        return Err(Error::InvalidInput(
            "composed family lost part of the cover",
        ));
    }
    Ok(out)
}

/// One row per requested arity: exact tree and predictor cover sizes, None
/// where the search ran out of budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityRow {
    pub k: usize,
    pub trees: Option<usize>,
    pub predictors: Option<usize>,
}

/// Cover sizes across arities. Both columns are non-increasing in k, with
/// k = alphabet giving a single full tree; callers treat any increase as a
/// defect.
pub fn monotonicity_report(b: u8, depth: usize, ks: &[usize]) -> Result<Vec<MonotonicityRow>> {
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let trees = match min_cover_trees(&CoverInstance::trees(b, depth, k)?) {
            Ok(cert) => Some(cert.size),
            Err(Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e),
        };
        let predictors =
            match min_cover_predictors(&CoverInstance::predictors(b, depth, k, 0)?) {
                Ok(cert) => Some(cert.size),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
        rows.push(MonotonicityRow {
            k,
            trees,
            predictors,
        });
    }
    Ok(rows)
}
