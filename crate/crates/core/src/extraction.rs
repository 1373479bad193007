use crate::domain::TreeDomain;
use crate::error::{Error, HypothesisViolation, Result};
use crate::seq::Seq;
use crate::tree::{FiniteTree, TreeView};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// An indexed family of equal-length functions over a uniform alphabet,
/// optionally partitioned into groups. Grouped operations treat the i-th
/// member of each group as sharing the common index i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionFamily {
    b: u8,
    length: usize,
    functions: Vec<Seq>,
    groups: Option<Vec<usize>>,
    members: Vec<Vec<usize>>,
}

impl FunctionFamily {
    pub fn new(b: u8, length: usize, functions: Vec<Seq>) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidInput("family alphabet needs b >= 2"));
        }
        for f in &functions {
            if f.len() != length {
                return Err(Error::InvalidInput("family functions must share one length"));
            }
            if f.letters().iter().any(|&x| x >= b) {
                return Err(Error::InvalidInput("family function letter out of range"));
            }
        }
        let members = alloc::vec![(0..functions.len()).collect()];
        Ok(FunctionFamily {
            b,
            length,
            functions,
            groups: None,
            members,
        })
    }

    /// `groups[i]` is the group label of the i-th function. Labels must be
    /// `0..a` for some `a`, every group must have the same size, and the j-th
    /// member of a group in listing order carries common index j.
    pub fn with_groups(
        b: u8,
        length: usize,
        functions: Vec<Seq>,
        groups: Vec<usize>,
    ) -> Result<Self> {
        let mut family = FunctionFamily::new(b, length, functions)?;
        if groups.len() != family.functions.len() {
            return Err(Error::InvalidInput("group labels must cover all indices"));
        }
        let a = match groups.iter().max() {
            Some(&hi) => hi + 1,
            None => return Err(Error::InvalidInput("grouped family must be nonempty")),
        };
        let mut sizes = Vec::new();
        sizes.resize(a, 0usize);
        for &g in &groups {
            sizes[g] += 1;
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidInput("group labels must be contiguous from 0"));
        }
        if sizes.iter().any(|&s| s != sizes[0]) {
            return Err(Error::InvalidInput("groups must share one index set"));
        }
        let mut members = Vec::new();
        members.resize(a, Vec::new());
        for (pos, &g) in groups.iter().enumerate() {
            members[g].push(pos);
        }
        family.groups = Some(groups);
        family.members = members;
        Ok(family)
    }

    pub fn alphabet(&self) -> u8 {
        self.b
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn functions(&self) -> &[Seq] {
        &self.functions
    }

    pub fn groups(&self) -> Option<&[usize]> {
        self.groups.as_deref()
    }

    pub fn group_count(&self) -> usize {
        self.members.len()
    }

    /// Positions of the group's members, in listing order.
    pub fn group_members(&self, group: usize) -> &[usize] {
        &self.members[group]
    }

    /// Size of the common index set.
    pub fn index_count(&self) -> usize {
        self.members[0].len()
    }

    /// The function of the given group at the given common index.
    pub fn function(&self, group: usize, index: usize) -> &Seq {
        &self.functions[self.members[group][index]]
    }
}

/// Minimal family size for selecting n common indices across k groups over
/// the ternary alphabet: 3^n for one group, and a tower of 3s from there.
pub fn n_bound(n: u32, k: u32) -> Result<u64> {
    n_bound_base(3, n, k)
}

/// The same recursion over an arbitrary alphabet size.
pub fn n_bound_base(b: u64, n: u32, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidInput("group count must be at least 1"));
    }
    let overflow = Error::BudgetExceeded {
        context: "family size bound overflows u64",
        at: k as usize,
    };
    let mut value = checked_pow(b, n as u64).ok_or_else(|| overflow.clone())?;
    for _ in 1..k {
        value = checked_pow(b, value).ok_or_else(|| overflow.clone())?;
    }
    Ok(value)
}

fn checked_pow(b: u64, e: u64) -> Option<u64> {
    let mut out: u64 = 1;
    for _ in 0..e {
        out = out.checked_mul(b)?;
    }
    Some(out)
}

/// Selected common indices plus the restriction closure witnessing the
/// arity bound, taken over every selected function (all groups).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractionResult {
    pub selected: Vec<usize>,
    pub witness_tree: FiniteTree,
}

/// Select `n` of the first `b^n` functions so that the restriction closure
/// of the selection never splits more than two ways. Ungrouped families
/// only; `b = 2` admits `n <= 1`.
///
/// If all candidates are equal the first n are taken. Otherwise the least
/// coordinate where two candidates differ is found; the least letter with
/// maximal count there wins by pigeonhole, the first `b^(n-1)` holders of
/// that letter are recursed on, and the least index holding a different
/// letter is adjoined.
pub fn extract_2tree(family: &FunctionFamily, n: u32) -> Result<ExtractionResult> {
    if family.groups.is_some() {
        return Err(Error::InvalidInput("plain extraction takes no groups"));
    }
    if family.b == 2 && n >= 2 {
        return Err(Error::InvalidInput("selection needs at least 3 letters for n >= 2"));
    }
    let indices: Vec<usize> = (0..family.functions.len()).collect();
    let selected = extract_core(&family.functions, &indices, family.b, n as u64)?;
    let witness_tree = restriction_closure(
        family.b,
        family.length,
        selected.iter().map(|&i| family.functions[i].clone()),
    )?;
    Ok(ExtractionResult {
        selected,
        witness_tree,
    })
}

/// Core selection recursion shared by plain and grouped extraction: selects
/// `count` of the first `b^count` listed indices, sorted ascending. `count`
/// reaches tower sizes during grouped peeling, hence u64.
fn extract_core(functions: &[Seq], indices: &[usize], b: u8, count: u64) -> Result<Vec<usize>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let needed = checked_pow(b as u64, count).ok_or(Error::BudgetExceeded {
        context: "selection pool size overflows u64",
        at: count.min(usize::MAX as u64) as usize,
    })?;
    if (indices.len() as u64) < needed {
        return Err(Error::InvalidInput("family too small for the requested selection"));
    }
    let pool = &indices[..needed as usize];
    if count == 1 {
        let mut out = Vec::new();
        out.push(pool[0]);
        return Ok(out);
    }
    let length = functions[pool[0]].len();
    let m = (0..length).find(|&p| {
        pool.iter()
            .any(|&i| functions[i].letter(p) != functions[pool[0]].letter(p))
    });
    let m = match m {
        Some(m) => m,
        None => return Ok(pool[..count as usize].to_vec()),
    };
    let mut counts = Vec::new();
    counts.resize(b as usize, 0usize);
    for &i in pool {
        counts[functions[i].letter(m) as usize] += 1;
    }
    let best = counts.iter().copied().max().unwrap_or(0);
    let v = counts.iter().position(|&c| c == best).unwrap() as u8;
    let sub_needed = checked_pow(b as u64, count - 1).unwrap() as usize;
    let holders: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|&i| functions[i].letter(m) == v)
        .take(sub_needed)
        .collect();
    let outlier = pool
        .iter()
        .copied()
        .find(|&i| functions[i].letter(m) != v)
        .expect("a differing coordinate has a differing letter");
    let mut selected = extract_core(functions, &holders, b, count - 1)?;
    selected.push(outlier);
    selected.sort_unstable();
    Ok(selected)
}

/// Downward closure of equal-length functions over a uniform domain.
pub fn restriction_closure(
    b: u8,
    length: usize,
    functions: impl IntoIterator<Item = Seq>,
) -> Result<FiniteTree> {
    FiniteTree::downward_closure(TreeDomain::uniform(b, length.max(1))?, functions)
}

/// Check the grouped preconditions at guard length `m`: the restriction
/// closure of everything cut to length m never splits more than `b - 1`
/// ways, and functions from different groups that agree up to m are equal.
/// Returns the least witness against whichever condition fails first,
/// scanning closure nodes, then index quadruples, in ascending order.
pub fn check_grouped_hypothesis(
    family: &FunctionFamily,
    m: usize,
) -> Result<Option<HypothesisViolation>> {
    if m > family.length {
        return Err(Error::InvalidInput("guard length exceeds the function length"));
    }
    let closure = restriction_closure(
        family.b,
        m,
        family.functions.iter().map(|f| f.restrict(m)),
    )?;
    let bound = family.b as usize - 1;
    for node in closure.nodes() {
        let arity = closure.arity(node);
        if arity > bound {
            return Ok(Some(HypothesisViolation::TreeCondition {
                node: node.clone(),
                arity,
            }));
        }
    }
    let a = family.group_count();
    if a <= 1 || family.groups.is_none() {
        return Ok(None);
    }
    // bucket by guard prefix; a violation needs two groups in one bucket
    let count = family.index_count();
    let mut buckets: BTreeMap<Seq, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..count {
        for j in 0..a {
            buckets
                .entry(family.function(j, i).restrict(m))
                .or_default()
                .push((i, j));
        }
    }
    let mut least: Option<((usize, usize), (usize, usize))> = None;
    for entries in buckets.values() {
        if entries.iter().all(|&(_, j)| j == entries[0].1) {
            continue; // single group, nothing to compare across
        }
        let reference = family.function(entries[0].1, entries[0].0);
        if entries
            .iter()
            .all(|&(i, j)| family.function(j, i) == reference)
        {
            continue;
        }
        for &(i, j) in entries {
            for &(s, t) in entries {
                if t == j || family.function(j, i) == family.function(t, s) {
                    continue;
                }
                let quad = ((i, j), (s, t));
                if least.map_or(true, |cur| quad < cur) {
                    least = Some(quad);
                }
                break; // entries are sorted, so the first hit is least for this (i, j)
            }
        }
    }
    Ok(least.map(|(first, second)| HypothesisViolation::Rigidity { first, second }))
}

/// Grouped selection: shrink the common index set one group at a time, last
/// group first, so that the restriction closure over all groups of the `n`
/// surviving indices never splits more than `k` ways. Requires `k = b - 1`
/// and the grouped hypothesis at guard length `m`.
///
/// Peeling group g keeps as many indices as the remaining g groups need;
/// each peel is the plain selection run on that group's functions, so the
/// survivors' closure within each already-peeled group splits at most two
/// ways, and the guard keeps the cross-group union no wider.
pub fn extract_grouped(
    family: &FunctionFamily,
    n: u32,
    k: u32,
    m: usize,
) -> Result<ExtractionResult> {
    if family.groups.is_none() {
        return Err(Error::InvalidInput("grouped extraction needs group labels"));
    }
    if k + 1 != family.b as u32 {
        return Err(Error::InvalidInput("arity bound must match the alphabet"));
    }
    if family.b == 2 && n >= 2 {
        return Err(Error::InvalidInput("selection needs at least 3 letters for n >= 2"));
    }
    if let Some(violation) = check_grouped_hypothesis(family, m)? {
        return Err(Error::HypothesisFailed(violation));
    }
    let a = family.group_count();
    let needed = n_bound_base(family.b as u64, n, a as u32)?;
    if (family.index_count() as u64) < needed {
        return Err(Error::InvalidInput("family too small for the requested selection"));
    }
    let mut current: Vec<usize> = (0..family.index_count()).collect();
    for g in (1..a).rev() {
        let members = family.group_members(g);
        let target = n_bound_base(family.b as u64, n, g as u32)?;
        let group_functions: Vec<Seq> = members
            .iter()
            .map(|&pos| family.functions[pos].clone())
            .collect();
        current = extract_core(&group_functions, &current, family.b, target)?;
    }
    let first_group: Vec<Seq> = family
        .group_members(0)
        .iter()
        .map(|&pos| family.functions[pos].clone())
        .collect();
    let selected = extract_core(&first_group, &current, family.b, n as u64)?;
    let witness_tree = restriction_closure(
        family.b,
        family.length,
        selected
            .iter()
            .flat_map(|&i| (0..a).map(move |j| (i, j)))
            .map(|(i, j)| family.function(j, i).clone()),
    )?;
    Ok(ExtractionResult {
        selected,
        witness_tree,
    })
}
