//! Products of conditions and the step pruning them one coordinate at a
//! time, so that a single small tree keeps covering every value the product
//! can decide.

use crate::classify::classify;
use crate::condition::{rep_is_accelerating, tree_through_stem};
use crate::domain::TreeDomain;
use crate::error::{Error, Result};
use crate::extraction::n_bound_base;
use crate::name::{maximal_lengths_reach, rule_label, validate_rule, LabelRule};
use crate::prune::{run_round, RoundInput, StemKeep};
use crate::seq::Seq;
use crate::tree::{
    split_level, FiniteTree, GradedTree, TreeRep, TreeView, EXPLICIT_NODE_BUDGET,
};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

/// The two coordinate shapes a product may carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoordinateKind {
    Accelerating,
    /// Every split in the coordinate tree fans out exactly this wide.
    KBranching(usize),
}

/// One coordinate of a product: a tree through its stem, either accelerating
/// or splitting a fixed number of ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    kind: CoordinateKind,
    stem: Seq,
    tree: TreeRep,
}

impl Coordinate {
    pub fn new(kind: CoordinateKind, stem: Seq, tree: TreeRep) -> Result<Self> {
        if !tree.contains(&stem) {
            return Err(Error::InvalidInput(
                "coordinate stem is not a node of its tree",
            ));
        }
        if !tree_through_stem(&tree, &stem) {
            return Err(Error::InvalidInput(
                "coordinate tree is not a tree through its stem",
            ));
        }
        match kind {
            CoordinateKind::Accelerating => {
                if !tree.domain().is_accelerating() {
                    return Err(Error::InvalidInput(
                        "accelerating coordinate needs an accelerating domain",
                    ));
                }
                if !rep_is_accelerating(&tree) {
                    return Err(Error::InvalidInput("coordinate tree is not accelerating"));
                }
            }
            CoordinateKind::KBranching(k) => {
                if k < 2 {
                    return Err(Error::InvalidInput("branching width must be at least 2"));
                }
                if tree.domain().is_accelerating() {
                    return Err(Error::InvalidInput(
                        "branching coordinate needs a uniform domain",
                    ));
                }
                let explicit = match &tree {
                    TreeRep::Explicit(t) => t,
                    TreeRep::Graded(_) => {
                        return Err(Error::InvalidInput(
                            "branching coordinate needs an explicit tree",
                        ))
                    }
                };
                for node in explicit.nodes() {
                    let arity = explicit.arity(node);
                    if arity > 1 && arity != k {
                        return Err(Error::InvalidInput(
                            "branching coordinate splits the wrong number of ways",
                        ));
                    }
                }
            }
        }
        Ok(Coordinate { kind, stem, tree })
    }

    pub fn kind(&self) -> &CoordinateKind {
        &self.kind
    }

    pub fn stem(&self) -> &Seq {
        &self.stem
    }

    pub fn tree(&self) -> &TreeRep {
        &self.tree
    }
}

/// A finite product of coordinates, indexed by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductCondition {
    coordinates: Vec<Coordinate>,
}

impl ProductCondition {
    pub fn new(coordinates: Vec<Coordinate>) -> Result<Self> {
        if coordinates.is_empty() {
            return Err(Error::InvalidInput("product needs at least one coordinate"));
        }
        Ok(ProductCondition { coordinates })
    }

    pub fn len(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[Coordinate] {
        &self.coordinates
    }

    pub fn coordinate(&self, alpha: usize) -> Option<&Coordinate> {
        self.coordinates.get(alpha)
    }
}

/// Which coordinates refinement may advance, each pinned at the split level
/// reached so far.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefinementOrderSpec {
    eta: BTreeMap<usize, usize>,
}

impl RefinementOrderSpec {
    pub fn new(eta: BTreeMap<usize, usize>) -> Self {
        RefinementOrderSpec { eta }
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.eta.keys().copied()
    }

    pub fn is_active(&self, alpha: usize) -> bool {
        self.eta.contains_key(&alpha)
    }

    pub fn level(&self, alpha: usize) -> Option<usize> {
        self.eta.get(&alpha).copied()
    }

    pub fn levels(&self) -> &BTreeMap<usize, usize> {
        &self.eta
    }
}

/// A name over products: the decided letters come from one rule applied to
/// the tuple of per-coordinate nodes walked so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductName {
    output_alphabet: u8,
    target_length: usize,
    rule: LabelRule,
}

impl ProductName {
    pub fn new(output_alphabet: u8, target_length: usize, rule: LabelRule) -> Result<Self> {
        if output_alphabet < 2 {
            return Err(Error::InvalidInput(
                "output alphabet needs at least two letters",
            ));
        }
        if target_length == 0 {
            return Err(Error::InvalidInput("target length must be at least 1"));
        }
        validate_rule(&rule, output_alphabet, target_length)?;
        Ok(ProductName {
            output_alphabet,
            target_length,
            rule,
        })
    }

    pub fn output_alphabet(&self) -> u8 {
        self.output_alphabet
    }

    pub fn target_length(&self) -> usize {
        self.target_length
    }

    pub fn rule(&self) -> &LabelRule {
        &self.rule
    }

    /// Decided prefix at a tuple of per-coordinate nodes, one per coordinate
    /// in positional order.
    pub fn label(&self, parts: &[&Seq]) -> Seq {
        rule_label(&self.rule, parts)
    }
}

/// A product condition, the refinement discipline over it, and the small
/// tree its name's values run through up to the guard length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsolidationState {
    condition: ProductCondition,
    order: RefinementOrderSpec,
    guard: usize,
    cover: FiniteTree,
    name: ProductName,
}

impl ConsolidationState {
    pub fn new(
        condition: ProductCondition,
        order: RefinementOrderSpec,
        guard: usize,
        cover: FiniteTree,
        name: ProductName,
    ) -> Result<Self> {
        for alpha in order.active() {
            let coord = condition
                .coordinate(alpha)
                .ok_or(Error::InvalidInput("active coordinate outside the product"))?;
            let level = order.level(alpha).unwrap_or(0);
            if split_level(coord.tree(), coord.stem(), level)?.is_empty() {
                return Err(Error::InvalidInput(
                    "coordinate has no nodes at its split level",
                ));
            }
        }
        for coord in condition.coordinates() {
            if !maximal_lengths_reach(coord.tree(), name.target_length()) {
                return Err(Error::InvalidInput(
                    "coordinate too shallow to decide the target length",
                ));
            }
        }
        if guard > name.target_length() {
            return Err(Error::InvalidInput("guard exceeds the target length"));
        }
        let wanted = TreeDomain::uniform(name.output_alphabet(), name.target_length())?;
        if *cover.domain() != wanted {
            return Err(Error::InvalidInput("cover domain must match the name"));
        }
        if cover.nodes().iter().any(|s| s.len() > guard) {
            return Err(Error::InvalidInput("cover node longer than the guard"));
        }
        if !classify(&cover, name.output_alphabet() as usize - 1).is_k_tree {
            return Err(Error::InvalidInput("cover exceeds the branching bound"));
        }
        Ok(ConsolidationState {
            condition,
            order,
            guard,
            cover,
            name,
        })
    }

    pub fn condition(&self) -> &ProductCondition {
        &self.condition
    }

    pub fn order(&self) -> &RefinementOrderSpec {
        &self.order
    }

    /// Length every value has been pinned through the cover so far.
    pub fn guard(&self) -> usize {
        self.guard
    }

    pub fn cover(&self) -> &FiniteTree {
        &self.cover
    }

    pub fn name(&self) -> &ProductName {
        &self.name
    }
}

/// All ways of picking one node at each active coordinate's split level, in
/// positional coordinate order with each level ascending.
fn selector_grid(
    condition: &ProductCondition,
    order: &RefinementOrderSpec,
) -> Result<Vec<BTreeMap<usize, Seq>>> {
    let mut grid: Vec<BTreeMap<usize, Seq>> = Vec::new();
    grid.push(BTreeMap::new());
    for (&alpha, &level) in order.levels() {
        let coord = condition
            .coordinate(alpha)
            .ok_or(Error::InvalidInput("active coordinate outside the product"))?;
        let nodes = split_level(coord.tree(), coord.stem(), level)?;
        let mut next = Vec::with_capacity(grid.len() * nodes.len());
        for sel in &grid {
            for node in &nodes {
                if next.len() >= EXPLICIT_NODE_BUDGET {
                    return Err(Error::BudgetExceeded {
                        context: "selector grid",
                        at: next.len(),
                    });
                }
                let mut with = sel.clone();
                with.insert(alpha, node.clone());
                next.push(with);
            }
        }
        grid = next;
    }
    Ok(grid)
}

/// Replaces each active coordinate's tree by its subtree through the
/// selector's node at that coordinate's split level. An empty selector set
/// leaves the product unchanged.
pub fn graft(
    p: &ProductCondition,
    order: &RefinementOrderSpec,
    selector: &BTreeMap<usize, Seq>,
) -> Result<ProductCondition> {
    let active: BTreeSet<usize> = order.active().collect();
    let keys: BTreeSet<usize> = selector.keys().copied().collect();
    if active != keys {
        return Err(Error::InvalidInput(
            "selector must cover exactly the active coordinates",
        ));
    }
    let mut coordinates = Vec::with_capacity(p.len());
    for (alpha, coord) in p.coordinates().iter().enumerate() {
        match selector.get(&alpha) {
            None => coordinates.push(coord.clone()),
            Some(node) => {
                let level = order.level(alpha).unwrap_or(0);
                let nodes = split_level(coord.tree(), coord.stem(), level)?;
                if !nodes.contains(node) {
                    return Err(Error::InvalidInput("selector node not at its split level"));
                }
                let tree = coord.tree().subtree_through(node)?;
                coordinates.push(Coordinate::new(coord.kind().clone(), node.clone(), tree)?);
            }
        }
    }
    ProductCondition::new(coordinates)
}

/// What one verification pass saw. The three boolean checks say the cover is
/// small and within the branching bound, every value of the whole product
/// lands in it, and every selector on the grid decides a value inside it.
/// The probe counters report a bounded search for refinements that split
/// values the grid did not already separate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsolidationReport {
    pub cover_ok: bool,
    pub values_ok: bool,
    pub grid_ok: bool,
    /// First selector whose decided value misses the cover.
    pub grid_witness: Option<Vec<(usize, Seq)>>,
    pub probes: usize,
    pub probe_violations: usize,
}

impl ConsolidationReport {
    /// The checks a state must pass before it can be stepped.
    pub fn sound(&self) -> bool {
        self.cover_ok && self.values_ok && self.grid_ok
    }

    /// No probed refinement split values the grid keeps together.
    pub fn stable(&self) -> bool {
        self.probe_violations == 0
    }
}

/// Decided prefixes of every branch tuple through the given per-coordinate
/// nodes, cut at `upto` letters.
fn region_values(
    condition: &ProductCondition,
    start: Vec<Seq>,
    name: &ProductName,
    upto: usize,
    budget: &mut usize,
) -> Result<BTreeSet<Seq>> {
    let mut out = BTreeSet::new();
    let mut stack = Vec::new();
    stack.push(start);
    while let Some(parts) = stack.pop() {
        if *budget == 0 {
            return Err(Error::BudgetExceeded {
                context: "value walk",
                at: EXPLICIT_NODE_BUDGET,
            });
        }
        *budget -= 1;
        let refs: Vec<&Seq> = parts.iter().collect();
        let value = name.label(&refs);
        if value.len() >= upto {
            out.insert(value.restrict(upto));
            continue;
        }
        // lengthen the shortest coordinate: the decided prefix can never
        // outgrow it
        let alpha = (0..parts.len())
            .min_by_key(|&a| parts[a].len())
            .unwrap_or(0);
        let successors = condition.coordinates()[alpha]
            .tree()
            .successors(&parts[alpha]);
        if successors.is_empty() {
            return Err(Error::Undecided("name cannot decide the guard length"));
        }
        for s in successors {
            let mut next = parts.clone();
            next[alpha] = s;
            stack.push(next);
        }
    }
    Ok(out)
}

fn leftmost_descendant(tree: &TreeRep, from: &Seq, steps: usize) -> Seq {
    let mut node = from.clone();
    for _ in 0..steps {
        match tree.successor_letters(&node).first() {
            Some(&x) => node = node.child(x),
            None => break,
        }
    }
    node
}

/// Checks the state against its name and probes up to `refinement_probes`
/// deepenings of the grid for value splits the grid keeps together.
pub fn verify_consolidates(
    state: &ConsolidationState,
    refinement_probes: usize,
) -> Result<ConsolidationReport> {
    let name = state.name();
    let k = name.output_alphabet() as usize - 1;
    let guard = state.guard();

    let cover_ok = classify(state.cover(), k).is_k_tree
        && state.cover().nodes().iter().all(|s| s.len() <= guard);

    let stems: Vec<Seq> = state
        .condition()
        .coordinates()
        .iter()
        .map(|c| c.stem().clone())
        .collect();
    let mut budget = EXPLICIT_NODE_BUDGET;
    let whole = region_values(state.condition(), stems.clone(), name, guard, &mut budget)?;
    let values_ok = whole.iter().all(|v| state.cover().contains(v));

    let grid = selector_grid(state.condition(), state.order())?;
    let mut grid_ok = true;
    let mut grid_witness = None;
    let mut decided: Vec<Seq> = Vec::with_capacity(grid.len());
    for sel in &grid {
        let mut parts = stems.clone();
        for (&alpha, node) in sel {
            parts[alpha] = node.clone();
        }
        let vals = region_values(state.condition(), parts, name, guard, &mut budget)?;
        if vals.len() != 1 {
            return Err(Error::Undecided(
                "selector region does not decide the guard length",
            ));
        }
        let v = vals.into_iter().next().unwrap_or_else(Seq::empty);
        if grid_ok && !state.cover().contains(&v) {
            grid_ok = false;
            grid_witness = Some(sel.iter().map(|(&a, n)| (a, n.clone())).collect());
        }
        decided.push(v);
    }

    let mut probes = 0usize;
    let mut probe_violations = 0usize;
    for j in 1..=refinement_probes {
        probes += 1;
        let mut probe_values: Vec<Seq> = Vec::with_capacity(grid.len());
        for sel in &grid {
            let mut parts = stems.clone();
            for (&alpha, node) in sel {
                parts[alpha] = node.clone();
            }
            for (alpha, part) in parts.iter_mut().enumerate() {
                *part = leftmost_descendant(
                    state.condition().coordinates()[alpha].tree(),
                    part,
                    j,
                );
            }
            let refs: Vec<&Seq> = parts.iter().collect();
            probe_values.push(name.label(&refs));
        }
        for i in 0..grid.len() {
            for l in i + 1..grid.len() {
                let cut = probe_values[i]
                    .len()
                    .min(probe_values[l].len())
                    .min(name.target_length());
                if probe_values[i].restrict(cut) != probe_values[l].restrict(cut)
                    && decided[i] == decided[l]
                {
                    probe_violations += 1;
                }
            }
        }
    }

    Ok(ConsolidationReport {
        cover_ok,
        values_ok,
        grid_ok,
        grid_witness,
        probes,
        probe_violations,
    })
}

fn rebuild_explicit(
    old: &FiniteTree,
    keeps: &[StemKeep],
    stems: &[Seq],
) -> Result<FiniteTree> {
    let mut allowed: BTreeSet<Seq> = BTreeSet::new();
    let mut rhos: Vec<Seq> = Vec::new();
    for piece in keeps {
        allowed.extend(piece.chain.iter().cloned());
        allowed.insert(piece.pool.clone());
        for cand in &piece.kept {
            allowed.insert(cand.successor.clone());
            allowed.extend(cand.chain.iter().cloned());
            allowed.insert(cand.rho.clone());
            rhos.push(cand.rho.clone());
        }
    }
    let nodes: BTreeSet<Seq> = old
        .nodes()
        .iter()
        .filter(|s| {
            !stems.iter().any(|t| t.is_proper_prefix_of(s))
                || allowed.contains(*s)
                || rhos.iter().any(|r| r.is_prefix_of(s))
        })
        .cloned()
        .collect();
    FiniteTree::new(*old.domain(), nodes)
}

fn rebuild_graded(old: &GradedTree, keeps: &[StemKeep], stems: &[Seq]) -> Result<GradedTree> {
    let mut allowed: BTreeSet<Seq> = BTreeSet::new();
    let mut rhos: Vec<Seq> = Vec::new();
    for piece in keeps {
        allowed.extend(piece.chain.iter().cloned());
        allowed.insert(piece.pool.clone());
        for cand in &piece.kept {
            allowed.insert(cand.successor.clone());
            allowed.extend(cand.chain.iter().cloned());
            allowed.insert(cand.rho.clone());
            rhos.push(cand.rho.clone());
        }
    }
    let mut spine: BTreeSet<Seq> = old
        .spine()
        .iter()
        .filter(|s| {
            !stems.iter().any(|t| t.is_proper_prefix_of(s))
                || allowed.contains(*s)
                || rhos.iter().any(|r| r.is_prefix_of(s))
        })
        .cloned()
        .collect();
    spine.extend(allowed.iter().cloned());
    spine.extend(stems.iter().cloned());

    let mut frontier: BTreeSet<Seq> = BTreeSet::new();
    for f in old.frontier() {
        if stems.iter().any(|t| t == f) {
            // replaced wholesale by the kept pieces below it
            continue;
        }
        if stems.iter().any(|t| t.is_proper_prefix_of(f)) {
            // below a grid node: survives only inside a kept region
            if rhos.iter().any(|r| r.is_prefix_of(f)) {
                frontier.insert(f.clone());
            }
            continue;
        }
        let below: Vec<&Seq> = stems.iter().filter(|t| f.is_proper_prefix_of(t)).collect();
        if below.is_empty() {
            frontier.insert(f.clone());
            continue;
        }
        // the fan below f narrows to the explicit paths toward the grid
        // nodes; side branches keep their full fans
        let mut path_nodes: BTreeSet<Seq> = BTreeSet::new();
        path_nodes.insert(f.clone());
        for t in &below {
            for p in t.proper_prefixes() {
                if f.is_proper_prefix_of(&p) {
                    path_nodes.insert(p);
                }
            }
        }
        for p in &path_nodes {
            spine.insert(p.clone());
            for x in 0..old.domain().letters_at(p.len()) {
                let c = p.child(x as u8);
                if !path_nodes.contains(&c) && !stems.iter().any(|t| t == &c) {
                    spine.insert(c.clone());
                    frontier.insert(c);
                }
            }
        }
    }
    for r in &rhos {
        if !old.spine().contains(r) {
            frontier.insert(r.clone());
        }
    }
    GradedTree::new(*old.domain(), spine, frontier)
}

fn rebuild(tree: &TreeRep, keeps: &[StemKeep], stems: &[Seq]) -> Result<TreeRep> {
    match tree {
        TreeRep::Explicit(t) => Ok(TreeRep::Explicit(rebuild_explicit(t, keeps, stems)?)),
        TreeRep::Graded(g) => Ok(TreeRep::Graded(rebuild_graded(g, keeps, stems)?)),
    }
}

/// Advances one active coordinate. Below every grid node of that coordinate
/// the tree is pruned to a fresh split whose kept successors decide one more
/// common length, the connecting paths go unary, and the cover grows by
/// exactly the decided values. An accelerating coordinate keeps a number of
/// successors matching its new split count; a branching coordinate keeps its
/// whole first split.
pub fn consolidate_step(state: &ConsolidationState, beta: usize) -> Result<ConsolidationState> {
    let order = state.order();
    if !order.is_active(beta) {
        return Err(Error::InvalidInput("step coordinate is not active"));
    }
    if !verify_consolidates(state, 0)?.sound() {
        return Err(Error::InvalidInput("state does not consolidate its name"));
    }

    let name = state.name();
    let out_b = name.output_alphabet();
    let target = name.target_length();
    let eta_beta = order.level(beta).unwrap_or(0);
    let coord_beta = &state.condition().coordinates()[beta];

    let grid = selector_grid(state.condition(), order)?;
    let stems_beta = split_level(coord_beta.tree(), coord_beta.stem(), eta_beta)?;
    let mut group_stem = Vec::with_capacity(grid.len());
    for sel in &grid {
        let node = sel
            .get(&beta)
            .ok_or(Error::InvalidInput("step coordinate is not active"))?;
        let idx = stems_beta
            .iter()
            .position(|t| t == node)
            .ok_or(Error::InvalidInput("selector node not at its split level"))?;
        group_stem.push(idx);
    }

    let (keep, keep_all, want) = match coord_beta.kind() {
        CoordinateKind::Accelerating => {
            let n = eta_beta + 2;
            let want =
                n_bound_base(out_b as u64, n as u32, grid.len() as u32).unwrap_or(u64::MAX);
            (n, false, want)
        }
        CoordinateKind::KBranching(_) => (0, true, 2),
    };
    let width_cap = if keep_all { u64::MAX } else { want };

    let stems: Vec<Seq> = state
        .condition()
        .coordinates()
        .iter()
        .map(|c| c.stem().clone())
        .collect();
    let label = |g: usize, node: &Seq| {
        let sel = &grid[g];
        let parts: Vec<&Seq> = (0..stems.len())
            .map(|alpha| {
                if alpha == beta {
                    node
                } else if let Some(n) = sel.get(&alpha) {
                    n
                } else {
                    &stems[alpha]
                }
            })
            .collect();
        name.label(&parts)
    };

    let outcome = run_round(RoundInput {
        tree: coord_beta.tree(),
        stems: &stems_beta,
        group_stem: &group_stem,
        label,
        keep,
        keep_all,
        want,
        width_cap,
        guard: state.guard(),
        target,
        output_alphabet: out_b,
        cover: state.cover(),
        round: eta_beta,
    })?;

    let new_tree = rebuild(coord_beta.tree(), &outcome.keeps, &stems_beta)?;
    let mut coordinates = state.condition().coordinates().to_vec();
    coordinates[beta] = Coordinate::new(
        coord_beta.kind().clone(),
        coord_beta.stem().clone(),
        new_tree,
    )?;

    let mut eta = order.levels().clone();
    eta.insert(beta, eta_beta + 1);

    ConsolidationState::new(
        ProductCondition::new(coordinates)?,
        RefinementOrderSpec::new(eta),
        outcome.decision_length,
        outcome.cover,
        name.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condition::{build_minimal_accelerating, Condition};
    use crate::name::{DecidedName, LabelSource};
    use crate::prune::prune_to_cover;
    use alloc::vec;

    fn digit_rule(seed: u64) -> LabelRule {
        LabelRule::PathDigits { seed, modulus: 2 }
    }

    fn minimal_coordinate(depth: usize) -> Coordinate {
        Coordinate::new(
            CoordinateKind::Accelerating,
            Seq::from([0]),
            build_minimal_accelerating(depth).unwrap(),
        )
        .unwrap()
    }

    fn trivial_cover(out_b: u8, target: usize) -> FiniteTree {
        FiniteTree::trivial(TreeDomain::uniform(out_b, target).unwrap())
    }

    fn single_state(depth: usize, seed: u64) -> ConsolidationState {
        let mut eta = BTreeMap::new();
        eta.insert(0usize, 0usize);
        ConsolidationState::new(
            ProductCondition::new(vec![minimal_coordinate(depth)]).unwrap(),
            RefinementOrderSpec::new(eta),
            0,
            trivial_cover(3, depth),
            ProductName::new(3, depth, digit_rule(seed)).unwrap(),
        )
        .unwrap()
    }

    // a single maximal branch, vacuously accelerating, usable as a deep
    // passive coordinate
    fn chain_coordinate(depth: usize) -> Coordinate {
        let domain = TreeDomain::accelerating(depth).unwrap();
        let stem = Seq::from(vec![0u8; depth]);
        let tree = FiniteTree::downward_closure(domain, [stem.clone()]).unwrap();
        Coordinate::new(CoordinateKind::Accelerating, stem, TreeRep::Explicit(tree)).unwrap()
    }

    fn binary_chain_coordinate(depth: usize) -> Coordinate {
        let domain = TreeDomain::uniform(2, depth).unwrap();
        let stem = Seq::from(vec![0u8; depth]);
        let tree = FiniteTree::downward_closure(domain, [stem.clone()]).unwrap();
        Coordinate::new(CoordinateKind::KBranching(2), stem, TreeRep::Explicit(tree)).unwrap()
    }

    fn full_binary_coordinate(depth: usize) -> Coordinate {
        let domain = TreeDomain::uniform(2, depth).unwrap();
        let tree = FiniteTree::full(domain).unwrap();
        Coordinate::new(
            CoordinateKind::KBranching(2),
            Seq::empty(),
            TreeRep::Explicit(tree),
        )
        .unwrap()
    }

    #[test]
    fn graft_with_no_active_coordinates_is_identity() {
        let p = ProductCondition::new(vec![minimal_coordinate(4), full_binary_coordinate(3)])
            .unwrap();
        let order = RefinementOrderSpec::default();
        let grafted = graft(&p, &order, &BTreeMap::new()).unwrap();
        assert_eq!(grafted, p);
    }

    #[test]
    fn graft_advances_the_selected_stem() {
        let p = ProductCondition::new(vec![minimal_coordinate(4)]).unwrap();
        let mut eta = BTreeMap::new();
        eta.insert(0usize, 1usize);
        let order = RefinementOrderSpec::new(eta);
        let pick = Seq::from([0, 1]);
        let mut selector = BTreeMap::new();
        selector.insert(0usize, pick.clone());
        let grafted = graft(&p, &order, &selector).unwrap();
        let coord = &grafted.coordinates()[0];
        assert_eq!(coord.stem(), &pick);
        let nodes = coord.tree().to_explicit().unwrap();
        assert!(nodes.nodes().iter().all(|s| s.comparable(&pick)));
        assert!(nodes.len() > pick.len() + 1);
    }

    #[test]
    fn graft_rejects_off_level_selectors() {
        let p = ProductCondition::new(vec![minimal_coordinate(4)]).unwrap();
        let mut eta = BTreeMap::new();
        eta.insert(0usize, 1usize);
        let order = RefinementOrderSpec::new(eta);
        let mut selector = BTreeMap::new();
        selector.insert(0usize, Seq::from([0]));
        assert_eq!(
            graft(&p, &order, &selector),
            Err(Error::InvalidInput("selector node not at its split level"))
        );
        assert_eq!(
            graft(&p, &order, &BTreeMap::new()),
            Err(Error::InvalidInput(
                "selector must cover exactly the active coordinates"
            ))
        );
    }

    #[test]
    fn fresh_state_verifies_cleanly() {
        let state = single_state(6, 11);
        let report = verify_consolidates(&state, 3).unwrap();
        assert!(report.sound());
        assert!(report.stable());
        assert_eq!(report.probes, 3);
        assert_eq!(report.grid_witness, None);
    }

    #[test]
    fn missing_cover_branch_flags_the_grid() {
        // at guard 1 both level-two regions decide the digit of their shared
        // first letter, so a cover holding only the other letter misses both
        let seed = 5;
        let name = ProductName::new(3, 6, digit_rule(seed)).unwrap();
        let decided = name.label(&[&Seq::from([0, 0])]).restrict(1);
        let other = Seq::from([1 - decided.letter(0)]);
        let cover = FiniteTree::downward_closure(
            TreeDomain::uniform(3, 6).unwrap(),
            [other],
        )
        .unwrap();
        let mut eta = BTreeMap::new();
        eta.insert(0usize, 1usize);
        let state = ConsolidationState::new(
            ProductCondition::new(vec![minimal_coordinate(6)]).unwrap(),
            RefinementOrderSpec::new(eta),
            1,
            cover,
            name,
        )
        .unwrap();
        let report = verify_consolidates(&state, 0).unwrap();
        assert!(report.cover_ok);
        assert!(!report.values_ok);
        assert!(!report.grid_ok);
        assert_eq!(
            report.grid_witness,
            Some(vec![(0usize, Seq::from([0, 0]))])
        );
    }

    #[test]
    fn single_coordinate_steps_match_direct_pruning() {
        let seed = 20260819;
        let first = consolidate_step(&single_state(12, seed), 0).unwrap();
        assert_eq!(first.guard(), 9);
        assert_eq!(first.order().level(0), Some(1));
        let second = consolidate_step(&first, 0).unwrap();
        assert_eq!(second.guard(), 12);
        assert_eq!(second.order().level(0), Some(2));

        let cond =
            Condition::new(Seq::from([0]), build_minimal_accelerating(12).unwrap()).unwrap();
        let name = DecidedName::new(cond, 3, 12, LabelSource::Rule(digit_rule(seed))).unwrap();
        let direct = prune_to_cover(&name, 2).unwrap();

        assert_eq!(second.cover(), &direct.cover);
        let stepped = second.condition().coordinates()[0]
            .tree()
            .to_explicit()
            .unwrap();
        let pruned = direct.pruned.tree().to_explicit().unwrap();
        assert_eq!(stepped.nodes(), pruned.nodes());
        assert_eq!(second.condition().coordinates()[0].stem(), direct.pruned.stem());
    }

    #[test]
    fn mixed_step_at_the_accelerating_coordinate() {
        let coords = vec![minimal_coordinate(8), binary_chain_coordinate(8)];
        let mut eta = BTreeMap::new();
        eta.insert(0usize, 0usize);
        eta.insert(1usize, 0usize);
        let state = ConsolidationState::new(
            ProductCondition::new(coords).unwrap(),
            RefinementOrderSpec::new(eta),
            0,
            trivial_cover(3, 8),
            ProductName::new(3, 8, digit_rule(7)).unwrap(),
        )
        .unwrap();
        let next = consolidate_step(&state, 0).unwrap();
        assert_eq!(next.guard(), 8);
        assert_eq!(next.order().level(0), Some(1));
        assert_eq!(next.order().level(1), Some(0));
        assert!(verify_consolidates(&next, 2).unwrap().sound());
        // the old cover is exactly the new one cut at the old guard
        let cut: BTreeSet<Seq> = next
            .cover()
            .nodes()
            .iter()
            .filter(|s| s.len() <= state.guard())
            .cloned()
            .collect();
        assert_eq!(&cut, state.cover().nodes());
        // grid nodes moved to the two kept level-eight successors
        let level = split_level(
            next.condition().coordinates()[0].tree(),
            &Seq::from([0]),
            1,
        )
        .unwrap();
        assert_eq!(level.len(), 2);
        assert!(level.iter().all(|s| s.len() == 8));
    }

    #[test]
    fn mixed_step_at_the_branching_coordinate() {
        let coords = vec![chain_coordinate(8), full_binary_coordinate(8)];
        let mut eta = BTreeMap::new();
        eta.insert(0usize, 0usize);
        eta.insert(1usize, 0usize);
        let state = ConsolidationState::new(
            ProductCondition::new(coords).unwrap(),
            RefinementOrderSpec::new(eta),
            0,
            trivial_cover(3, 8),
            ProductName::new(3, 8, digit_rule(3)).unwrap(),
        )
        .unwrap();
        let next = consolidate_step(&state, 1).unwrap();
        assert_eq!(next.guard(), 1);
        assert_eq!(next.order().level(1), Some(1));
        // keeping the whole first split leaves the full tree in place
        let tree = next.condition().coordinates()[1].tree().to_explicit().unwrap();
        assert_eq!(tree.len(), 511);
        assert!(verify_consolidates(&next, 2).unwrap().sound());
        assert!(next.cover().nodes().iter().all(|s| s.len() <= 1));
    }

    #[test]
    fn step_needs_an_active_coordinate() {
        let state = single_state(6, 1);
        assert_eq!(
            consolidate_step(&state, 1),
            Err(Error::InvalidInput("step coordinate is not active"))
        );
    }

    #[test]
    fn state_rejects_a_mismatched_cover() {
        let mut eta = BTreeMap::new();
        eta.insert(0usize, 0usize);
        let out = ConsolidationState::new(
            ProductCondition::new(vec![minimal_coordinate(6)]).unwrap(),
            RefinementOrderSpec::new(eta),
            0,
            trivial_cover(3, 5),
            ProductName::new(3, 6, digit_rule(0)).unwrap(),
        );
        assert_eq!(
            out,
            Err(Error::InvalidInput("cover domain must match the name"))
        );
    }
}
