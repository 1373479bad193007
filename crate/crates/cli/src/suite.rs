//! The verification suite: twelve seeded checks, each timed and reported
//! with a pass or fail line. A criterion with a runtime limit fails when it
//! runs over, even if every check inside it held.

use crate::json::TreeJson;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;
use treeloc_core::{
    avoid_tree, build_minimal_accelerating, check_grouped_hypothesis, classify, compose_covers,
    consolidate_step, extract_2tree, extract_grouped, min_cover_predictors, min_cover_trees,
    monotonicity_report, n_bound, predictor_to_trees, predicts, prune_to_cover,
    restriction_closure, slalom_of_decided, split_level, tree_to_predictor, verify_consolidates,
    Condition, ConsolidationState, Coordinate, CoordinateKind, CoverFamily, CoverInstance,
    DecidedName, FiniteTree, FunctionFamily, LabelRule, LabelSource, Predictor,
    ProductCondition, ProductName, RefinementOrderSpec, Seq, TreeDomain, TreeView,
};

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
    pub limit_millis: Option<u128>,
}

const TITLES: [&str; 12] = [
    "extraction selections",
    "family size bounds",
    "grouped extraction",
    "tree cover minimums",
    "predictor cover minimums",
    "cover monotonicity",
    "deep pruning",
    "avoidance disjointness",
    "predictor tree correspondence",
    "cover composition",
    "consolidation",
    "slalom growth",
];

const LIMITS: [Option<u128>; 12] = [
    Some(60_000),
    None,
    Some(60_000),
    Some(120_000),
    Some(120_000),
    None,
    Some(60_000),
    None,
    None,
    None,
    Some(120_000),
    None,
];

pub fn run_criterion(id: usize, seed: u64) -> CriterionOutcome {
    assert!((1..=12).contains(&id), "criterion ids run from 1 to 12");
    let started = Instant::now();
    let result = match id {
        1 => extraction_selections(seed),
        2 => family_size_bounds(),
        3 => grouped_extraction(seed),
        4 => tree_cover_minimums(),
        5 => predictor_cover_minimums(),
        6 => cover_monotonicity(),
        7 => deep_pruning(seed),
        8 => avoidance_disjointness(seed),
        9 => predictor_tree_correspondence(seed),
        10 => cover_composition(),
        11 => consolidation(seed),
        12 => slalom_growth(seed),
        _ => unreachable!(),
    };
    let millis = started.elapsed().as_millis();
    let limit = LIMITS[id - 1];
    let within = limit.map_or(true, |cap| millis <= cap);
    let (passed, detail) = match result {
        Ok(detail) if within => (true, detail),
        Ok(detail) => (
            false,
            format!(
                "{detail}; ran {millis} ms, over the {} ms limit",
                limit.unwrap_or(0)
            ),
        ),
        Err(detail) => (false, detail),
    };
    CriterionOutcome {
        id,
        title: TITLES[id - 1],
        passed,
        detail,
        millis,
        limit_millis: limit,
    }
}

pub fn all_criteria(seed: u64) -> Vec<CriterionOutcome> {
    (1..=12).map(|id| run_criterion(id, seed)).collect()
}

fn rng_for(id: usize, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ ((id as u64) << 32))
}

fn core<T>(result: treeloc_core::Result<T>, context: &str) -> Result<T, String> {
    result.map_err(|e| format!("{context}: {e}"))
}

fn ensure(check: bool, context: &str) -> Result<(), String> {
    if check {
        Ok(())
    } else {
        Err(context.to_string())
    }
}

fn random_function(rng: &mut ChaCha8Rng, b: u8, len: usize) -> Seq {
    let letters: Vec<u8> = (0..len).map(|_| rng.random_range(0..b)).collect();
    Seq::from(letters)
}

fn all_functions(b: u8, len: usize) -> Vec<Seq> {
    let mut out = vec![Seq::empty()];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|s| (0..b).map(|x| s.child(x)).collect::<Vec<_>>())
            .collect();
    }
    out
}

fn subsets_of_size(count: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(
        start: usize,
        count: usize,
        size: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for i in start..count {
            current.push(i);
            rec(i + 1, count, size, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, count, size, &mut Vec::new(), &mut out);
    out
}

fn extraction_selections(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(1, seed);
    for trial in 0..10_000usize {
        let n = 1 + (trial % 3) as u32;
        let pool = 3usize.pow(n);
        let functions: Vec<Seq> = (0..pool).map(|_| random_function(&mut rng, 3, 5)).collect();
        let family = core(
            FunctionFamily::new(3, 5, functions),
            &format!("trial {trial}: family"),
        )?;
        let out = core(extract_2tree(&family, n), &format!("trial {trial}: selection"))?;
        ensure(
            out.selected.len() == n as usize,
            &format!("trial {trial}: selected {} of {n} wanted", out.selected.len()),
        )?;
        ensure(
            out.selected.iter().all(|&i| i < pool),
            &format!("trial {trial}: an index fell outside the pool"),
        )?;
        ensure(
            classify(&out.witness_tree, 2).is_k_tree,
            &format!("trial {trial}: witness closure splits too wide"),
        )?;
    }
    for trial in 0..400usize {
        let n = 1 + (trial % 2) as u32;
        let len = 2 + (trial % 2);
        let pool = 3usize.pow(n);
        let functions: Vec<Seq> = (0..pool)
            .map(|_| random_function(&mut rng, 3, len))
            .collect();
        let family = core(
            FunctionFamily::new(3, len, functions.clone()),
            &format!("check {trial}: family"),
        )?;
        let out = core(extract_2tree(&family, n), &format!("check {trial}: selection"))?;
        let valid: Vec<Vec<usize>> = subsets_of_size(pool, n as usize)
            .into_iter()
            .filter(|subset| {
                let picked = subset.iter().map(|&i| functions[i].clone());
                restriction_closure(3, len, picked)
                    .map(|closure| classify(&closure, 2).is_k_tree)
                    .unwrap_or(false)
            })
            .collect();
        ensure(
            valid.contains(&out.selected),
            &format!("check {trial}: selection is not among the valid subsets"),
        )?;
    }
    Ok("10000 random selections verified; 400 confirmed against full subset enumeration".into())
}

fn family_size_bounds() -> Result<String, String> {
    ensure(n_bound(2, 1) == Ok(9), "two functions at arity one should need 9")?;
    ensure(n_bound(1, 2) == Ok(27), "one function at arity two should need 27")?;
    ensure(
        n_bound(2, 2) == Ok(19_683),
        "two functions at arity two should need 3^9",
    )?;
    Ok("bounds 9, 27 and 19683 hold".into())
}

/// One group, any functions, guard zero: every length-zero restriction
/// closure is a chain and a lone group has nothing to collide with.
fn single_group_family(rng: &mut ChaCha8Rng, n: u32) -> Result<FunctionFamily, String> {
    let pool = 3usize.pow(n);
    let functions: Vec<Seq> = (0..pool).map(|_| random_function(rng, 3, 4)).collect();
    core(
        FunctionFamily::with_groups(3, 4, functions, vec![0; pool]),
        "single group family",
    )
}

/// Two groups told apart by their first letter, guard one: the guarded
/// closure is the two-letter root split and no guard prefix crosses groups.
fn split_prefix_family(rng: &mut ChaCha8Rng, n: u32) -> Result<FunctionFamily, String> {
    let size = if n == 1 { 27 } else { 19_683 };
    let mut functions = Vec::with_capacity(2 * size);
    let mut labels = Vec::with_capacity(2 * size);
    for group in 0..2u8 {
        for _ in 0..size {
            let tail = random_function(rng, 3, 3);
            let mut letters = vec![group];
            letters.extend_from_slice(tail.letters());
            functions.push(Seq::from(letters));
            labels.push(group as usize);
        }
    }
    core(
        FunctionFamily::with_groups(3, 4, functions, labels),
        "split prefix family",
    )
}

fn grouped_extraction(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(3, seed);
    let mut big = 0usize;
    for trial in 0..1_000usize {
        let (family, n, m) = if trial % 100 == 99 {
            big += 1;
            (split_prefix_family(&mut rng, 2)?, 2u32, 1usize)
        } else {
            match trial % 3 {
                0 => (single_group_family(&mut rng, 1)?, 1, 0),
                1 => (single_group_family(&mut rng, 2)?, 2, 0),
                _ => (split_prefix_family(&mut rng, 1)?, 1, 1),
            }
        };
        let hypothesis = core(
            check_grouped_hypothesis(&family, m),
            &format!("trial {trial}: hypothesis check"),
        )?;
        ensure(
            hypothesis.is_none(),
            &format!("trial {trial}: construction violates the hypothesis"),
        )?;
        let out = core(
            extract_grouped(&family, n, 2, m),
            &format!("trial {trial}: grouped selection"),
        )?;
        ensure(
            out.selected.len() == n as usize,
            &format!("trial {trial}: selected {} of {n} wanted", out.selected.len()),
        )?;
        ensure(
            classify(&out.witness_tree, 2).is_k_tree,
            &format!("trial {trial}: witness closure splits too wide"),
        )?;
        let groups = family.group_count();
        let cross: Vec<Seq> = out
            .selected
            .iter()
            .flat_map(|&i| (0..groups).map(move |g| (g, i)))
            .map(|(g, i)| family.functions()[family.group_members(g)[i]].clone())
            .collect();
        let closure = core(
            restriction_closure(3, 4, cross),
            &format!("trial {trial}: cross-group closure"),
        )?;
        ensure(
            classify(&closure, 2).is_k_tree,
            &format!("trial {trial}: cross-group closure splits too wide"),
        )?;
    }
    Ok(format!(
        "1000 grouped selections verified across one- and two-group shapes ({big} at full two-round size)"
    ))
}

/// Branch sets of every maximal tree of depth two over three letters that
/// splits exactly two ways at each node.
fn all_pair_tree_branch_sets() -> Vec<BTreeSet<Seq>> {
    let pairs: [[u8; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
    let mut out = Vec::new();
    for root in &pairs {
        for left in &pairs {
            for right in &pairs {
                let mut branches = BTreeSet::new();
                for &y in left {
                    branches.insert(Seq::from([root[0], y]));
                }
                for &y in right {
                    branches.insert(Seq::from([root[1], y]));
                }
                out.push(branches);
            }
        }
    }
    out
}

fn check_tree_certificate(
    instance: &CoverInstance,
    expected: usize,
    label: &str,
) -> Result<Vec<FiniteTree>, String> {
    let cert = core(min_cover_trees(instance), label)?;
    ensure(
        cert.size == expected,
        &format!("{label}: size {} instead of {expected}", cert.size),
    )?;
    ensure(
        cert.uncovered_witness.is_some(),
        &format!("{label}: exact certificate carries no refutation witness"),
    )?;
    let family = match cert.family {
        CoverFamily::Trees(ts) => ts,
        CoverFamily::Predictors(_) => return Err(format!("{label}: wrong family mode")),
    };
    ensure(
        family.len() == expected,
        &format!("{label}: family size disagrees with the certificate"),
    )?;
    for f in all_functions(instance.alphabet(), instance.depth()) {
        ensure(
            family.iter().any(|t| t.contains(&f)),
            &format!("{label}: function {f:?} is uncovered"),
        )?;
    }
    for t in &family {
        ensure(
            classify(t, instance.tree_arity()).is_k_tree,
            &format!("{label}: a family member splits too wide"),
        )?;
    }
    Ok(family)
}

fn tree_cover_minimums() -> Result<String, String> {
    let two = check_tree_certificate(
        &core(CoverInstance::trees(3, 1, 2), "depth-one instance")?,
        2,
        "three letters, pair trees",
    )?;
    drop(two);
    // depth one: every single pair of letters misses the third
    let singles: [[u8; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
    for s in &singles {
        let covered: BTreeSet<Seq> = s.iter().map(|&x| Seq::from([x])).collect();
        ensure(
            all_functions(3, 1).iter().any(|f| !covered.contains(f)),
            "a single depth-one pair tree should miss a letter",
        )?;
    }

    check_tree_certificate(
        &core(CoverInstance::trees(3, 2, 2), "depth-two instance")?,
        3,
        "ternary square, pair trees",
    )?;
    // depth two: no two maximal pair trees cover all nine functions
    let candidates = all_pair_tree_branch_sets();
    ensure(candidates.len() == 27, "expected 27 maximal pair trees")?;
    let funcs = all_functions(3, 2);
    for pair in subsets_of_size(candidates.len(), 2) {
        let covered = |f: &Seq| pair.iter().any(|&i| candidates[i].contains(f));
        ensure(
            funcs.iter().any(|f| !covered(f)),
            &format!("pair {pair:?} of maximal trees should not cover"),
        )?;
    }

    check_tree_certificate(
        &core(CoverInstance::trees(3, 2, 3), "wide instance")?,
        1,
        "ternary square, triple trees",
    )?;
    ensure(
        !funcs.is_empty(),
        "the empty family covers an empty universe only",
    )?;
    Ok("minimums 2, 3 and 1 confirmed, with every smaller family refuted".into())
}

fn check_predictor_certificate(
    instance: &CoverInstance,
    expected: usize,
    grace: usize,
    label: &str,
) -> Result<Vec<Predictor>, String> {
    let cert = core(min_cover_predictors(instance), label)?;
    ensure(
        cert.size == expected,
        &format!("{label}: size {} instead of {expected}", cert.size),
    )?;
    let family = match cert.family {
        CoverFamily::Predictors(ps) => ps,
        CoverFamily::Trees(_) => return Err(format!("{label}: wrong family mode")),
    };
    for f in all_functions(instance.alphabet(), instance.depth()) {
        let hit = family.iter().any(|p| {
            predicts(p, &f, grace)
                .map(|v| v.predicted)
                .unwrap_or(false)
        });
        ensure(hit, &format!("{label}: function {f:?} evades the family"))?;
    }
    Ok(family)
}

/// All guess sets over `b` letters with at most `k` members, as bit masks.
fn guess_sets(b: u8, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << b) {
        let set: Vec<u8> = (0..b).filter(|x| mask & (1 << x) != 0).collect();
        if set.len() <= k {
            out.push(set);
        }
    }
    out
}

fn predictor_cover_minimums() -> Result<String, String> {
    check_predictor_certificate(
        &core(CoverInstance::predictors(3, 2, 2, 0), "ternary instance")?,
        2,
        0,
        "ternary square, pair guesses",
    )?;
    // grace zero over two levels only constrains the second letter, so a
    // single predictor is a guess set per length-one history; all of them
    // miss some function
    let sets = guess_sets(3, 2);
    let funcs = all_functions(3, 2);
    let mut tables = 0usize;
    for a in &sets {
        for b in &sets {
            for c in &sets {
                tables += 1;
                let table = [a, b, c];
                let all_hit = funcs
                    .iter()
                    .all(|f| table[f.letter(0) as usize].contains(&f.letter(1)));
                ensure(
                    !all_hit,
                    "a single ternary predictor should miss a function",
                )?;
            }
        }
    }
    ensure(tables == 216, "expected 216 single ternary predictors")?;

    check_predictor_certificate(
        &core(CoverInstance::predictors(2, 2, 1, 0), "binary instance")?,
        2,
        0,
        "binary square, single guesses",
    )?;
    let sets = guess_sets(2, 1);
    let funcs = all_functions(2, 2);
    for a in &sets {
        for b in &sets {
            let table = [a, b];
            let all_hit = funcs
                .iter()
                .all(|f| table[f.letter(0) as usize].contains(&f.letter(1)));
            ensure(!all_hit, "a single binary predictor should miss a function")?;
        }
    }
    Ok("minimums 2 and 2 confirmed, with every single predictor refuted".into())
}

fn cover_monotonicity() -> Result<String, String> {
    let rows = core(monotonicity_report(3, 2, &[2, 3]), "report")?;
    ensure(rows.len() == 2, "expected two rows")?;
    ensure(
        rows[0].k == 2 && rows[0].trees == Some(3) && rows[0].predictors == Some(2),
        &format!("row for arity 2 came out as {:?}", rows[0]),
    )?;
    ensure(
        rows[1].k == 3 && rows[1].trees == Some(1) && rows[1].predictors == Some(1),
        &format!("row for arity 3 came out as {:?}", rows[1]),
    )?;
    ensure(
        rows[0].trees >= rows[1].trees && rows[0].predictors >= rows[1].predictors,
        "both columns must fall as the arity grows",
    )?;
    Ok("trees 3 then 1, predictors 2 then 1, both non-increasing".into())
}

fn digits_name(depth: usize, seed: u64) -> Result<DecidedName, String> {
    let cond = core(
        build_minimal_accelerating(depth).and_then(|rep| Condition::new(Seq::from([0]), rep)),
        "deep condition",
    )?;
    core(
        DecidedName::new(
            cond,
            3,
            depth,
            LabelSource::Rule(LabelRule::PathDigits { seed, modulus: 3 }),
        ),
        "digit name",
    )
}

fn check_prune_invariants(name: &DecidedName, label: &str) -> Result<(), String> {
    let out = core(prune_to_cover(name, 2), label)?;
    let pruned = core(out.pruned.tree().to_explicit(), label)?;
    let report = classify(&pruned, 2);
    ensure(
        report.is_accelerating,
        &format!("{label}: pruned tree is not accelerating"),
    )?;
    ensure(
        classify(&out.cover, 2).is_k_tree,
        &format!("{label}: value cover splits too wide"),
    )?;
    let cover_branches: BTreeSet<Seq> = out.cover.branches().into_iter().collect();
    let target = name.target_length();
    for node in pruned.nodes() {
        ensure(
            name.condition().tree().contains(node),
            &format!("{label}: a pruned node left the original tree"),
        )?;
        if pruned.arity(node) == 0 {
            let value = name.label(node);
            let cut = value.restrict(target.min(value.len()));
            ensure(
                cover_branches.contains(&cut),
                &format!("{label}: a decided value misses the cover"),
            )?;
            let splits = node
                .proper_prefixes()
                .filter(|p| pruned.arity(p) >= 2)
                .count();
            ensure(
                splits == 2,
                &format!("{label}: a branch passes {splits} splits instead of 2"),
            )?;
        }
    }
    let mut arities: Vec<usize> = report.split_arities.iter().map(|(_, a)| *a).collect();
    arities.sort_unstable();
    ensure(
        arities.first() == Some(&2) && arities.contains(&3),
        &format!("{label}: split widths {arities:?} should open with 2 and reach 3"),
    )?;
    Ok(())
}

fn deep_pruning(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(7, seed);
    for trial in 0..100usize {
        let name_seed: u64 = rng.random();
        let name = digits_name(12, name_seed)?;
        check_prune_invariants(&name, &format!("trial {trial}"))?;
    }
    Ok("100 depth-twelve names pruned with every invariant holding".into())
}

fn avoidance_disjointness(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(8, seed);
    for trial in 0..500usize {
        let depth = 4 + trial % 5;
        let cond = core(
            build_minimal_accelerating(depth).and_then(|rep| Condition::new(Seq::from([0]), rep)),
            &format!("trial {trial}: condition"),
        )?;
        let domain = core(
            TreeDomain::accelerating(depth),
            &format!("trial {trial}: domain"),
        )?;
        let mut branches = Vec::new();
        for _ in 0..2 {
            let letters: Vec<u8> = (0..depth)
                .map(|level| rng.random_range(0..(level as u8 + 1)))
                .collect();
            branches.push(Seq::from(letters));
        }
        let avoided = core(
            FiniteTree::downward_closure(domain, branches),
            &format!("trial {trial}: avoided tree"),
        )?;
        ensure(
            classify(&avoided, 2).is_k_tree,
            &format!("trial {trial}: avoided closure is wider than two"),
        )?;
        let refined = core(
            avoid_tree(&cond, &avoided, 2),
            &format!("trial {trial}: avoidance"),
        )?;
        ensure(
            cond.stem().is_prefix_of(refined.stem()),
            &format!("trial {trial}: refined stem left the original stem"),
        )?;
        ensure(
            refined.stem().len() > cond.stem().len(),
            &format!("trial {trial}: refinement did not advance the stem"),
        )?;
        for branch in avoided.branches() {
            ensure(
                !refined.tree().contains(&branch),
                &format!("trial {trial}: refined tree keeps an avoided branch"),
            )?;
        }
    }
    Ok("500 avoided pair trees, every refined condition branch-disjoint from them".into())
}

fn random_predictor(rng: &mut ChaCha8Rng, b: u8, horizon: usize, k: usize) -> Result<Predictor, String> {
    let mut table: BTreeMap<Seq, BTreeSet<u8>> = BTreeMap::new();
    for len in 0..horizon {
        for history in all_functions(b, len) {
            let width = rng.random_range(1..=k.min(b as usize));
            let mut letters: Vec<u8> = (0..b).collect();
            for i in 0..width {
                let j = rng.random_range(i..letters.len());
                letters.swap(i, j);
            }
            table.insert(history, letters[..width].iter().copied().collect());
        }
    }
    core(Predictor::new(b, k, horizon, table), "random predictor")
}

fn predictor_tree_correspondence(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(9, seed);
    for trial in 0..1_000usize {
        let b = 2 + (trial % 2) as u8;
        let horizon = 1 + trial % 3;
        let k = 1 + (trial / 3) % 2;
        let predictor = random_predictor(&mut rng, b, horizon, k)?;
        let trees = core(
            predictor_to_trees(&predictor, 0),
            &format!("trial {trial}: trees"),
        )?;
        let mut union: BTreeSet<Seq> = BTreeSet::new();
        for t in &trees {
            for branch in t.branches() {
                ensure(
                    branch.len() == horizon,
                    &format!("trial {trial}: a tree branch stops short of the horizon"),
                )?;
                union.insert(branch);
            }
        }
        let predicted: BTreeSet<Seq> = all_functions(b, horizon)
            .into_iter()
            .filter(|f| {
                predicts(&predictor, f, 0)
                    .map(|v| v.predicted)
                    .unwrap_or(false)
            })
            .collect();
        ensure(
            union == predicted,
            &format!("trial {trial}: tree branches disagree with the predicted set"),
        )?;
        for t in &trees {
            let back = core(
                tree_to_predictor(t, k),
                &format!("trial {trial}: predictor from tree"),
            )?;
            for branch in t.branches() {
                let verdict = core(
                    predicts(&back, &branch, 0),
                    &format!("trial {trial}: round trip verdict"),
                )?;
                ensure(
                    verdict.predicted,
                    &format!("trial {trial}: round trip misses a branch"),
                )?;
            }
        }
    }
    Ok("1000 predictors match their tree translations in both directions".into())
}

fn spiked_outer(tail: u8) -> Result<FiniteTree, String> {
    let domain = core(TreeDomain::uniform(3, 2), "outer domain")?;
    let branches = (0..3u8).map(|y| Seq::from([y, tail]));
    core(FiniteTree::downward_closure(domain, branches), "outer tree")
}

fn cover_composition() -> Result<String, String> {
    // identity: one full outer tree leaves the inner cover as it is
    let cert = core(
        CoverInstance::trees(3, 2, 2).and_then(|i| min_cover_trees(&i)),
        "inner cover",
    )?;
    let inner = match cert.family {
        CoverFamily::Trees(ts) => ts,
        CoverFamily::Predictors(_) => return Err("inner cover in the wrong mode".into()),
    };
    let full = core(
        TreeDomain::uniform(3, 2).and_then(FiniteTree::full),
        "full outer tree",
    )?;
    let composed = core(
        compose_covers(&[full], &inner, 2),
        "identity composition",
    )?;
    let mut left: Vec<BTreeSet<Seq>> = composed.iter().map(|t| t.nodes().clone()).collect();
    let mut right: Vec<BTreeSet<Seq>> = inner.iter().map(|t| t.nodes().clone()).collect();
    left.sort();
    right.sort();
    ensure(left == right, "identity composition changed the inner cover")?;

    // a split-per-branch outer family against a depth-one inner cover
    let outer: Vec<FiniteTree> = (0..3u8)
        .map(spiked_outer)
        .collect::<Result<_, _>>()?;
    let inner_domain = core(TreeDomain::uniform(3, 1), "inner domain")?;
    let inner: Vec<FiniteTree> = [[0u8, 1], [1, 2]]
        .iter()
        .map(|pair| {
            core(
                FiniteTree::downward_closure(
                    inner_domain.clone(),
                    pair.iter().map(|&x| Seq::from([x])),
                ),
                "inner tree",
            )
        })
        .collect::<Result<_, _>>()?;
    let composed = core(compose_covers(&outer, &inner, 2), "composition")?;
    ensure(
        composed.len() <= outer.len() * inner.len(),
        "composition exceeded the product bound",
    )?;
    for f in all_functions(3, 2) {
        ensure(
            composed.iter().any(|t| t.contains(&f)),
            &format!("function {f:?} left uncovered by the composition"),
        )?;
    }
    for t in &composed {
        ensure(
            classify(t, 2).is_k_tree,
            "a composed tree splits too wide",
        )?;
    }
    Ok(format!(
        "identity preserved; {} composed trees cover the square within the product bound",
        composed.len()
    ))
}

fn digit_rule(seed: u64) -> LabelRule {
    LabelRule::PathDigits { seed, modulus: 2 }
}

fn minimal_coordinate(depth: usize) -> Result<Coordinate, String> {
    core(
        build_minimal_accelerating(depth).and_then(|rep| {
            Coordinate::new(CoordinateKind::Accelerating, Seq::from([0]), rep)
        }),
        "deep coordinate",
    )
}

fn trivial_cover(out_b: u8, target: usize) -> Result<FiniteTree, String> {
    core(
        TreeDomain::uniform(out_b, target).map(FiniteTree::trivial),
        "trivial cover",
    )
}

fn single_state(depth: usize, seed: u64) -> Result<ConsolidationState, String> {
    let mut eta = BTreeMap::new();
    eta.insert(0usize, 0usize);
    let product = core(
        ProductCondition::new(vec![minimal_coordinate(depth)?]),
        "single coordinate product",
    )?;
    let cover = trivial_cover(3, depth)?;
    let name = core(ProductName::new(3, depth, digit_rule(seed)), "product name")?;
    core(
        ConsolidationState::new(product, RefinementOrderSpec::new(eta), 0, cover, name),
        "single coordinate state",
    )
}

fn chain_coordinate(depth: usize) -> Result<Coordinate, String> {
    let domain = core(TreeDomain::accelerating(depth), "chain domain")?;
    let stem = Seq::from(vec![0u8; depth]);
    let tree = core(
        FiniteTree::downward_closure(domain, [stem.clone()]),
        "chain tree",
    )?;
    core(
        Coordinate::new(
            CoordinateKind::Accelerating,
            stem,
            treeloc_core::TreeRep::Explicit(tree),
        ),
        "chain coordinate",
    )
}

fn binary_chain_coordinate(depth: usize) -> Result<Coordinate, String> {
    let domain = core(TreeDomain::uniform(2, depth), "binary domain")?;
    let stem = Seq::from(vec![0u8; depth]);
    let tree = core(
        FiniteTree::downward_closure(domain, [stem.clone()]),
        "binary chain",
    )?;
    core(
        Coordinate::new(
            CoordinateKind::KBranching(2),
            stem,
            treeloc_core::TreeRep::Explicit(tree),
        ),
        "binary chain coordinate",
    )
}

fn full_binary_coordinate(depth: usize) -> Result<Coordinate, String> {
    let tree = core(
        TreeDomain::uniform(2, depth).and_then(FiniteTree::full),
        "full binary tree",
    )?;
    core(
        Coordinate::new(
            CoordinateKind::KBranching(2),
            Seq::empty(),
            treeloc_core::TreeRep::Explicit(tree),
        ),
        "full binary coordinate",
    )
}

fn mixed_state(coords: Vec<Coordinate>, seed: u64) -> Result<ConsolidationState, String> {
    let mut eta = BTreeMap::new();
    eta.insert(0usize, 0usize);
    eta.insert(1usize, 0usize);
    let product = core(ProductCondition::new(coords), "mixed product")?;
    let cover = trivial_cover(3, 8)?;
    let name = core(ProductName::new(3, 8, digit_rule(seed)), "mixed name")?;
    core(
        ConsolidationState::new(product, RefinementOrderSpec::new(eta), 0, cover, name),
        "mixed state",
    )
}

fn tree_json_bytes(tree: &FiniteTree) -> Result<String, String> {
    serde_json::to_string(&TreeJson::of_finite(tree)).map_err(|e| e.to_string())
}

fn consolidation(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(11, seed);
    for trial in 0..50usize {
        let name_seed: u64 = rng.random();
        let state = single_state(12, name_seed)?;
        let first = core(
            consolidate_step(&state, 0),
            &format!("trial {trial}: first step"),
        )?;
        let second = core(
            consolidate_step(&first, 0),
            &format!("trial {trial}: second step"),
        )?;

        let name = core(
            build_minimal_accelerating(12)
                .and_then(|rep| Condition::new(Seq::from([0]), rep))
                .and_then(|cond| {
                    DecidedName::new(cond, 3, 12, LabelSource::Rule(digit_rule(name_seed)))
                }),
            &format!("trial {trial}: direct name"),
        )?;
        let direct = core(
            prune_to_cover(&name, 2),
            &format!("trial {trial}: direct pruning"),
        )?;

        ensure(
            tree_json_bytes(second.cover())? == tree_json_bytes(&direct.cover)?,
            &format!("trial {trial}: covers differ"),
        )?;
        let stepped = core(
            second.condition().coordinates()[0].tree().to_explicit(),
            &format!("trial {trial}: stepped tree"),
        )?;
        let pruned = core(
            direct.pruned.tree().to_explicit(),
            &format!("trial {trial}: pruned tree"),
        )?;
        ensure(
            tree_json_bytes(&stepped)? == tree_json_bytes(&pruned)?,
            &format!("trial {trial}: trees differ"),
        )?;
        ensure(
            second.condition().coordinates()[0].stem() == direct.pruned.stem(),
            &format!("trial {trial}: stems differ"),
        )?;
        ensure(
            second.guard() == 12,
            &format!("trial {trial}: two steps should pin the whole length"),
        )?;
    }

    for trial in 0..20usize {
        let name_seed: u64 = rng.random();
        let (state, beta) = if trial % 2 == 0 {
            (
                mixed_state(
                    vec![minimal_coordinate(8)?, binary_chain_coordinate(8)?],
                    name_seed,
                )?,
                0usize,
            )
        } else {
            (
                mixed_state(
                    vec![chain_coordinate(8)?, full_binary_coordinate(8)?],
                    name_seed,
                )?,
                1usize,
            )
        };
        let next = core(
            consolidate_step(&state, beta),
            &format!("mixed {trial}: step"),
        )?;
        let report = core(
            verify_consolidates(&next, 2),
            &format!("mixed {trial}: verification"),
        )?;
        ensure(
            report.sound(),
            &format!("mixed {trial}: stepped state fails verification"),
        )?;
        let cut: BTreeSet<Seq> = next
            .cover()
            .nodes()
            .iter()
            .filter(|s| s.len() <= state.guard())
            .cloned()
            .collect();
        ensure(
            &cut == state.cover().nodes(),
            &format!("mixed {trial}: new cover does not cut back to the old one"),
        )?;
    }
    Ok("50 single-coordinate double steps equal direct pruning byte for byte; 20 mixed steps verify".into())
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn slalom_growth(seed: u64) -> Result<String, String> {
    let mut rng = rng_for(12, seed);
    let mut table = String::new();
    for trial in 0..10usize {
        let name_seed: u64 = rng.random();
        let name = digits_name(12, name_seed)?;
        let out = core(prune_to_cover(&name, 2), &format!("trial {trial}: pruning"))?;
        let pruned_tree = core(
            out.pruned.tree().to_explicit(),
            &format!("trial {trial}: pruned tree"),
        )?;
        let pruned_name = core(
            Condition::new(
                out.pruned.stem().clone(),
                treeloc_core::TreeRep::Explicit(pruned_tree.clone()),
            )
            .and_then(|cond| {
                DecidedName::new(cond, 3, name.target_length(), name.labels().clone())
            }),
            &format!("trial {trial}: pruned name"),
        )?;
        let slalom = core(
            slalom_of_decided(&pruned_name),
            &format!("trial {trial}: slalom"),
        )?;
        ensure(!slalom.is_empty(), &format!("trial {trial}: empty slalom"))?;
        for branch in pruned_tree.branches() {
            let value = pruned_name.label(&branch);
            for (n, set) in slalom.iter().enumerate() {
                if n < value.len() {
                    ensure(
                        set.contains(&value.letter(n)),
                        &format!("trial {trial}: level {n} drops a decided letter"),
                    )?;
                }
            }
        }
        for (n, set) in slalom.iter().enumerate() {
            let level = core(
                split_level(&pruned_tree, out.pruned.stem(), n + 1),
                &format!("trial {trial}: split level {}", n + 1),
            )?;
            ensure(
                set.len() <= level.len(),
                &format!(
                    "trial {trial}: level {n} holds {} values over {} nodes",
                    set.len(),
                    level.len()
                ),
            )?;
            if trial == 0 {
                table.push_str(&format!(
                    "level {n}: {} values, {} split nodes, factorial reference {}; ",
                    set.len(),
                    level.len(),
                    factorial(n + 1)
                ));
            }
        }
    }
    Ok(format!(
        "10 pruned names pass through their slaloms; {}",
        table.trim_end_matches("; ")
    ))
}
