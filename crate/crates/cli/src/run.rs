//! Command execution. Every command reads its inputs, runs the core
//! routine, and renders one deterministic output with the seed recorded.

use crate::dot;
use crate::json::{
    CertificateJson, ClassReportJson, ConditionJson, FamilyJson, NameJson, PredictorJson,
    StateJson, TreeJson, TreeListJson,
};
use crate::suite;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use treeloc_core::{
    avoid_tree, classify, compose_covers, consolidate_step, extract_2tree, extract_grouped,
    find_evader, greedy_cover_predictors, greedy_cover_trees, min_cover_predictors,
    min_cover_trees, predicts, prune_to_cover, slalom_of_decided, CoverInstance, Error,
    FiniteTree, Seq, TreeClass, TreeDomain, TreeRep, TreeView,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    pub max_depth: usize,
    pub max_coords: usize,
    pub max_search_nodes: usize,
}

impl Budgets {
    pub fn from_env() -> Budgets {
        fn env_value(name: &str) -> Option<usize> {
            std::env::var(name).ok().and_then(|v| v.parse().ok())
        }
        Budgets {
            max_depth: env_value("TREELOC_MAX_DEPTH").unwrap_or(64),
            max_coords: env_value("TREELOC_MAX_COORDS").unwrap_or(8),
            max_search_nodes: env_value("TREELOC_MAX_SEARCH_NODES").unwrap_or(5_000_000),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Command {
    Validate {
        tree: PathBuf,
        class: String,
        k: usize,
    },
    Extract {
        family: PathBuf,
        n: u32,
        k: Option<u32>,
        m: Option<usize>,
    },
    Predict {
        predictor: PathBuf,
        f: Vec<u8>,
        m: usize,
    },
    Evade {
        predictors: Vec<PathBuf>,
        m: usize,
    },
    Avoid {
        condition: PathBuf,
        avoid: PathBuf,
        k: usize,
    },
    Prune {
        name: PathBuf,
        target_splits: usize,
    },
    Consolidate {
        state: PathBuf,
        beta: usize,
    },
    Slalom {
        name: PathBuf,
    },
    Cover {
        b: u8,
        depth: usize,
        k: usize,
        mode: String,
        grace: usize,
        exact: bool,
    },
    Compose {
        outer: PathBuf,
        inner: PathBuf,
        k: Option<usize>,
    },
    VerifySuite {
        criteria: Option<Vec<usize>>,
    },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub budgets: Budgets,
    pub seed: u64,
    pub format: Format,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String),
    Parse(String),
    Usage(String),
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::BudgetExceeded { .. }) => 3,
            CliError::Core(Error::HypothesisFailed(_)) => 1,
            CliError::Core(Error::SelectionFailed { .. }) => 1,
            CliError::Core(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) | CliError::Parse(_) | CliError::Usage(_) => 2,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => format!("{e}"),
            CliError::Io(m) => format!("io: {m}"),
            CliError::Parse(m) => format!("parse: {m}"),
            CliError::Usage(m) => m.clone(),
            CliError::Budget(m) => format!("budget: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        CliError::Core(e)
    }
}

pub struct Outcome {
    pub body: String,
    pub failed: bool,
}

struct Payload {
    value: Value,
    dot_trees: Vec<(String, FiniteTree)>,
    table: Option<String>,
    failed: bool,
}

impl Payload {
    fn plain(value: Value) -> Payload {
        Payload {
            value,
            dot_trees: Vec::new(),
            table: None,
            failed: false,
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn check_depth(budgets: &Budgets, domain: &TreeDomain) -> Result<(), CliError> {
    if domain.depth() > budgets.max_depth {
        return Err(CliError::Budget(format!(
            "depth {} exceeds the limit {}",
            domain.depth(),
            budgets.max_depth
        )));
    }
    Ok(())
}

fn check_search(budgets: &Budgets, b: u8, depth: usize) -> Result<(), CliError> {
    let space = (b as u64).checked_pow(depth as u32);
    match space {
        Some(n) if n <= budgets.max_search_nodes as u64 => Ok(()),
        _ => Err(CliError::Budget(format!(
            "{b}^{depth} candidates exceed the search limit {}",
            budgets.max_search_nodes
        ))),
    }
}

/// Materializes a tree for drawing or walking, refusing when its node count
/// is beyond the search limit.
fn explicit_within(budgets: &Budgets, rep: &TreeRep) -> Result<FiniteTree, CliError> {
    match rep.node_count() {
        Some(n) if n <= budgets.max_search_nodes as u64 => Ok(rep.to_explicit()?),
        _ => Err(CliError::Budget(format!(
            "tree is too large to materialize within {} nodes",
            budgets.max_search_nodes
        ))),
    }
}

fn parse_class(name: &str) -> Result<TreeClass, CliError> {
    match name {
        "k-tree" => Ok(TreeClass::KTree),
        "k-branching" => Ok(TreeClass::KBranching),
        "accelerating" => Ok(TreeClass::Accelerating),
        "leveled" => Ok(TreeClass::Leveled),
        _ => Err(CliError::Usage(format!(
            "unknown class {name:?}; use k-tree, k-branching, accelerating or leveled"
        ))),
    }
}

pub fn execute(config: &RunConfig) -> Result<Outcome, CliError> {
    if config.budgets.max_depth == 0
        || config.budgets.max_coords == 0
        || config.budgets.max_search_nodes == 0
    {
        return Err(CliError::Usage("budgets must be positive".into()));
    }
    let payload = match &config.command {
        Command::Validate { tree, class, k } => run_validate(config, tree, class, *k)?,
        Command::Extract { family, n, k, m } => run_extract(config, family, *n, *k, *m)?,
        Command::Predict { predictor, f, m } => run_predict(config, predictor, f, *m)?,
        Command::Evade { predictors, m } => run_evade(config, predictors, *m)?,
        Command::Avoid { condition, avoid, k } => run_avoid(config, condition, avoid, *k)?,
        Command::Prune { name, target_splits } => run_prune(config, name, *target_splits)?,
        Command::Consolidate { state, beta } => run_consolidate(config, state, *beta)?,
        Command::Slalom { name } => run_slalom(config, name)?,
        Command::Cover {
            b,
            depth,
            k,
            mode,
            grace,
            exact,
        } => run_cover(config, *b, *depth, *k, mode, *grace, *exact)?,
        Command::Compose { outer, inner, k } => run_compose(config, outer, inner, *k)?,
        Command::VerifySuite { criteria } => run_suite(config, criteria.as_deref())?,
    };
    render(config, payload)
}

fn render(config: &RunConfig, payload: Payload) -> Result<Outcome, CliError> {
    let mut value = payload.value;
    if let Value::Object(ref mut map) = value {
        map.insert("seed".into(), json!(config.seed));
    }
    let body = match config.format {
        Format::Json => {
            let mut text = serde_json::to_string(&value)
                .map_err(|e| CliError::Parse(e.to_string()))?;
            text.push('\n');
            text
        }
        Format::Dot => {
            if payload.dot_trees.is_empty() {
                return Err(CliError::Usage(
                    "this command has no tree-valued output to draw".into(),
                ));
            }
            let named: Vec<(String, &FiniteTree)> = payload
                .dot_trees
                .iter()
                .map(|(name, tree)| (name.clone(), tree))
                .collect();
            format!("// seed {}\n{}", config.seed, dot::trees_to_dot(&named))
        }
        Format::Table => match payload.table {
            Some(text) => text,
            None => render_table(&value),
        },
    };
    Ok(Outcome {
        body,
        failed: payload.failed,
    })
}

fn render_table(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                let cell = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{key}\t{cell}\n"));
            }
        }
        other => {
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
    out
}

fn run_validate(
    config: &RunConfig,
    tree: &Path,
    class: &str,
    k: usize,
) -> Result<Payload, CliError> {
    let class = parse_class(class)?;
    let tree_json: TreeJson = read_json(tree)?;
    let rep = tree_json.to_rep()?;
    check_depth(&config.budgets, rep.domain())?;
    if let TreeRep::Graded(_) = &rep {
        match rep.node_count() {
            Some(n) if n <= config.budgets.max_search_nodes as u64 => {}
            _ => {
                return Err(CliError::Budget(format!(
                    "tree is too large to walk within {} nodes",
                    config.budgets.max_search_nodes
                )))
            }
        }
    }
    let report = classify(&rep, k);
    let satisfied = report.satisfies(class);
    let class_name = match class {
        TreeClass::KTree => "k-tree",
        TreeClass::KBranching => "k-branching",
        TreeClass::Accelerating => "accelerating",
        TreeClass::Leveled => "leveled",
    };
    let report_json = ClassReportJson {
        class: class_name.to_string(),
        satisfied,
        k: report.k,
        is_k_tree: report.is_k_tree,
        is_k_branching: report.is_k_branching,
        is_accelerating: report.is_accelerating,
        is_leveled: report.is_leveled,
        perfect_within_depth: report.perfect_within_depth,
        split_arities: crate::json::split_arities_json(&report.split_arities),
    };
    let value = serde_json::to_value(&report_json).map_err(|e| CliError::Parse(e.to_string()))?;
    let dot_trees = match &rep {
        TreeRep::Explicit(t) => vec![("tree".to_string(), t.clone())],
        TreeRep::Graded(_) => Vec::new(),
    };
    Ok(Payload {
        value,
        dot_trees,
        table: None,
        failed: !satisfied,
    })
}

fn run_extract(
    config: &RunConfig,
    family: &Path,
    n: u32,
    k: Option<u32>,
    m: Option<usize>,
) -> Result<Payload, CliError> {
    let family_json: FamilyJson = read_json(family)?;
    let family = family_json.to_core()?;
    if family.length() > config.budgets.max_depth {
        return Err(CliError::Budget(format!(
            "function length {} exceeds the limit {}",
            family.length(),
            config.budgets.max_depth
        )));
    }
    let result = match (family.groups().is_some(), k, m) {
        (true, Some(k), Some(m)) => extract_grouped(&family, n, k, m)?,
        (true, _, _) => {
            return Err(CliError::Usage(
                "a grouped family needs both --k and --m".into(),
            ))
        }
        (false, None, None) => extract_2tree(&family, n)?,
        (false, _, _) => {
            return Err(CliError::Usage(
                "--k and --m apply only to grouped families".into(),
            ))
        }
    };
    let value = json!({
        "selected": result.selected,
        "witness": TreeJson::of_finite(&result.witness_tree),
    });
    Ok(Payload {
        value,
        dot_trees: vec![("witness".to_string(), result.witness_tree)],
        table: None,
        failed: false,
    })
}

fn run_predict(
    config: &RunConfig,
    predictor: &Path,
    f: &[u8],
    m: usize,
) -> Result<Payload, CliError> {
    let predictor_json: PredictorJson = read_json(predictor)?;
    let predictor = predictor_json.to_core()?;
    if predictor.horizon() > config.budgets.max_depth {
        return Err(CliError::Budget(format!(
            "horizon {} exceeds the limit {}",
            predictor.horizon(),
            config.budgets.max_depth
        )));
    }
    let verdict = predicts(&predictor, &Seq::from(f.to_vec()), m)?;
    Ok(Payload::plain(json!({
        "predicted": verdict.predicted,
        "grace": verdict.grace,
        "firstEscape": verdict.first_escape,
    })))
}

fn run_evade(config: &RunConfig, predictors: &[PathBuf], m: usize) -> Result<Payload, CliError> {
    if predictors.is_empty() {
        return Err(CliError::Usage("evading needs at least one --predictor".into()));
    }
    let mut parsed = Vec::new();
    for path in predictors {
        let predictor_json: PredictorJson = read_json(path)?;
        parsed.push(predictor_json.to_core()?);
    }
    let b = parsed[0].alphabet();
    let horizon = parsed[0].horizon();
    if horizon > config.budgets.max_depth {
        return Err(CliError::Budget(format!(
            "horizon {horizon} exceeds the limit {}",
            config.budgets.max_depth
        )));
    }
    check_search(&config.budgets, b, horizon)?;
    let evader = find_evader(b, horizon, &parsed, m)?;
    Ok(Payload::plain(json!({
        "evader": evader.as_ref().map(|s| s.letters().to_vec()),
        "b": b,
        "horizon": horizon,
        "m": m,
    })))
}

fn run_avoid(
    config: &RunConfig,
    condition: &Path,
    avoid: &Path,
    k: usize,
) -> Result<Payload, CliError> {
    let condition_json: ConditionJson = read_json(condition)?;
    let condition = condition_json.to_core()?;
    check_depth(&config.budgets, condition.tree().domain())?;
    let avoid_json: TreeJson = read_json(avoid)?;
    let avoided = avoid_json.to_finite()?;
    let refined = avoid_tree(&condition, &avoided, k)?;
    let value = serde_json::to_value(ConditionJson::of(&refined))
        .map_err(|e| CliError::Parse(e.to_string()))?;
    let dot_trees = match refined.tree() {
        TreeRep::Explicit(t) => vec![("refined".to_string(), t.clone())],
        TreeRep::Graded(_) => Vec::new(),
    };
    Ok(Payload {
        value,
        dot_trees,
        table: None,
        failed: false,
    })
}

fn run_prune(config: &RunConfig, name: &Path, target_splits: usize) -> Result<Payload, CliError> {
    let name_json: NameJson = read_json(name)?;
    let name = name_json.to_core()?;
    check_depth(&config.budgets, name.condition().tree().domain())?;
    let result = prune_to_cover(&name, target_splits)?;
    let value = json!({
        "pruned": ConditionJson::of(&result.pruned),
        "cover": TreeJson::of_finite(&result.cover),
    });
    let mut dot_trees = Vec::new();
    if let TreeRep::Explicit(t) = result.pruned.tree() {
        dot_trees.push(("pruned".to_string(), t.clone()));
    }
    dot_trees.push(("cover".to_string(), result.cover.clone()));
    Ok(Payload {
        value,
        dot_trees,
        table: None,
        failed: false,
    })
}

fn run_consolidate(config: &RunConfig, state: &Path, beta: usize) -> Result<Payload, CliError> {
    let state_json: StateJson = read_json(state)?;
    if state_json.coordinates.len() > config.budgets.max_coords {
        return Err(CliError::Budget(format!(
            "{} coordinates exceed the limit {}",
            state_json.coordinates.len(),
            config.budgets.max_coords
        )));
    }
    let state = state_json.to_core()?;
    for coordinate in state.condition().coordinates() {
        check_depth(&config.budgets, coordinate.tree().domain())?;
    }
    let next = consolidate_step(&state, beta)?;
    let next_json = StateJson::of(&next);
    let value = serde_json::to_value(&next_json).map_err(|e| CliError::Parse(e.to_string()))?;
    let mut dot_trees = Vec::new();
    for (alpha, coordinate) in next.condition().coordinates().iter().enumerate() {
        let tree = explicit_within(&config.budgets, coordinate.tree())?;
        dot_trees.push((format!("coordinate_{alpha}"), tree));
    }
    dot_trees.push(("values".to_string(), next.cover().clone()));
    Ok(Payload {
        value,
        dot_trees,
        table: None,
        failed: false,
    })
}

fn run_slalom(config: &RunConfig, name: &Path) -> Result<Payload, CliError> {
    let name_json: NameJson = read_json(name)?;
    let name = name_json.to_core()?;
    check_depth(&config.budgets, name.condition().tree().domain())?;
    let levels = slalom_of_decided(&name)?;
    let sizes: Vec<usize> = levels.iter().map(|s| s.len()).collect();
    let levels: Vec<Vec<u8>> = levels
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    Ok(Payload::plain(json!({
        "levels": levels,
        "sizes": sizes,
    })))
}

fn run_cover(
    config: &RunConfig,
    b: u8,
    depth: usize,
    k: usize,
    mode: &str,
    grace: usize,
    exact: bool,
) -> Result<Payload, CliError> {
    if depth > config.budgets.max_depth {
        return Err(CliError::Budget(format!(
            "depth {depth} exceeds the limit {}",
            config.budgets.max_depth
        )));
    }
    check_search(&config.budgets, b, depth)?;
    let (instance, mode_name) = match mode {
        "trees" => (CoverInstance::trees(b, depth, k)?, "trees"),
        "predictors" => (CoverInstance::predictors(b, depth, k, grace)?, "predictors"),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown mode {mode:?}; use trees or predictors"
            )))
        }
    };
    let certificate = match (mode_name, exact) {
        ("trees", true) => min_cover_trees(&instance)?,
        ("trees", false) => greedy_cover_trees(&instance)?,
        ("predictors", true) => min_cover_predictors(&instance)?,
        ("predictors", false) => greedy_cover_predictors(&instance)?,
        _ => unreachable!(),
    };
    let cert_json = CertificateJson::of(&certificate, exact);
    let mut value = serde_json::to_value(&cert_json).map_err(|e| CliError::Parse(e.to_string()))?;
    if let Value::Object(ref mut map) = value {
        let mut instance_value = json!({
            "b": b,
            "depth": depth,
            "k": k,
            "mode": mode_name,
        });
        if mode_name == "predictors" {
            if let Value::Object(ref mut inner) = instance_value {
                inner.insert("grace".into(), json!(grace));
            }
        }
        map.insert("instance".into(), instance_value);
    }
    let dot_trees = match &certificate.family {
        treeloc_core::CoverFamily::Trees(trees) => trees
            .iter()
            .enumerate()
            .map(|(i, t)| (format!("member_{i}"), t.clone()))
            .collect(),
        treeloc_core::CoverFamily::Predictors(_) => Vec::new(),
    };
    Ok(Payload {
        value,
        dot_trees,
        table: None,
        failed: false,
    })
}

/// Reads a tree family from either a bare tree list or a cover certificate
/// in tree mode.
fn read_tree_family(path: &Path) -> Result<Vec<FiniteTree>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let trees_value = if value.get("trees").is_some() {
        value
    } else if let Some(family) = value.get("family") {
        if family.get("trees").is_some() {
            family.clone()
        } else {
            return Err(CliError::Parse(format!(
                "{}: certificate family is not in tree mode",
                path.display()
            )));
        }
    } else {
        return Err(CliError::Parse(format!(
            "{}: expected a tree list or a tree-mode certificate",
            path.display()
        )));
    };
    let list: TreeListJson = serde_json::from_value(trees_value)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(list.to_core()?)
}

fn run_compose(
    config: &RunConfig,
    outer: &Path,
    inner: &Path,
    k: Option<usize>,
) -> Result<Payload, CliError> {
    let outer = read_tree_family(outer)?;
    let inner = read_tree_family(inner)?;
    for tree in outer.iter().chain(inner.iter()) {
        check_depth(&config.budgets, tree.domain())?;
    }
    let k = match k {
        Some(k) => k,
        None => {
            let base = inner
                .first()
                .and_then(|t| t.domain().base())
                .ok_or_else(|| {
                    CliError::Usage("pass --k or a non-empty uniform inner family".into())
                })?;
            (base as usize).saturating_sub(1)
        }
    };
    let composed = compose_covers(&outer, &inner, k)?;
    let list = TreeListJson::of(&composed);
    let value = serde_json::to_value(&list).map_err(|e| CliError::Parse(e.to_string()))?;
    let dot_trees = composed
        .into_iter()
        .enumerate()
        .map(|(i, t)| (format!("composed_{i}"), t))
        .collect();
    Ok(Payload {
        value,
        dot_trees,
        table: None,
        failed: false,
    })
}

fn run_suite(config: &RunConfig, criteria: Option<&[usize]>) -> Result<Payload, CliError> {
    let outcomes = match criteria {
        Some(ids) => {
            let mut outcomes = Vec::new();
            for &id in ids {
                if !(1..=12).contains(&id) {
                    return Err(CliError::Usage(format!("criterion {id} does not exist")));
                }
                outcomes.push(suite::run_criterion(id, config.seed));
            }
            outcomes
        }
        None => suite::all_criteria(config.seed),
    };
    let all_passed = outcomes.iter().all(|o| o.passed);
    let mut table = String::new();
    for o in &outcomes {
        table.push_str(&format!(
            "criterion {:>2}  {}  {:<34} {:>7} ms\n",
            o.id,
            if o.passed { "pass" } else { "FAIL" },
            o.title,
            o.millis
        ));
    }
    table.push_str(&format!(
        "{}  seed {}\n",
        if all_passed { "all criteria passed" } else { "some criteria FAILED" },
        config.seed
    ));
    let rows: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "id": o.id,
                "title": o.title,
                "passed": o.passed,
                "millis": o.millis,
                "detail": o.detail,
            })
        })
        .collect();
    Ok(Payload {
        value: json!({
            "criteria": rows,
            "allPassed": all_passed,
        }),
        dot_trees: Vec::new(),
        table: Some(table),
        failed: !all_passed,
    })
}
