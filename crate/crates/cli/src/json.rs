//! File formats. Letters are plain numbers, sequences are arrays of letters,
//! and every structure carries enough to rebuild the typed value exactly.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use treeloc_core::{
    Condition, ConsolidationState, Coordinate, CoordinateKind, CoverCertificate, CoverFamily,
    DecidedName, Error, FiniteTree, FunctionFamily, GradedTree, LabelRule, LabelSource,
    Predictor, ProductCondition, ProductName, RefinementOrderSpec, Result, Seq, TreeDomain,
    TreeRep, TreeView,
};

fn seq(letters: &[u8]) -> Seq {
    Seq::from(letters.to_vec())
}

fn letters(s: &Seq) -> Vec<u8> {
    s.letters().to_vec()
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainJson {
    Uniform { b: u8, depth: usize },
    Accelerating { depth: usize },
}

impl DomainJson {
    pub fn to_core(&self) -> Result<TreeDomain> {
        match *self {
            DomainJson::Uniform { b, depth } => TreeDomain::uniform(b, depth),
            DomainJson::Accelerating { depth } => TreeDomain::accelerating(depth),
        }
    }

    pub fn of(domain: &TreeDomain) -> DomainJson {
        match domain.base() {
            Some(b) => DomainJson::Uniform {
                b,
                depth: domain.depth(),
            },
            None => DomainJson::Accelerating {
                depth: domain.depth(),
            },
        }
    }
}

/// A tree is either written out node by node, or as a spine plus the frontier
/// nodes below which every graded extension is taken.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TreeJson {
    pub domain: DomainJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spine: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frontier: Option<Vec<Vec<u8>>>,
}

impl TreeJson {
    pub fn to_finite(&self) -> Result<FiniteTree> {
        let domain = self.domain.to_core()?;
        match (&self.nodes, &self.spine) {
            (Some(nodes), None) => {
                let set: BTreeSet<Seq> = nodes.iter().map(|n| seq(n)).collect();
                FiniteTree::new(domain, set)
            }
            _ => Err(Error::InvalidInput("tree needs an explicit node list")),
        }
    }

    pub fn to_rep(&self) -> Result<TreeRep> {
        if self.nodes.is_some() {
            return Ok(TreeRep::Explicit(self.to_finite()?));
        }
        match (&self.spine, &self.frontier) {
            (Some(spine), Some(frontier)) => {
                let domain = self.domain.to_core()?;
                let spine: BTreeSet<Seq> = spine.iter().map(|n| seq(n)).collect();
                let frontier: BTreeSet<Seq> = frontier.iter().map(|n| seq(n)).collect();
                Ok(TreeRep::Graded(GradedTree::new(domain, spine, frontier)?))
            }
            _ => Err(Error::InvalidInput(
                "tree needs either nodes or spine and frontier",
            )),
        }
    }

    pub fn of_finite(tree: &FiniteTree) -> TreeJson {
        TreeJson {
            domain: DomainJson::of(tree.domain()),
            nodes: Some(tree.nodes().iter().map(letters).collect()),
            spine: None,
            frontier: None,
        }
    }

    pub fn of_rep(rep: &TreeRep) -> TreeJson {
        match rep {
            TreeRep::Explicit(t) => TreeJson::of_finite(t),
            TreeRep::Graded(g) => TreeJson {
                domain: DomainJson::of(g.domain()),
                nodes: None,
                spine: Some(g.spine().iter().map(letters).collect()),
                frontier: Some(g.frontier().iter().map(letters).collect()),
            },
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ConditionJson {
    #[serde(flatten)]
    pub tree: TreeJson,
    pub stem: Vec<u8>,
}

impl ConditionJson {
    pub fn to_core(&self) -> Result<Condition> {
        Condition::new(seq(&self.stem), self.tree.to_rep()?)
    }

    pub fn of(cond: &Condition) -> ConditionJson {
        ConditionJson {
            tree: TreeJson::of_rep(cond.tree()),
            stem: letters(cond.stem()),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum RuleJson {
    Constant { value: Vec<u8> },
    PathDigits { seed: u64, modulus: u8 },
}

impl RuleJson {
    pub fn to_core(&self) -> LabelRule {
        match self {
            RuleJson::Constant { value } => LabelRule::Constant(seq(value)),
            RuleJson::PathDigits { seed, modulus } => LabelRule::PathDigits {
                seed: *seed,
                modulus: *modulus,
            },
        }
    }

    pub fn of(rule: &LabelRule) -> RuleJson {
        match rule {
            LabelRule::Constant(value) => RuleJson::Constant {
                value: letters(value),
            },
            LabelRule::PathDigits { seed, modulus } => RuleJson::PathDigits {
                seed: *seed,
                modulus: *modulus,
            },
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct LabelEntry {
    pub node: Vec<u8>,
    pub value: Vec<u8>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RuleWrapper {
    pub rule: RuleJson,
}

/// Labels come either as a total node-to-value table or as a closed rule.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(untagged)]
pub enum LabelsJson {
    Map(Vec<LabelEntry>),
    Rule(RuleWrapper),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct NameJson {
    pub condition: ConditionJson,
    #[serde(rename = "outputAlphabet")]
    pub output_alphabet: u8,
    #[serde(rename = "targetLength")]
    pub target_length: usize,
    pub labels: LabelsJson,
}

impl NameJson {
    pub fn to_core(&self) -> Result<DecidedName> {
        let cond = self.condition.to_core()?;
        let labels = match &self.labels {
            LabelsJson::Map(entries) => {
                let map: BTreeMap<Seq, Seq> = entries
                    .iter()
                    .map(|e| (seq(&e.node), seq(&e.value)))
                    .collect();
                LabelSource::Map(map)
            }
            LabelsJson::Rule(w) => LabelSource::Rule(w.rule.to_core()),
        };
        DecidedName::new(cond, self.output_alphabet, self.target_length, labels)
    }

    pub fn of(name: &DecidedName) -> NameJson {
        let labels = match name.labels() {
            LabelSource::Map(map) => LabelsJson::Map(
                map.iter()
                    .map(|(node, value)| LabelEntry {
                        node: letters(node),
                        value: letters(value),
                    })
                    .collect(),
            ),
            LabelSource::Rule(rule) => LabelsJson::Rule(RuleWrapper {
                rule: RuleJson::of(rule),
            }),
        };
        NameJson {
            condition: ConditionJson::of(name.condition()),
            output_alphabet: name.output_alphabet(),
            target_length: name.target_length(),
            labels,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct FamilyJson {
    pub b: u8,
    pub length: usize,
    pub functions: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<usize>>,
}

impl FamilyJson {
    pub fn to_core(&self) -> Result<FunctionFamily> {
        let functions: Vec<Seq> = self.functions.iter().map(|f| seq(f)).collect();
        match &self.groups {
            Some(groups) => {
                FunctionFamily::with_groups(self.b, self.length, functions, groups.clone())
            }
            None => FunctionFamily::new(self.b, self.length, functions),
        }
    }

    pub fn of(family: &FunctionFamily) -> FamilyJson {
        FamilyJson {
            b: family.alphabet(),
            length: family.length(),
            functions: family.functions().iter().map(letters).collect(),
            groups: family.groups().map(|g| g.to_vec()),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TableEntryJson {
    pub s: Vec<u8>,
    pub set: Vec<u8>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PredictorJson {
    pub b: u8,
    pub k: usize,
    pub horizon: usize,
    pub table: Vec<TableEntryJson>,
}

impl PredictorJson {
    pub fn to_core(&self) -> Result<Predictor> {
        let mut table: BTreeMap<Seq, BTreeSet<u8>> = BTreeMap::new();
        for entry in &self.table {
            table.insert(seq(&entry.s), entry.set.iter().copied().collect());
        }
        Predictor::new(self.b, self.k, self.horizon, table)
    }

    pub fn of(p: &Predictor) -> PredictorJson {
        PredictorJson {
            b: p.alphabet(),
            k: p.k(),
            horizon: p.horizon(),
            table: p
                .table()
                .iter()
                .map(|(s, set)| TableEntryJson {
                    s: letters(s),
                    set: set.iter().copied().collect(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TreeListJson {
    pub trees: Vec<TreeJson>,
}

impl TreeListJson {
    pub fn to_core(&self) -> Result<Vec<FiniteTree>> {
        self.trees.iter().map(|t| t.to_finite()).collect()
    }

    pub fn of(trees: &[FiniteTree]) -> TreeListJson {
        TreeListJson {
            trees: trees.iter().map(TreeJson::of_finite).collect(),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CertFamilyJson {
    Trees(Vec<TreeJson>),
    Predictors(Vec<PredictorJson>),
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CertificateJson {
    pub size: usize,
    pub family: CertFamilyJson,
    #[serde(rename = "uncoveredWitness")]
    pub uncovered_witness: Option<Vec<u8>>,
    pub exact: bool,
}

impl CertificateJson {
    pub fn of(cert: &CoverCertificate, exact: bool) -> CertificateJson {
        let family = match &cert.family {
            CoverFamily::Trees(trees) => {
                CertFamilyJson::Trees(trees.iter().map(TreeJson::of_finite).collect())
            }
            CoverFamily::Predictors(ps) => {
                CertFamilyJson::Predictors(ps.iter().map(PredictorJson::of).collect())
            }
        };
        CertificateJson {
            size: cert.size,
            family,
            uncovered_witness: cert.uncovered_witness.as_ref().map(letters),
            exact,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CoordinateJson {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub stem: Vec<u8>,
    pub tree: TreeJson,
}

impl CoordinateJson {
    pub fn to_core(&self) -> Result<Coordinate> {
        let kind = match (self.kind.as_str(), self.k) {
            ("accelerating", None) => CoordinateKind::Accelerating,
            ("branching", Some(k)) => CoordinateKind::KBranching(k),
            _ => {
                return Err(Error::InvalidInput(
                    "coordinate kind must be accelerating or branching with k",
                ))
            }
        };
        Coordinate::new(kind, seq(&self.stem), self.tree.to_rep()?)
    }

    pub fn of(coord: &Coordinate) -> CoordinateJson {
        let (kind, k) = match coord.kind() {
            CoordinateKind::Accelerating => ("accelerating".to_string(), None),
            CoordinateKind::KBranching(k) => ("branching".to_string(), Some(*k)),
        };
        CoordinateJson {
            kind,
            k,
            stem: letters(coord.stem()),
            tree: TreeJson::of_rep(coord.tree()),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ProductNameJson {
    #[serde(rename = "outputAlphabet")]
    pub output_alphabet: u8,
    #[serde(rename = "targetLength")]
    pub target_length: usize,
    pub rule: RuleJson,
}

impl ProductNameJson {
    pub fn to_core(&self) -> Result<ProductName> {
        ProductName::new(self.output_alphabet, self.target_length, self.rule.to_core())
    }

    pub fn of(name: &ProductName) -> ProductNameJson {
        ProductNameJson {
            output_alphabet: name.output_alphabet(),
            target_length: name.target_length(),
            rule: RuleJson::of(name.rule()),
        }
    }
}

/// A product condition with its refinement bookkeeping: the active
/// coordinates `f` aligned with their split levels `eta`, the pinned length
/// `m`, the value tree `a`, and the rule naming decided values.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct StateJson {
    pub coordinates: Vec<CoordinateJson>,
    pub f: Vec<usize>,
    pub eta: Vec<usize>,
    pub m: usize,
    pub a: TreeJson,
    pub name: ProductNameJson,
}

impl StateJson {
    pub fn to_core(&self) -> Result<ConsolidationState> {
        if self.f.len() != self.eta.len() {
            return Err(Error::InvalidInput(
                "active coordinates and levels must align",
            ));
        }
        let coordinates: Result<Vec<Coordinate>> =
            self.coordinates.iter().map(|c| c.to_core()).collect();
        let eta: BTreeMap<usize, usize> =
            self.f.iter().copied().zip(self.eta.iter().copied()).collect();
        ConsolidationState::new(
            ProductCondition::new(coordinates?)?,
            RefinementOrderSpec::new(eta),
            self.m,
            self.a.to_finite()?,
            self.name.to_core()?,
        )
    }

    pub fn of(state: &ConsolidationState) -> StateJson {
        let mut f = Vec::new();
        let mut eta = Vec::new();
        for (&alpha, &level) in state.order().levels() {
            f.push(alpha);
            eta.push(level);
        }
        StateJson {
            coordinates: state
                .condition()
                .coordinates()
                .iter()
                .map(CoordinateJson::of)
                .collect(),
            f,
            eta,
            m: state.guard(),
            a: TreeJson::of_finite(state.cover()),
            name: ProductNameJson::of(state.name()),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SplitArityJson {
    pub node: Vec<u8>,
    pub arity: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ClassReportJson {
    pub class: String,
    pub satisfied: bool,
    pub k: usize,
    #[serde(rename = "isKTree")]
    pub is_k_tree: bool,
    #[serde(rename = "isKBranching")]
    pub is_k_branching: bool,
    #[serde(rename = "isAccelerating")]
    pub is_accelerating: bool,
    #[serde(rename = "isLeveled")]
    pub is_leveled: bool,
    #[serde(rename = "perfectWithinDepth")]
    pub perfect_within_depth: bool,
    #[serde(rename = "splitArities")]
    pub split_arities: Vec<SplitArityJson>,
}

pub fn split_arities_json(arities: &[(Seq, usize)]) -> Vec<SplitArityJson> {
    arities
        .iter()
        .map(|(node, arity)| SplitArityJson {
            node: letters(node),
            arity: *arity,
        })
        .collect()
}
