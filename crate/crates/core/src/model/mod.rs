//! Finite Kripke models with order-coherent modal relations.

mod examples;
mod io;
mod ops;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relation::Relation;
use crate::semantics::EvalError;
use crate::stateset::StateSet;

pub use examples::build_example;
pub use io::ModelFile;
pub use validate::{Axiom, ValidationReport, Violation};

/// Which family of frame conditions and truth clauses a model follows.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `L_{n,m}`-models: boxes over `R_i`, diamonds over `S_j`.
    #[default]
    Standard,
    /// Fischer Servi / Plotkin-Stirling: one relation for both `□` and `◇`.
    Fs,
    /// Goré-Postniece-Tiu tense models.
    Gpt,
    /// Tense models with `(≤∘R) = (R∘≤)` and `(≥∘S) = (S∘≥)`.
    Tense,
    /// One relation `R`; `◇`/`⊟` use the left converse `≥∘R∘≥`.
    H,
    /// Intuitionistic epistemic models: knowledge relations plus common knowledge.
    Ek,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Standard => "standard",
            Flavor::Fs => "fs",
            Flavor::Gpt => "gpt",
            Flavor::Tense => "tense",
            Flavor::H => "h",
            Flavor::Ek => "ek",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Flavor::Standard),
            "fs" => Ok(Flavor::Fs),
            "gpt" => Ok(Flavor::Gpt),
            "tense" => Ok(Flavor::Tense),
            "h" => Ok(Flavor::H),
            "ek" => Ok(Flavor::Ek),
            other => Err(format!(
                "unknown flavor `{other}` (expected standard, fs, gpt, tense, h or ek)"
            )),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("{flavor} models need {expected}; got {boxes} box and {diamonds} diamond relations")]
    Arity {
        flavor: Flavor,
        expected: &'static str,
        boxes: usize,
        diamonds: usize,
    },
    #[error("{op} is not defined for {flavor} models")]
    UnsupportedFlavor { op: &'static str, flavor: Flavor },
    #[error("atom `{0}` already has a valuation")]
    AtomCollision(String),
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("bad parameters for example `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
}

/// A finite Kripke model.
///
/// The preorder is always stored reflexively and transitively closed. Box
/// relations `R_1..R_n` and diamond relations `S_1..S_m` are 1-indexed in
/// formulas and 0-indexed here.
#[derive(Clone, PartialEq, Eq)]
pub struct Model {
    states: Vec<String>,
    index: HashMap<String, usize>,
    leq: Relation,
    geq: Relation,
    boxes: Vec<Relation>,
    diamonds: Vec<Relation>,
    valuation: BTreeMap<String, StateSet>,
    flavor: Flavor,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("flavor", &self.flavor)
            .field("states", &self.states)
            .field("leq", &self.leq)
            .field("boxes", &self.boxes)
            .field("diamonds", &self.diamonds)
            .field("valuation", &self.valuation)
            .finish()
    }
}

impl Model {
    /// Builds a model from index-based parts. `leq_generators` is closed
    /// reflexively and transitively.
    pub fn from_parts(
        states: Vec<String>,
        leq_generators: &Relation,
        boxes: Vec<Relation>,
        diamonds: Vec<Relation>,
        valuation: BTreeMap<String, StateSet>,
        flavor: Flavor,
    ) -> Result<Model, ModelError> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        check_arity(flavor, boxes.len(), diamonds.len())?;
        let leq = leq_generators.closure(true);
        let geq = leq.converse();
        Ok(Model {
            states,
            index,
            leq,
            geq,
            boxes,
            diamonds,
            valuation,
            flavor,
        })
    }

    pub fn builder(flavor: Flavor) -> ModelBuilder {
        ModelBuilder {
            file: ModelFile {
                flavor,
                ..ModelFile::default()
            },
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, i: usize) -> &str {
        &self.states[i]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn require_state(&self, name: &str) -> Result<usize, ModelError> {
        self.state_index(name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    /// The preorder `≤`.
    pub fn leq(&self) -> &Relation {
        &self.leq
    }

    /// The reversed preorder `≥`.
    pub fn geq(&self) -> &Relation {
        &self.geq
    }

    pub fn boxes(&self) -> &[Relation] {
        &self.boxes
    }

    pub fn diamonds(&self) -> &[Relation] {
        &self.diamonds
    }

    pub fn valuation(&self) -> &BTreeMap<String, StateSet> {
        &self.valuation
    }

    /// `V(p)`; atoms without a valuation are false everywhere.
    pub fn atom(&self, p: &str) -> StateSet {
        self.valuation
            .get(p)
            .cloned()
            .unwrap_or_else(|| StateSet::empty(self.len()))
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.len())
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.len())
    }

    /// Upward closure `↑a`.
    pub fn up(&self, a: &StateSet) -> StateSet {
        a.iter()
            .fold(self.empty_set(), |acc, x| acc.union(self.leq.image(x)))
    }

    /// Downward closure `↓a`.
    pub fn down(&self, a: &StateSet) -> StateSet {
        a.iter()
            .fold(self.empty_set(), |acc, x| acc.union(self.geq.image(x)))
    }

    pub fn is_upset(&self, a: &StateSet) -> bool {
        a.iter().all(|x| self.leq.image(x).is_subset(a))
    }

    /// Sorted state names of a set.
    pub fn names(&self, a: &StateSet) -> Vec<String> {
        let mut out: Vec<String> = a.iter().map(|i| self.states[i].clone()).collect();
        out.sort();
        out
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet, ModelError> {
        let mut out = self.empty_set();
        for n in names {
            out.insert(self.require_state(n.as_ref())?);
        }
        Ok(out)
    }

    /// Pairs of a relation over this model's carrier, as sorted name pairs.
    pub fn relation_names(&self, r: &Relation) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = r
            .pairs()
            .map(|(a, b)| (self.states[a].clone(), self.states[b].clone()))
            .collect();
        out.sort();
        out
    }

    pub fn relation_of<S: AsRef<str>>(&self, pairs: &[(S, S)]) -> Result<Relation, ModelError> {
        let mut r = Relation::empty(self.len(), self.len());
        for (a, b) in pairs {
            r.insert(self.require_state(a.as_ref())?, self.require_state(b.as_ref())?);
        }
        Ok(r)
    }

    pub fn with_flavor(&self, flavor: Flavor) -> Result<Model, ModelError> {
        check_arity(flavor, self.boxes.len(), self.diamonds.len())?;
        let mut m = self.clone();
        m.flavor = flavor;
        Ok(m)
    }

    pub(crate) fn with_relations(&self, boxes: Vec<Relation>, diamonds: Vec<Relation>) -> Model {
        let mut m = self.clone();
        m.boxes = boxes;
        m.diamonds = diamonds;
        m
    }

    pub(crate) fn with_valuation(&self, valuation: BTreeMap<String, StateSet>) -> Model {
        let mut m = self.clone();
        m.valuation = valuation;
        m
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    pub fn is_strictly_condensed(&self) -> bool {
        validate::strict_condensation_violation(self).is_none()
    }

    pub fn dualize(&self) -> Result<Model, ModelError> {
        ops::dualize(self)
    }

    pub fn strictify(&self) -> Result<Model, ModelError> {
        ops::strictify(self)
    }

    /// Collapses each block to one state; also returns the state-to-block map.
    pub fn quotient(&self, p: &Partition) -> Result<(Model, Vec<usize>), ModelError> {
        ops::quotient(self, p)
    }

    pub fn enrich_valuation(
        &self,
        defs: &[(String, crate::formula::Formula)],
    ) -> Result<Model, ModelError> {
        ops::enrich_valuation(self, defs)
    }
}

fn check_arity(flavor: Flavor, boxes: usize, diamonds: usize) -> Result<(), ModelError> {
    let expected = match flavor {
        Flavor::Standard => return Ok(()),
        Flavor::Fs | Flavor::H if boxes != 1 || diamonds != 0 => {
            "exactly one box relation and no diamond relation"
        }
        Flavor::Gpt | Flavor::Tense if boxes != 1 || diamonds != 1 => {
            "exactly one box relation and one diamond relation"
        }
        Flavor::Ek if diamonds != 0 => "knowledge (box) relations only",
        _ => return Ok(()),
    };
    Err(ModelError::Arity {
        flavor,
        expected,
        boxes,
        diamonds,
    })
}

/// Name-based construction of models.
pub struct ModelBuilder {
    file: ModelFile,
}

impl ModelBuilder {
    pub fn states<S: ToString>(mut self, names: &[S]) -> Self {
        self.file.states = names.iter().map(ToString::to_string).collect();
        self
    }

    pub fn leq(mut self, a: &str, b: &str) -> Self {
        self.file.leq_gen.push((a.into(), b.into()));
        self
    }

    pub fn box_relation(mut self, pairs: &[(&str, &str)]) -> Self {
        self.file.boxes.push(owned_pairs(pairs));
        self
    }

    pub fn diamond_relation(mut self, pairs: &[(&str, &str)]) -> Self {
        self.file.diamonds.push(owned_pairs(pairs));
        self
    }

    pub fn atom(mut self, p: &str, states: &[&str]) -> Self {
        self.file
            .valuation
            .insert(p.into(), states.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn build(self) -> Result<Model, ModelError> {
        Model::from_file(&self.file)
    }
}

fn owned_pairs(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
}

/// A partition of a model's carrier into nonempty, disjoint blocks.
///
/// Blocks are numbered in order of their least member, so equal partitions
/// have equal representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Partition {
    block_of: Vec<usize>,
    n_blocks: usize,
}

impl Partition {
    /// Canonicalizes an arbitrary block labelling.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Partition {
        let mut seen: HashMap<L, usize> = HashMap::new();
        let block_of = labels
            .iter()
            .map(|l| {
                let next = seen.len();
                *seen.entry(l.clone()).or_insert(next)
            })
            .collect();
        Partition {
            block_of,
            n_blocks: seen.len(),
        }
    }

    pub fn discrete(n: usize) -> Partition {
        Partition {
            block_of: (0..n).collect(),
            n_blocks: n,
        }
    }

    /// The blocks of an equivalence relation on one carrier.
    pub fn from_equivalence(r: &Relation) -> Result<Partition, ModelError> {
        if r.n_rows() != r.n_cols() {
            return Err(ModelError::BadPartition("relation is not on one carrier".into()));
        }
        if !r.is_reflexive() || !r.is_symmetric() || !r.is_transitive() {
            return Err(ModelError::BadPartition(
                "relation is not an equivalence".into(),
            ));
        }
        let labels: Vec<usize> = (0..r.n_rows())
            .map(|x| r.image(x).iter().next().expect("reflexive"))
            .collect();
        Ok(Partition::from_labels(&labels))
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn len(&self) -> usize {
        self.block_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_of.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.n_blocks == self.block_of.len()
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_blocks];
        for (x, &b) in self.block_of.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    /// The equivalence relation whose classes are the blocks.
    pub fn to_relation(&self) -> Relation {
        let n = self.block_of.len();
        let mut r = Relation::empty(n, n);
        for x in 0..n {
            for y in 0..n {
                if self.block_of[x] == self.block_of[y] {
                    r.insert(x, y);
                }
            }
        }
        r
    }

    /// Graph of the quotient map `x ↦ [x]`.
    pub fn quotient_map(&self) -> Relation {
        Relation::from_pairs(
            self.block_of.len(),
            self.n_blocks,
            self.block_of.iter().copied().enumerate(),
        )
    }

    pub(crate) fn check_against(&self, n: usize) -> Result<(), ModelError> {
        if self.block_of.len() != n {
            return Err(ModelError::BadPartition(format!(
                "partition covers {} states, carrier has {n}",
                self.block_of.len()
            )));
        }
        let mut used = vec![false; self.n_blocks];
        for &b in &self.block_of {
            if b >= self.n_blocks {
                return Err(ModelError::BadPartition(format!("block {b} out of range")));
            }
            used[b] = true;
        }
        if let Some(b) = used.iter().position(|u| !u) {
            return Err(ModelError::BadPartition(format!("block {b} is empty")));
        }
        Ok(())
    }
}
