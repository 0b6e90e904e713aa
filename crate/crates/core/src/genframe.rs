//! Families of admissible upsets closed under the semantic operators.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Fragment;
use crate::model::{Model, ModelError};
use crate::semantics::{arrow, coarrow, modal_clause, EvalError, EvalOptions, ModalClause, ModalOp};
use crate::stateset::StateSet;

#[derive(Debug, Error)]
pub enum GenframeError {
    #[error("set {0:?} is not an upset")]
    NotUpset(Vec<String>),
    #[error("enumerating all upsets of {0} states is not supported (limit {MAX_UPSET_STATES})")]
    TooLarge(usize),
    #[error("the descriptive check needs exactly one box relation, found {0}")]
    BoxCount(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("malformed algebra file: {0}")]
    Json(#[from] serde_json::Error),
}

pub const MAX_UPSET_STATES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgebraOp {
    /// `a →̲ b`
    Arrow,
    /// `a ⊸̲ b`
    Coarrow,
    /// The set operator of a modality, as the model's flavor reads it.
    Modal(ModalOp),
}

impl fmt::Display for AlgebraOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraOp::Arrow => f.write_str("->"),
            AlgebraOp::Coarrow => f.write_str("-<"),
            AlgebraOp::Modal(op) => write!(f, "{op}"),
        }
    }
}

/// The operators a general model for `frag` must be closed under.
pub fn fragment_ops(frag: &Fragment) -> Vec<AlgebraOp> {
    let mut ops = Vec::new();
    if frag.base.has_imp() {
        ops.push(AlgebraOp::Arrow);
    }
    if frag.base.has_sub() {
        ops.push(AlgebraOp::Coarrow);
    }
    ops.extend((1..=frag.n_boxes).map(|i| AlgebraOp::Modal(ModalOp::Box(i))));
    ops.extend((1..=frag.m_diamonds).map(|j| AlgebraOp::Modal(ModalOp::Dia(j))));
    if frag.tense {
        ops.extend((1..=frag.n_boxes).map(|i| AlgebraOp::Modal(ModalOp::TDia(i))));
        ops.extend((1..=frag.m_diamonds).map(|j| AlgebraOp::Modal(ModalOp::TBox(j))));
    }
    if frag.common {
        ops.push(AlgebraOp::Modal(ModalOp::Common));
    }
    ops
}

/// A family of upsets of one model, kept in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetAlgebra {
    sets: BTreeSet<StateSet>,
    ops: BTreeSet<AlgebraOp>,
}

impl SetAlgebra {
    /// A family taken as given, without closing it. Members must be upsets.
    pub fn from_sets(
        m: &Model,
        sets: impl IntoIterator<Item = StateSet>,
    ) -> Result<SetAlgebra, GenframeError> {
        let sets: BTreeSet<StateSet> = sets.into_iter().collect();
        if let Some(bad) = sets.iter().find(|s| !m.is_upset(s)) {
            return Err(GenframeError::NotUpset(m.names(bad)));
        }
        Ok(SetAlgebra {
            sets,
            ops: BTreeSet::new(),
        })
    }

    /// Parses a JSON list of state-name lists.
    pub fn from_json(m: &Model, text: &str) -> Result<SetAlgebra, GenframeError> {
        let lists: Vec<Vec<String>> = serde_json::from_str(text)?;
        let sets = lists
            .iter()
            .map(|names| m.set_of(names))
            .collect::<Result<Vec<_>, _>>()?;
        SetAlgebra::from_sets(m, sets)
    }

    pub fn sets(&self) -> &BTreeSet<StateSet> {
        &self.sets
    }

    /// Operators the family was closed under by [`close_algebra`].
    pub fn ops(&self) -> &BTreeSet<AlgebraOp> {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, a: &StateSet) -> bool {
        self.sets.contains(a)
    }

    /// Members as sorted name lists.
    pub fn to_names(&self, m: &Model) -> Vec<Vec<String>> {
        let mut out: Vec<Vec<String>> = self.sets.iter().map(|s| m.names(s)).collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

enum Applied {
    Binary(fn(&Model, &StateSet, &StateSet) -> StateSet),
    Unary(ModalClause),
}

fn prepare(m: &Model, ops: &[AlgebraOp]) -> Result<Vec<Applied>, EvalError> {
    ops.iter()
        .map(|op| {
            Ok(match op {
                AlgebraOp::Arrow => Applied::Binary(arrow),
                AlgebraOp::Coarrow => Applied::Binary(coarrow),
                AlgebraOp::Modal(mop) => Applied::Unary(modal_clause(m, *mop, EvalOptions::default())?),
            })
        })
        .collect()
}

/// Least family containing `generators`, `∅` and the carrier, closed under
/// `∩`, `∪` and `ops`.
pub fn close_algebra(
    generators: &[StateSet],
    ops: &[AlgebraOp],
    m: &Model,
) -> Result<SetAlgebra, GenframeError> {
    if let Some(bad) = generators.iter().find(|s| !m.is_upset(s)) {
        return Err(GenframeError::NotUpset(m.names(bad)));
    }
    let applied = prepare(m, ops)?;
    let mut sets: BTreeSet<StateSet> = BTreeSet::new();
    let mut order: Vec<StateSet> = Vec::new();
    let mut queue: Vec<StateSet> = vec![m.empty_set(), m.full_set()];
    queue.extend(generators.iter().cloned());
    while let Some(a) = queue.pop() {
        if !sets.insert(a.clone()) {
            continue;
        }
        order.push(a.clone());
        let mut fresh = Vec::new();
        for b in &order {
            fresh.push(a.intersection(b));
            fresh.push(a.union(b));
            for op in &applied {
                if let Applied::Binary(f) = op {
                    fresh.push(f(m, &a, b));
                    fresh.push(f(m, b, &a));
                }
            }
        }
        for op in &applied {
            if let Applied::Unary(c) = op {
                fresh.push(c.apply(&a));
            }
        }
        queue.extend(fresh.into_iter().filter(|s| !sets.contains(s)));
    }
    Ok(SetAlgebra {
        sets,
        ops: ops.iter().copied().collect(),
    })
}

/// Whether `a` makes `m` a general model for `frag`: it holds `∅`, the
/// carrier and every `V(p)`, consists of upsets, and is closed under `∩`,
/// `∪` and the fragment's operators.
pub fn is_general_model(m: &Model, a: &SetAlgebra, frag: &Fragment) -> bool {
    let Ok(applied) = prepare(m, &fragment_ops(frag)) else {
        return false;
    };
    let has = |s: &StateSet| a.sets.contains(s);
    if !has(&m.empty_set()) || !has(&m.full_set()) {
        return false;
    }
    if !m.valuation().values().all(has) || !a.sets.iter().all(|s| m.is_upset(s)) {
        return false;
    }
    for x in &a.sets {
        for op in &applied {
            if let Applied::Unary(c) = op {
                if !has(&c.apply(x)) {
                    return false;
                }
            }
        }
        for y in &a.sets {
            if !has(&x.intersection(y)) || !has(&x.union(y)) {
                return false;
            }
            for op in &applied {
                if let Applied::Binary(f) = op {
                    if !has(&f(m, x, y)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Every upset of `m`.
pub fn all_upsets(m: &Model) -> Result<SetAlgebra, GenframeError> {
    let n = m.len();
    if n > MAX_UPSET_STATES {
        return Err(GenframeError::TooLarge(n));
    }
    let sets = (0u64..1 << n)
        .map(|mask| StateSet::from_indices(n, (0..n).filter(|i| mask >> i & 1 == 1)))
        .filter(|s| m.is_upset(s));
    SetAlgebra::from_sets(m, sets)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DescriptiveVerdict {
    pub holds: bool,
    /// First pair (in index order) where `xRy` and
    /// `∀a ∈ A. x ∈ ◫a ⇒ y ∈ a` disagree.
    pub counterexample: Option<(usize, usize)>,
}

/// Checks `xRy ⟺ ∀a ∈ A (x ∈ ◫a ⇒ y ∈ a)` with `◫a = {x | R[x] ⊆ a}`.
///
/// Only this characterization of `R` is checked, not descriptiveness of the
/// underlying order.
pub fn descriptive_box_check(m: &Model, a: &SetAlgebra) -> Result<DescriptiveVerdict, GenframeError> {
    if m.boxes().len() != 1 {
        return Err(GenframeError::BoxCount(m.boxes().len()));
    }
    let r = &m.boxes()[0];
    let n = m.len();
    // For each x, the intersection of all admissible a with R[x] ⊆ a.
    let mut hull = vec![m.full_set(); n];
    for set in a.sets() {
        for (x, h) in hull.iter_mut().enumerate() {
            if r.image(x).is_subset(set) {
                *h = h.intersection(set);
            }
        }
    }
    let counterexample = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| r.contains(x, y) != hull[x].contains(y));
    Ok(DescriptiveVerdict {
        holds: counterexample.is_none(),
        counterexample,
    })
}
