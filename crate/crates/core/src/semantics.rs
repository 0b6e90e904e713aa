//! Truth sets of formulas in finite models.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::model::{Flavor, Model};
use crate::relation::Relation;
use crate::stateset::StateSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("{op} is not part of the language of {flavor} models")]
    NotInLanguage { op: ModalOp, flavor: Flavor },
    #[error("{op} needs relation {index}, but the model has {available}")]
    IndexOutOfRange {
        op: ModalOp,
        index: usize,
        available: usize,
    },
    #[error("{0} operand is not an upset")]
    NotUpset(&'static str),
    #[error("{0} needs two operands")]
    MissingOperand(&'static str),
}

/// A modal operator with its 1-based index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModalOp {
    Box(usize),
    Dia(usize),
    TDia(usize),
    TBox(usize),
    Common,
}

impl fmt::Display for ModalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalOp::Box(i) => write!(f, "[]{i}"),
            ModalOp::Dia(j) => write!(f, "<>{j}"),
            ModalOp::TDia(i) => write!(f, "<|{i}"),
            ModalOp::TBox(j) => write!(f, "|>{j}"),
            ModalOp::Common => f.write_str("C"),
        }
    }
}

/// How a modal operator reads its relation `Z`: universally
/// (`{x | Z[x] ⊆ a}`) or existentially (`{x | Z[x] ∩ a ≠ ∅}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalClause {
    pub universal: bool,
    pub relation: Relation,
}

impl ModalClause {
    pub fn apply(&self, a: &StateSet) -> StateSet {
        let n = self.relation.n_rows();
        StateSet::from_indices(
            n,
            (0..n).filter(|&x| {
                let img = self.relation.image(x);
                if self.universal {
                    img.is_subset(a)
                } else {
                    img.intersects(a)
                }
            }),
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Interpret `C` over the reflexive-transitive closure instead of the
    /// positive transitive closure.
    pub reflexive_common: bool,
}

fn stored(op: ModalOp, index: usize, rels: &[Relation]) -> Result<&Relation, EvalError> {
    if index == 0 || index > rels.len() {
        return Err(EvalError::IndexOutOfRange {
            op,
            index,
            available: rels.len(),
        });
    }
    Ok(&rels[index - 1])
}

/// The relation and quantifier a flavor uses for a modal operator.
pub fn modal_clause(m: &Model, op: ModalOp, opts: EvalOptions) -> Result<ModalClause, EvalError> {
    let not_in = || EvalError::NotInLanguage {
        op,
        flavor: m.flavor(),
    };
    let universal = |relation: Relation| ModalClause {
        universal: true,
        relation,
    };
    let existential = |relation: Relation| ModalClause {
        universal: false,
        relation,
    };
    let leq = m.leq();
    let (boxes, dias) = (m.boxes(), m.diamonds());
    Ok(match (m.flavor(), op) {
        (Flavor::Standard, ModalOp::Box(i)) => universal(stored(op, i, boxes)?.clone()),
        (Flavor::Standard, ModalOp::Dia(j)) => existential(stored(op, j, dias)?.clone()),
        (Flavor::Fs, ModalOp::Box(i)) => universal(leq.compose(stored(op, i, boxes)?)),
        (Flavor::Fs, ModalOp::Dia(j)) => existential(stored(op, j, boxes)?.clone()),
        (Flavor::Gpt, ModalOp::Box(i)) => universal(leq.compose(stored(op, i, boxes)?)),
        (Flavor::Gpt, ModalOp::Dia(j)) => existential(stored(op, j, dias)?.clone()),
        (Flavor::Gpt, ModalOp::TBox(j)) => universal(leq.compose(&stored(op, j, dias)?.converse())),
        (Flavor::Gpt, ModalOp::TDia(i)) => existential(stored(op, i, boxes)?.converse()),
        (Flavor::Tense, ModalOp::Box(i)) => universal(stored(op, i, boxes)?.clone()),
        (Flavor::Tense, ModalOp::Dia(j)) => existential(stored(op, j, dias)?.clone()),
        (Flavor::Tense, ModalOp::TDia(i)) => existential(stored(op, i, boxes)?.converse()),
        (Flavor::Tense, ModalOp::TBox(j)) => universal(stored(op, j, dias)?.converse()),
        (Flavor::H, ModalOp::Box(i)) => universal(stored(op, i, boxes)?.clone()),
        (Flavor::H, ModalOp::TDia(i)) => existential(stored(op, i, boxes)?.converse()),
        (Flavor::H, ModalOp::Dia(j)) => existential(left_converse(stored(op, j, boxes)?, m)),
        (Flavor::H, ModalOp::TBox(j)) => {
            universal(left_converse(stored(op, j, boxes)?, m).converse())
        }
        (Flavor::Ek, ModalOp::Box(i)) => universal(stored(op, i, boxes)?.clone()),
        (Flavor::Ek, ModalOp::Common) => {
            universal(transitive_closure(boxes, m.len(), opts.reflexive_common))
        }
        _ => return Err(not_in()),
    })
}

/// Memoizing evaluator over one model.
pub struct Evaluator<'m> {
    model: &'m Model,
    options: EvalOptions,
    clauses: HashMap<ModalOp, ModalClause>,
    cache: HashMap<Formula, StateSet>,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Self {
        Self::with_options(model, EvalOptions::default())
    }

    pub fn with_options(model: &'m Model, options: EvalOptions) -> Self {
        Evaluator {
            model,
            options,
            clauses: HashMap::new(),
            cache: HashMap::new(),
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    pub fn clause(&mut self, op: ModalOp) -> Result<&ModalClause, EvalError> {
        if !self.clauses.contains_key(&op) {
            let c = modal_clause(self.model, op, self.options)?;
            self.clauses.insert(op, c);
        }
        Ok(&self.clauses[&op])
    }

    pub fn eval(&mut self, f: &Formula) -> Result<StateSet, EvalError> {
        if let Some(hit) = self.cache.get(f) {
            return Ok(hit.clone());
        }
        let m = self.model;
        let out = match f {
            Formula::Atom(p) => m.atom(p),
            Formula::Top => m.full_set(),
            Formula::Bot => m.empty_set(),
            Formula::And(l, r) => self.eval(l)?.intersection(&self.eval(r)?),
            Formula::Or(l, r) => self.eval(l)?.union(&self.eval(r)?),
            Formula::Imp(l, r) => arrow(m, &self.eval(l)?, &self.eval(r)?),
            Formula::Sub(l, r) => coarrow(m, &self.eval(l)?, &self.eval(r)?),
            Formula::Box(i, g) => self.modal(ModalOp::Box(*i), g)?,
            Formula::Dia(j, g) => self.modal(ModalOp::Dia(*j), g)?,
            Formula::TDia(i, g) => self.modal(ModalOp::TDia(*i), g)?,
            Formula::TBox(j, g) => self.modal(ModalOp::TBox(*j), g)?,
            Formula::Common(g) => self.modal(ModalOp::Common, g)?,
        };
        self.cache.insert(f.clone(), out.clone());
        Ok(out)
    }

    fn modal(&mut self, op: ModalOp, body: &Formula) -> Result<StateSet, EvalError> {
        self.clause(op)?;
        let a = self.eval(body)?;
        Ok(self.clauses[&op].apply(&a))
    }
}

/// `⟦f⟧` in `m`.
pub fn eval(f: &Formula, m: &Model) -> Result<StateSet, EvalError> {
    Evaluator::new(m).eval(f)
}

/// `a →̲ b = {x | ∀y ≥ x. y ∈ a ⇒ y ∈ b}`
pub(crate) fn arrow(m: &Model, a: &StateSet, b: &StateSet) -> StateSet {
    let bad = a.difference(b);
    StateSet::from_indices(m.len(), (0..m.len()).filter(|&x| !m.leq().image(x).intersects(&bad)))
}

/// `a ⊸̲ b = {x | ∃y ≤ x. y ∈ a ∧ y ∉ b}`
pub(crate) fn coarrow(m: &Model, a: &StateSet, b: &StateSet) -> StateSet {
    m.up(&a.difference(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemanticOp {
    Arrow,
    Coarrow,
    BoxBar(usize),
    DiaBar(usize),
}

/// The set operators underlying the connectives, on upsets of `m`.
pub fn semantic_operator(
    kind: SemanticOp,
    a: &StateSet,
    b: Option<&StateSet>,
    m: &Model,
) -> Result<StateSet, EvalError> {
    if !m.is_upset(a) {
        return Err(EvalError::NotUpset("first"));
    }
    if let Some(b) = b {
        if !m.is_upset(b) {
            return Err(EvalError::NotUpset("second"));
        }
    }
    match kind {
        SemanticOp::Arrow => Ok(arrow(m, a, b.ok_or(EvalError::MissingOperand("arrow"))?)),
        SemanticOp::Coarrow => Ok(coarrow(m, a, b.ok_or(EvalError::MissingOperand("coarrow"))?)),
        SemanticOp::BoxBar(i) => Ok(modal_clause(m, ModalOp::Box(i), EvalOptions::default())?.apply(a)),
        SemanticOp::DiaBar(j) => Ok(modal_clause(m, ModalOp::Dia(j), EvalOptions::default())?.apply(a)),
    }
}

/// Transitive closure of the union of `rels` over an `n`-element carrier.
pub fn transitive_closure(rels: &[Relation], n: usize, reflexive: bool) -> Relation {
    rels.iter()
        .fold(Relation::empty(n, n), |acc, r| acc.union(r))
        .closure(reflexive)
}

/// `≥ ∘ r ∘ ≥`
pub fn left_converse(r: &Relation, m: &Model) -> Relation {
    m.geq().compose(r).compose(m.geq())
}
