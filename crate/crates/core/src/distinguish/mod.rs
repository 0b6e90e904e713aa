//! Distinguishing formulas for non-bisimilar states, and the
//! Hennessy-Milner check that bisimilarity and logical equivalence agree.

mod oracle;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::bisim::{
    conditions_for, greatest_bisimulation, BisimError, Channel, Clause, ConditionSet,
    RefinementTrace, Side,
};
use crate::formula::{Base, Formula, Fragment};
use crate::model::{Flavor, Model};
use crate::relation::Relation;
use crate::semantics::{EvalError, Evaluator};
use crate::stateset::StateSet;

pub use oracle::{bounded_equivalence_oracle, OracleResult};

#[derive(Debug, Error)]
pub enum DistinguishError {
    #[error("models have different flavors ({0} and {1})")]
    FlavorMismatch(Flavor, Flavor),
    #[error("fragment {fragment} has no Hennessy-Milner construction: {reason}")]
    NotHmSupported {
        fragment: Fragment,
        reason: &'static str,
    },
    #[error("{side} model is not strictly condensed ({condition} fails along {witness:?})")]
    NotStrictlyCondensed {
        side: Side,
        condition: String,
        witness: Vec<String>,
    },
    #[error("no finite cover found for pair {pair:?} under {clause}")]
    NoCover { pair: (usize, usize), clause: Clause },
    #[error("synthesized formula `{formula}` does not separate pair {pair:?}")]
    VerificationFailed { pair: (usize, usize), formula: Formula },
    #[error(transparent)]
    Bisim(#[from] BisimError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A formula true at exactly one state of a pair `(left, right)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub pair: (usize, usize),
    pub formula: Formula,
    /// The side at which the formula holds.
    pub orientation: Side,
    /// Refinement round in which the pair was removed.
    pub stage: usize,
    pub clause: Clause,
}

/// Printable witness with state names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessRecord {
    pub pair: (String, String),
    pub formula: String,
    pub orientation: Side,
    pub stage: usize,
    pub clause: Clause,
}

impl Witness {
    pub fn record(&self, m: &Model, m2: &Model) -> WitnessRecord {
        WitnessRecord {
            pair: (
                m.state_name(self.pair.0).to_string(),
                m2.state_name(self.pair.1).to_string(),
            ),
            formula: self.formula.to_string(),
            orientation: self.orientation,
            stage: self.stage,
            clause: self.clause,
        }
    }
}

pub struct Synthesis {
    pub conditions: ConditionSet,
    pub fixpoint: Relation,
    pub trace: RefinementTrace,
    pub witnesses: BTreeMap<(usize, usize), Witness>,
}

/// Checks that `frag` over these models is covered by a Hennessy-Milner
/// construction and returns its condition set.
pub fn hm_preconditions(
    m: &Model,
    m2: &Model,
    frag: &Fragment,
) -> Result<ConditionSet, DistinguishError> {
    if m.flavor() != m2.flavor() {
        return Err(DistinguishError::FlavorMismatch(m.flavor(), m2.flavor()));
    }
    let unsupported = |reason| DistinguishError::NotHmSupported {
        fragment: *frag,
        reason,
    };
    match frag.base {
        Base::Int if frag.m_diamonds > 0 || frag.tense => {
            return Err(unsupported(
                "diamonds need subtraction; intuitionistic logic with a diamond is not covered",
            ))
        }
        Base::IntDual if frag.n_boxes > 0 || frag.tense => {
            return Err(unsupported(
                "boxes need implication; dual-intuitionistic logic with a box is not covered",
            ))
        }
        _ => {}
    }
    let c = conditions_for(frag, m.flavor())?;
    if !c.channels.is_empty() {
        for (side, model) in [(Side::Left, m), (Side::Right, m2)] {
            if let Some(v) = model.validate().condensation_witness {
                return Err(DistinguishError::NotStrictlyCondensed {
                    side,
                    condition: v.condition,
                    witness: v.witness,
                });
            }
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// `⋀Φ' → ⋁Ψ'`, true at the side whose successors are covered.
    Arrow,
    /// `⋀Φ' ⊸ ⋁Ψ'`, true at the side owning the unmatched transition.
    Sub,
}

struct ClauseRel {
    clause: Clause,
    left: Relation,
    right: Relation,
    side: Side,
    shape: Shape,
    wrap: Option<Channel>,
}

fn clause_relations(m: &Model, m2: &Model, c: &ConditionSet) -> Result<Vec<ClauseRel>, BisimError> {
    let mut out = Vec::new();
    for clause in c.clauses() {
        let side = if clause.is_forth() { Side::Left } else { Side::Right };
        let (left, right, shape, wrap) = match clause {
            Clause::Atoms => continue,
            Clause::OrderForth | Clause::OrderBack => {
                (m.leq().clone(), m2.leq().clone(), Shape::Arrow, None)
            }
            Clause::DualForth | Clause::DualBack => {
                (m.geq().clone(), m2.geq().clone(), Shape::Sub, None)
            }
            Clause::Zig(ch) | Clause::Zag(ch) => {
                let l = ch.relation(m).ok_or(BisimError::MissingRelation {
                    side: Side::Left,
                    channel: ch,
                })?;
                let r = ch.relation(m2).ok_or(BisimError::MissingRelation {
                    side: Side::Right,
                    channel: ch,
                })?;
                let shape = if ch.is_universal() { Shape::Arrow } else { Shape::Sub };
                (l, r, shape, Some(ch))
            }
        };
        out.push(ClauseRel {
            clause,
            left,
            right,
            side,
            shape,
            wrap,
        });
    }
    Ok(out)
}

/// A formula from an earlier stage together with its truth sets.
struct Separator {
    formula: Formula,
    size: usize,
    text: String,
    sets: [StateSet; 2],
}

fn side_ix(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

fn wrap(ch: Channel, f: Formula) -> Formula {
    match ch {
        Channel::Box(i) => Formula::boxed(i, f),
        Channel::Dia(j) => Formula::dia(j, f),
        Channel::ConvBox(i) => Formula::tdia(i, f),
        Channel::ConvDia(j) => Formula::tbox(j, f),
    }
}

/// Greedily covers `targets` (states of the side opposite to `side`) with
/// separators between `y` (on `side`) and each target. Returns `(Φ', Ψ')`:
/// formulas true at `y` and false at the targets they cover, and formulas
/// false at `y` and true at the targets they cover.
fn cover(
    pool: &[Separator],
    side: Side,
    y: usize,
    targets: &StateSet,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let (own, other) = (side_ix(side), side_ix(side.other()));
    let covers: Vec<(bool, StateSet)> = pool
        .iter()
        .map(|s| {
            let at_y = s.sets[own].contains(y);
            let covered = if at_y {
                targets.difference(&s.sets[other])
            } else {
                targets.intersection(&s.sets[other])
            };
            (at_y, covered)
        })
        .collect();
    let mut left = targets.clone();
    let (mut phi, mut psi) = (Vec::new(), Vec::new());
    while !left.is_empty() {
        let best = covers
            .iter()
            .enumerate()
            .map(|(i, (_, c))| (i, c.intersection(&left).len()))
            .filter(|&(_, gain)| gain > 0)
            .min_by(|&(i, gi), &(j, gj)| {
                gj.cmp(&gi)
                    .then(pool[i].size.cmp(&pool[j].size))
                    .then_with(|| pool[i].text.cmp(&pool[j].text))
            })?
            .0;
        left = left.difference(&covers[best].1);
        if covers[best].0 {
            phi.push(best);
        } else {
            psi.push(best);
        }
    }
    Some((phi, psi))
}

fn assemble(pool: &[Separator], phi: &[usize], psi: &[usize], shape: Shape) -> Formula {
    let sorted = |ix: &[usize]| {
        let mut v: Vec<&Separator> = ix.iter().map(|&i| &pool[i]).collect();
        v.sort_by(|a, b| a.size.cmp(&b.size).then_with(|| a.text.cmp(&b.text)));
        v.into_iter().map(|s| s.formula.clone()).collect::<Vec<_>>()
    };
    let (phi, psi) = (sorted(phi), sorted(psi));
    match shape {
        Shape::Arrow if phi.is_empty() => Formula::disj(psi),
        Shape::Arrow => Formula::imp(Formula::conj(phi), Formula::disj(psi)),
        Shape::Sub if psi.is_empty() => Formula::conj(phi),
        Shape::Sub => Formula::sub(Formula::conj(phi), Formula::disj(psi)),
    }
}

/// Builds an eval-verified distinguishing formula for every pair outside
/// the greatest bisimulation, replaying the refinement stage by stage.
pub fn synthesize(m: &Model, m2: &Model, frag: &Fragment) -> Result<Synthesis, DistinguishError> {
    let conditions = hm_preconditions(m, m2, frag)?;
    let (fixpoint, trace) = greatest_bisimulation(m, m2, &conditions)?;
    let rels = clause_relations(m, m2, &conditions)?;
    let mut evs = [Evaluator::new(m), Evaluator::new(m2)];
    let mut pool: Vec<Separator> = Vec::new();
    let mut pool_index: HashMap<[StateSet; 2], usize> = HashMap::new();
    let mut witnesses = BTreeMap::new();

    let removals = trace.removals();
    let mut start = 0;
    while start < removals.len() {
        let stage = removals[start].stage;
        let end = start
            + removals[start..]
                .iter()
                .take_while(|r| r.stage == stage)
                .count();
        // The relation the removals of this stage were judged against.
        let mut before = Relation::full(m.len(), m2.len());
        for r in &removals[..start] {
            before.remove(r.pair.0, r.pair.1);
        }
        let before_conv = before.converse();
        let mut fresh = Vec::new();
        for removal in &removals[start..end] {
            let (x, x2) = removal.pair;
            let (formula, orientation, clause) = if stage == 0 {
                let p = removal.violation.atom.clone().expect("stage 0 removals name an atom");
                let side = if m.atom(&p).contains(x) { Side::Left } else { Side::Right };
                (Formula::Atom(p), side, Clause::Atoms)
            } else {
                best_candidate(&rels, &pool, &before, &before_conv, x, x2)
                    .ok_or(DistinguishError::NoCover {
                        pair: (x, x2),
                        clause: removal.violation.clause,
                    })?
            };
            let l = evs[0].eval(&formula)?;
            let r = evs[1].eval(&formula)?;
            let holds = |side| match side {
                Side::Left => l.contains(x) && !r.contains(x2),
                Side::Right => r.contains(x2) && !l.contains(x),
            };
            if !holds(orientation) {
                return Err(DistinguishError::VerificationFailed {
                    pair: (x, x2),
                    formula,
                });
            }
            fresh.push(Separator {
                size: formula.size(),
                text: formula.to_string(),
                formula: formula.clone(),
                sets: [l, r],
            });
            witnesses.insert(
                (x, x2),
                Witness {
                    pair: (x, x2),
                    formula,
                    orientation,
                    stage,
                    clause,
                },
            );
        }
        for s in fresh {
            match pool_index.get(&s.sets) {
                Some(&i) if (pool[i].size, &pool[i].text) <= (s.size, &s.text) => {}
                Some(&i) => pool[i] = s,
                None => {
                    pool_index.insert(s.sets.clone(), pool.len());
                    pool.push(s);
                }
            }
        }
        start = end;
    }
    Ok(Synthesis {
        conditions,
        fixpoint,
        trace,
        witnesses,
    })
}

/// Smallest separator over every clause and unmatched transition failing
/// at `(x, x2)` relative to `b`.
fn best_candidate(
    rels: &[ClauseRel],
    pool: &[Separator],
    b: &Relation,
    b_conv: &Relation,
    x: usize,
    x2: usize,
) -> Option<(Formula, Side, Clause)> {
    let mut best: Option<(usize, String, Formula, Side, Clause)> = None;
    for cr in rels {
        let (own_rel, other_rel, own, other_state, matched) = match cr.side {
            Side::Left => (&cr.left, &cr.right, x, x2, b),
            Side::Right => (&cr.right, &cr.left, x2, x, b_conv),
        };
        let targets = other_rel.image(other_state);
        for y in own_rel.image(own).iter() {
            if matched.image(y).intersects(targets) {
                continue;
            }
            let Some((phi, psi)) = cover(pool, cr.side, y, targets) else {
                continue;
            };
            let body = assemble(pool, &phi, &psi, cr.shape);
            let formula = match cr.wrap {
                Some(ch) => wrap(ch, body),
                None => body,
            };
            let orientation = match cr.shape {
                Shape::Arrow => cr.side.other(),
                Shape::Sub => cr.side,
            };
            let key = (formula.size(), formula.to_string());
            if best.as_ref().is_none_or(|(s, t, ..)| key < (*s, t.clone())) {
                best = Some((key.0, key.1, formula, orientation, cr.clause));
            }
        }
    }
    best.map(|(_, _, f, o, c)| (f, o, c))
}

/// Whether every witness holds at exactly its oriented side.
pub fn verify_witnesses<'a>(
    ws: impl IntoIterator<Item = &'a Witness>,
    m: &Model,
    m2: &Model,
) -> bool {
    let (mut e1, mut e2) = (Evaluator::new(m), Evaluator::new(m2));
    ws.into_iter().all(|w| {
        let (Ok(l), Ok(r)) = (e1.eval(&w.formula), e2.eval(&w.formula)) else {
            return false;
        };
        let (x, x2) = w.pair;
        if x >= m.len() || x2 >= m2.len() {
            return false;
        }
        match w.orientation {
            Side::Left => l.contains(x) && !r.contains(x2),
            Side::Right => r.contains(x2) && !l.contains(x),
        }
    })
}

/// Outcome of comparing bisimilarity with logical equivalence.
#[derive(Clone, Debug)]
pub struct HmReport {
    pub pass: bool,
    pub fixpoint: Relation,
    pub witnesses: usize,
    pub witnesses_verified: bool,
    /// Pairs outside the fixpoint with no witness.
    pub missing_witnesses: Vec<(usize, usize)>,
    pub oracle_saturated: bool,
    /// Pairs the oracle calls equivalent although they are not bisimilar.
    pub equivalent_not_bisimilar: Vec<(usize, usize)>,
    /// Bisimilar pairs the oracle separates, with the separating formula.
    pub bisimilar_not_equivalent: Vec<((usize, usize), Formula)>,
}

/// Synthesizes witnesses and compares the fixpoint with the saturated
/// enumeration oracle. `budget` bounds the oracle's formula size.
pub fn hennessy_milner_check(
    m: &Model,
    m2: &Model,
    frag: &Fragment,
    budget: Option<usize>,
) -> Result<HmReport, DistinguishError> {
    let syn = synthesize(m, m2, frag)?;
    let witnesses_verified = verify_witnesses(syn.witnesses.values(), m, m2);
    let missing_witnesses: Vec<_> = Relation::full(m.len(), m2.len())
        .pairs()
        .filter(|&(x, x2)| !syn.fixpoint.contains(x, x2) && !syn.witnesses.contains_key(&(x, x2)))
        .collect();
    let oracle = bounded_equivalence_oracle(m, m2, frag, budget)?;
    let equivalent_not_bisimilar: Vec<_> = oracle
        .relation
        .pairs()
        .filter(|&(x, x2)| !syn.fixpoint.contains(x, x2))
        .collect();
    let bisimilar_not_equivalent: Vec<_> = syn
        .fixpoint
        .pairs()
        .filter(|&(x, x2)| !oracle.relation.contains(x, x2))
        .map(|p| (p, oracle.separator(p).cloned().expect("separated pairs have a separator")))
        .collect();
    let pass = witnesses_verified
        && missing_witnesses.is_empty()
        && oracle.saturated
        && equivalent_not_bisimilar.is_empty()
        && bisimilar_not_equivalent.is_empty();
    Ok(HmReport {
        pass,
        witnesses: syn.witnesses.len(),
        fixpoint: syn.fixpoint,
        witnesses_verified,
        missing_witnesses,
        oracle_saturated: oracle.saturated,
        equivalent_not_bisimilar,
        bisimilar_not_equivalent,
    })
}
