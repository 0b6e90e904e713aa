//! Bisimulation conditions, checking, and greatest bisimulations by
//! fixpoint refinement.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::Fragment;
use crate::model::{Flavor, Model, ModelError, Partition};
use crate::relation::Relation;
use crate::stateset::StateSet;

#[derive(Debug, Error)]
pub enum BisimError {
    #[error("fragment {fragment} is not supported by {flavor} models: {reason}")]
    Incompatible {
        fragment: Fragment,
        flavor: Flavor,
        reason: &'static str,
    },
    #[error("{side} model has no relation for {channel}")]
    MissingRelation { side: Side, channel: Channel },
    #[error("bisimilarity on one model is not an equivalence (pair {0:?}); the condition set is inconsistent")]
    NotEquivalence((usize, usize)),
    #[error("quotient map fails {0}")]
    QuotientNotBisimulation(Clause),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// A stored relation a zig/zag pair ranges over (indices are 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    /// `R_i`, read by `□_i`.
    Box(usize),
    /// `S_j`, read by `◇_j`.
    Dia(usize),
    /// `R̆_i`, read by `⧫_i`.
    ConvBox(usize),
    /// `S̆_j`, read by `⊟_j`.
    ConvDia(usize),
}

impl Channel {
    pub fn relation(self, m: &Model) -> Option<Relation> {
        let pick = |rels: &[Relation], i: usize| rels.get(i.wrapping_sub(1)).cloned();
        match self {
            Channel::Box(i) => pick(m.boxes(), i),
            Channel::Dia(j) => pick(m.diamonds(), j),
            Channel::ConvBox(i) => pick(m.boxes(), i).map(|r| r.converse()),
            Channel::ConvDia(j) => pick(m.diamonds(), j).map(|r| r.converse()),
        }
    }

    /// Whether separating formulas for this channel are box-shaped
    /// (universal, `→` inside) rather than diamond-shaped (existential, `⊸` inside).
    pub fn is_universal(self) -> bool {
        matches!(self, Channel::Box(_) | Channel::ConvDia(_))
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Box(i) => write!(f, "[]{i}"),
            Channel::Dia(j) => write!(f, "<>{j}"),
            Channel::ConvBox(i) => write!(f, "<|{i}"),
            Channel::ConvDia(j) => write!(f, "|>{j}"),
        }
    }
}

/// One back-and-forth clause of a bisimulation definition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    /// B1: related states satisfy the same atoms.
    Atoms,
    /// B2: `x ≤ y` is matched by some `x' ≤' y'`.
    OrderForth,
    /// B3: `x' ≤' y'` is matched by some `x ≤ y`.
    OrderBack,
    /// B4: `y ≤ x` is matched by some `y' ≤' x'`.
    DualForth,
    /// B5: `y' ≤' x'` is matched by some `y ≤ x`.
    DualBack,
    Zig(Channel),
    Zag(Channel),
}

impl Clause {
    /// Whether the unmatched transition lives in the left model.
    pub fn is_forth(self) -> bool {
        matches!(self, Clause::Atoms | Clause::OrderForth | Clause::DualForth | Clause::Zig(_))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Atoms => f.write_str("B1"),
            Clause::OrderForth => f.write_str("B2"),
            Clause::OrderBack => f.write_str("B3"),
            Clause::DualForth => f.write_str("B4"),
            Clause::DualBack => f.write_str("B5"),
            Clause::Zig(c) => write!(f, "{c}-zig"),
            Clause::Zag(c) => write!(f, "{c}-zag"),
        }
    }
}

impl Serialize for Clause {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The clauses a relation must satisfy to be a bisimulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionSet {
    pub atoms: bool,
    pub order_forth: bool,
    pub order_back: bool,
    pub dual_forth: bool,
    pub dual_back: bool,
    /// Each channel contributes a zig and a zag clause.
    pub channels: BTreeSet<Channel>,
}

impl ConditionSet {
    /// Active clauses in checking order: B1–B5, then zig/zag per channel
    /// (boxes, diamonds, then converses).
    pub fn clauses(&self) -> Vec<Clause> {
        let mut out = Vec::new();
        let flags = [
            (self.atoms, Clause::Atoms),
            (self.order_forth, Clause::OrderForth),
            (self.order_back, Clause::OrderBack),
            (self.dual_forth, Clause::DualForth),
            (self.dual_back, Clause::DualBack),
        ];
        out.extend(flags.iter().filter(|(on, _)| *on).map(|(_, c)| *c));
        for &ch in &self.channels {
            out.push(Clause::Zig(ch));
            out.push(Clause::Zag(ch));
        }
        out
    }
}

impl fmt::Display for ConditionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.clauses().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// The clause set of bisimulations for `frag` over models of `flavor`.
pub fn conditions_for(frag: &Fragment, flavor: Flavor) -> Result<ConditionSet, BisimError> {
    let incompatible = |reason| BisimError::Incompatible {
        fragment: *frag,
        flavor,
        reason,
    };
    if frag.check().is_err() {
        return Err(incompatible("tense operators need a bi-intuitionistic base"));
    }
    if frag.common && flavor != Flavor::Ek {
        return Err(incompatible("common knowledge is only interpreted in epistemic models"));
    }
    let mut channels = BTreeSet::new();
    let (n, m) = (frag.n_boxes, frag.m_diamonds);
    match flavor {
        Flavor::Standard => {
            if frag.tense {
                return Err(incompatible("standard models have no tense operators"));
            }
            channels.extend((1..=n).map(Channel::Box));
            channels.extend((1..=m).map(Channel::Dia));
        }
        Flavor::Fs => {
            if frag.tense || n > 1 || m > 1 {
                return Err(incompatible("these models have a single box and diamond and no tense operators"));
            }
            if n + m > 0 {
                channels.insert(Channel::Box(1));
            }
        }
        Flavor::Gpt | Flavor::Tense => {
            if n > 1 || m > 1 {
                return Err(incompatible("these models have one box and one diamond relation"));
            }
            if n == 1 {
                channels.insert(Channel::Box(1));
            }
            if m == 1 {
                channels.insert(Channel::Dia(1));
            }
            if frag.tense {
                if n == 1 {
                    channels.insert(Channel::ConvBox(1));
                }
                if m == 1 {
                    channels.insert(Channel::ConvDia(1));
                }
            }
        }
        Flavor::H => {
            if n > 1 || m > 1 {
                return Err(incompatible("these models have a single relation"));
            }
            if n + m > 0 {
                channels.insert(Channel::Box(1));
                channels.insert(Channel::ConvBox(1));
            }
        }
        Flavor::Ek => {
            if m > 0 || frag.tense {
                return Err(incompatible("epistemic models only have knowledge operators"));
            }
            channels.extend((1..=n).map(Channel::Box));
        }
    }
    Ok(ConditionSet {
        atoms: true,
        order_forth: frag.base.has_imp(),
        order_back: frag.base.has_imp(),
        dual_forth: frag.base.has_sub(),
        dual_back: frag.base.has_sub(),
        channels,
    })
}

/// A clause failing at a pair, with the transition left unmatched. For
/// forth clauses the transition is `pair.0 → target` in the left model; for
/// back clauses `pair.1 → target` in the right model. For B1, `target` is
/// unused and `atom` names the disagreeing atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pair: (usize, usize),
    pub clause: Clause,
    pub side: Side,
    pub target: usize,
    pub atom: Option<String>,
}

/// The relations each clause quantifies over, for both models.
struct Prepared {
    clauses: Vec<(Clause, Relation, Relation)>,
    atoms: Vec<(String, StateSet, StateSet)>,
    check_atoms: bool,
}

impl Prepared {
    fn new(m: &Model, m2: &Model, c: &ConditionSet) -> Result<Prepared, BisimError> {
        let mut clauses = Vec::new();
        for clause in c.clauses() {
            let (l, r) = match clause {
                Clause::Atoms => continue,
                Clause::OrderForth | Clause::OrderBack => (m.leq().clone(), m2.leq().clone()),
                Clause::DualForth | Clause::DualBack => (m.geq().clone(), m2.geq().clone()),
                Clause::Zig(ch) | Clause::Zag(ch) => {
                    let l = ch.relation(m).ok_or(BisimError::MissingRelation {
                        side: Side::Left,
                        channel: ch,
                    })?;
                    let r = ch.relation(m2).ok_or(BisimError::MissingRelation {
                        side: Side::Right,
                        channel: ch,
                    })?;
                    (l, r)
                }
            };
            clauses.push((clause, l, r));
        }
        let names: BTreeSet<&String> = m.valuation().keys().chain(m2.valuation().keys()).collect();
        let atoms = names
            .into_iter()
            .map(|p| (p.clone(), m.atom(p), m2.atom(p)))
            .collect();
        Ok(Prepared {
            clauses,
            atoms,
            check_atoms: c.atoms,
        })
    }

    fn atom_disagreement(&self, x: usize, x2: usize) -> Option<&str> {
        if !self.check_atoms {
            return None;
        }
        self.atoms
            .iter()
            .find(|(_, a, b)| a.contains(x) != b.contains(x2))
            .map(|(p, _, _)| p.as_str())
    }

    /// First violated non-atom clause at `(x, x2)` relative to `b`
    /// (with `b_conv` its converse).
    fn first_violation(
        &self,
        x: usize,
        x2: usize,
        b: &Relation,
        b_conv: &Relation,
    ) -> Option<(Clause, Side, usize)> {
        for (clause, l, r) in &self.clauses {
            if clause.is_forth() {
                let targets = r.image(x2);
                if let Some(y) = l.image(x).iter().find(|&y| !b.image(y).intersects(targets)) {
                    return Some((*clause, Side::Left, y));
                }
            } else {
                let targets = l.image(x);
                if let Some(y2) = r
                    .image(x2)
                    .iter()
                    .find(|&y2| !b_conv.image(y2).intersects(targets))
                {
                    return Some((*clause, Side::Right, y2));
                }
            }
        }
        None
    }
}

/// Every clause failure of `b`, in lexicographic pair order and clause order.
pub fn is_bisimulation(
    b: &Relation,
    m: &Model,
    m2: &Model,
    c: &ConditionSet,
) -> Result<Vec<Violation>, BisimError> {
    let prep = Prepared::new(m, m2, c)?;
    let b_conv = b.converse();
    let mut out = Vec::new();
    for (x, x2) in b.pairs() {
        if let Some(p) = prep.atom_disagreement(x, x2) {
            out.push(Violation {
                pair: (x, x2),
                clause: Clause::Atoms,
                side: Side::Left,
                target: x,
                atom: Some(p.to_string()),
            });
        }
        for (clause, l, r) in &prep.clauses {
            let (side, found) = if clause.is_forth() {
                let targets = r.image(x2);
                (Side::Left, l.image(x).iter().find(|&y| !b.image(y).intersects(targets)))
            } else {
                let targets = l.image(x);
                (
                    Side::Right,
                    r.image(x2).iter().find(|&y2| !b_conv.image(y2).intersects(targets)),
                )
            };
            if let Some(target) = found {
                out.push(Violation {
                    pair: (x, x2),
                    clause: *clause,
                    side,
                    target,
                    atom: None,
                });
            }
        }
    }
    Ok(out)
}

/// Why and when a pair left the refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removal {
    pub pair: (usize, usize),
    /// Round of removal; 0 means the pair disagrees on an atom.
    pub stage: usize,
    pub violation: Violation,
}

/// All removals of a refinement, in removal order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RefinementTrace {
    removals: Vec<Removal>,
    index: HashMap<(usize, usize), usize>,
    rounds: usize,
}

impl RefinementTrace {
    fn push(&mut self, r: Removal) {
        self.index.insert(r.pair, self.removals.len());
        self.removals.push(r);
    }

    pub fn removals(&self) -> &[Removal] {
        &self.removals
    }

    pub fn get(&self, pair: (usize, usize)) -> Option<&Removal> {
        self.index.get(&pair).map(|&i| &self.removals[i])
    }

    pub fn stage_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.get(pair).map(|r| r.stage)
    }

    /// Number of refinement rounds that removed at least one pair.
    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

/// The largest relation satisfying `c`, by iterated removal of violating
/// pairs starting from atom agreement.
pub fn greatest_bisimulation(
    m: &Model,
    m2: &Model,
    c: &ConditionSet,
) -> Result<(Relation, RefinementTrace), BisimError> {
    let prep = Prepared::new(m, m2, c)?;
    let mut trace = RefinementTrace::default();
    let mut b = Relation::full(m.len(), m2.len());
    for x in 0..m.len() {
        for x2 in 0..m2.len() {
            if let Some(p) = prep.atom_disagreement(x, x2) {
                b.remove(x, x2);
                trace.push(Removal {
                    pair: (x, x2),
                    stage: 0,
                    violation: Violation {
                        pair: (x, x2),
                        clause: Clause::Atoms,
                        side: Side::Left,
                        target: x,
                        atom: Some(p.to_string()),
                    },
                });
            }
        }
    }
    let mut stage = 0;
    loop {
        stage += 1;
        let b_conv = b.converse();
        let mut next = b.clone();
        let mut changed = false;
        for (x, x2) in b.pairs() {
            if let Some((clause, side, target)) = prep.first_violation(x, x2, &b, &b_conv) {
                next.remove(x, x2);
                changed = true;
                trace.push(Removal {
                    pair: (x, x2),
                    stage,
                    violation: Violation {
                        pair: (x, x2),
                        clause,
                        side,
                        target,
                        atom: None,
                    },
                });
            }
        }
        if !changed {
            trace.rounds = stage - 1;
            return Ok((b, trace));
        }
        b = next;
    }
}

/// Blocks of the greatest self-bisimulation of `m`.
pub fn bisimilarity_partition(m: &Model, c: &ConditionSet) -> Result<Partition, BisimError> {
    let (b, _) = greatest_bisimulation(m, m, c)?;
    if let Some(x) = (0..m.len()).find(|&x| !b.contains(x, x)) {
        return Err(BisimError::NotEquivalence((x, x)));
    }
    if let Some(p) = b.pairs().find(|&(x, y)| !b.contains(y, x)) {
        return Err(BisimError::NotEquivalence(p));
    }
    if let Some(p) = b.compose(&b).first_outside(&b) {
        return Err(BisimError::NotEquivalence(p));
    }
    Ok(Partition::from_equivalence(&b)?)
}

/// Quotient of `m` by bisimilarity; fails if the quotient map is not itself
/// a bisimulation.
pub fn bisimilarity_quotient(m: &Model, c: &ConditionSet) -> Result<(Model, Partition), BisimError> {
    let p = bisimilarity_partition(m, c)?;
    let (q, _) = m.quotient(&p)?;
    if let Some(v) = is_bisimulation(&p.quotient_map(), m, &q, c)?.first() {
        return Err(BisimError::QuotientNotBisimulation(v.clause));
    }
    Ok((q, p))
}

/// `B ↦ (B, B⁻¹)`
pub fn to_directed(b: &Relation) -> (Relation, Relation) {
    (b.clone(), b.converse())
}

/// `(Z₁, Z₂) ↦ Z₁ ∩ Z₂⁻¹`
pub fn from_directed(z1: &Relation, z2: &Relation) -> Relation {
    z1.intersection(&z2.converse())
}
