use std::collections::{BTreeSet, HashSet};

use super::DistinguishError;
use crate::formula::{Formula, Fragment};
use crate::model::Model;
use crate::relation::Relation;
use crate::semantics::{arrow, coarrow, modal_clause, EvalOptions, ModalClause, ModalOp};
use crate::stateset::StateSet;

/// Logical equivalence as far as an enumeration of formulas can see.
#[derive(Clone, Debug)]
pub struct OracleResult {
    /// Pairs no enumerated formula separates.
    pub relation: Relation,
    /// True when every definable pair of truth sets was reached, so the
    /// relation is exactly logical equivalence for the fragment.
    pub saturated: bool,
    /// Largest formula size enumerated.
    pub explored_size: usize,
    classes: Vec<(Formula, StateSet, StateSet)>,
}

impl OracleResult {
    /// Number of distinct truth-set pairs found.
    pub fn classes(&self) -> usize {
        self.classes.len()
    }

    /// A smallest enumerated formula separating the pair, if any.
    pub fn separator(&self, (x, x2): (usize, usize)) -> Option<&Formula> {
        self.classes
            .iter()
            .find(|(_, l, r)| l.contains(x) != r.contains(x2))
            .map(|(f, _, _)| f)
    }
}

#[derive(Clone, Copy)]
enum Binary {
    And,
    Or,
    Imp,
    Sub,
}

struct Side<'m> {
    model: &'m Model,
    clauses: Vec<ModalClause>,
}

impl Side<'_> {
    fn binary(&self, op: Binary, a: &StateSet, b: &StateSet) -> StateSet {
        match op {
            Binary::And => a.intersection(b),
            Binary::Or => a.union(b),
            Binary::Imp => arrow(self.model, a, b),
            Binary::Sub => coarrow(self.model, a, b),
        }
    }
}

#[derive(Default)]
struct Classes {
    list: Vec<(Formula, StateSet, StateSet)>,
    seen: HashSet<StateSet>,
    by_size: Vec<Vec<usize>>,
}

impl Classes {
    fn add(&mut self, f: Formula, l: StateSet, r: StateSet, size: usize) -> bool {
        if !self.seen.insert(l.concat(&r)) {
            return false;
        }
        self.by_size[size].push(self.list.len());
        self.list.push((f, l, r));
        true
    }
}

fn modal_ops(frag: &Fragment) -> Vec<ModalOp> {
    let mut ops: Vec<ModalOp> = (1..=frag.n_boxes).map(ModalOp::Box).collect();
    ops.extend((1..=frag.m_diamonds).map(ModalOp::Dia));
    if frag.tense {
        ops.extend((1..=frag.n_boxes).map(ModalOp::TDia));
        ops.extend((1..=frag.m_diamonds).map(ModalOp::TBox));
    }
    if frag.common {
        ops.push(ModalOp::Common);
    }
    ops
}

fn wrap(op: ModalOp, f: &Formula) -> Formula {
    let f = f.clone();
    match op {
        ModalOp::Box(i) => Formula::boxed(i, f),
        ModalOp::Dia(j) => Formula::dia(j, f),
        ModalOp::TDia(i) => Formula::tdia(i, f),
        ModalOp::TBox(j) => Formula::tbox(j, f),
        ModalOp::Common => Formula::common(f),
    }
}

/// Enumerates fragment formulas by size, keeping one smallest formula per
/// pair of truth sets (over `m` and `m2`), and relates the states no kept
/// formula separates.
///
/// `budget` caps the formula size (`None` runs to saturation). Saturation is
/// reached once every level up to `2k + 1` is done, where `k` is the largest
/// size of a kept formula: from then on every combination of kept formulas
/// has been tried.
pub fn bounded_equivalence_oracle(
    m: &Model,
    m2: &Model,
    frag: &Fragment,
    budget: Option<usize>,
) -> Result<OracleResult, DistinguishError> {
    if m.flavor() != m2.flavor() {
        return Err(DistinguishError::FlavorMismatch(m.flavor(), m2.flavor()));
    }
    let ops = modal_ops(frag);
    let opts = EvalOptions::default();
    let side = |model| -> Result<Side<'_>, DistinguishError> {
        let clauses = ops
            .iter()
            .map(|&op| modal_clause(model, op, opts))
            .collect::<Result<_, _>>()?;
        Ok(Side { model, clauses })
    };
    let sides = [side(m)?, side(m2)?];
    let mut binaries = vec![Binary::And, Binary::Or];
    if frag.base.has_imp() {
        binaries.push(Binary::Imp);
    }
    if frag.base.has_sub() {
        binaries.push(Binary::Sub);
    }

    let mut found = Classes::default();
    let mut largest = 1;
    let atoms: BTreeSet<&String> = m.valuation().keys().chain(m2.valuation().keys()).collect();
    let mut base = vec![
        (Formula::Bot, m.empty_set(), m2.empty_set()),
        (Formula::Top, m.full_set(), m2.full_set()),
    ];
    base.extend(atoms.into_iter().map(|p| (Formula::Atom(p.clone()), m.atom(p), m2.atom(p))));
    found.by_size = vec![Vec::new(), Vec::new()];
    for (f, l, r) in base {
        found.add(f, l, r, 1);
    }

    let mut size = 1;
    let saturated = loop {
        if size > 2 * largest {
            break true;
        }
        if budget.is_some_and(|b| size >= b) {
            break false;
        }
        size += 1;
        found.by_size.push(Vec::new());
        let mut grew = false;
        for ix in found.by_size[size - 1].clone() {
            for (k, &op) in ops.iter().enumerate() {
                let (f, l, r) = &found.list[ix];
                let nl = sides[0].clauses[k].apply(l);
                let nr = sides[1].clauses[k].apply(r);
                let f = wrap(op, f);
                grew |= found.add(f, nl, nr, size);
            }
        }
        for i in 1..size - 1 {
            let j = size - 1 - i;
            let (left, right) = (found.by_size[i].clone(), found.by_size[j].clone());
            for &a in &left {
                for &b in &right {
                    for &op in &binaries {
                        let commutative = matches!(op, Binary::And | Binary::Or);
                        if commutative && (i > j || (i == j && a > b)) {
                            continue;
                        }
                        let (fa, la, ra) = &found.list[a];
                        let (fb, lb, rb) = &found.list[b];
                        let nl = sides[0].binary(op, la, lb);
                        let nr = sides[1].binary(op, ra, rb);
                        if found.seen.contains(&nl.concat(&nr)) {
                            continue;
                        }
                        let f = match op {
                            Binary::And => Formula::and(fa.clone(), fb.clone()),
                            Binary::Or => Formula::or(fa.clone(), fb.clone()),
                            Binary::Imp => Formula::imp(fa.clone(), fb.clone()),
                            Binary::Sub => Formula::sub(fa.clone(), fb.clone()),
                        };
                        grew |= found.add(f, nl, nr, size);
                    }
                }
            }
        }
        if grew {
            largest = size;
        }
    };

    let mut rows = vec![m2.full_set(); m.len()];
    for (_, l, r) in &found.list {
        for (x, row) in rows.iter_mut().enumerate() {
            *row = if l.contains(x) {
                row.intersection(r)
            } else {
                row.difference(r)
            };
        }
    }
    Ok(OracleResult {
        relation: Relation::from_rows(rows, m2.len()),
        saturated,
        explored_size: size,
        classes: found.list,
    })
}
