use std::collections::BTreeMap;

use super::{Flavor, Model, ModelError, Partition};
use crate::formula::Formula;
use crate::relation::Relation;
use crate::semantics::Evaluator;

pub(super) fn dualize(m: &Model) -> Result<Model, ModelError> {
    if !matches!(m.flavor, Flavor::Standard | Flavor::Tense) {
        return Err(ModelError::UnsupportedFlavor {
            op: "dualize",
            flavor: m.flavor,
        });
    }
    let valuation = m
        .valuation
        .iter()
        .map(|(p, set)| (p.clone(), set.complement()))
        .collect();
    Model::from_parts(
        m.states.clone(),
        &m.geq,
        m.diamonds.clone(),
        m.boxes.clone(),
        valuation,
        m.flavor,
    )
}

pub(super) fn strictify(m: &Model) -> Result<Model, ModelError> {
    let (boxes, diamonds) = match m.flavor {
        Flavor::Standard | Flavor::Tense => (
            m.boxes.iter().map(|r| r.compose(&m.leq)).collect(),
            m.diamonds.iter().map(|s| s.compose(&m.geq)).collect(),
        ),
        Flavor::Gpt => (
            m.boxes.iter().map(|r| m.leq.compose(r)).collect(),
            m.diamonds.iter().map(|s| s.compose(&m.geq)).collect(),
        ),
        flavor => {
            return Err(ModelError::UnsupportedFlavor {
                op: "strictify",
                flavor,
            })
        }
    };
    Ok(m.with_relations(boxes, diamonds))
}

pub(super) fn quotient(m: &Model, p: &Partition) -> Result<(Model, Vec<usize>), ModelError> {
    p.check_against(m.len())?;
    let k = p.n_blocks();
    let blocks = p.blocks();
    let names = blocks
        .iter()
        .map(|members| m.states[members[0]].clone())
        .collect();
    let lift = |r: &Relation| {
        Relation::from_pairs(k, k, r.pairs().map(|(a, b)| (p.block_of(a), p.block_of(b))))
    };
    let valuation = m
        .valuation
        .iter()
        .map(|(atom, set)| {
            let lifted = crate::stateset::StateSet::from_indices(k, set.iter().map(|x| p.block_of(x)));
            (atom.clone(), lifted)
        })
        .collect();
    let q = Model::from_parts(
        names,
        &lift(&m.leq),
        m.boxes.iter().map(lift).collect(),
        m.diamonds.iter().map(lift).collect(),
        valuation,
        m.flavor,
    )?;
    Ok((q, p.labels().to_vec()))
}

pub(super) fn enrich_valuation(m: &Model, defs: &[(String, Formula)]) -> Result<Model, ModelError> {
    let mut valuation: BTreeMap<_, _> = m.valuation.clone();
    let mut ev = Evaluator::new(m);
    for (atom, f) in defs {
        if valuation.contains_key(atom) {
            return Err(ModelError::AtomCollision(atom.clone()));
        }
        let set = ev.eval(f)?;
        valuation.insert(atom.clone(), set);
    }
    Ok(m.with_valuation(valuation))
}
