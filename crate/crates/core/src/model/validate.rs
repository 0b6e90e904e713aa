use serde::Serialize;

use super::{Flavor, Model};
use crate::relation::Relation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Reflexivity,
    Transitivity,
    UpsetValuation,
    Coherence,
    StrictCondensation,
}

/// One failed axiom instance. For relational conditions the witness is a
/// path `a_0 r_1 a_1 … r_k a_k` through the left-hand composition whose
/// endpoints are not related by the right-hand side; for valuations it is
/// `[atom, x, y]` with `x ∈ V(atom)`, `x ≤ y`, `y ∉ V(atom)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub condition: String,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub flavor: Flavor,
    pub violations: Vec<Violation>,
    pub strictly_condensed: bool,
    /// Why the model is not strictly condensed, if it is not.
    pub condensation_witness: Option<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Condition {
    name: String,
    lhs: Vec<Relation>,
    rhs: Relation,
}

fn cond(name: String, lhs: Vec<&Relation>, rhs: Relation) -> Condition {
    Condition {
        name,
        lhs: lhs.into_iter().cloned().collect(),
        rhs,
    }
}

fn coherence_conditions(m: &Model) -> Vec<Condition> {
    let (leq, geq) = (m.leq(), m.geq());
    let mut out = Vec::new();
    match m.flavor() {
        Flavor::Standard => {
            for (i, r) in m.boxes().iter().enumerate() {
                let i = i + 1;
                out.push(cond(format!("(≤∘R{i}) ⊆ (R{i}∘≤)"), vec![leq, r], r.compose(leq)));
            }
            for (j, s) in m.diamonds().iter().enumerate() {
                let j = j + 1;
                out.push(cond(format!("(≥∘S{j}) ⊆ (S{j}∘≥)"), vec![geq, s], s.compose(geq)));
            }
        }
        Flavor::Fs => {
            let r = &m.boxes()[0];
            out.push(cond("(R∘≤) ⊆ (≤∘R)".into(), vec![r, leq], leq.compose(r)));
            out.push(cond("(≥∘R) ⊆ (R∘≥)".into(), vec![geq, r], r.compose(geq)));
        }
        Flavor::Gpt => {
            let (r, s) = (&m.boxes()[0], &m.diamonds()[0]);
            out.push(cond("(R∘≤) ⊆ (≤∘R)".into(), vec![r, leq], leq.compose(r)));
            out.push(cond("(≥∘S) ⊆ (S∘≥)".into(), vec![geq, s], s.compose(geq)));
        }
        Flavor::Tense => {
            let (r, s) = (&m.boxes()[0], &m.diamonds()[0]);
            out.push(cond("(≤∘R) ⊆ (R∘≤)".into(), vec![leq, r], r.compose(leq)));
            out.push(cond("(R∘≤) ⊆ (≤∘R)".into(), vec![r, leq], leq.compose(r)));
            out.push(cond("(≥∘S) ⊆ (S∘≥)".into(), vec![geq, s], s.compose(geq)));
            out.push(cond("(S∘≥) ⊆ (≥∘S)".into(), vec![s, geq], geq.compose(s)));
        }
        Flavor::H => {
            let r = &m.boxes()[0];
            out.push(cond("(≤∘R∘≤) ⊆ R".into(), vec![leq, r, leq], r.clone()));
        }
        Flavor::Ek => {
            for (i, r) in m.boxes().iter().enumerate() {
                let i = i + 1;
                out.push(cond(format!("(≤∘R{i}) ⊆ R{i}"), vec![leq, r], r.clone()));
            }
        }
    }
    out
}

fn condensation_conditions(m: &Model) -> Vec<Condition> {
    let (leq, geq) = (m.leq(), m.geq());
    let mut out = Vec::new();
    match m.flavor() {
        Flavor::Standard | Flavor::Tense | Flavor::Ek | Flavor::H => {
            for (i, r) in m.boxes().iter().enumerate() {
                let i = i + 1;
                out.push(cond(format!("(≤∘R{i}∘≤) ⊆ R{i}"), vec![leq, r, leq], r.clone()));
            }
            for (j, s) in m.diamonds().iter().enumerate() {
                let j = j + 1;
                out.push(cond(format!("(≥∘S{j}∘≥) ⊆ S{j}"), vec![geq, s, geq], s.clone()));
            }
        }
        Flavor::Fs => {
            let r = &m.boxes()[0];
            out.push(cond("(≤∘R) ⊆ R".into(), vec![leq, r], r.clone()));
        }
        Flavor::Gpt => {
            let r = &m.boxes()[0];
            let s_conv = m.diamonds()[0].converse();
            out.push(cond("(≤∘R) ⊆ R".into(), vec![leq, r], r.clone()));
            out.push(cond("(≤∘S̆) ⊆ S̆".into(), vec![leq, &s_conv], s_conv.clone()));
        }
    }
    out
}

/// A path `a = p_0, …, p_k = b` with `p_{i-1} chain[i-1] p_i`, if one exists.
fn path_through(chain: &[Relation], a: usize, b: usize) -> Option<Vec<usize>> {
    let n = chain.first().map_or(0, Relation::n_rows);
    let mut layers = vec![crate::stateset::StateSet::from_indices(n, [a])];
    for r in chain {
        let last = layers.last().expect("nonempty");
        let next = last
            .iter()
            .fold(crate::stateset::StateSet::empty(r.n_cols()), |acc, u| {
                acc.union(r.image(u))
            });
        layers.push(next);
    }
    if !layers.last()?.contains(b) {
        return None;
    }
    let mut path = vec![b];
    let mut cur = b;
    for (r, layer) in chain.iter().zip(&layers).rev() {
        cur = layer.iter().find(|&u| r.contains(u, cur))?;
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

fn first_failure(m: &Model, c: &Condition, axiom: Axiom) -> Option<Violation> {
    let composed = c
        .lhs
        .iter()
        .skip(1)
        .fold(c.lhs[0].clone(), |acc, r| acc.compose(r));
    let (a, b) = composed.first_outside(&c.rhs)?;
    let path = path_through(&c.lhs, a, b).expect("pair lies in the composition");
    Some(Violation {
        axiom,
        condition: c.name.clone(),
        witness: path.into_iter().map(|i| m.state_name(i).to_string()).collect(),
    })
}

pub(super) fn strict_condensation_violation(m: &Model) -> Option<Violation> {
    condensation_conditions(m)
        .iter()
        .find_map(|c| first_failure(m, c, Axiom::StrictCondensation))
}

pub(super) fn validate(m: &Model) -> ValidationReport {
    let mut violations = Vec::new();
    let leq = m.leq();
    if let Some(x) = (0..m.len()).find(|&x| !leq.contains(x, x)) {
        violations.push(Violation {
            axiom: Axiom::Reflexivity,
            condition: "x ≤ x".into(),
            witness: vec![m.state_name(x).into()],
        });
    }
    let two_step = leq.compose(leq);
    if let Some((a, c)) = two_step.first_outside(leq) {
        let b = leq
            .image(a)
            .iter()
            .find(|&b| leq.contains(b, c))
            .expect("two-step pair has a midpoint");
        violations.push(Violation {
            axiom: Axiom::Transitivity,
            condition: "x ≤ y ≤ z implies x ≤ z".into(),
            witness: [a, b, c].iter().map(|&i| m.state_name(i).into()).collect(),
        });
    }
    for (p, set) in m.valuation() {
        let failure = set.iter().find_map(|x| {
            leq.image(x)
                .iter()
                .find(|&y| !set.contains(y))
                .map(|y| (x, y))
        });
        if let Some((x, y)) = failure {
            violations.push(Violation {
                axiom: Axiom::UpsetValuation,
                condition: format!("V({p}) is an upset"),
                witness: vec![p.clone(), m.state_name(x).into(), m.state_name(y).into()],
            });
        }
    }
    for c in coherence_conditions(m) {
        if let Some(v) = first_failure(m, &c, Axiom::Coherence) {
            violations.push(v);
        }
    }
    let condensation_witness = strict_condensation_violation(m);
    ValidationReport {
        flavor: m.flavor(),
        violations,
        strictly_condensed: condensation_witness.is_none(),
        condensation_witness,
    }
}
