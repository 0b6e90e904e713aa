//! Random models and formulas for property tests and the CLI.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::formula::{Formula, Fragment};
use crate::model::{Flavor, Model};
use crate::relation::Relation;
use crate::stateset::StateSet;

#[derive(Clone, Debug)]
pub struct ModelParams {
    pub states: usize,
    pub flavor: Flavor,
    /// Box relations (ignored for flavors with a fixed shape).
    pub boxes: usize,
    /// Diamond relations (ignored for flavors with a fixed shape).
    pub diamonds: usize,
    pub atoms: usize,
    /// Probability of an order edge `i ≤ j` for `i < j`; 0 gives the identity order.
    pub order_density: f64,
    pub relation_density: f64,
    /// Produce strictly condensed relations.
    pub condensed: bool,
}

impl ModelParams {
    pub fn new(flavor: Flavor, states: usize) -> ModelParams {
        let (boxes, diamonds) = match flavor {
            Flavor::Standard => (1, 1),
            Flavor::Fs | Flavor::H => (1, 0),
            Flavor::Gpt | Flavor::Tense => (1, 1),
            Flavor::Ek => (2, 0),
        };
        ModelParams {
            states,
            flavor,
            boxes,
            diamonds,
            atoms: 2,
            order_density: 0.3,
            relation_density: 0.2,
            condensed: true,
        }
    }

    pub fn boxes(mut self, n: usize) -> Self {
        self.boxes = n;
        self
    }

    pub fn diamonds(mut self, m: usize) -> Self {
        self.diamonds = m;
        self
    }

    pub fn atoms(mut self, k: usize) -> Self {
        self.atoms = k;
        self
    }

    pub fn order_density(mut self, d: f64) -> Self {
        self.order_density = d;
        self
    }

    pub fn relation_density(mut self, d: f64) -> Self {
        self.relation_density = d;
        self
    }

    pub fn condensed(mut self, c: bool) -> Self {
        self.condensed = c;
        self
    }
}

fn random_relation(rng: &mut impl Rng, n: usize, density: f64) -> Relation {
    let mut r = Relation::empty(n, n);
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(density) {
                r.insert(a, b);
            }
        }
    }
    r
}

/// A random preorder: forward edges with the given density, plus the odd
/// backward edge so that some states become order-equivalent.
fn random_preorder(rng: &mut impl Rng, n: usize, density: f64) -> Relation {
    let mut r = Relation::empty(n, n);
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                r.insert(a, b);
            }
            if density > 0.0 && rng.gen_bool(0.03) {
                r.insert(b, a);
            }
        }
    }
    r.closure(true)
}

fn state_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

/// A random model satisfying the coherence conditions of `p.flavor`.
pub fn random_model(rng: &mut impl Rng, p: &ModelParams) -> Model {
    let n = p.states;
    let leq = random_preorder(rng, n, p.order_density);
    let geq = leq.converse();
    let d = p.relation_density;
    // Absorbing the order on both sides yields strictly condensed relations.
    let both = |rng: &mut _, ord: &Relation| ord.compose(&random_relation(rng, n, d)).compose(ord);
    let (boxes, diamonds): (Vec<Relation>, Vec<Relation>) = match p.flavor {
        Flavor::Standard | Flavor::Ek => {
            let m = if p.flavor == Flavor::Ek { 0 } else { p.diamonds };
            let boxes = (0..p.boxes)
                .map(|_| {
                    if p.condensed {
                        both(rng, &leq)
                    } else {
                        leq.compose(&random_relation(rng, n, d))
                    }
                })
                .collect();
            let diamonds = (0..m)
                .map(|_| {
                    if p.condensed {
                        both(rng, &geq)
                    } else {
                        geq.compose(&random_relation(rng, n, d))
                    }
                })
                .collect();
            (boxes, diamonds)
        }
        Flavor::Gpt => {
            if p.condensed {
                (vec![both(rng, &leq)], vec![both(rng, &geq)])
            } else {
                let r = random_relation(rng, n, d).compose(&leq);
                let s = geq.compose(&random_relation(rng, n, d));
                (vec![r], vec![s])
            }
        }
        Flavor::Tense => (vec![both(rng, &leq)], vec![both(rng, &geq)]),
        Flavor::H => (vec![both(rng, &leq)], vec![]),
        Flavor::Fs => {
            // `≤∘R∘≤` already gives `R∘≤ ⊆ ≤∘R`; resample until `≥∘R ⊆ R∘≥`.
            let r = (0..64)
                .map(|_| both(rng, &leq))
                .find(|r| geq.compose(r).is_subset(&r.compose(&geq)))
                .unwrap_or_else(|| Relation::empty(n, n));
            (vec![r], vec![])
        }
    };
    let states = state_names(n);
    let mut valuation = BTreeMap::new();
    for k in 0..p.atoms {
        let seeds = StateSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.3)));
        let up = seeds
            .iter()
            .fold(StateSet::empty(n), |acc, x| acc.union(leq.image(x)));
        valuation.insert(atom_name(k), up);
    }
    Model::from_parts(states, &leq, boxes, diamonds, valuation, p.flavor)
        .expect("generated parts are well formed")
}

/// Two models drawn from `p` with a generator seeded by `seed`.
pub fn random_pair(seed: u64, p: &ModelParams) -> (Model, Model) {
    let mut rng = StdRng::seed_from_u64(seed);
    let m = random_model(&mut rng, p);
    let m2 = random_model(&mut rng, p);
    (m, m2)
}

/// `count` formulas from [`random_formula`] with a generator seeded by `seed`.
pub fn sample_formulas(seed: u64, frag: &Fragment, atoms: &[String], depth: usize, count: usize) -> Vec<Formula> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_formula(&mut rng, frag, atoms, depth)).collect()
}

/// Atom names used by [`random_model`]: `p`, `q`, `r`, then `p3`, `p4`, ….
pub fn atom_name(k: usize) -> String {
    match k {
        0 => "p".into(),
        1 => "q".into(),
        2 => "r".into(),
        _ => format!("p{k}"),
    }
}

/// A random formula of `frag` over `atoms` with [`Formula::depth`] at most `depth`.
pub fn random_formula(rng: &mut impl Rng, frag: &Fragment, atoms: &[String], depth: usize) -> Formula {
    let leaf = |rng: &mut dyn rand::RngCore| -> Formula {
        let k = rng.gen_range(0..atoms.len() + 2);
        match k {
            0 => Formula::Top,
            1 => Formula::Bot,
            _ => Formula::Atom(atoms[k - 2].clone()),
        }
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let mut choices: Vec<u8> = vec![0, 1];
    if frag.base.has_imp() {
        choices.push(2);
    }
    if frag.base.has_sub() {
        choices.push(3);
    }
    if frag.n_boxes > 0 {
        choices.push(4);
    }
    if frag.m_diamonds > 0 {
        choices.push(5);
    }
    if frag.tense && frag.n_boxes > 0 {
        choices.push(6);
    }
    if frag.tense && frag.m_diamonds > 0 {
        choices.push(7);
    }
    if frag.common {
        choices.push(8);
    }
    let d = depth - 1;
    let sub = |rng: &mut _| random_formula(rng, frag, atoms, d);
    match choices[rng.gen_range(0..choices.len())] {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::imp(sub(rng), sub(rng)),
        3 => Formula::sub(sub(rng), sub(rng)),
        4 => {
            let i = rng.gen_range(1..=frag.n_boxes);
            Formula::boxed(i, sub(rng))
        }
        5 => {
            let j = rng.gen_range(1..=frag.m_diamonds);
            Formula::dia(j, sub(rng))
        }
        6 => {
            let i = rng.gen_range(1..=frag.n_boxes);
            Formula::tdia(i, sub(rng))
        }
        7 => {
            let j = rng.gen_range(1..=frag.m_diamonds);
            Formula::tbox(j, sub(rng))
        }
        _ => Formula::common(sub(rng)),
    }
}
