use hmkripke::bisim::{conditions_for, greatest_bisimulation, is_bisimulation};
use hmkripke::gen::{atom_name, random_formula, random_model, ModelParams};
use hmkripke::genframe::{close_algebra, fragment_ops, is_general_model};
use hmkripke::semantics::eval;
use hmkripke::{Base, Flavor, Formula, Fragment, Model};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const FLAVORS: [(Flavor, fn() -> Fragment); 6] = [
    (Flavor::Standard, || Fragment::new(Base::BiInt, 1, 1)),
    (Flavor::Fs, || Fragment::new(Base::BiInt, 1, 1)),
    (Flavor::Gpt, || Fragment::new(Base::BiInt, 1, 1).with_tense()),
    (Flavor::Tense, || Fragment::new(Base::BiInt, 1, 1).with_tense()),
    (Flavor::H, || Fragment::new(Base::BiInt, 1, 1).with_tense()),
    (Flavor::Ek, || Fragment::new(Base::BiInt, 2, 0).with_common()),
];

fn atoms() -> Vec<String> {
    (0..2).map(atom_name).collect()
}

fn model(seed: u64, flavor: Flavor, condensed: bool) -> Model {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=6);
    random_model(&mut rng, &ModelParams::new(flavor, n).condensed(condensed))
}

fn formula(seed: u64, frag: &Fragment, depth: usize) -> Formula {
    random_formula(&mut StdRng::seed_from_u64(seed), frag, &atoms(), depth)
}

fn any_fragment() -> impl Strategy<Value = Fragment> {
    (0..3usize, 0..3usize, 0..3usize, any::<bool>()).prop_map(|(b, n, m, t)| {
        let base = [Base::Int, Base::IntDual, Base::BiInt][b];
        let f = Fragment::new(base, n, m);
        if t {
            Fragment::new(Base::BiInt, n, m).with_tense()
        } else {
            f
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), frag in any_fragment()) {
        let f = formula(seed, &frag, 5);
        let text = f.to_string();
        prop_assert_eq!(Formula::parse(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn translation_is_an_involution_swapping_fragments(seed in any::<u64>(), n in 0..3usize, m in 0..3usize, b in 0..2usize) {
        let base = [Base::Int, Base::IntDual][b];
        let frag = Fragment::new(base, n, m);
        let f = formula(seed, &frag, 4);
        let t = f.translate().unwrap();
        prop_assert!(frag.dual().admits(&t), "{} -> {}", f, t);
        prop_assert_eq!(t.translate().unwrap(), f);
    }

    #[test]
    fn truth_sets_are_upsets(seed in any::<u64>(), k in 0..6usize, condensed in any::<bool>()) {
        let (flavor, frag) = (FLAVORS[k].0, FLAVORS[k].1());
        let m = model(seed, flavor, condensed || matches!(flavor, Flavor::Fs | Flavor::Tense | Flavor::H));
        let f = formula(seed ^ 1, &frag, 4);
        let a = eval(&f, &m).unwrap();
        prop_assert!(m.is_upset(&a), "{} on {:?}", f, m);
    }

    #[test]
    fn fixpoint_is_a_maximal_bisimulation(seed in any::<u64>(), k in 0..6usize) {
        let (flavor, frag) = (FLAVORS[k].0, FLAVORS[k].1());
        let frag = if flavor == Flavor::Ek { Fragment::new(Base::Int, 2, 0) } else { frag };
        let (m, m2) = (model(seed, flavor, true), model(seed ^ 7, flavor, true));
        let c = conditions_for(&frag, flavor).unwrap();
        let (b, trace) = greatest_bisimulation(&m, &m2, &c).unwrap();
        prop_assert!(is_bisimulation(&b, &m, &m2, &c).unwrap().is_empty());
        for r in trace.removals() {
            let mut bigger = b.clone();
            bigger.insert(r.pair.0, r.pair.1);
            prop_assert!(!is_bisimulation(&bigger, &m, &m2, &c).unwrap().is_empty());
        }
    }

    #[test]
    fn self_bisimilarity_is_an_equivalence(seed in any::<u64>(), k in 0..5usize) {
        let (flavor, frag) = (FLAVORS[k].0, FLAVORS[k].1());
        let m = model(seed, flavor, true);
        let c = conditions_for(&frag, flavor).unwrap();
        let (b, _) = greatest_bisimulation(&m, &m, &c).unwrap();
        prop_assert!(b.is_reflexive() && b.is_symmetric() && b.is_transitive());
    }

    #[test]
    fn intuitionistic_connectives_are_monotone(seed in any::<u64>()) {
        // Growing the valuation grows the truth set of a positive formula.
        let m = model(seed, Flavor::Standard, true);
        let frag = Fragment::new(Base::Int, 1, 0);
        let mut rng = StdRng::seed_from_u64(seed ^ 3);
        let f = positive(&mut rng, 3);
        let g = Formula::or(Formula::Atom("p".into()), Formula::Atom("q".into()));
        let bigger = m.enrich_valuation(&[("p2".into(), g)]).unwrap();
        let swapped = substitute(&f, "p", &Formula::Atom("p2".into()));
        prop_assert!(frag.admits(&f));
        prop_assert!(eval(&f, &m).unwrap().is_subset(&eval(&swapped, &bigger).unwrap()));
    }

    #[test]
    fn closure_is_idempotent_and_monotone(seed in any::<u64>(), k in 0..6usize) {
        let (flavor, frag) = (FLAVORS[k].0, FLAVORS[k].1());
        let m = model(seed, flavor, true);
        let ops = fragment_ops(&frag);
        let small: Vec<_> = m.valuation().values().take(1).cloned().collect();
        let large: Vec<_> = m.valuation().values().cloned().collect();
        let a = close_algebra(&small, &ops, &m).unwrap();
        let b = close_algebra(&large, &ops, &m).unwrap();
        let again: Vec<_> = a.sets().iter().cloned().collect();
        let twice = close_algebra(&again, &ops, &m).unwrap();
        prop_assert_eq!(twice.sets(), a.sets());
        prop_assert!(a.sets().is_subset(b.sets()));
        prop_assert!(is_general_model(&m, &b, &frag));
    }

    #[test]
    fn truth_sets_lie_in_the_generated_algebra(seed in any::<u64>(), k in 0..6usize) {
        let (flavor, frag) = (FLAVORS[k].0, FLAVORS[k].1());
        let m = model(seed, flavor, true);
        let gens: Vec<_> = m.valuation().values().cloned().collect();
        let a = close_algebra(&gens, &fragment_ops(&frag), &m).unwrap();
        for i in 0..10 {
            let f = formula(seed.wrapping_add(i), &frag, 3);
            prop_assert!(a.contains(&eval(&f, &m).unwrap()), "{}", f);
        }
    }
}

/// Random formula built from atoms, `∧`, `∨` and `□1` only.
fn positive(rng: &mut StdRng, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return Formula::Atom(atom_name(rng.gen_range(0..2)));
    }
    match rng.gen_range(0..3) {
        0 => Formula::and(positive(rng, depth - 1), positive(rng, depth - 1)),
        1 => Formula::or(positive(rng, depth - 1), positive(rng, depth - 1)),
        _ => Formula::boxed(1, positive(rng, depth - 1)),
    }
}

fn substitute(f: &Formula, p: &str, by: &Formula) -> Formula {
    match f {
        Formula::Atom(q) if q == p => by.clone(),
        Formula::And(a, b) => Formula::and(substitute(a, p, by), substitute(b, p, by)),
        Formula::Or(a, b) => Formula::or(substitute(a, p, by), substitute(b, p, by)),
        Formula::Box(i, a) => Formula::boxed(*i, substitute(a, p, by)),
        other => other.clone(),
    }
}
