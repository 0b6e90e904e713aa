//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. All tolerances are exact (0 failures).

use std::process::ExitCode;
use std::time::Instant;

use hmkripke::bisim::{bisimilarity_partition, conditions_for, greatest_bisimulation, is_bisimulation};
use hmkripke::distinguish::{bounded_equivalence_oracle, hennessy_milner_check, synthesize, verify_witnesses};
use hmkripke::gen::{atom_name, random_formula, random_model, ModelParams};
use hmkripke::genframe::{all_upsets, descriptive_box_check};
use hmkripke::model::build_example;
use hmkripke::semantics::{eval, left_converse};
use hmkripke::{Base, Flavor, Formula, Fragment, Model, Relation, StateSet};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn atoms(m: &Model) -> Vec<String> {
    m.valuation().keys().cloned().collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fig3() -> Outcome {
    let m = build_example("fig3_M", &[]).unwrap();
    let plus = build_example("fig3_Mplus", &[]).unwrap();
    let frag = Fragment::new(Base::Int, 1, 0);
    let c = conditions_for(&frag, Flavor::Standard).map_err(|e| e.to_string())?;
    let (b, _) = greatest_bisimulation(&m, &plus, &c).map_err(|e| e.to_string())?;
    ensure(!b.contains(0, 0), || "(x, x') is bisimilar".into())?;
    let o = bounded_equivalence_oracle(&m, &plus, &frag, None).map_err(|e| e.to_string())?;
    ensure(o.saturated, || "oracle did not saturate".into())?;
    ensure(o.relation == Relation::identity(3), || format!("oracle relation {:?}", o.relation.pairs().collect::<Vec<_>>()))?;
    Ok(format!("bisimulation excludes (x,x'); oracle saturated at size {} is the identity", o.explored_size))
}

fn agree_on_formulas(
    rng: &mut StdRng,
    m: &Model,
    m2: &Model,
    frag: &Fragment,
    count: usize,
    depth: usize,
) -> Result<(), String> {
    let atoms = atoms(m);
    for _ in 0..count {
        let f = random_formula(rng, frag, &atoms, depth);
        let (a, b) = (eval(&f, m).unwrap(), eval(&f, m2).unwrap());
        ensure(a == b, || format!("`{f}` differs: {:?} vs {:?}", m.names(&a), m2.names(&b)))?;
    }
    Ok(())
}

fn strictification() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let cases = [
        (Flavor::Standard, Fragment::new(Base::BiInt, 1, 1)),
        (Flavor::Gpt, Fragment::new(Base::BiInt, 1, 1).with_tense()),
    ];
    for (flavor, frag) in cases {
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let p = ModelParams::new(flavor, n).atoms(3).condensed(false);
            let m = random_model(&mut rng, &p);
            let plus = m.strictify().map_err(|e| e.to_string())?;
            ensure(plus.is_strictly_condensed(), || format!("{flavor} strictification not condensed"))?;
            agree_on_formulas(&mut rng, &m, &plus, &frag, 50, 3).map_err(|e| format!("{flavor}: {e}"))?;
        }
    }
    Ok("400 models x 50 formulas, 0 failures (standard and GPT)".into())
}

fn duality() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    for k in 0..200 {
        let (flavor, frag) = if k % 2 == 0 {
            (Flavor::Standard, Fragment::new(Base::BiInt, 1, 1))
        } else {
            (Flavor::Tense, Fragment::new(Base::BiInt, 1, 1).with_tense())
        };
        let n = rng.gen_range(1..=7);
        let m = random_model(&mut rng, &ModelParams::new(flavor, n).atoms(3).condensed(k % 4 < 2));
        let d = m.dualize().map_err(|e| e.to_string())?;
        let atoms = atoms(&m);
        for _ in 0..50 {
            let f = random_formula(&mut rng, &frag, &atoms, 3);
            let t = f.translate().map_err(|e| e.to_string())?;
            let lhs = eval(&f, &m).unwrap();
            let rhs = eval(&t, &d).unwrap().complement();
            ensure(lhs == rhs, || format!("{flavor}: `{f}` vs dual `{t}`"))?;
        }
    }
    let frag = Fragment::new(Base::BiInt, 2, 2).with_tense();
    let atoms: Vec<String> = (0..3).map(atom_name).collect();
    for _ in 0..1000 {
        let f = random_formula(&mut rng, &frag, &atoms, 4);
        let tt = f.translate().and_then(|t| t.translate()).map_err(|e| e.to_string())?;
        ensure(tt == f, || format!("translate twice changed `{f}` to `{tt}`"))?;
    }
    Ok("200 models x 50 formulas; 1000 double translations, 0 failures".into())
}

struct HmCase {
    label: &'static str,
    flavor: Flavor,
    frag: Fragment,
    states: (usize, usize),
}

fn hm_cases() -> Vec<HmCase> {
    vec![
        HmCase {
            label: "Int_{1,0}",
            flavor: Flavor::Standard,
            frag: Fragment::new(Base::Int, 1, 0),
            states: (2, 6),
        },
        HmCase {
            label: "IntDual_{0,1}",
            flavor: Flavor::Standard,
            frag: Fragment::new(Base::IntDual, 0, 1),
            states: (2, 6),
        },
        HmCase {
            label: "BiInt_{1,1}",
            flavor: Flavor::Standard,
            frag: Fragment::new(Base::BiInt, 1, 1),
            states: (2, 5),
        },
        HmCase {
            label: "BiInt tense",
            flavor: Flavor::Tense,
            frag: Fragment::new(Base::BiInt, 1, 1).with_tense(),
            states: (2, 5),
        },
        HmCase {
            label: "H",
            flavor: Flavor::H,
            frag: Fragment::new(Base::BiInt, 1, 1).with_tense(),
            states: (2, 5),
        },
        HmCase {
            label: "EK(n=2)",
            flavor: Flavor::Ek,
            frag: Fragment::new(Base::Int, 2, 0).with_common(),
            states: (2, 5),
        },
    ]
}

fn hm_pair(rng: &mut StdRng, case: &HmCase) -> (Model, Model) {
    let params = |rng: &mut StdRng| {
        let n = rng.gen_range(case.states.0..=case.states.1);
        let p = ModelParams::new(case.flavor, n).atoms(rng.gen_range(1..=2));
        match case.frag.base {
            Base::Int => p.boxes(case.frag.n_boxes).diamonds(0),
            Base::IntDual => p.boxes(0).diamonds(case.frag.m_diamonds),
            Base::BiInt => p,
        }
    };
    let p = params(rng);
    let m = random_model(rng, &p);
    let m2 = if rng.gen_bool(0.4) {
        m.clone()
    } else {
        let p2 = params(rng);
        random_model(rng, &p2)
    };
    (m, m2)
}

fn hennessy_milner() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut summary = Vec::new();
    for case in hm_cases() {
        let (mut pairs, mut witnesses) = (0, 0);
        for _ in 0..100 {
            let (m, m2) = hm_pair(&mut rng, &case);
            let r = hennessy_milner_check(&m, &m2, &case.frag, None).map_err(|e| format!("{}: {e}", case.label))?;
            ensure(r.pass, || format!("{}: {r:?}\nleft {m:?}\nright {m2:?}", case.label))?;
            pairs += 1;
            witnesses += r.witnesses;
        }
        summary.push(format!("{} {pairs} pairs/{witnesses} witnesses", case.label));
    }
    Ok(summary.join("; "))
}

fn soundness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut checked = 0;
    for case in hm_cases() {
        for _ in 0..30 {
            let (m, m2) = hm_pair(&mut rng, &case);
            let c = conditions_for(&case.frag, case.flavor).map_err(|e| e.to_string())?;
            let (b, _) = greatest_bisimulation(&m, &m2, &c).map_err(|e| e.to_string())?;
            let atoms = atoms(&m);
            for (x, x2) in b.pairs() {
                for _ in 0..100 {
                    let f = random_formula(&mut rng, &case.frag, &atoms, 4);
                    let l = eval(&f, &m).unwrap().contains(x);
                    let r = eval(&f, &m2).unwrap().contains(x2);
                    ensure(l == r, || format!("{}: `{f}` separates bisimilar ({x},{x2})", case.label))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} bisimilar pairs x 100 formulas, 0 failures"))
}

fn boxes_bot(k: usize) -> Formula {
    (0..k).fold(Formula::Bot, |f, _| Formula::boxed(1, f))
}

fn counterexample_families() -> Outcome {
    let frag = Fragment::new(Base::Int, 1, 0);
    for k in 1..=4i64 {
        let s = build_example("spines", &[k]).unwrap();
        let s2 = build_example("spines", &[k + 1]).unwrap();
        let syn = synthesize(&s, &s2, &frag).map_err(|e| e.to_string())?;
        ensure(!syn.fixpoint.contains(0, 0), || format!("spines({k}) roots bisimilar"))?;
        let w = &syn.witnesses[&(0, 0)];
        ensure(verify_witnesses([w], &s, &s2), || format!("spines({k}) witness `{}` fails", w.formula))?;
        let d = w.formula.layer_depth();
        ensure(d <= k as usize + 1, || format!("spines({k}) witness `{}` has depth {d}", w.formula))?;
        let reference = boxes_bot(k as usize + 1);
        let (l, r) = (eval(&reference, &s).unwrap(), eval(&reference, &s2).unwrap());
        ensure(l.contains(0) && !r.contains(0), || format!("`{reference}` does not separate spines({k})"))?;
    }
    for n in 2..=4i64 {
        let w = build_example("porcupine_W", &[n]).unwrap();
        let wp = build_example("porcupine_Wprime", &[n]).unwrap();
        let frag = Fragment::new(Base::BiInt, 0, 0);
        let syn = synthesize(&w, &wp, &frag).map_err(|e| e.to_string())?;
        ensure(!syn.fixpoint.contains(0, 0), || format!("porcupine({n}) roots bisimilar"))?;
        ensure(verify_witnesses(syn.witnesses.values(), &w, &wp), || format!("porcupine({n}) witnesses fail"))?;
        ensure(syn.witnesses.contains_key(&(0, 0)), || format!("porcupine({n}) root witness missing"))?;
    }
    Ok("spines k=1..4 and porcupines N=2..4 separated by verified witnesses".into())
}

fn quotient() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let flavors = [
        (Flavor::Standard, Fragment::new(Base::BiInt, 1, 1)),
        (Flavor::Tense, Fragment::new(Base::BiInt, 1, 1).with_tense()),
        (Flavor::Ek, Fragment::new(Base::Int, 2, 0)),
    ];
    let mut shrunk = 0;
    for k in 0..100 {
        let (flavor, frag) = flavors[k % flavors.len()];
        let n = rng.gen_range(1..=8);
        let m = random_model(&mut rng, &ModelParams::new(flavor, n).atoms(1).relation_density(0.15));
        let c = conditions_for(&frag, flavor).map_err(|e| e.to_string())?;
        let part = bisimilarity_partition(&m, &c).map_err(|e| e.to_string())?;
        let (q, _) = m.quotient(&part).map_err(|e| e.to_string())?;
        let bad = is_bisimulation(&part.quotient_map(), &m, &q, &c).map_err(|e| e.to_string())?;
        ensure(bad.is_empty(), || format!("quotient map is not a bisimulation: {:?}", bad[0]))?;
        let part2 = bisimilarity_partition(&q, &c).map_err(|e| e.to_string())?;
        ensure(part2.is_discrete(), || "quotient has bisimilar states".into())?;
        let (q2, _) = q.quotient(&part2).map_err(|e| e.to_string())?;
        ensure(q2 == q, || "second quotient differs".into())?;
        shrunk += usize::from(q.len() < m.len());
    }
    Ok(format!("100 models ({shrunk} shrank), quotient maps are bisimulations, quotient idempotent"))
}

/// Classical bisimilarity by plain refinement over adjacency lists.
fn naive_classical(m: &Model, m2: &Model) -> Vec<Vec<bool>> {
    let succ = |m: &Model| -> Vec<Vec<usize>> {
        (0..m.len())
            .map(|x| (0..m.len()).filter(|&y| m.boxes()[0].contains(x, y)).collect())
            .collect()
    };
    let (s1, s2) = (succ(m), succ(m2));
    let names: Vec<&String> = m.valuation().keys().chain(m2.valuation().keys()).collect();
    let mut z: Vec<Vec<bool>> = (0..m.len())
        .map(|x| {
            (0..m2.len())
                .map(|y| names.iter().all(|p| m.atom(p).contains(x) == m2.atom(p).contains(y)))
                .collect()
        })
        .collect();
    loop {
        let mut changed = false;
        for x in 0..m.len() {
            for y in 0..m2.len() {
                if !z[x][y] {
                    continue;
                }
                let forth = s1[x].iter().all(|&a| s2[y].iter().any(|&b| z[a][b]));
                let back = s2[y].iter().all(|&b| s1[x].iter().any(|&a| z[a][b]));
                if !(forth && back) {
                    z[x][y] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return z;
        }
    }
}

fn classical() -> Outcome {
    let mut rng = StdRng::seed_from_u64(8);
    let frag = Fragment::new(Base::Int, 1, 0);
    let c = conditions_for(&frag, Flavor::Standard).map_err(|e| e.to_string())?;
    let params = |rng: &mut StdRng| {
        ModelParams::new(Flavor::Standard, rng.gen_range(1..=8))
            .diamonds(0)
            .order_density(0.0)
            .atoms(1)
            .relation_density(0.25)
    };
    let mut related = 0;
    for _ in 0..100 {
        let (p, p2) = (params(&mut rng), params(&mut rng));
        let (m, m2) = (random_model(&mut rng, &p), random_model(&mut rng, &p2));
        let (b, _) = greatest_bisimulation(&m, &m2, &c).map_err(|e| e.to_string())?;
        let z = naive_classical(&m, &m2);
        for x in 0..m.len() {
            for y in 0..m2.len() {
                ensure(b.contains(x, y) == z[x][y], || format!("disagree at ({x},{y})"))?;
                related += usize::from(z[x][y]);
            }
        }
    }
    Ok(format!("100 identity-order pairs agree ({related} related pairs)"))
}

fn ek_and_h() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let frag = Fragment::new(Base::Int, 2, 0).with_common();
    for k in 0..50 {
        let n = rng.gen_range(1..=7);
        let m = random_model(&mut rng, &ModelParams::new(Flavor::Ek, n).condensed(k % 2 == 0));
        let atoms = atoms(&m);
        for _ in 0..20 {
            let f = random_formula(&mut rng, &frag, &atoms, 3);
            let cf = Formula::common(f.clone());
            let inner = Formula::and(f.clone(), cf.clone());
            let unfolded = Formula::and(Formula::boxed(1, inner.clone()), Formula::boxed(2, inner));
            ensure(eval(&cf, &m).unwrap() == eval(&unfolded, &m).unwrap(), || format!("C unfolding fails for `{f}`"))?;
        }
    }
    let frag = Fragment::new(Base::BiInt, 1, 1).with_tense();
    for _ in 0..50 {
        let n = rng.gen_range(1..=7);
        let m = random_model(&mut rng, &ModelParams::new(Flavor::H, n));
        let (leq, r) = (m.leq(), &m.boxes()[0]);
        // y S x  iff  y ≥ a R b ≥ x, spelled out without relation algebra.
        let s_rel = |x: usize, y: usize| {
            (0..n).any(|a| leq.contains(a, x) && (0..n).any(|b| r.contains(a, b) && leq.contains(y, b)))
        };
        ensure(
            (0..n).all(|x| (0..n).all(|y| s_rel(x, y) == left_converse(r, &m).contains(x, y))),
            || "left converse differs from the triple loop".into(),
        )?;
        let atoms = atoms(&m);
        for _ in 0..20 {
            let f = random_formula(&mut rng, &frag, &atoms, 3);
            let a = eval(&f, &m).unwrap();
            let dia = StateSet::from_indices(n, (0..n).filter(|&x| (0..n).any(|y| s_rel(x, y) && a.contains(y))));
            let tbox = StateSet::from_indices(n, (0..n).filter(|&x| (0..n).all(|y| !s_rel(y, x) || a.contains(y))));
            ensure(eval(&Formula::dia(1, f.clone()), &m).unwrap() == dia, || format!("<>1 ({f}) mismatch"))?;
            ensure(eval(&Formula::tbox(1, f.clone()), &m).unwrap() == tbox, || format!("|>1 ({f}) mismatch"))?;
        }
    }
    Ok("C unfolding on 50 EK models x 20 formulas; left-converse clauses on 50 H models".into())
}

fn descriptive() -> Outcome {
    let m = build_example("fig3_M", &[]).unwrap();
    let v = descriptive_box_check(&m, &all_upsets(&m).unwrap()).map_err(|e| e.to_string())?;
    let names = v.counterexample.map(|(a, b)| (m.state_name(a).to_string(), m.state_name(b).to_string()));
    ensure(!v.holds && names == Some(("x".into(), "z".into())), || format!("fig3_M verdict {v:?}"))?;
    let plus = build_example("fig3_Mplus", &[]).unwrap();
    let v = descriptive_box_check(&plus, &all_upsets(&plus).unwrap()).map_err(|e| e.to_string())?;
    ensure(v.holds && v.counterexample.is_none(), || format!("fig3_Mplus verdict {v:?}"))?;
    Ok("fig3_M fails at (x,z); fig3_Mplus holds".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("fig3 reproduction", fig3),
        ("strictification preserves truth", strictification),
        ("duality", duality),
        ("Hennessy-Milner at finite scale", hennessy_milner),
        ("soundness sampling", soundness),
        ("counterexample families", counterexample_families),
        ("quotient", quotient),
        ("classical reduction", classical),
        ("common knowledge and left converse", ek_and_h),
        ("descriptive condition", descriptive),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
