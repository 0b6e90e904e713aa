use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use hmkripke::bisim::{bisimilarity_partition, conditions_for, greatest_bisimulation};
use hmkripke::distinguish::{bounded_equivalence_oracle, hennessy_milner_check, synthesize, verify_witnesses};
use hmkripke::gen::{random_pair, sample_formulas, ModelParams};
use hmkripke::genframe::{all_upsets, close_algebra, descriptive_box_check, fragment_ops, is_general_model, SetAlgebra};
use hmkripke::model::build_example;
use hmkripke::semantics::eval;
use hmkripke::{Base, Flavor, Formula, Fragment, Model, Relation};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hmk", version, about = "Bisimulations and distinguishing formulas for finite intuitionistic Kripke models")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Check the order, valuation and flavor coherence conditions
    Validate(Opts),
    /// Truth set of a formula
    Eval(Opts),
    /// Greatest bisimulation between two models, with removal reasons
    Bisim(Opts),
    /// Distinguishing formulas for every non-bisimilar pair, verified by evaluation
    Equiv(Opts),
    /// Logical equivalence by enumerating formulas up to a size budget
    Oracle(Opts),
    /// Compare bisimilarity with logical equivalence; exits 1 on FAIL
    HmCheck(Opts),
    /// Collapse bisimilar states
    Quotient(Opts),
    /// Make the modal relations absorb the order
    Strictify(Opts),
    /// Order-dual model
    Dualize(Opts),
    /// Dual translation of a formula
    Translate(Opts),
    /// Close a family of upsets under the fragment's operations
    Closure(Opts),
    /// Check that the box relation is determined by an algebra of upsets
    DescriptiveCheck(Opts),
    /// Print a built-in example model
    Example(ExampleOpts),
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    left: Option<PathBuf>,
    #[arg(long)]
    right: Option<PathBuf>,
    #[arg(long)]
    formula: Option<String>,
    /// int, intdual or biint (default biint)
    #[arg(long)]
    fragment: Option<Base>,
    #[arg(long)]
    boxes: Option<usize>,
    #[arg(long)]
    diamonds: Option<usize>,
    /// Override the flavor stored in the model files
    #[arg(long)]
    flavor: Option<Flavor>,
    #[arg(long)]
    tense: bool,
    /// Admit the common-knowledge modality (ek models)
    #[arg(long)]
    common: bool,
    /// Largest formula size the oracle enumerates
    #[arg(long)]
    budget: Option<usize>,
    /// With --seed, also check 100 sampled formulas of this depth on every bisimilar pair
    #[arg(long)]
    depth: Option<usize>,
    /// Draw a random model pair instead of reading --left/--right
    #[arg(long)]
    seed: Option<u64>,
    /// States per random model
    #[arg(long, default_value_t = 4)]
    states: usize,
    /// JSON list of state-name lists
    #[arg(long)]
    algebra: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExampleOpts {
    #[arg(long)]
    name: String,
    /// Size parameter, e.g. `spines 3`
    params: Vec<i64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = Result<(Value, bool), Failure>;

fn usage(msg: &str) -> Failure {
    Failure::Usage(msg.to_string())
}

fn read_model(path: &Path, flavor: Option<Flavor>) -> Result<Model, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Domain(format!("cannot read {}: {e}", path.display())))?;
    let m = Model::from_json(&text).map_err(|e| Failure::Domain(format!("invalid model {}: {e}", path.display())))?;
    match flavor {
        Some(f) => Ok(m.with_flavor(f)?),
        None => Ok(m),
    }
}

impl Opts {
    fn model(&self) -> Result<Model, Failure> {
        let path = self.model.as_ref().ok_or_else(|| usage("--model is required"))?;
        read_model(path, self.flavor)
    }

    fn pair(&self) -> Result<(Model, Model), Failure> {
        let left = self.left.as_ref().ok_or_else(|| usage("--left is required"))?;
        let right = self.right.as_ref().ok_or_else(|| usage("--right is required"))?;
        Ok((read_model(left, self.flavor)?, read_model(right, self.flavor)?))
    }

    fn formula(&self) -> Result<Formula, Failure> {
        let text = self.formula.as_ref().ok_or_else(|| usage("--formula is required"))?;
        Ok(Formula::parse(text)?)
    }

    /// The fragment from the flags; unspecified counts follow `m`'s signature.
    fn fragment(&self, m: &Model) -> Result<Fragment, Failure> {
        let base = self.fragment.unwrap_or(Base::BiInt);
        let n = self.boxes.unwrap_or(m.boxes().len());
        let default_m = match base {
            Base::Int => 0,
            _ => m.diamonds().len(),
        };
        let mut frag = Fragment::new(base, n, self.diamonds.unwrap_or(default_m));
        if self.tense {
            frag = frag.with_tense();
        }
        if self.common {
            frag = frag.with_common();
        }
        frag.check()?;
        Ok(frag)
    }

    fn algebra(&self, m: &Model) -> Result<Option<SetAlgebra>, Failure> {
        let Some(path) = &self.algebra else {
            return Ok(None);
        };
        let text = fs::read_to_string(path).map_err(|e| Failure::Domain(format!("cannot read {}: {e}", path.display())))?;
        Ok(Some(SetAlgebra::from_json(m, &text)?))
    }
}

fn pairs(r: &Relation, m: &Model, m2: &Model) -> Value {
    let mut v: Vec<(String, String)> = r
        .pairs()
        .map(|(a, b)| (m.state_name(a).to_string(), m2.state_name(b).to_string()))
        .collect();
    v.sort();
    json!(v)
}

fn model_json(m: &Model) -> Result<Value, Failure> {
    Ok(serde_json::from_str(&m.to_json())?)
}

fn validate(o: &Opts) -> Outcome {
    let m = o.model()?;
    Ok((serde_json::to_value(m.validate())?, true))
}

fn eval_verb(o: &Opts) -> Outcome {
    let m = o.model()?;
    let f = o.formula()?;
    let set = eval(&f, &m)?;
    Ok((json!({ "truth_set": m.names(&set) }), true))
}

fn bisim(o: &Opts) -> Outcome {
    let (m, m2) = o.pair()?;
    let frag = o.fragment(&m)?;
    let c = conditions_for(&frag, m.flavor())?;
    let (b, trace) = greatest_bisimulation(&m, &m2, &c)?;
    let removed: Vec<Value> = trace
        .removals()
        .iter()
        .map(|r| {
            json!({
                "pair": [m.state_name(r.pair.0), m2.state_name(r.pair.1)],
                "stage": r.stage,
                "clause": r.violation.clause,
            })
        })
        .collect();
    Ok((
        json!({
            "fragment": frag.to_string(),
            "conditions": c.to_string(),
            "fixpoint": pairs(&b, &m, &m2),
            "rounds": trace.rounds(),
            "removed": removed,
        }),
        true,
    ))
}

fn equiv(o: &Opts) -> Outcome {
    let (m, m2) = o.pair()?;
    let frag = o.fragment(&m)?;
    let syn = synthesize(&m, &m2, &frag)?;
    let verified = verify_witnesses(syn.witnesses.values(), &m, &m2);
    let mut witnesses: Vec<_> = syn.witnesses.values().map(|w| w.record(&m, &m2)).collect();
    witnesses.sort_by(|a, b| a.pair.cmp(&b.pair));
    Ok((
        json!({
            "fragment": frag.to_string(),
            "conditions": syn.conditions.to_string(),
            "fixpoint": pairs(&syn.fixpoint, &m, &m2),
            "witnesses": witnesses,
            "verified": verified,
        }),
        true,
    ))
}

fn oracle(o: &Opts) -> Outcome {
    let (m, m2) = o.pair()?;
    let frag = o.fragment(&m)?;
    let r = bounded_equivalence_oracle(&m, &m2, &frag, o.budget)?;
    let mut separators: Vec<_> = Relation::full(m.len(), m2.len())
        .pairs()
        .filter(|&(a, b)| !r.relation.contains(a, b))
        .map(|p| {
            let f = r.separator(p).map(|f| f.to_string());
            (m.state_name(p.0).to_string(), m2.state_name(p.1).to_string(), f)
        })
        .collect();
    separators.sort();
    let separators: Vec<Value> = separators
        .into_iter()
        .map(|(a, b, f)| json!({ "pair": [a, b], "formula": f }))
        .collect();
    Ok((
        json!({
            "fragment": frag.to_string(),
            "relation": pairs(&r.relation, &m, &m2),
            "saturated": r.saturated,
            "explored_size": r.explored_size,
            "classes": r.classes(),
            "separators": separators,
        }),
        true,
    ))
}

fn hm_check(o: &Opts) -> Outcome {
    let (m, m2, generated) = match o.seed {
        Some(seed) => {
            let flavor = o.flavor.unwrap_or_default();
            let frag_hint = Fragment::new(
                o.fragment.unwrap_or(Base::BiInt),
                o.boxes.unwrap_or(1),
                o.diamonds.unwrap_or(0),
            );
            let params = ModelParams::new(flavor, o.states)
                .boxes(frag_hint.n_boxes)
                .diamonds(frag_hint.m_diamonds);
            let (m, m2) = random_pair(seed, &params);
            (m, m2, true)
        }
        None => {
            let (m, m2) = o.pair()?;
            (m, m2, false)
        }
    };
    let frag = o.fragment(&m)?;
    let r = hennessy_milner_check(&m, &m2, &frag, o.budget)?;
    let sep: Vec<Value> = r
        .bisimilar_not_equivalent
        .iter()
        .map(|(p, f)| json!({ "pair": [m.state_name(p.0), m2.state_name(p.1)], "formula": f.to_string() }))
        .collect();
    let mut pass = r.pass;
    let mut sampled = Value::Null;
    if let (Some(seed), Some(depth)) = (o.seed, o.depth) {
        let atoms: Vec<String> = m.valuation().keys().cloned().collect();
        let mut disagreements = Vec::new();
        for f in sample_formulas(seed, &frag, &atoms, depth, 100) {
            let (l, rr) = (eval(&f, &m)?, eval(&f, &m2)?);
            if let Some((a, b)) = r.fixpoint.pairs().find(|&(a, b)| l.contains(a) != rr.contains(b)) {
                disagreements.push(json!({ "pair": [m.state_name(a), m2.state_name(b)], "formula": f.to_string() }));
            }
        }
        pass &= disagreements.is_empty();
        sampled = json!({ "formulas": 100, "depth": depth, "disagreements": disagreements });
    }
    let mut out = json!({
        "verdict": if pass { "PASS" } else { "FAIL" },
        "fragment": frag.to_string(),
        "fixpoint": pairs(&r.fixpoint, &m, &m2),
        "witnesses": r.witnesses,
        "witnesses_verified": r.witnesses_verified,
        "missing_witnesses": r.missing_witnesses.iter().map(|&(a, b)| [m.state_name(a), m2.state_name(b)]).collect::<Vec<_>>(),
        "oracle_saturated": r.oracle_saturated,
        "equivalent_not_bisimilar": r.equivalent_not_bisimilar.iter().map(|&(a, b)| [m.state_name(a), m2.state_name(b)]).collect::<Vec<_>>(),
        "bisimilar_not_equivalent": sep,
        "sampled": sampled,
    });
    if generated {
        out["left"] = model_json(&m)?;
        out["right"] = model_json(&m2)?;
    }
    Ok((out, pass))
}

fn quotient(o: &Opts) -> Outcome {
    let m = o.model()?;
    let frag = o.fragment(&m)?;
    let c = conditions_for(&frag, m.flavor())?;
    let part = bisimilarity_partition(&m, &c)?;
    let (q, _) = m.quotient(&part)?;
    Ok((model_json(&q)?, true))
}

fn strictify(o: &Opts) -> Outcome {
    Ok((model_json(&o.model()?.strictify()?)?, true))
}

fn dualize(o: &Opts) -> Outcome {
    Ok((model_json(&o.model()?.dualize()?)?, true))
}

fn translate(o: &Opts) -> Outcome {
    let f = o.formula()?;
    let t = f.translate()?;
    Ok((json!({ "formula": f.to_string(), "translation": t.to_string() }), true))
}

fn closure(o: &Opts) -> Outcome {
    let m = o.model()?;
    let frag = o.fragment(&m)?;
    let generators: Vec<_> = match o.algebra(&m)? {
        Some(a) => a.sets().iter().cloned().collect(),
        None => m.valuation().values().cloned().collect(),
    };
    let a = close_algebra(&generators, &fragment_ops(&frag), &m)?;
    Ok((
        json!({
            "fragment": frag.to_string(),
            "sets": a.to_names(&m),
            "general_model": is_general_model(&m, &a, &frag),
        }),
        true,
    ))
}

fn descriptive_check(o: &Opts) -> Outcome {
    let m = o.model()?;
    let a = match o.algebra(&m)? {
        Some(a) => a,
        None => all_upsets(&m)?,
    };
    let v = descriptive_box_check(&m, &a)?;
    let counterexample = v.counterexample.map(|(x, y)| [m.state_name(x), m.state_name(y)]);
    Ok((json!({ "holds": v.holds, "counterexample": counterexample }), true))
}

fn example(o: &ExampleOpts) -> Outcome {
    let m = build_example(&o.name, &o.params)?;
    Ok((model_json(&m)?, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, output) = match &cli.verb {
        Verb::Validate(o) => (validate(o), &o.output),
        Verb::Eval(o) => (eval_verb(o), &o.output),
        Verb::Bisim(o) => (bisim(o), &o.output),
        Verb::Equiv(o) => (equiv(o), &o.output),
        Verb::Oracle(o) => (oracle(o), &o.output),
        Verb::HmCheck(o) => (hm_check(o), &o.output),
        Verb::Quotient(o) => (quotient(o), &o.output),
        Verb::Strictify(o) => (strictify(o), &o.output),
        Verb::Dualize(o) => (dualize(o), &o.output),
        Verb::Translate(o) => (translate(o), &o.output),
        Verb::Closure(o) => (closure(o), &o.output),
        Verb::DescriptiveCheck(o) => (descriptive_check(o), &o.output),
        Verb::Example(o) => (example(o), &o.output),
    };
    match result {
        Ok((value, ok)) => {
            let text = serde_json::to_string_pretty(&value).expect("json values serialize") + "\n";
            match output {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            Cli::command()
                .error(clap::error::ErrorKind::MissingRequiredArgument, msg)
                .exit();
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
