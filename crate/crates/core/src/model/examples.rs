//! Named example models, parameterized by a truncation size where the
//! underlying construction is infinite.

use super::{Flavor, Model, ModelError};

/// Builds one of `fig3_M`, `fig3_Mplus`, `spines(k)`, `porcupine_W(N)`,
/// `porcupine_Wprime(N)` or `omega_chain(N)`.
pub fn build_example(name: &str, params: &[i64]) -> Result<Model, ModelError> {
    let bad = |reason: &str| ModelError::BadParameter {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let size = || -> Result<usize, ModelError> {
        match params {
            [n] if *n >= 1 => Ok(*n as usize),
            [_] => Err(bad("parameter must be positive")),
            _ => Err(bad("expected exactly one parameter")),
        }
    };
    match name {
        "fig3_M" | "fig3_Mplus" => {
            if !params.is_empty() {
                return Err(bad("takes no parameters"));
            }
            let r: &[(&str, &str)] = if name == "fig3_M" {
                &[("x", "y")]
            } else {
                &[("x", "y"), ("x", "z")]
            };
            Model::builder(Flavor::Standard)
                .states(&["x", "y", "z"])
                .leq("y", "z")
                .box_relation(r)
                .atom("p", &["y", "z"])
                .atom("q", &["z"])
                .build()
        }
        "spines" => Ok(spines(size()?)),
        "porcupine_W" => Ok(porcupine(size()?, true)),
        "porcupine_Wprime" => Ok(porcupine(size()?, false)),
        "omega_chain" => Ok(omega_chain(size()?)),
        _ => Err(ModelError::UnknownExample(name.to_string())),
    }
}

/// A root with one R-path of each length `1..=k`; identity order, no atoms.
fn spines(k: usize) -> Model {
    let mut states = vec!["r".to_string()];
    let mut edges = Vec::new();
    for len in 1..=k {
        let mut prev = "r".to_string();
        for step in 1..=len {
            let s = format!("({len},{step})");
            states.push(s.clone());
            edges.push((prev, s.clone()));
            prev = s;
        }
    }
    let edges: Vec<(&str, &str)> = edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Model::builder(Flavor::Standard)
        .states(&states)
        .box_relation(&edges)
        .build()
        .expect("spines are well formed")
}

/// Top point `x` above branches `(n,0) ≤ … ≤ (n,n-1)` for `n = 1..=N`; with
/// `infinite_branch`, an extra branch `N+1` stands in for the infinite one.
fn porcupine(n_max: usize, infinite_branch: bool) -> Model {
    let branches = if infinite_branch { n_max + 1 } else { n_max };
    let mut states = vec!["x".to_string()];
    let mut points = Vec::new();
    for n in 1..=branches {
        for k in 0..n {
            states.push(format!("({n},{k})"));
            points.push((n, k));
        }
    }
    let mut b = Model::builder(Flavor::Standard).states(&states);
    for (idx, &(n, k)) in points.iter().enumerate() {
        let name = &states[idx + 1];
        b = b.leq(name, "x");
        if k + 1 < n {
            b = b.leq(name, &states[idx + 2]);
        }
    }
    b = b.atom("q", &["x"]);
    for i in 0..=n_max {
        let mut truth: Vec<&str> = vec!["x"];
        for (idx, &(_, k)) in points.iter().enumerate() {
            if i <= k {
                truth.push(&states[idx + 1]);
            }
        }
        b = b.atom(&format!("p_{i}"), &truth);
    }
    b.build().expect("porcupines are well formed")
}

/// The chain `0 ≤ 1 ≤ … ≤ N ≤ inf` with `V(p_i) = {x | i ≤ x}`.
fn omega_chain(n: usize) -> Model {
    let mut states: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    states.push("inf".into());
    let mut b = Model::builder(Flavor::Standard).states(&states);
    for w in states.windows(2) {
        b = b.leq(&w[0], &w[1]);
    }
    for i in 0..=n {
        let truth: Vec<&str> = states[i..].iter().map(String::as_str).collect();
        b = b.atom(&format!("p_{i}"), &truth);
    }
    b.build().expect("chains are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spines_sizes() {
        let m = build_example("spines", &[2]).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.boxes()[0].len(), 3);
        assert_eq!(build_example("spines", &[4]).unwrap().len(), 11);
    }

    #[test]
    fn porcupine_shapes() {
        let w = build_example("porcupine_W", &[2]).unwrap();
        let wp = build_example("porcupine_Wprime", &[2]).unwrap();
        assert_eq!(wp.states(), &["x", "(1,0)", "(2,0)", "(2,1)"]);
        assert_eq!(w.len(), 7);
        let x = w.state_index("x").unwrap();
        assert!((0..w.len()).all(|s| w.leq().contains(s, x)));
        assert_eq!(w.names(&w.atom("q")), vec!["x"]);
        assert_eq!(w.names(&w.atom("p_2")), vec!["(3,2)", "x"]);
        assert!(w.validate().is_valid());
    }

    #[test]
    fn omega_chain_valuation() {
        let m = build_example("omega_chain", &[3]).unwrap();
        assert_eq!(m.len(), 5);
        assert_eq!(m.names(&m.atom("p_2")), vec!["2", "3", "inf"]);
        assert!(m.validate().is_valid());
    }

    #[test]
    fn bad_names_and_parameters() {
        assert!(matches!(build_example("nope", &[]), Err(ModelError::UnknownExample(_))));
        assert!(build_example("spines", &[0]).is_err());
        assert!(build_example("spines", &[]).is_err());
        assert!(build_example("fig3_M", &[1]).is_err());
    }
}
