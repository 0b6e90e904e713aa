use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Flavor, Model, ModelError};
use crate::relation::Relation;
use crate::stateset::StateSet;

/// On-disk JSON form of a model. `leq_gen` only needs to generate the order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub states: Vec<String>,
    #[serde(default)]
    pub leq_gen: Vec<(String, String)>,
    #[serde(default)]
    pub boxes: Vec<Vec<(String, String)>>,
    #[serde(default)]
    pub diamonds: Vec<Vec<(String, String)>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub flavor: Flavor,
}

impl Model {
    pub fn from_file(file: &ModelFile) -> Result<Model, ModelError> {
        let n = file.states.len();
        let mut index = std::collections::HashMap::with_capacity(n);
        for (i, s) in file.states.iter().enumerate() {
            if index.insert(s.as_str(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| ModelError::UnknownState(s.to_string()))
        };
        let relation = |pairs: &[(String, String)]| -> Result<Relation, ModelError> {
            let mut r = Relation::empty(n, n);
            for (a, b) in pairs {
                r.insert(lookup(a)?, lookup(b)?);
            }
            Ok(r)
        };
        let leq = relation(&file.leq_gen)?;
        let boxes = file
            .boxes
            .iter()
            .map(|r| relation(r))
            .collect::<Result<Vec<_>, _>>()?;
        let diamonds = file
            .diamonds
            .iter()
            .map(|r| relation(r))
            .collect::<Result<Vec<_>, _>>()?;
        let mut valuation = BTreeMap::new();
        for (p, names) in &file.valuation {
            let mut set = StateSet::empty(n);
            for s in names {
                set.insert(lookup(s)?);
            }
            valuation.insert(p.clone(), set);
        }
        Model::from_parts(file.states.clone(), &leq, boxes, diamonds, valuation, file.flavor)
    }

    pub fn from_json(text: &str) -> Result<Model, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        Model::from_file(&file)
    }

    /// The file form; `leq_gen` lists every non-reflexive pair of the order.
    pub fn to_file(&self) -> ModelFile {
        let relation = |r: &Relation| -> Vec<(String, String)> {
            r.pairs()
                .map(|(a, b)| (self.states[a].clone(), self.states[b].clone()))
                .collect()
        };
        let leq_gen = self
            .leq
            .pairs()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (self.states[a].clone(), self.states[b].clone()))
            .collect();
        ModelFile {
            states: self.states.clone(),
            leq_gen,
            boxes: self.boxes.iter().map(relation).collect(),
            diamonds: self.diamonds.iter().map(relation).collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, set)| (p.clone(), self.names(set)))
                .collect(),
            flavor: self.flavor,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model files always serialize")
    }
}
