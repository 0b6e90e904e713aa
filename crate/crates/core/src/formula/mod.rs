//! Formula syntax for bi-intuitionistic modal and tense logic.
//!
//! The concrete grammar (loosest binding first):
//!
//! ```text
//! arrows  := disj ("->" arrows)?          right-associative
//!          | disj ("-<" disj)*            left-associative
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "[]"i unary | "<>"j unary | "<|"i unary | "|>"j unary
//!          | "C" unary | "~" unary | "-." unary | atom | "T" | "F" | "(" arrows ")"
//! ```
//!
//! `~φ` is sugar for `φ -> F` and `-.φ` for `T -< φ`; both are expanded by the
//! parser and never printed back. A chain mixing `->` and `-<` without
//! parentheses is rejected.

mod parser;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parser::ParseError;

/// Abstract syntax of formulas. Children are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    /// Intuitionistic implication `→`.
    Imp(Arc<Formula>, Arc<Formula>),
    /// Subtraction `⊸`, the dual of implication.
    Sub(Arc<Formula>, Arc<Formula>),
    /// `□_i`, interpreted over the i-th box relation (1-based).
    Box(usize, Arc<Formula>),
    /// `◇_j`, interpreted over the j-th diamond relation (1-based).
    Dia(usize, Arc<Formula>),
    /// Tense diamond `⧫_i` over the converse of the i-th box relation.
    TDia(usize, Arc<Formula>),
    /// Tense box `⊟_j` over the converse of the j-th diamond relation.
    TBox(usize, Arc<Formula>),
    /// Common knowledge `C` of epistemic models.
    Common(Arc<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("common knowledge has no dual; cannot translate `{0}`")]
    NoDual(String),
    #[error("fragment admits tense operators only over a bi-intuitionistic base")]
    TenseNeedsBiInt,
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Arc::new(l), Arc::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Arc::new(l), Arc::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Arc::new(l), Arc::new(r))
    }

    pub fn sub(l: Formula, r: Formula) -> Formula {
        Formula::Sub(Arc::new(l), Arc::new(r))
    }

    pub fn boxed(i: usize, f: Formula) -> Formula {
        Formula::Box(i, Arc::new(f))
    }

    pub fn dia(j: usize, f: Formula) -> Formula {
        Formula::Dia(j, Arc::new(f))
    }

    pub fn tdia(i: usize, f: Formula) -> Formula {
        Formula::TDia(i, Arc::new(f))
    }

    pub fn tbox(j: usize, f: Formula) -> Formula {
        Formula::TBox(j, Arc::new(f))
    }

    pub fn common(f: Formula) -> Formula {
        Formula::Common(Arc::new(f))
    }

    /// `¬φ = φ → ⊥`
    pub fn not(f: Formula) -> Formula {
        Formula::imp(f, Formula::Bot)
    }

    /// Co-negation `⊤ ⊸ φ`.
    pub fn conot(f: Formula) -> Formula {
        Formula::sub(Formula::Top, f)
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; the empty disjunction is `⊥`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::Bot)
    }

    pub fn parse(text: &str) -> Result<Formula, ParseError> {
        parser::parse(text)
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 1,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Sub(l, r) => {
                1 + l.size() + r.size()
            }
            Formula::Box(_, f)
            | Formula::Dia(_, f)
            | Formula::TDia(_, f)
            | Formula::TBox(_, f)
            | Formula::Common(f) => 1 + f.size(),
        }
    }

    /// Nesting depth of modal operators and arrows.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::And(l, r) | Formula::Or(l, r) => l.depth().max(r.depth()),
            Formula::Imp(l, r) | Formula::Sub(l, r) => 1 + l.depth().max(r.depth()),
            Formula::Box(_, f)
            | Formula::Dia(_, f)
            | Formula::TDia(_, f)
            | Formula::TBox(_, f)
            | Formula::Common(f) => 1 + f.depth(),
        }
    }

    /// Like [`Formula::depth`], except that an arrow sitting directly under a
    /// modal operator shares that operator's layer, so `□(φ → ψ)` is one layer
    /// above `φ` and `ψ`.
    pub fn layer_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::And(l, r) | Formula::Or(l, r) => l.layer_depth().max(r.layer_depth()),
            Formula::Imp(l, r) | Formula::Sub(l, r) => 1 + l.layer_depth().max(r.layer_depth()),
            Formula::Box(_, f)
            | Formula::Dia(_, f)
            | Formula::TDia(_, f)
            | Formula::TBox(_, f)
            | Formula::Common(f) => match f.as_ref() {
                Formula::Imp(l, r) | Formula::Sub(l, r) => 1 + l.layer_depth().max(r.layer_depth()),
                other => 1 + other.layer_depth(),
            },
        }
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Top | Formula::Bot => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Sub(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Formula::Box(_, f)
            | Formula::Dia(_, f)
            | Formula::TDia(_, f)
            | Formula::TBox(_, f)
            | Formula::Common(f) => f.collect_atoms(out),
        }
    }

    /// The dual translation `(·)^t`: truth of `φ` in a model coincides with
    /// falsity of `φ^t` in the dual model. It is an involution.
    pub fn translate(&self) -> Result<Formula, FormulaError> {
        let t = |f: &Arc<Formula>| f.translate();
        Ok(match self {
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Top => Formula::Bot,
            Formula::Bot => Formula::Top,
            Formula::And(l, r) => Formula::or(t(l)?, t(r)?),
            Formula::Or(l, r) => Formula::and(t(l)?, t(r)?),
            Formula::Imp(l, r) => Formula::sub(t(r)?, t(l)?),
            Formula::Sub(l, r) => Formula::imp(t(r)?, t(l)?),
            Formula::Box(i, f) => Formula::dia(*i, t(f)?),
            Formula::Dia(j, f) => Formula::boxed(*j, t(f)?),
            Formula::TDia(i, f) => Formula::tbox(*i, t(f)?),
            Formula::TBox(j, f) => Formula::tdia(*j, t(f)?),
            Formula::Common(_) => return Err(FormulaError::NoDual(self.to_string())),
        })
    }

    /// The smallest fragment containing every connective of the formula.
    ///
    /// Arrow-free formulas are classified as `Int`; tense operators force a
    /// bi-intuitionistic base.
    pub fn fragment(&self) -> Fragment {
        let mut scan = FragmentScan::default();
        scan.visit(self);
        let base = match (scan.imp || scan.tense, scan.sub || scan.tense) {
            (true, true) => Base::BiInt,
            (false, true) => Base::IntDual,
            _ => Base::Int,
        };
        Fragment {
            base,
            n_boxes: scan.boxes,
            m_diamonds: scan.diamonds,
            tense: scan.tense,
            common: scan.common,
        }
    }
}

#[derive(Default)]
struct FragmentScan {
    imp: bool,
    sub: bool,
    boxes: usize,
    diamonds: usize,
    tense: bool,
    common: bool,
}

impl FragmentScan {
    fn visit(&mut self, f: &Formula) {
        match f {
            Formula::Atom(_) | Formula::Top | Formula::Bot => {}
            Formula::And(l, r) | Formula::Or(l, r) => {
                self.visit(l);
                self.visit(r);
            }
            Formula::Imp(l, r) => {
                self.imp = true;
                self.visit(l);
                self.visit(r);
            }
            Formula::Sub(l, r) => {
                self.sub = true;
                self.visit(l);
                self.visit(r);
            }
            Formula::Box(i, g) => {
                self.boxes = self.boxes.max(*i);
                self.visit(g);
            }
            Formula::Dia(j, g) => {
                self.diamonds = self.diamonds.max(*j);
                self.visit(g);
            }
            Formula::TDia(i, g) => {
                self.tense = true;
                self.boxes = self.boxes.max(*i);
                self.visit(g);
            }
            Formula::TBox(j, g) => {
                self.tense = true;
                self.diamonds = self.diamonds.max(*j);
                self.visit(g);
            }
            Formula::Common(g) => {
                self.common = true;
                self.visit(g);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parser::parse(s)
    }
}

/// Propositional base of a language.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    /// `⊤ ⊥ ∧ ∨ →`
    Int,
    /// `⊤ ⊥ ∧ ∨ ⊸`
    IntDual,
    /// both arrows
    BiInt,
}

impl Base {
    pub fn has_imp(self) -> bool {
        matches!(self, Base::Int | Base::BiInt)
    }

    pub fn has_sub(self) -> bool {
        matches!(self, Base::IntDual | Base::BiInt)
    }

    pub fn dual(self) -> Base {
        match self {
            Base::Int => Base::IntDual,
            Base::IntDual => Base::Int,
            Base::BiInt => Base::BiInt,
        }
    }
}

impl FromStr for Base {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "int" => Ok(Base::Int),
            "intdual" => Ok(Base::IntDual),
            "biint" => Ok(Base::BiInt),
            other => Err(format!("unknown base `{other}` (expected int, intdual or biint)")),
        }
    }
}

/// The connectives and modal indices a language admits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Fragment {
    pub base: Base,
    pub n_boxes: usize,
    pub m_diamonds: usize,
    /// Admits `⧫_i` (i ≤ n_boxes) and `⊟_j` (j ≤ m_diamonds).
    pub tense: bool,
    /// Admits the common-knowledge operator of epistemic models.
    pub common: bool,
}

impl Fragment {
    pub fn new(base: Base, n_boxes: usize, m_diamonds: usize) -> Fragment {
        Fragment {
            base,
            n_boxes,
            m_diamonds,
            tense: false,
            common: false,
        }
    }

    pub fn with_tense(mut self) -> Fragment {
        self.tense = true;
        self
    }

    pub fn with_common(mut self) -> Fragment {
        self.common = true;
        self
    }

    pub fn check(&self) -> Result<(), FormulaError> {
        if self.tense && self.base != Base::BiInt {
            return Err(FormulaError::TenseNeedsBiInt);
        }
        Ok(())
    }

    pub fn is_modal(&self) -> bool {
        self.n_boxes > 0 || self.m_diamonds > 0 || self.common
    }

    /// The fragment the dual translation maps this one onto.
    pub fn dual(&self) -> Fragment {
        Fragment {
            base: self.base.dual(),
            n_boxes: self.m_diamonds,
            m_diamonds: self.n_boxes,
            tense: self.tense,
            common: self.common,
        }
    }

    pub fn admits(&self, f: &Formula) -> bool {
        match f {
            Formula::Atom(_) | Formula::Top | Formula::Bot => true,
            Formula::And(l, r) | Formula::Or(l, r) => self.admits(l) && self.admits(r),
            Formula::Imp(l, r) => self.base.has_imp() && self.admits(l) && self.admits(r),
            Formula::Sub(l, r) => self.base.has_sub() && self.admits(l) && self.admits(r),
            Formula::Box(i, g) => (1..=self.n_boxes).contains(i) && self.admits(g),
            Formula::Dia(j, g) => (1..=self.m_diamonds).contains(j) && self.admits(g),
            Formula::TDia(i, g) => self.tense && (1..=self.n_boxes).contains(i) && self.admits(g),
            Formula::TBox(j, g) => self.tense && (1..=self.m_diamonds).contains(j) && self.admits(g),
            Formula::Common(g) => self.common && self.admits(g),
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.base {
            Base::Int => "Int",
            Base::IntDual => "IntDual",
            Base::BiInt => "BiInt",
        };
        write!(f, "{base}_{{{},{}}}", self.n_boxes, self.m_diamonds)?;
        if self.tense {
            f.write_str("+tense")?;
        }
        if self.common {
            f.write_str("+C")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn translate_swaps_arrows_and_reverses_arguments() {
        assert_eq!(Formula::imp(p(), q()).translate().unwrap(), Formula::sub(q(), p()));
        assert_eq!(Formula::Top.translate().unwrap(), Formula::Bot);
        assert_eq!(Formula::boxed(1, p()).translate().unwrap(), Formula::dia(1, p()));
        assert_eq!(Formula::tdia(2, p()).translate().unwrap(), Formula::tbox(2, p()));
    }

    #[test]
    fn common_knowledge_is_not_translatable() {
        assert!(matches!(
            Formula::common(p()).translate(),
            Err(FormulaError::NoDual(_))
        ));
    }

    #[test]
    fn fragment_examples() {
        assert_eq!(Formula::imp(p(), q()).fragment(), Fragment::new(Base::Int, 0, 0));
        assert_eq!(Formula::sub(p(), q()).fragment(), Fragment::new(Base::IntDual, 0, 0));
        let mixed = Formula::and(Formula::imp(p(), q()), Formula::dia(2, Formula::sub(p(), q())));
        assert_eq!(mixed.fragment(), Fragment::new(Base::BiInt, 0, 2));
        let tense = Formula::tbox(1, p());
        assert_eq!(tense.fragment(), Fragment::new(Base::BiInt, 0, 1).with_tense());
    }

    #[test]
    fn empty_junctions_are_constants() {
        assert_eq!(Formula::conj(vec![]), Formula::Top);
        assert_eq!(Formula::disj(vec![]), Formula::Bot);
        assert_eq!(Formula::conj(vec![p(), q()]), Formula::and(p(), q()));
    }

    #[test]
    fn layer_depth_merges_guarded_arrow() {
        let f = Formula::boxed(1, Formula::imp(p(), Formula::boxed(1, Formula::Bot)));
        assert_eq!(f.depth(), 3);
        assert_eq!(f.layer_depth(), 2);
    }

    #[test]
    fn tense_fragment_needs_biint() {
        assert!(Fragment::new(Base::Int, 1, 0).with_tense().check().is_err());
        assert!(Fragment::new(Base::BiInt, 1, 1).with_tense().check().is_ok());
    }
}
