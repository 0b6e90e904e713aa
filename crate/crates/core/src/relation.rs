use std::fmt;

use crate::stateset::StateSet;

/// A binary relation between two finite carriers, stored row-wise.
///
/// Row `a` holds the image `{b | a R b}`; pairs iterate in lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    rows: Vec<StateSet>,
    cols: usize,
}

impl Relation {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Relation {
            rows: vec![StateSet::empty(cols); rows],
            cols,
        }
    }

    /// The complete relation `rows × cols`.
    pub fn full(rows: usize, cols: usize) -> Self {
        Relation {
            rows: vec![StateSet::full(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n, n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(rows: usize, cols: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(rows, cols);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    /// Builds a relation from its rows; every row must have `cols` bits.
    pub fn from_rows(rows: Vec<StateSet>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.universe() == cols), "row width mismatch");
        Relation { rows, cols }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn remove(&mut self, a: usize, b: usize) {
        self.rows[a].remove(b);
    }

    /// The image `R[a]`.
    pub fn image(&self, a: usize) -> &StateSet {
        &self.rows[a]
    }

    /// The preimage `{a | a R b}`.
    pub fn preimage(&self, b: usize) -> StateSet {
        StateSet::from_indices(
            self.rows.len(),
            (0..self.rows.len()).filter(|&a| self.rows[a].contains(b)),
        )
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().map(move |b| (a, b)))
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(StateSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(StateSet::is_empty)
    }

    pub fn converse(&self) -> Relation {
        let mut out = Relation::empty(self.cols, self.rows.len());
        for (a, b) in self.pairs() {
            out.insert(b, a);
        }
        out
    }

    /// Relational composition `self ∘ other`: `a (self ∘ other) c` iff `a self b` and `b other c`.
    pub fn compose(&self, other: &Relation) -> Relation {
        assert_eq!(self.cols, other.rows.len(), "composition over mismatched carriers");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .fold(StateSet::empty(other.cols), |acc, b| acc.union(&other.rows[b]))
            })
            .collect();
        Relation {
            rows,
            cols: other.cols,
        }
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.union(b))
            .collect();
        Relation { rows, cols: self.cols }
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.intersection(b))
            .collect();
        Relation { rows, cols: self.cols }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a.is_subset(b))
    }

    /// First pair of `self` missing from `other`, in lexicographic order.
    pub fn first_outside(&self, other: &Relation) -> Option<(usize, usize)> {
        self.pairs().find(|&(a, b)| !other.contains(a, b))
    }

    /// Transitive closure (Warshall), optionally adding the identity.
    /// Only meaningful for endorelations.
    pub fn closure(&self, reflexive: bool) -> Relation {
        let n = self.rows.len();
        let mut rows = self.rows.clone();
        for k in 0..n {
            let via = rows[k].clone();
            for row in rows.iter_mut() {
                if row.contains(k) {
                    *row = row.union(&via);
                }
            }
        }
        if reflexive {
            for (i, row) in rows.iter_mut().enumerate() {
                row.insert(i);
            }
        }
        Relation { rows, cols: self.cols }
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.rows.len()).all(|i| self.contains(i, i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self).is_subset(self)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}
