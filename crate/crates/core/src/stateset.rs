use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of a finite carrier, stored as a bitset over state indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(size: usize) -> Self {
        StateSet(FixedBitSet::with_capacity(size))
    }

    pub fn full(size: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(size);
        bits.insert_range(..);
        StateSet(bits)
    }

    pub fn from_indices(size: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(size);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Size of the carrier this set lives in.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.0.clone();
        out.union_with(&other.0);
        StateSet(out)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = self.0.clone();
        out.intersect_with(&other.0);
        StateSet(out)
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut out = self.0.clone();
        out.difference_with(&other.0);
        StateSet(out)
    }

    pub fn complement(&self) -> StateSet {
        let mut out = self.0.clone();
        out.toggle_range(..);
        StateSet(out)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    /// Concatenates two sets into one over the disjoint union of their carriers.
    pub fn concat(&self, other: &StateSet) -> StateSet {
        let offset = self.universe();
        let mut out = FixedBitSet::with_capacity(offset + other.universe());
        for i in self.iter() {
            out.insert(i);
        }
        for i in other.iter() {
            out.insert(offset + i);
        }
        StateSet(out)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
