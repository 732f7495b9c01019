use std::collections::BTreeMap;

/// Ordered multiset backed by element → multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multiset<T: Ord> {
    counts: BTreeMap<T, usize>,
    len: usize,
}

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset {
            counts: BTreeMap::new(),
            len: 0,
        }
    }
}

impl<T: Ord + Clone> Multiset<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: T) {
        *self.counts.entry(x).or_insert(0) += 1;
        self.len += 1;
    }

    /// Remove one copy of `x`; returns whether one was present.
    pub fn remove_one(&mut self, x: &T) -> bool {
        match self.counts.get_mut(x) {
            Some(c) => {
                *c -= 1;
                if *c == 0 {
                    self.counts.remove(x);
                }
                self.len -= 1;
                true
            }
            None => false,
        }
    }

    pub fn count(&self, x: &T) -> usize {
        self.counts.get(x).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Elements in ascending order, repeated according to multiplicity.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.counts
            .iter()
            .flat_map(|(x, &c)| std::iter::repeat_n(x, c))
    }

    pub fn distinct(&self) -> impl Iterator<Item = (&T, usize)> {
        self.counts.iter().map(|(x, &c)| (x, c))
    }
}

impl<T: Ord + Clone> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for x in iter {
            m.insert(x);
        }
        m
    }
}
