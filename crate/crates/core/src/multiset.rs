//! Finite multisets of naturals under the multiset order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite multiset of naturals. The unit of `+` is the empty multiset.
///
/// The order is the multiset extension of the order on naturals: any
/// number of copies of `n` stay below a single `n + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Multiset {
    counts: BTreeMap<u64, usize>,
}

impl Multiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(n: u64) -> Self {
        let mut m = Self::new();
        m.insert(n);
        m
    }

    pub fn insert(&mut self, n: u64) {
        self.insert_many(n, 1);
    }

    pub fn insert_many(&mut self, n: u64, times: usize) {
        if times > 0 {
            *self.counts.entry(n).or_insert(0) += times;
        }
    }

    pub fn count(&self, n: u64) -> usize {
        self.counts.get(&n).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of elements, with multiplicity.
    pub fn len(&self) -> usize {
        self.counts.values().sum()
    }

    /// Sum of the elements, with multiplicity.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|(&n, &c)| n * c as u64).sum()
    }

    /// Elements in descending order, multiplicities expanded.
    pub fn descending(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts
            .iter()
            .rev()
            .flat_map(|(&n, &c)| std::iter::repeat_n(n, c))
    }
}

pub fn msum(a: &Multiset, b: &Multiset) -> Multiset {
    let mut out = a.clone();
    out += b;
    out
}

pub fn mcompare(a: &Multiset, b: &Multiset) -> Ordering {
    a.cmp(b)
}

impl AddAssign<&Multiset> for Multiset {
    fn add_assign(&mut self, rhs: &Multiset) {
        for (&n, &c) in &rhs.counts {
            self.insert_many(n, c);
        }
    }
}

impl Add for Multiset {
    type Output = Multiset;

    fn add(mut self, rhs: Multiset) -> Multiset {
        self += &rhs;
        self
    }
}

impl Ord for Multiset {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.counts.iter().rev();
        let mut b = other.counts.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((x, cx)), Some((y, cy))) => match x.cmp(y).then(cx.cmp(cy)) {
                    Ordering::Equal => {}
                    ord => return ord,
                },
            }
        }
    }
}

impl PartialOrd for Multiset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<u64> for Multiset {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut m = Multiset::new();
        for n in iter {
            m.insert(n);
        }
        m
    }
}

impl fmt::Display for Multiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, n) in self.descending().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Multiset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.descending())
    }
}

impl<'de> Deserialize<'de> for Multiset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<u64>::deserialize(d).map(|v| v.into_iter().collect())
    }
}
