//! Subsets of a small ground set `[n]`, families of them, and the basic
//! lattice operations (level profiles, shadows, antichains, complements).

use std::cmp::Ordering;
use std::fmt;
use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: u32 = 24;

pub(crate) fn check_n(n: u32) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::GroundSize(n))
    }
}

#[inline]
pub(crate) fn full_mask(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A subset of `[n]` stored as a bitmask; element `i` (1-based) is bit `i - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElementSet(u32);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    /// Validates that only the low `n` bits are set.
    pub fn from_bits(bits: u32, n: u32) -> Result<Self> {
        check_n(n)?;
        if bits & !full_mask(n) != 0 {
            return Err(Error::BitsOutOfRange { bits, n });
        }
        Ok(ElementSet(bits))
    }

    /// Builds a set from 1-based elements; duplicates are ignored.
    pub fn from_elements<I: IntoIterator<Item = u32>>(elements: I, n: u32) -> Result<Self> {
        check_n(n)?;
        let mut bits = 0u32;
        for e in elements {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(ElementSet(bits))
    }

    /// `[n]` itself.
    pub fn full(n: u32) -> Self {
        ElementSet(full_mask(n))
    }

    #[inline]
    pub(crate) const fn raw(bits: u32) -> Self {
        ElementSet(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, element: u32) -> bool {
        element >= 1 && element <= 32 && self.0 & (1 << (element - 1)) != 0
    }

    #[inline]
    pub fn is_subset_of(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_proper_subset_of(self, other: ElementSet) -> bool {
        self.0 != other.0 && self.is_subset_of(other)
    }

    #[inline]
    pub fn is_comparable(self, other: ElementSet) -> bool {
        self.is_subset_of(other) || other.is_subset_of(self)
    }

    #[inline]
    pub fn complement(self, n: u32) -> ElementSet {
        ElementSet(!self.0 & full_mask(n))
    }

    #[inline]
    pub fn union(self, other: ElementSet) -> ElementSet {
        ElementSet(self.0 | other.0)
    }

    #[inline]
    pub fn difference(self, other: ElementSet) -> ElementSet {
        ElementSet(self.0 & !other.0)
    }

    pub fn with(self, element: u32) -> ElementSet {
        ElementSet(self.0 | (1 << (element - 1)))
    }

    pub fn without(self, element: u32) -> ElementSet {
        ElementSet(self.0 & !(1 << (element - 1)))
    }

    /// Ascending 1-based elements.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let tz = bits.trailing_zeros();
                bits &= bits - 1;
                Some(tz + 1)
            }
        })
    }

    /// Smallest element, if any.
    pub fn min_element(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros() + 1)
    }

    /// Canonical order key: cardinality, then numeric bitmask value.
    #[inline]
    pub fn canonical_key(self) -> (u32, u32) {
        (self.cardinality(), self.0)
    }

    /// All subsets of `self` of the given size, in colex order.
    pub fn subsets_of_size(self, size: u32) -> Vec<ElementSet> {
        let elems: Vec<u32> = self.elements().collect();
        if size as usize > elems.len() {
            return Vec::new();
        }
        colex_masks(elems.len() as u32, size)
            .map(|local| {
                let mut bits = 0u32;
                let mut l = local;
                while l != 0 {
                    let i = l.trailing_zeros() as usize;
                    bits |= 1 << (elems[i] - 1);
                    l &= l - 1;
                }
                ElementSet(bits)
            })
            .collect()
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order, not inclusion.
impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let mut first = true;
        for e in self.elements() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", if self.is_empty() { String::new() } else { self.to_string() })
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        crate::text::parse_set_line(&s, MAX_N).map_err(serde::de::Error::custom)
    }
}

/// Iterates all `size`-subsets of `{0..width}` as bitmasks in ascending
/// numeric (colex) order.
pub(crate) fn colex_masks(width: u32, size: u32) -> impl Iterator<Item = u32> {
    let limit: u64 = 1u64 << width;
    let mut next: Option<u64> = if size > width {
        None
    } else if size == 0 {
        Some(0)
    } else {
        Some((1u64 << size) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nx = (((r ^ cur) >> 2) / c) | r;
            (nx < limit).then_some(nx)
        };
        Some(cur as u32)
    })
}

/// `max(|F|, n - |F|)`, the distance-from-middle weight.
pub fn m_of(set: ElementSet, n: u32) -> u32 {
    let c = set.cardinality();
    c.max(n - c)
}

/// A non-negative half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger {
    twice: u32,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { twice: 0 };

    pub fn from_twice(twice: u32) -> Self {
        HalfInteger { twice }
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `counts[i]` is the number of members of cardinality `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelProfile {
    pub counts: Vec<u64>,
}

impl LevelProfile {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// A deduplicated family of subsets of `[n]` in canonical order
/// (cardinality, then bitmask).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SetFamily {
    n: u32,
    members: Vec<ElementSet>,
}

impl SetFamily {
    /// Validates, sorts and deduplicates.
    pub fn new<I: IntoIterator<Item = ElementSet>>(n: u32, sets: I) -> Result<Self> {
        check_n(n)?;
        let mask = full_mask(n);
        let mut members: Vec<ElementSet> = sets.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| s.bits() & !mask != 0) {
            return Err(Error::BitsOutOfRange { bits: bad.bits(), n });
        }
        members.sort_unstable();
        members.dedup();
        Ok(SetFamily { n, members })
    }

    /// Convenience constructor from 1-based element lists.
    pub fn from_lists(n: u32, lists: &[&[u32]]) -> Result<Self> {
        let sets = lists
            .iter()
            .map(|l| ElementSet::from_elements(l.iter().copied(), n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, sets)
    }

    /// Caller guarantees canonical order, validity and no duplicates.
    pub(crate) fn from_sorted_unchecked(n: u32, members: Vec<ElementSet>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        SetFamily { n, members }
    }

    pub fn empty(n: u32) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    /// All `i`-subsets of `[n]`.
    pub fn level(n: u32, i: u32) -> Result<Self> {
        Self::levels(n, i..=i)
    }

    /// All subsets whose size lies in `sizes`.
    pub fn levels(n: u32, sizes: RangeInclusive<u32>) -> Result<Self> {
        check_n(n)?;
        let mut members = Vec::new();
        for i in sizes {
            if i <= n {
                members.extend(colex_masks(n, i).map(ElementSet::raw));
            }
        }
        Ok(SetFamily { n, members })
    }

    pub fn power_set(n: u32) -> Result<Self> {
        Self::levels(n, 0..=n)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[ElementSet] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = ElementSet> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, set: ElementSet) -> bool {
        self.members.binary_search(&set).is_ok()
    }

    pub fn index_of(&self, set: ElementSet) -> Option<usize> {
        self.members.binary_search(&set).ok()
    }

    /// Returns a new family with `remove` taken out and `insert` added.
    pub fn with_replaced(&self, remove: &[ElementSet], insert: &[ElementSet]) -> Result<Self> {
        let mut members: Vec<ElementSet> = self
            .members
            .iter()
            .copied()
            .filter(|s| !remove.contains(s))
            .collect();
        members.extend_from_slice(insert);
        Self::new(self.n, members)
    }

    pub fn with_inserted(&self, set: ElementSet) -> Result<Self> {
        self.with_replaced(&[], &[set])
    }

    /// Membership lookup table indexed by bitmask.
    pub fn membership_table(&self) -> Vec<bool> {
        let mut table = vec![false; 1usize << self.n];
        for s in &self.members {
            table[s.bits() as usize] = true;
        }
        table
    }

    pub fn level_profile(&self) -> LevelProfile {
        let mut counts = vec![0u64; self.n as usize + 1];
        for s in &self.members {
            counts[s.cardinality() as usize] += 1;
        }
        LevelProfile { counts }
    }

    /// Members of the given cardinality.
    pub fn level_members(&self, size: u32) -> &[ElementSet] {
        let lo = self.members.partition_point(|s| s.cardinality() < size);
        let hi = self.members.partition_point(|s| s.cardinality() <= size);
        &self.members[lo..hi]
    }

    pub fn min_cardinality(&self) -> Option<u32> {
        self.members.first().map(|s| s.cardinality())
    }

    pub fn max_cardinality(&self) -> Option<u32> {
        self.members.last().map(|s| s.cardinality())
    }

    /// The `ell`-shadow: every set obtained from a member by deleting exactly
    /// `ell` elements.
    pub fn shadow(&self, ell: u32) -> Result<SetFamily> {
        if ell == 0 {
            return crate::error::domain("shadow order must be at least 1");
        }
        let mut out = Vec::new();
        for s in &self.members {
            let c = s.cardinality();
            if c >= ell {
                out.extend(s.subsets_of_size(c - ell));
            }
        }
        SetFamily::new(self.n, out)
    }

    /// True iff no two distinct members are comparable.
    pub fn is_antichain(&self) -> bool {
        comparable_pair(&self.members).is_none()
    }

    /// Replaces each member by its complement in `[n]`.
    pub fn complement(&self) -> SetFamily {
        let mut members: Vec<ElementSet> =
            self.members.iter().map(|s| s.complement(self.n)).collect();
        members.sort_unstable();
        SetFamily { n: self.n, members }
    }

    /// Sets of the given cardinality that are not members, in colex order.
    pub fn missing_at_level(&self, size: u32) -> Vec<ElementSet> {
        colex_masks(self.n, size)
            .map(ElementSet::raw)
            .filter(|s| !self.contains(*s))
            .collect()
    }
}

/// First comparable pair `(smaller, larger)` in the slice, scanning in order.
pub(crate) fn comparable_pair(sets: &[ElementSet]) -> Option<(ElementSet, ElementSet)> {
    for (i, &a) in sets.iter().enumerate() {
        for &b in &sets[i + 1..] {
            if a.is_proper_subset_of(b) {
                return Some((a, b));
            }
            if b.is_proper_subset_of(a) {
                return Some((b, a));
            }
        }
    }
    None
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, ", self.n)?;
        f.debug_list().entries(self.members.iter()).finish()?;
        f.write_str(")")
    }
}

impl Serialize for SetFamily {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SetFamily", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("members", &self.members)?;
        st.end()
    }
}

/// A uniformly random family of `s` distinct subsets of `[n]`.
pub fn random_family<R: Rng + ?Sized>(n: u32, s: usize, rng: &mut R) -> Result<SetFamily> {
    check_n(n)?;
    let total = 1usize << n;
    if s > total {
        return crate::error::domain(format!("cannot choose {s} distinct subsets of [{n}]"));
    }
    let picks = rand::seq::index::sample(rng, total, s);
    SetFamily::new(n, picks.into_iter().map(|b| ElementSet::raw(b as u32)))
}
