//! Exact k-chain counting.
//!
//! `f_1(F) = 1` and `f_j(F) = sum of f_{j-1}(G) over members G strictly inside
//! F`; the number of k-chains is the sum of `f_k`. Two evaluation routes are
//! provided: a pairwise scan over members (quadratic in the family size) and a
//! subset-sum transform over the whole cube (`n * 2^n` per layer). Both run in
//! `u128` first and redo the work in `BigUint` if anything overflows.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{as_string, factorial, Tally};
use crate::error::{domain, Error, Result};
use crate::lattice::{check_n, ElementSet, SetFamily};

/// Strictly increasing sequence of sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    sets: Vec<ElementSet>,
}

impl Chain {
    pub fn new(sets: Vec<ElementSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::NotAChain(0));
        }
        for (i, w) in sets.windows(2).enumerate() {
            if !w[0].is_proper_subset_of(w[1]) {
                return Err(Error::NotAChain(i + 1));
            }
        }
        Ok(Chain { sets })
    }

    pub fn sets(&self) -> &[ElementSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn bottom(&self) -> ElementSet {
        self.sets[0]
    }

    pub fn top(&self) -> ElementSet {
        *self.sets.last().unwrap()
    }

    /// True when every step adds exactly one element.
    pub fn is_unit_step(&self) -> bool {
        self.sets
            .windows(2)
            .all(|w| w[1].cardinality() - w[0].cardinality() == 1)
    }

    fn check_over(&self, n: u32) -> Result<()> {
        check_n(n)?;
        ElementSet::from_bits(self.top().bits(), n).map(|_| ())
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                f.write_str(" < ")?;
            }
            write!(f, "{{{}}}", if s.is_empty() { String::new() } else { s.to_string() })?;
        }
        Ok(())
    }
}

/// Number of permutations of `[n]` having the given sets as prefixes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PermutationWeight(#[serde(serialize_with = "as_string")] pub BigUint);

impl PermutationWeight {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl fmt::Display for PermutationWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `|F|! (n - |F|)!`
pub fn perm_weight_set(set: ElementSet, n: u32) -> Result<PermutationWeight> {
    ElementSet::from_bits(set.bits(), n)?;
    let c = set.cardinality();
    Ok(PermutationWeight(factorial(c) * factorial(n - c)))
}

/// `|F_1|! * prod |F_{i+1} \ F_i|! * (n - |F_k|)!`
pub fn perm_weight_chain(chain: &Chain, n: u32) -> Result<PermutationWeight> {
    chain.check_over(n)?;
    let mut w = factorial(chain.bottom().cardinality());
    for pair in chain.sets.windows(2) {
        w *= factorial(pair[1].cardinality() - pair[0].cardinality());
    }
    w *= factorial(n - chain.top().cardinality());
    Ok(PermutationWeight(w))
}

/// The endpoint a chain is charged to: the bottom when
/// `|F_1| + |F_k| < n`, the top otherwise.
pub fn owner_of(chain: &Chain, n: u32) -> Result<ElementSet> {
    chain.check_over(n)?;
    let (b, t) = (chain.bottom(), chain.top());
    Ok(if b.cardinality() + t.cardinality() < n { b } else { t })
}

/// Which DP evaluates the chain recurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    Auto,
    Pairwise,
    SubsetSum,
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return domain(format!("chain length must be at least 2, got {k}"));
    }
    Ok(())
}

/// Number of k-chains among the members of `fam`.
pub fn count_k_chains(fam: &SetFamily, k: u32) -> Result<BigUint> {
    count_k_chains_with(fam, k, Backend::Auto)
}

pub fn count_k_chains_with(fam: &SetFamily, k: u32, backend: Backend) -> Result<BigUint> {
    check_k(k)?;
    let ends = ending_counts(fam.n(), fam.members(), k, backend);
    Ok(ends.into_iter().sum())
}

/// Number of k-chains ending at each member, in member order.
pub(crate) fn ending_counts(
    n: u32,
    members: &[ElementSet],
    k: u32,
    backend: Backend,
) -> Vec<BigUint> {
    if members.is_empty() {
        return Vec::new();
    }
    let span = members.last().unwrap().cardinality() - members[0].cardinality() + 1;
    if k > span || k as usize > members.len() {
        return vec![BigUint::zero(); members.len()];
    }
    let backend = match backend {
        Backend::Auto => pick_backend(n, members.len()),
        b => b,
    };
    let run = |wide: bool| -> Option<Vec<BigUint>> {
        if wide {
            Some(match backend {
                Backend::SubsetSum => subset_sum_dp::<BigUint>(n, members, k)?,
                _ => pairwise_dp::<BigUint>(members, k)?,
            })
        } else {
            let v = match backend {
                Backend::SubsetSum => subset_sum_dp::<u128>(n, members, k)?,
                _ => pairwise_dp::<u128>(members, k)?,
            };
            Some(v.into_iter().map(BigUint::from).collect())
        }
    };
    run(false).or_else(|| run(true)).expect("big-integer DP cannot overflow")
}

fn pick_backend(n: u32, s: usize) -> Backend {
    let pairwise = (s as f64) * (s as f64) / 2.0;
    let cube = (n as f64) * (1u64 << n) as f64 / 2.0 + (1u64 << n) as f64;
    if cube < pairwise {
        Backend::SubsetSum
    } else {
        Backend::Pairwise
    }
}

/// Start index of each member's cardinality level.
fn level_starts(members: &[ElementSet]) -> Vec<usize> {
    let mut out = Vec::with_capacity(members.len());
    let mut start = 0;
    for (i, s) in members.iter().enumerate() {
        if i > 0 && s.cardinality() != members[i - 1].cardinality() {
            start = i;
        }
        out.push(start);
    }
    out
}

const PAR_MIN: usize = 512;

fn pairwise_dp<T: Tally>(members: &[ElementSet], k: u32) -> Option<Vec<T>> {
    let starts = level_starts(members);
    let mut prev: Vec<T> = vec![T::unit(); members.len()];
    for _ in 1..k {
        let step = |i: usize| -> Option<T> {
            let f = members[i];
            let mut acc = T::nil();
            for p in 0..starts[i] {
                if !prev[p].is_nil() && members[p].is_subset_of(f) {
                    acc.add_assign_checked(&prev[p])?;
                }
            }
            Some(acc)
        };
        let next: Option<Vec<T>> = if members.len() >= PAR_MIN {
            (0..members.len()).into_par_iter().map(step).collect()
        } else {
            (0..members.len()).map(step).collect()
        };
        prev = next?;
    }
    Some(prev)
}

/// In-place subset-sum transform: afterwards `a[X] = sum of a[Y], Y ⊆ X`.
fn zeta<T: Tally>(a: &mut [T], n: u32) -> Option<()> {
    for b in 0..n {
        let half = 1usize << b;
        let ok = a.par_chunks_mut(half * 2).all(|chunk| {
            let (lo, hi) = chunk.split_at_mut(half);
            lo.iter()
                .zip(hi.iter_mut())
                .all(|(l, h)| h.add_assign_checked(l).is_some())
        });
        if !ok {
            return None;
        }
    }
    Some(())
}

fn subset_sum_dp<T: Tally>(n: u32, members: &[ElementSet], k: u32) -> Option<Vec<T>> {
    let mut prev: Vec<T> = vec![T::unit(); members.len()];
    for _ in 1..k {
        let mut cube = vec![T::nil(); 1usize << n];
        for (s, v) in members.iter().zip(&prev) {
            cube[s.bits() as usize] = v.clone();
        }
        zeta(&mut cube, n)?;
        for (i, s) in members.iter().enumerate() {
            let mut v = cube[s.bits() as usize].clone();
            v.sub_exact(&prev[i]);
            prev[i] = v;
        }
    }
    Some(prev)
}

/// Number of pairs `(X, Y)` with `X` from `a`, `Y` from `b` and one strictly
/// inside the other.
pub fn count_2chains_cross(a: &SetFamily, b: &SetFamily) -> Result<u64> {
    if a.n() != b.n() {
        return Err(Error::GroundMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let n = a.n();
    let pairwise = a.len() as f64 * b.len() as f64;
    let cube = 2.0 * n as f64 * (1u64 << n) as f64;
    if pairwise <= cube {
        let mut count = 0u64;
        for x in a.iter() {
            for y in b.iter() {
                if x.is_proper_subset_of(y) || y.is_proper_subset_of(x) {
                    count += 1;
                }
            }
        }
        return Ok(count);
    }
    let size = 1usize << n;
    let full = (size - 1) as u32;
    let mut below = vec![0u64; size];
    for x in a.iter() {
        below[x.bits() as usize] = 1;
    }
    // complement indexing turns the subset transform into a superset one
    let mut above = vec![0u64; size];
    for x in a.iter() {
        above[(!x.bits() & full) as usize] = 1;
    }
    zeta(&mut below, n).expect("u64 cannot overflow at n <= 24");
    zeta(&mut above, n).expect("u64 cannot overflow at n <= 24");
    let mut count = 0u64;
    for y in b.iter() {
        let own = u64::from(a.contains(y));
        count += below[y.bits() as usize] - own;
        count += above[(!y.bits() & full) as usize] - own;
    }
    Ok(count)
}

/// Exact chain statistics of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCountReport {
    pub n: u32,
    pub k: u32,
    #[serde(serialize_with = "as_string")]
    pub total: BigUint,
    pub per_owner: Vec<OwnerCount>,
    #[serde(serialize_with = "as_string")]
    pub c1: BigUint,
    #[serde(serialize_with = "as_string")]
    pub c2: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OwnerCount {
    pub set: ElementSet,
    #[serde(serialize_with = "as_string")]
    pub count: BigUint,
}

impl ChainCountReport {
    pub fn owner_count(&self, set: ElementSet) -> Option<&BigUint> {
        self.per_owner
            .binary_search_by(|o| o.set.cmp(&set))
            .ok()
            .map(|i| &self.per_owner[i].count)
    }
}

/// For each member `G`, the number of k-chains ending at `G` whose bottom has
/// at least `n - |G| + offset` elements.
fn top_charged(fam: &SetFamily, k: u32, offset: u32) -> Vec<BigUint> {
    let n = fam.n();
    let members = fam.members();
    let mut out = vec![BigUint::zero(); members.len()];
    let mut c = 0;
    while c <= n {
        let tops = fam.level_members(c);
        if !tops.is_empty() {
            let floor = (n + offset).saturating_sub(c);
            let lo = members.partition_point(|s| s.cardinality() < floor);
            let hi = members.partition_point(|s| s.cardinality() <= c);
            if lo < hi {
                let sub = &members[lo..hi];
                let ends = ending_counts(n, sub, k, Backend::Auto);
                let first_top = hi - tops.len();
                for (j, v) in ends.into_iter().enumerate() {
                    if lo + j >= first_top {
                        out[lo + j] = v;
                    }
                }
            }
        }
        c += 1;
    }
    out
}

/// Chains with every step of size exactly one.
fn unit_step_count(fam: &SetFamily, k: u32) -> BigUint {
    let members = fam.members();
    let mut prev: Vec<BigUint> = vec![BigUint::from(1u32); members.len()];
    for _ in 1..k {
        let next: Vec<BigUint> = members
            .iter()
            .map(|&f| {
                f.elements()
                    .filter_map(|x| fam.index_of(f.without(x)))
                    .map(|p| &prev[p])
                    .sum()
            })
            .collect();
        prev = next;
    }
    prev.into_iter().sum()
}

/// Total, per-owner split and unit-step split of the k-chains of `fam`.
pub fn owner_counts(fam: &SetFamily, k: u32) -> Result<ChainCountReport> {
    check_k(k)?;
    let total = count_k_chains(fam, k)?;
    let as_top = top_charged(fam, k, 0);
    let comp = fam.complement();
    let as_bottom_c = top_charged(&comp, k, 1);
    let per_owner: Vec<OwnerCount> = fam
        .iter()
        .zip(as_top)
        .map(|(set, top)| {
            let j = comp.index_of(set.complement(fam.n())).unwrap();
            OwnerCount {
                set,
                count: top + &as_bottom_c[j],
            }
        })
        .collect();
    let owned: BigUint = per_owner.iter().map(|o| &o.count).sum();
    if owned != total {
        return Err(Error::Contract(format!(
            "owner counts sum to {owned}, expected {total}"
        )));
    }
    let c1 = unit_step_count(fam, k);
    let c2 = &total - &c1;
    Ok(ChainCountReport {
        n: fam.n(),
        k,
        total,
        per_owner,
        c1,
        c2,
    })
}

/// Chains `F_1 < ... < F_k` with `|F_{i+1}| - |F_i| >= alphas[i]`.
pub fn count_chains_step_constrained(fam: &SetFamily, k: u32, alphas: &[u32]) -> Result<BigUint> {
    check_k(k)?;
    if alphas.len() != (k - 1) as usize {
        return domain(format!("expected {} step sizes, got {}", k - 1, alphas.len()));
    }
    if alphas.iter().any(|&a| a == 0) {
        return domain("step sizes must be positive");
    }
    let members = fam.members();
    let starts = level_starts(members);
    let mut prev: Vec<BigUint> = vec![BigUint::from(1u32); members.len()];
    for &alpha in alphas {
        let next: Vec<BigUint> = members
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let cap = f.cardinality();
                let mut acc = BigUint::zero();
                for p in 0..starts[i] {
                    let g = members[p];
                    if g.cardinality() + alpha <= cap && g.is_subset_of(f) {
                        acc += &prev[p];
                    }
                }
                acc
            })
            .collect();
        prev = next;
    }
    Ok(prev.into_iter().sum())
}
