//! Permutation-counting audit of a family.
//!
//! A permutation `σ` of `[n]` contains the set `F` when `F` is one of its
//! prefixes. Summing over all `n!` permutations gives the identities audited
//! here: the number of (permutation, member) incidences is
//! `Σ |F|!(n-|F|)!`, and the number of (permutation, k-chain) incidences is
//! the sum of the chain weights.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{as_string, factorial};
use crate::error::{domain, Result};
use crate::lattice::SetFamily;

/// Ground sizes at which the permutations are enumerated directly.
pub const ENUMERATION_MAX_N: u32 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub name: &'static str,
    #[serde(serialize_with = "as_string")]
    pub lhs: BigInt,
    #[serde(serialize_with = "as_string")]
    pub rhs: BigInt,
    /// `lhs - rhs`
    #[serde(serialize_with = "as_string")]
    pub margin: BigInt,
    pub holds: bool,
}

impl Inequality {
    fn new(name: &'static str, lhs: BigInt, rhs: BigInt) -> Self {
        let margin = &lhs - &rhs;
        let holds = margin >= BigInt::zero();
        Inequality {
            name,
            lhs,
            rhs,
            margin,
            holds,
        }
    }
}

/// Totals obtained by walking every permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermutationTotals {
    /// Σ_σ number of members that are prefixes of σ.
    #[serde(serialize_with = "as_string")]
    pub prefix_incidences: BigUint,
    /// Σ_σ number of k-chains made of prefixes of σ.
    #[serde(serialize_with = "as_string")]
    pub chain_incidences: BigUint,
    pub matches_formula: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LymAudit {
    pub n: u32,
    pub k: u32,
    pub size: usize,
    #[serde(serialize_with = "as_string")]
    pub set_weight_sum: BigUint,
    #[serde(serialize_with = "as_string")]
    pub chain_weight_sum: BigUint,
    #[serde(serialize_with = "as_string")]
    pub long_chain_weight_sum: BigUint,
    pub inequalities: Vec<Inequality>,
    pub enumeration: Option<PermutationTotals>,
}

impl LymAudit {
    pub fn all_hold(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
            && self.enumeration.as_ref().map_or(true, |e| e.matches_formula)
    }
}

/// Σ over k-chains of `|F_1|! Π (step)! (n-|F_k|)!`, restricted to unit-step
/// chains when `unit_only`.
fn weighted_chain_total(fam: &SetFamily, k: u32, unit_only: bool) -> BigUint {
    let n = fam.n();
    let members = fam.members();
    let facts: Vec<BigUint> = (0..=n).map(factorial).collect();
    let mut prev: Vec<BigUint> = members
        .iter()
        .map(|f| facts[f.cardinality() as usize].clone())
        .collect();
    for _ in 1..k {
        let next: Vec<BigUint> = members
            .iter()
            .map(|&f| {
                let c = f.cardinality();
                let mut acc = BigUint::zero();
                if unit_only {
                    for x in f.elements() {
                        if let Some(p) = fam.index_of(f.without(x)) {
                            acc += &prev[p];
                        }
                    }
                } else {
                    for (p, &g) in members.iter().enumerate() {
                        if g.cardinality() >= c {
                            break;
                        }
                        if g.is_subset_of(f) && !prev[p].is_zero() {
                            acc += &prev[p] * &facts[(c - g.cardinality()) as usize];
                        }
                    }
                }
                acc
            })
            .collect();
        prev = next;
    }
    members
        .iter()
        .zip(prev)
        .map(|(f, w)| w * &facts[(n - f.cardinality()) as usize])
        .sum()
}

fn enumerate_permutations(fam: &SetFamily, k: u32) -> (BigUint, BigUint) {
    let n = fam.n();
    let table = fam.membership_table();
    let chains_per: Vec<u64> = (0..=n + 1)
        .map(|m| crate::arith::binomial_u64(m, k))
        .collect();
    let mut prefix = 0u64;
    let mut chains = 0u64;
    let full = (1u32 << n) - 1;
    // depth-first over prefixes; each leaf is one permutation
    fn walk(
        mask: u32,
        full: u32,
        hits: u32,
        table: &[bool],
        chains_per: &[u64],
        prefix: &mut u64,
        chains: &mut u64,
    ) {
        let hits = hits + u32::from(table[mask as usize]);
        if mask == full {
            *prefix += u64::from(hits);
            *chains += chains_per[hits as usize];
            return;
        }
        let mut rest = full & !mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest &= rest - 1;
            walk(mask | bit, full, hits, table, chains_per, prefix, chains);
        }
    }
    walk(0, full, 0, &table, &chains_per, &mut prefix, &mut chains);
    (BigUint::from(prefix), BigUint::from(chains))
}

/// Evaluates the three permutation-counting inequalities for `fam`:
///
/// 1. `(k-1) n! >= ΣS - ΣW`
/// 2. `(k²-1) n! >= k ΣS - ΣW`
/// 3. `(k²-k) n! >= (k-1) ΣS - ΣW₂`
///
/// where `ΣS` sums set weights, `ΣW` sums k-chain weights and `ΣW₂` only
/// counts chains with a step of two or more.
pub fn lym_audit(fam: &SetFamily, k: u32) -> Result<LymAudit> {
    if k < 2 {
        return domain(format!("chain length must be at least 2, got {k}"));
    }
    let n = fam.n();
    let nf = BigInt::from(factorial(n));
    let set_weight_sum: BigUint = fam
        .iter()
        .map(|f| factorial(f.cardinality()) * factorial(n - f.cardinality()))
        .sum();
    let chain_weight_sum = weighted_chain_total(fam, k, false);
    let unit = weighted_chain_total(fam, k, true);
    let long_chain_weight_sum = &chain_weight_sum - &unit;

    let s = BigInt::from(set_weight_sum.clone());
    let w = BigInt::from(chain_weight_sum.clone());
    let w2 = BigInt::from(long_chain_weight_sum.clone());
    let kb = BigInt::from(k);
    let one = BigInt::from(1u32);
    let inequalities = vec![
        Inequality::new("prefix-count", (&kb - &one) * &nf, &s - &w),
        Inequality::new("k-scaled", (&kb * &kb - &one) * &nf, &kb * &s - &w),
        Inequality::new("long-steps", (&kb * &kb - &kb) * &nf, (&kb - &one) * &s - &w2),
    ];

    let enumeration = (n <= ENUMERATION_MAX_N).then(|| {
        let (prefix_incidences, chain_incidences) = enumerate_permutations(fam, k);
        let matches_formula =
            prefix_incidences == set_weight_sum && chain_incidences == chain_weight_sum;
        PermutationTotals {
            prefix_incidences,
            chain_incidences,
            matches_formula,
        }
    });

    Ok(LymAudit {
        n,
        k,
        size: fam.len(),
        set_weight_sum,
        chain_weight_sum,
        long_chain_weight_sum,
        inequalities,
        enumeration,
    })
}
