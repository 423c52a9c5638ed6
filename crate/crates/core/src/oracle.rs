//! Exact minima of k-chain counts over all families of a given size, for
//! small ground sets.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::arith::{as_string, binomial_u64, ratio};
use crate::bounds::stability_weights;
use crate::error::{domain, Result};
use crate::extremal::{canonical_family, check_extremal_2chain, conjectured_min};
use crate::lattice::{colex_masks, ElementSet, SetFamily};
use crate::text::{write_family, SetNotation};

pub const EXHAUSTIVE_MAX_N: u32 = 4;
pub const BRANCH_AND_BOUND_MAX_N: u32 = 6;
/// Optimal families kept per result; the total is always exact.
pub const WITNESS_CAP: usize = 10_000;

fn as_texts<S: Serializer>(fams: &[SetFamily], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(fams.iter().map(|f| write_family(f, SetNotation::Elements)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub n: u32,
    pub s: u64,
    pub k: u32,
    #[serde(serialize_with = "as_string")]
    pub minimum: BigUint,
    #[serde(serialize_with = "as_texts")]
    pub witnesses: Vec<SetFamily>,
    /// Number of optimal families, when the search enumerates all of them.
    pub optimal_total: Option<u64>,
    pub families_examined: u64,
    /// False when a time budget cut the search short; `minimum` is then only
    /// an upper bound.
    pub complete: bool,
}

/// Every subset of `[n]` in canonical order.
fn canonical_subsets(n: u32) -> Vec<ElementSet> {
    (0..=n)
        .flat_map(|size| colex_masks(n, size))
        .map(ElementSet::raw)
        .collect()
}

/// `below[i]`: indices `j < i` with `sets[j] ⊊ sets[i]`.
fn strict_below(sets: &[ElementSet]) -> Vec<u32> {
    sets.iter()
        .map(|&x| {
            (0..sets.len())
                .filter(|&j| sets[j].is_proper_subset_of(x))
                .fold(0u32, |acc, j| acc | 1 << j)
        })
        .collect()
}

/// k-chains in the family whose members are the set bits of `pick`, indexing
/// into canonical order.
fn count_picked(pick: u32, below: &[u32], k: u32, scratch: &mut [[u64; 17]]) -> u64 {
    let mut total = 0;
    let mut rest = pick;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let row = &mut [0u64; 17];
        row[1] = 1;
        let mut lower = below[i] & pick;
        while lower != 0 {
            let p = lower.trailing_zeros() as usize;
            lower &= lower - 1;
            for j in 2..=k as usize {
                row[j] += scratch[p][j - 1];
            }
        }
        total += row[k as usize];
        scratch[i] = *row;
    }
    total
}

fn family_of(n: u32, sets: &[ElementSet], pick: u32) -> SetFamily {
    let mut rest = pick;
    let mut out = Vec::with_capacity(pick.count_ones() as usize);
    while rest != 0 {
        out.push(sets[rest.trailing_zeros() as usize]);
        rest &= rest - 1;
    }
    // canonical indices ascend, so the sets are already in order
    SetFamily::from_sorted_unchecked(n, out)
}

#[derive(Default)]
struct Tally {
    min: Option<u64>,
    picks: Vec<u32>,
    total: u64,
    examined: u64,
}

impl Tally {
    fn see(&mut self, pick: u32, c: u64) {
        self.examined += 1;
        match self.min {
            Some(m) if c > m => {}
            Some(m) if c == m => {
                self.total += 1;
                if self.picks.len() < WITNESS_CAP {
                    self.picks.push(pick);
                }
            }
            _ => {
                self.min = Some(c);
                self.total = 1;
                self.picks = vec![pick];
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.examined += other.examined;
        match (self.min, other.min) {
            (_, None) => self,
            (None, _) => Tally { examined: self.examined, ..other },
            (Some(a), Some(b)) if b < a => Tally { examined: self.examined, ..other },
            (Some(a), Some(b)) if a < b => self,
            _ => {
                self.total += other.total;
                let room = WITNESS_CAP - self.picks.len();
                self.picks.extend(other.picks.into_iter().take(room));
                self
            }
        }
    }
}

/// Exact minimum number of k-chains over all families of `s` subsets of
/// `[n]`, with every optimal family (up to [`WITNESS_CAP`]).
pub fn exhaustive_min(n: u32, s: u64, k: u32) -> Result<OracleResult> {
    if n == 0 || n > EXHAUSTIVE_MAX_N {
        return domain(format!("exhaustive search needs 1 <= n <= {EXHAUSTIVE_MAX_N}, got {n}"));
    }
    if k == 0 || k > 16 {
        return domain(format!("chain length must lie in 1..=16, got {k}"));
    }
    let width = 1u32 << n;
    if s > width as u64 {
        return domain(format!("s={s} exceeds 2^{n}"));
    }
    let sets = canonical_subsets(n);
    let below = strict_below(&sets);
    let s = s as u32;

    let tally = if s == 0 {
        let mut t = Tally::default();
        t.see(0, 0);
        t
    } else {
        // partition by the lowest picked index
        (0..=width - s)
            .into_par_iter()
            .map(|first| {
                let mut t = Tally::default();
                let mut scratch = vec![[0u64; 17]; width as usize];
                let hi_width = width - first - 1;
                for rest in colex_masks(hi_width, s - 1) {
                    let pick = 1u32 << first | rest << (first + 1);
                    let c = count_picked(pick, &below, k, &mut scratch);
                    t.see(pick, c);
                }
                t
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Tally::default(), Tally::merge)
    };

    let mut witnesses: Vec<SetFamily> = tally.picks.iter().map(|&p| family_of(n, &sets, p)).collect();
    witnesses.sort_by(|a, b| a.members().cmp(b.members()));
    Ok(OracleResult {
        n,
        s: s as u64,
        k,
        minimum: BigUint::from(tally.min.unwrap_or(0)),
        witnesses,
        optimal_total: Some(tally.total),
        families_examined: tally.examined,
        complete: true,
    })
}

struct Search<'a> {
    sets: &'a [ElementSet],
    below: &'a [u64],
    k: usize,
    s: usize,
    /// Weight of each subset in the additive lower bound, if pruning by it.
    weights: Option<(Vec<BigRational>, BigRational)>,
    /// `suffix_levels[i]`: per-level counts of subsets at indices `>= i`.
    suffix_levels: Vec<Vec<u64>>,
    level_order: Vec<usize>,
    best: u64,
    best_pick: Option<u64>,
    ends: Vec<[u64; 17]>,
    chosen: Vec<usize>,
    examined: u64,
    deadline: Instant,
    timed_out: bool,
    ticks: u64,
}

impl Search<'_> {
    /// Lower bound on any completion using `need` more subsets from index
    /// `from` on.
    fn completion_bound(&self, from: usize, need: usize, chosen_weight: &BigRational) -> Option<BigRational> {
        let (weights, offset) = self.weights.as_ref()?;
        let mut acc = chosen_weight.clone();
        let mut need = need as u64;
        for &level in &self.level_order {
            if need == 0 {
                break;
            }
            let take = self.suffix_levels[from][level].min(need);
            acc += &weights[level] * BigRational::from_integer(take.into());
            need -= take;
        }
        Some(acc - offset)
    }

    fn run(&mut self, idx: usize, partial: u64, chosen_weight: BigRational) {
        if self.timed_out {
            return;
        }
        self.ticks += 1;
        if self.ticks % 4096 == 0 && Instant::now() >= self.deadline {
            self.timed_out = true;
            return;
        }
        if self.chosen.len() == self.s {
            self.examined += 1;
            if partial < self.best {
                self.best = partial;
                self.best_pick = Some(self.chosen.iter().fold(0u64, |a, &i| a | 1 << i));
            }
            return;
        }
        let need = self.s - self.chosen.len();
        if self.sets.len() - idx < need || partial >= self.best {
            return;
        }
        if let Some(lb) = self.completion_bound(idx, need, &chosen_weight) {
            if lb >= ratio(BigUint::from(self.best)) {
                return;
            }
        }
        // take sets[idx]
        let mut row = [0u64; 17];
        row[1] = 1;
        for &p in &self.chosen {
            if self.below[idx] >> p & 1 == 1 {
                for j in 2..=self.k {
                    row[j] += self.ends[p][j - 1];
                }
            }
        }
        let added = partial + row[self.k];
        if added < self.best {
            self.ends[idx] = row;
            self.chosen.push(idx);
            let w = match &self.weights {
                Some((ws, _)) => &chosen_weight + &ws[self.sets[idx].cardinality() as usize],
                None => chosen_weight.clone(),
            };
            self.run(idx + 1, added, w);
            self.chosen.pop();
        }
        // skip sets[idx]
        self.run(idx + 1, partial, chosen_weight);
    }
}

/// Depth-first search over subsets in canonical order, pruned by the chains
/// already formed and by the additive per-level lower bound on any
/// completion. Starts from the centered family as incumbent; `complete` is
/// false when `budget` ran out first.
pub fn branch_and_bound_min(n: u32, s: u64, k: u32, budget: Duration) -> Result<OracleResult> {
    if n == 0 || n > BRANCH_AND_BOUND_MAX_N {
        return domain(format!("branch and bound needs 1 <= n <= {BRANCH_AND_BOUND_MAX_N}, got {n}"));
    }
    if k < 2 || k > 16 {
        return domain(format!("chain length must lie in 2..=16, got {k}"));
    }
    if s > 1u64 << n {
        return domain(format!("s={s} exceeds 2^{n}"));
    }
    let start = Instant::now();
    let canon = canonical_family(n, s)?;
    let incumbent = u64::try_from(conjectured_min(n, s, k)?).expect("small ground set");
    let sets = canonical_subsets(n);
    let below: Vec<u64> = sets
        .iter()
        .map(|&x| {
            (0..sets.len())
                .filter(|&j| sets[j].is_proper_subset_of(x))
                .fold(0u64, |acc, j| acc | 1 << j)
        })
        .collect();
    // the additive bound can fail when k = n and an extreme set is present
    let weights = if k < n { Some(stability_weights(n, k)?) } else { None };
    let mut suffix_levels = vec![vec![0u64; n as usize + 1]; sets.len() + 1];
    for i in (0..sets.len()).rev() {
        suffix_levels[i] = suffix_levels[i + 1].clone();
        suffix_levels[i][sets[i].cardinality() as usize] += 1;
    }
    let mut level_order: Vec<usize> = (0..=n as usize).collect();
    if let Some((w, _)) = &weights {
        level_order.sort_by(|&a, &b| w[a].cmp(&w[b]));
    }
    let mut search = Search {
        sets: &sets,
        below: &below,
        k: k as usize,
        s: s as usize,
        weights,
        suffix_levels,
        level_order,
        best: incumbent,
        best_pick: None,
        ends: vec![[0; 17]; sets.len()],
        chosen: Vec::new(),
        examined: 0,
        deadline: start + budget,
        timed_out: budget.is_zero(),
        ticks: 0,
    };
    search.run(0, 0, BigRational::zero());

    let witness = match search.best_pick {
        Some(p) => SetFamily::new(
            n,
            (0..sets.len()).filter(|&i| p >> i & 1 == 1).map(|i| sets[i]),
        )?,
        None => canon,
    };
    Ok(OracleResult {
        n,
        s,
        k,
        minimum: BigUint::from(search.best),
        witnesses: vec![witness],
        optimal_total: None,
        families_examined: search.examined,
        complete: !search.timed_out,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureRow {
    pub s: u64,
    #[serde(serialize_with = "as_string")]
    pub oracle_min: BigUint,
    #[serde(serialize_with = "as_string")]
    pub conjectured: BigUint,
    pub equal: bool,
    /// An optimal family beating the centered one, when there is one.
    #[serde(serialize_with = "opt_text")]
    pub counterexample: Option<SetFamily>,
}

fn opt_text<S: Serializer>(f: &Option<SetFamily>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match f {
        Some(f) => s.serialize_some(&write_family(f, SetNotation::Elements)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub n: u32,
    pub k: u32,
    pub rows: Vec<ConjectureRow>,
    pub all_equal: bool,
}

/// Compares the exhaustive minimum with the centered family's count for every
/// `s` in the range.
pub fn verify_conjecture(n: u32, k: u32, s_range: std::ops::RangeInclusive<u64>) -> Result<ConjectureReport> {
    let mut rows = Vec::new();
    for s in s_range {
        let o = exhaustive_min(n, s, k)?;
        let conjectured = conjectured_min(n, s, k)?;
        let equal = o.minimum == conjectured;
        let counterexample = (!equal).then(|| o.witnesses[0].clone());
        rows.push(ConjectureRow {
            s,
            oracle_min: o.minimum,
            conjectured,
            equal,
            counterexample,
        });
    }
    let all_equal = rows.iter().all(|r| r.equal);
    Ok(ConjectureReport { n, k, rows, all_equal })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IffReport {
    pub n: u32,
    pub s: u64,
    #[serde(serialize_with = "as_string")]
    pub minimum: BigUint,
    pub optimal: u64,
    pub certified: u64,
    /// Optimal families the certificate rejects (capped).
    #[serde(serialize_with = "as_texts")]
    pub optimal_not_certified: Vec<SetFamily>,
    /// Certified families that are not optimal (capped).
    #[serde(serialize_with = "as_texts")]
    pub certified_not_optimal: Vec<SetFamily>,
    pub holds: bool,
}

const MISMATCH_CAP: usize = 20;

/// Checks that the families with the fewest 2-chains are exactly those
/// passing [`check_extremal_2chain`].
pub fn verify_iff_characterization(n: u32, s: u64) -> Result<IffReport> {
    if n == 0 || n > EXHAUSTIVE_MAX_N {
        return domain(format!("exhaustive search needs 1 <= n <= {EXHAUSTIVE_MAX_N}, got {n}"));
    }
    let sperner = binomial_u64(n, n / 2);
    if s < sperner || s > 1u64 << n {
        return domain(format!("s={s} outside [{sperner}, {}]", 1u64 << n));
    }
    let width = 1u32 << n;
    let sets = canonical_subsets(n);
    let below = strict_below(&sets);
    let mut scratch = vec![[0u64; 17]; width as usize];
    let mut rows: Vec<(u32, u64, bool)> = Vec::new();
    for pick in colex_masks(width, s as u32) {
        let c = count_picked(pick, &below, 2, &mut scratch);
        let cert = check_extremal_2chain(&family_of(n, &sets, pick))?;
        rows.push((pick, c, cert.satisfied));
    }
    let min = rows.iter().map(|r| r.1).min().unwrap_or(0);
    let mut report = IffReport {
        n,
        s,
        minimum: BigUint::from(min),
        optimal: 0,
        certified: 0,
        optimal_not_certified: vec![],
        certified_not_optimal: vec![],
        holds: true,
    };
    for (pick, c, ok) in rows {
        let optimal = c == min;
        report.optimal += u64::from(optimal);
        report.certified += u64::from(ok);
        if optimal != ok {
            report.holds = false;
            let list = if optimal {
                &mut report.optimal_not_certified
            } else {
                &mut report.certified_not_optimal
            };
            if list.len() < MISMATCH_CAP {
                list.push(family_of(n, &sets, pick));
            }
        }
    }
    Ok(report)
}

/// Counts k-chains by listing every k-subset of members and testing it.
/// Independent of the dynamic programs; only for small families.
pub fn count_k_chains_naive(fam: &SetFamily, k: u32) -> u64 {
    fn go(members: &[ElementSet], start: usize, last: Option<ElementSet>, left: u32) -> u64 {
        if left == 0 {
            return 1;
        }
        (start..members.len())
            .filter(|&i| last.is_none_or(|l| l.is_proper_subset_of(members[i])))
            .map(|i| go(members, i + 1, Some(members[i]), left - 1))
            .sum()
    }
    if k == 0 {
        return 1;
    }
    go(fam.members(), 0, None, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::count_k_chains;

    fn fam(n: u32, lists: &[&[u32]]) -> SetFamily {
        SetFamily::from_lists(n, lists).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn exhaustive_examples() {
        let o = exhaustive_min(2, 3, 2).unwrap();
        assert_eq!(o.minimum, big(2));
        assert_eq!(o.families_examined, 4);

        let o = exhaustive_min(3, 4, 2).unwrap();
        assert_eq!(o.minimum, big(2));
        assert_eq!(o.families_examined, 70);
        assert!(o.witnesses.contains(&fam(3, &[&[1], &[2], &[3], &[1, 2]])));
        assert_eq!(o.optimal_total, Some(o.witnesses.len() as u64));

        let o = exhaustive_min(4, 11, 3).unwrap();
        assert_eq!(o.minimum, big(6));
        assert_eq!(o.families_examined, 4368);

        assert!(exhaustive_min(3, 9, 2).is_err());
        assert!(exhaustive_min(5, 1, 2).is_err());
    }

    #[test]
    fn witnesses_recount_to_minimum() {
        for (n, s, k) in [(3, 5, 2), (4, 9, 2), (4, 12, 3), (4, 16, 4), (4, 0, 2)] {
            let o = exhaustive_min(n, s, k).unwrap();
            for w in &o.witnesses {
                assert_eq!(w.len() as u64, s);
                assert_eq!(count_k_chains(w, k).unwrap(), o.minimum);
            }
        }
    }

    #[test]
    fn witnesses_are_closed_under_complement() {
        for (n, s, k) in [(3, 4, 2), (4, 7, 2), (4, 11, 3)] {
            let o = exhaustive_min(n, s, k).unwrap();
            for w in &o.witnesses {
                assert!(o.witnesses.contains(&w.complement()));
            }
        }
    }

    #[test]
    fn minimum_is_monotone_and_zero_up_to_middle_sum() {
        for n in 1..=4u32 {
            for k in 2..=4.min(n + 1) {
                let zero_up_to = u64::try_from(crate::bounds::middle_sum(n, k - 1).unwrap()).unwrap();
                let mut prev = big(0);
                for s in 0..=(1u64 << n) {
                    let m = exhaustive_min(n, s, k).unwrap().minimum;
                    assert!(m >= prev);
                    assert_eq!(m.is_zero(), s <= zero_up_to, "n={n} k={k} s={s}");
                    prev = m;
                }
            }
        }
    }

    #[test]
    fn parallel_result_is_deterministic() {
        let a = exhaustive_min(4, 8, 2).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| exhaustive_min(4, 8, 2).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn branch_and_bound_agrees_with_exhaustive() {
        for n in 2..=4u32 {
            for k in 2..=3u32 {
                for s in 0..=(1u64 << n) {
                    let b = branch_and_bound_min(n, s, k, Duration::from_secs(60)).unwrap();
                    assert!(b.complete);
                    assert_eq!(b.minimum, exhaustive_min(n, s, k).unwrap().minimum, "n={n} k={k} s={s}");
                    assert_eq!(count_k_chains(&b.witnesses[0], k).unwrap(), b.minimum);
                }
            }
        }
    }

    #[test]
    fn branch_and_bound_examples() {
        let b = branch_and_bound_min(4, 7, 2, Duration::from_secs(60)).unwrap();
        assert_eq!(b.minimum, big(3));
        let b = branch_and_bound_min(5, 12, 2, Duration::from_secs(120)).unwrap();
        assert!(b.complete);
        assert_eq!(b.minimum, conjectured_min(5, 12, 2).unwrap());
        let z = branch_and_bound_min(5, 12, 2, Duration::ZERO).unwrap();
        assert!(!z.complete);
        assert_eq!(z.minimum, conjectured_min(5, 12, 2).unwrap());
        assert_eq!(z.witnesses, vec![canonical_family(5, 12).unwrap()]);
    }

    #[test]
    fn conjecture_rows() {
        for (n, k) in [(3, 2), (4, 2), (4, 3)] {
            let r = verify_conjecture(n, k, 0..=(1u64 << n)).unwrap();
            assert!(r.all_equal);
            assert_eq!(r.rows.len(), (1usize << n) + 1);
        }
    }

    #[test]
    fn iff_examples() {
        for (n, s) in [(4, 7), (3, 4), (4, 10)] {
            let r = verify_iff_characterization(n, s).unwrap();
            assert!(r.holds, "{r:?}");
            assert!(r.optimal > 0);
        }
        assert!(verify_iff_characterization(4, 5).is_err());
    }

    #[test]
    fn naive_counter_matches_examples() {
        let f = SetFamily::power_set(3).unwrap();
        assert_eq!(count_k_chains_naive(&f, 2), 19);
        assert_eq!(count_k_chains_naive(&f, 4), 6);
        assert_eq!(count_k_chains_naive(&f, 5), 0);
    }

    #[test]
    fn result_json_uses_strings() {
        let o = exhaustive_min(2, 3, 2).unwrap();
        let v = serde_json::to_value(&o).unwrap();
        assert_eq!(v["minimum"], "2");
        assert!(v["witnesses"][0].as_str().unwrap().starts_with("n=2\n"));
    }
}
