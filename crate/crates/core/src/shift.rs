//! Shifting local search: move sets far from the middle level towards it
//! while the number of k-chains strictly drops.

use num_bigint::BigUint;
use serde::Serialize;

use crate::arith::as_string;
use crate::chains::count_k_chains;
use crate::error::{domain, Error, Result};
use crate::lattice::{colex_masks, ElementSet, HalfInteger, SetFamily};
use crate::matching::{hall_decomposition, max_matching, BipartiteGraph};

/// How a step chose its sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    /// Every candidate set moved along a saturating matching.
    Matching,
    /// Only the matched part of a Hall violator moved.
    HallPair,
    /// One set moved to a subset missing an element of a set below it.
    SingleSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftStep {
    pub removed: Vec<ElementSet>,
    pub inserted: Vec<ElementSet>,
    pub ell: u32,
    #[serde(serialize_with = "as_string")]
    pub m: HalfInteger,
    pub kind: ShiftKind,
    /// The step worked on the complemented family.
    pub complemented: bool,
    #[serde(serialize_with = "as_string")]
    pub count_after: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftTrace {
    pub k: u32,
    #[serde(serialize_with = "as_string")]
    pub initial_count: BigUint,
    /// Extreme sets swapped out before shifting, with the count afterwards.
    pub stripped: Option<ShiftStep>,
    pub steps: Vec<ShiftStep>,
    #[serde(serialize_with = "as_string")]
    pub final_count: BigUint,
}

impl ShiftTrace {
    pub fn counts(&self) -> Vec<&BigUint> {
        self.steps.iter().map(|s| &s.count_after).collect()
    }
}

/// Replaces `∅` and `[n]` by the first absent sets (canonical order) that are
/// neither. Never increases any chain count.
pub fn strip_extremes(fam: &SetFamily) -> Result<SetFamily> {
    strip_with_record(fam).map(|(f, _, _)| f)
}

fn strip_with_record(fam: &SetFamily) -> Result<(SetFamily, Vec<ElementSet>, Vec<ElementSet>)> {
    let n = fam.n();
    let extremes: Vec<ElementSet> = [ElementSet::EMPTY, ElementSet::full(n)]
        .into_iter()
        .filter(|&e| fam.contains(e))
        .collect();
    if extremes.is_empty() {
        return Ok((fam.clone(), vec![], vec![]));
    }
    let inner = (1u64 << n).saturating_sub(2);
    if fam.len() as u64 > inner {
        return domain(format!(
            "{} sets cannot avoid both extremes of a ground set of size {n}",
            fam.len()
        ));
    }
    let fresh: Vec<ElementSet> = (1..n)
        .flat_map(|size| colex_masks(n, size))
        .map(ElementSet::raw)
        .filter(|&x| !fam.contains(x))
        .take(extremes.len())
        .collect();
    let out = fam.with_replaced(&extremes, &fresh)?;
    Ok((out, extremes, fresh))
}

/// `twice` the signed distance of the farthest level from the middle and
/// whether the family should be complemented so that level lies above it.
fn orientation(fam: &SetFamily) -> Option<bool> {
    let n = fam.n() as i64;
    let top = 2 * fam.max_cardinality()? as i64 - n;
    let bottom = n - 2 * fam.min_cardinality()? as i64;
    Some(bottom > top)
}

fn recount(fam: &SetFamily, k: u32) -> BigUint {
    count_k_chains(fam, k).expect("k validated by caller")
}

struct Candidate {
    family: SetFamily,
    removed: Vec<ElementSet>,
    inserted: Vec<ElementSet>,
    kind: ShiftKind,
    count: BigUint,
}

/// Tries one shift on a family whose farthest level is at or above the
/// middle. Sets are reported in the orientation of `fam`.
///
/// Levels inside the `r` band are still tried: a family can sit inside the
/// band with a hole in the middle that only a shift from the band edge fills.
/// The recount guard keeps such steps honest.
fn shift_oriented(fam: &SetFamily, k: u32, before: &BigUint) -> Option<(Candidate, u32, HalfInteger)> {
    let n = fam.n();
    let a = fam.max_cardinality()?;
    let twice_m = (2 * a).checked_sub(n)?;
    if twice_m < 2 {
        return None;
    }
    let m = HalfInteger::from_twice(twice_m);
    let top = fam.level_members(a);
    let (ell, cands) = (1..twice_m).take_while(|&l| l <= a).find_map(|ell| {
        let cands: Vec<ElementSet> = top
            .iter()
            .copied()
            .filter(|t| t.subsets_of_size(a - ell).into_iter().any(|b| !fam.contains(b)))
            .collect();
        (!cands.is_empty()).then_some((ell, cands))
    })?;
    let mut right: Vec<ElementSet> = cands
        .iter()
        .flat_map(|t| t.subsets_of_size(a - ell))
        .filter(|b| !fam.contains(*b))
        .collect();
    right.sort_unstable();
    right.dedup();
    let g = BipartiteGraph::inclusion(cands.clone(), right);
    let mm = max_matching(&g);

    let (pairs, kind): (Vec<(usize, usize)>, ShiftKind) = if mm.saturates_left() {
        let p = mm.pairs.iter().enumerate().map(|(i, v)| (i, v.expect("saturated"))).collect();
        (p, ShiftKind::Matching)
    } else {
        let d = hall_decomposition(&g).expect("every candidate has a missing subset");
        (d.matching, ShiftKind::HallPair)
    };
    let removed: Vec<ElementSet> = pairs.iter().map(|&(u, _)| g.left[u]).collect();
    let inserted: Vec<ElementSet> = pairs.iter().map(|&(_, v)| g.right[v]).collect();
    let family = fam.with_replaced(&removed, &inserted).expect("sizes preserved");
    let count = recount(&family, k);
    if &count < before {
        return Some((
            Candidate {
                family,
                removed,
                inserted,
                kind,
                count,
            },
            ell,
            m,
        ));
    }

    // one set at a time: drop an element of the smallest member below it
    let mut best: Option<Candidate> = None;
    for &t in &cands {
        let witness = fam
            .iter()
            .filter(|c| c.is_proper_subset_of(t))
            .find_map(|c| c.elements().find(|&x| !fam.contains(t.without(x))));
        let Some(x) = witness else { continue };
        let target = t.without(x);
        let family = fam.with_replaced(&[t], &[target]).expect("sizes preserved");
        let count = recount(&family, k);
        if &count < before && best.as_ref().is_none_or(|b| count < b.count) {
            best = Some(Candidate {
                family,
                removed: vec![t],
                inserted: vec![target],
                kind: ShiftKind::SingleSet,
                count,
            });
        }
    }
    best.map(|c| (c, ell, m))
}

/// One shifting step; `None` when no strictly improving shift was found.
pub fn shift_step(fam: &SetFamily, k: u32) -> Result<Option<(SetFamily, ShiftStep)>> {
    if k < 2 {
        return domain(format!("chain length must be at least 2, got {k}"));
    }
    let Some(complement_first) = orientation(fam) else {
        return Ok(None);
    };
    let n = fam.n();
    let before = recount(fam, k);
    for complemented in [complement_first, !complement_first] {
        let work = if complemented { fam.complement() } else { fam.clone() };
        if let Some((c, ell, m)) = shift_oriented(&work, k, &before) {
            let back = |v: Vec<ElementSet>| -> Vec<ElementSet> {
                if complemented {
                    v.into_iter().map(|x| x.complement(n)).collect()
                } else {
                    v
                }
            };
            let family = if complemented { c.family.complement() } else { c.family };
            let count_after = recount(&family, k);
            if count_after != c.count {
                return Err(Error::Contract("complementing changed the chain count".into()));
            }
            let step = ShiftStep {
                removed: back(c.removed),
                inserted: back(c.inserted),
                ell,
                m,
                kind: c.kind,
                complemented,
                count_after,
            };
            return Ok(Some((family, step)));
        }
    }
    Ok(None)
}

/// Strips the extremes once (when possible), then shifts until no step
/// improves or `max_steps` steps were taken.
pub fn minimize(fam: &SetFamily, k: u32, max_steps: usize) -> Result<(SetFamily, ShiftTrace)> {
    if k < 2 {
        return domain(format!("chain length must be at least 2, got {k}"));
    }
    let initial_count = recount(fam, k);
    let (mut cur, stripped) = match strip_with_record(fam) {
        Ok((f, removed, inserted)) if !removed.is_empty() => {
            let count_after = recount(&f, k);
            if count_after > initial_count {
                return Err(Error::Contract("stripping increased the chain count".into()));
            }
            let step = ShiftStep {
                removed,
                inserted,
                ell: 0,
                m: HalfInteger::from_twice(0),
                kind: ShiftKind::SingleSet,
                complemented: false,
                count_after,
            };
            (f, Some(step))
        }
        _ => (fam.clone(), None),
    };
    let mut steps = Vec::new();
    while steps.len() < max_steps {
        match shift_step(&cur, k)? {
            Some((next, step)) => {
                cur = next;
                steps.push(step);
            }
            None => break,
        }
    }
    let final_count = recount(&cur, k);
    debug_assert!(final_count <= initial_count);
    Ok((
        cur,
        ShiftTrace {
            k,
            initial_count,
            stripped,
            steps,
            final_count,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{canonical_family, conjectured_min};
    use crate::lattice::random_family;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fam(n: u32, lists: &[&[u32]]) -> SetFamily {
        SetFamily::from_lists(n, lists).unwrap()
    }

    fn count(f: &SetFamily, k: u32) -> u64 {
        u64::try_from(count_k_chains(f, k).unwrap()).unwrap()
    }

    #[test]
    fn strip_examples() {
        let f = fam(3, &[&[], &[1], &[1, 2]]);
        let g = strip_extremes(&f).unwrap();
        assert_eq!(g.len(), 3);
        assert!(!g.contains(ElementSet::EMPTY));
        assert!(count(&g, 2) <= 3);

        let plain = fam(3, &[&[1], &[2, 3]]);
        assert_eq!(strip_extremes(&plain).unwrap(), plain);

        let both = fam(3, &[&[], &[1], &[2], &[3], &[1, 2, 3]]);
        let g = strip_extremes(&both).unwrap();
        assert_eq!(g, fam(3, &[&[1], &[2], &[3], &[1, 2], &[1, 3]]));
        assert!(count(&g, 2) <= count(&both, 2));

        assert!(strip_extremes(&SetFamily::power_set(2).unwrap()).is_err());
    }

    #[test]
    fn step_examples() {
        let f = fam(4, &[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[1, 2, 3, 4]]);
        assert_eq!(count(&f, 2), 5);
        let (g, step) = shift_step(&f, 2).unwrap().unwrap();
        assert_eq!(step.ell, 1);
        assert_eq!(step.m, HalfInteger::from_twice(4));
        assert_eq!(step.removed, vec![ElementSet::full(4)]);
        assert_eq!(step.inserted[0].cardinality(), 3);
        assert!(count(&g, 2) <= 3);

        assert!(shift_step(&canonical_family(4, 7).unwrap(), 2).unwrap().is_none());

        let f = fam(3, &[&[1], &[2], &[3], &[1, 2, 3]]);
        let (g, step) = shift_step(&f, 2).unwrap().unwrap();
        assert_eq!(step.inserted[0].cardinality(), 2);
        assert!(count(&g, 2) <= 2);
        assert!(shift_step(&f, 1).is_err());
    }

    #[test]
    fn low_families_are_complemented() {
        let f = fam(4, &[&[], &[1, 2], &[1, 3], &[3, 4]]);
        let (g, step) = shift_step(&f, 2).unwrap().unwrap();
        assert!(step.complemented);
        assert_eq!(step.removed, vec![ElementSet::EMPTY]);
        assert_eq!(step.inserted[0].cardinality(), 1);
        assert!(count(&g, 2) < count(&f, 2));
    }

    #[test]
    fn perturbed_middle_set_recovers() {
        let n = 8;
        let s = 80;
        let target = u64::try_from(conjectured_min(n, s, 2).unwrap()).unwrap();
        let base = canonical_family(n, s).unwrap();
        let out = ElementSet::from_elements([1, 2, 3, 4], n).unwrap();
        for top in (0..n).map(|i| ElementSet::full(n).without(i + 1)) {
            let start = base.with_replaced(&[out], &[top]).unwrap();
            let (end, trace) = minimize(&start, 2, 10).unwrap();
            assert_eq!(count(&end, 2), target, "top {top}");
            let counts = trace.counts();
            assert!(counts.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn canonical_start_takes_no_steps() {
        for (n, s) in [(4, 7), (5, 20), (6, 40)] {
            let (_, trace) = minimize(&canonical_family(n, s).unwrap(), 2, 10).unwrap();
            assert!(trace.steps.is_empty());
            assert!(trace.stripped.is_none());
        }
    }

    #[test]
    fn random_families_improve_soundly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let f = random_family(6, 20, &mut rng).unwrap();
            for k in [2, 3] {
                let (g, trace) = minimize(&f, k, 50).unwrap();
                assert_eq!(g.len(), 20);
                assert_eq!(BigUint::from(count(&g, k)), trace.final_count);
                assert!(trace.final_count <= trace.initial_count);
                assert!(trace.final_count >= conjectured_min(6, 20, k).unwrap());
                let mut prev = trace.stripped.as_ref().map_or(&trace.initial_count, |s| &s.count_after);
                for st in &trace.steps {
                    assert!(&st.count_after < prev);
                    prev = &st.count_after;
                }
            }
        }
    }

    #[test]
    fn minimized_families_stay_in_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 3..=6u32 {
            for s in [crate::arith::binomial_u64(n, n / 2) + 1, 1u64 << (n - 1)] {
                let base = canonical_family(n, s).unwrap();
                let out = base.members()[0];
                let top = ElementSet::full(n).without(1 + rand::Rng::gen_range(&mut rng, 0..n));
                if base.contains(top) {
                    continue;
                }
                let start = base.with_replaced(&[out], &[top]).unwrap();
                let (end, _) = minimize(&start, 2, 100).unwrap();
                let cert = crate::extremal::check_extremal_2chain(&end).unwrap();
                assert!(cert.condition_results[0], "n={n} s={s} {end:?}");
            }
        }
    }

    #[test]
    fn trace_serializes_counts_as_strings() {
        let f = fam(5, &[&[1], &[2], &[3], &[1, 2, 3, 4]]);
        let (_, trace) = minimize(&f, 2, 5).unwrap();
        let v = serde_json::to_value(&trace).unwrap();
        assert_eq!(v["initial_count"], "3");
        assert_eq!(v["steps"][0]["count_after"], "2");
        assert_eq!(v["steps"][0]["kind"], "single-set");
        assert_eq!(v["steps"][0]["inserted"][0], "2,3,4");
    }
}
