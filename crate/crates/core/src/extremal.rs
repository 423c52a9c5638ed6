//! Centered families, the 2-chain optimality certificate, and a few explicit
//! constructions.

use num_bigint::BigUint;
use serde::Serialize;

use crate::arith::binomial_u64;
use crate::bounds::{band, r_param, stability_r};
use crate::chains::count_k_chains;
use crate::error::{domain, Result};
use crate::lattice::{check_n, colex_masks, full_mask, ElementSet, HalfInteger, SetFamily};

/// Levels in the order the centered family fills them:
/// `⌊n/2⌋, ⌊n/2⌋+1, ⌊n/2⌋-1, ⌊n/2⌋+2, ...`
pub fn fill_order(n: u32) -> Vec<u32> {
    let mid = n / 2;
    let mut out = vec![mid];
    for d in 1..=n {
        if mid + d <= n {
            out.push(mid + d);
        }
        if d <= mid {
            out.push(mid - d);
        }
    }
    out
}

/// The first `s` sets of the centered fill order; a partial level takes its
/// sets in colex order.
pub fn canonical_family(n: u32, s: u64) -> Result<SetFamily> {
    check_n(n)?;
    if s > 1u64 << n {
        return domain(format!("s={s} exceeds 2^{n}"));
    }
    let mut left = s;
    let mut sets = Vec::with_capacity(s as usize);
    for level in fill_order(n) {
        if left == 0 {
            break;
        }
        let size = binomial_u64(n, level);
        let take = size.min(left);
        sets.extend(colex_masks(n, level).take(take as usize).map(ElementSet::raw));
        left -= take;
    }
    SetFamily::new(n, sets)
}

/// Number of k-chains in the centered family of size `s`.
pub fn conjectured_min(n: u32, s: u64, k: u32) -> Result<BigUint> {
    count_k_chains(&canonical_family(n, s)?, k)
}

/// Outcome of checking the four conditions that characterize families with
/// the fewest 2-chains.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalCertificate {
    pub n: u32,
    pub s: u64,
    pub satisfied: bool,
    #[serde(serialize_with = "crate::arith::as_string")]
    pub r: HalfInteger,
    /// Sizes within `n/2 ± r`; interior levels full; present boundary sets an
    /// antichain; missing boundary sets an antichain. A condition that does
    /// not apply at this size is reported as holding.
    pub condition_results: [bool; 4],
    pub condition_applies: [bool; 4],
    pub violating_sets: Vec<ElementSet>,
}

const WITNESS_CAP: usize = 64;

/// First comparable pair `(X ⊂ Y)` with `X` at level `lo` and `Y` at level
/// `hi`, both accepted by `keep`.
fn boundary_pair(
    n: u32,
    lo: u32,
    hi: u32,
    keep: impl Fn(ElementSet) -> bool,
) -> Option<(ElementSet, ElementSet)> {
    if lo == hi {
        return None;
    }
    for x in colex_masks(n, lo).map(ElementSet::raw) {
        if !keep(x) {
            continue;
        }
        let room = x.complement(n);
        for extra in room.subsets_of_size(hi - lo) {
            let y = x.union(extra);
            if keep(y) {
                return Some((x, y));
            }
        }
    }
    None
}

/// Checks the four characterizing conditions. At the threshold size where
/// both conditions 3 and 4 apply, either one suffices.
pub fn check_extremal_2chain(fam: &SetFamily) -> Result<ExtremalCertificate> {
    let n = fam.n();
    let s = fam.len() as u64;
    let r = r_param(n, s)?;
    let (lo, hi) = band(n, r);
    let mut violating = Vec::new();

    let outside: Vec<ElementSet> = fam
        .iter()
        .filter(|f| f.cardinality() < lo || f.cardinality() > hi)
        .collect();
    let c1 = outside.is_empty();
    violating.extend(outside.into_iter().take(WITNESS_CAP));

    let mut c2 = true;
    for level in lo + 1..hi {
        for m in fam.missing_at_level(level) {
            c2 = false;
            if violating.len() < 2 * WITNESS_CAP {
                violating.push(m);
            }
        }
    }

    let threshold: u64 = (lo..hi).map(|i| binomial_u64(n, i)).sum();
    let applies3 = s <= threshold;
    let applies4 = s >= threshold;
    let present = boundary_pair(n, lo, hi, |x| fam.contains(x));
    let missing = boundary_pair(n, lo, hi, |x| !fam.contains(x));
    let c3 = !applies3 || present.is_none();
    let c4 = !applies4 || missing.is_none();
    let boundary_ok = if applies3 && applies4 {
        present.is_none() || missing.is_none()
    } else {
        c3 && c4
    };
    if !boundary_ok {
        if let Some((x, y)) = present.filter(|_| applies3) {
            violating.extend([x, y]);
        }
        if let Some((x, y)) = missing.filter(|_| applies4) {
            violating.extend([x, y]);
        }
    }
    let satisfied = c1 && c2 && boundary_ok;
    debug_assert_eq!(satisfied, violating.is_empty());
    Ok(ExtremalCertificate {
        n,
        s,
        satisfied,
        r,
        condition_results: [c1, c2, c3, c4],
        condition_applies: [true, true, applies3, applies4],
        violating_sets: violating,
    })
}

/// `{F : 1 ∉ F, |F| = m} ∪ {F : 1 ∈ F, |F| = m + 1}` over `[2m + 1]`: larger
/// than any antichain, yet every member lies in exactly one comparable pair.
pub fn saturated_example(m: u32) -> Result<SetFamily> {
    if m == 0 {
        return domain("saturated example needs m >= 1");
    }
    let n = 2 * m + 1;
    check_n(n)?;
    let sets = colex_masks(n, m)
        .filter(|b| b & 1 == 0)
        .chain(colex_masks(n, m + 1).filter(|b| b & 1 == 1))
        .map(ElementSet::raw);
    SetFamily::new(n, sets)
}

/// A family before and after a local replacement, with the sets swapped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Replacement {
    pub before: SetFamily,
    pub after: SetFamily,
    pub removed: Vec<ElementSet>,
    pub inserted: Vec<ElementSet>,
}

fn replacement(before: SetFamily, removed: Vec<ElementSet>, inserted: Vec<ElementSet>) -> Result<Replacement> {
    let after = before.with_replaced(&removed, &inserted)?;
    debug_assert_eq!(after.len(), before.len());
    Ok(Replacement {
        before,
        after,
        removed,
        inserted,
    })
}

/// Moves `ell` sets from the top of the band `n/2 ± r` one level outward.
///
/// Before: the `k-1` levels ending at the top of the band are full, plus every
/// set `k-1` levels below a moved set. The moved sets contain a common core
/// `W` of the last `w` elements, and each new set misses `n - hi - 1`
/// elements of `W`, so it meets no moved set in `hi - k + 1` elements and
/// picks up no chains through the extra sets.
pub fn outward_replacement(n: u32, k: u32, ell: usize) -> Result<Replacement> {
    check_n(n)?;
    if k < 2 || k > n {
        return domain(format!("need 2 <= k <= n, got k={k}"));
    }
    let (_, hi) = band(n, stability_r(n, k));
    if hi + 1 > n {
        return domain("band already reaches the top level");
    }
    let c = n - hi - 1;
    if c < k {
        return domain(format!("no room to move sets outward at n={n}, k={k}"));
    }
    let fits = |w: u32| {
        binomial_u64(w, c) >= ell as u64 && w <= hi && binomial_u64(n - w, hi - w) >= ell as u64
    };
    let w = (c..=hi)
        .find(|&w| fits(w))
        .ok_or_else(|| crate::Error::Domain(format!("cannot move {ell} sets at n={n}, k={k}")))?;
    let core = full_mask(n) & !full_mask(n - w);
    // moved sets: hi-sets containing the core
    let removed: Vec<ElementSet> = colex_masks(n - w, hi - w)
        .take(ell)
        .map(|b| ElementSet::raw(b | core))
        .collect();
    // new sets: everything except c elements of the core
    let inserted: Vec<ElementSet> = colex_masks(w, c)
        .take(ell)
        .map(|b| ElementSet::raw(full_mask(n) & !(b << (n - w))))
        .collect();
    let mut sets: Vec<ElementSet> = SetFamily::levels(n, hi + 2 - k..=hi)?.iter().collect();
    for x in &removed {
        sets.extend(x.subsets_of_size(hi + 1 - k));
    }
    replacement(SetFamily::new(n, sets)?, removed, inserted)
}

/// Moves `ell` sets from just inside the top of the band onto it.
///
/// Before: the `k-1` levels below the top of the band are full, together with
/// the top-level sets containing element `n`. The moved sets contain `n`; the
/// new sets do not.
pub fn onto_boundary_replacement(n: u32, k: u32, ell: usize) -> Result<Replacement> {
    check_n(n)?;
    if k < 2 || k > n {
        return domain(format!("need 2 <= k <= n, got k={k}"));
    }
    let (_, hi) = band(n, stability_r(n, k));
    if hi + 1 < k {
        return domain("band too narrow");
    }
    let last = 1u32 << (n - 1);
    let mut sets: Vec<ElementSet> = SetFamily::levels(n, hi + 1 - k..=hi - 1)?.iter().collect();
    sets.extend(colex_masks(n, hi).filter(|b| b & last != 0).map(ElementSet::raw));
    let removed: Vec<ElementSet> = colex_masks(n, hi - 1)
        .filter(|b| b & last != 0)
        .take(ell)
        .map(ElementSet::raw)
        .collect();
    let inserted: Vec<ElementSet> = colex_masks(n, hi)
        .filter(|b| b & last == 0)
        .take(ell)
        .map(ElementSet::raw)
        .collect();
    if removed.len() < ell || inserted.len() < ell {
        return domain(format!("cannot move {ell} sets at n={n}, k={k}"));
    }
    replacement(SetFamily::new(n, sets)?, removed, inserted)
}
