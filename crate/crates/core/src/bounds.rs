//! Closed-form lower bounds on chain counts, evaluated exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{binomial, decimal_string, factorial, fraction_string, ratio};
use crate::error::{domain, Error, Result};
use crate::lattice::{HalfInteger, SetFamily};

fn k_range(n: u32, k: u32) -> Result<()> {
    if k < 2 || k > n {
        return domain(format!("need 2 <= k <= n, got k={k}, n={n}"));
    }
    Ok(())
}

/// Size of the `k` largest levels of the cube (`M_0 = 0`).
pub fn middle_sum(n: u32, k: u32) -> Result<BigUint> {
    if k > n + 1 {
        return domain(format!("middle_sum needs k <= n + 1, got k={k}, n={n}"));
    }
    let lo = (n + 1 - k).div_ceil(2);
    let hi = (n + k).saturating_sub(1).div_ceil(2);
    if k == 0 || lo > hi {
        return Ok(BigUint::zero());
    }
    Ok((lo..=hi).map(|i| binomial(n, i)).sum())
}

/// Bottom and top level of the band `n/2 ± r`.
pub fn band(n: u32, r: HalfInteger) -> (u32, u32) {
    ((n - r.twice()) / 2, (n + r.twice()) / 2)
}

fn band_size(n: u32, lo: i64, hi: i64) -> BigUint {
    (lo.max(0)..=hi.min(n as i64))
        .map(|i| binomial(n, i as u32))
        .sum()
}

/// The half-integer `r` with `n/2 ± r` integral such that the levels strictly
/// inside `n/2 ± r` hold fewer than `s` sets and the closed band holds at
/// least `s`.
pub fn r_param(n: u32, s: u64) -> Result<HalfInteger> {
    crate::lattice::check_n(n)?;
    let sperner = binomial(n, n / 2);
    let total = BigUint::one() << n;
    let sb = BigUint::from(s);
    if sb < sperner || sb > total {
        return domain(format!(
            "s={s} outside [{sperner}, {total}] for n={n}"
        ));
    }
    let mut twice = n % 2;
    loop {
        let lo = (n as i64 - twice as i64) / 2;
        let hi = (n as i64 + twice as i64) / 2;
        let inner = band_size(n, lo + 1, hi - 1);
        let outer = band_size(n, lo, hi);
        if inner < sb && sb <= outer {
            return Ok(HalfInteger::from_twice(twice));
        }
        twice += 2;
    }
}

/// The `r` of the k-middle-levels stability bound: `(k-1)/2` when `n + k` is
/// odd, `k/2` otherwise.
pub fn stability_r(n: u32, k: u32) -> HalfInteger {
    HalfInteger::from_twice(if (n + k) % 2 == 1 { k - 1 } else { k })
}

/// `a = ⌈(n+k)/2⌉`
pub fn a_param(n: u32, k: u32) -> u32 {
    (n + k).div_ceil(2)
}

/// `t * ⌈(n+1)/2⌉`
pub fn erdos_katona_lower(n: u32, t: u64) -> BigUint {
    BigUint::from(t) * (n + 1).div_ceil(2)
}

/// `t * binom(⌊(n+k)/2⌋, k-1) * (k-1)!`: chains forced by `t` sets beyond the
/// `k-1` middle levels.
pub fn k_middle_levels_lower(n: u32, k: u32, t: u64) -> Result<BigUint> {
    k_range(n, k)?;
    Ok(BigUint::from(t) * binomial((n + k) / 2, k - 1) * factorial(k - 1))
}

/// Per-level weights of the stability bound: the bound equals
/// `Σ_F weight[|F|] - offset`.
pub fn stability_weights(n: u32, k: u32) -> Result<(Vec<BigRational>, BigRational)> {
    k_range(n, k)?;
    let (lo, hi) = band(n, stability_r(n, k));
    let kf = factorial(k - 1);
    let base = binomial(n, hi) * binomial(hi, k - 1) * &kf;
    let weights = (0..=n)
        .map(|i| {
            if (lo..=hi).contains(&i) {
                BigRational::new(BigInt::from(base.clone()), BigInt::from(binomial(n, i)))
            } else {
                ratio(binomial(i.max(n - i), k - 1) * &kf)
            }
        })
        .collect();
    let offset = ratio(base * (k - 1));
    Ok((weights, offset))
}

/// Lower bound on the k-chains of a specific family, from its level profile.
/// May be negative.
///
/// For `k = n` the band covers the whole cube and the bound needs `∅` and
/// `[n]` to be absent: `{∅, {1}, {2}, [3]}` has two 3-chains but evaluates
/// to 4.
pub fn stability_lower(fam: &SetFamily, k: u32) -> Result<BigRational> {
    let (weights, offset) = stability_weights(fam.n(), k)?;
    let profile = fam.level_profile();
    let mut v = -offset;
    for (i, &c) in profile.counts.iter().enumerate() {
        if c > 0 {
            v += &weights[i] * BigRational::from_integer(BigInt::from(c));
        }
    }
    Ok(v)
}

/// Predicted gains from the two stability constructions with `ell` replaced
/// sets: boundary sets moved one level outward, and sets just inside the top
/// boundary moved onto it.
pub fn stability_gains(n: u32, k: u32, ell: u64) -> Result<(BigRational, BigRational)> {
    k_range(n, k)?;
    let r = stability_r(n, k);
    let (_, hi) = band(n, r);
    let kf = factorial(k - 1);
    let l = BigUint::from(ell);
    let first = ratio(&l * binomial(hi, k - 2) * &kf);
    let second = BigRational::new(
        BigInt::from(r.twice() as i64 - 1) * BigInt::from(&l * binomial(hi, k - 1) * &kf),
        BigInt::from(hi),
    );
    Ok((first, second))
}

fn weighted_t(k: u32, a: u32, t1: i64, t2: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(t1))
        + BigRational::new(BigInt::from((k - 1) as u64 * t2), BigInt::from(a))
}

fn check_t(t1: i64, t2: u64) -> Result<()> {
    if t1 + (t2 as i64) < 0 {
        return domain(format!("need t1 + t2 >= 0, got t1={t1}, t2={t2}"));
    }
    Ok(())
}

/// Chains with a step of two or more: `(t1 + (k-1)t2/a) binom(a,k) binom(k,2) (k-1)!`.
pub fn long_step_chains_lower(n: u32, k: u32, t1: i64, t2: u64) -> Result<BigRational> {
    k_range(n, k)?;
    check_t(t1, t2)?;
    let a = a_param(n, k);
    let c = binomial(a, k) * binomial(k, 2) * factorial(k - 1);
    Ok(weighted_t(k, a, t1, t2) * ratio(c))
}

/// All k-chains in a family of `M_k + t1` sets missing `t2` sets from the
/// `k-1` middle levels.
pub fn all_chains_lower(n: u32, k: u32, t1: i64, t2: u64) -> Result<BigRational> {
    k_range(n, k)?;
    check_t(t1, t2)?;
    let a = a_param(n, k);
    let kf = factorial(k - 1);
    let first = binomial(n, a - k) * binomial(n - a + k, k - 1) * &kf;
    let per = (binomial(a, k - 1) + binomial(a, k) * binomial(k, 2)) * &kf;
    Ok(ratio(first) + weighted_t(k, a, t1, t2) * ratio(per))
}

/// Whether the k+1-middle-levels bound is proven for these parameters.
pub fn k_plus_one_regime(n: u32, k: u32) -> bool {
    n >= 15 && k >= 2 && k + 6 <= n
}

/// Bound for families of `M_k + t` sets; alias of [`all_chains_lower`] with
/// nothing missing.
pub fn k_plus_one_levels_lower(n: u32, k: u32, t: u64) -> Result<BigRational> {
    all_chains_lower(n, k, t as i64, 0)
}

/// Sets that must be missing from the `k-1` middle levels once a family holds
/// a set of size `n-1`: `⌈binom(n-1,a-1) - a(1 + (a-k+1)(k-1)/2)⌉`, at least 0.
pub fn forced_missing_middle(n: u32, k: u32) -> Result<BigUint> {
    k_range(n, k)?;
    let a = a_param(n, k);
    let sub = BigRational::from_integer(BigInt::from(a))
        * (BigRational::one()
            + BigRational::new(
                BigInt::from((a - k + 1) as u64 * (k - 1) as u64),
                BigInt::from(2),
            ));
    let v = ratio(binomial(n - 1, a - 1)) - sub;
    let c = v.ceil().to_integer();
    Ok(if c.is_negative() {
        BigUint::zero()
    } else {
        c.to_biguint().unwrap()
    })
}

/// Parameters a bound was evaluated at.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BoundParams {
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<u64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "opt_half"
    )]
    pub r: Option<HalfInteger>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<u32>,
}

fn opt_half<S: serde::Serializer>(v: &Option<HalfInteger>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(h) => s.collect_str(h),
        None => s.serialize_none(),
    }
}

/// Identifiers accepted by [`evaluate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundName {
    MiddleSum,
    RParam,
    ErdosKatona,
    Thm13,
    Thm32,
    Stability,
    Prop41,
    Thm42,
    Thm14,
    Prop43,
}

impl BoundName {
    pub const ALL: [BoundName; 10] = [
        BoundName::MiddleSum,
        BoundName::RParam,
        BoundName::ErdosKatona,
        BoundName::Thm13,
        BoundName::Thm32,
        BoundName::Stability,
        BoundName::Prop41,
        BoundName::Thm42,
        BoundName::Thm14,
        BoundName::Prop43,
    ];

    pub fn token(self) -> &'static str {
        match self {
            BoundName::MiddleSum => "middle-sum",
            BoundName::RParam => "r-param",
            BoundName::ErdosKatona => "erdos-katona",
            BoundName::Thm13 => "thm13",
            BoundName::Thm32 => "thm32",
            BoundName::Stability => "stability",
            BoundName::Prop41 => "prop41",
            BoundName::Thm42 => "thm42",
            BoundName::Thm14 => "thm14",
            BoundName::Prop43 => "prop43",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for BoundName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundName::ALL
            .into_iter()
            .find(|b| b.token() == s)
            .ok_or_else(|| {
                let known: Vec<_> = BoundName::ALL.iter().map(|b| b.token()).collect();
                Error::Domain(format!("unknown bound {s:?}; expected one of {}", known.join(", ")))
            })
    }
}

/// One evaluated bound or parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub name: String,
    pub value: BigRational,
    pub params: BoundParams,
    pub regime_ok: bool,
}

impl BoundReport {
    pub fn value_fraction(&self) -> String {
        fraction_string(&self.value)
    }

    pub fn value_decimal(&self) -> String {
        decimal_string(&self.value, 6)
    }
}

impl Serialize for BoundReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BoundReport", 5)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("value_fraction", &self.value_fraction())?;
        st.serialize_field("value_decimal", &self.value_decimal())?;
        st.serialize_field("params", &self.params)?;
        st.serialize_field("regime_ok", &self.regime_ok)?;
        st.end()
    }
}

/// Inputs for [`evaluate`]; unused fields are ignored.
#[derive(Clone, Debug, Default)]
pub struct BoundInput<'a> {
    pub n: u32,
    pub k: Option<u32>,
    pub s: Option<u64>,
    pub t: Option<u64>,
    pub t1: Option<i64>,
    pub t2: Option<u64>,
    pub family: Option<&'a SetFamily>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, name: BoundName) -> Result<T> {
    v.ok_or_else(|| Error::Domain(format!("bound {name} needs --{flag}")))
}

/// Evaluates a named bound. `stability` yields two reports, one per
/// construction.
pub fn evaluate(name: BoundName, input: &BoundInput<'_>) -> Result<Vec<BoundReport>> {
    let n = match (name, input.family) {
        (BoundName::Thm32, Some(f)) => f.n(),
        _ => input.n,
    };
    crate::lattice::check_n(n)?;
    let mut params = BoundParams {
        n,
        ..Default::default()
    };
    let int = |v: BigUint| ratio(v);
    let single = |value: BigRational, params: BoundParams, ok: bool| {
        Ok(vec![BoundReport {
            name: name.token().to_string(),
            value,
            params,
            regime_ok: ok,
        }])
    };
    match name {
        BoundName::MiddleSum => {
            let k = need(input.k, "k", name)?;
            params.k = Some(k);
            single(int(middle_sum(n, k)?), params, true)
        }
        BoundName::RParam => {
            let s = need(input.s, "s", name)?;
            params.s = Some(s);
            let r = r_param(n, s)?;
            params.r = Some(r);
            let v = BigRational::new(BigInt::from(r.twice()), BigInt::from(2));
            single(v, params, true)
        }
        BoundName::ErdosKatona => {
            let t = need(input.t, "t", name)?;
            params.t = Some(t);
            let room = (BigUint::one() << n) - binomial(n, n / 2);
            single(int(erdos_katona_lower(n, t)), params, BigUint::from(t) <= room)
        }
        BoundName::Thm13 => {
            let k = need(input.k, "k", name)?;
            let t = need(input.t, "t", name)?;
            params.k = Some(k);
            params.t = Some(t);
            let v = k_middle_levels_lower(n, k, t)?;
            let ok = middle_sum(n, k - 1)? + t <= (BigUint::one() << n);
            single(int(v), params, ok)
        }
        BoundName::Thm32 => {
            let k = need(input.k, "k", name)?;
            let fam = input
                .family
                .ok_or_else(|| Error::Domain("bound thm32 needs --family".into()))?;
            params.k = Some(k);
            params.s = Some(fam.len() as u64);
            params.r = Some(stability_r(n, k));
            single(stability_lower(fam, k)?, params, true)
        }
        BoundName::Stability => {
            let k = need(input.k, "k", name)?;
            let t = need(input.t, "t", name)?;
            params.k = Some(k);
            params.t = Some(t);
            params.r = Some(stability_r(n, k));
            let (first, second) = stability_gains(n, k, t)?;
            Ok(vec![
                BoundReport {
                    name: "stability-outward".into(),
                    value: first,
                    params: params.clone(),
                    regime_ok: true,
                },
                BoundReport {
                    name: "stability-onto-boundary".into(),
                    value: second,
                    params,
                    regime_ok: true,
                },
            ])
        }
        BoundName::Prop41 | BoundName::Thm42 => {
            let k = need(input.k, "k", name)?;
            let t1 = need(input.t1, "t1", name)?;
            let t2 = input.t2.unwrap_or(0);
            params.k = Some(k);
            params.t1 = Some(t1);
            params.t2 = Some(t2);
            params.a = Some(a_param(n, k));
            let v = if name == BoundName::Prop41 {
                long_step_chains_lower(n, k, t1, t2)?
            } else {
                all_chains_lower(n, k, t1, t2)?
            };
            single(v, params, true)
        }
        BoundName::Thm14 => {
            let k = need(input.k, "k", name)?;
            let t = need(input.t, "t", name)?;
            params.k = Some(k);
            params.t = Some(t);
            params.a = Some(a_param(n, k));
            single(k_plus_one_levels_lower(n, k, t)?, params, k_plus_one_regime(n, k))
        }
        BoundName::Prop43 => {
            let k = need(input.k, "k", name)?;
            params.k = Some(k);
            params.a = Some(a_param(n, k));
            single(int(forced_missing_middle(n, k)?), params, k_plus_one_regime(n, k))
        }
    }
}
