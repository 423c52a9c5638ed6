//! Exact integer helpers: binomials, factorials and the counter types used by
//! the chain dynamic programs.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `n!` as an arbitrary-precision integer.
pub fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// `binom(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `binom(n, k)` in 64 bits. Exact for `n <= 62`, which covers every lattice
/// the engine stores.
pub fn binomial_u64(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u64 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by i + 1
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub(crate) fn ratio(v: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `p/q` with a positive denominator, always carrying the slash.
pub fn fraction_string(v: &BigRational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Decimal rendering computed with integer arithmetic. Integers print without
/// a fractional part; other values are rounded half away from zero to
/// `digits` places.
pub fn decimal_string(v: &BigRational, digits: u32) -> String {
    if v.is_integer() {
        return v.numer().to_string();
    }
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = v.numer().abs() * &scale;
    let (q, r) = scaled.div_rem(v.denom());
    let q = if r * 2u32 >= *v.denom() { q + 1 } else { q };
    let (int_part, frac_part) = q.div_rem(&scale);
    let sign = if v.is_negative() { "-" } else { "" };
    format!(
        "{sign}{int_part}.{:0>width$}",
        frac_part.to_string(),
        width = digits as usize
    )
}

/// Serializes any `Display` value (big integers, rationals) as a JSON string.
pub(crate) fn as_string<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Counter used by the chain DPs. `u128` is tried first and the computation is
/// redone in `BigUint` when it overflows.
pub(crate) trait Tally: Clone + Send + Sync {
    fn nil() -> Self;
    fn unit() -> Self;
    fn is_nil(&self) -> bool;
    fn add_assign_checked(&mut self, other: &Self) -> Option<()>;
    /// `self -= other`; callers guarantee `other <= self`.
    fn sub_exact(&mut self, other: &Self);
}

impl Tally for u128 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn add_assign_checked(&mut self, other: &Self) -> Option<()> {
        *self = self.checked_add(*other)?;
        Some(())
    }
    fn sub_exact(&mut self, other: &Self) {
        *self -= *other;
    }
}

impl Tally for u64 {
    fn nil() -> Self {
        0
    }
    fn unit() -> Self {
        1
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn add_assign_checked(&mut self, other: &Self) -> Option<()> {
        *self = self.checked_add(*other)?;
        Some(())
    }
    fn sub_exact(&mut self, other: &Self) {
        *self -= *other;
    }
}

impl Tally for BigUint {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_checked(&mut self, other: &Self) -> Option<()> {
        *self += other;
        Some(())
    }
    fn sub_exact(&mut self, other: &Self) {
        *self -= other;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn binomials_match_pascal() {
        let mut row = vec![1u64];
        for n in 0..=40u32 {
            for (k, &v) in row.iter().enumerate() {
                assert_eq!(binomial_u64(n, k as u32), v);
                assert_eq!(binomial(n, k as u32), BigUint::from(v));
            }
            assert_eq!(binomial_u64(n, n + 1), 0);
            let mut next = vec![1u64; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
    }

    #[test]
    fn factorial_past_u64() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(5), BigUint::from(120u32));
        assert_eq!(
            factorial(21).to_string(),
            "51090942171709440000".to_string()
        );
    }

    #[test]
    fn decimal_rendering() {
        let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        assert_eq!(decimal_string(&r(30, 1), 6), "30");
        assert_eq!(decimal_string(&r(1, 3), 6), "0.333333");
        assert_eq!(decimal_string(&r(2, 3), 6), "0.666667");
        assert_eq!(decimal_string(&r(-7, 2), 3), "-3.500");
        assert_eq!(fraction_string(&r(6, 4)), "3/2");
        assert_eq!(fraction_string(&r(-30, 1)), "-30/1");
    }
}
