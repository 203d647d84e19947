//! Closed-form estimates for `f(r, k, b)`, the largest number of `r`-sets
//! each containing at least `k` members of a `b`-element family of
//! `(r−1)`-sets.
//!
//! Only [`exact_small_k`] and [`k3_upper`] are exact statements about `f`.
//! [`general_upper_leading`] is the leading term of an asymptotic bound and
//! carries `O(b ln b)` slack, so tables mark it advisory.

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::combinatorics::{binom, cascade_decompose, cascade_shift, CascadeRep, Natural};
use crate::error::BoundsError;

/// Exact optima for `k ≤ 2`.
///
/// * `k = 2`: `value` is `b`; returns `f(r, 2, b) = binom(b, 2)`.
/// * `k = 1`: `value` is `a`; returns the least `b` supporting `a` sets, which
///   is 1 for any positive `a` (every `r`-set through one fixed `(r−1)`-set).
/// * `k = 0`: returns 0 for any `a`.
pub fn exact_small_k(k: usize, value: &Natural) -> Result<Natural, BoundsError> {
    match k {
        0 => Ok(Natural::zero()),
        1 => Ok(if value.is_zero() { Natural::zero() } else { Natural::one() }),
        2 => Ok(binom(value, 2)),
        _ => Err(BoundsError::KTooLarge(k)),
    }
}

/// Largest `a` with `b(b−1) ≥ 9a²/(2b) − 3a/2 + 6a`, i.e. `9a² + 9ab ≤
/// 2b²(b−1)`. Equivalently `a ≤ b(√(8b+1) − 3)/6`.
pub fn k3_upper(b: &Natural) -> Natural {
    if b.is_zero() {
        return Natural::zero();
    }
    let nine = BigUint::from(9u32);
    let rhs = BigUint::from(2u32) * b * b * (b - 1u32);
    let fits = |a: &BigUint| &nine * a * a + &nine * a * b <= rhs;
    // Positive root of 9a² + 9ab − 2b²(b−1): (−9b + 3b√(8b+1)) / 18.
    let disc = &nine * b * b * (BigUint::from(8u32) * b + 1u32);
    let root = disc.sqrt();
    let nb = &nine * b;
    let mut a = if root > nb { (root - nb) / 18u32 } else { Natural::zero() };
    while fits(&(&a + 1u32)) {
        a += 1u32;
    }
    while !a.is_zero() && !fits(&a) {
        a -= 1u32;
    }
    a
}

/// `(6a + 3b)² ≤ b²(8b + 1)`: `a` does not exceed `binom(x, 3)` where
/// `binom(x, 2) = b` for real `x ≥ 2`.
pub fn weak_k3_holds(a: &Natural, b: &Natural) -> bool {
    let lhs = BigUint::from(6u32) * a + BigUint::from(3u32) * b;
    &lhs * &lhs <= b * b * (BigUint::from(8u32) * b + 1u32)
}

/// `b^(k/(k−1)) · ((k−1)!)^(1/(k−1)) / k`, the leading term of the general
/// upper bound on `f(r, k, b)`. The true bound adds a term of order
/// `b ln b`.
pub fn general_upper_leading(b: &Natural, k: usize) -> Result<f64, BoundsError> {
    if k < 2 {
        return Err(BoundsError::BadK(k));
    }
    if b.is_zero() {
        return Ok(0.0);
    }
    let ln_b = ln_natural(b);
    let km1 = (k - 1) as f64;
    let ln_fact: f64 = (2..k).map(|j| (j as f64).ln()).sum();
    Ok((k as f64 / km1 * ln_b + ln_fact / km1 - (k as f64).ln()).exp())
}

fn ln_natural(n: &Natural) -> f64 {
    if let Some(x) = n.to_f64().filter(|x| x.is_finite()) {
        return x.ln();
    }
    let bits = n.bits();
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `cascade_shift(rep, +1)` for a cascade with top index `k−1`; this is the
/// exact value of `f` once every cascade coefficient is large enough.
pub fn theorem2_value(rep: &CascadeRep, k: usize) -> Result<Natural, BoundsError> {
    let expected = k.saturating_sub(1) as u64;
    if k < 2 || rep.top_index() != expected {
        return Err(BoundsError::WrongTopIndex { expected, found: rep.top_index() });
    }
    Ok(cascade_shift(rep, 1)?)
}

/// Value of the shifted-colex construction: decompose `b` at index `k−1` and
/// raise every index by one.
pub fn be_lower(b: &Natural, k: usize) -> Result<Natural, BoundsError> {
    if k < 2 {
        return Err(BoundsError::BadK(k));
    }
    let rep = cascade_decompose(b, (k - 1) as u64)?;
    Ok(cascade_shift(&rep, 1)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub b: Natural,
    pub k: usize,
    pub cascade: CascadeRep,
    /// Achieved by the shifted-colex construction.
    pub be_lower: Natural,
    /// Exact upper bound where one is known (`k = 2, 3`).
    pub k_specific_upper: Option<Natural>,
    /// Advisory leading term of the general upper bound.
    pub general_leading: f64,
    /// Set only when the cascade has all `k−1` terms.
    pub theorem2_value: Option<Natural>,
}

impl BoundRow {
    pub fn new(b: Natural, k: usize) -> Result<Self, BoundsError> {
        if b.is_zero() {
            return Err(BoundsError::ZeroB);
        }
        if k < 2 {
            return Err(BoundsError::BadK(k));
        }
        let cascade = cascade_decompose(&b, (k - 1) as u64)?;
        let be_lower = cascade_shift(&cascade, 1)?;
        let k_specific_upper = match k {
            2 => Some(binom(&b, 2)),
            3 => Some(k3_upper(&b)),
            _ => None,
        };
        let theorem2_value = if cascade.is_full() { Some(theorem2_value(&cascade, k)?) } else { None };
        Ok(BoundRow { general_leading: general_upper_leading(&b, k)?, b, k, cascade, be_lower, k_specific_upper, theorem2_value })
    }

    /// Exact upper minus construction value, when an exact upper is known.
    pub fn gap(&self) -> Option<Natural> {
        self.k_specific_upper.as_ref().map(|u| if u >= &self.be_lower { u - &self.be_lower } else { Natural::zero() })
    }
}

pub fn conjecture_table(k: usize, b_range: RangeInclusive<u64>) -> Result<Vec<BoundRow>, BoundsError> {
    b_range.map(|b| BoundRow::new(Natural::from(b), k)).collect()
}

/// Decimal rendering with 12 significant digits; scientific notation outside
/// `[1e-6, 1e12)`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs();
    if (1e-6..1e12).contains(&mag) {
        let exp = mag.log10().floor() as i32;
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.11e}");
        let (mant, exp) = s.split_once('e').expect("scientific format has an exponent");
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{binom_u64, CascadeTerm};

    fn n(x: u64) -> Natural {
        Natural::from(x)
    }

    #[test]
    fn small_k() {
        assert_eq!(exact_small_k(2, &n(5)).unwrap(), n(10));
        assert_eq!(exact_small_k(1, &n(7)).unwrap(), n(1));
        assert_eq!(exact_small_k(0, &n(100)).unwrap(), n(0));
        assert_eq!(exact_small_k(3, &n(5)), Err(BoundsError::KTooLarge(3)));
    }

    /// Scans `a` upward against the rational inequality directly.
    fn k3_upper_scan(b: u64) -> u64 {
        let (bb, mut a) = (b as i128, 0i128);
        while 9 * (a + 1) * (a + 1) + 9 * (a + 1) * bb <= 2 * bb * bb * (bb - 1) {
            a += 1;
        }
        a as u64
    }

    #[test]
    fn k3_upper_examples() {
        assert_eq!(k3_upper(&n(406)), n(3654));
        assert_eq!(k3_upper(&n(6)), n(4));
        assert_eq!(k3_upper(&n(3)), n(1));
        for b in 1..2000 {
            assert_eq!(k3_upper(&n(b)), n(k3_upper_scan(b)), "b={b}");
        }
    }

    #[test]
    fn k3_upper_on_triangular_numbers() {
        for c in 3..=50u64 {
            assert_eq!(k3_upper(&binom_u64(c, 2)), binom_u64(c, 3));
        }
        let big = binom_u64(10_000_000_000, 2);
        assert_eq!(k3_upper(&big), binom_u64(10_000_000_000, 3));
    }

    #[test]
    fn weak_conjecture_on_k3_upper() {
        for b in 1..3000u64 {
            assert!(weak_k3_holds(&k3_upper(&n(b)), &n(b)));
            assert!(!weak_k3_holds(&(k3_upper(&n(b)) + 1u32), &n(b)) || b < 3);
        }
    }

    #[test]
    fn leading_term() {
        assert!((general_upper_leading(&n(5), 2).unwrap() - 12.5).abs() < 1e-12);
        let v = general_upper_leading(&n(35), 4).unwrap();
        assert!((v - 35.0 * 210f64.cbrt() / 4.0).abs() < 1e-9);
        assert!((v - 52.0).abs() < 0.1);
        let c = 20u64;
        let lead = general_upper_leading(&binom_u64(c, 2), 3).unwrap();
        let exact = 1140.0;
        // Leading term of c³/6 vs binom(c,3): differ by O(c²) = O(b).
        assert!((lead - exact).abs() / exact < 0.2);
        assert_eq!(general_upper_leading(&n(5), 1), Err(BoundsError::BadK(1)));
    }

    #[test]
    fn theorem2_examples() {
        let rep = CascadeRep::from_terms(3, vec![CascadeTerm::new(7u32, 3)]).unwrap();
        assert_eq!(theorem2_value(&rep, 4).unwrap(), n(35));
        let rep = CascadeRep::from_terms(2, vec![CascadeTerm::new(29u32, 2)]).unwrap();
        assert_eq!(theorem2_value(&rep, 3).unwrap(), n(3654));
        let rep = cascade_decompose(&n(13), 3).unwrap();
        assert_eq!(theorem2_value(&rep, 4).unwrap(), n(6));
        assert_eq!(theorem2_value(&rep, 3), Err(BoundsError::WrongTopIndex { expected: 2, found: 3 }));
    }

    #[test]
    fn table_rows() {
        let rows = conjecture_table(3, 1..=40).unwrap();
        assert_eq!(rows.len(), 40);
        for row in &rows {
            assert!(row.be_lower <= *row.k_specific_upper.as_ref().unwrap(), "b={}", row.b);
        }
        assert_eq!(rows[5].be_lower, n(4));
        assert_eq!(rows[5].k_specific_upper, Some(n(4)));
        let r = BoundRow::new(n(13), 4).unwrap();
        assert_eq!(r.be_lower, n(6));
        assert_eq!(r.theorem2_value, None);
        assert_eq!(r.k_specific_upper, None);
        let r2 = BoundRow::new(n(5), 2).unwrap();
        assert_eq!((r2.be_lower.clone(), r2.k_specific_upper.clone()), (n(10), Some(n(10))));
        assert_eq!(r2.theorem2_value, Some(n(10)));
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(12.5), "12.5");
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_real(36f64.ln()), "3.58351893846");
        assert_eq!(format_real(1e15), "1e15");
        assert_eq!(format_real(-2.5e-9), "-2.5e-9");
        assert_eq!(format_real(123456789012.345), "123456789012");
    }
}
