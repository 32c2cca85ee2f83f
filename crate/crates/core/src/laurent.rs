//! Exact Laurent polynomials in one variable `v` with integer coefficients.
//!
//! Every coefficient ring in the crate is `Z[v, v^-1]`. Polynomials are stored
//! sparsely as `(exponent, coefficient)` pairs sorted by exponent, with no
//! zero coefficient ever stored. Coefficients are arbitrary precision.
//!
//! The textual form lists terms by decreasing exponent, e.g. `v^2-2+v^-2`.
//! It is the serialization used by every exporter and by the disk cache.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse Laurent polynomial {input:?}: {reason}")]
pub struct ParsePolyError {
    input: String,
    reason: &'static str,
}

/// An element of `Z[v, v^-1]`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: Vec<(i32, BigInt)>,
}

impl LaurentPoly {
    pub const ZERO: LaurentPoly = LaurentPoly { terms: Vec::new() };

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// The variable `v`.
    pub fn v() -> Self {
        Self::monomial(1, 1)
    }

    /// `c * v^k`.
    pub fn monomial(c: impl Into<BigInt>, k: i32) -> Self {
        let c = c.into();
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(k, c)] }
        }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// `v + v^-1`.
    pub fn v_plus_inv() -> Self {
        Self::from_terms([(1, 1), (-1, 1)])
    }

    /// `v - v^-1`.
    pub fn v_minus_inv() -> Self {
        Self::from_terms([(1, 1), (-1, -1)])
    }

    /// Builds a polynomial from arbitrary terms, merging repeated exponents and
    /// dropping zeros.
    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (i32, C)>) -> Self {
        let mut raw: Vec<(i32, BigInt)> = terms.into_iter().map(|(k, c)| (k, c.into())).collect();
        raw.sort_by_key(|(k, _)| *k);
        Self::from_sorted(raw)
    }

    fn from_sorted(raw: Vec<(i32, BigInt)>) -> Self {
        let mut terms: Vec<(i32, BigInt)> = Vec::with_capacity(raw.len());
        for (k, c) in raw {
            match terms.last_mut() {
                Some((last, acc)) if *last == k => *acc += c,
                _ => terms.push((k, c)),
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Highest exponent, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<i32> {
        self.terms.last().map(|(k, _)| *k)
    }

    /// Lowest exponent, `None` for the zero polynomial.
    pub fn valuation(&self) -> Option<i32> {
        self.terms.first().map(|(k, _)| *k)
    }

    /// Coefficient of `v^k` (the projection `π_k`).
    pub fn coeff_at(&self, k: i32) -> BigInt {
        match self.terms.binary_search_by_key(&k, |(e, _)| *e) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Coefficient of `v^k` as a machine integer. Panics if it does not fit.
    pub fn coeff_i64(&self, k: i32) -> i64 {
        self.coeff_at(k).to_i64().expect("coefficient exceeds i64 range")
    }

    /// Leading coefficient, zero for the zero polynomial.
    pub fn leading_coeff(&self) -> BigInt {
        self.terms.last().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    /// Terms as `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The ring involution `v -> v^-1`.
    pub fn bar(&self) -> Self {
        let terms = self.terms.iter().rev().map(|(k, c)| (-k, c.clone())).collect();
        Self { terms }
    }

    /// Sum of the terms with strictly negative exponent.
    pub fn negative_part(&self) -> Self {
        let terms = self.terms.iter().take_while(|(k, _)| *k < 0).cloned().collect();
        Self { terms }
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i32) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect();
        Self { terms }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let terms = self.terms.iter().map(|(k, a)| (*k, a * c)).collect();
        Self { terms }
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&BigInt::from(c))
    }

    /// Whether every exponent is congruent to `parity` modulo 2.
    pub fn has_exponent_parity(&self, parity: i32) -> bool {
        self.terms.iter().all(|(k, _)| (k - parity).rem_euclid(2) == 0)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.iter().all(|(_, c)| !c.is_negative())
    }

    /// Whether the polynomial lies in `v^-1 Z[v^-1]`.
    pub fn is_strictly_negative(&self) -> bool {
        self.degree().is_none_or(|d| d < 0)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if neg {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            if *k == 0 {
                write!(f, "{abs}")?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{abs}")?;
            }
            if *k == 1 {
                f.write_str("v")?;
            } else {
                write!(f, "v^{k}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = ParsePolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| ParsePolyError { input: s.to_string(), reason };
        let bytes = s.trim().as_bytes();
        if bytes.is_empty() {
            return Err(err("empty input"));
        }
        let mut terms = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = BigInt::one();
            match bytes[i] {
                b'+' if i > 0 => i += 1,
                b'-' => {
                    sign = -sign;
                    i += 1;
                }
                _ if i > 0 => return Err(err("expected '+' or '-' between terms")),
                _ => {}
            }
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let digits = &s.trim()[start..i];
            let has_v = i < bytes.len() && bytes[i] == b'v';
            if digits.is_empty() && !has_v {
                return Err(err("missing term"));
            }
            let coeff: BigInt =
                if digits.is_empty() { BigInt::one() } else { digits.parse().map_err(|_| err("bad coefficient"))? };
            let mut exp = 0i32;
            if has_v {
                i += 1;
                exp = 1;
                if i < bytes.len() && bytes[i] == b'^' {
                    i += 1;
                    let estart = i;
                    if i < bytes.len() && bytes[i] == b'-' {
                        i += 1;
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    exp = s.trim()[estart..i].parse().map_err(|_| err("bad exponent"))?;
                }
            }
            terms.push((exp, sign * coeff));
        }
        Ok(Self::from_terms(terms))
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn merge(a: &[(i32, BigInt)], b: &[(i32, BigInt)], negate_b: bool) -> Vec<(i32, BigInt)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let c = if negate_b { -&b[j].1 } else { b[j].1.clone() };
            out.push((b[j].0, c));
            j += 1;
        } else {
            let c = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !c.is_zero() {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly { terms: merge(&self.terms, &rhs.terms, false) }
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly { terms: merge(&self.terms, &rhs.terms, true) }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPoly::zero();
        }
        if rhs.terms.len() == 1 {
            let (k, c) = &rhs.terms[0];
            let terms = self.terms.iter().map(|(e, a)| (e + k, a * c)).collect();
            return LaurentPoly { terms };
        }
        if self.terms.len() == 1 {
            return rhs * self;
        }
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (e, a) in &self.terms {
            for (k, c) in &rhs.terms {
                raw.push((e + k, a * c));
            }
        }
        raw.sort_by_key(|(k, _)| *k);
        LaurentPoly::from_sorted(raw)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(mut self) -> LaurentPoly {
        for (_, c) in &mut self.terms {
            *c = -std::mem::take(c);
        }
        self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<LaurentPoly> for &LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        if rhs.is_zero() {
            return;
        }
        if self.is_zero() {
            *self = rhs.clone();
            return;
        }
        self.terms = merge(&self.terms, &rhs.terms, false);
    }
}

impl AddAssign for LaurentPoly {
    fn add_assign(&mut self, rhs: LaurentPoly) {
        if self.is_zero() {
            *self = rhs;
        } else {
            *self += &rhs;
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        if rhs.is_zero() {
            return;
        }
        self.terms = merge(&self.terms, &rhs.terms, true);
    }
}

impl SubAssign for LaurentPoly {
    fn sub_assign(&mut self, rhs: LaurentPoly) {
        *self -= &rhs;
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(iter: I) -> Self {
        iter.fold(LaurentPoly::zero(), |mut acc, p| {
            acc += p;
            acc
        })
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(c)
    }
}
