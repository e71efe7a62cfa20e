//! Truncated formal power series in `q` with exact integer coefficients.
//!
//! Exponents live on the grid `(1/denom)·ℕ`, so half-integer powers such as
//! `q^(1/2)` are first-class. Every series carries an order `O`: coefficients of
//! `q^e` with `e ≥ O` are unknown and never stored. Binary operations produce a
//! result whose order is the smaller of the two input orders.
//!
//! The q-Pochhammer helpers only accept monomial parameters `±q^e`, which is all
//! the identities in this crate need.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Rational exponent type used throughout the crate.
pub type Exponent = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series with constant term {0} has no inverse over the integers")]
    NotInvertible(BigInt),
    #[error("exponent {0} is negative")]
    NegativeExponent(Exponent),
    #[error("(1;q)_inf vanishes identically; a Pochhammer parameter of exactly 1 is rejected")]
    ZeroDivisor,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed series: {0}")]
    Malformed(String),
}

/// Number of grid slots below `order` on a grid of step `1/denom`.
pub fn grid_len(order: Exponent, denom: u32) -> usize {
    let scaled = order * Exponent::from_integer(denom as i64);
    let len = scaled.ceil().to_integer();
    len.max(0) as usize
}

/// Scaled index of `exp` on a grid of step `1/denom`, if it lies on the grid.
fn grid_index(exp: Exponent, denom: u32) -> Option<i64> {
    let scaled = exp * Exponent::from_integer(denom as i64);
    scaled.is_integer().then(|| scaled.to_integer())
}

fn lcm_u32(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// A truncated power series `Σ c_e q^e + O(q^order)`.
///
/// The coefficient vector is dense: slot `i` holds the coefficient of
/// `q^(i/denom)` and its length is the order measured in grid steps.
#[derive(Clone, Debug)]
pub struct Series {
    denom: u32,
    coeffs: Vec<BigInt>,
}

impl Series {
    pub fn new(denom: u32, coeffs: Vec<BigInt>) -> Self {
        assert!(denom > 0, "grid denominator must be positive");
        Series { denom, coeffs }
    }

    pub fn from_i64s(denom: u32, coeffs: &[i64]) -> Self {
        Series::new(denom, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(denom: u32, len: usize) -> Self {
        Series::new(denom, vec![BigInt::zero(); len])
    }

    pub fn one(denom: u32, len: usize) -> Self {
        let mut s = Series::zero(denom, len);
        if len > 0 {
            s.coeffs[0] = BigInt::one();
        }
        s
    }

    /// `coeff · q^exp + O(q^order)` on the coarsest grid that holds both `exp` and `order`.
    pub fn monomial(coeff: impl Into<BigInt>, exp: Exponent, order: Exponent) -> Result<Self, SeriesError> {
        if exp < Exponent::zero() {
            return Err(SeriesError::NegativeExponent(exp));
        }
        let denom = lcm_u32(*exp.denom() as u32, *order.denom() as u32);
        let mut s = Series::zero(denom, grid_len(order, denom));
        let idx = grid_index(exp, denom).expect("denominator chosen to hold exp") as usize;
        if idx < s.coeffs.len() {
            s.coeffs[idx] = coeff.into();
        }
        Ok(s)
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    /// Order measured in grid steps (the length of the coefficient vector).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn order(&self) -> Exponent {
        Exponent::new(self.coeffs.len() as i64, self.denom as i64)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^exp`; `None` when `exp` is at or beyond the order.
    pub fn coeff(&self, exp: Exponent) -> Option<BigInt> {
        if exp < Exponent::zero() {
            return Some(BigInt::zero());
        }
        if exp >= self.order() {
            return None;
        }
        match grid_index(exp, self.denom) {
            Some(i) => Some(self.coeffs[i as usize].clone()),
            None => Some(BigInt::zero()),
        }
    }

    /// Nonzero terms as `(exponent, coefficient)`, in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &BigInt)> + '_ {
        let d = self.denom as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (Exponent::new(i as i64, d), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Coefficients as machine integers, for tests and table output.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    /// Same series on a finer grid. `denom` must be a multiple of the current one.
    pub fn with_denom(&self, denom: u32) -> Series {
        if denom == self.denom {
            return self.clone();
        }
        assert!(denom % self.denom == 0, "grid {} does not refine grid {}", denom, self.denom);
        let f = (denom / self.denom) as usize;
        let mut out = Series::zero(denom, self.coeffs.len() * f);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[i * f] = c.clone();
            }
        }
        out
    }

    /// Move to the coarsest grid holding every nonzero exponent.
    pub fn normalized(&self) -> Series {
        let mut g = self.denom as usize;
        for (i, c) in self.coeffs.iter().enumerate() {
            if g == 1 {
                break;
            }
            if !c.is_zero() {
                g = g.gcd(&i);
            }
        }
        if g <= 1 {
            return self.clone();
        }
        let len = self.coeffs.len().div_ceil(g);
        let coeffs = (0..len).map(|j| self.coeffs[j * g].clone()).collect();
        Series::new(self.denom / g as u32, coeffs)
    }

    /// Drop every term at or beyond `order`.
    pub fn truncate(&self, order: Exponent) -> Series {
        let len = grid_len(order, self.denom).min(self.coeffs.len());
        Series::new(self.denom, self.coeffs[..len].to_vec())
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut Vec<BigInt> {
        &mut self.coeffs
    }

    /// Multiply by `q^exp`; the order grows by `exp`.
    pub fn shift(&self, exp: Exponent) -> Result<Series, SeriesError> {
        if exp < Exponent::zero() {
            return Err(SeriesError::NegativeExponent(exp));
        }
        let denom = lcm_u32(self.denom, *exp.denom() as u32);
        let base = self.with_denom(denom);
        let k = grid_index(exp, denom).expect("grid holds exp") as usize;
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.extend(base.coeffs);
        Ok(Series::new(denom, coeffs))
    }

    /// Multiply by `q^exp` keeping the current order.
    pub fn shift_truncated(&self, exp: Exponent) -> Result<Series, SeriesError> {
        let order = self.order();
        Ok(self.shift(exp)?.truncate(order))
    }

    pub fn scale(&self, c: &BigInt) -> Series {
        Series::new(self.denom, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Formal reciprocal; requires constant term `±1`.
    pub fn inverse(&self) -> Result<Series, SeriesError> {
        let len = self.coeffs.len();
        if len == 0 {
            return Ok(self.clone());
        }
        let c0 = &self.coeffs[0];
        if !(c0.is_one() || (-c0).is_one()) {
            return Err(SeriesError::NotInvertible(c0.clone()));
        }
        let nz: Vec<(usize, &BigInt)> = self.coeffs.iter().enumerate().skip(1).filter(|(_, c)| !c.is_zero()).collect();
        let mut out = vec![BigInt::zero(); len];
        out[0] = c0.clone();
        for n in 1..len {
            let mut acc = BigInt::zero();
            for &(i, c) in &nz {
                if i > n {
                    break;
                }
                acc += c * &out[n - i];
            }
            // c0 = ±1, so dividing by c0 is multiplying by c0
            out[n] = -(acc * c0);
        }
        Ok(Series::new(self.denom, out))
    }

    /// Substitute `q ↦ q^factor`; the order scales by the same factor.
    pub fn rescale(&self, factor: Exponent) -> Result<Series, SeriesError> {
        if factor <= Exponent::zero() {
            return Err(SeriesError::InvalidParameter(format!("rescale factor {} must be positive", factor)));
        }
        let p = *factor.numer() as usize;
        let r = *factor.denom() as u32;
        let denom = self.denom * r;
        let mut out = Series::zero(denom, self.coeffs.len() * p);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[i * p] = c.clone();
            }
        }
        Ok(out.normalized())
    }

    /// First exponent below the common order where the two series differ.
    pub fn first_difference(&self, other: &Series) -> Option<(Exponent, BigInt, BigInt)> {
        let d = lcm_u32(self.denom, other.denom);
        let (a, b) = (self.with_denom(d), other.with_denom(d));
        let len = a.coeffs.len().min(b.coeffs.len());
        (0..len)
            .find(|&i| a.coeffs[i] != b.coeffs[i])
            .map(|i| (Exponent::new(i as i64, d as i64), a.coeffs[i].clone(), b.coeffs[i].clone()))
    }

    /// Cauchy product truncated to `len` grid steps (and never beyond either input).
    pub(crate) fn mul_to(&self, other: &Series, len: usize) -> Series {
        let d = lcm_u32(self.denom, other.denom);
        let (a, b) = (self.with_denom(d), other.with_denom(d));
        let len = len.min(a.coeffs.len()).min(b.coeffs.len());
        let mut out = vec![BigInt::zero(); len];
        let bnz: Vec<(usize, &BigInt)> = b.coeffs[..len].iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        for (i, ca) in a.coeffs[..len].iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for &(j, cb) in &bnz {
                if i + j >= len {
                    break;
                }
                out[i + j] += ca * cb;
            }
        }
        Series::new(d, out)
    }

    /// In-place multiplication by `1 - c·q^(m/denom)` with `c = ±1`.
    fn mul_binomial(&mut self, m: usize, c: i8) {
        let len = self.coeffs.len();
        if m == 0 {
            let f = BigInt::from(1 - c as i64);
            for x in &mut self.coeffs {
                *x *= &f;
            }
            return;
        }
        for i in (m..len).rev() {
            let t = self.coeffs[i - m].clone();
            if c > 0 {
                self.coeffs[i] -= t;
            } else {
                self.coeffs[i] += t;
            }
        }
    }

    /// In-place division by `1 - c·q^(m/denom)` with `c = ±1`, `m > 0`.
    fn div_binomial(&mut self, m: usize, c: i8) {
        debug_assert!(m > 0);
        let len = self.coeffs.len();
        for i in m..len {
            let t = self.coeffs[i - m].clone();
            if c > 0 {
                self.coeffs[i] += t;
            } else {
                self.coeffs[i] -= t;
            }
        }
    }
}

impl PartialEq for Series {
    /// Equality below the smaller of the two orders.
    fn eq(&self, other: &Series) -> bool {
        self.first_difference(other).is_none()
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;
    fn add(self, rhs: &'a Series) -> Series {
        let d = lcm_u32(self.denom, rhs.denom);
        let (a, b) = (self.with_denom(d), rhs.with_denom(d));
        let len = a.coeffs.len().min(b.coeffs.len());
        Series::new(d, (0..len).map(|i| &a.coeffs[i] + &b.coeffs[i]).collect())
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;
    fn sub(self, rhs: &'a Series) -> Series {
        self + &(-rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::new(self.denom, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;
    fn mul(self, rhs: &'a Series) -> Series {
        self.mul_to(rhs, usize::MAX)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Series> for Series {
            type Output = Series;
            fn $m(self, rhs: Series) -> Series {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn format_exp(e: Exponent) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("({})", e)
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{}", mag)?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            if e.is_one() {
                write!(f, "q")?;
            } else {
                write!(f, "q^{}", format_exp(e))?;
            }
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(q^{})", format_exp(self.order()))
    }
}

/// JSON wire form: `{"denom", "order_num", "order_den", "coeffs": [[exp_scaled, "decimal"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesWire {
    pub denom: u32,
    pub order_num: i64,
    pub order_den: i64,
    pub coeffs: Vec<(usize, String)>,
}

impl From<&Series> for SeriesWire {
    fn from(s: &Series) -> Self {
        let order = s.order();
        SeriesWire {
            denom: s.denom,
            order_num: *order.numer(),
            order_den: *order.denom(),
            coeffs: s
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.to_string()))
                .collect(),
        }
    }
}

impl TryFrom<SeriesWire> for Series {
    type Error = SeriesError;
    fn try_from(w: SeriesWire) -> Result<Self, SeriesError> {
        if w.denom == 0 || w.order_den <= 0 {
            return Err(SeriesError::Malformed("nonpositive denominator".into()));
        }
        let len = grid_len(Exponent::new(w.order_num, w.order_den), w.denom);
        let mut s = Series::zero(w.denom, len);
        let mut last = None;
        for (i, c) in w.coeffs {
            if last.is_some_and(|l| l >= i) {
                return Err(SeriesError::Malformed("coefficients not strictly sorted by exponent".into()));
            }
            last = Some(i);
            if i >= len {
                return Err(SeriesError::Malformed(format!("exponent slot {} beyond order", i)));
            }
            s.coeffs[i] = c.parse().map_err(|_| SeriesError::Malformed(format!("bad integer {:?}", c)))?;
        }
        Ok(s)
    }
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SeriesWire::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let w = SeriesWire::deserialize(de)?;
        Series::try_from(w).map_err(serde::de::Error::custom)
    }
}

/// The factor family `(±q^exponent; q^base)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PochSpec {
    pub sign: i8,
    pub exponent: Exponent,
    pub base: Exponent,
}

impl PochSpec {
    pub fn new(sign: i8, exponent: Exponent, base: Exponent) -> Result<Self, SeriesError> {
        if sign != 1 && sign != -1 {
            return Err(SeriesError::InvalidParameter(format!("sign must be ±1, got {}", sign)));
        }
        if exponent < Exponent::zero() {
            return Err(SeriesError::NegativeExponent(exponent));
        }
        if base <= Exponent::zero() {
            return Err(SeriesError::InvalidParameter(format!("base exponent {} must be positive", base)));
        }
        Ok(PochSpec { sign, exponent, base })
    }

    /// `(q^e; q^b)` with integer exponents.
    pub fn q(e: i64, b: i64) -> Self {
        PochSpec::new(1, Exponent::from_integer(e), Exponent::from_integer(b)).expect("valid integer spec")
    }

    /// `(-q^e; q^b)` with integer exponents.
    pub fn neg_q(e: i64, b: i64) -> Self {
        PochSpec::new(-1, Exponent::from_integer(e), Exponent::from_integer(b)).expect("valid integer spec")
    }

    fn grid(&self) -> u32 {
        lcm_u32(*self.exponent.denom() as u32, *self.base.denom() as u32)
    }

    /// Scaled exponents of the factors `1 - a q^(j·base)` for `j = 0, 1, ...`.
    fn factor_slots(&self, denom: u32) -> impl Iterator<Item = usize> {
        let e = grid_index(self.exponent, denom).expect("grid holds exponent") as usize;
        let b = grid_index(self.base, denom).expect("grid holds base") as usize;
        (0..).map(move |j| e + j * b)
    }
}

fn product_len(spec: &PochSpec, order: Exponent) -> (u32, usize) {
    let d = spec.grid();
    (d, grid_len(order, d))
}

/// `(a; q^base)_n = Π_{j<n} (1 - a q^(j·base))` truncated at `order`.
pub fn poch_finite(spec: &PochSpec, n: usize, order: Exponent) -> Series {
    let (d, len) = product_len(spec, order);
    let mut s = Series::one(d, len);
    for m in spec.factor_slots(d).take(n) {
        if m >= len && m > 0 {
            break;
        }
        s.mul_binomial(m, spec.sign);
    }
    s
}

/// `(a; q^base)_∞` truncated at `order`.
pub fn poch_infinite(spec: &PochSpec, order: Exponent) -> Result<Series, SeriesError> {
    if spec.exponent.is_zero() && spec.sign == 1 {
        return Err(SeriesError::ZeroDivisor);
    }
    let (d, len) = product_len(spec, order);
    let mut s = Series::one(d, len);
    for m in spec.factor_slots(d) {
        if m >= len && m > 0 {
            break;
        }
        s.mul_binomial(m, spec.sign);
    }
    Ok(s)
}

/// `1/(a; q^base)_n`, or `1/(a; q^base)_∞` when `n` is `None`.
pub fn invert_poch(spec: &PochSpec, n: Option<usize>, order: Exponent) -> Result<Series, SeriesError> {
    let (d, len) = product_len(spec, order);
    let mut s = Series::one(d, len);
    for (j, m) in spec.factor_slots(d).enumerate() {
        if n.is_some_and(|n| j >= n) || (m >= len && m > 0) {
            break;
        }
        if m == 0 {
            return Err(SeriesError::NotInvertible(BigInt::from(1 - spec.sign as i64)));
        }
        s.div_binomial(m, spec.sign);
    }
    Ok(s)
}

/// `(q^e1, q^e2, q^e3; q^e3)_∞` as a product. A zero `e1` or `e2` makes the product vanish.
pub fn triple_product(e1: Exponent, e2: Exponent, e3: Exponent, order: Exponent) -> Result<Series, SeriesError> {
    let zero = Exponent::zero();
    if e3 <= zero || e1 < zero || e2 < zero || e1 > e3 || e2 > e3 {
        return Err(SeriesError::InvalidParameter(format!(
            "triple product needs 0 <= e1, e2 <= e3 and e3 > 0, got ({}, {}, {})",
            e1, e2, e3
        )));
    }
    let d = [e1, e2, e3].iter().fold(1u32, |acc, e| lcm_u32(acc, *e.denom() as u32));
    let len = grid_len(order, d);
    if e1.is_zero() || e2.is_zero() {
        return Ok(Series::zero(d, len));
    }
    let mut out = Series::one(d, len);
    for e in [e1, e2, e3] {
        let f = poch_infinite(&PochSpec::new(1, e, e3)?, order)?.with_denom(d);
        out = &out * &f;
    }
    Ok(out)
}

/// Bilateral theta sum `Σ_{r∈ℤ} (-1)^r q^(e3·r(r-1)/2 + e1·r)`, equal by Jacobi's
/// triple product to `(q^e1, q^(e3-e1), q^e3; q^e3)_∞`.
pub fn theta_sum(e1: Exponent, e3: Exponent, order: Exponent) -> Result<Series, SeriesError> {
    let zero = Exponent::zero();
    if e3 <= zero || e1 < zero || e1 > e3 {
        return Err(SeriesError::InvalidParameter(format!(
            "theta sum needs 0 <= e1 <= e3 and e3 > 0, got ({}, {})",
            e1, e3
        )));
    }
    let d = lcm_u32(*e1.denom() as u32, *e3.denom() as u32);
    let len = grid_len(order, d);
    let mut out = Series::zero(d, len);
    let exp_of = |r: i64| e3 * Exponent::from_integer(r * (r - 1)) / Exponent::from_integer(2) + e1 * Exponent::from_integer(r);
    for dir in [1i64, -1] {
        let start = if dir == 1 { 0 } else { -1 };
        let mut r = start;
        loop {
            let e = exp_of(r);
            if e >= order {
                break;
            }
            let i = grid_index(e, d).expect("grid holds theta exponent") as usize;
            if r.rem_euclid(2) == 0 {
                out.coeffs[i] += 1;
            } else {
                out.coeffs[i] -= 1;
            }
            r += dir;
        }
    }
    Ok(out)
}

/// Sum of `sign · q^e` monomials, all on a common grid.
pub(crate) fn monomial_sum(terms: &[(i64, Exponent)], order: Exponent) -> Result<Series, SeriesError> {
    let d = terms.iter().fold(*order.denom() as u32, |acc, (_, e)| lcm_u32(acc, *e.denom() as u32));
    let mut s = Series::zero(d, grid_len(order, d));
    for &(c, e) in terms {
        if e < Exponent::zero() {
            return Err(SeriesError::NegativeExponent(e));
        }
        let i = grid_index(e, d).expect("grid holds exponent") as usize;
        if i < s.coeffs.len() {
            s.coeffs[i] += c;
        }
    }
    Ok(s)
}

pub fn int(e: i64) -> Exponent {
    Exponent::from_integer(e)
}

pub fn ratio(n: i64, d: i64) -> Exponent {
    Exponent::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64]) -> Series {
        Series::from_i64s(1, c)
    }

    #[test]
    fn add_examples() {
        assert_eq!(&s(&[1, 1, 0]) + &s(&[1, -1, 0]), s(&[2, 0, 0]));
        let x = s(&[3, -1, 4, 1]);
        assert_eq!(&x + &Series::zero(1, 4), x);
        assert_eq!((&s(&[1, 0, 1]) + &s(&[0, 1, 1])).to_i64_vec().unwrap(), vec![1, 1, 2]);
    }

    #[test]
    fn add_takes_min_order() {
        let r = &s(&[1, 1, 1, 1]) + &s(&[1, 1]);
        assert_eq!(r.order(), int(2));
    }

    #[test]
    fn mul_examples() {
        assert_eq!((&s(&[1, 1, 0, 0]) * &s(&[1, -1, 0, 0])).to_i64_vec().unwrap(), vec![1, 0, -1, 0]);
        assert_eq!(
            (&s(&[1, 1, 0, 0, 0, 0]) * &s(&[1, 0, 0, 1, 0, 0])).to_i64_vec().unwrap(),
            vec![1, 1, 0, 1, 1, 0]
        );
        let x = s(&[2, 0, -5, 7]);
        assert_eq!(&x * &Series::one(1, 4), x);
    }

    #[test]
    fn poch_finite_examples() {
        let p = poch_finite(&PochSpec::neg_q(1, 2), 2, int(10));
        assert_eq!(p.to_i64_vec().unwrap(), vec![1, 1, 0, 1, 1, 0, 0, 0, 0, 0]);
        assert_eq!(poch_finite(&PochSpec::q(3, 7), 0, int(5)), Series::one(1, 5));
        let p = poch_finite(&PochSpec::q(1, 1), 3, int(6));
        assert_eq!(p.to_i64_vec().unwrap(), vec![1, -1, -1, 0, 1, 1]);
    }

    #[test]
    fn poch_infinite_examples() {
        let p = poch_infinite(&PochSpec::q(1, 1), int(6)).unwrap();
        assert_eq!(p.to_i64_vec().unwrap(), vec![1, -1, -1, 0, 0, 1]);
        let p = poch_infinite(&PochSpec::neg_q(1, 2), int(4)).unwrap();
        assert_eq!(p.to_i64_vec().unwrap(), vec![1, 1, 0, 1]);
        let p = poch_infinite(&PochSpec::q(2, 2), int(2)).unwrap();
        assert_eq!(p.coeffs()[0], BigInt::one());
        assert_eq!(poch_infinite(&PochSpec::q(0, 1), int(3)), Err(SeriesError::ZeroDivisor));
    }

    #[test]
    fn invert_poch_examples() {
        let p = invert_poch(&PochSpec::q(1, 1), None, int(5)).unwrap();
        assert_eq!(p.to_i64_vec().unwrap(), vec![1, 1, 2, 3, 5]);
        let p = invert_poch(&PochSpec::q(4, 4), Some(1), int(9)).unwrap();
        assert_eq!(p.to_i64_vec().unwrap(), vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
        assert_eq!(invert_poch(&PochSpec::q(2, 3), Some(0), int(4)).unwrap(), Series::one(1, 4));
        assert!(matches!(
            invert_poch(&PochSpec::neg_q(0, 1), None, int(4)),
            Err(SeriesError::NotInvertible(_))
        ));
    }

    #[test]
    fn inverse_requires_unit_constant() {
        assert!(matches!(s(&[2, 1]).inverse(), Err(SeriesError::NotInvertible(_))));
        assert!(matches!(s(&[0, 1]).inverse(), Err(SeriesError::NotInvertible(_))));
        let x = s(&[-1, 3, 0, 2, 5]);
        assert_eq!(&x * &x.inverse().unwrap(), Series::one(1, 5));
    }

    #[test]
    fn rogers_ramanujan_product() {
        let order = int(7);
        let tp = triple_product(int(2), int(3), int(5), order).unwrap();
        let r = &tp * &invert_poch(&PochSpec::q(1, 1), None, order).unwrap();
        assert_eq!(r.to_i64_vec().unwrap(), vec![1, 1, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn triple_product_matches_theta_246() {
        let order = int(40);
        let p = triple_product(int(2), int(4), int(6), order).unwrap();
        let t = theta_sum(int(2), int(6), order).unwrap();
        assert_eq!(p, t);
    }

    #[test]
    fn triple_product_constant_term() {
        let p = triple_product(int(1), int(2), int(3), ratio(1, 2)).unwrap();
        assert_eq!(p.to_i64_vec().unwrap(), vec![1]);
    }

    #[test]
    fn triple_product_with_zero_parameter_vanishes() {
        let p = triple_product(int(0), int(6), int(6), int(20)).unwrap();
        assert!(p.is_zero());
        assert!(theta_sum(int(0), int(6), int(20)).unwrap().is_zero());
    }

    #[test]
    fn rescale_examples() {
        let half = Series::from_i64s(2, &[1, 1, 0, 0]);
        assert_eq!(half.rescale(int(2)).unwrap(), s(&[1, 1, 0, 0]));
        assert_eq!(s(&[1, 1, 1]).rescale(int(2)).unwrap().to_i64_vec().unwrap(), vec![1, 0, 1, 0, 1, 0]);
        let a = poch_infinite(&PochSpec::new(-1, ratio(1, 2), int(1)).unwrap(), int(10)).unwrap();
        let b = poch_infinite(&PochSpec::neg_q(1, 2), int(20)).unwrap();
        let r = a.rescale(int(2)).unwrap();
        assert_eq!(r.order(), int(20));
        assert_eq!(r, b);
    }

    #[test]
    fn rescale_round_trip() {
        let x = s(&[1, -2, 0, 5, 1, 0]);
        let y = x.rescale(int(3)).unwrap().rescale(ratio(1, 3)).unwrap();
        assert_eq!(y.denom(), 1);
        assert_eq!(y.to_i64_vec().unwrap(), x.to_i64_vec().unwrap());
    }

    #[test]
    fn mixed_grids_promote() {
        let half = Series::monomial(1, ratio(1, 2), int(3)).unwrap();
        let r = &half * &half;
        assert_eq!(r.coeff(int(1)), Some(BigInt::one()));
        assert_eq!(r.coeff(ratio(1, 2)), Some(BigInt::zero()));
        assert_eq!(r.coeff(int(3)), None);
    }

    #[test]
    fn display_format() {
        let x = Series::from_i64s(2, &[1, -1, 0, 2, 0, 0]);
        assert_eq!(x.to_string(), "1 - q^(1/2) + 2*q^(3/2) + O(q^3)");
    }

    #[test]
    fn wire_format_is_exact() {
        let x = Series::from_i64s(2, &[1, 0, -3, 0, 0]);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"denom":2,"order_num":5,"order_den":2,"coeffs":[[0,"1"],[2,"-3"]]}"#);
        let back: Series = serde_json::from_str(&json).unwrap();
        assert_eq!(back.len(), 5);
        assert_eq!(back, x);
    }

    #[test]
    fn wire_format_rejects_unsorted() {
        let bad = r#"{"denom":1,"order_num":5,"order_den":1,"coeffs":[[2,"1"],[0,"1"]]}"#;
        assert!(serde_json::from_str::<Series>(bad).is_err());
    }
}
