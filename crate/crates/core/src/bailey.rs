//! Bailey pairs as truncated tables with `a = q^e`, the transformations used to
//! build the `(−q;q²)` multisum, and the resulting limit identity.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multisum::{coeffs_at, Factor, MultiSum};
use crate::partitions::{GordonParams, ParamError};
use crate::qseries::{int, invert_poch, monomial_sum, poch_finite, poch_infinite, ratio, theta_sum, Exponent, PochSpec, Series};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BaileyError {
    #[error("alpha does not have the shape required for A = {a}: first mismatch at n = {n}")]
    Shape { a: Exponent, n: usize },
    #[error("parameter a = q^{0} is not supported by this transformation")]
    Parameter(Exponent),
    #[error(transparent)]
    Params(#[from] ParamError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformId {
    S1,
    S2,
    D1,
    P41,
}

impl fmt::Display for TransformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `(α_n, β_n)` for `n = 0..=n_max`, each known below `order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaileyPair {
    /// The parameter `a` written as `q^a_exponent`.
    pub a_exponent: Exponent,
    pub alpha: Vec<Series>,
    pub beta: Vec<Series>,
    pub order: Exponent,
}

impl BaileyPair {
    pub fn n_max(&self) -> usize {
        self.alpha.len().saturating_sub(1)
    }
}

fn one(order: Exponent) -> Series {
    Series::monomial(1, Exponent::zero(), order).expect("zero exponent")
}

fn zero(order: Exponent) -> Series {
    Series::monomial(0, Exponent::zero(), order).expect("zero exponent")
}

fn q_pow(e: Exponent, order: Exponent) -> Series {
    Series::monomial(1, e, order).expect("nonnegative exponent")
}

fn poch(sign: i8, e: Exponent, n: usize, order: Exponent) -> Series {
    poch_finite(&PochSpec::new(sign, e, int(1)).expect("valid factor"), n, order)
}

fn inv_poch(sign: i8, e: Exponent, base: Exponent, n: usize, order: Exponent) -> Series {
    invert_poch(&PochSpec::new(sign, e, base).expect("valid factor"), Some(n), order).expect("invertible factor")
}

fn mul(a: &Series, b: &Series) -> Series {
    a * b
}

/// `α_0 = 1` and `α_n = (−1)ⁿ q^{quad·n²}(q^{−lin·n} + q^{lin·n})` for `n > 0`.
pub fn alpha_template(quad: Exponent, lin: Exponent, n_max: usize, order: Exponent) -> Vec<Series> {
    (0..=n_max)
        .map(|n| {
            if n == 0 {
                return one(order);
            }
            let nn = int(n as i64);
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let base = quad * nn * nn;
            monomial_sum(&[(sign, base - lin * nn), (sign, base + lin * nn)], order).expect("template exponents are nonnegative")
        })
        .collect()
}

/// The unit pair at `a = 1`.
pub fn unit_pair(n_max: usize, order: Exponent) -> BaileyPair {
    let beta = (0..=n_max).map(|n| if n == 0 { one(order) } else { zero(order) }).collect();
    BaileyPair { a_exponent: Exponent::zero(), alpha: alpha_template(ratio(1, 2), ratio(1, 2), n_max, order), beta, order }
}

/// `Σ_{r≤n} α_r / ((q;q)_{n−r} (aq;q)_{n+r})`.
pub fn relation_rhs(a_exponent: Exponent, alpha: &[Series], n: usize, order: Exponent) -> Series {
    let mut acc = zero(order);
    for (r, a) in alpha.iter().enumerate().take(n + 1) {
        let t = mul(&inv_poch(1, int(1), int(1), n - r, order), &inv_poch(1, a_exponent + 1, int(1), n + r, order));
        acc = &acc + &mul(&t, a);
    }
    acc
}

/// The first `n` at which the defining relation fails, if any.
pub fn first_failure(bp: &BaileyPair) -> Option<usize> {
    (0..=bp.n_max()).find(|&n| relation_rhs(bp.a_exponent, &bp.alpha, n, bp.order) != bp.beta[n])
}

pub fn check_pair(bp: &BaileyPair) -> bool {
    first_failure(bp).is_none()
}

/// Limit with both free parameters sent to infinity.
pub fn apply_s1(bp: &BaileyPair) -> BaileyPair {
    let (e, o) = (bp.a_exponent, bp.order);
    let w = |k: usize| {
        let k = int(k as i64);
        q_pow(e * k + k * k, o)
    };
    let alpha = bp.alpha.iter().enumerate().map(|(r, a)| mul(&w(r), a)).collect();
    let beta = (0..=bp.n_max())
        .map(|n| {
            let mut acc = zero(o);
            for k in 0..=n {
                let t = mul(&w(k), &inv_poch(1, int(1), int(1), n - k, o));
                acc = &acc + &mul(&t, &bp.beta[k]);
            }
            acc
        })
        .collect();
    BaileyPair { a_exponent: e, alpha, beta, order: o }
}

/// One parameter to infinity, the other at `−√(aq)`.
pub fn apply_s2(bp: &BaileyPair) -> BaileyPair {
    let (e, o) = (bp.a_exponent, bp.order);
    let root = (e + 1) / 2;
    let w = |k: usize| {
        let k = int(k as i64);
        q_pow((e * k + k * k) / 2, o)
    };
    let alpha = bp.alpha.iter().enumerate().map(|(r, a)| mul(&w(r), a)).collect();
    let beta = (0..=bp.n_max())
        .map(|n| {
            let mut acc = zero(o);
            for k in 0..=n {
                let t = mul(&mul(&w(k), &poch(-1, root, k, o)), &inv_poch(1, int(1), int(1), n - k, o));
                acc = &acc + &mul(&t, &bp.beta[k]);
            }
            mul(&acc, &inv_poch(-1, root, int(1), n, o))
        })
        .collect();
    BaileyPair { a_exponent: e, alpha, beta, order: o }
}

/// Base change `q → q²`: a pair with parameter `a²` becomes one with parameter `a`.
pub fn apply_d1(bp: &BaileyPair) -> BaileyPair {
    let o = bp.order;
    let e = bp.a_exponent / 2;
    let sq = |s: &Series| s.rescale(int(2)).expect("positive factor").truncate(o);
    let alpha = bp.alpha.iter().map(sq).collect();
    let beta_sq: Vec<Series> = bp.beta.iter().map(sq).collect();
    let beta = (0..=bp.n_max())
        .map(|n| {
            let mut acc = zero(o);
            for (r, b) in beta_sq.iter().enumerate().take(n + 1) {
                let t = mul(&poch(-1, e + 1, 2 * r, o), &inv_poch(1, int(2), int(2), n - r, o));
                let t = t.shift_truncated(int((n - r) as i64)).expect("nonnegative shift");
                acc = &acc + &mul(&t, b);
            }
            acc
        })
        .collect();
    BaileyPair { a_exponent: e, alpha, beta, order: o }
}

/// `β'_n = qⁿ β_n`, valid when `α` has the shape `(−1)ⁿ q^{An²}(q^{(A−1)n} + q^{−(A−1)n})` at `a = 1`.
pub fn apply_p41(bp: &BaileyPair, a: Exponent) -> Result<BaileyPair, BaileyError> {
    if !bp.a_exponent.is_zero() {
        return Err(BaileyError::Parameter(bp.a_exponent));
    }
    let (o, n_max) = (bp.order, bp.n_max());
    let lin = a - Exponent::one();
    if a < ratio(1, 2) {
        return Err(BaileyError::Shape { a, n: 1 });
    }
    let expect = alpha_template(a, lin, n_max, o);
    if let Some(n) = (0..=n_max).find(|&n| expect[n] != bp.alpha[n]) {
        return Err(BaileyError::Shape { a, n });
    }
    let alpha = alpha_template(a, a, n_max, o);
    let beta = bp.beta.iter().enumerate().map(|(n, b)| b.shift_truncated(int(n as i64)).expect("nonnegative shift")).collect();
    Ok(BaileyPair { a_exponent: bp.a_exponent, alpha, beta, order: o })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStage {
    /// `None` for the starting unit pair.
    pub transform: Option<TransformId>,
    /// The `A` passed to `P41`.
    pub argument: Option<Exponent>,
    pub pair: BaileyPair,
    pub valid: bool,
}

/// Every stage from the unit pair to `(α^{(k)}, β^{(k)})`; the last stage is the result.
pub fn build_chain_trace(gp: GordonParams, n_max: usize, order: Exponent) -> Result<Vec<ChainStage>, BaileyError> {
    if gp.same_parity() {
        return Err(ParamError::Parity(format!("the chain needs k ≢ a (mod 2), got {}", gp)).into());
    }
    let mut stages = Vec::new();
    let push = |stages: &mut Vec<ChainStage>, t: Option<TransformId>, arg: Option<Exponent>, pair: BaileyPair| {
        let valid = check_pair(&pair);
        stages.push(ChainStage { transform: t, argument: arg, pair, valid });
    };
    let mut cur = unit_pair(n_max, order);
    push(&mut stages, None, None, cur.clone());
    cur = apply_d1(&cur);
    push(&mut stages, Some(TransformId::D1), None, cur.clone());
    for m in 1..=(gp.k() - gp.a() - 1) / 2 {
        for _ in 0..2 {
            cur = apply_s2(&cur);
            push(&mut stages, Some(TransformId::S2), None, cur.clone());
        }
        let a = int(m as i64 + 1);
        cur = apply_p41(&cur, a)?;
        push(&mut stages, Some(TransformId::P41), Some(a), cur.clone());
    }
    for _ in 0..gp.a() {
        cur = apply_s2(&cur);
        push(&mut stages, Some(TransformId::S2), None, cur.clone());
    }
    Ok(stages)
}

pub fn build_chain(gp: GordonParams, n_max: usize, order: Exponent) -> Result<BaileyPair, BaileyError> {
    Ok(build_chain_trace(gp, n_max, order)?.pop().expect("chain has a start").pair)
}

/// `α^{(j)}_n = (−1)ⁿ q^{(j+1)n²/2}(q^{−(k−a+1)n/2} + q^{(k−a+1)n/2})` after `j − (k − a)` final `S2` steps.
pub fn alpha_closed(gp: GordonParams, j: u32, n_max: usize, order: Exponent) -> Vec<Series> {
    let lin = ratio((gp.k() - gp.a() + 1) as i64, 2);
    alpha_template(ratio(j as i64 + 1, 2), lin, n_max, order)
}

fn half_multisum(vars: usize, lin: Vec<Exponent>) -> MultiSum {
    let mut ms = MultiSum::new(vars, ratio(1, 2));
    ms.lin_big = lin;
    ms.factors = vec![Factor::inv_q(1); vars];
    if vars > 0 {
        ms.factors[vars - 1] = Factor { num: vec![neg_root()], den: vec![PochSpec::q(2, 2)] };
    }
    ms
}

fn neg_root() -> PochSpec {
    PochSpec::new(-1, ratio(1, 2), int(1)).expect("valid factor")
}

/// The closed multisum for `β^{(k−a)}_n`; with no summation variable it is `qⁿ/(q²;q²)_n`.
pub fn beta_k_minus_a_closed(gp: GordonParams, n: usize, order: Exponent) -> Series {
    let vars = (gp.k() - gp.a()) as usize - 1;
    if vars == 0 {
        return mul(&q_pow(int(n as i64), order), &inv_poch(1, int(2), int(2), n, order));
    }
    let mut ms = half_multisum(vars, coeffs_at(vars, (2..=vars).step_by(2), int(1)));
    ms.cap = Some((n, Factor::inv_q(1)));
    ms.shift = int(n as i64);
    mul(&ms.eval(order), &inv_poch(-1, ratio(1, 2), int(1), n, order))
}

/// The closed multisum for `β^{(k)}_n`, divided by `(−√q;q)_n` the given number of times.
pub fn beta_k_closed(gp: GordonParams, n: usize, order: Exponent, root_factors: u32) -> Series {
    let vars = gp.k() as usize - 1;
    let mut ms = half_multisum(vars, coeffs_at(vars, (gp.a() as usize..=vars).step_by(2), int(1)));
    ms.cap = Some((n, Factor::inv_q(1)));
    let mut s = ms.eval(order);
    for _ in 0..root_factors {
        s = mul(&s, &inv_poch(-1, ratio(1, 2), int(1), n, order));
    }
    s
}

/// Both sides of the `n → ∞` identity on the half-integer grid.
pub fn limit_identity(gp: GordonParams, order: Exponent) -> Result<(Series, Series), BaileyError> {
    if gp.same_parity() {
        return Err(ParamError::Parity(format!("the limit identity needs k ≢ a (mod 2), got {}", gp)).into());
    }
    let vars = gp.k() as usize - 1;
    let lhs = half_multisum(vars, coeffs_at(vars, (gp.a() as usize..=vars).step_by(2), int(1))).eval(order);
    // Σ_{r≥0} with α_0 = 1 folds into the bilateral sum over r ∈ ℤ
    let theta = theta_sum(ratio(gp.a() as i64, 2), int(gp.k() as i64 + 1), order).expect("valid theta parameters");
    let pref = mul(
        &poch_infinite(&neg_root(), order).expect("nonzero parameter"),
        &invert_poch(&PochSpec::q(1, 1), None, order).expect("invertible"),
    );
    Ok((lhs, mul(&pref, &theta)))
}

/// Smallest `n` for which `β^{(k)}_n` and the limit agree below `order`.
pub fn stabilization_depth(order: Exponent) -> usize {
    let o = order.ceil().to_integer().max(0) as usize;
    let mut r = 0usize;
    while r * r < 2 * o {
        r += 1;
    }
    o + r + 1
}

/// Runs the chain to `stabilization_depth(order)` and checks
/// `(q;q)_∞ (−√q;q)_∞ β^{(k)}_n` against both sides of the limit identity.
pub fn stabilization_check(gp: GordonParams, order: Exponent) -> Result<bool, BaileyError> {
    let n = stabilization_depth(order);
    let chain = build_chain(gp, n, order)?;
    let scaled = mul(
        &mul(&chain.beta[n], &poch_infinite(&PochSpec::q(1, 1), order).expect("nonzero parameter")),
        &poch_infinite(&neg_root(), order).expect("nonzero parameter"),
    );
    let (lhs, rhs) = limit_identity(gp, order)?;
    Ok(scaled == lhs && scaled == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(k: u32, a: u32) -> GordonParams {
        GordonParams::new(k, a).unwrap()
    }

    #[test]
    fn unit_pair_values() {
        let u = unit_pair(5, int(20));
        assert_eq!(u.alpha[0], one(int(20)));
        assert_eq!(u.alpha[1], Series::from_i64s(1, &[-1, -1, 0, 0]));
        assert!(check_pair(&u));
        let mut bad = u.clone();
        bad.alpha[1] = &bad.alpha[1] + &q_pow(int(1), int(20));
        assert_eq!(first_failure(&bad), Some(1));
    }

    #[test]
    fn s1_on_unit_pair() {
        let p = apply_s1(&unit_pair(6, int(20)));
        assert!(check_pair(&p));
        for n in 0..=6 {
            // only β_0 is nonzero
            assert_eq!(p.beta[n], inv_poch(1, int(1), int(1), n, int(20)));
        }
    }

    #[test]
    fn d1_gives_first_pair() {
        let o = int(20);
        let p = apply_d1(&unit_pair(8, o));
        assert!(check_pair(&p));
        assert_eq!(p.alpha, alpha_template(int(1), int(1), 8, o));
        for n in 0..=8 {
            assert_eq!(p.beta[n], mul(&q_pow(int(n as i64), o), &inv_poch(1, int(2), int(2), n, o)));
        }
    }

    #[test]
    fn p41_shape_guard() {
        let p = apply_d1(&unit_pair(4, int(12)));
        assert!(matches!(apply_p41(&p, int(1)), Err(BaileyError::Shape { .. })));
        let p = apply_s2(&apply_s2(&p));
        let q = apply_p41(&p, int(2)).unwrap();
        assert!(check_pair(&q));
        assert_eq!(q.alpha, alpha_template(int(2), int(2), 4, int(12)));
    }

    #[test]
    fn chain_two_one() {
        let stages = build_chain_trace(gp(2, 1), 6, int(20)).unwrap();
        let kinds: Vec<_> = stages.iter().map(|s| s.transform).collect();
        assert_eq!(kinds, vec![None, Some(TransformId::D1), Some(TransformId::S2)]);
        assert!(stages.iter().all(|s| s.valid));
        let last = &stages.last().unwrap().pair;
        assert_eq!(last.alpha, alpha_closed(gp(2, 1), 2, 6, int(20)));
    }

    #[test]
    fn beta_closed_forms() {
        let o = int(16);
        for (k, a) in [(2, 1), (3, 2), (4, 1), (5, 2)] {
            let g = gp(k, a);
            let p = build_chain(g, 5, o).unwrap();
            for n in 0..=5 {
                assert_eq!(p.beta[n], beta_k_closed(g, n, o, 1), "beta^(k) at {} n={}", g, n);
            }
        }
        let g = gp(5, 2);
        let mid = build_chain_trace(g, 5, o).unwrap();
        let at = mid.iter().rposition(|s| s.transform == Some(TransformId::P41)).unwrap();
        for n in 0..=5 {
            assert_eq!(mid[at].pair.beta[n], beta_k_minus_a_closed(g, n, o));
        }
    }

    #[test]
    fn printed_double_factor_disagrees() {
        let o = int(10);
        let g = gp(3, 2);
        let p = build_chain(g, 3, o).unwrap();
        assert_ne!(p.beta[1], beta_k_closed(g, 1, o, 2));
    }

    #[test]
    fn limit_two_one() {
        let (l, r) = limit_identity(gp(2, 1), int(30)).unwrap();
        assert_eq!(l, r);
        assert!(l.coeffs()[0] == num_bigint::BigInt::from(1));
        assert!(limit_identity(gp(3, 1), int(5)).is_err());
    }

    #[test]
    fn stabilizes() {
        assert!(stabilization_check(gp(2, 1), int(8)).unwrap());
    }
}
