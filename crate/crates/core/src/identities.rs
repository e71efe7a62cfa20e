//! Both sides of each identity, evaluated as truncated series and compared exactly.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::lattice_paths::{count_s_table, EStepRule};
use crate::multisum::{coeffs_at, Factor, MultiSum};
use crate::partitions::{table, Family, GordonParams, ParamError};
use crate::qseries::{int, invert_poch, poch_infinite, triple_product, Exponent, PochSpec, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// Andrews–Gordon multisum against its product.
    AG,
    /// Even parts with even multiplicity, `k ≡ a (mod 2)`.
    WSame,
    /// Even parts with even multiplicity, `k ≢ a (mod 2)`; two-product right side.
    WDiff,
    /// Odd parts with even multiplicity, `k` odd and `a` even.
    WbarOddEven,
    /// Odd parts with even multiplicity, `k` even and `a` odd.
    WbarEvenOdd,
    /// `(−q;q²)` multisum for `k ≢ a (mod 2)`.
    Main,
    /// Lattice-path count against the same multisum as `Main`.
    Paths,
}

impl Theorem {
    pub const ALL: [Theorem; 7] =
        [Theorem::AG, Theorem::WSame, Theorem::WDiff, Theorem::WbarOddEven, Theorem::WbarEvenOdd, Theorem::Main, Theorem::Paths];

    /// Whether `(k, a)` satisfies the parity hypothesis.
    pub fn accepts(self, gp: GordonParams) -> bool {
        let (k, a) = (gp.k(), gp.a());
        match self {
            Theorem::AG => true,
            Theorem::WSame => gp.same_parity(),
            Theorem::WDiff | Theorem::Main | Theorem::Paths => !gp.same_parity(),
            Theorem::WbarOddEven => k % 2 == 1 && a % 2 == 0,
            Theorem::WbarEvenOdd => k % 2 == 0 && a % 2 == 1,
        }
    }

    /// The W theorem whose parity hypothesis `(k, a)` meets.
    pub fn for_w(gp: GordonParams) -> Theorem {
        if gp.same_parity() {
            Theorem::WSame
        } else {
            Theorem::WDiff
        }
    }

    pub fn for_wbar(gp: GordonParams) -> Option<Theorem> {
        [Theorem::WbarOddEven, Theorem::WbarEvenOdd].into_iter().find(|t| t.accepts(gp))
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theorem::AG => "ag",
            Theorem::WSame => "w-same",
            Theorem::WDiff => "w-diff",
            Theorem::WbarOddEven => "wbar-odd-even",
            Theorem::WbarEvenOdd => "wbar-even-odd",
            Theorem::Main => "main",
            Theorem::Paths => "paths",
        };
        f.write_str(s)
    }
}

impl FromStr for Theorem {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown theorem {:?}", s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySpec {
    pub theorem: Theorem,
    pub params: GordonParams,
    pub order: u32,
}

impl IdentitySpec {
    pub fn new(theorem: Theorem, params: GordonParams, order: u32) -> Result<Self, ParamError> {
        if !theorem.accepts(params) {
            return Err(ParamError::Parity(format!("{} does not apply to {}", theorem, params)));
        }
        Ok(IdentitySpec { theorem, params, order })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub spec: IdentitySpec,
    pub lhs: Series,
    pub rhs: Series,
    pub equal: bool,
    /// `(exponent, lhs coefficient, rhs coefficient)` as strings.
    pub first_discrepancy: Option<(String, String, String)>,
}

/// `from, from + 2, ...` up to `to`; empty when `to < from`.
fn odd_steps(from: i64, to: i64) -> impl Iterator<Item = usize> {
    (from..=to).step_by(2).map(|i| i as usize)
}

/// Andrews–Gordon multisum: `q^{ΣN_i² + N_a + ... + N_{k-1}} / Π (q)_{n_i}`.
pub fn eval_multisum_ag(gp: GordonParams, order: u32) -> Series {
    let m = gp.k() as usize - 1;
    let mut ms = MultiSum::new(m, int(1));
    ms.lin_big = coeffs_at(m, gp.a() as usize..=m, int(1));
    ms.factors = vec![Factor::inv_q(1); m];
    ms.eval(int(order as i64))
}

/// The W multisum in either parity case, with `(q²;q²)` denominators.
pub fn eval_multisum_w(gp: GordonParams, order: u32) -> Series {
    let m = gp.k() as usize - 1;
    let top = gp.k() as i64 - if gp.same_parity() { 2 } else { 1 };
    let mut ms = MultiSum::new(m, int(1));
    ms.lin_big = coeffs_at(m, odd_steps(gp.a() as i64, top), int(2));
    ms.factors = vec![Factor::inv_q(2); m];
    ms.eval(int(order as i64))
}

/// The W̄ multisum; needs `k` and `a` of opposite parity.
pub fn eval_multisum_wbar(gp: GordonParams, order: u32) -> Result<Series, ParamError> {
    let (k, a) = (gp.k(), gp.a());
    let m = k as usize - 1;
    let mut ms = MultiSum::new(m, int(1));
    match Theorem::for_wbar(gp) {
        Some(Theorem::WbarOddEven) => {
            ms.lin_small = coeffs_at(m, odd_steps(1, a as i64 - 3), int(1));
            ms.lin_big = coeffs_at(m, a as usize - 1..=m, int(1));
        }
        Some(_) => {
            ms.lin_small = coeffs_at(m, odd_steps(1, a as i64 - 2), int(1));
            ms.lin_big = coeffs_at(m, a as usize..=m, int(1));
        }
        None => return Err(ParamError::Parity(format!("no W-bar multisum for {}", gp))),
    }
    ms.factors = vec![Factor::inv_q(2); m];
    Ok(ms.eval(int(order as i64)))
}

fn main_multisum(gp: GordonParams) -> MultiSum {
    let m = gp.k() as usize - 1;
    let mut ms = MultiSum::new(m, int(1));
    ms.lin_big = coeffs_at(m, odd_steps(gp.a() as i64, gp.k() as i64 - 1), int(2));
    ms.factors = vec![Factor::inv_q(2); m];
    ms.factors[m - 1] = Factor { num: vec![PochSpec::neg_q(1, 2)], den: vec![PochSpec::q(4, 4)] };
    ms
}

/// `Σ q^{ΣN_i² + 2N_a + 2N_{a+2} + ... + 2N_{k-1}} (−q;q²)_{n_{k-1}} / (Π_{i<k-1} (q²;q²)_{n_i} · (q⁴;q⁴)_{n_{k-1}})`.
pub fn eval_multisum_main(gp: GordonParams, order: u32) -> Result<Series, ParamError> {
    if gp.same_parity() {
        return Err(ParamError::Parity(format!("the (−q;q²) multisum needs k ≢ a (mod 2), got {}", gp)));
    }
    Ok(main_multisum(gp).eval(int(order as i64)))
}

fn tp(e1: i64, e2: i64, e3: i64, order: Exponent) -> Series {
    triple_product(int(e1), int(e2), int(e3), order).expect("exponents within range")
}

fn inv(spec: PochSpec, order: Exponent) -> Series {
    invert_poch(&spec, None, order).expect("nonzero constant term")
}

fn pinf(spec: PochSpec, order: Exponent) -> Series {
    poch_infinite(&spec, order).expect("nonzero parameter")
}

/// Right side of `spec.theorem`.
pub fn eval_product_side(spec: &IdentitySpec) -> Series {
    let (k, a) = (spec.params.k() as i64, spec.params.a() as i64);
    let o = int(spec.order as i64);
    match spec.theorem {
        Theorem::AG => &tp(a, 2 * k + 1 - a, 2 * k + 1, o) * &inv(PochSpec::q(1, 1), o),
        Theorem::WSame | Theorem::Main | Theorem::Paths => {
            let s = &pinf(PochSpec::neg_q(1, 2), o) * &tp(a, 2 * k + 2 - a, 2 * k + 2, o);
            &s * &inv(PochSpec::q(2, 2), o)
        }
        Theorem::WDiff => {
            let first = tp(a + 1, 2 * k + 1 - a, 2 * k + 2, o);
            let second = tp(a - 1, 2 * k + 3 - a, 2 * k + 2, o).shift_truncated(int(1)).expect("positive shift");
            let s = &pinf(PochSpec::neg_q(3, 2), o) * &(&first + &second);
            &s * &inv(PochSpec::q(2, 2), o)
        }
        Theorem::WbarOddEven => {
            let s = &pinf(PochSpec::neg_q(2, 2), o) * &tp(a, 2 * k + 2 - a, 2 * k + 2, o);
            &s * &inv(PochSpec::q(2, 2), o)
        }
        Theorem::WbarEvenOdd => {
            let s = &pinf(PochSpec::neg_q(2, 2), o) * &tp(a + 1, 2 * k + 1 - a, 2 * k + 2, o);
            &s * &inv(PochSpec::q(2, 2), o)
        }
    }
}

/// The multisum side of `spec.theorem`; for `Paths` this is the brute-force path count.
pub fn eval_sum_side(spec: &IdentitySpec) -> Series {
    let gp = spec.params;
    let o = spec.order;
    match spec.theorem {
        Theorem::AG => eval_multisum_ag(gp, o),
        Theorem::WSame | Theorem::WDiff => eval_multisum_w(gp, o),
        Theorem::WbarOddEven | Theorem::WbarEvenOdd => eval_multisum_wbar(gp, o).expect("parity checked on construction"),
        Theorem::Main => eval_multisum_main(gp, o).expect("parity checked on construction"),
        Theorem::Paths => {
            if o == 0 {
                return Series::zero(1, 0);
            }
            counts_to_series(&count_s_table(gp, o as u64 - 1, EStepRule::default()))
        }
    }
}

/// `Σ c_n q^n` with the order just past the last entry.
pub fn counts_to_series(counts: &[u64]) -> Series {
    Series::new(1, counts.iter().map(|&c| BigInt::from(c)).collect())
}

/// Generating function of a partition family to `q^order`.
pub fn family_series(family: Family, gp: GordonParams, order: u32) -> Series {
    if order == 0 {
        return Series::zero(1, 0);
    }
    counts_to_series(&table(family, gp, order - 1))
}

/// Both sides of the identity: for `Paths` the right side is the multisum.
pub fn verify(spec: &IdentitySpec) -> VerificationReport {
    let (lhs, rhs) = match spec.theorem {
        Theorem::Paths => (eval_sum_side(spec), main_multisum(spec.params).eval(int(spec.order as i64))),
        _ => (eval_sum_side(spec), eval_product_side(spec)),
    };
    let first_discrepancy = lhs.first_difference(&rhs).map(|(e, l, r)| (e.to_string(), l.to_string(), r.to_string()));
    VerificationReport { spec: *spec, equal: first_discrepancy.is_none(), lhs, rhs, first_discrepancy }
}
