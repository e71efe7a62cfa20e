//! Nested sums over `N_1 >= N_2 >= ... >= N_m >= 0` with `n_i = N_i - N_{i+1}`.
//!
//! A summand is `q^E · Π_i F_i(n_i)` where
//! `E = quad·ΣN_i² + Σ c_i N_i + Σ d_i n_i (+ constant)` and every `F_i` is a ratio
//! of finite q-Pochhammer products in `n_i`. All coefficients are nonnegative,
//! so a branch is cut as soon as its least possible exponent reaches the order.

use num_traits::Zero;

use crate::qseries::{grid_len, invert_poch, poch_finite, Exponent, PochSpec, Series};

/// `Π num_j(n) / Π den_j(n)` for finite Pochhammer symbols of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub num: Vec<PochSpec>,
    pub den: Vec<PochSpec>,
}

impl Factor {
    pub fn one() -> Self {
        Factor { num: Vec::new(), den: Vec::new() }
    }

    /// `1/(q^b; q^b)_n`.
    pub fn inv_q(b: i64) -> Self {
        Factor { num: Vec::new(), den: vec![PochSpec::q(b, b)] }
    }

    pub fn eval(&self, n: usize, order: Exponent) -> Series {
        let mut s = Series::one(1, grid_len(order, 1));
        for p in &self.num {
            s = &s * &poch_finite(p, n, order);
        }
        for p in &self.den {
            s = &s * &invert_poch(p, Some(n), order).expect("factor denominators are invertible");
        }
        s
    }

    fn grid(&self) -> u32 {
        self.num
            .iter()
            .chain(&self.den)
            .fold(1u32, |d, p| num_integer::lcm(num_integer::lcm(d, *p.exponent.denom() as u32), *p.base.denom() as u32))
    }
}

#[derive(Debug, Clone)]
pub struct MultiSum {
    /// Number of summation variables `m`.
    pub vars: usize,
    pub quad: Exponent,
    /// Coefficient of `N_i`, `i = 1..=m` (index 0 is `N_1`).
    pub lin_big: Vec<Exponent>,
    /// Coefficient of `n_i`.
    pub lin_small: Vec<Exponent>,
    /// `F_i`, applied to `n_i`.
    pub factors: Vec<Factor>,
    /// Optional upper bound `N_1 <= cap` together with a factor applied to `cap - N_1`.
    pub cap: Option<(usize, Factor)>,
    /// Constant added to every exponent.
    pub shift: Exponent,
}

impl MultiSum {
    pub fn new(vars: usize, quad: Exponent) -> Self {
        MultiSum {
            vars,
            quad,
            lin_big: vec![Exponent::zero(); vars],
            lin_small: vec![Exponent::zero(); vars],
            factors: vec![Factor::one(); vars],
            cap: None,
            shift: Exponent::zero(),
        }
    }

    fn grid(&self, order: Exponent) -> u32 {
        let mut d = *order.denom() as u32;
        let exps = std::iter::once(self.quad).chain(self.lin_big.iter().copied()).chain(self.lin_small.iter().copied());
        for e in exps.chain(std::iter::once(self.shift)) {
            d = num_integer::lcm(d, *e.denom() as u32);
        }
        for f in self.factors.iter().chain(self.cap.iter().map(|(_, f)| f)) {
            d = num_integer::lcm(d, f.grid());
        }
        d
    }

    /// Largest `N` with `quad·N² < order`.
    fn max_index(&self, order: Exponent) -> usize {
        let mut n = 0usize;
        while self.quad * Exponent::from_integer(((n + 1) * (n + 1)) as i64) < order {
            n += 1;
        }
        if let Some((c, _)) = &self.cap {
            n = n.min(*c);
        }
        n
    }

    pub fn eval(&self, order: Exponent) -> Series {
        assert_eq!(self.lin_big.len(), self.vars);
        assert_eq!(self.lin_small.len(), self.vars);
        assert_eq!(self.factors.len(), self.vars);
        let d = self.grid(order);
        let len = grid_len(order, d);
        let mut acc = Series::zero(d, len);
        if self.shift >= order {
            return acc;
        }
        let nmax = self.max_index(order);
        let tables: Vec<Vec<Series>> =
            self.factors.iter().map(|f| (0..=nmax).map(|n| f.eval(n, order).with_denom(d)).collect()).collect();
        let cap_table: Option<Vec<Series>> =
            self.cap.as_ref().map(|(c, f)| (0..=*c).map(|n| f.eval(n, order).with_denom(d)).collect());
        let ctx = Ctx { ms: self, order, d, nmax, tables, cap_table };
        let one = Series::one(d, len);
        if self.vars == 0 {
            let mut s = one;
            if let (Some((c, _)), Some(t)) = (&self.cap, &ctx.cap_table) {
                s = &s * &t[*c];
            }
            add_shifted(&mut acc, &s, self.shift, d);
            return acc;
        }
        ctx.rec(self.vars, 0, self.shift, &one, &mut acc);
        acc
    }
}

struct Ctx<'a> {
    ms: &'a MultiSum,
    order: Exponent,
    d: u32,
    nmax: usize,
    tables: Vec<Vec<Series>>,
    cap_table: Option<Vec<Series>>,
}

impl Ctx<'_> {
    /// Choose `n_i` for `i` (1-based) given `N_{i+1} = next`.
    fn rec(&self, i: usize, next: usize, e_partial: Exponent, prod: &Series, acc: &mut Series) {
        let ms = self.ms;
        let quad = ms.quad;
        for ni in 0.. {
            let big = next + ni;
            if big > self.nmax {
                break;
            }
            let bigq = Exponent::from_integer(big as i64);
            let c = quad * bigq * bigq + ms.lin_big[i - 1] * bigq + ms.lin_small[i - 1] * Exponent::from_integer(ni as i64);
            let e = e_partial + c;
            // every remaining N_j is at least N_i
            let lower = e + quad * bigq * bigq * Exponent::from_integer(i as i64 - 1);
            if lower >= self.order {
                break;
            }
            let room = grid_len(self.order - lower, self.d);
            let p = prod.mul_to(&self.tables[i - 1][ni], room);
            if i == 1 {
                let p = match (&ms.cap, &self.cap_table) {
                    (Some((cap, _)), Some(t)) => p.mul_to(&t[cap - big], room),
                    _ => p,
                };
                add_shifted(acc, &p, e, self.d);
            } else {
                self.rec(i - 1, big, e, &p, acc);
            }
        }
    }
}

fn add_shifted(acc: &mut Series, s: &Series, e: Exponent, d: u32) {
    let k = (e * Exponent::from_integer(d as i64)).to_integer() as usize;
    let s = s.with_denom(d);
    let coeffs = acc.coeffs_mut();
    for (j, c) in s.coeffs().iter().enumerate() {
        if k + j >= coeffs.len() {
            break;
        }
        if !c.is_zero() {
            coeffs[k + j] += c;
        }
    }
}

/// Coefficients `c_i = value` for `i` in `indices` (1-based).
pub fn coeffs_at(vars: usize, indices: impl IntoIterator<Item = usize>, value: Exponent) -> Vec<Exponent> {
    let mut v = vec![Exponent::zero(); vars];
    for i in indices {
        if i >= 1 && i <= vars {
            v[i - 1] = value;
        }
    }
    v
}
