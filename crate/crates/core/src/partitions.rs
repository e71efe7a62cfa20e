//! Brute-force partition oracles for the Gordon family of counting functions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("need 1 <= a <= k, got k={k}, a={a}")]
    OutOfRange { k: u32, a: u32 },
    #[error("{0}")]
    Parity(String),
}

/// The pair `(k, a)` with `1 <= a <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GordonParams {
    k: u32,
    a: u32,
}

impl GordonParams {
    pub fn new(k: u32, a: u32) -> Result<Self, ParamError> {
        if a < 1 || a > k {
            return Err(ParamError::OutOfRange { k, a });
        }
        Ok(GordonParams { k, a })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    /// `k ≡ a (mod 2)`.
    pub fn same_parity(&self) -> bool {
        (self.k + self.a) % 2 == 0
    }
}

impl fmt::Display for GordonParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, a={})", self.k, self.a)
    }
}

/// A partition stored as part value → multiplicity. Zero multiplicities are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    freqs: BTreeMap<u32, u32>,
}

impl Partition {
    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn from_parts(parts: &[u32]) -> Self {
        let mut freqs = BTreeMap::new();
        for &p in parts {
            assert!(p > 0, "parts are positive");
            *freqs.entry(p).or_insert(0) += 1;
        }
        Partition { freqs }
    }

    pub fn from_freqs(freqs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let freqs = freqs.into_iter().filter(|&(p, f)| p > 0 && f > 0).collect();
        Partition { freqs }
    }

    pub fn freq(&self, part: u32) -> u32 {
        self.freqs.get(&part).copied().unwrap_or(0)
    }

    pub fn freqs(&self) -> &BTreeMap<u32, u32> {
        &self.freqs
    }

    pub fn weight(&self) -> u64 {
        self.freqs.iter().map(|(&p, &f)| p as u64 * f as u64).sum()
    }

    pub fn largest_part(&self) -> u32 {
        self.freqs.keys().next_back().copied().unwrap_or(0)
    }

    /// Parts in nonincreasing order.
    pub fn parts(&self) -> Vec<u32> {
        self.freqs
            .iter()
            .rev()
            .flat_map(|(&p, &f)| std::iter::repeat(p).take(f as usize))
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.parts();
        if parts.is_empty() {
            return write!(f, "()");
        }
        let s: Vec<String> = parts.iter().map(u32::to_string).collect();
        write!(f, "{}", s.join("+"))
    }
}

/// `f_1 <= a-1` and `f_i + f_{i+1} <= k-1` for every `i >= 1`.
pub fn is_gordon_admissible(p: &Partition, gp: GordonParams) -> bool {
    if p.freq(1) > gp.a - 1 {
        return false;
    }
    (1..=p.largest_part()).all(|i| p.freq(i) + p.freq(i + 1) <= gp.k - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// No part congruent to `0` or `±a` modulo `2k+1`.
    A,
    /// Gordon frequency conditions.
    B,
    /// Gordon conditions, every even part with even multiplicity.
    W,
    /// Gordon conditions, every odd part with even multiplicity.
    Wbar,
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Family::A),
            "b" => Ok(Family::B),
            "w" => Ok(Family::W),
            "wbar" => Ok(Family::Wbar),
            _ => Err(format!("unknown family {:?} (expected A, B, W or Wbar)", s)),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::W => "W",
            Family::Wbar => "Wbar",
        };
        f.write_str(s)
    }
}

fn part_allowed_a(part: u32, gp: GordonParams) -> bool {
    let m = 2 * gp.k + 1;
    let r = part % m;
    r != 0 && r != gp.a && r != m - gp.a
}

fn parity_ok(family: Family, part: u32, f: u32) -> bool {
    match family {
        Family::W => part % 2 == 1 || f % 2 == 0,
        Family::Wbar => part % 2 == 0 || f % 2 == 0,
        _ => true,
    }
}

/// Membership test for a single partition.
pub fn in_family(p: &Partition, family: Family, gp: GordonParams) -> bool {
    match family {
        Family::A => p.freqs.keys().all(|&part| part_allowed_a(part, gp)),
        _ => is_gordon_admissible(p, gp) && p.freqs.iter().all(|(&part, &f)| parity_ok(family, part, f)),
    }
}

/// Every partition of `n`, largest part first. Exhaustive and unfiltered.
pub fn all_partitions(n: u32) -> Vec<Partition> {
    fn rec(remaining: u32, max_part: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition::from_parts(cur));
            return;
        }
        for p in (1..=max_part.min(remaining)).rev() {
            cur.push(p);
            rec(remaining - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Reference count: enumerate every partition of `n` and filter.
pub fn count_naive(family: Family, gp: GordonParams, n: u32) -> u64 {
    all_partitions(n).iter().filter(|p| in_family(p, family, gp)).count() as u64
}

/// Visit every member of `family` with weight at most `n_max`.
///
/// Parts are chosen in increasing order with their multiplicities, so the
/// adjacency, `f_1` and parity conditions prune the search as it goes.
pub fn for_each_member(family: Family, gp: GordonParams, n_max: u32, mut visit: impl FnMut(&[(u32, u32)], u32)) {
    let mut stack: Vec<(u32, u32)> = Vec::new();
    rec(family, gp, 1, 0, n_max, n_max, &mut stack, &mut visit);

    #[allow(clippy::too_many_arguments)]
    fn rec(
        family: Family,
        gp: GordonParams,
        part: u32,
        prev_f: u32,
        remaining: u32,
        n_max: u32,
        stack: &mut Vec<(u32, u32)>,
        visit: &mut impl FnMut(&[(u32, u32)], u32),
    ) {
        if part > remaining {
            visit(stack, n_max - remaining);
            return;
        }
        let max_f = match family {
            Family::A if !part_allowed_a(part, gp) => 0,
            Family::A => remaining / part,
            _ => {
                let mut m = (gp.k - 1 - prev_f).min(remaining / part);
                if part == 1 {
                    m = m.min(gp.a - 1);
                }
                m
            }
        };
        for f in 0..=max_f {
            if !parity_ok(family, part, f) {
                continue;
            }
            if f > 0 {
                stack.push((part, f));
            }
            rec(family, gp, part + 1, f, remaining - f * part, n_max, stack, visit);
            if f > 0 {
                stack.pop();
            }
        }
    }
}

/// Members of `family` with weight exactly `n`.
pub fn members(family: Family, gp: GordonParams, n: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    for_each_member(family, gp, n, |freqs, w| {
        if w == n {
            out.push(Partition::from_freqs(freqs.iter().copied()));
        }
    });
    out
}

/// `[count(0), ..., count(n_max)]`.
pub fn table(family: Family, gp: GordonParams, n_max: u32) -> Vec<u64> {
    let mut counts = vec![0u64; n_max as usize + 1];
    for_each_member(family, gp, n_max, |_, w| counts[w as usize] += 1);
    counts
}

pub fn count(family: Family, gp: GordonParams, n: u32) -> u64 {
    table(family, gp, n)[n as usize]
}

pub fn count_a(n: u32, gp: GordonParams) -> u64 {
    count(Family::A, gp, n)
}

pub fn count_b(n: u32, gp: GordonParams) -> u64 {
    count(Family::B, gp, n)
}

pub fn count_w(n: u32, gp: GordonParams) -> u64 {
    count(Family::W, gp, n)
}

pub fn count_wbar(n: u32, gp: GordonParams) -> u64 {
    count(Family::Wbar, gp, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(k: u32, a: u32) -> GordonParams {
        GordonParams::new(k, a).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GordonParams::new(3, 0).is_err());
        assert!(GordonParams::new(3, 4).is_err());
        assert!(GordonParams::new(1, 1).is_ok());
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_gordon_admissible(&Partition::empty(), gp(2, 1)));
        assert!(!is_gordon_admissible(&Partition::from_parts(&[1]), gp(2, 1)));
        assert!(is_gordon_admissible(&Partition::from_parts(&[4, 1]), gp(2, 2)));
        assert!(!is_gordon_admissible(&Partition::from_parts(&[3, 2]), gp(2, 2)));
    }

    #[test]
    fn partition_basics() {
        let p = Partition::from_parts(&[3, 1, 3, 2]);
        assert_eq!(p.parts(), vec![3, 3, 2, 1]);
        assert_eq!(p.weight(), 9);
        assert_eq!(p.freq(3), 2);
        assert_eq!(p.to_string(), "3+3+2+1");
    }

    #[test]
    fn partition_numbers() {
        let p: Vec<usize> = (0..10).map(|n| all_partitions(n).len()).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30]);
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_b(4, gp(2, 2)), 2);
        assert_eq!(count_a(4, gp(2, 2)), 2);
        assert_eq!(count_b(1, gp(2, 1)), 0);
        assert_eq!(table(Family::B, gp(2, 2), 10), vec![1, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6]);
        for k in 1..=4 {
            for a in 1..=k {
                for f in [Family::A, Family::B, Family::W, Family::Wbar] {
                    assert_eq!(count(f, gp(k, a), 0), 1);
                }
                assert_eq!(count_wbar(1, gp(k, a)), 0);
            }
        }
    }

    #[test]
    fn w33_at_four() {
        // partitions of 4: 4, 3+1, 2+2, 2+1+1, 1+1+1+1
        let expected = all_partitions(4)
            .into_iter()
            .filter(|p| is_gordon_admissible(p, gp(3, 3)) && p.freq(2) % 2 == 0 && p.freq(4) % 2 == 0)
            .count() as u64;
        assert_eq!(count_w(4, gp(3, 3)), expected);
        assert_eq!(expected, 2); // 3+1 and 2+2
    }

    #[test]
    fn pruned_generator_matches_naive() {
        for k in 1..=4 {
            for a in 1..=k {
                for f in [Family::A, Family::B, Family::W, Family::Wbar] {
                    let t = table(f, gp(k, a), 20);
                    for n in 0..=20 {
                        assert_eq!(t[n as usize], count_naive(f, gp(k, a), n), "{} {:?} n={}", f, (k, a), n);
                    }
                }
            }
        }
    }

    #[test]
    fn members_are_members() {
        let g = gp(3, 2);
        for p in members(Family::W, g, 12) {
            assert_eq!(p.weight(), 12);
            assert!(in_family(&p, Family::W, g));
        }
    }

    #[test]
    fn family_parse() {
        assert_eq!("wbar".parse::<Family>().unwrap(), Family::Wbar);
        assert_eq!("B".parse::<Family>().unwrap(), Family::B);
        assert!("C".parse::<Family>().is_err());
    }
}
