//! Lattice paths with NE, SE and E steps: peaks, relative heights, the major
//! index, the path counting function `S_{k,a}`, and the staged bijection
//! between construction data and admissible paths.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::partitions::GordonParams;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("invalid path: {0}")]
    Invalid(String),
    #[error("no peak with index {0}")]
    NoSuchPeak(usize),
    #[error("peak {index} has relative height {rel}, right-move needs 1")]
    NotMovable { index: usize, rel: u32 },
    #[error("no legal move: {0}")]
    Blocked(String),
    #[error("invalid construction data: {0}")]
    BadData(String),
    #[error("path is not admissible for {0}")]
    NotAdmissible(GordonParams),
    #[error("path is not produced by the construction: {0}")]
    NotInImage(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    NorthEast,
    SouthEast,
    East,
}

use Step::{East as E, NorthEast as NE, SouthEast as SE};

impl Step {
    pub fn symbol(self) -> char {
        match self {
            NE => 'N',
            SE => 'S',
            E => 'E',
        }
    }

    pub fn from_symbol(c: char) -> Option<Step> {
        match c {
            'N' => Some(NE),
            'S' => Some(SE),
            'E' => Some(E),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peak {
    pub weight: u32,
    pub height: u32,
    pub relative_height: u32,
}

/// A path starting at `(0, start)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePath {
    start: u32,
    steps: Vec<Step>,
}

fn heights_of(start: u32, steps: &[Step]) -> Option<Vec<u32>> {
    let mut h = Vec::with_capacity(steps.len() + 1);
    let mut y = start as i64;
    h.push(start);
    for s in steps {
        match s {
            NE => y += 1,
            SE => y -= 1,
            E => {
                if y != 0 {
                    return None;
                }
            }
        }
        if y < 0 {
            return None;
        }
        h.push(y as u32);
    }
    Some(h)
}

/// Peak vertices `(x, y)` of a step sequence.
fn raw_peaks(heights: &[u32], steps: &[Step]) -> Vec<(usize, u32)> {
    (1..steps.len()).filter(|&x| steps[x - 1] == NE && steps[x] == SE).map(|x| (x, heights[x])).collect()
}

/// Relative heights of every peak, left to right.
fn relative_heights(heights: &[u32], peaks: &[(usize, u32)]) -> Vec<u32> {
    peaks
        .iter()
        .map(|&(x, y)| {
            let mut best = 0;
            for h in 1..=y {
                let level = y - h;
                let Some(left) = (0..x).rev().find(|&i| heights[i] == level) else { break };
                let Some(right) = (x + 1..heights.len()).find(|&i| heights[i] == level) else { break };
                let blocked = peaks
                    .iter()
                    .any(|&(px, py)| px > left && px < right && (py > y || (py == y && px < x)));
                if blocked {
                    break;
                }
                best = h;
            }
            best
        })
        .collect()
}

impl LatticePath {
    pub fn new(start: u32, steps: Vec<Step>) -> Result<Self, PathError> {
        let p = LatticePath { start, steps };
        p.validate()?;
        Ok(p)
    }

    /// The path descending straight from `(0, start)` to the axis.
    pub fn descent(start: u32) -> Self {
        LatticePath { start, steps: vec![SE; start as usize] }
    }

    fn validate(&self) -> Result<(), PathError> {
        let h = heights_of(self.start, &self.steps)
            .ok_or_else(|| PathError::Invalid("height drops below 0 or E step off the axis".into()))?;
        match self.steps.last() {
            None if self.start == 0 => Ok(()),
            None => Err(PathError::Invalid("empty path must start on the axis".into())),
            Some(SE) if *h.last().unwrap() == 0 => Ok(()),
            Some(_) => Err(PathError::Invalid("path must end with SE on the axis".into())),
        }
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn heights(&self) -> Vec<u32> {
        heights_of(self.start, &self.steps).expect("validated path")
    }

    pub fn max_height(&self) -> u32 {
        self.heights().into_iter().max().unwrap_or(0)
    }

    pub fn peaks(&self) -> Vec<Peak> {
        let h = self.heights();
        let raw = raw_peaks(&h, &self.steps);
        let rel = relative_heights(&h, &raw);
        raw.iter()
            .zip(rel)
            .map(|(&(x, y), r)| Peak { weight: x as u32, height: y, relative_height: r })
            .collect()
    }

    pub fn major_index(&self) -> u64 {
        (1..self.steps.len())
            .filter(|&x| self.steps[x - 1] == NE && self.steps[x] == SE)
            .map(|x| x as u64)
            .sum()
    }

    /// Number of E steps before vertex `x`.
    pub fn east_before(&self, x: usize) -> usize {
        self.steps[..x.min(self.steps.len())].iter().filter(|&&s| s == E).count()
    }

    /// Compact form `h=<start>:<steps>` over the alphabet `N`, `S`, `E`.
    pub fn to_compact(&self) -> String {
        let s: String = self.steps.iter().map(|s| s.symbol()).collect();
        format!("h={}:{}", self.start, s)
    }

    pub fn to_svg(&self) -> String {
        render_svg(self)
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

impl FromStr for LatticePath {
    type Err = PathError;
    fn from_str(s: &str) -> Result<Self, PathError> {
        let rest = s.strip_prefix("h=").ok_or_else(|| PathError::Parse("expected h=<start>:<steps>".into()))?;
        let (h, steps) = rest.split_once(':').ok_or_else(|| PathError::Parse("missing ':'".into()))?;
        let start = h.trim().parse().map_err(|_| PathError::Parse(format!("bad start height {:?}", h)))?;
        let steps = steps
            .trim()
            .chars()
            .map(|c| Step::from_symbol(c).ok_or_else(|| PathError::Parse(format!("bad step {:?}", c))))
            .collect::<Result<Vec<_>, _>>()?;
        LatticePath::new(start, steps)
    }
}

#[derive(Serialize, Deserialize)]
struct PathJson {
    start: u32,
    steps: String,
    #[serde(default)]
    peaks: Vec<(u32, u32, u32)>,
    #[serde(default)]
    major_index: u64,
}

impl Serialize for LatticePath {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PathJson {
            start: self.start,
            steps: self.steps.iter().map(|s| s.symbol()).collect(),
            peaks: self.peaks().iter().map(|p| (p.weight, p.height, p.relative_height)).collect(),
            major_index: self.major_index(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LatticePath {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = PathJson::deserialize(de)?;
        format!("h={}:{}", j.start, j.steps).parse().map_err(serde::de::Error::custom)
    }
}

fn render_svg(p: &LatticePath) -> String {
    let unit = 20.0;
    let h = p.heights();
    let width = p.len().max(1) as f64;
    let height = *h.iter().max().unwrap_or(&0) as f64 + 1.0;
    let (w_px, h_px) = (width * unit + 2.0 * unit, height * unit + 2.0 * unit);
    let px = |x: f64, y: f64| (unit + x * unit, h_px - unit - y * unit);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w_px}\" height=\"{h_px}\" viewBox=\"0 0 {w_px} {h_px}\">\n"
    );
    let (x0, y0) = px(0.0, 0.0);
    let (x1, _) = px(width + 0.5, 0.0);
    let (_, y1) = px(0.0, height);
    out += &format!("<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n");
    out += &format!("<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n");
    for i in 1..=p.len() {
        let (x, y) = px(i as f64, 0.0);
        out += &format!("<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>\n", y - 3.0, y + 3.0);
    }
    for j in 1..height as usize {
        let (x, y) = px(0.0, j as f64);
        out += &format!("<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"black\"/>\n", x - 3.0, x + 3.0);
    }
    let pts: Vec<String> = h
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let (a, b) = px(i as f64, y as f64);
            format!("{a},{b}")
        })
        .collect();
    out += &format!("<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n", pts.join(" "));
    for pk in p.peaks() {
        let (a, b) = px(pk.weight as f64, pk.height as f64);
        out += &format!("<circle cx=\"{a}\" cy=\"{b}\" r=\"3\"/>\n");
    }
    out += "</svg>\n";
    out
}

/// Reading of the E-step condition on peaks of relative height `k` or `k-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EStepRule {
    /// The number of E steps before each such peak is a multiple of 4.
    #[default]
    BeforeEach,
    /// The number of E steps between any two such peaks is a multiple of 4.
    BetweenPairs,
    /// No E-step condition.
    Ignore,
}

impl FromStr for EStepRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "before-each" => Ok(EStepRule::BeforeEach),
            "between-pairs" => Ok(EStepRule::BetweenPairs),
            "ignore" => Ok(EStepRule::Ignore),
            _ => Err(format!("unknown E-step rule {:?}", s)),
        }
    }
}

fn e_rule_holds(rule: EStepRule, east_counts: &[usize]) -> bool {
    match rule {
        EStepRule::BeforeEach => east_counts.iter().all(|c| c % 4 == 0),
        EStepRule::BetweenPairs => east_counts.windows(2).all(|w| (w[1] - w[0]) % 4 == 0),
        EStepRule::Ignore => true,
    }
}

/// Path conditions for `S_{k,a}` under the given E-step reading.
pub fn is_s_admissible_with(p: &LatticePath, gp: GordonParams, rule: EStepRule) -> bool {
    let (k, a) = (gp.k(), gp.a());
    if p.start != k + 1 - a || p.max_height() > k {
        return false;
    }
    let peaks = p.peaks();
    if peaks.iter().any(|pk| pk.weight % 2 != pk.relative_height % 2) {
        return false;
    }
    let tall: Vec<usize> = peaks
        .iter()
        .filter(|pk| pk.relative_height + 1 >= k)
        .map(|pk| p.east_before(pk.weight as usize))
        .collect();
    e_rule_holds(rule, &tall)
}

pub fn is_s_admissible(p: &LatticePath, gp: GordonParams) -> bool {
    is_s_admissible_with(p, gp, EStepRule::default())
}

/// Visit every valid path from `(0, start)` staying at or below `max_height`
/// whose major index is at most `max_index`, together with its major index.
///
/// After an NE step at abscissa `x` some later peak has weight at least `x+1`,
/// and after an E step at least `x+2`; both bounds prune the search.
pub fn for_each_path(start: u32, max_height: u32, max_index: u64, mut visit: impl FnMut(&[Step], u64)) {
    let mut steps = Vec::new();
    if start == 0 {
        visit(&steps, 0);
    }
    dfs(start, max_height, max_index, 0, &mut steps, &mut visit);

    fn dfs(y: u32, max_h: u32, max_i: u64, mi: u64, steps: &mut Vec<Step>, visit: &mut impl FnMut(&[Step], u64)) {
        let x = steps.len() as u64;
        if y > 0 {
            let peak = steps.last() == Some(&NE);
            let mi2 = if peak { mi + x } else { mi };
            if mi2 <= max_i {
                steps.push(SE);
                if y == 1 {
                    visit(steps, mi2);
                }
                dfs(y - 1, max_h, max_i, mi2, steps, visit);
                steps.pop();
            }
        }
        if y < max_h && mi + x + 1 <= max_i {
            steps.push(NE);
            dfs(y + 1, max_h, max_i, mi, steps, visit);
            steps.pop();
        }
        if y == 0 && !steps.is_empty() && mi + x + 2 <= max_i {
            steps.push(E);
            dfs(0, max_h, max_i, mi, steps, visit);
            steps.pop();
        }
    }
}

/// All paths counted by `S_{k,a}(n)` for `n <= n_max`, under `rule`.
pub fn enumerate_s(gp: GordonParams, n_max: u64, rule: EStepRule) -> Vec<LatticePath> {
    let start = gp.k() + 1 - gp.a();
    let mut out = Vec::new();
    for_each_path(start, gp.k(), n_max, |steps, _| {
        let p = LatticePath { start, steps: steps.to_vec() };
        if is_s_admissible_with(&p, gp, rule) {
            out.push(p);
        }
    });
    out
}

/// `[S_{k,a}(0), ..., S_{k,a}(n_max)]` by exhaustive enumeration.
pub fn count_s_table(gp: GordonParams, n_max: u64, rule: EStepRule) -> Vec<u64> {
    let mut t = vec![0u64; n_max as usize + 1];
    for p in enumerate_s(gp, n_max, rule) {
        t[p.major_index() as usize] += 1;
    }
    t
}

pub fn count_s(n: u64, gp: GordonParams) -> u64 {
    count_s_table(gp, n, EStepRule::default())[n as usize]
}

fn peak_vertices(steps: &[Step]) -> Vec<usize> {
    (1..steps.len()).filter(|&x| steps[x - 1] == NE && steps[x] == SE).collect()
}

fn peak_vertex(steps: &[Step], index: usize) -> Result<usize, PathError> {
    peak_vertices(steps).get(index).copied().ok_or(PathError::NoSuchPeak(index))
}

fn uplift_at(steps: &mut Vec<Step>, x: usize) {
    steps.splice(x..x, [NE, SE]);
}

/// Cut the path open at peak `peak_index` (left to right, from 0) and insert a peak one unit higher.
pub fn volcanic_uplift(p: &LatticePath, peak_index: usize) -> Result<LatticePath, PathError> {
    let x = peak_vertex(&p.steps, peak_index)?;
    let mut steps = p.steps.clone();
    uplift_at(&mut steps, x);
    Ok(LatticePath { start: p.start, steps })
}

/// One elementary right-move of the peak at vertex `x`. Returns the vertex of
/// the peak that actually moved. The path is treated as continuing with E steps.
fn move_right(steps: &mut Vec<Step>, x: usize) -> Result<usize, PathError> {
    debug_assert!(steps[x - 1] == NE && steps[x] == SE);
    match steps.get(x + 1).copied() {
        None => {
            steps.insert(x - 1, E);
            Ok(x + 1)
        }
        Some(E) => {
            steps[x - 1] = E;
            steps[x] = NE;
            steps[x + 1] = SE;
            Ok(x + 1)
        }
        Some(NE) => match steps.get(x + 2).copied() {
            Some(NE) => {
                steps[x] = NE;
                steps[x + 1] = SE;
                Ok(x + 1)
            }
            Some(SE) => move_right(steps, x + 2),
            _ => Err(PathError::Blocked(format!("peak at {} followed by NE then E or end", x))),
        },
        Some(SE) => {
            if x >= 2 && steps[x - 2] != SE {
                return Err(PathError::Blocked(format!("peak at {} is neither at the start nor after SE", x)));
            }
            steps[x - 1] = SE;
            steps[x] = NE;
            steps[x + 1] = SE;
            Ok(x + 1)
        }
    }
}

/// Mirror image of [`move_right`]. Trailing E steps are trimmed.
fn move_left(steps: &mut Vec<Step>, x: usize) -> Result<usize, PathError> {
    debug_assert!(steps[x - 1] == NE && steps[x] == SE);
    if x < 2 {
        return Err(PathError::Blocked(format!("peak at {} is at the start", x)));
    }
    match steps[x - 2] {
        E => {
            steps[x - 2] = NE;
            steps[x - 1] = SE;
            steps[x] = E;
            while steps.last() == Some(&E) {
                steps.pop();
            }
            Ok(x - 1)
        }
        SE => match if x >= 3 { Some(steps[x - 3]) } else { None } {
            None | Some(SE) => {
                steps[x - 2] = NE;
                steps[x - 1] = SE;
                steps[x] = SE;
                Ok(x - 1)
            }
            Some(NE) => move_left(steps, x - 2),
            Some(E) => unreachable!("E step followed by SE"),
        },
        NE => {
            if steps.get(x + 1) != Some(&NE) {
                return Err(PathError::Blocked(format!("peak at {} cannot descend a slope to the left", x)));
            }
            steps[x - 1] = SE;
            steps[x] = NE;
            Ok(x - 1)
        }
    }
}

/// Elementary right-move of a peak of relative height 1 (left to right index, from 0).
pub fn right_move(p: &LatticePath, peak_index: usize) -> Result<LatticePath, PathError> {
    let peaks = p.peaks();
    let pk = peaks.get(peak_index).ok_or(PathError::NoSuchPeak(peak_index))?;
    if pk.relative_height != 1 {
        return Err(PathError::NotMovable { index: peak_index, rel: pk.relative_height });
    }
    let mut steps = p.steps.clone();
    move_right(&mut steps, pk.weight as usize)?;
    Ok(LatticePath { start: p.start, steps })
}

/// Choices that select one path of the multisum: the `n_i`, the E-step partition,
/// the uplifted initial peaks and the stage move counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstructionData {
    pub params: GordonParams,
    /// `n_1, ..., n_{k-1}`.
    pub n: Vec<u32>,
    /// `b_1 >= b_2 >= ...`; the `i`-th initial peak from the right is shifted by `4 b_i`.
    pub east: Vec<u32>,
    /// Positions `r`, counted from the right starting at 1, of the uplifted initial peaks.
    pub uplift: Vec<u32>,
    /// `moves[j-1]` for stage `j = 1..k-2`: double-step counts, rightmost new peak first.
    pub moves: Vec<Vec<u32>>,
}

fn nonincreasing(v: &[u32]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

impl ConstructionData {
    /// All-zero choices for the given `n`.
    pub fn plain(params: GordonParams, n: Vec<u32>) -> Self {
        let k = params.k() as usize;
        let east = vec![0; n.get(k.saturating_sub(2)).copied().unwrap_or(0) as usize];
        let moves = (0..k.saturating_sub(2)).map(|j| vec![0; n[j] as usize]).collect();
        ConstructionData { params, n, east, uplift: Vec::new(), moves }
    }

    pub fn validate(&self) -> Result<(), PathError> {
        let k = self.params.k();
        let bad = |m: &str| Err(PathError::BadData(m.to_string()));
        if self.params.same_parity() {
            return bad("construction needs k and a of opposite parity");
        }
        if self.n.len() != k as usize - 1 {
            return bad("n must have k-1 entries");
        }
        let top = self.n[k as usize - 2];
        if self.east.len() != top as usize || !nonincreasing(&self.east) {
            return bad("east must be nonincreasing with n_{k-1} entries");
        }
        let mut up = self.uplift.clone();
        up.sort_unstable();
        up.dedup();
        if up.len() != self.uplift.len() || up.iter().any(|&r| r < 1 || r > top) {
            return bad("uplift positions must be distinct and within 1..=n_{k-1}");
        }
        if self.moves.len() != k as usize - 2 {
            return bad("moves must have k-2 stages");
        }
        for (j, m) in self.moves.iter().enumerate() {
            if m.len() != self.n[j] as usize || !nonincreasing(m) {
                return bad("each stage's moves must be nonincreasing with n_j entries");
            }
        }
        Ok(())
    }

    /// `N_j = n_j + ... + n_{k-1}` for `j = 1..k-1`.
    pub fn big_n(&self) -> Vec<u64> {
        let mut acc = 0u64;
        let mut out: Vec<u64> = self.n.iter().rev().map(|&x| {
            acc += x as u64;
            acc
        }).collect();
        out.reverse();
        out
    }

    /// Exponent of the multisum summand before the factor choices.
    pub fn base_index(&self) -> u64 {
        let a = self.params.a() as usize;
        let big = self.big_n();
        let quad: u64 = big.iter().map(|x| x * x).sum();
        let lin: u64 = (a..big.len() + 1).step_by(2).map(|j| 2 * big[j - 1]).sum();
        quad + lin
    }

    /// Total exponent contributed by this choice.
    pub fn weight(&self) -> u64 {
        let e: u64 = self.east.iter().map(|&b| 4 * b as u64).sum();
        let u: u64 = self.uplift.iter().map(|&r| 2 * r as u64 - 1).sum();
        let m: u64 = self.moves.iter().flatten().map(|&x| 2 * x as u64).sum();
        self.base_index() + e + u + m
    }
}

fn prepend_peaks(steps: &mut Vec<Step>, count: u32) {
    let new: Vec<Step> = (0..count).flat_map(|_| [NE, SE]).collect();
    steps.splice(0..0, new);
}

fn stage_has_se_pair(gp: GordonParams, j: u32) -> bool {
    j >= gp.a() && j % 2 == gp.a() % 2
}

/// Run the staged construction.
pub fn forward_construct(cd: &ConstructionData) -> Result<LatticePath, PathError> {
    cd.validate()?;
    let gp = cd.params;
    let k = gp.k();
    let mut start = 0u32;
    let mut steps: Vec<Step> = Vec::new();

    let top = cd.n[k as usize - 2];
    prepend_peaks(&mut steps, top);
    // the i-th peak from the right moves 4 b_i in total
    let peaks = peak_vertices(&steps);
    for i in 0..top as usize {
        let b_here = cd.east[i];
        let b_next = cd.east.get(i + 1).copied().unwrap_or(0);
        let x = peaks[top as usize - 1 - i] - 1;
        steps.splice(x..x, std::iter::repeat(E).take(4 * (b_here - b_next) as usize));
    }
    let mut ups = cd.uplift.clone();
    ups.sort_unstable();
    for &r in ups.iter().rev() {
        let x = peak_vertex(&steps, (top - r) as usize)?;
        uplift_at(&mut steps, x);
    }
    if stage_has_se_pair(gp, k - 1) {
        steps.splice(0..0, [SE, SE]);
        start += 2;
    }

    for j in (1..=k - 2).rev() {
        for x in peak_vertices(&steps).into_iter().rev() {
            uplift_at(&mut steps, x);
        }
        let nj = cd.n[j as usize - 1];
        prepend_peaks(&mut steps, nj);
        for (slot, &mu) in (0..nj as usize).rev().zip(&cd.moves[j as usize - 1]) {
            let mut x = peak_vertex(&steps, slot)?;
            for _ in 0..2 * mu {
                x = move_right(&mut steps, x)?;
            }
        }
        if stage_has_se_pair(gp, j) {
            steps.splice(0..0, [SE, SE]);
            start += 2;
        }
    }
    if start == 0 && steps.is_empty() {
        return Ok(LatticePath { start, steps });
    }
    if steps.is_empty() {
        return Err(PathError::Invalid("construction produced an empty path off the axis".into()));
    }
    LatticePath::new(start, steps)
}

fn strip_se_pair(start: &mut u32, steps: &mut Vec<Step>) -> Result<(), PathError> {
    if *start < 2 || steps.len() < 2 || steps[0] != SE || steps[1] != SE {
        return Err(PathError::NotInImage("expected two initial SE steps".into()));
    }
    steps.drain(0..2);
    *start -= 2;
    Ok(())
}

fn rel_one_vertices(start: u32, steps: &[Step]) -> Vec<usize> {
    let h = heights_of(start, steps).expect("valid intermediate path");
    let raw = raw_peaks(&h, steps);
    let rel = relative_heights(&h, &raw);
    raw.iter().zip(rel).filter(|(_, r)| *r == 1).map(|(&(x, _), _)| x).collect()
}

/// Recover the construction data of an admissible path.
pub fn reverse_deconstruct(p: &LatticePath, gp: GordonParams) -> Result<ConstructionData, PathError> {
    if gp.same_parity() || !is_s_admissible(p, gp) {
        return Err(PathError::NotAdmissible(gp));
    }
    let k = gp.k();
    let mut start = p.start;
    let mut steps = p.steps.clone();
    let mut n = vec![0u32; k as usize - 1];
    let mut moves = vec![Vec::new(); k as usize - 2];

    for j in 1..=k - 2 {
        if stage_has_se_pair(gp, j) {
            strip_se_pair(&mut start, &mut steps)?;
        }
        let nj = rel_one_vertices(start, &steps).len();
        let mut mus = Vec::with_capacity(nj);
        for i in 0..nj {
            let slot = 2 * i + 1;
            let mut x = rel_one_vertices(start, &steps)[i];
            let mut count = 0u32;
            loop {
                let peaks = peak_vertices(&steps);
                let mut t = x;
                while t != slot && t >= 2 && peaks.contains(&(t - 2)) {
                    t -= 2;
                }
                if t == slot {
                    break;
                }
                if t < slot {
                    return Err(PathError::NotInImage(format!("stage {} peak {} left of its slot", j, i + 1)));
                }
                x = move_left(&mut steps, t)?;
                count += 1;
            }
            if count % 2 != 0 {
                return Err(PathError::NotInImage(format!("stage {} peak {} moved an odd distance", j, i + 1)));
            }
            mus.push(count / 2);
        }
        mus.reverse();
        if !nonincreasing(&mus) {
            return Err(PathError::NotInImage(format!("stage {} moves are not ordered", j)));
        }
        moves[j as usize - 1] = mus;
        n[j as usize - 1] = nj as u32;
        let prefix: Vec<Step> = (0..nj).flat_map(|_| [NE, SE]).collect();
        if !steps.starts_with(&prefix) {
            return Err(PathError::NotInImage(format!("stage {} peaks are not at their slots", j)));
        }
        steps.drain(0..2 * nj);
        for x in peak_vertices(&steps).into_iter().rev() {
            if x < 2 || steps[x - 2] != NE || steps.get(x + 1) != Some(&SE) {
                return Err(PathError::NotInImage(format!("stage {}: peak at {} cannot be lowered", j, x)));
            }
            steps.drain(x - 1..x + 1);
        }
    }

    if stage_has_se_pair(gp, k - 1) {
        strip_se_pair(&mut start, &mut steps)?;
    }
    if start != 0 {
        return Err(PathError::NotInImage("initial stage does not start on the axis".into()));
    }
    // blocks E^c (NE SE | NE NE SE SE)
    let mut east_before = Vec::new();
    let mut lifted = Vec::new();
    let mut i = 0;
    let mut e = 0u32;
    while i < steps.len() {
        match steps[i..] {
            [E, ..] => {
                e += 1;
                i += 1;
            }
            [NE, SE, ..] => {
                east_before.push(e);
                lifted.push(false);
                i += 2;
            }
            [NE, NE, SE, SE, ..] => {
                east_before.push(e);
                lifted.push(true);
                i += 4;
            }
            _ => return Err(PathError::NotInImage("initial stage has an unexpected shape".into())),
        }
    }
    let top = east_before.len();
    n[k as usize - 2] = top as u32;
    let mut east = Vec::with_capacity(top);
    for &c in east_before.iter().rev() {
        if c % 4 != 0 {
            return Err(PathError::NotInImage("initial E steps not in multiples of 4".into()));
        }
        east.push(c / 4);
    }
    let uplift: Vec<u32> = (0..top).filter(|&i| lifted[i]).map(|i| (top - i) as u32).rev().collect();
    let cd = ConstructionData { params: gp, n, east, uplift, moves };
    cd.validate()?;
    let back = forward_construct(&cd)?;
    if back != *p {
        return Err(PathError::NotInImage(format!("reconstruction gives {}", back)));
    }
    Ok(cd)
}

fn partitions_bounded(parts: usize, max_total: u64, scale: u64) -> Vec<Vec<u32>> {
    // nonincreasing sequences of `parts` entries with scale * sum <= max_total
    fn rec(left: usize, cap: u32, budget: u64, scale: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        let hi = cap.min((budget / scale) as u32);
        for v in 0..=hi {
            cur.push(v);
            rec(left - 1, v, budget - scale * v as u64, scale, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    // entries are nonincreasing, so recurse from the largest
    fn rec_top(parts: usize, max_total: u64, scale: u64, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            out.push(Vec::new());
            return;
        }
        let hi = (max_total / scale) as u32;
        for v in 0..=hi {
            let mut cur = vec![v];
            rec(parts - 1, v, max_total - scale * v as u64, scale, &mut cur, out);
        }
    }
    rec_top(parts, max_total, scale, &mut out);
    out
}

/// Every construction datum whose weight is at most `max_weight`.
pub fn all_construction_data(gp: GordonParams, max_weight: u64) -> Vec<ConstructionData> {
    let k = gp.k() as usize;
    let mut out = Vec::new();
    let mut ns: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..k - 1 {
        let mut next = Vec::new();
        for v in &ns {
            for x in 0..=max_weight as u32 {
                let mut w = v.clone();
                w.push(x);
                let probe = ConstructionData::plain_unchecked(gp, &w);
                if probe > max_weight {
                    break;
                }
                next.push(w);
            }
        }
        ns = next;
    }
    for n in ns {
        let base = ConstructionData::plain(gp, n.clone());
        let b0 = base.weight();
        if b0 > max_weight {
            continue;
        }
        let top = n[k - 2] as usize;
        let mut partial: Vec<(ConstructionData, u64)> = vec![(base, b0)];
        let mut next = Vec::new();
        for (cd, w) in partial.drain(..) {
            for east in partitions_bounded(top, max_weight - w, 4) {
                let e: u64 = east.iter().map(|&b| 4 * b as u64).sum();
                let mut c = cd.clone();
                c.east = east;
                next.push((c, w + e));
            }
        }
        partial = next;
        let mut next = Vec::new();
        for (cd, w) in partial.drain(..) {
            for mask in 0u64..(1u64 << top) {
                let up: Vec<u32> = (1..=top as u32).filter(|r| mask >> (r - 1) & 1 == 1).collect();
                let extra: u64 = up.iter().map(|&r| 2 * r as u64 - 1).sum();
                if w + extra <= max_weight {
                    let mut c = cd.clone();
                    c.uplift = up;
                    next.push((c, w + extra));
                }
            }
        }
        partial = next;
        for j in 0..k.saturating_sub(2) {
            let mut next = Vec::new();
            for (cd, w) in partial.drain(..) {
                for m in partitions_bounded(n[j] as usize, max_weight - w, 2) {
                    let extra: u64 = m.iter().map(|&x| 2 * x as u64).sum();
                    let mut c = cd.clone();
                    c.moves[j] = m;
                    next.push((c, w + extra));
                }
            }
            partial = next;
        }
        out.extend(partial.into_iter().map(|(c, _)| c));
    }
    out
}

impl ConstructionData {
    /// Lower bound on the weight of any datum whose `n` starts with `prefix`.
    fn plain_unchecked(gp: GordonParams, prefix: &[u32]) -> u64 {
        let k = gp.k() as usize;
        let mut n = prefix.to_vec();
        n.resize(k - 1, 0);
        ConstructionData { params: gp, n, east: Vec::new(), uplift: Vec::new(), moves: Vec::new() }.base_index()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gp(k: u32, a: u32) -> GordonParams {
        GordonParams::new(k, a).unwrap()
    }

    fn path_from_heights(heights: &[i32]) -> LatticePath {
        let steps = heights
            .windows(2)
            .map(|w| match w[1] - w[0] {
                1 => NE,
                -1 => SE,
                0 => E,
                _ => panic!("bad height profile"),
            })
            .collect();
        LatticePath::new(heights[0] as u32, steps).unwrap()
    }

    fn example_final() -> LatticePath {
        path_from_heights(&[
            4, 5, 4, 3, 2, 3, 2, 3, 4, 3, 2, 3, 2, 1, 0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 4, 5, 4, 3, 2, 1, 0, 0, 0, 0, 0, 1, 2,
            3, 4, 3, 2, 1, 0,
        ])
    }

    #[test]
    fn validation() {
        assert!(LatticePath::new(0, vec![]).is_ok());
        assert!(LatticePath::new(1, vec![]).is_err());
        assert!(LatticePath::new(0, vec![NE, SE, E]).is_err());
        assert!(LatticePath::new(1, vec![E, SE]).is_err());
        assert!(LatticePath::new(0, vec![SE]).is_err());
        assert!(LatticePath::new(0, vec![NE, SE, E, NE, SE]).is_ok());
    }

    #[test]
    fn lone_peak() {
        let p = LatticePath::new(0, vec![NE, SE]).unwrap();
        assert_eq!(p.peaks(), vec![Peak { weight: 1, height: 1, relative_height: 1 }]);
        assert_eq!(p.major_index(), 1);
        assert_eq!(LatticePath::new(0, vec![]).unwrap().major_index(), 0);
    }

    #[test]
    fn example_peaks() {
        let p = example_final();
        let w: Vec<u32> = p.peaks().iter().map(|pk| pk.weight).collect();
        let r: Vec<u32> = p.peaks().iter().map(|pk| pk.relative_height).collect();
        assert_eq!(w, vec![1, 5, 8, 11, 17, 25, 38]);
        assert_eq!(r, vec![1, 1, 2, 1, 3, 5, 4]);
        assert_eq!(p.major_index(), 105);
        assert!(is_s_admissible(&p, gp(5, 2)));
        assert!(!is_s_admissible(&p, gp(5, 4)));
    }

    #[test]
    fn parity_violation_rejected() {
        // from (0,2): SE NE SE SE has a peak at x=2 with relative height 1
        let p = LatticePath::new(2, vec![SE, NE, SE, SE]).unwrap();
        assert!(!is_s_admissible(&p, gp(2, 1)));
    }

    #[test]
    fn uplift_examples() {
        let p = LatticePath::new(0, vec![NE, SE]).unwrap();
        let u = volcanic_uplift(&p, 0).unwrap();
        assert_eq!(u.steps(), &[NE, NE, SE, SE]);
        assert_eq!(u.major_index(), 2);
        let p = LatticePath::new(0, vec![NE, SE, NE, SE, NE, SE]).unwrap();
        for idx in 0..3 {
            let r = 3 - idx as u64;
            assert_eq!(volcanic_uplift(&p, idx).unwrap().major_index(), p.major_index() + 2 * r - 1);
        }
        assert!(volcanic_uplift(&p, 3).is_err());
    }

    #[test]
    fn right_move_case_one() {
        let p = LatticePath::new(0, vec![NE, SE, E, NE, SE]).unwrap();
        let m = right_move(&p, 0).unwrap();
        assert_eq!(m.steps(), &[E, NE, SE, NE, SE]);
        let p = LatticePath::new(0, vec![NE, SE]).unwrap();
        assert_eq!(right_move(&p, 0).unwrap().steps(), &[E, NE, SE]);
    }

    #[test]
    fn right_move_cases_two_and_three() {
        let p = path_from_heights(&[0, 1, 0, 1, 2, 1, 0]);
        let m = right_move(&p, 0).unwrap();
        assert_eq!(m.heights(), vec![0, 1, 2, 1, 2, 1, 0]);
        let p = path_from_heights(&[1, 2, 1, 0]);
        let m = right_move(&p, 0).unwrap();
        assert_eq!(m.heights(), vec![1, 0, 1, 0]);
    }

    #[test]
    fn right_move_transfer() {
        let p = path_from_heights(&[0, 1, 0, 1, 2, 1, 2, 1, 0]);
        let m = right_move(&p, 0).unwrap();
        assert_eq!(m.heights(), vec![0, 1, 2, 1, 2, 1, 2, 1, 0]);
        let m2 = right_move(&m, 1).unwrap();
        assert_eq!(m2.heights(), vec![0, 1, 2, 1, 2, 1, 0, 1, 0]);
        assert_eq!(m2.major_index(), m.major_index() + 1);
    }

    #[test]
    fn right_move_requires_relative_height_one() {
        let p = path_from_heights(&[0, 1, 2, 1, 0]);
        assert!(matches!(right_move(&p, 0), Err(PathError::NotMovable { .. })));
    }

    fn example_data() -> ConstructionData {
        ConstructionData {
            params: gp(5, 2),
            n: vec![3, 1, 1, 2],
            east: vec![1, 0],
            uplift: vec![2],
            moves: vec![vec![2, 1, 0], vec![0], vec![1]],
        }
    }

    #[test]
    fn example_replay() {
        let cd = example_data();
        assert_eq!(cd.base_index(), 90);
        assert_eq!(cd.weight(), 105);
        let p = forward_construct(&cd).unwrap();
        assert_eq!(p, example_final());
        assert_eq!(reverse_deconstruct(&p, gp(5, 2)).unwrap(), cd);
    }

    #[test]
    fn all_zero_is_descent() {
        for (k, a) in [(2, 1), (3, 2), (4, 1), (5, 2)] {
            let g = gp(k, a);
            let cd = ConstructionData::plain(g, vec![0; k as usize - 1]);
            let p = forward_construct(&cd).unwrap();
            assert_eq!(p, LatticePath::descent(k + 1 - a));
            assert_eq!(p.major_index(), 0);
            assert_eq!(reverse_deconstruct(&p, g).unwrap(), cd);
        }
    }

    #[test]
    fn compact_and_json_round_trip() {
        let p = example_final();
        let s = p.to_compact();
        assert!(s.starts_with("h=4:NS"));
        assert_eq!(s.parse::<LatticePath>().unwrap(), p);
        let j = serde_json::to_string(&p).unwrap();
        assert!(j.contains("\"major_index\":105"));
        assert_eq!(serde_json::from_str::<LatticePath>(&j).unwrap(), p);
        assert!(p.to_svg().starts_with("<svg"));
    }

    #[test]
    fn enumeration_bound_is_sufficient() {
        // every path with small major index found by an unpruned length-bounded search
        let (start, kmax, nmax) = (2u32, 2u32, 8u64);
        let mut pruned = Vec::new();
        for_each_path(start, kmax, nmax, |s, _| pruned.push(s.to_vec()));
        let mut brute = Vec::new();
        let max_len = nmax as usize + 2 * kmax as usize + 2;
        let mut stack = vec![Vec::<Step>::new()];
        while let Some(s) = stack.pop() {
            if let Ok(p) = LatticePath::new(start, s.clone()) {
                if p.max_height() <= kmax && p.major_index() <= nmax && !s.is_empty() {
                    brute.push(s.clone());
                }
            }
            if s.len() < max_len {
                for st in [NE, SE, E] {
                    let mut t = s.clone();
                    t.push(st);
                    if heights_of(start, &t).is_some_and(|h| h.iter().all(|&y| y <= kmax)) {
                        stack.push(t);
                    }
                }
            }
        }
        pruned.sort_by_key(|s| format!("{:?}", s));
        brute.sort_by_key(|s| format!("{:?}", s));
        assert_eq!(pruned, brute);
    }
}
