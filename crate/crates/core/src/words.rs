//! Binary words, the two-tape Interleave machine, extraction, step words,
//! Laws 1 and 2, structural predicates and gap sequences.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::Serialize;

use crate::arches::Arch;
use crate::error::{Error, Result};
use crate::sequences::ParityTracks;

const BLOCK: usize = 64;

/// A packed binary word with per-block prefix counts of ones, so that
/// `ones_before` and `height` are O(1).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitWord {
    blocks: Vec<u64>,
    len: usize,
    /// Ones in `blocks[..i]`, with one trailing entry for the whole word.
    ones_before_block: Vec<usize>,
}

impl BitWord {
    pub fn new() -> Self {
        Self::from_blocks(Vec::new(), 0)
    }

    fn from_blocks(blocks: Vec<u64>, len: usize) -> Self {
        let mut ones_before_block = Vec::with_capacity(blocks.len() + 1);
        let mut acc = 0usize;
        ones_before_block.push(0);
        for b in &blocks {
            acc += b.count_ones() as usize;
            ones_before_block.push(acc);
        }
        Self {
            blocks,
            len,
            ones_before_block,
        }
    }

    /// Builds a word from digits, each of which must be 0 or 1.
    pub fn from_digits(digits: &[u8]) -> Result<Self> {
        digits
            .iter()
            .map(|&d| match d {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::MalformedWord(format!("digit {d} is not binary"))),
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ones(&self) -> usize {
        *self.ones_before_block.last().unwrap_or(&0)
    }

    pub fn zeros(&self) -> usize {
        self.len - self.ones()
    }

    /// Bit `i` as a boolean (`true` for 1). Panics if out of range.
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.blocks[i / BLOCK] >> (i % BLOCK)) & 1 == 1
    }

    /// Bit `i` as 0 or 1.
    pub fn bit(&self, i: usize) -> u8 {
        u8::from(self.get(i))
    }

    /// Number of ones in `self[0..t)`.
    pub fn ones_before(&self, t: usize) -> usize {
        assert!(
            t <= self.len,
            "prefix length {t} exceeds word length {}",
            self.len
        );
        let (q, r) = (t / BLOCK, t % BLOCK);
        let mut n = self.ones_before_block[q];
        if r > 0 {
            n += (self.blocks[q] & ((1u64 << r) - 1)).count_ones() as usize;
        }
        n
    }

    pub fn zeros_before(&self, t: usize) -> usize {
        t - self.ones_before(t)
    }

    /// Prefix height h(t) = #zeros - #ones in `self[0..t)`.
    pub fn height(&self, t: usize) -> i64 {
        t as i64 - 2 * self.ones_before(t) as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn slice(&self, range: Range<usize>) -> BitWord {
        range.map(|i| self.get(i)).collect()
    }

    /// Concatenation of the given words in order.
    pub fn concat(parts: &[&BitWord]) -> BitWord {
        parts.iter().flat_map(|w| w.iter()).collect()
    }

    /// Maximal runs as (bit, length) in left-to-right order.
    pub fn runs(&self) -> Vec<(bool, usize)> {
        let mut runs: Vec<(bool, usize)> = Vec::new();
        for b in self.iter() {
            match runs.last_mut() {
                Some((bit, n)) if *bit == b => *n += 1,
                _ => runs.push((b, 1)),
            }
        }
        runs
    }

    pub fn to_digits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }
}

impl FromIterator<bool> for BitWord {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut blocks = Vec::new();
        let mut len = 0usize;
        for b in iter {
            if len.is_multiple_of(BLOCK) {
                blocks.push(0u64);
            }
            if b {
                *blocks.last_mut().expect("block pushed above") |= 1u64 << (len % BLOCK);
            }
            len += 1;
        }
        Self::from_blocks(blocks, len)
    }
}

impl FromStr for BitWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::MalformedWord(format!(
                    "character {c:?} is not binary"
                ))),
            })
            .collect()
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

/// Heights h(0..=|w|).
pub fn height_profile(w: &BitWord) -> Vec<i64> {
    let mut h = Vec::with_capacity(w.len() + 1);
    let mut cur = 0i64;
    h.push(cur);
    for b in w.iter() {
        cur += if b { -1 } else { 1 };
        h.push(cur);
    }
    h
}

/// One step of an Interleave run after `t` outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub t: usize,
    /// Bits consumed from tape X.
    pub i: usize,
    /// Bits consumed from tape Y.
    pub j: usize,
    /// Machine state (0 reads X, 1 reads Y).
    pub c: u8,
}

/// Head positions and states of an Interleave run.
///
/// For Law 1 the X tape is `P[2:]`, read by the fast head, and the Y tape is
/// `P[:-1]`, read by the slow head. For Law 2 the tapes are S0 and S1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineTrace {
    initial_state: bool,
    /// Bit t is set when output t was read from Y.
    reads_y: BitWord,
    output: BitWord,
}

impl MachineTrace {
    /// Number of outputs; valid step indices are `0..=len`.
    pub fn len(&self) -> usize {
        self.output.len()
    }

    pub fn is_empty(&self) -> bool {
        self.output.is_empty()
    }

    /// i_t: bits consumed from X after t outputs.
    pub fn x_consumed(&self, t: usize) -> usize {
        self.reads_y.zeros_before(t)
    }

    /// j_t: bits consumed from Y after t outputs.
    pub fn y_consumed(&self, t: usize) -> usize {
        self.reads_y.ones_before(t)
    }

    /// Law 1 fast head a_t (tape `P[2:]`).
    pub fn fast_head(&self, t: usize) -> usize {
        self.x_consumed(t)
    }

    /// Law 1 slow head b_t (tape `P[:-1]`).
    pub fn slow_head(&self, t: usize) -> usize {
        self.y_consumed(t)
    }

    /// c_t: the state after t outputs.
    pub fn state(&self, t: usize) -> u8 {
        if t == 0 {
            u8::from(self.initial_state)
        } else {
            self.output.bit(t - 1)
        }
    }

    pub fn step(&self, t: usize) -> TraceStep {
        TraceStep {
            t,
            i: self.x_consumed(t),
            j: self.y_consumed(t),
            c: self.state(t),
        }
    }

    pub fn steps(&self) -> impl Iterator<Item = TraceStep> + '_ {
        (0..=self.len()).map(move |t| self.step(t))
    }
}

/// Runs the Interleave machine: in state 0 read X, in state 1 read Y, the
/// new state being the emitted bit; an exhausted tape defers to the other.
pub fn interleave(x: &BitWord, y: &BitWord, state: bool) -> (BitWord, MachineTrace) {
    let total = x.len() + y.len();
    let mut out = Vec::with_capacity(total);
    let mut from_y = Vec::with_capacity(total);
    let (mut i, mut j) = (0usize, 0usize);
    let mut s = state;
    while i < x.len() || j < y.len() {
        let read_y = if s { j < y.len() } else { i >= x.len() };
        let bit = if read_y {
            j += 1;
            y.get(j - 1)
        } else {
            i += 1;
            x.get(i - 1)
        };
        out.push(bit);
        from_y.push(read_y);
        s = bit;
    }
    let output: BitWord = out.into_iter().collect();
    let trace = MachineTrace {
        initial_state: state,
        reads_y: from_y.into_iter().collect(),
        output: output.clone(),
    };
    (output, trace)
}

/// Splits a word into E0 (first bit and every bit preceded by 0) and E1
/// (every bit preceded by 1), so that `interleave(E0, E1, 0)` restores it.
pub fn extract(w: &BitWord) -> Result<(BitWord, BitWord)> {
    if w.is_empty() || w.get(0) || !w.get(w.len() - 1) {
        return Err(Error::BadBoundary);
    }
    let mut e0 = vec![w.get(0)];
    let mut e1 = Vec::new();
    for k in 1..w.len() {
        if w.get(k - 1) {
            e1.push(w.get(k));
        } else {
            e0.push(w.get(k));
        }
    }
    Ok((e0.into_iter().collect(), e1.into_iter().collect()))
}

fn increments(
    track: &crate::sequences::SequenceTrack,
    range: Range<usize>,
    label: &str,
) -> Result<BitWord> {
    range
        .map(|m| match track.at(m + 1) - track.at(m) {
            0 => Ok(false),
            1 => Ok(true),
            d => Err(Error::MalformedWord(format!(
                "{label} increment {d} at m={m}"
            ))),
        })
        .collect()
}

/// P_r = ΔA on [u_r, v_r) and N_r = ΔB on [v_r, u_{r+1}).
pub fn step_words(tracks: &ParityTracks, arches: &[Arch], r: usize) -> Result<(BitWord, BitWord)> {
    let arch = arches
        .get(r)
        .ok_or_else(|| Error::InvalidInput(format!("arch level {r} not detected")))?;
    let end = arch.u_next as usize;
    if end > tracks.m_max() {
        return Err(Error::InsufficientRange {
            needed: end,
            available: tracks.m_max(),
        });
    }
    let (u, v) = (arch.u as usize, arch.v as usize);
    let p = increments(&tracks.a, u..v, "A")?;
    let n = increments(&tracks.b, v..end, "B")?;
    Ok((p, n))
}

/// Output word of Law 1 or Law 2 together with its optional machine trace.
#[derive(Debug, Clone)]
pub struct LawRun {
    pub word: BitWord,
    pub trace: Option<MachineTrace>,
}

impl LawRun {
    pub fn drop_trace(&mut self) {
        self.trace = None;
    }

    /// The retained trace, or `TraceMissing(level)`.
    pub fn trace_for(&self, level: usize) -> Result<&MachineTrace> {
        self.trace.as_ref().ok_or(Error::TraceMissing(level))
    }
}

/// Law 1: N = Inter(P[2:], P[:-1], 1).
pub fn law1(p: &BitWord) -> Result<LawRun> {
    if p.len() < 3 {
        return Err(Error::MalformedWord(format!(
            "law 1 needs at least 3 bits, got {}",
            p.len()
        )));
    }
    let (word, trace) = interleave(&p.slice(2..p.len()), &p.slice(0..p.len() - 1), true);
    Ok(LawRun {
        word,
        trace: Some(trace),
    })
}

/// The Law 2 tapes S0 = [0,0]∘N∘[1] and S1 = [0]∘N.
pub fn law2_tapes(n: &BitWord) -> (BitWord, BitWord) {
    let s0 = [false, false]
        .into_iter()
        .chain(n.iter())
        .chain(std::iter::once(true))
        .collect();
    let s1 = std::iter::once(false).chain(n.iter()).collect();
    (s0, s1)
}

/// Law 2: P = Inter(S0, S1, 0).
pub fn law2(n: &BitWord) -> LawRun {
    let (s0, s1) = law2_tapes(n);
    let (word, trace) = interleave(&s0, &s1, false);
    LawRun {
        word,
        trace: Some(trace),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordDiagnostics {
    pub balanced: bool,
    pub anti_palindromic: bool,
    pub initial_zero_run: usize,
    pub final_one_run: usize,
    /// h(|w| - t) = h(t) for all t; evaluated only for balanced
    /// anti-palindromic words.
    pub height_palindromic: Option<bool>,
    /// Minimum of h(t) over 1 <= t <= |w| - 1, if that range is non-empty.
    pub interior_min_height: Option<i64>,
}

pub fn word_diagnostics(w: &BitWord) -> WordDiagnostics {
    let n = w.len();
    let balanced = w.zeros() == w.ones();
    let anti_palindromic = (0..n / 2).all(|k| w.get(k) != w.get(n - 1 - k)) && n.is_multiple_of(2);
    let initial_zero_run = w.iter().take_while(|&b| !b).count();
    let final_one_run = (0..n).rev().take_while(|&k| w.get(k)).count();
    let h = height_profile(w);
    let height_palindromic =
        (balanced && anti_palindromic).then(|| (0..=n).all(|t| h[n - t] == h[t]));
    let interior_min_height = (n >= 2).then(|| h[1..n].iter().copied().min().unwrap_or(0));
    WordDiagnostics {
        balanced,
        anti_palindromic,
        initial_zero_run,
        final_one_run,
        height_palindromic,
        interior_min_height,
    }
}

/// The 1-gap sequence of a balanced word ending in 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapProfile {
    /// g_0 = o_0 and g_i = o_i - o_{i-1}, where o_i is the position of the i-th one.
    pub gaps: Vec<i64>,
    /// S(j) = sum over i <= j of (g_i - 2).
    pub excess: Vec<i64>,
    /// First argmax of S.
    pub j_star: usize,
    /// 2 + max S.
    pub v_plus_topo: i64,
    /// Whether S(j) = h(o_j) - 2 at every j.
    pub topological_identity: bool,
    /// Gaps between consecutive zeros, with the same convention as `gaps`.
    pub zero_gaps: Vec<i64>,
}

impl GapProfile {
    /// g_j = g_{a-2-j} for 0 <= j <= a-2.
    ///
    /// This fails on P_1 already (g_0 = 3, g_9 = 1); see `is_dual_mirror`.
    pub fn is_mirror(&self) -> bool {
        let a = self.gaps.len();
        a < 2 || (0..=a - 2).all(|j| self.gaps[j] == self.gaps[a - 2 - j])
    }

    /// g_i equals the zero gap at a - i for 1 <= i <= a-1, which is what
    /// anti-palindromicity gives: o_{a-1-j} + z_j = 2a - 1.
    pub fn is_dual_mirror(&self) -> bool {
        let a = self.gaps.len();
        self.zero_gaps.len() == a && (1..a).all(|i| self.gaps[i] == self.zero_gaps[a - i])
    }

    pub fn gap_sum(&self) -> i64 {
        self.gaps.iter().sum()
    }
}

pub fn gap_profile(p: &BitWord) -> Result<GapProfile> {
    if p.is_empty() || p.zeros() != p.ones() || !p.get(p.len() - 1) {
        return Err(Error::MalformedWord(
            "gap profile needs a non-empty balanced word ending in 1".into(),
        ));
    }
    let positions: Vec<usize> = (0..p.len()).filter(|&k| p.get(k)).collect();
    let zeros: Vec<usize> = (0..p.len()).filter(|&k| !p.get(k)).collect();
    let zero_gaps = zeros
        .iter()
        .enumerate()
        .map(|(j, &z)| (z - if j == 0 { 0 } else { zeros[j - 1] }) as i64)
        .collect();
    let mut gaps = Vec::with_capacity(positions.len());
    let mut excess = Vec::with_capacity(positions.len());
    let mut prev = 0usize;
    let mut s = 0i64;
    let mut topological_identity = true;
    for (j, &o) in positions.iter().enumerate() {
        let g = (o - if j == 0 { 0 } else { prev }) as i64;
        prev = o;
        s += g - 2;
        gaps.push(g);
        excess.push(s);
        topological_identity &= s == p.height(o) - 2;
    }
    let max = *excess.iter().max().expect("word has at least one 1");
    let j_star = excess
        .iter()
        .position(|&x| x == max)
        .expect("max is attained");
    Ok(GapProfile {
        gaps,
        excess,
        j_star,
        v_plus_topo: 2 + max,
        topological_identity,
        zero_gaps,
    })
}
