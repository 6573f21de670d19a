//! Direct generation of Q~, Q and the perturbed Conway-Mallows sequence, and
//! the parity split of Q~ into the tracks A, B, sigma, delta.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrackName {
    Qtilde,
    Q,
    A,
    B,
    Sigma,
    Delta,
    ConwayPerturbed,
}

impl TrackName {
    pub fn label(self) -> &'static str {
        match self {
            TrackName::Qtilde => "Q~",
            TrackName::Q => "Q",
            TrackName::A => "A",
            TrackName::B => "B",
            TrackName::Sigma => "sigma",
            TrackName::Delta => "delta",
            TrackName::ConwayPerturbed => "b",
        }
    }
}

/// A 1-indexed integer sequence: `at(n)` is term n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTrack {
    name: TrackName,
    values: Vec<i64>,
}

impl SequenceTrack {
    pub fn new(name: TrackName, values: Vec<i64>) -> Self {
        Self { name, values }
    }

    pub fn name(&self) -> TrackName {
        self.name
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Term n, or `None` outside `1..=len`.
    pub fn get(&self, n: usize) -> Option<i64> {
        n.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// Term n. Panics outside `1..=len`.
    pub fn at(&self, n: usize) -> i64 {
        self.values[n - 1]
    }

    /// Raw values; slot `i` holds term `i + 1`.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn last(&self) -> Option<i64> {
        self.values.last().copied()
    }

    /// First index at which each value is attained, for a track that starts
    /// at 1 and moves in steps of 0 or 1. Slot `v - 1` holds the entry time of v.
    pub fn entry_times(&self) -> Result<Vec<usize>> {
        let mut entries = Vec::new();
        let mut prev = 0i64;
        for (i, &x) in self.values.iter().enumerate() {
            match x - prev {
                0 => {}
                1 => entries.push(i + 1),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "{} jumps from {prev} to {x} at index {}",
                        self.name.label(),
                        i + 1
                    )))
                }
            }
            prev = x;
        }
        Ok(entries)
    }
}

fn lookup(sequence: &'static str, n: usize, index: i64) -> Result<usize> {
    if index >= 1 && (index as usize) < n {
        Ok(index as usize)
    } else {
        Err(Error::IllDefined { sequence, n, index })
    }
}

fn sign(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(Error::InvalidInput(format!(
            "n_max must be at least 2, got {n_max}"
        )));
    }
    Ok(())
}

/// Runs the Hofstadter recursion (optionally with the `(-1)^n` term) until
/// `n_max` or the first ill-defined lookup, returning the computed prefix.
fn hofstadter(sequence: &'static str, n_max: usize, perturbed: bool) -> (Vec<i64>, Option<Error>) {
    let mut q: Vec<i64> = Vec::with_capacity(n_max);
    q.extend_from_slice(&[1, 1]);
    for n in 3..=n_max {
        let step = (|| {
            let i1 = lookup(sequence, n, n as i64 - q[n - 2])?;
            let i2 = lookup(sequence, n, n as i64 - q[n - 3])?;
            let mut value = q[i1 - 1] + q[i2 - 1];
            if perturbed {
                value += sign(n);
            }
            Ok(value)
        })();
        match step {
            Ok(value) => q.push(value),
            Err(e) => return (q, Some(e)),
        }
    }
    (q, None)
}

/// Q~(1..=n_max) with Q~(1) = Q~(2) = 1.
pub fn generate_qtilde(n_max: usize) -> Result<SequenceTrack> {
    check_n_max(n_max)?;
    match hofstadter("Q~", n_max, true) {
        (values, None) => Ok(SequenceTrack::new(TrackName::Qtilde, values)),
        (_, Some(e)) => Err(e),
    }
}

/// Outcome of running the unperturbed Q recursion, which may die.
#[derive(Debug, Clone)]
pub struct QRun {
    /// Terms computed before the recursion died (or all of them).
    pub track: SequenceTrack,
    /// The first n whose lookup index left `[1, n-1]`, if any.
    pub death: Option<usize>,
}

pub fn run_q(n_max: usize) -> Result<QRun> {
    check_n_max(n_max)?;
    let (values, err) = hofstadter("Q", n_max, false);
    let death = match err {
        Some(Error::IllDefined { n, .. }) => Some(n),
        Some(e) => return Err(e),
        None => None,
    };
    Ok(QRun {
        track: SequenceTrack::new(TrackName::Q, values),
        death,
    })
}

/// Q(1..=n_max), failing with `IllDefined` if the recursion dies.
pub fn generate_q(n_max: usize) -> Result<SequenceTrack> {
    check_n_max(n_max)?;
    match hofstadter("Q", n_max, false) {
        (values, None) => Ok(SequenceTrack::new(TrackName::Q, values)),
        (_, Some(e)) => Err(e),
    }
}

/// b(n) = b(b(n-1)) + b(n - b(n-1)) + (-1)^n with b(1) = b(2) = 1.
pub fn generate_conway_perturbed(n_max: usize) -> Result<SequenceTrack> {
    const NAME: &str = "b";
    check_n_max(n_max)?;
    let mut b: Vec<i64> = Vec::with_capacity(n_max);
    b.extend_from_slice(&[1, 1]);
    for n in 3..=n_max {
        let prev = b[n - 2];
        let i1 = lookup(NAME, n, prev)?;
        let i2 = lookup(NAME, n, n as i64 - prev)?;
        b.push(b[i1 - 1] + b[i2 - 1] + sign(n));
    }
    Ok(SequenceTrack::new(TrackName::ConwayPerturbed, b))
}

/// The parity tracks of Q~ over `1..=m_max`.
#[derive(Debug, Clone)]
pub struct ParityTracks {
    pub a: SequenceTrack,
    pub b: SequenceTrack,
    pub sigma: SequenceTrack,
    pub delta: SequenceTrack,
}

/// Splits an even-length Q~ track: A(m) = (Q~(2m-1)+1)/2, B(m) = (Q~(2m)+1)/2,
/// sigma = A + B - m, delta = B - A.
pub fn parity_split(qt: &SequenceTrack) -> Result<ParityTracks> {
    let len = qt.len();
    if len < 4 || !len.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "parity split needs an even track of length at least 4, got {len}"
        )));
    }
    if let Some(i) = qt.values().iter().position(|x| x % 2 == 0) {
        return Err(Error::NotOdd(i + 1));
    }
    let m_max = len / 2;
    let mut a = Vec::with_capacity(m_max);
    let mut b = Vec::with_capacity(m_max);
    let mut sigma = Vec::with_capacity(m_max);
    let mut delta = Vec::with_capacity(m_max);
    for (m, pair) in (1..).zip(qt.values().chunks_exact(2)) {
        let am = (pair[0] + 1) / 2;
        let bm = (pair[1] + 1) / 2;
        a.push(am);
        b.push(bm);
        sigma.push(am + bm - m);
        delta.push(bm - am);
    }
    Ok(ParityTracks {
        a: SequenceTrack::new(TrackName::A, a),
        b: SequenceTrack::new(TrackName::B, b),
        sigma: SequenceTrack::new(TrackName::Sigma, sigma),
        delta: SequenceTrack::new(TrackName::Delta, delta),
    })
}

impl ParityTracks {
    pub fn m_max(&self) -> usize {
        self.a.len()
    }

    /// ΔA(m) = A(m+1) - A(m).
    pub fn delta_a(&self, m: usize) -> i64 {
        self.a.at(m + 1) - self.a.at(m)
    }

    /// ΔB(m) = B(m+1) - B(m).
    pub fn delta_b(&self, m: usize) -> i64 {
        self.b.at(m + 1) - self.b.at(m)
    }

    /// Reassembles Q~ from sigma and delta.
    pub fn reconstruct(&self) -> SequenceTrack {
        let mut q = Vec::with_capacity(2 * self.m_max());
        for m in 1..=self.m_max() {
            let base = m as i64 - 1 + self.sigma.at(m);
            let d = self.delta.at(m);
            q.push(base - d);
            q.push(base + d);
        }
        SequenceTrack::new(TrackName::Qtilde, q)
    }

    /// First m at which ΔA(m) or ΔB(m) leaves {0, 1}.
    pub fn lipschitz_violation(&self) -> Option<usize> {
        (1..self.m_max())
            .find(|&m| !matches!(self.delta_a(m), 0 | 1) || !matches!(self.delta_b(m), 0 | 1))
    }

    /// Indices m in `(lo, hi]` where ΔA(m-1) = 1 but ΔA(m - A(m-1)) != 0.
    pub fn stall_rule_violations(&self, lo: usize, hi: usize) -> Vec<usize> {
        (lo + 1..=hi)
            .filter(|&m| {
                if self.delta_a(m - 1) != 1 {
                    return false;
                }
                let back = m as i64 - self.a.at(m - 1);
                back < 1 || self.delta_a(back as usize) != 0
            })
            .collect()
    }
}
