//! Comparison of Q with Q~ and the scaled fluctuation of Q~ per arch period.

use std::f64::consts::PI;

use serde::Serialize;

use crate::arches::Arch;
use crate::sequences::{QRun, SequenceTrack};

/// Coefficient of the envelope 0.70 n / sqrt(ln n) drawn around Q - Q~.
pub const ENVELOPE_COEFF: f64 = 0.70;

/// The limit constant 1 / (3 sqrt(2 pi)) of the scaled fluctuation.
pub fn reference_constant() -> f64 {
    1.0 / (3.0 * (2.0 * PI).sqrt())
}

/// |Q~(n)/n - 1/2| * sqrt(log2 n).
pub fn scaled_fluctuation(value: i64, n: usize) -> f64 {
    let n = n as f64;
    (value as f64 / n - 0.5).abs() * n.log2().sqrt()
}

/// 0.70 n / sqrt(ln n).
pub fn envelope(n: usize) -> f64 {
    let n = n as f64;
    ENVELOPE_COEFF * n / n.ln().sqrt()
}

/// Statistics over the arch period n in [2u_r - 1, 2u_{r+1} - 2].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchComparison {
    pub r: usize,
    pub n_lo: usize,
    pub n_hi: usize,
    pub v_plus: i64,
    /// max |Q(n) - Q~(n)| over the period, when Q covers it.
    pub max_abs_diff: Option<i64>,
    /// max_abs_diff / V+(r).
    pub ratio: Option<f64>,
    /// Peak of the scaled fluctuation over the period.
    pub envelope_peak: f64,
    pub envelope_peak_n: usize,
    /// V+(r) / (6 a_r) * sqrt(log2 n) at the peak position.
    pub envelope_oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub n_max: usize,
    /// First n at which the Q recursion was ill-defined.
    pub q_death: Option<usize>,
    pub arches: Vec<ArchComparison>,
}

/// Compares Q with Q~ over every arch period covered by `qt`.
pub fn compare(qt: &SequenceTrack, q: &QRun, arches: &[Arch]) -> ComparisonReport {
    let q_len = q.track.len();
    let mut rows = Vec::new();
    for arch in arches {
        let (n_lo, n_hi) = (2 * arch.u as usize - 1, 2 * arch.u_next as usize - 2);
        let Some(v_plus) = arch.v_plus else { continue };
        if n_hi > qt.len() {
            break;
        }
        let max_abs_diff = (n_hi <= q_len).then(|| {
            (n_lo..=n_hi)
                .map(|n| (q.track.at(n) - qt.at(n)).abs())
                .max()
                .unwrap_or(0)
        });
        let (mut peak, mut peak_n) = (f64::MIN, n_lo);
        for n in n_lo..=n_hi {
            let s = scaled_fluctuation(qt.at(n), n);
            if s > peak {
                peak = s;
                peak_n = n;
            }
        }
        rows.push(ArchComparison {
            r: arch.r,
            n_lo,
            n_hi,
            v_plus,
            max_abs_diff,
            ratio: max_abs_diff.map(|d| d as f64 / v_plus as f64),
            envelope_peak: peak,
            envelope_peak_n: peak_n,
            envelope_oracle: v_plus as f64 / (6.0 * arch.a as f64) * (peak_n as f64).log2().sqrt(),
        });
    }
    ComparisonReport {
        n_max: qt.len(),
        q_death: q.death,
        arches: rows,
    }
}
