//! Arch decomposition of delta = B - A: closed-form skeleton, detection by
//! scanning zeros, per-level identities and the entry-time lag.

use serde::Serialize;

use crate::binomial::binomial_i64;
use crate::error::{Error, Result};
use crate::frequency::BlockCounts;
use crate::report::{Kind, Report};
use crate::sequences::ParityTracks;

/// Arch level r: positive arch [u, v] followed by the negative arch [v, u_next].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arch {
    pub r: usize,
    pub a: i64,
    pub u: i64,
    pub v: i64,
    pub u_next: i64,
    /// max delta on [u, v].
    pub v_plus: Option<i64>,
    /// max of -delta on [v, u_next].
    pub v_minus: Option<i64>,
}

/// 4^e, or `Overflow(level)`.
pub(crate) fn pow4(e: usize, level: usize) -> Result<i64> {
    u32::try_from(e)
        .ok()
        .and_then(|e| 4i64.checked_pow(e))
        .ok_or(Error::Overflow(level))
}

/// a_r = (2 * 4^{r+1} + 1) / 3.
pub fn skeleton_a(r: usize) -> Result<i64> {
    pow4(r + 1, r)?
        .checked_mul(2)
        .and_then(|x| x.checked_add(1))
        .map(|x| x / 3)
        .ok_or(Error::Overflow(r))
}

/// u_r = 2a_r - r - 2.
pub fn skeleton_u(r: usize) -> Result<i64> {
    skeleton_a(r)?
        .checked_mul(2)
        .map(|x| x - r as i64 - 2)
        .ok_or(Error::Overflow(r))
}

/// Closed-form fields of level r; amplitudes are left unset.
pub fn skeleton(r: usize) -> Result<Arch> {
    let a = skeleton_a(r)?;
    let u = skeleton_u(r)?;
    let v = a
        .checked_mul(2)
        .and_then(|x| x.checked_add(u))
        .ok_or(Error::Overflow(r))?;
    let u_next = skeleton_u(r + 1)?;
    Ok(Arch {
        r,
        a,
        u,
        v,
        u_next,
        v_plus: None,
        v_minus: None,
    })
}

fn expect_field(r: usize, field: &'static str, detected: i64, expected: i64) -> Result<()> {
    if detected == expected {
        Ok(())
    } else {
        Err(Error::SkeletonMismatch {
            r,
            field,
            detected,
            expected,
        })
    }
}

/// Scans from `start` while delta keeps the sign `positive`, returning the
/// next index, which must be a zero of delta.
fn next_zero(
    delta: &[i64],
    start: usize,
    positive: bool,
    r: usize,
    field: &'static str,
    expected: i64,
) -> Result<usize> {
    let mut m = start + 1;
    loop {
        let Some(&d) = delta.get(m - 1) else {
            return Err(Error::InsufficientRange {
                needed: expected.max(m as i64) as usize,
                available: delta.len(),
            });
        };
        if d == 0 {
            return Ok(m);
        }
        if (d > 0) != positive {
            // The arch changed sign without touching zero.
            return Err(Error::SkeletonMismatch {
                r,
                field,
                detected: m as i64,
                expected,
            });
        }
        m += 1;
    }
}

/// The first zero of delta, where the arch sequence is seeded.
pub const FIRST_ZERO: usize = 4;

/// Detects levels 0..=r_max by alternating zero scans of delta from m = 4,
/// checking every boundary against the closed form.
pub fn detect_arches(tracks: &ParityTracks, r_max: usize) -> Result<Vec<Arch>> {
    let needed = skeleton_u(r_max + 1)? as usize;
    if tracks.m_max() < needed {
        return Err(Error::InsufficientRange {
            needed,
            available: tracks.m_max(),
        });
    }
    let delta = tracks.delta.values();
    expect_field(0, "delta(u)", delta[FIRST_ZERO - 1], 0)?;
    let mut u = FIRST_ZERO;
    let mut arches = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        let sk = skeleton(r)?;
        expect_field(r, "u", u as i64, sk.u)?;
        let v = next_zero(delta, u, true, r, "v", sk.v)?;
        expect_field(r, "v", v as i64, sk.v)?;
        let u_next = next_zero(delta, v, false, r, "u_next", sk.u_next)?;
        expect_field(r, "u_next", u_next as i64, sk.u_next)?;
        let v_plus = delta[u - 1..v].iter().copied().max();
        let v_minus = delta[v - 1..u_next].iter().map(|d| -d).max();
        arches.push(Arch {
            v_plus,
            v_minus,
            ..sk
        });
        u = u_next;
    }
    Ok(arches)
}

/// 1 + sum over k <= r of C(2k+1, k).
pub fn v_plus_closed_form(r: usize) -> i64 {
    1 + (0..=r as u64)
        .map(|k| binomial_i64(2 * k + 1, k))
        .sum::<i64>()
}

/// Per-level anchors, median identity, boundary values, boundary plateau,
/// excursion palindromicity and amplitude relations.
pub fn verify_arch_identities(tracks: &ParityTracks, arches: &[Arch]) -> Report {
    let mut rep = Report::new();
    let b_entry = tracks.b.entry_times().unwrap_or_default();
    let b_final = tracks.b.last().unwrap_or(0);
    for arch in arches {
        let r = arch.r;
        let (a, u, v) = (arch.a as usize, arch.u as usize, arch.v as usize);
        let qt_2a = 2 * tracks.b.at(a) - 1;
        rep.check(
            "anchor",
            r,
            Kind::Proved,
            qt_2a == arch.a,
            format!("Q~({})={qt_2a}", 2 * a),
        );

        let four = pow4(r + 1, r).unwrap_or(i64::MAX);
        rep.check(
            "median",
            r,
            Kind::Proved,
            (3 * arch.a - 1) / 2 == four && (3 * arch.a - 1) % 2 == 0,
            format!("(3a-1)/2={} 4^(r+1)={four}", (3 * arch.a - 1) / 2),
        );

        let bounds = [
            tracks.a.at(u),
            tracks.b.at(u),
            tracks.a.at(v),
            tracks.b.at(v),
        ];
        rep.check(
            "boundary_values",
            r,
            Kind::Proved,
            bounds == [arch.a, arch.a, 2 * arch.a, 2 * arch.a],
            format!("A(u),B(u),A(v),B(v)={bounds:?}"),
        );

        let two_a = 2 * arch.a;
        if two_a < b_final {
            let i = two_a as usize;
            let plateau = b_entry[i] - b_entry[i - 1];
            rep.check(
                "boundary_plateau",
                r,
                Kind::Proved,
                plateau as i64 == 2 * r as i64 + 4,
                format!("F_B({two_a})={plateau}"),
            );
        }

        let delta = &tracks.delta;
        let palindromic = (0..=2 * a).all(|t| delta.at(u + t) == delta.at(v - t));
        rep.check("excursion_palindrome", r, Kind::Proved, palindromic, "");

        let interior_positive = (u + 1..v).all(|m| delta.at(m) >= 1);
        let interior_negative = (v + 1..arch.u_next as usize).all(|m| delta.at(m) <= -1);
        rep.check(
            "arch_signs",
            r,
            Kind::Proved,
            interior_positive && interior_negative,
            "",
        );

        if let (Some(vp), Some(vm)) = (arch.v_plus, arch.v_minus) {
            rep.check(
                "depth_bound",
                r,
                Kind::Proved,
                vm <= 2 * vp - 2,
                format!("|V-|={vm} 2V+-2={}", 2 * vp - 2),
            );
            rep.check(
                "depth_equality",
                r,
                Kind::Observed,
                vm == 2 * vp - 2,
                format!("|V-|={vm} 2V+-2={}", 2 * vp - 2),
            );
            let closed = v_plus_closed_form(r);
            rep.check(
                "v_plus_closed_form",
                r,
                Kind::Observed,
                vp == closed,
                format!("V+={vp} closed={closed}"),
            );
        }
    }
    rep
}

/// Entry-time lag at value v.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LagRecord {
    pub v: i64,
    pub m_a: i64,
    pub m_b: i64,
    /// m_A(v) - m_B(v).
    pub e: i64,
}

#[derive(Debug, Clone)]
pub struct LagAnalysis {
    /// E(4^k) for k = 0..=K.
    pub records: Vec<LagRecord>,
    pub report: Report,
}

/// Lags at v = 4^k for k <= `depth`, the telescoping sum against the block
/// asymmetries, the lag-excursion identity on every interior value of each
/// positive arch, and the amplitude lower bound.
pub fn lag_analysis(
    tracks: &ParityTracks,
    arches: &[Arch],
    blocks: &[BlockCounts],
    depth: usize,
) -> Result<LagAnalysis> {
    let ea = tracks.a.entry_times()?;
    let eb = tracks.b.entry_times()?;
    let top = pow4(depth, depth)?;
    let reach = ea.len().min(eb.len()) as i64;
    if reach < top {
        return Err(Error::InsufficientRange {
            needed: top as usize,
            available: reach as usize,
        });
    }
    let lag = |v: i64| -> LagRecord {
        let (m_a, m_b) = (ea[v as usize - 1] as i64, eb[v as usize - 1] as i64);
        LagRecord {
            v,
            m_a,
            m_b,
            e: m_a - m_b,
        }
    };
    let mut records = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        records.push(lag(pow4(k, k)?));
    }

    let mut report = Report::new();
    for kk in 1..=depth.min(blocks.len()) {
        let sum: i64 = blocks[..kk].iter().map(|b| b.d_k).sum();
        let e = records[kk].e;
        report.check(
            "telescoping_lag",
            kk,
            Kind::Proved,
            e == sum,
            format!("E(4^{kk})={e} sum D={sum}"),
        );
    }

    for arch in arches {
        if 2 * arch.a > reach {
            return Err(Error::InsufficientRange {
                needed: 2 * arch.a as usize,
                available: reach as usize,
            });
        }
        let ok = (arch.a + 1..2 * arch.a).all(|v| {
            let rec = lag(v);
            rec.e == tracks.delta.at(rec.m_b as usize) + tracks.delta.at(rec.m_a as usize)
        });
        report.check("lag_excursion", arch.r, Kind::Proved, ok, "");
    }

    for arch in arches.iter().filter(|a| a.r < blocks.len()) {
        if let Some(vp) = arch.v_plus {
            let sum: i64 = blocks[..=arch.r].iter().map(|b| b.d_k).sum();
            report.check(
                "amplitude_lower_bound",
                arch.r,
                Kind::Proved,
                2 * vp >= sum,
                format!("2V+={} sum D={sum}", 2 * vp),
            );
        }
    }
    Ok(LagAnalysis { records, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{generate_qtilde, parity_split};

    #[test]
    fn skeleton_closed_forms() {
        let s0 = skeleton(0).unwrap();
        assert_eq!((s0.a, s0.u, s0.v), (3, 4, 10));
        let s3 = skeleton(3).unwrap();
        assert_eq!((s3.a, s3.u, s3.v), (171, 337, 679));
        let s1 = skeleton(1).unwrap();
        assert_eq!(s1.v - s1.u, 22);
        assert!(matches!(skeleton(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn detection_matches_table() {
        let tracks = parity_split(&generate_qtilde(4000).unwrap()).unwrap();
        let arches = detect_arches(&tracks, 3).unwrap();
        let rows: Vec<_> = arches
            .iter()
            .map(|a| (a.a, a.u, a.v, a.v_plus.unwrap(), a.v_minus.unwrap()))
            .collect();
        assert_eq!(
            rows,
            vec![
                (3, 4, 10, 2, 2),
                (11, 19, 41, 5, 8),
                (43, 82, 168, 15, 28),
                (171, 337, 679, 50, 98)
            ]
        );
        let rep = verify_arch_identities(&tracks, &arches);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn detection_needs_range() {
        let tracks = parity_split(&generate_qtilde(200).unwrap()).unwrap();
        assert!(matches!(
            detect_arches(&tracks, 3),
            Err(Error::InsufficientRange { .. })
        ));
    }

    #[test]
    fn closed_form_amplitudes() {
        let vp: Vec<i64> = (0..=3).map(v_plus_closed_form).collect();
        assert_eq!(vp, vec![2, 5, 15, 50]);
    }
}
