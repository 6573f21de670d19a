//! First-maximum analytics of the positive step words, the staircase
//! triangle, and checks of the record claim and its companions.

use serde::Serialize;

use crate::arches::{pow4, Arch};
use crate::binomial::binomial_i64;
use crate::error::{Error, Result};
use crate::frequency::BlockCounts;
use crate::report::{Kind, Report};
use crate::words::{height_profile, BitWord, GapProfile, LawRun};

/// First index of the maximum of `values`.
fn first_argmax(values: &[i64]) -> usize {
    let max = values.iter().copied().max().unwrap_or(0);
    values.iter().position(|&x| x == max).unwrap_or(0)
}

/// 1-run counts of the ascending prefix P_r[0..tau) of a positive step word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StaircaseRow {
    pub r: usize,
    /// First time at which h_P attains its maximum.
    pub tau: usize,
    /// Slot `l - 1` counts maximal 1-runs of length l.
    pub c: Vec<i64>,
    /// Number of runs of length at least 2.
    pub nu: i64,
}

impl StaircaseRow {
    pub fn c(&self, l: usize) -> i64 {
        l.checked_sub(1)
            .and_then(|i| self.c.get(i))
            .copied()
            .unwrap_or(0)
    }
}

pub fn staircase_row(p: &BitWord, r: usize) -> Result<StaircaseRow> {
    let h = height_profile(p);
    let tau = first_argmax(&h);
    if tau > 0 && p.get(tau - 1) {
        return Err(Error::MalformedWord(format!(
            "a 1-run straddles the first maximum at {tau}"
        )));
    }
    let mut c: Vec<i64> = Vec::new();
    for (bit, len) in p.slice(0..tau).runs() {
        if bit {
            if c.len() < len {
                c.resize(len, 0);
            }
            c[len - 1] += 1;
        }
    }
    let nu = c.iter().skip(1).sum();
    Ok(StaircaseRow { r, tau, c, nu })
}

fn find_row(rows: &[StaircaseRow], r: usize) -> Option<&StaircaseRow> {
    rows.iter().find(|row| row.r == r)
}

/// Whether every level below `r` is known to satisfy its hypotheses.
fn hypotheses_below(hypotheses: &[bool], r: usize) -> bool {
    r <= hypotheses.len() && hypotheses[..r].iter().all(|&h| h)
}

/// Staircase recursion, singleton formula, kernel closed form W_r,
/// Equations A and B, the first-maximum identity, and the j* formula.
///
/// `gaps[r]` is the gap profile of P_r, and `hypotheses[r]` records whether
/// the record claim and nu = j* held at level r; W_r is reported as
/// conditional unless they held at every level below r.
pub fn verify_staircase(
    rows: &[StaircaseRow],
    arches: &[Arch],
    gaps: &[GapProfile],
    hypotheses: &[bool],
) -> Report {
    let mut rep = Report::new();
    let vp = |r: usize| arches.get(r).and_then(|a| a.v_plus);
    for row in rows.iter().filter(|row| row.r >= 1) {
        let r = row.r;
        let singleton = (pow4(r, r).unwrap_or(i64::MAX) - 1) / 3;
        rep.check(
            "singleton",
            r,
            Kind::Observed,
            row.c(1) == singleton,
            format!("c_1={} (4^r-1)/3={singleton}", row.c(1)),
        );
        if let Some(next) = find_row(rows, r + 1) {
            let width = next.c.len().max(row.c.len() + 1);
            let ok = (2..=width)
                .all(|l| next.c(l) == row.c.iter().skip(l.saturating_sub(2)).sum::<i64>());
            rep.check(
                "staircase_recursion",
                r,
                Kind::Observed,
                ok,
                format!("{:?} -> {:?}", row.c, next.c),
            );
        }
        if let (Some(v), Some(prev)) = (vp(r), arches.get(r - 1)) {
            let four_a = 4 * prev.a;
            rep.check(
                "first_max",
                r,
                Kind::Observed,
                row.tau as i64 + v == four_a,
                format!("tau+V+={} 4a_(r-1)={four_a}", row.tau as i64 + v),
            );
            if let Some(g) = gaps.get(r) {
                let j = 2 * prev.a - v;
                rep.check(
                    "j_star_formula",
                    r,
                    Kind::Observed,
                    g.j_star as i64 == j,
                    format!("j*={} 2a_(r-1)-V+={j}", g.j_star),
                );
            }
            if let Some(vprev) = prev.v_plus {
                let w = v - vprev;
                let kernel = binomial_i64(2 * r as u64 + 1, r as u64);
                rep.check_conditional(
                    "kernel_w",
                    r,
                    w == kernel,
                    hypotheses_below(hypotheses, r),
                    format!("W={w} C(2r+1,r)={kernel}"),
                );
            }
        }
    }
    for (r, arch) in arches.iter().enumerate() {
        let (Some(next), Some(v), Some(g)) = (find_row(rows, r + 1), arch.v_plus, gaps.get(r))
        else {
            continue;
        };
        let lhs = next.c(1) - g.j_star as i64;
        rep.check(
            "equation_a",
            r,
            Kind::Observed,
            lhs == v - 1,
            format!("c_(r+1),1-j*={lhs} V+-1={}", v - 1),
        );
        let lhs = next.c(1) + next.nu;
        rep.check(
            "equation_b",
            r,
            Kind::Observed,
            lhs == arch.a - v,
            format!("c_(r+1),1+nu={lhs} a-V+={}", arch.a - v),
        );
    }
    rep
}

/// D_k = 2 W_k with W_k = V+(k) - V+(k-1), for k >= 1.
pub fn verify_duality(blocks: &[BlockCounts], arches: &[Arch]) -> Report {
    let mut rep = Report::new();
    for blk in blocks.iter().filter(|b| b.k >= 1) {
        let k = blk.k;
        let (Some(Some(v)), Some(Some(vprev))) = (
            arches.get(k).map(|a| a.v_plus),
            arches.get(k - 1).map(|a| a.v_plus),
        ) else {
            continue;
        };
        let w = v - vprev;
        rep.check(
            "duality",
            k,
            Kind::Observed,
            blk.d_k == 2 * w,
            format!("D={} 2W={}", blk.d_k, 2 * w),
        );
    }
    rep
}

/// Alignment predicates of the Law 1 machine producing N_r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Alignment {
    /// a_T + 2 = tau_r - 1.
    pub fast_head_at_t: bool,
    /// b_T = tau_r.
    pub slow_head_at_t: bool,
    /// H_N(T) = 2V+ - 2.
    pub depth_at_t: bool,
    /// The S0 head sits at 2a_r at the first peak of P_{r+1}.
    pub s0_head_midpoint: bool,
    /// H_N first attains its maximum 2V+ - 2 at x* = 2a_r - 2.
    pub depth_peak: bool,
    /// b_{x*} = tau_r.
    pub slow_head_at_peak: bool,
    /// a_{x*} + 2 = 2a_r - tau_r, the last maximum of h_P.
    pub fast_head_at_peak: bool,
}

impl Alignment {
    /// The predicates that locate both heads and the depth maximum at x*.
    pub fn at_peak(&self) -> bool {
        self.s0_head_midpoint && self.depth_peak && self.slow_head_at_peak && self.fast_head_at_peak
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordReport {
    pub r: usize,
    /// S1-head position at the first peak of P_{r+1}, minus the padding bit.
    pub t: usize,
    /// H_N(T) - max over t < T of H_N(t); `None` when T = 0.
    pub margin: Option<i64>,
    /// H_N(t) <= H_N(T) for all t <= T.
    pub record_claim: bool,
    pub fact_a: bool,
    pub fact_b: bool,
    /// Run-ballot margins of P_r[0..b_T) read right to left; entry 0 is the
    /// empty suffix at b_T and entry k follows the k-th reversed 1-run.
    pub ballot_margins: Vec<i64>,
    pub alignment: Alignment,
    /// T = 2a_r - V+(r+1) - 1.
    pub t_closed_form: bool,
    /// nu_r = j*_r, when staircase and gap data were supplied.
    pub nu_eq_jstar: Option<bool>,
}

impl RecordReport {
    /// Smallest ballot margin after at least one reversed 1-run.
    pub fn ballot_min_interior(&self) -> Option<i64> {
        self.ballot_margins.iter().skip(1).copied().min()
    }

    pub fn ballot_terminal(&self) -> i64 {
        self.ballot_margins[0]
    }

    /// Observed slack pattern: at least 3 after every reversed 1-run, 0 at the end.
    pub fn ballot_pattern(&self) -> bool {
        self.ballot_terminal() == 0 && self.ballot_min_interior().is_none_or(|m| m >= 3)
    }

    pub fn to_export(&self, conditional_flags: Vec<String>) -> RecordExport {
        RecordExport {
            r: self.r,
            t: self.t,
            margin: self.margin,
            fact_a: self.fact_a,
            fact_b: self.fact_b,
            ballot_min_slack: self.ballot_min_interior(),
            alignment: self.alignment.at_peak(),
            nu_eq_jstar: self.nu_eq_jstar,
            conditional_flags,
        }
    }
}

/// JSON form of a record report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordExport {
    pub r: usize,
    #[serde(rename = "T")]
    pub t: usize,
    pub margin: Option<i64>,
    pub fact_a: bool,
    pub fact_b: bool,
    pub ballot_min_slack: Option<i64>,
    pub alignment: bool,
    pub nu_eq_jstar: Option<bool>,
    pub conditional_flags: Vec<String>,
}

/// Run-ballot margins of `omega` per the reversed-run decomposition.
fn ballot_margins(omega: &BitWord) -> Vec<i64> {
    let mut margins = vec![0];
    let mut acc = 0i64;
    for &(bit, len) in omega.runs().iter().rev() {
        if bit {
            acc -= len as i64;
            margins.push(acc);
        } else {
            acc += len as i64;
        }
    }
    margins
}

/// Evaluates the record claim at level r from P_r, the Law 1 run producing
/// N_r and the Law 2 run producing P_{r+1}. `staircase` optionally supplies
/// the staircase row of level r+1 and the gap profile of P_r.
pub fn record_claim_check(
    p: &BitWord,
    n: &LawRun,
    p_next: &LawRun,
    r: usize,
    staircase: Option<(&StaircaseRow, &GapProfile)>,
) -> Result<RecordReport> {
    let t1 = n.trace_for(r)?;
    let t2 = p_next.trace_for(r)?;
    let hp = height_profile(p);
    let hn = height_profile(&n.word);
    let hnext = height_profile(&p_next.word);
    let a_r = (p.len() / 2) as i64;
    let v_plus = hp.iter().copied().max().unwrap_or(0);
    let v_plus_next = hnext.iter().copied().max().unwrap_or(0);
    let tau = first_argmax(&hp);
    let tau_next = first_argmax(&hnext);

    let j = t2.y_consumed(tau_next);
    let t = j
        .checked_sub(1)
        .ok_or_else(|| Error::MalformedWord(format!("level {r}: S1 head unused at the peak")))?;
    let h_t = hn[t];
    let margin = hn[..t].iter().max().map(|m| h_t - m);
    let record_claim = hn[..=t].iter().all(|&x| x <= h_t);

    let fast = |x: usize| hp[t1.fast_head(x) + 2];
    let slow = |x: usize| hp[t1.slow_head(x)];
    let fact_a = (0..=t).all(|x| fast(x) <= fast(t));
    let fact_b = (0..=t).all(|x| slow(x) <= slow(t));

    let b_t = t1.slow_head(t);
    let ballot = ballot_margins(&p.slice(0..b_t));

    let x_star = first_argmax(&hn);
    let depth_max = hn[x_star];
    let alignment = Alignment {
        fast_head_at_t: t1.fast_head(t) + 2 + 1 == tau,
        slow_head_at_t: b_t == tau,
        depth_at_t: h_t == 2 * v_plus - 2,
        s0_head_midpoint: t2.x_consumed(tau_next) as i64 == 2 * a_r,
        depth_peak: x_star as i64 == 2 * a_r - 2 && depth_max == 2 * v_plus - 2,
        slow_head_at_peak: t1.slow_head(x_star) == tau,
        fast_head_at_peak: (t1.fast_head(x_star) + 2) as i64 == 2 * a_r - tau as i64,
    };

    Ok(RecordReport {
        r,
        t,
        margin,
        record_claim,
        fact_a,
        fact_b,
        ballot_margins: ballot,
        alignment,
        t_closed_form: t as i64 == 2 * a_r - v_plus_next - 1,
        nu_eq_jstar: staircase.map(|(row, gap)| row.nu == gap.j_star as i64),
    })
}

/// Depth identity H_N(x) = h_P(a_x + 2) + h_P(b_x) - 2 at every x, the
/// depth bound and equality, and the head positions at the depth maximum.
pub fn depth_check(p: &BitWord, n: &LawRun, arch: &Arch) -> Result<Report> {
    let r = arch.r;
    let trace = n.trace_for(r)?;
    let hp = height_profile(p);
    let hn = height_profile(&n.word);
    let v = arch
        .v_plus
        .unwrap_or_else(|| hp.iter().copied().max().unwrap_or(0));
    let mut rep = Report::new();
    let residual_free =
        (0..hn.len()).all(|x| hn[x] == hp[trace.fast_head(x) + 2] + hp[trace.slow_head(x)] - 2);
    rep.check("depth_identity", r, Kind::Proved, residual_free, "");
    let x_star = first_argmax(&hn);
    let max_h = hn[x_star];
    rep.check(
        "depth_bound_word",
        r,
        Kind::Proved,
        max_h <= 2 * v - 2,
        format!("max H={max_h}"),
    );
    rep.check(
        "depth_equality_word",
        r,
        Kind::Observed,
        max_h == 2 * v - 2,
        format!("max H={max_h} 2V+-2={}", 2 * v - 2),
    );
    if let Some(vm) = arch.v_minus {
        rep.check(
            "depth_matches_v_minus",
            r,
            Kind::Observed,
            max_h == vm,
            format!("|V-|={vm}"),
        );
    }
    let both = hp[trace.fast_head(x_star) + 2] == v && hp[trace.slow_head(x_star)] == v;
    rep.check(
        "heads_at_parent_max",
        r,
        Kind::Observed,
        both,
        format!("x*={x_star}"),
    );
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{gap_profile, law1, law2};

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    const P0: &str = "001011";
    const P1: &str = "0001000101100101110111";

    #[test]
    fn staircase_row_r1() {
        let row = staircase_row(&w(P1), 1).unwrap();
        assert_eq!((row.tau, row.c.clone(), row.nu), (7, vec![1], 0));
        let row0 = staircase_row(&w(P0), 0).unwrap();
        assert_eq!((row0.tau, row0.c.len()), (2, 0));
    }

    #[test]
    fn ballot_margins_by_hand() {
        // Reversed runs of 00 11 00 1 00: Z=(2,2,2), O=(1,2).
        assert_eq!(ballot_margins(&w("001100100")), vec![0, 1, 1]);
        assert_eq!(ballot_margins(&w("0001")), vec![0, -1]);
        assert_eq!(ballot_margins(&w("00")), vec![0]);
        assert_eq!(ballot_margins(&BitWord::new()), vec![0]);
    }

    #[test]
    fn record_level_zero() {
        let p0 = w(P0);
        let n0 = law1(&p0).unwrap();
        let p1 = law2(&n0.word);
        let rep = record_claim_check(&p0, &n0, &p1, 0, None).unwrap();
        assert_eq!(rep.t, 0);
        assert_eq!(rep.margin, None);
        assert!(rep.record_claim && rep.fact_a && rep.fact_b && rep.t_closed_form);
        assert!(rep.alignment.at_peak());
        let mut bare = n0.clone();
        bare.drop_trace();
        assert!(matches!(
            record_claim_check(&p0, &bare, &p1, 0, None),
            Err(Error::TraceMissing(0))
        ));
    }

    #[test]
    fn record_level_one() {
        let p1 = w(P1);
        let n1 = law1(&p1).unwrap();
        let p2 = law2(&n1.word);
        let row2 = staircase_row(&p2.word, 2).unwrap();
        let g1 = gap_profile(&p1).unwrap();
        let rep = record_claim_check(&p1, &n1, &p2, 1, Some((&row2, &g1))).unwrap();
        assert_eq!(rep.t, 6);
        assert_eq!(rep.margin, Some(1));
        assert_eq!(rep.nu_eq_jstar, Some(true));
        assert!(rep.alignment.fast_head_at_t && rep.alignment.at_peak());
    }

    #[test]
    fn depth_level_zero() {
        let p0 = w(P0);
        let n0 = law1(&p0).unwrap();
        let arch = crate::arches::Arch {
            v_plus: Some(2),
            v_minus: Some(2),
            ..crate::arches::skeleton(0).unwrap()
        };
        let rep = depth_check(&p0, &n0, &arch).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
    }
}
