//! Visit multiplicities of A and B and their dyadic-block frequency tables.

use serde::Serialize;

use crate::arches::pow4;
use crate::binomial::binomial_i64;
use crate::error::{Error, Result};
use crate::report::{Kind, Report};
use crate::sequences::{SequenceTrack, TrackName};

/// F(v) = number of indices m with track(m) = v, for 1 <= v <= complete_up_to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityTable {
    pub name: TrackName,
    counts: Vec<i64>,
    pub complete_up_to: i64,
}

impl MultiplicityTable {
    /// F(v). Panics outside `1..=complete_up_to`.
    pub fn f(&self, v: i64) -> i64 {
        assert!(
            v >= 1 && v <= self.complete_up_to,
            "value {v} outside 1..={}",
            self.complete_up_to
        );
        self.counts[v as usize - 1]
    }

    /// N(x) = sum of F(v) over v <= x.
    pub fn counting(&self, x: i64) -> i64 {
        self.counts[..x as usize].iter().sum()
    }

    /// Sum of F over the closed range [lo, hi].
    pub fn range_sum(&self, lo: i64, hi: i64) -> i64 {
        self.counts[lo as usize - 1..hi as usize].iter().sum()
    }
}

/// Plateau lengths of a unit-step non-decreasing track for v <= v_max.
pub fn visit_multiplicities(track: &SequenceTrack, v_max: i64) -> Result<MultiplicityTable> {
    let entries = track.entry_times()?;
    if (entries.len() as i64) <= v_max {
        return Err(Error::IncompleteRange(v_max));
    }
    let counts = entries
        .windows(2)
        .take(v_max.max(0) as usize)
        .map(|w| (w[1] - w[0]) as i64)
        .collect();
    Ok(MultiplicityTable {
        name: track.name(),
        counts,
        complete_up_to: v_max,
    })
}

/// Frequency data of block I_k = [4^k, 4^{k+1} - 1]; rows are indexed by
/// multiplicity r, with slot `r - 1` holding r.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockCounts {
    pub k: usize,
    pub a_row: Vec<i64>,
    pub b_row: Vec<i64>,
    pub s_row: Vec<i64>,
    pub delta_row: Vec<i64>,
    /// sum of r * Delta_{k,r}.
    pub d_k: i64,
    /// sum of r * S_{k,r}.
    pub m_k: i64,
}

fn row_at(row: &[i64], r: usize) -> i64 {
    r.checked_sub(1)
        .and_then(|i| row.get(i))
        .copied()
        .unwrap_or(0)
}

fn tail(row: &[i64], s: usize) -> i64 {
    row.iter().skip(s.saturating_sub(1)).sum()
}

impl BlockCounts {
    pub fn a(&self, r: usize) -> i64 {
        row_at(&self.a_row, r)
    }

    pub fn b(&self, r: usize) -> i64 {
        row_at(&self.b_row, r)
    }

    pub fn s(&self, r: usize) -> i64 {
        row_at(&self.s_row, r)
    }

    pub fn delta(&self, r: usize) -> i64 {
        row_at(&self.delta_row, r)
    }

    /// T_{k,s} = sum over j >= s of Delta_{k,j}.
    pub fn tail_delta(&self, s: usize) -> i64 {
        tail(&self.delta_row, s)
    }

    /// Largest multiplicity present in the block.
    pub fn max_multiplicity(&self) -> usize {
        self.s_row.len()
    }
}

/// Block I_k = [4^k, 4^{k+1} - 1].
pub fn block_bounds(k: usize) -> Result<(i64, i64)> {
    Ok((pow4(k, k)?, pow4(k + 1, k)? - 1))
}

pub fn block_table(
    fa: &MultiplicityTable,
    fb: &MultiplicityTable,
    k: usize,
) -> Result<BlockCounts> {
    let (lo, hi) = block_bounds(k)?;
    for table in [fa, fb] {
        if table.complete_up_to < hi {
            return Err(Error::IncompleteRange(hi));
        }
    }
    let histogram = |t: &MultiplicityTable| {
        let mut row: Vec<i64> = Vec::new();
        for v in lo..=hi {
            let f = t.f(v) as usize;
            if row.len() < f {
                row.resize(f, 0);
            }
            row[f - 1] += 1;
        }
        row
    };
    let mut a_row = histogram(fa);
    let mut b_row = histogram(fb);
    let width = a_row.len().max(b_row.len());
    a_row.resize(width, 0);
    b_row.resize(width, 0);
    let s_row: Vec<i64> = a_row.iter().zip(&b_row).map(|(a, b)| a + b).collect();
    let delta_row: Vec<i64> = a_row.iter().zip(&b_row).map(|(a, b)| a - b).collect();
    let weighted = |row: &[i64]| (1..).zip(row).map(|(r, x)| r * x).sum::<i64>();
    let d_k = weighted(&delta_row);
    let m_k = weighted(&s_row);
    Ok(BlockCounts {
        k,
        a_row,
        b_row,
        s_row,
        delta_row,
        d_k,
        m_k,
    })
}

/// S_{k,r} = 3 * 2^{2k-r+1} for r <= 2k+1, then 2, then 1, then nothing.
pub fn frequency_law(k: usize, r: usize) -> i64 {
    match r {
        0 => 0,
        r if r <= 2 * k + 1 => 3 << (2 * k + 1 - r),
        r if r == 2 * k + 2 => 2,
        r if r == 2 * k + 3 => 1,
        _ => 0,
    }
}

/// Frequency law, row sums, mass formula, first column, layer-cake, the
/// closed form of D_k, and the macro-transduction between consecutive blocks.
pub fn verify_frequency_laws(blocks: &[BlockCounts]) -> Report {
    let mut rep = Report::new();
    for blk in blocks {
        let k = blk.k;
        let four_k = pow4(k, k).unwrap_or(i64::MAX);
        if k >= 1 {
            let width = blk.max_multiplicity().max(2 * k + 3);
            let ok = (1..=width).all(|r| blk.s(r) == frequency_law(k, r));
            rep.check(
                "frequency_law",
                k,
                Kind::Proved,
                ok,
                format!("S={:?}", blk.s_row),
            );
            rep.check(
                "mass",
                k,
                Kind::Proved,
                blk.m_k == 12 * four_k - 2,
                format!("M={}", blk.m_k),
            );
            rep.check(
                "delta_2_zero",
                k,
                Kind::Proved,
                blk.delta(2) == 0,
                format!("Delta_2={}", blk.delta(2)),
            );
        }
        let s_sum: i64 = blk.s_row.iter().sum();
        rep.check(
            "row_sum_s",
            k,
            Kind::Proved,
            s_sum == 6 * four_k,
            format!("sum S={s_sum}"),
        );
        let d_sum: i64 = blk.delta_row.iter().sum();
        rep.check(
            "row_sum_delta",
            k,
            Kind::Proved,
            d_sum == 0,
            format!("sum Delta={d_sum}"),
        );
        let central = binomial_i64(2 * k as u64, k as u64);
        rep.check(
            "first_column",
            k,
            Kind::Proved,
            blk.delta(1) == -central,
            format!("Delta_1={} -C(2k,k)={}", blk.delta(1), -central),
        );
        let layer: i64 = (2..=blk.max_multiplicity())
            .map(|s| blk.tail_delta(s))
            .sum();
        rep.check(
            "layer_cake",
            k,
            Kind::Proved,
            layer == blk.d_k,
            format!("sum T={layer} D={}", blk.d_k),
        );
        let closed = binomial_i64(2 * k as u64 + 2, k as u64 + 1);
        rep.check(
            "d_k_closed_form",
            k,
            Kind::Proved,
            blk.d_k == closed,
            format!("D={} C(2k+2,k+1)={closed}", blk.d_k),
        );
    }
    for pair in blocks.windows(2) {
        let (cur, next) = (&pair[0], &pair[1]);
        if next.k != cur.k + 1 {
            continue;
        }
        let k = cur.k;
        let width = next.max_multiplicity().max(cur.max_multiplicity() + 2);
        let ok = (2..=width).all(|r| {
            let a = tail(&cur.a_row, r - 1) + i64::from(r == 2 * k + 5);
            let b = tail(&cur.b_row, r - 1) + i64::from(r == 2 * k + 4);
            next.a(r) == a && next.b(r) == b
        });
        let kind = if k == 0 { Kind::Observed } else { Kind::Proved };
        rep.check(
            "macro_transduction",
            k,
            kind,
            ok,
            format!("blocks {k} -> {}", k + 1),
        );
    }
    rep
}

/// Exact block sums of F_A and F_B over I_k for k < depth, and the residual
/// N(x) - 2x at x = 4^k - 1 against its exact decomposition.
pub fn counting_residual(
    fa: &MultiplicityTable,
    fb: &MultiplicityTable,
    blocks: &[BlockCounts],
    depth: usize,
) -> Result<Report> {
    let mut rep = Report::new();
    let top = pow4(depth, depth)? - 1;
    for table in [fa, fb] {
        if table.complete_up_to < top {
            return Err(Error::IncompleteRange(top));
        }
    }
    if blocks.len() < depth {
        return Err(Error::InvalidInput(format!(
            "counting residual to depth {depth} needs {depth} blocks, got {}",
            blocks.len()
        )));
    }
    let mut half_d = 0i64;
    for blk in &blocks[..depth] {
        let k = blk.k;
        if blk.d_k % 2 != 0 {
            return Err(Error::OddAsymmetry(k));
        }
        let (lo, hi) = block_bounds(k)?;
        let size = hi - lo + 1;
        let sa = fa.range_sum(lo, hi);
        let sb = fb.range_sum(lo, hi);
        rep.check(
            "block_sum_a",
            k,
            Kind::Proved,
            sa == 2 * size - 1 + blk.d_k / 2,
            format!("sum F_A={sa}"),
        );
        rep.check(
            "block_sum_b",
            k,
            Kind::Proved,
            sb == 2 * size - 1 - blk.d_k / 2,
            format!("sum F_B={sb}"),
        );
        half_d += blk.d_k / 2;
        let x = hi;
        let kk = k as i64 + 1;
        let residual = fa.counting(x) - 2 * x;
        rep.check(
            "counting_decomposition",
            k + 1,
            Kind::Proved,
            residual == -kk + half_d,
            format!("N_A({x})-2x={residual} = -{kk} + {half_d}"),
        );
        rep.info(
            "counting_residual",
            k + 1,
            format!(
                "N_A({x})-2x={residual}, N_B({x})-2x={}",
                fb.counting(x) - 2 * x
            ),
        );
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use crate::sequences::{generate_qtilde, parity_split, ParityTracks};

    fn tracks() -> ParityTracks {
        parity_split(&generate_qtilde(2 * 3000).unwrap()).unwrap()
    }

    #[test]
    fn multiplicities() {
        let t = tracks();
        let fa = visit_multiplicities(&t.a, 1023).unwrap();
        let fb = visit_multiplicities(&t.b, 1023).unwrap();
        assert_eq!(fb.f(22), 6);
        assert_eq!(fa.f(1), 2);
        assert_eq!(fa.f(43), 7);
        assert!(matches!(
            visit_multiplicities(&t.a, 100_000),
            Err(Error::IncompleteRange(100_000))
        ));
    }

    #[test]
    fn block_tables() {
        let t = tracks();
        let fa = visit_multiplicities(&t.a, 1023).unwrap();
        let fb = visit_multiplicities(&t.b, 1023).unwrap();
        let b1 = block_table(&fa, &fb, 1).unwrap();
        assert_eq!(b1.s_row, vec![12, 6, 3, 2, 1]);
        assert_eq!(b1.delta_row, vec![-2, 0, 1, 0, 1]);
        assert_eq!(b1.d_k, 6);
        let b2 = block_table(&fa, &fb, 2).unwrap();
        assert_eq!(b2.m_k, 190);
        assert!(matches!(
            block_table(&fa, &fb, 5),
            Err(Error::IncompleteRange(_))
        ));
    }

    #[test]
    fn laws_and_residuals() {
        let t = tracks();
        let fa = visit_multiplicities(&t.a, 1023).unwrap();
        let fb = visit_multiplicities(&t.b, 1023).unwrap();
        let blocks: Vec<_> = (0..=3).map(|k| block_table(&fa, &fb, k).unwrap()).collect();
        let rep = verify_frequency_laws(&blocks);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert_eq!(rep.find("macro_transduction").count(), 3);
        assert_eq!(rep.status("macro_transduction", 0), Some(Status::Pass));
        let rep = counting_residual(&fa, &fb, &blocks, 4).unwrap();
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        assert_eq!(fa.range_sum(4, 15), 26);
        assert_eq!(fa.range_sum(1, 3), 6);
    }

    #[test]
    fn odd_asymmetry_is_rejected() {
        let t = tracks();
        let fa = visit_multiplicities(&t.a, 1023).unwrap();
        let fb = visit_multiplicities(&t.b, 1023).unwrap();
        let mut blocks: Vec<_> = (0..=1).map(|k| block_table(&fa, &fb, k).unwrap()).collect();
        blocks[1].d_k = 7;
        assert!(matches!(
            counting_residual(&fa, &fb, &blocks, 2),
            Err(Error::OddAsymmetry(1))
        ));
    }

    #[test]
    fn law_values() {
        assert_eq!(frequency_law(3, 1), 192);
        assert_eq!(frequency_law(1, 4), 2);
        assert_eq!(frequency_law(1, 5), 1);
        assert_eq!(frequency_law(1, 6), 0);
    }
}
