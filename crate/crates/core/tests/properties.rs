use proptest::prelude::*;
use qtilde::words::{extract, gap_profile, interleave, word_diagnostics, BitWord};

fn bits(max: usize) -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 0..max)
}

/// Anti-palindromic words: a random half followed by its reversed complement.
fn anti_palindrome(max_half: usize) -> impl Strategy<Value = BitWord> {
    prop::collection::vec(any::<bool>(), 1..max_half).prop_map(|half| {
        let tail: Vec<bool> = half.iter().rev().map(|b| !b).collect();
        half.into_iter().chain(tail).collect()
    })
}

proptest! {
    #[test]
    fn string_round_trip(v in bits(300)) {
        let w: BitWord = v.iter().copied().collect();
        let back: BitWord = w.to_string().parse().unwrap();
        prop_assert_eq!(&back, &w);
        prop_assert_eq!(w.len(), v.len());
        prop_assert_eq!(w.ones(), v.iter().filter(|&&b| b).count());
    }

    #[test]
    fn height_matches_prefix_counts(v in bits(300), t in 0usize..300) {
        let w: BitWord = v.iter().copied().collect();
        let t = t.min(v.len());
        let ones = v[..t].iter().filter(|&&b| b).count() as i64;
        prop_assert_eq!(w.height(t), t as i64 - 2 * ones);
    }

    #[test]
    fn interleave_is_additive(x in bits(200), y in bits(200), state: bool) {
        let (x, y): (BitWord, BitWord) = (x.into_iter().collect(), y.into_iter().collect());
        let (out, trace) = interleave(&x, &y, state);
        prop_assert_eq!(out.len(), x.len() + y.len());
        for s in trace.steps() {
            prop_assert_eq!(out.height(s.t), x.height(s.i) + y.height(s.j));
        }
    }

    #[test]
    fn extraction_inverts_interleave(mid in bits(300)) {
        let w: BitWord = std::iter::once(false).chain(mid).chain(std::iter::once(true)).collect();
        let (e0, e1) = extract(&w).unwrap();
        prop_assert_eq!(e0.len() + e1.len(), w.len());
        prop_assert_eq!(interleave(&e0, &e1, false).0, w);
    }

    #[test]
    fn extraction_rejects_bad_boundaries(mid in bits(50)) {
        let starts_one: BitWord = std::iter::once(true).chain(mid.clone()).chain(std::iter::once(true)).collect();
        let ends_zero: BitWord = std::iter::once(false).chain(mid).chain(std::iter::once(false)).collect();
        prop_assert!(extract(&starts_one).is_err());
        prop_assert!(extract(&ends_zero).is_err());
    }

    #[test]
    fn anti_palindromes_have_palindromic_heights(w in anti_palindrome(150)) {
        let d = word_diagnostics(&w);
        prop_assert!(d.anti_palindromic && d.balanced);
        let n = w.len();
        for t in 0..=n {
            prop_assert_eq!(w.height(t), w.height(n - t));
        }
    }

    #[test]
    fn gap_identities(w in anti_palindrome(150)) {
        prop_assume!(w.get(w.len() - 1));
        let g = gap_profile(&w).unwrap();
        prop_assert!(g.topological_identity);
        prop_assert!(g.is_dual_mirror());
        prop_assert_eq!(g.gap_sum() as usize, w.len() - 1);
    }
}
