//! Exact binomial coefficients.

/// C(n, k) as an exact 128-bit integer, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc = C(n - k + i - 1, i - 1), so acc * (n - k + i) is divisible by i.
        acc = acc.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(acc)
}

/// C(n, k) as i64. Panics if the value does not fit.
pub fn binomial_i64(n: u64, k: u64) -> i64 {
    binomial(n, k)
        .and_then(|c| i64::try_from(c).ok())
        .unwrap_or_else(|| panic!("C({n}, {k}) does not fit in i64"))
}
