use super::{TestKind, TestResult};
use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::numeric::igamc;

const MAX_PATTERN_BITS: usize = 24;

/// Counts of every overlapping `k`-bit pattern with cyclic wraparound, indexed
/// by the pattern's value (first bit most significant). Sums to `n`.
pub fn pattern_counts(seq: &BitSequence, k: usize) -> Vec<u64> {
    let n = seq.len();
    let mut counts = vec![0u64; 1 << k];
    if k == 0 || n == 0 {
        counts[0] = n as u64;
        return counts;
    }
    let bits = seq.as_slice();
    let mask = (1usize << k) - 1;
    let mut pattern = 0usize;
    for i in 0..k - 1 {
        pattern = (pattern << 1) | bits[i % n] as usize;
    }
    for i in 0..n {
        pattern = ((pattern << 1) | bits[(i + k - 1) % n] as usize) & mask;
        counts[pattern] += 1;
    }
    debug_assert_eq!(counts.iter().sum::<u64>(), n as u64);
    counts
}

fn psi_squared(seq: &BitSequence, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let n = seq.len() as f64;
    let counts = pattern_counts(seq, k);
    let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
    (1u64 << k) as f64 / n * sum_sq - n
}

/// Serial test. Returns two p-values (first and second differences of psi^2).
pub fn serial(seq: &BitSequence, m: usize) -> Result<TestResult> {
    let n = seq.len();
    if m < 2 || m > MAX_PATTERN_BITS {
        return Err(Error::InvalidParameter(format!(
            "serial pattern length must be in [2, {MAX_PATTERN_BITS}], got {m}"
        )));
    }
    if n < m {
        return Err(Error::TooShort {
            what: "serial",
            needed: m,
            got: n,
        });
    }
    let mut diagnostics = Vec::new();
    let log2n = usize::BITS - 1 - n.leading_zeros();
    if m + 2 >= log2n as usize {
        diagnostics.push(format!(
            "m = {m} not below floor(log2 n) - 2 = {}",
            log2n as i64 - 2
        ));
    }
    let psi_m = psi_squared(seq, m);
    let psi_m1 = psi_squared(seq, m - 1);
    let psi_m2 = psi_squared(seq, m - 2);
    // Rounding can push exact zeros slightly negative.
    let del1 = (psi_m - psi_m1).max(0.0);
    let del2 = (psi_m - 2.0 * psi_m1 + psi_m2).max(0.0);
    let p1 = igamc(2f64.powi(m as i32 - 2), del1 / 2.0)?;
    let p2 = igamc(2f64.powi(m as i32 - 3), del2 / 2.0)?;
    diagnostics.push(format!("psi2: m={psi_m:.6}, m-1={psi_m1:.6}, m-2={psi_m2:.6}"));
    TestResult::from_p_values(TestKind::Serial, vec![p1, p2], del1, n, diagnostics)
}
