use super::constants::{
    LongestRunTable, LONGEST_RUN_M10000, LONGEST_RUN_M10000_FROM, LONGEST_RUN_M128, LONGEST_RUN_M128_FROM,
    LONGEST_RUN_M8, LONGEST_RUN_MIN_BITS, RUNS_MIN_BITS,
};
use super::{chi_square, warn_if_short, TestKind, TestResult};
use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::numeric::{erfc, igamc};

/// Runs test. When the ones-fraction fails the frequency prerequisite
/// (|pi - 1/2| >= 2/sqrt(n)) the result is p = 0 with a diagnostic instead of
/// an error, so grossly biased inputs still get scored.
pub fn runs(seq: &BitSequence) -> Result<TestResult> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::TooShort {
            what: "runs",
            needed: 1,
            got: 0,
        });
    }
    let mut diagnostics = Vec::new();
    warn_if_short(&mut diagnostics, n, RUNS_MIN_BITS);
    let bits = seq.as_slice();
    let pi = seq.ones() as f64 / n as f64;
    let v_obs = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let tau = 2.0 / (n as f64).sqrt();
    if (pi - 0.5).abs() >= tau {
        diagnostics.push(format!(
            "frequency prerequisite failed: |pi - 1/2| = {:.6} >= {:.6}",
            (pi - 0.5).abs(),
            tau
        ));
        return TestResult::from_p_values(TestKind::Runs, vec![0.0], v_obs as f64, n, diagnostics);
    }
    let nf = n as f64;
    let spread = pi * (1.0 - pi);
    let p = erfc((v_obs as f64 - 2.0 * nf * spread).abs() / (2.0 * (2.0 * nf).sqrt() * spread));
    TestResult::from_p_values(TestKind::Runs, vec![p], v_obs as f64, n, diagnostics)
}

fn longest_run_table(n: usize) -> &'static LongestRunTable {
    if n < LONGEST_RUN_M128_FROM {
        &LONGEST_RUN_M8
    } else if n < LONGEST_RUN_M10000_FROM {
        &LONGEST_RUN_M128
    } else {
        &LONGEST_RUN_M10000
    }
}

fn longest_run(block: &[u8]) -> usize {
    let mut best = 0;
    let mut current = 0;
    for &b in block {
        if b == 1 {
            current += 1;
            best = best.max(current);
        } else {
            current = 0;
        }
    }
    best
}

/// Longest run of ones within blocks.
pub fn longest_run_of_ones(seq: &BitSequence) -> Result<TestResult> {
    let n = seq.len();
    if n < LONGEST_RUN_MIN_BITS {
        return Err(Error::TooShort {
            what: "longest_run_of_ones",
            needed: LONGEST_RUN_MIN_BITS,
            got: n,
        });
    }
    let table = longest_run_table(n);
    let k = table.probabilities.len() - 1;
    let mut counts = vec![0usize; k + 1];
    let blocks = n / table.block_len;
    for block in seq.as_slice().chunks_exact(table.block_len) {
        let run = longest_run(block);
        let category = run.saturating_sub(table.lowest).min(k);
        counts[category] += 1;
    }
    let chi2 = chi_square(&counts, table.probabilities, blocks);
    let p = igamc(k as f64 / 2.0, chi2 / 2.0)?;
    let diagnostics = vec![format!("block length {}, {} blocks", table.block_len, blocks)];
    TestResult::from_p_values(
        TestKind::LongestRunOfOnes,
        vec![p],
        chi2,
        blocks * table.block_len,
        diagnostics,
    )
}
