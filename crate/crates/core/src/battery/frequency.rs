use super::{warn_if_short, TestKind, TestResult};
use crate::battery::constants::MONOBIT_MIN_BITS;
use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::numeric::{erfc, igamc};

/// Frequency (monobit) test.
pub fn monobit(seq: &BitSequence) -> Result<TestResult> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::TooShort {
            what: "monobit",
            needed: 1,
            got: 0,
        });
    }
    let mut diagnostics = Vec::new();
    warn_if_short(&mut diagnostics, n, MONOBIT_MIN_BITS);
    let sum = 2 * seq.ones() as i64 - n as i64;
    let s_obs = sum.unsigned_abs() as f64 / (n as f64).sqrt();
    let p = erfc(s_obs / std::f64::consts::SQRT_2);
    TestResult::from_p_values(TestKind::Monobit, vec![p], s_obs, n, diagnostics)
}

/// Frequency within blocks of `block_len` bits; trailing bits are discarded.
pub fn block_frequency(seq: &BitSequence, block_len: usize) -> Result<TestResult> {
    if block_len < 2 {
        return Err(Error::InvalidParameter(format!(
            "block frequency needs M >= 2, got {block_len}"
        )));
    }
    let n = seq.len();
    if n < block_len {
        return Err(Error::TooShort {
            what: "block_frequency",
            needed: block_len,
            got: n,
        });
    }
    let blocks = n / block_len;
    let deviation: f64 = seq
        .as_slice()
        .chunks_exact(block_len)
        .map(|block| {
            let ones = block.iter().filter(|&&b| b == 1).count();
            let pi = ones as f64 / block_len as f64 - 0.5;
            pi * pi
        })
        .sum();
    let chi2 = 4.0 * block_len as f64 * deviation;
    let p = igamc(blocks as f64 / 2.0, chi2 / 2.0)?;
    TestResult::from_p_values(TestKind::BlockFrequency, vec![p], chi2, blocks * block_len, Vec::new())
}
