use super::constants::{LINEAR_COMPLEXITY_BLOCK_RANGE, LINEAR_COMPLEXITY_MIN_BLOCKS, LINEAR_COMPLEXITY_PROBABILITIES};
use super::{chi_square, TestKind, TestResult};
use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::numeric::igamc;

/// Packed bit vector with the word-level operations Berlekamp-Massey needs.
#[derive(Clone)]
struct Poly {
    words: Vec<u64>,
}

impl Poly {
    fn unit(len: usize) -> Self {
        let mut words = vec![0u64; len.div_ceil(64) + 1];
        words[0] = 1;
        Poly { words }
    }

    /// self ^= other << shift, truncated to capacity.
    fn xor_shifted(&mut self, other: &Poly, shift: usize) {
        let (word_shift, bit_shift) = (shift / 64, shift % 64);
        let cap = self.words.len();
        for (i, &w) in other.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let lo = i + word_shift;
            if lo >= cap {
                break;
            }
            self.words[lo] ^= w << bit_shift;
            if bit_shift != 0 && lo + 1 < cap {
                self.words[lo + 1] ^= w >> (64 - bit_shift);
            }
        }
    }
}

/// Length of the shortest LFSR that generates `bits` (each 0 or 1).
pub fn berlekamp_massey(bits: &[u8]) -> usize {
    let n = bits.len();
    if n == 0 {
        return 0;
    }
    // reversed[j] = bits[n - 1 - j], packed; the discrepancy at step t is the
    // parity of C & reversed >> (n - 1 - t).
    let mut reversed = vec![0u64; n.div_ceil(64) + 2];
    for (j, &b) in bits.iter().rev().enumerate() {
        reversed[j / 64] |= (b as u64) << (j % 64);
    }
    let window = |offset: usize, k: usize| -> u64 {
        let (w, s) = ((offset / 64) + k, offset % 64);
        let lo = reversed.get(w).copied().unwrap_or(0) >> s;
        let hi = if s == 0 {
            0
        } else {
            reversed.get(w + 1).copied().unwrap_or(0) << (64 - s)
        };
        lo | hi
    };

    let mut c = Poly::unit(n + 1);
    let mut b = Poly::unit(n + 1);
    let mut l = 0usize;
    let mut m: isize = -1;
    for t in 0..n {
        let offset = n - 1 - t;
        let words = (l + 1).div_ceil(64);
        let mut acc = 0u64;
        for k in 0..words {
            let mut cw = c.words[k];
            if k == words - 1 && (l + 1) % 64 != 0 {
                cw &= (1u64 << ((l + 1) % 64)) - 1;
            }
            acc ^= cw & window(offset, k);
        }
        if acc.count_ones() % 2 == 1 {
            let previous = c.clone();
            c.xor_shifted(&b, (t as isize - m) as usize);
            if 2 * l <= t {
                l = t + 1 - l;
                m = t as isize;
                b = previous;
            }
        }
    }
    l
}

fn expected_complexity(block_len: usize) -> f64 {
    let m = block_len as f64;
    let sign = if block_len % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^(M+1)
    m / 2.0 + (9.0 + sign) / 36.0 - (m / 3.0 + 2.0 / 9.0) / 2f64.powf(m)
}

fn category(t: f64) -> usize {
    const EDGES: [f64; 6] = [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5];
    EDGES.iter().position(|&e| t <= e).unwrap_or(EDGES.len())
}

/// Linear complexity test over blocks of `block_len` bits.
pub fn linear_complexity(seq: &BitSequence, block_len: usize) -> Result<TestResult> {
    let (lo, hi) = LINEAR_COMPLEXITY_BLOCK_RANGE;
    if !(lo..=hi).contains(&block_len) {
        return Err(Error::InvalidParameter(format!(
            "linear complexity block length must be in [{lo}, {hi}], got {block_len}"
        )));
    }
    if seq.len() < block_len {
        return Err(Error::TooShort {
            what: "linear_complexity",
            needed: block_len,
            got: seq.len(),
        });
    }
    let blocks = seq.len() / block_len;
    let mut diagnostics = Vec::new();
    if blocks < LINEAR_COMPLEXITY_MIN_BLOCKS {
        diagnostics.push(format!(
            "{blocks} blocks below recommended minimum {LINEAR_COMPLEXITY_MIN_BLOCKS}"
        ));
    }
    let mu = expected_complexity(block_len);
    let parity = if block_len % 2 == 0 { 1.0 } else { -1.0 }; // (-1)^M
    let mut counts = [0usize; 7];
    for block in seq.as_slice().chunks_exact(block_len) {
        let l = berlekamp_massey(block) as f64;
        let t = parity * (l - mu) + 2.0 / 9.0;
        counts[category(t)] += 1;
    }
    let chi2 = chi_square(&counts, &LINEAR_COMPLEXITY_PROBABILITIES, blocks);
    let p = igamc(3.0, chi2 / 2.0)?;
    TestResult::from_p_values(TestKind::LinearComplexity, vec![p], chi2, blocks * block_len, diagnostics)
}
