//! Slow, obviously-correct reference computations used to cross-check the
//! optimised implementations in `entropybench-core`.

use std::collections::{BTreeMap, BTreeSet};

/// Shortest LFSR generating `bits`, by trying every connection polynomial of
/// every length in increasing order. Only practical for `bits.len() <= 20`.
pub fn exhaustive_linear_complexity(bits: &[u8]) -> usize {
    let n = bits.len();
    for len in 0..n {
        for taps in 0u32..(1 << len) {
            let generates = (len..n).all(|i| {
                let mut acc = 0;
                for j in 1..=len {
                    if taps >> (j - 1) & 1 == 1 {
                        acc ^= bits[i - j];
                    }
                }
                acc == bits[i]
            });
            if generates {
                return len;
            }
        }
    }
    n
}

/// Transpose of a `rows x cols` matrix stored as row bitmasks.
pub fn transpose(rows: &[u64], cols: usize) -> Vec<u64> {
    (0..cols)
        .map(|c| {
            rows.iter()
                .enumerate()
                .filter(|(_, row)| *row >> c & 1 == 1)
                .fold(0u64, |acc, (r, _)| acc | 1 << r)
        })
        .collect()
}

/// |X_k| for every k by the defining O(n^2) sum.
pub fn naive_dft_moduli(signal: &[f64]) -> Vec<f64> {
    let n = signal.len();
    (0..n)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (j, x) in signal.iter().enumerate() {
                let t = -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
                re += x * t.cos();
                im += x * t.sin();
            }
            re.hypot(im)
        })
        .collect()
}

/// Closed repeated substrings as `(substring, passwords, occurrences)`.
///
/// Every substring of every password is enumerated. A substring is kept when
/// it is at least `min_len` long, appears in two or more passwords, and no
/// one-character extension on either side appears in as many passwords.
pub fn naive_repeats(passwords: &[String], min_len: usize) -> BTreeSet<(String, usize, usize)> {
    let mut docs: BTreeMap<Vec<char>, BTreeSet<usize>> = BTreeMap::new();
    let mut occurrences: BTreeMap<Vec<char>, usize> = BTreeMap::new();
    for (i, p) in passwords.iter().enumerate() {
        let cs: Vec<char> = p.chars().collect();
        for a in 0..cs.len() {
            for b in a + 1..=cs.len() {
                docs.entry(cs[a..b].to_vec()).or_default().insert(i);
                *occurrences.entry(cs[a..b].to_vec()).or_default() += 1;
            }
        }
    }
    let shared = |s: &[char]| docs.get(s).map_or(0, |d| d.len());
    let symbols: BTreeSet<char> = passwords.iter().flat_map(|p| p.chars()).collect();
    docs.iter()
        .filter(|(s, d)| s.len() >= min_len && d.len() >= 2)
        .filter(|(s, d)| {
            symbols.iter().all(|&c| {
                let mut left = vec![c];
                left.extend_from_slice(s);
                let mut right = s.to_vec();
                right.push(c);
                shared(&left) != d.len() && shared(&right) != d.len()
            })
        })
        .map(|(s, d)| (s.iter().collect(), d.len(), occurrences[s]))
        .collect()
}
