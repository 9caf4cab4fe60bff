use super::constants::{RANK_COLS, RANK_MIN_MATRICES, RANK_PROBABILITIES, RANK_ROWS};
use super::{chi_square, TestKind, TestResult};
use crate::bits::BitSequence;
use crate::error::{Error, Result};

/// Rank over GF(2) of a matrix given as row bitmasks (bit `j` of a row is
/// column `j`, at most 64 columns). Destroys `rows`.
pub fn gf2_rank(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for col in 0..64 {
        let mask = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & mask != 0 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Binary matrix rank test on disjoint 32x32 matrices filled row-major.
pub fn binary_rank(seq: &BitSequence) -> Result<TestResult> {
    let per_matrix = RANK_ROWS * RANK_COLS;
    let needed = per_matrix * RANK_MIN_MATRICES;
    if seq.len() < needed {
        return Err(Error::TooShort {
            what: "binary_rank",
            needed,
            got: seq.len(),
        });
    }
    let matrices = seq.len() / per_matrix;
    let mut counts = [0usize; 3];
    let mut rows = [0u64; RANK_ROWS];
    for chunk in seq.as_slice().chunks_exact(per_matrix) {
        for (row, bits) in rows.iter_mut().zip(chunk.chunks_exact(RANK_COLS)) {
            *row = bits
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j));
        }
        let rank = gf2_rank(&mut rows);
        let category = match RANK_ROWS - rank {
            0 => 0,
            1 => 1,
            _ => 2,
        };
        counts[category] += 1;
    }
    let chi2 = chi_square(&counts, &RANK_PROBABILITIES, matrices);
    let p = (-chi2 / 2.0).exp();
    let diagnostics = vec![format!(
        "{matrices} matrices: {} full rank, {} rank 31, {} lower",
        counts[0], counts[1], counts[2]
    )];
    TestResult::from_p_values(TestKind::BinaryRank, vec![p], chi2, matrices * per_matrix, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn transpose(rows: &[u64], n: usize) -> Vec<u64> {
        (0..n)
            .map(|c| (0..n).fold(0u64, |acc, r| acc | (((rows[r] >> c) & 1) << r)))
            .collect()
    }

    #[test]
    fn rank_small_matrices() {
        let mut identity: Vec<u64> = (0..32).map(|i| 1u64 << i).collect();
        assert_eq!(gf2_rank(&mut identity), 32);
        let mut zero = vec![0u64; 32];
        assert_eq!(gf2_rank(&mut zero), 0);
        let mut dup = vec![0b101, 0b101, 0b011];
        assert_eq!(gf2_rank(&mut dup), 2);
        let mut dependent = vec![0b110, 0b011, 0b101];
        assert_eq!(gf2_rank(&mut dependent), 2);
    }

    #[test]
    fn binary_rank_rejects_short_input() {
        let seq = BitSequence::from_bools((0..1024 * 37).map(|i| i % 3 == 0));
        assert!(matches!(binary_rank(&seq), Err(Error::TooShort { .. })));
    }

    #[test]
    fn constant_matrices_fail() {
        let seq = BitSequence::from_bools((0..1024 * 40).map(|_| true));
        let r = binary_rank(&seq).unwrap();
        assert!(r.p_values[0] < 1e-10);
        assert_eq!(r.n_used, 1024 * 40);
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(rows in proptest::array::uniform32(any::<u32>())) {
            let rows: Vec<u64> = rows.iter().map(|&r| r as u64).collect();
            let t = transpose(&rows, 32);
            let r1 = gf2_rank(&mut rows.clone());
            let r2 = gf2_rank(&mut t.clone());
            prop_assert_eq!(r1, r2);
            prop_assert!(r1 <= 32);
        }
    }
}
