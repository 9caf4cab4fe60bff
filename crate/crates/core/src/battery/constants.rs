//! Reference constants for the battery, as published with the NIST
//! SP 800-22 statistical test suite. Kept in one place so they can be audited
//! against the source tables.

/// Longest-run-of-ones block configurations: (block length, lowest category
/// upper bound, category probabilities). Category `k` collects blocks whose
/// longest run is `lowest + k`; the first category also collects anything
/// shorter and the last anything longer.
pub struct LongestRunTable {
    pub block_len: usize,
    pub lowest: usize,
    pub probabilities: &'static [f64],
}

/// SP 800-22 rev1a, section 2.4.4 (M = 8, 128, 10^4).
pub const LONGEST_RUN_M8: LongestRunTable = LongestRunTable {
    block_len: 8,
    lowest: 1,
    probabilities: &[0.2148, 0.3672, 0.2305, 0.1875],
};

pub const LONGEST_RUN_M128: LongestRunTable = LongestRunTable {
    block_len: 128,
    lowest: 4,
    probabilities: &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124],
};

pub const LONGEST_RUN_M10000: LongestRunTable = LongestRunTable {
    block_len: 10_000,
    lowest: 10,
    probabilities: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
};

/// Sequences shorter than this use M = 8.
pub const LONGEST_RUN_M128_FROM: usize = 6_272;
/// Sequences at least this long use M = 10^4.
pub const LONGEST_RUN_M10000_FROM: usize = 750_000;
pub const LONGEST_RUN_MIN_BITS: usize = 128;

/// Binary matrix rank, 32 x 32 matrices: P(rank 32), P(rank 31), P(rank <= 30).
pub const RANK_ROWS: usize = 32;
pub const RANK_COLS: usize = 32;
pub const RANK_MIN_MATRICES: usize = 38;
pub const RANK_PROBABILITIES: [f64; 3] = [0.2888, 0.5776, 0.1336];

/// Linear complexity category probabilities for T <= -2.5, (-2.5, -1.5], ...,
/// (1.5, 2.5], > 2.5.
pub const LINEAR_COMPLEXITY_PROBABILITIES: [f64; 7] =
    [0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833];
pub const LINEAR_COMPLEXITY_BLOCK_RANGE: (usize, usize) = (500, 5000);
pub const LINEAR_COMPLEXITY_MIN_BLOCKS: usize = 200;

/// Spectral test: fraction of peaks expected below the 95% threshold.
pub const SPECTRAL_FRACTION: f64 = 0.95;

pub const MONOBIT_MIN_BITS: usize = 100;
pub const RUNS_MIN_BITS: usize = 100;
pub const SPECTRAL_MIN_BITS: usize = 1000;
