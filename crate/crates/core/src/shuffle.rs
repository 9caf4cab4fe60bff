//! Pairwise-distance entropy of card shuffles.
//!
//! For every unordered pair of cards the histogram records how often the two
//! cards ended up `d` positions apart (d in 1..N-1). Each pair's distance
//! distribution has an entropy in base N-1, so 1.0 is the maximum; the score of
//! a set of trials is the minimum over all pairs.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formats;
use crate::par::Execution;
use crate::sources::{below, SampleSource};

pub const MIN_CARDS: usize = 3;

/// Recorded orderings of `n` labeled cards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationTrialSet {
    n: usize,
    trials: Vec<Vec<usize>>,
    source: SampleSource,
}

fn check_card_count(n: usize) -> Result<()> {
    if n < MIN_CARDS {
        return Err(Error::InvalidParameter(format!(
            "card count must be at least {MIN_CARDS} (entropy uses log base N-1), got {n}"
        )));
    }
    Ok(())
}

/// Why `trial` is not an ordering of `0..n`, if it is not.
pub fn permutation_defect(trial: &[usize], n: usize) -> Option<String> {
    if trial.len() != n {
        return Some(format!("has {} cards, expected {n}", trial.len()));
    }
    let mut seen = vec![false; n];
    for &card in trial {
        if card >= n {
            return Some(format!("label {card} out of range"));
        }
        if std::mem::replace(&mut seen[card], true) {
            return Some(format!("card {card} appears twice"));
        }
    }
    None
}

impl PermutationTrialSet {
    pub fn new(n: usize, trials: Vec<Vec<usize>>, source: SampleSource) -> Result<Self> {
        check_card_count(n)?;
        for (index, trial) in trials.iter().enumerate() {
            if let Some(reason) = permutation_defect(trial, n) {
                return Err(Error::MalformedTrial { index, n, reason });
            }
        }
        Ok(PermutationTrialSet { n, trials, source })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trials(&self) -> &[Vec<usize>] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn source(&self) -> &SampleSource {
        &self.source
    }

    /// The first `count` trials.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        if count > self.trials.len() {
            return Err(Error::InvalidParameter(format!(
                "requested {count} trials but only {} are available",
                self.trials.len()
            )));
        }
        Ok(PermutationTrialSet {
            n: self.n,
            trials: self.trials[..count].to_vec(),
            source: self.source.clone(),
        })
    }

    /// One trial per line, labels separated by commas.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for trial in &self.trials {
            let row: Vec<String> = trial.iter().map(usize::to_string).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// K[i][j][d] for unordered pairs i < j and distances d in 1..n-1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceHistogram {
    n: usize,
    trials: u64,
    counts: Vec<u64>,
}

impl DistanceHistogram {
    pub fn empty(n: usize) -> Self {
        DistanceHistogram {
            n,
            trials: 0,
            counts: vec![0; n * (n - 1) / 2 * (n - 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // pairs (0,1), (0,2), ..., (0,n-1), (1,2), ...
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    fn pair_slice(&self, pair: usize) -> &[u64] {
        let w = self.n - 1;
        &self.counts[pair * w..(pair + 1) * w]
    }

    /// Count for cards `i`, `j` (either order) at distance `d`.
    pub fn get(&self, i: usize, j: usize, d: usize) -> u64 {
        assert!(i != j && i < self.n && j < self.n && (1..self.n).contains(&d));
        self.pair_slice(self.pair_index(i, j))[d - 1]
    }

    pub fn pair_total(&self, i: usize, j: usize) -> u64 {
        self.pair_slice(self.pair_index(i, j)).iter().sum()
    }

    pub fn add_trial(&mut self, trial: &[usize]) {
        let n = self.n;
        let mut pos = vec![0usize; n];
        for (p, &card) in trial.iter().enumerate() {
            pos[card] = p;
        }
        let w = n - 1;
        let mut pair = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = pos[i].abs_diff(pos[j]);
                self.counts[pair * w + d - 1] += 1;
                pair += 1;
            }
        }
        self.trials += 1;
    }

    pub fn merge(mut self, other: &DistanceHistogram) -> Self {
        assert_eq!(self.n, other.n);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.trials += other.trials;
        self
    }
}

/// Accumulates the histogram; shards of trials are counted independently and
/// summed.
pub fn distance_histogram(set: &PermutationTrialSet, exec: Execution) -> DistanceHistogram {
    let n = set.n;
    exec.fold_chunks(
        &set.trials,
        1024,
        DistanceHistogram::empty(n),
        |mut h, chunk| {
            for trial in chunk {
                h.add_trial(trial);
            }
            h
        },
        |a, b| a.merge(&b),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyScore {
    /// Fraction of the maximum entropy, in [0, 1].
    pub h: f64,
    pub argmin_pair: (usize, usize),
}

/// Entropy of a distance distribution in base `n - 1`, with 0 log 0 = 0.
fn pair_entropy(counts: &[u64], base_ln: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    let total = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let q = c as f64 / total;
            -q * q.ln()
        })
        .sum();
    (h / base_ln).clamp(0.0, 1.0)
}

pub fn entropy_score(hist: &DistanceHistogram) -> Result<EntropyScore> {
    check_card_count(hist.n)?;
    if hist.trials == 0 {
        return Err(Error::Empty("distance histogram".into()));
    }
    let base_ln = ((hist.n - 1) as f64).ln();
    let mut best = EntropyScore {
        h: f64::INFINITY,
        argmin_pair: (0, 1),
    };
    let mut pair = 0;
    for i in 0..hist.n {
        for j in i + 1..hist.n {
            let h = pair_entropy(hist.pair_slice(pair), base_ln);
            if h < best.h {
                best = EntropyScore { h, argmin_pair: (i, j) };
            }
            pair += 1;
        }
    }
    Ok(best)
}

/// Exact distance distribution of one pair under a uniform permutation:
/// P(d) = 2(n - d) / (n(n - 1)).
pub fn uniform_distance_distribution(n: usize) -> Vec<f64> {
    let total = (n * (n - 1)) as f64;
    (1..n).map(|d| 2.0 * (n - d) as f64 / total).collect()
}

/// Entropy (fraction of maximum) of [`uniform_distance_distribution`]; the
/// large-trial limit of the score for an unbiased shuffle.
pub fn asymptotic_entropy(n: usize) -> f64 {
    let base_ln = ((n - 1) as f64).ln();
    uniform_distance_distribution(n)
        .iter()
        .map(|&q| -q * q.ln())
        .sum::<f64>()
        / base_ln
}

/// `trials` independent uniform orderings from a seeded Fisher-Yates shuffle.
pub fn uniform_shuffle_oracle(n: usize, trials: usize, seed: u64) -> Result<PermutationTrialSet> {
    check_card_count(n)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trial count must be at least 1".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let deck: Vec<usize> = (0..n).collect();
    let trials = (0..trials)
        .map(|_| {
            let mut order = deck.clone();
            for i in (1..n).rev() {
                let j = below(&mut rng, i as u64) as usize;
                order.swap(i, j);
            }
            order
        })
        .collect();
    Ok(PermutationTrialSet {
        n,
        trials,
        source: SampleSource::new(
            format!("uniform_oracle_seed_{seed}"),
            crate::sources::SourceKind::SeededDeterministic { seed },
        ),
    })
}

/// Supplies trial sets to a convergence sweep.
pub trait TrialProvider: Sync {
    /// `count` trials of `n` cards. `stream` distinguishes independent batches
    /// for providers that can generate them; others may ignore it.
    fn trials(&self, n: usize, count: usize, stream: u64) -> Result<PermutationTrialSet>;
}

#[derive(Debug, Clone, Copy)]
pub struct OracleProvider {
    pub seed: u64,
}

impl TrialProvider for OracleProvider {
    fn trials(&self, n: usize, count: usize, stream: u64) -> Result<PermutationTrialSet> {
        let seed = if stream == 0 {
            self.seed
        } else {
            self.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        };
        uniform_shuffle_oracle(n, count, seed)
    }
}

/// Serves prefixes of a recorded trial set.
impl TrialProvider for PermutationTrialSet {
    fn trials(&self, n: usize, count: usize, _stream: u64) -> Result<PermutationTrialSet> {
        if n != self.n {
            return Err(Error::InvalidParameter(format!(
                "trial set has {} cards, sweep expects {n}",
                self.n
            )));
        }
        self.prefix(count)
    }
}

/// Every trial is the identity ordering.
#[derive(Debug, Clone, Copy)]
pub struct ConstantProvider;

impl TrialProvider for ConstantProvider {
    fn trials(&self, n: usize, count: usize, _stream: u64) -> Result<PermutationTrialSet> {
        PermutationTrialSet::new(n, vec![(0..n).collect(); count], SampleSource::inline("constant"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Each row scores the first `rounds` trials of one stream.
    #[default]
    Cumulative,
    /// Each row scores its own independent batch.
    Fresh,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub rounds: usize,
    pub h: f64,
}

/// Entropy score at each trial count in `round_counts` (ascending).
pub fn convergence_sweep(
    n: usize,
    round_counts: &[usize],
    provider: &dyn TrialProvider,
    mode: SweepMode,
) -> Result<Vec<SweepPoint>> {
    check_card_count(n)?;
    if round_counts.is_empty() {
        return Ok(Vec::new());
    }
    if round_counts.windows(2).any(|w| w[0] > w[1]) || round_counts[0] == 0 {
        return Err(Error::InvalidParameter(
            "round counts must be positive and ascending".into(),
        ));
    }
    match mode {
        SweepMode::Cumulative => {
            let last = *round_counts.last().expect("nonempty");
            let set = provider.trials(n, last, 0)?;
            let mut hist = DistanceHistogram::empty(n);
            let mut used = 0;
            round_counts
                .iter()
                .map(|&rounds| {
                    for trial in &set.trials[used..rounds] {
                        hist.add_trial(trial);
                    }
                    used = rounds;
                    Ok(SweepPoint {
                        rounds,
                        h: entropy_score(&hist)?.h,
                    })
                })
                .collect()
        }
        SweepMode::Fresh => round_counts
            .iter()
            .enumerate()
            .map(|(row, &rounds)| {
                let set = provider.trials(n, rounds, row as u64)?;
                let hist = distance_histogram(&set, Execution::Sequential);
                Ok(SweepPoint {
                    rounds,
                    h: entropy_score(&hist)?.h,
                })
            })
            .collect(),
    }
}

/// Mean sweep over independent oracle seeds, one sweep per seed.
pub fn mean_oracle_sweep(
    n: usize,
    round_counts: &[usize],
    seeds: &[u64],
    mode: SweepMode,
    exec: Execution,
) -> Result<Vec<SweepPoint>> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    let sweeps = exec
        .map(seeds, |&seed| convergence_sweep(n, round_counts, &OracleProvider { seed }, mode))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(round_counts
        .iter()
        .enumerate()
        .map(|(row, &rounds)| SweepPoint {
            rounds,
            h: sweeps.iter().map(|s| s[row].h).sum::<f64>() / seeds.len() as f64,
        })
        .collect())
}

/// Ingestion bookkeeping, written next to reports as a JSON sidecar.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialDiagnostics {
    /// Candidate rows rejected because they were not permutations.
    pub dropped: usize,
    /// `expected - received` when fewer trials arrived than requested.
    pub shortfall: usize,
    pub expected: Option<usize>,
    pub received: usize,
    /// Fenced code blocks skipped while reading free text.
    #[serde(default)]
    pub code_blocks: usize,
}

fn integers_in(line: &str) -> Vec<u64> {
    formats::extract_digit_runs(line, u64::MAX).values
}

/// Extracts trials from text: either a JSON array of arrays, or one trial per
/// line (CSV or free text). Lines with fewer than two integers are treated as
/// prose, fenced code blocks are skipped, and rows that are not permutations
/// are dropped and counted.
pub fn parse_trials(text: &str, n: usize, expected: Option<usize>) -> Result<(Vec<Vec<usize>>, TrialDiagnostics)> {
    check_card_count(n)?;
    let mut diag = TrialDiagnostics {
        expected,
        ..TrialDiagnostics::default()
    };
    let mut candidates: Vec<Vec<u64>> = Vec::new();
    let trimmed = text.trim_start();
    let json_rows = if trimmed.starts_with('[') {
        serde_json::from_str::<Vec<serde_json::Value>>(trimmed).ok()
    } else {
        None
    };
    if let Some(rows) = json_rows {
        for row in rows {
            match row.as_array() {
                Some(items) => {
                    let ints: Option<Vec<u64>> = items.iter().map(|v| v.as_u64()).collect();
                    match ints {
                        Some(ints) => candidates.push(ints),
                        None => diag.dropped += 1,
                    }
                }
                None => diag.dropped += 1,
            }
        }
    } else {
        let mut in_fence = false;
        for line in text.lines() {
            if line.trim_start().starts_with("```") {
                if !in_fence {
                    diag.code_blocks += 1;
                }
                in_fence = !in_fence;
                continue;
            }
            if in_fence {
                continue;
            }
            let ints = integers_in(line);
            if ints.len() >= 2 {
                candidates.push(ints);
            }
        }
    }
    let mut trials = Vec::with_capacity(candidates.len());
    for row in candidates {
        let trial: Vec<usize> = row.into_iter().map(|v| v.min(usize::MAX as u64) as usize).collect();
        if permutation_defect(&trial, n).is_none() {
            trials.push(trial);
        } else {
            diag.dropped += 1;
        }
    }
    diag.received = trials.len();
    diag.shortfall = expected.map_or(0, |e| e.saturating_sub(trials.len()));
    Ok((trials, diag))
}

/// Reads a trial file (JSON array of arrays or one trial per row), keeping
/// every valid permutation.
pub fn ingest_trials(path: &Path, n: usize, expected: Option<usize>) -> Result<(PermutationTrialSet, TrialDiagnostics)> {
    let text = formats::read_text(path)?;
    let (trials, diag) = parse_trials(&text, n, expected)?;
    if trials.is_empty() {
        return Err(Error::Empty(format!("valid trials in {}", path.display())));
    }
    let set = PermutationTrialSet::new(n, trials, SampleSource::file(path))?;
    Ok((set, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize, trials: Vec<Vec<usize>>) -> PermutationTrialSet {
        PermutationTrialSet::new(n, trials, SampleSource::inline("t")).unwrap()
    }

    #[test]
    fn identity_histogram() {
        let h = distance_histogram(&set(3, vec![vec![0, 1, 2]]), Execution::Sequential);
        assert_eq!(h.get(0, 1, 1), 1);
        assert_eq!(h.get(1, 2, 1), 1);
        assert_eq!(h.get(0, 2, 2), 1);
        assert_eq!(h.get(2, 0, 1), 0);
    }

    #[test]
    fn reversal_histogram() {
        let h = distance_histogram(&set(3, vec![vec![0, 1, 2], vec![2, 1, 0]]), Execution::Sequential);
        assert_eq!(h.get(0, 2, 2), 2);
        assert_eq!(h.pair_total(0, 1), 2);
    }

    #[test]
    fn malformed_trials_rejected() {
        let err = PermutationTrialSet::new(3, vec![vec![0, 1, 2], vec![0, 0, 2]], SampleSource::inline("t")).unwrap_err();
        assert!(matches!(err, Error::MalformedTrial { index: 1, .. }));
        assert!(PermutationTrialSet::new(3, vec![vec![0, 1]], SampleSource::inline("t")).is_err());
        assert!(PermutationTrialSet::new(3, vec![vec![0, 1, 3]], SampleSource::inline("t")).is_err());
        assert!(PermutationTrialSet::new(2, vec![vec![0, 1]], SampleSource::inline("t")).is_err());
    }

    #[test]
    fn degenerate_shuffle_scores_zero() {
        let trials = vec![vec![3, 1, 4, 0, 2]; 50];
        let h = distance_histogram(&set(5, trials), Execution::Sequential);
        assert_eq!(entropy_score(&h).unwrap().h, 0.0);
        assert!(entropy_score(&DistanceHistogram::empty(5)).is_err());
    }

    #[test]
    fn analytic_asymptote() {
        // -sum q ln q / ln 9 for q_d = 2(10-d)/90, evaluated by hand-independent summation
        let q: Vec<f64> = (1..10).map(|d| (10 - d) as f64 / 45.0).collect();
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let direct = -q.iter().map(|x| x * x.ln()).sum::<f64>() / 9f64.ln();
        assert!((asymptotic_entropy(10) - direct).abs() < 1e-15);
        assert!((asymptotic_entropy(10) - 0.93292).abs() < 1e-5);
    }

    #[test]
    fn exact_distribution_scores_asymptote() {
        // 45 trials per pair-distance unit: build counts proportional to 2(10-d)
        let mut h = DistanceHistogram::empty(10);
        for pair in 0..45 {
            for d in 1..10 {
                h.counts[pair * 9 + d - 1] = 2 * (10 - d) as u64;
            }
        }
        h.trials = 90;
        let s = entropy_score(&h).unwrap();
        assert!((s.h - 0.9330).abs() < 1e-4);
    }

    #[test]
    fn oracle_is_uniform_on_three_cards() {
        let trials = uniform_shuffle_oracle(3, 6000, 17).unwrap();
        let mut counts = std::collections::HashMap::new();
        for t in trials.trials() {
            *counts.entry(t.clone()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        // sd = sqrt(6000 * 1/6 * 5/6) = 28.87
        for &c in counts.values() {
            assert!((c as f64 - 1000.0).abs() <= 3.0 * 28.87, "{c}");
        }
    }

    #[test]
    fn oracle_distance_frequencies_match_closed_form() {
        let trials = uniform_shuffle_oracle(10, 10_000, 99).unwrap();
        let h = distance_histogram(&trials, Execution::default());
        let q = uniform_distance_distribution(10);
        for i in 0..10 {
            for j in i + 1..10 {
                for d in 1..10 {
                    let p = q[d - 1];
                    let sd = (10_000.0 * p * (1.0 - p)).sqrt();
                    let dev = (h.get(i, j, d) as f64 - 10_000.0 * p).abs();
                    // 45 * 9 cells; 4 sd keeps the family-wise false alarm rate low
                    assert!(dev <= 4.0 * sd, "pair ({i},{j}) d={d}: {}", h.get(i, j, d));
                }
            }
        }
    }

    #[test]
    fn oracle_determinism_and_errors() {
        assert_eq!(uniform_shuffle_oracle(10, 50, 1).unwrap(), uniform_shuffle_oracle(10, 50, 1).unwrap());
        assert_ne!(uniform_shuffle_oracle(10, 50, 1).unwrap(), uniform_shuffle_oracle(10, 50, 2).unwrap());
        assert!(uniform_shuffle_oracle(2, 10, 1).is_err());
        assert!(uniform_shuffle_oracle(10, 0, 1).is_err());
    }

    #[test]
    fn oracle_128_trials_in_range() {
        let trials = uniform_shuffle_oracle(10, 128, 2024).unwrap();
        let h = entropy_score(&distance_histogram(&trials, Execution::Sequential)).unwrap().h;
        assert!((0.84..=0.90).contains(&h), "{h}");
    }

    #[test]
    fn sweep_providers() {
        let rounds = [128, 256, 512];
        let constant = convergence_sweep(10, &rounds, &ConstantProvider, SweepMode::Cumulative).unwrap();
        assert!(constant.iter().all(|p| p.h == 0.0));

        let oracle = OracleProvider { seed: 5 };
        let a = convergence_sweep(10, &rounds, &oracle, SweepMode::Cumulative).unwrap();
        let recorded = uniform_shuffle_oracle(10, 512, 5).unwrap();
        let b = convergence_sweep(10, &rounds, &recorded, SweepMode::Cumulative).unwrap();
        assert_eq!(a, b);

        let fresh = convergence_sweep(10, &rounds, &oracle, SweepMode::Fresh).unwrap();
        assert_eq!(fresh[0], a[0]);
        assert_ne!(fresh[2], a[2]);

        assert!(convergence_sweep(10, &[256, 128], &oracle, SweepMode::Cumulative).is_err());
        assert!(convergence_sweep(10, &[1024], &recorded, SweepMode::Cumulative).is_err());
        assert!(convergence_sweep(2, &[10], &oracle, SweepMode::Cumulative).is_err());
    }

    #[test]
    fn parse_trial_text() {
        let text = "Sure! Here are the shuffles:\n1. 3,1,2,0\n2. 0 1 2 3\n```python\nrandom.shuffle(deck)\nfor i in range(0, 4):\n```\n3. 0,0,1,2\n";
        let (trials, diag) = parse_trials(text, 4, Some(10)).unwrap();
        // "1." and "2." prefixes are digit runs too, so those rows are 5 long
        assert_eq!(trials.len(), 0);
        assert_eq!(diag.dropped, 3);
        assert_eq!(diag.code_blocks, 1);
        assert_eq!(diag.shortfall, 10);

        let (trials, diag) = parse_trials("3,1,2,0\n0 1 2 3\n0,0,1,2\n", 4, Some(3)).unwrap();
        assert_eq!(trials, vec![vec![3, 1, 2, 0], vec![0, 1, 2, 3]]);
        assert_eq!((diag.dropped, diag.received, diag.shortfall), (1, 2, 1));

        let (trials, diag) = parse_trials("[[2,0,1],[0,1,1],[1,0,2],\"x\"]", 3, None).unwrap();
        assert_eq!(trials.len(), 2);
        assert_eq!(diag.dropped, 2);
        assert_eq!(diag.expected, None);
    }

    #[test]
    fn ingest_files() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("trials.csv");
        let oracle = uniform_shuffle_oracle(10, 2048, 8).unwrap();
        std::fs::write(&good, oracle.to_csv()).unwrap();
        let (set, diag) = ingest_trials(&good, 10, Some(2048)).unwrap();
        assert_eq!(set.len(), 2048);
        assert_eq!((diag.dropped, diag.shortfall), (0, 0));
        assert_eq!(set.trials(), oracle.trials());

        let dup = dir.path().join("dup.csv");
        std::fs::write(&dup, "0,1,2\n0,0,2\n2,1,0\n").unwrap();
        let (set, diag) = ingest_trials(&dup, 3, None).unwrap();
        assert_eq!((set.len(), diag.dropped), (2, 1));

        let short = dir.path().join("short.json");
        let fifty = serde_json::to_string(&oracle.prefix(50).unwrap().trials()).unwrap();
        std::fs::write(&short, fifty).unwrap();
        let (set, diag) = ingest_trials(&short, 10, Some(1000)).unwrap();
        assert_eq!(set.len(), 50);
        assert_eq!(diag.shortfall, 950);
        let sidecar = serde_json::to_value(diag).unwrap();
        for key in ["dropped", "shortfall", "expected", "received"] {
            assert!(sidecar.get(key).is_some());
        }

        let none = dir.path().join("none.txt");
        std::fs::write(&none, "I cannot shuffle cards.").unwrap();
        assert!(matches!(ingest_trials(&none, 10, None), Err(Error::Empty(_))));
    }

    fn arb_trials() -> impl Strategy<Value = (usize, Vec<Vec<usize>>)> {
        (3usize..9).prop_flat_map(|n| {
            let perm = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            (Just(n), proptest::collection::vec(perm, 1..40))
        })
    }

    proptest! {
        #[test]
        fn histogram_mass_and_bounds((n, trials) in arb_trials()) {
            let s = set(n, trials.clone());
            let seq = distance_histogram(&s, Execution::Sequential);
            let par = distance_histogram(&s, Execution::Parallel);
            prop_assert_eq!(&seq, &par);
            for i in 0..n {
                for j in i + 1..n {
                    prop_assert_eq!(seq.pair_total(i, j), trials.len() as u64);
                }
            }
            let h = entropy_score(&seq).unwrap().h;
            prop_assert!((0.0..=1.0).contains(&h));
        }

        #[test]
        fn relabeling_and_reversal_invariance((n, trials) in arb_trials(), seed in any::<u64>()) {
            let base = entropy_score(&distance_histogram(&set(n, trials.clone()), Execution::Sequential)).unwrap().h;
            let relabel = uniform_shuffle_oracle(n, 1, seed).unwrap().trials()[0].clone();
            let relabeled: Vec<Vec<usize>> = trials.iter().map(|t| t.iter().map(|&c| relabel[c]).collect()).collect();
            let h2 = entropy_score(&distance_histogram(&set(n, relabeled), Execution::Sequential)).unwrap().h;
            prop_assert!((base - h2).abs() < 1e-12);
            let reversed: Vec<Vec<usize>> = trials.iter().map(|t| t.iter().rev().copied().collect()).collect();
            let hr = distance_histogram(&set(n, reversed), Execution::Sequential);
            prop_assert_eq!(hr, distance_histogram(&set(n, trials), Execution::Sequential));
        }
    }
}
