//! Character-level analysis of generated passwords: per-character
//! frequencies against a declared alphabet, repeated substrings shared
//! between passwords, and exact duplicates.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bits::{from_text, BitSequence};
use crate::error::{Error, Result};
use crate::numeric::igamc;
use crate::par::Execution;
use crate::verdict::{classify, Verdict};

pub const DEFAULT_SPECIALS: &str = "!@#$%^&*()-_";
/// Minimum expected count per χ² cell before characters are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

/// Ordered set of permitted characters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Alphabet(String);

impl Alphabet {
    pub fn new(chars: &str) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let unique: String = chars.chars().filter(|c| seen.insert(*c)).collect();
        if unique.chars().count() < 2 {
            return Err(Error::InvalidParameter("alphabet needs at least two characters".into()));
        }
        Ok(Alphabet(unique))
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.0.chars()
    }

    pub fn len(&self) -> usize {
        self.0.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.0.contains(c)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Default for Alphabet {
    /// Upper and lower case letters, digits and `!@#$%^&*()-_`.
    fn default() -> Self {
        let mut s: String = ('A'..='Z').chain('a'..='z').chain('0'..='9').collect();
        s.push_str(DEFAULT_SPECIALS);
        Alphabet(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PasswordCorpus {
    pub passwords: Vec<String>,
    pub alphabet: Alphabet,
}

impl PasswordCorpus {
    pub fn new(passwords: Vec<String>, alphabet: Alphabet) -> Self {
        PasswordCorpus { passwords, alphabet }
    }

    pub fn total_chars(&self) -> usize {
        self.passwords.iter().map(|p| p.chars().count()).sum()
    }

    /// (password index, character) for every character outside the alphabet.
    pub fn violations(&self) -> Vec<(usize, char)> {
        self.passwords
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.chars().filter(|c| !self.alphabet.contains(*c)).map(move |c| (i, c)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub alphabet: Alphabet,
    pub counts: BTreeMap<char, u64>,
    /// Characters outside the alphabet; excluded from the uniformity test.
    pub other: u64,
    pub other_chars: BTreeMap<char, u64>,
    pub total: u64,
    pub chi2: f64,
    pub degrees_of_freedom: usize,
    pub p: f64,
    pub verdict: Verdict,
    /// Number of pooled cells when expected counts were below the minimum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pooled_cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn tally(passwords: &[String], exec: Execution) -> HashMap<char, u64> {
    exec.fold_chunks(
        passwords,
        256,
        HashMap::new(),
        |mut acc, chunk| {
            for c in chunk.iter().flat_map(|p| p.chars()) {
                *acc.entry(c).or_insert(0) += 1;
            }
            acc
        },
        |mut a, b| {
            for (c, k) in b {
                *a.entry(c).or_insert(0) += k;
            }
            a
        },
    )
}

/// Character counts and a χ² test of uniformity over the alphabet.
///
/// When the expected count per character is below [`MIN_EXPECTED`], adjacent
/// alphabet characters are pooled into cells that reach it. If fewer than two
/// such cells can be formed the unpooled statistic is reported with a warning.
pub fn char_frequency(corpus: &PasswordCorpus, exec: Execution) -> Result<FrequencyReport> {
    if corpus.passwords.is_empty() {
        return Err(Error::Empty("password corpus".into()));
    }
    let raw = tally(&corpus.passwords, exec);
    let total: u64 = raw.values().sum();
    let counts: BTreeMap<char, u64> = corpus
        .alphabet
        .chars()
        .map(|c| (c, raw.get(&c).copied().unwrap_or(0)))
        .collect();
    let other_chars: BTreeMap<char, u64> = raw
        .iter()
        .filter(|(c, _)| !corpus.alphabet.contains(**c))
        .map(|(&c, &k)| (c, k))
        .collect();
    let other: u64 = other_chars.values().sum();
    let in_alphabet = total - other;
    if in_alphabet == 0 {
        return Err(Error::Empty("characters from the declared alphabet".into()));
    }

    let mut warnings = Vec::new();
    if other > 0 {
        warnings.push(format!("{other} characters outside the declared alphabet"));
    }
    let k = corpus.alphabet.len();
    let ordered: Vec<u64> = corpus.alphabet.chars().map(|c| counts[&c]).collect();
    let expected_each = in_alphabet as f64 / k as f64;
    let mut cell_size = 1;
    let mut pooled_cells = None;
    if expected_each < MIN_EXPECTED {
        let size = (MIN_EXPECTED / expected_each).ceil() as usize;
        if k / size >= 2 {
            cell_size = size;
            pooled_cells = Some(k / size);
        } else {
            warnings.push(format!(
                "expected count {expected_each:.3} per character is below {MIN_EXPECTED}; too few characters to pool"
            ));
        }
    }
    // Cells of `cell_size` consecutive characters; the last cell absorbs the remainder.
    let cells = k / cell_size;
    let mut chi2 = 0.0;
    for cell in 0..cells {
        let start = cell * cell_size;
        let end = if cell + 1 == cells { k } else { start + cell_size };
        let observed: u64 = ordered[start..end].iter().sum();
        let expected = expected_each * (end - start) as f64;
        chi2 += (observed as f64 - expected).powi(2) / expected;
    }
    let df = cells - 1;
    let p = igamc(df as f64 / 2.0, chi2 / 2.0)?;
    Ok(FrequencyReport {
        alphabet: corpus.alphabet.clone(),
        counts,
        other,
        other_chars,
        total,
        chi2,
        degrees_of_freedom: df,
        p,
        verdict: classify(p)?,
        pooled_cells,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatedSubstring {
    pub substring: String,
    /// Distinct passwords containing it.
    pub passwords: usize,
    /// Occurrences over the whole corpus, overlapping ones included.
    pub occurrences: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateGroup {
    pub password: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepeatsReport {
    pub min_len: usize,
    pub repeats: Vec<RepeatedSubstring>,
    /// Surplus copies of exact duplicates (a password seen k times adds k - 1).
    pub duplicates: usize,
    pub duplicate_groups: Vec<DuplicateGroup>,
}

#[derive(Default, Clone, Copy)]
struct Occurrence {
    docs: usize,
    last_doc: usize,
    occurrences: usize,
}

/// Substrings of at least `min_len` characters shared by two or more distinct
/// passwords, plus exact duplicate passwords.
///
/// Only closed substrings are listed: a substring is dropped when extending it
/// by one character on either side keeps it in the same number of passwords,
/// so a shared "7!Ab" is reported once rather than with all of its pieces.
/// The sweep grows substrings one character at a time and only extends those
/// already shared, so work stays proportional to the repeated material.
pub fn repeated_substring_scan(corpus: &PasswordCorpus, min_len: usize) -> Result<RepeatsReport> {
    if min_len < 2 {
        return Err(Error::InvalidParameter(format!("min_len must be at least 2, got {min_len}")));
    }
    let docs: Vec<Vec<char>> = corpus.passwords.iter().map(|p| p.chars().collect()).collect();

    // Level L maps each shared substring of length L to its statistics.
    let count_level = |len: usize, keep: &dyn Fn(&[char]) -> bool| -> HashMap<&[char], Occurrence> {
        let mut map: HashMap<&[char], Occurrence> = HashMap::new();
        for (doc_id, doc) in docs.iter().enumerate() {
            if doc.len() < len {
                continue;
            }
            for window in doc.windows(len) {
                if !keep(window) {
                    continue;
                }
                let entry = map.entry(window).or_insert(Occurrence {
                    docs: 0,
                    last_doc: usize::MAX,
                    occurrences: 0,
                });
                entry.occurrences += 1;
                if entry.last_doc != doc_id {
                    entry.last_doc = doc_id;
                    entry.docs += 1;
                }
            }
        }
        map.retain(|_, o| o.docs >= 2);
        map
    };

    let mut levels: Vec<HashMap<&[char], Occurrence>> = Vec::new();
    let first = count_level(min_len, &|_| true);
    if !first.is_empty() {
        levels.push(first);
        loop {
            let prev = levels.last().expect("nonempty");
            let len = min_len + levels.len();
            let next = count_level(len, &|w: &[char]| prev.contains_key(&w[..len - 1]) && prev.contains_key(&w[1..]));
            if next.is_empty() {
                break;
            }
            levels.push(next);
        }
    }

    let mut repeats = Vec::new();
    for (depth, level) in levels.iter().enumerate() {
        let longer = levels.get(depth + 1);
        for (&s, occ) in level {
            let absorbed = longer.is_some_and(|next| {
                next.iter()
                    .any(|(t, o)| o.docs == occ.docs && (&t[..t.len() - 1] == s || &t[1..] == s))
            });
            if !absorbed {
                repeats.push(RepeatedSubstring {
                    substring: s.iter().collect(),
                    passwords: occ.docs,
                    occurrences: occ.occurrences,
                });
            }
        }
    }
    repeats.sort_by(|a, b| {
        b.substring
            .chars()
            .count()
            .cmp(&a.substring.chars().count())
            .then(b.passwords.cmp(&a.passwords))
            .then(a.substring.cmp(&b.substring))
    });

    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for p in &corpus.passwords {
        *seen.entry(p.as_str()).or_insert(0) += 1;
    }
    let duplicate_groups: Vec<DuplicateGroup> = seen
        .into_iter()
        .filter(|(_, c)| *c > 1)
        .map(|(p, count)| DuplicateGroup {
            password: p.to_owned(),
            count,
        })
        .collect();
    let duplicates = duplicate_groups.iter().map(|g| g.count - 1).sum();

    Ok(RepeatsReport {
        min_len,
        repeats,
        duplicates,
        duplicate_groups,
    })
}

/// Bits of the corpus as 8-bit code points, ready for the battery.
pub fn corpus_to_bits(corpus: &PasswordCorpus) -> Result<BitSequence> {
    if corpus.passwords.is_empty() {
        return Err(Error::Empty("password corpus".into()));
    }
    from_text(&corpus.passwords, 8)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharEncoding {
    /// 8-bit code points. Printable ASCII never sets the top bit, so even a
    /// uniformly random corpus fails bit-level frequency tests.
    Ascii8,
    /// Alphabet index split over the binary expansion of the alphabet size.
    /// With k = 2^a + 2^b + ..., an index in the 2^a block contributes its a
    /// low bits, and so on. Uniform characters yield exactly uniform,
    /// independent bits; characters outside the alphabet are skipped.
    #[default]
    AlphabetIndex,
}

/// Corpus bits under `encoding`, with the number of characters skipped.
pub fn corpus_to_bits_with(corpus: &PasswordCorpus, encoding: CharEncoding) -> Result<(BitSequence, usize)> {
    match encoding {
        CharEncoding::Ascii8 => Ok((corpus_to_bits(corpus)?, 0)),
        CharEncoding::AlphabetIndex => {
            if corpus.passwords.is_empty() {
                return Err(Error::Empty("password corpus".into()));
            }
            let index: HashMap<char, usize> = corpus.alphabet.chars().enumerate().map(|(i, c)| (c, i)).collect();
            let k = corpus.alphabet.len();
            // (start, width) of each power-of-two block, largest first
            let mut blocks = Vec::new();
            let mut start = 0;
            for width in (0..usize::BITS).rev() {
                if k & (1 << width) != 0 {
                    blocks.push((start, width));
                    start += 1 << width;
                }
            }
            let mut bits = Vec::new();
            let mut skipped = 0;
            for c in corpus.passwords.iter().flat_map(|p| p.chars()) {
                let Some(&i) = index.get(&c) else {
                    skipped += 1;
                    continue;
                };
                let &(start, width) = blocks.iter().find(|(s, w)| i < s + (1 << w)).expect("index below k");
                let offset = i - start;
                bits.extend((0..width).rev().map(|b| ((offset >> b) & 1) as u8));
            }
            Ok((BitSequence::from_bits(bits)?, skipped))
        }
    }
}
