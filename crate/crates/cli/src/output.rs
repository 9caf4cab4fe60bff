use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// File-name-safe version of a label.
pub fn slug(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c.to_ascii_lowercase() } else { '_' })
        .collect();
    let s = s.trim_matches('_').to_owned();
    if s.is_empty() {
        "source".into()
    } else {
        s
    }
}

/// Slugs for `labels`, suffixed with a counter where they would collide.
pub fn unique_slugs<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    labels
        .into_iter()
        .map(|l| {
            let base = slug(l);
            let mut candidate = base.clone();
            let mut k = 2;
            while !seen.insert(candidate.clone()) {
                candidate = format!("{base}_{k}");
                k += 1;
            }
            candidate
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValueCount {
    pub value: u64,
    pub count: u64,
}

pub fn histogram(values: &[u64]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for &v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}

/// `value,count` rows in ascending value order.
pub fn histogram_csv(h: &BTreeMap<u64, u64>) -> String {
    let mut out = String::from("value,count\n");
    for (v, c) in h {
        out.push_str(&format!("{v},{c}\n"));
    }
    out
}

/// Most frequent values; ties go to the smaller value.
pub fn top_values(h: &BTreeMap<u64, u64>, k: usize) -> Vec<ValueCount> {
    let mut all: Vec<ValueCount> = h.iter().map(|(&value, &count)| ValueCount { value, count }).collect();
    all.sort_by(|a, b| b.count.cmp(&a.count).then(a.value.cmp(&b.value)));
    all.truncate(k);
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("OS entropy [synthetic]"), "os_entropy__synthetic");
        assert_eq!(unique_slugs(["a b", "a_b", "x"]), vec!["a_b", "a_b_2", "x"]);
        assert_eq!(slug("***"), "source");
    }

    #[test]
    fn histogram_rows_and_top_values() {
        let h = histogram(&[5, 3, 5, 9, 3, 1]);
        assert_eq!(histogram_csv(&h), "value,count\n1,1\n3,2\n5,2\n9,1\n");
        let top = top_values(&h, 3);
        assert_eq!(top.iter().map(|v| v.value).collect::<Vec<_>>(), vec![3, 5, 1]);
    }
}
