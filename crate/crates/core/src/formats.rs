//! Input file formats for integer transcripts and password corpora.
//!
//! Integers may arrive as newline-delimited decimals, a JSON array, or a
//! single-column CSV. Strict parsing rejects anything else; lenient parsing
//! takes every maximal run of ASCII digits, which recovers numbers wrapped in
//! prose, list markers or code fences.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Lines,
    Json,
    Csv,
    Passwords,
}

impl InputFormat {
    /// `.json` and `.csv` map to their formats; anything else is read as lines.
    pub fn sniff(path: &Path) -> InputFormat {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("json") => InputFormat::Json,
            Some("csv") => InputFormat::Csv,
            Some("pw") | Some("pwd") | Some("passwords") => InputFormat::Passwords,
            _ => InputFormat::Lines,
        }
    }
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" | "txt" => Ok(InputFormat::Lines),
            "json" => Ok(InputFormat::Json),
            "csv" => Ok(InputFormat::Csv),
            "passwords" => Ok(InputFormat::Passwords),
            other => Err(Error::Parse(format!("unknown input format {other:?}"))),
        }
    }
}

/// Outcome of lenient extraction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub values: Vec<u64>,
    /// Digit runs that exceeded the declared maximum (or did not fit in u64).
    pub dropped_over_max: usize,
}

/// Every maximal run of ASCII digits becomes a candidate; runs above `max`
/// are dropped and counted.
pub fn extract_digit_runs(text: &str, max: u64) -> Extraction {
    let mut out = Extraction::default();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        match text[start..i].parse::<u64>() {
            Ok(v) if v <= max => out.values.push(v),
            _ => out.dropped_over_max += 1,
        }
    }
    out
}

/// Strict parse of an integer file in the given format.
pub fn parse_integers_strict(text: &str, format: InputFormat) -> Result<Vec<u64>> {
    match format {
        InputFormat::Json => {
            let values: Vec<u64> = serde_json::from_str(text)?;
            Ok(values)
        }
        InputFormat::Lines => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
            })
            .collect(),
        InputFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .flexible(true)
                .from_reader(text.as_bytes());
            let mut values = Vec::new();
            for (i, record) in reader.records().enumerate() {
                let record = record.map_err(|e| Error::Parse(e.to_string()))?;
                let field = record.get(0).unwrap_or("").trim();
                if field.is_empty() {
                    continue;
                }
                match field.parse::<u64>() {
                    Ok(v) => values.push(v),
                    // a single non-numeric header row is tolerated
                    Err(_) if i == 0 => {}
                    Err(e) => return Err(Error::Parse(format!("row {}: {e}", i + 1))),
                }
            }
            Ok(values)
        }
        InputFormat::Passwords => Err(Error::Parse(
            "password corpora do not contain integers".into(),
        )),
    }
}

/// Newline-delimited passwords; blank lines and a trailing `\r` are ignored.
pub fn parse_passwords(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lenient_prose() {
        let ex = extract_digit_runs("Here are your numbers: 12, 7, and 255.", 255);
        assert_eq!(ex.values, vec![12, 7, 255]);
        assert_eq!(ex.dropped_over_max, 0);
    }

    #[test]
    fn lenient_code_literal_dropped() {
        let text = "```python\nfor i in range(1000):\n    print(random.randint(0, 255))\n```\n4 9";
        let ex = extract_digit_runs(text, 255);
        assert_eq!(ex.values, vec![0, 255, 4, 9]);
        assert_eq!(ex.dropped_over_max, 1);
    }

    #[test]
    fn lenient_huge_run() {
        let ex = extract_digit_runs("99999999999999999999999 3", 255);
        assert_eq!(ex.values, vec![3]);
        assert_eq!(ex.dropped_over_max, 1);
    }

    #[test]
    fn strict_formats() {
        assert_eq!(parse_integers_strict("[3,1,4,1,5]", InputFormat::Json).unwrap(), vec![3, 1, 4, 1, 5]);
        assert_eq!(parse_integers_strict("1\n2\n\n3\n", InputFormat::Lines).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_integers_strict("value\n7\n8\n", InputFormat::Csv).unwrap(), vec![7, 8]);
        assert!(parse_integers_strict("1\nx\n", InputFormat::Lines).is_err());
        assert!(parse_integers_strict("1\nx\n", InputFormat::Csv).is_err());
        assert!(parse_integers_strict("[1, -2]", InputFormat::Json).is_err());
    }

    #[test]
    fn sniffing() {
        assert_eq!(InputFormat::sniff(Path::new("a.JSON")), InputFormat::Json);
        assert_eq!(InputFormat::sniff(Path::new("a.csv")), InputFormat::Csv);
        assert_eq!(InputFormat::sniff(Path::new("a.txt")), InputFormat::Lines);
        assert_eq!(InputFormat::sniff(Path::new("a")), InputFormat::Lines);
        assert_eq!("json".parse::<InputFormat>().unwrap(), InputFormat::Json);
    }

    #[test]
    fn passwords() {
        assert_eq!(parse_passwords("ab\r\n\ncd\n"), vec!["ab", "cd"]);
    }
}
