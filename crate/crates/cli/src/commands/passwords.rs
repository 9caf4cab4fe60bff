use std::path::PathBuf;

use entropybench_core::chars::{
    char_frequency, corpus_to_bits_with, repeated_substring_scan, Alphabet, CharEncoding, FrequencyReport,
    PasswordCorpus, RepeatsReport,
};
use entropybench_core::formats::parse_passwords;
use entropybench_core::verdict::{aggregate, render_table};
use entropybench_core::{run_battery, BatteryReport, Execution, SampleSource};
use serde::Serialize;

use super::{read_input_text, Context, Rendered, Status};
use crate::cli::{EncodingArg, PasswordArgs};
use crate::config::PasswordConfig;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{to_json, write_file};

#[derive(Serialize)]
struct CorpusSection {
    label: String,
    passwords: usize,
    characters: usize,
    frequency: FrequencyReport,
    repeats: RepeatsReport,
    encoding: CharEncoding,
    bits: usize,
    skipped_characters: usize,
    battery: BatteryReport,
}

#[derive(Serialize)]
struct FailedInput {
    path: PathBuf,
    error: String,
}

#[derive(Serialize)]
struct PasswordRun<'a> {
    manifest: String,
    config: &'a PasswordConfig,
    corpora: Vec<CorpusSection>,
    failed: Vec<FailedInput>,
}

fn analyse(ctx: &Context, config: &PasswordConfig, alphabet: &Alphabet, path: &PathBuf) -> Result<CorpusSection> {
    let label = path.display().to_string();
    let passwords = parse_passwords(&read_input_text(path)?);
    if passwords.is_empty() {
        return Err(CliError::Failed(format!("{label}: empty corpus")));
    }
    let corpus = PasswordCorpus::new(passwords, alphabet.clone());
    let frequency = char_frequency(&corpus, Execution::default())?;
    let repeats = repeated_substring_scan(&corpus, config.min_len)?;
    let (bits, skipped) = corpus_to_bits_with(&corpus, config.encoding)?;
    let results = run_battery(&bits, None, &ctx.config.battery, Execution::default());
    let battery = aggregate(results, SampleSource::inline(label.clone()))?;
    Ok(CorpusSection {
        label,
        passwords: corpus.passwords.len(),
        characters: corpus.total_chars(),
        frequency,
        repeats,
        encoding: config.encoding,
        bits: bits.len(),
        skipped_characters: skipped,
        battery,
    })
}

pub fn run(ctx: &Context, args: &PasswordArgs) -> Result<Rendered> {
    let mut config = ctx.config.passwords.clone();
    if let Some(a) = &args.alphabet {
        config.alphabet = Some(a.clone());
    }
    if let Some(m) = args.min_len {
        config.min_len = m;
    }
    if let Some(e) = args.encoding {
        config.encoding = match e {
            EncodingArg::Ascii8 => CharEncoding::Ascii8,
            EncodingArg::AlphabetIndex => CharEncoding::AlphabetIndex,
        };
    }
    if config.min_len < 2 {
        return Err(CliError::Usage("--min-len must be at least 2".into()));
    }
    let alphabet = match &config.alphabet {
        Some(a) => Alphabet::new(a).map_err(|e| CliError::Usage(e.to_string()))?,
        None => Alphabet::default(),
    };

    let mut manifest = RunManifest::start("passwords", serde_json::to_value(&config)?);
    let mut corpora = Vec::new();
    let mut failed = Vec::new();
    for path in &args.inputs {
        if path.exists() {
            manifest.add_input(path)?;
        }
        match analyse(ctx, &config, &alphabet, path) {
            Ok(section) => corpora.push(section),
            Err(e) => failed.push(FailedInput {
                path: path.clone(),
                error: e.to_string(),
            }),
        }
    }

    let mut text = String::new();
    for c in &corpora {
        let f = &c.frequency;
        text.push_str(&format!(
            "{}: {} passwords, {} characters\n  uniformity chi2 = {:.3} (df {}), p = {:.6} {:?}\n",
            c.label, c.passwords, c.characters, f.chi2, f.degrees_of_freedom, f.p, f.verdict.label
        ));
        if f.other > 0 {
            let chars: String = f.other_chars.keys().collect();
            text.push_str(&format!("  {} characters outside the alphabet: {chars:?}\n", f.other));
        }
        text.push_str(&format!(
            "  duplicates: {}, shared substrings (length >= {}): {}\n",
            c.repeats.duplicates,
            c.repeats.min_len,
            c.repeats.repeats.len()
        ));
        for r in c.repeats.repeats.iter().take(10) {
            text.push_str(&format!("    {:?} in {} passwords\n", r.substring, r.passwords));
        }
    }
    let reports: Vec<BatteryReport> = corpora.iter().map(|c| c.battery.clone()).collect();
    if !reports.is_empty() {
        text.push_str(&render_table(&reports));
    }
    for f in &failed {
        text.push_str(&format!("FAILED {}: {}\n", f.path.display(), f.error));
    }
    let mut csv = String::from("corpus,passwords,chi2,p,verdict,duplicates,repeats,ok_pct,suspect_pct,ko_pct\n");
    for c in &corpora {
        csv.push_str(&format!(
            "\"{}\",{},{:.6},{:.6},{:?},{},{},{:.2},{:.2},{:.2}\n",
            c.label.replace('"', "\"\""),
            c.passwords,
            c.frequency.chi2,
            c.frequency.p,
            c.frequency.verdict.label,
            c.repeats.duplicates,
            c.repeats.repeats.len(),
            c.battery.ok_pct,
            c.battery.suspect_pct,
            c.battery.ko_pct
        ));
    }

    let status = Status::from_counts(corpora.len(), failed.len());
    let run = PasswordRun {
        manifest: RunManifest::file_name("passwords"),
        config: &config,
        corpora,
        failed,
    };
    let json = to_json(&run)?;
    for (name, body) in [("passwords_report.json", &json), ("passwords_summary.txt", &text), ("passwords_summary.csv", &csv)] {
        let path = ctx.out.join(name);
        write_file(&path, body)?;
        manifest.outputs.push(path);
    }
    manifest.finish(&ctx.out)?;
    Ok(Rendered { json, text, csv, status })
}
