use std::collections::BTreeSet;
use std::path::PathBuf;

use entropybench_core::shuffle::{
    asymptotic_entropy, convergence_sweep, distance_histogram, entropy_score, ingest_trials, mean_oracle_sweep,
    SweepMode, SweepPoint, TrialDiagnostics, MIN_CARDS,
};
use entropybench_core::{Execution, PermutationTrialSet};
use entropybench_llm::{trials_from_transcript, Transcript};
use serde::Serialize;

use super::{is_transcript, Context, Rendered, Status};
use crate::cli::{ModeArg, ShuffleArgs};
use crate::config::ShuffleConfig;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{to_json, unique_slugs, write_file};

#[derive(Serialize)]
struct InputSeries {
    label: String,
    trials: usize,
    h: f64,
    argmin_pair: (usize, usize),
    series: Vec<SweepPoint>,
    diagnostics: PathBuf,
}

#[derive(Serialize)]
struct FailedInput {
    path: PathBuf,
    error: String,
}

#[derive(Serialize)]
struct ShuffleRun<'a> {
    manifest: String,
    config: &'a ShuffleConfig,
    asymptotic_h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<Vec<SweepPoint>>,
    inputs: Vec<InputSeries>,
    failed: Vec<FailedInput>,
}

fn load_trials(path: &PathBuf, n: usize) -> Result<(PermutationTrialSet, TrialDiagnostics)> {
    if is_transcript(path) {
        let transcript = Transcript::load(path)?;
        let (trials, diag) = trials_from_transcript(&transcript, n)?;
        if trials.is_empty() {
            return Err(CliError::Failed(format!("{}: no valid shuffles", path.display())));
        }
        Ok((PermutationTrialSet::new(n, trials, transcript.source())?, diag))
    } else {
        Ok(ingest_trials(path, n, None)?)
    }
}

fn score(set: &PermutationTrialSet, rounds: &[usize]) -> Result<(f64, (usize, usize), Vec<SweepPoint>)> {
    let mut points: Vec<usize> = rounds.iter().copied().filter(|&r| r <= set.len()).collect();
    if points.last() != Some(&set.len()) {
        points.push(set.len());
    }
    let series = convergence_sweep(set.n(), &points, set, SweepMode::Cumulative)?;
    let full = entropy_score(&distance_histogram(set, Execution::default()))?;
    Ok((full.h, full.argmin_pair, series))
}

pub fn run(ctx: &Context, args: &ShuffleArgs) -> Result<Rendered> {
    let mut config = ctx.config.shuffle.clone();
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(rounds) = &args.rounds {
        config.rounds = rounds.clone();
    }
    if let Some(seeds) = args.seeds {
        config.seeds = seeds;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(mode) = args.mode {
        config.mode = match mode {
            ModeArg::Cumulative => SweepMode::Cumulative,
            ModeArg::Fresh => SweepMode::Fresh,
        };
    }
    if config.n < MIN_CARDS {
        return Err(CliError::Usage(format!(
            "N must be at least {MIN_CARDS} (N >= 3); got N = {}",
            config.n
        )));
    }
    if config.rounds.is_empty() || config.rounds[0] == 0 || config.rounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("--rounds must be positive and strictly ascending".into()));
    }
    if config.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let oracle_wanted = !args.no_oracle;
    if !oracle_wanted && args.trials.is_empty() {
        return Err(CliError::Usage("nothing to do: --no-oracle without --trials".into()));
    }

    let mut manifest = RunManifest::start("shuffle", serde_json::to_value(&config)?);
    let oracle = if oracle_wanted {
        let seeds: Vec<u64> = (0..config.seeds as u64).map(|k| config.seed.wrapping_add(k)).collect();
        Some(mean_oracle_sweep(config.n, &config.rounds, &seeds, config.mode, Execution::default())?)
    } else {
        None
    };

    let labels: Vec<String> = args.trials.iter().map(|p| p.display().to_string()).collect();
    let slugs = unique_slugs(labels.iter().map(String::as_str));
    let mut inputs = Vec::new();
    let mut failed = Vec::new();
    for ((path, label), slug) in args.trials.iter().zip(&labels).zip(slugs) {
        if path.exists() {
            manifest.add_input(path)?;
        }
        let outcome = load_trials(path, config.n).and_then(|(set, diag)| Ok((score(&set, &config.rounds)?, set, diag)));
        match outcome {
            Ok(((h, argmin_pair, series), set, diag)) => {
                let rel = PathBuf::from(format!("shuffle_{slug}_diagnostics.json"));
                let sidecar = ctx.out.join(&rel);
                write_file(&sidecar, &to_json(&diag)?)?;
                manifest.outputs.push(sidecar);
                inputs.push(InputSeries {
                    label: label.clone(),
                    trials: set.len(),
                    h,
                    argmin_pair,
                    series,
                    diagnostics: rel,
                });
            }
            Err(e) => failed.push(FailedInput {
                path: path.clone(),
                error: e.to_string(),
            }),
        }
    }

    let mut rows: BTreeSet<usize> = config.rounds.iter().copied().collect();
    for input in &inputs {
        rows.extend(input.series.iter().map(|p| p.rounds));
    }
    let lookup = |series: &[SweepPoint], r: usize| series.iter().find(|p| p.rounds == r).map(|p| p.h);
    let mut columns: Vec<(String, &[SweepPoint])> = Vec::new();
    if let Some(o) = &oracle {
        columns.push(("oracle".into(), o));
    }
    for input in &inputs {
        columns.push((input.label.clone(), &input.series));
    }
    let mut csv = String::from("rounds");
    for (name, _) in &columns {
        csv.push_str(&format!(",\"{}\"", name.replace('"', "\"\"")));
    }
    csv.push('\n');
    let width = columns.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(8);
    let mut text = format!("{:>6}", "Rounds");
    for (name, _) in &columns {
        text.push_str(&format!("  {name:>width$}"));
    }
    text.push('\n');
    for &r in &rows {
        csv.push_str(&r.to_string());
        text.push_str(&format!("{r:>6}"));
        for (_, series) in &columns {
            let cell = lookup(series, r).map(|h| format!("{h:.6}")).unwrap_or_default();
            csv.push(',');
            csv.push_str(&cell);
            text.push_str(&format!("  {cell:>width$}"));
        }
        csv.push('\n');
        text.push('\n');
    }
    let asymptotic_h = asymptotic_entropy(config.n);
    text.push_str(&format!("asymptotic H for N = {}: {asymptotic_h:.6}\n", config.n));
    for input in &inputs {
        text.push_str(&format!(
            "{}: {} trials, H = {:.6}, least uniform pair {:?}\n",
            input.label, input.trials, input.h, input.argmin_pair
        ));
    }
    for f in &failed {
        text.push_str(&format!("FAILED {}: {}\n", f.path.display(), f.error));
    }

    let succeeded = inputs.len() + usize::from(oracle.is_some());
    let status = Status::from_counts(succeeded, failed.len());
    let run = ShuffleRun {
        manifest: RunManifest::file_name("shuffle"),
        config: &config,
        asymptotic_h,
        oracle,
        inputs,
        failed,
    };
    let json = to_json(&run)?;
    for (name, body) in [("shuffle_report.json", &json), ("shuffle_series.csv", &csv), ("shuffle_series.txt", &text)] {
        let path = ctx.out.join(name);
        write_file(&path, body)?;
        manifest.outputs.push(path);
    }
    manifest.finish(&ctx.out)?;
    Ok(Rendered { json, text, csv, status })
}
