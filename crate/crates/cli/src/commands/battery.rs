use std::path::PathBuf;

use entropybench_core::battery::run_battery_on_sample;
use entropybench_core::sources::{IngestDiagnostics, SourceKind};
use entropybench_core::verdict::{aggregate, render_table};
use entropybench_core::{BatteryConfig, BatteryReport, Execution, SampleSource};
use serde::Serialize;

use super::{load_integers, Context, Rendered, Status};
use crate::cli::BatteryArgs;
use crate::config::parse_source;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{histogram, histogram_csv, to_json, top_values, unique_slugs, write_file, ValueCount};

#[derive(Serialize)]
struct SourceSection {
    label: String,
    values: usize,
    bits: usize,
    ingest: IngestDiagnostics,
    top_values: Vec<ValueCount>,
    histogram: PathBuf,
    report: BatteryReport,
}

#[derive(Serialize)]
struct FailedSource {
    label: String,
    source: SampleSource,
    error: String,
}

#[derive(Serialize)]
struct TableRow {
    method: String,
    ok_pct: f64,
    suspect_pct: f64,
    ko_pct: f64,
}

#[derive(Serialize)]
struct BatteryRun<'a> {
    manifest: String,
    config: &'a BatteryConfig,
    sources: Vec<SourceSection>,
    failed: Vec<FailedSource>,
    table: Vec<TableRow>,
}

struct Evaluated {
    sample_values: Vec<u64>,
    ingest: IngestDiagnostics,
    bits: usize,
    report: BatteryReport,
}

fn evaluate(source: &SampleSource, config: &BatteryConfig) -> std::result::Result<Evaluated, String> {
    let (sample, ingest) = load_integers(source, config.sample_count, config.max)?;
    let results = run_battery_on_sample(&sample, config, Execution::Sequential).map_err(|e| e.to_string())?;
    let bits = sample.len() * config.bit_width as usize;
    let report = aggregate(results, source.clone()).map_err(|e| e.to_string())?;
    Ok(Evaluated {
        sample_values: sample.values().to_vec(),
        ingest,
        bits,
        report,
    })
}

pub fn run(ctx: &Context, args: &BatteryArgs) -> Result<Rendered> {
    let mut config = ctx.config.battery.clone();
    if let Some(count) = args.count {
        config.sample_count = count;
    }
    if let Some(max) = args.max {
        config.max = max;
    }
    if let Some(width) = args.bit_width {
        config.bit_width = width;
    }
    for spec in &args.sources {
        config.sources.push(parse_source(spec)?);
    }
    for path in &args.inputs {
        config.sources.push(SampleSource::new(
            path.display().to_string(),
            SourceKind::FileTranscript {
                path: path.clone(),
                strict: ctx.strict,
                format: None,
            },
        ));
    }
    if config.sources.is_empty() {
        return Err(CliError::Usage(
            "no sources: pass --source or --input, or list sources in --config".into(),
        ));
    }
    if config.sample_count == 0 || config.max == 0 {
        return Err(CliError::Usage("--count and --max must be positive".into()));
    }
    if !(1..=64).contains(&config.bit_width) {
        return Err(CliError::Usage(format!("--bit-width must be in 1..=64, got {}", config.bit_width)));
    }

    let mut manifest = RunManifest::start("battery", serde_json::to_value(&config)?);
    for source in &config.sources {
        if let SourceKind::FileTranscript { path, .. } = &source.kind {
            if path.exists() {
                manifest.add_input(path)?;
            }
        }
    }

    let outcomes = Execution::default().map(&config.sources, |s| evaluate(s, &config));
    let slugs = unique_slugs(config.sources.iter().map(|s| s.label.as_str()));
    let mut sections = Vec::new();
    let mut failed = Vec::new();
    for ((source, outcome), slug) in config.sources.iter().zip(outcomes).zip(slugs) {
        match outcome {
            Ok(ev) => {
                let h = histogram(&ev.sample_values);
                let rel = PathBuf::from("histograms").join(format!("{slug}.csv"));
                let path = ctx.out.join(&rel);
                write_file(&path, &histogram_csv(&h))?;
                manifest.outputs.push(path);
                sections.push(SourceSection {
                    label: source.display_label(),
                    values: ev.sample_values.len(),
                    bits: ev.bits,
                    ingest: ev.ingest,
                    top_values: top_values(&h, 3),
                    histogram: rel,
                    report: ev.report,
                });
            }
            Err(error) => failed.push(FailedSource {
                label: source.display_label(),
                source: source.clone(),
                error,
            }),
        }
    }

    let reports: Vec<BatteryReport> = sections.iter().map(|s| s.report.clone()).collect();
    let table: Vec<TableRow> = sections
        .iter()
        .map(|s| TableRow {
            method: s.label.clone(),
            ok_pct: s.report.ok_pct,
            suspect_pct: s.report.suspect_pct,
            ko_pct: s.report.ko_pct,
        })
        .collect();
    let status = Status::from_counts(sections.len(), failed.len());

    let mut text = String::new();
    if !reports.is_empty() {
        text.push_str(&render_table(&reports));
        text.push_str("\nMost frequent values\n");
        for s in &sections {
            let top: Vec<String> = s.top_values.iter().map(|v| format!("{} (x{})", v.value, v.count)).collect();
            text.push_str(&format!("  {}: {}\n", s.label, top.join(", ")));
        }
    }
    for f in &failed {
        text.push_str(&format!("FAILED {}: {}\n", f.label, f.error));
    }
    let mut csv = String::from("method,ok_pct,suspect_pct,ko_pct\n");
    for row in &table {
        csv.push_str(&format!(
            "\"{}\",{:.2},{:.2},{:.2}\n",
            row.method.replace('"', "\"\""),
            row.ok_pct,
            row.suspect_pct,
            row.ko_pct
        ));
    }

    let run = BatteryRun {
        manifest: RunManifest::file_name("battery"),
        config: &config,
        sources: sections,
        failed,
        table,
    };
    let json = to_json(&run)?;
    for (name, body) in [
        ("battery_report.json", &json),
        ("battery_table.txt", &text),
        ("battery_table.csv", &csv),
    ] {
        let path = ctx.out.join(name);
        write_file(&path, body)?;
        manifest.outputs.push(path);
    }
    manifest.finish(&ctx.out)?;
    Ok(Rendered { json, text, csv, status })
}
