mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entropybench_core::sources::{draw_integers, SampleSource};
use serde_json::Value;

const KEY_ENV: &str = "ENTROPYBENCH_API_KEY";

fn bench(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entropybench"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove(KEY_ENV)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn two_sources_two_sections_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(dir.path(), &["battery", "--source", "seeded:1", "--source", "constant:7", "--count", "12500"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(dir.path().join("battery_report.json"));
    assert_eq!(report["sources"].as_array().unwrap().len(), 2);
    assert_eq!(report["table"].as_array().unwrap().len(), 2);
    assert_eq!(report["manifest"], "battery.manifest.json");
    assert_eq!(report["sources"][1]["top_values"][0]["value"], 7);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("Generation Method") && stdout.contains("constant_7 [synthetic]"));
    let manifest = json(dir.path().join("battery.manifest.json"));
    assert_eq!(manifest["subcommand"], "battery");
    assert!(manifest["started_unix_ms"].as_u64().unwrap() > 0);
}

#[test]
fn histogram_conserves_counts() {
    let dir = tempfile::tempdir().unwrap();
    let sample = draw_integers(&SampleSource::seeded(4), 10_000, 255).unwrap();
    let text: Vec<String> = sample.values().iter().map(|v| format!("number {v}")).collect();
    let input = write(dir.path(), "values.txt", &text.join(", "));
    let o = bench(dir.path(), &["battery", "--input", &input]);
    assert_eq!(code(&o), 0);
    let report = json(dir.path().join("battery_report.json"));
    let rel = report["sources"][0]["histogram"].as_str().unwrap().to_owned();
    let csv = std::fs::read_to_string(dir.path().join(rel)).unwrap();
    let rows: Vec<(u64, u64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let (v, c) = l.split_once(',').unwrap();
            (v.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    assert!(rows.len() <= 256);
    assert_eq!(rows.iter().map(|r| r.1).sum::<u64>(), 10_000);
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    let manifest = json(dir.path().join("battery.manifest.json"));
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn failures_are_isolated_and_counted_in_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt").display().to_string();
    let o = bench(dir.path(), &["battery", "--source", "seeded:2", "--count", "12500", "--input", &missing]);
    assert_eq!(code(&o), 1);
    let report = json(dir.path().join("battery_report.json"));
    assert_eq!(report["failed"].as_array().unwrap().len(), 1);
    let o = bench(dir.path(), &["battery", "--input", &missing]);
    assert_eq!(code(&o), 3);
    let o = bench(dir.path(), &["battery"]);
    assert_eq!(code(&o), 2);
    let o = bench(dir.path(), &["battery", "--source", "bogus"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn strict_parse_rejects_prose() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "prose.txt", "Sure! 1, 2, 3\n");
    assert_eq!(code(&bench(dir.path(), &["--strict-parse", "battery", "--input", &input])), 3);
    let clean = write(dir.path(), "clean.txt", &(0..2000).map(|v| (v % 256).to_string()).collect::<Vec<_>>().join("\n"));
    assert_ne!(code(&bench(dir.path(), &["--strict-parse", "battery", "--input", &clean])), 3);
}

#[test]
fn reports_are_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let g = bench(dir.path(), &["gen", "--source", "seeded:9", "--count", "20000", "--output", &dir.path().join("g.txt").display().to_string()]);
    assert_eq!(code(&g), 0);
    let input = dir.path().join("g.txt").display().to_string();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        assert_eq!(code(&bench(out, &["battery", "--input", &input])), 0);
        assert_eq!(code(&bench(out, &["shuffle", "--seeds", "2", "--rounds", "128,256"])), 0);
    }
    for name in ["battery_report.json", "battery_table.txt", "shuffle_report.json", "shuffle_series.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn shuffle_guard_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(dir.path(), &["shuffle", "--n", "2"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("N >= 3"));

    let trials = write(dir.path(), "t.json", "[[0,1,2,3],[3,2,1,0],[1,0,3,2],[0,1,2]]");
    let o = bench(dir.path(), &["--format", "csv", "shuffle", "--n", "4", "--seeds", "2", "--rounds", "2,3", "--trials", &trials]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = String::from_utf8(o.stdout).unwrap();
    assert!(csv.starts_with("rounds,\"oracle\","));
    let report = json(dir.path().join("shuffle_report.json"));
    assert_eq!(report["inputs"][0]["trials"], 3);
    let sidecar = report["inputs"][0]["diagnostics"].as_str().unwrap().to_owned();
    assert_eq!(json(dir.path().join(sidecar))["dropped"], 1);
}

fn corpus_from(seed: u64, passwords: usize) -> String {
    let alphabet: Vec<char> = entropybench_core::chars::Alphabet::default().chars().collect();
    let idx = draw_integers(&SampleSource::seeded(seed), passwords * 12, alphabet.len() as u64 - 1).unwrap();
    idx.values()
        .chunks(12)
        .map(|c| c.iter().map(|&i| alphabet[i as usize]).collect::<String>())
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn passwords_uniform_duplicates_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = write(dir.path(), "uniform.txt", &corpus_from(1, 10_000));
    let few = corpus_from(2, 5);
    let dupes: Vec<&str> = few.lines().cycle().take(2000).collect();
    let dupes = write(dir.path(), "dupes.txt", &dupes.join("\n"));
    let odd = write(dir.path(), "odd.txt", "pass word\nhunter2~\n");
    let o = bench(dir.path(), &["passwords", "--input", &uniform, "--input", &dupes, "--input", &odd]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(dir.path().join("passwords_report.json"));
    let corpora = report["corpora"].as_array().unwrap();
    assert!(corpora[0]["battery"]["ok_pct"].as_f64().unwrap() > 50.0);
    assert_eq!(corpora[1]["repeats"]["duplicates"], 1995);
    let serial = corpora[1]["battery"]["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["test_name"] == "serial")
        .unwrap()
        .clone();
    assert!(serial["verdicts"].as_array().unwrap().iter().all(|v| v["label"] == "KO"), "{serial}");
    assert_eq!(corpora[2]["frequency"]["other"], 2);

    let empty = write(dir.path(), "empty.txt", "\n\n");
    assert_eq!(code(&bench(dir.path(), &["passwords", "--input", &empty])), 3);
}

#[test]
fn llm_without_key_fails_before_any_request() {
    let dir = tempfile::tempdir().unwrap();
    let server = common::serve(vec![(200, common::completion("1 2 3"))]);
    let o = bench(dir.path(), &["llm", "--endpoint", &server.base_url, "--model", "m", "--count", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains(KEY_ENV));
    std::thread::sleep(std::time::Duration::from_millis(50));
    assert!(server.requests().is_empty());
}

fn llm(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entropybench"))
        .arg("--out")
        .arg(out)
        .arg("llm")
        .args(args)
        .args(["--min-interval-ms", "0"])
        .env(KEY_ENV, "test-key")
        .output()
        .unwrap()
}

#[test]
fn llm_transcript_feeds_battery() {
    let dir = tempfile::tempdir().unwrap();
    let values = draw_integers(&SampleSource::seeded(3), 2000, 255).unwrap();
    let listed: Vec<String> = values.values().iter().map(u64::to_string).collect();
    let reply = format!("Here you go:\n{}", listed.join(", "));
    let server = common::serve(vec![(200, common::completion(&reply))]);
    let o = llm(dir.path(), &["--endpoint", &server.base_url, "--model", "stub", "--count", "2000", "--batch-size", "2000", "--label", "stub run"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let captured = server.join();
    assert_eq!(captured[0].request_line, "POST /v1/chat/completions HTTP/1.1");
    assert_eq!(captured[0].authorization.as_deref(), Some("Bearer test-key"));
    let transcript = dir.path().join("transcripts/stub_run.jsonl");
    assert!(!std::fs::read_to_string(&transcript).unwrap().contains("test-key"));
    let input = transcript.display().to_string();
    let o = bench(dir.path(), &["battery", "--input", &input]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(dir.path().join("battery_report.json"));
    assert_eq!(report["sources"][0]["values"], 2000);
}

#[test]
fn tool_mode_logs_served_values() {
    let dir = tempfile::tempdir().unwrap();
    let call = serde_json::json!({"choices": [{"finish_reason": "tool_calls", "message": {"role": "assistant", "content": null,
        "tool_calls": [{"id": "c1", "type": "function", "function": {"name": "random_int", "arguments": "{\"min\":0,\"max\":255,\"count\":5}"}}]}}]});
    let server = common::serve(vec![(200, call.to_string()), (200, common::completion("1 2 3 4 5"))]);
    let o = llm(dir.path(), &["--endpoint", &server.base_url, "--model", "stub", "--count", "5", "--tool-mode", "rng", "--tool-source", "seeded:5", "--label", "tool"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let requests = server.join();
    let first: Value = serde_json::from_str(&requests[0].body).unwrap();
    assert_eq!(first["tools"][0]["function"]["name"], "random_int");
    let text = std::fs::read_to_string(dir.path().join("transcripts/tool.jsonl")).unwrap();
    let tool_line: Value = serde_json::from_str(text.lines().find(|l| l.contains("\"tool_call\"")).unwrap()).unwrap();
    assert_eq!(tool_line["served"].as_array().unwrap().len(), 5);
    let summary = json(dir.path().join("llm_summary.json"));
    assert_eq!(summary["tool_values"], 5);
}
