use std::path::PathBuf;
use std::time::Duration;

use entropybench_llm::transport::HttpTransport;
use entropybench_llm::{
    request_integers, request_shuffles, run_tool_loop, Outcome, PromptConfig, Record, SessionMode, ToolMode,
    Transcript, SYSTEM_PROMPT,
};
use serde::Serialize;

use super::{Context, Rendered, Status};
use crate::cli::{LlmArgs, SessionArg, Task, ToolModeArg};
use crate::config::parse_source;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{slug, to_json, write_file};

#[derive(Serialize)]
struct LlmRun {
    manifest: String,
    transcript: PathBuf,
    label: String,
    exchanges: usize,
    tool_calls: usize,
    tool_values: usize,
    outcome: Option<Outcome>,
}

fn prompt_config(ctx: &Context, args: &LlmArgs) -> Result<PromptConfig> {
    let mut config = match (&ctx.config.llm, &args.endpoint, &args.model) {
        (Some(c), _, _) => c.clone(),
        (None, Some(endpoint), Some(model)) => PromptConfig::new(endpoint.clone(), model.clone()),
        _ => {
            return Err(CliError::Usage(
                "llm needs --endpoint and --model (or an \"llm\" section in --config)".into(),
            ))
        }
    };
    if let Some(endpoint) = &args.endpoint {
        config.endpoint.base_url = endpoint.clone();
    }
    if let Some(model) = &args.model {
        config.endpoint.model = model.clone();
    }
    if let Some(session) = args.session {
        config.session_mode = match session {
            SessionArg::Fresh => SessionMode::Fresh,
            SessionArg::Continued => SessionMode::Continued,
        };
    }
    if args.system_prompt {
        config.system_prompt = Some(SYSTEM_PROMPT.into());
    }
    if args.tool_mode == ToolModeArg::Rng {
        config.tool_mode = ToolMode::RngTool;
    }
    if let Some(b) = args.batch_size {
        config.policy.batch_size = b;
        config.policy.shuffle_batch_size = b;
    }
    if let Some(ms) = args.min_interval_ms {
        config.policy.min_interval_ms = ms;
    }
    Ok(config)
}

pub fn run(ctx: &Context, args: &LlmArgs) -> Result<Rendered> {
    let config = prompt_config(ctx, args)?;
    if args.task == Task::Shuffles && config.tool_mode == ToolMode::RngTool {
        return Err(CliError::Usage("--tool-mode rng applies to --task integers only".into()));
    }
    let tool_source = parse_source(&args.tool_source)?;
    let resume = args.resume.as_deref().map(Transcript::load).transpose()?;
    let label = args
        .label
        .clone()
        .or_else(|| resume.as_ref().map(|t| t.label().to_owned()))
        .unwrap_or_else(|| {
            let task = match args.task {
                Task::Integers => "integers",
                Task::Shuffles => "shuffles",
            };
            format!("{}_{task}", config.endpoint.model)
        });

    let mut manifest = RunManifest::start("llm", serde_json::to_value(&config)?);
    if let Some(path) = &args.resume {
        manifest.add_input(path)?;
    }
    // fails here, before any request, when the key is missing
    let transport = HttpTransport::from_env(&config.endpoint, Duration::from_secs(config.policy.timeout_s))?;
    let transcript = match args.task {
        Task::Integers if config.tool_mode == ToolMode::RngTool => {
            run_tool_loop(transport, &config, &label, args.count, args.max, tool_source)?
        }
        Task::Integers => request_integers(transport, &config, &label, args.count, args.max)?,
        Task::Shuffles => request_shuffles(transport, &config, &label, args.n, args.trials, resume)?,
    };

    let rel = PathBuf::from("transcripts").join(format!("{}.jsonl", slug(&label)));
    let path = ctx.out.join(&rel);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    transcript.save(&path)?;
    manifest.outputs.push(path);

    let outcome = transcript.outcome().cloned();
    let status = match &outcome {
        Some(o) if o.partial => Status::Partial,
        _ => Status::Success,
    };
    let run = LlmRun {
        manifest: RunManifest::file_name("llm"),
        transcript: rel.clone(),
        label: label.clone(),
        exchanges: transcript.exchange_count(),
        tool_calls: transcript.records().iter().filter(|r| matches!(r, Record::ToolCall { .. })).count(),
        tool_values: transcript.tool_values().len(),
        outcome,
    };
    let json = to_json(&run)?;
    let mut text = format!(
        "{label}: {} exchanges, transcript {}\n",
        run.exchanges,
        rel.display()
    );
    if let Some(o) = &run.outcome {
        text.push_str(&format!("received {} of {} (shortfall {})\n", o.received, o.requested, o.shortfall));
        if let Some(reason) = &o.aborted {
            text.push_str(&format!("stopped early: {reason}\n"));
        }
    }
    if run.tool_calls > 0 {
        text.push_str(&format!("{} tool calls served {} values\n", run.tool_calls, run.tool_values));
    }
    let csv = format!(
        "label,exchanges,tool_calls,requested,received\n\"{}\",{},{},{},{}\n",
        label.replace('"', "\"\""),
        run.exchanges,
        run.tool_calls,
        run.outcome.as_ref().map_or(0, |o| o.requested),
        run.outcome.as_ref().map_or(0, |o| o.received)
    );
    let summary = ctx.out.join("llm_summary.json");
    write_file(&summary, &json)?;
    manifest.outputs.push(summary);
    manifest.finish(&ctx.out)?;
    Ok(Rendered { json, text, csv, status })
}
