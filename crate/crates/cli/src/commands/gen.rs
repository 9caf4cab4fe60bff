use entropybench_core::sources::{draw_integers, to_lines};
use serde::Serialize;

use super::{Context, Rendered, Status};
use crate::cli::GenArgs;
use crate::config::parse_source;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{slug, to_json, write_file};

#[derive(Serialize)]
struct GenRun {
    source: entropybench_core::SampleSource,
    count: usize,
    max: u64,
    output: std::path::PathBuf,
}

pub fn run(ctx: &Context, args: &GenArgs) -> Result<Rendered> {
    let source = parse_source(&args.source)?;
    if args.count == 0 || args.max == 0 {
        return Err(CliError::Usage("--count and --max must be positive".into()));
    }
    let mut manifest = RunManifest::start("gen", serde_json::to_value(&source)?);
    let sample = draw_integers(&source, args.count, args.max)?;
    let path = args
        .output
        .clone()
        .unwrap_or_else(|| ctx.out.join(format!("{}.txt", slug(&source.label))));
    write_file(&path, &to_lines(&sample))?;
    manifest.outputs.push(path.clone());
    manifest.finish(&ctx.out)?;
    let run = GenRun {
        source,
        count: args.count,
        max: args.max,
        output: path,
    };
    let json = to_json(&run)?;
    let text = format!("wrote {} values to {}\n", run.count, run.output.display());
    let csv = format!("output,count\n\"{}\",{}\n", run.output.display(), run.count);
    Ok(Rendered {
        json,
        text,
        csv,
        status: Status::Success,
    })
}
