//! The `random_int` function offered to models in tool mode. Values are
//! served from a local [`SampleSource`] so they can be told apart from
//! numbers the model wrote itself.

use entropybench_core::sources::{draw_integers, SampleSource, SourceKind};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::wire::{FunctionSpec, ToolSpec};

pub const TOOL_NAME: &str = "random_int";

pub fn random_int_spec() -> ToolSpec {
    ToolSpec {
        kind: "function".into(),
        function: FunctionSpec {
            name: TOOL_NAME.into(),
            description: "Returns `count` uniformly random integers between `min` and `max` inclusive.".into(),
            parameters: json!({
                "type": "object",
                "properties": {
                    "min": {"type": "integer", "minimum": 0},
                    "max": {"type": "integer", "minimum": 0},
                    "count": {"type": "integer", "minimum": 1}
                },
                "required": ["min", "max", "count"]
            }),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomIntArgs {
    pub min: u64,
    pub max: u64,
    pub count: u64,
}

impl RandomIntArgs {
    pub fn parse(arguments: &str) -> Result<Self, String> {
        serde_json::from_str(arguments).map_err(|e| format!("bad {TOOL_NAME} arguments {arguments:?}: {e}"))
    }
}

/// Serves tool calls from a local source. Seeded and biased sources advance
/// their seed on each call so repeated calls do not return the same values.
#[derive(Debug, Clone)]
pub struct ToolServer {
    source: SampleSource,
    calls: u64,
    max_count: u64,
}

impl ToolServer {
    pub fn new(source: SampleSource, max_count: u64) -> Self {
        ToolServer {
            source,
            calls: 0,
            max_count,
        }
    }

    pub fn source(&self) -> &SampleSource {
        &self.source
    }

    pub fn serve(&mut self, name: &str, arguments: &str) -> Result<Vec<u64>, String> {
        if name != TOOL_NAME {
            return Err(format!("unknown tool {name:?}"));
        }
        let args = RandomIntArgs::parse(arguments)?;
        if args.min > args.max {
            return Err(format!("min {} exceeds max {}", args.min, args.max));
        }
        if args.count == 0 || args.count > self.max_count {
            return Err(format!("count {} outside 1..={}", args.count, self.max_count));
        }
        let count = args.count as usize;
        let span = args.max - args.min;
        let call = self.calls;
        self.calls += 1;
        if span == 0 {
            return Ok(vec![args.min; count]);
        }
        let mut source = self.source.clone();
        match &mut source.kind {
            SourceKind::SeededDeterministic { seed } | SourceKind::Biased { seed, .. } => {
                *seed = seed.wrapping_add(call)
            }
            _ => {}
        }
        let sample = draw_integers(&source, count, span).map_err(|e| e.to_string())?;
        Ok(sample.values().iter().map(|v| v + args.min).collect())
    }
}
