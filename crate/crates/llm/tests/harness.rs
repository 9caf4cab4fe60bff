use entropybench_core::battery::{run_battery_on_sample, BatteryConfig};
use entropybench_core::sources::{draw_integers, SampleSource};
use entropybench_core::verdict::aggregate;
use entropybench_core::Execution;
use entropybench_llm::transport::{ChatTransport, ScriptedTransport, TransportError};
use entropybench_llm::wire::{ChatMessage, ChatRequest, ChatResponse, FunctionCall, Role, ToolCall};
use entropybench_llm::{
    integers_from_transcript, request_integers, request_shuffles, run_tool_loop, trials_from_transcript, PromptConfig,
    Record, RequestPolicy, SessionMode, Transcript, TOOL_NAME,
};

fn config() -> PromptConfig {
    let mut c = PromptConfig::new("http://stub", "stub-model");
    c.policy = RequestPolicy::immediate();
    c
}

fn numbers(range: std::ops::Range<u64>) -> String {
    range.map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

fn tool_call(id: &str, arguments: &str) -> ChatResponse {
    let mut message = ChatMessage::assistant("");
    message.content = None;
    message.tool_calls = vec![ToolCall {
        id: id.into(),
        kind: "function".into(),
        function: FunctionCall {
            name: TOOL_NAME.into(),
            arguments: arguments.into(),
        },
    }];
    ChatResponse::reply(message)
}

/// Delegates every request to the tool, then repeats what the tool returned.
struct Delegating {
    per_call: u64,
    max: u64,
    remaining: u64,
}

impl ChatTransport for Delegating {
    fn complete(&mut self, request: &ChatRequest) -> Result<ChatResponse, TransportError> {
        let served: Vec<u64> = request
            .messages
            .iter()
            .filter(|m| m.role == Role::Tool)
            .flat_map(|m| serde_json::from_str::<Vec<u64>>(m.content_str()).unwrap())
            .collect();
        if self.remaining == 0 {
            let text: Vec<String> = served.iter().map(|v| v.to_string()).collect();
            return Ok(ChatResponse::reply(ChatMessage::assistant(format!(
                "Here are your numbers: {}",
                text.join(" ")
            ))));
        }
        let count = self.per_call.min(self.remaining);
        self.remaining -= count;
        Ok(tool_call(
            &format!("call_{}", self.remaining),
            &format!(r#"{{"min": 0, "max": {}, "count": {count}}}"#, self.max),
        ))
    }
}

#[test]
fn echoed_list_is_one_exchange() {
    let mut stub = ScriptedTransport::new().reply(numbers(0..100));
    let t = request_integers(&mut stub, &config(), "stub", 100, 255).unwrap();
    assert_eq!(t.exchange_count(), 1);
    let (sample, _) = integers_from_transcript(&t, 255).unwrap();
    assert_eq!(sample.len(), 100);
    let prompt = stub.requests[0].messages.last().unwrap().content_str().to_owned();
    assert!(prompt.contains("create 100 random positive integers") && prompt.contains("is 255."));
}

#[test]
fn prose_wrapped_numbers_are_recovered() {
    let reply = "Sure! Here are 5 random numbers:\n\n1. 17\n2. 204\n3. 9\n- 255\n* 0\n\nLet me know if you need more.";
    let mut stub = ScriptedTransport::new().reply(reply);
    let t = request_integers(&mut stub, &config(), "stub", 5, 255).unwrap();
    let (sample, diag) = integers_from_transcript(&t, 255).unwrap();
    // the leading "5" and the list markers are digit runs too
    assert_eq!(sample.values(), &[5, 1, 17, 2, 204, 3, 9, 255, 0]);
    assert_eq!(diag.dropped_over_max, 0);
}

#[test]
fn short_answers_are_flagged_partial() {
    let mut stub = ScriptedTransport::new()
        .reply(numbers(0..50))
        .otherwise(ChatResponse::reply(ChatMessage::assistant("I can't produce more numbers.")));
    let t = request_integers(&mut stub, &config(), "stub", 1000, 255).unwrap();
    let o = t.outcome().unwrap();
    assert!(o.partial);
    assert_eq!(o.shortfall, 950);
    assert_eq!(t.exchange_count(), 4);
}

#[test]
fn batches_cover_the_request() {
    let mut c = config();
    c.session_mode = SessionMode::Continued;
    let mut stub = ScriptedTransport::new().reply(numbers(0..500)).reply(numbers(0..300));
    let t = request_integers(&mut stub, &c, "stub", 800, 999).unwrap();
    let asked: Vec<usize> = t
        .records()
        .iter()
        .filter_map(|r| match r {
            Record::Exchange { asked, .. } => Some(*asked),
            _ => None,
        })
        .collect();
    assert_eq!(asked, vec![500, 300]);
    assert!(!t.outcome().unwrap().partial);
}

#[test]
fn delegated_values_pass_through_unchanged() {
    let mut c = config();
    c.tool_mode = entropybench_llm::ToolMode::RngTool;
    let stub = Delegating {
        per_call: 40,
        max: 255,
        remaining: 100,
    };
    let t = run_tool_loop(stub, &c, "tool", 100, 255, SampleSource::seeded(8)).unwrap();
    let served = t.tool_values();
    assert_eq!(served.len(), 100);
    let (sample, _) = integers_from_transcript(&t, 255).unwrap();
    assert_eq!(sample.values(), served.as_slice());
    let calls = t.records().iter().filter(|r| matches!(r, Record::ToolCall { .. })).count();
    assert_eq!(calls, 3);
    assert!(t.outcome().unwrap().aborted.is_none());
}

#[test]
fn tool_served_samples_score_like_local_generator() {
    // single batteries of 10^4 values move in ~10 point steps, so compare means
    let cfg = BatteryConfig::default();
    let ok_pct = |sample: &entropybench_core::IntegerSample, src: SampleSource| {
        aggregate(run_battery_on_sample(sample, &cfg, Execution::default()).unwrap(), src)
            .unwrap()
            .ok_pct
    };
    let (mut tool, mut local) = (0.0, 0.0);
    for seed in 0..10 {
        let stub = Delegating {
            per_call: 2500,
            max: 255,
            remaining: 10_000,
        };
        let t = run_tool_loop(stub, &config(), "tool", 10_000, 255, SampleSource::seeded(100 + seed)).unwrap();
        let (sample, _) = integers_from_transcript(&t, 255).unwrap();
        assert_eq!(sample.len(), 10_000);
        tool += ok_pct(&sample, t.source()) / 10.0;
        let src = SampleSource::seeded(200 + seed);
        local += ok_pct(&draw_integers(&src, 10_000, 255).unwrap(), src) / 10.0;
    }
    assert!((tool - local).abs() <= 10.0, "{tool} vs {local}");
}

#[test]
fn runaway_tool_loop_is_capped() {
    let mut stub = ScriptedTransport::new().otherwise(tool_call("c", r#"{"min": 0, "max": 9, "count": 1}"#));
    let t = run_tool_loop(&mut stub, &config(), "tool", 10, 9, SampleSource::seeded(1)).unwrap();
    assert_eq!(stub.requests.len(), 20);
    let o = t.outcome().unwrap();
    assert!(o.aborted.as_deref().unwrap().contains("cap (20)"));
    assert!(o.partial);
}

#[test]
fn malformed_tool_call_aborts_gracefully() {
    let mut stub = ScriptedTransport::new().respond(tool_call("c", r#"{"min": "zero"}"#));
    let t = run_tool_loop(&mut stub, &config(), "tool", 10, 9, SampleSource::seeded(1)).unwrap();
    assert_eq!(stub.requests.len(), 1);
    let recorded = t.records().iter().find_map(|r| match r {
        Record::ToolCall { error, served, .. } => Some((error.clone(), served.len())),
        _ => None,
    });
    assert!(matches!(recorded, Some((Some(_), 0))));
    assert!(t.outcome().unwrap().aborted.as_deref().unwrap().starts_with("malformed tool call"));
}

fn decks(rows: usize) -> String {
    (0..rows)
        .map(|r| (0..10).map(|i| ((i + r) % 10).to_string()).collect::<Vec<_>>().join(", "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn valid_orderings_are_kept() {
    let mut stub = ScriptedTransport::new().reply(decks(5));
    let t = request_shuffles(&mut stub, &config(), "deck", 10, 5, None).unwrap();
    let (trials, diag) = trials_from_transcript(&t, 10).unwrap();
    assert_eq!((trials.len(), diag.dropped, diag.shortfall), (5, 0, 0));
    assert!(stub.requests[0].messages[0].content_str().contains("Do not write code"));
}

#[test]
fn code_answers_are_dropped() {
    let code = "```python\nimport random\ndeck = list(range(10))\nrandom.shuffle(deck)\nprint(deck)\n```";
    let mut stub = ScriptedTransport::new().reply(code).reply(code).reply(code);
    let t = request_shuffles(&mut stub, &config(), "deck", 10, 5, None).unwrap();
    let (trials, diag) = trials_from_transcript(&t, 10).unwrap();
    assert!(trials.is_empty());
    assert_eq!(diag.shortfall, 5);
    assert!(diag.code_blocks >= 1);
    assert!(t.outcome().unwrap().partial);
}

#[test]
fn resumed_shuffles_accumulate() {
    let mut c = config();
    c.session_mode = SessionMode::Continued;
    let mut first = ScriptedTransport::new()
        .reply(decks(3))
        .otherwise(ChatResponse::reply(ChatMessage::assistant("I need to stop here.")));
    let t = request_shuffles(&mut first, &c, "deck", 10, 6, None).unwrap();
    assert_eq!(t.outcome().unwrap().received, 3);
    let before = t.records().to_vec();

    let mut second = ScriptedTransport::new().reply(decks(3));
    let t = request_shuffles(&mut second, &c, "deck", 10, 6, Some(t)).unwrap();
    assert_eq!(&t.records()[..before.len()], before.as_slice());
    let o = t.outcome().unwrap();
    assert_eq!((o.received, o.partial), (6, false));
    // the earlier conversation is replayed before the new prompt
    assert!(second.requests[0].messages.len() > 2);
    let (trials, _) = trials_from_transcript(&t, 10).unwrap();
    assert_eq!(trials.len(), 6);

    let wrong = request_shuffles(ScriptedTransport::new(), &c, "deck", 9, 6, Some(t));
    assert!(wrong.is_err());
}

#[test]
fn stored_transcript_replays_identically() {
    let mut stub = ScriptedTransport::new().reply(format!("Numbers: {}", numbers(100..200)));
    let t = request_integers(&mut stub, &config(), "stub", 100, 255).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    t.save(&path).unwrap();
    let a = integers_from_transcript(&Transcript::load(&path).unwrap(), 255).unwrap();
    let b = integers_from_transcript(&Transcript::load(&path).unwrap(), 255).unwrap();
    assert_eq!(a, b);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), t.to_jsonl().unwrap());
}
