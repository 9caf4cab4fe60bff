use std::thread::sleep;
use std::time::{Duration, Instant};

use entropybench_core::formats::extract_digit_runs;
use entropybench_core::shuffle::{parse_trials, MIN_CARDS};
use entropybench_core::SampleSource;

use crate::config::{PromptConfig, SessionMode};
use crate::error::{LlmError, Result};
use crate::tool::{random_int_spec, ToolServer};
use crate::transcript::{now_ms, Outcome, Record, Transcript, TranscriptKind};
use crate::transport::{ChatTransport, TransportError};
use crate::wire::{ChatMessage, ChatRequest, ToolSpec};

/// One conversation with an endpoint: pacing, retries, history and recording.
struct Session<'a, T: ChatTransport> {
    transport: T,
    config: &'a PromptConfig,
    history: Vec<ChatMessage>,
    last_sent: Option<Instant>,
    transcript: Transcript,
    exchanges: usize,
}

impl<'a, T: ChatTransport> Session<'a, T> {
    fn new(transport: T, config: &'a PromptConfig, transcript: Transcript) -> Self {
        let mut session = Session {
            transport,
            config,
            history: Vec::new(),
            last_sent: None,
            exchanges: transcript.exchange_count(),
            transcript,
        };
        session.reset();
        session
    }

    fn reset(&mut self) {
        self.history.clear();
        if let Some(system) = &self.config.system_prompt {
            self.history.push(ChatMessage::system(system.clone()));
        }
    }

    /// Starts a new prompt: fresh sessions drop the earlier conversation.
    fn begin_turn(&mut self) {
        if self.config.session_mode == SessionMode::Fresh {
            self.reset();
        }
    }

    fn pace(&mut self) {
        let interval = Duration::from_millis(self.config.policy.min_interval_ms);
        if let Some(last) = self.last_sent {
            let elapsed = last.elapsed();
            if elapsed < interval {
                sleep(interval - elapsed);
            }
        }
        self.last_sent = Some(Instant::now());
    }

    fn backoff(&self, attempt: u32, error: &TransportError) -> Duration {
        let policy = &self.config.policy;
        let exp = policy.backoff_ms.saturating_mul(1u64 << attempt.min(20));
        let wait = Duration::from_millis(exp.min(policy.max_backoff_ms));
        match error {
            TransportError::Throttled { retry_after: Some(after) } => wait.max(*after),
            _ => wait,
        }
    }

    /// Sends `message` on top of the current history and records the exchange.
    fn ask(&mut self, message: ChatMessage, batch: usize, asked: usize, tools: &[ToolSpec]) -> Result<ChatMessage> {
        self.history.push(message);
        let request = ChatRequest {
            model: self.config.endpoint.model.clone(),
            messages: self.history.clone(),
            temperature: self.config.params.temperature,
            max_tokens: self.config.params.max_tokens,
            tools: tools.to_vec(),
        };
        let max_retries = self.config.policy.max_retries;
        let mut attempt = 0;
        let sent_ms = now_ms();
        let response = loop {
            self.pace();
            match self.transport.complete(&request) {
                Ok(response) => break response,
                Err(TransportError::Unauthorized { status, body }) => {
                    return Err(LlmError::Auth(format!("HTTP {status}: {body}")));
                }
                Err(e) if e.is_retryable() && attempt < max_retries => {
                    sleep(self.backoff(attempt, &e));
                    attempt += 1;
                }
                Err(e) => {
                    return Err(LlmError::Transport {
                        attempts: attempt + 1,
                        source: e,
                    })
                }
            }
        };
        let choice = response.choices.into_iter().next().ok_or_else(|| LlmError::Transport {
            attempts: attempt + 1,
            source: TransportError::Malformed("response has no choices".into()),
        })?;
        self.transcript.push(Record::Exchange {
            index: self.exchanges,
            batch,
            asked,
            sent_ms,
            request: request.messages,
            response: choice.message.clone(),
            finish_reason: choice.finish_reason,
        });
        self.exchanges += 1;
        self.history.push(choice.message.clone());
        Ok(choice.message)
    }

    /// Records a mid-run failure. Errors before the first exchange are
    /// returned to the caller since there is nothing worth keeping.
    fn absorb(&mut self, error: LlmError) -> Result<String> {
        if self.exchanges == 0 {
            return Err(error);
        }
        let message = error.to_string();
        self.transcript.push(Record::Failure {
            exchange: self.exchanges,
            message: message.clone(),
        });
        Ok(message)
    }

    fn seal(mut self, requested: usize, received: usize, aborted: Option<String>) -> Transcript {
        let shortfall = requested.saturating_sub(received);
        self.transcript.push(Record::Outcome(Outcome {
            requested,
            received,
            shortfall,
            partial: shortfall > 0,
            aborted,
        }));
        self.transcript
    }
}

fn meta(
    label: &str,
    kind: TranscriptKind,
    config: &PromptConfig,
    requested: usize,
    bound: u64,
    tool_source: Option<SampleSource>,
) -> Result<Transcript> {
    Transcript::new(Record::Meta {
        label: label.to_owned(),
        kind,
        config: config.clone(),
        requested,
        bound,
        tool_source,
        started_ms: now_ms(),
    })
}

fn check_batch(size: usize) -> Result<()> {
    if size == 0 {
        return Err(LlmError::InvalidArgument("batch size must be at least 1".into()));
    }
    Ok(())
}

/// Asks for `count` integers in `[0, max]`, at most `batch_size` per request,
/// until enough values are extractable or the model stops producing new ones
/// `max_stalled` times in a row. A failure after the first exchange ends the
/// run with a partial transcript instead of an error.
pub fn request_integers<T: ChatTransport>(
    transport: T,
    config: &PromptConfig,
    label: &str,
    count: usize,
    max: u64,
) -> Result<Transcript> {
    if count == 0 || max == 0 {
        return Err(LlmError::InvalidArgument("count and max must be positive".into()));
    }
    check_batch(config.policy.batch_size)?;
    let transcript = meta(label, TranscriptKind::Integers, config, count, max, None)?;
    let mut session = Session::new(transport, config, transcript);
    let (mut received, mut stalled, mut batch) = (0usize, 0u32, 0usize);
    let mut aborted = None;
    while received < count {
        let asked = config.policy.batch_size.min(count - received);
        session.begin_turn();
        let prompt = ChatMessage::user(config.integer_prompt(asked, max));
        match session.ask(prompt, batch, asked, &[]) {
            Ok(reply) => {
                let got = extract_digit_runs(reply.content_str(), max).values.len();
                received += got;
                stalled = if got == 0 { stalled + 1 } else { 0 };
                if stalled >= config.policy.max_stalled {
                    aborted = Some(format!("no new values in {stalled} consecutive replies"));
                    break;
                }
            }
            Err(e) => {
                aborted = Some(session.absorb(e)?);
                break;
            }
        }
        batch += 1;
    }
    Ok(session.seal(count, received.min(count), aborted))
}

/// Offers the `random_int` tool and serves calls from `tool_source` until
/// the model gives a final answer. Malformed calls are recorded and end the
/// loop; so does reaching the iteration cap.
pub fn run_tool_loop<T: ChatTransport>(
    transport: T,
    config: &PromptConfig,
    label: &str,
    count: usize,
    max: u64,
    tool_source: SampleSource,
) -> Result<Transcript> {
    if count == 0 || max == 0 {
        return Err(LlmError::InvalidArgument("count and max must be positive".into()));
    }
    let transcript = meta(label, TranscriptKind::ToolLoop, config, count, max, Some(tool_source.clone()))?;
    let mut server = ToolServer::new(tool_source, config.policy.max_tool_count);
    let mut session = Session::new(transport, config, transcript);
    let tools = [random_int_spec()];
    let cap = config.policy.tool_iteration_cap;
    let mut message = ChatMessage::user(config.integer_prompt(count, max));
    let mut aborted = None;
    let mut received = 0;
    let mut iteration = 0;
    'turns: loop {
        if iteration == cap {
            aborted = Some(format!("tool iteration cap ({cap}) reached"));
            break;
        }
        iteration += 1;
        let reply = match session.ask(message, 0, count, &tools) {
            Ok(reply) => reply,
            Err(e) => {
                aborted = Some(session.absorb(e)?);
                break;
            }
        };
        if reply.tool_calls.is_empty() {
            received = extract_digit_runs(reply.content_str(), max).values.len();
            break;
        }
        let exchange = session.exchanges - 1;
        let mut results = Vec::with_capacity(reply.tool_calls.len());
        for call in &reply.tool_calls {
            let outcome = server.serve(&call.function.name, &call.function.arguments);
            let (served, error) = match outcome {
                Ok(values) => (values, None),
                Err(e) => (Vec::new(), Some(e)),
            };
            session.transcript.push(Record::ToolCall {
                exchange,
                call_id: call.id.clone(),
                name: call.function.name.clone(),
                arguments: call.function.arguments.clone(),
                served: served.clone(),
                error: error.clone(),
            });
            if let Some(e) = error {
                aborted = Some(format!("malformed tool call: {e}"));
                break 'turns;
            }
            results.push(ChatMessage::tool_result(call.id.clone(), serde_json::to_string(&served)?));
        }
        // all but the last result go straight into the history
        message = results.pop().expect("at least one tool call");
        session.history.extend(results);
    }
    Ok(session.seal(count, received.min(count), aborted))
}

/// Asks for `trials` shuffles of `n` cards. Passing an earlier shuffle
/// transcript continues it: the new exchanges are appended, the earlier
/// conversation is replayed in continued mode, and counts accumulate.
pub fn request_shuffles<T: ChatTransport>(
    transport: T,
    config: &PromptConfig,
    label: &str,
    n: usize,
    trials: usize,
    resume: Option<Transcript>,
) -> Result<Transcript> {
    if n < MIN_CARDS {
        return Err(LlmError::InvalidArgument(format!("need at least {MIN_CARDS} cards, got {n}")));
    }
    check_batch(config.policy.shuffle_batch_size)?;
    let (transcript, mut received) = match resume {
        Some(prior) => {
            if prior.kind() != TranscriptKind::Shuffles || prior.bound() != n as u64 {
                return Err(LlmError::Transcript(format!(
                    "cannot resume: transcript is not a shuffle run with {n} cards"
                )));
            }
            let (done, _) = parse_trials(&prior.model_text(), n, None)?;
            (prior, done.len())
        }
        None => (meta(label, TranscriptKind::Shuffles, config, trials, n as u64, None)?, 0),
    };
    let mut session = Session::new(transport, config, transcript);
    if config.session_mode == SessionMode::Continued {
        if let Some((request, response)) = session.transcript.exchanges().last() {
            let replay: Vec<ChatMessage> = request.iter().chain([response]).cloned().collect();
            session.history = replay;
        }
    }
    let (mut stalled, mut batch, mut aborted) = (0u32, 0usize, None);
    while received < trials {
        let asked = config.policy.shuffle_batch_size.min(trials - received);
        session.begin_turn();
        let prompt = ChatMessage::user(config.shuffle_prompt(n, asked));
        match session.ask(prompt, batch, asked, &[]) {
            Ok(reply) => {
                let (got, _) = parse_trials(reply.content_str(), n, None)?;
                received += got.len();
                stalled = if got.is_empty() { stalled + 1 } else { 0 };
                if stalled >= config.policy.max_stalled {
                    aborted = Some(format!("no valid shuffles in {stalled} consecutive replies"));
                    break;
                }
            }
            Err(e) => {
                aborted = Some(session.absorb(e)?);
                break;
            }
        }
        batch += 1;
    }
    Ok(session.seal(trials, received.min(trials), aborted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RequestPolicy;
    use crate::transport::ScriptedTransport;
    use crate::wire::Role;

    fn config() -> PromptConfig {
        let mut c = PromptConfig::new("http://stub", "stub-model");
        c.policy = RequestPolicy::immediate();
        c
    }

    #[test]
    fn fresh_mode_sends_no_history() {
        let mut c = config();
        c.policy.batch_size = 2;
        c.system_prompt = Some("sys".into());
        let mut stub = ScriptedTransport::new().reply("1 2").reply("3 4");
        let t = request_integers(&mut stub, &c, "x", 4, 9).unwrap();
        assert_eq!(stub.requests.len(), 2);
        for r in &stub.requests {
            assert_eq!(r.messages.len(), 2);
            assert_eq!(r.messages[0].role, Role::System);
            assert_eq!(r.temperature, 0.0);
        }
        assert!(!t.outcome().unwrap().partial);
    }

    #[test]
    fn continued_mode_threads_history() {
        let mut c = config();
        c.policy.batch_size = 2;
        c.session_mode = SessionMode::Continued;
        let mut stub = ScriptedTransport::new().reply("1 2").reply("3 4");
        request_integers(&mut stub, &c, "x", 4, 9).unwrap();
        assert_eq!(stub.requests[1].messages.len(), 3);
        assert_eq!(stub.requests[1].messages[1].content_str(), "1 2");
    }

    #[test]
    fn retries_throttling_then_succeeds() {
        let mut stub = ScriptedTransport::new()
            .fail(TransportError::Throttled { retry_after: None })
            .fail(TransportError::Server { status: 503, body: String::new() })
            .reply("5 6 7");
        let t = request_integers(&mut stub, &config(), "x", 3, 9).unwrap();
        assert_eq!(stub.requests.len(), 3);
        assert_eq!(t.exchange_count(), 1);
    }

    #[test]
    fn gives_up_after_retry_budget() {
        let mut c = config();
        c.policy.max_retries = 2;
        let mut stub = ScriptedTransport::new();
        let err = request_integers(&mut stub, &c, "x", 3, 9).unwrap_err();
        assert!(matches!(err, LlmError::Transport { attempts: 3, .. }), "{err}");
    }

    #[test]
    fn auth_failure_is_not_retried() {
        let mut stub = ScriptedTransport::new().fail(TransportError::Unauthorized {
            status: 401,
            body: "bad key".into(),
        });
        assert!(matches!(request_integers(&mut stub, &config(), "x", 3, 9), Err(LlmError::Auth(_))));
        assert_eq!(stub.requests.len(), 1);
    }

    #[test]
    fn late_failure_keeps_partial_transcript() {
        let mut c = config();
        c.policy.batch_size = 2;
        c.policy.max_retries = 0;
        let mut stub = ScriptedTransport::new().reply("1 2");
        let t = request_integers(&mut stub, &c, "x", 4, 9).unwrap();
        let o = t.outcome().unwrap();
        assert!(o.partial && o.aborted.is_some());
        assert_eq!((o.received, o.shortfall), (2, 2));
        assert!(t.records().iter().any(|r| matches!(r, Record::Failure { .. })));
    }

    #[test]
    fn pacing_spaces_requests() {
        let mut c = config();
        c.policy.min_interval_ms = 30;
        c.policy.batch_size = 1;
        let mut stub = ScriptedTransport::new().reply("1").reply("2").reply("3");
        let start = Instant::now();
        request_integers(&mut stub, &c, "x", 3, 9).unwrap();
        assert!(start.elapsed() >= Duration::from_millis(60));
    }
}
