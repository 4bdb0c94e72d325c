//! Grey-box suite execution against a system under test.
//!
//! The runner talks a line-oriented protocol to the SUT: `RESET`/`READY`,
//! `INPUT <sym>`/`OUTPUT <sym>` (or `REFUSED` for a disabled input),
//! `ENABLED?`/`ENABLED <sym>...` and a final `QUIT`. It keeps a back-to-back
//! simulation of the reference model: every observed output must be allowed
//! by the model, and after every step the SUT's enabled-input set must equal
//! the model's. Observability guarantees the simulation tracks exactly one
//! model state per observed trace.
//!
//! Nondeterministic SUTs are driven `k` times per test case; `k` comes from
//! the fairness assumption and is inherently application-specific.

use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::conformance::{FailureKind, Verdict};
use crate::fsm::{Fsm, InputSequence, IoTrace, StateId};
use crate::random::rng;

/// Repetition count per test case under the fairness assumption.
#[derive(Debug, Clone, Copy)]
pub struct FairnessConfig {
    pub k: usize,
}

impl Default for FairnessConfig {
    fn default() -> Self {
        // no universally correct value exists; 50 catches every output of
        // up-to-4-way choices with overwhelming probability
        FairnessConfig { k: 50 }
    }
}

/// Errors that are distinct from a test FAIL: the SUT broke the protocol,
/// timed out, or could not be reset.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("SUT timed out after {0:?}")]
    Timeout(Duration),
    #[error("RESET failed, SUT answered `{0}`")]
    ResetFailed(String),
    #[error("SUT i/o error: {0}")]
    Io(String),
}

/// Line transport to a SUT. Implementations exist for spawned processes
/// (stdio) and for in-process serving of a machine.
pub trait SutTransport {
    fn send_line(&mut self, line: &str) -> Result<(), HarnessError>;
    fn recv_line(&mut self) -> Result<String, HarnessError>;
}

/// Serves a machine over the SUT protocol, resolving nondeterministic
/// output choices uniformly at random from a seeded generator.
#[derive(Debug, Clone)]
pub struct FsmSutServer {
    fsm: Fsm,
    state: StateId,
    rng: ChaCha8Rng,
}

impl FsmSutServer {
    pub fn new(fsm: Fsm, seed: u64) -> FsmSutServer {
        let state = fsm.initial();
        FsmSutServer {
            fsm,
            state,
            rng: rng(seed),
        }
    }

    /// Handles one request line; `None` means the session is over.
    pub fn handle_line(&mut self, line: &str) -> Option<String> {
        let line = line.trim_end_matches(['\r', '\n']);
        if line == "QUIT" {
            return None;
        }
        Some(self.handle_request(line))
    }

    fn handle_request(&mut self, line: &str) -> String {
        if line == "RESET" {
            self.state = self.fsm.initial();
            return "READY".to_string();
        }
        if line == "ENABLED?" {
            let names: Vec<&str> = self
                .fsm
                .defined_inputs(self.state)
                .iter()
                .map(|&x| self.fsm.input_name(x))
                .collect();
            return if names.is_empty() {
                "ENABLED".to_string()
            } else {
                format!("ENABLED {}", names.join(" "))
            };
        }
        if let Some(sym) = line.strip_prefix("INPUT ") {
            let Some(x) = self.fsm.input_id(sym) else {
                return "REFUSED".to_string();
            };
            let succ = self.fsm.successors(self.state, x);
            if succ.is_empty() {
                return "REFUSED".to_string();
            }
            let (y, target) = succ[self.rng.random_range(0..succ.len())];
            self.state = target;
            return format!("OUTPUT {}", self.fsm.output_name(y));
        }
        "ERROR unknown command".to_string()
    }

    /// Runs the request loop over arbitrary reader/writer pairs; used by the
    /// CLI to serve on stdio.
    pub fn serve<R: BufRead, W: Write>(&mut self, reader: R, mut writer: W) -> std::io::Result<()> {
        for line in reader.lines() {
            let line = line?;
            match self.handle_line(&line) {
                Some(reply) => {
                    writeln!(writer, "{reply}")?;
                    writer.flush()?;
                }
                None => break,
            }
        }
        Ok(())
    }
}

/// In-process SUT channel around [`FsmSutServer`]; requests and replies go
/// through the same textual protocol as the process transport.
#[derive(Debug, Clone)]
pub struct InProcessSut {
    server: FsmSutServer,
    replies: VecDeque<String>,
}

impl InProcessSut {
    pub fn new(server: FsmSutServer) -> InProcessSut {
        InProcessSut {
            server,
            replies: VecDeque::new(),
        }
    }
}

impl SutTransport for InProcessSut {
    fn send_line(&mut self, line: &str) -> Result<(), HarnessError> {
        if let Some(reply) = self.server.handle_line(line) {
            self.replies.push_back(reply);
        }
        Ok(())
    }

    fn recv_line(&mut self) -> Result<String, HarnessError> {
        self.replies
            .pop_front()
            .ok_or_else(|| HarnessError::Protocol("no pending reply".to_string()))
    }
}

/// Reference SUT adapter: serves `fsm` in-process with seeded output
/// choices.
pub fn serve_fsm_as_sut(fsm: Fsm, seed: u64) -> InProcessSut {
    InProcessSut::new(FsmSutServer::new(fsm, seed))
}

/// SUT channel over the stdio of a spawned process. A reader thread feeds a
/// channel so receives can time out.
pub struct ProcessSut {
    child: Child,
    stdin: std::process::ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl ProcessSut {
    pub fn spawn(command: &[String], timeout: Duration) -> Result<ProcessSut, HarnessError> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| HarnessError::Io("empty SUT command".to_string()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| HarnessError::Io(format!("cannot spawn SUT: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = channel();
        thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(ProcessSut {
            child,
            stdin,
            lines: rx,
            timeout,
        })
    }
}

impl SutTransport for ProcessSut {
    fn send_line(&mut self, line: &str) -> Result<(), HarnessError> {
        writeln!(self.stdin, "{line}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| HarnessError::Io(format!("write to SUT failed: {e}")))
    }

    fn recv_line(&mut self) -> Result<String, HarnessError> {
        match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(HarnessError::Io(format!("read from SUT failed: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(HarnessError::Timeout(self.timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                Err(HarnessError::Io("SUT closed its output".to_string()))
            }
        }
    }
}

impl Drop for ProcessSut {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// How a single repetition of a test case ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunOutcome {
    Passed,
    /// The SUT consistently refused an input that the model also disables;
    /// the remainder of the case is vacuous.
    RefusedEnd,
    Failed(FailureKind),
}

/// Record of one repetition: the observed valid trace prefix, the enabled
/// sets probed before any input and after each valid step (always exactly
/// `observed.len() + 1` of them), and where the run failed, if it did.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub case_index: usize,
    pub repetition: usize,
    pub observed: IoTrace,
    pub enabled: Vec<Vec<String>>,
    pub verdict_step: Option<usize>,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone, Default)]
pub struct ExecutionLog {
    pub runs: Vec<RunRecord>,
}

impl ExecutionLog {
    pub fn to_text(&self, fsm: &Fsm) -> String {
        let mut out = String::new();
        for r in &self.runs {
            let outcome = match r.outcome {
                RunOutcome::Passed => "pass".to_string(),
                RunOutcome::RefusedEnd => "refused-end".to_string(),
                RunOutcome::Failed(kind) => format!("fail kind={kind}"),
            };
            out.push_str(&format!(
                "run case={} rep={} outcome={} trace={}",
                r.case_index,
                r.repetition,
                outcome,
                fsm.format_trace(&r.observed)
            ));
            if let Some(step) = r.verdict_step {
                out.push_str(&format!(" step={step}"));
            }
            out.push('\n');
        }
        out
    }
}

fn parse_enabled(line: &str) -> Option<Vec<String>> {
    if line == "ENABLED" {
        return Some(Vec::new());
    }
    line.strip_prefix("ENABLED ")
        .map(|rest| rest.split_whitespace().map(str::to_string).collect())
}

enum InputReply {
    Output(String),
    Refused,
}

struct Runner<'a, T: SutTransport> {
    sut: &'a mut T,
    model: &'a Fsm,
}

impl<'a, T: SutTransport> Runner<'a, T> {
    fn reset(&mut self) -> Result<(), HarnessError> {
        self.sut.send_line("RESET")?;
        let reply = self.sut.recv_line()?;
        if reply == "READY" {
            Ok(())
        } else {
            Err(HarnessError::ResetFailed(reply))
        }
    }

    fn enabled(&mut self) -> Result<Vec<String>, HarnessError> {
        self.sut.send_line("ENABLED?")?;
        let reply = self.sut.recv_line()?;
        parse_enabled(&reply)
            .ok_or_else(|| HarnessError::Protocol(format!("expected ENABLED reply, got `{reply}`")))
    }

    fn input(&mut self, symbol: &str) -> Result<InputReply, HarnessError> {
        self.sut.send_line(&format!("INPUT {symbol}"))?;
        let reply = self.sut.recv_line()?;
        if reply == "REFUSED" {
            return Ok(InputReply::Refused);
        }
        match reply.strip_prefix("OUTPUT ") {
            Some(sym) if !sym.trim().is_empty() => Ok(InputReply::Output(sym.trim().to_string())),
            _ => Err(HarnessError::Protocol(format!(
                "expected OUTPUT or REFUSED, got `{reply}`"
            ))),
        }
    }

    fn enabled_matches(&self, state: StateId, observed: &[String]) -> Result<bool, HarnessError> {
        let mut sut_set = BTreeSet::new();
        for name in observed {
            match self.model.input_id(name) {
                Some(x) => {
                    sut_set.insert(x);
                }
                None => {
                    return Err(HarnessError::Protocol(format!(
                        "SUT reports unknown input `{name}` as enabled"
                    )))
                }
            }
        }
        let model_set: BTreeSet<_> = self.model.defined_inputs(state).iter().copied().collect();
        Ok(sut_set == model_set)
    }
}

/// Executes `cases` against the SUT, `fairness.k` repetitions each, in
/// back-to-back comparison with `model`. The first violation aborts the run
/// with a fail verdict; protocol problems surface as [`HarnessError`]
/// instead of a verdict.
pub fn run_suite<T: SutTransport>(
    sut: &mut T,
    model: &Fsm,
    cases: &[InputSequence],
    fairness: &FairnessConfig,
) -> Result<(Verdict, ExecutionLog), HarnessError> {
    assert!(fairness.k >= 1, "fairness repetition count must be >= 1");
    let mut runner = Runner { sut, model };
    let mut log = ExecutionLog::default();

    for (case_index, case) in cases.iter().enumerate() {
        for repetition in 0..fairness.k {
            runner.reset()?;
            let mut state = model.initial();
            let mut observed = IoTrace::empty();
            let mut enabled_log: Vec<Vec<String>> = Vec::new();

            let fail = |observed: IoTrace,
                            enabled_log: Vec<Vec<String>>,
                            kind: FailureKind,
                            witness: IoTrace,
                            step: usize,
                            log: &mut ExecutionLog| {
                log.runs.push(RunRecord {
                    case_index,
                    repetition,
                    observed,
                    enabled: enabled_log,
                    verdict_step: Some(step),
                    outcome: RunOutcome::Failed(kind),
                });
                Verdict::fail(kind, witness)
            };

            let enabled = runner.enabled()?;
            enabled_log.push(enabled.clone());
            if !runner.enabled_matches(state, &enabled)? {
                let verdict = fail(
                    observed,
                    enabled_log,
                    FailureKind::EnabledInputMismatch,
                    IoTrace::empty(),
                    0,
                    &mut log,
                );
                let _ = runner.sut.send_line("QUIT");
                return Ok((verdict, log));
            }

            let mut outcome = RunOutcome::Passed;
            for (step, &x) in case.0.iter().enumerate() {
                let symbol = model.input_name(x).to_string();
                match runner.input(&symbol)? {
                    InputReply::Refused => {
                        let last = enabled_log.last().expect("probed before each input");
                        if last.iter().any(|s| s == &symbol) {
                            return Err(HarnessError::Protocol(format!(
                                "SUT refused `{symbol}` after listing it as enabled"
                            )));
                        }
                        // consistent refusal: nothing left to check on this case
                        outcome = RunOutcome::RefusedEnd;
                        break;
                    }
                    InputReply::Output(y_name) => {
                        let last = enabled_log.last().expect("probed before each input");
                        if !last.iter().any(|s| s == &symbol) {
                            return Err(HarnessError::Protocol(format!(
                                "SUT executed `{symbol}` after listing it as disabled"
                            )));
                        }
                        let Some(y) = model.output_id(&y_name) else {
                            return Err(HarnessError::Protocol(format!(
                                "SUT produced unknown output `{y_name}`"
                            )));
                        };
                        match model.step(state, x, y) {
                            None => {
                                let mut witness = observed.clone();
                                witness.push(x, y);
                                let verdict = fail(
                                    observed,
                                    enabled_log,
                                    FailureKind::OutputViolation,
                                    witness,
                                    step,
                                    &mut log,
                                );
                                let _ = runner.sut.send_line("QUIT");
                                return Ok((verdict, log));
                            }
                            Some(next) => {
                                observed.push(x, y);
                                state = next;
                                let enabled = runner.enabled()?;
                                enabled_log.push(enabled.clone());
                                if !runner.enabled_matches(state, &enabled)? {
                                    let witness = observed.clone();
                                    let verdict = fail(
                                        observed,
                                        enabled_log,
                                        FailureKind::EnabledInputMismatch,
                                        witness,
                                        step + 1,
                                        &mut log,
                                    );
                                    let _ = runner.sut.send_line("QUIT");
                                    return Ok((verdict, log));
                                }
                            }
                        }
                    }
                }
            }

            log.runs.push(RunRecord {
                case_index,
                repetition,
                observed,
                enabled: enabled_log,
                verdict_step: None,
                outcome,
            });
        }
    }

    let _ = runner.sut.send_line("QUIT");
    Ok((Verdict::pass(), log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformance::sample_strong_reductions;
    use crate::corpus;
    use crate::fsm::{FsmBuilder, OutputId};
    use crate::generate::generate_test_suite;
    use crate::distinguish::RdVariant;

    #[test]
    fn model_passes_against_itself() {
        for m in [corpus::mex(), corpus::cr_completed()] {
            let suite = generate_test_suite(&m, m.num_states(), RdVariant::Rd1).unwrap();
            let mut sut = serve_fsm_as_sut(m.clone(), 1);
            let (verdict, log) =
                run_suite(&mut sut, &m, &suite.cases, &FairnessConfig { k: 2 }).unwrap();
            assert!(verdict.conforms, "{} failed against itself", m.name());
            assert_eq!(log.runs.len(), suite.cases.len() * 2);
        }
    }

    #[test]
    fn enabled_mismatch_at_initial_state_fails_at_step_zero() {
        let cr = corpus::cr_completed();
        let init = cr.state_id("init").unwrap();
        let ok = cr.input_id("ts.in.ok").unwrap();
        let mut b = FsmBuilder::from_fsm(&cr);
        b.transition(init, ok, OutputId(0), init);
        let mutant = b.build().unwrap();

        let suite = generate_test_suite(&cr, 10, RdVariant::Rd1).unwrap();
        let mut sut = serve_fsm_as_sut(mutant, 3);
        let (verdict, log) =
            run_suite(&mut sut, &cr, &suite.cases, &FairnessConfig { k: 1 }).unwrap();
        assert!(!verdict.conforms);
        assert_eq!(verdict.kind, Some(FailureKind::EnabledInputMismatch));
        assert_eq!(verdict.witness, Some(IoTrace::empty()));
        let last = log.runs.last().unwrap();
        assert_eq!(last.verdict_step, Some(0));
    }

    #[test]
    fn pruned_reduction_passes_with_repetitions() {
        let cr = corpus::cr_completed();
        let suite = generate_test_suite(&cr, 10, RdVariant::Rd1).unwrap();
        let reduced = sample_strong_reductions(&cr, 1, 17).pop().unwrap();
        let mut sut = serve_fsm_as_sut(reduced.clone(), 4);
        let (verdict, log) =
            run_suite(&mut sut, &cr, &suite.cases, &FairnessConfig { k: 5 }).unwrap();
        assert!(verdict.conforms);
        // the log replays: every observed trace is in the model language
        for run in &log.runs {
            assert!(cr.language_member(&run.observed));
            assert_eq!(run.enabled.len(), run.observed.len() + 1);
        }
    }

    #[test]
    fn grey_box_fail_implies_white_box_fail() {
        let m = corpus::mex();
        let suite = generate_test_suite(&m, 4, RdVariant::Rd1).unwrap();
        let mutants = crate::conformance::sample_mutants(
            &m,
            &crate::conformance::FaultDomainSpec { m: 4 },
            60,
            23,
        );
        for mutant in mutants {
            let mut sut = serve_fsm_as_sut(mutant.fsm.clone(), 9);
            let (grey, _) =
                run_suite(&mut sut, &m, &suite.cases, &FairnessConfig { k: 8 }).unwrap();
            if !grey.conforms {
                let white = crate::conformance::evaluate_pass(&mutant.fsm, &suite.cases, &m)
                    .unwrap();
                assert!(!white.conforms, "grey-box fail not confirmed white-box");
            }
        }
    }

    #[test]
    fn consistent_refusal_ends_the_case_quietly() {
        let text = "fsm p\ninputs a b\noutputs o\nstates s t\ninitial s\n\
                    trans s a o t\ntrans t a o s\ntrans t b o s\n";
        let m = crate::fsm::parse_fsm(text).unwrap();
        // b is disabled in s for the model and the SUT alike
        let case = m.parse_inputs("b.a").unwrap();
        let mut sut = serve_fsm_as_sut(m.clone(), 0);
        let (verdict, log) =
            run_suite(&mut sut, &m, &[case], &FairnessConfig { k: 1 }).unwrap();
        assert!(verdict.conforms);
        assert_eq!(log.runs[0].outcome, RunOutcome::RefusedEnd);
        assert_eq!(log.runs[0].observed.len(), 0);
    }

    struct GarbageSut;

    impl SutTransport for GarbageSut {
        fn send_line(&mut self, _line: &str) -> Result<(), HarnessError> {
            Ok(())
        }
        fn recv_line(&mut self) -> Result<String, HarnessError> {
            Ok("?!garbage".to_string())
        }
    }

    #[test]
    fn garbage_replies_are_protocol_errors_not_fails() {
        let m = corpus::mex();
        let case = m.parse_inputs("a").unwrap();
        let err = run_suite(&mut GarbageSut, &m, &[case], &FairnessConfig { k: 1 }).unwrap_err();
        assert!(matches!(err, HarnessError::ResetFailed(_)));
    }

    #[test]
    fn deterministic_sut_transcripts_ignore_the_seed() {
        let text = "fsm det\ninputs a\noutputs o p\nstates s t\ninitial s\n\
                    trans s a o t\ntrans t a p s\n";
        let m = crate::fsm::parse_fsm(text).unwrap();
        let script = ["RESET", "ENABLED?", "INPUT a", "INPUT a", "ENABLED?"];
        let mut transcripts = Vec::new();
        for seed in [0u64, 1, 99] {
            let mut server = FsmSutServer::new(m.clone(), seed);
            let replies: Vec<String> = script
                .iter()
                .map(|l| server.handle_line(l).unwrap())
                .collect();
            transcripts.push(replies);
        }
        assert!(transcripts.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn reset_returns_to_initial() {
        let m = corpus::mex();
        let mut server = FsmSutServer::new(m.clone(), 5);
        server.handle_line("RESET").unwrap();
        server.handle_line("INPUT a").unwrap();
        assert_eq!(server.handle_line("RESET").unwrap(), "READY");
        let enabled = server.handle_line("ENABLED?").unwrap();
        assert_eq!(enabled, "ENABLED a b");
    }

    #[test]
    fn repeated_runs_observe_every_output_choice() {
        // out(s0, b) has four choices; 50 seeded repetitions see them all
        let m = corpus::mex();
        let mut server = FsmSutServer::new(m.clone(), 13);
        let mut seen = BTreeSet::new();
        for _ in 0..50 {
            server.handle_line("RESET").unwrap();
            let reply = server.handle_line("INPUT b").unwrap();
            seen.insert(reply);
        }
        assert_eq!(seen.len(), 4);
    }
}
