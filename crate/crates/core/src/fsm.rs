//! Finite state machine representation, validation and serialisation.
//!
//! Machines are Mealy-style: a transition consumes an input symbol and emits
//! an output symbol. They may be *partial* (some inputs undefined in some
//! states) and *nondeterministic* (several outputs for the same input), but
//! they must be *observable*: a `(state, input, output)` triple determines at
//! most one successor state. All states must be reachable from the initial
//! state.
//!
//! Symbols and states are referred to by dense indices ([`StateId`],
//! [`InputId`], [`OutputId`]) in declaration order; declaration order is the
//! canonical order used by every tie-breaking rule in the library.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Index of a state in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index of an input symbol in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InputId(pub usize);

/// Index of an output symbol in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutputId(pub usize);

/// One transition of the relation: `source --input/output--> target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateId,
    pub input: InputId,
    pub output: OutputId,
    pub target: StateId,
}

/// A sequence of input symbols. Derived `Ord` is lexicographic in canonical
/// input order, which is exactly the tie-break order used everywhere.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InputSequence(pub Vec<InputId>);

impl InputSequence {
    pub fn empty() -> Self {
        InputSequence(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &InputSequence) -> InputSequence {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        InputSequence(v)
    }

    /// True if `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &InputSequence) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

/// A sequence of input/output pairs (an IO trace). The input and output
/// portions have equal length by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IoTrace(pub Vec<(InputId, OutputId)>);

impl IoTrace {
    pub fn empty() -> Self {
        IoTrace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The input portion of the trace.
    pub fn inputs(&self) -> InputSequence {
        InputSequence(self.0.iter().map(|&(x, _)| x).collect())
    }

    /// The prefix consisting of the first `len` pairs.
    pub fn prefix(&self, len: usize) -> IoTrace {
        IoTrace(self.0[..len].to_vec())
    }

    pub fn push(&mut self, input: InputId, output: OutputId) {
        self.0.push((input, output));
    }

    pub fn concat(&self, other: &IoTrace) -> IoTrace {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        IoTrace(v)
    }
}

/// Which symbol table a name belongs to, for error reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    State,
    Input,
    Output,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::State => write!(f, "state"),
            SymbolKind::Input => write!(f, "input"),
            SymbolKind::Output => write!(f, "output"),
        }
    }
}

/// Errors raised while parsing or validating a machine.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FsmError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: duplicate {kind} symbol `{symbol}`")]
    DuplicateSymbol {
        line: usize,
        kind: SymbolKind,
        symbol: String,
    },
    #[error("line {line}: undeclared {kind} `{symbol}` in transition `{context}`")]
    UndeclaredSymbol {
        line: usize,
        kind: SymbolKind,
        symbol: String,
        context: String,
    },
    #[error("missing `{directive}` directive")]
    MissingDirective { directive: &'static str },
    #[error("initial state `{name}` is not a declared state")]
    UnknownInitial { name: String },
    #[error(
        "observability violation: transitions `{state} --{input}/{output}--> {target_a}` and \
         `{state} --{input}/{output}--> {target_b}` share source, input and output"
    )]
    NotObservable {
        state: String,
        input: String,
        output: String,
        target_a: String,
        target_b: String,
    },
    #[error("unreachable states: {}", names.join(", "))]
    Unreachable { names: Vec<String> },
    #[error("ignored input `{input}` is already defined in state `{state}`")]
    IgnoredInputDefined { state: String, input: String },
    #[error("machine has no states")]
    NoStates,
}

/// Options controlling validation during construction.
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Remove states unreachable from the initial state instead of rejecting
    /// the machine.
    pub prune_unreachable: bool,
}

/// An observable, possibly partial, possibly nondeterministic Mealy machine.
///
/// Immutable after construction; all operations are pure functions of their
/// arguments, so values can be shared freely across threads.
#[derive(Clone, PartialEq, Eq)]
pub struct Fsm {
    name: String,
    states: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    initial: StateId,
    transitions: Vec<Transition>,
    // successors[state][input], sorted by output id
    successors: Vec<Vec<Vec<(OutputId, StateId)>>>,
    // defined[state]: sorted input ids with at least one transition
    defined: Vec<Vec<InputId>>,
}

impl fmt::Debug for Fsm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fsm")
            .field("name", &self.name)
            .field("states", &self.states)
            .field("inputs", &self.inputs)
            .field("outputs", &self.outputs)
            .field("initial", &self.initial)
            .field("transitions", &self.transitions.len())
            .finish()
    }
}

impl Fsm {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of states, `|M|`.
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn input_names(&self) -> &[String] {
        &self.inputs
    }

    pub fn output_names(&self) -> &[String] {
        &self.outputs
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn input_name(&self, x: InputId) -> &str {
        &self.inputs[x.0]
    }

    pub fn output_name(&self, y: OutputId) -> &str {
        &self.outputs[y.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn input_id(&self, name: &str) -> Option<InputId> {
        self.inputs.iter().position(|n| n == name).map(InputId)
    }

    pub fn output_id(&self, name: &str) -> Option<OutputId> {
        self.outputs.iter().position(|n| n == name).map(OutputId)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn inputs(&self) -> impl Iterator<Item = InputId> {
        (0..self.inputs.len()).map(InputId)
    }

    pub fn outputs(&self) -> impl Iterator<Item = OutputId> {
        (0..self.outputs.len()).map(OutputId)
    }

    /// The transition relation in canonical order.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// The set of inputs defined in `s`, sorted in canonical order.
    pub fn defined_inputs(&self, s: StateId) -> &[InputId] {
        &self.defined[s.0]
    }

    /// All `(output, target)` pairs for `(s, x)`, sorted by output.
    /// Empty iff `x` is undefined in `s`.
    pub fn successors(&self, s: StateId, x: InputId) -> &[(OutputId, StateId)] {
        &self.successors[s.0][x.0]
    }

    /// The set of outputs `M` may produce in response to `x` applied in `s`.
    pub fn out(&self, s: StateId, x: InputId) -> Vec<OutputId> {
        self.successors[s.0][x.0].iter().map(|&(y, _)| y).collect()
    }

    /// The unique target of `(s, x, y)`, if the transition exists.
    pub fn step(&self, s: StateId, x: InputId, y: OutputId) -> Option<StateId> {
        self.successors[s.0][x.0]
            .binary_search_by_key(&y, |&(o, _)| o)
            .ok()
            .map(|i| self.successors[s.0][x.0][i].1)
    }

    /// The unique state reached when `trace` is applied in `s`, or `None` if
    /// `trace` is not in the language of `s`.
    pub fn after(&self, s: StateId, trace: &IoTrace) -> Option<StateId> {
        let mut cur = s;
        for &(x, y) in &trace.0 {
            cur = self.step(cur, x, y)?;
        }
        Some(cur)
    }

    /// True iff `trace` is in the language of the machine.
    pub fn language_member(&self, trace: &IoTrace) -> bool {
        self.after(self.initial, trace).is_some()
    }

    /// True iff every pair of states agrees on at most one output per input.
    pub fn is_deterministic(&self) -> bool {
        self.successors
            .iter()
            .all(|per_state| per_state.iter().all(|outs| outs.len() <= 1))
    }

    /// True iff every input is defined in every state.
    pub fn is_completely_specified(&self) -> bool {
        self.defined.iter().all(|d| d.len() == self.inputs.len())
    }

    /// Adds a `null`-output self-loop for each `(state, input)` in `ignored`.
    /// The remaining undefined inputs keep their "disabled" reading.
    ///
    /// `null_output` is appended to the output alphabet if not yet declared.
    pub fn complete_ignored(
        &self,
        ignored: &BTreeMap<StateId, BTreeSet<InputId>>,
        null_output: &str,
    ) -> Result<Fsm, FsmError> {
        let mut b = FsmBuilder::new(&self.name);
        for n in &self.inputs {
            b.input(n);
        }
        for n in &self.outputs {
            b.output(n);
        }
        let null = match self.output_id(null_output) {
            Some(y) => y,
            None => b.output(null_output),
        };
        for n in &self.states {
            b.state(n);
        }
        b.initial(self.initial);
        for t in &self.transitions {
            b.transition(t.source, t.input, t.output, t.target);
        }
        for (&s, inputs) in ignored {
            for &x in inputs {
                if !self.successors(s, x).is_empty() {
                    return Err(FsmError::IgnoredInputDefined {
                        state: self.state_name(s).to_string(),
                        input: self.input_name(x).to_string(),
                    });
                }
                b.transition(s, x, null, s);
            }
        }
        b.build()
    }

    /// Serialises the machine in the text format understood by [`parse_fsm`].
    /// Round trip: `parse_fsm(&m.serialize()) == m` for every valid machine.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("fsm {}\n", self.name));
        s.push_str(&format!("inputs {}\n", self.inputs.join(" ")));
        s.push_str(&format!("outputs {}\n", self.outputs.join(" ")));
        s.push_str(&format!("states {}\n", self.states.join(" ")));
        s.push_str(&format!("initial {}\n", self.state_name(self.initial)));
        for t in &self.transitions {
            s.push_str(&format!(
                "trans {} {} {} {}\n",
                self.state_name(t.source),
                self.input_name(t.input),
                self.output_name(t.output),
                self.state_name(t.target)
            ));
        }
        s
    }

    /// Renders the machine as a Graphviz digraph, transitions labelled `x/y`.
    /// Output is deterministic: nodes and edges follow canonical order.
    pub fn export_dot(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("digraph \"{}\" {{\n", self.name));
        s.push_str("  rankdir=LR;\n");
        s.push_str("  __initial [shape=point, label=\"\"];\n");
        for name in &self.states {
            s.push_str(&format!("  \"{name}\" [shape=circle];\n"));
        }
        s.push_str(&format!(
            "  __initial -> \"{}\";\n",
            self.state_name(self.initial)
        ));
        for t in &self.transitions {
            s.push_str(&format!(
                "  \"{}\" -> \"{}\" [label=\"{}/{}\"];\n",
                self.state_name(t.source),
                self.state_name(t.target),
                self.input_name(t.input),
                self.output_name(t.output)
            ));
        }
        s.push_str("}\n");
        s
    }

    /// Renders an input sequence as dot-joined symbols, `eps` when empty.
    pub fn format_inputs(&self, seq: &InputSequence) -> String {
        if seq.is_empty() {
            "eps".to_string()
        } else {
            seq.0
                .iter()
                .map(|&x| self.input_name(x))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Renders an IO trace as dot-joined `x/y` pairs, `eps` when empty.
    pub fn format_trace(&self, trace: &IoTrace) -> String {
        if trace.is_empty() {
            "eps".to_string()
        } else {
            trace
                .0
                .iter()
                .map(|&(x, y)| format!("{}/{}", self.input_name(x), self.output_name(y)))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parses a dot-joined input sequence, `eps` for the empty one.
    ///
    /// Symbols may themselves contain dots, so the text is tokenised
    /// against the declared alphabet, longest symbols first, with
    /// backtracking.
    pub fn parse_inputs(&self, text: &str) -> Option<InputSequence> {
        let text = text.trim();
        if text.is_empty() || text == "eps" {
            return Some(InputSequence::empty());
        }
        let mut order: Vec<InputId> = (0..self.inputs.len()).map(InputId).collect();
        order.sort_by_key(|&x| std::cmp::Reverse(self.inputs[x.0].len()));

        fn go(
            fsm: &Fsm,
            text: &str,
            pos: usize,
            order: &[InputId],
            dead: &mut Vec<bool>,
            out: &mut Vec<InputId>,
        ) -> bool {
            if dead[pos] {
                return false;
            }
            for &x in order {
                let name = fsm.input_name(x);
                let end = pos + name.len();
                if !text[pos..].starts_with(name) {
                    continue;
                }
                out.push(x);
                if end == text.len() {
                    return true;
                }
                if text[end..].starts_with('.') && go(fsm, text, end + 1, order, dead, out) {
                    return true;
                }
                out.pop();
            }
            dead[pos] = true;
            false
        }

        let mut out = Vec::new();
        let mut dead = vec![false; text.len() + 1];
        if go(self, text, 0, &order, &mut dead, &mut out) {
            Some(InputSequence(out))
        } else {
            None
        }
    }
}

/// Incremental construction of an [`Fsm`]; `build` validates observability
/// and reachability.
#[derive(Debug, Clone)]
pub struct FsmBuilder {
    name: String,
    states: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    initial: Option<StateId>,
    transitions: BTreeSet<Transition>,
}

impl FsmBuilder {
    pub fn new(name: &str) -> Self {
        FsmBuilder {
            name: name.to_string(),
            states: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            initial: None,
            transitions: BTreeSet::new(),
        }
    }

    pub fn state(&mut self, name: &str) -> StateId {
        self.states.push(name.to_string());
        StateId(self.states.len() - 1)
    }

    pub fn input(&mut self, name: &str) -> InputId {
        self.inputs.push(name.to_string());
        InputId(self.inputs.len() - 1)
    }

    pub fn output(&mut self, name: &str) -> OutputId {
        self.outputs.push(name.to_string());
        OutputId(self.outputs.len() - 1)
    }

    pub fn initial(&mut self, s: StateId) -> &mut Self {
        self.initial = Some(s);
        self
    }

    pub fn transition(&mut self, s: StateId, x: InputId, y: OutputId, t: StateId) -> &mut Self {
        self.transitions.insert(Transition {
            source: s,
            input: x,
            output: y,
            target: t,
        });
        self
    }

    pub fn remove_transition(&mut self, t: &Transition) -> bool {
        self.transitions.remove(t)
    }

    pub fn transitions(&self) -> impl Iterator<Item = &Transition> {
        self.transitions.iter()
    }

    /// Starts from an existing machine, keeping names and transitions.
    pub fn from_fsm(fsm: &Fsm) -> Self {
        let mut b = FsmBuilder::new(fsm.name());
        for n in fsm.state_names() {
            b.state(n);
        }
        for n in fsm.input_names() {
            b.input(n);
        }
        for n in fsm.output_names() {
            b.output(n);
        }
        b.initial(fsm.initial());
        for t in fsm.transitions() {
            b.transitions.insert(*t);
        }
        b
    }

    pub fn build(&self) -> Result<Fsm, FsmError> {
        self.build_with(&ParseOptions::default())
    }

    /// Validates and assembles the machine. With `prune_unreachable` set,
    /// unreachable states are dropped (indices are compacted, preserving
    /// relative order); otherwise they are an error.
    pub fn build_with(&self, options: &ParseOptions) -> Result<Fsm, FsmError> {
        if self.states.is_empty() {
            return Err(FsmError::NoStates);
        }
        let initial = self.initial.ok_or(FsmError::MissingDirective {
            directive: "initial",
        })?;

        // Observability: at most one target per (source, input, output).
        let mut seen: BTreeMap<(StateId, InputId, OutputId), StateId> = BTreeMap::new();
        for t in &self.transitions {
            if let Some(&prev) = seen.get(&(t.source, t.input, t.output)) {
                if prev != t.target {
                    return Err(FsmError::NotObservable {
                        state: self.states[t.source.0].clone(),
                        input: self.inputs[t.input.0].clone(),
                        output: self.outputs[t.output.0].clone(),
                        target_a: self.states[prev.0].clone(),
                        target_b: self.states[t.target.0].clone(),
                    });
                }
            } else {
                seen.insert((t.source, t.input, t.output), t.target);
            }
        }

        // Reachability from the initial state.
        let n = self.states.len();
        let mut reachable = vec![false; n];
        reachable[initial.0] = true;
        let mut queue = VecDeque::from([initial]);
        while let Some(s) = queue.pop_front() {
            for t in &self.transitions {
                if t.source == s && !reachable[t.target.0] {
                    reachable[t.target.0] = true;
                    queue.push_back(t.target);
                }
            }
        }

        let (states, remap): (Vec<String>, Vec<Option<usize>>) = if reachable.iter().all(|&r| r) {
            (self.states.clone(), (0..n).map(Some).collect())
        } else if options.prune_unreachable {
            let mut kept = Vec::new();
            let mut remap = vec![None; n];
            for i in 0..n {
                if reachable[i] {
                    remap[i] = Some(kept.len());
                    kept.push(self.states[i].clone());
                }
            }
            (kept, remap)
        } else {
            return Err(FsmError::Unreachable {
                names: (0..n)
                    .filter(|&i| !reachable[i])
                    .map(|i| self.states[i].clone())
                    .collect(),
            });
        };

        let transitions: Vec<Transition> = self
            .transitions
            .iter()
            .filter(|t| remap[t.source.0].is_some() && remap[t.target.0].is_some())
            .map(|t| Transition {
                source: StateId(remap[t.source.0].unwrap()),
                input: t.input,
                output: t.output,
                target: StateId(remap[t.target.0].unwrap()),
            })
            .collect();

        let mut successors = vec![vec![Vec::new(); self.inputs.len()]; states.len()];
        for t in &transitions {
            successors[t.source.0][t.input.0].push((t.output, t.target));
        }
        for per_state in &mut successors {
            for outs in per_state.iter_mut() {
                outs.sort();
            }
        }
        let defined = successors
            .iter()
            .map(|per_state| {
                per_state
                    .iter()
                    .enumerate()
                    .filter(|(_, outs)| !outs.is_empty())
                    .map(|(x, _)| InputId(x))
                    .collect()
            })
            .collect();

        Ok(Fsm {
            name: self.name.clone(),
            states,
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial: StateId(remap[initial.0].expect("initial state is always reachable")),
            transitions,
            successors,
            defined,
        })
    }
}

/// Parses the line-oriented FSM text format.
///
/// ```text
/// fsm <name>
/// inputs <sym>...
/// outputs <sym>...
/// states <id>...
/// initial <id>
/// trans <src> <input> <output> <dst>   # zero or more
/// ```
///
/// Fields are whitespace-separated and `#` starts a comment running to the
/// end of the line. Directives must appear in the order above. Unreachable
/// states are rejected; use [`parse_fsm_with`] to prune them instead.
pub fn parse_fsm(text: &str) -> Result<Fsm, FsmError> {
    parse_fsm_with(text, &ParseOptions::default())
}

pub fn parse_fsm_with(text: &str, options: &ParseOptions) -> Result<Fsm, FsmError> {
    // (line number, column of each token, tokens)
    struct Line<'a> {
        number: usize,
        tokens: Vec<(usize, &'a str)>,
    }

    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut col = 0;
        for piece in content.split_inclusive(char::is_whitespace) {
            let trimmed = piece.trim_end_matches(char::is_whitespace);
            if !trimmed.is_empty() {
                tokens.push((col + 1, trimmed));
            }
            col += piece.chars().count();
        }
        if !tokens.is_empty() {
            lines.push(Line {
                number: idx + 1,
                tokens,
            });
        }
    }

    let syntax = |line: usize, column: usize, message: String| FsmError::Syntax {
        line,
        column,
        message,
    };

    let mut iter = lines.iter();
    let mut header = |directive: &'static str, min_args: usize| -> Result<&Line, FsmError> {
        let line = iter
            .next()
            .ok_or(FsmError::MissingDirective { directive })?;
        let (col, word) = line.tokens[0];
        if word != directive {
            return Err(syntax(
                line.number,
                col,
                format!("expected `{directive}`, found `{word}`"),
            ));
        }
        if line.tokens.len() < min_args + 1 {
            return Err(syntax(
                line.number,
                col,
                format!("`{directive}` needs at least {min_args} argument(s)"),
            ));
        }
        Ok(line)
    };

    let name_line = header("fsm", 1)?;
    if name_line.tokens.len() > 2 {
        let (col, tok) = name_line.tokens[2];
        return Err(syntax(
            name_line.number,
            col,
            format!("unexpected token `{tok}` after machine name"),
        ));
    }
    let mut builder = FsmBuilder::new(name_line.tokens[1].1);

    let inputs_line = header("inputs", 0)?;
    let outputs_line = header("outputs", 0)?;
    let states_line = header("states", 1)?;
    let initial_line = header("initial", 1)?;

    let declare = |line: &Line,
                       kind: SymbolKind,
                       names: &mut Vec<String>|
     -> Result<(), FsmError> {
        for &(col, tok) in &line.tokens[1..] {
            if names.iter().any(|n| n == tok) {
                return Err(FsmError::DuplicateSymbol {
                    line: line.number,
                    kind,
                    symbol: tok.to_string(),
                });
            }
            let _ = col;
            names.push(tok.to_string());
        }
        Ok(())
    };

    let mut input_names = Vec::new();
    let mut output_names = Vec::new();
    let mut state_names = Vec::new();
    declare(inputs_line, SymbolKind::Input, &mut input_names)?;
    declare(outputs_line, SymbolKind::Output, &mut output_names)?;
    declare(states_line, SymbolKind::State, &mut state_names)?;
    for n in &input_names {
        builder.input(n);
    }
    for n in &output_names {
        builder.output(n);
    }
    for n in &state_names {
        builder.state(n);
    }

    if initial_line.tokens.len() > 2 {
        let (col, tok) = initial_line.tokens[2];
        return Err(syntax(
            initial_line.number,
            col,
            format!("unexpected token `{tok}` after initial state"),
        ));
    }
    let initial_name = initial_line.tokens[1].1;
    let initial = state_names
        .iter()
        .position(|n| n == initial_name)
        .map(StateId)
        .ok_or_else(|| FsmError::UnknownInitial {
            name: initial_name.to_string(),
        })?;
    builder.initial(initial);

    for line in iter {
        let (col, word) = line.tokens[0];
        if word != "trans" {
            return Err(syntax(
                line.number,
                col,
                format!("expected `trans`, found `{word}`"),
            ));
        }
        if line.tokens.len() != 5 {
            return Err(syntax(
                line.number,
                col,
                "`trans` needs exactly 4 arguments: <src> <input> <output> <dst>".to_string(),
            ));
        }
        let context = line.tokens[1..]
            .iter()
            .map(|&(_, t)| t)
            .collect::<Vec<_>>()
            .join(" ");
        let lookup = |names: &[String], tok: &str, kind: SymbolKind| -> Result<usize, FsmError> {
            names.iter().position(|n| n == tok).ok_or_else(|| {
                FsmError::UndeclaredSymbol {
                    line: line.number,
                    kind,
                    symbol: tok.to_string(),
                    context: context.clone(),
                }
            })
        };
        let src = lookup(&state_names, line.tokens[1].1, SymbolKind::State)?;
        let inp = lookup(&input_names, line.tokens[2].1, SymbolKind::Input)?;
        let out = lookup(&output_names, line.tokens[3].1, SymbolKind::Output)?;
        let dst = lookup(&state_names, line.tokens[4].1, SymbolKind::State)?;
        builder.transition(StateId(src), InputId(inp), OutputId(out), StateId(dst));
    }

    builder.build_with(options)
}
