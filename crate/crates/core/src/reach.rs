//! Deterministic reachability analysis.
//!
//! An input sequence *d-reaches* a state when it is guaranteed to arrive
//! there no matter how the machine resolves its nondeterminism, and no
//! prefix can run into an undefined input along the way. Both properties
//! are decided on the [`ReachAutomaton`]: erase outputs, complete the
//! transition graph with an absorbing sink for undefined inputs, then
//! determinise by subset construction. A sequence is strongly defined iff
//! its path avoids sink-containing nodes, and it d-reaches `s` iff it
//! additionally ends in the singleton node `{s}`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::fsm::{Fsm, InputId, InputSequence, IoTrace, StateId};

/// One node of the determinised automaton: a set of machine states plus a
/// flag recording whether the sink belongs to the subset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReachNode {
    /// Member states, sorted.
    pub states: Vec<StateId>,
    /// True if the sink is part of this subset.
    pub has_sink: bool,
}

impl ReachNode {
    /// The state `s` if this node is exactly `{s}` without the sink.
    pub fn singleton(&self) -> Option<StateId> {
        if !self.has_sink && self.states.len() == 1 {
            Some(self.states[0])
        } else {
            None
        }
    }
}

/// Subset-construction determinisation of the output-erased, sink-completed
/// transition graph. Only nodes reachable from `{initial}` are materialised,
/// so the exponential worst case is paid only when actually present.
#[derive(Debug, Clone)]
pub struct ReachAutomaton {
    nodes: Vec<ReachNode>,
    // edges[node][input] -> node, total by construction
    edges: Vec<Vec<usize>>,
    initial: usize,
}

impl ReachAutomaton {
    pub fn build(fsm: &Fsm) -> ReachAutomaton {
        let mut nodes: Vec<ReachNode> = Vec::new();
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut index: HashMap<ReachNode, usize> = HashMap::new();

        let mut intern = |node: ReachNode,
                          nodes: &mut Vec<ReachNode>,
                          edges: &mut Vec<Vec<usize>>,
                          queue: &mut VecDeque<usize>| {
            if let Some(&i) = index.get(&node) {
                return i;
            }
            let i = nodes.len();
            index.insert(node.clone(), i);
            nodes.push(node);
            edges.push(Vec::new());
            queue.push_back(i);
            i
        };

        let mut queue = VecDeque::new();
        let initial = intern(
            ReachNode {
                states: vec![fsm.initial()],
                has_sink: false,
            },
            &mut nodes,
            &mut edges,
            &mut queue,
        );

        while let Some(i) = queue.pop_front() {
            let node = nodes[i].clone();
            let mut row = Vec::with_capacity(fsm.num_inputs());
            for x in fsm.inputs() {
                let mut targets: BTreeSet<StateId> = BTreeSet::new();
                // the sink absorbs: once present it stays present
                let mut has_sink = node.has_sink;
                for &s in &node.states {
                    let succ = fsm.successors(s, x);
                    if succ.is_empty() {
                        has_sink = true;
                    }
                    for &(_, t) in succ {
                        targets.insert(t);
                    }
                }
                let next = ReachNode {
                    states: targets.into_iter().collect(),
                    has_sink,
                };
                row.push(intern(next, &mut nodes, &mut edges, &mut queue));
            }
            edges[i] = row;
        }

        ReachAutomaton {
            nodes,
            edges,
            initial,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn initial_node(&self) -> usize {
        self.initial
    }

    pub fn node(&self, i: usize) -> &ReachNode {
        &self.nodes[i]
    }

    pub fn successor(&self, i: usize, x: InputId) -> usize {
        self.edges[i][x.0]
    }

    /// The node reached from `{initial}` by `seq`.
    pub fn walk(&self, seq: &InputSequence) -> &ReachNode {
        let mut cur = self.initial;
        for &x in &seq.0 {
            cur = self.edges[cur][x.0];
        }
        &self.nodes[cur]
    }

    /// True iff no node visited after a nonempty prefix of `seq` contains
    /// the sink.
    pub fn is_strongly_defined(&self, seq: &InputSequence) -> bool {
        let mut cur = self.initial;
        for &x in &seq.0 {
            cur = self.edges[cur][x.0];
            if self.nodes[cur].has_sink {
                return false;
            }
        }
        true
    }

    /// The state d-reached by `seq`, if any: `seq` must be strongly defined
    /// and must arrive at a singleton node.
    pub fn d_reached_state(&self, seq: &InputSequence) -> Option<StateId> {
        let mut cur = self.initial;
        for &x in &seq.0 {
            cur = self.edges[cur][x.0];
            if self.nodes[cur].has_sink {
                return None;
            }
        }
        self.nodes[cur].singleton()
    }
}

pub fn build_reach_automaton(fsm: &Fsm) -> ReachAutomaton {
    ReachAutomaton::build(fsm)
}

pub fn is_strongly_defined(fsm: &Fsm, seq: &InputSequence) -> bool {
    ReachAutomaton::build(fsm).is_strongly_defined(seq)
}

pub fn d_reached_state(fsm: &Fsm, seq: &InputSequence) -> Option<StateId> {
    ReachAutomaton::build(fsm).d_reached_state(seq)
}

/// A state cover: one d-reaching input sequence per d-reachable state
/// (the empty sequence for the initial state), together with all responses
/// of the machine to those sequences.
#[derive(Debug, Clone)]
pub struct StateCover {
    /// `s -> v_s`, keyed in canonical state order.
    pub entries: BTreeMap<StateId, InputSequence>,
    /// Every IO trace of the machine whose input portion is a cover
    /// sequence.
    pub responses: BTreeSet<IoTrace>,
}

impl StateCover {
    /// The d-reachable states, in canonical order.
    pub fn covered_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.entries.keys().copied()
    }

    pub fn sequence_for(&self, s: StateId) -> Option<&InputSequence> {
        self.entries.get(&s)
    }

    /// Cover rendering: one `state<TAB>inputs` line per entry, `eps` for the
    /// empty sequence.
    pub fn to_text(&self, fsm: &Fsm) -> String {
        let mut out = String::new();
        for (&s, seq) in &self.entries {
            out.push_str(&format!(
                "{}\t{}\n",
                fsm.state_name(s),
                fsm.format_inputs(seq)
            ));
        }
        out
    }
}

/// Computes a minimal state cover by breadth-first search over the
/// reachability automaton.
///
/// The search expands inputs in canonical order, so the sequence attached to
/// each d-reachable state is shortest, with lexicographic tie-break. Paths
/// through sink-containing nodes are never taken (they are not strongly
/// defined).
pub fn compute_state_cover(fsm: &Fsm) -> StateCover {
    let automaton = ReachAutomaton::build(fsm);
    let mut entries: BTreeMap<StateId, InputSequence> = BTreeMap::new();
    let mut seen = vec![false; automaton.num_nodes()];
    let mut queue: VecDeque<(usize, InputSequence)> = VecDeque::new();
    seen[automaton.initial_node()] = true;
    queue.push_back((automaton.initial_node(), InputSequence::empty()));

    while let Some((i, seq)) = queue.pop_front() {
        if let Some(s) = automaton.node(i).singleton() {
            entries.entry(s).or_insert_with(|| seq.clone());
        }
        for x in fsm.inputs() {
            let j = automaton.successor(i, x);
            if seen[j] || automaton.node(j).has_sink {
                continue;
            }
            seen[j] = true;
            let mut next = seq.clone();
            next.0.push(x);
            queue.push_back((j, next));
        }
    }

    let mut responses = BTreeSet::new();
    for seq in entries.values() {
        collect_responses(fsm, fsm.initial(), seq, 0, &mut IoTrace::empty(), &mut responses);
    }

    StateCover { entries, responses }
}

fn collect_responses(
    fsm: &Fsm,
    state: StateId,
    seq: &InputSequence,
    pos: usize,
    prefix: &mut IoTrace,
    acc: &mut BTreeSet<IoTrace>,
) {
    if pos == seq.len() {
        acc.insert(prefix.clone());
        return;
    }
    let x = seq.0[pos];
    for &(y, t) in fsm.successors(state, x) {
        prefix.push(x, y);
        collect_responses(fsm, t, seq, pos + 1, prefix, acc);
        prefix.0.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fsm::parse_fsm;

    fn seq(fsm: &Fsm, text: &str) -> InputSequence {
        fsm.parse_inputs(text).expect("known symbols")
    }

    #[test]
    fn mex_ab_reaches_singleton_s2() {
        let m = corpus::mex();
        let auto = ReachAutomaton::build(&m);
        let node = auto.walk(&seq(&m, "a.b"));
        assert_eq!(node.singleton(), Some(m.state_id("s2").unwrap()));
    }

    #[test]
    fn mex_aab_hits_the_sink() {
        let m = corpus::mex();
        let auto = ReachAutomaton::build(&m);
        let node = auto.walk(&seq(&m, "a.a.b"));
        assert!(node.has_sink);
        assert!(!auto.is_strongly_defined(&seq(&m, "a.a.b")));
    }

    #[test]
    fn complete_deterministic_machine_is_isomorphic_and_sink_free() {
        let text = "fsm det\ninputs a b\noutputs 0\nstates p q\ninitial p\n\
                    trans p a 0 q\ntrans p b 0 p\ntrans q a 0 p\ntrans q b 0 q\n";
        let m = parse_fsm(text).unwrap();
        let auto = ReachAutomaton::build(&m);
        assert_eq!(auto.num_nodes(), m.num_states());
        for i in 0..auto.num_nodes() {
            assert!(auto.node(i).singleton().is_some());
        }
    }

    #[test]
    fn strong_definedness_examples() {
        let m = corpus::mex();
        let auto = ReachAutomaton::build(&m);
        assert!(auto.is_strongly_defined(&seq(&m, "a.b")));
        assert!(auto.is_strongly_defined(&InputSequence::empty()));
        assert!(!auto.is_strongly_defined(&seq(&m, "a.a.b")));
    }

    #[test]
    fn d_reached_state_examples() {
        let m = corpus::mex();
        let auto = ReachAutomaton::build(&m);
        assert_eq!(
            auto.d_reached_state(&seq(&m, "a.b")),
            Some(m.state_id("s2").unwrap())
        );
        assert_eq!(
            auto.d_reached_state(&InputSequence::empty()),
            Some(m.initial())
        );
        // the initial state answers nondeterministically on every input
        assert_eq!(auto.d_reached_state(&seq(&m, "a")), None);
        assert_eq!(auto.d_reached_state(&seq(&m, "b")), None);
    }

    #[test]
    fn mex_cover_is_eps_and_ab() {
        let m = corpus::mex();
        let cover = compute_state_cover(&m);
        let s0 = m.state_id("s0").unwrap();
        let s2 = m.state_id("s2").unwrap();
        assert_eq!(cover.entries.len(), 2);
        assert_eq!(cover.entries[&s0], InputSequence::empty());
        assert_eq!(cover.entries[&s2], seq(&m, "a.b"));
        assert!(!cover.entries.contains_key(&m.state_id("s1").unwrap()));
        assert!(!cover.entries.contains_key(&m.state_id("s3").unwrap()));
    }

    #[test]
    fn cr_cover_lengths_match_handwritten_table() {
        let m = corpus::cr_completed();
        let cover = compute_state_cover(&m);
        assert_eq!(cover.entries.len(), 10, "every CR state is d-reachable");
        let expected = [
            ("init", 0),
            ("card0", 1),
            ("card1", 1),
            ("auth0", 2),
            ("auth1", 2),
            ("PIN0", 3),
            ("PIN1", 4),
            ("PIN2", 5),
            ("ejected0", 1),
            ("ejected1", 4),
        ];
        for (name, len) in expected {
            let s = m.state_id(name).unwrap();
            assert_eq!(cover.entries[&s].len(), len, "cover length for {name}");
        }
    }

    #[test]
    fn complete_deterministic_minimal_machine_covers_every_state() {
        let text = "fsm det\ninputs a b\noutputs 0 1\nstates p q r\ninitial p\n\
                    trans p a 0 q\ntrans p b 0 p\ntrans q a 0 r\ntrans q b 1 p\n\
                    trans r a 1 r\ntrans r b 0 q\n";
        let m = parse_fsm(text).unwrap();
        let cover = compute_state_cover(&m);
        assert_eq!(cover.entries.len(), m.num_states());
    }

    #[test]
    fn cover_entries_d_reach_their_state() {
        for m in [corpus::mex(), corpus::cr(), corpus::cr_completed()] {
            let auto = ReachAutomaton::build(&m);
            let cover = compute_state_cover(&m);
            for (&s, seq) in &cover.entries {
                assert_eq!(auto.d_reached_state(seq), Some(s));
            }
        }
    }

    #[test]
    fn uncovered_states_are_not_d_reachable_at_any_length() {
        // exhaustive over all input sequences up to the node count of the
        // reachability automaton
        let m = corpus::mex();
        let auto = ReachAutomaton::build(&m);
        let cover = compute_state_cover(&m);
        let mut frontier = vec![InputSequence::empty()];
        for _ in 0..auto.num_nodes() {
            let mut next = Vec::new();
            for seq in &frontier {
                for x in m.inputs() {
                    let mut longer = seq.clone();
                    longer.0.push(x);
                    if let Some(s) = auto.d_reached_state(&longer) {
                        assert!(
                            cover.entries.contains_key(&s),
                            "state {} d-reached but not covered",
                            m.state_name(s)
                        );
                    }
                    next.push(longer);
                }
            }
            frontier = next;
        }
    }

    #[test]
    fn responses_are_language_members_with_cover_inputs() {
        let m = corpus::cr_completed();
        let cover = compute_state_cover(&m);
        for trace in &cover.responses {
            assert!(m.language_member(trace));
            assert!(cover.entries.values().any(|v| *v == trace.inputs()));
        }
        // and every cover sequence has at least one response
        for seq in cover.entries.values() {
            assert!(cover.responses.iter().any(|t| t.inputs() == *seq));
        }
    }

    #[test]
    fn cover_text_format() {
        let m = corpus::mex();
        let cover = compute_state_cover(&m);
        assert_eq!(cover.to_text(&m), "s0\teps\ns2\ta.b\n");
    }
}
