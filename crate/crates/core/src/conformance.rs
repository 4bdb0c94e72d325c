//! Ground-truth conformance checking and fault-domain sampling.
//!
//! [`check_strong_reduction`] decides the strong-reduction relation by
//! exploring the synchronous product of implementation and reference over
//! shared IO pairs: the implementation conforms iff its language stays
//! inside the reference language and both machines enable the same inputs
//! after every common trace. [`evaluate_pass`] applies the pass relation of
//! a test suite white-box, enumerating every implementation response to
//! every case prefix. [`sample_mutants`] draws labelled mutants from the
//! fault domain to exercise soundness and exhaustiveness of generated
//! suites.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::distinguish::{rdistinguishes, RdVariant};
use crate::fsm::{Fsm, FsmBuilder, InputId, InputSequence, IoTrace, OutputId, ParseOptions, StateId};
use crate::random::rng;

/// How a conformance violation manifests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// The implementation produced an IO trace outside the reference
    /// language.
    OutputViolation,
    /// After a common trace the implementation enables a different input
    /// set than the reference.
    EnabledInputMismatch,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureKind::OutputViolation => write!(f, "output-violation"),
            FailureKind::EnabledInputMismatch => write!(f, "enabled-input-mismatch"),
        }
    }
}

/// Outcome of a conformance check or suite execution. The witness (present
/// iff the check failed) is an IO trace over the reference alphabet that
/// demonstrates the violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub conforms: bool,
    pub witness: Option<IoTrace>,
    pub kind: Option<FailureKind>,
}

impl Verdict {
    pub fn pass() -> Verdict {
        Verdict {
            conforms: true,
            witness: None,
            kind: None,
        }
    }

    pub fn fail(kind: FailureKind, witness: IoTrace) -> Verdict {
        Verdict {
            conforms: false,
            witness: Some(witness),
            kind: Some(kind),
        }
    }

    /// `CONFORMS` or `VIOLATION <kind>: <trace>`.
    pub fn describe(&self, fsm: &Fsm) -> String {
        match (&self.kind, &self.witness) {
            (Some(kind), Some(witness)) => {
                format!("VIOLATION {kind}: {}", fsm.format_trace(witness))
            }
            _ => "CONFORMS".to_string(),
        }
    }
}

/// The fault domain: all observable machines over the reference alphabets
/// with at most `m` states.
#[derive(Debug, Clone, Copy)]
pub struct FaultDomainSpec {
    pub m: usize,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConformanceError {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
}

/// Index translation between two machines sharing the same alphabets
/// (possibly declared in different orders).
struct AlphabetMap {
    input_to_ref: Vec<InputId>,
    output_to_ref: Vec<OutputId>,
    input_from_ref: Vec<InputId>,
}

impl AlphabetMap {
    fn build(imp: &Fsm, reference: &Fsm) -> Result<AlphabetMap, ConformanceError> {
        if imp.num_inputs() != reference.num_inputs()
            || imp.num_outputs() != reference.num_outputs()
        {
            return Err(ConformanceError::AlphabetMismatch(format!(
                "{} inputs / {} outputs vs {} inputs / {} outputs",
                imp.num_inputs(),
                imp.num_outputs(),
                reference.num_inputs(),
                reference.num_outputs()
            )));
        }
        let mut input_to_ref = Vec::with_capacity(imp.num_inputs());
        for name in imp.input_names() {
            match reference.input_id(name) {
                Some(x) => input_to_ref.push(x),
                None => {
                    return Err(ConformanceError::AlphabetMismatch(format!(
                        "input `{name}` missing from reference"
                    )))
                }
            }
        }
        let mut output_to_ref = Vec::with_capacity(imp.num_outputs());
        for name in imp.output_names() {
            match reference.output_id(name) {
                Some(y) => output_to_ref.push(y),
                None => {
                    return Err(ConformanceError::AlphabetMismatch(format!(
                        "output `{name}` missing from reference"
                    )))
                }
            }
        }
        let mut input_from_ref = vec![InputId(0); imp.num_inputs()];
        for (i, &r) in input_to_ref.iter().enumerate() {
            input_from_ref[r.0] = InputId(i);
        }
        Ok(AlphabetMap {
            input_to_ref,
            output_to_ref,
            input_from_ref,
        })
    }

    /// Defined inputs of an implementation state, as reference ids, sorted.
    fn defined_as_ref(&self, imp: &Fsm, t: StateId) -> Vec<InputId> {
        let mut v: Vec<InputId> = imp
            .defined_inputs(t)
            .iter()
            .map(|&x| self.input_to_ref[x.0])
            .collect();
        v.sort();
        v
    }
}

/// Decides `I` strong-reduction-conforms-to `M` by breadth-first search
/// over the synchronous product, visiting at most `|I| * |M|` state pairs.
/// The returned witness is a shortest one.
pub fn check_strong_reduction(imp: &Fsm, reference: &Fsm) -> Result<Verdict, ConformanceError> {
    let map = AlphabetMap::build(imp, reference)?;

    // product nodes with back-pointers for witness reconstruction
    struct Node {
        imp_state: StateId,
        ref_state: StateId,
        parent: Option<(usize, InputId, OutputId)>, // reference-alphabet ids
    }
    let trace_to = |nodes: &Vec<Node>, mut idx: usize| -> IoTrace {
        let mut pairs = Vec::new();
        while let Some((p, x, y)) = nodes[idx].parent {
            pairs.push((x, y));
            idx = p;
        }
        pairs.reverse();
        IoTrace(pairs)
    };

    let mut nodes = vec![Node {
        imp_state: imp.initial(),
        ref_state: reference.initial(),
        parent: None,
    }];
    let mut visited: HashMap<(StateId, StateId), ()> = HashMap::new();
    visited.insert((imp.initial(), reference.initial()), ());
    let mut queue = VecDeque::from([0usize]);

    while let Some(idx) = queue.pop_front() {
        let (t, s) = (nodes[idx].imp_state, nodes[idx].ref_state);

        let imp_defined = map.defined_as_ref(imp, t);
        if imp_defined != reference.defined_inputs(s) {
            return Ok(Verdict::fail(
                FailureKind::EnabledInputMismatch,
                trace_to(&nodes, idx),
            ));
        }

        for &x_ref in &imp_defined {
            let x_imp = map.input_from_ref[x_ref.0];
            let mut steps: Vec<(OutputId, StateId)> = imp
                .successors(t, x_imp)
                .iter()
                .map(|&(y, t2)| (map.output_to_ref[y.0], t2))
                .collect();
            steps.sort();
            for (y_ref, t2) in steps {
                match reference.step(s, x_ref, y_ref) {
                    None => {
                        let mut witness = trace_to(&nodes, idx);
                        witness.push(x_ref, y_ref);
                        return Ok(Verdict::fail(FailureKind::OutputViolation, witness));
                    }
                    Some(s2) => {
                        if visited.insert((t2, s2), ()).is_none() {
                            nodes.push(Node {
                                imp_state: t2,
                                ref_state: s2,
                                parent: Some((idx, x_ref, y_ref)),
                            });
                            queue.push_back(nodes.len() - 1);
                        }
                    }
                }
            }
        }
    }

    Ok(Verdict::pass())
}

/// Applies the pass relation of a suite white-box: for every case, every
/// prefix and every implementation response to it, the response must lie in
/// the reference language and lead to a state with matching enabled inputs.
///
/// Exhaustive response enumeration realises the limit the fairness
/// assumption postulates for repeated grey-box execution.
pub fn evaluate_pass(
    imp: &Fsm,
    cases: &[InputSequence],
    reference: &Fsm,
) -> Result<Verdict, ConformanceError> {
    let map = AlphabetMap::build(imp, reference)?;
    for case in cases {
        let mut trace = IoTrace::empty();
        if let Some(verdict) = walk_case(
            imp,
            reference,
            &map,
            imp.initial(),
            reference.initial(),
            case,
            0,
            &mut trace,
        ) {
            return Ok(verdict);
        }
    }
    Ok(Verdict::pass())
}

#[allow(clippy::too_many_arguments)]
fn walk_case(
    imp: &Fsm,
    reference: &Fsm,
    map: &AlphabetMap,
    t: StateId,
    s: StateId,
    case: &InputSequence,
    depth: usize,
    trace: &mut IoTrace,
) -> Option<Verdict> {
    if map.defined_as_ref(imp, t) != reference.defined_inputs(s) {
        return Some(Verdict::fail(
            FailureKind::EnabledInputMismatch,
            trace.clone(),
        ));
    }
    if depth == case.len() {
        return None;
    }
    let x_ref = case.0[depth];
    let x_imp = map.input_from_ref[x_ref.0];
    let mut steps: Vec<(OutputId, StateId)> = imp
        .successors(t, x_imp)
        .iter()
        .map(|&(y, t2)| (map.output_to_ref[y.0], t2))
        .collect();
    steps.sort();
    for (y_ref, t2) in steps {
        match reference.step(s, x_ref, y_ref) {
            None => {
                let mut witness = trace.clone();
                witness.push(x_ref, y_ref);
                return Some(Verdict::fail(FailureKind::OutputViolation, witness));
            }
            Some(s2) => {
                trace.push(x_ref, y_ref);
                let verdict = walk_case(imp, reference, map, t2, s2, case, depth + 1, trace);
                trace.0.pop();
                if verdict.is_some() {
                    return verdict;
                }
            }
        }
    }
    None
}

/// A sampled fault-domain member together with its ground-truth verdict.
#[derive(Debug, Clone)]
pub struct Mutant {
    pub fsm: Fsm,
    pub verdict: Verdict,
    pub operator: &'static str,
}

/// Draws `count` pseudo-random mutants of `reference` from the fault domain
/// `F(Σ_I, Σ_O, spec.m)`. All mutants are observable and keep the reference
/// alphabets; unreachable states introduced by mutation are pruned. Each
/// mutant carries its [`check_strong_reduction`] verdict.
pub fn sample_mutants(
    reference: &Fsm,
    spec: &FaultDomainSpec,
    count: usize,
    seed: u64,
) -> Vec<Mutant> {
    assert!(spec.m >= reference.num_states(), "fault domain below |M|");
    let mut rng = rng(seed);
    let mut mutants = Vec::with_capacity(count);
    while mutants.len() < count {
        if let Some((fsm, operator)) = mutate_once(reference, spec, &mut rng) {
            let verdict =
                check_strong_reduction(&fsm, reference).expect("mutants keep the alphabets");
            mutants.push(Mutant {
                fsm,
                verdict,
                operator,
            });
        }
    }
    mutants
}

fn mutate_once(
    reference: &Fsm,
    spec: &FaultDomainSpec,
    rng: &mut ChaCha8Rng,
) -> Option<(Fsm, &'static str)> {
    let transitions = reference.transitions();
    let op = rng.random_range(0..5u32);
    let mut builder = FsmBuilder::from_fsm(reference);
    let prune = ParseOptions {
        prune_unreachable: true,
    };
    match op {
        0 => {
            // output change, keeping (source, input, output) unique
            let t = transitions[rng.random_range(0..transitions.len())];
            let candidates: Vec<OutputId> = reference
                .outputs()
                .filter(|&y| y != t.output && reference.step(t.source, t.input, y).is_none())
                .collect();
            if candidates.is_empty() {
                return None;
            }
            let y = candidates[rng.random_range(0..candidates.len())];
            builder.remove_transition(&t);
            builder.transition(t.source, t.input, y, t.target);
            Some((builder.build_with(&prune).ok()?, "output-change"))
        }
        1 => {
            // target redirect
            if reference.num_states() < 2 {
                return None;
            }
            let t = transitions[rng.random_range(0..transitions.len())];
            let mut target = StateId(rng.random_range(0..reference.num_states()));
            if target == t.target {
                target = StateId((target.0 + 1) % reference.num_states());
            }
            builder.remove_transition(&t);
            builder.transition(t.source, t.input, t.output, target);
            Some((builder.build_with(&prune).ok()?, "target-redirect"))
        }
        2 => {
            // add a transition on a disabled input
            let candidates: Vec<(StateId, InputId)> = reference
                .states()
                .flat_map(|s| {
                    reference
                        .inputs()
                        .filter(move |&x| reference.successors(s, x).is_empty())
                        .map(move |x| (s, x))
                })
                .collect();
            if candidates.is_empty() {
                return None;
            }
            let (s, x) = candidates[rng.random_range(0..candidates.len())];
            let y = OutputId(rng.random_range(0..reference.num_outputs()));
            let target = StateId(rng.random_range(0..reference.num_states()));
            builder.transition(s, x, y, target);
            Some((builder.build_with(&prune).ok()?, "add-on-disabled"))
        }
        3 => {
            // transition removal (may disable an input)
            if transitions.len() <= 1 {
                return None;
            }
            let t = transitions[rng.random_range(0..transitions.len())];
            builder.remove_transition(&t);
            Some((builder.build_with(&prune).ok()?, "removal"))
        }
        _ => {
            // split a state: clone its outgoing behaviour into a fresh state
            // and redirect one incoming transition there
            if reference.num_states() >= spec.m {
                return None;
            }
            let t_in = transitions[rng.random_range(0..transitions.len())];
            let split = t_in.target;
            let fresh = builder.state(&format!("{}__split", reference.state_name(split)));
            for t in reference.transitions() {
                if t.source == split {
                    builder.transition(fresh, t.input, t.output, t.target);
                }
            }
            builder.remove_transition(&t_in);
            builder.transition(t_in.source, t_in.input, t_in.output, fresh);
            Some((builder.build_with(&prune).ok()?, "state-split"))
        }
    }
}

/// Samples conforming implementations: repeatedly drops one output choice
/// of a nondeterministic `(state, input)` pair, which preserves both the
/// language bound and the enabled-input sets.
pub fn sample_strong_reductions(reference: &Fsm, count: usize, seed: u64) -> Vec<Fsm> {
    let mut rng = rng(seed);
    let mut result = Vec::with_capacity(count);
    for _ in 0..count {
        let mut builder = FsmBuilder::from_fsm(reference);
        let removals = rng.random_range(1..=3usize);
        for _ in 0..removals {
            let removable: Vec<crate::fsm::Transition> = builder
                .transitions()
                .filter(|t| {
                    builder
                        .transitions()
                        .filter(|u| u.source == t.source && u.input == t.input)
                        .count()
                        >= 2
                })
                .copied()
                .collect();
            if removable.is_empty() {
                break;
            }
            let t = removable[rng.random_range(0..removable.len())];
            builder.remove_transition(&t);
        }
        result.push(
            builder
                .build_with(&ParseOptions {
                    prune_unreachable: true,
                })
                .expect("dropping choices keeps the machine valid"),
        );
    }
    result
}

/// Why a lemma-1 instance was rejected rather than evaluated.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Lemma1Error {
    #[error(transparent)]
    Alphabet(#[from] ConformanceError),
    #[error("trace is not shared by implementation and reference")]
    TraceNotShared,
    #[error("the set does not r-distinguish the reached reference states")]
    PairNotDistinguished,
    #[error("the implementation fails the distinguishing suite")]
    SuiteFails,
}

/// Checks the distinguishing-experiment property on one instance: given
/// shared traces `alpha`, `beta`, a set `w` that r-distinguishes the
/// reference states they reach, and an implementation that passes
/// `{inputs(alpha), inputs(beta)}.w`, the implementation states reached by
/// the traces must be distinct. Returns that distinctness; under the stated
/// preconditions it must always come back `true`.
pub fn check_lemma1(
    reference: &Fsm,
    imp: &Fsm,
    w: &BTreeSet<InputSequence>,
    alpha: &IoTrace,
    beta: &IoTrace,
) -> Result<bool, Lemma1Error> {
    let map = AlphabetMap::build(imp, reference)?;
    let to_imp_trace = |trace: &IoTrace| -> Option<IoTrace> {
        let mut out = IoTrace::empty();
        for &(x, y) in &trace.0 {
            let x_imp = map.input_from_ref[x.0];
            let y_imp = OutputId(
                map.output_to_ref
                    .iter()
                    .position(|&r| r == y)
                    .expect("bijective output map"),
            );
            out.push(x_imp, y_imp);
        }
        imp.after(imp.initial(), &out).map(|_| out)
    };

    let s_alpha = reference
        .after(reference.initial(), alpha)
        .ok_or(Lemma1Error::TraceNotShared)?;
    let s_beta = reference
        .after(reference.initial(), beta)
        .ok_or(Lemma1Error::TraceNotShared)?;
    let alpha_imp = to_imp_trace(alpha).ok_or(Lemma1Error::TraceNotShared)?;
    let beta_imp = to_imp_trace(beta).ok_or(Lemma1Error::TraceNotShared)?;

    if !rdistinguishes(reference, w, s_alpha, s_beta, RdVariant::Rd1) {
        return Err(Lemma1Error::PairNotDistinguished);
    }

    let mut cases: Vec<InputSequence> = Vec::new();
    for base in [alpha.inputs(), beta.inputs()] {
        if w.is_empty() {
            cases.push(base.clone());
        } else {
            for w_seq in w {
                cases.push(base.concat(w_seq));
            }
        }
    }
    if !evaluate_pass(imp, &cases, reference)?.conforms {
        return Err(Lemma1Error::SuiteFails);
    }

    let t_alpha = imp.after(imp.initial(), &alpha_imp);
    let t_beta = imp.after(imp.initial(), &beta_imp);
    Ok(t_alpha != t_beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::generate::{generate_test_suite, TestSuite};
    use crate::random::{random_fsm, random_trace, RandomFsmConfig};

    fn mex_suite() -> (Fsm, TestSuite) {
        let m = corpus::mex();
        let suite = generate_test_suite(&m, 4, RdVariant::Rd1).unwrap();
        (m, suite)
    }

    #[test]
    fn strong_reduction_is_reflexive() {
        for m in [corpus::mex(), corpus::cr(), corpus::cr_completed()] {
            let verdict = check_strong_reduction(&m, &m).unwrap();
            assert!(verdict.conforms, "{} vs itself", m.name());
        }
    }

    #[test]
    fn pruned_output_choices_conform() {
        for m in [corpus::mex(), corpus::cr_completed()] {
            for imp in sample_strong_reductions(&m, 25, 5) {
                let verdict = check_strong_reduction(&imp, &m).unwrap();
                assert!(verdict.conforms, "pruned mutant of {}", m.name());
            }
        }
    }

    #[test]
    fn added_transition_on_disabled_input_is_enabled_mismatch() {
        let cr = corpus::cr_completed();
        let init = cr.state_id("init").unwrap();
        let cir = cr.input_id("ci.r").unwrap();
        let mut b = FsmBuilder::from_fsm(&cr);
        b.transition(init, cir, OutputId(0), init);
        let imp = b.build().unwrap();
        let verdict = check_strong_reduction(&imp, &cr).unwrap();
        assert!(!verdict.conforms);
        assert_eq!(verdict.kind, Some(FailureKind::EnabledInputMismatch));
        // the mismatch is already visible at the initial state
        assert_eq!(verdict.witness, Some(IoTrace::empty()));
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let mex = corpus::mex();
        let cr = corpus::cr();
        assert!(check_strong_reduction(&mex, &cr).is_err());
    }

    #[test]
    fn pass_relation_examples() {
        let (m, suite) = mex_suite();
        // conforming mutants pass
        for imp in sample_strong_reductions(&m, 10, 11) {
            let verdict = evaluate_pass(&imp, &suite.cases, &m).unwrap();
            assert!(verdict.conforms);
        }
        // non-conforming mutants within the fault domain fail
        let mut checked = 0;
        for mutant in sample_mutants(&m, &FaultDomainSpec { m: 4 }, 120, 12) {
            if !mutant.verdict.conforms {
                let verdict = evaluate_pass(&mutant.fsm, &suite.cases, &m).unwrap();
                assert!(
                    !verdict.conforms,
                    "undetected {} mutant",
                    mutant.operator
                );
                checked += 1;
            }
        }
        assert!(checked > 20, "mutant batch too tame: {checked}");
    }

    #[test]
    fn empty_suite_passes_anything_with_any_delta() {
        let m = corpus::mex();
        let mutants = sample_mutants(&m, &FaultDomainSpec { m: 4 }, 10, 3);
        for mutant in mutants {
            let verdict = evaluate_pass(&mutant.fsm, &[], &m).unwrap();
            assert!(verdict.conforms);
        }
    }

    #[test]
    fn witnesses_replay_on_both_machines() {
        let m = corpus::cr_completed();
        for mutant in sample_mutants(&m, &FaultDomainSpec { m: 10 }, 150, 99) {
            let Some(witness) = &mutant.verdict.witness else {
                continue;
            };
            match mutant.verdict.kind.unwrap() {
                FailureKind::OutputViolation => {
                    assert!(!m.language_member(witness));
                    assert!(witness.len() > 0);
                    assert!(m.language_member(&witness.prefix(witness.len() - 1)));
                    assert!(mutant.fsm.language_member(witness));
                }
                FailureKind::EnabledInputMismatch => {
                    assert!(m.language_member(witness));
                    assert!(mutant.fsm.language_member(witness));
                    let s = m.after(m.initial(), witness).unwrap();
                    let t = mutant.fsm.after(mutant.fsm.initial(), witness).unwrap();
                    assert_ne!(m.defined_inputs(s), mutant.fsm.defined_inputs(t));
                }
            }
        }
    }

    #[test]
    fn conforming_mutants_are_reductions() {
        let m = corpus::cr_completed();
        let mut rng = crate::random::rng(41);
        for mutant in sample_mutants(&m, &FaultDomainSpec { m: 10 }, 100, 40) {
            if mutant.verdict.conforms {
                for _ in 0..50 {
                    let trace = random_trace(&mutant.fsm, &mut rng, 12);
                    assert!(m.language_member(&trace));
                }
            }
        }
    }

    #[test]
    fn mutant_sampling_is_deterministic_and_bounded() {
        let m = corpus::cr_completed();
        let spec = FaultDomainSpec { m: 12 };
        let a = sample_mutants(&m, &spec, 60, 7);
        let b = sample_mutants(&m, &spec, 60, 7);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.fsm, y.fsm);
            assert_eq!(x.verdict, y.verdict);
            assert!(x.fsm.num_states() <= spec.m);
        }
        // a different seed gives a different batch
        let c = sample_mutants(&m, &spec, 60, 8);
        assert!(a.iter().zip(&c).any(|(x, y)| x.fsm != y.fsm));
    }

    #[test]
    fn lemma1_r0_base_case() {
        // an r(0)-distinguishable pair is separated by the empty set as soon
        // as the implementation passes the two access traces
        let m = corpus::mex();
        let imp = m.clone();
        let a = m.input_id("a").unwrap();
        let b = m.input_id("b").unwrap();
        let one = m.output_id("1").unwrap();
        let two = m.output_id("2").unwrap();
        // a/1 reaches s2, b/2 reaches s3: an r(0) pair
        let alpha = IoTrace(vec![(a, one)]);
        let beta = IoTrace(vec![(b, two)]);
        let distinct = check_lemma1(&m, &imp, &BTreeSet::new(), &alpha, &beta).unwrap();
        assert!(distinct);
    }

    #[test]
    fn lemma1_rejects_bad_preconditions() {
        let m = corpus::mex();
        let a = m.input_id("a").unwrap();
        let one = m.output_id("1").unwrap();
        let alpha = IoTrace(vec![(a, one)]);
        // same trace twice: the pair is a single state, nothing distinguishes it
        assert_eq!(
            check_lemma1(&m, &m, &BTreeSet::new(), &alpha, &alpha),
            Err(Lemma1Error::PairNotDistinguished)
        );
        let three = m.output_id("3").unwrap();
        let bogus = IoTrace(vec![(a, three)]);
        assert_eq!(
            check_lemma1(&m, &m, &BTreeSet::new(), &bogus, &alpha),
            Err(Lemma1Error::TraceNotShared)
        );
    }

    #[test]
    fn product_oracle_matches_brute_force_on_random_pairs() {
        let mut rng = crate::random::rng(55);
        for i in 0..40 {
            let cfg = RandomFsmConfig {
                states: 2 + (i % 4),
                inputs: 2,
                outputs: 2 + (i % 2),
                density: 0.7,
                branching: 0.4,
            };
            let m = random_fsm("ref", &cfg, &mut rng);
            let mutants = sample_mutants(&m, &FaultDomainSpec { m: cfg.states + 1 }, 5, i as u64);
            for mutant in mutants {
                let expected = bounded_check(&mutant.fsm, &m);
                assert_eq!(
                    mutant.verdict.conforms, expected,
                    "oracle mismatch on seed {i}"
                );
            }
        }
    }

    // reference implementation by bounded exploration of implementation
    // traces, memoised on state pairs
    fn bounded_check(imp: &Fsm, reference: &Fsm) -> bool {
        fn go(
            imp: &Fsm,
            reference: &Fsm,
            t: StateId,
            s: StateId,
            depth: usize,
            seen: &mut BTreeSet<(StateId, StateId)>,
        ) -> bool {
            if !seen.insert((t, s)) || depth == 0 {
                return true;
            }
            let dt: Vec<&str> = imp
                .defined_inputs(t)
                .iter()
                .map(|&x| imp.input_name(x))
                .collect();
            let ds: Vec<&str> = reference
                .defined_inputs(s)
                .iter()
                .map(|&x| reference.input_name(x))
                .collect();
            if dt != ds {
                return false;
            }
            for &x in imp.defined_inputs(t) {
                let x_ref = reference.input_id(imp.input_name(x)).unwrap();
                for &(y, t2) in imp.successors(t, x) {
                    let y_ref = reference.output_id(imp.output_name(y)).unwrap();
                    match reference.step(s, x_ref, y_ref) {
                        None => return false,
                        Some(s2) => {
                            if !go(imp, reference, t2, s2, depth - 1, seen) {
                                return false;
                            }
                        }
                    }
                }
            }
            true
        }
        let bound = imp.num_states() * reference.num_states();
        go(
            imp,
            reference,
            imp.initial(),
            reference.initial(),
            bound,
            &mut BTreeSet::new(),
        )
    }
}
