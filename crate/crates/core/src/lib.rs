//! Complete test suite generation for the strong reduction conformance
//! relation on partial, nondeterministic, observable Mealy machines.
//!
//! Strong reduction requires an implementation to stay within the language
//! of its reference model *and* to enable, after every common trace, exactly
//! the inputs the model enables. The generator in [`generate`] produces
//! m-complete suites for this relation by combining deterministic
//! reachability analysis ([`reach`]), reliable distinguishability
//! ([`distinguish`]) and state counting. Suites can be checked against
//! white-box models ([`conformance`]) or executed grey-box against an
//! external system under test ([`harness`]).

pub mod conformance;
pub mod corpus;
pub mod distinguish;
pub mod fsm;
pub mod generate;
pub mod harness;
pub mod random;
pub mod reach;
mod trie;

pub use conformance::{
    check_strong_reduction, evaluate_pass, sample_mutants, FailureKind, FaultDomainSpec, Mutant,
    Verdict,
};
pub use distinguish::{collect_rd_sets, compute_sd_family, RDistTable, RdVariant, SdFamily};
pub use fsm::{
    parse_fsm, parse_fsm_with, Fsm, FsmBuilder, FsmError, InputId, InputSequence, IoTrace,
    OutputId, ParseOptions, StateId,
};
pub use generate::{generate_test_suite, verify_bounds, Budget, GenerateError, TestSuite};
pub use reach::{compute_state_cover, ReachAutomaton, StateCover};
