//! The model files shipped with the repository, compiled in for tests and
//! examples.

use std::collections::{BTreeMap, BTreeSet};

use crate::fsm::{parse_fsm, Fsm, InputId, StateId};

pub const MEX_TEXT: &str = include_str!("../../../models/mex.fsm");
pub const CR_TEXT: &str = include_str!("../../../models/cr.fsm");
pub const CR_COMPLETE_TEXT: &str = include_str!("../../../models/cr_complete.fsm");

/// The four-state example machine.
pub fn mex() -> Fsm {
    parse_fsm(MEX_TEXT).expect("mex.fsm is valid")
}

/// The card reader model without ignored-input self-loops.
pub fn cr() -> Fsm {
    parse_fsm(CR_TEXT).expect("cr.fsm is valid")
}

/// The card reader model with ignored inputs completed as null self-loops.
pub fn cr_completed() -> Fsm {
    parse_fsm(CR_COMPLETE_TEXT).expect("cr_complete.fsm is valid")
}

/// The ignored-input table of the card reader: payment requests are ignored
/// everywhere except in `init`.
pub fn cr_ignored_map(cr: &Fsm) -> BTreeMap<StateId, BTreeSet<InputId>> {
    let ignored: BTreeSet<InputId> = ["pr.A", "pr.a"]
        .iter()
        .map(|n| cr.input_id(n).expect("payment request input"))
        .collect();
    let init = cr.state_id("init").expect("init state");
    cr.states()
        .filter(|&s| s != init)
        .map(|s| (s, ignored.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completed_file_matches_completion_of_raw_model() {
        let raw = cr();
        let completed = raw
            .complete_ignored(&cr_ignored_map(&raw), "null")
            .unwrap();
        assert_eq!(completed, cr_completed());
        assert_eq!(completed.serialize(), cr_completed().serialize());
    }
}
