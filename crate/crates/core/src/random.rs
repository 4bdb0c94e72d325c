//! Seeded generation of random machines and traces, used by the mutation
//! experiments and the property tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fsm::{Fsm, FsmBuilder, InputId, IoTrace, OutputId, StateId};

/// A deterministic RNG for the given seed. All randomised code in this crate
/// goes through ChaCha so results are stable across platforms and releases.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape parameters for [`random_fsm`].
#[derive(Debug, Clone, Copy)]
pub struct RandomFsmConfig {
    pub states: usize,
    pub inputs: usize,
    pub outputs: usize,
    /// Probability that an input is defined in a state (beyond the
    /// transitions needed for reachability).
    pub density: f64,
    /// Probability of adding one more nondeterministic output choice to a
    /// defined `(state, input)` pair, applied repeatedly.
    pub branching: f64,
}

impl Default for RandomFsmConfig {
    fn default() -> Self {
        RandomFsmConfig {
            states: 4,
            inputs: 2,
            outputs: 3,
            density: 0.8,
            branching: 0.3,
        }
    }
}

/// Generates an observable, possibly partial, possibly nondeterministic
/// machine in which every state is reachable.
pub fn random_fsm(name: &str, cfg: &RandomFsmConfig, rng: &mut ChaCha8Rng) -> Fsm {
    assert!(cfg.states > 0 && cfg.inputs > 0 && cfg.outputs > 0);
    let mut b = FsmBuilder::new(name);
    for i in 0..cfg.inputs {
        b.input(&format!("x{i}"));
    }
    for o in 0..cfg.outputs {
        b.output(&format!("y{o}"));
    }
    for s in 0..cfg.states {
        b.state(&format!("s{s}"));
    }
    b.initial(StateId(0));

    // outputs already used per (state, input); one target per output keeps
    // the machine observable
    let mut used = vec![vec![Vec::<OutputId>::new(); cfg.inputs]; cfg.states];

    // spanning structure: each state gets one incoming transition from an
    // earlier state; only cells with a free output slot are candidates, and
    // one always exists (target-1 placed so far, capacity at least target)
    for target in 1..cfg.states {
        let cells: Vec<(usize, usize)> = (0..target)
            .flat_map(|s| (0..cfg.inputs).map(move |x| (s, x)))
            .filter(|&(s, x)| used[s][x].len() < cfg.outputs)
            .collect();
        let (source, input) = cells[rng.random_range(0..cells.len())];
        let free: Vec<usize> = (0..cfg.outputs)
            .filter(|&y| !used[source][input].contains(&OutputId(y)))
            .collect();
        let output = free[rng.random_range(0..free.len())];
        used[source][input].push(OutputId(output));
        b.transition(
            StateId(source),
            InputId(input),
            OutputId(output),
            StateId(target),
        );
    }

    for source in 0..cfg.states {
        for input in 0..cfg.inputs {
            if used[source][input].is_empty() && !rng.random_bool(cfg.density) {
                continue;
            }
            let mut choices = 1 + used[source][input].len();
            while choices < cfg.outputs && rng.random_bool(cfg.branching) {
                choices += 1;
            }
            while used[source][input].len() < choices {
                let free: Vec<usize> = (0..cfg.outputs)
                    .filter(|&y| !used[source][input].contains(&OutputId(y)))
                    .collect();
                let output = free[rng.random_range(0..free.len())];
                used[source][input].push(OutputId(output));
                let target = rng.random_range(0..cfg.states);
                b.transition(
                    StateId(source),
                    InputId(input),
                    OutputId(output),
                    StateId(target),
                );
            }
        }
    }

    b.build().expect("construction keeps the machine valid")
}

/// A random member of the language of `fsm`, at most `max_len` pairs long.
pub fn random_trace(fsm: &Fsm, rng: &mut ChaCha8Rng, max_len: usize) -> IoTrace {
    let mut trace = IoTrace::empty();
    let mut state = fsm.initial();
    let len = rng.random_range(0..=max_len);
    for _ in 0..len {
        let defined = fsm.defined_inputs(state);
        if defined.is_empty() {
            break;
        }
        let x = defined[rng.random_range(0..defined.len())];
        let succ = fsm.successors(state, x);
        let (y, next) = succ[rng.random_range(0..succ.len())];
        trace.push(x, y);
        state = next;
    }
    trace
}
