//! Reliable distinguishability of states.
//!
//! Two states are reliably distinguished by an experiment when the verdict
//! does not depend on how the machine resolves nondeterministic choices.
//! The base case compares the defined-input sets (observable in a grey-box
//! setting at no input cost); the inductive case applies an input on which
//! either the output sets are disjoint or every shared output leads to an
//! already-distinguished pair.
//!
//! Three variants are supported:
//!
//! * `rd1` — defined-input comparison allowed as base case,
//! * `rd2` — no base case, but an input defined in only one of the two
//!   states still counts as disjoint-output evidence,
//! * `rd3` — only inputs defined in both states are considered.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::fsm::{Fsm, InputId, InputSequence, OutputId, StateId};
use crate::trie::{SeqTrie, ROOT};

/// Which distinguishability rules apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RdVariant {
    Rd1,
    Rd2,
    Rd3,
}

impl fmt::Display for RdVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdVariant::Rd1 => write!(f, "rd1"),
            RdVariant::Rd2 => write!(f, "rd2"),
            RdVariant::Rd3 => write!(f, "rd3"),
        }
    }
}

impl FromStr for RdVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rd1" => Ok(RdVariant::Rd1),
            "rd2" => Ok(RdVariant::Rd2),
            "rd3" => Ok(RdVariant::Rd3),
            other => Err(format!("unknown r-distinguishability variant `{other}`")),
        }
    }
}

/// True iff the defined-input sets of the two states differ.
pub fn r0_distinguishable(fsm: &Fsm, s1: StateId, s2: StateId) -> bool {
    fsm.defined_inputs(s1) != fsm.defined_inputs(s2)
}

fn ordered(s1: StateId, s2: StateId) -> (StateId, StateId) {
    if s1 <= s2 {
        (s1, s2)
    } else {
        (s2, s1)
    }
}

/// The inputs that may distinguish `s1` and `s2` under `variant`, in
/// canonical order.
fn eligible_inputs(fsm: &Fsm, s1: StateId, s2: StateId, variant: RdVariant) -> Vec<InputId> {
    let d1 = fsm.defined_inputs(s1);
    let d2 = fsm.defined_inputs(s2);
    match variant {
        RdVariant::Rd1 | RdVariant::Rd3 => d1.iter().filter(|x| d2.contains(x)).copied().collect(),
        RdVariant::Rd2 => {
            let mut union: Vec<InputId> = d1.to_vec();
            union.extend(d2.iter().filter(|x| !d1.contains(x)));
            union.sort();
            union
        }
    }
}

fn shared_outputs(fsm: &Fsm, s1: StateId, s2: StateId, x: InputId) -> Vec<OutputId> {
    let o2: BTreeSet<OutputId> = fsm.out(s2, x).into_iter().collect();
    fsm.out(s1, x).into_iter().filter(|y| o2.contains(y)).collect()
}

/// Per-pair r-distinguishing sets.
///
/// Pairs without an entry are not r-distinguishable under the table's
/// variant. An entry with an empty set marks a pair distinguished by
/// defined-input comparison alone (`rd1` only).
#[derive(Debug, Clone)]
pub struct RDistTable {
    variant: RdVariant,
    entries: BTreeMap<(StateId, StateId), BTreeSet<InputSequence>>,
}

impl RDistTable {
    pub fn variant(&self) -> RdVariant {
        self.variant
    }

    pub fn entries(&self) -> &BTreeMap<(StateId, StateId), BTreeSet<InputSequence>> {
        &self.entries
    }

    /// The stored r-distinguishing set for the (unordered) pair.
    pub fn get(&self, s1: StateId, s2: StateId) -> Option<&BTreeSet<InputSequence>> {
        self.entries.get(&ordered(s1, s2))
    }

    pub fn is_distinguishable(&self, s1: StateId, s2: StateId) -> bool {
        s1 != s2 && self.entries.contains_key(&ordered(s1, s2))
    }

    /// The set of r-distinguishable pairs.
    pub fn pairs(&self) -> BTreeSet<(StateId, StateId)> {
        self.entries.keys().copied().collect()
    }

    /// One `{s1,s2} -> {seq; ...}` line per entry.
    pub fn to_text(&self, fsm: &Fsm) -> String {
        let mut out = String::new();
        for (&(s1, s2), w) in &self.entries {
            let seqs = w
                .iter()
                .map(|seq| fsm.format_inputs(seq))
                .collect::<Vec<_>>()
                .join("; ");
            out.push_str(&format!(
                "{{{},{}}} -> {{{}}}\n",
                fsm.state_name(s1),
                fsm.state_name(s2),
                seqs
            ));
        }
        out
    }
}

/// Computes r-distinguishing sets for all r-distinguishable state pairs by
/// fixpoint iteration.
///
/// Pairs are visited in canonical order and "choose any input" resolves to
/// the least eligible input, so the table is reproducible. The loop runs at
/// most one sweep per pair, each sweep solving at least one pair.
pub fn collect_rd_sets(fsm: &Fsm, variant: RdVariant) -> RDistTable {
    let n = fsm.num_states();
    let mut entries: BTreeMap<(StateId, StateId), BTreeSet<InputSequence>> = BTreeMap::new();
    let mut pending: Vec<(StateId, StateId)> = Vec::new();

    for i in 0..n {
        for j in i + 1..n {
            let (s1, s2) = (StateId(i), StateId(j));
            if variant == RdVariant::Rd1 && r0_distinguishable(fsm, s1, s2) {
                entries.insert((s1, s2), BTreeSet::new());
            } else {
                pending.push((s1, s2));
            }
        }
    }

    loop {
        let mut changed = false;
        let mut i = 0;
        while i < pending.len() {
            let (s1, s2) = pending[i];
            if let Some(w) = try_solve(fsm, variant, s1, s2, &entries) {
                entries.insert((s1, s2), w);
                pending.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed || pending.is_empty() {
            break;
        }
    }

    RDistTable { variant, entries }
}

fn try_solve(
    fsm: &Fsm,
    variant: RdVariant,
    s1: StateId,
    s2: StateId,
    entries: &BTreeMap<(StateId, StateId), BTreeSet<InputSequence>>,
) -> Option<BTreeSet<InputSequence>> {
    'next_input: for x in eligible_inputs(fsm, s1, s2, variant) {
        let mut union: BTreeSet<InputSequence> = BTreeSet::new();
        for y in shared_outputs(fsm, s1, s2, x) {
            let t1 = fsm.step(s1, x, y).expect("shared output has a target");
            let t2 = fsm.step(s2, x, y).expect("shared output has a target");
            if t1 == t2 {
                continue 'next_input;
            }
            match entries.get(&ordered(t1, t2)) {
                Some(wy) => union.extend(wy.iter().cloned()),
                None => continue 'next_input,
            }
        }
        // W = {x}.(union of the successor sets); extending the empty set
        // leaves {x}
        let w = if union.is_empty() {
            BTreeSet::from([InputSequence(vec![x])])
        } else {
            union
                .into_iter()
                .map(|seq| {
                    let mut v = Vec::with_capacity(seq.len() + 1);
                    v.push(x);
                    v.extend_from_slice(&seq.0);
                    InputSequence(v)
                })
                .collect()
        };
        return Some(w);
    }
    None
}

/// Decision procedure: does the input-sequence set `w` r-distinguish
/// `s1` and `s2` under `variant`?
///
/// Runs over the prefix closure of `w`, descending one trie level per
/// applied input, memoised on (residual, residual, pair).
pub fn rdistinguishes<'a, I>(fsm: &Fsm, w: I, s1: StateId, s2: StateId, variant: RdVariant) -> bool
where
    I: IntoIterator<Item = &'a InputSequence>,
{
    let mut trie = SeqTrie::new();
    for seq in w {
        trie.insert_path(seq);
    }
    let mut memo = HashMap::new();
    rdist_residual(fsm, &trie, ROOT, ROOT, s1, s2, variant, &mut memo)
}

pub(crate) type RdistMemo = HashMap<(usize, usize, StateId, StateId), bool>;

/// Core of the decision procedure, shared with the generator's reuse check:
/// the sequence sets for the two traces are the residual languages below
/// `n1` and `n2`, and an input applies only when present in both.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rdist_residual(
    fsm: &Fsm,
    trie: &SeqTrie,
    n1: usize,
    n2: usize,
    s1: StateId,
    s2: StateId,
    variant: RdVariant,
    memo: &mut RdistMemo,
) -> bool {
    if s1 == s2 {
        return false;
    }
    if variant == RdVariant::Rd1 && r0_distinguishable(fsm, s1, s2) {
        return true;
    }
    let key = if (n1, s1) <= (n2, s2) {
        (n1, n2, s1, s2)
    } else {
        (n2, n1, s2, s1)
    };
    if let Some(&known) = memo.get(&key) {
        return known;
    }
    // no cycle risk: recursive calls strictly descend the trie
    let mut result = false;
    'inputs: for x in eligible_inputs(fsm, s1, s2, variant) {
        let (c1, c2) = match (trie.child(n1, x), trie.child(n2, x)) {
            (Some(c1), Some(c2)) => (c1, c2),
            _ => continue,
        };
        for y in shared_outputs(fsm, s1, s2, x) {
            let t1 = fsm.step(s1, x, y).expect("shared output has a target");
            let t2 = fsm.step(s2, x, y).expect("shared output has a target");
            if !rdist_residual(fsm, trie, c1, c2, t1, t2, variant, memo) {
                continue 'inputs;
            }
        }
        result = true;
        break;
    }
    memo.insert(key, result);
    result
}

/// Maximal sets of pairwise r-distinguishable states, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdFamily {
    /// Each set sorted by state index; sets sorted lexicographically.
    pub sets: Vec<Vec<StateId>>,
    /// True if clique enumeration was cut off and a covering subfamily was
    /// returned instead.
    pub capped: bool,
}

impl SdFamily {
    /// One set per line, members comma-separated in canonical order.
    pub fn to_text(&self, fsm: &Fsm) -> String {
        let mut out = String::new();
        for set in &self.sets {
            let names = set
                .iter()
                .map(|&s| fsm.state_name(s))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&format!("{{{names}}}\n"));
        }
        out
    }

    pub fn contains_state(&self, s: StateId) -> bool {
        self.sets.iter().any(|set| set.contains(&s))
    }
}

pub const DEFAULT_CLIQUE_CAP: usize = 10_000;

/// Enumerates the maximal cliques of the r-distinguishability graph.
///
/// States not distinguishable from any other appear as singleton sets, so
/// every state is contained in some member of the family. If enumeration
/// exceeds `DEFAULT_CLIQUE_CAP` cliques the result degrades to a greedy
/// covering subfamily (flagged via `capped`), which keeps later algorithms
/// correct at the price of longer traversals.
pub fn compute_sd_family(fsm: &Fsm, table: &RDistTable) -> SdFamily {
    compute_sd_family_with_cap(fsm, table, DEFAULT_CLIQUE_CAP)
}

pub fn compute_sd_family_with_cap(fsm: &Fsm, table: &RDistTable, cap: usize) -> SdFamily {
    let n = fsm.num_states();
    let mut adj = vec![vec![false; n]; n];
    for &(s1, s2) in table.entries.keys() {
        adj[s1.0][s2.0] = true;
        adj[s2.0][s1.0] = true;
    }

    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let all: Vec<usize> = (0..n).collect();
    let overflow = bron_kerbosch(&adj, Vec::new(), all, Vec::new(), cap, &mut cliques);

    let mut sets: Vec<Vec<StateId>> = if overflow {
        greedy_cover(&adj, n)
    } else {
        cliques
            .into_iter()
            .map(|c| {
                let mut c: Vec<StateId> = c.into_iter().map(StateId).collect();
                c.sort();
                c
            })
            .collect()
    };
    sets.sort();
    sets.dedup();
    SdFamily {
        sets,
        capped: overflow,
    }
}

// Bron-Kerbosch with pivoting; returns true when the cap was exceeded.
fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    cap: usize,
    cliques: &mut Vec<Vec<usize>>,
) -> bool {
    if p.is_empty() && x.is_empty() {
        cliques.push(r);
        return cliques.len() > cap;
    }
    // pivot: the candidate with the most neighbours in p
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p or x is nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        if bron_kerbosch(adj, r2, p2, x2, cap, cliques) {
            return true;
        }
        p.retain(|&u| u != v);
        x.push(v);
    }
    false
}

// One maximal clique per yet-uncovered state, grown in canonical order.
fn greedy_cover(adj: &[Vec<bool>], n: usize) -> Vec<Vec<StateId>> {
    let mut covered = vec![false; n];
    let mut sets = Vec::new();
    for s in 0..n {
        if covered[s] {
            continue;
        }
        let mut clique = vec![s];
        for t in 0..n {
            if t != s && clique.iter().all(|&u| adj[t][u]) {
                clique.push(t);
            }
        }
        clique.sort();
        for &u in &clique {
            covered[u] = true;
        }
        sets.push(clique.into_iter().map(StateId).collect());
    }
    sets
}
