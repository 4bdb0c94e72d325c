//! Arena-backed prefix tree over input sequences. Nodes are dense indices,
//! so residual languages (subtrees) can be passed around as plain `usize`
//! and memoised cheaply.

use std::collections::BTreeMap;

use crate::fsm::{InputId, InputSequence};

#[derive(Debug, Clone, Default)]
pub(crate) struct SeqTrie {
    children: Vec<BTreeMap<InputId, usize>>,
    member: Vec<bool>,
}

pub(crate) const ROOT: usize = 0;

impl SeqTrie {
    pub fn new() -> Self {
        SeqTrie {
            children: vec![BTreeMap::new()],
            member: vec![false],
        }
    }

    fn extend(&mut self, from: usize, x: InputId) -> usize {
        if let Some(&c) = self.children[from].get(&x) {
            return c;
        }
        let c = self.children.len();
        self.children.push(BTreeMap::new());
        self.member.push(false);
        self.children[from].insert(x, c);
        c
    }

    /// Inserts the path of `seq` and marks its end as a member sequence.
    pub fn insert(&mut self, seq: &InputSequence) -> usize {
        let node = self.insert_path(seq);
        self.member[node] = true;
        node
    }

    /// Inserts the path of `seq` without marking membership.
    pub fn insert_path(&mut self, seq: &InputSequence) -> usize {
        let mut cur = ROOT;
        for &x in &seq.0 {
            cur = self.extend(cur, x);
        }
        cur
    }

    pub fn child(&self, node: usize, x: InputId) -> Option<usize> {
        self.children[node].get(&x).copied()
    }

    /// The node of `seq`, if its whole path exists.
    pub fn node_of(&self, seq: &InputSequence) -> Option<usize> {
        let mut cur = ROOT;
        for &x in &seq.0 {
            cur = self.child(cur, x)?;
        }
        Some(cur)
    }

    #[cfg(test)]
    pub fn is_member(&self, node: usize) -> bool {
        self.member[node]
    }

    /// All member sequences whose node has no member strictly below it,
    /// i.e. the member set with proper prefixes removed.
    pub fn maximal_members(&self) -> Vec<InputSequence> {
        let mut result = Vec::new();
        let mut path = Vec::new();
        self.walk_maximal(ROOT, &mut path, &mut result);
        result
    }

    // returns true if the subtree below `node` contains a member
    fn walk_maximal(
        &self,
        node: usize,
        path: &mut Vec<InputId>,
        result: &mut Vec<InputSequence>,
    ) -> bool {
        let mut below = false;
        for (&x, &c) in &self.children[node] {
            path.push(x);
            below |= self.walk_maximal(c, path, result);
            path.pop();
        }
        if self.member[node] && !below {
            result.push(InputSequence(path.clone()));
        }
        below || self.member[node]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(xs: &[usize]) -> InputSequence {
        InputSequence(xs.iter().map(|&x| InputId(x)).collect())
    }

    #[test]
    fn maximal_members_drop_proper_prefixes() {
        let mut t = SeqTrie::new();
        t.insert(&seq(&[0, 1]));
        t.insert(&seq(&[0]));
        t.insert(&seq(&[1]));
        t.insert(&seq(&[0, 1, 1]));
        let maximal = t.maximal_members();
        assert_eq!(maximal, vec![seq(&[0, 1, 1]), seq(&[1])]);
    }

    #[test]
    fn node_lookup_follows_paths() {
        let mut t = SeqTrie::new();
        let n = t.insert(&seq(&[2, 0]));
        assert_eq!(t.node_of(&seq(&[2, 0])), Some(n));
        assert_eq!(t.node_of(&seq(&[0, 2])), None);
        assert!(t.is_member(n));
        assert!(!t.is_member(ROOT));
    }
}
