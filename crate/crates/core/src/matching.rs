//! Multiplicative matchings: verification, exact maximum search, and a
//! randomized greedy lower bound.
//!
//! A matching is a triple of equal-size subsets S, T, U such that the
//! solutions of s t u = 1 inside S x T x U form a perfect matching. The
//! search enforces the equivalent triple-system condition: chosen triples
//! (s_i, t_i, u_i) with s_i t_j u_k = 1 iff i = j = k, which admits an
//! incremental check when one triple is added.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::group::Group;

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("S, T, U must have equal lengths; got {0}, {1}, {2}")]
    UnequalLengths(usize, usize, usize),
    #[error("duplicate element {0} within one list")]
    Duplicate(usize),
    #[error("element index {0} out of range for a group of order {1}")]
    OutOfRange(usize, usize),
}

/// A candidate or verified matching with its triple set.
#[derive(Debug, Clone, Serialize)]
pub struct Matching {
    pub s: Vec<u32>,
    pub t: Vec<u32>,
    pub u: Vec<u32>,
    pub triples: Vec<[u32; 3]>,
    pub valid: bool,
    /// Human-readable reason when invalid.
    pub violation: Option<String>,
    /// Element labels for the triples, for report rendering.
    pub labels: Vec<[String; 3]>,
}

impl Matching {
    pub fn cardinality(&self) -> usize {
        self.triples.len()
    }
}

/// Enumerate all |S||T||U| products, collect the triples multiplying to
/// the identity, and check the perfect-matching condition.
pub fn verify_matching(
    g: &Group,
    s: &[usize],
    t: &[usize],
    u: &[usize],
) -> Result<Matching, MatchingError> {
    if s.len() != t.len() || t.len() != u.len() {
        return Err(MatchingError::UnequalLengths(s.len(), t.len(), u.len()));
    }
    for list in [s, t, u] {
        let mut seen = vec![false; g.order()];
        for &x in list {
            if x >= g.order() {
                return Err(MatchingError::OutOfRange(x, g.order()));
            }
            if seen[x] {
                return Err(MatchingError::Duplicate(x));
            }
            seen[x] = true;
        }
    }
    let mut triples = Vec::new();
    for (i, &a) in s.iter().enumerate() {
        for (j, &b) in t.iter().enumerate() {
            for (k, &c) in u.iter().enumerate() {
                if g.mul(g.mul(a, b), c) == Group::IDENTITY {
                    triples.push((i, j, k));
                }
            }
        }
    }
    let m = s.len();
    let mut count_s = vec![0usize; m];
    let mut count_t = vec![0usize; m];
    let mut count_u = vec![0usize; m];
    for &(i, j, k) in &triples {
        count_s[i] += 1;
        count_t[j] += 1;
        count_u[k] += 1;
    }
    let mut violation = None;
    for (name, counts, list) in
        [("S", &count_s, s), ("T", &count_t, t), ("U", &count_u, u)]
    {
        if let Some(i) = counts.iter().position(|&c| c != 1) {
            violation = Some(format!(
                "element {} of {name} lies in {} identity triples, expected exactly 1",
                list[i], counts[i]
            ));
            break;
        }
    }
    let valid = violation.is_none();
    let triple_list: Vec<[u32; 3]> = triples
        .iter()
        .map(|&(i, j, k)| [s[i] as u32, t[j] as u32, u[k] as u32])
        .collect();
    Ok(Matching {
        s: s.iter().map(|&x| x as u32).collect(),
        t: t.iter().map(|&x| x as u32).collect(),
        u: u.iter().map(|&x| x as u32).collect(),
        labels: triple_list
            .iter()
            .map(|&[a, b, c]| {
                [
                    g.label(a as usize).to_string(),
                    g.label(b as usize).to_string(),
                    g.label(c as usize).to_string(),
                ]
            })
            .collect(),
        triples: triple_list,
        valid,
        violation,
    })
}

/// Search outcome. `exact` distinguishes a proven optimum from the best
/// matching found before the node budget ran out.
#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub matching: Matching,
    pub exact: bool,
    pub nodes: u64,
    pub node_budget: u64,
}

struct SearchState<'g> {
    g: &'g Group,
    s: Vec<usize>,
    t: Vec<usize>,
    u: Vec<usize>,
    t_used: Vec<bool>,
    u_used: Vec<bool>,
    best: Vec<[u32; 3]>,
    nodes: u64,
    budget: u64,
    truncated: bool,
}

impl SearchState<'_> {
    /// The incremental triple-system condition for appending (s, t, u):
    /// every coordinate mix of the new triple with existing ones must
    /// avoid the identity.
    fn admissible(&self, s: usize, t: usize, u: usize) -> bool {
        let g = self.g;
        if g.mul(g.mul(s, t), u) != Group::IDENTITY {
            return false;
        }
        let m = self.s.len();
        for i in 0..m {
            // two new coordinates, one old
            if g.mul(g.mul(s, t), self.u[i]) == Group::IDENTITY
                || g.mul(g.mul(s, self.t[i]), u) == Group::IDENTITY
                || g.mul(g.mul(self.s[i], t), u) == Group::IDENTITY
            {
                return false;
            }
            // one new coordinate, two old
            for j in 0..m {
                if g.mul(g.mul(s, self.t[i]), self.u[j]) == Group::IDENTITY
                    || g.mul(g.mul(self.s[i], t), self.u[j]) == Group::IDENTITY
                    || g.mul(g.mul(self.s[i], self.t[j]), u) == Group::IDENTITY
                {
                    return false;
                }
            }
        }
        true
    }

    fn push(&mut self, s: usize, t: usize, u: usize) {
        self.s.push(s);
        self.t.push(t);
        self.u.push(u);
        self.t_used[t] = true;
        self.u_used[u] = true;
    }

    fn pop(&mut self) {
        let s = self.s.pop();
        let t = self.t.pop().unwrap();
        let u = self.u.pop().unwrap();
        let _ = s;
        self.t_used[t] = false;
        self.u_used[u] = false;
    }

    /// Extend with S-elements strictly above `last_s`, in ascending order.
    fn extend(&mut self, last_s: usize) {
        let n = self.g.order();
        let m = self.s.len();
        if m > self.best.len() {
            self.best = self
                .s
                .iter()
                .zip(&self.t)
                .zip(&self.u)
                .map(|((&a, &b), &c)| [a as u32, b as u32, c as u32])
                .collect();
        }
        let unused_t = n - m;
        for s in last_s + 1..n {
            // branch and bound: elements of S are ascending, so at most
            // n - s further triples can be added from here
            if m + (n - s) <= self.best.len() || m + unused_t <= self.best.len() {
                break;
            }
            for t in 0..n {
                if self.t_used[t] {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    self.truncated = true;
                    return;
                }
                let u = self.g.inv(self.g.mul(s, t));
                if self.u_used[u] || !self.admissible(s, t, u) {
                    continue;
                }
                self.push(s, t, u);
                self.extend(s);
                self.pop();
                if self.truncated {
                    return;
                }
            }
        }
    }
}

/// Exact maximum matching cardinality by depth-first search.
///
/// Translating (S, T, U) to (S a, a^{-1} T b, b^{-1} U) preserves the
/// matching property, so the first triple can be pinned to the identity
/// triple; subsequent triples are enumerated with S ascending. The budget
/// is counted in search nodes so that results are machine-independent.
/// Practical up to order ~16; beyond that expect budget truncation.
pub fn max_matching_exact(g: &Group, node_budget: u64) -> SearchResult {
    let n = g.order();
    let mut state = SearchState {
        g,
        s: vec![Group::IDENTITY],
        t: vec![Group::IDENTITY],
        u: vec![Group::IDENTITY],
        t_used: {
            let mut v = vec![false; n];
            v[Group::IDENTITY] = true;
            v
        },
        u_used: {
            let mut v = vec![false; n];
            v[Group::IDENTITY] = true;
            v
        },
        best: vec![[0, 0, 0]],
        nodes: 0,
        budget: node_budget,
        truncated: false,
    };
    state.extend(0);
    let triples = state.best.clone();
    let s: Vec<usize> = triples.iter().map(|t| t[0] as usize).collect();
    let t: Vec<usize> = triples.iter().map(|t| t[1] as usize).collect();
    let u: Vec<usize> = triples.iter().map(|t| t[2] as usize).collect();
    let matching = verify_matching(g, &s, &t, &u).expect("search output is well-formed");
    assert!(matching.valid, "search must return a valid matching");
    SearchResult {
        matching,
        exact: !state.truncated,
        nodes: state.nodes,
        node_budget,
    }
}

/// Randomized greedy insertion: per trial, scan the (s, t) pairs in a
/// seeded random order and keep every admissible triple. Returns the best
/// verified matching over all trials. Always a lower bound for the exact
/// search.
pub fn greedy_lower_bound(g: &Group, trials: u32, seed: u64) -> Matching {
    let n = g.order();
    let mut best: Option<Matching> = None;
    for trial in 0..trials.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (trial as u64).wrapping_mul(0x9E37_79B9));
        let mut pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
        pairs.shuffle(&mut rng);
        let mut state = SearchState {
            g,
            s: Vec::new(),
            t: Vec::new(),
            u: Vec::new(),
            t_used: vec![false; n],
            u_used: vec![false; n],
            best: Vec::new(),
            nodes: 0,
            budget: u64::MAX,
            truncated: false,
        };
        let mut s_used = vec![false; n];
        for (s, t) in pairs {
            if s_used[s] || state.t_used[t] {
                continue;
            }
            let u = g.inv(g.mul(s, t));
            if state.u_used[u] || !state.admissible(s, t, u) {
                continue;
            }
            state.push(s, t, u);
            s_used[s] = true;
        }
        let m = verify_matching(g, &state.s, &state.t, &state.u).expect("greedy is well-formed");
        assert!(m.valid);
        if best.as_ref().is_none_or(|b| m.cardinality() > b.cardinality()) {
            best = Some(m);
        }
    }
    best.expect("at least one trial runs")
}
