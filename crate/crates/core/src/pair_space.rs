//! The pair automaton on ordered pairs of distinct states, mergeability of
//! pairs, and the closed components of never-merging (deadlock) pairs.
//!
//! # Merging semantics
//!
//! Words act on sets of states by image over the states where they are
//! defined: `S.w = { δ(q, w) | q ∈ S, δ(q, w) defined }`. A pair `{p, q}` is
//! merged by `w` when `|{p, q}.w| = 1`. In particular a symbol defined at
//! exactly one of `p`, `q` merges the pair, because the set image shrinks to a
//! singleton. The pair automaton only follows symbols defined at both states
//! with distinct images; every other symbol either merges or kills the pair.

use crate::graph::strongly_connected_components;
use crate::machine::EpsilonMachine;

/// An ordered pair of distinct states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub first: usize,
    pub second: usize,
}

impl Pair {
    pub fn new(first: usize, second: usize) -> Self {
        debug_assert_ne!(first, second);
        Self { first, second }
    }

    pub fn swapped(self) -> Self {
        Self::new(self.second, self.first)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Exact,
    NonExact,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Exact => "exact",
            Classification::NonExact => "non-exact",
        }
    }
}

/// Pair automaton: `δ₂((p,q),x) = (p.x, q.x)` when both are defined and
/// distinct, with weight `P_p(x)`; undefined with weight 0 otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAutomaton {
    num_states: usize,
    num_symbols: usize,
    pairs: Vec<Pair>,
    // n * n lookup, None on the diagonal
    index: Vec<Option<usize>>,
    // |pairs| * k
    transition: Vec<Option<usize>>,
    weight: Vec<f64>,
}

impl PairAutomaton {
    pub fn build(m: &EpsilonMachine) -> Self {
        let n = m.num_states();
        let k = m.num_symbols();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
        let mut index = vec![None; n * n];
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    index[p * n + q] = Some(pairs.len());
                    pairs.push(Pair::new(p, q));
                }
            }
        }

        let mut transition = vec![None; pairs.len() * k];
        let mut weight = vec![0.0; pairs.len() * k];
        for (i, pair) in pairs.iter().enumerate() {
            for x in 0..k {
                if let (Some(s), Some(t)) =
                    (m.next_state(pair.first, x), m.next_state(pair.second, x))
                {
                    if s != t {
                        transition[i * k + x] = index[s * n + t];
                        weight[i * k + x] = m.emission(pair.first, x);
                    }
                }
            }
        }

        Self {
            num_states: n,
            num_symbols: k,
            pairs,
            index,
            transition,
            weight,
        }
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn pair(&self, i: usize) -> Pair {
        self.pairs[i]
    }

    pub fn index_of(&self, pair: Pair) -> Option<usize> {
        self.index[pair.first * self.num_states + pair.second]
    }

    /// Index of `δ₂(pair_i, x)`.
    #[inline]
    pub fn next_pair(&self, i: usize, x: usize) -> Option<usize> {
        self.transition[i * self.num_symbols + x]
    }

    /// `P_(p,q)(x)`.
    #[inline]
    pub fn weight(&self, i: usize, x: usize) -> f64 {
        self.weight[i * self.num_symbols + x]
    }

    /// Distinct successor pairs of each pair.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|i| {
                let mut succ: Vec<usize> = (0..self.num_symbols)
                    .filter_map(|x| self.next_pair(i, x))
                    .collect();
                succ.sort_unstable();
                succ.dedup();
                succ
            })
            .collect()
    }
}

/// Mergeable and deadlock pairs plus the closed deadlock components.
#[derive(Debug, Clone, PartialEq)]
pub struct DeadlockAnalysis {
    is_deadlock: Vec<bool>,
    pub mergeable: Vec<usize>,
    pub deadlock: Vec<usize>,
    /// Closed strongly connected sets of deadlock pairs, each sorted, ordered
    /// by smallest member.
    pub components: Vec<Vec<usize>>,
}

impl DeadlockAnalysis {
    /// Runs [`mergeable_pairs`] and [`deadlock_components`].
    pub fn analyze(m: &EpsilonMachine, pa: &PairAutomaton) -> Self {
        let mut da = mergeable_pairs(pa, m);
        da.components = deadlock_components(&da, pa);
        da
    }

    pub fn is_deadlock(&self, pair_index: usize) -> bool {
        self.is_deadlock[pair_index]
    }

    pub fn classification(&self) -> Classification {
        if self.deadlock.is_empty() {
            Classification::Exact
        } else {
            Classification::NonExact
        }
    }

    /// Smallest deadlock pair, if any.
    pub fn witness(&self) -> Option<usize> {
        self.deadlock.first().copied()
    }

    /// Component containing the pair, if it lies in one.
    pub fn component_of(&self, pair_index: usize) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.binary_search(&pair_index).is_ok())
    }
}

/// Backward closure from the pairs some single symbol merges.
///
/// Seeds are pairs with a symbol mapping both states to one state, or defined at
/// exactly one of them; any pair with a pair-automaton edge into the mergeable
/// set is mergeable too.
pub fn mergeable_pairs(pa: &PairAutomaton, m: &EpsilonMachine) -> DeadlockAnalysis {
    let count = pa.len();
    let k = m.num_symbols();
    let mut predecessors = vec![Vec::new(); count];
    for i in 0..count {
        for x in 0..k {
            if let Some(j) = pa.next_pair(i, x) {
                predecessors[j].push(i);
            }
        }
    }

    let mut mergeable = vec![false; count];
    let mut queue = Vec::new();
    for (i, pair) in pa.pairs().iter().enumerate() {
        let merges =
            (0..k).any(
                |x| match (m.next_state(pair.first, x), m.next_state(pair.second, x)) {
                    (Some(s), Some(t)) => s == t,
                    (None, None) => false,
                    _ => true,
                },
            );
        if merges {
            mergeable[i] = true;
            queue.push(i);
        }
    }
    while let Some(j) = queue.pop() {
        for &i in &predecessors[j] {
            if !mergeable[i] {
                mergeable[i] = true;
                queue.push(i);
            }
        }
    }

    let is_deadlock: Vec<bool> = mergeable.iter().map(|&b| !b).collect();
    DeadlockAnalysis {
        mergeable: (0..count).filter(|&i| mergeable[i]).collect(),
        deadlock: (0..count).filter(|&i| is_deadlock[i]).collect(),
        is_deadlock,
        components: Vec::new(),
    }
}

/// Strongly connected components of the deadlock subgraph that no
/// pair-automaton edge leaves.
pub fn deadlock_components(da: &DeadlockAnalysis, pa: &PairAutomaton) -> Vec<Vec<usize>> {
    let full = pa.adjacency();
    // restrict to deadlock pairs, re-indexed
    let local: Vec<usize> = da.deadlock.clone();
    let mut position = vec![usize::MAX; pa.len()];
    for (li, &gi) in local.iter().enumerate() {
        position[gi] = li;
    }
    let sub: Vec<Vec<usize>> = local
        .iter()
        .map(|&gi| {
            full[gi]
                .iter()
                .filter(|&&gj| da.is_deadlock[gj])
                .map(|&gj| position[gj])
                .collect()
        })
        .collect();

    let mut components: Vec<Vec<usize>> = strongly_connected_components(&sub)
        .into_iter()
        .map(|c| {
            let mut g: Vec<usize> = c.into_iter().map(|li| local[li]).collect();
            g.sort_unstable();
            g
        })
        .filter(|c| {
            c.iter()
                .all(|&gi| full[gi].iter().all(|gj| c.binary_search(gj).is_ok()))
        })
        .collect();
    components.sort_by_key(|c| c[0]);
    components
}

/// Exact iff no pair is deadlock.
pub fn classify(m: &EpsilonMachine) -> Classification {
    let pa = PairAutomaton::build(m);
    mergeable_pairs(&pa, m).classification()
}
