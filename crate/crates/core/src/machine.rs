//! The ε-machine data model: a strongly connected partial DFA whose states carry a
//! probability distribution over their outgoing edges.

use std::fmt;

use crate::equivalence::check_equivalence;
use crate::error::MachineError;
use crate::graph::strongly_connected_components;
use crate::linalg::{self, DenseMatrix};

/// Tolerance for outgoing probability sums.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// One labelled, weighted transition, by dense index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub symbol: usize,
    pub to: usize,
    pub probability: f64,
}

/// A validated ε-machine.
///
/// States and symbols are addressed by dense indices `0..n` and `0..k`; the
/// original names are kept for reports and rendering. Values are immutable
/// once built.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonMachine {
    name: String,
    states: Vec<String>,
    symbols: Vec<String>,
    // n * k tables, indexed by state * k + symbol
    next: Vec<Option<usize>>,
    prob: Vec<f64>,
}

impl EpsilonMachine {
    /// Builds and fully validates a machine, including probabilistic
    /// non-equivalence of states.
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        symbols: Vec<String>,
        edges: &[Edge],
    ) -> Result<Self, MachineError> {
        let m = Self::new_structural(name, states, symbols, edges)?;
        m.check_distinct_states()?;
        Ok(m)
    }

    /// Builds a machine and checks everything except state non-equivalence.
    ///
    /// Useful for inspecting candidate machines with [`check_equivalence`]
    /// before committing to them.
    pub fn new_structural(
        name: impl Into<String>,
        states: Vec<String>,
        symbols: Vec<String>,
        edges: &[Edge],
    ) -> Result<Self, MachineError> {
        let n = states.len();
        let k = symbols.len();
        if n == 0 {
            return Err(MachineError::Shape("machine has no states".into()));
        }
        if k == 0 {
            return Err(MachineError::Shape("machine has no symbols".into()));
        }
        let mut next = vec![None; n * k];
        let mut prob = vec![0.0; n * k];
        for e in edges {
            if e.from >= n {
                return Err(MachineError::StateOutOfRange(e.from));
            }
            if e.to >= n {
                return Err(MachineError::StateOutOfRange(e.to));
            }
            if e.symbol >= k {
                return Err(MachineError::SymbolOutOfRange(e.symbol));
            }
            let slot = e.from * k + e.symbol;
            if next[slot].is_some() {
                return Err(MachineError::DuplicateEdge {
                    line: 0,
                    state: states[e.from].clone(),
                    symbol: symbols[e.symbol].clone(),
                });
            }
            if !(e.probability > 0.0 && e.probability <= 1.0) {
                return Err(MachineError::InvalidProbability {
                    state: states[e.from].clone(),
                    symbol: symbols[e.symbol].clone(),
                    value: e.probability,
                });
            }
            next[slot] = Some(e.to);
            prob[slot] = e.probability;
        }

        let m = Self {
            name: name.into(),
            states,
            symbols,
            next,
            prob,
        };
        m.check_row_sums()?;
        m.check_strongly_connected()?;
        Ok(m)
    }

    fn check_row_sums(&self) -> Result<(), MachineError> {
        for q in 0..self.num_states() {
            let sum: f64 = self.emissions(q).iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(MachineError::RowSum {
                    state: self.states[q].clone(),
                    sum,
                });
            }
        }
        Ok(())
    }

    fn check_strongly_connected(&self) -> Result<(), MachineError> {
        let sccs = strongly_connected_components(&self.adjacency());
        if sccs.len() <= 1 {
            return Ok(());
        }
        let root = sccs
            .iter()
            .find(|c| c.contains(&0))
            .expect("state 0 placed");
        let outside = (0..self.num_states())
            .find(|q| !root.contains(q))
            .expect("more than one component");
        Err(MachineError::NotStronglyConnected {
            from: self.states[0].clone(),
            unreachable: self.states[outside].clone(),
        })
    }

    fn check_distinct_states(&self) -> Result<(), MachineError> {
        if let Some(class) = check_equivalence(self).into_iter().find(|c| c.len() > 1) {
            return Err(MachineError::EquivalentStates {
                states: class.iter().map(|&q| self.states[q].clone()).collect(),
            });
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn num_edges(&self) -> usize {
        self.next.iter().filter(|t| t.is_some()).count()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn symbol_names(&self) -> &[String] {
        &self.symbols
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn symbol_name(&self, a: usize) -> &str {
        &self.symbols[a]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    /// Translates symbol names into a word of symbol indices.
    pub fn word_from_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<Vec<usize>, MachineError> {
        names
            .into_iter()
            .map(|s| {
                self.symbol_index(s)
                    .ok_or_else(|| MachineError::UnknownName {
                        line: 0,
                        kind: "symbol",
                        name: s.to_string(),
                    })
            })
            .collect()
    }

    /// `δ(q, a)`, or `None` where the transition is undefined.
    #[inline]
    pub fn next_state(&self, q: usize, a: usize) -> Option<usize> {
        self.next[q * self.symbols.len() + a]
    }

    /// `P_q(a)`; zero exactly where `δ(q, a)` is undefined.
    #[inline]
    pub fn emission(&self, q: usize, a: usize) -> f64 {
        self.prob[q * self.symbols.len() + a]
    }

    pub fn emissions(&self, q: usize) -> &[f64] {
        let k = self.symbols.len();
        &self.prob[q * k..(q + 1) * k]
    }

    /// `δ(q, w)` extended to words.
    pub fn run(&self, q: usize, word: &[usize]) -> Option<usize> {
        word.iter().try_fold(q, |s, &a| self.next_state(s, a))
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let k = self.symbols.len();
        self.next.iter().enumerate().filter_map(move |(slot, t)| {
            t.map(|to| Edge {
                from: slot / k,
                symbol: slot % k,
                to,
                probability: self.prob[slot],
            })
        })
    }

    /// Successor lists of the underlying state graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_states()];
        for e in self.edges() {
            adj[e.from].push(e.to);
        }
        adj
    }

    /// `ln P_p(w)`, `-inf` when the path leaves the domain of `δ`.
    pub fn log_word_probability(&self, p: usize, word: &[usize]) -> Result<f64, MachineError> {
        self.check_state(p)?;
        let mut state = p;
        let mut log_p = 0.0;
        for &a in word {
            self.check_symbol(a)?;
            match self.next_state(state, a) {
                Some(t) => {
                    log_p += self.emission(state, a).ln();
                    state = t;
                }
                None => return Ok(f64::NEG_INFINITY),
            }
        }
        Ok(log_p)
    }

    /// `P_p(w)`, the product of emission probabilities along the path from `p`
    /// labelled `w`. Accumulated in log space.
    pub fn word_probability(&self, p: usize, word: &[usize]) -> Result<f64, MachineError> {
        self.log_word_probability(p, word).map(f64::exp)
    }

    fn check_state(&self, q: usize) -> Result<(), MachineError> {
        if q < self.num_states() {
            Ok(())
        } else {
            Err(MachineError::StateOutOfRange(q))
        }
    }

    fn check_symbol(&self, a: usize) -> Result<(), MachineError> {
        if a < self.num_symbols() {
            Ok(())
        } else {
            Err(MachineError::SymbolOutOfRange(a))
        }
    }

    /// One-step state transition matrix `T[p][q] = Σ_{a: δ(p,a)=q} P_p(a)`.
    pub fn transition_matrix(&self) -> DenseMatrix {
        let n = self.num_states();
        let mut t = DenseMatrix::zeros(n, n);
        for e in self.edges() {
            t.add_to(e.from, e.to, e.probability);
        }
        t
    }

    pub fn stationary_distribution(&self) -> Result<StationaryDist, MachineError> {
        let pi = linalg::stationary(&self.transition_matrix())?;
        Ok(StationaryDist::new(pi))
    }

    /// Renders the machine in the line-based text format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("machine {}\n", self.name));
        out.push_str(&format!("states {}\n", self.states.join(" ")));
        out.push_str(&format!("symbols {}\n", self.symbols.join(" ")));
        for e in self.edges() {
            out.push_str(&format!(
                "edge {} {} {} {}\n",
                self.states[e.from], self.symbols[e.symbol], self.states[e.to], e.probability
            ));
        }
        out.push_str("end\n");
        out
    }
}

impl fmt::Display for EpsilonMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The unique positive stationary distribution of a machine.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDist {
    pub pi: Vec<f64>,
    pub pi_min: f64,
    pub pi_max: f64,
}

impl StationaryDist {
    pub fn new(pi: Vec<f64>) -> Self {
        let pi_min = pi.iter().copied().fold(f64::INFINITY, f64::min);
        let pi_max = pi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { pi, pi_min, pi_max }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_machine;

    const M_EX: &str = include_str!("../fixtures/M_EX.em");
    const M_GM: &str = include_str!("../fixtures/M_GM.em");
    const M_NE: &str = include_str!("../fixtures/M_NE.em");
    const M_1: &str = include_str!("../fixtures/M_1.em");

    #[test]
    fn word_probability_along_path() {
        let m = parse_machine(M_EX).unwrap();
        let bb = m.word_from_names(["b", "b"]).unwrap();
        assert!((m.word_probability(0, &bb).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(m.word_probability(1, &[]).unwrap(), 1.0);
    }

    #[test]
    fn undefined_path_has_zero_probability() {
        let m = parse_machine(M_GM).unwrap();
        let b = m.word_from_names(["b"]).unwrap();
        assert_eq!(m.word_probability(1, &b).unwrap(), 0.0);
        assert_eq!(m.run(1, &b), None);
    }

    #[test]
    fn word_probability_rejects_bad_indices() {
        let m = parse_machine(M_EX).unwrap();
        assert_eq!(
            m.word_probability(5, &[0]),
            Err(MachineError::StateOutOfRange(5))
        );
        assert_eq!(
            m.word_probability(0, &[0, 9]),
            Err(MachineError::SymbolOutOfRange(9))
        );
        assert!(m.word_from_names(["z"]).is_err());
    }

    #[test]
    fn long_words_do_not_underflow_to_garbage() {
        let m = parse_machine(M_EX).unwrap();
        let word = vec![1usize; 4000];
        let lp = m.log_word_probability(0, &word).unwrap();
        // 2000 steps of 0.5 and 2000 of 0.25
        let expected = 2000.0 * 0.5f64.ln() + 2000.0 * 0.25f64.ln();
        assert!((lp - expected).abs() < 1e-8);
        assert_eq!(m.word_probability(0, &word).unwrap(), 0.0);
    }

    #[test]
    fn stationary_distributions_of_references() {
        for (text, expected) in [
            (M_EX, vec![2.0 / 3.0, 1.0 / 3.0]),
            (M_NE, vec![2.0 / 3.0, 1.0 / 3.0]),
            (M_1, vec![1.0]),
        ] {
            let m = parse_machine(text).unwrap();
            let st = m.stationary_distribution().unwrap();
            for (a, b) in st.pi.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12, "{} {:?}", m.name(), st.pi);
            }
        }
    }

    #[test]
    fn stationary_extremes() {
        let m = parse_machine(M_EX).unwrap();
        let st = m.stationary_distribution().unwrap();
        assert!((st.pi_min - 1.0 / 3.0).abs() < 1e-12);
        assert!((st.pi_max - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn structural_constructor_rejects_zero_probability() {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let err = EpsilonMachine::new_structural(
            "z",
            names(&["0"]),
            names(&["a", "b"]),
            &[
                Edge {
                    from: 0,
                    symbol: 0,
                    to: 0,
                    probability: 1.0,
                },
                Edge {
                    from: 0,
                    symbol: 1,
                    to: 0,
                    probability: 0.0,
                },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, MachineError::InvalidProbability { .. }));
    }
}
