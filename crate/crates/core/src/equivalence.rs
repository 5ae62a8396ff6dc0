//! Probabilistic equivalence of states by partition refinement.
//!
//! Two states are equivalent when they assign the same probability to every
//! word. A state's signature is, per symbol, its emission probability together
//! with the class of its successor; classes are split until signatures agree
//! inside every class.

use crate::machine::EpsilonMachine;

/// Absolute tolerance when comparing emission probabilities.
pub const PROBABILITY_TOL: f64 = 1e-9;

/// Coarsest partition of the states into probabilistically equivalent classes.
/// Classes are sorted ascending and ordered by their smallest member.
pub fn check_equivalence(m: &EpsilonMachine) -> Vec<Vec<usize>> {
    let initial = vec![0; m.num_states()];
    classes_from_labels(&refine(m, initial))
}

/// Refines a labelling of states (class id per state) to the fixpoint.
pub fn refine(m: &EpsilonMachine, mut labels: Vec<usize>) -> Vec<usize> {
    let n = m.num_states();
    let mut count = distinct(&labels);
    loop {
        // representatives[c] = a state carrying new class c
        let mut representatives: Vec<usize> = Vec::new();
        let mut next = vec![0; n];
        for q in 0..n {
            let found = representatives
                .iter()
                .position(|&r| same_signature(m, &labels, q, r));
            next[q] = match found {
                Some(c) => c,
                None => {
                    representatives.push(q);
                    representatives.len() - 1
                }
            };
        }
        let new_count = representatives.len();
        labels = next;
        if new_count == count {
            return labels;
        }
        count = new_count;
    }
}

fn same_signature(m: &EpsilonMachine, labels: &[usize], p: usize, q: usize) -> bool {
    if labels[p] != labels[q] {
        return false;
    }
    (0..m.num_symbols()).all(|a| match (m.next_state(p, a), m.next_state(q, a)) {
        (None, None) => true,
        (Some(s), Some(t)) => {
            labels[s] == labels[t] && (m.emission(p, a) - m.emission(q, a)).abs() <= PROBABILITY_TOL
        }
        _ => false,
    })
}

fn distinct(labels: &[usize]) -> usize {
    let mut seen: Vec<usize> = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Groups states by label into sorted classes, ordered by smallest member.
pub fn classes_from_labels(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut slot: Vec<Option<usize>> = vec![None; labels.len()];
    for (q, &l) in labels.iter().enumerate() {
        if l >= slot.len() {
            slot.resize(l + 1, None);
        }
        match slot[l] {
            Some(c) => classes[c].push(q),
            None => {
                slot[l] = Some(classes.len());
                classes.push(vec![q]);
            }
        }
    }
    classes
}
