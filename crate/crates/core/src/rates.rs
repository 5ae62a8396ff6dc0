//! Synchronization and prediction rate constants.
//!
//! For an exact machine the probability of still generating non-reset words of
//! length `L` decays like `src^L`, where `src` is the spectral radius of the
//! summed pair-automaton matrix. For a non-exact machine the observer's
//! residual uncertainty decays like `prc^L`, with `prc = max_M exp(-E_M)` over
//! the closed deadlock components `M`; `E_M` is the stationary expected
//! log-likelihood ratio between the two coordinates of the pair chain.

use rayon::prelude::*;

use crate::error::{MachineError, RateError};
use crate::linalg::{self, spectral_radius, DenseMatrix, DEFAULT_SPECTRAL_TOL};
use crate::machine::{EpsilonMachine, StationaryDist};
use crate::pair_space::{mergeable_pairs, Classification, DeadlockAnalysis, PairAutomaton};

/// Per-symbol pair-automaton matrices `T(A₂, x)` and their sum `T(A₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMatrix {
    pub per_symbol: Vec<DenseMatrix>,
    pub total: DenseMatrix,
}

pub fn pair_matrix(pa: &PairAutomaton) -> PairMatrix {
    let size = pa.len();
    let mut per_symbol = vec![DenseMatrix::zeros(size, size); pa.num_symbols()];
    let mut total = DenseMatrix::zeros(size, size);
    for s in 0..size {
        for (x, mat) in per_symbol.iter_mut().enumerate() {
            if let Some(t) = pa.next_pair(s, x) {
                let w = pa.weight(s, x);
                mat.set(s, t, w);
                total.add_to(s, t, w);
            }
        }
    }
    PairMatrix { per_symbol, total }
}

/// Sandwich bounds on the probability of non-reset words of length `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct NsynBounds {
    pub length: usize,
    /// `R^L_(p,q)`, indexed like the pair automaton.
    pub pair_rows: Vec<f64>,
    /// `R^L_p = Σ_q R^L_(p,q)`.
    pub state_totals: Vec<f64>,
    /// `MaxR^L_p = max_q R^L_(p,q)`.
    pub state_maxima: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

/// Row sums of `T(A₂)^L` via `L` matrix–vector products with the all-ones vector.
pub fn nsyn_bounds(m: &EpsilonMachine, length: usize) -> Result<NsynBounds, MachineError> {
    let pa = PairAutomaton::build(m);
    let mat = pair_matrix(&pa).total;
    let stationary = m.stationary_distribution()?;
    Ok(nsyn_bounds_with(m, &pa, &mat, &stationary, length))
}

pub fn nsyn_bounds_with(
    m: &EpsilonMachine,
    pa: &PairAutomaton,
    total: &DenseMatrix,
    stationary: &StationaryDist,
    length: usize,
) -> NsynBounds {
    let mut rows = vec![1.0; pa.len()];
    for _ in 0..length {
        rows = total.mul_vec(&rows);
    }

    let n = m.num_states();
    let mut state_totals = vec![0.0; n];
    let mut state_maxima = vec![0.0f64; n];
    for (i, pair) in pa.pairs().iter().enumerate() {
        state_totals[pair.first] += rows[i];
        state_maxima[pair.first] = state_maxima[pair.first].max(rows[i]);
    }
    let lower = stationary
        .pi
        .iter()
        .zip(&state_maxima)
        .map(|(p, r)| p * r)
        .sum();
    let upper = stationary
        .pi
        .iter()
        .zip(&state_totals)
        .map(|(p, r)| p * r)
        .sum();

    NsynBounds {
        length,
        pair_rows: rows,
        state_totals,
        state_maxima,
        lower,
        upper,
    }
}

fn non_exact_error(m: &EpsilonMachine, pa: &PairAutomaton, da: &DeadlockAnalysis) -> RateError {
    let pair = pa.pair(da.witness().expect("non-exact machine has a deadlock pair"));
    RateError::NonExact {
        first: m.state_name(pair.first).to_string(),
        second: m.state_name(pair.second).to_string(),
    }
}

/// Synchronization rate constant of an exact machine, within `eps`.
pub fn sync_rate(m: &EpsilonMachine, eps: f64) -> Result<f64, RateError> {
    let pa = PairAutomaton::build(m);
    let da = DeadlockAnalysis::analyze(m, &pa);
    if da.classification() == Classification::NonExact {
        return Err(non_exact_error(m, &pa, &da));
    }
    spectral_radius(&pair_matrix(&pa).total, eps)
}

/// Stationary statistics of the edge chain of one closed deadlock component.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMachineStats {
    /// Pair indices of the component, ascending.
    pub component: Vec<usize>,
    /// Stationary distribution of the pair chain, aligned with `component`.
    pub rho: Vec<f64>,
    /// Edge states `(position in component, symbol)` with positive weight.
    pub edge_states: Vec<(usize, usize)>,
    /// Edge equilibrium `ρ_(p,q) · P_p(x)`, aligned with `edge_states`.
    pub edge_rho: Vec<f64>,
    /// `F = ln(P_p(x) / P_q(x))`, aligned with `edge_states`.
    pub f_values: Vec<f64>,
    /// `E_M = Σ edge_rho · F`.
    pub expectation: f64,
}

impl EdgeMachineStats {
    /// Transition matrix of the edge chain: edge `(k, x)` moves to `(j, y)`
    /// with probability `P_j(y)` when `δ₂(k, x) = j`.
    pub fn edge_chain(&self, pa: &PairAutomaton) -> DenseMatrix {
        let size = self.edge_states.len();
        let mut mat = DenseMatrix::zeros(size, size);
        for (from, &(k, x)) in self.edge_states.iter().enumerate() {
            let j = pa
                .next_pair(self.component[k], x)
                .expect("edge states carry defined transitions");
            for (to, &(k2, y)) in self.edge_states.iter().enumerate() {
                if self.component[k2] == j {
                    mat.set(from, to, pa.weight(j, y));
                }
            }
        }
        mat
    }

    /// Per-pair KL terms `Σ_x P_p(x) ln(P_p(x)/P_q(x))`, aligned with `component`.
    pub fn pair_divergences(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.component.len()];
        for ((&(k, _), &r), &f) in self
            .edge_states
            .iter()
            .zip(&self.edge_rho)
            .zip(&self.f_values)
        {
            out[k] += r / self.rho[k] * f;
        }
        out
    }
}

/// Edge-chain statistics and `E_M` for a closed deadlock component.
pub fn edge_machine_stats(
    component: &[usize],
    pa: &PairAutomaton,
    m: &EpsilonMachine,
) -> Result<EdgeMachineStats, RateError> {
    let size = component.len();
    let local = |pair: usize| component.binary_search(&pair).ok();

    let mut chain = DenseMatrix::zeros(size, size);
    let mut edge_states = Vec::new();
    for (k, &i) in component.iter().enumerate() {
        for x in 0..pa.num_symbols() {
            if let Some(j) = pa.next_pair(i, x) {
                let target = local(j).expect("deadlock components are closed");
                chain.add_to(k, target, pa.weight(i, x));
                edge_states.push((k, x));
            }
        }
    }
    let rho = linalg::stationary(&chain)?;

    let mut edge_rho = Vec::with_capacity(edge_states.len());
    let mut f_values = Vec::with_capacity(edge_states.len());
    let mut expectation = 0.0;
    for &(k, x) in &edge_states {
        let pair = pa.pair(component[k]);
        let pp = m.emission(pair.first, x);
        let pq = m.emission(pair.second, x);
        let r = rho[k] * pp;
        let f = (pp / pq).ln();
        expectation += r * f;
        edge_rho.push(r);
        f_values.push(f);
    }

    Ok(EdgeMachineStats {
        component: component.to_vec(),
        rho,
        edge_states,
        edge_rho,
        f_values,
        expectation,
    })
}

/// `E_M` for every closed deadlock component, in component order.
pub fn component_expectations(
    m: &EpsilonMachine,
    pa: &PairAutomaton,
    da: &DeadlockAnalysis,
) -> Result<Vec<EdgeMachineStats>, RateError> {
    da.components
        .par_iter()
        .map(|c| edge_machine_stats(c, pa, m))
        .collect()
}

/// `max_M exp(-E_M)`; ties resolve to the earliest component.
fn rate_from_expectations(stats: &[EdgeMachineStats]) -> f64 {
    let mut best: Option<f64> = None;
    for s in stats {
        let v = (-s.expectation).exp();
        if best.is_none_or(|b| v > b) {
            best = Some(v);
        }
    }
    best.unwrap_or(0.0)
}

/// Prediction rate constant: 0 for exact machines, otherwise
/// `max_M exp(-E_M)` over the closed deadlock components.
pub fn prediction_rate(m: &EpsilonMachine) -> Result<f64, RateError> {
    let pa = PairAutomaton::build(m);
    let da = DeadlockAnalysis::analyze(m, &pa);
    if da.classification() == Classification::Exact {
        return Ok(0.0);
    }
    Ok(rate_from_expectations(&component_expectations(
        m, &pa, &da,
    )?))
}

/// Spectral radius of `T(A₂)` with every deadlock pair removed: the decay rate
/// of the probability that a pair has neither merged nor reached a deadlock
/// pair.
pub fn escape_rate(m: &EpsilonMachine, eps: f64) -> Result<f64, RateError> {
    let pa = PairAutomaton::build(m);
    let da = mergeable_pairs(&pa, m);
    spectral_radius(&pair_matrix(&pa).total.submatrix(&da.mergeable), eps)
}

/// All rate constants of a machine.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub classification: Classification,
    /// `None` for non-exact machines.
    pub src: Option<f64>,
    pub prc: f64,
    pub escape: f64,
    /// Spectral radius of the full `T(A₂)`.
    pub pair_radius: f64,
    pub components: Vec<EdgeMachineStats>,
}

pub fn analyze(m: &EpsilonMachine, eps: f64) -> Result<RateReport, RateError> {
    let pa = PairAutomaton::build(m);
    let da = DeadlockAnalysis::analyze(m, &pa);
    let total = pair_matrix(&pa).total;
    let pair_radius = spectral_radius(&total, eps)?;
    let escape = spectral_radius(&total.submatrix(&da.mergeable), eps)?;
    let classification = da.classification();
    let (src, components) = match classification {
        Classification::Exact => (Some(pair_radius), Vec::new()),
        Classification::NonExact => (None, component_expectations(m, &pa, &da)?),
    };
    let prc = rate_from_expectations(&components);
    Ok(RateReport {
        classification,
        src,
        prc,
        escape,
        pair_radius,
        components,
    })
}

/// [`analyze`] at the default accuracy.
pub fn analyze_default(m: &EpsilonMachine) -> Result<RateReport, RateError> {
    analyze(m, DEFAULT_SPECTRAL_TOL)
}
