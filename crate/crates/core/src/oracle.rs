//! Independent checks: exhaustive word enumeration, reset-threshold search over
//! subsets, and seeded Monte Carlo simulation of the observer's belief.
//!
//! Nothing here uses pair-automaton matrices; the enumeration works directly on
//! words, so it can be compared against the spectral quantities in
//! [`crate::rates`].

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{MachineError, OracleError};
use crate::machine::EpsilonMachine;
use crate::pair_space::{DeadlockAnalysis, Pair, PairAutomaton};

/// Default enumeration budget in path steps (`L · |Σ|^L`).
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Observer belief over current states after seeing a word.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    pub phi: Vec<f64>,
    /// Most likely state; lowest index on ties.
    pub top_state: usize,
    /// Combined probability of all states other than `top_state`.
    pub q_l: f64,
}

impl BeliefState {
    pub fn from_phi(phi: Vec<f64>) -> Self {
        let top_state = argmax(&phi);
        // summing the rest keeps precision when q_l is far below machine epsilon
        let q_l = phi
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != top_state)
            .map(|(_, v)| v)
            .sum();
        Self {
            phi,
            top_state,
            q_l,
        }
    }
}

/// Index of the largest entry, lowest index on ties.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// One Bayes step: `φ'_t ∝ Σ_{q: δ(q,a)=t} φ_q P_q(a)`. `None` if `a` has
/// probability zero under `phi`.
pub fn belief_step(m: &EpsilonMachine, phi: &[f64], a: usize) -> Option<Vec<f64>> {
    let mut next = vec![0.0; m.num_states()];
    for (q, &mass) in phi.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        if let Some(t) = m.next_state(q, a) {
            next[t] += mass * m.emission(q, a);
        }
    }
    let total: f64 = next.iter().sum();
    if total <= 0.0 {
        return None;
    }
    for v in &mut next {
        *v /= total;
    }
    Some(next)
}

/// Belief `φ(w)` from initial distribution `pi0`, updated symbol by symbol.
pub fn belief(m: &EpsilonMachine, pi0: &[f64], word: &[usize]) -> Result<BeliefState, OracleError> {
    if pi0.len() != m.num_states() {
        return Err(OracleError::DistributionLength {
            expected: m.num_states(),
            got: pi0.len(),
        });
    }
    let mut phi = pi0.to_vec();
    for &a in word {
        if a >= m.num_symbols() {
            return Err(MachineError::SymbolOutOfRange(a).into());
        }
        phi = belief_step(m, &phi, a).ok_or(OracleError::ImpossibleWord)?;
    }
    Ok(BeliefState::from_phi(phi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationOptions {
    pub budget: u128,
    /// Keep one [`WordRecord`] per enumerated word.
    pub keep_words: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            keep_words: false,
        }
    }
}

/// Per-word data for the `Q_L` bounds in terms of `P_{s_w}(w) / P_{f_w}(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordRecord {
    pub word: Vec<usize>,
    /// `P_π(w)`.
    pub probability: f64,
    pub q_l: f64,
    /// `|Q.w| ≤ 1`.
    pub reset: bool,
    /// State maximizing `P_p(w)`.
    pub f_w: usize,
    /// State maximizing `P_p(w)` among those with `p.w ≠ f_w.w`.
    pub s_w: Option<usize>,
    /// `P_{s_w}(w) / P_{f_w}(w)` when `s_w` exists.
    pub ratio: Option<f64>,
}

/// Exact statistics over all words of one length.
#[derive(Debug, Clone, PartialEq)]
pub struct WordStats {
    pub length: usize,
    /// `P_π(NSYN_L)`.
    pub nsyn_probability: f64,
    /// Probability of a non-reset word of length `L` generated from each state.
    pub nsyn_from_state: Vec<f64>,
    /// `E(Q_L)` over all words.
    pub mean_q: f64,
    /// `P(Q_L > 0)`.
    pub positive_mass: f64,
    /// `E(Q_L^{1/L} | Q_L > 0)`; `None` when `L = 0` or no word has `Q_L > 0`.
    pub mean_q_root: Option<f64>,
    /// `E(1/Q_L^{1/L} | Q_L > 0)`.
    pub mean_inv_q_root: Option<f64>,
    /// `π_min`.
    pub c1: f64,
    /// `π_max / π_min`.
    pub c2: f64,
    /// Words with `Q_L > 0` checked against `c1·ratio ≤ Q_L ≤ c2·ratio`.
    pub ratio_checked: usize,
    /// Largest `c1·ratio − Q_L` seen (≤ 0 when the lower bound holds).
    pub worst_lower_excess: f64,
    /// Largest `Q_L − c2·ratio` seen (≤ 0 when the upper bound holds).
    pub worst_upper_excess: f64,
    pub words: Vec<WordRecord>,
}

impl WordStats {
    pub fn ratio_bounds_hold(&self, slack: f64) -> bool {
        self.worst_lower_excess <= slack && self.worst_upper_excess <= slack
    }
}

/// Path steps needed to enumerate all words of length `L`.
pub fn enumeration_cost(num_symbols: usize, length: usize) -> u128 {
    let mut words: u128 = 1;
    for _ in 0..length {
        words = words.saturating_mul(num_symbols as u128);
    }
    words.saturating_mul(length as u128)
}

pub fn exact_word_stats(m: &EpsilonMachine, length: usize) -> Result<WordStats, OracleError> {
    exact_word_stats_with(m, length, &EnumerationOptions::default())
}

/// Enumerates every word of length `L` with `P_π(w) > 0` depth first, tracking
/// for each start state its current state and `ln P_p(w)`.
pub fn exact_word_stats_with(
    m: &EpsilonMachine,
    length: usize,
    options: &EnumerationOptions,
) -> Result<WordStats, OracleError> {
    let required = enumeration_cost(m.num_symbols(), length);
    if required > options.budget {
        return Err(OracleError::BudgetExceeded {
            required,
            budget: options.budget,
        });
    }
    let stationary = m.stationary_distribution()?;
    let n = m.num_states();
    let mut acc = Accumulator {
        m,
        pi: &stationary.pi,
        length,
        keep_words: options.keep_words,
        c1: stationary.pi_min,
        c2: stationary.pi_max / stationary.pi_min,
        stats: WordStats {
            length,
            nsyn_probability: 0.0,
            nsyn_from_state: vec![0.0; n],
            mean_q: 0.0,
            positive_mass: 0.0,
            mean_q_root: None,
            mean_inv_q_root: None,
            c1: stationary.pi_min,
            c2: stationary.pi_max / stationary.pi_min,
            ratio_checked: 0,
            worst_lower_excess: f64::NEG_INFINITY,
            worst_upper_excess: f64::NEG_INFINITY,
            words: Vec::new(),
        },
        sum_root: 0.0,
        sum_inv_root: 0.0,
        word: Vec::with_capacity(length),
    };
    let start: Vec<Option<usize>> = (0..n).map(Some).collect();
    acc.descend(&start, &vec![0.0; n]);

    let mut stats = acc.stats;
    if length > 0 && stats.positive_mass > 0.0 {
        stats.mean_q_root = Some(acc.sum_root / stats.positive_mass);
        stats.mean_inv_q_root = Some(acc.sum_inv_root / stats.positive_mass);
    }
    Ok(stats)
}

struct Accumulator<'a> {
    m: &'a EpsilonMachine,
    pi: &'a [f64],
    length: usize,
    keep_words: bool,
    c1: f64,
    c2: f64,
    stats: WordStats,
    sum_root: f64,
    sum_inv_root: f64,
    word: Vec<usize>,
}

impl Accumulator<'_> {
    fn descend(&mut self, current: &[Option<usize>], log_p: &[f64]) {
        if self.word.len() == self.length {
            self.leaf(current, log_p);
            return;
        }
        let n = current.len();
        for a in 0..self.m.num_symbols() {
            let mut next = vec![None; n];
            let mut next_log = vec![f64::NEG_INFINITY; n];
            let mut alive = false;
            for p in 0..n {
                if let Some(s) = current[p] {
                    if let Some(t) = self.m.next_state(s, a) {
                        next[p] = Some(t);
                        next_log[p] = log_p[p] + self.m.emission(s, a).ln();
                        alive = true;
                    }
                }
            }
            if alive {
                self.word.push(a);
                self.descend(&next, &next_log);
                self.word.pop();
            }
        }
    }

    fn leaf(&mut self, current: &[Option<usize>], log_p: &[f64]) {
        let n = current.len();
        let alive: Vec<usize> = (0..n).filter(|&p| current[p].is_some()).collect();
        let image = |p: usize| current[p].expect("alive state");

        let mut images: Vec<usize> = alive.iter().map(|&p| image(p)).collect();
        images.sort_unstable();
        images.dedup();
        let reset = images.len() <= 1;

        let probability: f64 = alive.iter().map(|&p| self.pi[p] * log_p[p].exp()).sum();
        if !reset {
            self.stats.nsyn_probability += probability;
            for &p in &alive {
                self.stats.nsyn_from_state[p] += log_p[p].exp();
            }
        }

        // belief, scaled by the largest path probability to survive underflow
        let max_log = alive
            .iter()
            .map(|&p| log_p[p])
            .fold(f64::NEG_INFINITY, f64::max);
        let mut mass = vec![0.0; n];
        for &p in &alive {
            mass[image(p)] += self.pi[p] * (log_p[p] - max_log).exp();
        }
        let total: f64 = mass.iter().sum();
        for v in &mut mass {
            *v /= total;
        }
        let q_l = BeliefState::from_phi(mass).q_l;

        // f_w and s_w, lowest index on ties
        let mut f_w = alive[0];
        for &p in &alive[1..] {
            if log_p[p] > log_p[f_w] {
                f_w = p;
            }
        }
        let mut s_w: Option<usize> = None;
        for &p in &alive {
            if image(p) != image(f_w) && s_w.is_none_or(|s| log_p[p] > log_p[s]) {
                s_w = Some(p);
            }
        }
        let ratio = s_w.map(|s| (log_p[s] - log_p[f_w]).exp());

        self.stats.mean_q += probability * q_l;
        if q_l > 0.0 {
            self.stats.positive_mass += probability;
            if self.length > 0 {
                let root = q_l.powf(1.0 / self.length as f64);
                self.sum_root += probability * root;
                self.sum_inv_root += probability / root;
            }
            if let Some(r) = ratio {
                self.stats.ratio_checked += 1;
                self.stats.worst_lower_excess =
                    self.stats.worst_lower_excess.max(self.c1 * r - q_l);
                self.stats.worst_upper_excess =
                    self.stats.worst_upper_excess.max(q_l - self.c2 * r);
            }
        }

        if self.keep_words {
            self.stats.words.push(WordRecord {
                word: self.word.clone(),
                probability,
                q_l,
                reset,
                f_w,
                s_w,
                ratio,
            });
        }
    }
}

/// Length of a shortest reset word by breadth-first search over subsets of
/// states; `Ok(None)` when the search exhausts every reachable subset without
/// finding one. Limited to machines with at most 64 states.
pub fn reset_threshold(m: &EpsilonMachine, cap: usize) -> Result<Option<usize>, OracleError> {
    let n = m.num_states();
    if n > 64 {
        return Err(MachineError::Shape("subset search supports at most 64 states".into()).into());
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    if n == 1 {
        return Ok(Some(0));
    }

    let mut seen = HashSet::new();
    seen.insert(full);
    let mut frontier = VecDeque::from([(full, 0usize)]);
    while let Some((set, depth)) = frontier.pop_front() {
        if depth == cap {
            return Err(OracleError::CapExceeded { cap });
        }
        for a in 0..m.num_symbols() {
            let mut image = 0u64;
            for q in 0..n {
                if set & (1 << q) != 0 {
                    if let Some(t) = m.next_state(q, a) {
                        image |= 1 << t;
                    }
                }
            }
            match image.count_ones() {
                0 => {}
                1 => return Ok(Some(depth + 1)),
                _ => {
                    if seen.insert(image) {
                        frontier.push_back((image, depth + 1));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Normalized log-likelihood ratio `(1/L) ln(P_p(w) / P_q(w))` of one tracked
/// deadlock pair along a simulated word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRatioSample {
    pub run: usize,
    /// Starting pair: the generating state and a partner it can never merge with.
    pub pair: Pair,
    /// Closed deadlock component containing the pair after `L` steps, if any.
    pub component: Option<usize>,
    pub mean_log_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub length: usize,
    /// `Q_L` per run, in run order.
    pub q_l: Vec<f64>,
    pub log_ratios: Vec<LogRatioSample>,
}

/// Simulates `runs` words of length `L` from the stationary distribution and
/// records the observer's `Q_L` for each.
///
/// Run `i` draws from ChaCha8 seeded with `seed` on stream `i`, so every run is
/// reproducible on its own and results do not depend on thread scheduling.
/// Alongside the true state, every partner `q` such that `(start, q)` is a
/// deadlock pair is tracked and its normalized log-likelihood ratio recorded.
pub fn simulate_beliefs(
    m: &EpsilonMachine,
    length: usize,
    runs: usize,
    seed: u64,
) -> Result<Simulation, OracleError> {
    let stationary = m.stationary_distribution()?;
    let pa = PairAutomaton::build(m);
    let da = DeadlockAnalysis::analyze(m, &pa);

    let per_run: Vec<(f64, Vec<LogRatioSample>)> = (0..runs)
        .into_par_iter()
        .map(|run| simulate_run(m, &stationary.pi, &pa, &da, length, seed, run))
        .collect();

    let mut q_l = Vec::with_capacity(runs);
    let mut log_ratios = Vec::new();
    for (q, samples) in per_run {
        q_l.push(q);
        log_ratios.extend(samples);
    }
    Ok(Simulation {
        length,
        q_l,
        log_ratios,
    })
}

fn sample_index(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        cumulative += w;
        last = i;
        if u < cumulative {
            return i;
        }
    }
    last
}

fn simulate_run(
    m: &EpsilonMachine,
    pi: &[f64],
    pa: &PairAutomaton,
    da: &DeadlockAnalysis,
    length: usize,
    seed: u64,
    run: usize,
) -> (f64, Vec<LogRatioSample>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);

    let start = sample_index(&mut rng, pi);
    let mut partners: Vec<(usize, usize, f64)> = (0..m.num_states())
        .filter(|&q| q != start)
        .filter(|&q| {
            pa.index_of(Pair::new(start, q))
                .is_some_and(|i| da.is_deadlock(i))
        })
        .map(|q| (q, q, 0.0))
        .collect();

    let mut state = start;
    let mut phi = pi.to_vec();
    for _ in 0..length {
        let a = sample_index(&mut rng, m.emissions(state));
        let p_true = m.emission(state, a);
        for (_, partner, log_ratio) in &mut partners {
            // deadlock partners share the generating state's defined symbols
            let p_other = m.emission(*partner, a);
            *log_ratio += (p_true / p_other).ln();
            *partner = m.next_state(*partner, a).expect("deadlock closure");
        }
        state = m.next_state(state, a).expect("sampled symbol is defined");
        phi = belief_step(m, &phi, a).expect("generated symbol has positive probability");
    }
    let q_l = BeliefState::from_phi(phi).q_l;

    let samples = if length == 0 {
        Vec::new()
    } else {
        partners
            .into_iter()
            .map(|(q0, q, log_ratio)| LogRatioSample {
                run,
                pair: Pair::new(start, q0),
                component: pa
                    .index_of(Pair::new(state, q))
                    .and_then(|i| da.component_of(i)),
                mean_log_ratio: log_ratio / length as f64,
            })
            .collect()
    };
    (q_l, samples)
}

/// Summary statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std_error: f64,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
    pub zero_fraction: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn summarize(values: &[f64]) -> Summary {
    assert!(!values.is_empty(), "empty sample");
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = if count > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Summary {
        count,
        mean,
        std_error: (var / count as f64).sqrt(),
        median: quantile_sorted(&sorted, 0.5),
        p10: quantile_sorted(&sorted, 0.1),
        p90: quantile_sorted(&sorted, 0.9),
        zero_fraction: values.iter().filter(|&&v| v == 0.0).count() as f64 / count as f64,
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
