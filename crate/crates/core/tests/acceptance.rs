//! Acceptance suite. Each test checks one criterion at its pinned tolerance
//! and prints a single `[PASS]` or `[FAIL]` line before asserting.
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads 1`
//! to see the lines in order.

mod common;

use std::time::{Duration, Instant};

use common::*;
use emsync::linalg::{spectral_radius, DEFAULT_SPECTRAL_TOL};
use emsync::oracle::{
    exact_word_stats, regression_slope, reset_threshold, simulate_beliefs, summarize,
};
use emsync::rates::{analyze_default, nsyn_bounds, pair_matrix, prediction_rate, sync_rate};
use emsync::{classify, Classification, PairAutomaton};

fn verdict(criterion: u32, passed: bool, detail: String) {
    let tag = if passed { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {detail}");
    assert!(passed, "criterion {criterion} failed: {detail}");
}

fn exact_corpus() -> Vec<emsync::EpsilonMachine> {
    random_corpus(100, 5, 3, Some(Classification::Exact))
}

const SRC_M_EX: f64 = 0.353_553_391;
const E_M_NE: f64 = 0.186_538_596;
const PRC_M_NE: f64 = 0.829_832;
const SLACK: f64 = 1e-9;

#[test]
fn criterion_01_sync_rate_of_m_ex() {
    let start = Instant::now();
    let m = load(M_EX);
    let src = sync_rate(&m, 1e-9).expect("M_EX is exact");
    let stats = exact_word_stats(&m, 16).expect("enumeration fits the budget");
    let root = stats.nsyn_probability.powf(1.0 / 16.0);
    let elapsed = start.elapsed();
    let passed = (src - SRC_M_EX).abs() <= 1e-6
        && (root - SRC_M_EX).abs() <= 1e-6
        && elapsed < Duration::from_secs(1);
    verdict(
        1,
        passed,
        format!("src = {src:.9}, oracle root at L=16 = {root:.9}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_prediction_rate_of_m_ne() {
    let start = Instant::now();
    let m = load(M_NE);
    let report = analyze_default(&m).expect("analysis succeeds");
    let e_m = report
        .components
        .iter()
        .map(|c| c.expectation)
        .fold(f64::INFINITY, f64::min);
    let prc = report.prc;
    let elapsed = start.elapsed();
    let passed = report.components.len() == 1
        && (e_m - E_M_NE).abs() <= 1e-6
        && (prc - PRC_M_NE).abs() <= 1e-5
        && elapsed < Duration::from_secs(1);
    verdict(
        2,
        passed,
        format!("E_M = {e_m:.9}, prc = {prc:.9}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_03_per_state_sandwich() {
    let start = Instant::now();
    let corpus = exact_corpus();
    let mut checks = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for m in &corpus {
        for length in 1..=10 {
            let bounds = nsyn_bounds(m, length).unwrap();
            let stats = exact_word_stats(m, length).unwrap();
            for p in 0..m.num_states() {
                let exact = stats.nsyn_from_state[p];
                worst = worst
                    .max(bounds.state_maxima[p] - exact)
                    .max(exact - bounds.state_totals[p]);
                checks += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = worst <= SLACK && elapsed < Duration::from_secs(60);
    verdict(
        3,
        passed,
        format!(
            "{} machines, {checks} state checks, worst violation {worst:.3e}, {elapsed:.2?}",
            corpus.len()
        ),
    );
}

#[test]
fn criterion_04_stationary_sandwich() {
    let corpus = exact_corpus();
    let mut worst = f64::NEG_INFINITY;
    for m in &corpus {
        for length in 1..=10 {
            let bounds = nsyn_bounds(m, length).unwrap();
            let exact = exact_word_stats(m, length).unwrap().nsyn_probability;
            worst = worst.max(bounds.lower - exact).max(exact - bounds.upper);
        }
    }
    verdict(
        4,
        worst <= SLACK,
        format!(
            "{} machines, L <= 10, worst violation {worst:.3e}",
            corpus.len()
        ),
    );
}

#[test]
fn criterion_05_word_ratio_sandwich() {
    let corpus = random_corpus(50, 4, 3, None);
    let mut checked = 0usize;
    let mut worst_lower = f64::NEG_INFINITY;
    let mut worst_upper = f64::NEG_INFINITY;
    let mut failing = Vec::new();
    for m in &corpus {
        for length in 1..=8 {
            let stats = exact_word_stats(m, length).unwrap();
            checked += stats.ratio_checked;
            worst_lower = worst_lower.max(stats.worst_lower_excess);
            worst_upper = worst_upper.max(stats.worst_upper_excess);
            if !stats.ratio_bounds_hold(SLACK) && failing.last() != Some(&m.name().to_string()) {
                failing.push(m.name().to_string());
            }
        }
    }
    verdict(
        5,
        failing.is_empty(),
        format!(
            "{} machines, {checked} words, worst lower excess {worst_lower:.3e}, \
             worst upper excess {worst_upper:.3e}, violating machines {failing:?}",
            corpus.len()
        ),
    );
}

#[test]
fn criterion_06_divergence_positive() {
    let corpus = non_exact_corpus(1000, 6);
    let mut components = 0usize;
    let mut smallest = f64::INFINITY;
    for m in &corpus {
        let report = analyze_default(m).unwrap();
        assert_eq!(
            report.classification,
            Classification::NonExact,
            "{}",
            m.name()
        );
        for c in &report.components {
            components += 1;
            smallest = smallest.min(c.expectation);
        }
    }
    verdict(
        6,
        smallest > 1e-12,
        format!(
            "{} machines, {components} components, smallest E_M {smallest:.6e}",
            corpus.len()
        ),
    );
}

#[test]
fn criterion_07_empirical_decay_rate() {
    let start = Instant::now();
    let m = load(M_NE);
    let lengths: Vec<usize> = (1..=8).map(|i| 50 * i).collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &length in &lengths {
        let sim = simulate_beliefs(&m, length, 10_000, 1).unwrap();
        let median = summarize(&sim.q_l).median;
        xs.push(length as f64);
        ys.push(median.ln());
    }
    let slope = regression_slope(&xs, &ys);
    let target = PRC_M_NE.ln();
    let elapsed = start.elapsed();
    let rel = ((slope - target) / target).abs();
    let passed = slope.is_finite() && rel <= 0.10 && elapsed < Duration::from_secs(120);
    verdict(
        7,
        passed,
        format!("slope = {slope:.6}, target = {target:.6}, relative error {rel:.4}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_08_classification_cross_oracle() {
    let mut corpus = exact_corpus();
    corpus.extend(random_corpus(200, 6, 3, None));
    corpus.extend(non_exact_corpus(200, 6));
    corpus.extend([load(M_EX), load(M_NE), load(M_GM), load(M_1)]);
    let mut mismatches = Vec::new();
    for m in corpus.iter().filter(|m| m.num_states() <= 6) {
        let class = classify(m);
        let reset = reset_threshold(m, 1 << m.num_states()).unwrap();
        let radius = spectral_radius(
            &pair_matrix(&PairAutomaton::build(m)).total,
            DEFAULT_SPECTRAL_TOL,
        )
        .unwrap();
        let reset_agrees = (class == Classification::Exact) == reset.is_some();
        let radius_agrees = (class == Classification::NonExact) == ((radius - 1.0).abs() <= 1e-6);
        if !reset_agrees || !radius_agrees {
            mismatches.push(format!(
                "{} ({class:?}, reset {reset:?}, radius {radius})",
                m.name()
            ));
        }
    }
    verdict(
        8,
        mismatches.is_empty(),
        format!("{} machines, mismatches {mismatches:?}", corpus.len()),
    );
}

#[test]
fn criterion_09_degenerate_machines() {
    let gm = sync_rate(&load(M_GM), 1e-9).unwrap();
    let one = load(M_1);
    let one_src = sync_rate(&one, 1e-9).unwrap();
    let one_prc = prediction_rate(&one).unwrap();
    let one_escape = emsync::rates::escape_rate(&one, 1e-9).unwrap();
    let mut exact = exact_corpus();
    exact.extend([load(M_EX), load(M_GM), one]);
    let nonzero_prc: Vec<String> = exact
        .iter()
        .filter(|m| prediction_rate(m).unwrap() != 0.0)
        .map(|m| m.name().to_string())
        .collect();
    let passed = gm == 0.0
        && one_src == 0.0
        && one_prc == 0.0
        && one_escape == 0.0
        && nonzero_prc.is_empty();
    verdict(
        9,
        passed,
        format!(
            "src(M_GM) = {gm}, M_1 = ({one_src}, {one_prc}, {one_escape}), \
             {} exact machines with prc != 0: {nonzero_prc:?}",
            exact.len()
        ),
    );
}

#[test]
fn criterion_10_log_ratio_concentration() {
    let m = load(M_NE);
    let sim = simulate_beliefs(&m, 400, 10_000, 1).unwrap();
    let samples: Vec<f64> = sim.log_ratios.iter().map(|s| s.mean_log_ratio).collect();
    let inside = samples
        .iter()
        .filter(|y| (*y - E_M_NE).abs() <= 0.05)
        .count();
    let fraction = inside as f64 / samples.len() as f64;
    let summary = summarize(&samples);
    let sd = summary.std_error * (samples.len() as f64).sqrt();
    verdict(
        10,
        samples.len() == 10_000 && fraction >= 0.95,
        format!(
            "{inside} of {} samples within 0.05 of E_M ({fraction:.4}), mean {:.6}, sd {sd:.6}",
            samples.len(),
            summary.mean
        ),
    );
}
