//! Seeded machine corpora shared by the integration tests.
#![allow(dead_code)]

use emsync::format::parse_machine;
use emsync::generate::{random_machine, RandomMachineParams};
use emsync::{classify, Classification, Edge, EpsilonMachine};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const M_EX: &str = include_str!("../../fixtures/M_EX.em");
pub const M_NE: &str = include_str!("../../fixtures/M_NE.em");
pub const M_GM: &str = include_str!("../../fixtures/M_GM.em");
pub const M_1: &str = include_str!("../../fixtures/M_1.em");

pub fn load(text: &str) -> EpsilonMachine {
    parse_machine(text).expect("fixture parses")
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.em"))
}

const DENSITIES: [f64; 3] = [1.0, 0.8, 0.6];

/// Random machines with `2 <= n <= max_states` and `2 <= k <= max_symbols`,
/// cycling through shapes by seed, restricted to one class if requested.
pub fn random_corpus(
    count: usize,
    max_states: usize,
    max_symbols: usize,
    class: Option<Classification>,
) -> Vec<EpsilonMachine> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    while out.len() < count {
        let n = 2 + (seed as usize) % (max_states - 1);
        let k = 2 + (seed as usize / 7) % (max_symbols - 1);
        let density = DENSITIES[(seed as usize / 3) % DENSITIES.len()];
        let params = RandomMachineParams {
            max_attempts: 2_000,
            ..RandomMachineParams::new(n, k, density, seed)
        };
        seed += 1;
        let Ok(m) = random_machine(&params) else {
            continue;
        };
        if class.is_none_or(|c| classify(&m) == c) {
            out.push(m);
        }
        assert!(seed < 1_000_000, "corpus generation stalled");
    }
    out
}

/// Machines whose every symbol is a complete permutation of the states; such
/// machines never shrink any set of states, so they are non-exact for n >= 2.
pub fn permutation_machine(states: usize, symbols: usize, seed: u64) -> EpsilonMachine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = |count: usize, prefix: &str| -> Vec<String> {
        (0..count).map(|i| format!("{prefix}{i}")).collect()
    };
    loop {
        let perms: Vec<Vec<usize>> = (0..symbols)
            .map(|_| {
                let mut p: Vec<usize> = (0..states).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let mut edges = Vec::new();
        for q in 0..states {
            let weights: Vec<f64> = (0..symbols)
                .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                .collect();
            let total: f64 = weights.iter().sum();
            for (a, w) in weights.iter().enumerate() {
                edges.push(Edge {
                    from: q,
                    symbol: a,
                    to: perms[a][q],
                    probability: w / total,
                });
            }
        }
        if let Ok(m) = EpsilonMachine::new(
            format!("perm_n{states}_k{symbols}_s{seed}"),
            names(states, ""),
            names(symbols, "x"),
            &edges,
        ) {
            return m;
        }
    }
}

/// Non-exact machines with `2 <= n <= max_states`: every other entry is a
/// permutation machine, the rest are rejection-sampled random machines.
pub fn non_exact_corpus(count: usize, max_states: usize) -> Vec<EpsilonMachine> {
    let mut out = Vec::with_capacity(count);
    let mut seed = 0u64;
    let mut filtered = random_corpus(
        count / 2,
        max_states.min(4),
        3,
        Some(Classification::NonExact),
    )
    .into_iter();
    while out.len() < count {
        if out.len() % 2 == 1 {
            if let Some(m) = filtered.next() {
                out.push(m);
                continue;
            }
        }
        let n = 2 + (seed as usize) % (max_states - 1);
        let k = 2 + (seed as usize / 5) % 2;
        out.push(permutation_machine(n, k, 10_000 + seed));
        seed += 1;
    }
    out
}
