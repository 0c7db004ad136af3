use std::collections::BTreeMap;

use interferometry::circuits::{parse, serialize, Circuit};
use interferometry::qsl::bits::run_bit_pair;
use interferometry::qsl::{delta, run_exact, CnotSign, OnticState, PhaseModulus, QslMode};
use interferometry::{BeamsplitterRatio, Probability};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn modulus(n: u64) -> PhaseModulus {
    PhaseModulus::new(n).unwrap()
}

fn ratio(k: u64, n: u64) -> BeamsplitterRatio {
    BeamsplitterRatio::new(k, n).unwrap()
}

/// Every ontic state of `m` modes with photon bits from `zs` and all phases.
fn all_states(n: u64, zs: &[u8]) -> Vec<OnticState> {
    let m = zs.len() as u32;
    (0..n.pow(m))
        .map(|mut idx| {
            let modes = zs
                .iter()
                .map(|&z| {
                    let y = idx % n;
                    idx /= n;
                    QslMode::new(z, y)
                })
                .collect();
            OnticState::new(modulus(n), modes).unwrap()
        })
        .collect()
}

#[test]
fn delta_fires_with_probability_one_minus_k_over_n() {
    for n in 2..=12u64 {
        for k in 0..=n {
            let stays = (0..n)
                .filter(|&x| delta(x, k, modulus(n)).unwrap() == 0)
                .count() as u64;
            assert_eq!(stays, k, "n={n} k={k}");
        }
    }
}

#[test]
fn photon_number_conserved_by_beamsplitters() {
    for n in 2..=12u64 {
        for k in 0..=n {
            let r = ratio(k, n);
            for m in 2..=3usize {
                let mut patterns = vec![vec![0u8; m]];
                for p in 0..m {
                    let mut z = vec![0u8; m];
                    z[p] = 1;
                    patterns.push(z);
                }
                for zs in &patterns {
                    for state in all_states(n, zs) {
                        for (upper, lower) in [(0, 1), (1, 0), (m - 2, m - 1)] {
                            let mut s = state.clone();
                            s.beamsplitter(upper, lower, r).unwrap();
                            assert_eq!(s.photon_count(), state.photon_count());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn vacuum_pairs_stay_empty() {
    for n in 2..=12u64 {
        for k in 0..=n {
            for state in all_states(n, &[0, 0]) {
                let mut s = state.clone();
                s.beamsplitter(0, 1, ratio(k, n)).unwrap();
                assert_eq!((s.mode(0).z, s.mode(1).z), (0, 0));
                // The vacuum pair returns to its original phases as well.
                assert_eq!(s, state);
            }
        }
    }
}

#[test]
fn cnot_uncomputation_exhaustive() {
    for n in 2..=6u64 {
        for zs in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            for state in all_states(n, &zs) {
                for (first, second) in [
                    (CnotSign::Plus, CnotSign::Minus),
                    (CnotSign::Minus, CnotSign::Plus),
                ] {
                    let mut s = state.clone();
                    s.cnot(0, 1, first).unwrap();
                    s.cnot(0, 1, second).unwrap();
                    assert_eq!(s, state);
                }
            }
        }
    }
}

#[test]
fn closed_interferometer_flips_path_and_restores_phases() {
    for n in 2..=12u64 {
        for k in 0..=n {
            let r = ratio(k, n);
            for z in [0u8, 1] {
                for state in all_states(n, &[z, 1 - z]) {
                    let mut s = state.clone();
                    s.beamsplitter(0, 1, r).unwrap();
                    s.beamsplitter(0, 1, r.complement()).unwrap();
                    assert_eq!(
                        s.mode(0),
                        QslMode::new(1 - z, state.mode(0).y),
                        "n={n} k={k}"
                    );
                    assert_eq!(s.mode(1), QslMode::new(z, state.mode(1).y), "n={n} k={k}");
                }
            }
        }
    }
}

#[test]
fn identity_and_swap_ratios() {
    for n in 2..=12u64 {
        for z in [0u8, 1] {
            for state in all_states(n, &[z, 1 - z]) {
                let mut id = state.clone();
                id.beamsplitter(0, 1, BeamsplitterRatio::identity())
                    .unwrap();
                assert_eq!(id, state);

                let mut sw = state.clone();
                sw.beamsplitter(0, 1, BeamsplitterRatio::swap()).unwrap();
                assert_eq!((sw.mode(0).z, sw.mode(1).z), (1 - z, z));
            }
        }
    }
}

#[test]
fn ry_matches_bit_pair_rotation_under_coordinate_change() {
    // Bit-pair rotation (z, x) -> (x, !z), with x = y - z mod 2.
    for z in 0..2u8 {
        for x in 0..2u8 {
            let y = u64::from((x + z) % 2);
            let mut s = OnticState::new(modulus(2), vec![QslMode::new(z, y)]).unwrap();
            s.ry(0, ratio(1, 2)).unwrap();
            let (z_expect, x_expect) = (x, 1 - z);
            let out = s.mode(0);
            assert_eq!(out.z, z_expect);
            assert_eq!(out.y, u64::from((x_expect + z_expect) % 2));
        }
    }
}

fn two_path_circuits(alphabet: &[&'static str], depth: usize) -> Vec<Vec<&'static str>> {
    let mut all: Vec<Vec<&str>> = vec![vec![]];
    let mut frontier = all.clone();
    for _ in 0..depth {
        frontier = frontier
            .iter()
            .flat_map(|s| alphabet.iter().map(move |a| [s.clone(), vec![*a]].concat()))
            .collect();
        all.extend(frontier.iter().cloned());
    }
    all
}

fn compare_with_bit_pair(
    source: usize,
    seq: &[&str],
) -> (
    Circuit,
    BTreeMap<String, BigRational>,
    BTreeMap<String, BigRational>,
) {
    let text = format!(
        "paths 2\nsource {source}\n{}\ndetect 0 upper\ndetect 1 lower\n",
        seq.join("\n")
    );
    let circuit = parse(&text).unwrap();
    let qsl = run_exact(&circuit, modulus(2)).unwrap();
    let qsl = qsl
        .entries()
        .iter()
        .map(|(l, p)| (l.clone(), p.as_exact().unwrap().clone()))
        .collect();
    let oracle = run_bit_pair(&circuit).unwrap();
    let oracle = oracle
        .entries()
        .iter()
        .map(|(l, p)| (l.clone(), p.as_exact().unwrap().clone()))
        .collect();
    (circuit, qsl, oracle)
}

#[test]
fn mod_two_model_matches_bit_pair_model_in_forward_orientation() {
    let alphabet = [
        "bs 0 1 1/2",
        "bomb 0 live",
        "bomb 1 live",
        "bomb 0 dud",
        "dephase 0",
        "dephase 1",
    ];
    let circuits = two_path_circuits(&alphabet, 5);
    assert_eq!(circuits.len(), 1 + 6 + 36 + 216 + 1296 + 7776);
    for source in 0..2 {
        for seq in &circuits {
            let (circuit, qsl, oracle) = compare_with_bit_pair(source, seq);
            assert_eq!(qsl, oracle, "circuit:\n{}", serialize(&circuit));
        }
    }
}

#[test]
fn reversed_splitters_break_mod_two_equivalence() {
    // Forward then reversed splitter: the bit-pair model and the quantum
    // transpose both return the photon to path 0, the mod-n maps send it to 1.
    let (_, qsl, oracle) = compare_with_bit_pair(0, &["bs 0 1 1/2", "bs 1 0 1/2"]);
    let one = BigRational::from_integer(BigInt::from(1));
    assert_eq!(oracle, BTreeMap::from([("upper".to_string(), one.clone())]));
    assert_eq!(qsl, BTreeMap::from([("lower".to_string(), one)]));

    let alphabet = [
        "bs 0 1 1/2",
        "bs 1 0 1/2",
        "bomb 0 live",
        "bomb 1 live",
        "dephase 0",
        "dephase 1",
    ];
    let mut diverging = 0;
    for source in 0..2 {
        for seq in two_path_circuits(&alphabet, 4) {
            let (_, qsl, oracle) = compare_with_bit_pair(source, &seq);
            if qsl != oracle {
                assert!(seq.contains(&"bs 1 0 1/2"));
                diverging += 1;
            }
        }
    }
    assert_eq!(diverging, 220);
}

#[test]
fn exact_distributions_sum_to_one() {
    for n in 2..=8u64 {
        for k in 1..n {
            for mode in ["live", "dud"] {
                let text = format!("paths 2\nsource 0\nbs 0 1 {k}/{n}\nbomb 0 {mode}\nbs 0 1 {}/{n}\ndetect 0 upper\ndetect 1 lower\n", n - k);
                let d = run_exact(&parse(&text).unwrap(), modulus(n)).unwrap();
                assert_eq!(d.total(), Probability::ratio(1, 1));
            }
        }
    }
}

fn arb_state(step: u64) -> impl Strategy<Value = OnticState> {
    (1u64..=6, 2usize..=5).prop_flat_map(move |(f, m)| {
        let n = step * f;
        proptest::collection::vec((0u8..=1, 0..n), m).prop_map(move |modes| {
            OnticState::new(
                modulus(n),
                modes.into_iter().map(|(z, y)| QslMode::new(z, y)).collect(),
            )
            .unwrap()
        })
    })
}

fn distinct_pair(m: usize, a: usize, b: usize) -> (usize, usize) {
    let a = a % m;
    (a, (a + 1 + b % (m - 1)) % m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn cnot_pair_is_identity(state in arb_state(2), a in 0usize..5, b in 0usize..5) {
        let (c, t) = distinct_pair(state.modes().len(), a, b);
        let mut s = state.clone();
        s.cnot(c, t, CnotSign::Minus).unwrap();
        s.cnot(c, t, CnotSign::Plus).unwrap();
        prop_assert_eq!(s, state);
    }

    #[test]
    fn beamsplitter_only_touches_its_pair(state in arb_state(4), k in 0u64..=4, a in 0usize..5, b in 0usize..5) {
        let m = state.modes().len();
        let (u, l) = distinct_pair(m, a, b);
        let mut s = state.clone();
        s.beamsplitter(u, l, ratio(k, 4)).unwrap();
        for i in (0..m).filter(|i| *i != u && *i != l) {
            prop_assert_eq!(s.mode(i), state.mode(i));
        }
    }

    #[test]
    fn random_closed_interferometers_flip(state in arb_state(12), k in 0u64..=12, a in 0usize..5, b in 0usize..5, z in 0u8..=1) {
        let m = state.modes().len();
        let (u, l) = distinct_pair(m, a, b);
        let mut modes = state.modes().to_vec();
        for mode in modes.iter_mut() {
            mode.z = 0;
        }
        modes[u].z = z;
        modes[l].z = 1 - z;
        let start = OnticState::new(state.modulus(), modes).unwrap();
        let mut s = start.clone();
        let r = ratio(k, 12);
        s.beamsplitter(u, l, r).unwrap();
        s.beamsplitter(u, l, r.complement()).unwrap();
        prop_assert_eq!(s.mode(u), QslMode::new(1 - z, start.mode(u).y));
        prop_assert_eq!(s.mode(l), QslMode::new(z, start.mode(l).y));
    }
}
