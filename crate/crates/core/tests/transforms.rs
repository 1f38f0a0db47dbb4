use ctmg_core::fixtures::fig1;
use ctmg_core::format::{parse_model, serialize_model};
use ctmg_core::model::{CtmgModel, LocationId};
use ctmg_core::random::{random_model, RandomModelOptions};
use ctmg_core::solver::{solve, Objective, SolveOptions};
use ctmg_core::transform::{early_to_late, late_to_early, make_simple, uniform_rate, uniformise, DEFAULT_COMPOUND_CAP};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn initial_values(m: &CtmgModel, objective: Objective) -> Vec<f64> {
    solve(m, objective, &SolveOptions::with_steps(1000)).unwrap().values.initial_row().to_vec()
}

fn model(seed: u64, two_player: bool) -> CtmgModel {
    let opts = RandomModelOptions {
        two_player,
        ..Default::default()
    };
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), &opts)
}

#[test]
fn early_to_late_on_fig1_gives_the_early_optimum() {
    // an early scheduler fixes the action on entering A at time 0, so the
    // best it can do is always-a
    let (m, map) = early_to_late(&fig1()).unwrap();
    let gate = map.get(LocationId(0));
    let v = initial_values(&m, Objective::Max)[gate.0];
    assert!((v - (1.0 - 5.0 * (-4.0f64).exp())).abs() < 1e-9, "{v}");
}

#[test]
fn late_to_early_after_uniformise_is_valid() {
    let u = uniformise(&fig1(), None).unwrap();
    let (m, _) = late_to_early(&u).unwrap();
    assert_eq!(m.location_ids().filter(|&l| !m.is_continuous(l)).count(), 3);
    let single = parse_model("ctmg\ntime-bound 2\nlocation x continuous reach goal\nrate x a x 3\ninit x 1\n").unwrap();
    let (s, _) = late_to_early(&single).unwrap();
    assert_eq!(initial_values(&s, Objective::Max)[0], 1.0);
}

#[test]
fn make_simple_without_discrete_locations_keeps_values() {
    let m = fig1();
    let (s, paths) = make_simple(&m, DEFAULT_COMPOUND_CAP).unwrap();
    assert_eq!(paths.paths.len(), 4);
    let (v, w) = (initial_values(&m, Objective::Max), initial_values(&s, Objective::Max));
    for l in m.location_ids() {
        assert!((v[l.0] - w[l.0]).abs() < 1e-12);
    }
}

#[test]
fn uniformised_fig1_round_trips_through_text() {
    let u = uniformise(&fig1(), None).unwrap();
    assert_eq!(parse_model(&serialize_model(&u)).unwrap(), u);
}

#[test]
fn transforms_reject_wrong_inputs() {
    assert!(matches!(late_to_early(&fig1()), Err(ctmg_core::Error::NotUniform { .. })));
    assert!(matches!(make_simple(&model(3, true), DEFAULT_COMPOUND_CAP), Err(ctmg_core::Error::MultiPlayer)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn uniformise_preserves_values_and_equalises_rates(seed in any::<u64>(), two in any::<bool>()) {
        let m = model(seed, two);
        let u = uniformise(&m, None).unwrap();
        prop_assert!(uniform_rate(&u).is_ok());
        let objectives: &[Objective] = if two { &[Objective::Game] } else { &[Objective::Max, Objective::Min] };
        for &o in objectives {
            let (v, w) = (initial_values(&m, o), initial_values(&u, o));
            for l in m.location_ids() {
                prop_assert!((v[l.0] - w[l.0]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn late_to_early_preserves_values_of_uniform_models(seed in any::<u64>()) {
        let u = uniformise(&model(seed, false), None).unwrap();
        let (e, map) = late_to_early(&u).unwrap();
        for o in [Objective::Max, Objective::Min] {
            let (v, w) = (initial_values(&u, o), initial_values(&e, o));
            for (orig, new) in map.iter() {
                prop_assert!((v[orig.0] - w[new.0]).abs() < 1e-6, "{} vs {}", v[orig.0], w[new.0]);
            }
        }
    }

    #[test]
    fn early_to_late_never_helps_the_optimiser(seed in any::<u64>()) {
        let m = model(seed, false);
        let (e, map) = early_to_late(&m).unwrap();
        prop_assert!(e.location_ids().filter(|&l| e.is_continuous(l)).all(|l| e.enabled_actions(l).unwrap().len() == 1));
        let (hi, hi_e) = (initial_values(&m, Objective::Max), initial_values(&e, Objective::Max));
        let (lo, lo_e) = (initial_values(&m, Objective::Min), initial_values(&e, Objective::Min));
        for (orig, gate) in map.iter() {
            prop_assert!(hi_e[gate.0] <= hi[orig.0] + 1e-9);
            prop_assert!(lo_e[gate.0] >= lo[orig.0] - 1e-9);
            let choiceless = m.location_ids().all(|l| m.enabled_actions(l).unwrap().len() == 1);
            if choiceless {
                prop_assert!((hi_e[gate.0] - hi[orig.0]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn make_simple_preserves_values(seed in any::<u64>()) {
        let m = model(seed, false);
        let (s, _) = make_simple(&m, DEFAULT_COMPOUND_CAP).unwrap();
        for l in s.location_ids().filter(|&l| s.is_continuous(l)) {
            for row in s.rate_rows(l).values() {
                prop_assert!(row.iter().all(|e| s.is_continuous(e.0)));
            }
        }
        for o in [Objective::Max, Objective::Min] {
            let (v, w) = (initial_values(&m, o), initial_values(&s, o));
            for l in m.location_ids() {
                prop_assert!((v[l.0] - w[l.0]).abs() < 1e-9);
            }
        }
    }
}
