//! Random small models and schedulers for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{ActionId, CtmgModel, LocationId, LocationKind, ModelBuilder, Owner};
use crate::solver::{CylindricalScheduler, PositionalProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomModelOptions {
    pub max_locations: usize,
    pub max_actions: usize,
    pub max_rate: f64,
    pub max_time: f64,
    /// Give locations to both players.
    pub two_player: bool,
    /// Allow discrete locations (kept acyclic by index order).
    pub discrete: bool,
}

impl Default for RandomModelOptions {
    fn default() -> Self {
        Self {
            max_locations: 5,
            max_actions: 3,
            max_rate: 10.0,
            max_time: 3.0,
            two_player: false,
            discrete: true,
        }
    }
}

const ACTION_NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// A valid model: the last location is an absorbing continuous goal, all
/// others have at least one enabled action. Discrete locations only lead to
/// continuous locations or to discrete ones with a larger index.
pub fn random_model<R: Rng>(rng: &mut R, opts: &RandomModelOptions) -> CtmgModel {
    let n = rng.gen_range(2..=opts.max_locations.max(2));
    let k = rng.gen_range(1..=opts.max_actions.clamp(1, ACTION_NAMES.len()));
    let mut b = ModelBuilder::new(round2(rng.gen_range(0.1..=opts.max_time.max(0.1))));
    let actions: Vec<ActionId> = ACTION_NAMES[..k].iter().map(|a| b.action(a)).collect();

    let goal = n - 1;
    let kinds: Vec<LocationKind> = (0..n)
        .map(|i| {
            if i != goal && opts.discrete && rng.gen_bool(0.25) {
                LocationKind::Discrete
            } else {
                LocationKind::Continuous
            }
        })
        .collect();
    let mut owners: Vec<Owner> = (0..n)
        .map(|_| if opts.two_player && rng.gen_bool(0.5) { Owner::Safe } else { Owner::Reach })
        .collect();
    if opts.two_player {
        // both players hold a non-goal location
        let both = |o: &[Owner]| o[..goal].contains(&Owner::Reach) && o[..goal].contains(&Owner::Safe);
        if !both(&owners) {
            if goal >= 2 {
                owners[0] = Owner::Reach;
                owners[1] = Owner::Safe;
            } else {
                owners[0] = Owner::Reach;
                owners[goal] = Owner::Safe;
            }
        }
    }
    let ids: Vec<LocationId> = (0..n)
        .map(|i| b.location(format!("l{i}"), kinds[i], owners[i], i == goal))
        .collect();

    for i in 0..goal {
        let targets: Vec<usize> = (0..n)
            .filter(|&j| kinds[j] == LocationKind::Continuous || j > i)
            .collect();
        for (idx, &a) in actions.iter().enumerate() {
            if idx > 0 && rng.gen_bool(0.3) {
                continue;
            }
            let m = rng.gen_range(1..=targets.len().min(3));
            let chosen: Vec<usize> = targets.choose_multiple(rng, m).copied().collect();
            if kinds[i] == LocationKind::Continuous {
                for &j in &chosen {
                    let r = round2(rng.gen_range(0.01..=opts.max_rate));
                    b.set_rate(ids[i], a, ids[j], r);
                }
            } else {
                let w: Vec<f64> = chosen.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
                let total: f64 = w.iter().sum();
                let mut rest = 1.0;
                for (t, (&j, wj)) in chosen.iter().zip(&w).enumerate() {
                    let p = if t + 1 == chosen.len() { rest } else { wj / total };
                    rest -= p;
                    b.set_prob(ids[i], a, ids[j], p);
                }
            }
        }
    }
    b.set_rate(ids[goal], actions[0], ids[goal], 1.0);

    // initial mass on one or two non-goal locations
    let first = rng.gen_range(0..goal);
    let second = rng.gen_range(0..goal);
    if first != second && rng.gen_bool(0.3) {
        let p = round2(rng.gen_range(0.1..0.9));
        b.set_initial(ids[first], p);
        b.set_initial(ids[second], 1.0 - p);
    } else {
        b.set_initial(ids[first], 1.0);
    }
    b.build().expect("generated models satisfy the side conditions")
}

/// Up to `max_intervals` intervals with uniformly random enabled decisions
/// at every location.
pub fn random_scheduler<R: Rng>(rng: &mut R, model: &CtmgModel, max_intervals: usize) -> CylindricalScheduler {
    let t = model.time_bound();
    let k = if t > 0.0 { rng.gen_range(1..=max_intervals.max(1)) } else { 1 };
    let mut cuts: Vec<f64> = (1..k).map(|_| rng.gen_range(0.0..t)).filter(|&x| x > 0.0).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut breakpoints = vec![0.0];
    breakpoints.extend(cuts);
    breakpoints.push(t);
    let decisions = (1..breakpoints.len()).map(|_| random_profile(rng, model)).collect();
    CylindricalScheduler::new(breakpoints, decisions).expect("ascending breakpoints")
}

pub fn random_profile<R: Rng>(rng: &mut R, model: &CtmgModel) -> PositionalProfile {
    model
        .location_ids()
        .filter_map(|l| {
            let enabled = model.enabled_unchecked(l);
            enabled.choose(rng).map(|&a| (l, a))
        })
        .collect()
}

fn round2(x: f64) -> f64 {
    ((x * 100.0).round() / 100.0).max(0.01)
}
