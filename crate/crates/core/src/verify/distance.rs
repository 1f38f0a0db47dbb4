use crate::error::{Error, Result};
use crate::model::{CtmgModel, GoalMode, LocationId, LocationKind, ModelBuilder, Owner};
use crate::solver::{evaluate_scheduler, merge_partitions, CylindricalScheduler, PositionalProfile};

use super::resolve_profile;

/// The difference model of two schedulers and the scheduler to evaluate on it.
///
/// Wherever `d` and `e` choose differently, a combined action `(a_d,a_e)`
/// leads straight to a fresh goal at the sum of both exit rates (with
/// probability 1 from discrete locations); elsewhere both schedulers move
/// together. Former goals stop being goals; in absorbing mode they become
/// sinks. The probability of reaching the fresh goal bounds the difference
/// of the two schedulers' values.
pub fn distance_model(
    model: &CtmgModel,
    d: &CylindricalScheduler,
    e: &CylindricalScheduler,
) -> Result<(CtmgModel, CylindricalScheduler)> {
    crate::solver::ensure_valid(model)?;
    let t_max = model.time_bound();
    for s in [d, e] {
        if (s.time_bound() - t_max).abs() > 1e-12 * t_max.max(1.0) {
            return Err(Error::TimeBoundMismatch(s.time_bound(), t_max));
        }
    }
    let bps = merge_partitions(d.breakpoints(), e.breakpoints());
    let dd = d.refined(&bps);
    let ee = e.refined(&bps);
    let pairs = dd
        .decisions()
        .iter()
        .zip(ee.decisions())
        .map(|(x, y)| Ok((resolve_profile(model, x)?, resolve_profile(model, y)?)))
        .collect::<Result<Vec<_>>>()?;
    let absorbing = model.goal_mode() == GoalMode::Absorbing;
    let sink_goal = |l: LocationId| absorbing && model.is_goal(l);

    let mut b = ModelBuilder::new(t_max);
    b.goal_mode(model.goal_mode());
    for name in model.actions() {
        b.action(name);
    }
    let stay = b.first_action().expect("a valid model has actions");
    for loc in model.locations() {
        b.location(loc.name.clone(), loc.kind, loc.owner, false);
    }
    let g = b.location(
        super::super::transform::fresh_name(&b, "diff.goal".into()),
        LocationKind::Continuous,
        Owner::Reach,
        true,
    );
    b.set_rate(g, stay, g, 1.0);
    let mut sink = None;
    for l in model.location_ids() {
        b.set_initial(l, model.initial()[l.0]);
        if sink_goal(l) {
            if model.is_continuous(l) {
                b.set_rate(l, stay, l, 1.0);
            } else {
                let s = *sink.get_or_insert_with(|| {
                    let s = b.location(
                        super::super::transform::fresh_name(&b, "diff.sink".into()),
                        LocationKind::Continuous,
                        Owner::Reach,
                        false,
                    );
                    b.set_rate(s, stay, s, 1.0);
                    s
                });
                b.set_prob(l, stay, s, 1.0);
            }
            continue;
        }
        for (&a, row) in model.rate_rows(l) {
            for &(to, r) in row {
                b.set_rate(l, a, to, r);
            }
        }
        for (&a, row) in model.prob_rows(l) {
            for &(to, p) in row {
                b.set_prob(l, a, to, p);
            }
        }
    }

    let mut decisions = Vec::with_capacity(pairs.len());
    for (x, y) in &pairs {
        let mut profile = PositionalProfile::default();
        for l in model.location_ids() {
            if sink_goal(l) {
                profile.set(l, stay);
                continue;
            }
            let (ad, ae) = (x[l.0], y[l.0]);
            if ad == ae {
                profile.set(l, ad);
                continue;
            }
            let name = format!("({},{})", model.action_name(ad), model.action_name(ae));
            let combined = b.action(&name);
            if model.is_continuous(l) {
                let rate = model.exit_rate_unchecked(l, ad) + model.exit_rate_unchecked(l, ae);
                b.set_rate(l, combined, g, rate);
            } else {
                b.set_prob(l, combined, g, 1.0);
            }
            profile.set(l, combined);
        }
        if let Some(s) = sink {
            profile.set(s, stay);
        }
        profile.set(g, stay);
        decisions.push(profile);
    }
    let delta = CylindricalScheduler::new(bps, decisions)?;
    Ok((b.build()?, delta))
}

/// Probability, from the initial distribution at `t = 0`, that the two
/// schedulers ever choose differently before the bound. Bounds the
/// difference of their values and is a pseudometric.
pub fn scheduler_distance(
    model: &CtmgModel,
    d: &CylindricalScheduler,
    e: &CylindricalScheduler,
    steps: usize,
) -> Result<f64> {
    let (m, delta) = distance_model(model, d, e)?;
    Ok(evaluate_scheduler(&m, &delta, steps)?.weighted_initial(&m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;

    #[test]
    fn fig1_distance_bounds_the_value_gap() {
        let m = fig1();
        let only = |act: &str| {
            CylindricalScheduler::constant(1.0, PositionalProfile::from_names(&m, &[("A", act)]).unwrap())
        };
        let (a, b) = (only("a"), only("b"));
        assert_eq!(scheduler_distance(&m, &a, &a, 1000).unwrap(), 0.0);
        let d = scheduler_distance(&m, &a, &b, 1000).unwrap();
        assert!((d - (1.0 - (-6.0f64).exp())).abs() < 1e-9, "{d}");
        let gap = (1.0 - 5.0 * (-4.0f64).exp()) - (1.0 - (-2.0f64).exp());
        assert!(gap <= d);
    }
}
