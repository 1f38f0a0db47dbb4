use crate::error::Result;
use crate::model::{CtmgModel, LocationId, LocationKind};
use crate::solver::ensure_valid;

use super::{fresh_name, uniform_rate, LocationMap};

/// Splits every continuous location `X` into a discrete gate `X.gate`, where
/// the action is chosen on entry, and one continuous copy `X.<action>` per
/// enabled action that only offers that action. Transitions into `X` and
/// initial mass on `X` are redirected to the gate.
///
/// Under the resulting model a scheduler can no longer revise its choice
/// while waiting in a location, so values can only move against the
/// optimising player; they are unchanged where no choice exists.
pub fn early_to_late(model: &CtmgModel) -> Result<(CtmgModel, LocationMap)> {
    ensure_valid(model)?;
    let mut b = crate::model::ModelBuilder::new(model.time_bound());
    b.goal_mode(model.goal_mode());
    for name in model.actions() {
        b.action(name);
    }
    // original names stay reserved so fresh names never shadow them
    let mut forward = Vec::with_capacity(model.len());
    let mut reserved = crate::model::ModelBuilder::new(0.0);
    for loc in model.locations() {
        reserved.location(loc.name.clone(), loc.kind, loc.owner, loc.goal);
    }
    let mut gates = Vec::with_capacity(model.len());
    for (l, loc) in model.location_ids().zip(model.locations()) {
        let id = if model.is_continuous(l) {
            let name = fresh_name(&reserved, format!("{}.gate", loc.name));
            reserved.location(name.clone(), LocationKind::Discrete, loc.owner, loc.goal);
            b.location(name, LocationKind::Discrete, loc.owner, loc.goal)
        } else {
            b.location(loc.name.clone(), loc.kind, loc.owner, loc.goal)
        };
        forward.push(id);
        gates.push(id);
    }
    for l in model.location_ids().filter(|&l| model.is_continuous(l)) {
        let loc = model.location(l);
        for a in model.enabled_unchecked(l) {
            let name = fresh_name(&reserved, format!("{}.{}", loc.name, model.action_name(a)));
            reserved.location(name.clone(), LocationKind::Continuous, loc.owner, loc.goal);
            let copy = b.location(name, LocationKind::Continuous, loc.owner, loc.goal);
            b.set_prob(gates[l.0], a, copy, 1.0);
            for &(to, r) in model.rate_row(l, a) {
                b.add_rate(copy, a, gates[to.0], r);
            }
        }
    }
    for l in model.location_ids().filter(|&l| !model.is_continuous(l)) {
        for (&a, row) in model.prob_rows(l) {
            for &(to, p) in row {
                b.set_prob(gates[l.0], a, gates[to.0], p);
            }
        }
    }
    for l in model.location_ids() {
        b.set_initial(gates[l.0], model.initial()[l.0]);
    }
    Ok((b.build()?, LocationMap::new(forward)))
}

/// For a uniform model: every continuous location keeps a single action that
/// leaves at the common rate into a fresh discrete location `X.post`, where
/// the original action is chosen with the embedded probabilities. The
/// decision thus happens on leaving `X` rather than while residing in it,
/// which yields the same values.
pub fn late_to_early(model: &CtmgModel) -> Result<(CtmgModel, LocationMap)> {
    ensure_valid(model)?;
    let lambda = uniform_rate(model)?;
    let continuous: Vec<LocationId> = model.location_ids().filter(|&l| model.is_continuous(l)).collect();
    let mut stripped = crate::model::ModelBuilder::new(model.time_bound());
    stripped.goal_mode(model.goal_mode());
    for name in model.actions() {
        stripped.action(name);
    }
    for loc in model.locations() {
        stripped.location(loc.name.clone(), loc.kind, loc.owner, loc.goal);
    }
    for l in model.location_ids().filter(|&l| !model.is_continuous(l)) {
        for (&a, row) in model.prob_rows(l) {
            for &(to, p) in row {
                stripped.set_prob(l, a, to, p);
            }
        }
    }
    for l in model.location_ids() {
        stripped.set_initial(l, model.initial()[l.0]);
    }
    for &l in &continuous {
        let loc = model.location(l);
        let name = fresh_name(&stripped, format!("{}.post", loc.name));
        let post = stripped.location(name, LocationKind::Discrete, loc.owner, loc.goal);
        let enabled = model.enabled_unchecked(l);
        stripped.set_rate(l, enabled[0], post, lambda);
        for a in enabled {
            for &(to, r) in model.rate_row(l, a) {
                stripped.add_prob(post, a, to, r / lambda);
            }
        }
    }
    Ok((stripped.build()?, LocationMap::identity(model.len())))
}
