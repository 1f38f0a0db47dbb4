//! Model-to-model constructions that leave reachability values unchanged:
//! splitting continuous locations into a decision gate and per-action copies
//! (and back), pooling zero-time paths through discrete locations, and
//! uniformisation by self-loops.
//!
//! Fresh locations get deterministic names derived from the originals, so
//! serialized outputs are stable.

mod early_late;
mod simple;

pub use early_late::{early_to_late, late_to_early};
pub use simple::{make_simple, PathMap, TimeAbstractPath, DEFAULT_COMPOUND_CAP};

use crate::error::{Error, Result};
use crate::model::{CtmgModel, LocationId, ModelBuilder};

/// Where each original location ended up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocationMap {
    forward: Vec<LocationId>,
}

impl LocationMap {
    pub(crate) fn new(forward: Vec<LocationId>) -> Self {
        Self { forward }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(LocationId).collect())
    }

    /// The location standing for `original` (the gate for split locations).
    pub fn get(&self, original: LocationId) -> LocationId {
        self.forward[original.0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (LocationId, LocationId)> + '_ {
        self.forward.iter().enumerate().map(|(i, &l)| (LocationId(i), l))
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

/// A builder holding an exact copy of `model`.
pub fn rebuild(model: &CtmgModel) -> ModelBuilder {
    let mut b = ModelBuilder::new(model.time_bound());
    b.goal_mode(model.goal_mode());
    for name in model.actions() {
        b.action(name);
    }
    for loc in model.locations() {
        b.location(loc.name.clone(), loc.kind, loc.owner, loc.goal);
    }
    for l in model.location_ids() {
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
        b.set_initial(l, model.initial()[l.0]);
    }
    b
}

/// `base`, or `base` followed by enough primes to be unused.
pub(crate) fn fresh_name(b: &ModelBuilder, base: String) -> String {
    let mut name = base;
    while b.find_location(&name).is_some() {
        name.push('\'');
    }
    name
}

/// Adds self-loop rate so that every enabled action of every continuous
/// location exits at `target` (default: the largest exit rate).
pub fn uniformise(model: &CtmgModel, target: Option<f64>) -> Result<CtmgModel> {
    crate::solver::ensure_valid(model)?;
    let max = model.max_exit_rate();
    let target = target.unwrap_or(max);
    if !target.is_finite() || target < max {
        return Err(Error::RateTooLow { target, max });
    }
    let mut b = rebuild(model);
    for l in model.location_ids().filter(|&l| model.is_continuous(l)) {
        for a in model.enabled_unchecked(l) {
            let exit = model.exit_rate_unchecked(l, a);
            if target > exit {
                b.add_rate(l, a, l, target - exit);
            }
        }
    }
    b.build()
}

/// Common exit rate of a uniform model.
pub fn uniform_rate(model: &CtmgModel) -> Result<f64> {
    let expected = model.max_exit_rate();
    for l in model.location_ids().filter(|&l| model.is_continuous(l)) {
        for a in model.enabled_unchecked(l) {
            let found = model.exit_rate_unchecked(l, a);
            if (found - expected).abs() > 1e-12 * expected {
                return Err(Error::NotUniform {
                    location: model.location_name(l).to_string(),
                    found,
                    expected,
                });
            }
        }
    }
    Ok(expected)
}
