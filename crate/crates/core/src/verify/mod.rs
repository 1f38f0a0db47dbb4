//! Independent oracles for the solver.
//!
//! None of these reuse the solver's integrator: the uniformisation bounds
//! and the Euler grid program are separate numerical methods, the Monte
//! Carlo simulator samples paths, and enumeration and the scheduler distance
//! go through the fixed-scheduler evaluator only.

mod distance;
mod enumerate;
mod grid;
mod poisson;
mod simulate;
mod uniformization;

pub use distance::{distance_model, scheduler_distance};
pub use enumerate::{enumerate_positional, positional_profiles, PositionalOptimum, DEFAULT_PROFILE_CAP};
pub use grid::{grid_oracle, richardson_initial};
pub use poisson::{poisson_pmf, poisson_step_bound};
pub use simulate::{simulate, SimResult};
pub use uniformization::{truncated_uniformization_value, ValueBounds};

use crate::error::{Error, Result};
use crate::model::{ActionId, CtmgModel, LocationId};
use crate::solver::PositionalProfile;

/// One action per location: the profile's choice, or the only enabled
/// action where the profile is silent.
pub(crate) fn resolve_profile(model: &CtmgModel, profile: &PositionalProfile) -> Result<Vec<ActionId>> {
    model
        .location_ids()
        .map(|l| {
            let enabled = model.enabled_unchecked(l);
            match profile.get(l) {
                Some(a) if enabled.contains(&a) => Ok(a),
                Some(a) => Err(Error::DisabledAction {
                    location: model.location_name(l).to_string(),
                    action: model.actions().get(a.0).cloned().unwrap_or_else(|| format!("#{}", a.0)),
                }),
                None if enabled.len() == 1 || (enabled.len() > 1 && is_fixed_goal(model, l)) => Ok(enabled[0]),
                None => Err(Error::MalformedScheduler(format!(
                    "no decision for `{}`",
                    model.location_name(l)
                ))),
            }
        })
        .collect()
}

fn is_fixed_goal(model: &CtmgModel, l: LocationId) -> bool {
    model.goal_mode() == crate::model::GoalMode::Absorbing && model.is_goal(l)
}
