use crate::error::Result;
use crate::model::{CtmgModel, GoalMode, LocationId};
use crate::solver::PositionalProfile;

use super::{poisson_pmf, poisson_step_bound, resolve_profile};

/// Enclosure of a fixed profile's value at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub gap: f64,
    /// Truncation point of the jump count.
    pub steps: usize,
}

impl ValueBounds {
    /// Initial-distribution weighted `(lower, upper)`.
    pub fn weighted(&self, model: &CtmgModel) -> (f64, f64) {
        let w = |v: &[f64]| model.initial().iter().zip(v).map(|(m, x)| m * x).sum::<f64>();
        (w(&self.lower), w(&self.upper))
    }

    pub fn contains(&self, l: LocationId, value: f64, slack: f64) -> bool {
        value >= self.lower[l.0] - slack && value <= self.upper[l.0] + slack
    }
}

/// Transient analysis of the uniformised chain induced by a positional
/// profile: jumps arrive as a Poisson process of rate `λ_max`, and the chain
/// reaches the goal within the bound iff it does so within the number of
/// jumps seen by then. Summing over at most `n_ε` jumps gives a lower bound
/// that is off by at most `ε`.
pub fn truncated_uniformization_value(model: &CtmgModel, profile: &PositionalProfile, epsilon: f64) -> Result<ValueBounds> {
    crate::solver::ensure_valid(model)?;
    let choice = resolve_profile(model, profile)?;
    let lambda = model.max_exit_rate();
    let t = model.time_bound();
    let n = poisson_step_bound(lambda, t, epsilon);
    let absorbing = model.goal_mode() == GoalMode::Absorbing;
    let len = model.len();
    let discrete = model.discrete_order()?;

    let held = |l: usize| absorbing && model.is_goal(LocationId(l));
    let close = |v: &mut Vec<f64>| {
        for &d in &discrete {
            v[d.0] = if held(d.0) {
                1.0
            } else {
                model.prob_row(d, choice[d.0]).iter().map(|&(to, p)| p * v[to.0]).sum()
            };
        }
    };

    let mut v: Vec<f64> = (0..len).map(|l| if model.is_goal(LocationId(l)) { 1.0 } else { 0.0 }).collect();
    close(&mut v);
    let mean = lambda * t;
    let mut lower: Vec<f64> = v.iter().map(|x| poisson_pmf(mean, 0) * x).collect();
    for k in 1..=n {
        let mut next = v.clone();
        for l in model.location_ids().filter(|&l| model.is_continuous(l)) {
            if held(l.0) {
                continue;
            }
            let a = choice[l.0];
            let row = model.rate_row(l, a);
            let exit: f64 = row.iter().map(|e| e.1).sum();
            let moved: f64 = row.iter().map(|&(to, r)| r / lambda * v[to.0]).sum();
            next[l.0] = (1.0 - exit / lambda) * v[l.0] + moved;
        }
        close(&mut next);
        v = next;
        let w = poisson_pmf(mean, k);
        for (lo, x) in lower.iter_mut().zip(&v) {
            *lo += w * x;
        }
    }
    let lower: Vec<f64> = lower.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
    let upper: Vec<f64> = lower.iter().map(|x| (x + epsilon).min(1.0)).collect();
    // `(x + ε) - x` may round a hair above ε
    let gap = lower.iter().zip(&upper).map(|(l, u)| u - l).fold(0.0, f64::max).min(epsilon);
    Ok(ValueBounds {
        lower,
        upper,
        gap,
        steps: n,
    })
}
