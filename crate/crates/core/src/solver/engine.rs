//! Shared machinery for the optimising and the fixed-scheduler integrators.
//!
//! Time runs backwards from the bound. Goal locations in absorbing mode are
//! held at 1, discrete locations carry no state and are recomputed from their
//! successors in increasing depth order, and the remaining continuous
//! locations form the ODE state.

use crate::error::Result;
use crate::model::{ActionId, CtmgModel, GoalMode, LocationId, Owner};

use super::{Objective, PlayerOrder};

/// Sparse row over location indices.
type Sparse = Vec<(usize, f64)>;

pub(crate) struct Engine<'m> {
    pub model: &'m CtmgModel,
    /// Discrete locations by increasing depth.
    discrete: Vec<usize>,
    /// Continuous locations integrated as ODE state.
    ode: Vec<usize>,
    /// Held at 1 (goal locations in absorbing mode).
    pub fixed: Vec<bool>,
    pub enabled: Vec<Vec<ActionId>>,
    /// Per location, per enabled action: rates (continuous) or probabilities.
    rows: Vec<Vec<Sparse>>,
    maximize: Vec<bool>,
    phases: Vec<Option<Owner>>,
}

/// Dense profile: index into `Engine::enabled[l]` per location.
pub(crate) type Choice = Vec<usize>;

impl<'m> Engine<'m> {
    pub fn new(model: &'m CtmgModel, objective: Option<Objective>, order: PlayerOrder) -> Result<Self> {
        let discrete = model.discrete_order()?.into_iter().map(|l| l.0).collect();
        let absorbing = model.goal_mode() == GoalMode::Absorbing;
        let fixed: Vec<bool> = model.location_ids().map(|l| absorbing && model.is_goal(l)).collect();
        let ode = model
            .location_ids()
            .filter(|&l| model.is_continuous(l) && !fixed[l.0])
            .map(|l| l.0)
            .collect();
        let enabled: Vec<Vec<ActionId>> = model.location_ids().map(|l| model.enabled_unchecked(l)).collect();
        let rows = model
            .location_ids()
            .map(|l| {
                enabled[l.0]
                    .iter()
                    .map(|&a| {
                        let row = if model.is_continuous(l) { model.rate_row(l, a) } else { model.prob_row(l, a) };
                        row.iter().filter(|e| e.1 != 0.0).map(|&(t, v)| (t.0, v)).collect()
                    })
                    .collect()
            })
            .collect();
        let maximize = model
            .location_ids()
            .map(|l| match objective {
                Some(Objective::Min) => false,
                Some(Objective::Game) => model.owner(l) == Owner::Reach,
                _ => true,
            })
            .collect();
        let phases = match (objective, order) {
            (Some(Objective::Game), PlayerOrder::ReachFirst) => vec![Some(Owner::Reach), Some(Owner::Safe)],
            (Some(Objective::Game), PlayerOrder::SafeFirst) => vec![Some(Owner::Safe), Some(Owner::Reach)],
            _ => vec![None],
        };
        Ok(Self {
            model,
            discrete,
            ode,
            fixed,
            enabled,
            rows,
            maximize,
            phases,
        })
    }

    pub fn len(&self) -> usize {
        self.enabled.len()
    }

    pub fn maximizes(&self, l: usize) -> bool {
        self.maximize[l]
    }

    pub fn is_ode(&self, l: usize) -> bool {
        self.model.is_continuous(LocationId(l)) && !self.fixed[l]
    }

    /// Values at the time bound, discrete locations not yet filled.
    pub fn terminal(&self) -> Vec<f64> {
        self.model
            .location_ids()
            .map(|l| if self.model.is_goal(l) { 1.0 } else { 0.0 })
            .collect()
    }

    pub fn to_actions(&self, choice: &[usize]) -> Vec<ActionId> {
        choice
            .iter()
            .enumerate()
            .map(|(l, &k)| self.enabled[l][k])
            .collect()
    }

    pub fn index_of(&self, l: usize, a: ActionId) -> Option<usize> {
        self.enabled[l].iter().position(|&x| x == a)
    }

    fn row_value(&self, l: usize, k: usize, f: &[f64]) -> f64 {
        self.rows[l][k].iter().map(|&(t, p)| p * f[t]).sum()
    }

    fn gain_of(&self, l: usize, k: usize, f: &[f64]) -> f64 {
        self.rows[l][k].iter().map(|&(t, r)| r * (f[t] - f[l])).sum()
    }

    /// Gain for continuous locations, successor value for discrete ones.
    pub fn score(&self, l: usize, k: usize, f: &[f64]) -> f64 {
        if self.model.is_continuous(LocationId(l)) {
            self.gain_of(l, k, f)
        } else {
            self.row_value(l, k, f)
        }
    }

    pub fn fill_discrete(&self, f: &mut [f64], choice: &[usize]) {
        for &d in &self.discrete {
            f[d] = if self.fixed[d] { 1.0 } else { self.row_value(d, choice[d], f) };
        }
    }

    fn derivative(&self, f: &[f64], choice: &[usize], out: &mut [f64]) {
        for &l in &self.ode {
            out[l] = self.gain_of(l, choice[l], f);
        }
    }

    /// One classical Runge-Kutta step of length `h` backwards in time under a
    /// fixed choice. `f` must have its discrete entries filled.
    pub fn rk4(&self, f: &[f64], h: f64, choice: &[usize]) -> Vec<f64> {
        let n = f.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = f.to_vec();
        self.derivative(f, choice, &mut k1);
        for &l in &self.ode {
            tmp[l] = f[l] + 0.5 * h * k1[l];
        }
        self.fill_discrete(&mut tmp, choice);
        self.derivative(&tmp, choice, &mut k2);
        for &l in &self.ode {
            tmp[l] = f[l] + 0.5 * h * k2[l];
        }
        self.fill_discrete(&mut tmp, choice);
        self.derivative(&tmp, choice, &mut k3);
        for &l in &self.ode {
            tmp[l] = f[l] + h * k3[l];
        }
        self.fill_discrete(&mut tmp, choice);
        self.derivative(&tmp, choice, &mut k4);
        let mut out = f.to_vec();
        for &l in &self.ode {
            out[l] = f[l] + h / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
        }
        self.fill_discrete(&mut out, choice);
        out
    }

    fn in_phase(&self, l: usize, phase: Option<Owner>) -> bool {
        phase.is_none_or(|p| self.model.owner(LocationId(l)) == p)
    }

    /// Improvement loop at a snapshot: every location switches to an action
    /// that beats its current one by more than `tie_tol` (owner direction)
    /// until no location can improve. Discrete entries of `f` are rewritten
    /// to match the returned choice; continuous entries are read only.
    pub fn improve(&self, f: &mut [f64], incumbent: Option<&[usize]>, tie_tol: f64) -> Choice {
        let n = self.len();
        let mut choice: Choice = incumbent.map_or_else(|| vec![0; n], <[usize]>::to_vec);
        let mut settled = vec![incumbent.is_some(); n];
        let mut scores = Vec::new();
        for _round in 0..(2 * n + 4) {
            let mut changed = false;
            for &phase in &self.phases {
                for &d in &self.discrete {
                    if self.fixed[d] {
                        f[d] = 1.0;
                        continue;
                    }
                    if self.in_phase(d, phase) && self.enabled[d].len() > 1 {
                        scores.clear();
                        scores.extend((0..self.enabled[d].len()).map(|k| self.row_value(d, k, f)));
                        let inc = settled[d].then_some(choice[d]);
                        let k = select(&scores, inc, self.maximize[d], tie_tol);
                        changed |= settled[d] && k != choice[d];
                        choice[d] = k;
                        settled[d] = true;
                        f[d] = scores[k];
                    } else {
                        f[d] = self.row_value(d, choice[d], f);
                    }
                }
                for &l in &self.ode {
                    if !self.in_phase(l, phase) || self.enabled[l].len() < 2 {
                        continue;
                    }
                    scores.clear();
                    scores.extend((0..self.enabled[l].len()).map(|k| self.gain_of(l, k, f)));
                    let inc = settled[l].then_some(choice[l]);
                    let k = select(&scores, inc, self.maximize[l], tie_tol);
                    changed |= settled[l] && k != choice[l];
                    choice[l] = k;
                    settled[l] = true;
                }
            }
            if !changed {
                break;
            }
        }
        choice
    }
}

/// Keeps the incumbent unless another score beats it by more than `tie`;
/// otherwise the lowest index within `tie` of the best wins.
pub(crate) fn select(scores: &[f64], incumbent: Option<usize>, maximize: bool, tie: f64) -> usize {
    let best = if maximize {
        scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        scores.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let good = |v: f64| if maximize { v >= best - tie } else { v <= best + tie };
    if let Some(i) = incumbent {
        if good(scores[i]) {
            return i;
        }
    }
    scores.iter().position(|&v| good(v)).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection_rules() {
        assert_eq!(select(&[0.0, 2.0, 2.0], None, true, 1e-12), 1);
        assert_eq!(select(&[0.0, 2.0, 2.0], Some(2), true, 1e-12), 2);
        assert_eq!(select(&[1.0, 1.0 + 1e-13], Some(0), true, 1e-12), 0);
        assert_eq!(select(&[1.0, 1.0 + 1e-9], Some(0), true, 1e-12), 1);
        assert_eq!(select(&[3.0, 1.0, 2.0], None, false, 1e-12), 1);
    }
}
