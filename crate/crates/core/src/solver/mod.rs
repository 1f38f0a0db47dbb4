//! Optimal values and cylindrical schedulers by backward integration of the
//! optimality equations.
//!
//! For a continuous location `l` the value obeys
//! `-f'(l,t) = opt_a Σ R(l,a,l')·(f(l',t) - f(l,t))` and for a discrete
//! location `f(l,t) = opt_a Σ P(l,a,l')·f(l',t)`, with `opt = max` for the
//! maximiser and `min` for the minimiser. The integrator is fixed-step RK4 on
//! a uniform grid; whenever the optimising profile at the end of a step
//! differs from the one at its start, the switch time is bisected and the
//! step is finished under the new profile, so every piece is integrated with
//! a smooth right-hand side.

mod engine;
mod evaluate;
mod nash;
mod profile;
mod scheduler;
mod value;

use crate::error::{Error, Result};
use crate::model::{validate, ActionId, CtmgModel, LocationId};

pub(crate) use engine::Engine;
pub use evaluate::evaluate_scheduler;
pub use nash::{check_nash, NashReport};
pub use profile::PositionalProfile;
pub use scheduler::{merge_partitions, CylindricalScheduler};
pub use value::ValueFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Every location maximises.
    Max,
    /// Every location minimises.
    Min,
    /// Reachability-owned locations maximise, safety-owned ones minimise.
    Game,
}

/// Which player the improvement loop settles first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlayerOrder {
    #[default]
    ReachFirst,
    SafeFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Uniform grid resolution.
    pub steps: usize,
    /// Bisection tolerance for switch times.
    pub switch_tol: f64,
    /// Score difference below which the incumbent action is kept.
    pub tie_tol: f64,
    pub player_order: PlayerOrder,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            steps: 10_000,
            switch_tol: 1e-9,
            tie_tol: 1e-12,
            player_order: PlayerOrder::ReachFirst,
        }
    }
}

impl SolveOptions {
    pub fn with_steps(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidOption(format!("steps must be at least 2, got {}", self.steps)));
        }
        if !(self.switch_tol > 0.0 && self.switch_tol.is_finite()) {
            return Err(Error::InvalidOption(format!("switch tolerance must be positive, got {}", self.switch_tol)));
        }
        if !(self.tie_tol > 0.0 && self.tie_tol.is_finite()) {
            return Err(Error::InvalidOption(format!("tie tolerance must be positive, got {}", self.tie_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub values: ValueFunction,
    /// Decisions of all locations on every interval.
    pub scheduler: CylindricalScheduler,
}

impl Solution {
    /// The strategy of one player.
    pub fn strategy(&self, model: &CtmgModel, owner: crate::model::Owner) -> CylindricalScheduler {
        self.scheduler.restrict(model, owner)
    }
}

pub(crate) fn ensure_valid(model: &CtmgModel) -> Result<()> {
    let report = validate(model);
    if report.ok() {
        Ok(())
    } else {
        Err(Error::InvalidModel(report))
    }
}

/// Optimal value function and a cylindrical deterministic scheduler realising it.
pub fn solve(model: &CtmgModel, objective: Objective, opts: &SolveOptions) -> Result<Solution> {
    opts.check()?;
    ensure_valid(model)?;
    if objective == Objective::Game && model.is_single_player() {
        return Err(Error::GameOnSinglePlayer);
    }
    let engine = Engine::new(model, Some(objective), opts.player_order)?;
    let t_max = model.time_bound();
    let n = model.len();

    let mut f = engine.terminal();
    let mut choice = engine.improve(&mut f, None, opts.tie_tol);
    let mut rows: Vec<(f64, Vec<f64>)> = vec![(t_max, f.clone())];
    // (start in backward time, choice) for every piece, latest last
    let mut pieces: Vec<(f64, Vec<usize>)> = vec![(0.0, choice.clone())];

    if t_max > 0.0 {
        let steps = opts.steps;
        let s_at = |k: usize| t_max * k as f64 / steps as f64;
        for k in 0..steps {
            let s1 = s_at(k + 1);
            let mut s = s_at(k);
            loop {
                let mut y1 = engine.rk4(&f, s1 - s, &choice);
                let next = engine.improve(&mut y1, Some(&choice), opts.tie_tol);
                if next == choice {
                    f = y1;
                    break;
                }
                // bracket [lo stable, hi switched]
                let (mut lo, mut hi) = (s, s1);
                while hi - lo > opts.switch_tol {
                    let mid = 0.5 * (lo + hi);
                    let mut ym = engine.rk4(&f, mid - s, &choice);
                    if engine.improve(&mut ym, Some(&choice), opts.tie_tol) == choice {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let mut y_sw = engine.rk4(&f, hi - s, &choice);
                let switched = engine.improve(&mut y_sw, Some(&choice), opts.tie_tol);
                // a last piece shorter than the tolerance only touches t = 0
                if t_max - hi > opts.switch_tol {
                    record_switch(&mut pieces, hi, &switched, opts.switch_tol);
                }
                if hi < s1 {
                    rows.push((t_max - hi, y_sw.clone()));
                }
                f = y_sw;
                s = hi;
                choice = switched;
                if s >= s1 {
                    break;
                }
            }
            let t = if k + 1 == steps { 0.0 } else { t_max - s1 };
            rows.push((t, f.clone()));
        }
    }

    rows.reverse();
    let scheduler = pieces_to_scheduler(&engine, &pieces, t_max)?;
    let switch_points = scheduler.switch_points().to_vec();
    debug_assert_eq!(rows[0].1.len(), n);
    Ok(Solution {
        values: ValueFunction::from_rows(rows, n, switch_points, Some(objective)),
        scheduler,
    })
}

/// Appends a piece, or overwrites the latest one when it would be shorter
/// than the switch tolerance.
fn record_switch(pieces: &mut Vec<(f64, Vec<usize>)>, s: f64, choice: &[usize], tol: f64) {
    let last = pieces.last_mut().expect("at least one piece");
    if s - last.0 <= tol {
        last.1 = choice.to_vec();
        if pieces.len() >= 2 && pieces[pieces.len() - 2].1 == choice {
            pieces.pop();
        }
    } else {
        pieces.push((s, choice.to_vec()));
    }
}

fn pieces_to_scheduler(engine: &Engine<'_>, pieces: &[(f64, Vec<usize>)], t_max: f64) -> Result<CylindricalScheduler> {
    // piece i covers backward times [s_i, s_{i+1}), i.e. t in (t_max - s_{i+1}, t_max - s_i]
    let mut breakpoints = vec![0.0];
    let mut decisions = Vec::with_capacity(pieces.len());
    for (s, choice) in pieces.iter().rev() {
        breakpoints.push(t_max - s);
        decisions.push(PositionalProfile::from_dense(&engine.to_actions(choice)));
    }
    Ok(CylindricalScheduler::new(breakpoints, decisions)?.minimized())
}

/// `Σ R(l,a,l')·(snapshot(l') - snapshot(l))`.
pub fn gain(model: &CtmgModel, snapshot: &[f64], l: LocationId, a: ActionId) -> Result<f64> {
    let rate = model.exit_rate(l, a)?;
    if rate <= 0.0 {
        return Err(Error::DisabledAction {
            location: model.location_name(l).to_string(),
            action: model.action_name(a).to_string(),
        });
    }
    Ok(model
        .rate_row(l, a)
        .iter()
        .map(|&(to, r)| r * (snapshot[to.0] - snapshot[l.0]))
        .sum())
}

/// Runs the improvement loop at a snapshot. Continuous entries of `snapshot`
/// are taken as given; discrete entries are recomputed from the chosen
/// actions. Goal locations held at 1 keep their first enabled action.
pub fn local_improvement(
    model: &CtmgModel,
    snapshot: &[f64],
    objective: Objective,
    incumbent: Option<&PositionalProfile>,
    opts: &SolveOptions,
) -> Result<PositionalProfile> {
    ensure_valid(model)?;
    let engine = Engine::new(model, Some(objective), opts.player_order)?;
    let mut f = snapshot.to_vec();
    let inc: Option<Vec<usize>> = incumbent.map(|p| {
        (0..engine.len())
            .map(|l| p.get(LocationId(l)).and_then(|a| engine.index_of(l, a)).unwrap_or(0))
            .collect()
    });
    let choice = engine.improve(&mut f, inc.as_deref(), opts.tie_tol);
    Ok(PositionalProfile::from_dense(&engine.to_actions(&choice)))
}
