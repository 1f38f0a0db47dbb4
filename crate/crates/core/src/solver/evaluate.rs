use crate::error::{Error, Result};
use crate::model::{CtmgModel, LocationId};

use super::engine::Engine;
use super::{ensure_valid, CylindricalScheduler, PlayerOrder, ValueFunction};

/// Value of a fixed cylindrical scheduler: the linear backward ODE is solved
/// interval by interval with RK4 on a uniform grid of `steps` steps, with
/// every breakpoint added to the grid.
///
/// Locations with a single enabled action (and goals held at 1) need no
/// decision; every other location must have one on every interval.
pub fn evaluate_scheduler(model: &CtmgModel, scheduler: &CylindricalScheduler, steps: usize) -> Result<ValueFunction> {
    ensure_valid(model)?;
    if steps < 2 {
        return Err(Error::InvalidOption(format!("steps must be at least 2, got {steps}")));
    }
    let t_max = model.time_bound();
    let bound = scheduler.time_bound();
    if (bound - t_max).abs() > 1e-12 * t_max.max(1.0) {
        return Err(Error::TimeBoundMismatch(bound, t_max));
    }
    scheduler.check_enabled(model)?;
    let engine = Engine::new(model, None, PlayerOrder::default())?;

    let choices = scheduler
        .decisions()
        .iter()
        .enumerate()
        .map(|(i, profile)| {
            (0..engine.len())
                .map(|l| {
                    if engine.fixed[l] || engine.enabled[l].len() == 1 {
                        return Ok(0);
                    }
                    profile
                        .get(LocationId(l))
                        .and_then(|a| engine.index_of(l, a))
                        .ok_or_else(|| {
                            Error::MalformedScheduler(format!(
                                "no decision for `{}` on interval {i}",
                                model.location_name(LocationId(l))
                            ))
                        })
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut f = engine.terminal();
    let top = scheduler.interval_at(t_max);
    engine.fill_discrete(&mut f, &choices[top]);
    let mut rows = vec![(t_max, f.clone())];

    if t_max > 0.0 {
        let grid = time_grid(t_max, steps, scheduler.switch_points());
        for w in grid.windows(2) {
            let (t_hi, t_lo) = (w[0], w[1]);
            let k = scheduler.interval_at(t_hi);
            f = engine.rk4(&f, t_hi - t_lo, &choices[k]);
            let below = scheduler.interval_at(t_lo);
            if below != k {
                engine.fill_discrete(&mut f, &choices[below]);
            }
            rows.push((t_lo, f.clone()));
        }
    }
    rows.reverse();
    Ok(ValueFunction::from_rows(rows, engine.len(), Vec::new(), None))
}

/// Descending times from `t_max` to 0: the uniform grid plus `extra` points.
pub(crate) fn time_grid(t_max: f64, steps: usize, extra: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=steps)
        .map(|k| if k == steps { 0.0 } else { t_max - t_max * k as f64 / steps as f64 })
        .collect();
    let min_gap = 1e-12 * t_max;
    for &x in extra {
        if x > 0.0 && x < t_max && grid.iter().all(|&g| (g - x).abs() > min_gap) {
            grid.push(x);
        } else if let Some(g) = grid.iter_mut().find(|g| (**g - x).abs() <= min_gap) {
            *g = x;
        }
    }
    grid.sort_by(|a, b| b.total_cmp(a));
    grid
}
