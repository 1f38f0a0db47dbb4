use crate::error::{Error, Result};
use crate::model::{CtmgModel, GoalMode, LocationId, Owner};
use crate::solver::{Objective, ValueFunction};

/// First-order reference: explicit Euler backwards in time on a uniform grid,
/// picking the owner's best action afresh at every step. Converges to the
/// optimal value at rate `O(h)`.
pub fn grid_oracle(model: &CtmgModel, objective: Objective, steps: usize) -> Result<ValueFunction> {
    crate::solver::ensure_valid(model)?;
    if steps < 2 {
        return Err(Error::InvalidOption(format!("grid oracle needs at least 2 steps, got {steps}")));
    }
    let n = model.len();
    let t_max = model.time_bound();
    let absorbing = model.goal_mode() == GoalMode::Absorbing;
    let discrete = model.discrete_order()?;
    let maximize: Vec<bool> = model
        .location_ids()
        .map(|l| match objective {
            Objective::Max => true,
            Objective::Min => false,
            Objective::Game => model.owner(l) == Owner::Reach,
        })
        .collect();
    let enabled: Vec<_> = model.location_ids().map(|l| model.enabled_unchecked(l)).collect();
    let held: Vec<bool> = model.location_ids().map(|l| absorbing && model.is_goal(l)).collect();
    let pick = |l: usize, scores: &mut dyn Iterator<Item = f64>| -> f64 {
        if maximize[l] {
            scores.fold(f64::NEG_INFINITY, f64::max)
        } else {
            scores.fold(f64::INFINITY, f64::min)
        }
    };
    let settle = |f: &mut Vec<f64>| {
        for &d in &discrete {
            f[d.0] = if held[d.0] {
                1.0
            } else {
                let row_values: Vec<f64> = enabled[d.0]
                    .iter()
                    .map(|&a| model.prob_row(d, a).iter().map(|&(to, p)| p * f[to.0]).sum())
                    .collect();
                pick(d.0, &mut row_values.into_iter())
            };
        }
    };

    let mut f: Vec<f64> = (0..n).map(|l| if model.is_goal(LocationId(l)) { 1.0 } else { 0.0 }).collect();
    settle(&mut f);
    let mut rows = vec![(t_max, f.clone())];
    if t_max > 0.0 {
        let h = t_max / steps as f64;
        for k in 1..=steps {
            let mut next = f.clone();
            for l in model.location_ids().filter(|&l| model.is_continuous(l) && !held[l.0]) {
                let gains: Vec<f64> = enabled[l.0]
                    .iter()
                    .map(|&a| model.rate_row(l, a).iter().map(|&(to, r)| r * (f[to.0] - f[l.0])).sum())
                    .collect();
                next[l.0] = f[l.0] + h * pick(l.0, &mut gains.into_iter());
            }
            settle(&mut next);
            f = next;
            let t = if k == steps { 0.0 } else { t_max - h * k as f64 };
            rows.push((t, f.clone()));
        }
    }
    rows.reverse();
    Ok(crate::solver::ValueFunction::from_rows(rows, n, Vec::new(), Some(objective)))
}

/// Richardson extrapolation `2·G(2N) - G(N)` of the grid oracle at `t = 0`,
/// cancelling its first-order error term.
pub fn richardson_initial(model: &CtmgModel, objective: Objective, steps: usize) -> Result<Vec<f64>> {
    let coarse = grid_oracle(model, objective, steps)?;
    let fine = grid_oracle(model, objective, 2 * steps)?;
    Ok(fine
        .initial_row()
        .iter()
        .zip(coarse.initial_row())
        .map(|(f, c)| 2.0 * f - c)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;

    #[test]
    fn euler_approaches_the_fig1_optimum() {
        let m = fig1();
        let exact = 1.0 + (-4.0f64).exp() * (2.0 * 2f64.ln() - 6.0);
        let g = grid_oracle(&m, Objective::Max, 20_000).unwrap();
        assert!((g.weighted_initial(&m) - exact).abs() < 2e-4);
        let r = richardson_initial(&m, Objective::Max, 20_000).unwrap();
        assert!((r[0] - exact).abs() < 1e-7, "{}", r[0] - exact);
    }
}
