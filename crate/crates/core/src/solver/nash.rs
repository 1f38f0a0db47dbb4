use std::fmt;

use crate::error::{Error, Result};
use crate::model::{CtmgModel, LocationId};

use super::engine::Engine;
use super::{ensure_valid, CylindricalScheduler, Objective, PlayerOrder, ValueFunction};

/// Largest residuals found by [`check_nash`].
#[derive(Debug, Clone, PartialEq)]
pub struct NashReport {
    /// `|-f' - opt_a gain|` over continuous locations and grid nodes.
    pub ode_residual: f64,
    /// How far the scheduler's choice falls short of the owner's optimum.
    pub decision_residual: f64,
    /// `|f - opt_a Σ P f|` and the same for the chosen action, discrete locations.
    pub discrete_residual: f64,
    pub tol: f64,
    /// Location and time of the largest residual.
    pub worst: Option<(String, f64)>,
}

impl NashReport {
    pub fn max_residual(&self) -> f64 {
        self.ode_residual.max(self.decision_residual).max(self.discrete_residual)
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

impl fmt::Display for NashReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ode={:.3e} decision={:.3e} discrete={:.3e} tol={:.3e}",
            if self.passed() { "pass" } else { "fail" },
            self.ode_residual,
            self.decision_residual,
            self.discrete_residual,
            self.tol
        )?;
        if let Some((l, t)) = &self.worst {
            write!(f, " at {l} t={t}")?;
        }
        Ok(())
    }
}

/// Checks that `vf` solves the owner-directed optimality equations and that
/// `scheduler` picks an optimising action everywhere on the grid, so neither
/// player gains by deviating. The direction follows the objective recorded
/// in `vf`; a value function without one is checked as a game.
pub fn check_nash(
    model: &CtmgModel,
    vf: &ValueFunction,
    scheduler: &CylindricalScheduler,
    tol: f64,
) -> Result<NashReport> {
    ensure_valid(model)?;
    scheduler.check_enabled(model)?;
    let objective = vf.objective().unwrap_or(Objective::Game);
    let engine = Engine::new(model, Some(objective), PlayerOrder::default())?;
    let times = vf.times();
    let n = times.len();
    let t_max = model.time_bound();

    let mut kinks: Vec<f64> = vf
        .switch_points()
        .iter()
        .chain(scheduler.switch_points())
        .copied()
        .collect();
    kinks.sort_by(f64::total_cmp);
    let min_gap = 1e-8 * t_max.max(1.0);

    let mut report = NashReport {
        ode_residual: 0.0,
        decision_residual: 0.0,
        discrete_residual: 0.0,
        tol,
        worst: None,
    };
    let mut worst = 0.0;
    let note = |r: f64, l: usize, t: f64, worst: &mut f64, report: &mut NashReport| {
        if r > *worst {
            *worst = r;
            report.worst = Some((model.location_name(LocationId(l)).to_string(), t));
        }
    };

    for i in 0..n {
        let t = times[i];
        let f = vf.row(i);
        let profile = &scheduler.decisions()[scheduler.interval_at(t)];
        let stencil = if n >= 3 { stencil(times, i, &kinks, min_gap) } else { None };
        for l in 0..engine.len() {
            if engine.fixed[l] {
                continue;
            }
            let k_all = engine.enabled[l].len();
            let scores: Vec<f64> = (0..k_all).map(|k| engine.score(l, k, f)).collect();
            let best = if engine.maximizes(l) {
                scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            } else {
                scores.iter().copied().fold(f64::INFINITY, f64::min)
            };
            let chosen = if k_all == 1 {
                0
            } else {
                profile
                    .get(LocationId(l))
                    .and_then(|a| engine.index_of(l, a))
                    .ok_or_else(|| {
                        Error::MalformedScheduler(format!(
                            "no decision for `{}` at t={t}",
                            model.location_name(LocationId(l))
                        ))
                    })?
            };
            let shortfall = if engine.maximizes(l) { best - scores[chosen] } else { scores[chosen] - best };
            report.decision_residual = report.decision_residual.max(shortfall);
            note(shortfall, l, t, &mut worst, &mut report);

            if engine.is_ode(l) {
                if let Some(idx) = stencil {
                    let xs = idx.map(|j| times[j]);
                    let ys = idx.map(|j| vf.get(j, LocationId(l)));
                    let at = idx.iter().position(|&j| j == i).expect("node in stencil");
                    let r = (-lagrange_slope(xs, ys, at) - best).abs();
                    report.ode_residual = report.ode_residual.max(r);
                    note(r, l, t, &mut worst, &mut report);
                }
            } else if !model.is_continuous(LocationId(l)) {
                let r = (f[l] - best).abs().max((f[l] - scores[chosen]).abs());
                report.discrete_residual = report.discrete_residual.max(r);
                note(r, l, t, &mut worst, &mut report);
            }
        }
    }
    Ok(report)
}

/// Three grid nodes around `i` that do not straddle a kink; `None` when they
/// are too close for a stable difference quotient.
fn stencil(times: &[f64], i: usize, kinks: &[f64], min_gap: f64) -> Option<[usize; 3]> {
    let n = times.len();
    let crosses = |a: usize, b: usize| kinks.iter().any(|&k| k > times[a] && k < times[b]);
    let at_kink = kinks.iter().any(|&k| k == times[i]);
    let central = (i > 0 && i + 1 < n).then(|| [i - 1, i, i + 1]);
    let forward = (i + 2 < n).then(|| [i, i + 1, i + 2]);
    let backward = (i >= 2).then(|| [i - 2, i - 1, i]);
    let ok = |s: &[usize; 3]| !crosses(s[0], s[2]) && s.windows(2).all(|w| times[w[1]] - times[w[0]] >= min_gap);
    let order: [Option<[usize; 3]>; 3] = if at_kink { [forward, backward, None] } else { [central, forward, backward] };
    order.into_iter().flatten().find(|s| ok(s) && !(at_kink && s[0] != i && s[2] != i))
}

/// Derivative at `xs[at]` of the quadratic through three points.
fn lagrange_slope(xs: [f64; 3], ys: [f64; 3], at: usize) -> f64 {
    let x = xs[at];
    let mut d = 0.0;
    for j in 0..3 {
        let mut denom = 1.0;
        for m in 0..3 {
            if m != j {
                denom *= xs[j] - xs[m];
            }
        }
        // derivative of Π_{m≠j} (x - x_m) at x
        let mut num = 0.0;
        for m in 0..3 {
            if m == j {
                continue;
            }
            num += (0..3).filter(|&q| q != j && q != m).map(|q| x - xs[q]).product::<f64>();
        }
        d += ys[j] * num / denom;
    }
    d
}
