use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ActionId, CtmgModel, GoalMode, LocationId};
use crate::solver::CylindricalScheduler;

use super::resolve_profile;

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub estimate: f64,
    pub successes: u64,
    pub runs: u64,
    pub standard_error: f64,
    pub seed: u64,
}

/// Monte Carlo estimate of the scheduler's reachability probability.
///
/// Run `i` draws from ChaCha8 seeded with `seed` on stream `i`, so results
/// do not depend on how runs are spread over threads. A sojourn that would
/// outlast the current scheduler interval is cut at the breakpoint and
/// redrawn under the next decision; memorylessness makes this exact.
pub fn simulate(model: &CtmgModel, scheduler: &CylindricalScheduler, runs: u64, seed: u64) -> Result<SimResult> {
    crate::solver::ensure_valid(model)?;
    if runs == 0 {
        return Err(Error::InvalidOption("runs must be positive".into()));
    }
    let t_max = model.time_bound();
    if (scheduler.time_bound() - t_max).abs() > 1e-12 * t_max.max(1.0) {
        return Err(Error::TimeBoundMismatch(scheduler.time_bound(), t_max));
    }
    let choices = scheduler
        .decisions()
        .iter()
        .map(|p| resolve_profile(model, p))
        .collect::<Result<Vec<_>>>()?;
    let sim = Simulator {
        model,
        scheduler,
        choices,
        t_max,
        absorbing: model.goal_mode() == GoalMode::Absorbing,
    };
    let successes: u64 = (0..runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            u64::from(sim.run(&mut rng))
        })
        .sum();
    let estimate = successes as f64 / runs as f64;
    Ok(SimResult {
        estimate,
        successes,
        runs,
        standard_error: (estimate * (1.0 - estimate) / runs as f64).sqrt(),
        seed,
    })
}

struct Simulator<'a> {
    model: &'a CtmgModel,
    scheduler: &'a CylindricalScheduler,
    choices: Vec<Vec<ActionId>>,
    t_max: f64,
    absorbing: bool,
}

impl Simulator<'_> {
    fn run(&self, rng: &mut ChaCha8Rng) -> bool {
        let m = self.model;
        let mut l = sample(m.initial().iter().enumerate().map(|(i, &p)| (LocationId(i), p)), rng);
        let mut t = 0.0;
        loop {
            if self.absorbing && m.is_goal(l) {
                return true;
            }
            if !m.is_continuous(l) {
                let a = self.choices[self.scheduler.interval_at(t)][l.0];
                l = sample(m.prob_row(l, a).iter().copied(), rng);
                continue;
            }
            let k = self.scheduler.interval_after(t);
            let a = self.choices[k][l.0];
            let row = m.rate_row(l, a);
            let exit: f64 = row.iter().map(|e| e.1).sum();
            let limit = self.scheduler.breakpoints()[k + 1].min(self.t_max);
            let u: f64 = rng.gen();
            let dwell = -(1.0 - u).ln() / exit;
            if t + dwell > limit {
                t = limit;
                if t >= self.t_max {
                    return !self.absorbing && m.is_goal(l);
                }
                continue;
            }
            t += dwell;
            l = sample(row.iter().copied(), rng);
        }
    }
}

/// Draws from a finite weighted list; the last positive entry absorbs rounding.
fn sample(weights: impl Iterator<Item = (LocationId, f64)> + Clone, rng: &mut ChaCha8Rng) -> LocationId {
    let total: f64 = weights.clone().map(|w| w.1).sum();
    let mut x = rng.gen::<f64>() * total;
    let mut last = None;
    for (l, w) in weights {
        if w <= 0.0 {
            continue;
        }
        last = Some(l);
        if x < w {
            return l;
        }
        x -= w;
    }
    last.expect("a positive weight")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;
    use crate::solver::PositionalProfile;

    #[test]
    fn reproducible_and_close_to_always_b() {
        let m = fig1();
        let p = PositionalProfile::from_names(&m, &[("A", "b")]).unwrap();
        let s = CylindricalScheduler::constant(1.0, p);
        let r1 = simulate(&m, &s, 20_000, 7).unwrap();
        let r2 = simulate(&m, &s, 20_000, 7).unwrap();
        assert_eq!(r1, r2);
        let exact = 1.0 - (-2.0f64).exp();
        assert!((r1.estimate - exact).abs() < 4.0 * r1.standard_error);
        assert!(simulate(&m, &s, 0, 7).is_err());
    }
}
