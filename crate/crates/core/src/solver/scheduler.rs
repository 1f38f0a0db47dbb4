use crate::error::{Error, Result};
use crate::model::{ActionId, CtmgModel, LocationId, Owner};

use super::PositionalProfile;

/// Finitely many intervals `[τ0,τ1], (τ1,τ2], …, (τk-1,τk]` over `[0, t_max]`,
/// each with one positional decision map. At a breakpoint the decision of the
/// interval to its left applies.
#[derive(Debug, Clone, PartialEq)]
pub struct CylindricalScheduler {
    breakpoints: Vec<f64>,
    decisions: Vec<PositionalProfile>,
}

impl CylindricalScheduler {
    pub fn new(breakpoints: Vec<f64>, decisions: Vec<PositionalProfile>) -> Result<Self> {
        if decisions.is_empty() || breakpoints.len() != decisions.len() + 1 {
            return Err(Error::MalformedScheduler(format!(
                "{} breakpoints for {} intervals",
                breakpoints.len(),
                decisions.len()
            )));
        }
        if breakpoints[0] != 0.0 || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::MalformedScheduler("partition must start at 0".into()));
        }
        let degenerate = breakpoints.len() == 2 && breakpoints[1] == 0.0;
        if !degenerate && breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::MalformedScheduler("breakpoints must be strictly ascending".into()));
        }
        Ok(Self {
            breakpoints,
            decisions,
        })
    }

    /// One interval covering `[0, t_max]`.
    pub fn constant(time_bound: f64, profile: PositionalProfile) -> Self {
        Self {
            breakpoints: vec![0.0, time_bound],
            decisions: vec![profile],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn decisions(&self) -> &[PositionalProfile] {
        &self.decisions
    }

    pub fn time_bound(&self) -> f64 {
        *self.breakpoints.last().expect("non-empty")
    }

    pub fn interval_count(&self) -> usize {
        self.decisions.len()
    }

    /// Interior breakpoints.
    pub fn switch_points(&self) -> &[f64] {
        &self.breakpoints[1..self.breakpoints.len() - 1]
    }

    /// Interval whose closure-from-the-left contains `t`.
    pub fn interval_at(&self, t: f64) -> usize {
        let upper = &self.breakpoints[1..];
        upper.partition_point(|&b| b < t).min(self.decisions.len() - 1)
    }

    /// Interval that contains times just after `t`.
    pub fn interval_after(&self, t: f64) -> usize {
        let upper = &self.breakpoints[1..];
        upper.partition_point(|&b| b <= t).min(self.decisions.len() - 1)
    }

    pub fn decision(&self, l: LocationId, t: f64) -> Option<ActionId> {
        self.decisions[self.interval_at(t)].get(l)
    }

    /// Merges adjacent intervals with identical decisions.
    pub fn minimized(&self) -> Self {
        let mut breakpoints = vec![self.breakpoints[0]];
        let mut decisions: Vec<PositionalProfile> = Vec::new();
        for (i, d) in self.decisions.iter().enumerate() {
            if decisions.last() == Some(d) {
                *breakpoints.last_mut().expect("non-empty") = self.breakpoints[i + 1];
            } else {
                decisions.push(d.clone());
                breakpoints.push(self.breakpoints[i + 1]);
            }
        }
        Self {
            breakpoints,
            decisions,
        }
    }

    /// Union of both partitions, with the decisions of `self` on each piece.
    pub fn refined(&self, breakpoints: &[f64]) -> Self {
        let decisions = breakpoints
            .windows(2)
            .map(|w| self.decisions[self.interval_at(w[1])].clone())
            .collect();
        Self {
            breakpoints: breakpoints.to_vec(),
            decisions,
        }
    }

    /// The strategy of one player.
    pub fn restrict(&self, model: &CtmgModel, owner: Owner) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            decisions: self.decisions.iter().map(|d| d.restrict(model, owner)).collect(),
        }
        .minimized()
    }

    /// Joins two strategies into a single scheduler on the merged partition.
    pub fn combine(&self, other: &Self) -> Result<Self> {
        if self.time_bound() != other.time_bound() {
            return Err(Error::TimeBoundMismatch(self.time_bound(), other.time_bound()));
        }
        let bps = merge_partitions(&self.breakpoints, &other.breakpoints);
        let a = self.refined(&bps);
        let b = other.refined(&bps);
        let decisions = a
            .decisions
            .iter()
            .zip(&b.decisions)
            .map(|(x, y)| x.merged(y))
            .collect();
        Ok(Self {
            breakpoints: bps,
            decisions,
        })
    }

    /// Checks that every decision is enabled at its location.
    pub fn check_enabled(&self, model: &CtmgModel) -> Result<()> {
        for d in &self.decisions {
            for (l, a) in d.iter() {
                if l.0 >= model.len() {
                    return Err(Error::UnknownLocation(format!("#{}", l.0)));
                }
                if a.0 >= model.actions().len() || !model.is_enabled(l, a) {
                    return Err(Error::DisabledAction {
                        location: model.location_name(l).to_string(),
                        action: model.actions().get(a.0).cloned().unwrap_or_else(|| format!("#{}", a.0)),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Sorted union of two partitions of the same interval.
pub fn merge_partitions(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}
