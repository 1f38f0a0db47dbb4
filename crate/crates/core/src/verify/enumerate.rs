use crate::error::{Error, Result};
use crate::model::{CtmgModel, LocationId, Owner};
use crate::solver::{evaluate_scheduler, CylindricalScheduler, Objective, PositionalProfile};

pub const DEFAULT_PROFILE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PositionalOptimum {
    pub profile: PositionalProfile,
    /// Initial-distribution weighted value at `t = 0`.
    pub value: f64,
}

/// Every deterministic positional profile, in lexicographic order of the
/// enabled-action indices. Each profile decides every location.
pub fn positional_profiles(model: &CtmgModel, cap: u128) -> Result<Vec<PositionalProfile>> {
    let enabled: Vec<_> = model.location_ids().map(|l| model.enabled_unchecked(l)).collect();
    let count = enabled
        .iter()
        .fold(1u128, |acc, e| acc.saturating_mul(e.len().max(1) as u128));
    if count > cap {
        return Err(Error::CapExceeded {
            what: "positional profile",
            count,
            cap,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; enabled.len()];
    loop {
        out.push(
            idx.iter()
                .enumerate()
                .filter(|(l, _)| !enabled[*l].is_empty())
                .map(|(l, &k)| (LocationId(l), enabled[l][k]))
                .collect(),
        );
        // odometer, last location fastest
        let mut pos = enabled.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if idx[pos] + 1 < enabled[pos].len() {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Best positional profile by its value at `t = 0`: the maximum or minimum,
/// or for games the reachability player's best reply against the safety
/// player's best counter-reply. Ties keep the earliest profile.
pub fn enumerate_positional(model: &CtmgModel, objective: Objective, steps: usize, cap: u128) -> Result<PositionalOptimum> {
    let profiles = positional_profiles(model, cap)?;
    let t = model.time_bound();
    let value = |p: &PositionalProfile| -> Result<f64> {
        Ok(evaluate_scheduler(model, &CylindricalScheduler::constant(t, p.clone()), steps)?.weighted_initial(model))
    };
    match objective {
        Objective::Max | Objective::Min => {
            let mut best: Option<PositionalOptimum> = None;
            for p in profiles {
                let v = value(&p)?;
                let better = best.as_ref().is_none_or(|b| match objective {
                    Objective::Max => v > b.value,
                    _ => v < b.value,
                });
                if better {
                    best = Some(PositionalOptimum { profile: p, value: v });
                }
            }
            Ok(best.expect("at least one profile"))
        }
        Objective::Game => {
            if model.is_single_player() {
                return Err(Error::GameOnSinglePlayer);
            }
            let reach: Vec<PositionalProfile> = dedup(profiles.iter().map(|p| p.restrict(model, Owner::Reach)));
            let safe: Vec<PositionalProfile> = dedup(profiles.iter().map(|p| p.restrict(model, Owner::Safe)));
            let mut best: Option<PositionalOptimum> = None;
            for r in &reach {
                let mut reply: Option<PositionalOptimum> = None;
                for s in &safe {
                    let p = r.merged(s);
                    let v = value(&p)?;
                    if reply.as_ref().is_none_or(|b| v < b.value) {
                        reply = Some(PositionalOptimum { profile: p, value: v });
                    }
                }
                let reply = reply.expect("at least one counter-strategy");
                if best.as_ref().is_none_or(|b| reply.value > b.value) {
                    best = Some(reply);
                }
            }
            Ok(best.expect("at least one strategy"))
        }
    }
}

fn dedup(items: impl Iterator<Item = PositionalProfile>) -> Vec<PositionalProfile> {
    let mut out: Vec<PositionalProfile> = Vec::new();
    for p in items {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fig1;

    #[test]
    fn fig1_best_positional_is_always_a() {
        let m = fig1();
        let best = enumerate_positional(&m, Objective::Max, 2000, DEFAULT_PROFILE_CAP).unwrap();
        let a = m.find_location("A").unwrap();
        assert_eq!(best.profile.get(a), m.find_action("a").ok());
        assert!((best.value - (1.0 - 5.0 * (-4.0f64).exp())).abs() < 1e-9);
        assert!(matches!(
            enumerate_positional(&m, Objective::Max, 100, 1),
            Err(Error::CapExceeded { .. })
        ));
    }
}
