//! Acceptance criteria. Runs as a plain binary so every criterion prints its
//! verdict line even when it passes; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use ctmg_core::fixtures::fig1;
use ctmg_core::model::{CtmgModel, Owner};
use ctmg_core::random::{random_model, random_scheduler, RandomModelOptions};
use ctmg_core::solver::{
    check_nash, evaluate_scheduler, solve, CylindricalScheduler, Objective, PositionalProfile, SolveOptions,
};
use ctmg_core::transform::{early_to_late, make_simple, uniformise, DEFAULT_COMPOUND_CAP};
use ctmg_core::verify::{
    enumerate_positional, positional_profiles, richardson_initial, scheduler_distance, simulate,
    truncated_uniformization_value, DEFAULT_PROFILE_CAP,
};
use ctmg_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SWITCH: f64 = 0.653_426_409_720_027_3;
const OPTIMUM: f64 = 0.915_497_033_579_355_3;
const ALWAYS_A: f64 = 0.908_421_805_556_329_1;
const ALWAYS_B: f64 = 0.864_664_716_763_387_3;
const CORPUS_SEED: u64 = 0x005e_edc7;
const GAME_SEED: u64 = 0x9a3e;
const PAIR_SEED: u64 = 0xd157;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn corpus(n: usize, seed: u64, two_player: bool) -> Vec<CtmgModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = RandomModelOptions {
        two_player,
        ..Default::default()
    };
    (0..n).map(|_| random_model(&mut rng, &opts)).collect()
}

fn constant(m: &CtmgModel, p: PositionalProfile) -> CylindricalScheduler {
    CylindricalScheduler::constant(m.time_bound(), p)
}

fn fig1_profile(act: &str) -> (CtmgModel, CylindricalScheduler) {
    let m = fig1();
    let p = PositionalProfile::from_names(&m, &[("A", act)]).unwrap();
    let s = constant(&m, p);
    (m, s)
}

fn criterion_1() -> Verdict {
    let m = fig1();
    let start = Instant::now();
    let sol = solve(&m, Objective::Max, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let a = m.find_location("A").unwrap();
    let (act_a, act_b) = (m.find_action("a").unwrap(), m.find_action("b").unwrap());
    let sw = sol.scheduler.switch_points();
    if sw.len() != 1 {
        return Err(format!("{} switches", sw.len()));
    }
    let t = sw[0];
    let below = sol.scheduler.decision(a, t / 2.0) == Some(act_a) && sol.scheduler.decision(a, t) == Some(act_a);
    let above = sol.scheduler.decision(a, (t + 1.0) / 2.0) == Some(act_b);
    check(
        (t - SWITCH).abs() <= 1e-4 && below && above && elapsed < 1.0,
        format!("one switch at {t:.6} (error {:.1e}), a below, b above, {elapsed:.3} s", (t - SWITCH).abs()),
    )
}

fn criterion_2() -> Verdict {
    let m = fig1();
    let sol = solve(&m, Objective::Max, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let v = sol.values.value_at(m.find_location("A").unwrap(), 0.0).unwrap();
    check((v - OPTIMUM).abs() <= 1e-6, format!("value {v:.9} vs {OPTIMUM:.9} (error {:.1e})", (v - OPTIMUM).abs()))
}

fn criterion_3() -> Verdict {
    let (m, sb) = fig1_profile("b");
    let (_, sa) = fig1_profile("a");
    let vb = evaluate_scheduler(&m, &sb, 10_000).map_err(|e| e.to_string())?.weighted_initial(&m);
    let va = evaluate_scheduler(&m, &sa, 10_000).map_err(|e| e.to_string())?.weighted_initial(&m);
    let best = enumerate_positional(&m, Objective::Max, 10_000, DEFAULT_PROFILE_CAP).map_err(|e| e.to_string())?;
    let a = m.find_location("A").unwrap();
    let picks_a = best.profile.get(a) == m.find_action("a").ok();
    let gap = OPTIMUM - best.value;
    check(
        (vb - ALWAYS_B).abs() <= 1e-6 && (va - ALWAYS_A).abs() <= 1e-6 && picks_a && (gap - 0.00707).abs() < 5e-5,
        format!("always-b {vb:.6}, always-a {va:.6}, enumeration picks always-a, gap {gap:.5}"),
    )
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let opts = SolveOptions::with_steps(2000);
    let mut worst = f64::NEG_INFINITY;
    let mut profiles = 0usize;
    for (i, m) in corpus(100, CORPUS_SEED, false).iter().enumerate() {
        let hi = solve(m, Objective::Max, &opts).map_err(|e| format!("model {i}: {e}"))?;
        let lo = solve(m, Objective::Min, &opts).map_err(|e| format!("model {i}: {e}"))?;
        for p in positional_profiles(m, DEFAULT_PROFILE_CAP).unwrap() {
            profiles += 1;
            let vf = evaluate_scheduler(m, &constant(m, p), 2000).map_err(|e| format!("model {i}: {e}"))?;
            for (k, &t) in vf.times().iter().enumerate() {
                for l in m.location_ids() {
                    let v = vf.get(k, l);
                    let over = v - hi.values.value_at(l, t).unwrap();
                    let under = lo.values.value_at(l, t).unwrap() - v;
                    worst = worst.max(over).max(under);
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-5 && elapsed < 60.0,
        format!("{profiles} profiles on 100 models, largest violation {worst:.1e}, {elapsed:.1} s"),
    )
}

fn criterion_5() -> Verdict {
    let mut worst_grid = 0.0f64;
    let mut worst_bound = f64::NEG_INFINITY;
    for (i, m) in corpus(100, CORPUS_SEED, false).iter().enumerate() {
        let sol = solve(m, Objective::Max, &SolveOptions::default()).map_err(|e| format!("model {i}: {e}"))?;
        // keep λ·h small enough for the extrapolated first-order scheme
        let steps = ((m.max_exit_rate() * m.time_bound() * 2000.0).ceil() as usize).max(2000);
        let rich = richardson_initial(m, Objective::Max, steps).map_err(|e| format!("model {i}: {e}"))?;
        for (r, s) in rich.iter().zip(sol.values.initial_row()) {
            worst_grid = worst_grid.max((r - s).abs());
        }
        for p in positional_profiles(m, DEFAULT_PROFILE_CAP).unwrap() {
            let vf = evaluate_scheduler(m, &constant(m, p.clone()), 2000).map_err(|e| format!("model {i}: {e}"))?;
            let vb = truncated_uniformization_value(m, &p, 1e-8).map_err(|e| format!("model {i}: {e}"))?;
            for l in m.location_ids() {
                let v = vf.initial_row()[l.0];
                worst_bound = worst_bound.max(vb.lower[l.0] - v).max(v - vb.upper[l.0]);
            }
        }
    }
    check(
        worst_grid <= 1e-5 && worst_bound <= 1e-9,
        format!("Richardson vs solve {worst_grid:.1e}, largest escape from uniformisation bounds {worst_bound:.1e}"),
    )
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_6() -> Verdict {
    let opts = SolveOptions::with_steps(2000);
    let (mut uni, mut e2l, mut simple) = (0.0f64, 0.0f64, 0.0f64);
    let mut simple_models = 0;
    for (i, m) in corpus(100, CORPUS_SEED, false).iter().enumerate() {
        for objective in [Objective::Max, Objective::Min] {
            let err = |e: Error| format!("model {i}: {e}");
            let base = solve(m, objective, &opts).map_err(err)?;
            let v0 = base.values.initial_row();

            let u = uniformise(m, None).map_err(err)?;
            let vu = solve(&u, objective, &opts).map_err(err)?;
            uni = uni.max(max_gap(v0, vu.values.initial_row()));

            let (el, map) = early_to_late(m).map_err(err)?;
            let ve = solve(&el, objective, &opts).map_err(err)?;
            for (orig, gate) in map.iter() {
                e2l = e2l.max((v0[orig.0] - ve.values.initial_row()[gate.0]).abs());
            }

            match make_simple(m, DEFAULT_COMPOUND_CAP) {
                Ok((s, _)) => {
                    let vs = solve(&s, objective, &opts).map_err(err)?;
                    simple = simple.max(max_gap(v0, &vs.values.initial_row()[..m.len()]));
                    simple_models += 1;
                }
                Err(Error::CapExceeded { .. }) => {}
                Err(e) => return Err(err(e)),
            }
        }
    }
    check(
        uni <= 1e-6 && e2l <= 1e-6 && simple <= 1e-6,
        format!(
            "uniformise {uni:.1e}, early-to-late {e2l:.1e}, make-simple {simple:.1e} ({} runs)",
            simple_models
        ),
    )
}

fn criterion_7() -> Verdict {
    let steps = 2000;
    let opts = SolveOptions::with_steps(steps);
    let mut worst_nash = 0.0f64;
    let mut worst_dev = f64::NEG_INFINITY;
    let mut deviations = 0usize;
    for (i, m) in corpus(50, GAME_SEED, true).iter().enumerate() {
        let err = |e: Error| format!("game {i}: {e}");
        let sol = solve(m, Objective::Game, &opts).map_err(err)?;
        let h = m.time_bound() / steps as f64;
        let report = check_nash(m, &sol.values, &sol.scheduler, 10.0 * h).map_err(err)?;
        if !report.passed() {
            return Err(format!("game {i}: {report}"));
        }
        worst_nash = worst_nash.max(report.max_residual() / (10.0 * h));
        let eq = evaluate_scheduler(m, &sol.scheduler, steps).map_err(err)?;
        let s = &sol.scheduler;
        for k in 0..s.interval_count() {
            for l in m.location_ids() {
                let enabled = m.enabled_actions(l).unwrap();
                if enabled.len() < 2 {
                    continue;
                }
                for &a in &enabled {
                    if s.decisions()[k].get(l) == Some(a) {
                        continue;
                    }
                    let mut decisions = s.decisions().to_vec();
                    decisions[k].set(l, a);
                    let dev = CylindricalScheduler::new(s.breakpoints().to_vec(), decisions).unwrap();
                    let vd = evaluate_scheduler(m, &dev, steps).map_err(err)?;
                    deviations += 1;
                    let sign = if m.owner(l) == Owner::Reach { 1.0 } else { -1.0 };
                    for x in m.location_ids() {
                        worst_dev = worst_dev.max(sign * (vd.initial_row()[x.0] - eq.initial_row()[x.0]));
                    }
                }
            }
        }
    }
    check(
        worst_dev <= 1e-6,
        format!(
            "50 games pass at 10h (largest residual {worst_nash:.2} of tolerance), {deviations} deviations, largest gain {worst_dev:.1e}"
        ),
    )
}

fn criterion_8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
    let models = corpus(50, PAIR_SEED, false);
    let steps = 4000;
    let (mut bound, mut sym, mut tri) = (f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for (i, m) in models.iter().enumerate() {
        let err = |e: Error| format!("pair {i}: {e}");
        let d = random_scheduler(&mut rng, m, 4);
        let e = random_scheduler(&mut rng, m, 4);
        let f = random_scheduler(&mut rng, m, 4);
        let val = |s: &CylindricalScheduler| evaluate_scheduler(m, s, steps).map(|v| v.weighted_initial(m));
        let (vd, ve) = (val(&d).map_err(err)?, val(&e).map_err(err)?);
        let de = scheduler_distance(m, &d, &e, steps).map_err(err)?;
        let ed = scheduler_distance(m, &e, &d, steps).map_err(err)?;
        let ef = scheduler_distance(m, &e, &f, steps).map_err(err)?;
        let df = scheduler_distance(m, &d, &f, steps).map_err(err)?;
        bound = bound.max((vd - ve).abs() - de);
        sym = sym.max((de - ed).abs());
        tri = tri.max(df - de - ef);
    }
    check(
        bound <= 1e-6 && sym <= 1e-9 && tri <= 1e-9,
        format!("value gap minus distance {bound:.1e}, asymmetry {sym:.1e}, triangle excess {tri:.1e}"),
    )
}

fn criterion_9() -> Verdict {
    let runs = 1_000_000;
    let m = fig1();
    let opt = solve(&m, Objective::Max, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, s, target) in [
        ("optimal", opt.scheduler.clone(), OPTIMUM),
        ("always-a", fig1_profile("a").1, ALWAYS_A),
        ("always-b", fig1_profile("b").1, ALWAYS_B),
    ] {
        let r = simulate(&m, &s, runs, 42).map_err(|e| e.to_string())?;
        let again = simulate(&m, &s, runs, 42).map_err(|e| e.to_string())?;
        let z = (r.estimate - target) / r.standard_error;
        ok &= z.abs() <= 4.0 && format!("{r:?}") == format!("{again:?}");
        parts.push(format!("{name} {:.6} (z={z:+.2})", r.estimate));
    }
    check(ok, format!("{}, reruns identical", parts.join(", ")))
}

fn criterion_10() -> Verdict {
    let n = 10_000;
    let coarse = SolveOptions::with_steps(n);
    let fine = SolveOptions::with_steps(2 * n);
    let tol = 10.0 * coarse.switch_tol;
    let mut worst = 0.0f64;
    let mut total = 0usize;
    for (i, m) in corpus(100, CORPUS_SEED, false).iter().enumerate() {
        for objective in [Objective::Max, Objective::Min] {
            let a = solve(m, objective, &coarse).map_err(|e| format!("model {i}: {e}"))?;
            let b = solve(m, objective, &fine).map_err(|e| format!("model {i}: {e}"))?;
            let (sa, sb) = (a.scheduler.switch_points(), b.scheduler.switch_points());
            if sa.len() != sb.len() {
                return Err(format!("model {i} {objective:?}: {} switches at N, {} at 2N", sa.len(), sb.len()));
            }
            total += sa.len();
            worst = worst.max(max_gap(sa, sb));
        }
    }
    check(worst <= tol, format!("{total} switches stable under doubling, largest shift {worst:.1e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Fig. 1 switching point", criterion_1),
        ("Fig. 1 optimal value", criterion_2),
        ("positional baselines", criterion_3),
        ("domination", criterion_4),
        ("oracle equivalence", criterion_5),
        ("transformation invariance", criterion_6),
        ("game equilibrium", criterion_7),
        ("scheduler metric", criterion_8),
        ("Monte Carlo consistency", criterion_9),
        ("switch-count stability", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion_{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
