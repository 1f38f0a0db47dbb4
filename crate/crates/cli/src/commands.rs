use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ctmg_core::format::{parse_model, read_scheduler_artifact, serialize_model, write_scheduler_artifact, write_value_csv};
use ctmg_core::model::{ActionId, CtmgModel, LocationId};
use ctmg_core::solver::{self, CylindricalScheduler, Objective, SolveOptions, ValueFunction};
use ctmg_core::{transform, verify};

use crate::output::{list, stdout, write_atomic, Line};
use crate::{Command, FormatArgs, OracleMethod, SolveArgs, TransformOp};

#[derive(Debug)]
pub enum CliError {
    Core(ctmg_core::Error),
    Io(PathBuf, std::io::Error),
    Input(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Input(s) => f.write_str(s),
        }
    }
}

impl From<ctmg_core::Error> for CliError {
    fn from(e: ctmg_core::Error) -> Self {
        CliError::Core(e)
    }
}

type Outcome = Result<(), CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, contents: &str) -> Outcome {
    write_atomic(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn load_model(path: &Path) -> Result<CtmgModel, CliError> {
    Ok(parse_model(&read(path)?)?)
}

fn load_scheduler(model: &CtmgModel, path: &Path) -> Result<CylindricalScheduler, CliError> {
    Ok(read_scheduler_artifact(model, &read(path)?)?)
}

/// Writes to `out` when given, otherwise to stdout.
fn emit(out: Option<&Path>, contents: &str) -> Outcome {
    match out {
        Some(p) => write(p, contents),
        None => {
            stdout(contents);
            Ok(())
        }
    }
}

fn solve_options(args: &SolveArgs) -> SolveOptions {
    SolveOptions {
        steps: args.steps as usize,
        switch_tol: args.switch_tol,
        tie_tol: args.tie_tol,
        ..SolveOptions::default()
    }
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { model } => {
            let m = load_model(&model)?;
            Line::default()
                .field("valid", "true")
                .field("locations", m.len())
                .field("actions", m.actions().len())
                .print();
            Ok(())
        }
        Command::Solve { model, solve, out, csv, fmt } => {
            let m = load_model(&model)?;
            let sol = solver::solve(&m, solve.objective.into(), &solve_options(&solve))?;
            let sched_path = out.unwrap_or_else(|| model.with_extension("sched"));
            let csv_path = csv.unwrap_or_else(|| model.with_extension("csv"));
            write(&sched_path, &write_scheduler_artifact(&m, &sol.scheduler))?;
            write(&csv_path, &write_value_csv(&m, &sol.values, fmt.csv()))?;
            let switches = sol.scheduler.switch_points();
            Line::default()
                .num("value", sol.values.weighted_initial(&m), fmt.line())
                .field("switches", switches.len())
                .field("switch_times", list(switches, fmt.line()))
                .print();
            Ok(())
        }
        Command::Evaluate { model, scheduler, steps, csv, fmt } => {
            let m = load_model(&model)?;
            let s = load_scheduler(&m, &scheduler)?;
            let vf = solver::evaluate_scheduler(&m, &s, steps as usize)?;
            if let Some(p) = csv {
                write(&p, &write_value_csv(&m, &vf, fmt.csv()))?;
            }
            Line::default()
                .num("value", vf.weighted_initial(&m), fmt.line())
                .field("intervals", s.interval_count())
                .print();
            Ok(())
        }
        Command::Transform { model, op, rate, cap, out } => {
            let m = load_model(&model)?;
            let result = match op {
                TransformOp::EarlyToLate => transform::early_to_late(&m)?.0,
                TransformOp::LateToEarly => transform::late_to_early(&m)?.0,
                TransformOp::MakeSimple => transform::make_simple(&m, u128::from(cap))?.0,
                TransformOp::Uniformise => transform::uniformise(&m, rate)?,
            };
            emit(out.as_deref(), &serialize_model(&result))
        }
        Command::Simulate { model, scheduler, runs, seed, fmt } => {
            let m = load_model(&model)?;
            let s = load_scheduler(&m, &scheduler)?;
            let r = verify::simulate(&m, &s, runs, seed)?;
            Line::default()
                .num("estimate", r.estimate, fmt.line())
                .num("stderr", r.standard_error, fmt.line())
                .field("successes", r.successes)
                .field("runs", r.runs)
                .field("seed", r.seed)
                .print();
            Ok(())
        }
        Command::Distance { model, first, second, steps, fmt } => {
            let m = load_model(&model)?;
            let d = load_scheduler(&m, &first)?;
            let e = load_scheduler(&m, &second)?;
            let dist = verify::scheduler_distance(&m, &d, &e, steps as usize)?;
            Line::default().num("distance", dist, fmt.line()).print();
            Ok(())
        }
        Command::Oracle {
            model,
            method,
            objective,
            steps,
            epsilon,
            scheduler,
            fmt,
        } => oracle(&model, method, objective.into(), steps as usize, epsilon, scheduler.as_deref(), fmt),
        Command::Curve { model, solve, out, fmt } => {
            let m = load_model(&model)?;
            let sol = solver::solve(&m, solve.objective.into(), &solve_options(&solve))?;
            emit(out.as_deref(), &curve_csv(&m, &sol.values, fmt.csv())?)
        }
    }
}

fn oracle(
    model: &Path,
    method: OracleMethod,
    objective: Objective,
    steps: usize,
    epsilon: f64,
    scheduler: Option<&Path>,
    fmt: FormatArgs,
) -> Outcome {
    let m = load_model(model)?;
    let p = fmt.line();
    match method {
        OracleMethod::Grid => {
            let coarse = verify::grid_oracle(&m, objective, steps)?.weighted_initial(&m);
            let extrapolated: f64 = verify::richardson_initial(&m, objective, steps)?
                .iter()
                .zip(m.initial())
                .map(|(v, w)| v * w)
                .sum();
            Line::default()
                .num("value", coarse, p)
                .num("richardson", extrapolated, p)
                .field("steps", steps)
                .print();
        }
        OracleMethod::Uniformization => {
            let path = scheduler.ok_or_else(|| {
                CliError::Input("uniformization needs --scheduler with a single interval".into())
            })?;
            let s = load_scheduler(&m, path)?;
            if s.interval_count() != 1 {
                return Err(CliError::Input(format!(
                    "uniformization needs a positional scheduler, got {} intervals",
                    s.interval_count()
                )));
            }
            let bounds = verify::truncated_uniformization_value(&m, &s.decisions()[0], epsilon)?;
            let (lower, upper) = bounds.weighted(&m);
            Line::default()
                .num("lower", lower, p)
                .num("upper", upper, p)
                .field("poisson_steps", bounds.steps)
                .print();
        }
        OracleMethod::Enumerate => {
            let best = verify::enumerate_positional(&m, objective, steps, verify::DEFAULT_PROFILE_CAP)?;
            let profile: Vec<String> = best
                .profile
                .iter()
                .map(|(l, a)| format!("{}:{}", m.location_name(l), m.action_name(a)))
                .collect();
            Line::default()
                .num("value", best.value, p)
                .field("profile", profile.join(","))
                .print();
        }
    }
    Ok(())
}

/// Value curve plus one `gain:<loc>:<action>` column per continuous location
/// and enabled action.
fn curve_csv(m: &CtmgModel, vf: &ValueFunction, precision: Option<usize>) -> Result<String, CliError> {
    let render = |x: f64| match precision {
        Some(p) => format!("{x:.p$}"),
        None => ctmg_core::format::format_number(x),
    };
    let mut columns: Vec<(LocationId, ActionId)> = Vec::new();
    for l in m.location_ids().filter(|&l| m.is_continuous(l)) {
        columns.extend(m.enabled_actions(l)?.into_iter().map(|a| (l, a)));
    }
    let mut out = String::from("t");
    for loc in m.locations() {
        let _ = write!(out, ",{}", loc.name);
    }
    for &(l, a) in &columns {
        let _ = write!(out, ",gain:{}:{}", m.location_name(l), m.action_name(a));
    }
    out.push('\n');
    let mut last = f64::NEG_INFINITY;
    for (i, &t) in vf.times().iter().enumerate() {
        if t <= last {
            continue;
        }
        last = t;
        let row = vf.row(i);
        out.push_str(&render(t));
        for &v in row {
            out.push(',');
            out.push_str(&render(v));
        }
        for &(l, a) in &columns {
            out.push(',');
            out.push_str(&render(solver::gain(m, row, l, a)?));
        }
        out.push('\n');
    }
    Ok(out)
}

