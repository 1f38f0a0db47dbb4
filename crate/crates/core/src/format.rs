//! Plain-text model files, scheduler artifacts and value-curve CSV.
//!
//! Model grammar, one declaration per line, `#` starts a comment:
//!
//! ```text
//! ctmg
//! time-bound <number>
//! goal-mode absorbing|at-deadline
//! location <id> continuous|discrete reach|safe [goal]
//! rate <loc> <action> <loc> <number>
//! prob <loc> <action> <loc> <number>
//! init <loc> <number>
//! ```
//!
//! Numbers are decimal (`2.5`, `1e-3`) or fractions (`1/3`). The action order
//! is the order of first appearance; it is the tie-break order of the solver.
//! An absorbing-mode continuous goal location without any `rate` line gets an
//! implicit unit self-loop under the first action.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    validate, CtmgModel, GoalMode, LocationId, LocationKind, ModelBuilder, Owner, ValidationReport,
    Violation, ViolationCode,
};
use crate::solver::{CylindricalScheduler, PositionalProfile, ValueFunction};

/// Action introduced when a model without actions needs an implicit self-loop.
pub const IMPLICIT_ACTION: &str = "tau";

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub text: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    TimeBound(f64),
    GoalMode(GoalMode),
    Location {
        name: Token,
        kind: LocationKind,
        owner: Owner,
        goal: bool,
    },
    Rate {
        from: Token,
        action: Token,
        to: Token,
        value: f64,
    },
    Prob {
        from: Token,
        action: Token,
        to: Token,
        value: f64,
    },
    Init {
        location: Token,
        value: f64,
    },
}

/// A syntactically well-formed model file; names are not yet resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub declarations: Vec<(usize, Declaration)>,
}

fn tokenize(line: &str, line_no: usize) -> Vec<Token> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: content[s..i].to_string(),
                    line: line_no,
                    col: content[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    out
}

fn syntax(line: usize, col: usize, expected: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        col,
        expected: expected.into(),
    }
}

/// Parses `3`, `2.5`, `1e-3` or `1/3`.
pub fn parse_number(text: &str) -> Option<f64> {
    let plain = |s: &str| -> Option<f64> {
        let ok = !s.is_empty()
            && s.chars()
                .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'));
        if !ok {
            return None;
        }
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    };
    match text.split_once('/') {
        Some((num, den)) => {
            let n = plain(num)?;
            let d = plain(den)?;
            (d != 0.0).then(|| n / d)
        }
        None => plain(text),
    }
}

/// Renders with 17 significant digits, trailing zeros trimmed. Round-trips
/// every finite double bit-exactly.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let body = if (-7..=20).contains(&exp) {
        if exp >= 0 {
            let split = (exp + 1) as usize;
            let (int, frac) = if split >= digits.len() {
                (format!("{digits}{}", "0".repeat(split - digits.len())), String::new())
            } else {
                (digits[..split].to_string(), digits[split..].to_string())
            };
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int
            } else {
                format!("{int}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            format!("0.{zeros}{}", digits.trim_end_matches('0'))
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{}e{exp}", &digits[..1])
        } else {
            format!("{}.{frac}e{exp}", &digits[..1])
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn number(tok: &Token) -> Result<f64> {
    parse_number(&tok.text).ok_or_else(|| syntax(tok.line, tok.col, "a number"))
}

fn expect_arity(tokens: &[Token], n: usize, what: &str, line: usize) -> Result<()> {
    if tokens.len() < n {
        let col = tokens.last().map_or(1, |t| t.col + t.text.chars().count());
        return Err(syntax(line, col, what.to_string()));
    }
    if tokens.len() > n {
        let t = &tokens[n];
        return Err(syntax(t.line, t.col, "end of line"));
    }
    Ok(())
}

/// Syntax-level parse.
pub fn parse_document(text: &str) -> Result<ModelDocument> {
    let mut declarations = Vec::new();
    let mut header_seen = false;
    let mut time_bound_seen = false;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let tokens = tokenize(raw, line);
        let Some(head) = tokens.first() else { continue };
        if !header_seen {
            if head.text != "ctmg" {
                return Err(syntax(line, head.col, "header `ctmg`"));
            }
            expect_arity(&tokens, 1, "header `ctmg`", line)?;
            header_seen = true;
            continue;
        }
        let decl = match head.text.as_str() {
            "time-bound" => {
                expect_arity(&tokens, 2, "`time-bound <number>`", line)?;
                if time_bound_seen {
                    return Err(syntax(line, head.col, "a single `time-bound` directive"));
                }
                time_bound_seen = true;
                Declaration::TimeBound(number(&tokens[1])?)
            }
            "goal-mode" => {
                expect_arity(&tokens, 2, "`goal-mode absorbing|at-deadline`", line)?;
                match tokens[1].text.as_str() {
                    "absorbing" => Declaration::GoalMode(GoalMode::Absorbing),
                    "at-deadline" => Declaration::GoalMode(GoalMode::AtDeadline),
                    _ => return Err(syntax(line, tokens[1].col, "`absorbing` or `at-deadline`")),
                }
            }
            "location" => {
                if tokens.len() == 5 && tokens[4].text != "goal" {
                    return Err(syntax(line, tokens[4].col, "`goal` or end of line"));
                }
                if tokens.len() != 5 {
                    expect_arity(&tokens, 4, "`location <id> continuous|discrete reach|safe [goal]`", line)?;
                }
                let kind = match tokens[2].text.as_str() {
                    "continuous" => LocationKind::Continuous,
                    "discrete" => LocationKind::Discrete,
                    _ => return Err(syntax(line, tokens[2].col, "`continuous` or `discrete`")),
                };
                let owner = match tokens[3].text.as_str() {
                    "reach" => Owner::Reach,
                    "safe" => Owner::Safe,
                    _ => return Err(syntax(line, tokens[3].col, "`reach` or `safe`")),
                };
                Declaration::Location {
                    name: tokens[1].clone(),
                    kind,
                    owner,
                    goal: tokens.len() == 5,
                }
            }
            "rate" | "prob" => {
                let usage = format!("`{} <loc> <action> <loc> <number>`", head.text);
                expect_arity(&tokens, 5, &usage, line)?;
                let (from, action, to) = (tokens[1].clone(), tokens[2].clone(), tokens[3].clone());
                let value = number(&tokens[4])?;
                if head.text == "rate" {
                    Declaration::Rate { from, action, to, value }
                } else {
                    Declaration::Prob { from, action, to, value }
                }
            }
            "init" => {
                expect_arity(&tokens, 3, "`init <loc> <number>`", line)?;
                Declaration::Init {
                    location: tokens[1].clone(),
                    value: number(&tokens[2])?,
                }
            }
            _ => return Err(syntax(line, head.col, "a directive (time-bound, goal-mode, location, rate, prob, init)")),
        };
        declarations.push((line, decl));
    }
    if !header_seen {
        return Err(syntax(last_line.max(1), 1, "header `ctmg`"));
    }
    if !time_bound_seen {
        return Err(syntax(last_line + 1, 1, "`time-bound <number>`"));
    }
    Ok(ModelDocument { declarations })
}

impl ModelDocument {
    /// Resolves names into a model without checking side conditions.
    /// Name-resolution problems are returned as a report.
    pub fn to_model(&self) -> std::result::Result<CtmgModel, ValidationReport> {
        let mut builder = ModelBuilder::new(0.0);
        let mut problems = Vec::new();
        for (line, decl) in &self.declarations {
            match decl {
                Declaration::TimeBound(t) => {
                    builder.time_bound(*t);
                }
                Declaration::GoalMode(m) => {
                    builder.goal_mode(*m);
                }
                Declaration::Location { name, kind, owner, goal } => {
                    if builder.find_location(&name.text).is_some() {
                        problems.push(
                            Violation::new(ViolationCode::DuplicateLocation, format!("line {line}: location declared twice"))
                                .with_context(Some(&name.text), *line),
                        );
                    } else {
                        builder.location(name.text.clone(), *kind, *owner, *goal);
                    }
                }
                _ => {}
            }
        }
        let resolve = |builder: &ModelBuilder, tok: &Token, problems: &mut Vec<Violation>| {
            let found = builder.find_location(&tok.text);
            if found.is_none() {
                problems.push(
                    Violation::new(
                        ViolationCode::UnknownLocation,
                        format!("line {}:{}: undeclared location", tok.line, tok.col),
                    )
                    .with_context(Some(&tok.text), tok.line),
                );
            }
            found
        };
        for (line, decl) in &self.declarations {
            match decl {
                Declaration::Rate { from, action, to, value } | Declaration::Prob { from, action, to, value } => {
                    let is_rate = matches!(decl, Declaration::Rate { .. });
                    let (Some(f), Some(t)) = (
                        resolve(&builder, from, &mut problems),
                        resolve(&builder, to, &mut problems),
                    ) else {
                        continue;
                    };
                    let a = builder.action(&action.text);
                    let dup = if is_rate { builder.has_rate(f, a, t) } else { builder.has_prob(f, a, t) };
                    if dup {
                        problems.push(
                            Violation::new(ViolationCode::DuplicateEntry, format!("line {line}: entry declared twice"))
                                .with_context(Some(&from.text), *line),
                        );
                        continue;
                    }
                    if is_rate {
                        builder.set_rate(f, a, t, *value);
                    } else {
                        builder.set_prob(f, a, t, *value);
                    }
                }
                Declaration::Init { location, value } => {
                    if let Some(l) = resolve(&builder, location, &mut problems) {
                        builder.set_initial(l, *value);
                    }
                }
                _ => {}
            }
        }
        if !problems.is_empty() {
            let mut report = ValidationReport { violations: problems };
            report.sort();
            return Err(report);
        }
        let mut model = builder.build_unchecked();
        if model.goal_mode() == GoalMode::Absorbing {
            model = with_implicit_goal_loops(model);
        }
        Ok(model)
    }
}

/// Gives every action-less continuous goal location a unit self-loop.
fn with_implicit_goal_loops(model: CtmgModel) -> CtmgModel {
    let needs: Vec<LocationId> = model
        .location_ids()
        .filter(|&l| model.is_continuous(l) && model.is_goal(l) && model.rate_rows(l).is_empty())
        .collect();
    if needs.is_empty() {
        return model;
    }
    let mut builder = crate::transform::rebuild(&model);
    let a = builder
        .first_action()
        .unwrap_or_else(|| builder.action(IMPLICIT_ACTION));
    for l in needs {
        builder.set_rate(l, a, l, 1.0);
    }
    builder.build_unchecked()
}

/// Parses without checking side conditions (name resolution still applies).
pub fn parse_model_unchecked(text: &str) -> Result<CtmgModel> {
    parse_document(text)?.to_model().map_err(Error::Semantic)
}

/// Parses and validates a model file.
pub fn parse_model(text: &str) -> Result<CtmgModel> {
    let model = parse_model_unchecked(text)?;
    let report = validate(&model);
    if report.ok() {
        Ok(model)
    } else {
        Err(Error::Semantic(report))
    }
}

/// Canonical text form: locations in model order, transition lines grouped
/// by action order so that re-parsing reproduces the action order.
pub fn serialize_model(model: &CtmgModel) -> String {
    let mut out = String::from("ctmg\n");
    let _ = writeln!(out, "time-bound {}", format_number(model.time_bound()));
    let mode = match model.goal_mode() {
        GoalMode::Absorbing => "absorbing",
        GoalMode::AtDeadline => "at-deadline",
    };
    let _ = writeln!(out, "goal-mode {mode}");
    for loc in model.locations() {
        let kind = match loc.kind {
            LocationKind::Continuous => "continuous",
            LocationKind::Discrete => "discrete",
        };
        let owner = match loc.owner {
            Owner::Reach => "reach",
            Owner::Safe => "safe",
        };
        let goal = if loc.goal { " goal" } else { "" };
        let _ = writeln!(out, "location {} {kind} {owner}{goal}", loc.name);
    }
    for (ai, action) in model.actions().iter().enumerate() {
        let a = crate::model::ActionId(ai);
        for l in model.location_ids() {
            for (&ra, row) in model.rate_rows(l) {
                if ra != a {
                    continue;
                }
                for &(to, v) in row {
                    let _ = writeln!(out, "rate {} {action} {} {}", model.location_name(l), model.location_name(to), format_number(v));
                }
            }
            for (&pa, row) in model.prob_rows(l) {
                if pa != a {
                    continue;
                }
                for &(to, v) in row {
                    let _ = writeln!(out, "prob {} {action} {} {}", model.location_name(l), model.location_name(to), format_number(v));
                }
            }
        }
    }
    for l in model.location_ids() {
        let m = model.initial()[l.0];
        if m != 0.0 {
            let _ = writeln!(out, "init {} {}", model.location_name(l), format_number(m));
        }
    }
    out
}

/// `interval <lo> <hi>` followed by one `choose <loc> <action>` per decision.
pub fn write_scheduler_artifact(model: &CtmgModel, scheduler: &CylindricalScheduler) -> String {
    let mut out = String::new();
    let bps = scheduler.breakpoints();
    for (i, profile) in scheduler.decisions().iter().enumerate() {
        let _ = writeln!(out, "interval {} {}", format_number(bps[i]), format_number(bps[i + 1]));
        for (l, a) in profile.iter() {
            let _ = writeln!(out, "choose {} {}", model.location_name(l), model.action_name(a));
        }
    }
    out
}

pub fn read_scheduler_artifact(model: &CtmgModel, text: &str) -> Result<CylindricalScheduler> {
    let bad = |line: usize, message: String| Error::MalformedArtifact { line, message };
    let mut breakpoints: Vec<f64> = Vec::new();
    let mut decisions: Vec<PositionalProfile> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw, line);
        let Some(head) = tokens.first() else { continue };
        match head.text.as_str() {
            "interval" if tokens.len() == 3 => {
                let lo = parse_number(&tokens[1].text).ok_or_else(|| bad(line, "bad lower bound".into()))?;
                let hi = parse_number(&tokens[2].text).ok_or_else(|| bad(line, "bad upper bound".into()))?;
                match breakpoints.last() {
                    None => breakpoints.push(lo),
                    Some(&prev) if prev.to_bits() == lo.to_bits() => {}
                    Some(&prev) => {
                        return Err(bad(line, format!("interval starts at {lo}, previous ended at {prev}")));
                    }
                }
                if !(hi > lo || (hi == lo && breakpoints.len() == 1 && hi == 0.0)) {
                    return Err(bad(line, format!("breakpoints out of order: {lo} then {hi}")));
                }
                breakpoints.push(hi);
                decisions.push(PositionalProfile::default());
            }
            "choose" if tokens.len() == 3 => {
                let profile = decisions
                    .last_mut()
                    .ok_or_else(|| bad(line, "`choose` before any `interval`".into()))?;
                let l = model.find_location(&tokens[1].text)?;
                let a = model.find_action(&tokens[2].text)?;
                if profile.get(l).is_some() {
                    return Err(bad(line, format!("duplicate decision for {}", tokens[1].text)));
                }
                profile.set(l, a);
            }
            _ => return Err(bad(line, format!("unexpected `{}`", raw.trim()))),
        }
    }
    if decisions.is_empty() {
        return Err(bad(0, "no intervals".into()));
    }
    CylindricalScheduler::new(breakpoints, decisions)
}

/// Value curve as CSV: `t,<loc1>,<loc2>,...`, times ascending.
pub fn write_value_csv(model: &CtmgModel, vf: &ValueFunction, precision: Option<usize>) -> String {
    let fmt = |x: f64| match precision {
        Some(p) => format!("{x:.p$}"),
        None => format_number(x),
    };
    let mut out = String::from("t");
    for loc in model.locations() {
        let _ = write!(out, ",{}", loc.name);
    }
    out.push('\n');
    for (i, &t) in vf.times().iter().enumerate() {
        out.push_str(&fmt(t));
        for &v in vf.row(i) {
            out.push(',');
            out.push_str(&fmt(v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fig1, FIG1_DOCUMENT};

    #[test]
    fn parses_fig1() {
        let m = parse_model(FIG1_DOCUMENT).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m.time_bound(), 1.0);
        assert_eq!(m, fig1());
    }

    #[test]
    fn empty_input_is_a_syntax_error() {
        assert!(matches!(parse_model(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_model("# nothing\n"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn missing_time_bound() {
        let err = parse_model("ctmg\nlocation A continuous reach\n").unwrap_err();
        match err {
            Error::Syntax { expected, .. } => assert!(expected.contains("time-bound")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rate_on_discrete_is_semantic() {
        let text = "ctmg\ntime-bound 1\nlocation d discrete reach\nlocation g continuous reach goal\nrate d a g 1\ninit d 1\n";
        match parse_model(text) {
            Err(Error::Semantic(r)) => assert!(r.has(ViolationCode::RateOnDiscrete)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_directive_and_column() {
        match parse_model("ctmg\ntime-bound 1\n  bogus x\n") {
            Err(Error::Syntax { line, col, .. }) => assert_eq!((line, col), (3, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("3"), Some(3.0));
        assert_eq!(parse_number("2.5"), Some(2.5));
        assert_eq!(parse_number("1/3"), Some(1.0 / 3.0));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("inf"), None);
        assert_eq!(parse_number("2,5"), None);
    }

    #[test]
    fn seventeen_digit_rendering() {
        assert_eq!(format_number(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_number(4.0), "4");
        assert_eq!(format_number(2.5), "2.5");
        assert_eq!(format_number(-0.125), "-0.125");
        assert_eq!(format_number(1e-20), "9.9999999999999995e-21");
        assert_eq!(format_number(0.5e-30), "5.0000000000000004e-31");
        for x in [1.0 / 3.0, 0.1, 1e300, 5e-324, 123456.789, 0.6534264097200273] {
            assert_eq!(format_number(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn fig1_round_trip() {
        let m = fig1();
        let text = serialize_model(&m);
        assert_eq!(parse_model(&text).unwrap(), m);
        assert_eq!(serialize_model(&parse_model(&text).unwrap()), text);
    }

    #[test]
    fn fraction_round_trip() {
        let text = "ctmg\ntime-bound 1/3\nlocation A continuous reach\nlocation G continuous reach goal\nrate A a G 1/3\ninit A 1\n";
        let m = parse_model(text).unwrap();
        let s = serialize_model(&m);
        assert!(s.contains("rate A a G 0.33333333333333331"), "{s}");
        assert_eq!(parse_model(&s).unwrap(), m);
    }

    #[test]
    fn action_order_survives_round_trip() {
        let text = "ctmg\ntime-bound 1\nlocation A continuous reach\nlocation B continuous reach\nlocation G continuous reach goal\n\
                    rate B z G 1\nrate A y G 1\nrate A z B 2\ninit A 1\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.actions(), ["z", "y"]);
        let back = parse_model(&serialize_model(&m)).unwrap();
        assert_eq!(back.actions(), ["z", "y"]);
        assert_eq!(back, m);
    }

    #[test]
    fn one_interval_artifact() {
        let m = fig1();
        let la = m.find_location("A").unwrap();
        let b = m.find_action("b").unwrap();
        let mut p = PositionalProfile::default();
        p.set(la, b);
        let s = CylindricalScheduler::new(vec![0.0, 1.0], vec![p]).unwrap();
        let text = write_scheduler_artifact(&m, &s);
        assert_eq!(text, "interval 0 1\nchoose A b\n");
        assert_eq!(read_scheduler_artifact(&m, &text).unwrap(), s);
    }

    #[test]
    fn unordered_breakpoints_rejected() {
        let m = fig1();
        let text = "interval 0 0.7\nchoose A a\ninterval 0.7 0.5\nchoose A b\n";
        assert!(matches!(read_scheduler_artifact(&m, text), Err(Error::MalformedArtifact { .. })));
        let gap = "interval 0 0.5\nchoose A a\ninterval 0.6 1\nchoose A b\n";
        assert!(read_scheduler_artifact(&m, gap).is_err());
    }
}
