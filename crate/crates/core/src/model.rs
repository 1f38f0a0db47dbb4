//! The game data model and its structural side conditions.
//!
//! A [`CtmgModel`] holds locations split into continuous (exponential
//! sojourns driven by rates) and discrete (left instantly through a
//! probability matrix) kinds, each owned by the reachability or the safety
//! player. Transition rows are stored sparsely per `(location, action)`.
//! Embedded probabilities of continuous locations are never stored; they are
//! derived from the rates on demand.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Initial-distribution and row-sum tolerance.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocationId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

impl LocationId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocationKind {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    /// Maximises the probability of reaching the goal.
    Reach,
    /// Minimises it.
    Safe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GoalMode {
    /// Reach the goal at some time up to the bound; goals must be absorbing.
    #[default]
    Absorbing,
    /// Be in the goal exactly at the time bound.
    AtDeadline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Location {
    pub name: String,
    pub kind: LocationKind,
    pub owner: Owner,
    pub goal: bool,
}

/// Sparse successor list, sorted by target.
pub type Row = Vec<(LocationId, f64)>;

type RowTable = Vec<BTreeMap<ActionId, Row>>;

#[derive(Debug, Clone, PartialEq)]
pub struct CtmgModel {
    locations: Vec<Location>,
    actions: Vec<String>,
    rates: RowTable,
    probs: RowTable,
    initial: Vec<f64>,
    time_bound: f64,
    goal_mode: GoalMode,
}

/// Incremental construction of a [`CtmgModel`].
///
/// Repeated `set_*` calls for the same entry overwrite the previous value.
#[derive(Debug, Clone, Default)]
pub struct ModelBuilder {
    locations: Vec<Location>,
    actions: Vec<String>,
    rates: RowTable,
    probs: RowTable,
    initial: Vec<f64>,
    time_bound: f64,
    goal_mode: GoalMode,
}

impl ModelBuilder {
    pub fn new(time_bound: f64) -> Self {
        Self {
            time_bound,
            ..Self::default()
        }
    }

    pub fn goal_mode(&mut self, mode: GoalMode) -> &mut Self {
        self.goal_mode = mode;
        self
    }

    pub fn time_bound(&mut self, t: f64) -> &mut Self {
        self.time_bound = t;
        self
    }

    pub fn location(
        &mut self,
        name: impl Into<String>,
        kind: LocationKind,
        owner: Owner,
        goal: bool,
    ) -> LocationId {
        self.locations.push(Location {
            name: name.into(),
            kind,
            owner,
            goal,
        });
        self.rates.push(BTreeMap::new());
        self.probs.push(BTreeMap::new());
        self.initial.push(0.0);
        LocationId(self.locations.len() - 1)
    }

    /// Returns the id of `name`, appending it to the action order if new.
    pub fn action(&mut self, name: &str) -> ActionId {
        match self.actions.iter().position(|a| a == name) {
            Some(i) => ActionId(i),
            None => {
                self.actions.push(name.to_string());
                ActionId(self.actions.len() - 1)
            }
        }
    }

    pub fn find_location(&self, name: &str) -> Option<LocationId> {
        self.locations
            .iter()
            .position(|l| l.name == name)
            .map(LocationId)
    }

    pub fn location_count(&self) -> usize {
        self.locations.len()
    }

    pub fn set_rate(&mut self, from: LocationId, a: ActionId, to: LocationId, rate: f64) -> &mut Self {
        set_entry(&mut self.rates[from.0], a, to, rate);
        self
    }

    pub fn add_rate(&mut self, from: LocationId, a: ActionId, to: LocationId, rate: f64) -> &mut Self {
        let row = self.rates[from.0].entry(a).or_default();
        match row.binary_search_by_key(&to, |e| e.0) {
            Ok(i) => row[i].1 += rate,
            Err(i) => row.insert(i, (to, rate)),
        }
        self
    }

    pub fn set_prob(&mut self, from: LocationId, a: ActionId, to: LocationId, p: f64) -> &mut Self {
        set_entry(&mut self.probs[from.0], a, to, p);
        self
    }

    pub fn add_prob(&mut self, from: LocationId, a: ActionId, to: LocationId, p: f64) -> &mut Self {
        let row = self.probs[from.0].entry(a).or_default();
        match row.binary_search_by_key(&to, |e| e.0) {
            Ok(i) => row[i].1 += p,
            Err(i) => row.insert(i, (to, p)),
        }
        self
    }

    pub fn has_rate(&self, from: LocationId, a: ActionId, to: LocationId) -> bool {
        has_entry(&self.rates[from.0], a, to)
    }

    pub fn has_prob(&self, from: LocationId, a: ActionId, to: LocationId) -> bool {
        has_entry(&self.probs[from.0], a, to)
    }

    pub fn has_rates(&self, from: LocationId) -> bool {
        !self.rates[from.0].is_empty()
    }

    pub fn set_initial(&mut self, l: LocationId, mass: f64) -> &mut Self {
        self.initial[l.0] = mass;
        self
    }

    pub fn first_action(&self) -> Option<ActionId> {
        (!self.actions.is_empty()).then_some(ActionId(0))
    }

    /// Builds without checking side conditions.
    pub fn build_unchecked(self) -> CtmgModel {
        CtmgModel {
            locations: self.locations,
            actions: self.actions,
            rates: self.rates,
            probs: self.probs,
            initial: self.initial,
            time_bound: self.time_bound,
            goal_mode: self.goal_mode,
        }
    }

    /// Builds and validates.
    pub fn build(self) -> Result<CtmgModel> {
        let model = self.build_unchecked();
        let report = validate(&model);
        if report.ok() {
            Ok(model)
        } else {
            Err(Error::InvalidModel(report))
        }
    }
}

fn set_entry(table: &mut BTreeMap<ActionId, Row>, a: ActionId, to: LocationId, v: f64) {
    let row = table.entry(a).or_default();
    match row.binary_search_by_key(&to, |e| e.0) {
        Ok(i) => row[i].1 = v,
        Err(i) => row.insert(i, (to, v)),
    }
}

fn has_entry(table: &BTreeMap<ActionId, Row>, a: ActionId, to: LocationId) -> bool {
    table
        .get(&a)
        .is_some_and(|row| row.binary_search_by_key(&to, |e| e.0).is_ok())
}

impl CtmgModel {
    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn location(&self, l: LocationId) -> &Location {
        &self.locations[l.0]
    }

    pub fn location_ids(&self) -> impl Iterator<Item = LocationId> + '_ {
        (0..self.locations.len()).map(LocationId)
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.0]
    }

    pub fn location_name(&self, l: LocationId) -> &str {
        &self.locations[l.0].name
    }

    pub fn find_location(&self, name: &str) -> Result<LocationId> {
        self.locations
            .iter()
            .position(|l| l.name == name)
            .map(LocationId)
            .ok_or_else(|| Error::UnknownLocation(name.to_string()))
    }

    pub fn find_action(&self, name: &str) -> Result<ActionId> {
        self.actions
            .iter()
            .position(|a| a == name)
            .map(ActionId)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn time_bound(&self) -> f64 {
        self.time_bound
    }

    pub fn goal_mode(&self) -> GoalMode {
        self.goal_mode
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn is_goal(&self, l: LocationId) -> bool {
        self.locations[l.0].goal
    }

    pub fn is_continuous(&self, l: LocationId) -> bool {
        self.locations[l.0].kind == LocationKind::Continuous
    }

    pub fn owner(&self, l: LocationId) -> Owner {
        self.locations[l.0].owner
    }

    /// Stored rate rows of `l` (empty for well-formed discrete locations).
    pub fn rate_rows(&self, l: LocationId) -> &BTreeMap<ActionId, Row> {
        &self.rates[l.0]
    }

    /// Stored probability rows of `l` (empty for well-formed continuous locations).
    pub fn prob_rows(&self, l: LocationId) -> &BTreeMap<ActionId, Row> {
        &self.probs[l.0]
    }

    pub fn rate_row(&self, l: LocationId, a: ActionId) -> &[(LocationId, f64)] {
        self.rates[l.0].get(&a).map_or(&[], |r| r.as_slice())
    }

    pub fn prob_row(&self, l: LocationId, a: ActionId) -> &[(LocationId, f64)] {
        self.probs[l.0].get(&a).map_or(&[], |r| r.as_slice())
    }

    pub fn rate(&self, l: LocationId, a: ActionId, to: LocationId) -> f64 {
        lookup(self.rate_row(l, a), to)
    }

    /// Transition probability; derived from the rates for continuous locations.
    pub fn prob(&self, l: LocationId, a: ActionId, to: LocationId) -> f64 {
        if self.is_continuous(l) {
            let exit = self.exit_rate_unchecked(l, a);
            if exit > 0.0 {
                self.rate(l, a, to) / exit
            } else {
                0.0
            }
        } else {
            lookup(self.prob_row(l, a), to)
        }
    }

    fn check_location(&self, l: LocationId) -> Result<()> {
        if l.0 < self.locations.len() {
            Ok(())
        } else {
            Err(Error::UnknownLocation(format!("#{}", l.0)))
        }
    }

    fn check_action(&self, a: ActionId) -> Result<()> {
        if a.0 < self.actions.len() {
            Ok(())
        } else {
            Err(Error::UnknownAction(format!("#{}", a.0)))
        }
    }

    /// Total outgoing rate of `(l, a)`.
    pub fn exit_rate(&self, l: LocationId, a: ActionId) -> Result<f64> {
        self.check_location(l)?;
        self.check_action(a)?;
        if !self.is_continuous(l) {
            return Err(Error::NotContinuous(self.location_name(l).to_string()));
        }
        Ok(self.exit_rate_unchecked(l, a))
    }

    pub(crate) fn exit_rate_unchecked(&self, l: LocationId, a: ActionId) -> f64 {
        self.rate_row(l, a).iter().map(|&(_, r)| r).sum()
    }

    /// Enabled actions of `l` in action order, which is also the tie-break order.
    pub fn enabled_actions(&self, l: LocationId) -> Result<Vec<ActionId>> {
        self.check_location(l)?;
        Ok(self.enabled_unchecked(l))
    }

    pub(crate) fn enabled_unchecked(&self, l: LocationId) -> Vec<ActionId> {
        if self.is_continuous(l) {
            self.rates[l.0]
                .iter()
                .filter(|(_, row)| row.iter().map(|e| e.1).sum::<f64>() > 0.0)
                .map(|(&a, _)| a)
                .collect()
        } else {
            self.probs[l.0]
                .iter()
                .filter(|(_, row)| (row.iter().map(|e| e.1).sum::<f64>() - 1.0).abs() <= MASS_TOL)
                .map(|(&a, _)| a)
                .collect()
        }
    }

    pub fn is_enabled(&self, l: LocationId, a: ActionId) -> bool {
        if self.is_continuous(l) {
            self.exit_rate_unchecked(l, a) > 0.0
        } else {
            let s: f64 = self.prob_row(l, a).iter().map(|e| e.1).sum();
            (s - 1.0).abs() <= MASS_TOL
        }
    }

    /// Largest exit rate over continuous locations and enabled actions.
    pub fn max_exit_rate(&self) -> f64 {
        self.location_ids()
            .filter(|&l| self.is_continuous(l))
            .flat_map(|l| self.rates[l.0].values())
            .map(|row| row.iter().map(|e| e.1).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Owners that hold at least one location.
    pub fn owners(&self) -> (bool, bool) {
        let reach = self.locations.iter().any(|l| l.owner == Owner::Reach);
        let safe = self.locations.iter().any(|l| l.owner == Owner::Safe);
        (reach, safe)
    }

    pub fn is_single_player(&self) -> bool {
        let (r, s) = self.owners();
        !(r && s)
    }

    /// Zero-time nesting depth of every location: 0 for continuous ones,
    /// one more than the deepest successor for discrete ones.
    pub fn discrete_depth(&self) -> Result<Vec<usize>> {
        const UNSEEN: u8 = 0;
        const ACTIVE: u8 = 1;
        const DONE: u8 = 2;
        let n = self.locations.len();
        let mut state = vec![UNSEEN; n];
        let mut depth = vec![0usize; n];
        for root in 0..n {
            if state[root] != UNSEEN || self.is_continuous(LocationId(root)) {
                continue;
            }
            // iterative DFS: (node, successor cursor)
            let succ = |l: usize| -> Vec<usize> { self.discrete_successors(LocationId(l)) };
            let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
            state[root] = ACTIVE;
            while let Some((node, next, cursor)) = stack.last_mut() {
                if *cursor < next.len() {
                    let s = next[*cursor];
                    *cursor += 1;
                    if self.is_continuous(LocationId(s)) {
                        continue;
                    }
                    match state[s] {
                        ACTIVE => return Err(Error::Cycle(self.locations[s].name.clone())),
                        UNSEEN => {
                            state[s] = ACTIVE;
                            let sn = succ(s);
                            stack.push((s, sn, 0));
                        }
                        _ => {}
                    }
                } else {
                    let node = *node;
                    let d = next
                        .iter()
                        .map(|&s| depth[s])
                        .max()
                        .unwrap_or(0);
                    depth[node] = d + 1;
                    state[node] = DONE;
                    stack.pop();
                }
            }
        }
        Ok(depth)
    }

    /// Every target of a positive probability entry, over all actions.
    fn discrete_successors(&self, l: LocationId) -> Vec<usize> {
        let mut out: Vec<usize> = self.probs[l.0]
            .values()
            .flat_map(|row| row.iter().filter(|e| e.1 > 0.0).map(|e| e.0 .0))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Discrete locations sorted by increasing depth (ties by index).
    pub(crate) fn discrete_order(&self) -> Result<Vec<LocationId>> {
        let depth = self.discrete_depth()?;
        let mut order: Vec<LocationId> = self
            .location_ids()
            .filter(|&l| !self.is_continuous(l))
            .collect();
        order.sort_by_key(|l| (depth[l.0], l.0));
        Ok(order)
    }
}

fn lookup(row: &[(LocationId, f64)], to: LocationId) -> f64 {
    row.binary_search_by_key(&to, |e| e.0)
        .map_or(0.0, |i| row[i].1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    EmptyModel,
    InvalidTimeBound,
    InitialNotDistribution,
    UnknownLocation,
    DuplicateLocation,
    DuplicateEntry,
    NonFiniteValue,
    NegativeRate,
    ProbOutOfRange,
    RateOnDiscrete,
    ProbOnContinuous,
    NoEnabledAction,
    DiscreteRowSum,
    NoDiscreteCycle,
    GoalNotAbsorbing,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::EmptyModel => "EMPTY_MODEL",
            Self::InvalidTimeBound => "INVALID_TIME_BOUND",
            Self::InitialNotDistribution => "INITIAL_NOT_DISTRIBUTION",
            Self::UnknownLocation => "UNKNOWN_LOCATION",
            Self::DuplicateLocation => "DUPLICATE_LOCATION",
            Self::DuplicateEntry => "DUPLICATE_ENTRY",
            Self::NonFiniteValue => "NON_FINITE_VALUE",
            Self::NegativeRate => "NEGATIVE_RATE",
            Self::ProbOutOfRange => "PROB_OUT_OF_RANGE",
            Self::RateOnDiscrete => "RATE_ON_DISCRETE",
            Self::ProbOnContinuous => "PROB_ON_CONTINUOUS",
            Self::NoEnabledAction => "NO_ENABLED_ACTION",
            Self::DiscreteRowSum => "DISCRETE_ROW_SUM",
            Self::NoDiscreteCycle => "NO_DISCRETE_CYCLE",
            Self::GoalNotAbsorbing => "GOAL_NOT_ABSORBING",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: ViolationCode,
    pub location: Option<String>,
    pub action: Option<String>,
    pub message: String,
    /// Sort key: (location index, action index); `None` sorts first.
    pub(crate) key: (Option<usize>, Option<usize>),
}

impl Violation {
    pub fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Self {
            code,
            location: None,
            action: None,
            message: message.into(),
            key: (None, None),
        }
    }

    pub(crate) fn at(mut self, model: &CtmgModel, l: LocationId) -> Self {
        self.location = Some(model.location_name(l).to_string());
        self.key.0 = Some(l.0);
        self
    }

    pub(crate) fn with_action(mut self, model: &CtmgModel, a: ActionId) -> Self {
        self.action = Some(model.action_name(a).to_string());
        self.key.1 = Some(a.0);
        self
    }

    /// Attaches context without an index, for document-level problems.
    pub fn with_context(mut self, location: Option<&str>, line: usize) -> Self {
        self.location = location.map(str::to_string);
        self.key = (Some(line), None);
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)?;
        if let Some(l) = &self.location {
            write!(f, " location={l}")?;
        }
        if let Some(a) = &self.action {
            write!(f, " action={a}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub(crate) fn sort(&mut self) {
        self.violations
            .sort_by(|a, b| a.key.cmp(&b.key).then(a.code.cmp(&b.code)));
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural side condition and reports all violations.
pub fn validate(model: &CtmgModel) -> ValidationReport {
    let mut out = Vec::new();

    if model.locations.is_empty() {
        out.push(Violation::new(ViolationCode::EmptyModel, "model has no locations"));
    }
    if !(model.time_bound.is_finite() && model.time_bound >= 0.0) {
        out.push(Violation::new(
            ViolationCode::InvalidTimeBound,
            format!("time bound {} must be finite and nonnegative", model.time_bound),
        ));
    }
    let mass: f64 = model.initial.iter().sum();
    if model.initial.iter().any(|&m| !(0.0..=1.0).contains(&m)) || (mass - 1.0).abs() > MASS_TOL {
        out.push(Violation::new(
            ViolationCode::InitialNotDistribution,
            format!("initial distribution sums to {mass}"),
        ));
    }

    for l in model.location_ids() {
        let continuous = model.is_continuous(l);
        for (&a, row) in &model.rates[l.0] {
            if !continuous {
                out.push(
                    Violation::new(ViolationCode::RateOnDiscrete, "rates are only defined on continuous locations")
                        .at(model, l)
                        .with_action(model, a),
                );
            }
            for &(to, r) in row {
                if !r.is_finite() {
                    out.push(
                        Violation::new(ViolationCode::NonFiniteValue, format!("rate to {} is {r}", model.location_name(to)))
                            .at(model, l)
                            .with_action(model, a),
                    );
                } else if r < 0.0 {
                    out.push(
                        Violation::new(ViolationCode::NegativeRate, format!("rate to {} is {r}", model.location_name(to)))
                            .at(model, l)
                            .with_action(model, a),
                    );
                }
            }
        }
        for (&a, row) in &model.probs[l.0] {
            if continuous {
                // stored probabilities must agree with the ones derived from rates
                let exit = model.exit_rate_unchecked(l, a);
                let consistent = row.iter().all(|&(to, p)| {
                    let derived = if exit > 0.0 { model.rate(l, a, to) / exit } else { 0.0 };
                    (derived - p).abs() <= MASS_TOL
                });
                if !consistent {
                    out.push(
                        Violation::new(
                            ViolationCode::ProbOnContinuous,
                            "probabilities of continuous locations are derived from rates",
                        )
                        .at(model, l)
                        .with_action(model, a),
                    );
                }
                continue;
            }
            let mut sum = 0.0;
            for &(to, p) in row {
                if !p.is_finite() {
                    out.push(
                        Violation::new(ViolationCode::NonFiniteValue, format!("probability to {} is {p}", model.location_name(to)))
                            .at(model, l)
                            .with_action(model, a),
                    );
                } else if !(0.0..=1.0).contains(&p) {
                    out.push(
                        Violation::new(ViolationCode::ProbOutOfRange, format!("probability to {} is {p}", model.location_name(to)))
                            .at(model, l)
                            .with_action(model, a),
                    );
                }
                sum += p;
            }
            if sum.abs() > MASS_TOL && (sum - 1.0).abs() > MASS_TOL {
                out.push(
                    Violation::new(ViolationCode::DiscreteRowSum, format!("row sums to {sum}, expected 0 or 1"))
                        .at(model, l)
                        .with_action(model, a),
                );
            }
        }
        if model.enabled_unchecked(l).is_empty() {
            out.push(Violation::new(ViolationCode::NoEnabledAction, "location has no enabled action").at(model, l));
        }
        if model.goal_mode == GoalMode::Absorbing && model.is_goal(l) {
            let table = if continuous { &model.rates[l.0] } else { &model.probs[l.0] };
            for (&a, row) in table {
                if let Some(&(to, _)) = row.iter().find(|&&(to, v)| v > 0.0 && !model.is_goal(to)) {
                    out.push(
                        Violation::new(
                            ViolationCode::GoalNotAbsorbing,
                            format!("goal location leaves the goal region towards {}", model.location_name(to)),
                        )
                        .at(model, l)
                        .with_action(model, a),
                    );
                }
            }
        }
    }

    if let Some(cycle) = find_discrete_cycle(model) {
        let first = *cycle.iter().min().expect("cycle is non-empty");
        let names: Vec<&str> = cycle.iter().map(|&l| model.location_name(l)).collect();
        out.push(
            Violation::new(ViolationCode::NoDiscreteCycle, format!("discrete cycle {}", names.join(" -> ")))
                .at(model, first),
        );
    }

    let mut report = ValidationReport { violations: out };
    report.sort();
    report
}

/// Returns the locations of one cycle through discrete locations, if any.
fn find_discrete_cycle(model: &CtmgModel) -> Option<Vec<LocationId>> {
    let n = model.len();
    let mut color = vec![0u8; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != 0 || model.is_continuous(LocationId(root)) {
            continue;
        }
        let mut stack = vec![(root, model.discrete_successors(LocationId(root)), 0usize)];
        color[root] = 1;
        while let Some((node, next, cursor)) = stack.last_mut() {
            if *cursor == next.len() {
                color[*node] = 2;
                stack.pop();
                continue;
            }
            let s = next[*cursor];
            *cursor += 1;
            if model.is_continuous(LocationId(s)) {
                continue;
            }
            let node = *node;
            match color[s] {
                0 => {
                    color[s] = 1;
                    parent[s] = node;
                    stack.push((s, model.discrete_successors(LocationId(s)), 0));
                }
                1 => {
                    let mut cycle = vec![LocationId(s)];
                    let mut cur = node;
                    while cur != s {
                        cycle.push(LocationId(cur));
                        cur = parent[cur];
                    }
                    cycle.reverse();
                    cycle.rotate_right(1);
                    return Some(cycle);
                }
                _ => {}
            }
        }
    }
    None
}
