use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{ActionId, CtmgModel, LocationId, LocationKind, ModelBuilder};
use crate::solver::ensure_valid;

use super::{fresh_name, LocationMap};

/// Default limit on the number of compound actions plus pooled paths.
pub const DEFAULT_COMPOUND_CAP: u128 = 10_000;

/// `l0 -a0-> l1 -a1-> … -> ln` with `l0`, `ln` continuous and every
/// intermediate location discrete.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimeAbstractPath {
    pub locations: Vec<LocationId>,
    pub actions: Vec<ActionId>,
}

impl TimeAbstractPath {
    pub fn end(&self) -> LocationId {
        *self.locations.last().expect("non-empty path")
    }

    pub fn render(&self, model: &CtmgModel) -> String {
        let mut s = model.location_name(self.locations[0]).to_string();
        for (a, l) in self.actions.iter().zip(&self.locations[1..]) {
            s.push('>');
            s.push_str(model.action_name(*a));
            s.push('>');
            s.push_str(model.location_name(*l));
        }
        s
    }
}

/// Originals keep their ids; every pooled location records its path.
#[derive(Debug, Clone)]
pub struct PathMap {
    pub locations: LocationMap,
    pub paths: Vec<(LocationId, TimeAbstractPath)>,
}

/// Choice tree through the discrete locations below one action.
#[derive(Debug, Clone)]
struct Tree {
    at: LocationId,
    action: ActionId,
    /// One subtree per discrete successor, in row order.
    children: Vec<Tree>,
}

/// A compound action's name and the pooled paths it leads to, with rates.
type Compound = (String, Vec<(TimeAbstractPath, f64)>);

struct Pooling<'m> {
    model: &'m CtmgModel,
    memo: HashMap<LocationId, Vec<Tree>>,
}

impl<'m> Pooling<'m> {
    fn discrete_targets(&self, row: &[(LocationId, f64)]) -> Vec<LocationId> {
        row.iter()
            .filter(|e| e.1 > 0.0 && !self.model.is_continuous(e.0))
            .map(|e| e.0)
            .collect()
    }

    fn count(&self, d: LocationId, memo: &mut HashMap<LocationId, u128>) -> u128 {
        if let Some(&c) = memo.get(&d) {
            return c;
        }
        let c = self
            .model
            .enabled_unchecked(d)
            .into_iter()
            .map(|a| {
                self.discrete_targets(self.model.prob_row(d, a))
                    .into_iter()
                    .fold(1u128, |acc, s| acc.saturating_mul(self.count(s, memo)))
            })
            .fold(0u128, u128::saturating_add);
        memo.insert(d, c);
        c
    }

    fn trees(&mut self, d: LocationId) -> Vec<Tree> {
        if let Some(t) = self.memo.get(&d) {
            return t.clone();
        }
        let mut out = Vec::new();
        for a in self.model.enabled_unchecked(d) {
            let targets = self.discrete_targets(self.model.prob_row(d, a));
            let options: Vec<Vec<Tree>> = targets.iter().map(|&s| self.trees(s)).collect();
            for children in product(&options) {
                out.push(Tree {
                    at: d,
                    action: a,
                    children,
                });
            }
        }
        self.memo.insert(d, out.clone());
        out
    }

    /// Paths below `tree`, each with its probability.
    fn expand(&self, tree: &Tree, prefix: &TimeAbstractPath, mass: f64, out: &mut Vec<(TimeAbstractPath, f64)>) {
        let mut child = tree.children.iter();
        for &(to, p) in self.model.prob_row(tree.at, tree.action) {
            if p <= 0.0 {
                continue;
            }
            let mut path = prefix.clone();
            path.actions.push(tree.action);
            path.locations.push(to);
            if self.model.is_continuous(to) {
                out.push((path, mass * p));
            } else {
                let sub = child.next().expect("one subtree per discrete successor");
                self.expand(sub, &path, mass * p, out);
            }
        }
    }

    fn render(&self, tree: &Tree) -> String {
        let mut s = format!("{}:{}", self.model.location_name(tree.at), self.model.action_name(tree.action));
        if !tree.children.is_empty() {
            let inner: Vec<String> = tree.children.iter().map(|t| self.render(t)).collect();
            s.push('{');
            s.push_str(&inner.join(","));
            s.push('}');
        }
        s
    }
}

fn product(options: &[Vec<Tree>]) -> Vec<Vec<Tree>> {
    let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for o in opts {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

/// Pools every zero-time path through discrete locations into a single
/// continuous transition. A compound action fixes the first action and a
/// choice at every discrete location it may pass; it leads to one fresh
/// continuous location per time-abstract path, named after the path, which
/// behaves like the path's end. The result has no transition from a
/// continuous into a discrete location. Original locations keep their ids.
pub fn make_simple(model: &CtmgModel, cap: u128) -> Result<(CtmgModel, PathMap)> {
    ensure_valid(model)?;
    if !model.is_single_player() {
        return Err(Error::MultiPlayer);
    }
    let mut pool = Pooling {
        model,
        memo: HashMap::new(),
    };
    let continuous: Vec<LocationId> = model.location_ids().filter(|&l| model.is_continuous(l)).collect();

    let mut counts = HashMap::new();
    let mut total: u128 = 0;
    for &l in &continuous {
        for a in model.enabled_unchecked(l) {
            let c = pool
                .discrete_targets(model.rate_row(l, a))
                .into_iter()
                .fold(1u128, |acc, d| acc.saturating_mul(pool.count(d, &mut counts)));
            total = total.saturating_add(c);
        }
    }
    if total > cap {
        return Err(Error::CapExceeded {
            what: "compound action",
            count: total,
            cap,
        });
    }

    let mut compounds: Vec<Vec<Compound>> = vec![Vec::new(); model.len()];
    let mut path_count: u128 = 0;
    for &l in &continuous {
        for a0 in model.enabled_unchecked(l) {
            let row = model.rate_row(l, a0);
            let targets = pool.discrete_targets(row);
            let options: Vec<Vec<Tree>> = targets.iter().map(|&d| pool.trees(d)).collect();
            for choice in product(&options) {
                let mut name = model.action_name(a0).to_string();
                if !choice.is_empty() {
                    let inner: Vec<String> = choice.iter().map(|t| pool.render(t)).collect();
                    name = format!("{name}{{{}}}", inner.join(","));
                }
                let mut paths = Vec::new();
                let mut sub = choice.iter();
                for &(to, r) in row {
                    if r <= 0.0 {
                        continue;
                    }
                    let start = TimeAbstractPath {
                        locations: vec![l, to],
                        actions: vec![a0],
                    };
                    if model.is_continuous(to) {
                        paths.push((start, r));
                    } else {
                        let tree = sub.next().expect("one tree per discrete target");
                        pool.expand(tree, &start, r, &mut paths);
                    }
                }
                path_count += paths.len() as u128;
                compounds[l.0].push((name, paths));
            }
        }
    }
    if path_count > cap {
        return Err(Error::CapExceeded {
            what: "pooled path",
            count: path_count,
            cap,
        });
    }

    let mut b = ModelBuilder::new(model.time_bound());
    b.goal_mode(model.goal_mode());
    for name in model.actions() {
        b.action(name);
    }
    for loc in model.locations() {
        b.location(loc.name.clone(), loc.kind, loc.owner, loc.goal);
    }
    for l in model.location_ids() {
        b.set_initial(l, model.initial()[l.0]);
        for (&a, row) in model.prob_rows(l) {
            for &(to, p) in row {
                b.set_prob(l, a, to, p);
            }
        }
    }

    let mut pooled: HashMap<TimeAbstractPath, LocationId> = HashMap::new();
    let mut paths = Vec::new();
    for &l in &continuous {
        for (_, ps) in &compounds[l.0] {
            for (path, _) in ps {
                if pooled.contains_key(path) {
                    continue;
                }
                let end = model.location(path.end());
                let name = fresh_name(&b, path.render(model));
                let id = b.location(name, LocationKind::Continuous, end.owner, end.goal);
                pooled.insert(path.clone(), id);
                paths.push((id, path.clone()));
            }
        }
    }

    // originals and their pooled copies share the outgoing transitions
    let mut sources: Vec<Vec<LocationId>> = vec![Vec::new(); model.len()];
    for &l in &continuous {
        sources[l.0].push(l);
    }
    for (id, path) in &paths {
        sources[path.end().0].push(*id);
    }
    for &l in &continuous {
        for (name, ps) in &compounds[l.0] {
            let a = b.action(name);
            for src in &sources[l.0] {
                for (path, r) in ps {
                    b.add_rate(*src, a, pooled[path], *r);
                }
            }
        }
    }

    Ok((
        b.build()?,
        PathMap {
            locations: LocationMap::identity(model.len()),
            paths,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_model;

    const CHAIN: &str = "\
ctmg
time-bound 1
location c continuous reach
location d1 discrete reach
location d2 discrete reach
location g continuous reach goal
rate c a d1 3
prob d1 x d2 1
prob d1 y d2 1
prob d2 x g 1
prob d2 y g 0.5
prob d2 y c 0.5
rate g a g 1
init c 1
";

    #[test]
    fn chain_yields_four_compound_actions() {
        let m = parse_model(CHAIN).unwrap();
        let (s, _) = make_simple(&m, DEFAULT_COMPOUND_CAP).unwrap();
        let c = s.find_location("c").unwrap();
        assert_eq!(s.enabled_actions(c).unwrap().len(), 4);
        for l in s.location_ids().filter(|&l| s.is_continuous(l)) {
            for rows in s.rate_rows(l).values() {
                assert!(rows.iter().all(|e| s.is_continuous(e.0)));
            }
        }
        assert!(s.find_location("c>a>d1>x>d2>y>g").is_ok());
    }

    #[test]
    fn cap_is_enforced() {
        let m = parse_model(CHAIN).unwrap();
        assert!(matches!(make_simple(&m, 3), Err(Error::CapExceeded { .. })));
    }
}
