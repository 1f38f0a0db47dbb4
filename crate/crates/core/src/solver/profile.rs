use std::collections::BTreeMap;

use crate::model::{ActionId, CtmgModel, LocationId, Owner};

/// A deterministic positional decision map.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PositionalProfile {
    choice: BTreeMap<LocationId, ActionId>,
}

impl PositionalProfile {
    pub fn get(&self, l: LocationId) -> Option<ActionId> {
        self.choice.get(&l).copied()
    }

    pub fn set(&mut self, l: LocationId, a: ActionId) {
        self.choice.insert(l, a);
    }

    pub fn iter(&self) -> impl Iterator<Item = (LocationId, ActionId)> + '_ {
        self.choice.iter().map(|(&l, &a)| (l, a))
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    /// Decisions of the locations owned by `owner` only.
    pub fn restrict(&self, model: &CtmgModel, owner: Owner) -> Self {
        Self {
            choice: self
                .choice
                .iter()
                .filter(|(&l, _)| model.owner(l) == owner)
                .map(|(&l, &a)| (l, a))
                .collect(),
        }
    }

    /// Union of two profiles; `other` wins on overlap.
    pub fn merged(&self, other: &Self) -> Self {
        let mut choice = self.choice.clone();
        choice.extend(other.choice.iter().map(|(&l, &a)| (l, a)));
        Self { choice }
    }

    pub(crate) fn from_dense(actions: &[ActionId]) -> Self {
        Self {
            choice: actions
                .iter()
                .enumerate()
                .map(|(i, &a)| (LocationId(i), a))
                .collect(),
        }
    }

    /// Builds a profile from `(location, action)` names.
    pub fn from_names(model: &CtmgModel, pairs: &[(&str, &str)]) -> crate::Result<Self> {
        let mut p = Self::default();
        for (l, a) in pairs {
            p.set(model.find_location(l)?, model.find_action(a)?);
        }
        Ok(p)
    }
}

impl FromIterator<(LocationId, ActionId)> for PositionalProfile {
    fn from_iter<T: IntoIterator<Item = (LocationId, ActionId)>>(iter: T) -> Self {
        Self {
            choice: iter.into_iter().collect(),
        }
    }
}
