//! Sparse symmetric correlator tensors keyed by doubled genus and arity.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::curve::Leg;
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, Rational};

pub type Level = BTreeMap<Vec<Leg>, Rational>;

/// F_{g,n}[legs] for 2g - 2 + n > 0. Keys are sorted leg multisets and
/// only nonzero values are kept; a present but empty level means "computed,
/// identically zero".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorrelatorStore {
    levels: BTreeMap<(u32, u32), Level>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    legs: Vec<[u32; 2]>,
    value: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreDiff {
    pub g2: u32,
    pub n: u32,
    pub legs: Vec<Leg>,
    pub left: Rational,
    pub right: Rational,
}

pub fn canonical(legs: &[Leg]) -> Vec<Leg> {
    let mut v = legs.to_vec();
    v.sort_unstable();
    v
}

impl CorrelatorStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert_level(&mut self, g2: u32, n: u32, mut level: Level) {
        level.retain(|_, v| !v.is_zero());
        self.levels.insert((g2, n), level);
    }

    pub fn level(&self, g2: u32, n: u32) -> Option<&Level> {
        self.levels.get(&(g2, n))
    }

    pub fn has_level(&self, g2: u32, n: u32) -> bool {
        self.levels.contains_key(&(g2, n))
    }

    pub fn levels(&self) -> impl Iterator<Item = (&(u32, u32), &Level)> {
        self.levels.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// F value at any ordering of the legs; zero when absent.
    pub fn get(&self, g2: u32, n: u32, legs: &[Leg]) -> Rational {
        self.levels
            .get(&(g2, n))
            .and_then(|l| l.get(&canonical(legs)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Largest stored index on component `c`, 0 if none.
    pub fn max_index(&self, c: u32) -> u32 {
        self.levels
            .values()
            .flat_map(|l| l.keys())
            .flat_map(|legs| legs.iter())
            .filter(|leg| leg.0 == c)
            .map(|leg| leg.1)
            .max()
            .unwrap_or(0)
    }

    /// Every leg occurring in some stored entry.
    pub fn support(&self) -> BTreeSet<Leg> {
        self.levels
            .values()
            .flat_map(|l| l.keys())
            .flat_map(|legs| legs.iter().copied())
            .collect()
    }

    /// Keeps only entries all of whose legs lie on the given components.
    pub fn restrict(&self, components: &BTreeSet<u32>) -> CorrelatorStore {
        let levels = self
            .levels
            .iter()
            .map(|(k, l)| {
                let l: Level = l
                    .iter()
                    .filter(|(legs, _)| legs.iter().all(|leg| components.contains(&leg.0)))
                    .map(|(a, b)| (a.clone(), b.clone()))
                    .collect();
                (*k, l)
            })
            .collect();
        CorrelatorStore { levels }
    }

    /// Entries that differ between the two stores, over the levels both hold.
    pub fn diff(&self, other: &CorrelatorStore) -> Vec<StoreDiff> {
        let mut out = Vec::new();
        for (&(g2, n), mine) in &self.levels {
            let Some(theirs) = other.levels.get(&(g2, n)) else { continue };
            let keys: BTreeSet<&Vec<Leg>> = mine.keys().chain(theirs.keys()).collect();
            for legs in keys {
                let a = mine.get(legs).cloned().unwrap_or_else(Rational::zero);
                let b = theirs.get(legs).cloned().unwrap_or_else(Rational::zero);
                if a != b {
                    out.push(StoreDiff { g2, n, legs: legs.clone(), left: a, right: b });
                }
            }
        }
        out
    }

    /// Levels held by both stores.
    pub fn shared_levels(&self, other: &CorrelatorStore) -> Vec<(u32, u32)> {
        self.levels.keys().filter(|k| other.levels.contains_key(k)).copied().collect()
    }

    pub fn to_json(&self) -> String {
        let doc: BTreeMap<String, Vec<EntryDoc>> = self
            .levels
            .iter()
            .map(|((g2, n), l)| {
                let entries = l
                    .iter()
                    .map(|(legs, v)| EntryDoc {
                        legs: legs.iter().map(|&(c, k)| [c, k]).collect(),
                        value: format_rational(v),
                    })
                    .collect();
                (format!("{g2},{n}"), entries)
            })
            .collect();
        serde_json::to_string_pretty(&doc).expect("store serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BTreeMap<String, Vec<EntryDoc>> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut store = CorrelatorStore::new();
        for (key, entries) in doc {
            let bad = || Error::Parse(format!("bad level key {key:?}"));
            let (a, b) = key.split_once(',').ok_or_else(bad)?;
            let g2: u32 = a.trim().parse().map_err(|_| bad())?;
            let n: u32 = b.trim().parse().map_err(|_| bad())?;
            let mut level = Level::new();
            for e in entries {
                if e.legs.len() != n as usize {
                    return Err(Error::Parse(format!("entry of level {key} has {} legs", e.legs.len())));
                }
                let legs: Vec<Leg> = canonical(&e.legs.iter().map(|x| (x[0], x[1])).collect::<Vec<_>>());
                level.insert(legs, parse_rational(&e.value)?);
            }
            store.insert_level(g2, n, level);
        }
        Ok(store)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn json_round_trip() {
        let mut s = CorrelatorStore::new();
        let mut l = Level::new();
        l.insert(vec![(1, 1), (1, 1), (1, 1)], int(1));
        l.insert(vec![(1, 1), (2, 3), (2, 5)], rat(-7, 3));
        s.insert_level(0, 3, l);
        s.insert_level(1, 2, Level::new());
        let text = s.to_json();
        let back = CorrelatorStore::from_json(&text).unwrap();
        assert_eq!(s, back);
        assert_eq!(back.to_json(), text);
        assert_eq!(back.get(0, 3, &[(2, 5), (1, 1), (2, 3)]), rat(-7, 3));
        assert_eq!(back.max_index(2), 5);
        assert!(back.has_level(1, 2));
    }
}
