use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::perturb::EvolutionTree;
use crate::text::InstanceId;

use super::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DatasetName {
    S,
    M,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Val,
    Test,
}

impl FromStr for DatasetName {
    type Err = StoreError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "S" | "s" => Ok(Self::S),
            "M" | "m" => Ok(Self::M),
            "L" | "l" => Ok(Self::L),
            _ => Err(StoreError::UnknownSplit(format!("dataset {s:?}"))),
        }
    }
}

impl FromStr for SplitName {
    type Err = StoreError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Self::Train),
            "val" | "valid" | "validation" => Ok(Self::Val),
            "test" => Ok(Self::Test),
            _ => Err(StoreError::UnknownSplit(format!("split {s:?}"))),
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitName::Train => "train",
            SplitName::Val => "val",
            SplitName::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAllocation {
    pub dataset: DatasetName,
    pub split: SplitName,
    pub ids: Vec<InstanceId>,
}

/// Contents of `splits.json`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub allocations: Vec<SplitAllocation>,
}

impl Splits {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        if !path.exists() {
            return Ok(Self::default());
        }
        let bytes = std::fs::read(path).map_err(|e| StoreError::io(path, e))?;
        serde_json::from_slice(&bytes).map_err(|e| StoreError::Serialize(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(|e| StoreError::Serialize(e.to_string()))?;
        bytes.push(b'\n');
        super::write_atomic(path.as_ref(), &bytes)
    }

    pub fn ids(&self, dataset: Option<DatasetName>, split: Option<SplitName>) -> BTreeSet<InstanceId> {
        self.allocations
            .iter()
            .filter(|a| dataset.is_none_or(|d| a.dataset == d) && split.is_none_or(|s| a.split == s))
            .flat_map(|a| a.ids.iter().copied())
            .collect()
    }

    /// Splits of one dataset are disjoint, and no family (as given by
    /// `family_of`) has members in both train and test.
    pub fn validate(&self, family_of: impl Fn(InstanceId) -> Option<InstanceId>) -> Result<(), StoreError> {
        let mut seen: BTreeMap<(DatasetName, InstanceId), SplitName> = BTreeMap::new();
        let mut families: BTreeMap<(DatasetName, InstanceId), BTreeSet<SplitName>> = BTreeMap::new();
        for a in &self.allocations {
            for &id in &a.ids {
                if let Some(prev) = seen.insert((a.dataset, id), a.split) {
                    if prev != a.split {
                        return Err(StoreError::SplitConflict(format!("{id} is in both {prev} and {} of {}", a.split, a.dataset)));
                    }
                }
                let family = family_of(id).ok_or_else(|| StoreError::SplitConflict(format!("{id} is not a known instance")))?;
                families.entry((a.dataset, family)).or_default().insert(a.split);
            }
        }
        for ((dataset, family), splits) in families {
            if splits.contains(&SplitName::Train) && splits.contains(&SplitName::Test) {
                return Err(StoreError::SplitConflict(format!("family of {family} straddles train and test in {dataset}")));
            }
        }
        Ok(())
    }
}

/// Allocates whole families by seed ordinal: seeds sorted by id are
/// numbered from 1 and each `(split, range)` claims the families of the
/// seeds in `range`.
pub fn allocate_families(tree: &EvolutionTree, dataset: DatasetName, plan: &[(SplitName, RangeInclusive<usize>)]) -> Vec<SplitAllocation> {
    let seeds: Vec<InstanceId> = tree.nodes().filter(|n| n.instance.is_seed()).map(|n| n.id()).collect();
    let mut members: BTreeMap<InstanceId, Vec<InstanceId>> = BTreeMap::new();
    for node in tree.nodes() {
        if let Ok(root) = tree.root_of(node.id()) {
            members.entry(root).or_default().push(node.id());
        }
    }
    plan.iter()
        .map(|(split, range)| {
            let ids = seeds
                .iter()
                .enumerate()
                .filter(|(i, _)| range.contains(&(i + 1)))
                .flat_map(|(_, s)| members.get(s).cloned().unwrap_or_default())
                .collect();
            SplitAllocation { dataset, split: *split, ids }
        })
        .collect()
}
