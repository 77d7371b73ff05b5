//! JSON group and subgroup files.
//!
//! ```json
//! {"kind": "cayley", "order": 2, "table": [[0, 1], [1, 0]]}
//! {"kind": "perm", "degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}
//! {"generators": [[1, 0, 2]]}
//! ```
//!
//! Subgroup element specs are row indices of the source table for Cayley
//! groups and 0-based image arrays for permutation groups.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::group::{Backend, Element, FiniteGroup, Subgroup, DEFAULT_ORDER_CAP};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupFile {
    Cayley { order: usize, table: Vec<Vec<usize>> },
    Perm { degree: usize, generators: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Index(usize),
    Image(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupFile {
    pub generators: Vec<ElementSpec>,
}

impl GroupFile {
    pub fn build(&self, order_cap: usize) -> Result<FiniteGroup> {
        match self {
            GroupFile::Cayley { order, table } => {
                if table.len() != *order {
                    return Err(Error::Malformed(format!("table has {} rows, order is {order}", table.len())));
                }
                FiniteGroup::from_cayley_table(table)
            }
            GroupFile::Perm { degree, generators } => FiniteGroup::from_permutations(*degree, generators, order_cap),
        }
    }

    /// Serializable description of a group. Table groups are written in
    /// canonical element order.
    pub fn describe(group: &FiniteGroup) -> GroupFile {
        match group.backend() {
            Backend::Permutation { degree, generators, .. } => {
                GroupFile::Perm { degree: *degree, generators: generators.clone() }
            }
            Backend::Cayley { .. } => GroupFile::Cayley { order: group.order(), table: group.cayley_table() },
        }
    }
}

impl ElementSpec {
    pub fn resolve(&self, group: &FiniteGroup) -> Result<Element> {
        match (self, group.backend()) {
            (ElementSpec::Index(i), Backend::Cayley { .. }) => group.element_of_label(*i),
            (ElementSpec::Index(i), Backend::Permutation { .. }) => group.validate(*i),
            (ElementSpec::Image(p), _) => group.element_of_permutation(p),
        }
    }

    /// Inverse of [`ElementSpec::resolve`].
    pub fn of(group: &FiniteGroup, g: Element) -> ElementSpec {
        match group.backend() {
            Backend::Cayley { labels } => ElementSpec::Index(labels[g]),
            Backend::Permutation { .. } => ElementSpec::Image(group.permutation(g).unwrap()),
        }
    }
}

impl SubgroupFile {
    pub fn resolve(&self, group: &FiniteGroup) -> Result<Subgroup> {
        let gens = self.generators.iter().map(|s| s.resolve(group)).collect::<Result<Vec<_>>>()?;
        Ok(group.closure(gens))
    }

    pub fn describe(h: &Subgroup) -> SubgroupFile {
        SubgroupFile { generators: h.generators().iter().map(|&g| ElementSpec::of(h.group(), g)).collect() }
    }
}

pub fn parse_group(text: &str, order_cap: usize) -> Result<FiniteGroup> {
    serde_json::from_str::<GroupFile>(text)?.build(order_cap)
}

pub fn load_group(path: impl AsRef<Path>) -> Result<FiniteGroup> {
    load_group_with_cap(path, DEFAULT_ORDER_CAP)
}

pub fn load_group_with_cap(path: impl AsRef<Path>, order_cap: usize) -> Result<FiniteGroup> {
    parse_group(&std::fs::read_to_string(path)?, order_cap)
}

/// A path to a group file if one exists, otherwise a catalog spec such as
/// `dihedral(4)`.
pub fn resolve_group(arg: &str, order_cap: usize) -> Result<FiniteGroup> {
    if Path::new(arg).is_file() {
        load_group_with_cap(arg, order_cap)
    } else {
        catalog::parse_spec(arg)
    }
}

pub fn load_subgroup(path: impl AsRef<Path>, group: &FiniteGroup) -> Result<Subgroup> {
    serde_json::from_str::<SubgroupFile>(&std::fs::read_to_string(path)?)?.resolve(group)
}

pub fn group_to_json(group: &FiniteGroup) -> String {
    serde_json::to_string(&GroupFile::describe(group)).expect("group files serialize")
}

pub fn subgroup_to_json(h: &Subgroup) -> String {
    serde_json::to_string(&SubgroupFile::describe(h)).expect("subgroup files serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_file_round_trip() {
        let g = catalog::symmetric(3).unwrap();
        let text = group_to_json(&g);
        assert!(text.contains(r#""kind":"perm""#));
        let back = parse_group(&text, 100).unwrap();
        assert_eq!(back.cayley_table(), g.cayley_table());
    }

    #[test]
    fn cayley_file_with_labels() {
        // identity in row 1
        let g = parse_group(r#"{"kind":"cayley","order":2,"table":[[1,0],[0,1]]}"#, 10).unwrap();
        assert_eq!(g.element_of_label(1).unwrap(), 0);
        let h = serde_json::from_str::<SubgroupFile>(r#"{"generators":[0]}"#).unwrap().resolve(&g).unwrap();
        assert_eq!(h.order(), 2);
        let again = serde_json::from_str::<SubgroupFile>(&subgroup_to_json(&h)).unwrap();
        assert_eq!(again.resolve(&g).unwrap(), h);
    }

    #[test]
    fn subgroup_by_image_array() {
        let g = catalog::symmetric(3).unwrap();
        let h = serde_json::from_str::<SubgroupFile>(r#"{"generators":[[1,2,0]]}"#).unwrap().resolve(&g).unwrap();
        assert_eq!(h.order(), 3);
    }

    #[test]
    fn malformed_files() {
        assert!(parse_group(r#"{"kind":"cayley","order":3,"table":[[0,1],[1,0]]}"#, 10).is_err());
        assert!(parse_group(r#"{"kind":"matrix"}"#, 10).is_err());
        assert!(parse_group(r#"{"kind":"perm","degree":3,"generators":[[0,0,1]]}"#, 10).is_err());
        let g = catalog::cyclic(3).unwrap();
        assert!(ElementSpec::Image(vec![1, 0, 2]).resolve(&g).is_err());
    }
}
