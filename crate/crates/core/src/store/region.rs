use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use super::read_lines;
use crate::error::{Error, Result};
use crate::text::normalize;

/// Parent/child hierarchy of anatomical regions ("腹股沟" under "下肢").
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegionTree {
    nodes: BTreeSet<String>,
    parent: BTreeMap<String, String>,
}

impl RegionTree {
    /// Builds a tree from `(child, parent)` edges, rejecting cycles and
    /// nodes with more than one parent.
    pub fn from_edges<I, S>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut tree = RegionTree::default();
        for (i, (child, parent)) in edges.into_iter().enumerate() {
            tree.add_edge(Path::new("<memory>"), i + 1, child.as_ref(), parent.as_ref())?;
        }
        tree.check_acyclic()?;
        Ok(tree)
    }

    fn add_edge(&mut self, path: &Path, line: usize, child: &str, parent: &str) -> Result<()> {
        let child = normalize(child);
        let parent = normalize(parent);
        if child.is_empty() || parent.is_empty() {
            return Err(Error::EmptyField {
                path: PathBuf::from(path),
                line,
                field: "region",
            });
        }
        if child == parent {
            return Err(Error::RegionCycle(child));
        }
        if let Some(existing) = self.parent.get(&child) {
            if *existing != parent {
                return Err(Error::MultipleParents {
                    path: path.into(),
                    line,
                    child,
                    first: existing.clone(),
                    second: parent,
                });
            }
            return Ok(());
        }
        self.nodes.insert(child.clone());
        self.nodes.insert(parent.clone());
        self.parent.insert(child, parent);
        Ok(())
    }

    fn check_acyclic(&self) -> Result<()> {
        // With at most one parent per node, a cycle shows up as a walk that
        // revisits a node before reaching a root.
        let mut cleared: BTreeSet<&str> = BTreeSet::new();
        for start in &self.nodes {
            let mut seen: BTreeSet<&str> = BTreeSet::new();
            let mut cur = start.as_str();
            loop {
                if cleared.contains(cur) {
                    break;
                }
                if !seen.insert(cur) {
                    return Err(Error::RegionCycle(cur.to_string()));
                }
                match self.parent.get(cur) {
                    Some(p) => cur = p,
                    None => break,
                }
            }
            cleared.extend(seen);
        }
        Ok(())
    }

    pub fn nodes(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn parent(&self, node: &str) -> Option<&str> {
        self.parent.get(node).map(String::as_str)
    }

    /// Strict ancestors of `node`, nearest first.
    pub fn ancestors(&self, node: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(p) = self.parent.get(cur) {
            out.push(p.as_str());
            cur = p;
        }
        out
    }

    /// True iff `big` is a strict ancestor of `small`. Unknown nodes give false.
    pub fn is_ancestor_region(&self, big: &str, small: &str) -> bool {
        self.ancestors(small).contains(&big)
    }
}

/// Loads `child<TAB>parent` edges.
pub fn load_region_tree(path: impl AsRef<Path>) -> Result<RegionTree> {
    let path = path.as_ref();
    let mut tree = RegionTree::default();
    for (line_no, line) in read_lines(path)? {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::malformed(
                path,
                line_no,
                format!("expected `child<TAB>parent`, found {} field(s)", fields.len()),
            ));
        }
        tree.add_edge(path, line_no, fields[0], fields[1])?;
    }
    tree.check_acyclic()?;
    Ok(tree)
}
