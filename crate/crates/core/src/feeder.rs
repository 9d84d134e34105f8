//! Radial feeder trees with protective devices on edges.
//!
//! Every non-root vertex has exactly one parent edge, so an edge is identified
//! by its child vertex. A load belongs to the group of the nearest protective
//! device on its path to the root; loads with no device above them form the
//! residual root group.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Device {
    Fuse,
    Switch,
    None,
}

impl Device {
    pub fn is_protective(self) -> bool {
        !matches!(self, Device::None)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fuse" => Ok(Device::Fuse),
            "switch" => Ok(Device::Switch),
            "none" | "" => Ok(Device::None),
            other => Err(Error::InvalidParameter(format!(
                "unknown device kind {other:?}"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Device::Fuse => "fuse",
            Device::Switch => "switch",
            Device::None => "none",
        }
    }
}

/// One edge of the input edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub parent: String,
    pub child: String,
    pub device: Device,
    pub child_load_kwh: f64,
}

#[derive(Debug, Clone)]
struct Node {
    name: String,
    load: f64,
    parent: Option<usize>,
    device: Device,
    children: Vec<usize>,
}

/// Validated feeder tree. The root carries no load.
#[derive(Debug, Clone)]
pub struct FeederTree {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    root: usize,
    /// Vertex indices in depth-first preorder from the root.
    preorder: Vec<usize>,
}

impl FeederTree {
    /// Builds a tree from an edge list. Fails unless the edges form a single
    /// connected, acyclic tree with one root.
    pub fn from_edges(edges: &[EdgeSpec]) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidTree("edge list is empty".into()));
        }
        let mut nodes: Vec<Node> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |name: &str, nodes: &mut Vec<Node>| -> usize {
            *index.entry(name.to_string()).or_insert_with(|| {
                nodes.push(Node {
                    name: name.to_string(),
                    load: 0.0,
                    parent: None,
                    device: Device::None,
                    children: Vec::new(),
                });
                nodes.len() - 1
            })
        };
        for e in edges {
            if !(e.child_load_kwh.is_finite() && e.child_load_kwh >= 0.0) {
                return Err(Error::InvalidTree(format!(
                    "load of {} must be finite and non-negative, got {}",
                    e.child, e.child_load_kwh
                )));
            }
            if e.parent == e.child {
                return Err(Error::InvalidTree(format!("self loop at {}", e.child)));
            }
            let p = intern(&e.parent, &mut nodes);
            let c = intern(&e.child, &mut nodes);
            if nodes[c].parent.is_some() {
                return Err(Error::InvalidTree(format!(
                    "{} has two parent edges",
                    e.child
                )));
            }
            nodes[c].parent = Some(p);
            nodes[c].device = e.device;
            nodes[c].load = e.child_load_kwh;
            nodes[p].children.push(c);
        }
        let index: HashMap<String, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.name.clone(), i))
            .collect();
        let roots: Vec<usize> = (0..nodes.len())
            .filter(|&i| nodes[i].parent.is_none())
            .collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => {
                return Err(Error::InvalidTree(
                    "no root: every vertex has a parent".into(),
                ))
            }
            many => {
                let names: Vec<&str> = many.iter().map(|&i| nodes[i].name.as_str()).collect();
                return Err(Error::InvalidTree(format!(
                    "multiple roots: {}",
                    names.join(", ")
                )));
            }
        };
        // children in name order so traversal does not depend on input order
        for i in 0..nodes.len() {
            let mut ch = std::mem::take(&mut nodes[i].children);
            ch.sort_by(|&a, &b| nodes[a].name.cmp(&nodes[b].name));
            nodes[i].children = ch;
        }
        let mut preorder = Vec::with_capacity(nodes.len());
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            preorder.push(v);
            stack.extend(nodes[v].children.iter().rev());
        }
        if preorder.len() != nodes.len() {
            return Err(Error::InvalidTree(
                "graph is not connected to the root (cycle detached from the tree)".into(),
            ));
        }
        Ok(Self {
            nodes,
            index,
            root,
            preorder,
        })
    }

    pub fn root(&self) -> &str {
        &self.nodes[self.root].name
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_load(&self) -> f64 {
        self.nodes.iter().map(|n| n.load).sum()
    }

    pub fn load(&self, vertex: &str) -> Option<f64> {
        self.index.get(vertex).map(|&i| self.nodes[i].load)
    }

    pub fn children(&self, vertex: &str) -> Option<Vec<&str>> {
        self.index.get(vertex).map(|&i| {
            self.nodes[i]
                .children
                .iter()
                .map(|&c| self.nodes[c].name.as_str())
                .collect()
        })
    }

    /// Edges as `(parent, child, device)` in preorder.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, Device)> {
        self.preorder.iter().filter_map(move |&v| {
            let n = &self.nodes[v];
            n.parent
                .map(|p| (self.nodes[p].name.as_str(), n.name.as_str(), n.device))
        })
    }

    fn edge_index(&self, child: &str) -> Result<usize> {
        match self.index.get(child) {
            Some(&i) if i != self.root => Ok(i),
            _ => Err(Error::NotFound(format!("no edge into vertex {child:?}"))),
        }
    }

    /// Sum of loads in the subtree below the edge into `child`.
    pub fn downstream_load(&self, child: &str) -> Result<f64> {
        let start = self.edge_index(child)?;
        let mut total = 0.0;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            total += self.nodes[v].load;
            stack.extend(&self.nodes[v].children);
        }
        Ok(total)
    }

    /// Partition of all vertices by nearest protective device above them.
    /// The residual root group comes first, then device groups by edge name.
    pub fn group_by_device(&self) -> Vec<DeviceGroup> {
        // owner[v] = child index of the governing device edge, None for the root group
        let mut owner: Vec<Option<usize>> = vec![None; self.nodes.len()];
        for &v in &self.preorder {
            let n = &self.nodes[v];
            owner[v] = match n.parent {
                None => None,
                Some(_) if n.device.is_protective() => Some(v),
                Some(p) => owner[p],
            };
        }
        let mut groups: BTreeMap<Option<String>, DeviceGroup> = BTreeMap::new();
        for (v, n) in self.nodes.iter().enumerate() {
            let key = owner[v].map(|e| self.nodes[e].name.clone());
            let g = groups.entry(key).or_insert_with(|| match owner[v] {
                None => DeviceGroup {
                    device_edge: None,
                    device: Device::None,
                    member_vertices: BTreeSet::new(),
                    total_load: 0.0,
                },
                Some(e) => {
                    let en = &self.nodes[e];
                    DeviceGroup {
                        device_edge: Some(EdgeRef {
                            parent: self.nodes[en.parent.expect("device edge has parent")]
                                .name
                                .clone(),
                            child: en.name.clone(),
                        }),
                        device: en.device,
                        member_vertices: BTreeSet::new(),
                        total_load: 0.0,
                    }
                }
            });
            g.member_vertices.insert(n.name.clone());
        }
        // sum in sorted member order so totals do not depend on input order
        let mut out: Vec<DeviceGroup> = groups.into_values().collect();
        for g in &mut out {
            g.total_load = g
                .member_vertices
                .iter()
                .map(|m| self.nodes[self.index[m]].load)
                .sum();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeRef {
    pub parent: String,
    pub child: String,
}

impl std::fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.parent, self.child)
    }
}

/// Loads disconnected first by one protective device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceGroup {
    /// `None` for the residual root group.
    pub device_edge: Option<EdgeRef>,
    pub device: Device,
    pub member_vertices: BTreeSet<String>,
    pub total_load: f64,
}

impl DeviceGroup {
    pub fn label(&self) -> String {
        self.device_edge.as_ref().map_or_else(
            || crate::io::ROOT_GROUP_LABEL.to_string(),
            ToString::to_string,
        )
    }
}
