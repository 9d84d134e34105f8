use std::collections::{BTreeMap, BTreeSet, HashMap};

use feeder_stats::feeder::{Device, EdgeSpec};
use feeder_stats::rng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn edge(p: &str, c: &str, d: Device, load: f64) -> EdgeSpec {
    EdgeSpec {
        parent: p.into(),
        child: c.into(),
        device: d,
        child_load_kwh: load,
    }
}

pub fn random_edges(n: usize, seed: u64) -> Vec<EdgeSpec> {
    let mut r = rng::stream(seed, &[7]);
    let mut edges: Vec<EdgeSpec> = (1..n)
        .map(|i| {
            let parent = r.random_range(0..i);
            let device = match r.random_range(0..4) {
                0 => Device::Fuse,
                1 => Device::Switch,
                _ => Device::None,
            };
            edge(
                &format!("v{parent}"),
                &format!("v{i}"),
                device,
                (r.random::<f64>() * 100.0).round() / 4.0,
            )
        })
        .collect();
    edges.shuffle(&mut r);
    edges
}

fn subtree_sum(children: &HashMap<&str, Vec<&str>>, load: &HashMap<&str, f64>, v: &str) -> f64 {
    load[v]
        + children.get(v).map_or(0.0, |cs| {
            cs.iter().map(|c| subtree_sum(children, load, c)).sum()
        })
}

/// Group assignment by walking up from each vertex to the first device edge.
pub fn brute_groups(edges: &[EdgeSpec]) -> BTreeMap<Option<String>, BTreeSet<String>> {
    let up: HashMap<&str, (&str, Device)> = edges
        .iter()
        .map(|e| (e.child.as_str(), (e.parent.as_str(), e.device)))
        .collect();
    let mut vertices: BTreeSet<&str> = BTreeSet::new();
    for e in edges {
        vertices.insert(&e.parent);
        vertices.insert(&e.child);
    }
    let mut out: BTreeMap<Option<String>, BTreeSet<String>> = BTreeMap::new();
    for v in vertices {
        let mut cur = v;
        let owner = loop {
            match up.get(cur) {
                None => break None,
                Some(&(_, d)) if d != Device::None => break Some(cur.to_string()),
                Some(&(p, _)) => cur = p,
            }
        };
        out.entry(owner).or_default().insert(v.to_string());
    }
    out
}

/// Downstream load below every edge, keyed by child vertex.
pub fn brute_downstream(edges: &[EdgeSpec]) -> HashMap<String, f64> {
    let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut load: HashMap<&str, f64> = HashMap::new();
    for e in edges {
        children.entry(&e.parent).or_default().push(&e.child);
        load.entry(&e.parent).or_insert(0.0);
        load.insert(&e.child, e.child_load_kwh);
    }
    edges
        .iter()
        .map(|e| (e.child.clone(), subtree_sum(&children, &load, &e.child)))
        .collect()
}
