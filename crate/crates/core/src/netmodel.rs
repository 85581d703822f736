//! Directed acyclic multigraph networks and the two problem kinds built on them:
//! multiple-unicast network coding instances and single-source single-terminal
//! network error correction (NEC) instances.
//!
//! Edges are identified by their position in the input edge list, never by
//! endpoint pair, so parallel edges are first-class. Edge order also fixes the
//! argument order of every local encoding function.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// An edge as written in a network description file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub capacity: i64,
}

impl EdgeSpec {
    pub fn new(id: impl Into<String>, tail: impl Into<String>, head: impl Into<String>, capacity: i64) -> Self {
        EdgeSpec {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            capacity,
        }
    }
}

/// Raw node and edge lists, prior to validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: u32,
}

/// A validated acyclic multigraph. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    node_index: HashMap<String, NodeId>,
    edge_index: HashMap<String, EdgeId>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
    topo: Vec<NodeId>,
    edge_order: Vec<EdgeId>,
}

/// Checks acyclicity, capacity positivity and endpoint membership, returning a
/// topological node order on success.
pub fn validate_network(spec: &NetworkSpec) -> Result<Vec<String>> {
    let net = Network::from_spec(spec)?;
    Ok(net.topo.iter().map(|&v| net.nodes[v.0].clone()).collect())
}

impl Network {
    pub fn from_spec(spec: &NetworkSpec) -> Result<Self> {
        Self::new(spec.nodes.clone(), spec.edges.clone())
    }

    pub fn new(nodes: Vec<String>, edges: Vec<EdgeSpec>) -> Result<Self> {
        let mut node_index = HashMap::with_capacity(nodes.len());
        for (i, name) in nodes.iter().enumerate() {
            if node_index.insert(name.clone(), NodeId(i)).is_some() {
                return Err(Error::DuplicateId {
                    kind: "node",
                    id: name.clone(),
                });
            }
        }

        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut resolved = Vec::with_capacity(edges.len());
        let mut in_edges = vec![Vec::new(); nodes.len()];
        let mut out_edges = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.into_iter().enumerate() {
            let lookup = |n: &str| {
                node_index.get(n).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: e.id.clone(),
                    node: n.to_string(),
                })
            };
            let tail = lookup(&e.tail)?;
            let head = lookup(&e.head)?;
            if e.capacity < 1 || e.capacity > u32::MAX as i64 {
                return Err(Error::NonPositiveCapacity {
                    edge: e.id,
                    capacity: e.capacity,
                });
            }
            if edge_index.insert(e.id.clone(), EdgeId(i)).is_some() {
                return Err(Error::DuplicateId { kind: "edge", id: e.id });
            }
            out_edges[tail.0].push(EdgeId(i));
            in_edges[head.0].push(EdgeId(i));
            resolved.push(Edge {
                name: e.id,
                tail,
                head,
                capacity: e.capacity as u32,
            });
        }

        let mut net = Network {
            nodes,
            edges: resolved,
            node_index,
            edge_index,
            in_edges,
            out_edges,
            topo: Vec::new(),
            edge_order: Vec::new(),
        };
        net.topo = net.topological_order()?;
        let mut pos = vec![0usize; net.nodes.len()];
        for (i, v) in net.topo.iter().enumerate() {
            pos[v.0] = i;
        }
        let mut order: Vec<EdgeId> = (0..net.edges.len()).map(EdgeId).collect();
        order.sort_by_key(|e| (pos[net.edges[e.0].tail.0], e.0));
        net.edge_order = order;
        Ok(net)
    }

    /// Kahn's algorithm, always releasing the lowest-indexed ready node first.
    fn topological_order(&self) -> Result<Vec<NodeId>> {
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = indeg
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| Reverse(i))
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(Reverse(v)) = ready.pop() {
            order.push(NodeId(v));
            for &e in &self.out_edges[v] {
                let h = self.edges[e.0].head.0;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.push(Reverse(h));
                }
            }
        }
        if order.len() == self.nodes.len() {
            return Ok(order);
        }
        Err(Error::Cycle {
            nodes: self.find_cycle(&indeg),
        })
    }

    /// Walks backwards along in-edges among the nodes Kahn could not release.
    /// Every such node has a remaining predecessor, so the walk must revisit.
    fn find_cycle(&self, indeg: &[usize]) -> Vec<String> {
        let stuck = |v: usize| indeg[v] > 0;
        let start = (0..self.nodes.len()).find(|&v| stuck(v)).expect("cycle exists");
        let mut seen = vec![usize::MAX; self.nodes.len()];
        let mut path = Vec::new();
        let mut v = start;
        while seen[v] == usize::MAX {
            seen[v] = path.len();
            path.push(v);
            v = self.in_edges[v]
                .iter()
                .map(|e| self.edges[e.0].tail.0)
                .find(|&u| stuck(u))
                .expect("stuck node has a stuck predecessor");
        }
        let mut cycle: Vec<usize> = path[seen[v]..].to_vec();
        cycle.reverse();
        cycle.push(cycle[0]);
        cycle.into_iter().map(|v| self.nodes[v].clone()).collect()
    }

    /// Re-derives the topological order; it is fixed at construction, so this only
    /// returns it.
    pub fn validate(&self) -> Result<Vec<NodeId>> {
        Ok(self.topo.clone())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_name(&self, v: NodeId) -> &str {
        &self.nodes[v.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn node(&self, name: &str) -> Result<NodeId> {
        self.node_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(name.to_string()))
    }

    pub fn in_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.in_edges[v.0]
    }

    pub fn out_edges(&self, v: NodeId) -> &[EdgeId] {
        &self.out_edges[v.0]
    }

    pub fn topo_order(&self) -> &[NodeId] {
        &self.topo
    }

    /// Edges sorted so that every edge follows all in-edges of its tail.
    pub fn edge_order(&self) -> &[EdgeId] {
        &self.edge_order
    }

    pub fn capacity(&self, e: EdgeId) -> u32 {
        self.edges[e.0].capacity
    }

    pub fn to_spec(&self) -> NetworkSpec {
        NetworkSpec {
            nodes: self.nodes.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.name.clone(),
                    tail: self.nodes[e.tail.0].clone(),
                    head: self.nodes[e.head.0].clone(),
                    capacity: e.capacity as i64,
                })
                .collect(),
        }
    }

    /// Nodes reachable from `from` without using edges in `removed`.
    fn reachable(&self, from: NodeId, removed: impl Fn(EdgeId) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([from]);
        seen[from.0] = true;
        while let Some(v) = queue.pop_front() {
            for &e in &self.out_edges[v.0] {
                let h = self.edges[e.0].head;
                if !removed(e) && !seen[h.0] {
                    seen[h.0] = true;
                    queue.push_back(h);
                }
            }
        }
        seen
    }
}

/// One source-terminal pair of a multiple-unicast instance. Pair `i` is also
/// source slot `i`: terminal `t_i` must recover the message of slot `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub source: NodeId,
    pub terminal: NodeId,
}

#[derive(Debug, Clone)]
pub struct MultipleUnicastInstance {
    pub network: Network,
    pairs: Vec<Pair>,
}

impl MultipleUnicastInstance {
    pub fn new(network: Network, pairs: Vec<Pair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInstance("no source-terminal pairs".into()));
        }
        for p in &pairs {
            for v in [p.source, p.terminal] {
                if v.0 >= network.node_count() {
                    return Err(Error::UnknownNode(v.to_string()));
                }
            }
        }
        Ok(MultipleUnicastInstance { network, pairs })
    }

    pub fn from_names(network: Network, pairs: &[(&str, &str)]) -> Result<Self> {
        let pairs = pairs
            .iter()
            .map(|(s, t)| {
                Ok(Pair {
                    source: network.node(s)?,
                    terminal: network.node(t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(network, pairs)
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// The requirement map s(t) as a permutation: `requirement()[i] = i`, since
    /// pair `i` pairs terminal slot `i` with source slot `i`.
    pub fn required_source(&self, pair: usize) -> usize {
        pair
    }
}

#[derive(Debug, Clone)]
pub struct NecInstance {
    pub network: Network,
    pub source: NodeId,
    pub terminal: NodeId,
    adversary_class: Vec<Vec<EdgeId>>,
}

impl NecInstance {
    pub fn new(network: Network, source: NodeId, terminal: NodeId, adversary_class: Vec<Vec<EdgeId>>) -> Result<Self> {
        for v in [source, terminal] {
            if v.0 >= network.node_count() {
                return Err(Error::UnknownNode(v.to_string()));
            }
        }
        if source == terminal {
            return Err(Error::InvalidInstance("source and terminal coincide".into()));
        }
        for set in &adversary_class {
            if set.is_empty() {
                return Err(Error::InvalidInstance("empty set in adversary class".into()));
            }
            let distinct: BTreeSet<_> = set.iter().collect();
            if distinct.len() != set.len() {
                return Err(Error::InvalidInstance("repeated edge inside an adversary set".into()));
            }
            if let Some(e) = set.iter().find(|e| e.0 >= network.edge_count()) {
                return Err(Error::UnknownEdge(e.to_string()));
            }
        }
        Ok(NecInstance {
            network,
            source,
            terminal,
            adversary_class,
        })
    }

    pub fn adversary_class(&self) -> &[Vec<EdgeId>] {
        &self.adversary_class
    }

    /// Every edge that appears in some adversary set, in edge order.
    pub fn attackable_edges(&self) -> Vec<EdgeId> {
        let set: BTreeSet<EdgeId> = self.adversary_class.iter().flatten().copied().collect();
        set.into_iter().collect()
    }
}

/// Total capacity of edges leaving `part`. `part` must hold `source` and must
/// not hold `sink`.
pub fn cut_capacity(net: &Network, part: &BTreeSet<NodeId>, source: NodeId, sink: NodeId) -> Result<u64> {
    if !part.contains(&source) {
        return Err(Error::Precondition(format!(
            "cut side does not contain source `{}`",
            net.node_name(source)
        )));
    }
    if part.contains(&sink) {
        return Err(Error::Precondition(format!(
            "cut side contains sink `{}`",
            net.node_name(sink)
        )));
    }
    Ok(net
        .edges
        .iter()
        .filter(|e| part.contains(&e.tail) && !part.contains(&e.head))
        .map(|e| e.capacity as u64)
        .sum())
}

/// Tightest cut-set bound on the common rate R of all pairs: the minimum over
/// every edge subset C that separates at least one pair of
/// `capacity(C) / #pairs separated by C`. Enumerates all 2^|E| subsets and
/// refuses networks with more than `max_edges` edges.
pub fn cutset_rate_bound(inst: &MultipleUnicastInstance, max_edges: usize) -> Result<Rational> {
    let pairs: Vec<(NodeId, NodeId)> = inst.pairs.iter().map(|p| (p.source, p.terminal)).collect();
    cutset_bound(&inst.network, &pairs, max_edges)
}

pub fn cutset_bound(net: &Network, pairs: &[(NodeId, NodeId)], max_edges: usize) -> Result<Rational> {
    let m = net.edge_count();
    if m > max_edges || m >= 63 {
        return Err(Error::limit("max cut edges", m as u128, max_edges as u64));
    }
    let mut best: Option<Rational> = None;
    for mask in 0u64..(1u64 << m) {
        let removed = |e: EdgeId| mask >> e.0 & 1 == 1;
        let mut separated = 0u64;
        let mut reach_cache: HashMap<NodeId, Vec<bool>> = HashMap::new();
        for &(s, t) in pairs {
            let reach = reach_cache.entry(s).or_insert_with(|| net.reachable(s, removed));
            if !reach[t.0] {
                separated += 1;
            }
        }
        if separated == 0 {
            continue;
        }
        let cap: u64 = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| net.edges[i].capacity as u64).sum();
        let r = Rational::new(cap, separated);
        if best.is_none_or(|b| r < b) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::InvalidInstance("no edge cut separates any pair".into()))
}

/// Minimum s-t cut capacity by Edmonds-Karp max-flow. Exact at any scale; used
/// for single-pair bounds and to cross-check the exhaustive enumeration.
pub fn min_cut_capacity(net: &Network, s: NodeId, t: NodeId) -> u64 {
    // residual arcs: 2j forward along edge j, 2j+1 backward
    let m = net.edge_count();
    let mut residual: Vec<u64> = Vec::with_capacity(2 * m);
    for e in &net.edges {
        residual.push(e.capacity as u64);
        residual.push(0);
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); net.node_count()];
    for (j, e) in net.edges.iter().enumerate() {
        adj[e.tail.0].push(2 * j);
        adj[e.head.0].push(2 * j + 1);
    }
    let arc_head = |a: usize| {
        let e = &net.edges[a / 2];
        if a.is_multiple_of(2) {
            e.head
        } else {
            e.tail
        }
    };
    let mut flow = 0u64;
    loop {
        let mut via: Vec<Option<usize>> = vec![None; net.node_count()];
        let mut seen = vec![false; net.node_count()];
        seen[s.0] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &a in &adj[v.0] {
                let h = arc_head(a);
                if residual[a] > 0 && !seen[h.0] {
                    seen[h.0] = true;
                    via[h.0] = Some(a);
                    queue.push_back(h);
                }
            }
        }
        if !seen[t.0] {
            return flow;
        }
        let mut push = u64::MAX;
        let mut v = t;
        while let Some(a) = via[v.0] {
            push = push.min(residual[a]);
            v = arc_head(a ^ 1);
        }
        let mut v = t;
        while let Some(a) = via[v.0] {
            residual[a] -= push;
            residual[a ^ 1] += push;
            v = arc_head(a ^ 1);
        }
        flow += push;
    }
}


#[cfg(test)]
pub(crate) use tests::relay_inner;
