//! The reduction gadget: wraps a multiple-unicast network `N` with `k`
//! branches so that a single source `s` must reach a single terminal `t`
//! while one edge outside `{a_i, b_i}` may be jammed.
//!
//! Branch `i` consists of nodes `A_i`, `B_i` and unit-capacity edges
//!
//! ```text
//! a_i : s   -> A_i        x_i, y_i : A_i -> B_i
//! z_i : A_i -> s_i        z'_i     : t_i -> B_i
//! b_i : B_i -> t
//! ```
//!
//! `x_i` and `y_i` are parallel edges.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::codeeval::{expand_truth_table, tabulate, ArgPlan, CodedInstance, Evaluator, LocalFunction, NetworkCode};
use crate::error::{Error, Result};
use crate::netmodel::{EdgeId, EdgeSpec, MultipleUnicastInstance, NecInstance, Network, NodeId, Pair};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchRoles {
    pub a: EdgeId,
    pub x: EdgeId,
    pub y: EdgeId,
    pub z: EdgeId,
    pub zp: EdgeId,
    pub b: EdgeId,
    pub a_node: NodeId,
    pub b_node: NodeId,
    /// `s_i` and `t_i`, as nodes of the gadget network.
    pub source: NodeId,
    pub terminal: NodeId,
}

impl BranchRoles {
    pub fn gadget_edges(&self) -> [EdgeId; 6] {
        [self.a, self.x, self.y, self.z, self.zp, self.b]
    }
}

/// File form of one branch's roles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleNames {
    pub a: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub zp: String,
    pub b: String,
    #[serde(rename = "A")]
    pub a_node: String,
    #[serde(rename = "B")]
    pub b_node: String,
    pub s: String,
    pub t: String,
}

#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub nec: NecInstance,
    pub provenance: MultipleUnicastInstance,
    pub branches: Vec<BranchRoles>,
    /// Gadget id of provenance edge `j`.
    pub inner_edges: Vec<EdgeId>,
    /// Gadget id of provenance node `j`.
    pub inner_nodes: Vec<NodeId>,
}

fn fresh(base: String, taken: &mut HashSet<String>) -> String {
    let mut name = base.clone();
    let mut i = 1;
    while taken.contains(&name) {
        name = format!("{base}~{i}");
        i += 1;
    }
    taken.insert(name.clone());
    name
}

/// Builds the gadget around `inst`. `N` is embedded unchanged, node and edge
/// names included; gadget elements that would collide with names in `N` get a
/// `~j` suffix.
pub fn build_gadget(inst: &MultipleUnicastInstance) -> Result<GadgetInstance> {
    let n_net = &inst.network;
    let k = inst.k();
    let mut node_names: HashSet<String> = n_net.node_names().iter().cloned().collect();
    let mut edge_names: HashSet<String> = n_net.edges().iter().map(|e| e.name.clone()).collect();

    let mut spec = n_net.to_spec();
    let s = fresh("s".into(), &mut node_names);
    let t = fresh("t".into(), &mut node_names);
    spec.nodes.push(s.clone());
    spec.nodes.push(t.clone());
    let mut branch_nodes = Vec::with_capacity(k);
    for i in 1..=k {
        let a = fresh(format!("A.{i}"), &mut node_names);
        let b = fresh(format!("B.{i}"), &mut node_names);
        spec.nodes.push(a.clone());
        spec.nodes.push(b.clone());
        branch_nodes.push((a, b));
    }
    for (i, pair) in inst.pairs().iter().enumerate() {
        let (an, bn) = &branch_nodes[i];
        let si = n_net.node_name(pair.source).to_string();
        let ti = n_net.node_name(pair.terminal).to_string();
        let idx = i + 1;
        let mut edge = |role: &str, tail: &str, head: &str| {
            let id = fresh(format!("{role}.{idx}"), &mut edge_names);
            spec.edges.push(EdgeSpec::new(id, tail, head, 1));
        };
        edge("a", &s, an);
        edge("x", an, bn);
        edge("y", an, bn);
        edge("z", an, &si);
        edge("zp", &ti, bn);
        edge("b", bn, &t);
    }

    let network = Network::from_spec(&spec)?;
    let base = n_net.edge_count();
    let branches: Vec<BranchRoles> = (0..k)
        .map(|i| {
            let e = |j: usize| EdgeId(base + 6 * i + j);
            BranchRoles {
                a: e(0),
                x: e(1),
                y: e(2),
                z: e(3),
                zp: e(4),
                b: e(5),
                a_node: NodeId(n_net.node_count() + 2 + 2 * i),
                b_node: NodeId(n_net.node_count() + 3 + 2 * i),
                source: inst.pairs()[i].source,
                terminal: inst.pairs()[i].terminal,
            }
        })
        .collect();
    let protected: BTreeSet<EdgeId> = branches.iter().flat_map(|b| [b.a, b.b]).collect();
    let class = network
        .edge_ids()
        .filter(|e| !protected.contains(e))
        .map(|e| vec![e])
        .collect();
    let source = NodeId(n_net.node_count());
    let terminal = NodeId(n_net.node_count() + 1);
    let nec = NecInstance::new(network, source, terminal, class)?;
    let g = GadgetInstance {
        nec,
        provenance: inst.clone(),
        branches,
        inner_edges: (0..base).map(EdgeId).collect(),
        inner_nodes: (0..n_net.node_count()).map(NodeId).collect(),
    };
    g.check_structure()?;
    Ok(g)
}

impl GadgetInstance {
    pub fn k(&self) -> usize {
        self.branches.len()
    }

    pub fn network(&self) -> &Network {
        &self.nec.network
    }

    /// Rebuilds a gadget from an NEC instance plus its branch roles, recovering
    /// `N` as everything that is not a gadget element.
    pub fn from_roles(nec: NecInstance, branches: Vec<BranchRoles>) -> Result<Self> {
        let net = &nec.network;
        let mut gadget_nodes: BTreeSet<NodeId> = [nec.source, nec.terminal].into();
        let mut gadget_edges: BTreeSet<EdgeId> = BTreeSet::new();
        for b in &branches {
            gadget_nodes.extend([b.a_node, b.b_node]);
            gadget_edges.extend(b.gadget_edges());
        }
        let inner_nodes: Vec<NodeId> = net.nodes().filter(|v| !gadget_nodes.contains(v)).collect();
        let inner_edges: Vec<EdgeId> = net.edge_ids().filter(|e| !gadget_edges.contains(e)).collect();
        for &e in &inner_edges {
            let edge = net.edge(e);
            if gadget_nodes.contains(&edge.tail) || gadget_nodes.contains(&edge.head) {
                return Err(Error::NotGadget(format!(
                    "edge `{}` touches a gadget node but has no branch role",
                    edge.name
                )));
            }
        }
        let node_map: BTreeMap<NodeId, NodeId> = inner_nodes.iter().enumerate().map(|(j, &v)| (v, NodeId(j))).collect();
        let spec_edges = inner_edges
            .iter()
            .map(|&e| {
                let edge = net.edge(e);
                EdgeSpec::new(
                    edge.name.clone(),
                    net.node_name(edge.tail),
                    net.node_name(edge.head),
                    edge.capacity as i64,
                )
            })
            .collect();
        let inner = Network::new(
            inner_nodes.iter().map(|&v| net.node_name(v).to_string()).collect(),
            spec_edges,
        )?;
        let pairs = branches
            .iter()
            .map(|b| {
                let lookup = |v: NodeId| {
                    node_map
                        .get(&v)
                        .copied()
                        .ok_or_else(|| Error::NotGadget(format!("branch endpoint `{}` is not in N", net.node_name(v))))
                };
                Ok(Pair {
                    source: lookup(b.source)?,
                    terminal: lookup(b.terminal)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let provenance = MultipleUnicastInstance::new(inner, pairs)?;
        let g = GadgetInstance {
            nec,
            provenance,
            branches,
            inner_edges,
            inner_nodes,
        };
        g.check_structure()?;
        Ok(g)
    }

    pub fn from_role_names(nec: NecInstance, roles: &BTreeMap<String, RoleNames>) -> Result<Self> {
        let net = &nec.network;
        let mut indexed: Vec<(usize, &RoleNames)> = roles
            .iter()
            .map(|(i, r)| {
                i.parse::<usize>()
                    .map(|i| (i, r))
                    .map_err(|_| Error::NotGadget(format!("branch index `{i}` is not an integer")))
            })
            .collect::<Result<_>>()?;
        indexed.sort_by_key(|(i, _)| *i);
        if indexed.iter().enumerate().any(|(j, (i, _))| *i != j + 1) {
            return Err(Error::NotGadget("branch indices must be 1..k".into()));
        }
        let branches = indexed
            .into_iter()
            .map(|(_, r)| {
                Ok(BranchRoles {
                    a: net.edge_id(&r.a)?,
                    x: net.edge_id(&r.x)?,
                    y: net.edge_id(&r.y)?,
                    z: net.edge_id(&r.z)?,
                    zp: net.edge_id(&r.zp)?,
                    b: net.edge_id(&r.b)?,
                    a_node: net.node(&r.a_node)?,
                    b_node: net.node(&r.b_node)?,
                    source: net.node(&r.s)?,
                    terminal: net.node(&r.t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_roles(nec, branches)
    }

    pub fn role_names(&self) -> BTreeMap<String, RoleNames> {
        let net = self.network();
        self.branches
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let e = |x: EdgeId| net.edge_name(x).to_string();
                let v = |x: NodeId| net.node_name(x).to_string();
                (
                    (i + 1).to_string(),
                    RoleNames {
                        a: e(b.a),
                        x: e(b.x),
                        y: e(b.y),
                        z: e(b.z),
                        zp: e(b.zp),
                        b: e(b.b),
                        a_node: v(b.a_node),
                        b_node: v(b.b_node),
                        s: v(b.source),
                        t: v(b.terminal),
                    },
                )
            })
            .collect()
    }

    /// Machine check of every structural invariant of the gadget.
    pub fn check_structure(&self) -> Result<()> {
        let net = self.network();
        let bad = |msg: String| Err(Error::NotGadget(msg));
        let set = |edges: &[EdgeId]| edges.iter().copied().collect::<BTreeSet<_>>();
        let (s, t) = (self.nec.source, self.nec.terminal);
        let k = self.k();
        if k == 0 {
            return bad("no branches".into());
        }
        if !net.in_edges(s).is_empty() || !net.out_edges(t).is_empty() {
            return bad("source has in-edges or terminal has out-edges".into());
        }
        if set(net.out_edges(s)) != self.branches.iter().map(|b| b.a).collect() {
            return bad("source out-edges are not exactly a_1..a_k".into());
        }
        if set(net.in_edges(t)) != self.branches.iter().map(|b| b.b).collect() {
            return bad("terminal in-edges are not exactly b_1..b_k".into());
        }
        let inner: BTreeSet<NodeId> = self.inner_nodes.iter().copied().collect();
        for (i, b) in self.branches.iter().enumerate() {
            let ends = |e: EdgeId, tail: NodeId, head: NodeId| {
                let edge = net.edge(e);
                edge.tail == tail && edge.head == head && edge.capacity == 1
            };
            let ok = ends(b.a, s, b.a_node)
                && ends(b.x, b.a_node, b.b_node)
                && ends(b.y, b.a_node, b.b_node)
                && ends(b.z, b.a_node, b.source)
                && ends(b.zp, b.terminal, b.b_node)
                && ends(b.b, b.b_node, t)
                && set(net.in_edges(b.a_node)) == [b.a].into()
                && set(net.out_edges(b.a_node)) == [b.x, b.y, b.z].into()
                && set(net.in_edges(b.b_node)) == [b.x, b.y, b.zp].into()
                && set(net.out_edges(b.b_node)) == [b.b].into()
                && inner.contains(&b.source)
                && inner.contains(&b.terminal);
            if !ok {
                return bad(format!("branch {} does not have the gadget shape", i + 1));
            }
        }
        let protected: BTreeSet<EdgeId> = self.branches.iter().flat_map(|b| [b.a, b.b]).collect();
        let expected: BTreeSet<Vec<EdgeId>> = net.edge_ids().filter(|e| !protected.contains(e)).map(|e| vec![e]).collect();
        let actual: BTreeSet<Vec<EdgeId>> = self.nec.adversary_class().iter().cloned().collect();
        if expected != actual || self.nec.adversary_class().len() != expected.len() {
            return bad("adversary class is not every singleton except {a_i}, {b_i}".into());
        }
        Ok(())
    }

    pub fn a_edges(&self) -> Vec<EdgeId> {
        self.branches.iter().map(|b| b.a).collect()
    }

    pub fn b_edges(&self) -> Vec<EdgeId> {
        self.branches.iter().map(|b| b.b).collect()
    }

    /// Gadget-side source side of the cut just after `s` (only `s`).
    pub fn a_cut_side(&self) -> BTreeSet<NodeId> {
        [self.nec.source].into()
    }

    /// Everything except `t`.
    pub fn b_cut_side(&self) -> BTreeSet<NodeId> {
        self.network().nodes().filter(|&v| v != self.nec.terminal).collect()
    }

    /// Position of each `b_i` among `t`'s inputs.
    pub(crate) fn b_positions(&self) -> Vec<usize> {
        let ins = self.network().in_edges(self.nec.terminal);
        self.branches
            .iter()
            .map(|b| ins.iter().position(|&e| e == b.b).expect("b_i enters t"))
            .collect()
    }
}

/// Re-targets a function between two argument layouts with the same
/// concatenated word (a hosted message slot in `N` versus the separate `z_j`
/// edges that replace it in the gadget, or the reverse).
pub(crate) fn rebind(f: &LocalFunction, from: &[u32], to: &[u32], max_entries: u64) -> Result<LocalFunction> {
    if from == to {
        return Ok(f.clone());
    }
    if from.iter().sum::<u32>() != to.iter().sum::<u32>() {
        return Err(Error::CodeMismatch(format!(
            "argument layouts {from:?} and {to:?} have different total width"
        )));
    }
    expand_truth_table(f, from, max_entries)
}

/// Picks the sub-estimate of pair `pair` out of a multi-pair decoder.
fn pick_slot(f: LocalFunction, position: usize, slots: usize, n: u32) -> LocalFunction {
    if slots == 1 {
        f
    } else {
        let lo = position as u32 * n;
        LocalFunction::Compose(vec![f, LocalFunction::slice(lo, lo + n)])
    }
}

/// Lifts a unit-rate length-`n` code for `N` to a rate-`k` code for the
/// gadget.
///
/// The source splits its `kn`-bit message into `k` pieces with `a_i` carrying
/// piece `i`; `x_i`, `y_i`, `z_i` relay `a_i`; `N` runs `mu_code` with `z_i`
/// in place of source message `i`; `z'_i` carries `t_i`'s estimate; `B_i`
/// forwards `x_i` when `x_i = y_i` and `z'_i` otherwise; `t` concatenates the
/// `b_i`.
pub fn backward_embed(g: &GadgetInstance, mu_code: &NetworkCode, n: u32, max_entries: u64) -> Result<NetworkCode> {
    if mu_code.block_length != n || mu_code.message_bits != n {
        return Err(Error::CodeMismatch(format!(
            "expected a unit-rate code of length {n}, got length {} with {}-bit messages",
            mu_code.block_length, mu_code.message_bits
        )));
    }
    Evaluator::new(&g.provenance, mu_code)?;
    let k = g.k() as u32;
    let net = g.network();
    let inner = &g.provenance.network;
    let gl = g.nec.layout();
    let il = g.provenance.layout();
    let mut code = NetworkCode::new(n, k * n);

    for (j, &ge) in g.inner_edges.iter().enumerate() {
        let name = net.edge_name(ge);
        let from = ArgPlan::at(inner, &il, inner.edge(crate::netmodel::EdgeId(j)).tail, n, n);
        let to = ArgPlan::at(net, &gl, net.edge(ge).tail, n, k * n);
        let f = rebind(mu_code.encoder(name)?, &from.widths, &to.widths, max_entries)?;
        code.encoders.insert(name.to_string(), f);
    }

    for (i, b) in g.branches.iter().enumerate() {
        let name = |e: EdgeId| net.edge_name(e).to_string();
        let lo = i as u32 * n;
        code.encoders.insert(name(b.a), LocalFunction::slice(lo, lo + n));
        for e in [b.x, b.y, b.z] {
            code.encoders.insert(name(e), LocalFunction::Relay(0));
        }

        let ti = g.provenance.pairs()[i].terminal;
        let sink = il.sinks.iter().find(|s| s.node == ti).expect("every terminal is a sink");
        let dec = mu_code
            .decoders
            .get(inner.node_name(ti))
            .ok_or_else(|| Error::CodeMismatch(format!("no decoder for `{}`", inner.node_name(ti))))?;
        let from = ArgPlan::at(inner, &il, ti, n, n);
        let to = ArgPlan::at(net, &gl, b.terminal, n, k * n);
        let f = rebind(dec, &from.widths, &to.widths, max_entries)?;
        let pos = sink.slots.iter().position(|&s| s == i).expect("pair slot at its terminal");
        code.encoders.insert(name(b.zp), pick_slot(f, pos, sink.slots.len(), n));

        let plan = ArgPlan::at(net, &gl, b.b_node, n, k * n);
        let (px, py, pz) = (
            plan.position(b.x).expect("x_i enters B_i"),
            plan.position(b.y).expect("y_i enters B_i"),
            plan.position(b.zp).expect("z'_i enters B_i"),
        );
        let table = tabulate(&plan.widths, max_entries, |args| {
            Ok(if args[px] == args[py] { args[px] } else { args[pz] })
        })?;
        code.encoders.insert(name(b.b), LocalFunction::Table(table));
    }

    let t_name = net.node_name(g.nec.terminal).to_string();
    code.decoders.insert(
        t_name,
        LocalFunction::Concat(g.b_positions().into_iter().map(LocalFunction::Relay).collect()),
    );
    Ok(code)
}

#[cfg(test)]
pub(crate) use tests::{disjoint_paths, relay_code};
