//! Deterministic simulation of a network code under a message and an error
//! pattern.

use std::collections::BTreeMap;

use super::code::NetworkCode;
use super::function::{mask, LocalFunction};
use crate::error::{Error, Result};
use crate::netmodel::{EdgeId, MultipleUnicastInstance, NecInstance, Network, NodeId};

/// Where messages enter and where they must be recovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    /// Hosting node of each source slot.
    pub source_nodes: Vec<NodeId>,
    /// Decoding nodes, each with the slots it must recover (in slot order).
    pub sinks: Vec<Sink>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sink {
    pub node: NodeId,
    pub slots: Vec<usize>,
}

impl Layout {
    pub fn hosted(&self, v: NodeId) -> Vec<usize> {
        self.source_nodes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == v)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Anything a network code can run on.
pub trait CodedInstance {
    fn network(&self) -> &Network;
    fn layout(&self) -> Layout;
}

impl CodedInstance for NecInstance {
    fn network(&self) -> &Network {
        &self.network
    }

    fn layout(&self) -> Layout {
        Layout {
            source_nodes: vec![self.source],
            sinks: vec![Sink {
                node: self.terminal,
                slots: vec![0],
            }],
        }
    }
}

impl CodedInstance for MultipleUnicastInstance {
    fn network(&self) -> &Network {
        &self.network
    }

    fn layout(&self) -> Layout {
        let mut sinks: Vec<Sink> = Vec::new();
        for (i, p) in self.pairs().iter().enumerate() {
            match sinks.iter_mut().find(|s| s.node == p.terminal) {
                Some(s) => s.slots.push(self.required_source(i)),
                None => sinks.push(Sink {
                    node: p.terminal,
                    slots: vec![self.required_source(i)],
                }),
            }
        }
        Layout {
            source_nodes: self.pairs().iter().map(|p| p.source).collect(),
            sinks,
        }
    }
}

/// Argument list of a function at node `v`: its in-edges in edge order, then
/// one argument holding every hosted message slot (concatenated, lowest slot
/// first) when `v` hosts sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgPlan {
    pub edges: Vec<EdgeId>,
    pub slots: Vec<usize>,
    pub widths: Vec<u32>,
}

impl ArgPlan {
    pub fn at(net: &Network, layout: &Layout, v: NodeId, n: u32, message_bits: u32) -> Self {
        let edges = net.in_edges(v).to_vec();
        let slots = layout.hosted(v);
        let mut widths: Vec<u32> = edges.iter().map(|&e| n * net.capacity(e)).collect();
        if !slots.is_empty() {
            widths.push(message_bits * slots.len() as u32);
        }
        ArgPlan { edges, slots, widths }
    }

    /// Position of edge `e` in the argument list.
    pub fn position(&self, e: EdgeId) -> Option<usize> {
        self.edges.iter().position(|&x| x == e)
    }

    fn gather(&self, signals: &[u64], message: &[u64], message_bits: u32, out: &mut Vec<u64>) {
        out.clear();
        out.extend(self.edges.iter().map(|e| signals[e.0]));
        if !self.slots.is_empty() {
            let mut word = 0u64;
            for (j, &s) in self.slots.iter().enumerate() {
                word |= message[s] << (j as u32 * message_bits);
            }
            out.push(word);
        }
    }
}

/// A sparse xor error assignment. `realized_set` names the adversary set the
/// pattern realizes; it is empty for the no-error pattern.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErrorPattern {
    masks: Vec<(EdgeId, u64)>,
    pub realized_set: Vec<EdgeId>,
}

impl ErrorPattern {
    pub fn none() -> Self {
        Self::default()
    }

    /// Masks on the given edges; zero masks are dropped.
    pub fn new(masks: impl IntoIterator<Item = (EdgeId, u64)>, realized_set: Vec<EdgeId>) -> Self {
        let mut masks: Vec<(EdgeId, u64)> = masks.into_iter().filter(|&(_, m)| m != 0).collect();
        masks.sort_by_key(|&(e, _)| e);
        ErrorPattern { masks, realized_set }
    }

    pub fn single(e: EdgeId, mask: u64) -> Self {
        Self::new([(e, mask)], vec![e])
    }

    pub fn is_none(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[(EdgeId, u64)] {
        &self.masks
    }

    pub fn mask_of(&self, e: EdgeId) -> u64 {
        self.masks.iter().find(|(x, _)| *x == e).map_or(0, |&(_, m)| m)
    }

    pub fn touches(&self, e: EdgeId) -> bool {
        self.masks.iter().any(|(x, _)| *x == e)
    }

    pub fn to_named(&self, net: &Network) -> NamedPattern {
        NamedPattern {
            set: self.realized_set.iter().map(|&e| net.edge_name(e).to_string()).collect(),
            masks: self.masks.iter().map(|&(e, m)| (net.edge_name(e).to_string(), m)).collect(),
        }
    }
}

/// File form of an error pattern.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NamedPattern {
    pub set: Vec<String>,
    pub masks: BTreeMap<String, u64>,
}

impl NamedPattern {
    pub fn resolve(&self, net: &Network) -> Result<ErrorPattern> {
        let masks = self
            .masks
            .iter()
            .map(|(name, &m)| Ok((net.edge_id(name)?, m)))
            .collect::<Result<Vec<_>>>()?;
        let set = self.set.iter().map(|n| net.edge_id(n)).collect::<Result<Vec<_>>>()?;
        Ok(ErrorPattern::new(masks, set))
    }
}

/// Result of one simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// Transported (post-error) signal on every edge.
    pub signals: Vec<u64>,
    /// Raw decoder output of every sink, in layout order.
    pub sink_outputs: Vec<u64>,
    /// Estimate of every source slot.
    pub estimates: Vec<u64>,
}

#[derive(Debug, Clone)]
struct DecoderPlan {
    node: NodeId,
    args: ArgPlan,
    f: LocalFunction,
    slots: Vec<usize>,
}

/// A code bound to an instance, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Evaluator {
    block_length: u32,
    message_bits: u32,
    slot_count: usize,
    edge_names: Vec<String>,
    edge_width: Vec<u32>,
    order: Vec<EdgeId>,
    args: Vec<ArgPlan>,
    encoders: Vec<LocalFunction>,
    decoders: Vec<DecoderPlan>,
}

impl Evaluator {
    pub fn new<I: CodedInstance + ?Sized>(inst: &I, code: &NetworkCode) -> Result<Self> {
        let net = inst.network();
        let layout = inst.layout();
        let n = code.block_length;
        let bits = code.message_bits;
        if n == 0 || bits == 0 {
            return Err(Error::CodeMismatch("block length and message width must be positive".into()));
        }
        for name in code.encoders.keys() {
            net.edge_id(name)
                .map_err(|_| Error::CodeMismatch(format!("encoder for unknown edge `{name}`")))?;
        }
        let mut edge_width = Vec::with_capacity(net.edge_count());
        let mut args = Vec::with_capacity(net.edge_count());
        let mut encoders = Vec::with_capacity(net.edge_count());
        for e in net.edge_ids() {
            let width = n as u64 * net.capacity(e) as u64;
            if width > 63 {
                return Err(Error::CodeMismatch(format!("edge `{}` carries {width} bits", net.edge_name(e))));
            }
            let plan = ArgPlan::at(net, &layout, net.edge(e).tail, n, bits);
            let f = code.encoder(net.edge_name(e))?.clone();
            check_output(&f, &plan.widths, width as u32, net.edge_name(e))?;
            edge_width.push(width as u32);
            args.push(plan);
            encoders.push(f);
        }

        let mut decoders = Vec::with_capacity(layout.sinks.len());
        for sink in &layout.sinks {
            let name = net.node_name(sink.node);
            let f = code
                .decoders
                .get(name)
                .ok_or_else(|| Error::CodeMismatch(format!("no decoder for terminal `{name}`")))?
                .clone();
            let plan = ArgPlan::at(net, &layout, sink.node, n, bits);
            check_output(&f, &plan.widths, bits * sink.slots.len() as u32, name)?;
            decoders.push(DecoderPlan {
                node: sink.node,
                args: plan,
                f,
                slots: sink.slots.clone(),
            });
        }
        if let Some(extra) = code
            .decoders
            .keys()
            .find(|k| !decoders.iter().any(|d| net.node_name(d.node) == k.as_str()))
        {
            return Err(Error::CodeMismatch(format!("decoder for non-terminal `{extra}`")));
        }

        Ok(Evaluator {
            block_length: n,
            message_bits: bits,
            slot_count: layout.source_nodes.len(),
            edge_names: net.edge_ids().map(|e| net.edge_name(e).to_string()).collect(),
            edge_width,
            order: net.edge_order().to_vec(),
            args,
            encoders,
            decoders,
        })
    }

    pub fn block_length(&self) -> u32 {
        self.block_length
    }

    pub fn message_bits(&self) -> u32 {
        self.message_bits
    }

    pub fn slot_count(&self) -> usize {
        self.slot_count
    }

    pub fn edge_width(&self, e: EdgeId) -> u32 {
        self.edge_width[e.0]
    }

    pub fn arg_plan(&self, e: EdgeId) -> &ArgPlan {
        &self.args[e.0]
    }

    /// Swaps in a new encoder for `e` without re-binding the whole code.
    pub fn set_encoder(&mut self, e: EdgeId, f: LocalFunction) -> Result<()> {
        check_output(&f, &self.args[e.0].widths, self.edge_width[e.0], &self.edge_names[e.0])?;
        self.encoders[e.0] = f;
        Ok(())
    }

    pub fn set_decoder(&mut self, sink: usize, f: LocalFunction) -> Result<()> {
        let d = &mut self.decoders[sink];
        check_output(&f, &d.args.widths, self.message_bits * d.slots.len() as u32, "decoder")?;
        d.f = f;
        Ok(())
    }

    pub fn check_pattern(&self, pattern: &ErrorPattern) -> Result<()> {
        for &(e, m) in pattern.masks() {
            let width = *self
                .edge_width
                .get(e.0)
                .ok_or_else(|| Error::BadPattern(format!("mask on edge {e} outside the instance")))?;
            if m >> width != 0 {
                return Err(Error::BadPattern(format!(
                    "mask {m:#x} wider than the {width}-bit edge `{}`",
                    self.edge_names[e.0]
                )));
            }
        }
        Ok(())
    }

    pub fn run(&self, message: &[u64], pattern: &ErrorPattern) -> Result<Trace> {
        if message.len() != self.slot_count {
            return Err(Error::CodeMismatch(format!(
                "{} message slots supplied, instance has {}",
                message.len(),
                self.slot_count
            )));
        }
        if let Some(&m) = message.iter().find(|&&m| m >> self.message_bits != 0) {
            return Err(Error::WidthMismatch {
                what: "message".into(),
                expected: self.message_bits,
                value: m,
            });
        }
        self.check_pattern(pattern)?;

        let mut signals = vec![0u64; self.edge_width.len()];
        let mut buf = Vec::new();
        for &e in &self.order {
            let plan = &self.args[e.0];
            plan.gather(&signals, message, self.message_bits, &mut buf);
            let out = self.encoders[e.0].eval(&buf, &plan.widths)?;
            if out >> self.edge_width[e.0] != 0 {
                return Err(Error::WidthMismatch {
                    what: format!("edge `{}`", self.edge_names[e.0]),
                    expected: self.edge_width[e.0],
                    value: out,
                });
            }
            signals[e.0] = out ^ pattern.mask_of(e);
        }

        let mut sink_outputs = Vec::with_capacity(self.decoders.len());
        let mut estimates = vec![0u64; self.slot_count];
        for d in &self.decoders {
            d.args.gather(&signals, message, self.message_bits, &mut buf);
            let out = d.f.eval(&buf, &d.args.widths)?;
            let width = self.message_bits * d.slots.len() as u32;
            if out >> width != 0 {
                return Err(Error::WidthMismatch {
                    what: "decoder output".into(),
                    expected: width,
                    value: out,
                });
            }
            for (j, &s) in d.slots.iter().enumerate() {
                estimates[s] = (out >> (j as u32 * self.message_bits)) & mask(self.message_bits);
            }
            sink_outputs.push(out);
        }
        Ok(Trace {
            signals,
            sink_outputs,
            estimates,
        })
    }

    /// Runs only the decoder of sink `sink` on explicit in-edge signals
    /// (no hosted message slot). Used to ask what a terminal decodes a given
    /// cut vector to.
    pub fn decode_at(&self, sink: usize, inputs: &[u64]) -> Result<u64> {
        let d = &self.decoders[sink];
        if !d.args.slots.is_empty() || inputs.len() != d.args.edges.len() {
            return Err(Error::Precondition("decode_at needs exactly the sink's in-edge signals".into()));
        }
        d.f.eval(inputs, &d.args.widths)
    }

    pub fn sink_in_edges(&self, sink: usize) -> &[EdgeId] {
        &self.decoders[sink].args.edges
    }
}

fn check_output(f: &LocalFunction, widths: &[u32], out_width: u32, what: &str) -> Result<()> {
    let inferred = f
        .check(widths)
        .map_err(|e| Error::CodeMismatch(format!("function for `{what}`: {e}")))?;
    match inferred {
        Some(w) if w > out_width => Err(Error::CodeMismatch(format!(
            "function for `{what}` produces {w} bits, carrier holds {out_width}"
        ))),
        _ => Ok(()),
    }
}

/// Splits a packed message index into per-slot values (slot 0 lowest).
pub fn split_message(index: u64, slots: usize, bits: u32) -> Vec<u64> {
    (0..slots).map(|i| (index >> (i as u32 * bits)) & mask(bits)).collect()
}

pub fn pack_message(slots: &[u64], bits: u32) -> u64 {
    slots.iter().enumerate().fold(0, |acc, (i, &v)| acc | v << (i as u32 * bits))
}

/// One-shot evaluation.
pub fn evaluate<I: CodedInstance + ?Sized>(
    inst: &I,
    code: &NetworkCode,
    message: &[u64],
    pattern: &ErrorPattern,
) -> Result<Trace> {
    Evaluator::new(inst, code)?.run(message, pattern)
}
