//! The explicit family on the two-relay network: `k` sources feed relay `C`,
//! `C` feeds `D` over one unit edge, `D` feeds all `k` terminals.
//!
//! As a multiple-unicast instance it supports rate at most `1/k`. Its gadget
//! admits zero-error codes of rate `k - k/n` for every `n >= 2`: every signal
//! outside `N` carries an `(n-1)`-bit payload plus a flag in its top bit, `N`
//! forwards the xor of all pieces to every `t_i`, and `B_i` falls back to that
//! parity (raising the flag) when `x_i` and `y_i` disagree.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codeeval::{
    mask, split_message, tabulate, ArgPlan, CodedInstance, ErrorPattern, Evaluator, LocalFunction, NetworkCode,
    XorTerm,
};
use crate::error::{Error, Result};
use crate::netmodel::{cut_capacity, cutset_rate_bound, EdgeSpec, MultipleUnicastInstance, Network};
use crate::rational::{self, Rational};
use crate::reduction::{build_gadget, GadgetInstance};
use crate::verifier::{enumerate_patterns, verify_nec, VerificationReport, VerifyOptions};
use crate::Limits;

/// The inner network `N` with pairs `(s_i, t_i)`.
pub fn two_relay_network(k: usize) -> Result<MultipleUnicastInstance> {
    let mut nodes: Vec<String> = (1..=k).map(|i| format!("s{i}")).collect();
    nodes.extend(["C".to_string(), "D".to_string()]);
    nodes.extend((1..=k).map(|i| format!("t{i}")));
    let mut edges: Vec<EdgeSpec> = (1..=k)
        .map(|i| EdgeSpec::new(format!("sC{i}"), format!("s{i}"), "C", 1))
        .collect();
    edges.push(EdgeSpec::new("CD", "C", "D", 1));
    edges.extend((1..=k).map(|i| EdgeSpec::new(format!("Dt{i}"), "D", format!("t{i}"), 1)));
    let network = Network::new(nodes, edges)?;
    let pairs: Vec<(String, String)> = (1..=k).map(|i| (format!("s{i}"), format!("t{i}"))).collect();
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    MultipleUnicastInstance::from_names(network, &refs)
}

pub fn build_cx_instances(k: usize) -> Result<(MultipleUnicastInstance, GadgetInstance)> {
    if k < 2 {
        return Err(Error::Precondition(format!("the family needs k >= 2, got {k}")));
    }
    let inst = two_relay_network(k)?;
    let g = build_gadget(&inst)?;
    Ok((inst, g))
}

/// A member of the family together with its parameters.
#[derive(Debug, Clone)]
pub struct CxCode {
    pub k: usize,
    pub n: u32,
    /// Distance between consecutive pieces in the source message: `n - 1` for
    /// the native code, `n` for the rate-`k` embedding.
    pub stride: u32,
    pub code: NetworkCode,
}

impl CxCode {
    pub fn rate(&self) -> Rational {
        self.code.rate()
    }

    pub fn payload_bits(&self) -> u32 {
        self.n - 1
    }

    pub fn flag(&self) -> u64 {
        1 << (self.n - 1)
    }

    /// Splits a source message into its `k` payload pieces.
    pub fn pieces(&self, m: u64) -> Vec<u64> {
        (0..self.k)
            .map(|i| (m >> (i as u32 * self.stride)) & mask(self.n - 1))
            .collect()
    }
}

/// `k - k/n`.
pub fn family_rate(k: usize, n: u32) -> Rational {
    Rational::from_integer(k as u64) - Rational::new(k as u64, n as u64)
}

/// The zero-error code of rate `k - k/n` on the gadget of [`build_cx_instances`].
pub fn build_cx_code(g: &GadgetInstance, k: usize, n: u32, max_entries: u64) -> Result<CxCode> {
    build(g, k, n, n - 1, false, max_entries)
}

/// The same code read as a rate-`k` code: the source message has `kn` bits,
/// piece `i` sits at bits `(i-1)n ..` with its top bit ignored, and the
/// terminal writes each recovered payload back at the same offset with a zero
/// top bit. A message is then decoded correctly iff every piece's top bit is
/// zero, so exactly a `2^{-k}` fraction of messages is good.
pub fn build_cx_code_rate_k(g: &GadgetInstance, k: usize, n: u32, max_entries: u64) -> Result<CxCode> {
    build(g, k, n, n, false, max_entries)
}

/// The native code with `B_i`'s comparison rule inverted on branch `i`
/// (forward `x_i` on disagreement, the parity on agreement).
pub fn build_cx_code_inverted(g: &GadgetInstance, k: usize, n: u32, i: usize, max_entries: u64) -> Result<CxCode> {
    let mut cx = build(g, k, n, n - 1, false, max_entries)?;
    let inverted = build(g, k, n, n - 1, true, max_entries)?;
    let name = g.network().edge_name(g.branches[i].b).to_string();
    cx.code
        .encoders
        .insert(name.clone(), inverted.code.encoders[&name].clone());
    Ok(cx)
}

fn build(g: &GadgetInstance, k: usize, n: u32, stride: u32, inverted: bool, max_entries: u64) -> Result<CxCode> {
    if k < 2 || g.k() != k {
        return Err(Error::Precondition(format!("gadget has {} branches, expected k = {k} >= 2", g.k())));
    }
    if n < 2 {
        return Err(Error::Precondition(format!(
            "block length {n} leaves a {}-bit payload",
            n.saturating_sub(1)
        )));
    }
    let net = g.network();
    let inner = &g.provenance.network;
    let p = n - 1;
    let message_bits = k as u32 * stride;
    let mut code = NetworkCode::new(n, message_bits);
    let payload = LocalFunction::slice(0, p);

    for (i, b) in g.branches.iter().enumerate() {
        let name = |e| net.edge_name(e).to_string();
        let lo = i as u32 * stride;
        code.encoders.insert(name(b.a), LocalFunction::slice(lo, lo + p));
        for e in [b.x, b.y, b.z] {
            code.encoders.insert(name(e), LocalFunction::Relay(0));
        }
        code.encoders.insert(name(b.zp), payload.clone());

        let layout = g.nec.layout();
        let plan = ArgPlan::at(net, &layout, b.b_node, n, message_bits);
        let (px, py, pz) = (
            plan.position(b.x).expect("x_i enters B_i"),
            plan.position(b.y).expect("y_i enters B_i"),
            plan.position(b.zp).expect("z'_i enters B_i"),
        );
        let table = tabulate(&plan.widths, max_entries, |args| {
            let (x, y, z) = (args[px] & mask(p), args[py] & mask(p), args[pz] & mask(p));
            Ok(if (x == y) != inverted { x } else { z | 1 << p })
        })?;
        code.encoders.insert(name(b.b), LocalFunction::Table(table));
    }

    for &e in &g.inner_edges {
        let edge = net.edge(e);
        let f = if net.in_edges(edge.tail).len() > 1 {
            // C: payload of the xor of everything it hears
            let xor = LocalFunction::Xor((0..net.in_edges(edge.tail).len()).map(XorTerm::Arg).collect());
            LocalFunction::Compose(vec![xor, payload.clone()])
        } else {
            payload.clone()
        };
        code.encoders.insert(edge.name.clone(), f);
    }
    debug_assert_eq!(inner.edge_count(), g.inner_edges.len());

    let t_ins = net.in_edges(g.nec.terminal);
    let widths = vec![n; t_ins.len()];
    let branch_of: Vec<usize> = t_ins
        .iter()
        .map(|&e| g.branches.iter().position(|b| b.b == e).expect("t hears only b-edges"))
        .collect();
    let decoder = tabulate(&widths, max_entries, |args| {
        let mut by_branch = vec![0u64; k];
        for (pos, &i) in branch_of.iter().enumerate() {
            by_branch[i] = args[pos];
        }
        Ok(terminal_rule(&by_branch, p, stride))
    })?;
    code.decoders
        .insert(net.node_name(g.nec.terminal).to_string(), LocalFunction::Table(decoder));
    Ok(CxCode { k, n, stride, code })
}

/// Terminal rule on the b-signals in branch order.
fn terminal_rule(b: &[u64], p: u32, stride: u32) -> u64 {
    let flagged: Vec<usize> = (0..b.len()).filter(|&i| b[i] >> p & 1 == 1).collect();
    let mut est: Vec<u64> = b.iter().map(|&v| v & mask(p)).collect();
    match flagged.as_slice() {
        [] => {}
        &[l] => {
            est[l] = est
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != l)
                .fold(est[l], |acc, (_, &v)| acc ^ v);
        }
        // failure: the all-ones word
        _ => return mask(stride * b.len() as u32),
    }
    est.iter()
        .enumerate()
        .fold(0, |acc, (i, &v)| acc | v << (i as u32 * stride))
}

/// What the flags looked like over every (message, pattern) run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlagCensus {
    pub runs: u64,
    /// Largest number of b-signals with the flag raised in any run.
    pub max_flags: usize,
    /// Runs in which an error on `x_i` or `y_i` coincided with `z'_i` being
    /// hit or carrying something other than the parity of the pieces.
    pub fallback_violations: u64,
}

/// Simulates every message under every pattern and inspects the b-signals.
pub fn flag_census(g: &GadgetInstance, cx: &CxCode, opts: &VerifyOptions) -> Result<FlagCensus> {
    let eval = Evaluator::new(&g.nec, &cx.code)?;
    let patterns: Vec<ErrorPattern> =
        enumerate_patterns(&g.nec, cx.n, opts.semantics, opts.limits.max_patterns)?.collect();
    let bits = cx.code.message_bits;
    if bits >= 63 || 1u64 << bits > opts.limits.max_messages {
        return Err(Error::limit("max messages", 1u128 << bits.min(127), opts.limits.max_messages));
    }
    let p = cx.n - 1;
    let per_message = (0..1u64 << bits)
        .into_par_iter()
        .map(|m| {
            let parity = cx.pieces(m).into_iter().fold(0, |a, v| a ^ v);
            let mut max_flags = 0;
            let mut violations = 0u64;
            for r in &patterns {
                let t = eval.run(&[m], r)?;
                let flags = g.branches.iter().filter(|b| t.signals[b.b.0] >> p & 1 == 1).count();
                max_flags = max_flags.max(flags);
                for b in &g.branches {
                    if (r.touches(b.x) || r.touches(b.y))
                        && (r.touches(b.zp) || t.signals[b.zp.0] & mask(p) != parity)
                    {
                        violations += 1;
                    }
                }
            }
            Ok((max_flags, violations))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FlagCensus {
        runs: per_message.len() as u64 * patterns.len() as u64,
        max_flags: per_message.iter().map(|x| x.0).max().unwrap_or(0),
        fallback_violations: per_message.iter().map(|x| x.1).sum(),
    })
}

/// Builds and exhaustively verifies the native code, insisting on zero error
/// and on the terminal never seeing two raised flags.
pub fn verify_cx_zero_error(k: usize, n: u32, opts: &VerifyOptions) -> Result<VerificationReport> {
    let (_, g) = build_cx_instances(k)?;
    let cx = build_cx_code(&g, k, n, opts.limits.max_table_entries)?;
    let report = verify_nec(&g.nec, &cx.code, opts)?;
    if report.epsilon != Rational::from_integer(0) {
        return Err(Error::Inconsistent(format!(
            "k = {k}, n = {n}: {} of {} messages misdecode",
            report.bad.len(),
            report.message_count()
        )));
    }
    let census = flag_census(&g, &cx, opts)?;
    if census.max_flags > 1 || census.fallback_violations > 0 {
        return Err(Error::Inconsistent(format!(
            "k = {k}, n = {n}: up to {} flags raised, {} fallback violations",
            census.max_flags, census.fallback_violations
        )));
    }
    Ok(report)
}

/// Outcome of an exhaustive search over all codes of a fixed shape.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSearch {
    pub codes_enumerated: u64,
    pub satisfying: u64,
}

/// Enumerates every code of block length `n` and `message_bits`-bit messages
/// on `inst` (every edge function and every decoder as an arbitrary table) and
/// counts those that decode every message tuple correctly without errors.
pub fn search_zero_error_codes(
    inst: &MultipleUnicastInstance,
    n: u32,
    message_bits: u32,
    limits: &Limits,
) -> Result<CodeSearch> {
    let net = &inst.network;
    let layout = inst.layout();
    // (entries, output width) of every table, edges first then decoders
    let mut shapes: Vec<(u32, u32)> = Vec::new();
    for e in net.edge_ids() {
        let plan = ArgPlan::at(net, &layout, net.edge(e).tail, n, message_bits);
        shapes.push((plan.widths.iter().sum(), n * net.capacity(e)));
    }
    for sink in &layout.sinks {
        let plan = ArgPlan::at(net, &layout, sink.node, n, message_bits);
        shapes.push((plan.widths.iter().sum(), message_bits * sink.slots.len() as u32));
    }
    let digit_bits: Vec<u32> = shapes
        .iter()
        .map(|&(inb, out)| if inb >= 32 { u32::MAX } else { out.saturating_mul(1 << inb) })
        .collect();
    let total_bits: u64 = digit_bits.iter().map(|&b| b as u64).sum();
    if total_bits >= 63 || 1u64 << total_bits > limits.max_search_codes {
        return Err(Error::limit(
            "max search codes",
            if total_bits >= 127 { u128::MAX } else { 1u128 << total_bits },
            limits.max_search_codes,
        ));
    }
    let count = 1u64 << total_bits;

    let mut seed = NetworkCode::new(n, message_bits);
    for e in net.edges() {
        seed.encoders.insert(e.name.clone(), LocalFunction::Const(0));
    }
    for sink in &layout.sinks {
        seed.decoders
            .insert(net.node_name(sink.node).to_string(), LocalFunction::Const(0));
    }
    let base = Evaluator::new(inst, &seed)?;
    let k = inst.k();
    let tuples = 1u64 << (message_bits as u64 * k as u64);
    let none = ErrorPattern::none();
    let edges = net.edge_count();

    let satisfying = (0..count)
        .into_par_iter()
        .map_init(
            || base.clone(),
            |eval, idx| -> Result<u64> {
                let mut word = idx;
                for (j, (&(inb, out), &bits)) in shapes.iter().zip(&digit_bits).enumerate() {
                    let digit = word & mask(bits);
                    word >>= bits;
                    let table: Vec<u64> = (0..1u64 << inb).map(|x| (digit >> (x as u32 * out)) & mask(out)).collect();
                    let f = LocalFunction::Table(table);
                    if j < edges {
                        eval.set_encoder(crate::netmodel::EdgeId(j), f)?;
                    } else {
                        eval.set_decoder(j - edges, f)?;
                    }
                }
                for t in 0..tuples {
                    let msg = split_message(t, k, message_bits);
                    if eval.run(&msg, &none)?.estimates != msg {
                        return Ok(0u64);
                    }
                }
                Ok(1u64)
            },
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(CodeSearch {
        codes_enumerated: count,
        satisfying,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatePoint {
    pub n: u32,
    #[serde(with = "rational::json")]
    pub rate: Rational,
    /// Measured error of the native code; absent when the point exceeded the
    /// enumeration limits and was not verified.
    #[serde(with = "rational::json_opt")]
    pub epsilon: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub k: usize,
    pub rate_points: Vec<RatePoint>,
    /// Cut-set bound on the common rate in `N`.
    #[serde(with = "rational::json_opt")]
    pub cutset_bound: Option<Rational>,
    /// Capacity of the cut right after the gadget's source.
    pub gadget_cut_capacity: u64,
    pub n1_search: Option<CodeSearch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notices: Vec<String>,
}

/// Assembles the rate family, the cut-set bound and (for `k = 2`) the
/// exhaustive search showing that `N` has no unit-rate length-1 code.
pub fn demonstrate_unachievability(
    k: usize,
    ns: &BTreeSet<u32>,
    n1_search: bool,
    opts: &VerifyOptions,
) -> Result<Demonstration> {
    let (inst, g) = build_cx_instances(k)?;
    let mut notices = Vec::new();
    let mut rate_points = Vec::new();
    for &n in ns {
        if n < 2 {
            return Err(Error::Precondition(format!("block length {n} is below 2")));
        }
        let rate = family_rate(k, n);
        let epsilon = match verify_cx_zero_error(k, n, opts) {
            Ok(r) => Some(r.epsilon),
            Err(Error::LimitExceeded { limit, .. }) => {
                notices.push(format!("n = {n}: not verified ({limit} exceeded)"));
                None
            }
            Err(e) => return Err(e),
        };
        rate_points.push(RatePoint { n, rate, epsilon });
    }
    let cutset_bound = match cutset_rate_bound(&inst, opts.limits.max_cut_edges) {
        Ok(r) => Some(r),
        Err(Error::LimitExceeded { .. }) => {
            notices.push("cut-set bound: too many edges for exhaustive cut enumeration".into());
            None
        }
        Err(e) => return Err(e),
    };
    let gadget_cut_capacity = cut_capacity(g.network(), &g.a_cut_side(), g.nec.source, g.nec.terminal)?;
    let n1_search = if !n1_search {
        None
    } else if k != 2 {
        notices.push(format!("n = 1 search skipped: only run at k = 2, got k = {k}"));
        None
    } else {
        Some(search_zero_error_codes(&inst, 1, 1, &opts.limits)?)
    };
    Ok(Demonstration {
        k,
        rate_points,
        cutset_bound,
        gadget_cut_capacity,
        n1_search,
        notices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codeeval::{evaluate, normalize_relay};
    use crate::netmodel::EdgeId;
    use crate::reduction::{disjoint_paths, relay_code};

    fn cx(k: usize, n: u32) -> (GadgetInstance, CxCode) {
        let (_, g) = build_cx_instances(k).unwrap();
        let c = build_cx_code(&g, k, n, 1 << 24).unwrap();
        (g, c)
    }

    #[test]
    fn instance_counts() {
        let (inst, g) = build_cx_instances(2).unwrap();
        assert_eq!(inst.network.node_count(), 6);
        assert_eq!(inst.network.edge_count(), 5);
        assert_eq!(g.network().node_count(), 12);
        assert_eq!(g.network().edge_count(), 17);
        assert!(matches!(build_cx_instances(1), Err(Error::Precondition(_))));
    }

    #[test]
    fn rates() {
        assert_eq!(cx(3, 3).1.rate(), Rational::from_integer(2));
        assert_eq!(cx(2, 2).1.rate(), Rational::from_integer(1));
        assert_eq!(family_rate(2, 4), Rational::new(3, 2));
        let (_, g) = build_cx_instances(2).unwrap();
        assert!(matches!(build_cx_code(&g, 2, 1, 1 << 24), Err(Error::Precondition(_))));
    }

    #[test]
    fn hand_trace_no_error() {
        let (g, c) = cx(2, 2);
        let net = g.network();
        let m = 0b01; // pieces (1, 0)
        let t = evaluate(&g.nec, &c.code, &[m], &ErrorPattern::none()).unwrap();
        assert_eq!(t.signals[net.edge_id("CD").unwrap().0], 1);
        assert_eq!(t.signals[g.branches[0].b.0], 0b01);
        assert_eq!(t.signals[g.branches[1].b.0], 0b00);
        assert_eq!(t.estimates, vec![m]);
    }

    #[test]
    fn hand_trace_flip_x1() {
        let (g, c) = cx(2, 2);
        let m = 0b01;
        let t = evaluate(&g.nec, &c.code, &[m], &ErrorPattern::single(g.branches[0].x, 1)).unwrap();
        // parity 1 forwarded with the flag raised
        assert_eq!(t.signals[g.branches[0].b.0], 0b11);
        assert_eq!(t.signals[g.branches[1].b.0], 0b00);
        assert_eq!(t.estimates, vec![m]);
    }

    #[test]
    fn pattern_count_matches_formula() {
        let (g, _) = cx(2, 2);
        let attackable = g.nec.attackable_edges().len() as u128;
        assert_eq!(attackable, 13);
        let count = crate::verifier::pattern_count(&g.nec, 2, Default::default());
        assert_eq!(count, 1 + attackable * 3);
    }

    #[test]
    fn zero_error_small_points() {
        for (k, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let r = verify_cx_zero_error(k, n, &VerifyOptions::default()).unwrap();
            assert_eq!(r.good.len() as u64, 1 << (k as u32 * (n - 1)));
        }
    }

    #[test]
    fn at_most_one_flag() {
        let (g, c) = cx(2, 2);
        let census = flag_census(&g, &c, &VerifyOptions::default()).unwrap();
        assert_eq!(census.max_flags, 1);
        assert_eq!(census.fallback_violations, 0);
        assert_eq!(census.runs, 4 * (1 + 13 * 3));
    }

    #[test]
    fn inverted_rule_fails() {
        let (_, g) = build_cx_instances(2).unwrap();
        let c = build_cx_code_inverted(&g, 2, 2, 0, 1 << 24).unwrap();
        let r = verify_nec(&g.nec, &c.code, &VerifyOptions::default()).unwrap();
        assert!(r.epsilon > Rational::from_integer(0));
    }

    #[test]
    fn rate_k_embedding_loses_exactly_the_flag_messages() {
        for (k, n) in [(2usize, 2u32), (2, 3), (3, 2)] {
            let (_, g) = build_cx_instances(k).unwrap();
            let c = build_cx_code_rate_k(&g, k, n, 1 << 24).unwrap();
            assert_eq!(c.code.message_bits, k as u32 * n);
            let r = verify_nec(&g.nec, &c.code, &VerifyOptions::default()).unwrap();
            assert_eq!(r.epsilon, Rational::from_integer(1) - Rational::new(1, 1 << k));
            let top: u64 = (0..k).map(|i| 1u64 << (i as u32 * n + n - 1)).sum();
            assert!(r.good.iter().all(|&m| m & top == 0));
        }
    }

    #[test]
    fn already_relay_normalized() {
        let (g, c) = cx(2, 2);
        let pairs: Vec<(EdgeId, EdgeId)> = g.branches.iter().map(|b| (b.a, b.z)).collect();
        let out = normalize_relay(&g.nec, &c.code, &pairs, 1 << 24).unwrap();
        assert_eq!(out, c.code);
    }

    #[test]
    fn n1_search_finds_nothing_on_two_relay_network() {
        let inst = two_relay_network(2).unwrap();
        let s = search_zero_error_codes(&inst, 1, 1, &Limits::default()).unwrap();
        assert_eq!(s.codes_enumerated, 4 * 4 * 16 * 4 * 4 * 4 * 4);
        assert_eq!(s.satisfying, 0);
    }

    #[test]
    fn n1_search_oracle_finds_codes_where_they_exist() {
        // two disjoint unit edges: per path the edge and decoder must compose
        // to the identity, 2 ways each (identity/identity or negate/negate)
        let inst = disjoint_paths(2);
        let s = search_zero_error_codes(&inst, 1, 1, &Limits::default()).unwrap();
        assert_eq!(s.codes_enumerated, 4 * 4 * 4 * 4);
        assert_eq!(s.satisfying, 4);
        let _ = relay_code(&inst, 1);
    }

    #[test]
    fn search_respects_limit() {
        let inst = two_relay_network(3).unwrap();
        assert!(matches!(
            search_zero_error_codes(&inst, 1, 1, &Limits::default()),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn demonstration_k2() {
        let ns: BTreeSet<u32> = [2, 3, 4].into();
        let d = demonstrate_unachievability(2, &ns, true, &VerifyOptions::default()).unwrap();
        let rates: Vec<Rational> = d.rate_points.iter().map(|p| p.rate).collect();
        assert_eq!(rates, vec![Rational::from_integer(1), Rational::new(4, 3), Rational::new(3, 2)]);
        assert!(d.rate_points.iter().all(|p| p.epsilon == Some(Rational::from_integer(0))));
        assert_eq!(d.cutset_bound, Some(Rational::new(1, 2)));
        assert_eq!(d.gadget_cut_capacity, 2);
        assert_eq!(d.n1_search.unwrap().satisfying, 0);
    }

    #[test]
    fn demonstration_large_k_skips_search() {
        let d = demonstrate_unachievability(5, &BTreeSet::new(), true, &VerifyOptions::default()).unwrap();
        assert!(d.n1_search.is_none());
        assert!(d.notices.iter().any(|s| s.contains("skipped")));
        assert_eq!(d.cutset_bound, Some(Rational::new(1, 5)));
    }

    #[test]
    fn family_increasing_below_k() {
        for k in 2..=5 {
            let r: Vec<Rational> = (2..10).map(|n| family_rate(k, n)).collect();
            assert!(r.windows(2).all(|w| w[0] < w[1]));
            assert!(r.iter().all(|&x| x < Rational::from_integer(k as u64)));
        }
    }
}
