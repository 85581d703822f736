//! From a rate-`k` gadget code back to a unit-rate multiple-unicast code.
//!
//! For branch `i`, `psi_i` guesses the `b_i` signal from the `z'_i` signal and
//! `pi_i` guesses the `a_i` signal from the `b_i` signal, both by majority
//! over the good messages. Terminal `t_i` of `N` then decodes with
//! `phi_{z_i} . pi_i . psi_i . phi_{z'_i}` while every edge of `N` keeps its
//! gadget encoder.

mod lemmas;
mod trial;

pub use lemmas::{
    lemma2_witness, lemma4_witnesses, pair_deletion, pi_partition, Lemma2Witness, Lemma4Witnesses, PairDeletion,
    PiPartition,
};
pub use trial::{perturb_code, run_trial, BranchTrial, Trial};

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codeeval::{expand_truth_table, is_identity, ArgPlan, CodedInstance, LocalFunction, NetworkCode};
use crate::error::{Error, Result};
use crate::rational::{self, count_within, prob_within, Rational};
use crate::reduction::{rebind, GadgetInstance};
use crate::verifier::{cut_images, verify_mu, verify_nec, CutImages, MuReport, VerificationReport, VerifyOptions};

/// The conditional message classes of one branch, all restricted to good
/// messages and keyed by signal values.
#[derive(Debug, Clone, Default)]
pub struct Classes {
    pub by_zp: BTreeMap<u64, Vec<u64>>,
    pub by_zp_b: BTreeMap<(u64, u64), Vec<u64>>,
    pub by_a: BTreeMap<u64, Vec<u64>>,
    pub by_a_b: BTreeMap<(u64, u64), Vec<u64>>,
    pub by_b: BTreeMap<u64, Vec<u64>>,
}

impl Classes {
    pub fn new(images: &CutImages, i: usize) -> Self {
        let mut c = Classes::default();
        for r in images.rows() {
            let (a, b, zp) = (r.a[i], r.b[i], r.zp[i]);
            c.by_zp.entry(zp).or_default().push(r.message);
            c.by_zp_b.entry((zp, b)).or_default().push(r.message);
            c.by_a.entry(a).or_default().push(r.message);
            c.by_a_b.entry((a, b)).or_default().push(r.message);
            c.by_b.entry(b).or_default().push(r.message);
        }
        c
    }

    fn size<K: Ord>(map: &BTreeMap<K, Vec<u64>>, key: &K) -> usize {
        map.get(key).map_or(0, Vec::len)
    }

    pub fn zp(&self, z: u64) -> &[u64] {
        self.by_zp.get(&z).map_or(&[], Vec::as_slice)
    }

    pub fn a(&self, a: u64) -> &[u64] {
        self.by_a.get(&a).map_or(&[], Vec::as_slice)
    }

    pub fn b(&self, b: u64) -> &[u64] {
        self.by_b.get(&b).map_or(&[], Vec::as_slice)
    }

    pub fn zp_b_count(&self, z: u64, b: u64) -> usize {
        Self::size(&self.by_zp_b, &(z, b))
    }

    pub fn a_b_count(&self, a: u64, b: u64) -> usize {
        Self::size(&self.by_a_b, &(a, b))
    }
}

/// Largest count wins; ties go to the smallest candidate; no candidates give 0.
fn argmax(candidates: impl Iterator<Item = (u64, usize)>) -> u64 {
    let mut best: Option<(u64, usize)> = None;
    for (v, c) in candidates {
        if c > 0 && best.is_none_or(|(bv, bc)| c > bc || (c == bc && v < bv)) {
            best = Some((v, c));
        }
    }
    best.map_or(0, |(v, _)| v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchTables {
    /// Indexed by the `z'_i` signal.
    pub psi: Vec<u64>,
    /// Indexed by the `b_i` signal.
    pub pi: Vec<u64>,
    /// Good messages with `psi(z'_i(m)) != b_i(m)`.
    pub psi_mistakes: Vec<u64>,
    /// Good messages with `pi(b_i(m)) != a_i(m)`.
    pub pi_mistakes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferTables {
    pub fingerprint: String,
    pub k: usize,
    pub n: u32,
    pub branches: Vec<BranchTables>,
}

/// `psi_i` and its mistake set.
pub fn build_psi(images: &CutImages, i: usize) -> (Vec<u64>, Vec<u64>) {
    let c = Classes::new(images, i);
    let size = 1u64 << images.n();
    let psi: Vec<u64> = (0..size)
        .map(|z| argmax((0..size).map(|b| (b, c.zp_b_count(z, b)))))
        .collect();
    let mistakes = images
        .rows()
        .iter()
        .filter(|r| psi[r.zp[i] as usize] != r.b[i])
        .map(|r| r.message)
        .collect();
    (psi, mistakes)
}

/// `pi_i` and its mistake set.
pub fn build_pi(images: &CutImages, i: usize) -> (Vec<u64>, Vec<u64>) {
    let c = Classes::new(images, i);
    let size = 1u64 << images.n();
    let pi: Vec<u64> = (0..size)
        .map(|b| argmax((0..size).map(|a| (a, c.a_b_count(a, b)))))
        .collect();
    let mistakes = images
        .rows()
        .iter()
        .filter(|r| pi[r.b[i] as usize] != r.a[i])
        .map(|r| r.message)
        .collect();
    (pi, mistakes)
}

pub fn build_tables(images: &CutImages) -> TransferTables {
    let branches = (0..images.k())
        .into_par_iter()
        .map(|i| {
            let (psi, psi_mistakes) = build_psi(images, i);
            let (pi, pi_mistakes) = build_pi(images, i);
            BranchTables {
                psi,
                pi,
                psi_mistakes,
                pi_mistakes,
            }
        })
        .collect();
    TransferTables {
        fingerprint: images.fingerprint().to_string(),
        k: images.k(),
        n: images.n(),
        branches,
    }
}

fn require_rate_k(g: &GadgetInstance, code: &NetworkCode) -> Result<()> {
    let k = g.k() as u32;
    if code.message_bits != k * code.block_length {
        return Err(Error::Precondition(format!(
            "transfer needs rate exactly k = {k}; the code has rate {}",
            rational::format(code.rate())
        )));
    }
    Ok(())
}

fn require_relay_form(g: &GadgetInstance, code: &NetworkCode) -> Result<()> {
    let net = g.network();
    for b in &g.branches {
        let name = net.edge_name(b.z);
        if !is_identity(code.encoder(name)?, code.block_length)? {
            return Err(Error::NotRelayNormalized { edge: name.to_string() });
        }
    }
    Ok(())
}

/// Assembles the unit-rate code for `N`.
pub fn transfer_code(
    g: &GadgetInstance,
    nec_code: &NetworkCode,
    tables: &TransferTables,
    max_entries: u64,
) -> Result<NetworkCode> {
    let actual = nec_code.fingerprint();
    if tables.fingerprint != actual {
        return Err(Error::FingerprintMismatch {
            expected: tables.fingerprint.clone(),
            actual,
        });
    }
    require_rate_k(g, nec_code)?;
    require_relay_form(g, nec_code)?;
    if tables.k != g.k() || tables.n != nec_code.block_length {
        return Err(Error::CodeMismatch("tables were built for a different shape".into()));
    }

    let n = nec_code.block_length;
    let net = g.network();
    let inner = &g.provenance.network;
    let gl = g.nec.layout();
    let il = g.provenance.layout();
    let mut out = NetworkCode::new(n, n);

    for (j, &ge) in g.inner_edges.iter().enumerate() {
        let name = net.edge_name(ge);
        let from = ArgPlan::at(net, &gl, net.edge(ge).tail, n, nec_code.message_bits);
        let to = ArgPlan::at(inner, &il, inner.edge(crate::netmodel::EdgeId(j)).tail, n, n);
        let f = rebind(nec_code.encoder(name)?, &from.widths, &to.widths, max_entries)?;
        out.encoders.insert(name.to_string(), f);
    }

    for sink in &il.sinks {
        let gnode = g.inner_nodes[sink.node.0];
        let from = ArgPlan::at(net, &gl, gnode, n, nec_code.message_bits);
        let to = ArgPlan::at(inner, &il, sink.node, n, n);
        let mut parts = Vec::with_capacity(sink.slots.len());
        for &slot in &sink.slots {
            let b = &g.branches[slot];
            let t = &tables.branches[slot];
            // tabulated so that the psi stage is indexed by the full n-bit signal
            let phi_zp = rebind(nec_code.encoder(net.edge_name(b.zp))?, &from.widths, &to.widths, max_entries)
                .and_then(|f| expand_truth_table(&f, &to.widths, max_entries))?;
            let phi_z = nec_code.encoder(net.edge_name(b.z))?.clone();
            let mut stages = vec![
                phi_zp,
                LocalFunction::Table(t.psi.clone()),
                LocalFunction::Table(t.pi.clone()),
                phi_z,
            ];
            if sink.slots.len() > 1 {
                stages.push(LocalFunction::slice(0, n));
            }
            parts.push(LocalFunction::Compose(stages));
        }
        let f = if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            LocalFunction::Concat(parts)
        };
        out.decoders.insert(inner.node_name(sink.node).to_string(), f);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchEvents {
    /// Message tuple outside `{z(m) : m good}`.
    #[serde(with = "rational::json")]
    pub e1: Rational,
    /// Message tuple inside `{z(m) : m in M^psi_i}`.
    #[serde(with = "rational::json")]
    pub e2: Rational,
    /// Message tuple inside `{z(m) : m in M^pi_i}`.
    #[serde(with = "rational::json")]
    pub e3: Rational,
    pub psi_mistakes: u64,
    pub pi_mistakes: u64,
    pub e1_within: bool,
    pub e2_within: bool,
    pub e3_within: bool,
    pub psi_mistakes_within: bool,
    pub pi_mistakes_within: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferReport {
    pub k: usize,
    pub n: u32,
    #[serde(with = "rational::json")]
    pub epsilon: Rational,
    #[serde(with = "rational::json")]
    pub epsilon_tau: Rational,
    /// Sum over branches of the three event probabilities.
    #[serde(with = "rational::json")]
    pub union_bound: Rational,
    /// `6 k epsilon`.
    #[serde(with = "rational::json")]
    pub bound: Rational,
    pub branches: Vec<BranchEvents>,
    pub within_union_bound: bool,
    pub holds: bool,
    pub fingerprint: String,
}

impl TransferReport {
    /// Every recorded inequality holds.
    pub fn all_within(&self) -> bool {
        self.holds
            && self.within_union_bound
            && self.branches.iter().all(|b| {
                b.e1_within && b.e2_within && b.e3_within && b.psi_mistakes_within && b.pi_mistakes_within
            })
    }
}

pub fn transfer_report(images: &CutImages, tables: &TransferTables, epsilon_tau: Rational) -> Result<TransferReport> {
    if tables.fingerprint != images.fingerprint() {
        return Err(Error::FingerprintMismatch {
            expected: tables.fingerprint.clone(),
            actual: images.fingerprint().to_string(),
        });
    }
    if !images.rate_k() {
        return Err(Error::Precondition("event probabilities need a rate-k code".into()));
    }
    let eps = images.epsilon();
    let space = images.space();
    let z_of = |m: u64| images.pack(&images.row(m).expect("good message").z);
    let z_good: BTreeSet<u64> = images.rows().iter().map(|r| images.pack(&r.z)).collect();
    let e1 = Rational::from_integer(1) - Rational::new(z_good.len() as u64, space);
    let branches: Vec<BranchEvents> = tables
        .branches
        .iter()
        .map(|t| {
            let e2 = Rational::new(t.psi_mistakes.iter().map(|&m| z_of(m)).collect::<BTreeSet<_>>().len() as u64, space);
            let e3 = Rational::new(t.pi_mistakes.iter().map(|&m| z_of(m)).collect::<BTreeSet<_>>().len() as u64, space);
            BranchEvents {
                e1,
                e2,
                e3,
                psi_mistakes: t.psi_mistakes.len() as u64,
                pi_mistakes: t.pi_mistakes.len() as u64,
                e1_within: prob_within(e1, 1, eps),
                e2_within: prob_within(e2, 2, eps),
                e3_within: prob_within(e3, 3, eps),
                psi_mistakes_within: count_within(t.psi_mistakes.len() as u64, 2, eps, space),
                pi_mistakes_within: count_within(t.pi_mistakes.len() as u64, 3, eps, space),
            }
        })
        .collect();
    // the union bound may exceed 1, so keep it as a plain ratio sum
    let union_bound = branches
        .iter()
        .fold(Rational::from_integer(0), |acc, b| acc + b.e1 + b.e2 + b.e3);
    let k = images.k() as u64;
    let bound = eps * Rational::from_integer(6 * k);
    Ok(TransferReport {
        k: images.k(),
        n: images.n(),
        epsilon: eps,
        epsilon_tau,
        union_bound,
        bound,
        within_union_bound: epsilon_tau <= union_bound,
        holds: prob_within(epsilon_tau, 6 * k, eps),
        branches,
        fingerprint: tables.fingerprint.clone(),
    })
}

/// Every artifact of one forward transfer.
#[derive(Debug, Clone)]
pub struct TransferRun {
    pub normalized: NetworkCode,
    pub verification: VerificationReport,
    pub images: CutImages,
    pub tables: TransferTables,
    pub code: NetworkCode,
    pub mu: MuReport,
    pub report: TransferReport,
}

/// Normalizes, verifies, tabulates, transfers and re-verifies.
pub fn run_transfer(g: &GadgetInstance, code: &NetworkCode, opts: &VerifyOptions) -> Result<TransferRun> {
    require_rate_k(g, code)?;
    let pairs: Vec<_> = g.branches.iter().map(|b| (b.a, b.z)).collect();
    let normalized = crate::codeeval::normalize_relay(&g.nec, code, &pairs, opts.limits.max_table_entries)?;
    let verification = verify_nec(&g.nec, &normalized, opts)?;
    let images = cut_images(g, &normalized, &verification)?;
    let tables = build_tables(&images);
    let tau = transfer_code(g, &normalized, &tables, opts.limits.max_table_entries)?;
    let mu = verify_mu(&g.provenance, &tau, &opts.limits)?;
    let report = transfer_report(&images, &tables, mu.epsilon)?;
    Ok(TransferRun {
        normalized,
        verification,
        images,
        tables,
        code: tau,
        mu,
        report,
    })
}

#[cfg(test)]
mod tests;
