use std::collections::BTreeSet;

use super::VerificationReport;
use crate::codeeval::{pack_message, ErrorPattern, Evaluator, NetworkCode, Trace};
use crate::error::{Error, Result};
use crate::netmodel::EdgeId;
use crate::rational::Rational;
use crate::reduction::{BranchRoles, GadgetInstance};

/// Error-free signals on the six branch cuts for one good message. Entry `i`
/// of each vector belongs to branch `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRow {
    pub message: u64,
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub z: Vec<u64>,
    pub zp: Vec<u64>,
    pub x: Vec<u64>,
    pub y: Vec<u64>,
}

/// Cut images of every good message of a verified gadget code.
///
/// Cut vectors are packed into one integer with branch 1 in the lowest `n`
/// bits, so `[2^n]^k` is `0..2^{kn}`.
#[derive(Debug, Clone)]
pub struct CutImages {
    k: usize,
    n: u32,
    message_bits: u32,
    epsilon: Rational,
    fingerprint: String,
    rows: Vec<ImageRow>,
    a_good: BTreeSet<u64>,
    b_good: BTreeSet<u64>,
    branches: Vec<BranchRoles>,
    b_inputs: Vec<usize>,
    eval: Evaluator,
}

/// Evaluates a verified gadget code error-free on every good message.
pub fn cut_images(g: &GadgetInstance, code: &NetworkCode, report: &VerificationReport) -> Result<CutImages> {
    g.check_structure()?;
    let fingerprint = code.fingerprint();
    if fingerprint != report.fingerprint {
        return Err(Error::FingerprintMismatch {
            expected: report.fingerprint.clone(),
            actual: fingerprint,
        });
    }
    let eval = Evaluator::new(&g.nec, code)?;
    let n = code.block_length;
    let none = ErrorPattern::none();
    let mut rows = Vec::with_capacity(report.good.len());
    for &m in &report.good {
        let t = eval.run(&[m], &none)?;
        let pick = |f: fn(&BranchRoles) -> EdgeId| g.branches.iter().map(|b| t.signals[f(b).0]).collect();
        rows.push(ImageRow {
            message: m,
            a: pick(|b| b.a),
            b: pick(|b| b.b),
            z: pick(|b| b.z),
            zp: pick(|b| b.zp),
            x: pick(|b| b.x),
            y: pick(|b| b.y),
        });
    }
    let a_good: BTreeSet<u64> = rows.iter().map(|r| pack_message(&r.a, n)).collect();
    let b_good: BTreeSet<u64> = rows.iter().map(|r| pack_message(&r.b, n)).collect();
    if a_good.len() != rows.len() || b_good.len() != rows.len() {
        return Err(Error::Inconsistent(
            "two good messages share a cut image on the a- or b-cut".into(),
        ));
    }
    Ok(CutImages {
        k: g.k(),
        n,
        message_bits: code.message_bits,
        epsilon: report.epsilon,
        fingerprint: report.fingerprint.clone(),
        rows,
        a_good,
        b_good,
        branches: g.branches.clone(),
        b_inputs: g.b_positions(),
        eval,
    })
}

impl CutImages {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn message_bits(&self) -> u32 {
        self.message_bits
    }

    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// True when the code has rate exactly `k`, the setting of the lemma bounds.
    pub fn rate_k(&self) -> bool {
        self.message_bits as u64 == self.k as u64 * self.n as u64
    }

    /// `2^{kn}`, the size of `[2^n]^k`.
    pub fn space(&self) -> u64 {
        1u64 << (self.k as u32 * self.n)
    }

    pub fn rows(&self) -> &[ImageRow] {
        &self.rows
    }

    pub fn row(&self, m: u64) -> Option<&ImageRow> {
        self.rows
            .binary_search_by_key(&m, |r| r.message)
            .ok()
            .map(|i| &self.rows[i])
    }

    pub fn branch(&self, i: usize) -> &BranchRoles {
        &self.branches[i]
    }

    pub fn a_good(&self) -> &BTreeSet<u64> {
        &self.a_good
    }

    pub fn b_good(&self) -> &BTreeSet<u64> {
        &self.b_good
    }

    pub fn a_err_count(&self) -> u64 {
        self.space() - self.a_good.len() as u64
    }

    pub fn b_err_count(&self) -> u64 {
        self.space() - self.b_good.len() as u64
    }

    pub fn is_b_err(&self, b: u64) -> bool {
        b < self.space() && !self.b_good.contains(&b)
    }

    pub fn b_err(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.space()).filter(|b| !self.b_good.contains(b))
    }

    pub fn pack(&self, v: &[u64]) -> u64 {
        pack_message(v, self.n)
    }

    /// Runs the bound code with an error pattern.
    pub fn run(&self, m: u64, pattern: &ErrorPattern) -> Result<Trace> {
        self.eval.run(&[m], pattern)
    }

    /// Packed b-vector of a trace.
    pub fn b_of(&self, trace: &Trace) -> u64 {
        let v: Vec<u64> = self.branches.iter().map(|b| trace.signals[b.b.0]).collect();
        self.pack(&v)
    }

    /// What the terminal decodes a packed b-vector to.
    pub fn decode_b(&self, b: u64) -> Result<u64> {
        let mut inputs = vec![0u64; self.k];
        for (i, &pos) in self.b_inputs.iter().enumerate() {
            inputs[pos] = (b >> (i as u32 * self.n)) & ((1u64 << self.n) - 1);
        }
        self.eval.decode_at(0, &inputs)
    }
}
