//! Exhaustive adversarial verification.
//!
//! Every message is simulated against the no-error pattern and every pattern
//! realizing a set of the adversary class. A message is good iff it decodes
//! correctly under all of them; epsilon is the exact fraction of bad messages.

mod images;
mod patterns;

pub use images::{cut_images, CutImages, ImageRow};
pub use patterns::{enumerate_patterns, pattern_count, ErrorSemantics, PatternStream};

use rayon::prelude::*;

use crate::codeeval::{split_message, ErrorPattern, Evaluator, NetworkCode};
use crate::error::{Error, Result};
use crate::netmodel::{MultipleUnicastInstance, NecInstance};
use crate::rational::Rational;
use crate::Limits;

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub limits: Limits,
    pub semantics: ErrorSemantics,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadMessage {
    pub message: u64,
    /// First pattern, in enumeration order, under which `message` misdecodes.
    pub witness: ErrorPattern,
    pub decoded: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub message_bits: u32,
    pub good: Vec<u64>,
    pub bad: Vec<BadMessage>,
    pub epsilon: Rational,
    pub pattern_count: u64,
    pub semantics: ErrorSemantics,
    pub fingerprint: String,
}

impl VerificationReport {
    pub fn message_count(&self) -> u64 {
        1u64 << self.message_bits
    }

    pub fn is_good(&self, m: u64) -> bool {
        self.good.binary_search(&m).is_ok()
    }
}

enum Verdict {
    Good,
    Bad(ErrorPattern, u64),
}

fn message_space(bits: u32, max_messages: u64) -> Result<u64> {
    if bits >= 63 || (1u64 << bits) > max_messages {
        return Err(Error::limit("max messages", 1u128 << bits.min(127), max_messages));
    }
    Ok(1u64 << bits)
}

/// Partitions the message space of an NEC code into good and bad messages.
pub fn verify_nec(inst: &NecInstance, code: &NetworkCode, opts: &VerifyOptions) -> Result<VerificationReport> {
    let eval = Evaluator::new(inst, code)?;
    let patterns: Vec<ErrorPattern> =
        enumerate_patterns(inst, code.block_length, opts.semantics, opts.limits.max_patterns)?.collect();
    let count = message_space(code.message_bits, opts.limits.max_messages)?;

    let verdicts: Vec<Verdict> = (0..count)
        .into_par_iter()
        .map(|m| {
            for r in &patterns {
                let decoded = eval.run(&[m], r)?.estimates[0];
                if decoded != m {
                    return Ok(Verdict::Bad(r.clone(), decoded));
                }
            }
            Ok(Verdict::Good)
        })
        .collect::<Result<_>>()?;

    let mut good = Vec::new();
    let mut bad = Vec::new();
    for (m, v) in verdicts.into_iter().enumerate() {
        match v {
            Verdict::Good => good.push(m as u64),
            Verdict::Bad(witness, decoded) => bad.push(BadMessage {
                message: m as u64,
                witness,
                decoded,
            }),
        }
    }
    Ok(VerificationReport {
        message_bits: code.message_bits,
        epsilon: Rational::new(bad.len() as u64, count),
        good,
        bad,
        pattern_count: patterns.len() as u64,
        semantics: opts.semantics,
        fingerprint: code.fingerprint(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailingTuple {
    pub message: Vec<u64>,
    pub estimates: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuReport {
    pub message_bits: u32,
    pub tuple_count: u64,
    pub epsilon: Rational,
    pub failing: Vec<FailingTuple>,
    pub fingerprint: String,
}

/// Error probability of a multiple-unicast code under independent uniform
/// messages: the fraction of joint tuples for which some terminal misdecodes.
pub fn verify_mu(inst: &MultipleUnicastInstance, code: &NetworkCode, limits: &Limits) -> Result<MuReport> {
    let eval = Evaluator::new(inst, code)?;
    let k = inst.k();
    let total_bits = code.message_bits as u64 * k as u64;
    if total_bits >= 63 {
        return Err(Error::limit("max messages", 1u128 << total_bits.min(127), limits.max_messages));
    }
    let count = message_space(total_bits as u32, limits.max_messages)?;
    let none = ErrorPattern::none();

    let failing: Vec<Option<FailingTuple>> = (0..count)
        .into_par_iter()
        .map(|idx| {
            let message = split_message(idx, k, code.message_bits);
            let trace = eval.run(&message, &none)?;
            Ok((trace.estimates != message).then_some(FailingTuple {
                message,
                estimates: trace.estimates,
            }))
        })
        .collect::<Result<_>>()?;
    let failing: Vec<FailingTuple> = failing.into_iter().flatten().collect();
    Ok(MuReport {
        message_bits: code.message_bits,
        tuple_count: count,
        epsilon: Rational::new(failing.len() as u64, count),
        failing,
        fingerprint: code.fingerprint(),
    })
}
