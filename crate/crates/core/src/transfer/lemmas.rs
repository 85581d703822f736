//! Combinatorial witnesses behind the mistake-set bounds, as checkable
//! computations. Every witness is re-evaluated before it is returned.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Classes, TransferTables};
use crate::codeeval::ErrorPattern;
use crate::error::{Error, Result};
use crate::rational::count_within;
use crate::verifier::CutImages;

/// An element of `B^err` obtained by jamming `x_i` or `y_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma2Witness {
    /// Packed b-vector.
    pub b: u64,
    pub pattern: ErrorPattern,
    /// The message the pattern was applied to, and what `t` decodes `b` to.
    pub decodes_to: u64,
}

fn row(images: &CutImages, m: u64) -> Result<&crate::verifier::ImageRow> {
    images
        .row(m)
        .ok_or_else(|| Error::Precondition(format!("message {m} is not good")))
}

/// For good `m1`, `m2` with equal `z'_i` and different `b_i` signals: jam
/// `x_i` so that `m1` looks like `m2` there (`r_1`), or jam `y_i` so that `m2`
/// looks like `m1` there (`r_2`). Both runs hand `B_i` the same inputs, so at
/// least one of them yields a b-vector outside `B^good` that the terminal
/// still decodes to its own message.
pub fn lemma2_witness(images: &CutImages, i: usize, m1: u64, m2: u64) -> Result<Lemma2Witness> {
    let (r1, r2) = (row(images, m1)?, row(images, m2)?);
    if r1.zp[i] != r2.zp[i] || r1.b[i] == r2.b[i] {
        return Err(Error::Precondition(format!(
            "messages {m1} and {m2} must share z'_{} and differ on b_{}",
            i + 1,
            i + 1
        )));
    }
    let br = images.branch(i);
    let candidates = [
        (m1, ErrorPattern::single(br.x, r1.x[i] ^ r2.x[i]), r1.b[i]),
        (m2, ErrorPattern::single(br.y, r1.y[i] ^ r2.y[i]), r2.b[i]),
    ];
    for (m, pattern, own) in candidates {
        let trace = images.run(m, &pattern)?;
        if trace.signals[br.b.0] == own {
            continue;
        }
        let b = images.b_of(&trace);
        let decodes_to = images.decode_b(b)?;
        if !images.is_b_err(b) || decodes_to != m || trace.estimates[0] != m {
            return Err(Error::Inconsistent(format!(
                "jamming for ({m1}, {m2}) gave b-vector {b:#x} decoding to {decodes_to}"
            )));
        }
        return Ok(Lemma2Witness { b, pattern, decodes_to });
    }
    Err(Error::Inconsistent(format!(
        "B_{} reproduced both b-signals of ({m1}, {m2}) from identical inputs",
        i + 1
    )))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDeletion {
    /// Removed pairs in removal order.
    pub pairs: Vec<(u64, u64)>,
    /// What is left of the class.
    pub remaining: Vec<u64>,
}

impl PairDeletion {
    pub fn count(&self) -> usize {
        self.pairs.len()
    }
}

/// Repeatedly removes the lexicographically smallest pair of the class
/// `M(z'_i = zhat)` whose `b_i` signals differ.
pub fn pair_deletion(images: &CutImages, i: usize, zhat: u64) -> PairDeletion {
    let members = Classes::new(images, i)
        .zp(zhat)
        .iter()
        .map(|&m| (m, images.row(m).expect("class member is good").b[i]))
        .collect();
    delete_pairs(members)
}

/// The deletion procedure on `(message, b value)` pairs sorted by message.
pub(crate) fn delete_pairs(mut w: Vec<(u64, u64)>) -> PairDeletion {
    let mut pairs = Vec::new();
    'outer: loop {
        for x in 0..w.len() {
            for y in x + 1..w.len() {
                if w[x].1 != w[y].1 {
                    pairs.push((w[x].0, w[y].0));
                    w.remove(y);
                    w.remove(x);
                    continue 'outer;
                }
            }
        }
        break;
    }
    PairDeletion {
        pairs,
        remaining: w.into_iter().map(|(m, _)| m).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma4Witnesses {
    /// Number of distinct `b_i` signals over `M(a_i = ahat)`.
    pub l: usize,
    pub class_size: usize,
    /// `(b-vector, message it decodes to)` pairs, all distinct.
    pub elements: Vec<(u64, u64)>,
}

/// For every `m0` with `a_i(m0) = ahat` and every other `b_i` value seen in the
/// class, jams `z'_i` to carry the `z'_i` signal of that value's smallest
/// message. `B_i` then emits the other value while the rest of `b(m0)` stays,
/// which gives `(L-1)|M(ahat)|` distinct elements of `B^err`.
pub fn lemma4_witnesses(images: &CutImages, i: usize, ahat: u64) -> Result<Lemma4Witnesses> {
    let classes = Classes::new(images, i);
    let class = classes.a(ahat);
    if class.is_empty() {
        return Err(Error::Precondition(format!("no good message has a_{} = {ahat}", i + 1)));
    }
    let mut reps: Vec<(u64, u64)> = Vec::new(); // (b value, smallest message)
    for &m in class {
        let b = images.row(m).expect("good").b[i];
        if !reps.iter().any(|&(v, _)| v == b) {
            reps.push((b, m));
        }
    }
    let br = images.branch(i);
    let mut elements = Vec::new();
    for &m0 in class {
        let r0 = images.row(m0).expect("good");
        for &(bv, mj) in &reps {
            if bv == r0.b[i] {
                continue;
            }
            let rj = images.row(mj).expect("good");
            let pattern = ErrorPattern::single(br.zp, r0.zp[i] ^ rj.zp[i]);
            let trace = images.run(m0, &pattern)?;
            let b = images.b_of(&trace);
            let decoded = images.decode_b(b)?;
            if trace.signals[br.b.0] != bv || decoded != m0 || !images.is_b_err(b) {
                return Err(Error::Inconsistent(format!(
                    "jamming z'_{} for message {m0} gave b-vector {b:#x} decoding to {decoded}",
                    i + 1
                )));
            }
            elements.push((b, decoded));
        }
    }
    let distinct: BTreeSet<u64> = elements.iter().map(|&(b, _)| b).collect();
    let l = reps.len();
    if distinct.len() != elements.len() || elements.len() != (l - 1) * class.len() {
        return Err(Error::Inconsistent(format!(
            "expected {} distinct elements, got {} ({} distinct)",
            (l - 1) * class.len(),
            elements.len(),
            distinct.len()
        )));
    }
    Ok(Lemma4Witnesses {
        l,
        class_size: class.len(),
        elements,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiPartition {
    /// `a_i` values seen by at most half of `2^{(k-1)n}` good messages.
    pub a1: Vec<u64>,
    /// Remaining `a_i` values whose class shows more than one `b_i` value.
    pub a2: Vec<u64>,
    pub m1: Vec<u64>,
    pub m2: Vec<u64>,
    /// `M^pi_i` is covered by `m1` and `m2`.
    pub covers_mistakes: bool,
    pub a1_within: bool,
    pub a2_within: bool,
    pub m1_within: bool,
    pub m2_within: bool,
    /// Largest `|M(b_i = v)|` over all `v`.
    pub largest_b_class: usize,
}

impl PiPartition {
    pub fn all_hold(&self) -> bool {
        self.covers_mistakes && self.a1_within && self.a2_within && self.m1_within && self.m2_within
    }
}

pub fn pi_partition(images: &CutImages, i: usize, tables: &TransferTables) -> Result<PiPartition> {
    if !images.rate_k() {
        return Err(Error::Precondition("the partition bounds need a rate-k code".into()));
    }
    let classes = Classes::new(images, i);
    let (k, n) = (images.k() as u32, images.n());
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    for a in 0..1u64 << n {
        let class = classes.a(a);
        // |M(a)| <= 2^{(k-1)n} / 2, compared as 2|M(a)| <= 2^{(k-1)n}
        if 2 * class.len() as u64 <= 1u64 << ((k - 1) * n) {
            a1.push(a);
        } else {
            let bs: BTreeSet<u64> = class.iter().map(|&m| images.row(m).expect("good").b[i]).collect();
            if bs.len() > 1 {
                a2.push(a);
            }
        }
    }
    let in_set = |set: &[u64], m: u64| set.contains(&images.row(m).expect("good").a[i]);
    let m1: Vec<u64> = images.rows().iter().map(|r| r.message).filter(|&m| in_set(&a1, m)).collect();
    let m2: Vec<u64> = images.rows().iter().map(|r| r.message).filter(|&m| in_set(&a2, m)).collect();
    let mistakes = &tables.branches[i].pi_mistakes;
    let covers = mistakes.iter().all(|m| m1.contains(m) || m2.contains(m));
    let eps = images.epsilon();
    let largest_b_class = classes.by_b.values().map(Vec::len).max().unwrap_or(0);
    if largest_b_class as u64 > 1u64 << ((k - 1) * n) {
        return Err(Error::Inconsistent(format!(
            "{largest_b_class} good messages share one b_{} value",
            i + 1
        )));
    }
    Ok(PiPartition {
        a1_within: count_within(a1.len() as u64, 2, eps, 1 << n),
        a2_within: count_within(a2.len() as u64, 2, eps, 1 << n),
        m1_within: count_within(m1.len() as u64, 1, eps, images.space()),
        m2_within: count_within(m2.len() as u64, 2, eps, images.space()),
        covers_mistakes: covers,
        a1,
        a2,
        m1,
        m2,
        largest_b_class,
    })
}
