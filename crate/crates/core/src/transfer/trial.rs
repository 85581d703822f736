//! Seeded corruption of a gadget code followed by the full transfer and every
//! lemma-level computation.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{lemma2_witness, lemma4_witnesses, pair_deletion, pi_partition, run_transfer, Classes, TransferRun};
use super::{Lemma2Witness, Lemma4Witnesses, PiPartition};
use crate::codeeval::{expand_truth_table, ArgPlan, CodedInstance, LocalFunction, NetworkCode};
use crate::error::Result;
use crate::rational::Rational;
use crate::reduction::GadgetInstance;
use crate::verifier::{verify_nec, VerifyOptions};

/// Rewrites random truth-table entries on one to three attackable edges.
/// Returns the new code and the names of the touched edges.
pub fn perturb_code(
    g: &GadgetInstance,
    code: &NetworkCode,
    seed: u64,
    max_entries: u64,
) -> Result<(NetworkCode, Vec<String>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = g.network();
    let layout = g.nec.layout();
    let scope = g.nec.attackable_edges();
    let count = rng.gen_range(1..=3usize.min(scope.len()));
    let mut chosen: Vec<_> = scope.choose_multiple(&mut rng, count).copied().collect();
    chosen.sort();
    let mut out = code.clone();
    let mut names = Vec::with_capacity(chosen.len());
    for e in chosen {
        let name = net.edge_name(e).to_string();
        let plan = ArgPlan::at(net, &layout, net.edge(e).tail, code.block_length, code.message_bits);
        let width = code.block_length * net.capacity(e);
        let mut table = match expand_truth_table(out.encoder(&name)?, &plan.widths, max_entries)? {
            LocalFunction::Table(t) => t,
            _ => unreachable!("expansion yields a table"),
        };
        let entries = rng.gen_range(1..=4usize.min(table.len()));
        for _ in 0..entries {
            let idx = rng.gen_range(0..table.len());
            table[idx] = rng.gen_range(0..1u64 << width);
        }
        out.encoders.insert(name.clone(), LocalFunction::Table(table));
        names.push(name);
    }
    Ok((out, names))
}

#[derive(Debug, Clone)]
pub struct BranchTrial {
    pub psi_mistakes: u64,
    pub pi_mistakes: u64,
    /// Pairs removed over all `z'_i` classes.
    pub deletions: u64,
    /// Every class ends no larger than its majority part and loses at least
    /// half of its non-majority members.
    pub deletion_guarantees: bool,
    /// `(m1, m2, witness)` for every deleted pair.
    pub lemma2: Vec<(u64, u64, Lemma2Witness)>,
    /// Witnesses of distinct deleted pairs are distinct b-vectors.
    pub lemma2_distinct: bool,
    /// `(a value, witnesses)` for every nonempty `a_i` class.
    pub lemma4: Vec<(u64, Lemma4Witnesses)>,
    pub partition: PiPartition,
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub seed: u64,
    pub perturbed: Vec<String>,
    /// Error of the corrupted code before relay normalization.
    pub epsilon_raw: Rational,
    /// Error of the normalized code; every bound is stated against it.
    pub epsilon: Rational,
    pub a_err: u64,
    pub b_err: u64,
    pub space: u64,
    pub branches: Vec<BranchTrial>,
    pub run: TransferRun,
}

pub fn run_trial(g: &GadgetInstance, base: &NetworkCode, seed: u64, opts: &VerifyOptions) -> Result<Trial> {
    let (code, perturbed) = perturb_code(g, base, seed, opts.limits.max_table_entries)?;
    let epsilon_raw = verify_nec(&g.nec, &code, opts)?.epsilon;
    let run = run_transfer(g, &code, opts)?;
    let images = &run.images;
    let mut branches = Vec::with_capacity(g.k());
    for i in 0..g.k() {
        let classes = Classes::new(images, i);
        let mut lemma2 = Vec::new();
        let mut guarantees = true;
        for (&zhat, members) in &classes.by_zp {
            let del = pair_deletion(images, i, zhat);
            let majority = (0..1u64 << images.n())
                .map(|b| classes.zp_b_count(zhat, b))
                .max()
                .unwrap_or(0);
            guarantees &= del.remaining.len() <= majority && 2 * del.count() >= members.len() - majority;
            for &(m1, m2) in &del.pairs {
                lemma2.push((m1, m2, lemma2_witness(images, i, m1, m2)?));
            }
        }
        let distinct: BTreeSet<u64> = lemma2.iter().map(|(_, _, w)| w.b).collect();
        let mut lemma4 = Vec::new();
        for &ahat in classes.by_a.keys() {
            lemma4.push((ahat, lemma4_witnesses(images, i, ahat)?));
        }
        let t = &run.tables.branches[i];
        branches.push(BranchTrial {
            psi_mistakes: t.psi_mistakes.len() as u64,
            pi_mistakes: t.pi_mistakes.len() as u64,
            deletions: lemma2.len() as u64,
            deletion_guarantees: guarantees,
            lemma2_distinct: distinct.len() == lemma2.len(),
            lemma2,
            lemma4,
            partition: pi_partition(images, i, &run.tables)?,
        });
    }
    Ok(Trial {
        seed,
        perturbed,
        epsilon_raw,
        epsilon: run.verification.epsilon,
        a_err: images.a_err_count(),
        b_err: images.b_err_count(),
        space: images.space(),
        branches,
        run,
    })
}
