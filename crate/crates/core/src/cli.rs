//! The `necwb` command line. All input and output goes through JSON files.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::counterexample::{build_cx_code, build_cx_code_rate_k, build_cx_instances, demonstrate_unachievability};
use crate::error::{Error, Result};
use crate::files::{self, gadget_to_file, Instance, MuReportFile, ReportFile};
use crate::netmodel::{cutset_rate_bound, min_cut_capacity};
use crate::rational::{self, Rational};
use crate::reduction::{backward_embed, build_gadget};
use crate::transfer::{run_transfer, run_trial, PiPartition, TransferReport};
use crate::verifier::{pattern_count, verify_mu, verify_nec, ErrorSemantics, VerifyOptions};
use crate::Limits;

pub use crate::files::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERRORS_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMITS: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "necwb", version, about = "Network error correction workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone)]
struct Common {
    /// Output file; JSON goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for exhaustive enumeration (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = Limits::default().max_patterns)]
    max_patterns: u64,
    #[arg(long, default_value_t = Limits::default().max_messages)]
    max_messages: u64,
    #[arg(long, default_value_t = Limits::default().max_cut_edges)]
    max_cut_edges: usize,
    /// Let the adversary jam any nonempty subset of an adversary set.
    #[arg(long)]
    closed_down: bool,
}

impl Common {
    fn limits(&self) -> Result<Limits> {
        if self.max_patterns == 0 || self.max_messages == 0 || self.max_cut_edges == 0 {
            return Err(Error::Precondition("limits must be positive".into()));
        }
        Ok(Limits {
            max_patterns: self.max_patterns,
            max_messages: self.max_messages,
            max_cut_edges: self.max_cut_edges,
            ..Limits::default()
        })
    }

    fn options(&self) -> Result<VerifyOptions> {
        Ok(VerifyOptions {
            limits: self.limits()?,
            semantics: if self.closed_down {
                ErrorSemantics::ClosedDown
            } else {
                ErrorSemantics::Strict
            },
        })
    }

    fn config(&self, command: &str, inputs: &[&Path], seed: Option<u64>) -> RunConfig {
        RunConfig {
            command: command.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            max_patterns: self.max_patterns,
            max_messages: self.max_messages,
            max_cut_edges: self.max_cut_edges,
            workers: self.workers,
            seed,
        }
    }

    fn emit<T: Serialize>(&self, value: &T) -> Result<()> {
        match &self.out {
            Some(p) => files::write_json(p, value),
            None => {
                print!("{}", files::to_json(value));
                Ok(())
            }
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exhaustively verify a code; exit 0 iff its error is zero.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Wrap a multiple-unicast instance in the reduction gadget.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Lift a unit-rate multiple-unicast code to a code for its gadget.
    Embed {
        /// Gadget instance (an NEC file with roles).
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Transfer a rate-k gadget code to a multiple-unicast code and check the
    /// error bounds.
    Transfer {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: PathBuf,
        /// Where to write the transfer report; stderr summary only when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Build and verify the zero-error counterexample family.
    Cx {
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Block lengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4])]
        n: Vec<u32>,
        /// Also search every unit-rate length-1 code of the two-relay network (k = 2 only).
        #[arg(long)]
        n1_search: bool,
        /// Write the gadget instance here.
        #[arg(long)]
        write_instance: Option<PathBuf>,
        /// Write the code for the single given block length here.
        #[arg(long)]
        write_code: Option<PathBuf>,
        /// Write the rate-k reading of the code instead of the native one.
        #[arg(long)]
        rate_k: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Describe an instance, or run one seeded corruption trial on a gadget code.
    Analyze {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        code: Option<PathBuf>,
        /// Seed for the corruption trial (requires --code).
        #[arg(long)]
        seed: Option<u64>,
        /// Block lengths for pattern counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Verify { common, .. }
            | Command::Reduce { common, .. }
            | Command::Embed { common, .. }
            | Command::Transfer { common, .. }
            | Command::Cx { common, .. }
            | Command::Analyze { common, .. } => common,
        }
    }
}

/// Maps an error to the process exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LimitExceeded { .. } => EXIT_LIMITS,
        Error::Inconsistent(_) => EXIT_ERRORS_FOUND,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command.common().workers {
        Some(0) => Err(Error::Precondition("--workers must be positive".into())),
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(Error::Precondition(format!("cannot start worker pool: {e}"))),
        },
        None => dispatch(&cli.command),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Verify { instance, code, common } => cmd_verify(instance, code, common),
        Command::Reduce { instance, common } => cmd_reduce(instance, common),
        Command::Embed { instance, code, common } => cmd_embed(instance, code, common),
        Command::Transfer {
            instance,
            code,
            report,
            common,
        } => cmd_transfer(instance, code, report.as_deref(), common),
        Command::Cx {
            k,
            n,
            n1_search,
            write_instance,
            write_code,
            rate_k,
            common,
        } => cmd_cx(*k, n, *n1_search, write_instance.as_deref(), write_code.as_deref(), *rate_k, common),
        Command::Analyze {
            instance,
            code,
            seed,
            n,
            common,
        } => cmd_analyze(instance, code.as_deref(), *seed, n, common),
    }
}

fn status(eps: Rational) -> i32 {
    if eps == Rational::from_integer(0) {
        EXIT_OK
    } else {
        EXIT_ERRORS_FOUND
    }
}

fn cmd_verify(instance: &Path, code_path: &Path, common: &Common) -> Result<i32> {
    let inst = files::read_instance(instance)?;
    let code = files::read_code(code_path)?;
    let config = common.config("verify", &[instance, code_path], None);
    let eps = match &inst {
        Instance::MultipleUnicast(mu) => {
            let r = verify_mu(mu, &code, &common.limits()?)?;
            common.emit(&MuReportFile::from_report(&r, config))?;
            r.epsilon
        }
        _ => {
            let nec = inst.nec().expect("NEC view");
            let r = verify_nec(nec, &code, &common.options()?)?;
            common.emit(&ReportFile::from_report(&nec.network, &r, config))?;
            eprintln!(
                "epsilon = {} ({} of {} messages bad, {} patterns)",
                rational::format(r.epsilon),
                r.bad.len(),
                r.message_count(),
                r.pattern_count
            );
            r.epsilon
        }
    };
    Ok(status(eps))
}

fn cmd_reduce(instance: &Path, common: &Common) -> Result<i32> {
    let mu = match files::read_instance(instance)? {
        Instance::MultipleUnicast(mu) => mu,
        other => {
            return Err(Error::InvalidInstance(format!(
                "reduce needs a multiple_unicast instance, got {}",
                other.kind()
            )))
        }
    };
    let g = build_gadget(&mu)?;
    common.emit(&gadget_to_file(&g))?;
    Ok(EXIT_OK)
}

fn read_gadget(path: &Path) -> Result<crate::reduction::GadgetInstance> {
    match files::read_instance(path)? {
        Instance::Gadget(g) => Ok(g),
        other => Err(Error::NotGadget(format!("{} has kind {}", path.display(), other.kind()))),
    }
}

fn cmd_embed(instance: &Path, code_path: &Path, common: &Common) -> Result<i32> {
    let g = read_gadget(instance)?;
    let mu_code = files::read_code(code_path)?;
    let code = backward_embed(&g, &mu_code, mu_code.block_length, Limits::default().max_table_entries)?;
    common.emit(&code)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct TransferOutput<'a> {
    #[serde(with = "rational::json")]
    nec_epsilon: Rational,
    #[serde(with = "rational::json")]
    mu_epsilon: Rational,
    report: &'a TransferReport,
    config: RunConfig,
}

fn cmd_transfer(instance: &Path, code_path: &Path, report: Option<&Path>, common: &Common) -> Result<i32> {
    let g = read_gadget(instance)?;
    let code = files::read_code(code_path)?;
    let run = run_transfer(&g, &code, &common.options()?)?;
    common.emit(&run.code)?;
    let out = TransferOutput {
        nec_epsilon: run.verification.epsilon,
        mu_epsilon: run.mu.epsilon,
        report: &run.report,
        config: common.config("transfer", &[instance, code_path], None),
    };
    if let Some(p) = report {
        files::write_json(p, &out)?;
    }
    eprintln!(
        "epsilon = {}, transferred epsilon = {} (bound 6k*epsilon = {})",
        rational::format(run.report.epsilon),
        rational::format(run.report.epsilon_tau),
        rational::format(run.report.bound)
    );
    Ok(if run.report.all_within() {
        EXIT_OK
    } else {
        EXIT_ERRORS_FOUND
    })
}

#[derive(Debug, Serialize)]
struct CxOutput {
    #[serde(flatten)]
    demonstration: crate::counterexample::Demonstration,
    config: RunConfig,
}

fn cmd_cx(
    k: usize,
    ns: &[u32],
    n1_search: bool,
    write_instance: Option<&Path>,
    write_code: Option<&Path>,
    rate_k: bool,
    common: &Common,
) -> Result<i32> {
    if k < 2 {
        return Err(Error::Precondition(format!("k must be at least 2, got {k}")));
    }
    let opts = common.options()?;
    let set: BTreeSet<u32> = ns.iter().copied().collect();
    if let Some(p) = write_instance {
        let (_, g) = build_cx_instances(k)?;
        files::write_json(p, &gadget_to_file(&g))?;
    }
    if let Some(p) = write_code {
        let n = match ns {
            [n] => *n,
            _ => return Err(Error::Precondition("--write-code needs exactly one --n".into())),
        };
        if n < 2 {
            return Err(Error::Precondition(format!("block length {n} is below 2")));
        }
        let (_, g) = build_cx_instances(k)?;
        let build = if rate_k { build_cx_code_rate_k } else { build_cx_code };
        files::write_json(p, &build(&g, k, n, Limits::default().max_table_entries)?.code)?;
    }
    let demo = demonstrate_unachievability(k, &set, n1_search, &opts)?;
    for notice in &demo.notices {
        eprintln!("notice: {notice}");
    }
    let zero = Rational::from_integer(0);
    let ok = demo.rate_points.iter().all(|p| p.epsilon.is_none_or(|e| e == zero))
        && demo.n1_search.as_ref().is_none_or(|s| s.satisfying == 0);
    common.emit(&CxOutput {
        demonstration: demo,
        config: common.config("cx", &[], None),
    })?;
    Ok(if ok { EXIT_OK } else { EXIT_ERRORS_FOUND })
}

#[derive(Debug, Serialize)]
struct PatternCountEntry {
    n: u32,
    /// Decimal string: counts can exceed 64 bits.
    patterns: String,
}

#[derive(Debug, Serialize)]
struct Description {
    kind: &'static str,
    nodes: usize,
    edges: usize,
    topological_order: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pairs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", with = "rational::json_opt")]
    cutset_bound: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_cut: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adversary_sets: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pattern_counts: Vec<PatternCountEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    branches: Option<usize>,
    config: RunConfig,
}

#[derive(Debug, Serialize)]
struct BranchSummary {
    psi_mistakes: u64,
    pi_mistakes: u64,
    deletions: u64,
    deletion_guarantees: bool,
    lemma2_witnesses: usize,
    lemma2_distinct: bool,
    lemma4_elements: usize,
    partition: PiPartition,
}

#[derive(Debug, Serialize)]
struct TrialSummary<'a> {
    seed: u64,
    perturbed: &'a [String],
    #[serde(with = "rational::json")]
    epsilon_raw: Rational,
    #[serde(with = "rational::json")]
    epsilon: Rational,
    a_err: u64,
    b_err: u64,
    a_err_within: bool,
    b_err_within: bool,
    branches: Vec<BranchSummary>,
    transfer: &'a TransferReport,
    holds: bool,
    config: RunConfig,
}

fn cmd_analyze(instance: &Path, code: Option<&Path>, seed: Option<u64>, ns: &[u32], common: &Common) -> Result<i32> {
    let inst = files::read_instance(instance)?;
    if let Some(code_path) = code {
        let seed = seed.ok_or_else(|| Error::Precondition("--code needs --seed".into()))?;
        let Instance::Gadget(g) = &inst else {
            return Err(Error::NotGadget("corruption trials need a gadget instance".into()));
        };
        let base = files::read_code(code_path)?;
        let t = run_trial(g, &base, seed, &common.options()?)?;
        let branches: Vec<BranchSummary> = t
            .branches
            .iter()
            .map(|b| BranchSummary {
                psi_mistakes: b.psi_mistakes,
                pi_mistakes: b.pi_mistakes,
                deletions: b.deletions,
                deletion_guarantees: b.deletion_guarantees,
                lemma2_witnesses: b.lemma2.len(),
                lemma2_distinct: b.lemma2_distinct,
                lemma4_elements: b.lemma4.iter().map(|(_, w)| w.elements.len()).sum(),
                partition: b.partition.clone(),
            })
            .collect();
        let a_err_within = rational::count_within(t.a_err, 1, t.epsilon, t.space);
        let b_err_within = rational::count_within(t.b_err, 1, t.epsilon, t.space);
        let holds = a_err_within
            && b_err_within
            && t.run.report.all_within()
            && t.branches.iter().all(|b| {
                b.deletions <= t.b_err && b.deletion_guarantees && b.lemma2_distinct && b.partition.all_hold()
            });
        common.emit(&TrialSummary {
            seed,
            perturbed: &t.perturbed,
            epsilon_raw: t.epsilon_raw,
            epsilon: t.epsilon,
            a_err: t.a_err,
            b_err: t.b_err,
            a_err_within,
            b_err_within,
            branches,
            transfer: &t.run.report,
            holds,
            config: common.config("analyze", &[instance, code_path], Some(seed)),
        })?;
        return Ok(if holds { EXIT_OK } else { EXIT_ERRORS_FOUND });
    }

    let net = inst.network();
    let mut d = Description {
        kind: inst.kind(),
        nodes: net.node_count(),
        edges: net.edge_count(),
        topological_order: net.topo_order().iter().map(|&v| net.node_name(v).to_string()).collect(),
        pairs: None,
        cutset_bound: None,
        min_cut: None,
        adversary_sets: None,
        pattern_counts: Vec::new(),
        branches: None,
        config: common.config("analyze", &[instance], seed),
    };
    if let Instance::MultipleUnicast(mu) = &inst {
        d.pairs = Some(mu.k());
        d.cutset_bound = Some(cutset_rate_bound(mu, common.max_cut_edges)?);
    }
    if let Some(nec) = inst.nec() {
        d.min_cut = Some(min_cut_capacity(net, nec.source, nec.terminal));
        d.adversary_sets = Some(nec.adversary_class().len());
        let sem = common.options()?.semantics;
        d.pattern_counts = ns
            .iter()
            .map(|&n| PatternCountEntry {
                n,
                patterns: pattern_count(nec, n, sem).to_string(),
            })
            .collect();
    }
    if let Instance::Gadget(g) = &inst {
        d.branches = Some(g.k());
    }
    common.emit(&d)?;
    Ok(EXIT_OK)
}
