//! JSON file formats: instances, codes and verification reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::codeeval::{NamedPattern, NetworkCode};
use crate::error::{Error, Result};
use crate::netmodel::{EdgeSpec, MultipleUnicastInstance, NecInstance, Network, NetworkSpec};
use crate::rational::{self, Rational};
use crate::reduction::{GadgetInstance, RoleNames};
use crate::verifier::{ErrorSemantics, MuReport, VerificationReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairNames {
    pub source: String,
    pub terminal: String,
}

/// On-disk instance description. Edge order fixes the argument order of every
/// local function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceFile {
    MultipleUnicast {
        nodes: Vec<String>,
        edges: Vec<EdgeSpec>,
        pairs: Vec<PairNames>,
    },
    Nec {
        nodes: Vec<String>,
        edges: Vec<EdgeSpec>,
        source: String,
        terminal: String,
        adversary_class: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        roles: Option<BTreeMap<String, RoleNames>>,
    },
}

/// A validated instance. NEC files that carry `roles` load as gadgets.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Instance {
    MultipleUnicast(MultipleUnicastInstance),
    Nec(NecInstance),
    Gadget(GadgetInstance),
}

impl Instance {
    pub fn network(&self) -> &Network {
        match self {
            Instance::MultipleUnicast(i) => &i.network,
            Instance::Nec(i) => &i.network,
            Instance::Gadget(g) => g.network(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Instance::MultipleUnicast(_) => "multiple_unicast",
            Instance::Nec(_) => "nec",
            Instance::Gadget(_) => "nec with roles",
        }
    }

    /// The NEC view of NEC and gadget instances.
    pub fn nec(&self) -> Option<&NecInstance> {
        match self {
            Instance::Nec(i) => Some(i),
            Instance::Gadget(g) => Some(&g.nec),
            Instance::MultipleUnicast(_) => None,
        }
    }

    pub fn to_file(&self) -> InstanceFile {
        match self {
            Instance::MultipleUnicast(i) => mu_to_file(i),
            Instance::Nec(i) => nec_to_file(i, None),
            Instance::Gadget(g) => gadget_to_file(g),
        }
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<Instance> {
        match self {
            InstanceFile::MultipleUnicast { nodes, edges, pairs } => {
                let net = Network::from_spec(&NetworkSpec { nodes, edges })?;
                let names: Vec<(&str, &str)> = pairs.iter().map(|p| (p.source.as_str(), p.terminal.as_str())).collect();
                Ok(Instance::MultipleUnicast(MultipleUnicastInstance::from_names(net, &names)?))
            }
            InstanceFile::Nec {
                nodes,
                edges,
                source,
                terminal,
                adversary_class,
                roles,
            } => {
                let net = Network::from_spec(&NetworkSpec { nodes, edges })?;
                let (s, t) = (net.node(&source)?, net.node(&terminal)?);
                let class = adversary_class
                    .iter()
                    .map(|set| set.iter().map(|e| net.edge_id(e)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let nec = NecInstance::new(net, s, t, class)?;
                match roles {
                    Some(r) => Ok(Instance::Gadget(GadgetInstance::from_role_names(nec, &r)?)),
                    None => Ok(Instance::Nec(nec)),
                }
            }
        }
    }
}

pub fn mu_to_file(inst: &MultipleUnicastInstance) -> InstanceFile {
    let spec = inst.network.to_spec();
    let net = &inst.network;
    InstanceFile::MultipleUnicast {
        nodes: spec.nodes,
        edges: spec.edges,
        pairs: inst
            .pairs()
            .iter()
            .map(|p| PairNames {
                source: net.node_name(p.source).to_string(),
                terminal: net.node_name(p.terminal).to_string(),
            })
            .collect(),
    }
}

fn nec_to_file(inst: &NecInstance, roles: Option<BTreeMap<String, RoleNames>>) -> InstanceFile {
    let net = &inst.network;
    let spec = net.to_spec();
    InstanceFile::Nec {
        nodes: spec.nodes,
        edges: spec.edges,
        source: net.node_name(inst.source).to_string(),
        terminal: net.node_name(inst.terminal).to_string(),
        adversary_class: inst
            .adversary_class()
            .iter()
            .map(|set| set.iter().map(|&e| net.edge_name(e).to_string()).collect())
            .collect(),
        roles,
    }
}

pub fn gadget_to_file(g: &GadgetInstance) -> InstanceFile {
    nec_to_file(&g.nec, Some(g.role_names()))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

pub fn parse_code(text: &str) -> Result<NetworkCode> {
    let code: NetworkCode = serde_json::from_str(text)?;
    if code.block_length == 0 {
        return Err(Error::BadFunction("block length must be positive".into()));
    }
    Ok(code)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn read_code(path: &Path) -> Result<NetworkCode> {
    parse_code(&std::fs::read_to_string(path)?)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value))?;
    Ok(())
}

/// Command settings embedded in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    pub max_patterns: u64,
    pub max_messages: u64,
    pub max_cut_edges: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadEntry {
    pub message: u64,
    /// Absent when the message misdecodes without any error.
    pub witness_pattern: Option<NamedPattern>,
    pub decoded: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    #[serde(with = "rational::json")]
    pub epsilon: Rational,
    pub good_count: u64,
    pub bad: Vec<BadEntry>,
    pub pattern_count: u64,
    pub message_bits: u32,
    pub semantics: ErrorSemantics,
    pub fingerprint: String,
    pub config: RunConfig,
}

impl ReportFile {
    pub fn from_report(net: &Network, r: &VerificationReport, config: RunConfig) -> Self {
        ReportFile {
            epsilon: r.epsilon,
            good_count: r.good.len() as u64,
            bad: r
                .bad
                .iter()
                .map(|b| BadEntry {
                    message: b.message,
                    witness_pattern: (!b.witness.is_none()).then(|| b.witness.to_named(net)),
                    decoded: b.decoded,
                })
                .collect(),
            pattern_count: r.pattern_count,
            message_bits: r.message_bits,
            semantics: r.semantics,
            fingerprint: r.fingerprint.clone(),
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailingEntry {
    pub message: Vec<u64>,
    pub estimates: Vec<u64>,
}

/// Report for a multiple-unicast code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuReportFile {
    #[serde(with = "rational::json")]
    pub epsilon: Rational,
    pub tuple_count: u64,
    pub failing: Vec<FailingEntry>,
    pub message_bits: u32,
    pub fingerprint: String,
    pub config: RunConfig,
}

impl MuReportFile {
    pub fn from_report(r: &MuReport, config: RunConfig) -> Self {
        MuReportFile {
            epsilon: r.epsilon,
            tuple_count: r.tuple_count,
            failing: r
                .failing
                .iter()
                .map(|f| FailingEntry {
                    message: f.message.clone(),
                    estimates: f.estimates.clone(),
                })
                .collect(),
            message_bits: r.message_bits,
            fingerprint: r.fingerprint.clone(),
            config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{build_cx_code, build_cx_instances};
    use crate::verifier::{verify_nec, VerifyOptions};

    #[test]
    fn gadget_round_trips_through_json() {
        let (inst, g) = build_cx_instances(2).unwrap();
        let text = to_json(&gadget_to_file(&g));
        match parse_instance(&text).unwrap() {
            Instance::Gadget(h) => {
                assert_eq!(h.role_names(), g.role_names());
                assert_eq!(h.provenance.network.to_spec(), inst.network.to_spec());
                assert_eq!(h.nec.adversary_class(), g.nec.adversary_class());
            }
            other => panic!("expected a gadget, got {}", other.kind()),
        }
        let mu = to_json(&mu_to_file(&inst));
        assert!(matches!(parse_instance(&mu).unwrap(), Instance::MultipleUnicast(_)));
    }

    #[test]
    fn code_json_uses_structured_forms() {
        let (_, g) = build_cx_instances(2).unwrap();
        let cx = build_cx_code(&g, 2, 2, 1 << 20).unwrap();
        let text = to_json(&cx.code);
        assert!(text.contains("\"relay\""));
        assert_eq!(parse_code(&text).unwrap(), cx.code);
    }

    #[test]
    fn report_shape() {
        let (_, g) = build_cx_instances(2).unwrap();
        let cx = build_cx_code(&g, 2, 2, 1 << 20).unwrap();
        let r = verify_nec(&g.nec, &cx.code, &VerifyOptions::default()).unwrap();
        let config = RunConfig {
            command: "verify".into(),
            inputs: vec![],
            max_patterns: 1,
            max_messages: 1,
            max_cut_edges: 1,
            workers: None,
            seed: Some(7),
        };
        let v: serde_json::Value = serde_json::from_str(&to_json(&ReportFile::from_report(g.network(), &r, config))).unwrap();
        assert_eq!(v["epsilon"], serde_json::json!({"num": 0, "den": 1}));
        assert_eq!(v["good_count"], 4);
        assert_eq!(v["pattern_count"], 40);
        assert_eq!(v["config"]["seed"], 7);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(matches!(parse_instance("{"), Err(Error::Json(_))));
        let text = r#"{"kind":"multiple_unicast","nodes":["s","t"],"edges":[{"id":"e","tail":"s","head":"t","capacity":1}],"pairs":[{"source":"s","terminal":"u"}]}"#;
        match parse_instance(text) {
            Err(Error::UnknownNode(n)) => assert_eq!(n, "u"),
            other => panic!("{other:?}"),
        }
        assert!(parse_code(r#"{"block_length":0,"message_bits":1,"encoders":{},"decoders":{}}"#).is_err());
    }
}
