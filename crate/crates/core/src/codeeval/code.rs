use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::function::LocalFunction;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A length-`block_length` network code: one encoder per edge (keyed by edge
/// id) and one decoder per decoding node (keyed by node id).
///
/// Every source slot carries `message_bits` bits per block, so the rate is
/// `message_bits / block_length`. A decoding node that serves several pairs
/// outputs their estimates concatenated in pair order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkCode {
    pub block_length: u32,
    pub message_bits: u32,
    pub encoders: BTreeMap<String, LocalFunction>,
    pub decoders: BTreeMap<String, LocalFunction>,
}

impl NetworkCode {
    pub fn new(block_length: u32, message_bits: u32) -> Self {
        NetworkCode {
            block_length,
            message_bits,
            encoders: BTreeMap::new(),
            decoders: BTreeMap::new(),
        }
    }

    pub fn rate(&self) -> Rational {
        Rational::new(self.message_bits as u64, self.block_length as u64)
    }

    /// `sha256:<hex>` over the canonical JSON encoding (maps are ordered).
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("code serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
    }

    pub fn encoder(&self, edge: &str) -> Result<&LocalFunction> {
        self.encoders
            .get(edge)
            .ok_or_else(|| Error::CodeMismatch(format!("no encoder for edge `{edge}`")))
    }
}

/// Message width for rate `rate` at block length `n`; only integral `n * rate`
/// is accepted.
pub fn message_bits_for_rate(n: u32, rate: Rational) -> Result<u32> {
    let bits = rate * Rational::from_integer(n as u64);
    if !bits.is_integer() {
        return Err(Error::Precondition(format!(
            "n * R = {}/{} is not an integer",
            bits.numer(),
            bits.denom()
        )));
    }
    u32::try_from(bits.to_integer()).map_err(|_| Error::Precondition("message width overflows".into()))
}
