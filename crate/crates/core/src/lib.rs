//! Network coding under adversarial edge errors: multiple-unicast and
//! single-unicast error-correction instances, an exhaustive code verifier,
//! the multiple-unicast to error-correction reduction gadget with code
//! transfer in both directions, and the explicit counterexample code family.

pub mod codeeval;
pub mod counterexample;
pub mod error;
pub mod files;
pub mod netmodel;
pub mod rational;
pub mod reduction;
pub mod transfer;
pub mod verifier;

#[doc(hidden)]
pub mod cli;

pub use error::{Error, Result};

/// Enumeration limits shared by every exhaustive operation. Operations refuse
/// with [`Error::LimitExceeded`] rather than approximate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_patterns: u64,
    pub max_messages: u64,
    pub max_cut_edges: usize,
    pub max_table_entries: u64,
    pub max_search_codes: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_patterns: 1 << 20,
            max_messages: 1 << 20,
            max_cut_edges: 20,
            max_table_entries: 1 << 24,
            max_search_codes: 1 << 20,
        }
    }
}
