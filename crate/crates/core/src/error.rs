use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("network contains a cycle: {}", .nodes.join(" -> "))]
    Cycle { nodes: Vec<String> },

    #[error("edge `{edge}` references unknown node `{node}`")]
    DanglingEndpoint { edge: String, node: String },

    #[error("edge `{edge}` has nonpositive capacity {capacity}")]
    NonPositiveCapacity { edge: String, capacity: i64 },

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("{limit} exceeded: need {required}, limit is {allowed}")]
    LimitExceeded {
        limit: &'static str,
        required: u128,
        allowed: u64,
    },

    #[error("code does not match instance: {0}")]
    CodeMismatch(String),

    #[error("width mismatch on {what}: expected {expected} bits, got value {value:#x}")]
    WidthMismatch {
        what: String,
        expected: u32,
        value: u64,
    },

    #[error("malformed local function: {0}")]
    BadFunction(String),

    #[error("invalid error pattern: {0}")]
    BadPattern(String),

    #[error("instance is not a reduction gadget: {0}")]
    NotGadget(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("code fingerprint mismatch: tables built for {expected}, code is {actual}")]
    FingerprintMismatch { expected: String, actual: String },

    #[error("edge `{edge}` is not a relay of its branch input; run normalize_relay first")]
    NotRelayNormalized { edge: String },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn limit(limit: &'static str, required: u128, allowed: u64) -> Self {
        Error::LimitExceeded {
            limit,
            required,
            allowed,
        }
    }
}
