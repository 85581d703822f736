//! Signals, local functions, network codes and the simulation engine.
//!
//! Bit convention: bit 0 of a signal is its least significant bit, and a
//! `w`-bit signal is the integer in `[0, 2^w)` it spells under that rule.

mod code;
mod eval;
mod function;
mod normalize;

pub use code::{message_bits_for_rate, NetworkCode};
pub use eval::{
    evaluate, pack_message, split_message, ArgPlan, CodedInstance, ErrorPattern, Evaluator, Layout, NamedPattern,
    Sink, Trace,
};
pub use function::{expand_truth_table, pack_args, tabulate, unpack_args, LocalFunction, XorTerm};
pub use normalize::{is_identity, normalize_relay};

pub(crate) use function::mask;

use crate::error::{Error, Result};

/// A bit vector of fixed width riding on one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signal {
    value: u64,
    width: u32,
}

impl Signal {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        if width > 64 || (width < 64 && value >> width != 0) {
            return Err(Error::WidthMismatch {
                what: "signal".into(),
                expected: width,
                value,
            });
        }
        Ok(Signal { value, width })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn width(self) -> u32 {
        self.width
    }

    pub fn bit(self, i: u32) -> bool {
        i < self.width && self.value >> i & 1 == 1
    }

    pub fn bits(self) -> impl Iterator<Item = bool> {
        (0..self.width).map(move |i| self.bit(i))
    }
}

impl std::ops::BitXor for Signal {
    type Output = Signal;

    fn bitxor(self, rhs: Signal) -> Signal {
        assert_eq!(self.width, rhs.width, "xor of signals with different widths");
        Signal {
            value: self.value ^ rhs.value,
            width: self.width,
        }
    }
}

#[cfg(test)]
mod tests;
