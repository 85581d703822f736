use serde::{Deserialize, Serialize};

use crate::codeeval::ErrorPattern;
use crate::error::{Error, Result};
use crate::netmodel::{EdgeId, NecInstance};

/// How an adversary set `A` is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorSemantics {
    /// Every edge of `A` carries a nonzero mask.
    #[default]
    Strict,
    /// Any nonempty subset of `A` carries nonzero masks.
    ClosedDown,
}

/// Number of patterns [`enumerate_patterns`] yields, the no-error pattern included.
pub fn pattern_count(inst: &NecInstance, n: u32, semantics: ErrorSemantics) -> u128 {
    let net = &inst.network;
    let width = |e: &EdgeId| (n as u64 * net.capacity(*e) as u64).min(127) as u32;
    let per_set = |set: &Vec<EdgeId>| -> u128 {
        match semantics {
            ErrorSemantics::Strict => set
                .iter()
                .fold(1u128, |acc, e| acc.saturating_mul((1u128 << width(e)) - 1)),
            // sum over nonempty S of prod (2^w - 1) = prod 2^w - 1
            ErrorSemantics::ClosedDown => set
                .iter()
                .fold(1u128, |acc, e| acc.saturating_mul(1u128 << width(e)))
                - 1,
        }
    };
    inst.adversary_class()
        .iter()
        .fold(1u128, |acc, set| acc.saturating_add(per_set(set)))
}

/// Streams the no-error pattern, then for each set `A` in class order every
/// realizing assignment of nonzero masks. Within a set the combined mask
/// tuple counts upward with the set's first edge as the least significant
/// digit; under closed-down semantics subsets are visited in increasing
/// bitmask order first.
pub fn enumerate_patterns(
    inst: &NecInstance,
    n: u32,
    semantics: ErrorSemantics,
    max_patterns: u64,
) -> Result<PatternStream> {
    let count = pattern_count(inst, n, semantics);
    if count > max_patterns as u128 {
        return Err(Error::limit("max patterns", count, max_patterns));
    }
    let net = &inst.network;
    let class: Vec<Vec<(EdgeId, u32)>> = inst
        .adversary_class()
        .iter()
        .map(|set| set.iter().map(|&e| (e, n * net.capacity(e))).collect())
        .collect();
    if let Some(&(e, w)) = class.iter().flatten().find(|(_, w)| *w > 63) {
        return Err(Error::BadPattern(format!("edge {e} is {w} bits wide")));
    }
    Ok(PatternStream {
        class,
        semantics,
        remaining: count as u64,
        state: State::Start,
    })
}

#[derive(Debug, Clone)]
enum State {
    Start,
    InSet { set: usize, subset: u64, digits: Vec<u64> },
    Done,
}

#[derive(Debug, Clone)]
pub struct PatternStream {
    class: Vec<Vec<(EdgeId, u32)>>,
    semantics: ErrorSemantics,
    remaining: u64,
    state: State,
}

impl PatternStream {
    fn first_subset(&self, set: usize) -> u64 {
        match self.semantics {
            ErrorSemantics::Strict => (1u64 << self.class[set].len()) - 1,
            ErrorSemantics::ClosedDown => 1,
        }
    }

    fn enter(&self, set: usize, subset: u64) -> State {
        if set >= self.class.len() {
            return State::Done;
        }
        State::InSet {
            set,
            subset,
            digits: vec![1; subset.count_ones() as usize],
        }
    }

    fn members(&self, set: usize, subset: u64) -> Vec<(EdgeId, u32)> {
        self.class[set]
            .iter()
            .enumerate()
            .filter(|(j, _)| subset >> j & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    }
}

impl Iterator for PatternStream {
    type Item = ErrorPattern;

    fn next(&mut self) -> Option<ErrorPattern> {
        match std::mem::replace(&mut self.state, State::Done) {
            State::Done => None,
            State::Start => {
                self.state = if self.class.is_empty() {
                    State::Done
                } else {
                    self.enter(0, self.first_subset(0))
                };
                self.remaining -= 1;
                Some(ErrorPattern::none())
            }
            State::InSet {
                set,
                subset,
                mut digits,
            } => {
                let members = self.members(set, subset);
                let realized = self.class[set].iter().map(|&(e, _)| e).collect();
                let pattern = ErrorPattern::new(members.iter().zip(&digits).map(|(&(e, _), &d)| (e, d)), realized);

                // odometer, first member fastest, digits range over 1..2^w
                let mut carried = true;
                for (d, &(_, w)) in digits.iter_mut().zip(&members) {
                    if *d < (1u64 << w) - 1 {
                        *d += 1;
                        carried = false;
                        break;
                    }
                    *d = 1;
                }
                self.state = if !carried {
                    State::InSet { set, subset, digits }
                } else {
                    let full = (1u64 << self.class[set].len()) - 1;
                    if self.semantics == ErrorSemantics::ClosedDown && subset < full {
                        self.enter(set, subset + 1)
                    } else if set + 1 < self.class.len() {
                        self.enter(set + 1, self.first_subset(set + 1))
                    } else {
                        State::Done
                    }
                };
                self.remaining -= 1;
                Some(pattern)
            }
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining as usize, Some(self.remaining as usize))
    }
}

impl ExactSizeIterator for PatternStream {}
