//! Local encoding/decoding functions.
//!
//! A function receives an ordered argument list (the tail node's in-edge
//! signals in network edge order, then the hosted message slot if any). When a
//! function needs the arguments as one integer (tables and slices) they are
//! concatenated with argument 0 in the least significant bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalFunction {
    /// Explicit truth table indexed by the concatenated argument word.
    Table(Vec<u64>),
    /// Pass argument `j` through.
    Relay(usize),
    /// Bitwise xor of the terms.
    Xor(Vec<XorTerm>),
    Const(u64),
    /// Bits `lo..hi` (half-open) of the concatenated argument word.
    Slice { lo: u32, hi: u32 },
    /// Left-to-right pipeline: stage 1 sees the arguments, every later stage
    /// sees the previous stage's output as its single argument.
    Compose(Vec<LocalFunction>),
    /// Concatenation of the parts' outputs, first part in the low bits.
    Concat(Vec<LocalFunction>),
}

/// A xor operand: either an argument index or a nested function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XorTerm {
    Arg(usize),
    Form(LocalFunction),
}

/// What a function knows about its arguments.
#[derive(Debug, Clone, Copy)]
enum Domain<'a> {
    Args(&'a [u32]),
    /// A single argument of unknown width (a later pipeline stage after a table).
    Opaque,
}

pub(crate) fn mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Concatenates `args` (argument 0 lowest) under the given widths.
pub fn pack_args(args: &[u64], widths: &[u32]) -> u64 {
    let mut word = 0u64;
    let mut shift = 0u32;
    for (&v, &w) in args.iter().zip(widths) {
        if shift < 64 {
            word |= v << shift;
        }
        shift += w;
    }
    word
}

pub fn unpack_args(word: u64, widths: &[u32]) -> Vec<u64> {
    let mut shift = 0u32;
    widths
        .iter()
        .map(|&w| {
            let v = if shift >= 64 { 0 } else { (word >> shift) & mask(w) };
            shift += w;
            v
        })
        .collect()
}

impl LocalFunction {
    pub fn relay(j: usize) -> Self {
        LocalFunction::Relay(j)
    }

    pub fn xor_args(args: impl IntoIterator<Item = usize>) -> Self {
        LocalFunction::Xor(args.into_iter().map(XorTerm::Arg).collect())
    }

    pub fn slice(lo: u32, hi: u32) -> Self {
        LocalFunction::Slice { lo, hi }
    }

    /// Validates the function against argument widths and returns its output
    /// width when that is determined by structure alone.
    pub fn check(&self, widths: &[u32]) -> Result<Option<u32>> {
        self.check_in(Domain::Args(widths))
    }

    fn check_in(&self, dom: Domain<'_>) -> Result<Option<u32>> {
        let total = match dom {
            Domain::Args(w) => Some(w.iter().map(|&x| x as u64).sum::<u64>()),
            Domain::Opaque => None,
        };
        match self {
            LocalFunction::Table(t) => {
                if !t.len().is_power_of_two() {
                    return Err(Error::BadFunction(format!("table length {} is not a power of two", t.len())));
                }
                if let Some(total) = total {
                    if total >= 64 || t.len() as u64 != 1u64 << total {
                        return Err(Error::BadFunction(format!(
                            "table has {} entries but the domain has 2^{} points",
                            t.len(),
                            total
                        )));
                    }
                }
                Ok(None)
            }
            LocalFunction::Relay(j) => match dom {
                Domain::Args(w) => w
                    .get(*j)
                    .map(|&w| Some(w))
                    .ok_or_else(|| Error::BadFunction(format!("relay of argument {j} but only {} arguments", w.len()))),
                Domain::Opaque if *j == 0 => Ok(None),
                Domain::Opaque => Err(Error::BadFunction(format!("relay of argument {j} in a single-argument stage"))),
            },
            LocalFunction::Xor(terms) => {
                let mut width = Some(0u32);
                for term in terms {
                    let w = match term {
                        XorTerm::Arg(j) => LocalFunction::Relay(*j).check_in(dom)?,
                        XorTerm::Form(f) => f.check_in(dom)?,
                    };
                    width = match (width, w) {
                        (Some(a), Some(b)) => Some(a.max(b)),
                        _ => None,
                    };
                }
                Ok(width)
            }
            LocalFunction::Const(_) => Ok(None),
            LocalFunction::Slice { lo, hi } => {
                if lo >= hi || *hi > 64 {
                    return Err(Error::BadFunction(format!("bad slice {lo}..{hi}")));
                }
                if let Some(total) = total {
                    if *hi as u64 > total {
                        return Err(Error::BadFunction(format!("slice {lo}..{hi} exceeds {total}-bit domain")));
                    }
                }
                Ok(Some(hi - lo))
            }
            LocalFunction::Compose(stages) => {
                let (first, rest) = stages
                    .split_first()
                    .ok_or_else(|| Error::BadFunction("empty composition".into()))?;
                let mut width = first.check_in(dom)?;
                for stage in rest {
                    width = match width {
                        Some(w) => stage.check_in(Domain::Args(&[w]))?,
                        None => stage.check_in(Domain::Opaque)?,
                    };
                }
                Ok(width)
            }
            LocalFunction::Concat(parts) => {
                let mut sum = 0u32;
                for (i, part) in parts.iter().enumerate() {
                    match part.check_in(dom)? {
                        Some(w) => sum += w,
                        None if i + 1 == parts.len() => return Ok(None),
                        None => {
                            return Err(Error::BadFunction(
                                "concatenated part has no structurally known width".into(),
                            ))
                        }
                    }
                }
                if sum > 64 {
                    return Err(Error::BadFunction(format!("concatenation is {sum} bits wide")));
                }
                Ok(Some(sum))
            }
        }
    }

    /// Evaluates on concrete arguments. `widths` must be the ones passed to
    /// [`check`](Self::check).
    pub fn eval(&self, args: &[u64], widths: &[u32]) -> Result<u64> {
        match self {
            LocalFunction::Table(t) => {
                let idx = pack_args(args, widths);
                t.get(idx as usize).copied().ok_or_else(|| Error::WidthMismatch {
                    what: "table index".into(),
                    expected: t.len().trailing_zeros(),
                    value: idx,
                })
            }
            LocalFunction::Relay(j) => Ok(args[*j]),
            LocalFunction::Xor(terms) => terms.iter().try_fold(0u64, |acc, term| {
                Ok(acc
                    ^ match term {
                        XorTerm::Arg(j) => args[*j],
                        XorTerm::Form(f) => f.eval(args, widths)?,
                    })
            }),
            LocalFunction::Const(c) => Ok(*c),
            LocalFunction::Slice { lo, hi } => {
                let word = pack_args(args, widths);
                Ok(if *lo >= 64 { 0 } else { (word >> lo) & mask(hi - lo) })
            }
            LocalFunction::Compose(stages) => {
                let mut value = stages[0].eval(args, widths)?;
                let mut width = stages[0].check(widths).ok().flatten();
                for stage in &stages[1..] {
                    let w = [width.unwrap_or(64)];
                    value = stage.eval(&[value], &w)?;
                    width = stage.check(&w).ok().flatten();
                }
                Ok(value)
            }
            LocalFunction::Concat(parts) => {
                let mut out = 0u64;
                let mut shift = 0u32;
                for part in parts {
                    let v = part.eval(args, widths)?;
                    if shift < 64 {
                        out |= v << shift;
                    }
                    shift += part.check(widths).ok().flatten().unwrap_or(0);
                }
                Ok(out)
            }
        }
    }

    pub fn is_table(&self) -> bool {
        matches!(self, LocalFunction::Table(_))
    }
}

/// Expands any function into the equivalent explicit truth table.
/// Idempotent on tables. Refuses domains larger than `max_entries`.
pub fn expand_truth_table(f: &LocalFunction, widths: &[u32], max_entries: u64) -> Result<LocalFunction> {
    f.check(widths)?;
    if let LocalFunction::Table(_) = f {
        return Ok(f.clone());
    }
    tabulate(widths, max_entries, |args| f.eval(args, widths)).map(LocalFunction::Table)
}

/// Builds a truth table over the concatenated domain of `widths` by calling
/// `body` on every argument tuple in index order.
pub fn tabulate(widths: &[u32], max_entries: u64, mut body: impl FnMut(&[u64]) -> Result<u64>) -> Result<Vec<u64>> {
    let total: u64 = widths.iter().map(|&w| w as u64).sum();
    if total >= 63 || (1u64 << total) > max_entries {
        return Err(Error::limit("max table entries", 1u128 << total.min(127), max_entries));
    }
    (0..1u64 << total)
        .map(|idx| body(&unpack_args(idx, widths)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relay_expands_to_identity() {
        let t = expand_truth_table(&LocalFunction::Relay(0), &[2], 1 << 24).unwrap();
        assert_eq!(t, LocalFunction::Table(vec![0, 1, 2, 3]));
    }

    #[test]
    fn xor_of_two_bits() {
        let t = expand_truth_table(&LocalFunction::xor_args([0, 1]), &[1, 1], 1 << 24).unwrap();
        assert_eq!(t, LocalFunction::Table(vec![0, 1, 1, 0]));
    }

    #[test]
    fn composed_high_bit_of_xor() {
        let f = LocalFunction::Compose(vec![LocalFunction::xor_args([0, 1]), LocalFunction::slice(1, 2)]);
        let widths = [2, 2];
        let LocalFunction::Table(t) = expand_truth_table(&f, &widths, 1 << 24).unwrap() else {
            panic!()
        };
        assert_eq!(t.len(), 16);
        // independent check: high bit of (a ^ b) computed directly
        for a in 0..4u64 {
            for b in 0..4u64 {
                assert_eq!(t[(a | b << 2) as usize], ((a ^ b) >> 1) & 1);
            }
        }
    }

    #[test]
    fn tables_are_fixed_points() {
        let t = LocalFunction::Table(vec![3, 1, 0, 2]);
        assert_eq!(expand_truth_table(&t, &[2], 4).unwrap(), t);
    }

    #[test]
    fn domain_limit() {
        let err = expand_truth_table(&LocalFunction::Relay(0), &[10, 10], 1 << 16).unwrap_err();
        assert!(matches!(err, Error::LimitExceeded { limit: "max table entries", .. }));
    }

    #[test]
    fn json_forms() {
        let f: LocalFunction = serde_json::from_str(r#"{"compose":[{"xor":[0,{"relay":1}]},{"slice":{"lo":0,"hi":1}}]}"#).unwrap();
        assert_eq!(
            f,
            LocalFunction::Compose(vec![
                LocalFunction::Xor(vec![XorTerm::Arg(0), XorTerm::Form(LocalFunction::Relay(1))]),
                LocalFunction::slice(0, 1),
            ])
        );
        assert_eq!(serde_json::to_string(&LocalFunction::Const(5)).unwrap(), r#"{"const":5}"#);
        assert_eq!(serde_json::to_string(&LocalFunction::Table(vec![0, 1])).unwrap(), r#"{"table":[0,1]}"#);
    }

    #[test]
    fn malformed_functions_are_rejected() {
        assert!(LocalFunction::Relay(2).check(&[1, 1]).is_err());
        assert!(LocalFunction::Table(vec![0; 3]).check(&[2]).is_err());
        assert!(LocalFunction::Table(vec![0; 8]).check(&[2]).is_err());
        assert!(LocalFunction::slice(2, 1).check(&[4]).is_err());
        assert!(LocalFunction::slice(0, 5).check(&[4]).is_err());
        assert!(LocalFunction::Compose(vec![]).check(&[1]).is_err());
        assert!(LocalFunction::Concat(vec![LocalFunction::Const(1), LocalFunction::Relay(0)])
            .check(&[1])
            .is_err());
    }

    #[test]
    fn concat_and_table_stage() {
        let f = LocalFunction::Concat(vec![LocalFunction::Relay(1), LocalFunction::Relay(0)]);
        assert_eq!(f.check(&[2, 3]).unwrap(), Some(5));
        assert_eq!(f.eval(&[0b10, 0b101], &[2, 3]).unwrap(), 0b10_101);
        // a table stage after another table only needs a power-of-two length
        let g = LocalFunction::Compose(vec![LocalFunction::Table(vec![1, 0]), LocalFunction::Table(vec![7, 9])]);
        assert_eq!(g.check(&[1]).unwrap(), None);
        assert_eq!(g.eval(&[0], &[1]).unwrap(), 9);
        let bad = LocalFunction::Compose(vec![LocalFunction::Const(5), LocalFunction::Table(vec![0, 1])]);
        assert!(bad.eval(&[0], &[1]).is_err());
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn structured(nargs: usize) -> impl Strategy<Value = LocalFunction> {
        let leaf = prop_oneof![
            (0..nargs).prop_map(LocalFunction::Relay),
            (0u64..16).prop_map(LocalFunction::Const),
            prop::collection::vec(0..nargs, 1..4).prop_map(LocalFunction::xor_args),
            (0u32..4, 1u32..3).prop_map(|(lo, len)| LocalFunction::slice(lo, lo + len)),
        ];
        leaf.prop_recursive(2, 8, 3, move |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..3)
                    .prop_map(|v| LocalFunction::Xor(v.into_iter().map(XorTerm::Form).collect())),
                (inner, 0u32..2).prop_map(|(f, lo)| LocalFunction::Compose(vec![f, LocalFunction::slice(lo, lo + 1)])),
            ]
        })
    }

    proptest! {
        #[test]
        fn expansion_agrees_everywhere(f in structured(2)) {
            let widths = [2u32, 3];
            prop_assume!(f.check(&widths).is_ok());
            let t = expand_truth_table(&f, &widths, 1 << 10).unwrap();
            for idx in 0..32u64 {
                let args = unpack_args(idx, &widths);
                prop_assert_eq!(t.eval(&args, &widths).unwrap(), f.eval(&args, &widths).unwrap());
            }
            prop_assert_eq!(expand_truth_table(&t, &widths, 1 << 10).unwrap(), t);
        }

        #[test]
        fn pack_unpack_inverse(a in 0u64..4, b in 0u64..32, c in 0u64..2) {
            let w = [2, 5, 1];
            prop_assert_eq!(unpack_args(pack_args(&[a, b, c], &w), &w), vec![a, b, c]);
        }
    }
}
