//! Measurable subsets of `[0,1)`: finite unions of half-open dyadic intervals.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::Dyadic;
use crate::error::{invalid, LabError, Result};
use crate::rat::Rat;

/// Canonical finite union of half-open intervals `[a, b)` inside `[0, 1)`.
///
/// Intervals are nonempty, sorted, pairwise disjoint and never touch, so two
/// sets are equal almost everywhere exactly when they are structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DSet {
    intervals: Vec<(Dyadic, Dyadic)>,
}

/// Boolean operators accepted by [`boolean_combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoolOp {
    Union,
    Intersect,
    Complement,
    SymDiff,
}

/// Builds the canonical set for a list of intervals. Overlaps and touching
/// intervals are allowed; `a == b` contributes nothing; `a > b` is rejected.
pub fn make_set(intervals: Vec<(Dyadic, Dyadic)>) -> Result<DSet> {
    for (a, b) in &intervals {
        if a > b {
            return Err(invalid(format!("reversed interval [{a}, {b})")));
        }
    }
    Ok(DSet::from_unsorted(intervals))
}

/// Applies `op` to `a` and the optional second operand.
pub fn boolean_combine(op: BoolOp, a: &DSet, b: Option<&DSet>) -> Result<DSet> {
    match (op, b) {
        (BoolOp::Complement, None) => Ok(a.complement()),
        (BoolOp::Complement, Some(_)) => Err(LabError::Arity {
            op: "complement",
            expected: 1,
        }),
        (BoolOp::Union, Some(b)) => Ok(a.union(b)),
        (BoolOp::Intersect, Some(b)) => Ok(a.intersect(b)),
        (BoolOp::SymDiff, Some(b)) => Ok(a.sym_diff(b)),
        (op, None) => Err(LabError::Arity {
            op: match op {
                BoolOp::Union => "union",
                BoolOp::Intersect => "intersect",
                _ => "sym_diff",
            },
            expected: 2,
        }),
    }
}

impl DSet {
    pub fn empty() -> Self {
        DSet::default()
    }

    /// `[0, 1)`.
    pub fn full() -> Self {
        DSet {
            intervals: vec![(Dyadic::zero(), Dyadic::one())],
        }
    }

    /// Single interval `[a, b)`; empty when `a == b`.
    pub fn interval(a: Dyadic, b: Dyadic) -> Result<Self> {
        make_set(vec![(a, b)])
    }

    /// `[k/2^level, (k+1)/2^level)`.
    pub fn dyadic_cell(k: u64, level: u32) -> Self {
        DSet {
            intervals: vec![(Dyadic::of(k, level), Dyadic::of(k + 1, level))],
        }
    }

    fn from_unsorted(mut intervals: Vec<(Dyadic, Dyadic)>) -> Self {
        intervals.retain(|(a, b)| a < b);
        intervals.sort();
        Self::from_sorted(intervals)
    }

    /// Merges a start-sorted list of nonempty intervals.
    pub(crate) fn from_sorted(intervals: impl IntoIterator<Item = (Dyadic, Dyadic)>) -> Self {
        let mut out: Vec<(Dyadic, Dyadic)> = Vec::new();
        for (a, b) in intervals {
            if a >= b {
                continue;
            }
            match out.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        DSet { intervals: out }
    }

    pub fn intervals(&self) -> &[(Dyadic, Dyadic)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.intervals.len() == 1
            && self.intervals[0].0.is_zero()
            && self.intervals[0].1 == Dyadic::one()
    }

    /// Left endpoint of the first interval.
    pub fn leftmost(&self) -> Option<&Dyadic> {
        self.intervals.first().map(|(a, _)| a)
    }

    /// Lebesgue measure, exact.
    pub fn measure(&self) -> Rat {
        let Some(level) = self
            .intervals
            .iter()
            .flat_map(|(a, b)| [a.level(), b.level()])
            .max()
        else {
            return Rat::zero();
        };
        let total = self
            .intervals
            .iter()
            .fold(num_bigint::BigUint::default(), |acc, (a, b)| {
                acc + b.scaled(level) - a.scaled(level)
            });
        Rat::new(num_bigint::BigInt::from(total), num_bigint::BigInt::from(1) << level)
            .expect("power of two denominator")
    }

    pub fn contains_point(&self, x: &Dyadic) -> bool {
        let idx = self.intervals.partition_point(|(a, _)| a <= x);
        idx > 0 && x < &self.intervals[idx - 1].1
    }

    /// Sorted pieces covering `[0,1)` labelled 1 inside the set and 0 outside.
    pub(crate) fn indicator_layout(&self) -> Vec<(Dyadic, Dyadic, usize)> {
        let mut out = Vec::with_capacity(2 * self.intervals.len() + 1);
        let mut cursor = Dyadic::zero();
        for (a, b) in &self.intervals {
            if &cursor < a {
                out.push((cursor.clone(), a.clone(), 0));
            }
            out.push((a.clone(), b.clone(), 1));
            cursor = b.clone();
        }
        if cursor < Dyadic::one() {
            out.push((cursor, Dyadic::one(), 0));
        }
        out
    }

    fn combine(&self, other: &DSet, keep: impl Fn(bool, bool) -> bool) -> DSet {
        let mut cuts: Vec<&Dyadic> = Vec::with_capacity(2 * (self.len() + other.len()) + 2);
        let zero = Dyadic::zero();
        let one = Dyadic::one();
        cuts.push(&zero);
        cuts.push(&one);
        for (a, b) in self.intervals.iter().chain(&other.intervals) {
            cuts.push(a);
            cuts.push(b);
        }
        cuts.sort();
        cuts.dedup();

        let (mut i, mut j) = (0, 0);
        let mut pieces = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            while i < self.intervals.len() && &self.intervals[i].1 <= lo {
                i += 1;
            }
            while j < other.intervals.len() && &other.intervals[j].1 <= lo {
                j += 1;
            }
            let in_a = i < self.intervals.len() && &self.intervals[i].0 <= lo;
            let in_b = j < other.intervals.len() && &other.intervals[j].0 <= lo;
            if keep(in_a, in_b) {
                pieces.push((lo.clone(), hi.clone()));
            }
        }
        DSet::from_sorted(pieces)
    }

    fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn union(&self, other: &DSet) -> DSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &DSet) -> DSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &DSet) -> DSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn sym_diff(&self, other: &DSet) -> DSet {
        self.combine(other, |a, b| a != b)
    }

    pub fn complement(&self) -> DSet {
        DSet::from_sorted(
            self.indicator_layout()
                .into_iter()
                .filter(|(_, _, inside)| *inside == 0)
                .map(|(a, b, _)| (a, b)),
        )
    }

    pub fn is_subset(&self, other: &DSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &DSet) -> bool {
        self.intersect(other).is_empty()
    }

    /// Union of many sets in one pass.
    pub fn union_all<'a>(sets: impl IntoIterator<Item = &'a DSet>) -> DSet {
        let all: Vec<(Dyadic, Dyadic)> = sets
            .into_iter()
            .flat_map(|s| s.intervals.iter().cloned())
            .collect();
        DSet::from_unsorted(all)
    }
}

impl fmt::Display for DSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "∅");
        }
        for (i, (a, b)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            write!(f, "[{a},{b})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for DSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.intervals.iter().map(|(a, b)| [a, b]))
    }
}

impl<'de> Deserialize<'de> for DSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(Dyadic, Dyadic)>::deserialize(deserializer)?;
        make_set(pairs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(num: u64, level: u32) -> Dyadic {
        Dyadic::of(num, level)
    }

    fn iv(a: (u64, u32), b: (u64, u32)) -> DSet {
        DSet::interval(d(a.0, a.1), d(b.0, b.1)).unwrap()
    }

    #[test]
    fn make_set_merges_touching_intervals() {
        let s = make_set(vec![(d(0, 0), d(1, 2)), (d(1, 2), d(1, 1))]).unwrap();
        assert_eq!(s, iv((0, 0), (1, 1)));
        assert_eq!(s.intervals().len(), 1);
    }

    #[test]
    fn make_set_keeps_gapped_intervals() {
        let s = make_set(vec![(d(7, 3), d(1, 0)), (d(0, 0), d(1, 4))]).unwrap();
        assert_eq!(s.intervals().len(), 2);
        assert_eq!(s.measure(), Rat::frac(3, 16));
        assert_eq!(s.to_string(), "[0,1/16) ∪ [7/8,1)");
    }

    #[test]
    fn make_set_accepts_degenerate_and_rejects_reversed() {
        // A_1 = [1/2, 1 - 1/2) is empty
        let a1 = make_set(vec![(d(1, 1), Dyadic::one_minus_pow2(1))]).unwrap();
        assert!(a1.is_empty());
        assert!(make_set(vec![(d(3, 2), d(1, 2))]).is_err());
    }

    #[test]
    fn boolean_examples() {
        let half = iv((0, 0), (1, 1));
        assert_eq!(half.complement(), iv((1, 1), (1, 0)));
        assert_eq!(
            iv((0, 0), (5, 3)).intersect(&iv((1, 1), (1, 0))),
            iv((1, 1), (5, 3))
        );
        let sd = half.sym_diff(&iv((1, 2), (3, 2)));
        assert_eq!(sd, iv((0, 0), (1, 2)).union(&iv((1, 1), (3, 2))));
    }

    #[test]
    fn arity_is_checked() {
        let a = DSet::full();
        assert!(boolean_combine(BoolOp::Complement, &a, Some(&a)).is_err());
        assert!(boolean_combine(BoolOp::Union, &a, None).is_err());
        assert_eq!(
            boolean_combine(BoolOp::Complement, &a, None).unwrap(),
            DSet::empty()
        );
    }

    #[test]
    fn measures() {
        assert_eq!(iv((1, 1), (1, 0)).measure(), Rat::frac(1, 2));
        assert_eq!(DSet::empty().measure(), Rat::zero());
        assert_eq!(DSet::full().measure(), Rat::one());
    }

    #[test]
    fn point_membership_is_half_open() {
        let s = iv((1, 2), (1, 1));
        assert!(s.contains_point(&d(1, 2)));
        assert!(!s.contains_point(&d(1, 1)));
        assert!(!s.contains_point(&d(0, 0)));
    }

    #[test]
    fn json_shape() {
        let s = make_set(vec![(d(0, 0), d(1, 4)), (d(7, 3), d(1, 0))]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"[["0","1/16"],["7/8","1"]]"#);
        let back: DSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<DSet>(r#"[["3/4","1/4"]]"#).is_err());
        assert!(serde_json::from_str::<DSet>(r#"[["0","3/2"]]"#).is_err());
    }
}
