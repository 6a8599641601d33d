//! Step functions over finite partitions and exact conditional expectation.
//!
//! Every operation here is atom-wise arithmetic over a common refinement, so
//! results are exact rationals. `L2` distances are reported squared to stay in ℚ.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dset::DSet;
use crate::dyadic::Dyadic;
use crate::error::{invalid, Result};
use crate::partition::{indicator_pieces, overlay, Partition};
use crate::rat::Rat;

/// A function constant on each atom of `carrier`.
///
/// Identity is structural: the same function on two different carriers gives
/// two unequal `Step`s. Use [`Step::pointwise_eq`] to compare values.
#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    carrier: Partition,
    values: Vec<Rat>,
}

/// Norms accepted by [`lp_dist`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    L1,
    /// Squared `L2` norm, exact.
    L2Squared,
    Sup,
}

#[derive(Deserialize)]
struct RawStep {
    carrier: Partition,
    values: Vec<Rat>,
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawStep::deserialize(deserializer)?;
        Step::new(raw.carrier, raw.values).map_err(serde::de::Error::custom)
    }
}

impl Step {
    pub fn new(carrier: Partition, values: Vec<Rat>) -> Result<Self> {
        if values.len() != carrier.len() {
            return Err(invalid(format!(
                "step has {} values for {} atoms",
                values.len(),
                carrier.len()
            )));
        }
        Ok(Step { carrier, values })
    }

    pub fn constant(c: Rat) -> Self {
        Step {
            carrier: Partition::trivial(),
            values: vec![c],
        }
    }

    pub fn zero() -> Self {
        Self::constant(Rat::zero())
    }

    pub fn carrier(&self) -> &Partition {
        &self.carrier
    }

    pub fn values(&self) -> &[Rat] {
        &self.values
    }

    pub fn value_at(&self, x: &Dyadic) -> Option<&Rat> {
        self.carrier.atom_index_at(x).map(|i| &self.values[i])
    }

    /// Applies `f` to every value, keeping the carrier.
    pub fn map(&self, f: impl Fn(&Rat) -> Rat) -> Step {
        Step {
            carrier: self.carrier.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise combination on the join of both carriers.
    pub fn zip_with(&self, other: &Step, f: impl Fn(&Rat, &Rat) -> Rat) -> Step {
        let (carrier, parents) = self.carrier.join_with_parents(&other.carrier);
        let values = parents
            .iter()
            .map(|&(i, j)| f(&self.values[i], &other.values[j]))
            .collect();
        Step { carrier, values }
    }

    pub fn add(&self, other: &Step) -> Step {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Step) -> Step {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Step) -> Step {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: &Rat) -> Step {
        self.map(|v| v * c)
    }

    pub fn abs(&self) -> Step {
        self.map(Rat::abs)
    }

    pub fn is_nonneg(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    /// Equal values almost everywhere, whatever the carriers.
    pub fn pointwise_eq(&self, other: &Step) -> bool {
        let mut eq = true;
        overlay(self.carrier.layout(), other.carrier.layout(), |_, _, i, j| {
            eq &= self.values[i] == other.values[j];
        });
        eq
    }

    /// `self <= other` almost everywhere.
    pub fn pointwise_le(&self, other: &Step) -> bool {
        let mut le = true;
        overlay(self.carrier.layout(), other.carrier.layout(), |_, _, i, j| {
            le &= self.values[i] <= other.values[j];
        });
        le
    }

    pub fn max_abs(&self) -> Rat {
        self.values.iter().map(Rat::abs).max().unwrap_or_default()
    }

    /// `{x : pred(f(x))}` as a union of atoms.
    pub fn level_set(&self, pred: impl Fn(&Rat) -> bool) -> DSet {
        self.carrier.union_of(|i| pred(&self.values[i]))
    }

    /// Same function on the coarsest carrier: atoms with equal values merged.
    /// For display only; the result is a different `Step`.
    pub fn simplified(&self) -> Step {
        let mut distinct: Vec<Rat> = self.values.clone();
        distinct.sort();
        distinct.dedup();
        let atoms = distinct
            .iter()
            .map(|v| self.level_set(|x| x == v))
            .collect();
        let carrier = Partition::build(atoms);
        let values = carrier
            .atoms()
            .iter()
            .map(|a| {
                let x = a.leftmost().expect("nonempty atom");
                self.value_at(x).expect("inside [0,1)").clone()
            })
            .collect();
        Step { carrier, values }
    }
}

/// `χ_A` on the carrier `{A, A^c}` (or the trivial partition).
pub fn indicator(a: &DSet) -> Step {
    if a.is_empty() {
        return Step::zero();
    }
    if a.is_full() {
        return Step::constant(Rat::one());
    }
    let carrier = Partition::build(vec![a.clone(), a.complement()]);
    let values = carrier
        .atoms()
        .iter()
        .map(|atom| if atom == a { Rat::one() } else { Rat::zero() })
        .collect();
    Step { carrier, values }
}

/// `∫ f dμ`.
pub fn integrate(f: &Step) -> Rat {
    f.values
        .iter()
        .zip(f.carrier.measures())
        .map(|(v, m)| v * m)
        .sum()
}

/// `⟨f, g⟩ = ∫ f g dμ`.
pub fn inner(f: &Step, g: &Step) -> Rat {
    let mut acc = Rat::zero();
    overlay(f.carrier.layout(), g.carrier.layout(), |s, e, i, j| {
        let (a, b) = (&f.values[i], &g.values[j]);
        if !a.is_zero() && !b.is_zero() {
            acc = &acc + s.length_to(e) * a * b;
        }
    });
    acc
}

/// `μ(p ∩ A)` for every atom `p` of `b`.
pub(crate) fn atom_overlaps(a: &DSet, b: &Partition) -> Vec<Rat> {
    let mut hits = vec![Rat::zero(); b.len()];
    overlay(b.layout(), &indicator_pieces(a), |s, e, i, inside| {
        if inside == 1 {
            hits[i] = &hits[i] + s.length_to(e);
        }
    });
    hits
}

/// `ℰ(f | σ(b))`: on each atom, the average of `f` over it.
pub fn cond_exp(f: &Step, b: &Partition) -> Step {
    if f.carrier() == b {
        return f.clone();
    }
    let mut sums = vec![Rat::zero(); b.len()];
    overlay(b.layout(), f.carrier.layout(), |s, e, i, j| {
        let v = &f.values[j];
        if !v.is_zero() {
            sums[i] = &sums[i] + s.length_to(e) * v;
        }
    });
    let values = sums
        .into_iter()
        .zip(b.measures())
        .map(|(s, m)| s / m)
        .collect();
    Step {
        carrier: b.clone(),
        values,
    }
}

/// `ℰ^⊥ f = f - ℰ(f | σ(b))`, on the join of the carriers.
pub fn cond_exp_perp(f: &Step, b: &Partition) -> Step {
    f.sub(&cond_exp(f, b))
}

/// `‖f‖_B = ‖ℰ(f | σ(b))‖_∞`.
pub fn seminorm(f: &Step, b: &Partition) -> Rat {
    cond_exp(f, b).max_abs()
}

/// `max_p μ(A ∩ p) / μ(p)` over atoms `p` of `b`.
pub fn indicator_seminorm_ratio(a: &DSet, b: &Partition) -> Rat {
    atom_overlaps(a, b)
        .into_iter()
        .zip(b.measures())
        .map(|(hit, m)| hit / m)
        .max()
        .unwrap_or_default()
}

/// `‖f - g‖_1`, `‖f - g‖_2²` or `‖f - g‖_∞`.
pub fn lp_dist(f: &Step, g: &Step, norm: Norm) -> Rat {
    let mut acc = Rat::zero();
    overlay(f.carrier.layout(), g.carrier.layout(), |s, e, i, j| {
        let diff = (&f.values[i] - &g.values[j]).abs();
        if diff.is_zero() {
            return;
        }
        acc = match norm {
            Norm::L1 => &acc + s.length_to(e) * diff,
            Norm::L2Squared => &acc + s.length_to(e) * &diff * &diff,
            Norm::Sup => acc.clone().max(diff),
        };
    });
    acc
}

/// Union of the atoms more than half covered by `a`: a minimizer of
/// `μ(A △ B)` over `B ∈ σ(p)`. Exactly-half atoms are left out.
pub fn best_approx(a: &DSet, p: &Partition) -> DSet {
    let hits = atom_overlaps(a, p);
    let two = Rat::int(2);
    p.union_of(|i| &hits[i] * &two > p.measures()[i])
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, v)) in self.carrier.atoms().iter().zip(&self.values).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v} on {a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dset::make_set;
    use crate::partition::generate;

    fn d(num: u64, level: u32) -> Dyadic {
        Dyadic::of(num, level)
    }

    fn iv(a: (u64, u32), b: (u64, u32)) -> DSet {
        DSet::interval(d(a.0, a.1), d(b.0, b.1)).unwrap()
    }

    fn upper() -> DSet {
        iv((1, 1), (1, 0))
    }

    fn s3_algebra() -> (DSet, DSet, DSet, Partition) {
        let a2 = iv((1, 1), (3, 2));
        let b20 = make_set(vec![(d(0, 0), d(1, 4)), (d(7, 3), d(1, 0))]).unwrap();
        let c20 = a2.union(&b20).complement();
        let p = generate(&[a2.clone(), b20.clone()]).unwrap();
        (a2, b20, c20, p)
    }

    fn value_on(step: &Step, set: &DSet) -> Rat {
        step.value_at(set.leftmost().unwrap()).unwrap().clone()
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(indicator(&DSet::empty()), Step::zero());
        assert_eq!(indicator(&DSet::full()), Step::constant(Rat::one()));
        let chi = indicator(&upper());
        assert_eq!(chi.carrier(), &Partition::dyadic(1));
        assert_eq!(chi.values(), &[Rat::zero(), Rat::one()]);
    }

    #[test]
    fn integrals_and_pairings() {
        assert_eq!(integrate(&indicator(&upper())), Rat::frac(1, 2));
        let (_, b20, _, _) = s3_algebra();
        assert_eq!(inner(&indicator(&upper()), &indicator(&b20)), Rat::frac(1, 8));
    }

    #[test]
    fn cond_exp_examples() {
        let lower = iv((0, 0), (1, 1));
        assert_eq!(
            cond_exp(&indicator(&lower), &Partition::trivial()),
            Step::constant(Rat::frac(1, 2))
        );
        let (a2, b20, c20, p) = s3_algebra();
        let g = cond_exp(&indicator(&upper()), &p);
        assert_eq!(value_on(&g, &a2), Rat::one());
        assert_eq!(value_on(&g, &b20), Rat::frac(2, 3));
        assert_eq!(value_on(&g, &c20), Rat::frac(2, 9));
        let f = indicator(&lower);
        assert_eq!(cond_exp(&f, f.carrier()), f);
    }

    #[test]
    fn perp_examples() {
        let f = indicator(&iv((0, 0), (1, 1)));
        assert!(cond_exp_perp(&f, f.carrier()).pointwise_eq(&Step::zero()));
        let centered = cond_exp_perp(&f, &Partition::trivial());
        assert_eq!(centered.values(), &[Rat::frac(1, 2), Rat::frac(-1, 2)]);
    }

    #[test]
    fn seminorm_examples() {
        let halves = Partition::dyadic(1);
        assert_eq!(seminorm(&indicator(&DSet::empty()), &halves), Rat::zero());
        let quarter = iv((0, 0), (1, 2));
        assert_eq!(seminorm(&indicator(&quarter), &halves), Rat::frac(1, 2));
        assert_eq!(indicator_seminorm_ratio(&quarter, &halves), Rat::frac(1, 2));
        assert_eq!(indicator_seminorm_ratio(&DSet::empty(), &halves), Rat::zero());
        let (_, _, _, p) = s3_algebra();
        assert_eq!(seminorm(&indicator(&upper()), &p), Rat::one());
    }

    #[test]
    fn lp_examples() {
        let f = indicator(&upper());
        for norm in [Norm::L1, Norm::L2Squared, Norm::Sup] {
            assert_eq!(lp_dist(&f, &f, norm), Rat::zero());
        }
        let (_, _, _, p) = s3_algebra();
        let g = cond_exp(&f, &p);
        assert_eq!(lp_dist(&g, &f, Norm::L1), Rat::frac(5, 18));
        assert_eq!(lp_dist(&g, &f, Norm::Sup), Rat::frac(7, 9));
    }

    #[test]
    fn best_approx_examples() {
        let p = Partition::from_atoms(vec![iv((0, 0), (1, 2)), iv((1, 2), (3, 2)), iv((3, 2), (1, 0))])
            .unwrap();
        let half = iv((0, 0), (1, 1));
        let b = best_approx(&half, &p);
        assert_eq!(b, iv((0, 0), (1, 2)));
        assert_eq!(half.sym_diff(&b).measure(), Rat::frac(1, 4));
        assert_eq!(best_approx(&half, &Partition::dyadic(2)), half);
    }

    #[test]
    fn simplified_merges_equal_values() {
        let f = Step::new(
            Partition::dyadic(2),
            vec![Rat::one(), Rat::zero(), Rat::one(), Rat::zero()],
        )
        .unwrap();
        let s = f.simplified();
        assert_eq!(s.carrier().len(), 2);
        assert!(s.pointwise_eq(&f));
    }

    #[test]
    fn step_json_validates_lengths() {
        let f = indicator(&upper());
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(
            json,
            r#"{"carrier":[[["0","1/2"]],[["1/2","1"]]],"values":["0","1"]}"#
        );
        let back: Step = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"carrier":[[["0","1"]]],"values":["0","1"]}"#;
        assert!(serde_json::from_str::<Step>(bad).is_err());
    }
}
