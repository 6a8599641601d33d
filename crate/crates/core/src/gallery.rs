//! Named constructions: the typewriter counterexample, dyadic martingales,
//! constant and alternating sequences, and scenario-file sequences.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dset::DSet;
use crate::dyadic::Dyadic;
use crate::error::{LabError, Result};
use crate::partition::{Partition, GENERATOR_CAP};
use crate::rat::Rat;
use crate::seq::{AlgebraSeq, ParamValue, SeqSource};
use crate::step::{indicator, Step};

/// First block of the counterexample; at `n = 1` the set `A_1` is empty.
pub const COUNTEREXAMPLE_FIRST_N: u32 = 2;
/// Largest block the counterexample builtin and demo accept.
pub const COUNTEREXAMPLE_MAX_N: u32 = 14;

/// Registered builtin names.
pub const BUILTINS: [&str; 5] = [
    "counterexample_s3",
    "dyadic_martingale_inc",
    "dyadic_martingale_dec",
    "constant",
    "alternating",
];

/// Default upper index for periodic builtins.
const PERIODIC_MAX_HORIZON: u64 = 1 << 20;
const MARTINGALE_MAX_LEVEL: u64 = 24;

/// `A_n = [1/2, 1 - 2^-n)`.
pub fn a_n(n: u32) -> DSet {
    DSet::interval(Dyadic::of(1, 1), Dyadic::one_minus_pow2(n)).unwrap_or_else(|_| DSet::empty())
}

/// `J_n = [1 - 2^-(n+1), 1)`.
pub fn j_n(n: u32) -> DSet {
    DSet::interval(Dyadic::one_minus_pow2(n + 1), Dyadic::one()).expect("nonempty tail")
}

/// `I_{n,k} = [k/2^(n+2), (k+1)/2^(n+2))`, for `k < 2^(n+1)`.
pub fn i_nk(n: u32, k: u64) -> DSet {
    DSet::dyadic_cell(k, n + 2)
}

/// `B_{n,k} = I_{n,k} ∪ J_n`.
pub fn b_nk(n: u32, k: u64) -> DSet {
    i_nk(n, k).union(&j_n(n))
}

/// `C_{n,k} = (A_n ∪ B_{n,k})^c`.
pub fn c_nk(n: u32, k: u64) -> DSet {
    a_n(n).union(&b_nk(n, k)).complement()
}

/// Number of `k` values in block `n`.
pub fn block_len(n: u32) -> u64 {
    2u64 << n
}

/// Position of `(n, k)` in the n-major, k-minor enumeration starting at `n = 2`.
pub fn flat_index(n: u32, k: u64) -> Result<usize> {
    if !(COUNTEREXAMPLE_FIRST_N..=60).contains(&n) || k >= block_len(n) {
        return Err(LabError::Invalid(format!("no counterexample term (n={n}, k={k})")));
    }
    Ok(((2u64 << n) - 8 + k) as usize)
}

/// Inverse of [`flat_index`].
pub fn unflatten(i: usize) -> (u32, u64) {
    let shifted = i as u64 + 8;
    let n = 63 - shifted.leading_zeros() - 1;
    (n, shifted - (2u64 << n))
}

/// Last flat index of block `n_max`.
pub fn last_index(n_max: u32) -> usize {
    ((4u64 << n_max) - 9) as usize
}

/// The three-atom algebra `{A_n, B_{n,k}, C_{n,k}}` at a flat index.
pub fn counterexample_s3(i: usize) -> Result<Partition> {
    let (n, k) = unflatten(i);
    if n > 60 {
        return Err(LabError::Invalid(format!("counterexample index {i} too large")));
    }
    Ok(Partition::build(vec![a_n(n), b_nk(n, k), c_nk(n, k)]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Level-`n` dyadic partition, or level `max(top_level - n, 0)` when decreasing.
pub fn dyadic_martingale(n: u32, direction: Direction, top_level: u32) -> Partition {
    match direction {
        Direction::Increasing => Partition::dyadic(n),
        Direction::Decreasing => Partition::dyadic(top_level.saturating_sub(n)),
    }
}

/// The pair `{[0,1/2), [1/2,1)}`, `{[1/4,3/4), rest}` used by `alternating`.
pub fn alternating_pair() -> (Partition, Partition) {
    let middle = DSet::interval(Dyadic::of(1, 2), Dyadic::of(3, 2)).expect("interval");
    let q = Partition::build(vec![middle.complement(), middle]);
    (Partition::dyadic(1), q)
}

/// Sequence description in a scenario file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceSpec {
    Builtin(BuiltinSpec),
    Explicit(ExplicitSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuiltinSpec {
    pub builtin: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
}

/// Each entry lists the generators of one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub explicit: Vec<Vec<DSet>>,
    #[serde(default)]
    pub cycle: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionSpec {
    Indicator(DSet),
    Step(Step),
}

impl FunctionSpec {
    pub fn to_step(&self) -> Step {
        match self {
            FunctionSpec::Indicator(a) => indicator(a),
            FunctionSpec::Step(s) => s.clone(),
        }
    }

    pub fn as_set(&self) -> Option<&DSet> {
        match self {
            FunctionSpec::Indicator(a) => Some(a),
            FunctionSpec::Step(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Ae,
    L1,
    Boylan,
    Cover,
    LiminfLimsup,
    MuApproach,
    Wperp,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Ae => "ae",
            Analysis::L1 => "l1",
            Analysis::Boylan => "boylan",
            Analysis::Cover => "cover",
            Analysis::LiminfLimsup => "liminf_limsup",
            Analysis::MuApproach => "mu_approach",
            Analysis::Wperp => "wperp",
        }
    }
}

/// Size limits; each field falls back to the library default.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    pub join_atoms: usize,
    pub boylan_atoms: usize,
    pub generators: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            join_atoms: crate::lab::ae::JOIN_ATOM_CAP,
            boylan_atoms: crate::lab::boylan::BOYLAN_ATOM_CAP,
            generators: GENERATOR_CAP,
        }
    }
}

/// A scenario file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub sequence: SequenceSpec,
    /// Last index examined.
    pub horizon: usize,
    pub function: FunctionSpec,
    /// Limit function for distance series; defaults to `function`.
    #[serde(default)]
    pub target: Option<FunctionSpec>,
    /// Set for covering and approximation analyses; defaults to the
    /// indicator set of `function`.
    #[serde(default)]
    pub set: Option<DSet>,
    #[serde(default = "default_threshold")]
    pub threshold: Rat,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<Rat>,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub caps: Caps,
}

fn default_threshold() -> Rat {
    Rat::frac(1, 2)
}

fn default_epsilons() -> Vec<Rat> {
    vec![Rat::frac(1, 2)]
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ScenarioSpec =
            serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(LabError::Invalid("horizon must be at least 1".into()));
        }
        if !(self.threshold.is_positive() && self.threshold < Rat::one()) {
            return Err(LabError::Invalid(format!(
                "threshold {} is outside (0,1)",
                self.threshold
            )));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !e.is_positive()) {
            return Err(LabError::Invalid(format!("epsilon {e} must be positive")));
        }
        Ok(())
    }

    pub fn target_step(&self) -> Step {
        self.target.as_ref().unwrap_or(&self.function).to_step()
    }

    /// The set analysed by `cover` and `mu_approach`.
    pub fn analysis_set(&self) -> Option<&DSet> {
        self.set.as_ref().or_else(|| self.function.as_set())
    }
}

fn take_param(params: &mut BTreeMap<String, ParamValue>, key: &str, default: u64) -> Result<u64> {
    match params.remove(key) {
        None => Ok(default),
        Some(ParamValue::Int(v)) => Ok(v),
        Some(other) => Err(LabError::Invalid(format!(
            "parameter `{key}` must be a non-negative integer, got {other}"
        ))),
    }
}

fn capped(what: &'static str, value: u64, limit: u64) -> Result<u32> {
    if value > limit {
        return Err(LabError::CapExceeded {
            what,
            limit: limit as usize,
            actual: value as usize,
        });
    }
    Ok(value as u32)
}

/// Builds a registered builtin sequence.
pub fn builtin(name: &str, params: &BTreeMap<String, ParamValue>) -> Result<AlgebraSeq> {
    let mut rest = params.clone();
    let seq = match name {
        "counterexample_s3" => {
            let n_max = take_param(&mut rest, "n_max", COUNTEREXAMPLE_MAX_N as u64)?;
            let n_max = capped("counterexample n_max", n_max, COUNTEREXAMPLE_MAX_N as u64)?;
            if n_max < COUNTEREXAMPLE_FIRST_N {
                return Err(LabError::Invalid(format!("n_max must be at least {COUNTEREXAMPLE_FIRST_N}")));
            }
            AlgebraSeq::new(name, params.clone(), SeqSource::Counterexample, last_index(n_max))?
        }
        "dyadic_martingale_inc" => {
            let max_level = take_param(&mut rest, "max_level", 20)?;
            let max_level = capped("dyadic level", max_level, MARTINGALE_MAX_LEVEL)?;
            AlgebraSeq::new(name, params.clone(), SeqSource::DyadicIncreasing, max_level as usize)?
        }
        "dyadic_martingale_dec" => {
            let top_level = take_param(&mut rest, "top_level", 10)?;
            let top_level = capped("dyadic level", top_level, MARTINGALE_MAX_LEVEL)?;
            let max_horizon = take_param(&mut rest, "max_horizon", top_level as u64 + 10)?;
            AlgebraSeq::new(
                name,
                params.clone(),
                SeqSource::DyadicDecreasing { top_level },
                max_horizon as usize,
            )?
        }
        "constant" => {
            let level = take_param(&mut rest, "level", 0)?;
            let level = capped("dyadic level", level, MARTINGALE_MAX_LEVEL)?;
            let max_horizon = take_param(&mut rest, "max_horizon", PERIODIC_MAX_HORIZON)?;
            let source = SeqSource::Cycle(vec![Partition::dyadic(level)]);
            AlgebraSeq::new(name, params.clone(), source, max_horizon as usize)?
        }
        "alternating" => {
            let max_horizon = take_param(&mut rest, "max_horizon", PERIODIC_MAX_HORIZON)?;
            let (p, q) = alternating_pair();
            AlgebraSeq::new(name, params.clone(), SeqSource::Cycle(vec![p, q]), max_horizon as usize)?
        }
        other => return Err(LabError::UnknownBuiltin(other.to_string())),
    };
    if let Some(key) = rest.keys().next() {
        return Err(LabError::Invalid(format!("unknown parameter `{key}` for `{name}`")));
    }
    Ok(seq)
}

/// Builds the sequence a scenario describes and checks its horizon.
pub fn from_spec(spec: &ScenarioSpec) -> Result<AlgebraSeq> {
    let seq = match &spec.sequence {
        SequenceSpec::Builtin(b) => builtin(&b.builtin, &b.params)?,
        SequenceSpec::Explicit(e) => {
            if e.explicit.is_empty() {
                return Err(LabError::Invalid("explicit sequence is empty".into()));
            }
            let terms = e
                .explicit
                .iter()
                .map(|gens| {
                    if gens.len() > spec.caps.generators {
                        return Err(LabError::CapExceeded {
                            what: "generator",
                            limit: spec.caps.generators,
                            actual: gens.len(),
                        });
                    }
                    crate::partition::generate(gens)
                })
                .collect::<Result<Vec<_>>>()?;
            if e.cycle {
                AlgebraSeq::new("explicit", BTreeMap::new(), SeqSource::Cycle(terms), PERIODIC_MAX_HORIZON as usize)?
            } else {
                let max = terms.len() - 1;
                if spec.horizon > max {
                    return Err(LabError::Invalid(format!(
                        "explicit sequence has {} terms but horizon {} needs {}",
                        terms.len(),
                        spec.horizon,
                        spec.horizon + 1
                    )));
                }
                AlgebraSeq::new("explicit", BTreeMap::new(), SeqSource::List(terms), max)?
            }
        }
    };
    seq.check_horizon(spec.horizon)?;
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dset::make_set;
    use crate::step::cond_exp;

    #[test]
    fn flat_index_round_trip() {
        assert_eq!(flat_index(2, 0).unwrap(), 0);
        assert_eq!(flat_index(2, 7).unwrap(), 7);
        assert_eq!(flat_index(3, 0).unwrap(), 8);
        assert!(flat_index(2, 8).is_err());
        assert!(flat_index(1, 0).is_err());
        for i in 0..2000 {
            let (n, k) = unflatten(i);
            assert_eq!(flat_index(n, k).unwrap(), i);
        }
        assert_eq!(last_index(2), 7);
        assert_eq!(unflatten(last_index(5)), (5, block_len(5) - 1));
    }

    #[test]
    fn first_term_atoms() {
        let p = counterexample_s3(0).unwrap();
        let b = make_set(vec![(Dyadic::of(0, 0), Dyadic::of(1, 4)), (Dyadic::of(7, 3), Dyadic::one())]).unwrap();
        let c = make_set(vec![(Dyadic::of(1, 4), Dyadic::of(1, 1)), (Dyadic::of(3, 2), Dyadic::of(7, 3))]).unwrap();
        let a = DSet::interval(Dyadic::of(1, 1), Dyadic::of(3, 2)).unwrap();
        assert_eq!(p.atoms(), &[b, c, a]);
        assert!(a_n(1).is_empty());
    }

    #[test]
    fn block_measures() {
        for n in 2..=10 {
            let mut sweep = DSet::empty();
            for k in 0..block_len(n) {
                assert_eq!(b_nk(n, k).measure(), Rat::frac(3, 1 << (n + 2)));
                assert_eq!(c_nk(n, k).measure(), Rat::frac(1, 2) + Rat::pow2_inv(n + 2));
                sweep = sweep.union(&i_nk(n, k));
            }
            assert_eq!(sweep, DSet::interval(Dyadic::zero(), Dyadic::of(1, 1)).unwrap());
        }
    }

    #[test]
    fn closed_form_values_small_blocks() {
        let upper = indicator(&DSet::interval(Dyadic::of(1, 1), Dyadic::one()).unwrap());
        for n in 2..=5u32 {
            for k in 0..block_len(n) {
                let p = counterexample_s3(flat_index(n, k).unwrap()).unwrap();
                let g = cond_exp(&upper, &p);
                let at = |s: &DSet| g.value_at(s.leftmost().unwrap()).unwrap().clone();
                assert_eq!(at(&a_n(n)), Rat::one());
                assert_eq!(at(&b_nk(n, k)), Rat::frac(2, 3));
                assert_eq!(at(&c_nk(n, k)), Rat::frac(2, 1 + (2 << n)));
            }
        }
    }

    #[test]
    fn martingales() {
        assert!(dyadic_martingale(0, Direction::Increasing, 0).is_trivial());
        assert_eq!(dyadic_martingale(2, Direction::Increasing, 0).len(), 4);
        assert!(dyadic_martingale(5, Direction::Decreasing, 3).is_trivial());
        assert_eq!(dyadic_martingale(1, Direction::Decreasing, 3).len(), 4);
    }

    #[test]
    fn builtin_registry() {
        for name in BUILTINS {
            assert!(builtin(name, &BTreeMap::new()).is_ok(), "{name}");
        }
        assert_eq!(
            builtin("nope", &BTreeMap::new()),
            Err(LabError::UnknownBuiltin("nope".into()))
        );
        let mut params = BTreeMap::new();
        params.insert("n_max".to_string(), ParamValue::Int(15));
        assert!(matches!(
            builtin("counterexample_s3", &params),
            Err(LabError::CapExceeded { .. })
        ));
        params.insert("n_max".to_string(), ParamValue::Int(3));
        params.insert("bogus".to_string(), ParamValue::Int(3));
        assert!(matches!(builtin("counterexample_s3", &params), Err(LabError::Invalid(_))));
    }

    #[test]
    fn scenario_parsing() {
        let text = r#"{
            "sequence": {"explicit": [[[["0", "1/2"]]]], "cycle": true},
            "horizon": 4,
            "function": {"indicator": [["0", "1/4"]]},
            "analyses": ["ae", "liminf_limsup"]
        }"#;
        let spec = ScenarioSpec::from_json(text).unwrap();
        assert_eq!(spec.epsilons, vec![Rat::frac(1, 2)]);
        let seq = from_spec(&spec).unwrap();
        for n in 0..=4 {
            assert_eq!(seq.term(n).unwrap(), Partition::dyadic(1));
        }
        let bad = text.replace("\"horizon\"", "\"horizn\"");
        assert!(matches!(ScenarioSpec::from_json(&bad), Err(LabError::Parse(_))));
    }

    #[test]
    fn explicit_list_needs_enough_terms() {
        let text = r#"{
            "sequence": {"explicit": [[], [[["0", "1/2"]]]]},
            "horizon": 2,
            "function": {"indicator": []}
        }"#;
        let spec = ScenarioSpec::from_json(text).unwrap();
        assert!(from_spec(&spec).is_err());
        let ok = ScenarioSpec { horizon: 1, ..spec };
        let seq = from_spec(&ok).unwrap();
        assert!(seq.term(0).unwrap().is_trivial());
        assert_eq!(seq.term(1).unwrap(), Partition::dyadic(1));
    }
}
