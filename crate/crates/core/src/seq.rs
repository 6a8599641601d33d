//! Sequences of finite σ-subalgebras and their horizon-truncated lim inf / lim sup.
//!
//! Indices are 0-based. A horizon `H` means the terms `0..=H` are examined.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::gallery;
use crate::partition::Partition;
use crate::rat::Rat;

/// A named scalar parameter of a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(u64),
    Rat(Rat),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Rat(v) => write!(f, "{v}"),
        }
    }
}

/// How term `n` is produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeqSource {
    /// The flattened `(n, k)` counterexample family.
    Counterexample,
    /// Level-`n` dyadic partitions.
    DyadicIncreasing,
    /// Level `max(top_level - n, 0)` dyadic partitions.
    DyadicDecreasing { top_level: u32 },
    /// Term `n` is `terms[n % len]`.
    Cycle(Vec<Partition>),
    /// Term `n` is `terms[n]`.
    List(Vec<Partition>),
}

/// A deterministic sequence `n ↦ 𝔄_n`, total on `0..=max_horizon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraSeq {
    name: String,
    params: BTreeMap<String, ParamValue>,
    source: SeqSource,
    max_horizon: usize,
}

impl AlgebraSeq {
    pub fn new(
        name: impl Into<String>,
        params: BTreeMap<String, ParamValue>,
        source: SeqSource,
        max_horizon: usize,
    ) -> Result<Self> {
        match &source {
            SeqSource::Cycle(terms) if terms.is_empty() => {
                return Err(LabError::Invalid("cycled sequence needs at least one term".into()))
            }
            SeqSource::List(terms) if terms.len() <= max_horizon => {
                return Err(LabError::Invalid(format!(
                    "explicit sequence has {} terms, horizon {} needs {}",
                    terms.len(),
                    max_horizon,
                    max_horizon + 1
                )))
            }
            _ => {}
        }
        Ok(AlgebraSeq {
            name: name.into(),
            params,
            source,
            max_horizon,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, ParamValue> {
        &self.params
    }

    pub fn source(&self) -> &SeqSource {
        &self.source
    }

    /// Largest valid index.
    pub fn max_horizon(&self) -> usize {
        self.max_horizon
    }

    pub fn check_horizon(&self, h: usize) -> Result<()> {
        if h > self.max_horizon {
            return Err(LabError::Horizon {
                requested: h,
                max: self.max_horizon,
            });
        }
        Ok(())
    }

    pub fn term(&self, n: usize) -> Result<Partition> {
        self.check_horizon(n)?;
        Ok(match &self.source {
            SeqSource::Counterexample => gallery::counterexample_s3(n)?,
            SeqSource::DyadicIncreasing => Partition::dyadic(n as u32),
            SeqSource::DyadicDecreasing { top_level } => {
                Partition::dyadic(top_level.saturating_sub(n.min(u32::MAX as usize) as u32))
            }
            SeqSource::Cycle(terms) => terms[n % terms.len()].clone(),
            SeqSource::List(terms) => terms[n].clone(),
        })
    }

    /// Terms `0..=h`, evaluated in parallel.
    pub fn terms(&self, h: usize) -> Result<Vec<Partition>> {
        self.check_horizon(h)?;
        (0..=h).into_par_iter().map(|n| self.term(n)).collect()
    }
}

/// Direction of a refinement chain, if the terms form one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    Neither,
}

pub fn monotonicity(terms: &[Partition]) -> Monotonicity {
    let mut inc = true;
    let mut dec = true;
    for w in terms.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        inc &= w[1].refines(&w[0]);
        dec &= w[0].refines(&w[1]);
        if !inc && !dec {
            break;
        }
    }
    match (inc, dec) {
        (true, true) => Monotonicity::Constant,
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (false, false) => Monotonicity::Neither,
    }
}

/// One row of the tail table: meet and join of `𝔄_m, …, 𝔄_H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailRow {
    pub m: usize,
    pub meet: Partition,
    pub join: Partition,
}

/// Finite-horizon lim inf / lim sup diagnostics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub horizon: usize,
    /// `⋁_{m≤H} ⋀_{m≤n≤H} 𝔄_n`.
    pub liminf: Partition,
    /// `⋀_{m≤H} ⋁_{m≤n≤H} 𝔄_n`.
    pub limsup: Partition,
    /// Meet over the last-quartile window `N_q..=H`.
    pub window_start: usize,
    pub window_meet: Partition,
    /// Join over the same window; `None` when it exceeds the atom cap.
    pub window_join: Option<Partition>,
    /// Tail rows for the last few `m`, ascending.
    pub table: Vec<TailRow>,
    pub monotonicity: Monotonicity,
}

/// Number of trailing rows kept in [`LimitReport::table`].
pub const TAIL_TABLE_ROWS: usize = 32;

/// Start of the last-quartile window among indices `0..=h`: it holds
/// `max(min(2, h+1), ceil((h+1)/4))` terms.
pub fn last_quartile_start(h: usize) -> usize {
    let count = h + 1;
    let q = count.div_ceil(4).max(count.min(2));
    count - q
}

fn tail_join(terms: &[Partition], from: usize, cap: usize) -> Option<Partition> {
    let mut acc = terms[terms.len() - 1].clone();
    for p in terms[from..terms.len() - 1].iter().rev() {
        acc = acc.join(p);
        if acc.len() > cap {
            return None;
        }
    }
    Some(acc)
}

/// lim inf / lim sup at horizon `h`, with `join_cap` bounding the window join.
pub fn limit_report(seq: &AlgebraSeq, h: usize, join_cap: usize) -> Result<LimitReport> {
    let terms = seq.terms(h)?;
    let last = terms[h].clone();

    // Tail meets increase with m and tail joins decrease with m, so the outer
    // join (meet) over m is attained at m = H.
    let mut meets = vec![last.clone(); h + 1];
    for m in (0..h).rev() {
        meets[m] = terms[m].meet(&meets[m + 1]);
    }
    let liminf = meets.iter().fold(Partition::trivial(), |acc, p| acc.join(p));

    let first_row = (h + 1).saturating_sub(TAIL_TABLE_ROWS);
    let mut table = Vec::with_capacity(h + 1 - first_row);
    let mut join = last.clone();
    for m in (first_row..=h).rev() {
        if m < h {
            join = join.join(&terms[m]);
        }
        table.push(TailRow {
            m,
            meet: meets[m].clone(),
            join: join.clone(),
        });
    }
    table.reverse();
    let limsup = table
        .iter()
        .map(|row| &row.join)
        .fold(table[0].join.clone(), |acc, p| acc.meet(p));

    let window_start = last_quartile_start(h);
    Ok(LimitReport {
        horizon: h,
        liminf,
        limsup,
        window_start,
        window_meet: meets[window_start].clone(),
        window_join: tail_join(&terms, window_start, join_cap),
        table,
        monotonicity: monotonicity(&terms),
    })
}

/// `⋁_{m≤H} ⋀_{m≤n≤H} 𝔄_n`.
pub fn liminf_algebra(seq: &AlgebraSeq, h: usize) -> Result<Partition> {
    Ok(limit_report(seq, h, usize::MAX)?.liminf)
}

/// `⋀_{m≤H} ⋁_{m≤n≤H} 𝔄_n`.
pub fn limsup_algebra(seq: &AlgebraSeq, h: usize) -> Result<Partition> {
    Ok(limit_report(seq, h, usize::MAX)?.limsup)
}
