//! The typewriter counterexample run end to end: conditional expectations of
//! `χ_{[1/2,1)}`, their `L1` distances, and the tail-supremum exceedance that
//! keeps the sequence from converging almost everywhere.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dset::DSet;
use crate::dyadic::Dyadic;
use crate::error::{invariant, LabError, Result};
use crate::gallery::{self, a_n, b_nk, c_nk, flat_index, unflatten, COUNTEREXAMPLE_FIRST_N, COUNTEREXAMPLE_MAX_N};
use crate::lab::ae::{ae_report, AeOptions, Checkpoints};
use crate::rat::Rat;
use crate::seq::ParamValue;
use crate::step::{cond_exp, indicator, lp_dist, Norm};

/// Exceedance level used by the demo.
pub fn demo_eps() -> Rat {
    Rat::frac(2, 3)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoRow {
    pub index: usize,
    pub n: u32,
    pub k: u64,
    /// `ℰ(χ_{[1/2,1)} | 𝔄_{n,k})` on `A_n`, `B_{n,k}`, `C_{n,k}`.
    pub on_a: Rat,
    pub on_b: Rat,
    pub on_c: Rat,
    pub l1: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockL1 {
    pub n: u32,
    /// Largest `L1` distance over the block.
    pub l1: Rat,
    /// `4 · 2^-n`.
    pub bound: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DemoReport {
    pub n_max: u32,
    pub horizon: usize,
    pub rows: Vec<DemoRow>,
    pub blocks: Vec<BlockL1>,
    pub eps: Rat,
    /// `μ{tail_sup_N ≥ eps}` for every window start `N`.
    pub exceedance: Vec<Rat>,
    /// Window starts up to this index contain a full sweep of `[0,1/2)`.
    pub full_sweep_until: usize,
    pub min_exceedance: Rat,
    pub l1_trend_pass: bool,
    pub ae_fail: bool,
    pub verdicts: Vec<String>,
}

/// Runs the counterexample through block `n_max` (between 2 and 14).
pub fn counterexample_demo(n_max: u32) -> Result<DemoReport> {
    if n_max < COUNTEREXAMPLE_FIRST_N {
        return Err(LabError::Invalid(format!(
            "n_max must be at least {COUNTEREXAMPLE_FIRST_N}"
        )));
    }
    let mut params = BTreeMap::new();
    params.insert("n_max".to_string(), ParamValue::Int(n_max as u64));
    let seq = gallery::builtin("counterexample_s3", &params)?;
    debug_assert!(n_max <= COUNTEREXAMPLE_MAX_N);
    let h = seq.max_horizon();
    let upper = DSet::interval(Dyadic::of(1, 1), Dyadic::one()).expect("interval");
    let chi = indicator(&upper);

    let terms = seq.terms(h)?;
    let rows: Vec<DemoRow> = terms
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let (n, k) = unflatten(index);
            let g = cond_exp(&chi, p);
            let at = |s: &DSet| -> Result<Rat> {
                let x = s.leftmost().ok_or_else(|| invariant("empty counterexample atom"))?;
                g.value_at(x).cloned().ok_or_else(|| invariant("point outside [0,1)"))
            };
            Ok(DemoRow {
                index,
                n,
                k,
                on_a: at(&a_n(n))?,
                on_b: at(&b_nk(n, k))?,
                on_c: at(&c_nk(n, k))?,
                l1: lp_dist(&g, &chi, Norm::L1),
            })
        })
        .collect::<Result<_>>()?;

    let blocks: Vec<BlockL1> = (COUNTEREXAMPLE_FIRST_N..=n_max)
        .map(|n| {
            let l1 = rows
                .iter()
                .filter(|r| r.n == n)
                .map(|r| r.l1.clone())
                .max()
                .unwrap_or_default();
            BlockL1 {
                n,
                l1,
                bound: Rat::int(4) * Rat::pow2_inv(n),
            }
        })
        .collect();
    let l1_trend_pass = blocks.windows(2).all(|w| w[1].l1 < w[0].l1) && blocks.iter().all(|b| b.l1 <= b.bound);

    let opts = AeOptions {
        epsilons: vec![demo_eps()],
        checkpoints: Checkpoints::None,
        ..AeOptions::default()
    };
    let report = ae_report(&seq, &chi, &chi, h, &opts)?;
    let exceedance = report.exceedance[0].by_start.clone();
    let full_sweep_until = flat_index(n_max, 0)?;
    let min_exceedance = exceedance[..=full_sweep_until]
        .iter()
        .min()
        .cloned()
        .unwrap_or_default();
    let ae_fail = min_exceedance >= Rat::frac(1, 2);

    let verdicts = vec![
        format!("L1 → 0 trend: {}", if l1_trend_pass { "pass" } else { "fail" }),
        if ae_fail {
            format!(
                "a.e.: fail (μ{{tail_sup_N ≥ {}}} ≥ {} for every N ≤ {full_sweep_until})",
                demo_eps(),
                min_exceedance
            )
        } else {
            format!("a.e.: no persistent exceedance (minimum {min_exceedance})")
        },
    ];

    Ok(DemoReport {
        n_max,
        horizon: h,
        rows,
        blocks,
        eps: demo_eps(),
        exceedance,
        full_sweep_until,
        min_exceedance,
        l1_trend_pass,
        ae_fail,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_demo() {
        let r = counterexample_demo(2).unwrap();
        assert_eq!(r.rows.len(), 8);
        for row in &r.rows {
            assert_eq!((row.on_a.clone(), row.on_b.clone(), row.on_c.clone()), (Rat::one(), Rat::frac(2, 3), Rat::frac(2, 9)));
            assert_eq!(row.l1, Rat::frac(5, 18));
        }
        assert_eq!(r.full_sweep_until, 0);
        assert_eq!(r.min_exceedance, Rat::frac(5, 8));
        assert!(r.ae_fail && r.l1_trend_pass);
    }

    #[test]
    fn rejects_out_of_range_blocks() {
        assert!(matches!(counterexample_demo(1), Err(LabError::Invalid(_))));
        assert!(matches!(counterexample_demo(15), Err(LabError::CapExceeded { .. })));
    }
}
