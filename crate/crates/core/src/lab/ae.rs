//! Convergence of `g_n = ℰ(f | 𝔄_n)` to a target: distance series, pointwise
//! tail suprema and their exceedance measures.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invariant, Result};
use crate::lab::engine::{Coverage, Grid, MaxTree, Span};
use crate::partition::Partition;
use crate::rat::Rat;
use crate::seq::{last_quartile_start, AlgebraSeq};
use crate::step::{cond_exp, lp_dist, Norm, Step};

/// Default cap on the number of elementary cells of the common refinement.
pub const JOIN_ATOM_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceRow {
    pub index: usize,
    pub l1: Rat,
    pub l2_squared: Rat,
    pub sup: Rat,
}

/// `sup_{N≤n≤H} |g_n - target|` pointwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailSup {
    pub start: usize,
    pub step: Step,
}

/// `μ{tail_sup_N ≥ eps}` for `N = 0..=H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exceedance {
    pub eps: Rat,
    pub by_start: Vec<Rat>,
}

/// Passes when `μ{tail_sup_{N_q} ≥ eps} ≤ eps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AeVerdict {
    pub eps: Rat,
    pub exceedance: Rat,
    pub pass: bool,
}

/// Passes when the largest `L1` distance on the last-quartile window is `≤ eps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct L1Verdict {
    pub eps: Rat,
    pub window_max: Rat,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub horizon: usize,
    pub window_start: usize,
    pub distances: Vec<DistanceRow>,
    pub tail_sup: Vec<TailSup>,
    pub exceedance: Vec<Exceedance>,
    /// Pointwise `sup` and `inf` of `g_n` over the window `N_q..=H`.
    pub limsup: Step,
    pub liminf: Step,
    pub l1_non_increasing: bool,
    pub ae: Vec<AeVerdict>,
    pub l1: Vec<L1Verdict>,
}

/// Window starts at which the tail supremum is materialized.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Checkpoints {
    /// Every start when `H < 16`, otherwise `0, H/4, H/2, N_q, H`.
    #[default]
    Default,
    None,
    At(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AeOptions {
    pub epsilons: Vec<Rat>,
    pub checkpoints: Checkpoints,
    pub join_cap: usize,
}

impl Default for AeOptions {
    fn default() -> Self {
        AeOptions {
            epsilons: vec![Rat::frac(1, 2)],
            checkpoints: Checkpoints::Default,
            join_cap: JOIN_ATOM_CAP,
        }
    }
}

fn checkpoint_list(checkpoints: &Checkpoints, h: usize) -> Vec<usize> {
    let mut list = match checkpoints {
        Checkpoints::None => Vec::new(),
        Checkpoints::At(v) => v.iter().copied().filter(|&n| n <= h).collect(),
        Checkpoints::Default if h < 16 => (0..=h).collect(),
        Checkpoints::Default => vec![0, h / 4, h / 2, last_quartile_start(h), h],
    };
    list.sort_unstable();
    list.dedup();
    list
}

struct Term {
    distance: DistanceRow,
    diff: Vec<Span>,
    values: Vec<Span>,
}

pub fn ae_report(
    seq: &AlgebraSeq,
    f: &Step,
    target: &Step,
    h: usize,
    opts: &AeOptions,
) -> Result<ConvergenceReport> {
    let terms = seq.terms(h)?;
    let grid = Grid::of_partitions(terms.iter().chain([target.carrier()]), opts.join_cap)?;
    let window_start = last_quartile_start(h);

    let rows: Vec<Term> = terms
        .par_iter()
        .enumerate()
        .map(|(index, p)| {
            let g = cond_exp(f, p);
            Term {
                distance: DistanceRow {
                    index,
                    l1: lp_dist(&g, target, Norm::L1),
                    l2_squared: lp_dist(&g, target, Norm::L2Squared),
                    sup: lp_dist(&g, target, Norm::Sup),
                },
                diff: grid.abs_diff_spans(&g, target),
                values: if index >= window_start { grid.spans_of(&g) } else { Vec::new() },
            }
        })
        .collect();

    let exceedance: Vec<Exceedance> = opts
        .epsilons
        .par_iter()
        .map(|eps| {
            let mut cover = Coverage::new(&grid);
            let mut by_start = vec![Rat::zero(); h + 1];
            for n in (0..=h).rev() {
                for (lo, hi, v) in &rows[n].diff {
                    if v >= eps {
                        cover.cover(*lo, *hi);
                    }
                }
                by_start[n] = cover.measure().clone();
            }
            Exceedance {
                eps: eps.clone(),
                by_start,
            }
        })
        .collect();

    let checkpoints = checkpoint_list(&opts.checkpoints, h);
    let mut tail_sup = Vec::with_capacity(checkpoints.len());
    if !checkpoints.is_empty() {
        let mut tree = MaxTree::new(grid.cells());
        let mut pending = checkpoints.iter().rev().peekable();
        for n in (checkpoints[0]..=h).rev() {
            for (lo, hi, v) in &rows[n].diff {
                tree.raise(*lo, *hi, v);
            }
            if pending.peek() == Some(&&n) {
                pending.next();
                tail_sup.push(TailSup {
                    start: n,
                    step: grid.step_of(&unwrap_cells(tree.snapshot())?),
                });
            }
        }
        tail_sup.reverse();
    }

    let mut upper = MaxTree::new(grid.cells());
    let mut lower = MaxTree::new(grid.cells());
    for row in &rows[window_start..] {
        for (lo, hi, v) in &row.values {
            upper.raise(*lo, *hi, v);
            lower.raise(*lo, *hi, &-v);
        }
    }
    let limsup = grid.step_of(&unwrap_cells(upper.snapshot())?);
    let liminf = grid.step_of(&unwrap_cells(lower.snapshot())?).map(|v| -v);

    let distances: Vec<DistanceRow> = rows.into_iter().map(|t| t.distance).collect();
    let l1_non_increasing = distances.windows(2).all(|w| w[1].l1 <= w[0].l1);
    let window_max = distances[window_start..]
        .iter()
        .map(|d| d.l1.clone())
        .max()
        .unwrap_or_default();
    let ae = exceedance
        .iter()
        .map(|e| {
            let at = e.by_start[window_start].clone();
            AeVerdict {
                eps: e.eps.clone(),
                pass: at <= e.eps,
                exceedance: at,
            }
        })
        .collect();
    let l1 = opts
        .epsilons
        .iter()
        .map(|eps| L1Verdict {
            eps: eps.clone(),
            window_max: window_max.clone(),
            pass: &window_max <= eps,
        })
        .collect();

    Ok(ConvergenceReport {
        horizon: h,
        window_start,
        distances,
        tail_sup,
        exceedance,
        limsup,
        liminf,
        l1_non_increasing,
        ae,
        l1,
    })
}

fn unwrap_cells(cells: Vec<Option<Rat>>) -> Result<Vec<Rat>> {
    cells
        .into_iter()
        .map(|c| c.ok_or_else(|| invariant("tail supremum left a cell uncovered")))
        .collect()
}

/// `ℰ(f | 𝔄_n)` for `n = 0..=h`.
pub fn cond_exp_series(seq: &AlgebraSeq, f: &Step, h: usize) -> Result<Vec<Step>> {
    let terms: Vec<Partition> = seq.terms(h)?;
    Ok(terms.par_iter().map(|p| cond_exp(f, p)).collect())
}
