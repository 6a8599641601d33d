//! Set-sequence diagnostics: tail symmetric-difference profiles, the
//! tail-set cross-check, and approximation-in-measure profiles.

use rayon::prelude::*;
use serde::Serialize;

use crate::dset::DSet;
use crate::error::{invariant, Result};
use crate::lab::engine::tail_union_profile;
use crate::rat::Rat;
use crate::seq::{last_quartile_start, AlgebraSeq};
use crate::step::best_approx;

/// `profile[N] = μ(⋃_{N≤n≤H} (A_n △ A))` for `N = 0..=H`, where `H + 1 = sets.len()`.
pub fn tail_symdiff_profile(sets: &[DSet], a: &DSet) -> Vec<Rat> {
    let diffs: Vec<DSet> = sets.par_iter().map(|s| s.sym_diff(a)).collect();
    tail_union_profile(&diffs, usize::MAX).expect("uncapped grid")
}

/// Horizon version of the equivalence between tail-set identities and the
/// decay of the tail symmetric-difference profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TailSetReport {
    pub horizon: usize,
    pub window_start: usize,
    /// `⋂_{N_q≤n≤H} A_n`.
    pub inner: DSet,
    /// `⋃_{N_q≤n≤H} A_n`.
    pub outer: DSet,
    pub inner_symdiff: Rat,
    pub outer_symdiff: Rat,
    pub profile: Vec<Rat>,
    pub profile_at_window: Rat,
    pub inner_matches: bool,
    pub outer_matches: bool,
    /// Both tail sets equal `A` exactly when the profile vanishes on the window.
    pub consistent: bool,
}

/// Requires at least one set.
pub fn tail_set_crosscheck(sets: &[DSet], a: &DSet) -> Result<TailSetReport> {
    let h = sets.len().checked_sub(1).ok_or_else(|| invariant("no sets to check"))?;
    let window_start = last_quartile_start(h);
    let window = &sets[window_start..];
    let inner = window[1..].iter().fold(window[0].clone(), |acc, s| acc.intersect(s));
    let outer = DSet::union_all(window);
    let profile = tail_symdiff_profile(sets, a);
    let at_window = profile[window_start].clone();
    let inner_symdiff = inner.sym_diff(a).measure();
    let outer_symdiff = outer.sym_diff(a).measure();
    if inner_symdiff > at_window || outer_symdiff > at_window {
        return Err(invariant(format!(
            "tail sets are farther from A than the tail profile allows ({inner_symdiff}, {outer_symdiff} > {at_window})"
        )));
    }
    let inner_matches = &inner == a;
    let outer_matches = &outer == a;
    let consistent = (inner_matches && outer_matches) == at_window.is_zero();
    if !consistent {
        return Err(invariant("tail sets disagree with the tail profile"));
    }
    Ok(TailSetReport {
        horizon: h,
        window_start,
        inner,
        outer,
        inner_symdiff,
        outer_symdiff,
        profile,
        profile_at_window: at_window,
        inner_matches,
        outer_matches,
        consistent,
    })
}

/// `μ(A △ best_approx(A, 𝔄_n))` for `n = 0..=h`.
pub fn mu_approach_profile(seq: &AlgebraSeq, a: &DSet, h: usize) -> Result<Vec<Rat>> {
    let terms = seq.terms(h)?;
    Ok(terms
        .par_iter()
        .map(|p| a.sym_diff(&best_approx(a, p)).measure())
        .collect())
}
