//! Uniform-covering witnesses: super-level selections `A_n = {ℰ(χ_A|𝔄_n) ≥ r}`,
//! their horizon checks, Boolean combinations, and the cross-check against
//! almost-everywhere convergence of `ℰ(χ_A|𝔄_n)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dset::DSet;
use crate::error::{invalid, invariant, Result};
use crate::lab::ae::{ae_report, AeOptions, Checkpoints};
use crate::lab::sets_profile::tail_symdiff_profile;
use crate::partition::Partition;
use crate::rat::Rat;
use crate::seq::{last_quartile_start, AlgebraSeq};
use crate::step::{cond_exp, indicator, indicator_seminorm_ratio};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverWitness {
    pub horizon: usize,
    pub target: DSet,
    /// `None` for witnesses built by [`combine_witnesses`].
    pub threshold: Option<Rat>,
    pub sets: Vec<DSet>,
    /// `μ(⋃_{N≤n≤H} (A_n △ A))` for `N = 0..=H`.
    pub tail_symdiff: Vec<Rat>,
    /// `‖χ_{A∖A_n}‖_{𝔄_n}` per index.
    pub seminorms: Vec<Rat>,
    #[serde(skip)]
    algebras: Vec<Partition>,
}

impl CoverWitness {
    fn assemble(target: DSet, threshold: Option<Rat>, sets: Vec<DSet>, algebras: Vec<Partition>) -> Self {
        let tail_symdiff = tail_symdiff_profile(&sets, &target);
        let seminorms = sets
            .par_iter()
            .zip(&algebras)
            .map(|(s, p)| indicator_seminorm_ratio(&target.difference(s), p))
            .collect();
        CoverWitness {
            horizon: sets.len() - 1,
            target,
            threshold,
            sets,
            tail_symdiff,
            seminorms,
            algebras,
        }
    }

    pub fn algebras(&self) -> &[Partition] {
        &self.algebras
    }
}

/// Builds the super-level witness. Every seminorm is strictly below `r` by
/// construction; a violation is reported as an invariant error.
pub fn uniform_cover_witness(seq: &AlgebraSeq, a: &DSet, r: &Rat, h: usize) -> Result<CoverWitness> {
    if !(r.is_positive() && r < &Rat::one()) {
        return Err(invalid(format!("threshold {r} is outside (0,1)")));
    }
    let algebras = seq.terms(h)?;
    let chi = indicator(a);
    let sets = algebras
        .par_iter()
        .map(|p| cond_exp(&chi, p).level_set(|v| v >= r))
        .collect();
    let w = CoverWitness::assemble(a.clone(), Some(r.clone()), sets, algebras);
    if let Some(n) = w.seminorms.iter().position(|s| s >= r) {
        return Err(invariant(format!(
            "witness seminorm {} at index {n} is not below threshold {r}",
            w.seminorms[n]
        )));
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverVerdict {
    pub eps: Rat,
    pub window_start: usize,
    /// `⋂` and `⋃` of the witness sets over the window.
    pub inner: DSet,
    pub outer: DSet,
    /// `tail_symdiff` at the window start; the largest value on the window.
    pub tail_symdiff_max: Rat,
    pub seminorm_max: Rat,
    pub tail_sets_ok: bool,
    pub seminorms_ok: bool,
    pub pass: bool,
}

/// Last-quartile check of both covering conditions with tolerance `eps`.
pub fn check_uniform_cover(w: &CoverWitness, eps: &Rat) -> CoverVerdict {
    let window_start = last_quartile_start(w.horizon);
    let window = &w.sets[window_start..];
    let inner = window[1..].iter().fold(window[0].clone(), |acc, s| acc.intersect(s));
    let outer = DSet::union_all(window);
    let tail_symdiff_max = w.tail_symdiff[window_start].clone();
    let seminorm_max = w.seminorms[window_start..].iter().max().cloned().unwrap_or_default();
    let tail_sets_ok = &tail_symdiff_max <= eps;
    let seminorms_ok = &seminorm_max <= eps;
    CoverVerdict {
        eps: eps.clone(),
        window_start,
        inner,
        outer,
        tail_symdiff_max,
        seminorm_max,
        tail_sets_ok,
        seminorms_ok,
        pass: tail_sets_ok && seminorms_ok,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    Intersect,
    Union,
}

/// Per-index Boolean combination of two witnesses over the same sequence.
/// The combined seminorms are checked against the sum of the parts.
pub fn combine_witnesses(w1: &CoverWitness, w2: &CoverWitness, mode: CombineMode) -> Result<CoverWitness> {
    if w1.horizon != w2.horizon {
        return Err(invalid(format!(
            "witness horizons differ: {} and {}",
            w1.horizon, w2.horizon
        )));
    }
    if w1.algebras != w2.algebras {
        return Err(invalid("witnesses come from different sequences"));
    }
    let op = |x: &DSet, y: &DSet| match mode {
        CombineMode::Intersect => x.intersect(y),
        CombineMode::Union => x.union(y),
    };
    let sets = w1.sets.iter().zip(&w2.sets).map(|(x, y)| op(x, y)).collect();
    let w = CoverWitness::assemble(op(&w1.target, &w2.target), None, sets, w1.algebras.clone());
    for (n, s) in w.seminorms.iter().enumerate() {
        if s > &(&w1.seminorms[n] + &w2.seminorms[n]) {
            return Err(invariant(format!("combined seminorm at index {n} exceeds the sum of the parts")));
        }
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCrosscheck {
    pub eps: Rat,
    pub threshold: Rat,
    /// `μ{tail_sup_{N_q} |ℰ(χ_A|𝔄_n) - χ_A| ≥ eps}`.
    pub ae_exceedance: Rat,
    pub ae_pass: bool,
    pub set: CoverVerdict,
    pub complement: CoverVerdict,
    /// The a.e. verdict agrees with "both `A` and `A^c` are covered".
    pub consistent: bool,
}

pub fn cover_crosscheck(seq: &AlgebraSeq, a: &DSet, r: &Rat, h: usize, eps: &Rat) -> Result<CoverCrosscheck> {
    let chi = indicator(a);
    let opts = AeOptions {
        epsilons: vec![eps.clone()],
        checkpoints: Checkpoints::None,
        ..AeOptions::default()
    };
    let report = ae_report(seq, &chi, &chi, h, &opts)?;
    let ae = &report.ae[0];
    let set = check_uniform_cover(&uniform_cover_witness(seq, a, r, h)?, eps);
    let complement = check_uniform_cover(&uniform_cover_witness(seq, &a.complement(), r, h)?, eps);
    Ok(CoverCrosscheck {
        eps: eps.clone(),
        threshold: r.clone(),
        ae_exceedance: ae.exceedance.clone(),
        ae_pass: ae.pass,
        consistent: ae.pass == (set.pass && complement.pass),
        set,
        complement,
    })
}
