//! Elements `h = Σ_k ℰ(χ_{B_k} | 𝔄_k)` over disjoint `B_k`, and the pairing
//! witnesses `⟨h_N, f⟩` built from the level sets `{|ℰ(f|𝔄_k)| > ε}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::dset::DSet;
use crate::error::{invalid, invariant, Result};
use crate::lab::engine::{AssignTree, Grid};
use crate::rat::Rat;
use crate::seq::AlgebraSeq;
use crate::step::{cond_exp, indicator, inner, lp_dist, Norm, Step};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CnPart {
    pub k: usize,
    pub set: DSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CnElement {
    /// Half-open index window `[N, M)`.
    pub window: (usize, usize),
    pub parts: Vec<CnPart>,
    pub h: Step,
    pub l1: Rat,
    pub l2_squared: Rat,
}

/// Parts must have distinct indices in the window and pairwise disjoint sets.
/// `‖h‖_1 = μ(⋃ B_k)` is checked exactly.
pub fn cn_element(seq: &AlgebraSeq, window: (usize, usize), parts: Vec<(usize, DSet)>) -> Result<CnElement> {
    let (start, end) = window;
    if start > end {
        return Err(invalid(format!("window [{start}, {end}) is reversed")));
    }
    let mut parts: Vec<CnPart> = parts.into_iter().map(|(k, set)| CnPart { k, set }).collect();
    parts.sort_by_key(|p| p.k);
    let mut union = DSet::empty();
    for (i, p) in parts.iter().enumerate() {
        if p.k < start || p.k >= end {
            return Err(invalid(format!("part index {} is outside [{start}, {end})", p.k)));
        }
        if i > 0 && parts[i - 1].k == p.k {
            return Err(invalid(format!("part index {} repeats", p.k)));
        }
        if !union.is_disjoint(&p.set) {
            return Err(invalid(format!("part {} overlaps an earlier part", p.k)));
        }
        union = union.union(&p.set);
    }
    let terms: Vec<Step> = parts
        .par_iter()
        .map(|p| Ok(cond_exp(&indicator(&p.set), &seq.term(p.k)?)))
        .collect::<Result<_>>()?;
    let h = terms.iter().fold(Step::zero(), |acc, t| acc.add(t));
    let zero = Step::zero();
    let l1 = lp_dist(&h, &zero, Norm::L1);
    if l1 != union.measure() {
        return Err(invariant(format!(
            "‖h‖_1 = {l1} differs from the measure {} of the parts",
            union.measure()
        )));
    }
    Ok(CnElement {
        window,
        l2_squared: lp_dist(&h, &zero, Norm::L2Squared),
        parts,
        h,
        l1,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WperpWitness {
    pub eps: Rat,
    pub element: CnElement,
    /// `⟨h_N, f⟩`.
    pub pairing: Rat,
    pub union_measure: Rat,
}

/// `A_k = {|ℰ(f|𝔄_k)| > eps}` disjointified in increasing `k` over `[N, M)`.
/// The pairing is checked against `Σ_k ⟨χ_{B_k}, ℰ(f|𝔄_k)⟩`.
pub fn wperp_witness(seq: &AlgebraSeq, f: &Step, eps: &Rat, window: (usize, usize)) -> Result<WperpWitness> {
    let (start, end) = window;
    if !eps.is_positive() {
        return Err(invalid(format!("epsilon {eps} must be positive")));
    }
    if start >= end {
        return Err(invalid(format!("window [{start}, {end}) is empty")));
    }
    seq.check_horizon(end - 1)?;
    let g: Vec<Step> = (start..end)
        .into_par_iter()
        .map(|k| Ok(cond_exp(f, &seq.term(k)?)))
        .collect::<Result<_>>()?;
    let mut taken = DSet::empty();
    let mut parts = Vec::new();
    let mut adjoint = Rat::zero();
    for (offset, gk) in g.iter().enumerate() {
        let level = gk.level_set(|v| &v.abs() > eps);
        let b = level.difference(&taken);
        if b.is_empty() {
            continue;
        }
        taken = taken.union(&b);
        adjoint = &adjoint + inner(&indicator(&b), gk);
        parts.push((start + offset, b));
    }
    let element = cn_element(seq, window, parts)?;
    let pairing = inner(&element.h, f);
    if pairing != adjoint {
        return Err(invariant(format!(
            "pairing {pairing} differs from the adjoint sum {adjoint}"
        )));
    }
    Ok(WperpWitness {
        eps: eps.clone(),
        union_measure: taken.measure(),
        element,
        pairing,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingProfile {
    pub eps: Rat,
    pub horizon: usize,
    /// `⟨h_N, f⟩` for the window `[N, H]`, `N = 0..=H`.
    pub pairing: Vec<Rat>,
    /// `μ(⋃_k B_k)` for the same windows.
    pub union_measure: Vec<Rat>,
    pub non_increasing: bool,
}

/// The pairing of [`wperp_witness`] for every window start, in one backward sweep.
pub fn pairing_profile(seq: &AlgebraSeq, f: &Step, eps: &Rat, h: usize, join_cap: usize) -> Result<PairingProfile> {
    if !eps.is_positive() {
        return Err(invalid(format!("epsilon {eps} must be positive")));
    }
    let terms = seq.terms(h)?;
    let grid = Grid::of_partitions(&terms, join_cap)?;
    let spans: Vec<_> = terms
        .par_iter()
        .map(|p| {
            let mut s = grid.spans_of(&cond_exp(f, p));
            s.retain(|(_, _, v)| &v.abs() > eps);
            s
        })
        .collect();
    // a point belongs to B_k for the first k ≥ N whose level set contains it,
    // so assigning from the back leaves exactly that k's value
    let mut tree = AssignTree::new(&grid);
    let mut pairing = vec![Rat::zero(); h + 1];
    let mut union_measure = vec![Rat::zero(); h + 1];
    for n in (0..=h).rev() {
        for (lo, hi, v) in &spans[n] {
            tree.assign(*lo, *hi, v);
        }
        pairing[n] = tree.sum().clone();
        union_measure[n] = tree.covered().clone();
    }
    let non_increasing = pairing.windows(2).all(|w| w[1] <= w[0]);
    Ok(PairingProfile {
        eps: eps.clone(),
        horizon: h,
        pairing,
        union_measure,
        non_increasing,
    })
}
