//! Boylan distance between finite σ-algebras:
//! `d(P, Q) = sup_{A∈σ(P)} inf_{B∈σ(Q)} μ(A△B) + sup_{B∈σ(Q)} inf_{A∈σ(P)} μ(A△B)`.

use std::ops::{Add, Sub};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::dset::DSet;
use crate::dyadic::Dyadic;
use crate::error::{LabError, Result};
use crate::partition::{overlay, Partition};
use crate::rat::Rat;
use crate::step::atom_overlaps;

/// Largest atom count accepted on either side of [`boylan_distance`].
pub const BOYLAN_ATOM_CAP: usize = 20;

/// Scaled integers stay exact up to this level.
const FAST_LEVEL: u32 = 120;

/// `inf_{B∈σ(Q)} μ(A△B) = Σ_q min(μ(q∩A), μ(q∖A))`.
pub fn boylan_inf(a: &DSet, q: &Partition) -> Rat {
    atom_overlaps(a, q)
        .into_iter()
        .zip(q.measures())
        .map(|(hit, m)| {
            let miss = m - &hit;
            hit.min(miss)
        })
        .sum()
}

pub fn boylan_distance(p: &Partition, q: &Partition) -> Result<Rat> {
    boylan_distance_capped(p, q, BOYLAN_ATOM_CAP)
}

pub fn boylan_distance_capped(p: &Partition, q: &Partition, cap: usize) -> Result<Rat> {
    for side in [p, q] {
        if side.len() > cap {
            return Err(LabError::CapExceeded {
                what: "boylan atom",
                limit: cap,
                actual: side.len(),
            });
        }
    }
    if p == q {
        return Ok(Rat::zero());
    }
    let overlaps = Overlaps::new(p, q);
    Ok(overlaps.one_sided(false) + overlaps.one_sided(true))
}

/// `μ(p_i ∩ q_j)` for every overlapping pair, as dyadic piece lists.
struct Overlaps {
    np: usize,
    nq: usize,
    pieces: Vec<(Dyadic, Dyadic, usize, usize)>,
    level: u32,
}

impl Overlaps {
    fn new(p: &Partition, q: &Partition) -> Self {
        let mut pieces = Vec::new();
        let mut level = 0;
        overlay(p.layout(), q.layout(), |s, e, i, j| {
            level = level.max(s.level()).max(e.level());
            pieces.push((s.clone(), e.clone(), i, j));
        });
        Overlaps {
            np: p.len(),
            nq: q.len(),
            pieces,
            level,
        }
    }

    /// `sup` over unions of atoms on one side of the summed closed-form infimum
    /// on the other side. `flip` swaps the roles of `P` and `Q`.
    fn one_sided(&self, flip: bool) -> Rat {
        if self.level <= FAST_LEVEL {
            let scale = |s: &Dyadic, e: &Dyadic| -> u128 {
                let len: BigUint = e.scaled(self.level) - s.scaled(self.level);
                len.to_u128().expect("fits below FAST_LEVEL")
            };
            let total = self.sup_over(flip, scale);
            Rat::from_scaled(total, self.level)
        } else {
            self.sup_over(flip, |s: &Dyadic, e: &Dyadic| s.length_to(e))
        }
    }

    fn sup_over<T>(&self, flip: bool, measure: impl Fn(&Dyadic, &Dyadic) -> T) -> T
    where
        T: Clone + Ord + Default + Add<Output = T> + Sub<Output = T>,
    {
        let (n_left, n_right) = if flip { (self.nq, self.np) } else { (self.np, self.nq) };
        // weights[l] lists (r, μ(l ∩ r)) over right atoms r meeting left atom l
        let mut weights: Vec<Vec<(usize, T)>> = vec![Vec::new(); n_left];
        let mut right_measure = vec![T::default(); n_right];
        for (s, e, i, j) in &self.pieces {
            let (l, r) = if flip { (*j, *i) } else { (*i, *j) };
            let m = measure(s, e);
            right_measure[r] = right_measure[r].clone() + m.clone();
            match weights[l].iter_mut().find(|(rr, _)| *rr == r) {
                Some((_, w)) => *w = w.clone() + m,
                None => weights[l].push((r, m)),
            }
        }
        components(n_left, n_right, &weights)
            .into_iter()
            .map(|(lefts, _)| component_sup(&lefts, &weights, &right_measure))
            .fold(T::default(), |acc, v| acc + v)
    }
}

/// Connected components of the bipartite overlap graph, as (left, right) lists.
fn components<T>(n_left: usize, n_right: usize, weights: &[Vec<(usize, T)>]) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut parent: Vec<usize> = (0..n_left + n_right).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (l, row) in weights.iter().enumerate() {
        for (r, _) in row {
            let (a, b) = (find(&mut parent, l), find(&mut parent, n_left + r));
            parent[a] = b;
        }
    }
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut slot = vec![usize::MAX; n_left + n_right];
    for x in 0..n_left + n_right {
        let root = find(&mut parent, x);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push((Vec::new(), Vec::new()));
        }
        let g = &mut groups[slot[root]];
        if x < n_left {
            g.0.push(x);
        } else {
            g.1.push(x - n_left);
        }
    }
    groups
}

/// Gray-code walk over all subsets of `lefts`, tracking
/// `Σ_r min(μ(r∩A), μ(r) - μ(r∩A))` incrementally.
fn component_sup<T>(lefts: &[usize], weights: &[Vec<(usize, T)>], right_measure: &[T]) -> T
where
    T: Clone + Ord + Default + Add<Output = T> + Sub<Output = T>,
{
    let k = lefts.len();
    let mut inside = vec![false; k];
    let mut hit = vec![T::default(); right_measure.len()];
    let mut current = T::default();
    let mut best = T::default();
    for step in 1u64..(1u64 << k) {
        let bit = step.trailing_zeros() as usize;
        inside[bit] = !inside[bit];
        for (r, w) in &weights[lefts[bit]] {
            let old = hit[*r].clone().min(right_measure[*r].clone() - hit[*r].clone());
            hit[*r] = if inside[bit] {
                hit[*r].clone() + w.clone()
            } else {
                hit[*r].clone() - w.clone()
            };
            let new = hit[*r].clone().min(right_measure[*r].clone() - hit[*r].clone());
            current = current + new - old;
        }
        if current > best {
            best = current.clone();
        }
    }
    best
}

/// `d(parts[i], parts[j])` for all pairs.
pub fn boylan_table(parts: &[Partition], cap: usize) -> Result<Vec<Vec<Rat>>> {
    let n = parts.len();
    let mut table = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = boylan_distance_capped(&parts[i], &parts[j], cap)?;
            table[i][j] = d.clone();
            table[j][i] = d;
        }
    }
    Ok(table)
}
