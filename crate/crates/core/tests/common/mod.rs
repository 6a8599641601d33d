//! Brute-force oracles on a fixed dyadic cell grid, plus seeded generators.
//!
//! Sets are `Vec<bool>` over the `2^level` cells, partitions are per-cell
//! labels and functions are per-cell values. Nothing here goes through the
//! library's lattice or expectation code.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigmalab::{DSet, Dyadic, Partition, Rat, Step};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cell_measure(level: u32) -> Rat {
    Rat::pow2_inv(level)
}

// ---- conversions --------------------------------------------------------

pub fn set_of(cells: &[bool], level: u32) -> DSet {
    let parts: Vec<DSet> = cells
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(i, _)| DSet::dyadic_cell(i as u64, level))
        .collect();
    DSet::union_all(&parts)
}

/// Cell membership read straight from the interval endpoints.
pub fn cells_of(set: &DSet, level: u32) -> Vec<bool> {
    let n = 1usize << level;
    let mut out = vec![false; n];
    for (a, b) in set.intervals() {
        let lo = a.to_rat() * Rat::int(n as i64);
        let hi = b.to_rat() * Rat::int(n as i64);
        assert!(lo.denom() == &1.into() && hi.denom() == &1.into(), "set is finer than the grid");
        let (lo, hi) = (to_usize(&lo), to_usize(&hi));
        out[lo..hi].iter_mut().for_each(|c| *c = true);
    }
    out
}

fn to_usize(r: &Rat) -> usize {
    r.to_string().parse().expect("integer")
}

pub fn atoms_of(labels: &[usize]) -> Vec<Vec<bool>> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    (0..k)
        .map(|l| labels.iter().map(|&x| x == l).collect::<Vec<bool>>())
        .filter(|m| m.iter().any(|&c| c))
        .collect()
}

pub fn partition_of(labels: &[usize], level: u32) -> Partition {
    let atoms = atoms_of(labels).iter().map(|m| set_of(m, level)).collect();
    Partition::from_atoms(atoms).expect("labels form a partition")
}

/// Per-cell labels of `p`, read from point membership of the cells' left ends.
pub fn labels_of(p: &Partition, level: u32) -> Vec<usize> {
    let cells: Vec<Vec<bool>> = p.atoms().iter().map(|a| cells_of(a, level)).collect();
    (0..1usize << level)
        .map(|i| cells.iter().position(|c| c[i]).expect("atoms cover [0,1)"))
        .collect()
}

pub fn step_of(values: &[Rat], level: u32) -> Step {
    let atoms = (0..values.len() as u64).map(|i| DSet::dyadic_cell(i, level)).collect();
    Step::new(Partition::from_atoms(atoms).unwrap(), values.to_vec()).unwrap()
}

/// Per-cell values of `f`, evaluated at each cell's left end.
pub fn values_of(f: &Step, level: u32) -> Vec<Rat> {
    (0..1u64 << level)
        .map(|i| f.value_at(&Dyadic::of(i, level)).cloned().expect("point in [0,1)"))
        .collect()
}

// ---- generators ---------------------------------------------------------

/// A random partition of the cells into between 1 and `max_atoms` atoms.
pub fn random_labels(rng: &mut ChaCha8Rng, level: u32, max_atoms: usize) -> Vec<usize> {
    let n = 1usize << level;
    let k = rng.gen_range(1..=max_atoms.min(n));
    let mut labels: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
    labels.shuffle(rng);
    labels
}

pub fn random_cells(rng: &mut ChaCha8Rng, level: u32) -> Vec<bool> {
    (0..1usize << level).map(|_| rng.gen_bool(0.5)).collect()
}

pub fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    Rat::frac(rng.gen_range(-12..=12), rng.gen_range(1..=6))
}

pub fn random_values(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rat> {
    (0..count).map(|_| random_rat(rng)).collect()
}

// ---- oracles ------------------------------------------------------------

pub fn measure(cells: &[bool], level: u32) -> Rat {
    Rat::int(cells.iter().filter(|&&c| c).count() as i64) * cell_measure(level)
}

fn and(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| x != y).collect()
}

/// Union of the atoms picked by the bits of `mask`.
pub fn union_by_mask(atoms: &[Vec<bool>], mask: u64) -> Vec<bool> {
    let mut out = vec![false; atoms.first().map_or(0, Vec::len)];
    for (i, a) in atoms.iter().enumerate() {
        if mask >> i & 1 == 1 {
            out.iter_mut().zip(a).for_each(|(o, x)| *o |= *x);
        }
    }
    out
}

pub fn all_unions(atoms: &[Vec<bool>]) -> impl Iterator<Item = Vec<bool>> + '_ {
    (0..1u64 << atoms.len()).map(move |m| union_by_mask(atoms, m))
}

fn is_measurable(set: &[bool], atoms: &[Vec<bool>]) -> bool {
    atoms.iter().all(|a| {
        let hit = a.iter().zip(set).filter(|(x, s)| **x && **s).count();
        hit == 0 || hit == a.iter().filter(|&&x| x).count()
    })
}

/// Atoms of `σ(P) ∩ σ(Q)`: minimal nonempty unions of `P`-atoms that are also `Q`-measurable.
pub fn meet_atoms(p: &[usize], q: &[usize]) -> Vec<Vec<bool>> {
    let pa = atoms_of(p);
    let qa = atoms_of(q);
    let common: Vec<Vec<bool>> = all_unions(&pa)
        .filter(|u| u.iter().any(|&c| c) && is_measurable(u, &qa))
        .collect();
    let mut minimal: Vec<Vec<bool>> = common
        .iter()
        .filter(|u| {
            !common
                .iter()
                .any(|v| v != *u && v.iter().zip(u.iter()).all(|(x, y)| !*x || *y))
        })
        .cloned()
        .collect();
    minimal.sort();
    minimal
}

/// `min_U μ(A △ U)` over unions `U` of atoms of `q`.
pub fn min_symdiff(a: &[bool], q: &[usize], level: u32) -> Rat {
    all_unions(&atoms_of(q))
        .map(|u| measure(&xor(a, &u), level))
        .min()
        .unwrap()
}

pub fn boylan_distance(p: &[usize], q: &[usize], level: u32) -> Rat {
    let one_side = |x: &[usize], y: &[usize]| {
        all_unions(&atoms_of(x))
            .map(|u| min_symdiff(&u, y, level))
            .max()
            .unwrap()
    };
    one_side(p, q) + one_side(q, p)
}

/// `sup μ(A ∩ U) / μ(U)` over nonempty unions `U` of atoms of `b`.
pub fn seminorm_sup(a: &[bool], b: &[usize], level: u32) -> Rat {
    all_unions(&atoms_of(b))
        .filter(|u| u.iter().any(|&c| c))
        .map(|u| measure(&and(a, &u), level) / measure(&u, level))
        .max()
        .unwrap()
}

/// Per-cell conditional expectation: each cell gets its atom's average.
pub fn cond_exp(f: &[Rat], labels: &[usize]) -> Vec<Rat> {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut sum = vec![Rat::zero(); k];
    let mut count = vec![0i64; k];
    for (v, &l) in f.iter().zip(labels) {
        sum[l] = &sum[l] + v;
        count[l] += 1;
    }
    labels
        .iter()
        .map(|&l| &sum[l] / Rat::int(count[l]))
        .collect()
}

pub fn l1(f: &[Rat], g: &[Rat], level: u32) -> Rat {
    f.iter().zip(g).map(|(x, y)| (x - y).abs()).sum::<Rat>() * cell_measure(level)
}

// ---- the typewriter counterexample on cells --------------------------------

/// Labels 0, 1, 2 for `A_n`, `B_{n,k}`, `C_{n,k}` on a grid of `level ≥ n + 2`.
pub fn counterexample_labels(n: u32, k: u64, level: u32) -> Vec<usize> {
    assert!(level >= n + 2);
    let total = 1u64 << level;
    let a = (total / 2, total - (total >> n));
    let j = total - (total >> (n + 1));
    let w = total >> (n + 2);
    let i = (k * w, (k + 1) * w);
    (0..total)
        .map(|x| {
            if x >= a.0 && x < a.1 {
                0
            } else if x >= j || (x >= i.0 && x < i.1) {
                1
            } else {
                2
            }
        })
        .collect()
}

pub fn upper_half(level: u32) -> Vec<Rat> {
    let n = 1usize << level;
    (0..n)
        .map(|i| if i >= n / 2 { Rat::one() } else { Rat::zero() })
        .collect()
}

/// `(n, k)` for every term of the counterexample up to block `n_max`.
pub fn counterexample_terms(n_max: u32) -> Vec<(u32, u64)> {
    (2..=n_max)
        .flat_map(|n| (0..1u64 << (n + 1)).map(move |k| (n, k)))
        .collect()
}

/// `μ{sup_{N≤m≤H} |ℰ(χ_{[1/2,1)} | 𝔄_m) - χ_{[1/2,1)}| ≥ eps}` for every `N`.
pub fn counterexample_exceedance(n_max: u32, eps: &Rat) -> Vec<Rat> {
    let level = n_max + 2;
    let chi = upper_half(level);
    let diffs: Vec<Vec<Rat>> = counterexample_terms(n_max)
        .into_iter()
        .map(|(n, k)| {
            let g = cond_exp(&chi, &counterexample_labels(n, k, level));
            g.iter().zip(&chi).map(|(x, y)| (x - y).abs()).collect()
        })
        .collect();
    (0..diffs.len())
        .map(|start| {
            let hit: Vec<bool> = (0..chi.len())
                .map(|c| diffs[start..].iter().any(|d| &d[c] >= eps))
                .collect();
            measure(&hit, level)
        })
        .collect()
}

/// `‖ℰ(χ_{[1/2,1)} | 𝔄_{n,k}) - χ_{[1/2,1)}‖_1` by cell enumeration.
pub fn counterexample_l1(n: u32, k: u64) -> Rat {
    let level = n + 2;
    let chi = upper_half(level);
    let g = cond_exp(&chi, &counterexample_labels(n, k, level));
    l1(&g, &chi, level)
}

/// Exact `L1` distance for block `n = 2..=12`, frozen from the cell oracle
/// (checked against it up to `n = 8`) and the block closed form.
pub const COUNTEREXAMPLE_L1: [(u32, &str); 11] = [
    (2, "5/18"),
    (3, "31/204"),
    (4, "7/88"),
    (5, "127/3120"),
    (6, "85/4128"),
    (7, "511/49344"),
    (8, "341/65664"),
    (9, "2047/787200"),
    (10, "455/349696"),
    (11, "8191/12585984"),
    (12, "5461/16779264"),
];

pub fn frozen_l1(n: u32) -> Rat {
    let (_, v) = COUNTEREXAMPLE_L1.iter().find(|(m, _)| *m == n).expect("frozen block");
    v.parse().unwrap()
}
