//! Sweep machinery over elementary cells.
//!
//! A [`Grid`] cuts `[0,1)` at every endpoint that occurs in a family of
//! partitions or sets. Tail statistics over thousands of indices are computed
//! by sweeping the indices backwards and updating cell ranges in trees, which
//! keeps the cost near `O(pieces · log cells)` instead of `O(indices · cells)`.

use std::collections::BTreeMap;

use crate::dset::DSet;
use crate::dyadic::Dyadic;
use crate::error::{LabError, Result};
use crate::partition::{overlay, Partition};
use crate::rat::Rat;
use crate::step::Step;

/// A constant value on the half-open cell range `lo..hi`.
pub(crate) type Span = (usize, usize, Rat);

pub(crate) struct Grid {
    cuts: Vec<Dyadic>,
    lengths: Vec<Rat>,
}

impl Grid {
    pub fn new(mut cuts: Vec<Dyadic>, cap: usize) -> Result<Self> {
        cuts.push(Dyadic::zero());
        cuts.push(Dyadic::one());
        cuts.sort_unstable();
        cuts.dedup();
        let cells = cuts.len() - 1;
        if cells > cap {
            return Err(LabError::CapExceeded {
                what: "join atom",
                limit: cap,
                actual: cells,
            });
        }
        let lengths = cuts.windows(2).map(|w| w[0].length_to(&w[1])).collect();
        Ok(Grid { cuts, lengths })
    }

    pub fn of_partitions<'a>(parts: impl IntoIterator<Item = &'a Partition>, cap: usize) -> Result<Self> {
        let cuts = parts
            .into_iter()
            .flat_map(|p| p.cut_points().cloned().collect::<Vec<_>>())
            .collect();
        Self::new(cuts, cap)
    }

    pub fn of_sets<'a>(sets: impl IntoIterator<Item = &'a DSet>, cap: usize) -> Result<Self> {
        let cuts = sets
            .into_iter()
            .flat_map(|s| s.intervals().iter().flat_map(|(a, b)| [a.clone(), b.clone()]))
            .collect();
        Self::new(cuts, cap)
    }

    pub fn cells(&self) -> usize {
        self.lengths.len()
    }

    #[cfg(test)]
    pub fn lengths(&self) -> &[Rat] {
        &self.lengths
    }

    fn index_of(&self, x: &Dyadic) -> usize {
        self.cuts.binary_search(x).expect("point is a grid cut")
    }

    pub fn range(&self, a: &Dyadic, b: &Dyadic) -> (usize, usize) {
        (self.index_of(a), self.index_of(b))
    }

    /// Cell ranges of `f` on the grid.
    pub fn spans_of(&self, f: &Step) -> Vec<Span> {
        f.carrier()
            .layout()
            .iter()
            .map(|p| {
                let (lo, hi) = self.range(&p.start, &p.end);
                (lo, hi, f.values()[p.atom].clone())
            })
            .collect()
    }

    /// Cell ranges of `|f - g|` on the grid.
    pub fn abs_diff_spans(&self, f: &Step, g: &Step) -> Vec<Span> {
        let mut out = Vec::new();
        overlay(f.carrier().layout(), g.carrier().layout(), |s, e, i, j| {
            let (lo, hi) = self.range(s, e);
            out.push((lo, hi, (&f.values()[i] - &g.values()[j]).abs()));
        });
        out
    }

    /// Step with `values[c]` on cell `c`, merged by value into atoms.
    pub fn step_of(&self, values: &[Rat]) -> Step {
        let mut groups: BTreeMap<&Rat, Vec<(Dyadic, Dyadic)>> = BTreeMap::new();
        for (c, v) in values.iter().enumerate() {
            groups
                .entry(v)
                .or_default()
                .push((self.cuts[c].clone(), self.cuts[c + 1].clone()));
        }
        let mut pairs: Vec<(DSet, Rat)> = groups
            .into_iter()
            .map(|(v, ivs)| (DSet::from_sorted(ivs), v.clone()))
            .collect();
        pairs.sort_by(|a, b| a.0.leftmost().cmp(&b.0.leftmost()));
        let (atoms, vals): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Step::new(Partition::build(atoms), vals).expect("one value per atom")
    }
}

/// `μ(⋃_{n≥N} sets[n])` for every `N`.
pub(crate) fn tail_union_profile(sets: &[DSet], cap: usize) -> Result<Vec<Rat>> {
    let grid = Grid::of_sets(sets, cap)?;
    let mut cover = Coverage::new(&grid);
    let mut profile = vec![Rat::zero(); sets.len()];
    for n in (0..sets.len()).rev() {
        for (a, b) in sets[n].intervals() {
            let (lo, hi) = grid.range(a, b);
            cover.cover(lo, hi);
        }
        profile[n] = cover.measure().clone();
    }
    Ok(profile)
}

/// Union of cell ranges with its running measure. Each cell is visited once.
pub(crate) struct Coverage<'g> {
    grid: &'g Grid,
    next: Vec<usize>,
    measure: Rat,
}

impl<'g> Coverage<'g> {
    pub fn new(grid: &'g Grid) -> Self {
        Coverage {
            grid,
            next: (0..=grid.cells()).collect(),
            measure: Rat::zero(),
        }
    }

    fn find(&mut self, mut c: usize) -> usize {
        let mut root = c;
        while self.next[root] != root {
            root = self.next[root];
        }
        while self.next[c] != root {
            let up = self.next[c];
            self.next[c] = root;
            c = up;
        }
        root
    }

    pub fn cover(&mut self, lo: usize, hi: usize) {
        let mut c = self.find(lo);
        while c < hi {
            self.measure = &self.measure + &self.grid.lengths[c];
            self.next[c] = c + 1;
            c = self.find(c + 1);
        }
    }

    pub fn measure(&self) -> &Rat {
        &self.measure
    }
}

/// Pointwise running maximum over cells; `None` is below every value.
pub(crate) struct MaxTree {
    size: usize,
    lo: Vec<Option<Rat>>,
    hi: Vec<Option<Rat>>,
    pending: Vec<Option<Rat>>,
}

impl MaxTree {
    pub fn new(size: usize) -> Self {
        let nodes = 4 * size.max(1);
        MaxTree {
            size,
            lo: vec![None; nodes],
            hi: vec![None; nodes],
            pending: vec![None; nodes],
        }
    }

    fn set(&mut self, node: usize, v: &Rat) {
        self.lo[node] = Some(v.clone());
        self.hi[node] = Some(v.clone());
        self.pending[node] = Some(v.clone());
    }

    fn push(&mut self, node: usize) {
        if let Some(v) = self.pending[node].take() {
            self.set(2 * node, &v);
            self.set(2 * node + 1, &v);
        }
    }

    /// Raises every cell in `lo..hi` to at least `v`.
    pub fn raise(&mut self, lo: usize, hi: usize, v: &Rat) {
        if lo < hi {
            self.raise_at(1, 0, self.size, lo, hi, v);
        }
    }

    fn raise_at(&mut self, node: usize, l: usize, r: usize, ql: usize, qr: usize, v: &Rat) {
        if qr <= l || r <= ql || self.lo[node].as_ref() >= Some(v) {
            return;
        }
        if ql <= l && r <= qr && self.hi[node].as_ref() <= Some(v) {
            self.set(node, v);
            return;
        }
        self.push(node);
        let mid = (l + r) / 2;
        self.raise_at(2 * node, l, mid, ql, qr, v);
        self.raise_at(2 * node + 1, mid, r, ql, qr, v);
        self.lo[node] = self.lo[2 * node].clone().min(self.lo[2 * node + 1].clone());
        self.hi[node] = self.hi[2 * node].clone().max(self.hi[2 * node + 1].clone());
    }

    /// Current cell values; cells never raised are reported as `None`.
    pub fn snapshot(&mut self) -> Vec<Option<Rat>> {
        let mut out = Vec::with_capacity(self.size);
        self.collect(1, 0, self.size, &mut out);
        out
    }

    fn collect(&mut self, node: usize, l: usize, r: usize, out: &mut Vec<Option<Rat>>) {
        if let Some(v) = &self.pending[node] {
            out.extend(std::iter::repeat_n(Some(v.clone()), r - l));
            return;
        }
        if r - l == 1 {
            out.push(self.hi[node].clone());
            return;
        }
        let mid = (l + r) / 2;
        self.collect(2 * node, l, mid, out);
        self.collect(2 * node + 1, mid, r, out);
    }
}

/// Cells carrying an assigned value; tracks `Σ value · length` and the
/// assigned measure. Later assignments overwrite earlier ones.
pub(crate) struct AssignTree<'g> {
    grid: &'g Grid,
    total: Vec<Rat>,
    sum: Vec<Rat>,
    covered: Vec<Rat>,
    pending: Vec<Option<Rat>>,
}

impl<'g> AssignTree<'g> {
    pub fn new(grid: &'g Grid) -> Self {
        let nodes = 4 * grid.cells().max(1);
        let mut tree = AssignTree {
            grid,
            total: vec![Rat::zero(); nodes],
            sum: vec![Rat::zero(); nodes],
            covered: vec![Rat::zero(); nodes],
            pending: vec![None; nodes],
        };
        tree.build(1, 0, grid.cells());
        tree
    }

    fn build(&mut self, node: usize, l: usize, r: usize) {
        if r - l == 1 {
            self.total[node] = self.grid.lengths[l].clone();
            return;
        }
        let mid = (l + r) / 2;
        self.build(2 * node, l, mid);
        self.build(2 * node + 1, mid, r);
        self.total[node] = &self.total[2 * node] + &self.total[2 * node + 1];
    }

    fn set(&mut self, node: usize, v: &Rat) {
        self.sum[node] = &self.total[node] * v;
        self.covered[node] = self.total[node].clone();
        self.pending[node] = Some(v.clone());
    }

    pub fn assign(&mut self, lo: usize, hi: usize, v: &Rat) {
        if lo < hi {
            self.assign_at(1, 0, self.grid.cells(), lo, hi, v);
        }
    }

    fn assign_at(&mut self, node: usize, l: usize, r: usize, ql: usize, qr: usize, v: &Rat) {
        if qr <= l || r <= ql {
            return;
        }
        if ql <= l && r <= qr {
            self.set(node, v);
            return;
        }
        if let Some(p) = self.pending[node].take() {
            self.set(2 * node, &p);
            self.set(2 * node + 1, &p);
        }
        let mid = (l + r) / 2;
        self.assign_at(2 * node, l, mid, ql, qr, v);
        self.assign_at(2 * node + 1, mid, r, ql, qr, v);
        self.sum[node] = &self.sum[2 * node] + &self.sum[2 * node + 1];
        self.covered[node] = &self.covered[2 * node] + &self.covered[2 * node + 1];
    }

    /// `Σ value · length` over assigned cells.
    pub fn sum(&self) -> &Rat {
        &self.sum[1]
    }

    pub fn covered(&self) -> &Rat {
        &self.covered[1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(level: u32) -> Grid {
        Grid::of_partitions([&Partition::dyadic(level)], usize::MAX).unwrap()
    }

    #[test]
    fn grid_cells_and_cap() {
        let g = grid(3);
        assert_eq!(g.cells(), 8);
        assert_eq!(g.lengths()[0], Rat::frac(1, 8));
        assert!(matches!(
            Grid::of_partitions([&Partition::dyadic(3)], 4),
            Err(LabError::CapExceeded { .. })
        ));
    }

    #[test]
    fn coverage_counts_each_cell_once() {
        let g = grid(3);
        let mut c = Coverage::new(&g);
        c.cover(2, 5);
        c.cover(0, 3);
        c.cover(4, 6);
        assert_eq!(c.measure(), &Rat::frac(6, 8));
    }

    #[test]
    fn max_tree_matches_naive() {
        let g = grid(3);
        let mut tree = MaxTree::new(g.cells());
        let mut naive: Vec<Option<Rat>> = vec![None; 8];
        let ops = [(0, 8, 1), (2, 5, 3), (1, 3, 2), (4, 8, 0), (0, 1, 5), (3, 7, 4)];
        for (lo, hi, v) in ops {
            let v = Rat::int(v);
            tree.raise(lo, hi, &v);
            for cell in &mut naive[lo..hi] {
                if cell.as_ref() < Some(&v) {
                    *cell = Some(v.clone());
                }
            }
            assert_eq!(tree.snapshot(), naive);
        }
    }

    #[test]
    fn assign_tree_overwrites() {
        let g = grid(2);
        let mut t = AssignTree::new(&g);
        t.assign(0, 2, &Rat::int(2));
        t.assign(1, 3, &Rat::int(-1));
        assert_eq!(t.sum(), &Rat::zero());
        t.assign(2, 4, &Rat::int(3));
        assert_eq!(t.sum(), &Rat::frac(7, 4));
        assert_eq!(t.covered(), &Rat::one());
    }

    #[test]
    fn step_of_merges_equal_cells() {
        let g = grid(2);
        let s = g.step_of(&[Rat::one(), Rat::zero(), Rat::one(), Rat::one()]);
        assert_eq!(s.carrier().len(), 2);
        assert_eq!(s.values(), &[Rat::one(), Rat::zero()]);
    }

    #[test]
    fn tail_union_of_shrinking_tails() {
        let sets: Vec<DSet> = (1..6)
            .map(|n| DSet::interval(Dyadic::one_minus_pow2(n), Dyadic::one()).unwrap())
            .collect();
        let profile = tail_union_profile(&sets, usize::MAX).unwrap();
        let expected: Vec<Rat> = (1..6).map(Rat::pow2_inv).collect();
        assert_eq!(profile, expected);
    }
}
