//! Finite σ-subalgebras of `[0,1)` represented by their atoms.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dset::DSet;
use crate::dyadic::Dyadic;
use crate::error::{invalid, LabError, Result};
use crate::rat::Rat;

/// Most generating sets [`generate`] accepts.
pub const GENERATOR_CAP: usize = 20;

/// A maximal interval on which a partition is constant, tagged with its atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Piece {
    pub start: Dyadic,
    pub end: Dyadic,
    pub atom: usize,
}

/// The atoms of a finite σ-algebra: nonempty, pairwise disjoint sets whose
/// union is `[0,1)`, ordered by leftmost endpoint. Cheap to clone.
#[derive(Clone)]
pub struct Partition {
    inner: Arc<Inner>,
}

struct Inner {
    atoms: Vec<DSet>,
    measures: Vec<Rat>,
    layout: Vec<Piece>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.atoms == other.inner.atoms
    }
}

impl Eq for Partition {}

impl std::hash::Hash for Partition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.atoms.hash(state);
    }
}

impl Partition {
    /// `{[0,1)}`.
    pub fn trivial() -> Self {
        Self::build(vec![DSet::full()])
    }

    /// The level-`level` dyadic partition with `2^level` equal atoms.
    pub fn dyadic(level: u32) -> Self {
        let n = 1u64 << level;
        Self::build((0..n).map(|k| DSet::dyadic_cell(k, level)).collect())
    }

    /// Validates that `atoms` is a partition of `[0,1)` into nonempty sets.
    pub fn from_atoms(atoms: Vec<DSet>) -> Result<Self> {
        if let Some(i) = atoms.iter().position(DSet::is_empty) {
            return Err(invalid(format!("atom {i} is empty")));
        }
        let mut pieces: Vec<(&Dyadic, &Dyadic)> = atoms
            .iter()
            .flat_map(|a| a.intervals().iter().map(|(s, e)| (s, e)))
            .collect();
        pieces.sort();
        let mut cursor = Dyadic::zero();
        for (s, e) in pieces {
            if s < &cursor {
                return Err(invalid(format!("atoms overlap at {s}")));
            }
            if s > &cursor {
                return Err(invalid(format!("atoms leave [{cursor},{s}) uncovered")));
            }
            cursor = e.clone();
        }
        if cursor != Dyadic::one() {
            return Err(invalid(format!("atoms leave [{cursor},1) uncovered")));
        }
        Ok(Self::build(atoms))
    }

    /// Caller guarantees a valid partition; only the order is canonicalized.
    pub(crate) fn build(mut atoms: Vec<DSet>) -> Self {
        atoms.sort_by(|a, b| a.leftmost().cmp(&b.leftmost()));
        let measures = atoms.iter().map(DSet::measure).collect();
        let mut layout: Vec<Piece> = atoms
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                a.intervals().iter().map(move |(s, e)| Piece {
                    start: s.clone(),
                    end: e.clone(),
                    atom: i,
                })
            })
            .collect();
        layout.sort_by(|a, b| a.start.cmp(&b.start));
        Partition {
            inner: Arc::new(Inner {
                atoms,
                measures,
                layout,
            }),
        }
    }

    pub fn atoms(&self) -> &[DSet] {
        &self.inner.atoms
    }

    pub fn atom(&self, i: usize) -> &DSet {
        &self.inner.atoms[i]
    }

    pub fn measures(&self) -> &[Rat] {
        &self.inner.measures
    }

    pub fn len(&self) -> usize {
        self.inner.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.atoms.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.len() == 1
    }

    pub(crate) fn layout(&self) -> &[Piece] {
        &self.inner.layout
    }

    /// Index of the atom containing `x` (`x < 1`).
    pub fn atom_index_at(&self, x: &Dyadic) -> Option<usize> {
        let layout = self.layout();
        let idx = layout.partition_point(|p| &p.start <= x);
        (idx > 0 && x < &layout[idx - 1].end).then(|| layout[idx - 1].atom)
    }

    /// Common refinement: atoms are the nonempty intersections `p ∩ q`.
    pub fn join(&self, other: &Partition) -> Partition {
        self.join_with_parents(other).0
    }

    /// Like [`Partition::join`], also returning for each atom of the result
    /// the indices of the atoms of `self` and `other` that contain it.
    pub fn join_with_parents(&self, other: &Partition) -> (Partition, Vec<(usize, usize)>) {
        if self == other {
            let parents = (0..self.len()).map(|i| (i, i)).collect();
            return (self.clone(), parents);
        }
        let mut groups: HashMap<(usize, usize), Vec<(Dyadic, Dyadic)>> = HashMap::new();
        let mut order: Vec<(usize, usize)> = Vec::new();
        overlay(self.layout(), other.layout(), |s, e, i, j| {
            groups
                .entry((i, j))
                .or_insert_with(|| {
                    order.push((i, j));
                    Vec::new()
                })
                .push((s.clone(), e.clone()));
        });
        // `order` follows first appearance, i.e. leftmost endpoint, which is
        // already the canonical atom order
        let atoms = order
            .iter()
            .map(|key| DSet::from_sorted(groups.remove(key).unwrap_or_default()))
            .collect();
        (Self::build_presorted(atoms), order)
    }

    fn build_presorted(atoms: Vec<DSet>) -> Partition {
        let p = Self::build(atoms);
        debug_assert!(p.atoms().windows(2).all(|w| w[0].leftmost() < w[1].leftmost()));
        p
    }

    /// Atoms of `σ(self) ∩ σ(other)`: connected components of the overlap graph.
    pub fn meet(&self, other: &Partition) -> Partition {
        if self == other {
            return self.clone();
        }
        let n = self.len();
        let mut uf = UnionFind::new(n + other.len());
        overlay(self.layout(), other.layout(), |_, _, i, j| uf.union(i, n + j));
        let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..n {
            comps.entry(uf.find(i)).or_default().push(i);
        }
        let atoms = comps
            .into_values()
            .map(|members| DSet::union_all(members.iter().map(|&i| self.atom(i))))
            .collect();
        Self::build(atoms)
    }

    /// True iff `a` is a union of atoms (every atom is inside `a` or misses it).
    pub fn contains(&self, a: &DSet) -> bool {
        let ind = indicator_pieces(a);
        let mut seen = vec![[false; 2]; self.len()];
        overlay(self.layout(), &ind, |_, _, i, inside| seen[i][inside] = true);
        seen.iter().all(|s| !(s[0] && s[1]))
    }

    /// True iff every atom of `self` lies inside one atom of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let mut owner = vec![usize::MAX; self.len()];
        let mut ok = true;
        overlay(self.layout(), coarser.layout(), |_, _, i, j| {
            if owner[i] == usize::MAX {
                owner[i] = j;
            } else if owner[i] != j {
                ok = false;
            }
        });
        ok
    }

    /// Union of the atoms selected by `pick`.
    pub fn union_of(&self, pick: impl Fn(usize) -> bool) -> DSet {
        DSet::union_all((0..self.len()).filter(|&i| pick(i)).map(|i| self.atom(i)))
    }

    /// Endpoints of all atom intervals, including 0 and 1.
    pub(crate) fn cut_points(&self) -> impl Iterator<Item = &Dyadic> {
        self.layout()
            .iter()
            .map(|p| &p.start)
            .chain(self.layout().last().map(|p| &p.end))
    }
}

/// Finest partition generated by `sets`: atoms are the nonempty cells
/// `⋂ S_i^{±}` over all sign patterns.
pub fn generate(sets: &[DSet]) -> Result<Partition> {
    if sets.len() > GENERATOR_CAP {
        return Err(LabError::CapExceeded {
            what: "generator",
            limit: GENERATOR_CAP,
            actual: sets.len(),
        });
    }
    // refining by one set at a time yields exactly the nonempty sign-pattern cells
    Ok(sets.iter().fold(Partition::trivial(), |acc, s| {
        if s.is_empty() || s.is_full() {
            acc
        } else {
            acc.join(&Partition::build(vec![s.clone(), s.complement()]))
        }
    }))
}

pub(crate) fn indicator_pieces(a: &DSet) -> Vec<Piece> {
    a.indicator_layout()
        .into_iter()
        .map(|(start, end, atom)| Piece { start, end, atom })
        .collect()
}

/// Walks two layouts covering `[0,1)` in step, calling `f(start, end, i, j)`
/// for each maximal interval on which both atom labels are constant.
pub(crate) fn overlay(a: &[Piece], b: &[Piece], mut f: impl FnMut(&Dyadic, &Dyadic, usize, usize)) {
    let (mut i, mut j) = (0, 0);
    let mut cursor = Dyadic::zero();
    while i < a.len() && j < b.len() {
        let end = if a[i].end <= b[j].end {
            &a[i].end
        } else {
            &b[j].end
        };
        f(&cursor, end, a[i].atom, b[j].atom);
        let end = end.clone();
        if a[i].end == end {
            i += 1;
        }
        if b[j].end == end {
            j += 1;
        }
        cursor = end;
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.atoms().iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.atoms())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let atoms = Vec::<DSet>::deserialize(deserializer)?;
        Partition::from_atoms(atoms).map_err(serde::de::Error::custom)
    }
}
