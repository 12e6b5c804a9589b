use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{ChainMap, DegreeWindow, FreeComplex};
use crate::linalg::{Echelon, SparseMatrix};

/// Bigraded dimensions `(s, t) ↦ dim` over a window of internal degrees,
/// together with the degrees whose value is not certified.
///
/// Only nonzero trusted entries are stored; anything absent and trusted is
/// zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowedHomology {
    pub window: DegreeWindow,
    /// Homological degrees covered.
    pub s_min: i64,
    pub s_max: i64,
    dims: BTreeMap<(i64, i64), usize>,
    untrusted: BTreeSet<(i64, i64)>,
}

impl WindowedHomology {
    pub fn new(window: DegreeWindow, s_min: i64, s_max: i64) -> Self {
        WindowedHomology { window, s_min, s_max, dims: BTreeMap::new(), untrusted: BTreeSet::new() }
    }

    pub fn set(&mut self, s: i64, t: i64, dim: usize) {
        self.untrusted.remove(&(s, t));
        if dim == 0 {
            self.dims.remove(&(s, t));
        } else {
            self.dims.insert((s, t), dim);
        }
    }

    pub fn mark_untrusted(&mut self, s: i64, t: i64) {
        self.dims.remove(&(s, t));
        self.untrusted.insert((s, t));
    }

    pub fn dim(&self, s: i64, t: i64) -> usize {
        self.dims.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn is_trusted(&self, s: i64, t: i64) -> bool {
        !self.untrusted.contains(&(s, t))
    }

    /// Nonzero trusted entries in `(s, t)` order.
    pub fn nonzero(&self) -> impl Iterator<Item = ((i64, i64), usize)> + '_ {
        self.dims.iter().map(|(k, v)| (*k, *v))
    }

    pub fn untrusted(&self) -> &BTreeSet<(i64, i64)> {
        &self.untrusted
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Whether both tables agree at every bidegree trusted by both.
    pub fn agrees_with(&self, other: &WindowedHomology) -> bool {
        self.disagreements(other).is_empty()
    }

    pub fn disagreements(&self, other: &WindowedHomology) -> Vec<((i64, i64), usize, usize)> {
        let keys: BTreeSet<(i64, i64)> = self.dims.keys().chain(other.dims.keys()).copied().collect();
        keys.into_iter()
            .filter(|(s, t)| {
                self.is_trusted(*s, *t)
                    && other.is_trusted(*s, *t)
                    && self.window.contains(*t)
                    && other.window.contains(*t)
            })
            .filter_map(|(s, t)| {
                let (a, b) = (self.dim(s, t), other.dim(s, t));
                (a != b).then_some(((s, t), a, b))
            })
            .collect()
    }

    /// Reindexes homological degree `s` to `-s` (cohomological reading).
    pub fn negate_s(&self) -> WindowedHomology {
        WindowedHomology {
            window: self.window,
            s_min: -self.s_max,
            s_max: -self.s_min,
            dims: self.dims.iter().map(|((s, t), d)| ((-s, *t), *d)).collect(),
            untrusted: self.untrusted.iter().map(|(s, t)| (-s, *t)).collect(),
        }
    }

    /// Tab-separated `s t dim` lines, untrusted cells written as `?`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("s\tt\tdim\n");
        for s in self.s_min..=self.s_max {
            for t in self.window.degrees() {
                if !self.is_trusted(s, t) {
                    out.push_str(&format!("{s}\t{t}\t?\n"));
                } else if self.dim(s, t) > 0 {
                    out.push_str(&format!("{s}\t{t}\t{}\n", self.dim(s, t)));
                }
            }
        }
        out
    }
}

impl FreeComplex {
    /// `dim H_{s,t}` for a single bidegree.
    pub fn homology_dim(&self, s: i64, t: i64) -> usize {
        let n = self.dim(s, t);
        if n == 0 {
            return 0;
        }
        let out = self.d_at(s, t).rank();
        let inc = self.d_at(s + 1, t).rank();
        n - out - inc
    }

    /// Homology over the window, every bidegree computed exactly.
    pub fn homology(&self, w: DegreeWindow) -> WindowedHomology {
        let Some((s_min, s_max)) = self.s_range() else {
            return WindowedHomology::new(w, 0, 0);
        };
        let cells: Vec<(i64, i64)> = (s_min..=s_max)
            .flat_map(|s| w.degrees().map(move |t| (s, t)))
            .collect();
        let dims: Vec<((i64, i64), usize)> = cells
            .par_iter()
            .map(|&(s, t)| ((s, t), self.homology_dim(s, t)))
            .collect();
        let mut h = WindowedHomology::new(w, s_min, s_max);
        for ((s, t), d) in dims {
            h.set(s, t, d);
        }
        h
    }

    /// `Σ_s (-1)^s dim C_{s,t}`.
    pub fn euler_characteristic(&self, t: i64) -> i64 {
        self.terms()
            .keys()
            .map(|s| if s % 2 == 0 { 1 } else { -1 } * self.dim(*s, t) as i64)
            .sum()
    }
}

/// Cycles in bidegree `(s, t)`, as a basis.
pub(crate) fn cycles(c: &FreeComplex, s: i64, t: i64) -> Vec<crate::linalg::SparseVec> {
    let n = c.dim(s, t);
    if n == 0 {
        return Vec::new();
    }
    let d = c.d_at(s, t);
    if d.rows() == 0 {
        return (0..n).map(|i| vec![(i, crate::linalg::Rational::one())]).collect();
    }
    d.kernel_basis()
}

/// Rank of the map induced on `H_{s,t}` by a chain map.
///
/// Computed as `rank[f(Z) | B] - rank B` in the target, where `Z` are the
/// source cycles and `B` the target boundaries.
pub fn homology_map_rank(f: &ChainMap, s: i64, t: i64) -> usize {
    let z = cycles(f.source(), s, t);
    if z.is_empty() {
        return 0;
    }
    let tgt = f.target();
    let n = tgt.dim(s, t);
    if n == 0 {
        return 0;
    }
    let mut ech = Echelon::new(n);
    for b in tgt.d_at(s + 1, t).column_vectors() {
        ech.insert(&b);
    }
    let fm: SparseMatrix = f.at_degree(s, t);
    let mut rank = 0;
    for v in &z {
        if ech.insert(&fm.mul_vec(v)) {
            rank += 1;
        }
    }
    rank
}
