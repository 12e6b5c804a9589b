//! Bounded complexes of shifted graded free modules over `A`.
//!
//! Indexing is homological: `d_s` goes from the term in degree `s` to the
//! term in degree `s - 1`. A term is a list of internal shifts, one per free
//! summand `Σ^a A` (generator in internal degree `a`). `Σ^t` always raises
//! internal degree by `t`.
//!
//! Tensor products use the sign rule `d(a ⊗ b) = da ⊗ b + (-1)^{|a|} a ⊗ db`
//! and Hom complexes `∂φ = d∘φ - (-1)^{|φ|} φ∘d`.

mod homology;
mod poly_matrix;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::Rational;
use crate::ring::{GradedPolynomialRing, Polynomial};
use crate::Error;

pub use homology::{homology_map_rank, WindowedHomology};
pub use poly_matrix::{free_dim, PolyMatrix};
pub(crate) use poly_matrix::{bases_and_offsets, vector_to_polys};

/// A closed interval of internal degrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DegreeWindow {
    pub t_min: i64,
    pub t_max: i64,
}

impl DegreeWindow {
    pub fn new(t_min: i64, t_max: i64) -> Result<Self, Error> {
        if t_min > t_max {
            return Err(Error::InvalidWindow { t_min, t_max });
        }
        Ok(DegreeWindow { t_min, t_max })
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + Clone {
        self.t_min..=self.t_max
    }

    pub fn contains(&self, t: i64) -> bool {
        self.t_min <= t && t <= self.t_max
    }

    pub fn len(&self) -> usize {
        (self.t_max - self.t_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub(crate) fn sign(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        Rational::one()
    } else {
        Rational::from(-1)
    }
}

/// A bounded complex of finitely generated graded free `A`-modules.
///
/// Invariants, checked by [`FreeComplex::new`]: every differential entry is
/// homogeneous of the degree forced by the shifts, and `d∘d = 0` exactly.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeComplex {
    ring: GradedPolynomialRing,
    terms: BTreeMap<i64, Vec<i64>>,
    diffs: BTreeMap<i64, PolyMatrix>,
}

impl FreeComplex {
    pub fn new(
        ring: GradedPolynomialRing,
        terms: BTreeMap<i64, Vec<i64>>,
        diffs: BTreeMap<i64, PolyMatrix>,
    ) -> Result<Self, Error> {
        let c = Self::new_unchecked(ring, terms, diffs)?;
        c.check_homogeneous()?;
        c.check_d_squared()?;
        Ok(c)
    }

    /// Builds a complex checking only matrix shapes. Used to model corrupted
    /// inputs; [`check_d_squared`](Self::check_d_squared) can be run later.
    pub fn new_unchecked(
        ring: GradedPolynomialRing,
        mut terms: BTreeMap<i64, Vec<i64>>,
        mut diffs: BTreeMap<i64, PolyMatrix>,
    ) -> Result<Self, Error> {
        terms.retain(|_, v| !v.is_empty());
        diffs.retain(|_, m| !m.is_zero());
        for (s, m) in &diffs {
            let src = terms.get(s).map_or(0, Vec::len);
            let tgt = terms.get(&(s - 1)).map_or(0, Vec::len);
            if m.cols() != src || m.rows() != tgt {
                return Err(Error::InvalidComplex(format!(
                    "d_{s} is {}x{} but terms have ranks {tgt} and {src}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(FreeComplex { ring, terms, diffs })
    }

    /// The unit `A` concentrated in degree `(0, 0)`.
    pub fn unit(ring: &GradedPolynomialRing) -> Self {
        FreeComplex {
            ring: ring.clone(),
            terms: BTreeMap::from([(0, vec![0])]),
            diffs: BTreeMap::new(),
        }
    }

    pub fn zero(ring: &GradedPolynomialRing) -> Self {
        FreeComplex { ring: ring.clone(), terms: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// A single free module `⊕ Σ^{shift} A` in homological degree `s`.
    pub fn free(ring: &GradedPolynomialRing, s: i64, shifts: Vec<i64>) -> Self {
        Self::new_unchecked(ring.clone(), BTreeMap::from([(s, shifts)]), BTreeMap::new())
            .expect("no differentials")
    }

    /// The two-term complex `Σ^{deg x} A --x--> A` in degrees 1 and 0.
    pub fn two_term(ring: &GradedPolynomialRing, x: &Polynomial) -> Result<Self, Error> {
        let d = x
            .homogeneous_degree(ring)
            .ok_or_else(|| Error::InvalidComplex("element must be homogeneous and nonzero".into()))?;
        Self::new(
            ring.clone(),
            BTreeMap::from([(0, vec![0]), (1, vec![d])]),
            BTreeMap::from([(1, PolyMatrix::new(1, 1, vec![(0, 0, x.clone())]))]),
        )
    }

    pub fn ring(&self) -> &GradedPolynomialRing {
        &self.ring
    }

    pub fn term(&self, s: i64) -> &[i64] {
        self.terms.get(&s).map_or(&[], Vec::as_slice)
    }

    pub fn terms(&self) -> &BTreeMap<i64, Vec<i64>> {
        &self.terms
    }

    /// `d_s`, as a `rank(s-1) x rank(s)` matrix.
    pub fn d(&self, s: i64) -> PolyMatrix {
        self.diffs.get(&s).cloned().unwrap_or_else(|| {
            PolyMatrix::zero(self.term(s - 1).len(), self.term(s).len())
        })
    }

    pub fn differentials(&self) -> &BTreeMap<i64, PolyMatrix> {
        &self.diffs
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Homological degrees carrying a nonzero term.
    pub fn support(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    pub fn s_range(&self) -> Option<(i64, i64)> {
        Some((*self.terms.keys().next()?, *self.terms.keys().next_back()?))
    }

    pub fn total_rank(&self) -> usize {
        self.terms.values().map(Vec::len).sum()
    }

    pub fn check_homogeneous(&self) -> Result<(), Error> {
        for (s, m) in &self.diffs {
            if let Some((row, col)) = m.check_homogeneous(&self.ring, self.term(*s), self.term(s - 1), 0)
            {
                return Err(Error::InvalidComplex(format!(
                    "d_{s} entry ({row}, {col}) has the wrong internal degree"
                )));
            }
        }
        Ok(())
    }

    pub fn check_d_squared(&self) -> Result<(), Error> {
        for s in self.diffs.keys() {
            let dd = self.d(s - 1).mul(&self.d(*s));
            if let Some((row, col)) = dd.entries().first().map(|e| (e.0, e.1)) {
                return Err(Error::DSquaredNonzero { s: *s, row, col });
            }
        }
        Ok(())
    }

    /// `Σ^{(hom, internal)}`: moves the term in degree `s` to `s + hom`,
    /// raises every internal shift by `internal` and multiplies the
    /// differential by `(-1)^hom`.
    pub fn shift(&self, hom: i64, internal: i64) -> FreeComplex {
        let terms = self
            .terms
            .iter()
            .map(|(s, v)| (s + hom, v.iter().map(|a| a + internal).collect()))
            .collect();
        let sg = sign(hom);
        let diffs = self.diffs.iter().map(|(s, m)| (s + hom, m.scale(&sg))).collect();
        FreeComplex { ring: self.ring.clone(), terms, diffs }
    }

    /// Dimension of the degree-`t` piece of the term in degree `s`.
    pub fn dim(&self, s: i64, t: i64) -> usize {
        free_dim(&self.ring, self.term(s), t)
    }

    /// The linear map `d_s` restricted to internal degree `t`.
    pub fn d_at(&self, s: i64, t: i64) -> crate::linalg::SparseMatrix {
        self.d(s).realize(&self.ring, self.term(s), self.term(s - 1), t)
    }

    fn check_ring(&self, other: &FreeComplex) -> Result<(), Error> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    /// Blocks of `(C ⊗ D)_n = ⊕_p C_p ⊗ D_{n-p}` as `(p, offset)`, p ascending.
    fn tensor_layout(&self, other: &FreeComplex) -> BTreeMap<i64, Vec<(i64, usize)>> {
        let mut layout: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
        for p in self.terms.keys() {
            for q in other.terms.keys() {
                layout.entry(p + q).or_default().push((*p, 0));
            }
        }
        fix_offsets(layout, |p, n| self.term(p).len() * other.term(n - p).len())
    }

    /// `C ⊗_A D` with the Koszul sign rule.
    pub fn tensor(&self, other: &FreeComplex) -> Result<FreeComplex, Error> {
        self.check_ring(other)?;
        let layout = self.tensor_layout(other);
        let mut terms = BTreeMap::new();
        for (n, blocks) in &layout {
            let mut shifts = Vec::new();
            for (p, _) in blocks {
                for a in self.term(*p) {
                    for b in other.term(n - p) {
                        shifts.push(a + b);
                    }
                }
            }
            terms.insert(*n, shifts);
        }
        let index = |n: i64, p: i64, k: usize, l: usize| -> Option<usize> {
            let blocks = layout.get(&n)?;
            let (_, off) = blocks.iter().find(|(pp, _)| *pp == p)?;
            Some(off + k * other.term(n - p).len() + l)
        };
        let mut diffs = BTreeMap::new();
        for (n, blocks) in &layout {
            let Some(tgt) = terms.get(&(n - 1)) else { continue };
            let mut entries = Vec::new();
            for (p, _) in blocks {
                let q = n - p;
                // dC ⊗ 1
                for (k2, k, a) in self.d(*p).entries() {
                    for l in 0..other.term(q).len() {
                        let row = index(n - 1, p - 1, *k2, l).unwrap();
                        let col = index(*n, *p, *k, l).unwrap();
                        entries.push((row, col, a.clone()));
                    }
                }
                // (-1)^p 1 ⊗ dD
                let sg = sign(*p);
                for (l2, l, b) in other.d(q).entries() {
                    for k in 0..self.term(*p).len() {
                        let row = index(n - 1, *p, k, *l2).unwrap();
                        let col = index(*n, *p, k, *l).unwrap();
                        entries.push((row, col, b.scale(&sg)));
                    }
                }
            }
            let src = terms[n].len();
            diffs.insert(*n, PolyMatrix::new(tgt.len(), src, entries));
        }
        FreeComplex::new_unchecked(self.ring.clone(), terms, diffs)
    }

    /// Blocks of `Hom(C, D)_s = ⊕_p Hom(C_p, D_{p+s})` as `(p, offset)`,
    /// p ascending.
    fn hom_layout(&self, other: &FreeComplex) -> BTreeMap<i64, Vec<(i64, usize)>> {
        let mut layout: BTreeMap<i64, Vec<(i64, usize)>> = BTreeMap::new();
        for p in self.terms.keys() {
            for q in other.terms.keys() {
                layout.entry(q - p).or_default().push((*p, 0));
            }
        }
        for blocks in layout.values_mut() {
            blocks.sort_by_key(|b| b.0);
        }
        fix_offsets(layout, |p, s| self.term(p).len() * other.term(p + s).len())
    }

    /// The internal Hom complex `Hom_A(C, D)`. The source is always bounded
    /// (finitely many terms), so this is again a bounded free complex with
    /// `Hom(Σ^a A, Σ^b A) = Σ^{b-a} A`.
    pub fn hom(&self, other: &FreeComplex) -> Result<FreeComplex, Error> {
        self.check_ring(other)?;
        let layout = self.hom_layout(other);
        let mut terms = BTreeMap::new();
        for (s, blocks) in &layout {
            let mut shifts = Vec::new();
            for (p, _) in blocks {
                for a in self.term(*p) {
                    for b in other.term(p + s) {
                        shifts.push(b - a);
                    }
                }
            }
            terms.insert(*s, shifts);
        }
        let index = |s: i64, p: i64, k: usize, j: usize| -> Option<usize> {
            let (_, off) = layout.get(&s)?.iter().find(|(pp, _)| *pp == p)?;
            Some(off + k * other.term(p + s).len() + j)
        };
        let mut diffs = BTreeMap::new();
        for (s, blocks) in &layout {
            let Some(tgt) = terms.get(&(s - 1)) else { continue };
            let mut entries = Vec::new();
            let sg = -sign(*s);
            for (p, _) in blocks {
                let nk = self.term(*p).len();
                // d_D ∘ E(p,k,j) = Σ_{j'} (d_D)_{j'j} E(p,k,j')
                for (j2, j, a) in other.d(p + s).entries() {
                    for k in 0..nk {
                        let col = index(*s, *p, k, *j).unwrap();
                        let row = index(s - 1, *p, k, *j2).unwrap();
                        entries.push((row, col, a.clone()));
                    }
                }
                // -(-1)^s E(p,k,j) ∘ d_C = -(-1)^s Σ_{k'} (d_C)_{k k'} E(p+1,k',j)
                for (k, k2, a) in self.d(p + 1).entries() {
                    for j in 0..other.term(p + s).len() {
                        let col = index(*s, *p, *k, j).unwrap();
                        let row = index(s - 1, p + 1, *k2, j).unwrap();
                        entries.push((row, col, a.scale(&sg)));
                    }
                }
            }
            diffs.insert(*s, PolyMatrix::new(tgt.len(), terms[s].len(), entries));
        }
        FreeComplex::new_unchecked(self.ring.clone(), terms, diffs)
    }

    /// Direct sum `C ⊕ D`, summands of `C` first in every degree.
    pub fn direct_sum(&self, other: &FreeComplex) -> Result<FreeComplex, Error> {
        self.check_ring(other)?;
        let mut terms: BTreeMap<i64, Vec<i64>> = self.terms.clone();
        for (s, v) in &other.terms {
            terms.entry(*s).or_default().extend(v.iter().copied());
        }
        let mut diffs = BTreeMap::new();
        for s in terms.keys() {
            let (c, d) = (self.d(*s), other.d(*s));
            let mut e: Vec<_> = c.entries().to_vec();
            for (r, k, p) in d.entries() {
                e.push((r + c.rows(), k + c.cols(), p.clone()));
            }
            diffs.insert(*s, PolyMatrix::new(c.rows() + d.rows(), c.cols() + d.cols(), e));
        }
        FreeComplex::new_unchecked(self.ring.clone(), terms, diffs)
    }

    /// Renders the complex in the text format accepted by [`crate::format`].
    pub fn to_text(&self, name: &str) -> String {
        let mut out = format!("complex {name}\n");
        for (s, shifts) in &self.terms {
            let v: Vec<String> = shifts.iter().map(i64::to_string).collect();
            out.push_str(&format!("  term {s}: {}\n", v.join(" ")));
        }
        for (s, m) in &self.diffs {
            for (r, c, p) in m.entries() {
                out.push_str(&format!("  d {s} {r} {c}: {}\n", p.format(&self.ring)));
            }
        }
        out.push_str("end\n");
        out
    }
}

fn fix_offsets(
    mut layout: BTreeMap<i64, Vec<(i64, usize)>>,
    size: impl Fn(i64, i64) -> usize,
) -> BTreeMap<i64, Vec<(i64, usize)>> {
    for (s, blocks) in layout.iter_mut() {
        let mut off = 0;
        for b in blocks.iter_mut() {
            b.1 = off;
            off += size(b.0, *s);
        }
    }
    layout
}

/// A degree-0 homogeneous chain map between free complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: FreeComplex,
    target: FreeComplex,
    maps: BTreeMap<i64, PolyMatrix>,
}

impl ChainMap {
    /// Validates homogeneity and `d∘f = f∘d`.
    pub fn new(
        source: FreeComplex,
        target: FreeComplex,
        maps: BTreeMap<i64, PolyMatrix>,
    ) -> Result<Self, Error> {
        let f = Self::new_unchecked(source, target, maps)?;
        let ring = f.source.ring();
        for (s, m) in &f.maps {
            if let Some((row, col)) = m.check_homogeneous(ring, f.source.term(*s), f.target.term(*s), 0) {
                return Err(Error::NotAChainMap { s: *s, row, col });
            }
        }
        let degrees: std::collections::BTreeSet<i64> = f
            .source
            .terms()
            .keys()
            .chain(f.target.terms().keys())
            .flat_map(|s| [*s, s + 1])
            .collect();
        for s in degrees {
            let lhs = f.target.d(s).mul(&f.at(s));
            let rhs = f.at(s - 1).mul(&f.source.d(s));
            if let Some((row, col)) = lhs.first_difference(&rhs) {
                return Err(Error::NotAChainMap { s, row, col });
            }
        }
        Ok(f)
    }

    pub fn new_unchecked(
        source: FreeComplex,
        target: FreeComplex,
        mut maps: BTreeMap<i64, PolyMatrix>,
    ) -> Result<Self, Error> {
        source.check_ring(&target)?;
        maps.retain(|_, m| !m.is_zero());
        for (s, m) in &maps {
            if m.cols() != source.term(*s).len() || m.rows() != target.term(*s).len() {
                return Err(Error::InvalidComplex(format!("chain map component {s} has the wrong shape")));
            }
        }
        Ok(ChainMap { source, target, maps })
    }

    pub fn identity(c: &FreeComplex) -> ChainMap {
        let rank = c.ring().rank();
        let maps = c
            .terms()
            .iter()
            .map(|(s, v)| (*s, PolyMatrix::identity(v.len(), rank)))
            .collect();
        ChainMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &FreeComplex, target: &FreeComplex) -> ChainMap {
        ChainMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    /// Multiplication by a homogeneous element `x` of degree `e`, as a map
    /// `Σ^e C → C`.
    pub fn multiplication(c: &FreeComplex, x: &Polynomial) -> Result<ChainMap, Error> {
        let e = x
            .homogeneous_degree(c.ring())
            .ok_or_else(|| Error::InvalidComplex("multiplier must be homogeneous and nonzero".into()))?;
        let maps = c
            .terms()
            .iter()
            .map(|(s, v)| {
                (*s, PolyMatrix::new(v.len(), v.len(), (0..v.len()).map(|i| (i, i, x.clone())).collect()))
            })
            .collect();
        // Σ^e C with the unshifted differential sign (homological shift 0)
        ChainMap::new(c.shift(0, e), c.clone(), maps)
    }

    pub fn source(&self) -> &FreeComplex {
        &self.source
    }

    pub fn target(&self) -> &FreeComplex {
        &self.target
    }

    pub fn at(&self, s: i64) -> PolyMatrix {
        self.maps.get(&s).cloned().unwrap_or_else(|| {
            PolyMatrix::zero(self.target.term(s).len(), self.source.term(s).len())
        })
    }

    pub fn components(&self) -> &BTreeMap<i64, PolyMatrix> {
        &self.maps
    }

    /// The component in homological degree `s` restricted to internal degree `t`.
    pub fn at_degree(&self, s: i64, t: i64) -> crate::linalg::SparseMatrix {
        self.at(s)
            .realize(self.source.ring(), self.source.term(s), self.target.term(s), t)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &ChainMap) -> Result<ChainMap, Error> {
        if g.source != self.target {
            return Err(Error::InvalidComplex("composition of incompatible chain maps".into()));
        }
        let maps = self
            .source
            .terms()
            .keys()
            .map(|s| (*s, g.at(*s).mul(&self.at(*s))))
            .collect();
        ChainMap::new_unchecked(self.source.clone(), g.target.clone(), maps)
    }

    /// `f ⊗ g : C ⊗ D → C' ⊗ D'`.
    pub fn tensor(&self, g: &ChainMap) -> Result<ChainMap, Error> {
        let src = self.source.tensor(&g.source)?;
        let tgt = self.target.tensor(&g.target)?;
        let src_layout = self.source.tensor_layout(&g.source);
        let tgt_layout = self.target.tensor_layout(&g.target);
        let mut maps = BTreeMap::new();
        for (n, blocks) in &src_layout {
            let mut entries = Vec::new();
            for (p, off) in blocks {
                let q = n - p;
                let Some(toff) = tgt_layout
                    .get(n)
                    .and_then(|b| b.iter().find(|(pp, _)| pp == p))
                    .map(|b| b.1)
                else {
                    continue;
                };
                let nl_src = g.source.term(q).len();
                let nl_tgt = g.target.term(q).len();
                let fp = self.at(*p);
                let gq = g.at(q);
                for (k2, k, a) in fp.entries() {
                    for (l2, l, b) in gq.entries() {
                        entries.push((toff + k2 * nl_tgt + l2, off + k * nl_src + l, a.mul(b)));
                    }
                }
            }
            maps.insert(*n, PolyMatrix::new(tgt.term(*n).len(), src.term(*n).len(), entries));
        }
        ChainMap::new_unchecked(src, tgt, maps)
    }

    /// `Hom(f, g) : Hom(C, D) → Hom(C', D')`, `φ ↦ g∘φ∘f`, for
    /// `f : C' → C` (`self`) and `g : D → D'`.
    pub fn hom(&self, g: &ChainMap) -> Result<ChainMap, Error> {
        let f = self;
        let src = f.target.hom(&g.source)?;
        let tgt = f.source.hom(&g.target)?;
        let src_layout = f.target.hom_layout(&g.source);
        let tgt_layout = f.source.hom_layout(&g.target);
        let mut maps = BTreeMap::new();
        for (s, blocks) in &src_layout {
            let mut entries = Vec::new();
            for (p, off) in blocks {
                let Some(toff) = tgt_layout
                    .get(s)
                    .and_then(|b| b.iter().find(|(pp, _)| pp == p))
                    .map(|b| b.1)
                else {
                    continue;
                };
                let nj_src = g.source.term(p + s).len();
                let nj_tgt = g.target.term(p + s).len();
                let fp = f.at(*p);
                let gq = g.at(p + s);
                // E(p,k,j) ↦ Σ f_{k k'} g_{j' j} E'(p,k',j')
                for (k, k2, a) in fp.entries() {
                    for (j2, j, b) in gq.entries() {
                        entries.push((toff + k2 * nj_tgt + j2, off + k * nj_src + j, a.mul(b)));
                    }
                }
            }
            maps.insert(*s, PolyMatrix::new(tgt.term(*s).len(), src.term(*s).len(), entries));
        }
        ChainMap::new_unchecked(src, tgt, maps)
    }

    /// The mapping cone `C_{n-1} ⊕ D_n` with differential
    /// `(c, d) ↦ (-dc, f(c) + dd)`.
    pub fn cone(&self) -> Result<FreeComplex, Error> {
        let (c, d) = (&self.source, &self.target);
        let degrees: std::collections::BTreeSet<i64> = c
            .terms()
            .keys()
            .map(|s| s + 1)
            .chain(d.terms().keys().copied())
            .collect();
        let mut terms = BTreeMap::new();
        for n in &degrees {
            let mut v = c.term(n - 1).to_vec();
            v.extend_from_slice(d.term(*n));
            terms.insert(*n, v);
        }
        let mut diffs = BTreeMap::new();
        for n in &degrees {
            let (cn1, dn) = (c.term(n - 1).len(), d.term(*n).len());
            let (cn2, dn1) = (c.term(n - 2).len(), d.term(n - 1).len());
            let mut e = Vec::new();
            for (r, k, p) in c.d(n - 1).entries() {
                e.push((*r, *k, p.neg()));
            }
            for (r, k, p) in self.at(n - 1).entries() {
                e.push((cn2 + r, *k, p.clone()));
            }
            for (r, k, p) in d.d(*n).entries() {
                e.push((cn2 + r, cn1 + k, p.clone()));
            }
            diffs.insert(*n, PolyMatrix::new(cn2 + dn1, cn1 + dn, e));
        }
        FreeComplex::new(c.ring().clone(), terms, diffs)
    }

    /// `fib(f) = Σ^{-1} cone(f)`.
    pub fn fiber(&self) -> Result<FreeComplex, Error> {
        Ok(self.cone()?.shift(-1, 0))
    }
}

#[cfg(test)]
mod tests;
