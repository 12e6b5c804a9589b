//! Minimal free resolutions, `Ext`, and the Adams `E_2` page.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{free_dim, vector_to_polys, DegreeWindow, FreeComplex, PolyMatrix};
use crate::linalg::{Echelon, Rational, SparseMatrix, SparseVec};
use crate::module::GradedModulePresentation;
use crate::ring::{GradedPolynomialRing, Polynomial};
use crate::Error;

/// A minimal free resolution `F_ℓ → ... → F_0 → M`.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    ring: GradedPolynomialRing,
    shifts: Vec<Vec<i64>>,
    /// `maps[s]: F_{s+1} → F_s`.
    maps: Vec<PolyMatrix>,
    /// `F_0 → ⊕ Σ^{g_j} A`, the generators of `M` in its presentation.
    augmentation: PolyMatrix,
    /// Exactness was checked in every degree up to this one.
    checked_through: i64,
}

impl FreeResolution {
    pub fn ring(&self) -> &GradedPolynomialRing {
        &self.ring
    }

    /// Number of nonzero maps.
    pub fn length(&self) -> usize {
        self.shifts.iter().rposition(|s| !s.is_empty()).unwrap_or(0)
    }

    /// Generator degrees of `F_s`.
    pub fn shifts(&self, s: usize) -> &[i64] {
        self.shifts.get(s).map_or(&[], Vec::as_slice)
    }

    /// `F_{s+1} → F_s`.
    pub fn map(&self, s: usize) -> Option<&PolyMatrix> {
        self.maps.get(s)
    }

    pub fn augmentation(&self) -> &PolyMatrix {
        &self.augmentation
    }

    pub fn checked_through(&self) -> i64 {
        self.checked_through
    }

    /// `(s, shift) ↦ multiplicity`.
    pub fn betti_table(&self) -> BTreeMap<(usize, i64), usize> {
        let mut out = BTreeMap::new();
        for (s, shifts) in self.shifts.iter().enumerate() {
            for b in shifts {
                *out.entry((s, *b)).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn max_shift(&self) -> Option<i64> {
        self.shifts.iter().flatten().copied().max()
    }

    /// `Σ_s (-1)^s Σ_b q^b`, the Hilbert series of `M` times
    /// `∏ (1 - q^{|y_i|})`.
    pub fn hilbert_numerator(&self) -> Vec<(i64, i64)> {
        let mut acc: BTreeMap<i64, i64> = BTreeMap::new();
        for ((s, b), n) in self.betti_table() {
            let sign = if s % 2 == 0 { 1 } else { -1 };
            *acc.entry(b).or_insert(0) += sign * n as i64;
        }
        acc.into_iter().filter(|(_, c)| *c != 0).collect()
    }

    /// Every differential has entries in the augmentation ideal.
    pub fn is_minimal(&self) -> bool {
        self.maps
            .iter()
            .all(|m| m.entries().iter().all(|(_, _, p)| p.in_augmentation_ideal()))
    }

    /// The resolution as a complex with `F_s` in homological degree `s`.
    pub fn to_complex(&self) -> FreeComplex {
        let terms = self
            .shifts
            .iter()
            .enumerate()
            .map(|(s, v)| (s as i64, v.clone()))
            .collect();
        let diffs = self
            .maps
            .iter()
            .enumerate()
            .map(|(s, m)| (s as i64 + 1, m.clone()))
            .collect();
        FreeComplex::new(self.ring.clone(), terms, diffs).expect("a resolution is a complex")
    }

    /// Tab-separated Betti table.
    pub fn betti_tsv(&self) -> String {
        let mut out = String::from("s\tshift\tcount\n");
        for ((s, b), n) in self.betti_table() {
            let _ = writeln!(out, "{s}\t{b}\t{n}");
        }
        out
    }
}

/// Columns of `gens`, polynomial vectors over `⊕ Σ^{shifts} A`.
fn column_matrix(gens: &[(i64, Vec<Polynomial>)], rows: usize) -> PolyMatrix {
    let mut entries = Vec::new();
    for (k, (_, col)) in gens.iter().enumerate() {
        for (j, p) in col.iter().enumerate() {
            if !p.is_zero() {
                entries.push((j, k, p.clone()));
            }
        }
    }
    PolyMatrix::new(rows, gens.len(), entries)
}

/// Minimal homogeneous generators, degree by degree in `lo..=hi`, of the
/// submodule of `⊕ Σ^{target} A` spanned by `subspace(t)` modulo the span of
/// `preload(t)`.
fn minimal_generators(
    ring: &GradedPolynomialRing,
    target: &[i64],
    lo: i64,
    hi: i64,
    subspace: impl Fn(i64) -> Vec<SparseVec>,
    preload: impl Fn(i64) -> Option<SparseMatrix>,
) -> Vec<(i64, Vec<Polynomial>)> {
    let mut gens: Vec<(i64, Vec<Polynomial>)> = Vec::new();
    for t in lo..=hi {
        let n = free_dim(ring, target, t);
        if n == 0 {
            continue;
        }
        let candidates = subspace(t);
        if candidates.is_empty() {
            continue;
        }
        let mut ech = Echelon::new(n);
        if let Some(pre) = preload(t) {
            for v in pre.column_vectors() {
                ech.insert(&v);
            }
        }
        if !gens.is_empty() {
            let degs: Vec<i64> = gens.iter().map(|g| g.0).collect();
            let m = column_matrix(&gens, target.len()).realize(ring, &degs, target, t);
            for v in m.column_vectors() {
                ech.insert(&v);
            }
        }
        for v in candidates {
            if ech.rank() == n {
                break;
            }
            if ech.insert(&v) {
                gens.push((t, vector_to_polys(ring, target, t, &v)));
            }
        }
    }
    gens
}

fn kernel(m: &SparseMatrix) -> Vec<SparseVec> {
    if m.cols() == 0 {
        return Vec::new();
    }
    m.kernel_basis()
}

/// The composite `F_0 → M_t` at degree `t`.
fn augmentation_at(
    m: &GradedModulePresentation,
    aug: &PolyMatrix,
    f0: &[i64],
    t: i64,
) -> SparseMatrix {
    let piece = m.piece(t);
    let free = aug.realize(m.ring(), f0, m.generator_degrees(), t);
    piece.quotient.projection.mul(&free)
}

fn build(m: &GradedModulePresentation, cap: i64) -> Result<FreeResolution, Error> {
    let ring = m.ring();
    let gens0 = m.generator_degrees();
    let lo = m.min_degree().unwrap_or(0);
    let gens = minimal_generators(
        ring,
        gens0,
        lo,
        cap,
        |t| {
            let n = free_dim(ring, gens0, t);
            (0..n).map(|i| vec![(i, Rational::one())]).collect()
        },
        |t| Some(m.relations_at(t)),
    );
    let mut shifts: Vec<Vec<i64>> = vec![gens.iter().map(|g| g.0).collect()];
    let augmentation = column_matrix(&gens, gens0.len());
    let mut maps: Vec<PolyMatrix> = Vec::new();
    loop {
        let s = maps.len();
        let prev = shifts[s].clone();
        if prev.is_empty() {
            break;
        }
        if s > ring.rank() + 1 {
            return Err(Error::Internal("resolution longer than the number of variables".into()));
        }
        let lo = prev.iter().copied().min().unwrap() + 1;
        let target_map = |t: i64| -> SparseMatrix {
            if s == 0 {
                augmentation_at(m, &augmentation, &prev, t)
            } else {
                maps[s - 1].realize(ring, &prev, &shifts[s - 1], t)
            }
        };
        let gens = minimal_generators(ring, &prev, lo, cap, |t| kernel(&target_map(t)), |_| None);
        let next: Vec<i64> = gens.iter().map(|g| g.0).collect();
        let map = column_matrix(&gens, prev.len());
        shifts.push(next);
        maps.push(map);
    }
    shifts.pop();
    maps.pop();
    Ok(FreeResolution { ring: ring.clone(), shifts, maps, augmentation, checked_through: cap })
}

/// First degree in `lo..=hi` where the resolution fails to be exact.
fn exactness_failure(m: &GradedModulePresentation, r: &FreeResolution, lo: i64, hi: i64) -> Option<i64> {
    let ring = m.ring();
    (lo..=hi).find(|&t| {
        let f0 = r.shifts(0);
        let eps = augmentation_at(m, &r.augmentation, f0, t);
        if eps.rank() != m.dim(t) {
            return true;
        }
        let mut incoming = eps;
        for s in 0..=r.length() {
            let src = r.shifts(s);
            let n = free_dim(ring, src, t);
            let kernel_dim = n - incoming.rank();
            let next = match r.map(s) {
                Some(map) => map.realize(ring, r.shifts(s + 1), src, t),
                None => SparseMatrix::zero(n, 0),
            };
            if next.rank() != kernel_dim {
                return true;
            }
            incoming = next;
        }
        false
    })
}

/// Minimal free resolution of a presented module.
///
/// Generators of every syzygy module are found in degrees up to a cap,
/// starting at `probe.t_max` or the largest presentation degree plus the
/// sum of the ring degrees, whichever is larger. The complex is then
/// checked to be exact on a further band of degrees; a failure raises the
/// cap. After eight rounds without success the result is
/// [`Error::ResolutionIncomplete`].
pub fn minimal_resolution(
    m: &GradedModulePresentation,
    probe: DegreeWindow,
) -> Result<FreeResolution, Error> {
    let ring = m.ring();
    let band: i64 = ring.degrees().iter().sum::<i64>() + ring.degrees().iter().max().copied().unwrap_or(0);
    let Some(lowest) = m.min_degree() else {
        return Ok(FreeResolution {
            ring: ring.clone(),
            shifts: vec![Vec::new()],
            maps: Vec::new(),
            augmentation: PolyMatrix::zero(0, 0),
            checked_through: probe.t_max,
        });
    };
    let mut cap = probe.t_max.max(m.max_degree().unwrap_or(lowest) + band);
    let limit = cap + 8 * band.max(2);
    loop {
        let r = build(m, cap)?;
        let check_to = cap + band.max(2);
        match exactness_failure(m, &r, cap + 1, check_to) {
            None => {
                return Ok(FreeResolution { checked_through: check_to, ..r });
            }
            Some(bad) => {
                if cap >= limit {
                    return Err(Error::ResolutionIncomplete { cap, needed: bad });
                }
                cap = (bad + band).min(limit).max(cap + 1);
            }
        }
    }
}

/// `(s, t) ↦ dim Ext^{s,t}_A(M, N)` over a window of internal degrees.
///
/// The convention is `Hom^t(Σ^b A, N) = N_{b - t}`, so a map of internal
/// degree `t` lowers degree by `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtTable {
    pub window: DegreeWindow,
    /// Largest homological degree with a nonzero resolution term.
    pub s_max: i64,
    entries: BTreeMap<(i64, i64), usize>,
}

impl ExtTable {
    pub fn dim(&self, s: i64, t: i64) -> usize {
        self.entries.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = ((i64, i64), usize)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("s\tt\tdim\n");
        for ((s, t), d) in &self.entries {
            let _ = writeln!(out, "{s}\t{t}\t{d}");
        }
        out
    }
}

/// `Hom(F_s, N)^t → Hom(F_{s+1}, N)^t`, precomposition with `F_{s+1} → F_s`.
fn hom_differential(
    r: &FreeResolution,
    n: &GradedModulePresentation,
    s: usize,
    t: i64,
) -> (usize, usize, SparseMatrix) {
    let src = r.shifts(s);
    let tgt = r.shifts(s + 1);
    let src_dims: Vec<usize> = src.iter().map(|b| n.dim(b - t)).collect();
    let tgt_dims: Vec<usize> = tgt.iter().map(|b| n.dim(b - t)).collect();
    let offsets = |d: &[usize]| {
        d.iter()
            .scan(0, |acc, x| {
                let o = *acc;
                *acc += x;
                Some(o)
            })
            .collect::<Vec<usize>>()
    };
    let (so, to) = (offsets(&src_dims), offsets(&tgt_dims));
    let (ncols, nrows) = (src_dims.iter().sum(), tgt_dims.iter().sum());
    let mut entries = Vec::new();
    if let Some(map) = r.map(s) {
        if ncols > 0 && nrows > 0 {
            for (j, k, p) in map.entries() {
                if src_dims[*j] == 0 || tgt_dims[*k] == 0 {
                    continue;
                }
                let block = n.multiplication_matrix(p, src[*j] - t);
                for (a, b, v) in block.entries() {
                    entries.push((to[*k] + a, so[*j] + b, v.clone()));
                }
            }
        }
    }
    (ncols, nrows, SparseMatrix::new(nrows, ncols, entries))
}

/// `Ext_A(M, N)` from a minimal resolution of `M`.
pub fn ext(
    m: &GradedModulePresentation,
    n: &GradedModulePresentation,
    w: DegreeWindow,
) -> Result<ExtTable, Error> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch);
    }
    let r = minimal_resolution(m, w)?;
    Ok(ext_from_resolution(&r, n, w))
}

pub fn ext_from_resolution(r: &FreeResolution, n: &GradedModulePresentation, w: DegreeWindow) -> ExtTable {
    let len = r.length();
    let cells: Vec<(usize, i64)> = (0..=len).flat_map(|s| w.degrees().map(move |t| (s, t))).collect();
    let ranks: BTreeMap<(usize, i64), (usize, usize)> = cells
        .par_iter()
        .map(|&(s, t)| {
            let (dim, _, d) = hom_differential(r, n, s, t);
            ((s, t), (dim, d.rank()))
        })
        .collect();
    let mut entries = BTreeMap::new();
    for (&(s, t), &(dim, out)) in &ranks {
        let inc = if s == 0 { 0 } else { ranks[&(s - 1, t)].1 };
        let e = dim - out - inc;
        if e > 0 {
            entries.insert((s as i64, t), e);
        }
    }
    ExtTable { window: w, s_max: len as i64, entries }
}

/// The vanishing line `E_2^{s,*} = 0` for `s > rank`.
#[derive(Clone, Debug, Serialize)]
pub struct VanishingCertificate {
    pub line: i64,
    pub max_nonzero_s: Option<i64>,
    pub holds: bool,
}

/// Collapse at `E_2`: all nonzero columns lie in `s ∈ {lo, lo + 1}`, and
/// `d_k` moves `s` by `k ≥ 2`.
#[derive(Clone, Debug, Serialize)]
pub struct CollapseCertificate {
    pub columns: Vec<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Page {
    pub rank: usize,
    pub table: ExtTable,
    pub vanishing: VanishingCertificate,
    pub collapse: Option<CollapseCertificate>,
}

impl E2Page {
    pub fn dim(&self, s: i64, t: i64) -> usize {
        self.table.dim(s, t)
    }

    /// `Σ_{t - s = d} dim E_2^{s,t}`, or `None` when the window misses a
    /// required `t`.
    pub fn total(&self, d: i64) -> Option<usize> {
        let mut sum = 0;
        for s in 0..=self.table.s_max {
            let t = d + s;
            if !self.table.window.contains(t) {
                return None;
            }
            sum += self.dim(s, t);
        }
        Some(sum)
    }

    /// ASCII chart: rows are `s`, highest first, columns are `t`. The row
    /// just above `s = rank` is drawn as the vanishing line.
    pub fn chart(&self) -> String {
        let w = self.table.window;
        let top = self.rank as i64 + 1;
        let mut out = String::new();
        let _ = writeln!(out, "E2  s\\t {}..{}", w.t_min, w.t_max);
        for s in (0..=top).rev() {
            if s == top {
                let _ = writeln!(out, "{:>3} |{}  vanishing line", s, "-".repeat(w.len()));
                continue;
            }
            let row: String = w
                .degrees()
                .map(|t| match self.dim(s, t) {
                    0 => '.',
                    d if d < 10 => char::from_digit(d as u32, 10).unwrap(),
                    _ => '#',
                })
                .collect();
            let _ = writeln!(out, "{s:>3} |{row}");
        }
        out
    }
}

pub fn adams_e2(
    m: &GradedModulePresentation,
    n: &GradedModulePresentation,
    w: DegreeWindow,
) -> Result<E2Page, Error> {
    let table = ext(m, n, w)?;
    let rank = m.ring().rank();
    let cols: std::collections::BTreeSet<i64> = table.nonzero().map(|((s, _), _)| s).collect();
    let max_nonzero_s = cols.iter().next_back().copied();
    let vanishing = VanishingCertificate {
        line: rank as i64,
        max_nonzero_s,
        holds: max_nonzero_s.is_none_or(|s| s <= rank as i64),
    };
    let collapse = match (cols.first(), cols.last()) {
        (Some(a), Some(b)) if b - a <= 1 => Some(CollapseCertificate { columns: cols.iter().copied().collect() }),
        (None, None) => Some(CollapseCertificate { columns: Vec::new() }),
        _ => None,
    };
    Ok(E2Page { rank, table, vanishing, collapse })
}

/// Homology of `Hom(x, y)` regraded by total degree: the entry at `d` sums
/// `dim H_{h,u}` over `h - u = d`.
pub fn abutment_oracle(
    x: &FreeComplex,
    y: &FreeComplex,
    totals: DegreeWindow,
) -> Result<BTreeMap<i64, usize>, Error> {
    let h = x.hom(y)?;
    let mut out = BTreeMap::new();
    let Some((lo, hi)) = h.s_range() else {
        return Ok(totals.degrees().map(|d| (d, 0)).collect());
    };
    for d in totals.degrees() {
        let sum: usize = (lo..=hi)
            .into_par_iter()
            .map(|s| h.homology_dim(s, s - d))
            .sum();
        out.insert(d, sum);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(degs: &[i64]) -> GradedPolynomialRing {
        GradedPolynomialRing::with_degrees(degs).unwrap()
    }

    #[test]
    fn residue_field_resolution_is_koszul() {
        let r = ring(&[2, 4]);
        let q = GradedModulePresentation::residue_field(&r);
        let res = minimal_resolution(&q, DegreeWindow::new(0, 0).unwrap()).unwrap();
        assert_eq!(res.length(), 2);
        let betti = res.betti_table();
        assert_eq!(betti, BTreeMap::from([((0, 0), 1), ((1, 2), 1), ((1, 4), 1), ((2, 6), 1)]));
        assert!(res.is_minimal());
        let c = res.to_complex();
        let h = c.homology(DegreeWindow::new(-2, 12).unwrap());
        assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1)]);
    }

    #[test]
    fn free_module_resolves_itself() {
        let r = ring(&[2]);
        let a = GradedModulePresentation::free(&r, vec![0, 4]);
        let res = minimal_resolution(&a, DegreeWindow::new(0, 0).unwrap()).unwrap();
        assert_eq!(res.length(), 0);
        assert_eq!(res.shifts(0), &[0, 4]);
    }

    #[test]
    fn nonminimal_presentation_is_trimmed() {
        let r = ring(&[2, 2]);
        let (x, y) = (r.var(0), r.var(1));
        // redundant generator e1 = x e0
        let m = GradedModulePresentation::new(
            r.clone(),
            vec![0, 2],
            vec![vec![x.clone(), r.one().scale(&Rational::from(-1))], vec![y.clone(), Polynomial::zero()]],
        )
        .unwrap();
        let res = minimal_resolution(&m, DegreeWindow::new(0, 0).unwrap()).unwrap();
        assert_eq!(res.shifts(0), &[0]);
        assert_eq!(res.shifts(1), &[2]);
        assert_eq!(res.length(), 1);
    }

    #[test]
    fn ext_of_residue_field() {
        let r = ring(&[2]);
        let q = GradedModulePresentation::residue_field(&r);
        let e = ext(&q, &q, DegreeWindow::new(-4, 6).unwrap()).unwrap();
        assert_eq!(e.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1), ((1, 2), 1)]);
    }

    #[test]
    fn ext_from_free_reflects_hilbert_function() {
        let r = ring(&[2]);
        let a = GradedModulePresentation::free(&r, vec![0]);
        let n = GradedModulePresentation::cyclic(&r, &[r.var(0).pow(3, 1)]).unwrap();
        let e = ext(&a, &n, DegreeWindow::new(-6, 6).unwrap()).unwrap();
        assert_eq!(
            e.nonzero().collect::<Vec<_>>(),
            vec![((0, -4), 1), ((0, -2), 1), ((0, 0), 1)]
        );
    }

    #[test]
    fn e2_page_certificates() {
        let r = ring(&[4, 6]);
        let q = GradedModulePresentation::residue_field(&r);
        let page = adams_e2(&q, &q, DegreeWindow::new(-2, 12).unwrap()).unwrap();
        assert!(page.vanishing.holds);
        assert!(page.collapse.is_none());
        assert_eq!(page.dim(2, 10), 1);
        assert!(page.chart().contains("vanishing line"));
        let a = GradedModulePresentation::free(&r, vec![0]);
        let page = adams_e2(&a, &q, DegreeWindow::new(-2, 12).unwrap()).unwrap();
        assert!(page.collapse.is_some());
    }

    #[test]
    fn oracle_matches_e2_totals() {
        let r = ring(&[2, 4]);
        let q = GradedModulePresentation::residue_field(&r);
        let res = minimal_resolution(&q, DegreeWindow::new(0, 0).unwrap()).unwrap();
        let k = res.to_complex();
        let totals = DegreeWindow::new(-8, 8).unwrap();
        let oracle = abutment_oracle(&k, &k, totals).unwrap();
        let page = adams_e2(&q, &q, DegreeWindow::new(-8, 12).unwrap()).unwrap();
        for d in totals.degrees() {
            assert_eq!(page.total(d), Some(oracle[&d]), "d = {d}");
        }
    }
}
