//! Finitely presented graded `A`-modules and their degreewise realizations.
//!
//! A presentation is a free module `F = ⊕ Σ^{g_j} A` and a matrix of
//! homogeneous relations, one column per relation. Since `A` is positively
//! graded, the degree-`t` piece `M_t = F_t / R_t` only involves relations of
//! degree at most `t`, so every degree is computed exactly regardless of the
//! window it was asked for in.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::complex::{free_dim, DegreeWindow, PolyMatrix};
use crate::linalg::{quotient_basis, QuotientBasis, Rational, SparseMatrix, SparseVec};
use crate::ring::{GradedPolynomialRing, Monomial, Polynomial};
use crate::Error;

/// One internal degree of a presented module: `F_t / R_t`.
#[derive(Debug)]
pub struct DegreePiece {
    pub t: i64,
    pub free_dim: usize,
    pub quotient: QuotientBasis,
}

impl DegreePiece {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

#[derive(Clone)]
pub struct GradedModulePresentation {
    ring: GradedPolynomialRing,
    generator_degrees: Vec<i64>,
    relation_degrees: Vec<i64>,
    relations: PolyMatrix,
    cache: Arc<RwLock<HashMap<i64, Arc<DegreePiece>>>>,
}

impl PartialEq for GradedModulePresentation {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.generator_degrees == other.generator_degrees
            && self.relations == other.relations
    }
}

impl fmt::Debug for GradedModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GradedModulePresentation")
            .field("ring", &self.ring)
            .field("generator_degrees", &self.generator_degrees)
            .field("relation_degrees", &self.relation_degrees)
            .finish()
    }
}

impl GradedModulePresentation {
    /// `relations` has one column per relation, each a list of polynomials
    /// indexed by generator. Zero columns are dropped.
    pub fn new(
        ring: GradedPolynomialRing,
        generator_degrees: Vec<i64>,
        relations: Vec<Vec<Polynomial>>,
    ) -> Result<Self, Error> {
        let n = generator_degrees.len();
        let mut relation_degrees = Vec::new();
        let mut entries = Vec::new();
        let mut col = 0;
        for (l, rel) in relations.iter().enumerate() {
            if rel.len() != n {
                return Err(Error::InvalidModule(format!(
                    "relation {l} has {} entries but there are {n} generators",
                    rel.len()
                )));
            }
            let mut degree = None;
            for (j, p) in rel.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let d = p.homogeneous_degree(&ring).ok_or_else(|| Error::Inhomogeneous {
                    relation: l,
                    detail: format!("entry for generator {j} mixes degrees"),
                })?;
                let total = d + generator_degrees[j];
                match degree {
                    None => degree = Some(total),
                    Some(prev) if prev != total => {
                        return Err(Error::Inhomogeneous {
                            relation: l,
                            detail: format!(
                                "entry for generator {j} has total degree {total}, expected {prev}"
                            ),
                        })
                    }
                    _ => {}
                }
            }
            let Some(degree) = degree else { continue };
            for (j, p) in rel.iter().enumerate() {
                if !p.is_zero() {
                    entries.push((j, col, p.clone()));
                }
            }
            relation_degrees.push(degree);
            col += 1;
        }
        Ok(GradedModulePresentation {
            ring,
            generator_degrees,
            relation_degrees,
            relations: PolyMatrix::new(n, col, entries),
            cache: Default::default(),
        })
    }

    pub fn free(ring: &GradedPolynomialRing, degrees: Vec<i64>) -> Self {
        Self::new(ring.clone(), degrees, Vec::new()).expect("free modules have no relations")
    }

    /// `A / (f_1, ..., f_k)` with its generator in degree 0.
    pub fn cyclic(ring: &GradedPolynomialRing, relations: &[Polynomial]) -> Result<Self, Error> {
        Self::new(
            ring.clone(),
            vec![0],
            relations.iter().map(|p| vec![p.clone()]).collect(),
        )
    }

    /// The residue field `Q = A / I`.
    pub fn residue_field(ring: &GradedPolynomialRing) -> Self {
        let rels: Vec<Polynomial> = (0..ring.rank()).map(|i| ring.var(i)).collect();
        Self::cyclic(ring, &rels).expect("generators are homogeneous")
    }

    /// The same module with generators moved up by `t`.
    pub fn shift(&self, t: i64) -> Self {
        let cols: Vec<Vec<Polynomial>> = (0..self.relations.cols())
            .map(|c| (0..self.generator_degrees.len()).map(|r| self.relations.get(r, c)).collect())
            .collect();
        Self::new(
            self.ring.clone(),
            self.generator_degrees.iter().map(|g| g + t).collect(),
            cols,
        )
        .expect("shifting preserves homogeneity")
    }

    pub fn ring(&self) -> &GradedPolynomialRing {
        &self.ring
    }

    pub fn generator_degrees(&self) -> &[i64] {
        &self.generator_degrees
    }

    pub fn relation_degrees(&self) -> &[i64] {
        &self.relation_degrees
    }

    /// Relation matrix, rows indexed by generators.
    pub fn relations(&self) -> &PolyMatrix {
        &self.relations
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.generator_degrees.iter().copied().min()
    }

    /// Largest generator or relation degree.
    pub fn max_degree(&self) -> Option<i64> {
        self.generator_degrees
            .iter()
            .chain(&self.relation_degrees)
            .copied()
            .max()
    }

    /// Degree-`t` piece, cached.
    pub fn piece(&self, t: i64) -> Arc<DegreePiece> {
        if let Some(p) = self.cache.read().unwrap().get(&t) {
            return Arc::clone(p);
        }
        let n = free_dim(&self.ring, &self.generator_degrees, t);
        let sub = self.relations_at(t);
        let piece = Arc::new(DegreePiece { t, free_dim: n, quotient: quotient_basis(&sub, n) });
        self.cache.write().unwrap().entry(t).or_insert(piece).clone()
    }

    /// `R_t` as the column span of a matrix on `F_t`.
    pub fn relations_at(&self, t: i64) -> SparseMatrix {
        self.relations
            .realize(&self.ring, &self.relation_degrees, &self.generator_degrees, t)
    }

    pub fn dim(&self, t: i64) -> usize {
        self.piece(t).dim()
    }

    /// The map `M_u → M_{u + deg p}` given by multiplication by a
    /// homogeneous `p`.
    pub fn multiplication_matrix(&self, p: &Polynomial, u: i64) -> SparseMatrix {
        let Some(e) = p.homogeneous_degree(&self.ring) else {
            let src = self.dim(u);
            return SparseMatrix::zero(self.dim(u), src);
        };
        let src = self.piece(u);
        let tgt = self.piece(u + e);
        if src.dim() == 0 || tgt.dim() == 0 {
            return SparseMatrix::zero(tgt.dim(), src.dim());
        }
        let n = self.generator_degrees.len();
        let diag = PolyMatrix::new(n, n, (0..n).map(|j| (j, j, p.clone())).collect());
        let shifted: Vec<i64> = self.generator_degrees.iter().map(|g| g + e).collect();
        let free_map = diag.realize(&self.ring, &shifted, &self.generator_degrees, u + e);
        let lift = SparseMatrix::new(
            src.free_dim,
            src.dim(),
            src.quotient
                .complement
                .iter()
                .enumerate()
                .map(|(i, c)| (*c, i, Rational::one()))
                .collect(),
        );
        tgt.quotient.projection.mul(&free_map).mul(&lift)
    }

    /// The class of `μ · e_j` in `M_{g_j + deg μ}`.
    pub fn class_of(&self, generator: usize, m: &Monomial) -> SparseVec {
        let t = self.generator_degrees[generator] + self.ring.monomial_degree(m);
        let piece = self.piece(t);
        let (bases, offsets, _) =
            crate::complex::bases_and_offsets(&self.ring, &self.generator_degrees, t);
        let idx = bases[generator].index_of(m).expect("monomial of the right degree");
        piece.quotient.project(&vec![(offsets[generator] + idx, Rational::one())])
    }

    /// Dimensions of `M_t` over the window.
    pub fn hilbert_function(&self, w: DegreeWindow) -> Vec<(i64, usize)> {
        w.degrees().map(|t| (t, self.dim(t))).collect()
    }

    /// Degreewise realization with basis labels and generator actions.
    pub fn realize(&self, w: DegreeWindow) -> WindowedModule {
        let mut pieces = Vec::new();
        for t in w.degrees() {
            let piece = self.piece(t);
            let (bases, offsets, _) =
                crate::complex::bases_and_offsets(&self.ring, &self.generator_degrees, t);
            let labels = piece
                .quotient
                .complement
                .iter()
                .map(|c| {
                    let j = (0..bases.len())
                        .find(|&j| offsets[j] <= *c && *c < offsets[j] + bases[j].len())
                        .expect("index inside some summand");
                    let m = &bases[j].monomials[c - offsets[j]];
                    format!("{}*e{}", self.ring.format_monomial(m), j)
                })
                .collect();
            pieces.push(WindowedPiece { t, dim: piece.dim(), labels });
        }
        let mut actions = Vec::new();
        for i in 0..self.ring.rank() {
            let d = self.ring.degree(i);
            let y = self.ring.var(i);
            for t in w.degrees() {
                if w.contains(t + d) {
                    actions.push(Action { generator: i, t, matrix: self.multiplication_matrix(&y, t) });
                }
            }
        }
        WindowedModule { window: w, pieces, actions, untrusted: Vec::new() }
    }

    /// Textual form for the input format.
    pub fn to_text(&self, name: &str) -> String {
        let degs: Vec<String> = self.generator_degrees.iter().map(i64::to_string).collect();
        let mut out = format!("module {name}\n  gens {}\n", degs.join(" "));
        for c in 0..self.relations.cols() {
            let col: Vec<String> = (0..self.generator_degrees.len())
                .map(|r| self.relations.get(r, c).format(&self.ring))
                .collect();
            out.push_str(&format!("  rel {}\n", col.join(", ")));
        }
        out.push_str("end\n");
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WindowedPiece {
    pub t: i64,
    pub dim: usize,
    pub labels: Vec<String>,
}

/// Multiplication by a ring generator from degree `t` to `t + deg y`.
#[derive(Clone, Debug)]
pub struct Action {
    pub generator: usize,
    pub t: i64,
    pub matrix: SparseMatrix,
}

#[derive(Clone, Debug)]
pub struct WindowedModule {
    pub window: DegreeWindow,
    pub pieces: Vec<WindowedPiece>,
    pub actions: Vec<Action>,
    /// Degrees whose piece is not exact. Presented modules are exact in
    /// every degree, so this is empty for [`GradedModulePresentation::realize`].
    pub untrusted: Vec<i64>,
}

impl WindowedModule {
    pub fn dims(&self) -> Vec<(i64, usize)> {
        self.pieces.iter().map(|p| (p.t, p.dim)).collect()
    }

    pub fn action(&self, generator: usize, t: i64) -> Option<&SparseMatrix> {
        self.actions
            .iter()
            .find(|a| a.generator == generator && a.t == t)
            .map(|a| &a.matrix)
    }
}

/// Outcome of [`is_torsion`].
#[derive(Clone, Debug, Serialize)]
pub struct TorsionCertificate {
    pub torsion: bool,
    /// Rank-zero ring: `I = 0`, every module counts as torsion.
    pub degenerate: bool,
    /// Numerator of the Hilbert series over `∏ (1 - q^{|y_i|})`, as
    /// `(exponent, coefficient)` pairs.
    pub hilbert_numerator: Vec<(i64, i64)>,
    /// Top nonzero degree when the module is torsion.
    pub top_degree: Option<i64>,
    /// `exponents[j][i]`: least `e` with `y_i^e e_j = 0`, when found.
    pub exponents: Vec<Vec<Option<u32>>>,
    /// Degree through which surviving towers were followed.
    pub searched_through: i64,
}

/// Decides whether a presented module is `I`-torsion.
///
/// A finitely generated graded module is `I`-torsion exactly when it is
/// finite dimensional, i.e. when its Hilbert series is a Laurent
/// polynomial. The series numerator comes from the minimal resolution, and
/// torsion holds iff it is divisible by `∏ (1 - q^{|y_i|})`. The certificate
/// also records, per generator and ring generator, the nilpotence exponent.
pub fn is_torsion(m: &GradedModulePresentation) -> Result<TorsionCertificate, Error> {
    let ring = m.ring();
    let n = m.generator_degrees().len();
    if ring.rank() == 0 {
        return Ok(TorsionCertificate {
            torsion: true,
            degenerate: true,
            hilbert_numerator: Vec::new(),
            top_degree: m.max_degree(),
            exponents: vec![Vec::new(); n],
            searched_through: m.max_degree().unwrap_or(0),
        });
    }
    let res = crate::resolution::minimal_resolution(m, default_probe(m))?;
    let numerator = res.hilbert_numerator();
    let quotient = divide_by_denominators(&numerator, &ring.degrees());
    let torsion = quotient.is_some();
    let top_degree = quotient
        .as_ref()
        .and_then(|q| q.iter().rev().find(|(_, c)| *c != 0).map(|(e, _)| *e));
    let searched_through = match top_degree {
        Some(top) => top + 1,
        None => res.max_shift().unwrap_or(0) + ring.degrees().iter().sum::<i64>(),
    };
    let mut exponents = vec![vec![None; ring.rank()]; n];
    for (j, g) in m.generator_degrees().iter().enumerate() {
        for (i, slot) in exponents[j].iter_mut().enumerate() {
            let d = ring.degree(i);
            let mut e = 0u32;
            while g + e as i64 * d <= searched_through {
                if m.class_of(j, &Monomial::var(ring.rank(), i, e)).is_empty() {
                    *slot = Some(e);
                    break;
                }
                e += 1;
            }
            if torsion && slot.is_none() {
                *slot = Some(e);
            }
        }
    }
    Ok(TorsionCertificate {
        torsion,
        degenerate: false,
        hilbert_numerator: numerator,
        top_degree,
        exponents,
        searched_through,
    })
}

pub(crate) fn default_probe(m: &GradedModulePresentation) -> DegreeWindow {
    let lo = m.min_degree().unwrap_or(0);
    let hi = m.max_degree().unwrap_or(0);
    DegreeWindow { t_min: lo, t_max: hi.max(lo) }
}

/// Divides a Laurent polynomial by `∏ (1 - q^{d_i})` if the division is exact.
fn divide_by_denominators(numerator: &[(i64, i64)], degrees: &[i64]) -> Option<Vec<(i64, i64)>> {
    let Some(lo) = numerator.iter().map(|e| e.0).min() else {
        return Some(Vec::new());
    };
    let hi = numerator.iter().map(|e| e.0).max().unwrap();
    let mut coeffs = vec![0i64; (hi - lo + 1) as usize];
    for (e, c) in numerator {
        coeffs[(e - lo) as usize] += c;
    }
    for &d in degrees {
        // q(x) (1 - x^d) = p(x): q_k = p_k + q_{k-d}
        let d = d as usize;
        let mut q = vec![0i64; coeffs.len()];
        for k in 0..coeffs.len() {
            q[k] = coeffs[k] + if k >= d { q[k - d] } else { 0 };
        }
        // the last d coefficients of q must vanish for exact division
        let len = coeffs.len();
        if len < d || q[len - d..].iter().any(|&c| c != 0) {
            if coeffs.iter().all(|&c| c == 0) {
                return Some(Vec::new());
            }
            return None;
        }
        q.truncate(len - d);
        coeffs = q;
    }
    Some(
        coeffs
            .into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (lo + k as i64, c))
            .collect(),
    )
}

/// Certificate that `L_0^I` (graded `I`-adic completion) fixes a finitely
/// generated module.
#[derive(Clone, Debug, Serialize)]
pub struct CompletionCertificate {
    pub window: DegreeWindow,
    /// `(t, k)`: `(I^k M)_t = 0`.
    pub vanishing_power: Vec<(i64, u32)>,
}

/// `L_0^I M` for finitely generated `M`: the module itself.
///
/// `I^k` lives in degrees `≥ k · min |y_i|`, so `(I^k M)_t = 0` as soon as
/// `k · min|y_i| > t - min(generator degrees)`, and the inverse system
/// `M_t / (I^k M)_t` is eventually constant at `M_t` in every degree.
pub fn l0_completion(
    m: &GradedModulePresentation,
    w: DegreeWindow,
) -> (GradedModulePresentation, CompletionCertificate) {
    let ring = m.ring();
    let mut vanishing_power = Vec::new();
    let g_min = m.min_degree().unwrap_or(0);
    for t in w.degrees() {
        let k = match ring.degrees().iter().min() {
            None => 1,
            Some(&d) if t < g_min => {
                let _ = d;
                0
            }
            Some(&d) => ((t - g_min) / d + 1) as u32,
        };
        vanishing_power.push((t, k));
    }
    (m.clone(), CompletionCertificate { window: w, vanishing_power })
}

/// Checks a completion certificate by computing `(I^k M)_t` directly.
pub fn verify_completion(m: &GradedModulePresentation, cert: &CompletionCertificate) -> bool {
    let ring = m.ring();
    cert.vanishing_power.iter().all(|&(t, k)| {
        if ring.rank() == 0 {
            return k >= 1;
        }
        // (I^k M)_t is spanned by μ e_j with |μ| = t - g_j and total exponent >= k
        m.generator_degrees().iter().enumerate().all(|(j, g)| {
            ring.basis(t - g)
                .monomials
                .iter()
                .filter(|mu| mu.total_exponent() >= k)
                .all(|mu| m.class_of(j, mu).is_empty())
        })
    })
}
