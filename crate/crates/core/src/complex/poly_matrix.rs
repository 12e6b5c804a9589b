use crate::linalg::{Rational, SparseMatrix};
use crate::ring::{GradedPolynomialRing, Monomial, Polynomial};

/// A sparse matrix of polynomials. Column `k` is the image of source
/// generator `k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Polynomial)>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, Polynomial)>) -> Self {
        for (r, c, _) in &entries {
            assert!(*r < rows && *c < cols, "entry ({r},{c}) outside {rows}x{cols}");
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut out: Vec<(usize, usize, Polynomial)> = Vec::with_capacity(entries.len());
        for (r, c, p) in entries {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 = last.2.add(&p),
                _ => out.push((r, c, p)),
            }
        }
        out.retain(|e| !e.2.is_zero());
        PolyMatrix { rows, cols, entries: out }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize, rank: usize) -> Self {
        PolyMatrix::new(
            n,
            n,
            (0..n)
                .map(|i| (i, i, Polynomial::constant(rank, Rational::one())))
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, Polynomial)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Polynomial {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(r, c)))
            .map(|i| self.entries[i].2.clone())
            .unwrap_or_default()
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut rhs_rows: Vec<Vec<(usize, &Polynomial)>> = vec![Vec::new(); rhs.rows];
        for (r, c, p) in &rhs.entries {
            rhs_rows[*r].push((*c, p));
        }
        let mut entries = Vec::new();
        for (i, k, a) in &self.entries {
            for (j, b) in &rhs_rows[*k] {
                entries.push((*i, *j, a.mul(b)));
            }
        }
        PolyMatrix::new(self.rows, rhs.cols, entries)
    }

    pub fn add(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut e = self.entries.clone();
        e.extend(rhs.entries.iter().cloned());
        PolyMatrix::new(self.rows, self.cols, e)
    }

    pub fn scale(&self, s: &Rational) -> PolyMatrix {
        PolyMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|(r, c, p)| (*r, *c, p.scale(s))).collect(),
        )
    }

    pub fn neg(&self) -> PolyMatrix {
        self.scale(&Rational::from(-1))
    }

    /// First position where `self` and `other` differ.
    pub fn first_difference(&self, other: &PolyMatrix) -> Option<(usize, usize)> {
        let diff = self.add(&other.neg());
        diff.entries.first().map(|e| (e.0, e.1))
    }

    /// Checks that entry `(j, k)` is homogeneous of degree
    /// `src[k] - tgt[j] + degree`; returns the first offending position.
    pub fn check_homogeneous(
        &self,
        ring: &GradedPolynomialRing,
        src: &[i64],
        tgt: &[i64],
        degree: i64,
    ) -> Option<(usize, usize)> {
        for (j, k, p) in &self.entries {
            let want = src[*k] - tgt[*j] + degree;
            if p.homogeneous_degree(ring) != Some(want) {
                return Some((*j, *k));
            }
        }
        None
    }

    /// The linear map this matrix induces from `(⊕ Σ^{src_k} A)_t` to
    /// `(⊕ Σ^{tgt_j} A)_t`. Entries must be homogeneous of degree
    /// `src[k] - tgt[j]`.
    pub fn realize(
        &self,
        ring: &GradedPolynomialRing,
        src: &[i64],
        tgt: &[i64],
        t: i64,
    ) -> SparseMatrix {
        let (src_bases, src_off, ncols) = bases_and_offsets(ring, src, t);
        let (tgt_bases, tgt_off, nrows) = bases_and_offsets(ring, tgt, t);
        let mut entries = Vec::new();
        for (j, k, p) in &self.entries {
            let sb = &src_bases[*k];
            if sb.is_empty() {
                continue;
            }
            let tb = &tgt_bases[*j];
            for (i, mu) in sb.monomials.iter().enumerate() {
                for (nu, c) in p.terms() {
                    let prod = mu.mul(nu);
                    let idx = tb
                        .index_of(&prod)
                        .expect("matrix entry of the wrong degree");
                    entries.push((tgt_off[*j] + idx, src_off[*k] + i, c.clone()));
                }
            }
        }
        SparseMatrix::new(nrows, ncols, entries)
    }
}

pub(crate) type Bases = Vec<std::sync::Arc<crate::ring::MonomialBasis>>;

/// Monomial bases of each summand `A_{t - shift}` with running offsets.
pub(crate) fn bases_and_offsets(
    ring: &GradedPolynomialRing,
    shifts: &[i64],
    t: i64,
) -> (Bases, Vec<usize>, usize) {
    let bases: Bases = shifts.iter().map(|a| ring.basis(t - a)).collect();
    let mut offsets = Vec::with_capacity(bases.len());
    let mut total = 0;
    for b in &bases {
        offsets.push(total);
        total += b.len();
    }
    (bases, offsets, total)
}

/// Dimension of `(⊕ Σ^{shift} A)_t`.
pub fn free_dim(ring: &GradedPolynomialRing, shifts: &[i64], t: i64) -> usize {
    shifts.iter().map(|a| ring.dim(t - a)).sum()
}

/// Converts a vector in `(⊕ Σ^{shift} A)_t` back to a column of polynomials.
pub(crate) fn vector_to_polys(
    ring: &GradedPolynomialRing,
    shifts: &[i64],
    t: i64,
    v: &crate::linalg::SparseVec,
) -> Vec<Polynomial> {
    let (bases, offsets, _) = bases_and_offsets(ring, shifts, t);
    let mut terms: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); shifts.len()];
    for (idx, c) in v {
        let k = match offsets.binary_search(idx) {
            Ok(mut k) => {
                // skip empty summands sharing this offset
                while bases[k].is_empty() {
                    k += 1;
                }
                k
            }
            Err(k) => k - 1,
        };
        terms[k].push((bases[k].monomials[idx - offsets[k]].clone(), c.clone()));
    }
    terms.into_iter().map(Polynomial::from_terms).collect()
}
