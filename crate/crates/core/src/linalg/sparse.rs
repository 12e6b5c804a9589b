use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// A sparse vector: `(index, value)` pairs, strictly increasing in index,
/// with no zero values.
pub type SparseVec = Vec<(usize, Rational)>;

/// Sparse rational matrix in triplet form.
///
/// Entries are kept sorted row-major, with no duplicate positions and no
/// stored zeros, so two matrices are equal exactly when their entry lists are.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rational)>,
}

impl SparseMatrix {
    /// Builds a matrix from arbitrary triplets. Duplicate positions are summed
    /// and zeros dropped.
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, Rational)>) -> Self {
        for &(r, c, _) in &entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
        }
        entries.sort_by_key(|e| (e.0, e.1));
        let mut out: Vec<(usize, usize, Rational)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += &v,
                _ => out.push((r, c, v)),
            }
        }
        out.retain(|e| !e.2.is_zero());
        SparseMatrix { rows, cols, entries: out }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, Rational::one())).collect(),
        }
    }

    pub fn from_dense<T: Clone + Into<Rational>>(rows: &[Vec<T>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                entries.push((i, j, v.clone().into()));
            }
        }
        SparseMatrix::new(nrows, ncols, entries)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut entries = Vec::new();
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                entries.push((*i, j, v.clone()));
            }
        }
        SparseMatrix::new(rows, columns.len(), entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, Rational)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(r, c)))
            .map(|i| self.entries[i].2.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix::new(
            self.cols,
            self.rows,
            self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())).collect(),
        )
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            out[*r].push((*c, v.clone()));
        }
        out
    }

    pub fn column_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            out[*c].push((*r, v.clone()));
        }
        out
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let cols = self.column_vectors();
        let mut acc: Vec<(usize, Rational)> = Vec::new();
        for (j, x) in v {
            for (i, a) in &cols[*j] {
                acc.push((*i, a * x));
            }
        }
        normalize_vec(acc)
    }

    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let rhs_rows = rhs.row_vectors();
        let mut entries = Vec::new();
        for (i, k, a) in &self.entries {
            for (j, b) in &rhs_rows[*k] {
                entries.push((*i, *j, a * b));
            }
        }
        SparseMatrix::new(self.rows, rhs.cols, entries)
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        SparseMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|(r, c, v)| (*r, *c, v * s)).collect(),
        )
    }

    pub fn add(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut entries = self.entries.clone();
        entries.extend(rhs.entries.iter().cloned());
        SparseMatrix::new(self.rows, self.cols, entries)
    }

    /// Column rank, computed by fraction-free elimination without
    /// back-substitution.
    pub fn rank(&self) -> usize {
        // eliminate along the shorter side
        let vecs = if self.rows <= self.cols {
            self.row_vectors()
        } else {
            self.column_vectors()
        };
        let dim = self.rows.max(self.cols);
        let mut ech = Echelon::new(dim);
        for v in &vecs {
            ech.insert(v);
        }
        ech.rank()
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        let mut ech = Echelon::new(self.cols);
        for v in self.row_vectors() {
            ech.insert(&v);
        }
        let (pivots, rows) = ech.reduced_rows();
        let mut entries = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (c, v) in row {
                entries.push((i, *c, v.clone()));
            }
        }
        Rref {
            rank: pivots.len(),
            reduced: SparseMatrix::new(pivots.len(), self.cols, entries),
            pivots,
        }
    }

    /// A basis of the null space `{v : self * v = 0}`. One vector per
    /// non-pivot column, with a 1 in that column.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let rref = self.rref();
        let rows = rref.reduced.row_vectors();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        // column f of the reduced matrix, indexed by pivot row
        let mut by_col: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.cols];
        for (i, row) in rows.iter().enumerate() {
            for (c, v) in row {
                if !is_pivot[*c] {
                    by_col[*c].push((i, v.clone()));
                }
            }
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v: SparseVec = by_col[f]
                    .iter()
                    .map(|(i, x)| (rref.pivots[*i], -x))
                    .collect();
                v.push((f, Rational::one()));
                v.sort_by_key(|e| e.0);
                v
            })
            .collect()
    }
}

/// Output of [`SparseMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// The nonzero rows of the reduced row-echelon form.
    pub reduced: SparseMatrix,
}

/// A chosen basis of `Q^n / span(sub)` together with the projection onto it.
///
/// The basis consists of the standard vectors `e_c` for `c` in `complement`,
/// so lifting basis vector `i` back to the ambient space is `e_{complement[i]}`.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    pub ambient_dim: usize,
    pub complement: Vec<usize>,
    /// `dim x ambient_dim` matrix sending a vector to its class.
    pub projection: SparseMatrix,
}

impl QuotientBasis {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn project(&self, v: &SparseVec) -> SparseVec {
        self.projection.mul_vec(v)
    }
}

/// Cokernel of the map whose columns span `sub`.
pub fn quotient_basis(sub: &SparseMatrix, ambient_dim: usize) -> QuotientBasis {
    assert_eq!(sub.rows(), ambient_dim, "sub must have ambient_dim rows");
    let mut ech = Echelon::new(ambient_dim);
    for v in sub.column_vectors() {
        ech.insert(&v);
    }
    quotient_from_echelon(ech, ambient_dim)
}

pub(crate) fn quotient_from_echelon(ech: Echelon, ambient_dim: usize) -> QuotientBasis {
    let (pivots, rows) = ech.reduced_rows();
    let mut is_pivot = vec![false; ambient_dim];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let complement: Vec<usize> = (0..ambient_dim).filter(|&c| !is_pivot[c]).collect();
    let mut position = vec![usize::MAX; ambient_dim];
    for (i, &c) in complement.iter().enumerate() {
        position[c] = i;
    }
    // v mod span = v - sum_p v_p * row_p; read off the complement coordinates.
    let mut entries = Vec::new();
    for (i, &c) in complement.iter().enumerate() {
        entries.push((i, c, Rational::one()));
    }
    for (row, &p) in rows.iter().zip(&pivots) {
        for (c, v) in row {
            if !is_pivot[*c] {
                entries.push((position[*c], p, -v));
            }
        }
    }
    QuotientBasis {
        ambient_dim,
        projection: SparseMatrix::new(complement.len(), ambient_dim, entries),
        complement,
    }
}

pub(crate) fn normalize_vec(mut v: Vec<(usize, Rational)>) -> SparseVec {
    v.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += &x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

type IntRow = Vec<(usize, BigInt)>;

/// Incremental row echelon form over the integers.
///
/// Rows are stored primitive (content 1) with a positive leading entry.
/// Insertion reduces a new row against existing pivots by fraction-free
/// combinations, dividing out the row content after every step.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    pivot_of_col: Vec<Option<usize>>,
    rows: Vec<IntRow>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, pivot_of_col: vec![None; dim], rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts a vector; returns true when it was independent of the span so far.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let mut row = to_int_row(v);
        self.reduce(&mut row);
        if row.is_empty() {
            return false;
        }
        let lead = row[0].0;
        self.pivot_of_col[lead] = Some(self.rows.len());
        self.rows.push(row);
        true
    }

    /// Whether `v` lies in the current span.
    pub fn contains(&self, v: &SparseVec) -> bool {
        let mut row = to_int_row(v);
        self.reduce(&mut row);
        row.is_empty()
    }

    fn reduce(&self, row: &mut IntRow) {
        while let Some((lead, a)) = row.first().map(|(c, a)| (*c, a.clone())) {
            let Some(pi) = self.pivot_of_col[lead] else {
                break;
            };
            let p = &self.rows[pi];
            let b = &p[0].1;
            let g = a.gcd(b);
            let ra = &a / &g;
            let rb = b / &g;
            // row <- rb*row - ra*p, which cancels the leading entry
            *row = combine(row, &rb, p, &(-ra));
            make_primitive(row);
        }
        if let Some(first) = row.first() {
            if first.1.is_negative() {
                for e in row.iter_mut() {
                    e.1 = -std::mem::take(&mut e.1);
                }
            }
        }
    }

    /// Pivot columns in increasing order with the matching fully reduced rows
    /// (pivot entry 1, zeros in every other pivot column).
    pub fn reduced_rows(self) -> (Vec<usize>, Vec<SparseVec>) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.rows[i][0].0);
        let mut rows: Vec<IntRow> = order.iter().map(|&i| self.rows[i].clone()).collect();
        let pivots: Vec<usize> = rows.iter().map(|r| r[0].0).collect();
        // back-substitute from the last pivot upwards
        for i in (0..rows.len()).rev() {
            let p = pivots[i];
            for j in 0..i {
                let Ok(pos) = rows[j].binary_search_by_key(&p, |e| e.0) else {
                    continue;
                };
                let a = rows[j][pos].1.clone();
                let b = rows[i][0].1.clone();
                let g = a.gcd(&b);
                let new = combine(&rows[j], &(&b / &g), &rows[i], &(-(&a / &g)));
                rows[j] = new;
                make_primitive(&mut rows[j]);
            }
        }
        let out = rows
            .into_iter()
            .map(|r| {
                let lead = r[0].1.clone();
                r.into_iter()
                    .map(|(c, v)| (c, Rational::new(v, lead.clone())))
                    .collect()
            })
            .collect();
        (pivots, out)
    }
}

fn to_int_row(v: &SparseVec) -> IntRow {
    let mut l = BigInt::one();
    for (_, x) in v {
        if !x.denom().is_one() {
            l = l.lcm(x.denom());
        }
    }
    let mut row: IntRow = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (*c, x.numer() * (&l / x.denom())))
        .collect();
    make_primitive(&mut row);
    row
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v /= &g;
    }
}

/// `alpha * x + beta * y` on sorted sparse integer rows.
fn combine(x: &IntRow, alpha: &BigInt, y: &IntRow, beta: &BigInt) -> IntRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, alpha * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, beta * &y[j].1));
            j += 1;
        } else {
            let v = alpha * &x[i].1 + beta * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_dense(rows)
    }

    #[test]
    fn identity_rref() {
        let r = SparseMatrix::identity(2).rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.reduced, SparseMatrix::identity(2));
    }

    #[test]
    fn proportional_rows() {
        let a = m(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(a.rank(), 1);
        assert_eq!(a.rref().rank, 1);
    }

    #[test]
    fn hand_reduced_rank_two() {
        // r3 = r1 - r2
        let a = m(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, -1]]);
        let r = a.rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.reduced, m(&[vec![1, 0, -1], vec![0, 1, 1]]));
    }

    #[test]
    fn kernels() {
        assert!(SparseMatrix::identity(3).kernel_basis().is_empty());
        assert_eq!(SparseMatrix::zero(2, 3).kernel_basis().len(), 3);
        let k = m(&[vec![1, 2], vec![2, 4]]).kernel_basis();
        assert_eq!(k.len(), 1);
        // proportional to (2, -1)
        let v = &k[0];
        let x0 = v.iter().find(|e| e.0 == 0).unwrap().1.clone();
        let x1 = v.iter().find(|e| e.0 == 1).unwrap().1.clone();
        assert_eq!(&x0 / &x1, Rational::from(-2));
    }

    #[test]
    fn quotients() {
        let q = quotient_basis(&SparseMatrix::zero(3, 0), 3);
        assert_eq!(q.dim(), 3);
        let q = quotient_basis(&SparseMatrix::identity(3), 3);
        assert_eq!(q.dim(), 0);
        let sub = m(&[vec![1], vec![2]]);
        let q = quotient_basis(&sub, 2);
        assert_eq!(q.dim(), 1);
        assert!(q.projection.mul(&sub).is_zero());
    }

    #[test]
    fn rational_entries() {
        let a = SparseMatrix::new(
            2,
            2,
            vec![
                (0, 0, Rational::new(1, 2)),
                (0, 1, Rational::new(1, 3)),
                (1, 0, Rational::new(3, 2)),
                (1, 1, Rational::from(1)),
            ],
        );
        assert_eq!(a.rank(), 1);
        for v in a.kernel_basis() {
            assert!(a.mul_vec(&v).is_empty());
        }
    }

    #[test]
    fn echelon_membership() {
        let mut e = Echelon::new(3);
        assert!(e.insert(&vec![(0, Rational::from(2)), (2, Rational::from(4))]));
        assert!(!e.insert(&vec![(0, Rational::from(1)), (2, Rational::from(2))]));
        assert!(e.contains(&vec![(0, Rational::new(1, 7)), (2, Rational::new(2, 7))]));
        assert!(!e.contains(&vec![(1, Rational::from(1))]));
    }
}
