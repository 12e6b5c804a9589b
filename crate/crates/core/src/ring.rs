//! The coefficient ring `A = Q[y_1, ..., y_r]` with generators in positive
//! even internal degrees, its monomials and homogeneous elements.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::linalg::Rational;
use crate::Error;

/// An exponent vector, one entry per ring generator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(rank: usize) -> Self {
        Monomial(vec![0; rank])
    }

    pub fn var(rank: usize, i: usize, power: u32) -> Self {
        let mut e = vec![0; rank];
        e[i] = power;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn total_exponent(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// The monomials of one internal degree together with a reverse index.
#[derive(Debug)]
pub struct MonomialBasis {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl MonomialBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// `Q[y_1, ..., y_r]`, each `y_i` in a positive even degree.
///
/// Clones share a degreewise cache of monomial bases.
#[derive(Clone)]
pub struct GradedPolynomialRing {
    generators: Vec<(String, i64)>,
    cache: Arc<RwLock<HashMap<i64, Arc<MonomialBasis>>>>,
}

impl PartialEq for GradedPolynomialRing {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
    }
}

impl Eq for GradedPolynomialRing {}

impl fmt::Debug for GradedPolynomialRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GradedPolynomialRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "Q");
        }
        let names: Vec<String> = self
            .generators
            .iter()
            .map(|(n, d)| format!("{n}:{d}"))
            .collect();
        write!(f, "Q[{}]", names.join(", "))
    }
}

impl GradedPolynomialRing {
    pub fn new<S: Into<String>>(generators: Vec<(S, i64)>) -> Result<Self, Error> {
        let generators: Vec<(String, i64)> =
            generators.into_iter().map(|(n, d)| (n.into(), d)).collect();
        for (i, (name, d)) in generators.iter().enumerate() {
            if *d <= 0 || d % 2 != 0 {
                return Err(Error::InvalidRing(format!(
                    "generator `{name}` has degree {d}; degrees must be positive and even"
                )));
            }
            if !is_identifier(name) {
                return Err(Error::InvalidRing(format!("`{name}` is not a valid generator name")));
            }
            if generators[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidRing(format!("duplicate generator name `{name}`")));
            }
        }
        Ok(GradedPolynomialRing { generators, cache: Default::default() })
    }

    /// The ring `Q` (rank zero).
    pub fn rationals() -> Self {
        GradedPolynomialRing { generators: Vec::new(), cache: Default::default() }
    }

    /// Generators named `y1, ..., yr` in the given degrees.
    pub fn with_degrees(degrees: &[i64]) -> Result<Self, Error> {
        Self::new(
            degrees
                .iter()
                .enumerate()
                .map(|(i, d)| (format!("y{}", i + 1), *d))
                .collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[(String, i64)] {
        &self.generators
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.generators[i].1
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.1).collect()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.generators[i].0
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|(n, _)| n == name)
    }

    pub fn monomial_degree(&self, m: &Monomial) -> i64 {
        m.0.iter()
            .zip(&self.generators)
            .map(|(e, (_, d))| *e as i64 * d)
            .sum()
    }

    /// The monomials of internal degree `t`, in descending lexicographic
    /// order of exponent vectors (so `x^2, xy, y^2`).
    pub fn monomial_basis(&self, t: i64) -> Vec<Monomial> {
        self.basis(t).monomials.clone()
    }

    /// Cached form of [`monomial_basis`](Self::monomial_basis).
    pub fn basis(&self, t: i64) -> Arc<MonomialBasis> {
        if let Some(b) = self.cache.read().unwrap().get(&t) {
            return Arc::clone(b);
        }
        let monomials = enumerate_monomials(&self.degrees(), t);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        let basis = Arc::new(MonomialBasis { monomials, index });
        self.cache
            .write()
            .unwrap()
            .entry(t)
            .or_insert_with(|| Arc::clone(&basis))
            .clone()
    }

    pub fn dim(&self, t: i64) -> usize {
        self.basis(t).len()
    }

    /// Coefficients of `prod_i 1/(1 - q^{|y_i|})` over the window, computed by
    /// power-series multiplication.
    pub fn hilbert_coefficients(&self, t_min: i64, t_max: i64) -> Vec<(i64, u64)> {
        if t_max < 0 {
            return (t_min..=t_max).map(|t| (t, 0)).collect();
        }
        let n = t_max as usize + 1;
        let mut series = vec![0u64; n];
        series[0] = 1;
        for (_, d) in &self.generators {
            let d = *d as usize;
            for t in d..n {
                series[t] += series[t - d];
            }
        }
        (t_min..=t_max)
            .map(|t| (t, if t < 0 { 0 } else { series[t as usize] }))
            .collect()
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::constant(self.rank(), Rational::one())
    }

    pub fn var(&self, i: usize) -> Polynomial {
        Polynomial::monomial(Monomial::var(self.rank(), i, 1), Rational::one())
    }

    /// `A ⊗ B`: generators of `self` followed by those of `other`.
    pub fn tensor(&self, other: &GradedPolynomialRing) -> Result<Self, Error> {
        let mut g = self.generators.clone();
        g.extend(other.generators.iter().cloned());
        Self::new(g)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| {
                if *e == 1 {
                    self.name(i).to_string()
                } else {
                    format!("{}^{}", self.name(i), e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn enumerate_monomials(degrees: &[i64], t: i64) -> Vec<Monomial> {
    fn rec(degrees: &[i64], i: usize, rest: i64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == degrees.len() {
            if rest == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let d = degrees[i];
        let mut e = rest / d;
        loop {
            cur.push(e as u32);
            rec(degrees, i + 1, rest - e * d, cur, out);
            cur.pop();
            if e == 0 {
                break;
            }
            e -= 1;
        }
    }
    let mut out = Vec::new();
    if t < 0 {
        return out;
    }
    rec(degrees, 0, t, &mut Vec::new(), &mut out);
    out
}

/// A polynomial: sorted `(monomial, coefficient)` terms with no zero
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    terms: Vec<(Monomial, Rational)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn constant(rank: usize, c: Rational) -> Self {
        Self::monomial(Monomial::one(rank), c)
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    pub fn from_terms(terms: Vec<(Monomial, Rational)>) -> Self {
        let mut terms = terms;
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 += &c,
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Polynomial { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Polynomial::from_terms(t)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut t = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                t.push((a.mul(b), x * y));
            }
        }
        Polynomial::from_terms(t)
    }

    pub fn pow(&self, e: u32, rank: usize) -> Polynomial {
        let mut acc = Polynomial::constant(rank, Rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The common internal degree of all terms; `None` for zero or
    /// inhomogeneous polynomials.
    pub fn homogeneous_degree(&self, ring: &GradedPolynomialRing) -> Option<i64> {
        let mut it = self.terms.iter().map(|(m, _)| ring.monomial_degree(m));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self, ring: &GradedPolynomialRing) -> bool {
        self.is_zero() || self.homogeneous_degree(ring).is_some()
    }

    /// Whether every term has positive degree, i.e. the element lies in the
    /// augmentation ideal.
    pub fn in_augmentation_ideal(&self) -> bool {
        self.terms.iter().all(|(m, _)| !m.is_one())
    }

    pub fn format(&self, ring: &GradedPolynomialRing) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = ring.format_monomial(m);
            if mono == "1" {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qc() -> GradedPolynomialRing {
        GradedPolynomialRing::new(vec![("c", 2)]).unwrap()
    }

    fn qxy() -> GradedPolynomialRing {
        GradedPolynomialRing::new(vec![("x", 2), ("y", 2)]).unwrap()
    }

    #[test]
    fn rejects_bad_degrees() {
        assert!(GradedPolynomialRing::new(vec![("x", 3)]).is_err());
        assert!(GradedPolynomialRing::new(vec![("x", 0)]).is_err());
        assert!(GradedPolynomialRing::new(vec![("x", -2)]).is_err());
        assert!(GradedPolynomialRing::new(vec![("x", 2), ("x", 4)]).is_err());
        assert_eq!(GradedPolynomialRing::rationals().rank(), 0);
    }

    #[test]
    fn single_generator_basis() {
        assert_eq!(qc().monomial_basis(6), vec![Monomial(vec![3])]);
        assert!(qc().monomial_basis(5).is_empty());
        assert!(qc().monomial_basis(-2).is_empty());
    }

    #[test]
    fn two_generator_basis_in_lex_order() {
        let b = qxy().monomial_basis(4);
        assert_eq!(b, vec![Monomial(vec![2, 0]), Monomial(vec![1, 1]), Monomial(vec![0, 2])]);
    }

    #[test]
    fn hilbert_examples() {
        let r = GradedPolynomialRing::new(vec![("y", 4)]).unwrap();
        let h: Vec<u64> = r.hilbert_coefficients(0, 8).into_iter().map(|x| x.1).collect();
        assert_eq!(h, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]);
        let h: Vec<u64> = GradedPolynomialRing::rationals()
            .hilbert_coefficients(-2, 4)
            .into_iter()
            .map(|x| x.1)
            .collect();
        assert_eq!(h, vec![0, 0, 1, 0, 0, 0, 0]);
        for (t, c) in qxy().hilbert_coefficients(0, 30) {
            let expect = if t % 2 == 0 { t as u64 / 2 + 1 } else { 0 };
            assert_eq!(c, expect);
        }
    }

    #[test]
    fn products() {
        let r = qxy();
        let x = r.var(0);
        let y = r.var(1);
        assert_eq!(r.one().mul(&x), x);
        assert_eq!(x.mul(&y), y.mul(&x));
        let s = x.add(&y);
        let sq = s.mul(&s);
        let expect = x
            .mul(&x)
            .add(&x.mul(&y).scale(&Rational::from(2)))
            .add(&y.mul(&y));
        assert_eq!(sq, expect);
        assert_eq!(sq.homogeneous_degree(&r), Some(4));
        assert_eq!(sq.format(&r), "x^2 + 2*x*y + y^2");
    }

    #[test]
    fn inhomogeneous_detected() {
        let r = qxy();
        let p = r.var(0).add(&r.var(0).mul(&r.var(1)));
        assert_eq!(p.homogeneous_degree(&r), None);
    }
}
