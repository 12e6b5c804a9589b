//! Koszul complexes `K_k = ⊗_i (Σ^{k|y_i|} A --y_i^k--> A)`, the tower
//! `K_{k+1} → K_k`, and their duals.
//!
//! The basis of `K_k` in homological degree `s` is indexed by the
//! `s`-element subsets `S` of the generators, listed in lexicographic order;
//! `e_S` has internal shift `k · Σ_{i∈S} |y_i|` and
//! `d e_S = Σ_j (-1)^j y_{i_j}^k e_{S \ i_j}` for `S = {i_0 < i_1 < ...}`.

use std::collections::{BTreeMap, VecDeque};

use crate::complex::{ChainMap, FreeComplex, PolyMatrix};
use crate::linalg::Rational;
use crate::ring::{GradedPolynomialRing, Monomial, Polynomial};
use crate::Error;

/// `s`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, s, &mut Vec::new(), &mut out);
    out
}

fn subset_index(n: usize, set: &[usize]) -> usize {
    subsets(n, set.len()).iter().position(|x| x == set).expect("subset of 0..n")
}

/// `∏_{i∈S} y_i^e`.
fn product(ring: &GradedPolynomialRing, set: &[usize], e: u32) -> Polynomial {
    let mut exps = vec![0u32; ring.rank()];
    for i in set {
        exps[*i] = e;
    }
    Polynomial::monomial(Monomial(exps), Rational::one())
}

#[derive(Clone, Debug)]
pub struct KoszulComplex {
    pub k: u32,
    pub complex: FreeComplex,
    /// Subset labels per homological degree, in basis order.
    pub labels: BTreeMap<i64, Vec<Vec<usize>>>,
}

/// `K_k` for the augmentation ideal, `k ≥ 1`.
pub fn koszul(ring: &GradedPolynomialRing, k: u32) -> KoszulComplex {
    assert!(k >= 1, "Koszul power must be positive");
    let n = ring.rank();
    let mut terms = BTreeMap::new();
    let mut labels = BTreeMap::new();
    for s in 0..=n {
        let sets = subsets(n, s);
        terms.insert(
            s as i64,
            sets.iter()
                .map(|set| k as i64 * set.iter().map(|i| ring.degree(*i)).sum::<i64>())
                .collect(),
        );
        labels.insert(s as i64, sets);
    }
    let mut diffs = BTreeMap::new();
    for s in 1..=n {
        let src = &labels[&(s as i64)];
        let mut entries = Vec::new();
        for (col, set) in src.iter().enumerate() {
            for (j, i) in set.iter().enumerate() {
                let mut rest = set.clone();
                rest.remove(j);
                let row = subset_index(n, &rest);
                let coeff = if j % 2 == 0 { 1 } else { -1 };
                let p = Polynomial::monomial(Monomial::var(n, *i, k), Rational::from(coeff));
                entries.push((row, col, p));
            }
        }
        diffs.insert(s as i64, PolyMatrix::new(labels[&(s as i64 - 1)].len(), src.len(), entries));
    }
    let complex = FreeComplex::new(ring.clone(), terms, diffs).expect("Koszul complexes satisfy d² = 0");
    KoszulComplex { k, complex, labels }
}

/// `K_{k+m} → K_k`, `e_S ↦ (∏_{i∈S} y_i^m) e_S`.
pub fn tower_composite(ring: &GradedPolynomialRing, k: u32, m: u32) -> ChainMap {
    let src = koszul(ring, k + m);
    let tgt = koszul(ring, k);
    let maps = src
        .labels
        .iter()
        .map(|(s, sets)| {
            let entries = sets
                .iter()
                .enumerate()
                .map(|(i, set)| (i, i, product(ring, set, m)))
                .collect();
            (*s, PolyMatrix::new(sets.len(), sets.len(), entries))
        })
        .collect();
    ChainMap::new(src.complex, tgt.complex, maps).expect("tower maps are chain maps")
}

/// `K_{k+1} → K_k`.
pub fn tower_map(ring: &GradedPolynomialRing, k: u32) -> ChainMap {
    tower_composite(ring, k, 1)
}

/// `D_k = Hom(K_k, A)`.
pub fn dual(ring: &GradedPolynomialRing, k: u32) -> FreeComplex {
    koszul(ring, k)
        .complex
        .hom(&FreeComplex::unit(ring))
        .expect("same ring")
}

/// `D_k → D_{k+1}`, dual to the tower map.
pub fn dual_map(ring: &GradedPolynomialRing, k: u32) -> ChainMap {
    tower_map(ring, k)
        .hom(&ChainMap::identity(&FreeComplex::unit(ring)))
        .expect("same ring")
}

/// `D_k → A`, evaluation on the degree-0 generator.
pub fn dual_augmentation(ring: &GradedPolynomialRing, k: u32) -> ChainMap {
    let d = dual(ring, k);
    let unit = FreeComplex::unit(ring);
    let maps = BTreeMap::from([(0, PolyMatrix::identity(1, ring.rank()))]);
    ChainMap::new(d, unit, maps).expect("the s = 0 strand of D_k is A")
}

/// `K_k → Q`-resolution augmentation `K_k → A`, projection to `s = 0`.
pub fn koszul_augmentation(ring: &GradedPolynomialRing, k: u32) -> ChainMap {
    let c = koszul(ring, k).complex;
    let maps = BTreeMap::from([(0, PolyMatrix::identity(1, ring.rank()))]);
    ChainMap::new_unchecked(c, FreeComplex::unit(ring), maps).expect("shapes agree")
}

/// The tower `K_1 ← K_2 ← ... ← K_{k_max}`.
#[derive(Clone, Debug)]
pub struct KoszulTower {
    pub complexes: Vec<KoszulComplex>,
    /// `maps[i]: K_{i+2} → K_{i+1}`.
    pub maps: Vec<ChainMap>,
}

impl KoszulTower {
    pub fn new(ring: &GradedPolynomialRing, k_max: u32) -> Self {
        KoszulTower {
            complexes: (1..=k_max).map(|k| koszul(ring, k)).collect(),
            maps: (1..k_max).map(|k| tower_map(ring, k)).collect(),
        }
    }

    /// Every composite of consecutive maps equals the direct map
    /// `K_{k+m} → K_k`.
    pub fn composites_agree(&self) -> bool {
        let ring = match self.complexes.first() {
            Some(c) => c.complex.ring().clone(),
            None => return true,
        };
        for k in 0..self.maps.len() {
            let mut acc = self.maps[k].clone();
            for m in (0..k).rev() {
                acc = match acc.then(&self.maps[m]) {
                    Ok(f) => f,
                    Err(_) => return false,
                };
                let direct = tower_composite(&ring, m as u32 + 1, (k - m) as u32 + 1);
                if acc.components() != direct.components() {
                    return false;
                }
            }
        }
        true
    }
}

/// An explicit isomorphism `Σ^{(h, -a)} K_k ≅ D_k`.
#[derive(Clone, Debug)]
pub struct SelfDuality {
    pub k: u32,
    pub hom_shift: i64,
    /// `a = k · Σ |y_i|`.
    pub a: i64,
    pub iso: ChainMap,
}

/// Builds and checks `D_k ≅ Σ^{(-n, -a)} K_k`, sending `e_S` to `±e*_{S^c}`.
pub fn self_duality_check(ring: &GradedPolynomialRing, k: u32) -> Result<SelfDuality, Error> {
    let n = ring.rank();
    let kos = koszul(ring, k);
    let a = k as i64 * ring.degrees().iter().sum::<i64>();
    let source = kos.complex.shift(-(n as i64), -a);
    let target = dual(ring, k);
    let complement = |set: &[usize]| -> Vec<usize> { (0..n).filter(|i| !set.contains(i)).collect() };
    // ε_S via propagation along differential entries
    let mut eps: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    let full: Vec<usize> = (0..n).collect();
    eps.insert(full.clone(), 1);
    let mut queue = VecDeque::from([full]);
    while let Some(set) = queue.pop_front() {
        let e = eps[&set];
        let s = set.len() as i64;
        let col = subset_index(n, &set);
        let dk = source.d(s - n as i64);
        let dd = target.d(-((n - set.len()) as i64));
        let comp = complement(&set);
        let dcol = subset_index(n, &comp);
        for (row, c, p) in dk.entries() {
            if *c != col {
                continue;
            }
            let rest = &kos.labels[&(s - 1)][*row];
            if eps.contains_key(rest) {
                continue;
            }
            let rest_c = complement(rest);
            let drow = subset_index(n, &rest_c);
            let q = dd.get(drow, dcol);
            // f∘d = d∘f on e_S: ε_{rest} · p = q · ε_S
            let ratio = q.terms().first().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
                / p.terms()[0].1.clone();
            let sign = if ratio.is_negative() { -1 } else { 1 };
            eps.insert(rest.clone(), sign * e);
            queue.push_back(rest.clone());
        }
    }
    let mut maps = BTreeMap::new();
    for (s, sets) in &kos.labels {
        let entries = sets
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let j = subset_index(n, &complement(set));
                (j, i, Polynomial::constant(n, Rational::from(eps[set])))
            })
            .collect();
        maps.insert(s - n as i64, PolyMatrix::new(sets.len(), sets.len(), entries));
    }
    let iso = ChainMap::new(source, target, maps)
        .map_err(|e| Error::Internal(format!("Koszul self-duality sign propagation failed: {e}")))?;
    Ok(SelfDuality { k, hom_shift: -(n as i64), a, iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::DegreeWindow;

    #[test]
    fn subsets_are_lexicographic() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn koszul_resolves_quotient() {
        let r = GradedPolynomialRing::with_degrees(&[2, 4]).unwrap();
        let k1 = koszul(&r, 1);
        assert_eq!(k1.complex.term(1), &[2, 4]);
        assert_eq!(k1.complex.term(2), &[6]);
        let h = k1.complex.homology(DegreeWindow::new(-4, 20).unwrap());
        assert_eq!(h.nonzero().collect::<Vec<_>>(), vec![((0, 0), 1)]);
        // K_2 resolves A/(y1^2, y2^2): dims 1,0,1,0,1,0,1 then 0
        let h = koszul(&r, 2).complex.homology(DegreeWindow::new(0, 12).unwrap());
        let dims: Vec<_> = h.nonzero().collect();
        assert_eq!(dims, vec![((0, 0), 1), ((0, 2), 1), ((0, 4), 1), ((0, 6), 1)]);
    }

    #[test]
    fn tower_composites() {
        let r = GradedPolynomialRing::with_degrees(&[2, 2, 4]).unwrap();
        let tower = KoszulTower::new(&r, 4);
        assert!(tower.composites_agree());
    }

    #[test]
    fn self_duality_for_small_rings() {
        for degs in [vec![], vec![2], vec![2, 4], vec![2, 4, 6], vec![2, 2, 2, 2]] {
            let r = GradedPolynomialRing::with_degrees(&degs).unwrap();
            for k in 1..=3 {
                let sd = self_duality_check(&r, k).unwrap();
                assert_eq!(sd.a, k as i64 * degs.iter().sum::<i64>());
            }
        }
    }

    #[test]
    fn dual_maps_are_chain_maps() {
        let r = GradedPolynomialRing::with_degrees(&[2, 6]).unwrap();
        let f = dual_map(&r, 2);
        let checked = ChainMap::new(f.source().clone(), f.target().clone(), f.components().clone());
        assert!(checked.is_ok());
        let _ = dual_augmentation(&r, 3);
    }
}
