//! Connected compact Lie groups and finite loop spaces by degree data.
//!
//! An entry with degrees `d_1 ≤ ... ≤ d_r` has `H*(BX) = Q[y_1, ..., y_r]`
//! with `|y_i| = 2 d_i` and `H*(X) = Λ(x_1, ..., x_r)` with
//! `|x_i| = 2 d_i - 1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::ring::GradedPolynomialRing;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopSpaceEntry {
    pub name: String,
    /// Sorted ascending, each at least 1.
    pub degrees: Vec<u32>,
}

impl LoopSpaceEntry {
    pub fn new(name: impl Into<String>, mut degrees: Vec<u32>) -> Result<Self, Error> {
        if degrees.contains(&0) {
            return Err(Error::InvalidRing("loop space degrees must be at least 1".into()));
        }
        degrees.sort_unstable();
        Ok(LoopSpaceEntry { name: name.into(), degrees })
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// `Σ (2 d_i - 1)`.
    pub fn dimension(&self) -> u64 {
        self.degrees.iter().map(|d| 2 * *d as u64 - 1).sum()
    }

    /// The rank-zero entry (the trivial group).
    pub fn point() -> Self {
        LoopSpaceEntry { name: "e".into(), degrees: Vec::new() }
    }
}

impl fmt::Display for LoopSpaceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.degrees.iter().map(u32::to_string).collect();
        write!(f, "{} (degrees {}; rank {}; dim {})", self.name, d.join(","), self.rank(), self.dimension())
    }
}

/// The built-in entries.
pub fn entries() -> Vec<LoopSpaceEntry> {
    let mut out = vec![LoopSpaceEntry::point(), named("S1", vec![1])];
    for n in 2..=4 {
        out.push(named(&format!("T{n}"), vec![1; n]));
    }
    for n in 2..=5u32 {
        out.push(named(&format!("SU({n})"), (2..=n).collect()));
    }
    for n in 1..=3u32 {
        out.push(named(&format!("Sp({n})"), (1..=n).map(|i| 2 * i).collect()));
    }
    out.push(named("G2", vec![2, 6]));
    out
}

fn named(name: &str, degrees: Vec<u32>) -> LoopSpaceEntry {
    LoopSpaceEntry::new(name, degrees).expect("built-in degrees are positive")
}

/// Looks up a name; `A*B` denotes a product of entries and a bare list
/// such as `1,3` gives an entry with those degrees.
pub fn entry(name: &str) -> Result<LoopSpaceEntry, Error> {
    let name = name.trim();
    if !name.is_empty() && name.chars().all(|c| c.is_ascii_digit() || c == ',' || c == ' ') {
        let degrees = name
            .split(',')
            .map(|d| d.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| Error::UnknownEntry(name.to_string()))?;
        return LoopSpaceEntry::new(format!("[{name}]"), degrees);
    }
    if name.contains('*') {
        let mut parts = name.split('*');
        let first = entry(parts.next().unwrap_or(""))?;
        return parts.try_fold(first, |acc, p| Ok(entry_product(&acc, &entry(p)?)));
    }
    entries()
        .into_iter()
        .find(|e| e.name == name || (name == "{e}" && e.name == "e"))
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

/// Product: degree lists concatenate.
pub fn entry_product(a: &LoopSpaceEntry, b: &LoopSpaceEntry) -> LoopSpaceEntry {
    let mut degrees = a.degrees.clone();
    degrees.extend_from_slice(&b.degrees);
    LoopSpaceEntry::new(format!("{}*{}", a.name, b.name), degrees).expect("entries have positive degrees")
}

/// `H*(BX) = Q[y_1..y_r]`, `|y_i| = 2 d_i`.
pub fn classifying_ring(e: &LoopSpaceEntry) -> GradedPolynomialRing {
    let degs: Vec<i64> = e.degrees.iter().map(|d| 2 * *d as i64).collect();
    GradedPolynomialRing::with_degrees(&degs).expect("even positive degrees")
}

/// Exterior degrees and the Poincaré duality check for `H*(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopCohomology {
    pub exterior_degrees: Vec<u64>,
    /// `dim H^i(X)` for `i = 0..=dim`.
    pub hilbert: Vec<u64>,
    pub dimension: u64,
    pub palindromic: bool,
    pub top_degree: u64,
    pub total: u64,
}

impl LoopCohomology {
    /// Palindromic, top class in degree `dim`, total dimension `2^r`.
    pub fn poincare_duality_holds(&self) -> bool {
        self.palindromic
            && self.top_degree == self.dimension
            && self.total == 1u64 << self.exterior_degrees.len()
    }
}

pub fn loop_cohomology(e: &LoopSpaceEntry) -> LoopCohomology {
    let exterior_degrees: Vec<u64> = e.degrees.iter().map(|d| 2 * *d as u64 - 1).collect();
    let dimension = e.dimension();
    let mut hilbert = vec![0u64; dimension as usize + 1];
    hilbert[0] = 1;
    for x in &exterior_degrees {
        for i in (*x as usize..hilbert.len()).rev() {
            hilbert[i] += hilbert[i - *x as usize];
        }
    }
    let palindromic = hilbert.iter().eq(hilbert.iter().rev());
    let top_degree = hilbert.iter().rposition(|c| *c != 0).unwrap_or(0) as u64;
    let total = hilbert.iter().sum();
    LoopCohomology { exterior_degrees, hilbert, dimension, palindromic, top_degree, total }
}

/// User-supplied `(G, K) ↦ W_G K` entries.
#[derive(Clone, Debug, Default)]
pub struct WeylTable {
    pairs: BTreeMap<(String, String), LoopSpaceEntry>,
}

impl WeylTable {
    pub fn insert(&mut self, group: &str, subgroup: &str, weyl: LoopSpaceEntry) {
        self.pairs.insert((group.to_string(), subgroup.to_string()), weyl);
    }
}

fn is_trivial_subgroup(k: &str) -> bool {
    matches!(k.trim(), "e" | "{e}" | "1" | "trivial")
}

/// The entry whose classifying ring models `G`-spectra at `K`: `G` itself
/// for the trivial subgroup, the point for `K = G`, otherwise a stored pair.
pub fn weyl_model(group: &str, subgroup: &str, table: &WeylTable) -> Result<LoopSpaceEntry, Error> {
    let g = entry(group)?;
    if is_trivial_subgroup(subgroup) {
        return Ok(g);
    }
    if subgroup.trim() == g.name {
        return Ok(LoopSpaceEntry::point());
    }
    table
        .pairs
        .get(&(group.trim().to_string(), subgroup.trim().to_string()))
        .cloned()
        .ok_or_else(|| Error::UnsupportedPair { group: group.to_string(), subgroup: subgroup.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rings_from_entries() {
        let s1 = classifying_ring(&entry("S1").unwrap());
        assert_eq!(s1.degrees(), vec![2]);
        let su2 = classifying_ring(&entry("SU(2)").unwrap());
        assert_eq!(su2.degrees(), vec![4]);
        let t2 = classifying_ring(&entry("T2").unwrap());
        assert_eq!(t2.degrees(), vec![2, 2]);
        assert_eq!(classifying_ring(&entry("S1*S1").unwrap()).degrees(), vec![2, 2]);
    }

    #[test]
    fn exterior_algebras() {
        let c = loop_cohomology(&entry("SU(2)").unwrap());
        assert_eq!(c.exterior_degrees, vec![3]);
        assert_eq!(c.hilbert, vec![1, 0, 0, 1]);
        let c = loop_cohomology(&entry("SU(3)").unwrap());
        assert_eq!(c.dimension, 8);
        let nonzero: Vec<usize> = (0..c.hilbert.len()).filter(|i| c.hilbert[*i] > 0).collect();
        assert_eq!(nonzero, vec![0, 3, 5, 8]);
        assert!(c.poincare_duality_holds());
        let c = loop_cohomology(&LoopSpaceEntry::point());
        assert_eq!((c.dimension, c.hilbert.clone()), (0, vec![1]));
        assert!(c.poincare_duality_holds());
    }

    #[test]
    fn every_entry_is_consistent() {
        for e in entries() {
            let c = loop_cohomology(&e);
            assert!(c.poincare_duality_holds(), "{e}");
            assert_eq!(c.dimension, e.degrees.iter().map(|d| 2 * *d as u64 - 1).sum::<u64>());
        }
        assert_eq!(entry("G2").unwrap().dimension(), 14);
        assert_eq!(entry("SU(5)").unwrap().dimension(), 24);
        assert_eq!(entry("Sp(3)").unwrap().dimension(), 21);
    }

    #[test]
    fn weyl_extremes() {
        let table = WeylTable::default();
        assert_eq!(weyl_model("SU(2)", "e", &table).unwrap(), entry("SU(2)").unwrap());
        assert_eq!(weyl_model("T2", "{e}", &table).unwrap().name, "T2");
        assert_eq!(weyl_model("G2", "G2", &table).unwrap().rank(), 0);
        assert!(matches!(weyl_model("SU(3)", "T2", &table), Err(Error::UnsupportedPair { .. })));
        let mut table = WeylTable::default();
        table.insert("SU(3)", "T2", LoopSpaceEntry::point());
        assert_eq!(weyl_model("SU(3)", "T2", &table).unwrap().rank(), 0);
        assert!(matches!(entry("SU(9)"), Err(Error::UnknownEntry(_))));
        assert_eq!(entry("3,1").unwrap().degrees, vec![1, 3]);
        assert!(entry("1,,2").is_err());
        assert!(entry("0").is_err());
    }
}
