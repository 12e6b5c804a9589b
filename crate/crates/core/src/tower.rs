//! Degreewise evaluation of Koszul towers with stabilization certificates.
//!
//! A [`Layer`] is one of the two towers built from the Koszul complexes:
//! the colimit `D_1 → D_2 → ...` of duals (torsion side) or the limit
//! `... → K_2 → K_1` (completion side). Evaluating layers on a bounded free
//! complex `m` means tensoring the stage complexes onto `m` and reading off
//! homology at a stage where the tower has stopped changing.
//!
//! Stage choice at a bidegree `(s, t)`:
//!
//! * A floor `k_0(t)` is computed from the internal shifts of the complex
//!   being tensored. For a single layer it is a proof: in `D_k ⊗ m` the
//!   degree-`t` piece only sees `H_{-n}(D_k)` in degrees `t - b` for shifts
//!   `b` of `m`, and those pieces are final once `k ≥ k_0`. Dually for
//!   `K_k ⊗ m`, which only sees `A/(y^k)` in degrees `t - b`.
//! * From the floor upward, the first stage `k` where `H(C_k)`, `H(C_{k+1})`
//!   and the rank of the transition agree is the certified stage.
//!
//! For two layers the inner one is always evaluated at its proven floor and
//! the outer one follows the rule above, starting from the floor its layer
//! would have on `m` alone.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{homology_map_rank, ChainMap, DegreeWindow, FreeComplex, WindowedHomology};
use crate::koszul;
use crate::ring::GradedPolynomialRing;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Layer {
    /// `colim_k D_k ⊗ -`.
    Gamma,
    /// `lim_k K_k ⊗ -`.
    Lambda,
}

impl Layer {
    pub fn stage(self, ring: &GradedPolynomialRing, k: u32) -> FreeComplex {
        match self {
            Layer::Gamma => koszul::dual(ring, k),
            Layer::Lambda => koszul::koszul(ring, k).complex,
        }
    }

    /// Between stages `k` and `k + 1`, in the direction of the tower.
    pub fn transition(self, ring: &GradedPolynomialRing, k: u32) -> ChainMap {
        match self {
            Layer::Gamma => koszul::dual_map(ring, k),
            Layer::Lambda => koszul::tower_map(ring, k),
        }
    }

    /// Least `k` with the layer final in internal degree `u` of a free
    /// summand `A`.
    pub fn degree_bound(self, ring: &GradedPolynomialRing, u: i64) -> u32 {
        let degs = ring.degrees();
        if degs.is_empty() {
            return 1;
        }
        let k = match self {
            Layer::Gamma => {
                // H_{-n}(D_k) has basis y^{-β}, 1 ≤ β_i ≤ k, in degree -Σ β_i |y_i|
                let total: i64 = degs.iter().sum();
                let need = -u;
                if need < total {
                    1
                } else {
                    degs.iter().map(|d| (need - total + d) / d).max().unwrap()
                }
            }
            Layer::Lambda => {
                // A/(y^k) agrees with A in degree u once k exceeds every exponent
                let d = *degs.iter().min().unwrap();
                if u < 0 {
                    1
                } else {
                    u / d + 1
                }
            }
        };
        k.max(1) as u32
    }

    /// Floor for `layer ⊗ c` in internal degree `t`.
    pub fn bound(self, c: &FreeComplex, t: i64) -> u32 {
        c.terms()
            .values()
            .flatten()
            .map(|b| self.degree_bound(c.ring(), t - b))
            .max()
            .unwrap_or(1)
    }

    pub fn name(self) -> &'static str {
        match self {
            Layer::Gamma => "gamma",
            Layer::Lambda => "lambda",
        }
    }
}

/// Direction of a tower's transition maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `C_k → C_{k+1}`.
    Colimit,
    /// `C_{k+1} → C_k`.
    Limit,
}

impl Layer {
    pub fn direction(self) -> Direction {
        match self {
            Layer::Gamma => Direction::Colimit,
            Layer::Lambda => Direction::Limit,
        }
    }
}

/// A tower of bounded free complexes, possibly with an inner tower already
/// evaluated at a sufficient stage.
pub trait Tower: Sync {
    fn ring(&self) -> &GradedPolynomialRing;
    fn direction(&self) -> Direction;
    /// Homological range covering every stage.
    fn s_range(&self) -> Option<(i64, i64)>;
    /// First stage worth testing at internal degree `t`.
    fn floor(&self, t: i64) -> u32;
    /// The transition between stages `k` and `k + 1` suitable for degree
    /// `t`, with the stages used (outer first). `None` when an inner stage
    /// would exceed `cap`.
    fn transition(&self, k: u32, t: i64, cap: u32) -> Option<(Arc<ChainMap>, Vec<u32>)>;
}

/// Homology of a tower with per-degree stage certificates.
#[derive(Clone, Debug, Serialize)]
pub struct TowerEvaluation {
    pub direction: Direction,
    pub homology: WindowedHomology,
    /// Certified stage per trusted bidegree, outer layer first.
    pub stages: BTreeMap<(i64, i64), Vec<u32>>,
    /// Tower homology dimensions for `k = 1..=k_max` at untrusted
    /// bidegrees (stages that could not be built are omitted).
    pub raw: BTreeMap<(i64, i64), Vec<usize>>,
    /// `lim¹` of the tower at each trusted bidegree for limit towers.
    /// Certified stabilization makes every entry zero.
    pub lim1: Option<BTreeMap<(i64, i64), usize>>,
    pub k_max: u32,
}

type Slot = Arc<OnceLock<Arc<ChainMap>>>;

/// Thread-safe memo of chain maps keyed by stage indices.
#[derive(Default)]
pub struct MapCache {
    slots: Mutex<HashMap<Vec<u32>, Slot>>,
}

impl MapCache {
    pub fn get(&self, key: Vec<u32>, build: impl FnOnce() -> ChainMap) -> Arc<ChainMap> {
        let slot = self.slots.lock().unwrap().entry(key).or_default().clone();
        slot.get_or_init(|| Arc::new(build())).clone()
    }
}

/// `(lower, upper)` stage complexes of a transition.
fn ends(f: &ChainMap, dir: Direction) -> (&FreeComplex, &FreeComplex) {
    match dir {
        Direction::Colimit => (f.source(), f.target()),
        Direction::Limit => (f.target(), f.source()),
    }
}

enum Cell {
    Trusted { dim: usize, stages: Vec<u32> },
    Untrusted { raw: Vec<usize> },
}

fn evaluate_cell(tower: &dyn Tower, s: i64, t: i64, k_max: u32) -> Cell {
    let dir = tower.direction();
    let mut k = tower.floor(t).max(1);
    while k < k_max {
        let Some((f, stages)) = tower.transition(k, t, k_max) else { break };
        let (lo, hi) = ends(&f, dir);
        let a = lo.homology_dim(s, t);
        let b = hi.homology_dim(s, t);
        if a == b && homology_map_rank(&f, s, t) == a {
            return Cell::Trusted { dim: a, stages };
        }
        k += 1;
    }
    let mut raw = Vec::new();
    for k in 1..k_max {
        let Some((f, _)) = tower.transition(k, t, k_max) else { break };
        let (lo, hi) = ends(&f, dir);
        raw.push(lo.homology_dim(s, t));
        if k + 1 == k_max {
            raw.push(hi.homology_dim(s, t));
        }
    }
    Cell::Untrusted { raw }
}

/// Evaluates a tower over the window.
pub fn evaluate_tower(tower: &dyn Tower, w: DegreeWindow, k_max: u32) -> TowerEvaluation {
    assert!(k_max >= 1, "k_max must be positive");
    let dir = tower.direction();
    let Some((s_min, s_max)) = tower.s_range() else {
        let mut homology = WindowedHomology::new(w, 0, 0);
        let stages = w.degrees().map(|t| ((0, t), vec![1])).collect::<BTreeMap<_, _>>();
        for t in w.degrees() {
            homology.set(0, t, 0);
        }
        let lim1 = (dir == Direction::Limit).then(|| stages.keys().map(|k| (*k, 0)).collect());
        return TowerEvaluation { direction: dir, homology, stages, raw: BTreeMap::new(), lim1, k_max };
    };
    let cells: Vec<(i64, i64)> = (s_min..=s_max)
        .flat_map(|s| w.degrees().map(move |t| (s, t)))
        .collect();
    let results: Vec<((i64, i64), Cell)> = cells
        .par_iter()
        .map(|&(s, t)| ((s, t), evaluate_cell(tower, s, t, k_max)))
        .collect();
    let mut homology = WindowedHomology::new(w, s_min, s_max);
    let mut stages = BTreeMap::new();
    let mut raw = BTreeMap::new();
    for ((s, t), cell) in results {
        match cell {
            Cell::Trusted { dim, stages: st } => {
                homology.set(s, t, dim);
                stages.insert((s, t), st);
            }
            Cell::Untrusted { raw: r } => {
                homology.mark_untrusted(s, t);
                raw.insert((s, t), r);
            }
        }
    }
    let lim1 = if dir == Direction::Limit {
        // H_s(lim) also needs lim¹ of H_{s+1}
        let untrusted: Vec<(i64, i64)> = homology.untrusted().iter().copied().collect();
        for (s, t) in untrusted {
            if s > s_min && homology.is_trusted(s - 1, t) {
                homology.mark_untrusted(s - 1, t);
                stages.remove(&(s - 1, t));
            }
        }
        Some(stages.keys().map(|k| (*k, 0)).collect())
    } else {
        None
    };
    TowerEvaluation { direction: dir, homology, stages, raw, lim1, k_max }
}

/// One or two layers (outer first) applied to a bounded free complex.
pub struct Layered<'a> {
    layers: Vec<Layer>,
    m: &'a FreeComplex,
    cache: MapCache,
}

impl<'a> Layered<'a> {
    pub fn new(layers: &[Layer], m: &'a FreeComplex) -> Self {
        assert!(matches!(layers.len(), 1 | 2), "one or two layers");
        Layered { layers: layers.to_vec(), m, cache: MapCache::default() }
    }

    /// `T_inner ⊗ m` (just `m` for one layer).
    fn rest(&self, inner: u32) -> FreeComplex {
        match self.layers.get(1) {
            Some(l) => l.stage(self.m.ring(), inner).tensor(self.m).expect("same ring"),
            None => self.m.clone(),
        }
    }

    fn inner_stage(&self, outer: u32, t: i64) -> Option<u32> {
        let inner = self.layers.get(1)?;
        let ring = self.m.ring();
        [outer, outer + 1]
            .iter()
            .map(|j| {
                let c = self.layers[0].stage(ring, *j).tensor(self.m).expect("same ring");
                inner.bound(&c, t)
            })
            .max()
    }
}

impl Tower for Layered<'_> {
    fn ring(&self) -> &GradedPolynomialRing {
        self.m.ring()
    }

    fn direction(&self) -> Direction {
        self.layers[0].direction()
    }

    fn s_range(&self) -> Option<(i64, i64)> {
        let (lo, hi) = self.m.s_range()?;
        let n = self.m.ring().rank() as i64;
        let count = |l: Layer| self.layers.iter().filter(|x| **x == l).count() as i64;
        Some((lo - count(Layer::Gamma) * n, hi + count(Layer::Lambda) * n))
    }

    fn floor(&self, t: i64) -> u32 {
        self.layers[0].bound(self.m, t)
    }

    fn transition(&self, k: u32, t: i64, cap: u32) -> Option<(Arc<ChainMap>, Vec<u32>)> {
        let inner = self.inner_stage(k, t);
        let mut stages = vec![k];
        if let Some(i) = inner {
            if i > cap {
                return None;
            }
            stages.push(i);
        }
        let key = stages.clone();
        let f = self.cache.get(key, || {
            let rest = self.rest(inner.unwrap_or(0));
            let f = self.layers[0].transition(self.m.ring(), k);
            f.tensor(&ChainMap::identity(&rest)).expect("same ring")
        });
        Some((f, stages))
    }
}

/// Evaluates one or two layers (outer first) on `m` over the window.
pub fn evaluate(layers: &[Layer], m: &FreeComplex, w: DegreeWindow, k_max: u32) -> TowerEvaluation {
    evaluate_tower(&Layered::new(layers, m), w, k_max)
}
