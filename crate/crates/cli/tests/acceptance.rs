//! End-to-end acceptance criteria. Each criterion prints one line; the
//! process exits nonzero if any fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cofree::catalog::{self, LoopSpaceEntry, WeylTable};
use cofree::duality::{check_adjunction, gamma, gamma_torsion_certificate, localization_rank_one, roundtrip_report, Input};
use cofree::koszul::koszul;
use cofree::module::is_torsion;
use cofree::resolution::{adams_e2, ext, minimal_resolution};
use cofree::{
    DegreeWindow, FreeComplex, GradedModulePresentation, GradedPolynomialRing, Polynomial, Rational, WindowedHomology,
};

type Outcome = Result<String, String>;
type Battery = Vec<(String, GradedModulePresentation)>;
type Criterion = (&'static str, fn() -> Outcome);

fn window(lo: i64, hi: i64) -> DegreeWindow {
    DegreeWindow::new(lo, hi).unwrap()
}

fn ring(gens: &[(&str, i64)]) -> GradedPolynomialRing {
    GradedPolynomialRing::new(gens.to_vec()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn entries_up_to(rank: usize) -> Vec<LoopSpaceEntry> {
    catalog::entries().into_iter().filter(|e| e.rank() <= rank).collect()
}

fn koszul_acyclicity() -> Outcome {
    let start = Instant::now();
    let w = window(-40, 40);
    let mut cells = 0;
    let entries = entries_up_to(3);
    for e in &entries {
        let ring = catalog::classifying_ring(e);
        let k = koszul(&ring, 1).complex;
        let h = k.homology(w);
        let (lo, hi) = k.s_range().unwrap();
        for s in lo - 1..=hi + 1 {
            for t in w.degrees() {
                let oracle = k.dim(s, t) - k.d_at(s, t).rank() - k.d_at(s + 1, t).rank();
                let expected = usize::from((s, t) == (0, 0));
                ensure(h.is_trusted(s, t) && h.dim(s, t) == expected && oracle == expected, || {
                    format!("{}: H at ({s},{t}) is {} (oracle {oracle})", e.name, h.dim(s, t))
                })?;
                cells += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("{} rings, {cells} cells, {:.2}s", entries.len(), elapsed.as_secs_f64()))
}

fn local_cohomology_rank_one() -> Outcome {
    let r = ring(&[("c", 2)]);
    let unit = FreeComplex::unit(&r);
    let w = window(-60, 60);
    let g = gamma(&unit, w, 32).map_err(|e| e.to_string())?;
    ensure(g.homology.untrusted().is_empty(), || "untrusted cells present".into())?;
    for t in w.degrees() {
        let expected = usize::from(t <= -2 && t % 2 == 0);
        let oracle = localization_rank_one(&unit, 0, t) - r.dim(t);
        ensure(g.homology.dim(0, t) == 0, || format!("H^0 nonzero at t={t}"))?;
        ensure(g.homology.dim(-1, t) == expected && oracle == expected, || {
            format!("H^1 at t={t}: {} (oracle {oracle})", g.homology.dim(-1, t))
        })?;
    }
    let total: usize = g.homology.nonzero().map(|(_, d)| d).sum();
    ensure(total == 30, || format!("{total} classes, expected 30"))?;
    Ok("H^1 = Q in each t = -2..-60, H^0 = 0".into())
}

fn local_cohomology_rank_two() -> Outcome {
    let r = ring(&[("x", 2), ("y", 2)]);
    let unit = FreeComplex::unit(&r);
    let w = window(-30, 10);
    let g = gamma(&unit, w, 16).map_err(|e| e.to_string())?;
    for ((s, t), d) in g.homology.nonzero() {
        ensure(s == -2, || format!("H^{} nonzero at t={t} (dim {d})", -s))?;
    }
    for m in 2..=15i64 {
        let t = -2 * m;
        let oracle = (1..m).filter(|a| m - a >= 1).count();
        ensure(g.homology.is_trusted(-2, t), || format!("t={t} untrusted"))?;
        ensure(g.homology.dim(-2, t) == oracle && oracle == (m - 1) as usize, || {
            format!("H^2 at t={t}: {} (oracle {oracle})", g.homology.dim(-2, t))
        })?;
    }
    Ok(format!("H^2_(-2m) = m-1 for m = 2..15; {} untrusted cells elsewhere", g.homology.untrusted().len()))
}

fn hilbert_table(r: &GradedPolynomialRing, w: DegreeWindow, s_min: i64, s_max: i64) -> WindowedHomology {
    let mut h = WindowedHomology::new(w, s_min, s_max);
    for t in w.degrees() {
        h.set(0, t, r.dim(t));
    }
    h
}

fn trusted_count(h: &WindowedHomology) -> usize {
    let cells = (h.s_max - h.s_min + 1) as usize * h.window.len();
    cells - h.untrusted().len()
}

fn roundtrip() -> Outcome {
    let w = window(-24, 24);
    let mut compared = 0;
    for e in entries_up_to(2) {
        let r = catalog::classifying_ring(&e);
        let unit = FreeComplex::unit(&r);
        let rt = roundtrip_report(&unit, w, 24).map_err(|e| e.to_string())?;
        let table = hilbert_table(&r, w, rt.lambda_gamma.s_min, rt.lambda_gamma.s_max);
        let bad = rt.lambda_gamma.disagreements(&table);
        ensure(bad.is_empty(), || format!("{}: H(ΛΓA) differs from A at {bad:?}", e.name))?;
        let bad = rt.gamma_lambda.disagreements(&rt.gamma);
        ensure(bad.is_empty(), || format!("{}: H(ΓΛA) differs from H(ΓA) at {bad:?}", e.name))?;
        for t in 0..=24 {
            ensure(rt.lambda_gamma.is_trusted(0, t), || format!("{}: ΛΓA untrusted at t={t}", e.name))?;
        }
        let k = koszul(&r, 1).complex;
        let rk = roundtrip_report(&k, w, 24).map_err(|e| e.to_string())?;
        let bad = rk.gamma_lambda.disagreements(&rk.gamma);
        ensure(bad.is_empty(), || format!("{}: H(ΓΛK) differs from H(ΓK) at {bad:?}", e.name))?;
        compared += trusted_count(&rt.lambda_gamma) + trusted_count(&rt.gamma_lambda) + trusted_count(&rk.gamma_lambda);
    }
    Ok(format!("{compared} trusted cells over {} rings", entries_up_to(2).len()))
}

fn adjunction() -> Outcome {
    let w = window(-20, 20);
    let mut compared = 0;
    let mut pairs = 0;
    for e in entries_up_to(2).into_iter().filter(|e| e.rank() >= 1) {
        let r = catalog::classifying_ring(&e);
        let unit = FreeComplex::unit(&r);
        let k = koszul(&r, 1).complex;
        let xs = [("unit", &unit), ("K", &k)];
        let s4 = unit.shift(0, 4);
        let ys = [("unit", &unit), ("K", &k), ("S4unit", &s4)];
        for (xn, x) in xs {
            for (yn, y) in ys {
                let rep = check_adjunction(x, y, w, 16).map_err(|e| e.to_string())?;
                ensure(rep.agree, || format!("{} x={xn} y={yn}: {:?}", e.name, rep.disagreements))?;
                let both = trusted_count(&rep.left.homology).min(trusted_count(&rep.right.homology));
                ensure(both > 0, || format!("{} x={xn} y={yn}: nothing trusted", e.name))?;
                compared += both;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs agree, at least {compared} trusted cells"))
}

fn random_poly(r: &GradedPolynomialRing, t: i64, rng: &mut ChaCha8Rng) -> Polynomial {
    let terms = r
        .monomial_basis(t)
        .into_iter()
        .map(|m| (m, Rational::from(rng.gen_range(-2i64..=2))))
        .collect();
    Polynomial::from_terms(terms)
}

fn random_module(r: &GradedPolynomialRing, rng: &mut ChaCha8Rng) -> GradedModulePresentation {
    let dmin = r.degrees().into_iter().min().unwrap();
    let gens: Vec<i64> = (0..rng.gen_range(1..=2)).map(|_| dmin * rng.gen_range(0..=1)).collect();
    let mut rels = Vec::new();
    if rng.gen_bool(0.5) {
        for j in 0..gens.len() {
            for i in 0..r.rank() {
                let mut col = vec![Polynomial::zero(); gens.len()];
                col[j] = r.var(i).pow(rng.gen_range(1..=3), r.rank());
                rels.push(col);
            }
        }
    }
    for _ in 0..rng.gen_range(1..=3) {
        let top = gens.iter().max().unwrap() + r.degree(rng.gen_range(0..r.rank())) * rng.gen_range(1..=2);
        rels.push(gens.iter().map(|g| random_poly(r, top - g, rng)).collect());
    }
    GradedModulePresentation::new(r.clone(), gens, rels).unwrap()
}

fn torsion_characterization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut torsion = 0;
    let mut total = 0;
    let mut classes = 0;
    let w = window(-20, 20);
    for name in ["S1", "SU(2)", "T2", "SU(3)"] {
        let r = catalog::classifying_ring(&catalog::entry(name).unwrap());
        for i in 0..20 {
            let m = random_module(&r, &mut rng);
            let cert = is_torsion(&m).map_err(|e| e.to_string())?;
            let finite = m.hilbert_function(window(60, 90)).iter().all(|(_, d)| *d == 0);
            ensure(cert.torsion == finite, || format!("{name} module {i}: is_torsion {} but finite support {finite}", cert.torsion))?;
            torsion += usize::from(finite);
            let c = Input::from(&m).complex(w).map_err(|e| e.to_string())?;
            let g = gamma(&c, w, 8).map_err(|e| e.to_string())?;
            let tc = gamma_torsion_certificate(&c, &g);
            ensure(tc.all_certified, || format!("{name} module {i}: uncertified Γ class"))?;
            classes += tc.exponents.len();
            total += 1;
        }
    }
    Ok(format!("{total} modules ({torsion} torsion), {classes} Γ classes certified"))
}

fn battery(r: &GradedPolynomialRing) -> Battery {
    let q = GradedModulePresentation::residue_field(r);
    let a = GradedModulePresentation::free(r, vec![0]);
    let mut out = vec![
        ("A".to_string(), a.clone()),
        ("Q".to_string(), q.clone()),
        ("S2Q".to_string(), q.shift(2)),
        ("S4A".to_string(), a.shift(4)),
        ("A+S2A".to_string(), GradedModulePresentation::free(r, vec![0, 2])),
        ("S6Q".to_string(), q.shift(6)),
    ];
    if r.rank() >= 1 {
        let last = r.rank() - 1;
        let y1 = r.var(0);
        let yr = r.var(last);
        let cyc = |p: Vec<Polynomial>| GradedModulePresentation::cyclic(r, &p).unwrap();
        out.push(("A/y1".into(), cyc(vec![y1.clone()])));
        out.push(("A/y1^2".into(), cyc(vec![y1.pow(2, r.rank())])));
        out.push(("A/yr^3".into(), cyc(vec![yr.pow(3, r.rank())])));
        out.push(("A/y1yr".into(), cyc(vec![y1.mul(&yr)])));
    }
    out
}

fn vanishing_line() -> Outcome {
    let w = window(-30, 30);
    let mut pairs = 0;
    for e in entries_up_to(3) {
        let r = catalog::classifying_ring(&e);
        let rank = r.rank() as i64;
        let ms = battery(&r);
        let ns: Vec<_> = ms.iter().filter(|(n, _)| ["Q", "A", "A/y1"].contains(&n.as_str())).cloned().collect();
        let mut local = 0;
        for (mn, m) in &ms {
            let len = minimal_resolution(m, w).map_err(|e| e.to_string())?.length();
            ensure(len as i64 <= rank, || format!("{}: resolution of {mn} has length {len}", e.name))?;
            for (nn, n) in &ns {
                let page = adams_e2(m, n, w).map_err(|e| e.to_string())?;
                for ((s, t), d) in page.table.nonzero() {
                    ensure(s <= rank, || format!("{}: E2({mn},{nn}) has {d} at ({s},{t})", e.name))?;
                }
                local += 1;
            }
        }
        ensure(local >= 10, || format!("{}: only {local} pairs", e.name))?;
        pairs += local;
    }
    Ok(format!("{pairs} module pairs over {} entries", entries_up_to(3).len()))
}

/// `Ext^{s,t}(Q, Q)` read off `Hom(K, Q)`, whose differential vanishes.
fn koszul_ext_oracle(r: &GradedPolynomialRing, w: DegreeWindow) -> BTreeMap<(i64, i64), usize> {
    let k = koszul(r, 1).complex;
    let mut out = BTreeMap::new();
    for (s, shifts) in k.terms() {
        for b in shifts.iter().filter(|b| w.contains(**b)) {
            *out.entry((*s, *b)).or_insert(0) += 1;
        }
    }
    out
}

fn e2_values() -> Outcome {
    let w = window(-10, 20);
    let cases = vec![
        (ring(&[("c", 2)]), vec![((0, 0), 1), ((1, 2), 1)]),
        (ring(&[("y", 4)]), vec![((0, 0), 1), ((1, 4), 1)]),
        (ring(&[("x", 2), ("y", 2)]), vec![((0, 0), 1), ((1, 2), 2), ((2, 4), 1)]),
    ];
    for (r, expected) in cases {
        let q = GradedModulePresentation::residue_field(&r);
        let table = ext(&q, &q, w).map_err(|e| e.to_string())?;
        let got: Vec<_> = table.nonzero().collect();
        let oracle: Vec<_> = koszul_ext_oracle(&r, w).into_iter().collect();
        ensure(got == expected && oracle == expected, || format!("over {r:?}: {got:?}, oracle {oracle:?}"))?;
    }
    Ok("Q[c], Q[y], Q[x,y] match the Koszul oracle".into())
}

fn oracle_agreement() -> Outcome {
    let r = ring(&[("y", 4)]);
    let q = GradedModulePresentation::residue_field(&r);
    let page = adams_e2(&q, &q, window(-20, 21)).map_err(|e| e.to_string())?;
    ensure(page.collapse.is_some(), || "collapse not certified".into())?;
    let k = koszul(&r, 1).complex;
    let hom = k.hom(&k).map_err(|e| e.to_string())?;
    let (lo, hi) = hom.s_range().unwrap();
    for d in -20..=20 {
        let oracle: usize = (lo..=hi).map(|h| hom.homology_dim(h, h - d)).sum();
        let total = page.total(d);
        ensure(total == Some(oracle), || format!("d={d}: E2 total {total:?}, oracle {oracle}"))?;
    }
    Ok("41 total degrees agree".into())
}

fn catalog_consistency() -> Outcome {
    let su3 = catalog::entry("SU(3)").map_err(|e| e.to_string())?;
    let lc = catalog::loop_cohomology(&su3);
    let nonzero: Vec<(usize, u64)> = lc.hilbert.iter().copied().enumerate().filter(|(_, d)| *d > 0).collect();
    ensure(lc.dimension == 8 && lc.palindromic, || format!("SU(3): {lc:?}"))?;
    ensure(nonzero == vec![(0, 1), (3, 1), (5, 1), (8, 1)], || format!("SU(3) Hilbert {nonzero:?}"))?;
    for e in catalog::entries() {
        let expected: u64 = e.degrees.iter().map(|d| 2 * *d as u64 - 1).sum();
        ensure(e.dimension() == expected && catalog::loop_cohomology(&e).poincare_duality_holds(), || format!("{e}"))?;
    }
    let table = WeylTable::default();
    for e in catalog::entries() {
        let trivial = catalog::weyl_model(&e.name, "e", &table).map_err(|e| e.to_string())?;
        let whole = catalog::weyl_model(&e.name, &e.name, &table).map_err(|e| e.to_string())?;
        ensure(trivial == e && whole.rank() == 0, || format!("weyl_model extremes for {}", e.name))?;
    }
    Ok(format!("{} entries consistent", catalog::entries().len()))
}

fn run_verify(extra: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cofree"))
        .arg("verify")
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn determinism_and_mutation() -> Outcome {
    let (c1, a) = run_verify(&[])?;
    let (c2, b) = run_verify(&[])?;
    ensure(c1 == 0 && c2 == 0, || format!("verify exit codes {c1}, {c2}"))?;
    ensure(a == b, || "verify output differs between runs".into())?;
    let (c3, _) = run_verify(&["--mutate-sign"])?;
    ensure(c3 == 1, || format!("mutated verify exited {c3}"))?;
    Ok(format!("{} identical bytes; mutation exits 1", a.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("koszul acyclicity", koszul_acyclicity),
        ("local cohomology, rank 1", local_cohomology_rank_one),
        ("local cohomology, rank 2", local_cohomology_rank_two),
        ("torsion-complete round trip", roundtrip),
        ("local duality adjunction", adjunction),
        ("torsion characterization", torsion_characterization),
        ("E2 vanishing line", vanishing_line),
        ("E2 values", e2_values),
        ("spectral sequence vs oracle", oracle_agreement),
        ("catalog consistency", catalog_consistency),
        ("determinism and mutation", determinism_and_mutation),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
