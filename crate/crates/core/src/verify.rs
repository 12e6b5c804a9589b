//! The invariant suite behind `cofree verify`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::catalog::{self, LoopSpaceEntry};
use crate::complex::{DegreeWindow, FreeComplex, WindowedHomology};
use crate::duality::{check_adjunction, gamma, gamma_torsion_certificate, localize_away, roundtrip_report};
use crate::koszul::koszul;
use crate::linalg::Rational;
use crate::module::GradedModulePresentation;
use crate::resolution::{abutment_oracle, adams_e2, minimal_resolution};
use crate::ring::GradedPolynomialRing;
use crate::Error;

/// Deliberate corruption used to confirm that the suite can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mutation {
    /// Negate one entry of `d_1` in the Koszul complex of the first ring
    /// of rank at least 2.
    FlipKoszulSign,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: String,
    pub scope: String,
    pub passed: bool,
    pub detail: String,
    /// Bidegrees skipped as untrusted.
    pub untrusted: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub window: DegreeWindow,
    pub k_max: u32,
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// One tab-separated line per check, then untrusted listings.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# window [{}, {}], k_max {}", self.window.t_min, self.window.t_max, self.k_max);
        for o in &self.outcomes {
            let verdict = if o.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{verdict}\t{}\t{}\t{}\tuntrusted={}", o.check, o.scope, o.detail, o.untrusted.len());
        }
        for o in self.outcomes.iter().filter(|o| !o.untrusted.is_empty()) {
            let cells: Vec<String> = o.untrusted.iter().map(|(s, t)| format!("{s}:{t}")).collect();
            let _ = writeln!(out, "untrusted\t{}\t{}\t{}", o.check, o.scope, cells.join(" "));
        }
        let _ = writeln!(out, "{}", if self.passed() { "all checks passed" } else { "some checks FAILED" });
        out
    }
}

/// The default scope: every built-in entry of rank at most 3.
pub fn default_scope() -> Vec<LoopSpaceEntry> {
    catalog::entries().into_iter().filter(|e| e.rank() <= 3).collect()
}

fn outcome(check: &str, scope: &str, passed: bool, detail: impl Into<String>, untrusted: Vec<(i64, i64)>) -> CheckOutcome {
    CheckOutcome { check: check.into(), scope: scope.into(), passed, detail: detail.into(), untrusted }
}

fn untrusted(h: &[&WindowedHomology]) -> Vec<(i64, i64)> {
    let set: BTreeSet<(i64, i64)> = h.iter().flat_map(|x| x.untrusted().iter().copied()).collect();
    set.into_iter().collect()
}

/// The Koszul complex of the ring, corrupted when asked.
fn koszul_for_check(ring: &GradedPolynomialRing, corrupt: bool) -> FreeComplex {
    let k = koszul(ring, 1).complex;
    if !corrupt {
        return k;
    }
    let mut diffs = k.differentials().clone();
    if let Some(d1) = diffs.get_mut(&1) {
        let mut entries = d1.entries().to_vec();
        if let Some(e) = entries.first_mut() {
            e.2 = e.2.scale(&Rational::from(-1));
        }
        *d1 = crate::complex::PolyMatrix::new(d1.rows(), d1.cols(), entries);
    }
    FreeComplex::new_unchecked(ring.clone(), k.terms().clone(), diffs).expect("same shapes")
}

fn koszul_acyclicity(ring: &GradedPolynomialRing, w: DegreeWindow, corrupt: bool) -> (bool, String) {
    let k = koszul_for_check(ring, corrupt);
    if let Err(e) = k.check_d_squared() {
        return (false, e.to_string());
    }
    let h = k.homology(w);
    let got: Vec<_> = h.nonzero().collect();
    let ok = got == vec![((0, 0), 1)];
    (ok, format!("nonzero homology {got:?}"))
}

/// Runs the suite over the given catalog entries.
pub fn verify_suite(
    scope: &[LoopSpaceEntry],
    w: DegreeWindow,
    k_max: u32,
    mutation: Option<Mutation>,
) -> Result<VerifyReport, Error> {
    let mut outcomes = Vec::new();
    let corrupt_index = match mutation {
        Some(Mutation::FlipKoszulSign) => scope.iter().position(|e| e.rank() >= 2),
        None => None,
    };
    for (idx, entry) in scope.iter().enumerate() {
        let ring = catalog::classifying_ring(entry);
        let name = entry.name.as_str();
        let r = ring.rank();

        let (ok, detail) = koszul_acyclicity(&ring, w, corrupt_index == Some(idx));
        outcomes.push(outcome("koszul-acyclicity", name, ok, detail, Vec::new()));

        let lc = catalog::loop_cohomology(entry);
        outcomes.push(outcome(
            "poincare-duality",
            name,
            lc.poincare_duality_holds(),
            format!("dim {} top {}", lc.dimension, lc.top_degree),
            Vec::new(),
        ));

        // E2 vanishing line and oracle agreement on (Q, Q) and (A, Q)
        let q = GradedModulePresentation::residue_field(&ring);
        let a = GradedModulePresentation::free(&ring, vec![0]);
        let res = minimal_resolution(&q, w)?;
        for (label, m) in [("Q,Q", &q), ("A,Q", &a)] {
            let page = adams_e2(m, &q, w)?;
            let len = minimal_resolution(m, w)?.length();
            outcomes.push(outcome(
                "vanishing-line",
                &format!("{name} ({label})"),
                page.vanishing.holds && len <= r,
                format!("max s {:?}, resolution length {len}, rank {r}", page.vanishing.max_nonzero_s),
                Vec::new(),
            ));
            if page.collapse.is_some() {
                let x = minimal_resolution(m, w)?.to_complex();
                let y = res.to_complex();
                let totals: Vec<i64> = w.degrees().filter(|d| page.total(*d).is_some()).collect();
                if let (Some(lo), Some(hi)) = (totals.first(), totals.last()) {
                    let oracle = abutment_oracle(&x, &y, DegreeWindow::new(*lo, *hi)?)?;
                    let bad: Vec<i64> = oracle
                        .iter()
                        .filter(|(d, v)| page.total(**d) != Some(**v))
                        .map(|(d, _)| *d)
                        .collect();
                    outcomes.push(outcome(
                        "oracle-agreement",
                        &format!("{name} ({label})"),
                        bad.is_empty(),
                        format!("totals d in [{lo}, {hi}], mismatches {bad:?}"),
                        Vec::new(),
                    ));
                }
            }
        }

        if r > 2 {
            continue;
        }
        let unit = FreeComplex::unit(&ring);
        let g = gamma(&unit, w, k_max)?;
        let cert = gamma_torsion_certificate(&unit, &g);
        outcomes.push(outcome(
            "gamma-torsion",
            name,
            cert.all_certified,
            format!("{} nonzero trusted classes certified", cert.exponents.len()),
            untrusted(&[&g.homology]),
        ));

        let l = localize_away(&unit, w, k_max)?;
        outcomes.push(outcome(
            "les-exactness",
            name,
            l.checks_pass(),
            l.checks.iter().map(|c| format!("{}={}", c.name, c.passed)).collect::<Vec<_>>().join("; "),
            untrusted(&[&l.homology]),
        ));

        let k = koszul(&ring, 1).complex;
        let xs = [("unit", unit.clone()), ("K", k.clone())];
        let ys = [("unit", unit.clone()), ("K", k.clone()), ("S4unit", unit.shift(0, 4))];
        for (xn, x) in &xs {
            for (yn, y) in &ys {
                let rep = check_adjunction(x, y, w, k_max)?;
                outcomes.push(outcome(
                    "adjunction",
                    &format!("{name} (x={xn}, y={yn})"),
                    rep.agree,
                    format!("{} disagreements", rep.disagreements.len()),
                    untrusted(&[&rep.left.homology, &rep.right.homology]),
                ));
            }
        }

        let rt = roundtrip_report(&unit, w, k_max)?;
        outcomes.push(outcome(
            "roundtrip",
            name,
            rt.lambda_gamma_agrees && rt.gamma_lambda_agrees,
            format!("lambda-gamma={} gamma-lambda={}", rt.lambda_gamma_agrees, rt.gamma_lambda_agrees),
            untrusted(&[&rt.lambda_gamma, &rt.gamma_lambda, &rt.gamma, &rt.lambda]),
        ));
    }
    Ok(VerifyReport { window: w, k_max, outcomes })
}
