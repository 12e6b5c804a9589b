use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cofree::catalog::{self, WeylTable};
use cofree::duality::{self, FunctorResult, Input};
use cofree::format::{self, Document, Object};
use cofree::koszul::koszul;
use cofree::resolution::{abutment_oracle, adams_e2, ext, minimal_resolution};
use cofree::verify::{self, Mutation};
use cofree::{DegreeWindow, Error, FreeComplex, GradedModulePresentation, GradedPolynomialRing, WindowedHomology};

#[derive(Parser)]
#[command(name = "cofree", version, about = "Exact graded homological algebra over Q[y_1..y_r]")]
struct Cli {
    /// Lowest internal degree of the window.
    #[arg(long, global = true, default_value_t = -60, allow_hyphen_values = true)]
    tmin: i64,
    /// Highest internal degree of the window.
    #[arg(long, global = true, default_value_t = 60, allow_hyphen_values = true)]
    tmax: i64,
    /// Largest tower stage used when stabilizing colimits and limits.
    #[arg(long, global = true, default_value_t = 8)]
    kmax: u32,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Chart,
    Json,
}

/// `SOURCE` is a path to a text file or a catalog entry such as `SU(3)`.
/// Object names `A` (or `unit`), `Q` and `K` are always available for the
/// source's ring.
#[derive(Subcommand)]
enum Command {
    /// Print the ring(s) of a source with their Hilbert functions.
    Ring { source: String },
    /// Hilbert function of a module.
    Hilbert {
        source: String,
        #[arg(default_value = "A")]
        object: String,
    },
    /// The Koszul complex K(y_1^k, ..., y_r^k) and its homology.
    Koszul {
        source: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Local cohomology.
    Gamma {
        source: String,
        #[arg(default_value = "A")]
        object: String,
    },
    /// Derived completion.
    Lambda {
        source: String,
        #[arg(default_value = "A")]
        object: String,
    },
    /// Localization away from the augmentation ideal.
    Localize {
        source: String,
        #[arg(default_value = "A")]
        object: String,
    },
    /// Minimal free resolution and Betti numbers.
    Resolve {
        source: String,
        #[arg(default_value = "Q")]
        object: String,
    },
    /// Ext^{s,t}(M, N).
    Ext {
        source: String,
        #[arg(default_value = "Q")]
        m: String,
        #[arg(default_value = "Q")]
        n: String,
    },
    /// The Adams E2 page Ext(M, N) with its certificates.
    Adams {
        source: String,
        #[arg(default_value = "Q")]
        m: String,
        #[arg(default_value = "Q")]
        n: String,
    },
    /// Total-degree homology of Hom(X, Y), the abutment check.
    Oracle {
        source: String,
        #[arg(default_value = "K")]
        x: String,
        #[arg(default_value = "K")]
        y: String,
    },
    /// The loop-space catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run the invariant suite.
    Verify {
        /// Comma-separated catalog entries; defaults to every entry of rank at most 3.
        #[arg(long, value_delimiter = ',')]
        entries: Vec<String>,
        /// Negate one Koszul differential entry before checking.
        #[arg(long)]
        mutate_sign: bool,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show {
        name: String,
        /// A subgroup `K`; prints the entry modelling the pair `(G, K)`.
        #[arg(long)]
        subgroup: Option<String>,
    },
}

enum Failure {
    Input(String),
    Suite(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::ResolutionIncomplete { .. } => Failure::Suite(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Source {
    doc: Document,
    ring: GradedPolynomialRing,
}

fn load(source: &str) -> Result<Source, Failure> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{source}: {e}")))?;
        let doc = format::parse(&text).map_err(|e| Failure::Input(format!("{source}: {e}")))?;
        let ring = doc
            .rings()
            .next()
            .map(|(_, r)| r.clone())
            .ok_or_else(|| Failure::Input(format!("{source}: no ring block")))?;
        return Ok(Source { doc, ring });
    }
    let entry = catalog::entry(source)?;
    let ring = catalog::classifying_ring(&entry);
    let mut doc = Document::default();
    doc.objects.push((entry.name.clone(), Object::Ring(ring.clone())));
    Ok(Source { doc, ring })
}

impl Source {
    fn object(&self, name: &str) -> Result<Object, Failure> {
        if let Some(o) = self.doc.get(name) {
            return Ok(o.clone());
        }
        match name {
            "A" | "unit" => Ok(Object::Module(GradedModulePresentation::free(&self.ring, vec![0]))),
            "Q" => Ok(Object::Module(GradedModulePresentation::residue_field(&self.ring))),
            "K" => Ok(Object::Complex(koszul(&self.ring, 1).complex)),
            _ => Err(Failure::Input(format!("unknown object `{name}`"))),
        }
    }

    fn module(&self, name: &str) -> Result<GradedModulePresentation, Failure> {
        match self.object(name)? {
            Object::Module(m) => Ok(m),
            Object::Ring(r) => Ok(GradedModulePresentation::free(&r, vec![0])),
            Object::Complex(_) => Err(Failure::Input(format!("`{name}` is a complex, a module is required"))),
        }
    }

    fn complex(&self, name: &str, w: DegreeWindow) -> Result<FreeComplex, Failure> {
        match self.object(name)? {
            Object::Complex(c) => Ok(c),
            Object::Module(m) => Ok(Input::from(&m).complex(w)?),
            Object::Ring(r) => Ok(FreeComplex::unit(&r)),
        }
    }
}

fn homology_json(h: &WindowedHomology) -> Value {
    json!({
        "window": [h.window.t_min, h.window.t_max],
        "s_range": [h.s_min, h.s_max],
        "nonzero": h.nonzero().map(|((s, t), d)| json!([s, t, d])).collect::<Vec<_>>(),
        "untrusted": h.untrusted().iter().map(|(s, t)| json!([s, t])).collect::<Vec<_>>(),
    })
}

fn functor_output(r: &FunctorResult, fmt: Format) -> String {
    match fmt {
        Format::Json => {
            let v = json!({
                "input": r.input,
                "functor": format!("{:?}", r.functor),
                "k_max": r.k_max,
                "homology": homology_json(&r.homology),
                "checks": r.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
            });
            pretty(&v)
        }
        _ => {
            let mut out = String::new();
            let _ = writeln!(out, "# {:?} of {}, k_max {}", r.functor, r.input, r.k_max);
            let _ = writeln!(out, "# untrusted cells: {}", r.homology.untrusted().len());
            for c in &r.checks {
                let _ = writeln!(out, "# check {}: {}", c.name, if c.passed { "pass" } else { "FAIL" });
            }
            out.push_str(&r.homology.to_tsv());
            out
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let w = DegreeWindow::new(cli.tmin, cli.tmax)?;
    if cli.kmax == 0 {
        return Err(Failure::Input("--kmax must be at least 1".into()));
    }
    let fmt = cli.format.unwrap_or(Format::Tsv);
    let out = match &cli.command {
        Command::Ring { source } => {
            let src = load(source)?;
            let mut out = String::new();
            for (name, ring) in src.doc.rings() {
                out.push_str(&format::ring_to_text(name, ring));
                let coeffs = ring.hilbert_coefficients(w.t_min, w.t_max);
                match fmt {
                    Format::Json => {
                        let degs: Vec<_> = ring.generators().iter().map(|(n, d)| json!([n, d])).collect();
                        out = pretty(&json!({"name": name, "generators": degs, "hilbert": coeffs}));
                    }
                    _ => {
                        out.push_str("t\tdim\n");
                        for (t, d) in coeffs.iter().filter(|(_, d)| *d > 0) {
                            let _ = writeln!(out, "{t}\t{d}");
                        }
                    }
                }
            }
            out
        }
        Command::Hilbert { source, object } => {
            let m = load(source)?.module(object)?;
            let h = m.hilbert_function(w);
            match fmt {
                Format::Json => pretty(&json!({"object": object, "hilbert": h})),
                _ => {
                    let mut out = String::from("t\tdim\n");
                    for (t, d) in h.iter().filter(|(_, d)| *d > 0) {
                        let _ = writeln!(out, "{t}\t{d}");
                    }
                    out
                }
            }
        }
        Command::Koszul { source, k } => {
            let src = load(source)?;
            let kc = koszul(&src.ring, (*k).max(1));
            let h = kc.complex.homology(w);
            match fmt {
                Format::Json => pretty(&json!({"k": kc.k, "homology": homology_json(&h)})),
                _ => {
                    let mut out = kc.complex.to_text(&format!("K{}", kc.k));
                    out.push_str(&h.to_tsv());
                    out
                }
            }
        }
        Command::Gamma { source, object } | Command::Lambda { source, object } | Command::Localize { source, object } => {
            let src = load(source)?;
            let c = src.complex(object, w)?;
            let r = match &cli.command {
                Command::Gamma { .. } => duality::gamma(&c, w, cli.kmax)?,
                Command::Lambda { .. } => duality::lambda(&c, w, cli.kmax)?,
                _ => duality::localize_away(&c, w, cli.kmax)?,
            };
            functor_output(&r, fmt)
        }
        Command::Resolve { source, object } => {
            let m = load(source)?.module(object)?;
            let r = minimal_resolution(&m, w)?;
            match fmt {
                Format::Json => {
                    let betti: Vec<_> = r.betti_table().iter().map(|((s, t), d)| json!([s, t, d])).collect();
                    pretty(&json!({"length": r.length(), "checked_through": r.checked_through(), "betti": betti}))
                }
                _ => r.betti_tsv(),
            }
        }
        Command::Ext { source, m, n } => {
            let src = load(source)?;
            let table = ext(&src.module(m)?, &src.module(n)?, w)?;
            match fmt {
                Format::Json => {
                    let e: Vec<_> = table.nonzero().map(|((s, t), d)| json!([s, t, d])).collect();
                    pretty(&json!({"window": [w.t_min, w.t_max], "ext": e}))
                }
                _ => table.to_tsv(),
            }
        }
        Command::Adams { source, m, n } => {
            let src = load(source)?;
            let page = adams_e2(&src.module(m)?, &src.module(n)?, w)?;
            match cli.format.unwrap_or(Format::Chart) {
                Format::Chart => {
                    let mut out = page.chart();
                    let _ = writeln!(
                        out,
                        "vanishing line s = {}: {}",
                        page.rank,
                        if page.vanishing.holds { "holds" } else { "VIOLATED" }
                    );
                    match &page.collapse {
                        Some(c) => {
                            let _ = writeln!(out, "collapse certified: columns {:?}", c.columns);
                        }
                        None => out.push_str("collapse not certified\n"),
                    }
                    out
                }
                Format::Tsv => page.table.to_tsv(),
                Format::Json => {
                    let e: Vec<_> = page.table.nonzero().map(|((s, t), d)| json!([s, t, d])).collect();
                    pretty(&json!({
                        "rank": page.rank,
                        "e2": e,
                        "vanishing_holds": page.vanishing.holds,
                        "collapse": page.collapse.as_ref().map(|c| c.columns.clone()),
                    }))
                }
            }
        }
        Command::Oracle { source, x, y } => {
            let src = load(source)?;
            let totals = abutment_oracle(&src.complex(x, w)?, &src.complex(y, w)?, w)?;
            match fmt {
                Format::Json => pretty(&json!({"totals": totals.iter().map(|(d, v)| json!([d, v])).collect::<Vec<_>>()})),
                _ => {
                    let mut out = String::from("d\tdim\n");
                    for (d, v) in &totals {
                        let _ = writeln!(out, "{d}\t{v}");
                    }
                    out
                }
            }
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => {
                let mut out = String::from("name\trank\tdegrees\tdim\n");
                for e in catalog::entries() {
                    let d: Vec<String> = e.degrees.iter().map(u32::to_string).collect();
                    let _ = writeln!(out, "{}\t{}\t{}\t{}", e.name, e.rank(), d.join(","), e.dimension());
                }
                out
            }
            CatalogAction::Show { name, subgroup } => {
                let e = match subgroup {
                    Some(k) => catalog::weyl_model(name, k, &WeylTable::default())?,
                    None => catalog::entry(name)?,
                };
                let lc = catalog::loop_cohomology(&e);
                match fmt {
                    Format::Json => pretty(&json!({
                        "name": e.name,
                        "degrees": e.degrees,
                        "rank": e.rank(),
                        "dimension": e.dimension(),
                        "exterior_degrees": lc.exterior_degrees,
                        "hilbert": lc.hilbert,
                        "poincare_duality": lc.poincare_duality_holds(),
                    })),
                    _ => {
                        let mut out = format!("{e}\n");
                        out.push_str(&format::ring_to_text(&format!("B{}", e.name), &catalog::classifying_ring(&e)));
                        let _ = writeln!(out, "exterior degrees {:?}", lc.exterior_degrees);
                        out.push_str("i\tdim H^i\n");
                        for (i, d) in lc.hilbert.iter().enumerate().filter(|(_, d)| **d > 0) {
                            let _ = writeln!(out, "{i}\t{d}");
                        }
                        let _ = writeln!(out, "poincare duality: {}", lc.poincare_duality_holds());
                        out
                    }
                }
            }
        },
        Command::Verify { entries, mutate_sign } => {
            let scope = if entries.is_empty() {
                verify::default_scope()
            } else {
                entries.iter().map(|n| catalog::entry(n)).collect::<Result<Vec<_>, _>>()?
            };
            let mutation = mutate_sign.then_some(Mutation::FlipKoszulSign);
            let report = verify::verify_suite(&scope, w, cli.kmax, mutation)?;
            let text = match fmt {
                Format::Json => {
                    let checks: Vec<_> = report
                        .outcomes
                        .iter()
                        .map(|o| {
                            json!({
                                "check": o.check,
                                "scope": o.scope,
                                "passed": o.passed,
                                "detail": o.detail,
                                "untrusted": o.untrusted.iter().map(|(s, t)| json!([s, t])).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    pretty(&json!({"passed": report.passed(), "k_max": report.k_max, "checks": checks}))
                }
                _ => report.to_tsv(),
            };
            return Ok((text, report.passed()));
        }
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, ok)) => {
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Suite(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
