//! Line-oriented text format for rings, modules and complexes.
//!
//! ```text
//! # comment
//! ring R
//!   x 2
//!   y 2
//! end
//! ring B
//!   catalog SU(3)
//! end
//! module M over R
//!   gens 0 2
//!   rel x, -1
//!   rel y^2, 0
//! end
//! complex K over R
//!   term 0: 0
//!   term 1: 2 2
//!   d 1 0 0: x
//!   d 1 0 1: y
//! end
//! ```
//!
//! A `rel` line lists one polynomial per generator. `over NAME` may be
//! omitted, in which case the most recent ring is used. Coefficients are
//! integers or fractions `p/q`; terms combine with `*`, `^`, `+` and `-`.

use std::collections::BTreeMap;

use crate::catalog;
use crate::complex::{FreeComplex, PolyMatrix};
use crate::linalg::Rational;
use crate::module::GradedModulePresentation;
use crate::ring::{GradedPolynomialRing, Monomial, Polynomial};
use crate::Error;

#[derive(Clone, Debug)]
pub enum Object {
    Ring(GradedPolynomialRing),
    Module(GradedModulePresentation),
    Complex(FreeComplex),
}

/// Parsed objects in file order.
#[derive(Clone, Debug, Default)]
pub struct Document {
    pub objects: Vec<(String, Object)>,
}

impl Document {
    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    pub fn ring(&self, name: &str) -> Option<&GradedPolynomialRing> {
        match self.get(name)? {
            Object::Ring(r) => Some(r),
            _ => None,
        }
    }

    pub fn module(&self, name: &str) -> Option<&GradedModulePresentation> {
        match self.get(name)? {
            Object::Module(m) => Some(m),
            _ => None,
        }
    }

    pub fn complex(&self, name: &str) -> Option<&FreeComplex> {
        match self.get(name)? {
            Object::Complex(c) => Some(c),
            _ => None,
        }
    }

    pub fn rings(&self) -> impl Iterator<Item = (&str, &GradedPolynomialRing)> {
        self.objects.iter().filter_map(|(n, o)| match o {
            Object::Ring(r) => Some((n.as_str(), r)),
            _ => None,
        })
    }
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// A line with its 1-based number and the column of its first character.
#[derive(Clone, Copy)]
struct Line<'a> {
    no: usize,
    text: &'a str,
    /// Column of `text[0]` in the original line.
    col: usize,
}

impl<'a> Line<'a> {
    fn words(&self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.text.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    out.push((self.col + s, &self.text[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            out.push((self.col + s, &self.text[s..]));
        }
        out
    }

    fn rest_after(&self, word: usize) -> Line<'a> {
        let words = self.words();
        match words.get(word) {
            Some((c, _)) => {
                let off = c - self.col;
                Line { no: self.no, text: &self.text[off..], col: *c }
            }
            None => Line { no: self.no, text: "", col: self.col + self.text.len() },
        }
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim_start();
            let col = body.len() - trimmed.len() + 1;
            let trimmed = trimmed.trim_end();
            (!trimmed.is_empty()).then_some(Line { no: i + 1, text: trimmed, col })
        })
        .collect()
}

fn parse_int(s: &str, line: usize, col: usize) -> Result<i64, Error> {
    s.parse::<i64>().map_err(|_| err(line, col, format!("expected an integer, found `{s}`")))
}

/// Parses a polynomial in the ring's generator names.
pub fn parse_polynomial(ring: &GradedPolynomialRing, text: &str) -> Result<Polynomial, Error> {
    parse_poly_at(ring, text, 1, 1)
}

fn parse_poly_at(ring: &GradedPolynomialRing, text: &str, line: usize, col0: usize) -> Result<Polynomial, Error> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut pos = 0;
    let n = ring.rank();
    let col = |i: usize| col0 + chars.get(i).map_or(text.len(), |c| c.0);
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].1.is_whitespace() {
            *pos += 1;
        }
    };
    let mut result = Polynomial::zero();
    let mut first = true;
    loop {
        skip_ws(&mut pos);
        if pos >= chars.len() {
            if first {
                return Err(err(line, col(pos), "expected a polynomial"));
            }
            break;
        }
        let mut sign = Rational::one();
        if chars[pos].1 == '+' || chars[pos].1 == '-' {
            if chars[pos].1 == '-' {
                sign = Rational::from(-1);
            }
            pos += 1;
            skip_ws(&mut pos);
        } else if !first {
            return Err(err(line, col(pos), format!("expected `+` or `-`, found `{}`", chars[pos].1)));
        }
        first = false;
        // term := factor ('*' factor)*
        let mut coeff = sign;
        let mut exps = vec![0u32; n];
        loop {
            skip_ws(&mut pos);
            if pos >= chars.len() {
                return Err(err(line, col(pos), "expected a number or generator"));
            }
            let c = chars[pos].1;
            if c.is_ascii_digit() {
                let start = pos;
                while pos < chars.len() && (chars[pos].1.is_ascii_digit() || chars[pos].1 == '/') {
                    pos += 1;
                }
                let lit: String = chars[start..pos].iter().map(|c| c.1).collect();
                let q: Rational = lit
                    .parse()
                    .map_err(|_| err(line, col(start), format!("bad coefficient `{lit}`")))?;
                coeff = coeff * q;
            } else if c.is_alphabetic() || c == '_' {
                let start = pos;
                while pos < chars.len() && (chars[pos].1.is_alphanumeric() || chars[pos].1 == '_') {
                    pos += 1;
                }
                let name: String = chars[start..pos].iter().map(|c| c.1).collect();
                let i = ring
                    .generator_index(&name)
                    .ok_or_else(|| err(line, col(start), format!("unknown generator `{name}`")))?;
                skip_ws(&mut pos);
                let mut e = 1u32;
                if pos < chars.len() && chars[pos].1 == '^' {
                    pos += 1;
                    skip_ws(&mut pos);
                    let s = pos;
                    while pos < chars.len() && chars[pos].1.is_ascii_digit() {
                        pos += 1;
                    }
                    let lit: String = chars[s..pos].iter().map(|c| c.1).collect();
                    e = lit
                        .parse()
                        .map_err(|_| err(line, col(s), "expected a non-negative exponent"))?;
                }
                exps[i] += e;
            } else {
                return Err(err(line, col(pos), format!("unexpected `{c}`")));
            }
            skip_ws(&mut pos);
            if pos < chars.len() && chars[pos].1 == '*' {
                pos += 1;
                continue;
            }
            break;
        }
        result = result.add(&Polynomial::monomial(Monomial(exps), coeff));
    }
    Ok(result)
}

/// Splits on commas, returning each piece with its starting column.
fn split_commas<'a>(l: &Line<'a>) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, ch) in l.text.char_indices() {
        if ch == ',' {
            out.push((l.col + start, &l.text[start..i]));
            start = i + 1;
        }
    }
    out.push((l.col + start, &l.text[start..]));
    out
}

struct Block<'a> {
    header: Line<'a>,
    kind: &'a str,
    name: String,
    over: Option<(usize, String)>,
    body: Vec<Line<'a>>,
}

fn blocks<'a>(all: &[Line<'a>]) -> Result<Vec<Block<'a>>, Error> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < all.len() {
        let header = all[i];
        let words = header.words();
        let (c, kind) = words[0];
        if !matches!(kind, "ring" | "module" | "complex") {
            return Err(err(header.no, c, format!("expected `ring`, `module` or `complex`, found `{kind}`")));
        }
        let Some((_, name)) = words.get(1) else {
            return Err(err(header.no, header.col + header.text.len(), format!("`{kind}` needs a name")));
        };
        let over = match words.get(2) {
            None => None,
            Some((_, "over")) if kind != "ring" => match words.get(3) {
                Some((c, r)) if words.len() == 4 => Some((*c, r.to_string())),
                _ => return Err(err(header.no, words[2].0, "expected `over RING`")),
            },
            Some((c, w)) => return Err(err(header.no, *c, format!("unexpected `{w}`"))),
        };
        let mut body = Vec::new();
        i += 1;
        loop {
            let Some(l) = all.get(i) else {
                return Err(err(header.no, header.col, format!("`{kind} {name}` is missing `end`")));
            };
            i += 1;
            if l.text == "end" {
                break;
            }
            body.push(*l);
        }
        out.push(Block { header, kind, name: name.to_string(), over, body });
    }
    Ok(out)
}

fn parse_ring(b: &Block<'_>) -> Result<GradedPolynomialRing, Error> {
    let mut gens: Vec<(String, i64)> = Vec::new();
    let mut from_catalog = None;
    for l in &b.body {
        let words = l.words();
        if words[0].1 == "catalog" {
            let rest = l.rest_after(1);
            if rest.text.is_empty() {
                return Err(err(l.no, rest.col, "expected a catalog entry name"));
            }
            let e = catalog::entry(rest.text).map_err(|e| err(l.no, rest.col, e.to_string()))?;
            from_catalog = Some((l.no, catalog::classifying_ring(&e)));
            continue;
        }
        if words.len() != 2 {
            return Err(err(l.no, l.col, "expected `NAME DEGREE`"));
        }
        let d = parse_int(words[1].1, l.no, words[1].0)?;
        gens.push((words[0].1.to_string(), d));
    }
    match from_catalog {
        Some((no, _)) if !gens.is_empty() => Err(err(no, 1, "`catalog` cannot be combined with explicit generators")),
        Some((_, r)) => Ok(r),
        None => {
            let pairs: Vec<(&str, i64)> = gens.iter().map(|(n, d)| (n.as_str(), *d)).collect();
            GradedPolynomialRing::new(pairs).map_err(|e| err(b.header.no, b.header.col, e.to_string()))
        }
    }
}

fn ring_for<'d>(b: &Block<'_>, doc: &'d Document) -> Result<&'d GradedPolynomialRing, Error> {
    match &b.over {
        Some((c, name)) => doc
            .ring(name)
            .ok_or_else(|| err(b.header.no, *c, format!("unknown ring `{name}`"))),
        None => doc
            .rings()
            .last()
            .map(|(_, r)| r)
            .ok_or_else(|| err(b.header.no, b.header.col, "no ring defined before this block")),
    }
}

fn parse_module(b: &Block<'_>, ring: &GradedPolynomialRing) -> Result<GradedModulePresentation, Error> {
    let mut gens: Option<Vec<i64>> = None;
    let mut rels: Vec<(usize, Vec<Polynomial>)> = Vec::new();
    for l in &b.body {
        let words = l.words();
        match words[0].1 {
            "gens" => {
                if gens.is_some() {
                    return Err(err(l.no, l.col, "`gens` given twice"));
                }
                gens = Some(
                    words[1..]
                        .iter()
                        .map(|(c, w)| parse_int(w, l.no, *c))
                        .collect::<Result<_, _>>()?,
                );
            }
            "rel" => {
                let Some(g) = &gens else {
                    return Err(err(l.no, l.col, "`rel` before `gens`"));
                };
                let rest = l.rest_after(1);
                let pieces = split_commas(&rest);
                if pieces.len() != g.len() {
                    return Err(err(
                        l.no,
                        rest.col,
                        format!("relation has {} entries but there are {} generators", pieces.len(), g.len()),
                    ));
                }
                let col: Vec<Polynomial> = pieces
                    .iter()
                    .map(|(c, p)| parse_poly_at(ring, p, l.no, *c))
                    .collect::<Result<_, _>>()?;
                rels.push((l.no, col));
            }
            w => return Err(err(l.no, l.col, format!("expected `gens` or `rel`, found `{w}`"))),
        }
    }
    let gens = gens.ok_or_else(|| err(b.header.no, b.header.col, "module needs a `gens` line"))?;
    let line_of: Vec<usize> = rels.iter().map(|r| r.0).collect();
    GradedModulePresentation::new(ring.clone(), gens, rels.into_iter().map(|r| r.1).collect()).map_err(|e| match e {
        Error::Inhomogeneous { relation, detail } => {
            err(line_of[relation], 1, format!("relation {relation} is not homogeneous: {detail}"))
        }
        other => err(b.header.no, b.header.col, other.to_string()),
    })
}

fn parse_complex(b: &Block<'_>, ring: &GradedPolynomialRing) -> Result<FreeComplex, Error> {
    let mut terms: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    let mut entries: BTreeMap<i64, Vec<(usize, usize, Polynomial)>> = BTreeMap::new();
    let mut entry_lines: BTreeMap<(i64, usize, usize), (usize, usize)> = BTreeMap::new();
    for l in &b.body {
        let Some(colon) = l.text.find(':') else {
            return Err(err(l.no, l.col + l.text.len(), "expected `:`"));
        };
        let head = Line { no: l.no, text: &l.text[..colon], col: l.col };
        let tail = Line { no: l.no, text: &l.text[colon + 1..], col: l.col + colon + 1 };
        let words = head.words();
        match words[0].1 {
            "term" => {
                if words.len() != 2 {
                    return Err(err(l.no, l.col, "expected `term S: SHIFTS`"));
                }
                let s = parse_int(words[1].1, l.no, words[1].0)?;
                if terms.contains_key(&s) {
                    return Err(err(l.no, words[1].0, format!("term {s} given twice")));
                }
                let shifts = tail
                    .words()
                    .iter()
                    .map(|(c, w)| parse_int(w, l.no, *c))
                    .collect::<Result<Vec<_>, _>>()?;
                terms.insert(s, shifts);
            }
            "d" => {
                if words.len() != 4 {
                    return Err(err(l.no, l.col, "expected `d S ROW COL: POLY`"));
                }
                let s = parse_int(words[1].1, l.no, words[1].0)?;
                let r = parse_int(words[2].1, l.no, words[2].0)?;
                let c = parse_int(words[3].1, l.no, words[3].0)?;
                let (Some(src), Some(tgt)) = (terms.get(&s), terms.get(&(s - 1))) else {
                    return Err(err(l.no, words[1].0, format!("terms {s} and {} must be declared first", s - 1)));
                };
                if r < 0 || r as usize >= tgt.len() {
                    return Err(err(l.no, words[2].0, format!("row {r} out of range")));
                }
                if c < 0 || c as usize >= src.len() {
                    return Err(err(l.no, words[3].0, format!("column {c} out of range")));
                }
                let p = parse_poly_at(ring, tail.text, l.no, tail.col)?;
                let want = src[c as usize] - tgt[r as usize];
                if !p.is_zero() && p.homogeneous_degree(ring) != Some(want) {
                    return Err(err(l.no, tail.col, format!("entry must be homogeneous of degree {want}")));
                }
                entry_lines.insert((s, r as usize, c as usize), (l.no, l.col));
                entries.entry(s).or_default().push((r as usize, c as usize, p));
            }
            w => return Err(err(l.no, l.col, format!("expected `term` or `d`, found `{w}`"))),
        }
    }
    let diffs = entries
        .into_iter()
        .map(|(s, e)| {
            let rows = terms.get(&(s - 1)).map_or(0, Vec::len);
            let cols = terms.get(&s).map_or(0, Vec::len);
            (s, PolyMatrix::new(rows, cols, e))
        })
        .collect();
    FreeComplex::new(ring.clone(), terms, diffs).map_err(|e| match e {
        Error::DSquaredNonzero { s, row, col } => {
            // point at some entry of d_s in the offending column
            let (no, c) = entry_lines
                .iter()
                .find(|((ss, _, cc), _)| *ss == s && *cc == col)
                .map(|(_, v)| *v)
                .unwrap_or((b.header.no, b.header.col));
            err(no, c, format!("d∘d is nonzero at degree {s}, entry ({row}, {col})"))
        }
        other => err(b.header.no, b.header.col, other.to_string()),
    })
}

/// Parses a whole document.
pub fn parse(text: &str) -> Result<Document, Error> {
    let all = lines(text);
    let mut doc = Document::default();
    for b in blocks(&all)? {
        if doc.get(&b.name).is_some() {
            return Err(err(b.header.no, b.header.col, format!("`{}` defined twice", b.name)));
        }
        let obj = match b.kind {
            "ring" => Object::Ring(parse_ring(&b)?),
            "module" => {
                let ring = ring_for(&b, &doc)?.clone();
                Object::Module(parse_module(&b, &ring)?)
            }
            _ => {
                let ring = ring_for(&b, &doc)?.clone();
                Object::Complex(parse_complex(&b, &ring)?)
            }
        };
        doc.objects.push((b.name, obj));
    }
    Ok(doc)
}

/// Renders a ring block.
pub fn ring_to_text(name: &str, ring: &GradedPolynomialRing) -> String {
    let mut out = format!("ring {name}\n");
    for (g, d) in ring.generators() {
        out.push_str(&format!("  {g} {d}\n"));
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::DegreeWindow;

    #[test]
    fn polynomials() {
        let r = GradedPolynomialRing::new(vec![("x", 2), ("y", 2)]).unwrap();
        let p = parse_polynomial(&r, "x^2 + 2*x*y - 1/2*y^2").unwrap();
        assert_eq!(p.format(&r), "x^2 + 2*x*y - 1/2*y^2");
        assert!(parse_polynomial(&r, "0").unwrap().is_zero());
        assert_eq!(parse_polynomial(&r, "-x").unwrap(), r.var(0).neg());
        let e = parse_polynomial(&r, "x + z").unwrap_err();
        assert_eq!(e, Error::Parse { line: 1, col: 5, msg: "unknown generator `z`".into() });
    }

    #[test]
    fn module_round_trip() {
        let text = "ring R\n  c 2\nend\nmodule M\n  gens 0\n  rel c^2\nend\n";
        let doc = parse(text).unwrap();
        let m = doc.module("M").unwrap();
        let dims: Vec<usize> = m
            .hilbert_function(DegreeWindow::new(0, 6).unwrap())
            .into_iter()
            .map(|d| d.1)
            .collect();
        assert_eq!(dims, vec![1, 0, 1, 0, 0, 0, 0]);
        let again = parse(&format!("{}{}", ring_to_text("R", doc.ring("R").unwrap()), m.to_text("M"))).unwrap();
        assert_eq!(again.module("M").unwrap(), m);
    }

    #[test]
    fn complex_round_trip() {
        let text = "ring R\n  x 2\n  y 4\nend\ncomplex K over R\n  term 0: 0\n  term 1: 2 4\n  term 2: 6\n  d 1 0 0: x\n  d 1 0 1: y\n  d 2 0 0: -y\n  d 2 1 0: x\nend\n";
        let doc = parse(text).unwrap();
        let k = doc.complex("K").unwrap();
        let again = parse(&format!("{}{}", ring_to_text("R", k.ring()), k.to_text("K"))).unwrap();
        assert_eq!(again.complex("K").unwrap(), k);
    }

    #[test]
    fn diagnostics() {
        let e = parse("ring R\n  x 2\n  y 2\nend\nmodule M\n  gens 0\n  rel x + x*y\nend\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 7, .. }), "{e}");
        let e = parse("ring R\n  x 2\nend\ncomplex K\n  term 0: 0\n  term 1: 2\n  term 2: 4\n  d 1 0 0: x\n  d 2 0 0: x\nend\n")
            .unwrap_err();
        assert!(matches!(e, Error::Parse { line: 9, .. }), "{e}");
        let e = parse("ring R\n  x 3\nend\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse("ring R\n  x 2\n").unwrap_err();
        assert!(e.to_string().contains("missing `end`"));
        let e = parse("ring R\n  x 2\nend\nmodule M\n  gens 0\n  rel x ^ q\nend\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 6, col: 11, .. }), "{e}");
    }

    #[test]
    fn catalog_rings() {
        let doc = parse("ring B\n  catalog SU(3)\nend\n").unwrap();
        assert_eq!(doc.ring("B").unwrap().degrees(), vec![4, 6]);
        assert!(parse("ring B\n  catalog SU(42)\nend\n").is_err());
    }
}
