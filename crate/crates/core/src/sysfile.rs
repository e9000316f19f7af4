//! Text format for systems.
//!
//! ```text
//! # comment
//! vars 3
//! eq 1
//! ops 1.. : (1+h1)^(1+2*q) * (1-h2)^(-q) * (1-h3)^(-2*q)
//! eq 2
//! op 1 : (1+h1)^2 * (1-h3)^(-2)
//! ```
//!
//! A file may instead start with a `family` header naming a builder:
//!
//! ```text
//! family case1 lambda=1 mu=-1 J=1,2
//! family case2 m=2 alpha=1 J=2,3
//! family fundamental
//! vertex 1 I0 beta=-1/3 J=1..
//! vertex 2 J0
//! scale 1 3
//! family quasicyclic modulus=3
//! vertex 1 class=0 weight=1 succ=2 J=1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{self, Q};
use crate::series::parse_expr_at;
use crate::solver::{Family, Operator, Sdse};
use crate::systems::{
    build_case1, build_case2, Class, DegreeSpec, FundamentalData, FundamentalVertex, QuasiCyclicData,
    QuasiCyclicVertex,
};

/// A parsed file: a system, or the parameters of a builder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    System(Sdse),
    Case1 { degrees: DegreeSpec, lambda: Q, mu: Q },
    Case2 { degrees: DegreeSpec, m: u32, alpha: Q },
    Fundamental(FundamentalData),
    QuasiCyclic(QuasiCyclicData),
}

impl Document {
    /// The system described, running the builder for family headers.
    pub fn into_system(self) -> Result<Sdse> {
        match self {
            Document::System(s) => Ok(s),
            Document::Case1 { degrees, lambda, mu } => build_case1(&degrees, &lambda, &mu),
            Document::Case2 { degrees, m, alpha } => build_case2(&degrees, m, &alpha),
            Document::Fundamental(d) => d.build(),
            Document::QuasiCyclic(d) => d.build(),
        }
    }
}

struct Token<'a> {
    col: usize,
    text: &'a str,
}

struct Line<'a> {
    no: usize,
    raw: &'a str,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, col: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.no,
            column: col,
            message: message.into(),
        }
    }

    fn end_col(&self) -> usize {
        self.raw.chars().count() + 1
    }

    fn token(&self, k: usize, what: &str) -> Result<&Token<'a>> {
        self.tokens
            .get(k)
            .ok_or_else(|| self.err(self.end_col(), format!("expected {}", what)))
    }

    fn number<T: std::str::FromStr>(&self, k: usize, what: &str) -> Result<T> {
        let t = self.token(k, what)?;
        t.text
            .parse()
            .map_err(|_| self.err(t.col, format!("expected {}, found '{}'", what, t.text)))
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        match self.tokens.get(n) {
            Some(t) => Err(self.err(t.col, format!("unexpected '{}'", t.text))),
            None => Ok(()),
        }
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start: Option<usize> = None;
        for (bi, ch) in content.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push((s, bi));
                }
            } else if start.is_none() {
                start = Some(bi);
            }
        }
        if let Some(s) = start {
            tokens.push((s, content.len()));
        }
        if tokens.is_empty() {
            continue;
        }
        let tokens = tokens
            .into_iter()
            .map(|(s, e)| Token {
                col: content[..s].chars().count() + 1,
                text: &content[s..e],
            })
            .collect();
        out.push(Line {
            no: k + 1,
            raw: content,
            tokens,
        });
    }
    out
}

/// The expression after the first `:` of an operator line.
fn operator_expr(line: &Line<'_>) -> Result<crate::series::SeriesExpr> {
    let Some(colon) = line.raw.find(':') else {
        return Err(line.err(line.end_col(), "expected ':' before the series"));
    };
    let expr_text = &line.raw[colon + 1..];
    if expr_text.trim().is_empty() {
        return Err(line.err(line.end_col(), "missing series after ':'"));
    }
    let offset = line.raw[..colon + 1].chars().count();
    parse_expr_at(expr_text, line.no, offset)
}

/// Parses a system or a family header.
pub fn parse_document(text: &str) -> Result<Document> {
    let ls = lines(text);
    match ls.first() {
        Some(l) if l.tokens[0].text == "family" => parse_family(&ls),
        _ => parse_lines(&ls, text).map(Document::System),
    }
}

/// Parses a system file (family headers are built).
pub fn parse_system(text: &str) -> Result<Sdse> {
    parse_document(text)?.into_system()
}

fn parse_lines(ls: &[Line<'_>], text: &str) -> Result<Sdse> {
    let mut sys: Option<Sdse> = None;
    let mut current: Option<usize> = None;
    for line in ls {
        let head = &line.tokens[0];
        match head.text {
            "vars" => {
                if sys.is_some() {
                    return Err(line.err(head.col, "repeated 'vars'"));
                }
                let n: usize = line.number(1, "a variable count")?;
                if n == 0 {
                    return Err(line.err(line.tokens[1].col, "at least one variable is needed"));
                }
                line.expect_len(2)?;
                sys = Some(Sdse::new(n));
            }
            "eq" => {
                let s = sys.as_ref().ok_or_else(|| line.err(head.col, "'eq' before 'vars'"))?;
                let i: usize = line.number(1, "an equation number")?;
                if i == 0 || i > s.nvars {
                    return Err(line.err(line.tokens[1].col, format!("equation {} outside 1..{}", i, s.nvars)));
                }
                line.expect_len(2)?;
                current = Some(i);
            }
            "op" | "ops" => {
                let s = sys.as_mut().ok_or_else(|| line.err(head.col, "operator before 'vars'"))?;
                let i = current.ok_or_else(|| line.err(head.col, "operator before 'eq'"))?;
                let t = line.token(1, "a degree")?;
                let expr = operator_expr(line)?;
                if t.text.starts_with(':') {
                    return Err(line.err(t.col, "expected a degree"));
                }
                let degree_text = t.text.trim_end_matches(':');
                if head.text == "op" {
                    let degree: u32 = degree_text
                        .parse()
                        .map_err(|_| line.err(t.col, format!("expected a degree, found '{}'", degree_text)))?;
                    s.equation_mut(i).ops.push(Operator { degree, expr });
                } else {
                    let from: u32 = degree_text
                        .strip_suffix("..")
                        .and_then(|d| d.parse().ok())
                        .ok_or_else(|| line.err(t.col, format!("expected 'q0..', found '{}'", degree_text)))?;
                    let eq = s.equation_mut(i);
                    if eq.family.is_some() {
                        return Err(line.err(head.col, format!("equation {} already has a family", i)));
                    }
                    eq.family = Some(Family { from, expr });
                }
            }
            other => return Err(line.err(head.col, format!("unknown keyword '{}'", other))),
        }
    }
    sys.ok_or_else(|| {
        let line = text.lines().count().max(1);
        Error::Syntax {
            line,
            column: 1,
            message: "missing 'vars'".into(),
        }
    })
}

/// `key=value` options of a line from token `start` on.
fn options<'a>(line: &'a Line<'a>, start: usize) -> Result<BTreeMap<&'a str, (usize, &'a str)>> {
    let mut out = BTreeMap::new();
    for t in &line.tokens[start..] {
        let (k, v) = t
            .text
            .split_once('=')
            .ok_or_else(|| line.err(t.col, format!("expected key=value, found '{}'", t.text)))?;
        if out.insert(k, (t.col, v)).is_some() {
            return Err(line.err(t.col, format!("repeated option '{}'", k)));
        }
    }
    Ok(out)
}

struct Opts<'a> {
    line: &'a Line<'a>,
    map: BTreeMap<&'a str, (usize, &'a str)>,
}

impl<'a> Opts<'a> {
    fn new(line: &'a Line<'a>, start: usize, allowed: &[&str]) -> Result<Self> {
        let map = options(line, start)?;
        if let Some((k, (col, _))) = map.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(line.err(*col, format!("unknown option '{}'", k)));
        }
        Ok(Opts { line, map })
    }

    fn rational(&self, key: &str) -> Result<Option<Q>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((col, v)) => rational::parse(v)
                .map(Some)
                .ok_or_else(|| self.line.err(*col, format!("'{}' is not a rational", v))),
        }
    }

    fn required_rational(&self, key: &str) -> Result<Q> {
        self.rational(key)?
            .ok_or_else(|| self.line.err(self.line.end_col(), format!("missing option '{}'", key)))
    }

    fn integer(&self, key: &str) -> Result<Option<u32>> {
        match self.map.get(key) {
            None => Ok(None),
            Some((col, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| self.line.err(*col, format!("'{}' is not a nonnegative integer", v))),
        }
    }

    fn required_integer(&self, key: &str) -> Result<u32> {
        self.integer(key)?
            .ok_or_else(|| self.line.err(self.line.end_col(), format!("missing option '{}'", key)))
    }

    fn degrees(&self, default: Option<DegreeSpec>) -> Result<DegreeSpec> {
        match self.map.get("J") {
            Some((col, v)) => {
                DegreeSpec::parse(v).ok_or_else(|| self.line.err(*col, format!("bad degree set '{}'", v)))
            }
            None => default.ok_or_else(|| self.line.err(self.line.end_col(), "missing option 'J'")),
        }
    }

    /// `j:v,j:v` pairs.
    fn pairs(&self, key: &str) -> Result<Vec<(usize, Q)>> {
        let Some((col, v)) = self.map.get(key) else {
            return Ok(Vec::new());
        };
        v.split(',')
            .map(|p| {
                let (j, c) = p.split_once(':')?;
                Some((j.trim().parse().ok()?, rational::parse(c)?))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| self.line.err(*col, format!("bad coefficient list '{}'", v)))
    }

    fn list(&self, key: &str) -> Result<Vec<usize>> {
        let Some((col, v)) = self.map.get(key) else {
            return Ok(Vec::new());
        };
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',')
            .map(|p| p.trim().parse().ok())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| self.line.err(*col, format!("bad vertex list '{}'", v)))
    }
}

fn parse_family(ls: &[Line<'_>]) -> Result<Document> {
    let header = &ls[0];
    let kind = header.token(1, "a family name")?;
    let rest = &ls[1..];
    let no_body = || match rest.first() {
        Some(l) => Err(l.err(l.tokens[0].col, "this family takes no further lines")),
        None => Ok(()),
    };
    match kind.text {
        "case1" => {
            let o = Opts::new(header, 2, &["lambda", "mu", "J"])?;
            no_body()?;
            Ok(Document::Case1 {
                degrees: o.degrees(None)?,
                lambda: o.required_rational("lambda")?,
                mu: o.required_rational("mu")?,
            })
        }
        "case2" => {
            let o = Opts::new(header, 2, &["m", "alpha", "J"])?;
            no_body()?;
            Ok(Document::Case2 {
                degrees: o.degrees(None)?,
                m: o.required_integer("m")?,
                alpha: o.required_rational("alpha")?,
            })
        }
        "fundamental" => {
            header.expect_len(2)?;
            parse_fundamental(rest).map(Document::Fundamental)
        }
        "quasicyclic" => {
            let o = Opts::new(header, 2, &["modulus"])?;
            let modulus = o.required_integer("modulus")?;
            parse_quasicyclic(rest, modulus).map(Document::QuasiCyclic)
        }
        other => Err(header.err(kind.col, format!("unknown family '{}'", other))),
    }
}

fn vertex_index(line: &Line<'_>, expected: usize) -> Result<()> {
    let i: usize = line.number(1, "a vertex number")?;
    if i != expected {
        return Err(line.err(line.tokens[1].col, format!("expected vertex {}, found {}", expected, i)));
    }
    Ok(())
}

fn parse_fundamental(ls: &[Line<'_>]) -> Result<FundamentalData> {
    let mut data = FundamentalData::default();
    for line in ls {
        let head = &line.tokens[0];
        match head.text {
            "vertex" => {
                vertex_index(line, data.vertices.len() + 1)?;
                let ct = line.token(2, "a class")?;
                let class = Class::parse(ct.text)
                    .ok_or_else(|| line.err(ct.col, format!("unknown class '{}'", ct.text)))?;
                let o = Opts::new(line, 3, &["beta", "nu", "a", "J"])?;
                let a = o.pairs("a")?;
                let beta = o.rational("beta")?;
                let nu = o.rational("nu")?;
                let misplaced = |key: &str, ok: bool| -> Result<()> {
                    match o.map.get(key) {
                        Some((col, _)) if !ok => Err(line.err(*col, format!("'{}' does not apply to {}", key, class))),
                        _ => Ok(()),
                    }
                };
                misplaced("beta", class == Class::I0)?;
                misplaced("nu", matches!(class, Class::I1 | Class::J1))?;
                misplaced("a", matches!(class, Class::L0 | Class::I1 | Class::J1 | Class::E))?;
                let need = |v: Option<Q>, key: &str| {
                    v.ok_or_else(|| line.err(line.end_col(), format!("missing option '{}'", key)))
                };
                let v = match class {
                    Class::I0 => FundamentalVertex::i0(need(beta, "beta")?),
                    Class::J0 => FundamentalVertex::j0(),
                    Class::K0 => FundamentalVertex::k0(),
                    Class::L0 => FundamentalVertex::l0(&a),
                    Class::I1 => FundamentalVertex::i1(need(nu, "nu")?, &a),
                    Class::J1 => FundamentalVertex::j1(need(nu, "nu")?, &a),
                    Class::E => FundamentalVertex::e(&a),
                };
                data.vertices.push(v.with_degrees(o.degrees(Some(DegreeSpec::finite(&[1])))?));
            }
            "scale" => {
                let j: usize = line.number(1, "a variable")?;
                let t = line.token(2, "a factor")?;
                let s = rational::parse(t.text)
                    .filter(|s| !s.is_zero())
                    .ok_or_else(|| line.err(t.col, format!("'{}' is not a nonzero rational", t.text)))?;
                line.expect_len(3)?;
                data.scale.insert(j, s);
            }
            other => return Err(line.err(head.col, format!("unknown keyword '{}'", other))),
        }
    }
    Ok(data)
}

fn parse_quasicyclic(ls: &[Line<'_>], modulus: u32) -> Result<QuasiCyclicData> {
    let mut vertices = Vec::new();
    for line in ls {
        let head = &line.tokens[0];
        if head.text != "vertex" {
            return Err(line.err(head.col, format!("unknown keyword '{}'", head.text)));
        }
        vertex_index(line, vertices.len() + 1)?;
        let o = Opts::new(line, 2, &["class", "weight", "succ", "J"])?;
        vertices.push(QuasiCyclicVertex::new(
            o.required_integer("class")?,
            o.rational("weight")?.unwrap_or_else(|| Q::from_integer(1.into())),
            &o.list("succ")?,
            o.degrees(Some(DegreeSpec::finite(&[1])))?,
        ));
    }
    Ok(QuasiCyclicData::new(modulus, vertices))
}

/// Writes a system in the format read by [`parse_system`].
pub fn serialize(system: &Sdse) -> String {
    let mut out = String::new();
    writeln!(out, "vars {}", system.nvars).unwrap();
    for (k, eq) in system.equations.iter().enumerate() {
        writeln!(out, "eq {}", k + 1).unwrap();
        for op in &eq.ops {
            writeln!(out, "op {} : {}", op.degree, op.expr).unwrap();
        }
        if let Some(f) = &eq.family {
            writeln!(out, "ops {}.. : {}", f.from, f.expr).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    const INTRO: &str = "\
# introduction system
vars 3
eq 1
ops 1.. : (1+h1)^(1+2*q) * (1-h2)^(-q) * (1-h3)^(-2*q)
eq 2
op 1 : (1+h1)^2 * (1-h3)^(-2)
eq 3
op 1 : (1+h1)^2 * (1-h2)^(-1) * (1-h3)^(-1)
";

    #[test]
    fn parses_intro() {
        let s = parse_system(INTRO).unwrap();
        assert_eq!(s.nvars, 3);
        assert_eq!(s.equation(1).family.as_ref().unwrap().from, 1);
        assert_eq!(s.degrees(2, 4), vec![1]);
        let again = parse_system(&serialize(&s)).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn slash_free_minimal() {
        let s = parse_system("vars 1\neq 1\nop 1 : (1+h1)^2\n").unwrap();
        assert_eq!(s.expr(1, 1).unwrap().to_string(), "(1 + h1)^2");
    }

    fn syntax_at(text: &str) -> (usize, usize) {
        match parse_document(text) {
            Err(Error::Syntax { line, column, .. }) => (line, column),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(syntax_at("vars 1\neq 1\nop 1 : (1+h1)^^2"), (3, 15));
        assert_eq!(syntax_at("vars 1\neq 2\n"), (2, 4));
        assert_eq!(syntax_at("vars 1\n  frob 2"), (2, 3));
        assert_eq!(syntax_at("vars 1\neq 1\nop x : 1"), (3, 4));
        assert_eq!(syntax_at("vars 1\neq 1\nop 1 1"), (3, 7));
        assert_eq!(syntax_at("eq 1"), (1, 1));
        assert_eq!(syntax_at("family case1 lambda=1 mu=zz J=1"), (1, 23));
    }

    #[test]
    fn family_headers() {
        let d = parse_document("family case1 lambda=1 mu=-1 J=1,2").unwrap();
        assert_eq!(
            d,
            Document::Case1 {
                degrees: DegreeSpec::finite(&[1, 2]),
                lambda: int(1),
                mu: int(-1)
            }
        );
        let s = d.into_system().unwrap();
        assert_eq!(s.expr(1, 1).unwrap().to_string(), "(1 + h1)^2");

        let f = parse_document(
            "family fundamental\nvertex 1 I0 beta=-1/3 J=1..\nvertex 2 J0\nvertex 3 I0 beta=1\nscale 1 3\n",
        )
        .unwrap();
        let Document::Fundamental(data) = &f else { panic!() };
        assert_eq!(data.vertices[0].beta, frac(-1, 3));
        assert_eq!(data.scale.get(&1), Some(&int(3)));
        let built = f.into_system().unwrap();
        assert_eq!(parse_system(INTRO).unwrap().series(1, 3, 4), built.series(1, 3, 4));

        let q = parse_document("family quasicyclic modulus=3\nvertex 1 class=0 succ=2\nvertex 2 class=1 succ=3\nvertex 3 class=2 succ=1\n")
            .unwrap()
            .into_system()
            .unwrap();
        assert_eq!(q.expr(3, 1).unwrap().to_string(), "1 + h1");

        assert!(parse_document("family fundamental\nvertex 1 J0 beta=2").is_err());
        assert!(parse_document("family fundamental\nvertex 2 J0").is_err());
    }
}
