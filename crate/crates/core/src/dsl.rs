//! A small text format for models, morphisms, biquotient data, bundles,
//! ring presentations and annotated formula discrepancies.
//!
//! ```text
//! # comments start with '#' or '//'
//! model HP2 {
//!   gen y4 : 4;
//!   gen y11 : 11;
//!   d y11 = y4^3;
//! }
//! morphism inc : HP2 -> HP2 { y4 -> y4; y11 -> y11; }
//! ```
//!
//! Expressions are sums of terms; a term is a `*`-product of factors, a
//! factor is a rational `p/q`, a generator or a parenthesised expression,
//! optionally raised to a nonnegative integer power with `^`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::cdga::{degree_violation, FreeCdga, Morphism, MorphismViolation, Violation};
use crate::cohomology::RingPresentation;
use crate::constructors::{biquotient_model, projectivize, ClassifyingData, PontryaginData, SuspendedGenerator};
use crate::error::Error;
use crate::gradedalg::{Generator, Polynomial, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    /// Well-formed text describing an invalid object.
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::Semantic => "error",
        };
        write!(f, "{}: {kind}: {}", self.pos, self.message)
    }
}

/// One or more positioned diagnostics, sorted by position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseErrors(pub Vec<ParseError>);

impl ParseErrors {
    fn one(pos: Pos, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        ParseErrors(vec![ParseError {
            pos,
            kind,
            message: message.into(),
        }])
    }

    fn semantic(pos: Pos, message: impl Into<String>) -> Self {
        ParseErrors::one(pos, ParseErrorKind::Semantic, message)
    }

    pub fn errors(&self) -> &[ParseError] {
        &self.0
    }

    pub fn first(&self) -> &ParseError {
        &self.0[0]
    }
}

impl fmt::Display for ParseErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseErrors {}

type PResult<T> = Result<T, ParseErrors>;

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(s) => write!(f, "integer `{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: [&str; 14] = ["->", "{", "}", "(", ")", ";", ":", "=", "+", "-", "*", "/", "^", ","];

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '\'' || c.is_alphanumeric()
}

fn lex(text: &str) -> PResult<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
        } else if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                let ch = chars[i];
                advance(&mut i, &mut line, &mut col, ch);
            }
        } else if is_ident_start(c) {
            let mut s = String::new();
            while i < chars.len() && is_ident_continue(chars[i]) {
                let ch = chars[i];
                s.push(ch);
                advance(&mut i, &mut line, &mut col, ch);
            }
            out.push((Tok::Ident(s), pos));
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                let ch = chars[i];
                s.push(ch);
                advance(&mut i, &mut line, &mut col, ch);
            }
            out.push((Tok::Int(s), pos));
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col, c);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(ParseErrors::one(pos, ParseErrorKind::Lexical, "unterminated string")),
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col, '"');
                        break;
                    }
                    Some('\\') => {
                        advance(&mut i, &mut line, &mut col, '\\');
                        match chars.get(i) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                advance(&mut i, &mut line, &mut col, e);
                            }
                            Some('n') => {
                                s.push('\n');
                                advance(&mut i, &mut line, &mut col, 'n');
                            }
                            _ => {
                                return Err(ParseErrors::one(
                                    Pos { line, col },
                                    ParseErrorKind::Lexical,
                                    "unknown escape in string",
                                ))
                            }
                        }
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            out.push((Tok::Str(s), pos));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(sym) => {
                    for ch in sym.chars() {
                        advance(&mut i, &mut line, &mut col, ch);
                    }
                    out.push((Tok::Sym(sym), pos));
                }
                None => {
                    return Err(ParseErrors::one(
                        pos,
                        ParseErrorKind::Lexical,
                        format!("unexpected character {c:?}"),
                    ))
                }
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

// ---------------------------------------------------------------- documents

/// A formula as stated alongside its degree-consistent replacement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub id: String,
    pub pos: Pos,
    pub stated: Option<(Generator, Polynomial)>,
    pub corrected: Option<(Generator, Polynomial)>,
    pub note: Option<String>,
}

impl Discrepancy {
    /// The degree diagnostic of the stated formula, if it has one.
    pub fn stated_violation(&self) -> Option<Violation> {
        self.stated.as_ref().and_then(|(g, dg)| degree_violation(g, dg))
    }

    pub fn corrected_violation(&self) -> Option<Violation> {
        self.corrected.as_ref().and_then(|(g, dg)| degree_violation(g, dg))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub name: String,
    pub data: PontryaginData,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedPresentation {
    pub name: String,
    pub presentation: RingPresentation,
}

/// Everything defined by one source text, in definition order per kind.
/// Biquotient and bundle blocks also contribute their model to `models`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub models: Vec<FreeCdga>,
    pub morphisms: Vec<Morphism>,
    pub biquotients: Vec<ClassifyingData>,
    pub bundles: Vec<Bundle>,
    pub presentations: Vec<NamedPresentation>,
    pub discrepancies: Vec<Discrepancy>,
}

impl Document {
    pub fn model(&self, name: &str) -> Option<&FreeCdga> {
        self.models.iter().find(|m| m.name() == name)
    }

    pub fn morphism(&self, name: &str) -> Option<&Morphism> {
        self.morphisms.iter().find(|m| m.name() == name)
    }

    pub fn biquotient(&self, name: &str) -> Option<&ClassifyingData> {
        self.biquotients.iter().find(|b| b.name == name)
    }

    pub fn bundle(&self, name: &str) -> Option<&Bundle> {
        self.bundles.iter().find(|b| b.name == name)
    }

    pub fn presentation(&self, name: &str) -> Option<&RingPresentation> {
        self.presentations
            .iter()
            .find(|p| p.name == name)
            .map(|p| &p.presentation)
    }

    pub fn discrepancy(&self, id: &str) -> Option<&Discrepancy> {
        self.discrepancies.iter().find(|d| d.id == id)
    }
}

type Scope = BTreeMap<String, Generator>;

fn scope_of(gens: &[Generator]) -> Scope {
    gens.iter().map(|g| (g.name().to_string(), g.clone())).collect()
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    idx: usize,
    doc: Document,
}

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(text)?,
            idx: 0,
            doc: Document::default(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.idx].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.idx].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseErrors {
        ParseErrors::one(
            self.pos(),
            ParseErrorKind::Syntax,
            format!("expected {expected}, found {}", self.peek()),
        )
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn at_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<Pos> {
        if self.at_sym(s) {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<Pos> {
        if self.at_keyword(k) {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(&format!("`{k}`")))
        }
    }

    fn ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().1)),
            _ => Err(self.unexpected("an identifier")),
        }
    }

    /// An identifier or a quoted string.
    fn name(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) => Ok((s, self.bump().1)),
            _ => Err(self.unexpected("a name")),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("a string")),
        }
    }

    fn uint(&mut self) -> PResult<(u32, Pos)> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let pos = self.bump().1;
                s.parse()
                    .map(|n| (n, pos))
                    .map_err(|_| ParseErrors::semantic(pos, format!("integer {s} is too large")))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn generator_ref(&mut self, scope: &Scope) -> PResult<(Generator, Pos)> {
        let (name, pos) = self.ident()?;
        match scope.get(&name) {
            Some(g) => Ok((g.clone(), pos)),
            None => Err(ParseErrors::semantic(pos, format!("unknown generator {name}"))),
        }
    }

    // ---- expressions

    fn expr(&mut self, scope: &Scope) -> PResult<Polynomial> {
        let mut acc = Polynomial::zero();
        let mut negate = if self.eat_sym("-") {
            true
        } else {
            self.eat_sym("+");
            false
        };
        loop {
            let t = self.term(scope)?;
            if negate {
                acc -= &t;
            } else {
                acc += &t;
            }
            if self.eat_sym("+") {
                negate = false;
            } else if self.eat_sym("-") {
                negate = true;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self, scope: &Scope) -> PResult<Polynomial> {
        let mut acc = self.factor(scope)?;
        while self.eat_sym("*") {
            let f = self.factor(scope)?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self, scope: &Scope) -> PResult<Polynomial> {
        let base = match self.peek().clone() {
            Tok::Int(_) => Polynomial::constant(self.rational()?),
            Tok::Ident(_) => Polynomial::generator(&self.generator_ref(scope)?.0),
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr(scope)?;
                self.expect_sym(")")?;
                e
            }
            _ => return Err(self.unexpected("a coefficient, generator or `(`")),
        };
        if self.eat_sym("^") {
            let (k, _) = self.uint()?;
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn rational(&mut self) -> PResult<Scalar> {
        let (num, _) = self.bigint()?;
        if self.at_sym("/") {
            self.bump();
            let (den, pos) = self.bigint()?;
            if den.is_zero() {
                return Err(ParseErrors::semantic(pos, "division by zero"));
            }
            Ok(Scalar::new(num, den))
        } else {
            Ok(Scalar::from_integer(num))
        }
    }

    fn bigint(&mut self) -> PResult<(BigInt, Pos)> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let pos = self.bump().1;
                Ok((s.parse().expect("digits"), pos))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    // ---- blocks

    fn document(&mut self) -> PResult<()> {
        loop {
            match self.peek().clone() {
                Tok::Eof => return Ok(()),
                Tok::Ident(k) => match k.as_str() {
                    "model" => {
                        let m = self.model_block()?;
                        self.register_model(m.0, m.1)?;
                    }
                    "morphism" => self.morphism_block()?,
                    "biquotient" => self.biquotient_block()?,
                    "bundle" => self.bundle_block()?,
                    "relations" => self.relations_block()?,
                    "discrepancy" => self.discrepancy_block()?,
                    _ => {
                        return Err(self
                            .unexpected("`model`, `morphism`, `biquotient`, `bundle`, `relations` or `discrepancy`"))
                    }
                },
                _ => return Err(self.unexpected("a block keyword")),
            }
        }
    }

    fn register_model(&mut self, model: FreeCdga, pos: Pos) -> PResult<()> {
        if self.doc.model(model.name()).is_some() {
            return Err(ParseErrors::semantic(
                pos,
                format!("model {} is defined twice", model.name()),
            ));
        }
        self.doc.models.push(model);
        Ok(())
    }

    fn lookup_model(&mut self) -> PResult<FreeCdga> {
        let (name, pos) = self.name()?;
        self.doc
            .model(&name)
            .cloned()
            .ok_or_else(|| ParseErrors::semantic(pos, format!("unknown model {name}")))
    }

    /// `gen a, b : 4;` after the keyword. Adds to `scope`.
    fn gen_decl(&mut self, scope: &mut Scope, out: &mut Vec<Generator>) -> PResult<Vec<Generator>> {
        let mut names = vec![self.ident()?];
        while self.eat_sym(",") {
            names.push(self.ident()?);
        }
        self.expect_sym(":")?;
        let (degree, dpos) = self.uint()?;
        self.expect_sym(";")?;
        let mut declared = Vec::new();
        for (name, pos) in names {
            if scope.contains_key(&name) {
                return Err(ParseErrors::semantic(pos, format!("generator {name} declared twice")));
            }
            let g = Generator::try_new(&name, degree).map_err(|e| ParseErrors::semantic(dpos, e.to_string()))?;
            scope.insert(name, g.clone());
            out.push(g.clone());
            declared.push(g);
        }
        Ok(declared)
    }

    fn model_block(&mut self) -> PResult<(FreeCdga, Pos)> {
        let start = self.expect_keyword("model")?;
        let (name, _) = self.name()?;
        self.expect_sym("{")?;
        let mut scope = Scope::new();
        let mut gens = Vec::new();
        let mut diffs: Vec<(Generator, Polynomial)> = Vec::new();
        let mut positions: BTreeMap<String, Pos> = BTreeMap::new();
        while !self.eat_sym("}") {
            if self.at_keyword("gen") {
                self.bump();
                self.gen_decl(&mut scope, &mut gens)?;
            } else if self.at_keyword("d") {
                self.bump();
                let (g, pos) = self.generator_ref(&scope)?;
                if positions.contains_key(g.name()) {
                    return Err(ParseErrors::semantic(
                        pos,
                        format!("differential of {g} assigned twice"),
                    ));
                }
                self.expect_sym("=")?;
                let dg = self.expr(&scope)?;
                self.expect_sym(";")?;
                positions.insert(g.name().to_string(), pos);
                diffs.push((g, dg));
            } else {
                return Err(self.unexpected("`gen`, `d` or `}`"));
            }
        }
        let model = FreeCdga::new(name, gens, diffs).map_err(|e| ParseErrors::semantic(start, e.to_string()))?;
        if let Err(vs) = model.validate() {
            let mut errs: Vec<ParseError> = vs
                .iter()
                .map(|v| ParseError {
                    pos: positions.get(violation_generator(v)).copied().unwrap_or(start),
                    kind: ParseErrorKind::Semantic,
                    message: v.to_string(),
                })
                .collect();
            errs.sort_by_key(|e| e.pos);
            return Err(ParseErrors(errs));
        }
        Ok((model, start))
    }

    fn morphism_block(&mut self) -> PResult<()> {
        let start = self.expect_keyword("morphism")?;
        let (name, _) = self.name()?;
        self.expect_sym(":")?;
        let source = self.lookup_model()?;
        self.expect_sym("->")?;
        let target = self.lookup_model()?;
        let unchecked = if self.at_keyword("unchecked") {
            self.bump();
            true
        } else {
            false
        };
        self.expect_sym("{")?;
        let src_scope = scope_of(source.generators());
        let dst_scope = scope_of(target.generators());
        let mut images = Vec::new();
        let mut positions: BTreeMap<String, Pos> = BTreeMap::new();
        while !self.eat_sym("}") {
            let (g, pos) = self.generator_ref(&src_scope)?;
            if positions.contains_key(g.name()) {
                return Err(ParseErrors::semantic(pos, format!("image of {g} assigned twice")));
            }
            self.expect_sym("->")?;
            let img = self.expr(&dst_scope)?;
            self.expect_sym(";")?;
            positions.insert(g.name().to_string(), pos);
            images.push((g, img));
        }
        let m = Morphism::new(name, source, target, images).map_err(|e| ParseErrors::semantic(start, e.to_string()))?;
        if let Err(vs) = m.compose_and_check() {
            let mut errs: Vec<ParseError> = vs
                .iter()
                .filter(|v| !unchecked || matches!(v, MorphismViolation::ImageDegree { .. }))
                .map(|v| {
                    let g = match v {
                        MorphismViolation::ImageDegree { generator, .. }
                        | MorphismViolation::ChainCondition { generator, .. } => generator,
                    };
                    ParseError {
                        pos: positions.get(g).copied().unwrap_or(start),
                        kind: ParseErrorKind::Semantic,
                        message: v.to_string(),
                    }
                })
                .collect();
            if !errs.is_empty() {
                errs.sort_by_key(|e| e.pos);
                return Err(ParseErrors(errs));
            }
        }
        if self.doc.morphism(m.name()).is_some() {
            return Err(ParseErrors::semantic(
                start,
                format!("morphism {} is defined twice", m.name()),
            ));
        }
        self.doc.morphisms.push(m);
        Ok(())
    }

    fn biquotient_block(&mut self) -> PResult<()> {
        let start = self.expect_keyword("biquotient")?;
        let (name, _) = self.name()?;
        self.expect_sym("{")?;
        let mut data = ClassifyingData {
            name,
            ..ClassifyingData::default()
        };
        let (mut hs, mut ks, mut vs) = (Scope::new(), Scope::new(), Scope::new());
        let mut all = Scope::new();
        while !self.eat_sym("}") {
            let (kw, kpos) = self.ident()?;
            match kw.as_str() {
                "hgen" | "kgen" => {
                    let (scope, out) = if kw == "hgen" {
                        (&mut hs, &mut data.wh)
                    } else {
                        (&mut ks, &mut data.wk)
                    };
                    let pos = self.pos();
                    for g in self.gen_decl(scope, out)? {
                        if all.insert(g.name().to_string(), g.clone()).is_some() {
                            return Err(ParseErrors::semantic(pos, format!("generator {g} declared twice")));
                        }
                    }
                }
                "vgen" => {
                    let (vname, vpos) = self.ident()?;
                    self.expect_sym(":")?;
                    let (degree, dpos) = self.uint()?;
                    let suspension = if self.at_keyword("as") {
                        self.bump();
                        Some(self.ident()?)
                    } else {
                        None
                    };
                    self.expect_sym(";")?;
                    if vs.contains_key(&vname) {
                        return Err(ParseErrors::semantic(vpos, format!("generator {vname} declared twice")));
                    }
                    let g =
                        Generator::try_new(&vname, degree).map_err(|e| ParseErrors::semantic(dpos, e.to_string()))?;
                    vs.insert(vname, g.clone());
                    let s = match suspension {
                        Some((s, _)) => SuspendedGenerator::named(g, s),
                        None => SuspendedGenerator::new(g),
                    };
                    let sname = s.suspended().name().to_string();
                    if all.insert(sname.clone(), s.suspended()).is_some() {
                        return Err(ParseErrors::semantic(vpos, format!("generator {sname} declared twice")));
                    }
                    data.v.push(s);
                }
                "phiH" | "phiK" => {
                    let (v, pos) = self.generator_ref(&vs)?;
                    self.expect_sym("=")?;
                    let scope = if kw == "phiH" { &hs } else { &ks };
                    let img = self.expr(scope)?;
                    self.expect_sym(";")?;
                    if !img.is_homogeneous_of(v.degree()) {
                        return Err(ParseErrors::semantic(
                            pos,
                            format!(
                                "{kw}({v}) = {img} has degrees {:?}, expected {}",
                                img.degrees(),
                                v.degree()
                            ),
                        ));
                    }
                    let map = if kw == "phiH" { &mut data.phi_h } else { &mut data.phi_k };
                    if map.insert(v.clone(), img).is_some() {
                        return Err(ParseErrors::semantic(pos, format!("{kw}({v}) assigned twice")));
                    }
                }
                _ => {
                    return Err(ParseErrors::one(
                        kpos,
                        ParseErrorKind::Syntax,
                        format!("expected `hgen`, `kgen`, `vgen`, `phiH`, `phiK` or `}}`, found identifier `{kw}`"),
                    ))
                }
            }
        }
        let model = biquotient_model(&data).map_err(|e| ParseErrors::semantic(start, e.to_string()))?;
        self.register_model(model, start)?;
        self.doc.biquotients.push(data);
        Ok(())
    }

    /// `p<i> = EXPR;` statements against a base scope, until `}`.
    fn pontryagin_body(&mut self, base: &FreeCdga, rank: &mut Option<u32>) -> PResult<Vec<Polynomial>> {
        let scope = scope_of(base.generators());
        let mut classes: BTreeMap<u32, (Polynomial, Pos)> = BTreeMap::new();
        while !self.eat_sym("}") {
            let (kw, pos) = self.ident()?;
            if kw == "rank" {
                let (n, _) = self.uint()?;
                self.expect_sym(";")?;
                *rank = Some(n);
                continue;
            }
            let index = kw
                .strip_prefix('p')
                .and_then(|s| s.parse::<u32>().ok())
                .filter(|i| *i >= 1)
                .ok_or_else(|| {
                    ParseErrors::one(
                        pos,
                        ParseErrorKind::Syntax,
                        format!("expected `rank`, `p<i>` or `}}`, found identifier `{kw}`"),
                    )
                })?;
            self.expect_sym("=")?;
            let p = self.expr(&scope)?;
            self.expect_sym(";")?;
            if !p.is_homogeneous_of(4 * index) {
                return Err(ParseErrors::semantic(
                    pos,
                    format!("{kw} = {p} has degrees {:?}, expected {}", p.degrees(), 4 * index),
                ));
            }
            if classes.insert(index, (p, pos)).is_some() {
                return Err(ParseErrors::semantic(pos, format!("{kw} assigned twice")));
            }
        }
        let top = classes.keys().next_back().copied().unwrap_or(0);
        Ok((1..=top)
            .map(|i| classes.remove(&i).map(|(p, _)| p).unwrap_or_else(Polynomial::zero))
            .collect())
    }

    fn bundle_block(&mut self) -> PResult<()> {
        let start = self.expect_keyword("bundle")?;
        let (name, _) = self.name()?;
        self.expect_sym("{")?;
        self.expect_keyword("base")?;
        let base = self.lookup_model()?;
        self.expect_sym(";")?;
        let mut rank = None;
        let classes = self.pontryagin_body(&base, &mut rank)?;
        let rank = rank.ok_or_else(|| ParseErrors::semantic(start, "bundle needs a `rank n;` statement"))?;
        let data = PontryaginData { base, classes, rank };
        let model = projectivize(&data)
            .map_err(|e| ParseErrors::semantic(start, e.to_string()))?
            .with_name(name.clone());
        self.register_model(model, start)?;
        self.doc.bundles.push(Bundle { name, data });
        Ok(())
    }

    fn relations_block(&mut self) -> PResult<()> {
        let start = self.expect_keyword("relations")?;
        let (name, _) = self.name()?;
        self.expect_sym("{")?;
        let mut scope = Scope::new();
        let mut gens = Vec::new();
        let mut rels = Vec::new();
        while !self.eat_sym("}") {
            if self.at_keyword("gen") {
                self.bump();
                self.gen_decl(&mut scope, &mut gens)?;
            } else {
                self.expect_keyword("rel")?;
                rels.push(self.expr(&scope)?);
                self.expect_sym(";")?;
            }
        }
        let presentation =
            RingPresentation::new(gens, rels).map_err(|e| ParseErrors::semantic(start, e.to_string()))?;
        self.doc.presentations.push(NamedPresentation { name, presentation });
        Ok(())
    }

    fn discrepancy_block(&mut self) -> PResult<()> {
        let pos = self.expect_keyword("discrepancy")?;
        let (id, _) = self.name()?;
        self.expect_sym("{")?;
        let mut scope = Scope::new();
        let mut gens = Vec::new();
        let mut d = Discrepancy {
            id,
            pos,
            stated: None,
            corrected: None,
            note: None,
        };
        while !self.eat_sym("}") {
            let (kw, kpos) = self.ident()?;
            match kw.as_str() {
                "gen" => {
                    self.gen_decl(&mut scope, &mut gens)?;
                }
                "from" => {
                    let m = self.lookup_model()?;
                    self.expect_sym(";")?;
                    for g in m.generators() {
                        scope.entry(g.name().to_string()).or_insert_with(|| g.clone());
                    }
                }
                "stated" | "corrected" => {
                    self.expect_keyword("d")?;
                    let (g, _) = self.generator_ref(&scope)?;
                    self.expect_sym("=")?;
                    let dg = self.expr(&scope)?;
                    self.expect_sym(";")?;
                    let slot = if kw == "stated" {
                        &mut d.stated
                    } else {
                        &mut d.corrected
                    };
                    *slot = Some((g, dg));
                }
                "note" => {
                    d.note = Some(self.string()?);
                    self.expect_sym(";")?;
                }
                _ => {
                    return Err(ParseErrors::one(
                        kpos,
                        ParseErrorKind::Syntax,
                        format!(
                            "expected `gen`, `from`, `stated`, `corrected`, `note` or `}}`, found identifier `{kw}`"
                        ),
                    ))
                }
            }
        }
        if let Some(v) = d.corrected_violation() {
            return Err(ParseErrors::semantic(
                pos,
                format!("corrected formula is itself invalid: {v}"),
            ));
        }
        self.doc.discrepancies.push(d);
        Ok(())
    }
}

fn violation_generator(v: &Violation) -> &str {
    match v {
        Violation::Inhomogeneous { generator, .. }
        | Violation::WrongDegree { generator, .. }
        | Violation::NotClosed { generator, .. } => generator,
    }
}

/// Parses a whole document.
pub fn parse_document(text: &str) -> PResult<Document> {
    let mut p = Parser::new(text)?;
    p.document()?;
    Ok(p.doc)
}

/// Parses a text consisting of exactly one `model` block.
pub fn parse_model(text: &str) -> PResult<FreeCdga> {
    let mut p = Parser::new(text)?;
    let (m, _) = p.model_block()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(m)
}

/// Parses a document whose last block is a morphism and returns it. Its
/// source and target must be defined earlier in the same text.
pub fn parse_morphism(text: &str) -> PResult<Morphism> {
    let doc = parse_document(text)?;
    doc.morphisms
        .last()
        .cloned()
        .ok_or_else(|| ParseErrors::semantic(Pos { line: 1, col: 1 }, "no morphism block found"))
}

/// Parses `pontryagin { [rank n;] p1 = …; p2 = …; }` over `base`.
/// Returns the rank if stated and the classes `p_1, …, p_k`.
pub fn parse_pontryagin(text: &str, base: &FreeCdga) -> PResult<(Option<u32>, Vec<Polynomial>)> {
    let mut p = Parser::new(text)?;
    p.expect_keyword("pontryagin")?;
    p.expect_sym("{")?;
    let mut rank = None;
    let classes = p.pontryagin_body(base, &mut rank)?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok((rank, classes))
}

/// Parses `;`-terminated relations over the given generators.
pub fn parse_relations(text: &str, gens: &[Generator]) -> PResult<Vec<Polynomial>> {
    let mut p = Parser::new(text)?;
    let scope = scope_of(gens);
    let mut rels = Vec::new();
    while *p.peek() != Tok::Eof {
        if p.at_keyword("rel") && !scope.contains_key("rel") {
            p.bump();
        }
        rels.push(p.expr(&scope)?);
        p.expect_sym(";")?;
    }
    Ok(rels)
}

/// Parses a comma-separated generator list such as `x4:4, y4:4`.
pub fn parse_generator_spec(text: &str) -> PResult<Vec<Generator>> {
    let mut p = Parser::new(text)?;
    let mut scope = Scope::new();
    let mut out = Vec::new();
    while *p.peek() != Tok::Eof {
        let (name, pos) = p.ident()?;
        p.expect_sym(":")?;
        let (degree, dpos) = p.uint()?;
        if scope.contains_key(&name) {
            return Err(ParseErrors::semantic(pos, format!("generator {name} declared twice")));
        }
        let g = Generator::try_new(&name, degree).map_err(|e| ParseErrors::semantic(dpos, e.to_string()))?;
        scope.insert(name, g.clone());
        out.push(g);
        if !p.eat_sym(",") && *p.peek() != Tok::Eof {
            return Err(p.unexpected("`,` or end of input"));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- rendering

fn render_name(name: &str) -> String {
    let mut chars = name.chars();
    let plain = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_continue);
    if plain {
        name.to_string()
    } else {
        format!("{name:?}")
    }
}

/// Text that [`parse_model`] turns back into an equal model.
pub fn render_model(model: &FreeCdga) -> String {
    let mut out = format!("model {} {{\n", render_name(model.name()));
    for g in model.generators() {
        out.push_str(&format!("  gen {} : {};\n", g.name(), g.degree()));
    }
    for (g, dg) in model.differentials() {
        if !dg.is_zero() {
            out.push_str(&format!("  d {g} = {dg};\n"));
        }
    }
    out.push_str("}\n");
    out
}

/// The morphism block alone; source and target must be rendered separately.
pub fn render_morphism(m: &Morphism) -> String {
    let mut out = format!(
        "morphism {} : {} -> {} {{\n",
        render_name(m.name()),
        render_name(m.source().name()),
        render_name(m.target().name())
    );
    for (g, img) in m.images() {
        out.push_str(&format!("  {g} -> {img};\n"));
    }
    out.push_str("}\n");
    out
}

pub fn render_biquotient(data: &ClassifyingData) -> String {
    let mut out = format!("biquotient {} {{\n", render_name(&data.name));
    for (kw, gens) in [("hgen", &data.wh), ("kgen", &data.wk)] {
        for g in gens {
            out.push_str(&format!("  {kw} {} : {};\n", g.name(), g.degree()));
        }
    }
    for s in &data.v {
        let g = &s.generator;
        out.push_str(&format!(
            "  vgen {} : {} as {};\n",
            g.name(),
            g.degree(),
            s.suspended().name()
        ));
    }
    for s in &data.v {
        for (kw, map) in [("phiH", &data.phi_h), ("phiK", &data.phi_k)] {
            if let Some(img) = map.get(&s.generator).filter(|p| !p.is_zero()) {
                out.push_str(&format!("  {kw} {} = {img};\n", s.generator));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// The base model must be rendered separately under its own name.
pub fn render_bundle(name: &str, data: &PontryaginData) -> String {
    let mut out = format!(
        "bundle {} {{\n  base {};\n  rank {};\n",
        render_name(name),
        render_name(data.base.name()),
        data.rank
    );
    for (i, p) in data.classes.iter().enumerate() {
        if !p.is_zero() {
            out.push_str(&format!("  p{} = {p};\n", i + 1));
        }
    }
    out.push_str("}\n");
    out
}

/// Self-contained: declares every generator the formulas mention.
pub fn render_discrepancy(d: &Discrepancy) -> String {
    let mut out = format!("discrepancy {} {{\n", render_name(&d.id));
    let mut gens = std::collections::BTreeSet::new();
    for (g, dg) in d.stated.iter().chain(&d.corrected) {
        gens.insert(g.clone());
        gens.extend(dg.generators());
    }
    for g in &gens {
        out.push_str(&format!("  gen {} : {};\n", g.name(), g.degree()));
    }
    for (kw, f) in [("stated", &d.stated), ("corrected", &d.corrected)] {
        if let Some((g, dg)) = f {
            out.push_str(&format!("  {kw} d {g} = {dg};\n"));
        }
    }
    if let Some(note) = &d.note {
        out.push_str(&format!("  note {note:?};\n"));
    }
    out.push_str("}\n");
    out
}

impl From<ParseErrors> for Error {
    fn from(e: ParseErrors) -> Self {
        Error::InvalidInput(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::betti;
    use crate::constructors::hp_model_with;
    use crate::gradedalg::ratio;

    #[test]
    fn parses_hp2() {
        let m = parse_model("model HP2 { gen y4 : 4; gen y11 : 11; d y11 = y4^3; }").unwrap();
        assert_eq!(m, hp_model_with(2, "y").unwrap());
        assert_eq!(m.name(), "HP2");
    }

    #[test]
    fn empty_model_is_trivial() {
        let m = parse_model("model Empty { }").unwrap();
        assert_eq!(m, FreeCdga::trivial());
        assert_eq!(betti(&m, 4).unwrap().betti_numbers(), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn inhomogeneous_differential_is_positioned() {
        let text = "model Bad {\n  gen v7 : 7; gen z8 : 8; gen b4 : 4;\n  d v7 = z8 - 3*b4^4;\n}";
        let err = parse_model(text).unwrap_err();
        let e = err.first();
        assert_eq!(e.pos, Pos { line: 3, col: 5 });
        assert_eq!(e.kind, ParseErrorKind::Semantic);
        assert!(
            e.message.contains("offending term -3*b4^4 has degree 16"),
            "{}",
            e.message
        );
    }

    #[test]
    fn unknown_and_undeclared_generators() {
        let err = parse_model("model M { d x = 0; gen x : 3; }").unwrap_err();
        assert_eq!(err.first().pos, Pos { line: 1, col: 13 });
        assert!(err.first().message.contains("unknown generator x"));
        let err = parse_model("model M { gen x : 3;\n d x = y4; }").unwrap_err();
        assert_eq!(err.first().pos, Pos { line: 2, col: 8 });
    }

    #[test]
    fn syntax_and_lexical_errors() {
        let err = parse_model("model M { gen x 3; }").unwrap_err();
        assert_eq!(err.first().kind, ParseErrorKind::Syntax);
        assert_eq!(err.first().pos, Pos { line: 1, col: 17 });
        let err = parse_model("model M { gen x : 3 ; d x = $; }").unwrap_err();
        assert_eq!(err.first().kind, ParseErrorKind::Lexical);
        assert_eq!(err.first().pos, Pos { line: 1, col: 29 });
        let err = parse_model("model M { gen a : 4; gen b : 4; gen x : 7; d x = a^2/0; }").unwrap_err();
        assert_eq!(err.first().kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn expression_grammar() {
        let text = "model M { gen a, b : 4; gen x : 7; gen c : 3; d x = -(a - 1/2*b)^2 + 3/2 * a*b; }";
        let m = parse_model(text).unwrap();
        let a = Polynomial::generator(m.gen("a").unwrap());
        let b = Polynomial::generator(m.gen("b").unwrap());
        let expected = -(&(&a - &b.scale(&ratio(1, 2))).pow(2)) + (&a * &b).scale(&ratio(3, 2));
        assert_eq!(m.d(m.gen("x").unwrap()).unwrap(), &expected);
        // ^ binds tighter than unary minus and *
        let m = parse_model("model M { gen a : 2; gen x : 3; d x = 2*a^2 - a*a; }").unwrap();
        assert_eq!(m.d(m.gen("x").unwrap()).unwrap(), &a_sq(&m));
    }

    fn a_sq(m: &FreeCdga) -> Polynomial {
        Polynomial::generator(m.gen("a").unwrap()).pow(2)
    }

    #[test]
    fn round_trip_through_rendering() {
        let text = "model \"P(HP2)\" { gen y4, x4 : 4; gen x7 : 7; gen y11 : 11;\n d x7 = x4^2 + x4*y4 + y4^2; d y11 = y4^3; }";
        let m = parse_model(text).unwrap();
        let again = parse_model(&render_model(&m)).unwrap();
        assert_eq!(again, m);
        assert_eq!(again.name(), "P(HP2)");
    }

    #[test]
    fn primes_in_names() {
        let m = parse_model("model M { gen x : 4; gen x' : 4; gen v : 3; d v = x - x'; }").unwrap();
        assert_eq!(m.generators().len(), 3);
    }

    #[test]
    fn morphisms_are_chain_checked() {
        let models = "model S { gen b4 : 4; gen v15 : 15; d v15 = -b4^4; }\n\
                      model T { gen x4 : 4; gen a15 : 15; d a15 = x4^4; }\n";
        let ok = format!("{models}morphism eta : S -> T {{ b4 -> x4; v15 -> -a15; }}");
        let m = parse_morphism(&ok).unwrap();
        assert_eq!(m.name(), "eta");
        let bad = format!("{models}morphism eta : S -> T {{\n b4 -> x4;\n v15 -> a15; }}");
        let err = parse_morphism(&bad).unwrap_err();
        assert_eq!(err.first().pos, Pos { line: 5, col: 2 });
        assert!(err.first().message.contains("chain condition fails on v15"), "{err}");
        let unchecked = format!("{models}morphism eta : S -> T unchecked {{ b4 -> x4; v15 -> a15; }}");
        assert!(parse_morphism(&unchecked).is_ok());
        let wrong_degree = format!("{models}morphism eta : S -> T {{ b4 -> x4^2; }}");
        let err = parse_morphism(&wrong_degree).unwrap_err();
        assert!(err.errors().iter().any(|e| e.message.contains("image of b4")), "{err}");
        let rendered = format!("{models}{}", render_morphism(&m));
        assert_eq!(parse_morphism(&rendered).unwrap(), m);
    }

    #[test]
    fn biquotient_block_builds_the_model() {
        let text = "biquotient B {\n hgen a4, c4 : 4;\n kgen b4 : 4;\n vgen v4 : 4 as v3;\n vgen v8 : 8 as v7;\n vgen v12 : 12 as v11;\n\
                    phiH v4 = a4 + c4; phiK v4 = 3*b4;\n phiH v8 = a4*c4; phiK v8 = 3*b4^2;\n phiK v12 = b4^3;\n}";
        let doc = parse_document(text).unwrap();
        let m = doc.model("B").unwrap();
        let v3 = m.gen("v3").unwrap();
        assert_eq!(m.d(v3).unwrap().to_string(), "a4 - 3*b4 + c4");
        assert_eq!(m.d(m.gen("v11").unwrap()).unwrap().to_string(), "-b4^3");
        assert_eq!(doc.biquotient("B").unwrap().v.len(), 3);
        let err = parse_document("biquotient B { hgen a4 : 4; vgen v8 : 8; phiH v8 = a4; }").unwrap_err();
        assert!(err.first().message.contains("phiH(v8)"), "{err}");
    }

    #[test]
    fn bundle_and_pontryagin_blocks() {
        let text = "model HP2 { gen y4 : 4; gen y11 : 11; d y11 = y4^3; }\n\
                    bundle E { base HP2; rank 2; p1 = y4; p2 = y4^2; }";
        let doc = parse_document(text).unwrap();
        let e = doc.model("E").unwrap();
        assert_eq!(e.d(e.gen("x7").unwrap()).unwrap().to_string(), "x4^2 + x4*y4 + y4^2");
        let base = doc.model("HP2").unwrap();
        let (rank, classes) = parse_pontryagin("pontryagin { p2 = y4^2; }", base).unwrap();
        assert_eq!(rank, None);
        assert_eq!(classes.len(), 2);
        assert!(classes[0].is_zero());
        let err = parse_pontryagin("pontryagin { p1 = y4^2; }", base).unwrap_err();
        assert!(err.first().message.contains("expected 4"));
    }

    #[test]
    fn relations_and_generator_specs() {
        let gens = parse_generator_spec("x4:4, y4:4").unwrap();
        let rels = parse_relations("x4^2 + x4*y4 + y4^2;\n rel y4^3;", &gens).unwrap();
        assert_eq!(rels.len(), 2);
        let doc = parse_document("relations R { gen x4, y4 : 4; rel x4^2 + x4*y4 + y4^2; rel y4^3; }").unwrap();
        assert_eq!(doc.presentation("R").unwrap().relations(), &rels[..]);
        assert!(parse_generator_spec("x4:4 y4:4").is_err());
    }

    #[test]
    fn discrepancy_blocks_keep_the_stated_formula() {
        let text = "discrepancy dv7 {\n gen v7 : 7; gen z8 : 8; gen b4 : 4;\n stated d v7 = z8 - 3*b4^4;\n corrected d v7 = z8 - 3*b4^2;\n note \"exponent\";\n}";
        let doc = parse_document(text).unwrap();
        let d = doc.discrepancy("dv7").unwrap();
        let v = d.stated_violation().unwrap();
        assert!(v.to_string().contains("offending term -3*b4^4 has degree 16"), "{v}");
        assert!(d.corrected_violation().is_none());
        assert_eq!(d.note.as_deref(), Some("exponent"));
        let bad = "discrepancy x { gen v7 : 7; gen b4 : 4; corrected d v7 = b4; }";
        assert!(parse_document(bad).is_err());
    }
}
