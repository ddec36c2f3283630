//! Line-oriented presentation files and the element grammar.
//!
//! ```text
//! # comment
//! n = 2
//! components = 1
//! chord a : degree 1, from 1, to 1
//! d a = 0
//! H 2 0 = s^2 hb^-1 [ ^a* x1* ]
//! ```
//!
//! Directives may appear in any order; `n` and the chords are read before
//! any element is parsed.

use std::fmt;

use sftkit::cyclic_spaces::cyclic_from_raw;
use sftkit::sft_operations::{build_h1, HamiltonianData};
use sftkit::{Chord, Element, Letter, MonoKey, Presentation, RawLetter, SftError, Space, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    /// Lexical or grammar error at a 1-based line and column.
    Syntax { line: usize, col: usize, msg: String },
    /// A well-formed directive that does not make sense (line 0 = whole file).
    Semantic { line: usize, directive: String, msg: String },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { line, col, msg } => write!(f, "line {line}, column {col}: {msg}"),
            ParseError::Semantic { line: 0, msg, .. } => write!(f, "{msg}"),
            ParseError::Semantic { line, directive, msg } => write!(f, "line {line}: `{directive}`: {msg}"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LBr,
    RBr,
    Plus,
    Minus,
    Star,
    Bang,
    Caret,
    Colon,
    Comma,
    Eq,
    Slash,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '[' => Some(Tok::LBr),
            ']' => Some(Tok::RBr),
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '!' => Some(Tok::Bang),
            '^' => Some(Tok::Caret),
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '/' => Some(Tok::Slash),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, col });
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token { tok: Tok::Num(chars[start..i].iter().collect()), col });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), col });
        } else {
            return Err(ParseError::Syntax { line, col, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Token], line: usize, end_col: usize) -> Self {
        Cursor { toks, pos: 0, line, end_col }
    }
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }
    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { line: self.line, col: self.col(), msg: msg.into() })
    }
    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }
    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{kw}`")),
        }
    }
    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err(format!("expected {what}")),
        }
    }
    fn int(&mut self, what: &str) -> Result<i64, ParseError> {
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.peek() {
            Some(Tok::Num(s)) => {
                let col = self.col();
                let v: i64 = s
                    .parse()
                    .map_err(|_| ParseError::Syntax { line: self.line, col, msg: format!("integer {s} out of range") })?;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.err(format!("expected {what}")),
        }
    }
    fn done(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }
}

fn is_basepoint_name(s: &str) -> Option<usize> {
    s.strip_prefix('x').filter(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit())).and_then(|r| r.parse().ok())
}

fn reserved(name: &str) -> bool {
    name == "s" || name == "hb" || is_basepoint_name(name).is_some()
}

/// One parsed term before it is turned into an element.
struct RawTerm {
    coeff: Q,
    letters: Vec<RawLetter>,
    /// Number of `[ ... ]` groups and whether anything but σ/ħ sits outside them.
    groups: usize,
    outside_letters: bool,
    col: usize,
}

fn parse_exponent(cur: &mut Cursor) -> Result<i64, ParseError> {
    if cur.peek() == Some(&Tok::Caret) {
        cur.next();
        cur.int("an integer exponent")
    } else {
        Ok(1)
    }
}

fn parse_letter(cur: &mut Cursor, p: &Presentation) -> Result<RawLetter, ParseError> {
    let excited = if cur.peek() == Some(&Tok::Bang) {
        cur.next();
        true
    } else {
        false
    };
    let col = cur.col();
    let hat = if cur.peek() == Some(&Tok::Caret) {
        cur.next();
        true
    } else {
        false
    };
    let name = cur.ident("a letter")?;
    let dual = if cur.peek() == Some(&Tok::Star) {
        cur.next();
        true
    } else {
        false
    };
    let bad = |msg: String| ParseError::Syntax { line: cur.line, col, msg };
    let letter = if let Some(j) = is_basepoint_name(&name) {
        if hat {
            return Err(bad(format!("basepoint {name} cannot carry a hat")));
        }
        if j < 1 || j > p.m() {
            return Err(bad(format!("basepoint {name} outside components 1..{}", p.m())));
        }
        if dual {
            Letter::x_dual(j)
        } else {
            Letter::x(j)
        }
    } else {
        let i = p.chord_index(&name).ok_or_else(|| bad(format!("unknown chord `{name}`")))?;
        match (hat, dual) {
            (false, false) => Letter::chord(i),
            (true, false) => Letter::hat(i),
            (_, true) => Letter::hat_dual(i),
        }
    };
    Ok(if excited { RawLetter::Excited(letter) } else { RawLetter::Gen(letter) })
}

fn parse_coefficient(cur: &mut Cursor) -> Result<Option<Q>, ParseError> {
    let Some(Tok::Num(num)) = cur.peek().cloned() else { return Ok(None) };
    let col = cur.col();
    cur.next();
    let mut text = num;
    if cur.peek() == Some(&Tok::Slash) {
        cur.next();
        match cur.next() {
            Some(Tok::Num(den)) => text = format!("{text}/{den}"),
            _ => return Err(ParseError::Syntax { line: cur.line, col, msg: "expected a denominator".into() }),
        }
    }
    let q: Q = text.parse().map_err(|_| ParseError::Syntax { line: cur.line, col, msg: format!("bad rational {text}") })?;
    if cur.peek() == Some(&Tok::Star) {
        cur.next();
    }
    Ok(Some(q))
}

fn starts_factor(t: Option<&Tok>) -> bool {
    matches!(t, Some(Tok::Ident(_)) | Some(Tok::LBr) | Some(Tok::Bang) | Some(Tok::Caret))
}

fn parse_term(cur: &mut Cursor, p: &Presentation, sign: bool) -> Result<RawTerm, ParseError> {
    let col = cur.col();
    let parsed = parse_coefficient(cur)?;
    let had_coeff = parsed.is_some();
    let mut coeff = parsed.unwrap_or_else(|| Q::from_integer(1.into()));
    if sign {
        coeff = -coeff;
    }
    let mut term = RawTerm { coeff, letters: Vec::new(), groups: 0, outside_letters: false, col };
    // `1` after a coefficient is the empty word
    if had_coeff && cur.peek() == Some(&Tok::Num("1".into())) {
        cur.next();
        return Ok(term);
    }
    let mut inside = false;
    loop {
        match cur.peek() {
            Some(Tok::LBr) => {
                if inside {
                    return cur.err("nested `[`");
                }
                cur.next();
                inside = true;
                term.groups += 1;
            }
            Some(Tok::RBr) if inside => {
                cur.next();
                inside = false;
            }
            Some(Tok::Ident(s)) if s == "s" => {
                cur.next();
                term.letters.push(RawLetter::Sigma(parse_exponent(cur)?));
            }
            Some(Tok::Ident(s)) if s == "hb" => {
                cur.next();
                term.letters.push(RawLetter::Hbar(parse_exponent(cur)?));
            }
            t if starts_factor(t) => {
                term.letters.push(parse_letter(cur, p)?);
                term.outside_letters |= !inside;
            }
            _ => break,
        }
    }
    if inside {
        return cur.err("missing `]`");
    }
    Ok(term)
}

fn parse_terms(cur: &mut Cursor, p: &Presentation) -> Result<Vec<RawTerm>, ParseError> {
    if cur.peek() == Some(&Tok::Num("0".into())) && cur.peek_at(1).is_none() {
        cur.next();
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut sign = match cur.peek() {
        Some(Tok::Minus) => {
            cur.next();
            true
        }
        Some(Tok::Plus) => {
            cur.next();
            false
        }
        _ => false,
    };
    loop {
        if cur.peek().is_none() {
            return cur.err("expected a term");
        }
        let t = parse_term(cur, p, sign)?;
        if t.letters.is_empty() && t.groups == 0 && cur.toks.get(cur.pos.wrapping_sub(1)).is_some_and(|t| t.tok == Tok::Star) {
            return cur.err("expected a word after `*`");
        }
        terms.push(t);
        match cur.peek() {
            Some(Tok::Plus) => sign = false,
            Some(Tok::Minus) => sign = true,
            None => break,
            _ => return cur.err("expected `+`, `-` or end of element"),
        }
        cur.next();
    }
    Ok(terms)
}

fn build_element(p: &Presentation, terms: Vec<RawTerm>, space: Space, line: usize) -> Result<Element, ParseError> {
    let mut out = Element::zero(space);
    for t in terms {
        let err = |msg: String| ParseError::Syntax { line, col: t.col, msg };
        if space.is_cyclic() {
            if t.groups != 1 || t.outside_letters {
                return Err(err("a cyclic term needs exactly one `[ ... ]` word; only s and hb may stand outside".into()));
            }
            let e = cyclic_from_raw(p, &t.letters, t.coeff.clone(), space).map_err(|e| err(e.to_string()))?;
            out += &e;
        } else {
            if t.groups != 0 {
                return Err(err("this element is linear; drop the brackets".into()));
            }
            let mut word = Vec::new();
            for l in &t.letters {
                match l {
                    RawLetter::Gen(l) => word.push(*l),
                    _ => return Err(err("linear words may only contain generators".into())),
                }
            }
            out.add_term(MonoKey::plain(word), t.coeff.clone());
        }
    }
    Ok(out)
}

/// Parses one element of `space` against a presentation. Errors are reported
/// on line 1 with 1-based columns.
pub fn parse_element(p: &Presentation, text: &str, space: Space) -> Result<Element, ParseError> {
    parse_element_at(p, text, space, 1, 1)
}

fn parse_element_at(p: &Presentation, text: &str, space: Space, line: usize, col0: usize) -> Result<Element, ParseError> {
    let toks = lex(text, line, col0)?;
    let mut cur = Cursor::new(&toks, line, col0 + text.chars().count());
    let terms = parse_terms(&mut cur, p)?;
    cur.done()?;
    build_element(p, terms, space, line)
}

/// A user-supplied Hamiltonian component `H p q`.
#[derive(Debug, Clone)]
pub struct HDirective {
    pub p: usize,
    pub q: usize,
    pub element: Element,
    pub line: usize,
}

/// A parsed presentation file.
#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub presentation: Presentation,
    pub hamiltonians: Vec<HDirective>,
}

impl ParsedFile {
    /// H¹ up to `q_max` plus the user components.
    pub fn hamiltonian(&self, q_max: usize) -> Result<HamiltonianData, SftError> {
        let mut h = build_h1(&self.presentation, q_max)?;
        for d in &self.hamiltonians {
            h.set_higher(&self.presentation, d.p, d.q, &d.element)?;
        }
        Ok(h)
    }

    pub fn has_h20(&self) -> bool {
        self.hamiltonians.iter().any(|d| (d.p, d.q) == (2, 0))
    }
}

struct Line<'a> {
    no: usize,
    text: &'a str,
    toks: Vec<Token>,
}

fn semantic(line: &Line, msg: impl Into<String>) -> ParseError {
    ParseError::Semantic { line: line.no, directive: line.text.trim().to_string(), msg: msg.into() }
}

/// Parses a whole presentation file.
pub fn parse_file(text: &str) -> Result<ParsedFile, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim_end_matches('\r');
        let toks = lex(body, i + 1, 1)?;
        if !toks.is_empty() {
            lines.push(Line { no: i + 1, text: body, toks });
        }
    }

    let mut n: Option<i64> = None;
    let mut m: Option<usize> = None;
    let mut chords: Vec<Chord> = Vec::new();
    let mut chord_lines = Vec::new();
    let mut rest = Vec::new();
    for line in &lines {
        let end = line.text.chars().count() + 1;
        let mut cur = Cursor::new(&line.toks, line.no, end);
        match cur.peek() {
            Some(Tok::Ident(k)) if k == "n" && cur.peek_at(1) == Some(&Tok::Eq) => {
                cur.next();
                cur.next();
                let v = cur.int("an integer")?;
                cur.done()?;
                if n.replace(v).is_some() {
                    return Err(semantic(line, "n given twice"));
                }
            }
            Some(Tok::Ident(k)) if k == "components" => {
                cur.next();
                cur.expect(Tok::Eq, "`=`")?;
                let v = cur.int("an integer")?;
                cur.done()?;
                if v < 1 {
                    return Err(semantic(line, "components must be at least 1"));
                }
                if m.replace(v as usize).is_some() {
                    return Err(semantic(line, "components given twice"));
                }
            }
            Some(Tok::Ident(k)) if k == "chord" => {
                cur.next();
                let name = cur.ident("a chord name")?;
                cur.expect(Tok::Colon, "`:`")?;
                cur.keyword("degree")?;
                let degree = cur.int("an integer degree")?;
                cur.expect(Tok::Comma, "`,`")?;
                cur.keyword("from")?;
                let from = cur.int("a component")?;
                cur.expect(Tok::Comma, "`,`")?;
                cur.keyword("to")?;
                let to = cur.int("a component")?;
                cur.done()?;
                if reserved(&name) {
                    return Err(semantic(line, format!("`{name}` is reserved and cannot name a chord")));
                }
                if from < 1 || to < 1 {
                    return Err(semantic(line, "components are numbered from 1"));
                }
                chords.push(Chord { name, degree, from: from as usize, to: to as usize });
                chord_lines.push(line);
            }
            Some(Tok::Ident(k)) if k == "d" || k == "H" => rest.push(line),
            _ => return Err(ParseError::Syntax { line: line.no, col: cur.col(), msg: "unknown directive".into() }),
        }
    }
    let n = n.ok_or_else(|| ParseError::Semantic { line: 0, directive: String::new(), msg: "missing `n = ...`".into() })?;
    let m = m.unwrap_or(1);
    let mut pres = match Presentation::new(n, m, chords.clone()) {
        Ok(p) => p,
        Err(e) => {
            // point at the offending chord when there is one
            let bad = chords.iter().position(|c| c.from > m || c.to > m).or_else(|| {
                chords.iter().enumerate().position(|(i, c)| chords[..i].iter().any(|d| d.name == c.name))
            });
            return Err(match bad {
                Some(i) => semantic(chord_lines[i], e.to_string()),
                None => ParseError::Semantic { line: 0, directive: String::new(), msg: e.to_string() },
            });
        }
    };

    let mut seen_d = vec![false; chords.len()];
    let mut hamiltonians = Vec::new();
    for line in rest {
        let end = line.text.chars().count() + 1;
        let mut cur = Cursor::new(&line.toks, line.no, end);
        let Some(Tok::Ident(k)) = cur.next() else { unreachable!() };
        let eq_col = line.toks.iter().find(|t| t.tok == Tok::Eq).map(|t| t.col);
        if k == "d" {
            let name = cur.ident("a chord name")?;
            cur.expect(Tok::Eq, "`=`")?;
            let ci = pres.chord_index(&name).ok_or_else(|| semantic(line, format!("unknown chord `{name}`")))?;
            if std::mem::replace(&mut seen_d[ci], true) {
                return Err(semantic(line, format!("d {name} given twice")));
            }
            let col = eq_col.unwrap_or(1) + 1;
            let body: String = line.text.chars().skip(col - 1).collect();
            let image = parse_element_at(&pres, &body, Space::A, line.no, col)?;
            pres.set_differential(ci, image).map_err(|e| semantic(line, e.to_string()))?;
        } else {
            let pp = cur.int("p")?;
            let qq = cur.int("q")?;
            cur.expect(Tok::Eq, "`=`")?;
            if pp < 2 || qq < 0 {
                return Err(semantic(line, "only components H p q with p >= 2 and q >= 0 can be supplied"));
            }
            let col = eq_col.unwrap_or(1) + 1;
            let body: String = line.text.chars().skip(col - 1).collect();
            let element = parse_element_at(&pres, &body, Space::UBal, line.no, col)?;
            hamiltonians.push(HDirective { p: pp as usize, q: qq as usize, element, line: line.no });
        }
    }
    let parsed = ParsedFile { presentation: pres, hamiltonians };
    // validate the user components now so errors carry their line
    let mut h = build_h1(&parsed.presentation, 1).map_err(|e| ParseError::Semantic {
        line: 0,
        directive: String::new(),
        msg: e.to_string(),
    })?;
    for d in &parsed.hamiltonians {
        h.set_higher(&parsed.presentation, d.p, d.q, &d.element).map_err(|e| ParseError::Semantic {
            line: d.line,
            directive: format!("H {} {}", d.p, d.q),
            msg: e.to_string(),
        })?;
    }
    Ok(parsed)
}
