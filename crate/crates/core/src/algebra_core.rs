//! Letters, presentations, monomials and elements.
//!
//! A monomial is stored as `coeff * σ^s ħ^h w` with the σ/ħ letters collected
//! in front of the word. All commutation signs come from [`Parity::pairs_odd`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::SftError;

/// Exact rational coefficients.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Sign `(-1)^k` as a rational.
pub fn sign_q(odd: bool) -> Q {
    if odd {
        -Q::one()
    } else {
        Q::one()
    }
}

/// The five kinds of generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Chord,
    Hat,
    DualHat,
    Basepoint,
    DualBasepoint,
}

/// One letter of the alphabet. Chord-derived letters carry the chord index,
/// basepoint letters carry the (1-based) component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub variant: Variant,
    pub index: usize,
}

impl Letter {
    pub fn chord(i: usize) -> Self {
        Letter { variant: Variant::Chord, index: i }
    }
    pub fn hat(i: usize) -> Self {
        Letter { variant: Variant::Hat, index: i }
    }
    pub fn hat_dual(i: usize) -> Self {
        Letter { variant: Variant::DualHat, index: i }
    }
    pub fn x(j: usize) -> Self {
        Letter { variant: Variant::Basepoint, index: j }
    }
    pub fn x_dual(j: usize) -> Self {
        Letter { variant: Variant::DualBasepoint, index: j }
    }

    pub fn is_chord(self) -> bool {
        self.variant == Variant::Chord
    }
    /// Letters from Ĉ ∪ 𝒳.
    pub fn is_hat_or_x(self) -> bool {
        matches!(self.variant, Variant::Hat | Variant::Basepoint)
    }
    /// Letters from Ĉ* ∪ 𝒳*.
    pub fn is_dual(self) -> bool {
        matches!(self.variant, Variant::DualHat | Variant::DualBasepoint)
    }
    pub fn is_excitable(self) -> bool {
        !self.is_chord()
    }
    /// The dual partner of a hat or basepoint letter, and vice versa.
    pub fn partner(self) -> Option<Letter> {
        let v = match self.variant {
            Variant::Chord => return None,
            Variant::Hat => Variant::DualHat,
            Variant::DualHat => Variant::Hat,
            Variant::Basepoint => Variant::DualBasepoint,
            Variant::DualBasepoint => Variant::Basepoint,
        };
        Some(Letter { variant: v, index: self.index })
    }

    fn sort_key(self) -> (u8, usize, u8) {
        match self.variant {
            Variant::Chord => (0, self.index, 0),
            Variant::Hat => (0, self.index, 1),
            Variant::DualHat => (0, self.index, 2),
            Variant::Basepoint => (1, self.index, 0),
            Variant::DualBasepoint => (1, self.index, 1),
        }
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// Mod-2 data deciding every Koszul sign: degree, the jp count and the st count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Parity {
    pub deg: u8,
    pub jp: u8,
    pub st: u8,
}

impl Parity {
    pub fn new(deg: i64, jp: i64, st: i64) -> Self {
        Parity {
            deg: deg.rem_euclid(2) as u8,
            jp: jp.rem_euclid(2) as u8,
            st: st.rem_euclid(2) as u8,
        }
    }

    /// The symmetric form deciding the sign of swapping two blocks:
    /// `|a||b| + jp(a)jp(b)`.
    pub fn pairs_odd(self, other: Parity) -> bool {
        ((self.deg & other.deg) ^ (self.jp & other.jp)) == 1
    }

    pub fn times(self, k: i64) -> Parity {
        if k.rem_euclid(2) == 0 {
            Parity::default()
        } else {
            self
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, o: Parity) -> Parity {
        Parity { deg: self.deg ^ o.deg, jp: self.jp ^ o.jp, st: self.st ^ o.st }
    }
}

impl AddAssign for Parity {
    fn add_assign(&mut self, o: Parity) {
        *self = *self + o;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chord {
    pub name: String,
    pub degree: i64,
    pub from: usize,
    pub to: usize,
}

/// A DGA given by generators and their differentials.
#[derive(Clone, Debug)]
pub struct Presentation {
    n: i64,
    m: usize,
    chords: Vec<Chord>,
    differential: Vec<Element>,
}

impl Presentation {
    /// Builds a presentation with zero differential.
    pub fn new(n: i64, m: usize, chords: Vec<Chord>) -> Result<Self, SftError> {
        if n < 2 {
            return Err(SftError::Presentation(format!("n must be at least 2, got {n}")));
        }
        if m < 1 {
            return Err(SftError::Presentation("at least one component is required".into()));
        }
        for (i, c) in chords.iter().enumerate() {
            if c.from < 1 || c.from > m || c.to < 1 || c.to > m {
                return Err(SftError::Presentation(format!(
                    "chord {} has endpoints ({}, {}) outside 1..{m}",
                    c.name, c.from, c.to
                )));
            }
            if chords[..i].iter().any(|d| d.name == c.name) {
                return Err(SftError::Presentation(format!("duplicate chord {}", c.name)));
            }
        }
        let differential = chords.iter().map(|_| Element::zero(Space::A)).collect();
        Ok(Presentation { n, m, chords, differential })
    }

    /// Sets `d(chord) = image`, checking degree and endpoints.
    pub fn set_differential(&mut self, chord: usize, image: Element) -> Result<(), SftError> {
        let c = &self.chords[chord];
        for (k, _) in image.iter() {
            if k.sigma != 0 || k.hbar != 0 || k.excited.is_some() {
                return Err(SftError::Presentation(format!("d {} must lie in the algebra", c.name)));
            }
            if k.word.iter().any(|l| !l.is_chord()) {
                return Err(SftError::Presentation(format!("d {} may only contain chords", c.name)));
            }
            if k.word.is_empty() {
                if c.from != c.to || c.degree - 1 != 0 {
                    return Err(SftError::Presentation(format!(
                        "d {}: idempotent term has wrong degree or endpoints",
                        c.name
                    )));
                }
                continue;
            }
            if !self.is_composable(&k.word) {
                return Err(SftError::Presentation(format!("d {}: word is not composable", c.name)));
            }
            let (l, _) = self.ends(k.word[0]);
            let (_, r) = self.ends(*k.word.last().unwrap());
            if (l, r) != (c.from, c.to) {
                return Err(SftError::Presentation(format!(
                    "d {}: term runs from {l} to {r}, expected {} to {}",
                    c.name, c.from, c.to
                )));
            }
            let deg = self.word_degree(&k.word);
            if deg != c.degree - 1 {
                return Err(SftError::Presentation(format!(
                    "d {}: term has degree {deg}, expected {}",
                    c.name,
                    c.degree - 1
                )));
            }
        }
        self.differential[chord] = image;
        Ok(())
    }

    pub fn n(&self) -> i64 {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }
    pub fn chord_index(&self, name: &str) -> Option<usize> {
        self.chords.iter().position(|c| c.name == name)
    }
    pub fn differential(&self, chord: usize) -> &Element {
        &self.differential[chord]
    }
    pub fn hbar_degree(&self) -> i64 {
        self.n - 3
    }

    pub fn degree(&self, l: Letter) -> i64 {
        match l.variant {
            Variant::Chord => self.chords[l.index].degree,
            Variant::Hat => self.chords[l.index].degree + 1,
            Variant::DualHat => self.n - 3 - (self.chords[l.index].degree + 1),
            Variant::Basepoint => 0,
            Variant::DualBasepoint => self.n - 3,
        }
    }

    /// Left and right component index of a letter.
    pub fn ends(&self, l: Letter) -> (usize, usize) {
        match l.variant {
            Variant::Chord | Variant::Hat => {
                let c = &self.chords[l.index];
                (c.from, c.to)
            }
            Variant::DualHat => {
                let c = &self.chords[l.index];
                (c.to, c.from)
            }
            Variant::Basepoint | Variant::DualBasepoint => (l.index, l.index),
        }
    }

    pub fn parity(&self, l: Letter) -> Parity {
        let jp = i64::from(!l.is_chord());
        let st = i64::from(l.is_dual());
        Parity::new(self.degree(l), jp, st)
    }

    pub fn sigma_parity(&self) -> Parity {
        Parity::new(1, 1, 0)
    }

    pub fn hbar_parity(&self) -> Parity {
        Parity::new(self.n - 3, 0, 1)
    }

    pub fn word_parity(&self, w: &[Letter]) -> Parity {
        w.iter().fold(Parity::default(), |p, &l| p + self.parity(l))
    }

    /// Parity of the σ^s ħ^h prefix.
    pub fn prefix_parity(&self, s: i64, h: i64) -> Parity {
        self.sigma_parity().times(s) + self.hbar_parity().times(h)
    }

    /// Sign of `σ^s1 ħ^h1 σ^s2 ħ^h2 = ± σ^(s1+s2) ħ^(h1+h2)`.
    pub fn prefix_merge_odd(&self, h1: i64, s2: i64) -> bool {
        self.hbar_parity().times(h1).pairs_odd(self.sigma_parity().times(s2))
    }

    pub fn word_degree(&self, w: &[Letter]) -> i64 {
        w.iter().map(|&l| self.degree(l)).sum()
    }

    pub fn is_composable(&self, w: &[Letter]) -> bool {
        w.windows(2).all(|p| self.ends(p[0]).1 == self.ends(p[1]).0)
    }

    pub fn is_cyclically_composable(&self, w: &[Letter]) -> bool {
        match (w.first(), w.last()) {
            (Some(&f), Some(&l)) => self.is_composable(w) && self.ends(l).1 == self.ends(f).0,
            _ => true,
        }
    }

    /// All generators of the alphabet, in canonical order.
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut v = Vec::new();
        for i in 0..self.chords.len() {
            v.extend([Letter::chord(i), Letter::hat(i), Letter::hat_dual(i)]);
        }
        for j in 1..=self.m {
            v.extend([Letter::x(j), Letter::x_dual(j)]);
        }
        v
    }

    pub fn letter_name(&self, l: Letter) -> String {
        match l.variant {
            Variant::Chord => self.chords[l.index].name.clone(),
            Variant::Hat => format!("^{}", self.chords[l.index].name),
            Variant::DualHat => format!("^{}*", self.chords[l.index].name),
            Variant::Basepoint => format!("x{}", l.index),
            Variant::DualBasepoint => format!("x{}*", l.index),
        }
    }

    /// Degree of `σ^s ħ^h w`.
    pub fn key_degree(&self, k: &MonoKey) -> i64 {
        k.sigma + k.hbar * (self.n - 3) + self.word_degree(&k.word)
    }
}

/// The ambient space an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    A,
    M,
    MDiag,
    MCyc,
    U,
    UBal,
    ExcitedUBal,
    TauMBal,
    TauMStarBal,
}

impl Space {
    pub fn is_cyclic(self) -> bool {
        !matches!(self, Space::A | Space::M | Space::MDiag)
    }
}

/// The coefficient-free part of a monomial: `σ^sigma ħ^hbar word`, with an
/// optional excited position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoKey {
    pub sigma: i64,
    pub hbar: i64,
    pub word: Vec<Letter>,
    pub excited: Option<usize>,
}

impl MonoKey {
    pub fn plain(word: Vec<Letter>) -> Self {
        MonoKey { sigma: 0, hbar: 0, word, excited: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Q,
    pub key: MonoKey,
}

impl Monomial {
    pub fn degree(&self, p: &Presentation) -> i64 {
        p.key_degree(&self.key)
    }
}

/// A finite sum of monomials with distinct keys, tagged with its space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    space: Space,
    terms: BTreeMap<MonoKey, Q>,
}

impl Element {
    pub fn zero(space: Space) -> Self {
        Element { space, terms: BTreeMap::new() }
    }

    pub fn from_key(space: Space, key: MonoKey, coeff: Q) -> Self {
        let mut e = Element::zero(space);
        e.add_term(key, coeff);
        e
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn with_space(mut self, space: Space) -> Self {
        self.space = space;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c * key` without any canonicalization.
    pub fn add_term(&mut self, key: MonoKey, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MonoKey, &Q)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(k, c)| Monomial { coeff: c.clone(), key: k.clone() })
    }

    pub fn coeff(&self, key: &MonoKey) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    pub fn scale(&self, c: &Q) -> Element {
        let mut out = Element::zero(self.space);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v * c);
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Q) {
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v * c);
        }
    }

    /// Degrees of the terms; a homogeneous element has exactly one.
    pub fn degrees(&self, p: &Presentation) -> Vec<i64> {
        let mut d: Vec<i64> = self.terms.keys().map(|k| p.key_degree(k)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The degree of a homogeneous element (`None` for zero or mixed degree).
    pub fn degree(&self, p: &Presentation) -> Option<i64> {
        let d = self.degrees(p);
        if d.len() == 1 {
            Some(d[0])
        } else {
            None
        }
    }

    /// Largest word length occurring.
    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|k| k.word.len()).max().unwrap_or(0)
    }

    /// Keeps only the terms selected by `f`.
    pub fn filter(&self, mut f: impl FnMut(&MonoKey) -> bool) -> Element {
        Element {
            space: self.space,
            terms: self.terms.iter().filter(|(k, _)| f(k)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// The ratio `self / other` when the two are proportional.
    pub fn ratio_to(&self, other: &Element) -> Option<Q> {
        let (k, c) = other.terms.iter().next()?;
        let r = self.coeff(k) / c;
        let mut diff = self.clone();
        diff.add_scaled(other, &-r.clone());
        diff.is_zero().then_some(r)
    }

    pub fn max_abs_coeff(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, o: &Element) -> Element {
        let mut r = self.clone();
        r.add_scaled(o, &Q::one());
        r
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, o: &Element) -> Element {
        let mut r = self.clone();
        r.add_scaled(o, &-Q::one());
        r
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Q::one())
    }
}

impl AddAssign<&Element> for Element {
    fn add_assign(&mut self, o: &Element) {
        self.add_scaled(o, &Q::one());
    }
}

/// One letter of an unnormalized sequence: a generator or a power of σ or ħ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RawLetter {
    Gen(Letter),
    /// Generator marked as the excited one.
    Excited(Letter),
    Sigma(i64),
    Hbar(i64),
}

/// Collects σ/ħ letters into the prefix. Returns the sign (true = negative)
/// together with the normalized key.
pub fn normalize_sigma_hbar(p: &Presentation, raw: &[RawLetter]) -> Result<(bool, MonoKey), SftError> {
    let mut odd = false;
    let mut s = 0i64;
    let mut h = 0i64;
    let mut word = Vec::new();
    let mut excited = None;
    let mut before = Parity::default();
    for &r in raw {
        match r {
            RawLetter::Gen(l) => {
                before += p.parity(l);
                word.push(l);
            }
            RawLetter::Excited(l) => {
                if excited.is_some() {
                    return Err(SftError::DoubleExcitation);
                }
                if !l.is_excitable() {
                    return Err(SftError::NotExcitable(p.letter_name(l)));
                }
                excited = Some(word.len());
                before += p.parity(l);
                word.push(l);
            }
            RawLetter::Sigma(k) => {
                odd ^= p.sigma_parity().times(k).pairs_odd(before);
                odd ^= p.prefix_merge_odd(h, k);
                s += k;
            }
            RawLetter::Hbar(k) => {
                odd ^= p.hbar_parity().times(k).pairs_odd(before);
                h += k;
            }
        }
    }
    Ok((odd, MonoKey { sigma: s, hbar: h, word, excited }))
}

/// Product of two linear monomials over the idempotent ring.
pub fn concat(p: &Presentation, x: &Monomial, y: &Monomial, space: Space) -> Result<Element, SftError> {
    if x.key.excited.is_some() && y.key.excited.is_some() {
        return Err(SftError::DoubleExcitation);
    }
    let mut out = Element::zero(space);
    if let (Some(&a), Some(&b)) = (x.key.word.last(), y.key.word.first()) {
        if p.ends(a).1 != p.ends(b).0 {
            return Ok(out);
        }
    }
    // σ^s1 ħ^h1 w1 σ^s2 ħ^h2 w2: move the second prefix past w1, then merge.
    let pre2 = p.prefix_parity(y.key.sigma, y.key.hbar);
    let odd = pre2.pairs_odd(p.word_parity(&x.key.word)) ^ p.prefix_merge_odd(x.key.hbar, y.key.sigma);
    let mut word = x.key.word.clone();
    word.extend_from_slice(&y.key.word);
    let excited = x.key.excited.or(y.key.excited.map(|e| e + x.key.word.len()));
    let key = MonoKey { sigma: x.key.sigma + y.key.sigma, hbar: x.key.hbar + y.key.hbar, word, excited };
    out.add_term(key, sign_q(odd) * &x.coeff * &y.coeff);
    Ok(out)
}

/// Degree of a monomial.
pub fn degree(p: &Presentation, x: &Monomial) -> i64 {
    x.degree(p)
}

/// Renders an element in the input grammar.
pub struct Pretty<'a> {
    pub pres: &'a Presentation,
    pub elem: &'a Element,
}

impl fmt::Display for Pretty<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_zero() {
            return write!(f, "0");
        }
        let cyclic = self.elem.space().is_cyclic();
        for (i, (k, c)) in self.elem.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() {
                parts.push(format!("{mag} *"));
            }
            match k.sigma {
                0 => {}
                1 => parts.push("s".into()),
                s => parts.push(format!("s^{s}")),
            }
            match k.hbar {
                0 => {}
                1 => parts.push("hb".into()),
                h => parts.push(format!("hb^{h}")),
            }
            let letters: Vec<String> = k
                .word
                .iter()
                .enumerate()
                .map(|(j, &l)| {
                    let nm = self.pres.letter_name(l);
                    if k.excited == Some(j) {
                        format!("!{nm}")
                    } else {
                        nm
                    }
                })
                .collect();
            if cyclic {
                parts.push(format!("[ {} ]", letters.join(" ")));
            } else if letters.is_empty() {
                parts.push("1".into());
            } else {
                parts.push(letters.join(" "));
            }
            write!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

pub fn pretty<'a>(pres: &'a Presentation, elem: &'a Element) -> Pretty<'a> {
    Pretty { pres, elem }
}
