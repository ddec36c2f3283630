//! Truncated chain complexes for (M^cyc, d_M) and (𝐌^bal, d_U), exact
//! rational linear algebra, and homology with representatives.
//!
//! A degree `d` is *clean* at cutoff `L` when every basis word of degree `d`
//! and `d + 1` has length at most `L`; only clean degrees are reported.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::ops::RangeInclusive;

use num_traits::Zero;

use crate::algebra_core::{Element, Letter, MonoKey, Presentation, Space, Q};
use crate::cyclic_spaces::canonical;
use crate::differentials::{d_m, d_u};
use crate::error::SftError;
use crate::sft_operations::build_h1;

/// Sparse vector over ℚ.
pub type SVec = BTreeMap<usize, Q>;

fn axpy(v: &mut SVec, c: &Q, w: &SVec) {
    for (i, x) in w {
        let e = v.entry(*i).or_insert_with(Q::zero);
        *e -= c * x;
        if e.is_zero() {
            v.remove(i);
        }
    }
}

/// Row echelon form built incrementally. Each row remembers, in `tag`, how it
/// was combined from the tagged vectors inserted so far.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<(usize, SVec, SVec)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` in place; returns the tag combination that was subtracted.
    pub fn reduce(&self, v: &mut SVec) -> SVec {
        let mut acc = SVec::new();
        for (piv, row, tag) in &self.rows {
            if let Some(c) = v.get(piv).cloned() {
                axpy(v, &c, row);
                axpy(&mut acc, &-c, tag);
            }
        }
        acc
    }

    /// Inserts `v` with tag `tag`. Returns `None` if `v` was independent,
    /// otherwise the tag combination expressing the dependency.
    pub fn insert(&mut self, mut v: SVec, tag: SVec) -> Option<SVec> {
        let acc = self.reduce(&mut v);
        let mut t = tag;
        axpy(&mut t, &Q::from_integer(1.into()), &acc);
        match v.iter().next() {
            None => Some(t),
            Some((&piv, c)) => {
                let inv = c.recip();
                let scale = |m: SVec| m.into_iter().map(|(k, x)| (k, x * &inv)).collect::<SVec>();
                let (v, t) = (scale(v), scale(t));
                self.rows.push((piv, v, t));
                None
            }
        }
    }
}

fn unit(i: usize) -> SVec {
    SVec::from([(i, Q::from_integer(1.into()))])
}

/// Which complex is truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexKind {
    /// (M^cyc, d_M).
    MCyc,
    /// (𝐌^bal, d_U) with the excited balanced words σ⁻¹ħ⁻¹⟦w⟧.
    MBal,
    /// ((𝐌*)^bal, d_U) with the words σħ⁻¹⟦w⟧ excited at their dual letter.
    MStarBal,
}

impl ComplexKind {
    pub fn space(self) -> Space {
        match self {
            ComplexKind::MCyc => Space::MCyc,
            ComplexKind::MBal => Space::TauMBal,
            ComplexKind::MStarBal => Space::TauMStarBal,
        }
    }

    /// The σ power of the prefix; ħ always appears as ħ⁻¹ for the balanced kinds.
    fn prefix(self) -> Option<(i64, i64)> {
        match self {
            ComplexKind::MCyc => None,
            ComplexKind::MBal => Some((-1, -1)),
            ComplexKind::MStarBal => Some((1, -1)),
        }
    }

    /// Letters of which each basis word contains exactly one.
    pub fn specials(self, p: &Presentation) -> Vec<Letter> {
        let nc = p.chords().len();
        match self {
            ComplexKind::MCyc | ComplexKind::MBal => (0..nc).map(Letter::hat).chain((1..=p.m()).map(Letter::x)).collect(),
            ComplexKind::MStarBal => (0..nc).map(Letter::hat_dual).chain((1..=p.m()).map(Letter::x_dual)).collect(),
        }
    }

    /// Degree of the prefix.
    pub fn shift(self, p: &Presentation) -> i64 {
        self.prefix().map_or(0, |(s, h)| s + h * (p.n() - 3))
    }
}

/// Homology in one degree.
#[derive(Clone, Debug)]
pub struct DegreeHomology {
    pub degree: i64,
    pub chain_dim: usize,
    pub cycles_dim: usize,
    pub boundaries_dim: usize,
    pub representatives: Vec<Element>,
    coords: Echelon,
    index: HashMap<MonoKey, usize>,
}

impl DegreeHomology {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }
}

/// The differential of a complex kind, without building a basis.
pub fn differential(p: &Presentation, kind: ComplexKind, x: &Element) -> Result<Element, SftError> {
    match kind {
        ComplexKind::MCyc => d_m(p, x),
        _ => d_u(p, &build_h1(p, 1)?.h1[0], x),
    }
}

/// A chain complex restricted to words of length at most `cutoff`.
pub struct TruncatedComplex {
    pres: Presentation,
    kind: ComplexKind,
    cutoff: usize,
    cap: usize,
    window: Option<RangeInclusive<i64>>,
    h11: Option<Element>,
    basis: BTreeMap<i64, Vec<MonoKey>>,
    cache: HashMap<i64, DegreeHomology>,
}

/// Default bound on the number of basis words in one degree.
pub const DEFAULT_CAP: usize = 20_000;

/// All canonical M^cyc words of length at most `cutoff`: one hat or basepoint
/// letter followed by chords.
pub fn enumerate_mcyc(p: &Presentation, cutoff: usize) -> Result<Vec<MonoKey>, SftError> {
    enumerate_words(p, &ComplexKind::MCyc.specials(p), cutoff)
}

/// Canonical cyclic words made of one letter from `specials` and chords.
pub fn enumerate_words(p: &Presentation, specials: &[Letter], cutoff: usize) -> Result<Vec<MonoKey>, SftError> {
    enumerate_words_in(p, specials, cutoff, None)
}

/// As [`enumerate_words`], keeping only words whose degree lies in `degrees`.
/// With no chord of negative degree the search stops as soon as a prefix is
/// too heavy.
pub fn enumerate_words_in(p: &Presentation, specials: &[Letter], cutoff: usize, degrees: Option<&RangeInclusive<i64>>) -> Result<Vec<MonoKey>, SftError> {
    let chords: Vec<Letter> = (0..p.chords().len()).map(Letter::chord).collect();
    let monotone = p.chords().iter().all(|c| c.degree >= 0);
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Vec<Letter>, i64)> = specials.iter().map(|&s| (vec![s], p.degree(s))).collect();
    while let Some((w, deg)) = stack.pop() {
        if let Some(r) = degrees {
            if monotone && deg > *r.end() {
                continue;
            }
        }
        if degrees.is_none_or(|r| r.contains(&deg)) && p.is_cyclically_composable(&w) {
            if let Some((_, k)) = canonical(p, &MonoKey::plain(w.clone()))? {
                out.insert(k);
            }
        }
        if w.len() < cutoff {
            let end = p.ends(*w.last().unwrap_or(&w[0])).1;
            for &c in &chords {
                if p.ends(c).0 == end {
                    let mut nw = w.clone();
                    nw.push(c);
                    stack.push((nw, deg + p.degree(c)));
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The 𝐌^bal word σ⁻¹ħ⁻¹⟦w⟧ excited at its hat or basepoint letter.
pub fn mbal_key(p: &Presentation, w: &MonoKey) -> Result<Option<(bool, MonoKey)>, SftError> {
    let e = w.word.iter().position(|l| l.is_hat_or_x());
    canonical(p, &MonoKey { sigma: -1, hbar: -1, word: w.word.clone(), excited: e })
}

fn prefixed_key(p: &Presentation, kind: ComplexKind, w: &MonoKey) -> Result<Option<MonoKey>, SftError> {
    Ok(match kind.prefix() {
        None => Some(w.clone()),
        Some((s, h)) => {
            let e = w.word.iter().position(|l| l.is_excitable());
            canonical(p, &MonoKey { sigma: s, hbar: h, word: w.word.clone(), excited: e })?.map(|(_, k)| k)
        }
    })
}

impl TruncatedComplex {
    pub fn new(p: &Presentation, kind: ComplexKind, cutoff: usize) -> Result<Self, SftError> {
        Self::with_cap(p, kind, cutoff, DEFAULT_CAP)
    }

    pub fn with_cap(p: &Presentation, kind: ComplexKind, cutoff: usize, cap: usize) -> Result<Self, SftError> {
        Self::build(p, kind, cutoff, None, cap)
    }

    /// A complex holding only the degrees in `window`. Homology is available
    /// in degree d when d and d + 1 both lie in the window.
    pub fn with_window(p: &Presentation, kind: ComplexKind, cutoff: usize, window: RangeInclusive<i64>, cap: usize) -> Result<Self, SftError> {
        Self::build(p, kind, cutoff, Some(window), cap)
    }

    fn build(p: &Presentation, kind: ComplexKind, cutoff: usize, window: Option<RangeInclusive<i64>>, cap: usize) -> Result<Self, SftError> {
        let h11 = match kind {
            ComplexKind::MCyc => None,
            _ => Some(build_h1(p, 1)?.h1[0].clone()),
        };
        let shift = kind.shift(p);
        let word_window = window.as_ref().map(|w| (w.start() - shift)..=(w.end() - shift));
        let mut basis: BTreeMap<i64, Vec<MonoKey>> = BTreeMap::new();
        for k in enumerate_words_in(p, &kind.specials(p), cutoff, word_window.as_ref())? {
            let Some(key) = prefixed_key(p, kind, &k)? else { continue };
            basis.entry(p.key_degree(&key)).or_default().push(key);
        }
        for (d, v) in &basis {
            if v.len() > cap {
                return Err(SftError::BasisTooLarge { degree: *d, size: v.len(), cap });
            }
        }
        Ok(TruncatedComplex { pres: p.clone(), kind, cutoff, cap, window, h11, basis, cache: HashMap::new() })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn window(&self) -> Option<&RangeInclusive<i64>> {
        self.window.as_ref()
    }

    /// Basis words of one degree (empty outside the window).
    pub fn basis(&self, d: i64) -> &[MonoKey] {
        self.basis.get(&d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Whether degree `d` of this complex is free of truncation effects.
    pub fn is_clean(&self, d: i64) -> bool {
        !long_word_exists_for(&self.pres, self.kind, self.cutoff, d)
    }

    /// The differential of the complex.
    pub fn differential(&self, x: &Element) -> Result<Element, SftError> {
        match &self.h11 {
            None => d_m(&self.pres, x),
            Some(h) => d_u(&self.pres, h, x),
        }
    }

    /// Image of each basis word of degree `d`.
    pub fn boundary_images(&self, d: i64) -> Result<Vec<Element>, SftError> {
        let space = self.kind.space();
        self.basis(d)
            .iter()
            .map(|k| self.differential(&Element::from_key(space, k.clone(), Q::from_integer(1.into()))))
            .collect()
    }

    /// Homology in degree `d`, with representatives chosen greedily in basis
    /// order among the kernel vectors.
    pub fn homology_at(&mut self, d: i64) -> Result<&DegreeHomology, SftError> {
        if !self.is_clean(d) {
            return Err(SftError::DirtyDegree(d));
        }
        if self.window.as_ref().is_some_and(|w| !w.contains(&d) || !w.contains(&(d + 1))) {
            return Err(SftError::OutsideWindow(d));
        }
        if !self.cache.contains_key(&d) {
            let h = self.compute(d)?;
            self.cache.insert(d, h);
        }
        Ok(&self.cache[&d])
    }

    fn compute(&self, d: i64) -> Result<DegreeHomology, SftError> {
        let basis = self.basis(d);
        let index: HashMap<MonoKey, usize> = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        // kernel of d: C_d → C_{d−1}
        let mut target: HashMap<MonoKey, usize> = HashMap::new();
        let mut ech = Echelon::default();
        let mut kernel = Vec::new();
        for (i, img) in self.boundary_images(d)?.into_iter().enumerate() {
            let mut v = SVec::new();
            for (k, c) in img.iter() {
                let n = target.len();
                let t = *target.entry(k.clone()).or_insert(n);
                v.insert(t, c.clone());
            }
            if let Some(dep) = ech.insert(v, unit(i)) {
                kernel.push(dep);
            }
        }
        // boundaries from C_{d+1}
        let mut coords = Echelon::default();
        let mut boundaries = 0;
        for img in self.boundary_images(d + 1)? {
            let mut v = SVec::new();
            for (k, c) in img.iter() {
                let &t = index.get(k).ok_or(SftError::DirtyDegree(d))?;
                v.insert(t, c.clone());
            }
            if coords.insert(v, SVec::new()).is_none() {
                boundaries += 1;
            }
        }
        let space = self.kind.space();
        let mut representatives = Vec::new();
        for kv in &kernel {
            let r = representatives.len();
            if coords.insert(kv.clone(), unit(r)).is_none() {
                let mut e = Element::zero(space);
                for (i, c) in kv {
                    e.add_term(basis[*i].clone(), c.clone());
                }
                representatives.push(e);
            }
        }
        Ok(DegreeHomology {
            degree: d,
            chain_dim: basis.len(),
            cycles_dim: kernel.len(),
            boundaries_dim: boundaries,
            representatives,
            coords,
            index,
        })
    }

    /// Coordinates of the class of the cycle `x` in the chosen representatives.
    pub fn reduce_to_homology_basis(&mut self, x: &Element) -> Result<Vec<Q>, SftError> {
        if x.is_zero() {
            return Err(SftError::WrongSpace("zero element has no degree".into()));
        }
        let d = x.degree(&self.pres).ok_or_else(|| SftError::WrongSpace("inhomogeneous element".into()))?;
        if !self.differential(x)?.is_zero() {
            return Err(SftError::NotACycle);
        }
        let h = self.homology_at(d)?;
        let mut v = SVec::new();
        for (k, c) in x.iter() {
            let &i = h.index.get(k).ok_or(SftError::DirtyDegree(d))?;
            v.insert(i, c.clone());
        }
        let acc = h.coords.reduce(&mut v);
        debug_assert!(v.is_empty());
        Ok((0..h.dim()).map(|r| acc.get(&r).cloned().unwrap_or_else(Q::zero)).collect())
    }

    /// Homology over a degree window; dirty degrees are listed separately.
    pub fn homology(&mut self, degrees: std::ops::RangeInclusive<i64>) -> Result<HomologyReport, SftError> {
        let mut report = HomologyReport { cutoff: self.cutoff, degrees: Vec::new(), dirty: Vec::new() };
        for d in degrees {
            if !self.is_clean(d) {
                report.dirty.push(d);
                continue;
            }
            report.degrees.push(self.homology_at(d)?.clone());
        }
        Ok(report)
    }
}

/// Homology over a window of degrees.
#[derive(Clone, Debug)]
pub struct HomologyReport {
    pub cutoff: usize,
    pub degrees: Vec<DegreeHomology>,
    pub dirty: Vec<i64>,
}

impl HomologyReport {
    pub fn dim(&self, d: i64) -> Option<usize> {
        self.degrees.iter().find(|h| h.degree == d).map(DegreeHomology::dim)
    }
}

/// Is degree `d` of the given complex dirty at `cutoff`?
pub fn long_word_exists_for(p: &Presentation, kind: ComplexKind, cutoff: usize, d: i64) -> bool {
    let dw = d - kind.shift(p);
    long_word_exists(p, &kind.specials(p), cutoff, &[dw, dw + 1])
}

/// Is there a cyclic word made of one letter of `specials` and chords, longer
/// than `cutoff`, whose degree is in `degs`?
///
/// When some chord has degree ≤ 0 the length of a word is not bounded by its
/// degree, and every degree counts as dirty as soon as a chord cycle exists.
pub fn long_word_exists(p: &Presentation, specials: &[Letter], cutoff: usize, degs: &[i64]) -> bool {
    let nc = p.chords().len();
    if nc == 0 {
        return false;
    }
    let dmin = p.chords().iter().map(|c| c.degree).min().unwrap_or(1);
    let target_max = *degs.iter().max().unwrap_or(&0) - specials.iter().map(|&l| p.degree(l)).min().unwrap_or(0);
    if dmin <= 0 {
        return has_chord_cycle(p);
    }
    // paths of k chords: (start, end, degree), degrees capped at target_max
    let m = p.m();
    let mut layer: HashSet<(usize, usize, i64)> = (1..=m).map(|j| (j, j, 0)).collect();
    let closes = |layer: &HashSet<(usize, usize, i64)>| -> bool {
        // a word of length k + 1: special letter then k chords
        layer.iter().any(|&(s, e, dg)| {
            specials.iter().any(|&l| {
                let (a, b) = p.ends(l);
                b == s && a == e && degs.contains(&(dg + p.degree(l)))
            })
        })
    };
    let mut k = 0usize;
    loop {
        if k + 1 > cutoff && closes(&layer) {
            return true;
        }
        let mut next = HashSet::new();
        for &(s, e, dg) in &layer {
            for c in p.chords() {
                if c.from == e && dg + c.degree <= target_max {
                    next.insert((s, c.to, dg + c.degree));
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        layer = next;
        k += 1;
    }
}

fn has_chord_cycle(p: &Presentation) -> bool {
    let m = p.m();
    let mut reach = vec![vec![false; m + 1]; m + 1];
    for c in p.chords() {
        reach[c.from][c.to] = true;
    }
    for k in 1..=m {
        for i in 1..=m {
            for j in 1..=m {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    (1..=m).any(|i| reach[i][i])
}
