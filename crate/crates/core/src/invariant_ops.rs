//! Products ⋄, ⊡, ⊠, the unit E, the ring map Φ and the BV operator Δ.
//! Everything is computed on chain representatives; statements about classes
//! go through [`Reducer`].

use std::collections::BTreeMap;

use crate::algebra_core::{q, sign_q, Element, Letter, MonoKey, Presentation, RawLetter, Space, Variant, Q};
use crate::cyclic_spaces::{add_cyclic, beta_underline, beta_underline_inv, cyclic_from_raw, excite, rotate_by, unexcite};
use crate::differentials::{d_m, s_word};
use crate::error::SftError;
use crate::homology_engine::{enumerate_words_in, long_word_exists_for, ComplexKind, TruncatedComplex, DEFAULT_CAP};
use crate::sft_operations::{by_degree, star, star_lower, star_upper, HamiltonianData};

/// Largest cutoff the reducer will grow to.
pub const MAX_CUTOFF: usize = 48;

fn homogeneous_degree(p: &Presentation, x: &Element) -> Result<i64, SftError> {
    let parts = by_degree(p, x);
    match parts.len() {
        0 => Ok(0),
        1 => Ok(*parts.keys().next().unwrap_or(&0)),
        _ => Err(SftError::WrongSpace("expected a homogeneous element".into())),
    }
}

/// H¹₂, H²₀ and the derived elements the products need.
#[derive(Clone, Debug)]
pub struct ProductContext {
    pub pres: Presentation,
    pub ham: HamiltonianData,
    h12: Element,
    h20: Option<Element>,
    k1: Option<Element>,
    k2: Option<Element>,
}

impl ProductContext {
    pub fn new(p: &Presentation, ham: &HamiltonianData) -> Result<Self, SftError> {
        let h12 = ham.h1q(2)?.clone();
        let h20 = ham.user_higher.get(&(2, 0)).cloned();
        let (k1, k2) = match &h20 {
            Some(h) => (Some(star_lower(p, h, &h12, 1)?), Some(star_lower(p, h, &h12, 2)?)),
            None => (None, None),
        };
        Ok(ProductContext { pres: p.clone(), ham: ham.clone(), h12, h20, k1, k2 })
    }

    fn h20(&self) -> Result<&Element, SftError> {
        self.h20.as_ref().ok_or(SftError::MissingHamiltonian(2, 0))
    }

    /// H²₀ ⋆₁ H¹₂.
    pub fn k1(&self) -> Result<&Element, SftError> {
        self.k1.as_ref().ok_or(SftError::MissingHamiltonian(2, 0))
    }

    /// H²₀ ⋆₂ H¹₂.
    pub fn k2(&self) -> Result<&Element, SftError> {
        self.k2.as_ref().ok_or(SftError::MissingHamiltonian(2, 0))
    }

    /// X ⋄ Y = (−1)^{|X|} Y ⋆ (X ⋆₁ H¹₂).
    pub fn diamond(&self, x: &Element, y: &Element) -> Result<Element, SftError> {
        let p = &self.pres;
        let mut out = Element::zero(Space::TauMStarBal);
        for (dx, xd) in by_degree(p, x) {
            let t = star(p, y, &star_lower(p, &xd, &self.h12, 1)?)?;
            out.add_scaled(&t, &sign_q(dx % 2 != 0));
        }
        Ok(out.with_space(Space::TauMStarBal))
    }

    /// X ⊡ Y = ((H²₀ ⋆₁ H¹₂) ⋆¹ X) ⋆ Y.
    pub fn boxdot(&self, x: &Element, y: &Element) -> Result<Element, SftError> {
        let p = &self.pres;
        Ok(star(p, &star_upper(p, self.k1()?, 1, x)?, y)?.with_space(Space::TauMBal))
    }

    /// The four expressions for ⊡ that agree on homology, in the order
    /// (H²₀⋆₁H¹₂)^↓, −(H²₀⋆₂H¹₂)^↓, ± (H¹₂)^{↑↓}(Φ X, Y), ± (H¹₂)^{↓↑}(X, Φ Y).
    pub fn boxdot_forms(&self, x: &Element, y: &Element) -> Result<[Element; 4], SftError> {
        let p = &self.pres;
        let dx = homogeneous_degree(p, x)?;
        let dy = homogeneous_degree(p, y)?;
        let f1 = self.boxdot(x, y)?;
        let f2 = -&star(p, &star_upper(p, self.k2()?, 1, x)?, y)?;
        let f3 = star(p, &star_lower(p, &self.phi(x)?, &self.h12, 1)?, y)?.scale(&sign_q(dx % 2 != 0));
        let f4 = self.form4_unsigned(x, y)?.scale(&sign_q((dx * dy + dy + 1) % 2 != 0));
        Ok([f1, f2, f3.with_space(Space::TauMBal), f4])
    }

    /// The fourth form with exponent |X||Y|+|X|+1 instead of |X||Y|+|Y|+1.
    /// The two differ exactly when |X|+|Y| is odd; kept for comparison only.
    pub fn boxdot_form4_alt(&self, x: &Element, y: &Element) -> Result<Element, SftError> {
        let p = &self.pres;
        let dx = homogeneous_degree(p, x)?;
        let dy = homogeneous_degree(p, y)?;
        Ok(self.form4_unsigned(x, y)?.scale(&sign_q((dx * dy + dx + 1) % 2 != 0)))
    }

    fn form4_unsigned(&self, x: &Element, y: &Element) -> Result<Element, SftError> {
        let p = &self.pres;
        Ok(star(p, &star_lower(p, &self.phi(y)?, &self.h12, 2)?, x)?.with_space(Space::TauMBal))
    }

    /// X ⊠ Y = β̲⁻¹(β̲X ⊡ β̲Y) on M^cyc.
    pub fn boxtimes(&self, x: &Element, y: &Element) -> Result<Element, SftError> {
        let p = &self.pres;
        let bx = beta_underline(p, x)?;
        let by = beta_underline(p, y)?;
        beta_underline_inv(p, &self.boxdot(&bx, &by)?)
    }

    /// The closed formula (−1)^{(n−2)|Y|+1} ((K ⋆¹ ℰX) ⋆ ℰY) σ⁻¹ħ⁻¹ with
    /// K = H²₀ ⋆₁ H¹₂, evaluated literally for comparison with [`Self::boxtimes`].
    pub fn boxtimes_closed_form(&self, x: &Element, y: &Element) -> Result<Element, SftError> {
        let p = &self.pres;
        let dy = homogeneous_degree(p, y)?;
        let core = star(p, &star_upper(p, self.k1()?, 1, &excite(p, x)?)?, &excite(p, y)?)?;
        let mut out = Element::zero(Space::MCyc);
        for (k, c) in unexcite(p, &core, Space::U)?.iter() {
            let mut raw = vec![RawLetter::Sigma(k.sigma), RawLetter::Hbar(k.hbar)];
            raw.extend(k.word.iter().map(|&l| RawLetter::Gen(l)));
            raw.extend([RawLetter::Sigma(-1), RawLetter::Hbar(-1)]);
            out += &cyclic_from_raw(p, &raw, c.clone(), Space::MCyc)?;
        }
        Ok(out.scale(&sign_q(((p.n() - 2) * dy + 1) % 2 != 0)))
    }

    /// Φ = (H²₀)^↻ : 𝐌^bal → (𝐌*)^bal.
    pub fn phi(&self, x: &Element) -> Result<Element, SftError> {
        Ok(star(&self.pres, self.h20()?, x)?.with_space(Space::TauMStarBal))
    }
}

/// E = (−1)^{n−1} Σᵢ ħ⁻¹ x̱ᵢ* σ.
pub fn unit_e(p: &Presentation) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::TauMStarBal);
    for j in 1..=p.m() {
        let raw = [RawLetter::Hbar(-1), RawLetter::Excited(Letter::x_dual(j)), RawLetter::Sigma(1)];
        out += &cyclic_from_raw(p, &raw, sign_q((p.n() - 1) % 2 != 0), Space::TauMStarBal)?;
    }
    Ok(out.with_space(Space::TauMStarBal))
}

/// Δ⟦x_j w⟧ = S(w), Δ⟦ĉ w⟧ = 0, extended linearly and canonicalized.
pub fn bv_delta(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::MCyc);
    for (k, c) in x.iter() {
        let specials: Vec<usize> = (0..k.word.len()).filter(|&i| k.word[i].is_hat_or_x()).collect();
        if specials.len() != 1 || k.word.iter().any(|l| l.is_dual()) || k.sigma != 0 || k.hbar != 0 {
            return Err(SftError::WrongSpace("Δ expects an element of M^cyc".into()));
        }
        let (odd, r) = rotate_by(p, &MonoKey::plain(k.word.clone()), specials[0]);
        if r.word[0].variant == Variant::Basepoint {
            for (sk, sc) in s_word(p, &r.word[1..]).iter() {
                add_cyclic(p, &mut out, MonoKey::plain(sk.word.clone()), sign_q(odd) * c * sc)?;
            }
        }
    }
    Ok(out)
}

/// How Δ and d_M interact on one chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainSign {
    /// Both sides vanish.
    Trivial,
    /// Δ d = d Δ.
    Commutes,
    /// Δ d = −d Δ.
    Anticommutes,
    Neither,
}

pub fn delta_chain_sign(p: &Presentation, x: &Element) -> Result<ChainSign, SftError> {
    let a = bv_delta(p, &d_m(p, x)?)?;
    let b = d_m(p, &bv_delta(p, x)?)?;
    Ok(if a.is_zero() && b.is_zero() {
        ChainSign::Trivial
    } else if a == b {
        ChainSign::Commutes
    } else if a == -&b {
        ChainSign::Anticommutes
    } else {
        ChainSign::Neither
    })
}

/// Reduces chains of one complex kind to homology coordinates, growing the
/// cutoff until the degree in question is clean. Each degree gets its own
/// complex holding just that degree and the next.
pub struct Reducer {
    pres: Presentation,
    kind: ComplexKind,
    base: usize,
    complexes: BTreeMap<(usize, i64), TruncatedComplex>,
}

/// Coordinates of a class together with the representatives they refer to.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub degree: i64,
    pub cutoff: usize,
    pub coords: Vec<Q>,
    pub basis: Vec<Element>,
}

impl Reduced {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c == &q(0))
    }
}

impl Reducer {
    pub fn new(p: &Presentation, kind: ComplexKind, base: usize) -> Self {
        Reducer { pres: p.clone(), kind, base, complexes: BTreeMap::new() }
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    /// Smallest cutoff ≥ base at which degree `d` is clean.
    pub fn cutoff_for(&self, d: i64) -> Result<usize, SftError> {
        (self.base..=MAX_CUTOFF)
            .find(|&l| !long_word_exists_for(&self.pres, self.kind, l, d))
            .ok_or(SftError::DirtyDegree(d))
    }

    /// The complex at `cutoff` that computes homology in degree `d`.
    pub fn complex(&mut self, cutoff: usize, d: i64) -> Result<&mut TruncatedComplex, SftError> {
        if !self.complexes.contains_key(&(cutoff, d)) {
            let c = TruncatedComplex::with_window(&self.pres, self.kind, cutoff, d..=d + 1, DEFAULT_CAP)?;
            self.complexes.insert((cutoff, d), c);
        }
        Ok(self.complexes.get_mut(&(cutoff, d)).expect("inserted"))
    }

    /// Homology coordinates of a homogeneous cycle of degree `d` (zero allowed).
    pub fn reduce(&mut self, x: &Element, d: i64) -> Result<Reduced, SftError> {
        if !x.is_zero() && x.degree(&self.pres) != Some(d) {
            return Err(SftError::WrongSpace(format!("expected a homogeneous element of degree {d}")));
        }
        let cutoff = self.cutoff_for(d)?;
        let c = self.complex(cutoff, d)?;
        let basis = c.homology_at(d)?.representatives.clone();
        let coords = if x.is_zero() { vec![q(0); basis.len()] } else { c.reduce_to_homology_basis(x)? };
        Ok(Reduced { degree: d, cutoff, coords, basis })
    }

    /// Homology generators of degree in `window` whose representatives only
    /// use words of length at most `maxlen`. Fails on the first degree that
    /// cannot be computed; see [`Reducer::scan_generators`].
    pub fn generators(&mut self, window: std::ops::RangeInclusive<i64>, maxlen: usize) -> Result<Vec<(i64, Element)>, SftError> {
        let scan = self.scan_generators(window, maxlen);
        match scan.skipped.into_iter().next() {
            Some((_, e)) => Err(e),
            None => Ok(scan.found),
        }
    }

    /// Like [`Reducer::generators`], collecting failing degrees instead of
    /// stopping. Degrees that stay dirty up to the largest cutoff are skipped
    /// as well.
    pub fn scan_generators(&mut self, window: std::ops::RangeInclusive<i64>, maxlen: usize) -> GeneratorScan {
        let mut scan = GeneratorScan::default();
        let shift = self.kind.shift(&self.pres);
        let specials = self.kind.specials(&self.pres);
        for d in window {
            // no word of length ≤ maxlen in this degree: nothing to find
            match enumerate_words_in(&self.pres, &specials, maxlen, Some(&((d - shift)..=(d - shift)))) {
                Ok(w) if w.is_empty() => continue,
                Ok(_) => {}
                Err(e) => {
                    scan.skipped.push((d, e));
                    continue;
                }
            }
            let reps = self.cutoff_for(d).and_then(|cutoff| Ok(self.complex(cutoff.max(maxlen), d)?.homology_at(d)?.representatives.clone()));
            match reps {
                Ok(reps) => scan.found.extend(reps.into_iter().filter(|r| r.max_len() <= maxlen).map(|r| (d, r))),
                Err(e) => scan.skipped.push((d, e)),
            }
        }
        scan
    }
}

/// Generators found per degree, and the degrees that could not be computed.
#[derive(Clone, Debug, Default)]
pub struct GeneratorScan {
    pub found: Vec<(i64, Element)>,
    pub skipped: Vec<(i64, SftError)>,
}

/// Which product a table tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductOp {
    Diamond,
    Boxdot,
    Boxtimes,
}

impl ProductOp {
    pub fn kind(self) -> ComplexKind {
        match self {
            ProductOp::Diamond => ComplexKind::MStarBal,
            ProductOp::Boxdot => ComplexKind::MBal,
            ProductOp::Boxtimes => ComplexKind::MCyc,
        }
    }

    /// Degree of the product of classes of degrees `a` and `b`.
    pub fn degree(self, n: i64, a: i64, b: i64) -> i64 {
        match self {
            ProductOp::Diamond => a + b - 1,
            ProductOp::Boxdot => a + b - 2,
            ProductOp::Boxtimes => a + b - n,
        }
    }
}

/// A pairwise product table over homology generators.
#[derive(Clone, Debug)]
pub struct ProductTable {
    pub op: ProductOp,
    pub generators: Vec<(i64, Element)>,
    /// `cells[i][j]` is the class of `g_i · g_j`.
    pub cells: Vec<Vec<Result<Reduced, SftError>>>,
    /// Degrees of the window whose generators could not be computed.
    pub skipped: Vec<(i64, SftError)>,
}

impl ProductContext {
    pub fn product(&self, op: ProductOp, x: &Element, y: &Element) -> Result<Element, SftError> {
        match op {
            ProductOp::Diamond => self.diamond(x, y),
            ProductOp::Boxdot => self.boxdot(x, y),
            ProductOp::Boxtimes => self.boxtimes(x, y),
        }
    }

    /// Products of all ordered pairs of generators in `window` with word length ≤ `maxlen`.
    pub fn table(&self, op: ProductOp, window: std::ops::RangeInclusive<i64>, maxlen: usize) -> Result<ProductTable, SftError> {
        let mut red = Reducer::new(&self.pres, op.kind(), maxlen);
        let GeneratorScan { found: generators, skipped } = red.scan_generators(window, maxlen);
        let mut cells = Vec::new();
        for (da, a) in &generators {
            let mut row = Vec::new();
            for (db, b) in &generators {
                let d = op.degree(self.pres.n(), *da, *db);
                row.push(self.product(op, a, b).and_then(|v| red.reduce(&v, d)));
            }
            cells.push(row);
        }
        Ok(ProductTable { op, generators, cells, skipped })
    }
}

/// One row of a [`BvTable`]: degree, generator, and its reduced image.
pub type BvRow = (i64, Element, Result<Reduced, SftError>);

#[derive(Clone, Debug)]
pub struct BvTable {
    pub rows: Vec<BvRow>,
    /// Degrees of the window whose generators could not be computed.
    pub skipped: Vec<(i64, SftError)>,
}

/// Δ on each M^cyc generator, reduced to homology.
pub fn bv_table(p: &Presentation, window: std::ops::RangeInclusive<i64>, maxlen: usize) -> BvTable {
    let mut red = Reducer::new(p, ComplexKind::MCyc, maxlen);
    let GeneratorScan { found, skipped } = red.scan_generators(window, maxlen);
    let rows = found
        .into_iter()
        .map(|(d, g)| {
            let r = bv_delta(p, &g).and_then(|v| red.reduce(&v, d + 1));
            (d, g, r)
        })
        .collect();
    BvTable { rows, skipped }
}
