//! Contractions ⋆, ⋆_j, ⋆^i, the bracket, the operator 𝒮 on cyclic words,
//! the Hamiltonian H¹ and the master-equation residuals.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra_core::{q, q_frac, sign_q, Element, Letter, MonoKey, Presentation, RawLetter, Space, Q};
use crate::cyclic_spaces::{add_cyclic, cyclic_from_raw, excite, rotate_by, TensorType};
use crate::differentials::{d_exterior, s_word};
use crate::error::SftError;

/// Which positions of the two factors may be contracted.
#[derive(Clone, Copy, Debug, Default)]
struct Restrict {
    upos: Option<usize>,
    vpos: Option<usize>,
}

/// Coefficient of the ħ emitted when the dual `u` (in the left factor) is
/// contracted against `v` (in the right factor). Exactly one of the two must be
/// excited.
pub fn pairing(p: &Presentation, u: Letter, u_excited: bool, v: Letter, v_excited: bool) -> Option<Q> {
    if u_excited == v_excited || !u.is_dual() || u.partner() != Some(v) {
        return None;
    }
    Some(sign_q(p.n() % 2 != 0))
}

fn star_mono(p: &Presentation, x: &MonoKey, cx: &Q, y: &MonoKey, cy: &Q, r: Restrict, out: &mut Element) -> Result<(), SftError> {
    let xl = x.word.len();
    for (i, &u) in x.word.iter().enumerate() {
        if !u.is_dual() || r.upos.is_some_and(|t| t != i) {
            continue;
        }
        for (j, &v) in y.word.iter().enumerate() {
            if !v.is_hat_or_x() || r.vpos.is_some_and(|t| t != j) {
                continue;
            }
            let Some(f) = pairing(p, u, x.excited == Some(i), v, y.excited == Some(j)) else {
                continue;
            };
            let (sa, xr) = rotate_by(p, x, (i + 1) % xl);
            let (sb, yr) = rotate_by(p, y, j);
            let xp = &xr.word[..xl - 1];
            let yp = &yr.word[1..];
            let z2 = p.prefix_parity(y.sigma, y.hbar);
            let xpp = p.word_parity(xp);
            // Z1 x' ħ Z2 y': bring v out of Y, Z2 past x', ħ past x', then merge.
            let odd = sa
                ^ sb
                ^ z2.pairs_odd(p.parity(v))
                ^ z2.pairs_odd(xpp)
                ^ p.hbar_parity().pairs_odd(xpp)
                ^ p.prefix_merge_odd(x.hbar + 1, y.sigma);
            let excited = if x.excited.is_some() && x.excited != Some(i) {
                xr.excited
            } else if y.excited.is_some() && y.excited != Some(j) {
                yr.excited.map(|e| xp.len() + e - 1)
            } else {
                None
            };
            let mut word = xp.to_vec();
            word.extend_from_slice(yp);
            let key = MonoKey { sigma: x.sigma + y.sigma, hbar: x.hbar + y.hbar + 1, word, excited };
            add_cyclic(p, out, key, sign_q(odd) * &f * cx * cy)?;
        }
    }
    Ok(())
}

/// The full contraction X ⋆ Y.
pub fn star(p: &Presentation, x: &Element, y: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::ExcitedUBal);
    for (kx, cx) in x.iter() {
        for (ky, cy) in y.iter() {
            star_mono(p, kx, cx, ky, cy, Restrict::default(), &mut out)?;
        }
    }
    Ok(out)
}

fn check_index(j: usize, max: usize) -> Result<(), SftError> {
    if j == 0 || j > max {
        return Err(SftError::IndexRange { index: j, max });
    }
    Ok(())
}

/// X ⋆_j Y for Y ∈ U¹_q: contracts only the j-th hat/basepoint letter of Y,
/// counted counter-clockwise from its unique dual letter.
pub fn star_lower(p: &Presentation, x: &Element, y: &Element, j: usize) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::ExcitedUBal);
    for (ky, cy) in y.iter() {
        let tt = TensorType::of(ky);
        if tt.p != 1 {
            return Err(SftError::TensorType(format!("⋆_j needs one dual letter on the right, found {}", tt.p)));
        }
        check_index(j, tt.q as usize)?;
        let len = ky.word.len();
        let d0 = ky.word.iter().position(|l| l.is_dual()).unwrap_or(0);
        let vpos = (1..len).map(|t| (d0 + t) % len).filter(|&t| ky.word[t].is_hat_or_x()).nth(j - 1);
        for (kx, cx) in x.iter() {
            star_mono(p, kx, cx, ky, cy, Restrict { upos: None, vpos }, &mut out)?;
        }
    }
    Ok(out)
}

/// X ⋆^i Y for X ∈ U^p_1: contracts only the i-th dual letter of X, counted
/// clockwise from its unique hat/basepoint letter.
pub fn star_upper(p: &Presentation, x: &Element, i: usize, y: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::ExcitedUBal);
    for (kx, cx) in x.iter() {
        let tt = TensorType::of(kx);
        if tt.q != 1 {
            return Err(SftError::TensorType(format!("⋆^i needs one hat/basepoint letter on the left, found {}", tt.q)));
        }
        check_index(i, tt.p as usize)?;
        let len = kx.word.len();
        let h0 = kx.word.iter().position(|l| l.is_hat_or_x()).unwrap_or(0);
        let upos = (1..len).map(|t| (h0 + len - t) % len).filter(|&t| kx.word[t].is_dual()).nth(i - 1);
        for (ky, cy) in y.iter() {
            star_mono(p, kx, cx, ky, cy, Restrict { upos, vpos: None }, &mut out)?;
        }
    }
    Ok(out)
}

/// Splits an element into homogeneous parts.
pub fn by_degree(p: &Presentation, x: &Element) -> BTreeMap<i64, Element> {
    let mut parts: BTreeMap<i64, Element> = BTreeMap::new();
    for (k, c) in x.iter() {
        parts
            .entry(p.key_degree(k))
            .or_insert_with(|| Element::zero(x.space()))
            .add_term(k.clone(), c.clone());
    }
    parts
}

/// [X, Y] = X ⋆ Y − (−1)^{|X||Y|} Y ⋆ X, extended bilinearly over degrees.
pub fn bracket(p: &Presentation, x: &Element, y: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::ExcitedUBal);
    let xs = by_degree(p, x);
    let ys = by_degree(p, y);
    for (dx, xd) in &xs {
        for (dy, yd) in &ys {
            out += &star(p, xd, yd)?;
            out.add_scaled(&star(p, yd, xd)?, &-sign_q(dx * dy % 2 != 0));
        }
    }
    Ok(out)
}

/// 𝒮 on cyclic unexcited words: replaces one chord by its hat and lowers the
/// σ power by one.
pub fn s_cyclic(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(x.space());
    for (k, c) in x.iter() {
        if k.excited.is_some() {
            return Err(SftError::WrongSpace("𝒮 acts on unexcited words".into()));
        }
        for (i, l) in k.word.iter().enumerate() {
            if !l.is_chord() {
                continue;
            }
            let odd = p.sigma_parity().pairs_odd(p.word_parity(&k.word[..i])) ^ p.prefix_merge_odd(k.hbar, -1);
            let mut word = k.word.clone();
            word[i] = Letter::hat(l.index);
            let key = MonoKey { sigma: k.sigma - 1, hbar: k.hbar, word, excited: None };
            add_cyclic(p, &mut out, key, sign_q(odd) * c)?;
        }
    }
    Ok(out)
}

/// The genus-zero one-output part of the Hamiltonian, and whatever higher
/// components the user supplied.
#[derive(Clone, Debug)]
pub struct HamiltonianData {
    pub h11_prime: Element,
    pub h11_doubleprime: Element,
    /// Unexcited h¹_q, index q − 1.
    pub h: Vec<Element>,
    /// Excited H¹_q = ℰ(h¹_q), index q − 1.
    pub h1: Vec<Element>,
    /// Excited H^p_q for p ≥ 2, keyed by (p, q).
    pub user_higher: BTreeMap<(usize, usize), Element>,
    pub q_max: usize,
}

impl HamiltonianData {
    /// H¹_q, 1-based.
    pub fn h1q(&self, q: usize) -> Result<&Element, SftError> {
        self.h1.get(q.wrapping_sub(1)).ok_or(SftError::MissingHamiltonian(1, q))
    }

    pub fn higher(&self, p: usize, q: usize) -> Result<&Element, SftError> {
        self.user_higher.get(&(p, q)).ok_or(SftError::MissingHamiltonian(p, q))
    }

    /// Installs H^p_0 from an unexcited (or already excited) balanced element
    /// of degree −1, and derives H^p_1 = ℰ(𝒮 h^p_0).
    pub fn set_higher(&mut self, pres: &Presentation, p: usize, q: usize, x: &Element) -> Result<(), SftError> {
        for (k, _) in x.iter() {
            let tt = TensorType::of(k);
            if !tt.is_balanced() {
                return Err(SftError::TensorType(format!("H {p} {q} must be balanced")));
            }
            if tt.p != p as i64 || tt.q != q as i64 {
                return Err(SftError::TensorType(format!("H {p} {q} has a term of type ({}, {})", tt.p, tt.q)));
            }
            if pres.key_degree(k) != -1 {
                return Err(SftError::TensorType(format!("H {p} {q} must have degree -1")));
            }
        }
        let excited = x.iter().all(|(k, _)| k.excited.is_some());
        let plain = x.iter().all(|(k, _)| k.excited.is_none());
        if !excited && !plain {
            return Err(SftError::WrongSpace("mixed excited and unexcited terms".into()));
        }
        let ex = if plain { excite(pres, x)? } else { x.clone() };
        if q == 0 && plain {
            let s1 = s_cyclic(pres, x)?;
            self.user_higher.entry((p, 1)).or_insert(excite(pres, &s1)?);
        }
        self.user_higher.insert((p, q), ex);
        Ok(())
    }
}

fn raw_gens(w: &[Letter]) -> impl Iterator<Item = RawLetter> + '_ {
    w.iter().map(|&l| RawLetter::Gen(l))
}

/// Builds h¹₁ = (h¹₁)' + (h¹₁)'', h¹₂ and h¹_q = 𝒮^{q−1}h¹₁ / q! for q ≥ 3,
/// together with their excitations.
pub fn build_h1(p: &Presentation, q_max: usize) -> Result<HamiltonianData, SftError> {
    let q_max = q_max.max(1);
    let mut hp = Element::zero(Space::UBal);
    let mut hpp = Element::zero(Space::UBal);
    for (c, ch) in p.chords().iter().enumerate() {
        let tail = [RawLetter::Hbar(-1), RawLetter::Gen(Letter::hat_dual(c))];
        for (dk, dc) in p.differential(c).iter() {
            for (sk, sc) in s_word(p, &dk.word).iter() {
                let raw: Vec<RawLetter> = raw_gens(&sk.word).chain(tail).collect();
                hp += &cyclic_from_raw(p, &raw, dc * sc, Space::UBal)?;
            }
        }
        let a = Letter::chord(c);
        let r1: Vec<RawLetter> = raw_gens(&[a, Letter::x(ch.to)]).chain(tail).collect();
        let r2: Vec<RawLetter> = raw_gens(&[Letter::x(ch.from), a]).chain(tail).collect();
        hpp += &cyclic_from_raw(p, &r1, q(1), Space::UBal)?;
        hpp += &cyclic_from_raw(p, &r2, q(-1), Space::UBal)?;
    }
    let h11 = &hp + &hpp;
    let mut h = vec![h11.clone()];
    if q_max >= 2 {
        let mut h12 = s_cyclic(p, &hp)?.scale(&q_frac(1, 2));
        h12 += &s_cyclic(p, &hpp)?;
        for j in 1..=p.m() {
            let raw = [
                RawLetter::Sigma(-1),
                RawLetter::Gen(Letter::x(j)),
                RawLetter::Gen(Letter::x(j)),
                RawLetter::Hbar(-1),
                RawLetter::Gen(Letter::x_dual(j)),
            ];
            h12 += &cyclic_from_raw(p, &raw, q(1), Space::UBal)?;
        }
        h.push(h12);
    }
    let mut cur = s_cyclic(p, &h11)?;
    for qq in 3..=q_max {
        cur = s_cyclic(p, &cur)?;
        let fact: i64 = (1..=qq as i64).product();
        h.push(cur.scale(&q_frac(1, fact)));
    }
    let h1 = h
        .iter()
        .map(|x| excite(p, x).map(|e| e.with_space(Space::ExcitedUBal)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HamiltonianData { h11_prime: hp, h11_doubleprime: hpp, h, h1, user_higher: BTreeMap::new(), q_max })
}

/// Residual of the q-th genus-zero master equation
/// dH¹_q + Σ_{k=1}^{q} Σ_{j=1}^{k} H¹_{q−k+1} ⋆_j H¹_k.
pub fn master_residual(p: &Presentation, h: &HamiltonianData, q: usize) -> Result<Element, SftError> {
    let mut out = d_exterior(p, h.h1q(q)?)?;
    for k in 1..=q {
        let left = h.h1q(q - k + 1)?;
        let right = h.h1q(k)?;
        for j in 1..=k {
            out += &star_lower(p, left, right, j)?;
        }
    }
    Ok(out)
}

/// dH²₀ + [H¹₁, H²₀].
pub fn h20_residual(p: &Presentation, h: &HamiltonianData) -> Result<Element, SftError> {
    let h20 = h.higher(2, 0)?;
    let mut out = d_exterior(p, h20)?;
    out += &bracket(p, h.h1q(1)?, h20)?;
    Ok(out)
}

/// dH²₁ + [H¹₁, H²₁] + H²₀ ⋆₁ H¹₂ + H²₀ ⋆₂ H¹₂.
pub fn h21_residual(p: &Presentation, h: &HamiltonianData) -> Result<Element, SftError> {
    let h20 = h.higher(2, 0)?;
    let h21 = h.higher(2, 1)?;
    let h12 = h.h1q(2)?;
    let mut out = d_exterior(p, h21)?;
    out += &bracket(p, h.h1q(1)?, h21)?;
    out += &star_lower(p, h20, h12, 1)?;
    out += &star_lower(p, h20, h12, 2)?;
    Ok(out)
}

/// One checked identity.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: Element,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Checks I_1 … I_{q_max} and, when H²₀ is present, the two H² identities.
pub fn check_master(p: &Presentation, h: &HamiltonianData) -> Result<Vec<IdentityCheck>, SftError> {
    let mut out = Vec::new();
    for qq in 1..=h.q_max.min(h.h1.len()) {
        out.push(IdentityCheck { name: format!("I{qq}"), residual: master_residual(p, h, qq)? });
    }
    if h.user_higher.contains_key(&(2, 0)) {
        out.push(IdentityCheck { name: "H20".into(), residual: h20_residual(p, h)? });
        if h.h1.len() >= 2 {
            out.push(IdentityCheck { name: "H21".into(), residual: h21_residual(p, h)? });
        }
    }
    Ok(out)
}

/// Ḣ¹₂: the terms of H¹₂ whose excited letter is the second hat/basepoint
/// letter counted counter-clockwise from the dual letter.
pub fn h_dot(h12: &Element) -> Element {
    h12.filter(|k| {
        let len = k.word.len();
        let Some(d0) = k.word.iter().position(|l| l.is_dual()) else {
            return false;
        };
        let second = (1..len).map(|t| (d0 + t) % len).filter(|&t| k.word[t].is_hat_or_x()).nth(1);
        second.is_some() && second == k.excited
    })
}

/// X^↓(A₁, …, A_q) = (…((X ⋆^1 A₁) ⋆^1 A₂) …) for X ∈ U^p_1.
pub fn op_down(p: &Presentation, x: &Element, args: &[Element]) -> Result<Element, SftError> {
    let mut cur = x.clone();
    for a in args {
        cur = star_upper(p, &cur, 1, a)?;
    }
    Ok(cur)
}

/// Y^↑(B₁, …, B_q) = B_q ⋆₁ (… (B₁ ⋆₁ Y)) for Y ∈ U¹_q.
pub fn op_up(p: &Presentation, y: &Element, args: &[Element]) -> Result<Element, SftError> {
    let mut cur = y.clone();
    for b in args {
        cur = star_lower(p, b, &cur, 1)?;
    }
    Ok(cur)
}

/// Y^{↑↓}(X, Z) = (X ⋆₁ Y) ⋆ Z.
pub fn op_updown(p: &Presentation, y: &Element, x: &Element, z: &Element) -> Result<Element, SftError> {
    star(p, &star_lower(p, x, y, 1)?, z)
}

/// Y^{↓↑}(Z, X) = (X ⋆₂ Y) ⋆ Z.
pub fn op_downup(p: &Presentation, y: &Element, z: &Element, x: &Element) -> Result<Element, SftError> {
    star(p, &star_lower(p, x, y, 2)?, z)
}

/// X^↻(Y) = X ⋆ Y.
pub fn op_circ(p: &Presentation, x: &Element, y: &Element) -> Result<Element, SftError> {
    star(p, x, y)
}

/// Sum of the absolute values of the coefficients; used in reports.
pub fn l1_norm(x: &Element) -> Q {
    x.iter().fold(Q::zero(), |a, (_, c)| a + if c < &Q::zero() { -c } else { c.clone() })
}
