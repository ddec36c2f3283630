//! Cyclic quotients, tensor types, excitation and the maps β, β̲.
//!
//! A cyclic monomial is `σ^s ħ^h ⟦w⟧`; the prefix never rotates, so the
//! rotation sign only involves the letters of `w`.

use crate::algebra_core::{normalize_sigma_hbar, sign_q, Element, MonoKey, Parity, Presentation, RawLetter, Space, Q};
use crate::error::SftError;

/// Moves the first letter of the word to the end. Returns the sign flag
/// (true = negative) and the rotated key.
pub fn rotate_once(p: &Presentation, key: &MonoKey) -> Result<(bool, MonoKey), SftError> {
    let w = &key.word;
    if w.is_empty() {
        return Err(SftError::NotCyclic);
    }
    let first = p.parity(w[0]);
    let rest = p.word_parity(&w[1..]);
    let mut word = w[1..].to_vec();
    word.push(w[0]);
    let len = w.len();
    let excited = key.excited.map(|e| (e + len - 1) % len);
    Ok((first.pairs_odd(rest), MonoKey { sigma: key.sigma, hbar: key.hbar, word, excited }))
}

/// Rotates left by `k` positions in one step.
pub fn rotate_by(p: &Presentation, key: &MonoKey, k: usize) -> (bool, MonoKey) {
    let len = key.word.len();
    if len == 0 {
        return (false, key.clone());
    }
    let k = k % len;
    let a = p.word_parity(&key.word[..k]);
    let b = p.word_parity(&key.word[k..]);
    let mut word = key.word[k..].to_vec();
    word.extend_from_slice(&key.word[..k]);
    let excited = key.excited.map(|e| (e + len - k) % len);
    (a.pairs_odd(b), MonoKey { sigma: key.sigma, hbar: key.hbar, word, excited })
}

/// Canonical representative of a cyclic class: the minimal rotation.
/// Returns `None` when a nontrivial rotation fixes the word with sign −1.
pub fn canonical(p: &Presentation, key: &MonoKey) -> Result<Option<(bool, MonoKey)>, SftError> {
    let w = &key.word;
    let len = w.len();
    if len == 0 {
        return Ok(Some((false, key.clone())));
    }
    if !p.is_cyclically_composable(w) {
        return Err(SftError::NotCyclic);
    }
    let parities: Vec<Parity> = w.iter().map(|&l| p.parity(l)).collect();
    let total = parities.iter().fold(Parity::default(), |a, &b| a + b);
    let mut best = 0usize;
    let rot_lt = |i: usize, j: usize| -> std::cmp::Ordering {
        for t in 0..len {
            let c = w[(i + t) % len].cmp(&w[(j + t) % len]);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        let ei = key.excited.map(|e| (e + len - i) % len);
        let ej = key.excited.map(|e| (e + len - j) % len);
        ei.cmp(&ej)
    };
    for i in 1..len {
        if rot_lt(i, best) == std::cmp::Ordering::Less {
            best = i;
        }
    }
    // sign of rotating by k: <w[..k], w[k..]>
    let mut prefix = Parity::default();
    let mut sign_at = Vec::with_capacity(len);
    for &par in &parities {
        sign_at.push(prefix.pairs_odd(total + prefix));
        prefix += par;
    }
    for i in 0..len {
        if i != best && rot_lt(i, best) == std::cmp::Ordering::Equal && sign_at[i] != sign_at[best] {
            return Ok(None);
        }
    }
    let (odd, k) = rotate_by(p, key, best);
    debug_assert_eq!(odd, sign_at[best]);
    Ok(Some((odd, k)))
}

/// Adds `c * key` to a cyclic element, canonicalizing first.
pub fn add_cyclic(p: &Presentation, out: &mut Element, key: MonoKey, c: Q) -> Result<(), SftError> {
    if let Some((odd, k)) = canonical(p, &key)? {
        out.add_term(k, if odd { -c } else { c });
    }
    Ok(())
}

/// Canonicalizes every term of `x` into the cyclic space `space`.
pub fn canonicalize(p: &Presentation, x: &Element, space: Space) -> Result<Element, SftError> {
    let mut out = Element::zero(space);
    for (k, c) in x.iter() {
        add_cyclic(p, &mut out, k.clone(), c.clone())?;
    }
    Ok(out)
}

/// Builds the cyclic monomial of a raw letter sequence.
pub fn cyclic_from_raw(p: &Presentation, raw: &[RawLetter], coeff: Q, space: Space) -> Result<Element, SftError> {
    let (odd, key) = normalize_sigma_hbar(p, raw)?;
    let mut out = Element::zero(space);
    add_cyclic(p, &mut out, key, sign_q(odd) * coeff)?;
    Ok(out)
}

/// Counts defining the decomposition U = ⊕ U^p_q(s, h).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TensorType {
    pub p: i64,
    pub q: i64,
    pub s: i64,
    pub h: i64,
}

impl TensorType {
    pub fn of(key: &MonoKey) -> Self {
        let p = key.word.iter().filter(|l| l.is_dual()).count() as i64;
        let q = key.word.iter().filter(|l| l.is_hat_or_x()).count() as i64;
        TensorType { p, q, s: key.sigma, h: key.hbar }
    }
    pub fn st(&self) -> i64 {
        self.p + self.h
    }
    pub fn jp(&self) -> i64 {
        self.p + self.q + self.s
    }
    pub fn is_balanced(&self) -> bool {
        self.h == -1 && self.p - self.q - self.s == 0
    }
}

pub fn is_balanced(x: &Element) -> bool {
    x.iter().all(|(k, _)| TensorType::of(k).is_balanced())
}

/// The sum of all excitations of each term.
pub fn excite(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::ExcitedUBal);
    for (k, c) in x.iter() {
        if k.excited.is_some() {
            return Err(SftError::DoubleExcitation);
        }
        for (i, l) in k.word.iter().enumerate() {
            if l.is_excitable() {
                let mut e = k.clone();
                e.excited = Some(i);
                add_cyclic(p, &mut out, e, c.clone())?;
            }
        }
    }
    Ok(out)
}

/// Forgets the excitation marks.
pub fn unexcite(p: &Presentation, x: &Element, space: Space) -> Result<Element, SftError> {
    let mut out = Element::zero(space);
    for (k, c) in x.iter() {
        let mut e = k.clone();
        e.excited = None;
        add_cyclic(p, &mut out, e, c.clone())?;
    }
    Ok(out)
}

/// β(X) = X ħ⁻¹ σ⁻¹, from M^cyc into the balanced space.
pub fn beta(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::UBal);
    for (k, c) in x.iter() {
        if k.sigma != 0 || k.hbar != 0 {
            return Err(SftError::WrongSpace("β expects an element of M^cyc".into()));
        }
        let mut raw: Vec<RawLetter> = k.word.iter().map(|&l| RawLetter::Gen(l)).collect();
        raw.extend([RawLetter::Hbar(-1), RawLetter::Sigma(-1)]);
        let (odd, key) = normalize_sigma_hbar(p, &raw)?;
        add_cyclic(p, &mut out, key, sign_q(odd) * c)?;
    }
    Ok(out)
}

/// Inverse of [`beta`].
pub fn beta_inv(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::MCyc);
    for (k, c) in x.iter() {
        if k.sigma != -1 || k.hbar != -1 || k.excited.is_some() {
            return Err(SftError::WrongSpace("β⁻¹ expects σ⁻¹ħ⁻¹⟦w⟧".into()));
        }
        let mut raw: Vec<RawLetter> = k.word.iter().map(|&l| RawLetter::Gen(l)).collect();
        raw.extend([RawLetter::Hbar(-1), RawLetter::Sigma(-1)]);
        let (odd, _) = normalize_sigma_hbar(p, &raw)?;
        add_cyclic(p, &mut out, MonoKey::plain(k.word.clone()), sign_q(odd) * c)?;
    }
    Ok(out)
}

/// β̲(X) = (−1)^{(n−1)|X|} ℰ(β(X)), landing in the excited balanced space 𝐌^bal.
///
/// The degree twist makes β̲ a chain map on the nose: without it
/// β̲∘d_M = (−1)^{n−1} d_U∘β̲.
pub fn beta_underline(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(Space::TauMBal);
    for (k, c) in x.iter() {
        let tw = sign_q((p.n() - 1) * p.key_degree(k) % 2 != 0);
        let single = Element::from_key(Space::MCyc, k.clone(), c * tw);
        out += &excite(p, &beta(p, &single)?)?;
    }
    Ok(out.with_space(Space::TauMBal))
}

/// Inverse of [`beta_underline`]: every term of 𝐌^bal has one excitable letter.
pub fn beta_underline_inv(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    for (k, _) in x.iter() {
        if k.word.iter().filter(|l| l.is_excitable()).count() != 1 {
            return Err(SftError::WrongSpace("β̲⁻¹ expects an element of 𝐌^bal".into()));
        }
    }
    let plain = beta_inv(p, &unexcite(p, x, Space::UBal)?)?;
    let mut out = Element::zero(Space::MCyc);
    for (k, c) in plain.iter() {
        let tw = sign_q((p.n() - 1) * p.key_degree(k) % 2 != 0);
        out.add_term(k.clone(), c * tw);
    }
    Ok(out)
}

/// `X θ` with θ = ħ⁻¹σ⁻¹, excited at its unique hat or basepoint letter.
pub fn theta_excited(p: &Presentation, word: &[crate::algebra_core::Letter], coeff: Q) -> Result<Element, SftError> {
    let x = Element::from_key(Space::MCyc, MonoKey::plain(word.to_vec()), coeff);
    beta_underline(p, &canonicalize(p, &x, Space::MCyc)?)
}

/// Total-rotation check used by the property tests.
pub fn full_rotation_sign(p: &Presentation, key: &MonoKey) -> Result<bool, SftError> {
    let mut odd = false;
    let mut k = key.clone();
    for _ in 0..key.word.len() {
        let (o, nk) = rotate_once(p, &k)?;
        odd ^= o;
        k = nk;
    }
    debug_assert_eq!(&k, key);
    Ok(odd)
}
