//! The operator S, the algebra differential, d_M on linear and cyclic words,
//! the exterior differential on U, and d_U = d + [H¹₁, ·].

use crate::algebra_core::{sign_q, Element, Letter, MonoKey, Presentation, Space, Q};
use crate::cyclic_spaces::add_cyclic;
use crate::error::SftError;
use crate::sft_operations::bracket;

/// S(a₁…a_k) = Σ_i (−1)^{|a₁…a_{i−1}|} a₁…â_i…a_k, with S(1) = 0.
pub fn s_operator(p: &Presentation, x: &Element) -> Element {
    let mut out = Element::zero(Space::M);
    for (k, c) in x.iter() {
        let mut deg = 0i64;
        for (i, l) in k.word.iter().enumerate() {
            if l.is_chord() {
                let mut w = k.word.clone();
                w[i] = Letter::hat(l.index);
                out.add_term(MonoKey::plain(w), sign_q(deg % 2 != 0) * c);
            }
            deg += p.degree(*l);
        }
    }
    out
}

/// S applied to a single chord word.
pub fn s_word(p: &Presentation, w: &[Letter]) -> Element {
    s_operator(p, &Element::from_key(Space::A, MonoKey::plain(w.to_vec()), crate::algebra_core::q(1)))
}

/// Leibniz extension of the chord differential to words in A.
pub fn d_algebra(p: &Presentation, x: &Element) -> Element {
    let mut out = Element::zero(x.space());
    for (k, c) in x.iter() {
        let mut deg = 0i64;
        for (i, l) in k.word.iter().enumerate() {
            if l.is_chord() {
                let sg = sign_q(deg % 2 != 0) * c;
                for (dk, dc) in p.differential(l.index).iter() {
                    let mut w = k.word[..i].to_vec();
                    w.extend_from_slice(&dk.word);
                    w.extend_from_slice(&k.word[i + 1..]);
                    out.add_term(MonoKey { word: w, ..k.clone() }, &sg * dc);
                }
            }
            deg += p.degree(*l);
        }
    }
    out
}

/// d_M on a single linear word. Chords go to their differential; a hat
/// `â` with `a: i → j` goes to `−a x_j + x_i a − S(da)`; basepoints to 0.
fn d_m_word(p: &Presentation, word: &[Letter], c: &Q, out: &mut Vec<(Vec<Letter>, Q)>) {
    let mut deg = 0i64;
    for (i, l) in word.iter().enumerate() {
        let sg = sign_q(deg % 2 != 0) * c;
        let pre = &word[..i];
        let post = &word[i + 1..];
        let splice = |mid: &[Letter]| {
            let mut w = pre.to_vec();
            w.extend_from_slice(mid);
            w.extend_from_slice(post);
            w
        };
        if l.is_chord() {
            for (dk, dc) in p.differential(l.index).iter() {
                out.push((splice(&dk.word), &sg * dc));
            }
        } else if l.variant == crate::algebra_core::Variant::Hat {
            let ch = &p.chords()[l.index];
            let a = Letter::chord(l.index);
            out.push((splice(&[a, Letter::x(ch.to)]), -sg.clone()));
            out.push((splice(&[Letter::x(ch.from), a]), sg.clone()));
            for (dk, dc) in p.differential(l.index).iter() {
                for (sk, sc) in s_word(p, &dk.word).iter() {
                    out.push((splice(&sk.word), -(&sg * dc * sc)));
                }
            }
        }
        deg += p.degree(*l);
    }
}

/// d_M on M (linear words) or M^cyc (computed on the representative, then
/// canonicalized).
pub fn d_m(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let space = x.space();
    let mut out = Element::zero(space);
    let mut buf = Vec::new();
    for (k, c) in x.iter() {
        if k.word.iter().any(|l| l.is_dual()) || k.excited.is_some() {
            return Err(SftError::WrongSpace("d_M expects an element of M".into()));
        }
        buf.clear();
        d_m_word(p, &k.word, c, &mut buf);
        for (w, cc) in buf.drain(..) {
            let key = MonoKey { word: w, ..k.clone() };
            if space.is_cyclic() {
                add_cyclic(p, &mut out, key, cc)?;
            } else {
                out.add_term(key, cc);
            }
        }
    }
    Ok(out)
}

/// The exterior differential on cyclic U-words: d acts on chord letters and
/// kills every other generator. The chord at position `i` of
/// `σ^s ħ^h ⟦w⟧` picks up `(−1)^{s + |w[..i]|}`.
pub fn d_exterior(p: &Presentation, x: &Element) -> Result<Element, SftError> {
    let mut out = Element::zero(x.space());
    for (k, c) in x.iter() {
        let mut deg = k.sigma;
        for (i, l) in k.word.iter().enumerate() {
            if l.is_chord() {
                let sg = sign_q(deg % 2 != 0) * c;
                for (dk, dc) in p.differential(l.index).iter() {
                    let mut w = k.word[..i].to_vec();
                    w.extend_from_slice(&dk.word);
                    w.extend_from_slice(&k.word[i + 1..]);
                    let excited = k.excited.map(|e| if e > i { e - 1 + dk.word.len() } else { e });
                    let key = MonoKey { sigma: k.sigma, hbar: k.hbar, word: w, excited };
                    add_cyclic(p, &mut out, key, &sg * dc)?;
                }
            }
            deg += p.degree(*l);
        }
    }
    Ok(out)
}

/// Presentation together with H¹₁, validated so that d_U² = 0.
#[derive(Clone, Debug)]
pub struct DifferentialContext {
    pub presentation: Presentation,
    pub h11: Element,
    pub cutoff: usize,
}

impl DifferentialContext {
    /// Checks d² = 0 on the generators, then the first master equation.
    pub fn new(p: &Presentation, cutoff: usize) -> Result<Self, SftError> {
        check_d_squared(p)?;
        let h = crate::sft_operations::build_h1(p, 1)?;
        let res = crate::sft_operations::master_residual(p, &h, 1)?;
        if !res.is_zero() {
            return Err(SftError::MasterEquation(format!("dH¹₁ + H¹₁⋆H¹₁ has {} nonzero terms", res.len())));
        }
        Ok(DifferentialContext { presentation: p.clone(), h11: h.h1[0].clone(), cutoff })
    }

    pub fn d_u(&self, x: &Element) -> Result<Element, SftError> {
        d_u(&self.presentation, &self.h11, x)
    }
}

/// d_U X = dX + [H¹₁, X].
pub fn d_u(p: &Presentation, h11: &Element, x: &Element) -> Result<Element, SftError> {
    let mut out = d_exterior(p, x)?;
    out += &bracket(p, h11, x)?;
    Ok(out.with_space(x.space()))
}

/// d(dc) = 0 for every chord.
pub fn check_d_squared(p: &Presentation) -> Result<(), SftError> {
    for (i, ch) in p.chords().iter().enumerate() {
        let dd = d_algebra(p, p.differential(i));
        if !dd.is_zero() {
            return Err(SftError::Presentation(format!("d² {} ≠ 0", ch.name)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra_core::{q, Chord};
    use crate::cyclic_spaces::canonicalize;

    fn unknot(n: i64) -> Presentation {
        Presentation::new(n, 1, vec![Chord { name: "a".into(), degree: n - 1, from: 1, to: 1 }]).unwrap()
    }

    #[test]
    fn s_of_two_letters() {
        let p = Presentation::new(
            3,
            1,
            vec![
                Chord { name: "a".into(), degree: 1, from: 1, to: 1 },
                Chord { name: "b".into(), degree: 2, from: 1, to: 1 },
            ],
        )
        .unwrap();
        let s = s_word(&p, &[Letter::chord(0), Letter::chord(1)]);
        assert_eq!(s.coeff(&MonoKey::plain(vec![Letter::hat(0), Letter::chord(1)])), q(1));
        assert_eq!(s.coeff(&MonoKey::plain(vec![Letter::chord(0), Letter::hat(1)])), q(-1));
        assert_eq!(s.len(), 2);
        assert!(s_operator(&p, &Element::from_key(Space::A, MonoKey::plain(vec![]), q(1))).is_zero());
    }

    #[test]
    fn unknot_d_m_of_hat() {
        let p = unknot(2);
        let x = Element::from_key(Space::M, MonoKey::plain(vec![Letter::hat(0)]), q(1));
        let d = d_m(&p, &x).unwrap();
        assert_eq!(d.coeff(&MonoKey::plain(vec![Letter::chord(0), Letter::x(1)])), q(-1));
        assert_eq!(d.coeff(&MonoKey::plain(vec![Letter::x(1), Letter::chord(0)])), q(1));
        let xx = Element::from_key(Space::M, MonoKey::plain(vec![Letter::x(1)]), q(1));
        assert!(d_m(&p, &xx).unwrap().is_zero());
    }

    #[test]
    fn unknot_cyclic_hat_powers() {
        // n = 2: ⟦â a^{2k}⟧ is a cycle, d⟦â a^{2k+1}⟧ = 2⟦x a^{2k+2}⟧
        let p = unknot(2);
        for m in 0..6 {
            let mut w = vec![Letter::hat(0)];
            w.extend(std::iter::repeat_n(Letter::chord(0), m));
            let x = canonicalize(&p, &Element::from_key(Space::MCyc, MonoKey::plain(w), q(1)), Space::MCyc).unwrap();
            let d = d_m(&p, &x).unwrap();
            if m % 2 == 0 {
                assert!(d.is_zero());
            } else {
                let mut t = vec![Letter::x(1)];
                t.extend(std::iter::repeat_n(Letter::chord(0), m + 1));
                let e = canonicalize(&p, &Element::from_key(Space::MCyc, MonoKey::plain(t), q(2)), Space::MCyc).unwrap();
                assert_eq!(d, e);
            }
        }
    }
}
