//! Shared fixtures: the unknot and a generator of random Legendrian DGAs.
#![allow(dead_code)]

use itertools::Itertools;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sftkit::cyclic_spaces::{canonical, cyclic_from_raw};
use sftkit::differentials::check_d_squared;
use sftkit::sft_operations::{build_h1, HamiltonianData};
use sftkit::*;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One component, one chord `a` of degree n − 1 with da = 0.
pub fn unknot_pres(n: i64) -> Presentation {
    Presentation::new(n, 1, vec![Chord { name: "a".into(), degree: n - 1, from: 1, to: 1 }]).unwrap()
}

/// The unknot with H¹ up to q = 4 and H²₀ = σ²ħ⁻¹⟦â* x*⟧.
pub fn unknot(n: i64) -> (Presentation, HamiltonianData) {
    let p = unknot_pres(n);
    let mut h = build_h1(&p, 4).unwrap();
    let raw = [
        RawLetter::Sigma(2),
        RawLetter::Hbar(-1),
        RawLetter::Gen(Letter::hat_dual(0)),
        RawLetter::Gen(Letter::x_dual(1)),
    ];
    let h20 = cyclic_from_raw(&p, &raw, q(1), Space::UBal).unwrap();
    h.set_higher(&p, 2, 0, &h20).unwrap();
    (p, h)
}

/// Random DGA with two or three chords and d² = 0, found by rejection.
/// Differentials use composable words of length one to three.
pub fn rand_pres(rng: &mut ChaCha8Rng, n: Option<i64>, m: Option<usize>, min_degree: i64) -> Presentation {
    let names = ["a", "b", "c"];
    loop {
        let n = n.unwrap_or_else(|| *[2, 3, 4, 5].choose(rng).unwrap());
        let m = m.unwrap_or_else(|| *[1, 1, 2].choose(rng).unwrap());
        let k = *[2usize, 3].choose(rng).unwrap();
        let chords: Vec<Chord> = names[..k]
            .iter()
            .map(|nm| Chord {
                name: nm.to_string(),
                degree: rng.random_range(min_degree..=3),
                from: rng.random_range(1..=m),
                to: rng.random_range(1..=m),
            })
            .collect();
        let mut p = Presentation::new(n, m, chords.clone()).unwrap();
        let mut any = false;
        for (ci, c) in chords.iter().enumerate() {
            let mut image = Element::zero(Space::A);
            for len in 1..=3usize {
                for w in std::iter::repeat_n(0..k, len).multi_cartesian_product() {
                    if len == 1 && w[0] == ci {
                        continue;
                    }
                    let word: Vec<Letter> = w.iter().map(|&i| Letter::chord(i)).collect();
                    if !p.is_composable(&word) || p.word_degree(&word) != c.degree - 1 {
                        continue;
                    }
                    if chords[w[0]].from != c.from || chords[w[len - 1]].to != c.to {
                        continue;
                    }
                    if rng.random_bool(0.5) {
                        image.add_term(MonoKey::plain(word), q(*[1, -1, 2].choose(rng).unwrap()));
                    }
                }
            }
            any |= !image.is_zero();
            p.set_differential(ci, image).unwrap();
        }
        if any && check_d_squared(&p).is_ok() {
            return p;
        }
    }
}

/// A random cyclically composable word over `letters` of length 1..=maxlen.
pub fn rand_cyclic_word(rng: &mut ChaCha8Rng, p: &Presentation, letters: &[Letter], maxlen: usize) -> Vec<Letter> {
    loop {
        let len = rng.random_range(1..=maxlen);
        let mut w = vec![*letters.choose(rng).unwrap()];
        while w.len() < len {
            let end = p.ends(*w.last().unwrap()).1;
            let next: Vec<Letter> = letters.iter().copied().filter(|&l| p.ends(l).0 == end).collect();
            match next.choose(rng) {
                Some(&l) => w.push(l),
                None => break,
            }
        }
        if p.is_cyclically_composable(&w) {
            return w;
        }
    }
}

/// A random canonical M^cyc monomial (exactly one hat or basepoint letter).
pub fn rand_mcyc(rng: &mut ChaCha8Rng, p: &Presentation, maxlen: usize) -> Option<Element> {
    let chords: Vec<Letter> = (0..p.chords().len()).map(Letter::chord).collect();
    let mut specials: Vec<Letter> = (0..p.chords().len()).map(Letter::hat).collect();
    specials.extend((1..=p.m()).map(Letter::x));
    for _ in 0..50 {
        let mut w = vec![*specials.choose(rng).unwrap()];
        let len = rng.random_range(1..=maxlen);
        while w.len() < len {
            let end = p.ends(*w.last().unwrap()).1;
            let next: Vec<Letter> = chords.iter().copied().filter(|&l| p.ends(l).0 == end).collect();
            match next.choose(rng) {
                Some(&l) => w.push(l),
                None => break,
            }
        }
        if !p.is_cyclically_composable(&w) {
            continue;
        }
        if let Some((odd, key)) = canonical(p, &MonoKey::plain(w)).unwrap() {
            return Some(Element::from_key(Space::MCyc, key, sign_q(odd) * q(rng.random_range(1..=3))));
        }
    }
    None
}

/// A random balanced excited monomial `σ^{p−q} ħ⁻¹ ⟦w⟧` over the full alphabet.
pub fn rand_excited_balanced(rng: &mut ChaCha8Rng, p: &Presentation, maxlen: usize) -> Option<Element> {
    let letters = p.alphabet();
    for _ in 0..50 {
        let w = rand_cyclic_word(rng, p, &letters, maxlen);
        let exc: Vec<usize> = (0..w.len()).filter(|&i| w[i].is_excitable()).collect();
        let Some(&e) = exc.choose(rng) else { continue };
        let duals = w.iter().filter(|l| l.is_dual()).count() as i64;
        let ups = w.iter().filter(|l| l.is_hat_or_x()).count() as i64;
        let key = MonoKey { sigma: duals - ups, hbar: -1, word: w, excited: Some(e) };
        if let Some((odd, key)) = canonical(p, &key).unwrap() {
            return Some(Element::from_key(Space::ExcitedUBal, key, sign_q(odd) * q(rng.random_range(1..=3))));
        }
    }
    None
}
