//! Fixtures shared by the benches in `benches/`.

use sftkit::cyclic_spaces::cyclic_from_raw;
use sftkit::sft_operations::{build_h1, HamiltonianData};
use sftkit::{q, Chord, Letter, Presentation, RawLetter, SftError, Space};

/// The one-chord unknot with H¹ up to q = 4 and H²₀ = σ²ħ⁻¹⟦â* x*⟧.
pub fn unknot(n: i64) -> Result<(Presentation, HamiltonianData), SftError> {
    let p = Presentation::new(n, 1, vec![Chord { name: "a".into(), degree: n - 1, from: 1, to: 1 }])?;
    let mut h = build_h1(&p, 4)?;
    let raw = [RawLetter::Sigma(2), RawLetter::Hbar(-1), RawLetter::Gen(Letter::hat_dual(0)), RawLetter::Gen(Letter::x_dual(1))];
    let h20 = cyclic_from_raw(&p, &raw, q(1), Space::UBal)?;
    h.set_higher(&p, 2, 0, &h20)?;
    Ok((p, h))
}

/// A three-chord DGA with d a = b c + c b, d b = c c, d c = 0.
pub fn three_chords() -> Result<Presentation, SftError> {
    let chords = vec![
        Chord { name: "a".into(), degree: 5, from: 1, to: 1 },
        Chord { name: "b".into(), degree: 3, from: 1, to: 1 },
        Chord { name: "c".into(), degree: 1, from: 1, to: 1 },
    ];
    let mut p = Presentation::new(3, 1, chords)?;
    let word = |w: &[usize]| sftkit::MonoKey::plain(w.iter().map(|&i| Letter::chord(i)).collect());
    let mut da = sftkit::Element::zero(Space::A);
    da.add_term(word(&[1, 2]), q(1));
    da.add_term(word(&[2, 1]), q(1));
    let mut db = sftkit::Element::zero(Space::A);
    db.add_term(word(&[2, 2]), q(1));
    p.set_differential(0, da)?;
    p.set_differential(1, db)?;
    Ok(p)
}
