//! The one-chord unknot at n = 2 and n = 3: Hamiltonian identities, the
//! contraction H²₀ ⋆₁ Ḣ¹₂, product tables against a closed-form oracle, the
//! unit, Φ, and Δ.

mod common;

use common::*;
use num_traits::Zero;
use rand::Rng;
use sftkit::cyclic_spaces::*;
use sftkit::homology_engine::ComplexKind;
use sftkit::invariant_ops::*;
use sftkit::sft_operations::*;
use sftkit::*;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Gen {
    /// ⟦x a^j⟧
    X(usize),
    /// ⟦â a^j⟧
    Hat(usize),
}

fn gen_word(g: Gen) -> Vec<Letter> {
    let (head, j) = match g {
        Gen::X(j) => (Letter::x(1), j),
        Gen::Hat(j) => (Letter::hat(0), j),
    };
    let mut w = vec![head];
    w.extend(std::iter::repeat_n(Letter::chord(0), j));
    w
}

fn gen_degree(n: i64, g: Gen) -> i64 {
    match g {
        Gen::X(j) => j as i64 * (n - 1),
        Gen::Hat(j) => n + j as i64 * (n - 1),
    }
}

fn gen_elem(p: &Presentation, g: Gen) -> Element {
    let x = Element::from_key(Space::MCyc, MonoKey::plain(gen_word(g)), q(1));
    canonicalize(p, &x, Space::MCyc).unwrap()
}

fn identify(p: &Presentation, rep: &Element) -> (Gen, Q) {
    for j in 0..12 {
        for g in [Gen::X(j), Gen::Hat(j)] {
            let w = gen_elem(p, g);
            if w.is_zero() {
                continue;
            }
            if let Some(r) = rep.ratio_to(&w) {
                return (g, r);
            }
        }
    }
    panic!("unrecognised generator {}", pretty(p, rep));
}

/// The ⊠ table of the unknot in closed form: â-powers multiply, x-words are
/// a square-zero module, and the mixed order follows from commutativity.
fn boxtimes_oracle(n: i64, a: Gen, b: Gen) -> Option<(Gen, i64)> {
    match (a, b) {
        (Gen::Hat(k), Gen::Hat(l)) => Some((Gen::Hat(k + l), 1)),
        (Gen::Hat(k), Gen::X(l)) => Some((Gen::X(k + l), 1)),
        (Gen::X(k), Gen::Hat(l)) => {
            let e = (gen_degree(n, a) - n) * (gen_degree(n, b) - n);
            Some((Gen::X(k + l), if e % 2 == 0 { 1 } else { -1 }))
        }
        (Gen::X(_), Gen::X(_)) => None,
    }
}

#[test]
fn hamiltonian_identities_vanish() {
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let checks = check_master(&p, &h).unwrap();
        let names: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["I1", "I2", "I3", "I4", "H20", "H21"]);
        for c in &checks {
            assert!(c.holds(), "n={n} {}: {}", c.name, pretty(&p, &c.residual));
        }
    }
}

fn display_expected(p: &Presentation) -> Element {
    let n = p.n();
    let terms: [(i64, [RawLetter; 5]); 3] = [
        (-1, [RawLetter::Sigma(1), RawLetter::Excited(Letter::x(1)), RawLetter::Gen(Letter::hat_dual(0)), RawLetter::Hbar(-1), RawLetter::Gen(Letter::x_dual(1))]),
        (if (n - 1) % 2 == 0 { 1 } else { -1 }, [RawLetter::Sigma(1), RawLetter::Excited(Letter::hat(0)), RawLetter::Gen(Letter::hat_dual(0)), RawLetter::Hbar(-1), RawLetter::Gen(Letter::hat_dual(0))]),
        (1, [RawLetter::Sigma(1), RawLetter::Excited(Letter::x(1)), RawLetter::Gen(Letter::x_dual(1)), RawLetter::Hbar(-1), RawLetter::Gen(Letter::hat_dual(0))]),
    ];
    let mut out = Element::zero(Space::ExcitedUBal);
    for (c, raw) in terms {
        out += &cyclic_from_raw(p, &raw, q(c), Space::ExcitedUBal).unwrap();
    }
    out
}

fn display_actual(p: &Presentation, h: &HamiltonianData) -> Element {
    let hd = h_dot(h.h1q(2).unwrap());
    star_lower(p, h.higher(2, 0).unwrap(), &hd, 1).unwrap().with_space(Space::ExcitedUBal)
}

#[test]
fn contraction_display_n3_matches() {
    let (p, h) = unknot(3);
    assert_eq!(display_actual(&p, &h), display_expected(&p));
}

#[test]
fn contraction_display_n2_differs_in_one_term() {
    let (p, h) = unknot(2);
    let diff = &display_actual(&p, &h) - &display_expected(&p);
    assert_eq!(diff.len(), 1, "{}", pretty(&p, &diff));
    let raw = [RawLetter::Sigma(1), RawLetter::Excited(Letter::x(1)), RawLetter::Gen(Letter::x_dual(1)), RawLetter::Hbar(-1), RawLetter::Gen(Letter::hat_dual(0))];
    let term = cyclic_from_raw(&p, &raw, q(-2), Space::ExcitedUBal).unwrap();
    assert_eq!(diff, term);
}

#[test]
fn boxtimes_table_matches_oracle() {
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        let table = ctx.table(ProductOp::Boxtimes, 0..=16, 7).unwrap();
        let mut red = Reducer::new(&p, ComplexKind::MCyc, 7);
        let ids: Vec<(Gen, Q)> = table.generators.iter().map(|(_, g)| identify(&p, g)).collect();
        assert!(ids.iter().any(|(g, _)| *g == Gen::Hat(0)));
        for (i, (ga, ra)) in ids.iter().enumerate() {
            for (j, (gb, rb)) in ids.iter().enumerate() {
                let d = gen_degree(n, *ga) + gen_degree(n, *gb) - n;
                let cell = table.cells[i][j].as_ref().unwrap();
                let want = match boxtimes_oracle(n, *ga, *gb) {
                    None => vec![Q::zero(); cell.coords.len()],
                    Some((g, s)) => {
                        let e = gen_elem(&p, g).scale(&(q(s) * ra * rb));
                        red.reduce(&e, d).unwrap().coords
                    }
                };
                assert_eq!(cell.coords, want, "n={n} {ga:?} x {gb:?}");
            }
        }
    }
}

#[test]
fn boxtimes_unit_is_hat_a() {
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        let mut red = Reducer::new(&p, ComplexKind::MCyc, 7);
        let unit = gen_elem(&p, Gen::Hat(0));
        for (d, g) in red.generators(0..=12, 7).unwrap() {
            let prod = ctx.boxtimes(&unit, &g).unwrap();
            assert_eq!(prod.degree(&p), Some(d));
            assert_eq!(red.reduce(&prod, d).unwrap().coords, red.reduce(&g, d).unwrap().coords);
        }
    }
}

#[test]
fn boxtimes_closed_form_agrees_on_random_words() {
    let mut r = rng(23);
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        for _ in 0..100 {
            let x = rand_mcyc(&mut r, &p, 5);
            let y = rand_mcyc(&mut r, &p, 5);
            let (Some(x), Some(y)) = (x, y) else { continue };
            assert_eq!(ctx.boxtimes(&x, &y).unwrap(), ctx.boxtimes_closed_form(&x, &y).unwrap());
        }
    }
}

#[test]
fn product_degrees_per_term() {
    let mut r = rng(29);
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        for _ in 0..60 {
            let (Some(x), Some(y)) = (rand_mcyc(&mut r, &p, 5), rand_mcyc(&mut r, &p, 5)) else { continue };
            let (dx, dy) = (x.degree(&p).unwrap(), y.degree(&p).unwrap());
            for d in ctx.boxtimes(&x, &y).unwrap().degrees(&p) {
                assert_eq!(d, dx + dy - n);
            }
            for d in bv_delta(&p, &x).unwrap().degrees(&p) {
                assert_eq!(d, dx + 1);
            }
            let (bx, by) = (ctx.phi(&beta_underline(&p, &x).unwrap()).unwrap(), ctx.phi(&beta_underline(&p, &y).unwrap()).unwrap());
            let (ex, ey) = (bx.degree(&p), by.degree(&p));
            if let (Some(ex), Some(ey)) = (ex, ey) {
                for d in ctx.diamond(&bx, &by).unwrap().degrees(&p) {
                    assert_eq!(d, ex + ey - 1);
                }
            }
        }
    }
}

#[test]
fn boxdot_forms_commutativity_associativity() {
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        let mut red = Reducer::new(&p, ComplexKind::MBal, 5);
        let gens = red.generators(-4..=8, 5).unwrap();
        assert!(gens.len() >= 5);
        for (da, a) in &gens {
            for (db, b) in &gens {
                let d = da + db - 2;
                let forms = ctx.boxdot_forms(a, b).unwrap();
                let first = red.reduce(&forms[0], d).unwrap().coords;
                for f in &forms[1..] {
                    assert_eq!(red.reduce(f, d).unwrap().coords, first);
                }
                let swapped = ctx.boxdot(b, a).unwrap().scale(&sign_q(da * db % 2 != 0));
                assert_eq!(red.reduce(&swapped, d).unwrap().coords, first);
                for (dc, c) in &gens {
                    let l = ctx.boxdot(&ctx.boxdot(a, b).unwrap(), c).unwrap();
                    let r = ctx.boxdot(a, &ctx.boxdot(b, c).unwrap()).unwrap();
                    let e = d + dc - 2;
                    assert_eq!(red.reduce(&l, e).unwrap().coords, red.reduce(&r, e).unwrap().coords);
                }
            }
        }
    }
}

#[test]
fn alternative_form4_sign_fails_on_odd_total_degree() {
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        let mut red = Reducer::new(&p, ComplexKind::MBal, 5);
        let gens = red.generators(-4..=8, 5).unwrap();
        for (da, a) in &gens {
            for (db, b) in &gens {
                let d = da + db - 2;
                let good = red.reduce(&ctx.boxdot(a, b).unwrap(), d).unwrap();
                let alt = red.reduce(&ctx.boxdot_form4_alt(a, b).unwrap(), d).unwrap();
                if d % 2 == 0 || good.is_zero() {
                    assert_eq!(alt.coords, good.coords);
                } else {
                    assert_ne!(alt.coords, good.coords);
                }
            }
        }
    }
}

#[test]
fn phi_reverses_sign_of_products() {
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        let mut red = Reducer::new(&p, ComplexKind::MBal, 5);
        let mut sred = Reducer::new(&p, ComplexKind::MStarBal, 5);
        let gens = red.generators(-4..=8, 5).unwrap();
        for (da, a) in &gens {
            for (db, b) in &gens {
                let d = da + db - 3;
                let l = ctx.phi(&ctx.boxdot(a, b).unwrap()).unwrap();
                let r = ctx.diamond(&ctx.phi(a).unwrap(), &ctx.phi(b).unwrap()).unwrap();
                let lc = sred.reduce(&l, d).unwrap().coords;
                let rc: Vec<Q> = sred.reduce(&r, d).unwrap().coords.iter().map(|c| -c).collect();
                assert_eq!(lc, rc, "n={n}");
            }
        }
    }
}

#[test]
fn diamond_unit_sign_depends_on_parity_of_n() {
    let mut r = rng(31);
    for n in [2, 3] {
        let (p, h) = unknot(n);
        let ctx = ProductContext::new(&p, &h).unwrap();
        let e = unit_e(&p).unwrap();
        let sign = q(if n % 2 == 0 { 1 } else { -1 });
        let letters = p.alphabet();
        let mut done = 0;
        while done < 200 {
            let w = rand_cyclic_word(&mut r, &p, &letters, 6);
            let duals: Vec<usize> = (0..w.len()).filter(|&i| w[i].is_dual()).collect();
            if duals.len() != 1 {
                continue;
            }
            let key = MonoKey { sigma: 1, hbar: -1, word: w.clone(), excited: Some(duals[0]) };
            let Some((odd, key)) = canonical(&p, &key).unwrap() else { continue };
            let coeff = sign_q(odd) * q(r.random_range(1..=4));
            let y = Element::from_key(Space::TauMStarBal, key, coeff);
            assert_eq!(ctx.diamond(&e, &y).unwrap(), y.scale(&sign), "n={n}");
            done += 1;
        }
    }
}

#[test]
fn delta_multiplies_by_the_chord_power() {
    for n in [2, 3] {
        let p = unknot_pres(n);
        let mut red = Reducer::new(&p, ComplexKind::MCyc, 7);
        for (d, g) in red.generators(0..=12, 7).unwrap() {
            let (id, r) = identify(&p, &g);
            let img = bv_delta(&p, &g).unwrap();
            let got = red.reduce(&img, d + 1).unwrap().coords;
            let want = match id {
                Gen::X(j) if j > 0 => {
                    let e = gen_elem(&p, Gen::Hat(j - 1)).scale(&(q(j as i64) * &r));
                    red.reduce(&e, d + 1).unwrap().coords
                }
                _ => vec![Q::zero(); got.len()],
            };
            assert_eq!(got, want, "n={n} {id:?}");
            assert!(bv_delta(&p, &img).unwrap().is_zero());
            assert_ne!(delta_chain_sign(&p, &g).unwrap(), ChainSign::Neither);
        }
    }
}

#[test]
fn generator_scan_reports_degrees_it_cannot_compute() {
    // a degree-0 chord loop makes every degree dirty at every cutoff
    let p = Presentation::new(2, 1, vec![Chord { name: "a".into(), degree: 0, from: 1, to: 1 }]).unwrap();
    let mut red = Reducer::new(&p, ComplexKind::MCyc, 4);
    let scan = red.scan_generators(0..=1, 4);
    assert!(scan.found.is_empty());
    assert_eq!(scan.skipped.iter().map(|(d, _)| *d).collect::<Vec<_>>(), [0, 1]);
    assert!(scan.skipped.iter().all(|(_, e)| matches!(e, SftError::DirtyDegree(_))));
    assert!(red.generators(0..=1, 4).is_err());
    let table = bv_table(&p, 0..=1, 4);
    assert!(table.rows.is_empty() && table.skipped.len() == 2);
}
