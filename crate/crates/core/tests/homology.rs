//! Truncated homology: unknot tables, the β̲ transport, and an independent
//! dense-rank oracle on random DGAs.

mod common;

use common::*;
use num_traits::{One, Zero};
use sftkit::cyclic_spaces::{beta_underline, canonicalize};
use sftkit::homology_engine::*;
use sftkit::*;

/// Rank of a dense rational matrix by plain Gaussian elimination.
fn dense_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, pr);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix of the differential from degree d to degree d − 1 in basis coordinates.
fn d_matrix(c: &TruncatedComplex, d: i64) -> Vec<Vec<Q>> {
    let target = c.basis(d - 1);
    c.boundary_images(d)
        .unwrap()
        .iter()
        .map(|img| target.iter().map(|k| img.coeff(k)).collect())
        .collect()
}

fn oracle_dim(c: &TruncatedComplex, d: i64) -> usize {
    c.basis(d).len() - dense_rank(d_matrix(c, d)) - dense_rank(d_matrix(c, d + 1))
}

fn word(p: &Presentation, letters: &[Letter]) -> Element {
    canonicalize(p, &Element::from_key(Space::MCyc, MonoKey::plain(letters.to_vec()), q(1)), Space::MCyc).unwrap()
}

/// Expected unknot generators in M^cyc. For n − 1 odd: ⟦x⟧, ⟦x a^{2k+1}⟧ and
/// ⟦â a^{2k}⟧; for n − 1 even: ⟦x⟧, ⟦x a^k⟧ and ⟦â a^{k−1}⟧ with k ≥ 1.
fn unknot_expected(p: &Presentation, d: i64) -> Element {
    let n1 = p.n() - 1;
    let a = Letter::chord(0);
    if d == 0 {
        return word(p, &[Letter::x(1)]);
    }
    let powers: Vec<usize> = if n1 % 2 == 1 { (0..10).map(|k| 2 * k + 1).collect() } else { (1..20).collect() };
    for j in powers {
        let dx = j as i64 * n1;
        if d == dx {
            let mut w = vec![Letter::x(1)];
            w.extend(std::iter::repeat_n(a, j));
            return word(p, &w);
        }
        if d == dx + 1 {
            let mut w = vec![Letter::hat(0)];
            w.extend(std::iter::repeat_n(a, j - 1));
            return word(p, &w);
        }
    }
    Element::zero(Space::MCyc)
}

fn check_unknot_mcyc(n: i64, cutoff: usize, degrees: std::ops::RangeInclusive<i64>) {
    let p = unknot_pres(n);
    let mut c = TruncatedComplex::new(&p, ComplexKind::MCyc, cutoff).unwrap();
    let report = c.homology(degrees.clone()).unwrap();
    for h in &report.degrees {
        let expected = unknot_expected(&p, h.degree);
        if expected.is_zero() {
            assert_eq!(h.dim(), 0, "degree {}", h.degree);
        } else {
            assert_eq!(h.dim(), 1, "degree {}", h.degree);
            assert!(h.representatives[0].ratio_to(&expected).is_some(), "degree {}", h.degree);
        }
    }
}

#[test]
fn unknot_n2_mcyc_window() {
    let p = unknot_pres(2);
    let mut c = TruncatedComplex::new(&p, ComplexKind::MCyc, 9).unwrap();
    let report = c.homology(0..=8).unwrap();
    assert_eq!(report.dirty, vec![8]);
    assert_eq!((0..=7).map(|d| report.dim(d).unwrap()).collect::<Vec<_>>(), vec![1; 8]);
    check_unknot_mcyc(2, 9, 0..=7);
}

#[test]
fn unknot_n3_mcyc_window() {
    let p = unknot_pres(3);
    let mut c = TruncatedComplex::new(&p, ComplexKind::MCyc, 6).unwrap();
    let report = c.homology(0..=10).unwrap();
    for h in &report.degrees {
        let want = usize::from(h.degree == 0 || h.degree >= 2);
        assert_eq!(h.dim(), want, "degree {}", h.degree);
    }
    assert!(report.dim(1) == Some(0));
    check_unknot_mcyc(3, 6, 0..=10);
}

#[test]
fn unknot_mbal_matches_after_shift() {
    for n in [2, 3] {
        let p = unknot_pres(n);
        let shift = ComplexKind::MBal.shift(&p);
        assert_eq!(shift, 2 - n);
        let mut a = TruncatedComplex::new(&p, ComplexKind::MCyc, 7).unwrap();
        let mut b = TruncatedComplex::new(&p, ComplexKind::MBal, 7).unwrap();
        for d in 0..=6 {
            if !a.is_clean(d) || !b.is_clean(d + shift) {
                continue;
            }
            let ha = a.homology_at(d).unwrap().clone();
            let hb = b.homology_at(d + shift).unwrap().clone();
            assert_eq!(ha.dim(), hb.dim(), "n={n} d={d}");
            for r in &ha.representatives {
                let img = beta_underline(&p, r).unwrap();
                assert!(b.reduce_to_homology_basis(&img).unwrap().iter().any(|c| !c.is_zero()));
            }
        }
    }
}

#[test]
fn differential_composes_to_zero() {
    let mut r = rng(3);
    for _ in 0..40 {
        let p = rand_pres(&mut r, None, None, 0);
        for kind in [ComplexKind::MCyc, ComplexKind::MBal, ComplexKind::MStarBal] {
            let c = TruncatedComplex::new(&p, kind, 5).unwrap();
            for d in -8..=10 {
                for img in c.boundary_images(d).unwrap() {
                    assert!(c.differential(&img).unwrap().is_zero());
                }
            }
        }
    }
}

#[test]
fn dims_match_dense_oracle() {
    let mut r = rng(5);
    for _ in 0..30 {
        let p = rand_pres(&mut r, None, None, 1);
        for kind in [ComplexKind::MCyc, ComplexKind::MBal] {
            let mut c = TruncatedComplex::new(&p, kind, 6).unwrap();
            for d in -4..=8 {
                if !c.is_clean(d) || !c.is_clean(d - 1) {
                    continue;
                }
                let want = oracle_dim(&c, d);
                assert_eq!(c.homology_at(d).unwrap().dim(), want, "{kind:?} d={d}");
            }
        }
    }
}

#[test]
fn beta_transports_dimensions() {
    let mut r = rng(9);
    for _ in 0..30 {
        let p = rand_pres(&mut r, None, None, 1);
        let shift = ComplexKind::MBal.shift(&p);
        let mut a = TruncatedComplex::new(&p, ComplexKind::MCyc, 6).unwrap();
        let mut b = TruncatedComplex::new(&p, ComplexKind::MBal, 6).unwrap();
        for d in -2..=8 {
            if a.is_clean(d) && b.is_clean(d + shift) {
                assert_eq!(a.homology_at(d).unwrap().dim(), b.homology_at(d + shift).unwrap().dim());
            }
        }
    }
}

#[test]
fn clean_degrees_are_stable_under_larger_cutoff() {
    let mut r = rng(13);
    for _ in 0..20 {
        let p = rand_pres(&mut r, None, None, 1);
        let mut small = TruncatedComplex::new(&p, ComplexKind::MCyc, 5).unwrap();
        let mut big = TruncatedComplex::new(&p, ComplexKind::MCyc, 7).unwrap();
        for d in -2..=8 {
            if small.is_clean(d) {
                assert!(big.is_clean(d));
                assert_eq!(small.homology_at(d).unwrap().dim(), big.homology_at(d).unwrap().dim());
            }
        }
    }
}

#[test]
fn representatives_reduce_to_unit_vectors() {
    let mut r = rng(17);
    for _ in 0..20 {
        let p = rand_pres(&mut r, None, None, 1);
        let mut c = TruncatedComplex::new(&p, ComplexKind::MCyc, 6).unwrap();
        for d in -2..=8 {
            if !c.is_clean(d) {
                continue;
            }
            let reps = c.homology_at(d).unwrap().representatives.clone();
            let bounds = c.boundary_images(d + 1).unwrap();
            for (i, rep) in reps.iter().enumerate() {
                let unit: Vec<Q> = (0..reps.len()).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
                assert_eq!(c.reduce_to_homology_basis(rep).unwrap(), unit);
                if let Some(b) = bounds.iter().find(|b| !b.is_zero()) {
                    let shifted = rep + &b.scale(&q(3));
                    assert_eq!(c.reduce_to_homology_basis(&shifted).unwrap(), unit);
                }
            }
        }
    }
}

#[test]
fn non_cycles_are_refused() {
    let p = unknot_pres(2);
    let mut c = TruncatedComplex::new(&p, ComplexKind::MCyc, 6).unwrap();
    let x = word(&p, &[Letter::hat(0), Letter::chord(0)]);
    assert!(matches!(c.reduce_to_homology_basis(&x), Err(SftError::NotACycle)));
    assert!(matches!(c.homology_at(7), Err(SftError::DirtyDegree(7))));
}

#[test]
fn oversized_basis_is_refused() {
    let p = unknot_pres(2);
    assert!(matches!(
        TruncatedComplex::with_cap(&p, ComplexKind::MCyc, 6, 1),
        Err(SftError::BasisTooLarge { .. })
    ));
}

#[test]
fn windowed_complex_agrees_with_full_one() {
    let mut r = rng(19);
    for _ in 0..20 {
        let p = rand_pres(&mut r, None, None, 1);
        for kind in [ComplexKind::MCyc, ComplexKind::MBal, ComplexKind::MStarBal] {
            let mut full = TruncatedComplex::new(&p, kind, 6).unwrap();
            for d in -4..=8 {
                let mut win = TruncatedComplex::with_window(&p, kind, 6, d..=d + 1, DEFAULT_CAP).unwrap();
                assert_eq!(win.basis(d), full.basis(d));
                assert_eq!(win.basis(d + 1), full.basis(d + 1));
                if !full.is_clean(d) {
                    continue;
                }
                let a = full.homology_at(d).unwrap().representatives.clone();
                assert_eq!(win.homology_at(d).unwrap().representatives, a, "{kind:?} d={d}");
            }
        }
    }
}

#[test]
fn window_limits_available_degrees() {
    let p = unknot_pres(2);
    let mut c = TruncatedComplex::with_window(&p, ComplexKind::MCyc, 9, 2..=3, DEFAULT_CAP).unwrap();
    assert!(c.basis(4).is_empty());
    assert_eq!(c.homology_at(2).unwrap().dim(), 1);
    assert!(matches!(c.homology_at(3), Err(SftError::OutsideWindow(3))));
}
