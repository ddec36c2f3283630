//! The subcommands. Each returns a [`Report`]; nothing here prints.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use sftkit::differentials::{check_d_squared, d_m};
use sftkit::homology_engine::{differential, enumerate_mcyc, ComplexKind, TruncatedComplex, DEFAULT_CAP};
use sftkit::invariant_ops::{bv_delta, bv_table, delta_chain_sign, ChainSign, ProductContext, ProductOp, Reduced, Reducer};
use sftkit::sft_operations::check_master;
use sftkit::{pretty, Element, Presentation, SftError, Space};

use crate::parse::{parse_element, ParsedFile};
use crate::report::{Record, Report};

/// Failure of a command, split by exit code.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    /// Bad input: unreadable file, grammar, semantics, missing directives.
    #[error("{0}")]
    Input(String),
    /// The computation refused or a mathematical check failed.
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Math(_) => 1,
        }
    }
}

impl From<SftError> for CliError {
    fn from(e: SftError) -> Self {
        match e {
            SftError::Presentation(_) | SftError::MissingHamiltonian(..) | SftError::TensorType(_) => CliError::Input(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

/// How M^cyc classes are rendered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Theta {
    /// θ = ħ⁻¹σ⁻¹ replaced by 1.
    One,
    /// Every cyclic word followed by `hb^-1 s^-1`.
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SpaceArg {
    Mcyc,
    Mbal,
}

impl SpaceArg {
    pub fn kind(self) -> ComplexKind {
        match self {
            SpaceArg::Mcyc => ComplexKind::MCyc,
            SpaceArg::Mbal => ComplexKind::MBal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OpArg {
    Boxtimes,
    Boxdot,
    Diamond,
}

impl OpArg {
    pub fn op(self) -> ProductOp {
        match self {
            OpArg::Boxtimes => ProductOp::Boxtimes,
            OpArg::Boxdot => ProductOp::Boxdot,
            OpArg::Diamond => ProductOp::Diamond,
        }
    }
}

fn op_name(op: ProductOp) -> &'static str {
    match op {
        ProductOp::Boxtimes => "boxtimes",
        ProductOp::Boxdot => "boxdot",
        ProductOp::Diamond => "diamond",
    }
}

fn kind_name(kind: ComplexKind) -> &'static str {
    match kind {
        ComplexKind::MCyc => "mcyc",
        ComplexKind::MBal => "mbal",
        ComplexKind::MStarBal => "mstarbal",
    }
}

pub fn render(p: &Presentation, e: &Element, theta: Theta) -> String {
    let s = pretty(p, e).to_string();
    if theta == Theta::Explicit && e.space() == Space::MCyc {
        s.replace(']', "] hb^-1 s^-1")
    } else {
        s
    }
}

/// Degrees reachable by words of length ≤ `maxlen` in the given complex.
pub fn default_window(p: &Presentation, kind: ComplexKind, maxlen: usize) -> RangeInclusive<i64> {
    let sp: Vec<i64> = kind.specials(p).iter().map(|&l| p.degree(l)).collect();
    let ch: Vec<i64> = p.chords().iter().map(|c| c.degree).collect();
    let extra = maxlen.saturating_sub(1) as i64;
    let lo = sp.iter().min().unwrap_or(&0) + ch.iter().min().copied().unwrap_or(0).min(0) * extra;
    let hi = sp.iter().max().unwrap_or(&0) + ch.iter().max().copied().unwrap_or(0).max(0) * extra;
    let s = kind.shift(p);
    (lo + s)..=(hi + s)
}

/// The class Σ cᵢ gᵢ as an element.
fn class_element(r: &Reduced, space: Space) -> Element {
    let mut out = Element::zero(space);
    for (c, b) in r.coords.iter().zip(&r.basis) {
        out.add_scaled(b, c);
    }
    out
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

/// d² = 0, d_M² = 0 and d_U² = 0 on words of length ≤ `maxlen`, the master
/// equations up to `qmax`, and the H² identities when H²₀ is given.
pub fn validate(file: &ParsedFile, qmax: usize, maxlen: usize) -> Result<Report, CliError> {
    let p = &file.presentation;
    let mut rep = Report::default();
    rep.heading("validate");
    let check = |rep: &mut Report, name: &str, ok: bool, detail: String, cutoff: Option<usize>| {
        let mut text = format!("{name:<8} {}", status(ok));
        if !detail.is_empty() {
            text.push_str(&format!("  {detail}"));
        }
        let mut r = Record::new("validate", text).field("check", name).field("status", status(ok));
        if let Some(c) = cutoff {
            r.text.push_str(&format!("  (cutoff {c})"));
            r = r.field("cutoff", c);
        }
        rep.push(r.field("detail", detail));
        rep.failed |= !ok;
    };

    let d2 = check_d_squared(p);
    check(&mut rep, "d2", d2.is_ok(), d2.as_ref().err().map(|e| e.to_string()).unwrap_or_default(), None);

    let words = enumerate_mcyc(p, maxlen)?;
    let mut bad = 0usize;
    for k in &words {
        let x = Element::from_key(Space::MCyc, k.clone(), sftkit::q(1));
        if !d_m(p, &d_m(p, &x)?)?.is_zero() {
            bad += 1;
        }
    }
    check(&mut rep, "dM2", bad == 0, format!("{} words, {bad} failures", words.len()), Some(maxlen));

    if d2.is_ok() {
        let c = TruncatedComplex::new(p, ComplexKind::MBal, maxlen)?;
        let mut bad = 0usize;
        let mut total = 0usize;
        let window = default_window(p, ComplexKind::MBal, maxlen);
        for d in window {
            for img in c.boundary_images(d)? {
                total += 1;
                if !c.differential(&img)?.is_zero() {
                    bad += 1;
                }
            }
        }
        check(&mut rep, "dU2", bad == 0, format!("{total} words, {bad} failures"), Some(maxlen));

        let h = file.hamiltonian(qmax.max(2))?;
        for c in check_master(p, &h)? {
            if c.name.starts_with('I') && c.name[1..].parse::<usize>().unwrap_or(0) > qmax {
                continue;
            }
            let detail = if c.holds() { String::new() } else { format!("residual {}", pretty(p, &c.residual)) };
            check(&mut rep, &c.name, c.holds(), detail, None);
        }
    }
    Ok(rep)
}

pub fn homology(file: &ParsedFile, kind: ComplexKind, maxlen: usize, degrees: Option<RangeInclusive<i64>>) -> Result<Report, CliError> {
    let p = &file.presentation;
    let window = degrees.unwrap_or_else(|| default_window(p, kind, maxlen));
    let mut c = TruncatedComplex::with_window(p, kind, maxlen, *window.start()..=window.end() + 1, DEFAULT_CAP)?;
    let report = c.homology(window.clone())?;
    let mut rep = Report::default();
    rep.heading(&format!("homology {} degrees {}..{} cutoff {maxlen}", kind_name(kind), window.start(), window.end()));
    for d in window {
        let base = Record::new("homology", "").field("space", kind_name(kind)).field("degree", d).field("cutoff", maxlen);
        if report.dirty.contains(&d) {
            let text = format!("degree {d:>3}: refused, degree {d} is truncation-dirty at cutoff {maxlen}");
            rep.push(Record { text, ..base.field("status", "dirty") });
            continue;
        }
        let h = report.degrees.iter().find(|h| h.degree == d).expect("clean degree is computed");
        let reps: Vec<String> = h.representatives.iter().map(|r| pretty(p, r).to_string()).collect();
        let text = format!(
            "degree {d:>3}: dim {}  (chains {}, cycles {}, boundaries {}, cutoff {maxlen}){}{}",
            h.dim(),
            h.chain_dim,
            h.cycles_dim,
            h.boundaries_dim,
            if reps.is_empty() { "" } else { "  " },
            reps.join(" ; ")
        );
        rep.push(Record {
            text,
            ..base
                .field("status", "clean")
                .field("dim", h.dim())
                .field("chains", h.chain_dim)
                .field("cycles", h.cycles_dim)
                .field("boundaries", h.boundaries_dim)
                .field("representatives", reps.join(" ; "))
        });
    }
    Ok(rep)
}

fn context(file: &ParsedFile) -> Result<ProductContext, CliError> {
    if !file.has_h20() {
        return Err(CliError::Input("products need an `H 2 0 = ...` directive".into()));
    }
    let h = file.hamiltonian(2)?;
    Ok(ProductContext::new(&file.presentation, &h)?)
}

/// Pairwise products of homology generators with word length ≤ `maxlen`.
pub fn product_table(file: &ParsedFile, op: ProductOp, maxlen: usize, degrees: Option<RangeInclusive<i64>>, theta: Theta) -> Result<Report, CliError> {
    let ctx = context(file)?;
    let p = &file.presentation;
    let window = degrees.unwrap_or_else(|| default_window(p, op.kind(), maxlen));
    let table = ctx.table(op, window.clone(), maxlen)?;
    let mut rep = Report::default();
    rep.heading(&format!("product {} generators of length <= {maxlen} in degrees {}..{}", op_name(op), window.start(), window.end()));
    let space = op.kind().space();
    for (i, (da, a)) in table.generators.iter().enumerate() {
        for (j, (db, b)) in table.generators.iter().enumerate() {
            let (ra, rb) = (render(p, a, theta), render(p, b, theta));
            let d = op.degree(p.n(), *da, *db);
            let base = Record::new("product", "").field("op", op_name(op)).field("left", &ra).field("right", &rb).field("degree", d);
            let rec = match &table.cells[i][j] {
                Ok(r) => {
                    let class = render(p, &class_element(r, space), theta);
                    Record {
                        text: format!("{ra} {} {rb} = {class}  (degree {d}, cutoff {})", symbol(op), r.cutoff),
                        ..base.field("cutoff", r.cutoff).field("class", class)
                    }
                }
                Err(e) => {
                    rep.failed |= !is_refusal(e);
                    Record { text: format!("{ra} {} {rb}: {e}", symbol(op)), ..base.field("error", e) }
                }
            };
            rep.push(rec);
        }
    }
    push_skipped(&mut rep, op_name(op), &table.skipped);
    Ok(rep)
}

/// Truncation refusals are reported, not counted as failed checks.
fn is_refusal(e: &SftError) -> bool {
    matches!(e, SftError::DirtyDegree(_) | SftError::BasisTooLarge { .. } | SftError::OutsideWindow(_))
}

fn push_skipped(rep: &mut Report, table: &str, skipped: &[(i64, SftError)]) {
    for (d, e) in skipped {
        rep.failed |= !is_refusal(e);
        rep.push(Record::new("skipped", format!("degree {d:>3}: no generators, {e}")).field("table", table).field("degree", d).field("reason", e));
    }
}

fn symbol(op: ProductOp) -> &'static str {
    match op {
        ProductOp::Boxtimes => "(x)",
        ProductOp::Boxdot => "(.)",
        ProductOp::Diamond => "<>",
    }
}

/// One product of two user elements, at chain level and, for cycles, on homology.
pub fn product_pair(file: &ParsedFile, op: ProductOp, x: &str, y: &str, maxlen: usize, theta: Theta) -> Result<Report, CliError> {
    let ctx = context(file)?;
    let p = &file.presentation;
    let space = op.kind().space();
    let parse = |s: &str, which: &str| parse_element(p, s, space).map_err(|e| CliError::Input(format!("--{which}: {e}")));
    let (xe, ye) = (parse(x, "x")?, parse(y, "y")?);
    let prod = ctx.product(op, &xe, &ye)?;
    let mut rep = Report::default();
    rep.heading(&format!("product {}", op_name(op)));
    let chain = render(p, &prod, theta);
    rep.push(
        Record::new("product_chain", format!("chain: {} {} {} = {chain}", render(p, &xe, theta), symbol(op), render(p, &ye, theta)))
            .field("op", op_name(op))
            .field("left", render(p, &xe, theta))
            .field("right", render(p, &ye, theta))
            .field("chain", &chain),
    );
    let (Some(dx), Some(dy)) = (xe.degree(p), ye.degree(p)) else {
        return Ok(rep);
    };
    let d = op.degree(p.n(), dx, dy);
    let mut cycles = true;
    for e in [&xe, &ye] {
        cycles &= differential(p, op.kind(), e)?.is_zero();
    }
    if !cycles {
        rep.push(Record::new("product_class", "class: inputs are not both cycles; no homology class").field("status", "not-cycles"));
        return Ok(rep);
    }
    let r = match Reducer::new(p, op.kind(), maxlen).reduce(&prod, d) {
        Err(e) if is_refusal(&e) => {
            rep.push(Record::new("product_class", format!("class: refused, {e}")).field("degree", d).field("status", "refused"));
            return Ok(rep);
        }
        r => r?,
    };
    let class = render(p, &class_element(&r, space), theta);
    rep.push(
        Record::new("product_class", format!("class: {class}  (degree {d}, cutoff {})", r.cutoff))
            .field("degree", d)
            .field("cutoff", r.cutoff)
            .field("class", class),
    );
    Ok(rep)
}

fn sign_name(s: ChainSign) -> &'static str {
    match s {
        ChainSign::Trivial => "trivial",
        ChainSign::Commutes => "commutes",
        ChainSign::Anticommutes => "anticommutes",
        ChainSign::Neither => "neither",
    }
}

/// Δ on homology generators, Δ² on them, and how Δ meets d_M on every basis word.
pub fn bv(file: &ParsedFile, maxlen: usize, degrees: Option<RangeInclusive<i64>>, theta: Theta) -> Result<Report, CliError> {
    let p = &file.presentation;
    let window = degrees.unwrap_or_else(|| default_window(p, ComplexKind::MCyc, maxlen));
    let mut rep = Report::default();
    rep.heading(&format!("bv generators of length <= {maxlen} in degrees {}..{}", window.start(), window.end()));
    let table = bv_table(p, window.clone(), maxlen);
    for (d, g, r) in table.rows {
        let gs = render(p, &g, theta);
        let sq = bv_delta(p, &bv_delta(p, &g)?)?.is_zero();
        rep.failed |= !sq;
        let base = Record::new("bv", "").field("generator", &gs).field("degree", d).field("delta_squared", if sq { "zero" } else { "nonzero" });
        let rec = match r {
            Ok(r) => {
                let img = render(p, &class_element(&r, Space::MCyc), theta);
                Record {
                    text: format!("D {gs} = {img}  (degree {}, cutoff {}, D^2 {})", d + 1, r.cutoff, if sq { "= 0" } else { "!= 0" }),
                    ..base.field("cutoff", r.cutoff).field("image", img)
                }
            }
            Err(e) => {
                rep.failed |= !is_refusal(&e);
                Record { text: format!("D {gs}: {e}"), ..base.field("error", e) }
            }
        };
        rep.push(rec);
    }
    push_skipped(&mut rep, "bv", &table.skipped);
    let c = TruncatedComplex::with_window(p, ComplexKind::MCyc, maxlen, window.clone(), DEFAULT_CAP)?;
    let mut counts: BTreeMap<&'static str, usize> = ["trivial", "commutes", "anticommutes", "neither"].into_iter().map(|k| (k, 0)).collect();
    for d in window {
        for k in c.basis(d) {
            let x = Element::from_key(Space::MCyc, k.clone(), sftkit::q(1));
            *counts.get_mut(sign_name(delta_chain_sign(p, &x)?)).expect("known key") += 1;
        }
    }
    let verdict = match (counts["commutes"], counts["anticommutes"], counts["neither"]) {
        (_, _, n) if n > 0 => "not a chain map up to sign",
        (0, 0, _) => "both sides vanish",
        (0, _, _) => "D d = -d D",
        (_, 0, _) => "D d = d D",
        _ => "mixed signs",
    };
    rep.failed |= counts["neither"] > 0;
    rep.push(
        Record::new(
            "bv_chain",
            format!(
                "chain map check on all words (cutoff {maxlen}): {verdict}  [anticommutes {}, commutes {}, trivial {}, neither {}]",
                counts["anticommutes"], counts["commutes"], counts["trivial"], counts["neither"]
            ),
        )
        .field("cutoff", maxlen)
        .field("verdict", verdict)
        .field("anticommutes", counts["anticommutes"])
        .field("commutes", counts["commutes"])
        .field("trivial", counts["trivial"])
        .field("neither", counts["neither"]),
    );
    Ok(rep)
}

/// Everything: validation, both homologies, all product tables (when H²₀
/// is given) and the Δ table.
pub fn full_report(file: &ParsedFile, qmax: usize, maxlen: usize, theta: Theta) -> Result<Report, CliError> {
    let mut rep = validate(file, qmax, maxlen)?;
    rep.extend(homology(file, ComplexKind::MCyc, maxlen, None)?);
    rep.extend(homology(file, ComplexKind::MBal, maxlen, None)?);
    if file.has_h20() {
        for op in [ProductOp::Boxtimes, ProductOp::Boxdot, ProductOp::Diamond] {
            rep.extend(product_table(file, op, maxlen, None, theta)?);
        }
    } else {
        rep.push(Record::new("info", "products skipped: no `H 2 0` directive").field("products", "skipped"));
    }
    rep.extend(bv(file, maxlen, None, theta)?);
    Ok(rep)
}
