//! Simplicity machinery on finite truncations: star-span and annihilator
//! checks, ideal closures, ideal membership tests, lifting GD ideals to
//! conformal ideals, and randomized closure evidence.
//!
//! A truncation `T` is the span of `∂^d x` for `x` in an extended window and
//! `d` up to a bound. Closure moves whose output leaves `T` are handled by a
//! [`TruncationPolicy`].

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::basis::{BasisIndex, Element};
use crate::conformal::{ConformalAlgebra, Engine, PolyElement};
use crate::delta::{DeltaGroup, DeltaVector};
use crate::error::{Error, Result};
use crate::gd::GdStructure;
use crate::linalg::{kernel, Echelon, SparseVec};
use crate::report::{Report, Status};
use crate::scalar::Scalar;
use crate::window::Window;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IdealKind {
    /// Two-sided ideal of `(V, ∘)`.
    Novikov,
    /// Ideal of `(V, [·,·])`.
    Lie,
    /// Ideal of the Novikov-Jordan algebra `(V, ∗)`.
    Nj,
    /// Simultaneous ideal for `∘` and `[·,·]`.
    Gd,
    /// ℂ[∂]-submodule of `R` stable under λ-brackets with `R`.
    Conformal,
}

impl IdealKind {
    pub fn name(self) -> &'static str {
        match self {
            IdealKind::Novikov => "novikov",
            IdealKind::Lie => "lie",
            IdealKind::Nj => "nj",
            IdealKind::Gd => "gd",
            IdealKind::Conformal => "conformal",
        }
    }
}

impl fmt::Display for IdealKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdealKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [IdealKind::Novikov, IdealKind::Lie, IdealKind::Nj, IdealKind::Gd, IdealKind::Conformal]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown ideal kind {s:?} (novikov|lie|nj|gd|conformal)")))
    }
}

/// What a closure does with a move whose output leaves the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationPolicy {
    /// Keep the part inside the truncation and drop the rest. Any drop marks
    /// the result lossy.
    Project,
    /// Discard the whole output. Everything kept then lies in the true
    /// ideal, so the closure is a lower bound; it is lossy only when
    /// something was discarded and the closure is not all of `T`.
    Sound,
}

impl TruncationPolicy {
    pub fn name(self) -> &'static str {
        match self {
            TruncationPolicy::Project => "project",
            TruncationPolicy::Sound => "sound",
        }
    }
}

impl FromStr for TruncationPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "project" => Ok(TruncationPolicy::Project),
            "sound" => Ok(TruncationPolicy::Sound),
            _ => Err(Error::Parse(format!("unknown truncation policy {s:?} (project|sound)"))),
        }
    }
}

/// Coordinates `(x, d)` for `x` in a window and `d ≤ dpow`, flattened in
/// canonical order.
#[derive(Debug, Clone)]
pub struct Truncation {
    window: Window,
    dpow: u32,
    coords: Vec<(BasisIndex, u32)>,
    lookup: HashMap<(BasisIndex, u32), usize>,
}

impl Truncation {
    pub fn new(window: &Window, dpow: u32) -> Self {
        let sorted: BTreeSet<&BasisIndex> = window.iter().collect();
        let coords: Vec<(BasisIndex, u32)> =
            sorted.into_iter().flat_map(|i| (0..=dpow).map(move |d| (i.clone(), d))).collect();
        let lookup = coords.iter().cloned().enumerate().map(|(k, c)| (c, k)).collect();
        Truncation { window: window.clone(), dpow, coords, lookup }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn dpow(&self) -> u32 {
        self.dpow
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The part inside the truncation, and the escaping remainder.
    pub fn split(&self, p: &PolyElement) -> (SparseVec, PolyElement) {
        let mut inside = SparseVec::new();
        let mut outside = PolyElement::zero();
        for (idx, d, c) in p.iter() {
            match self.lookup.get(&(idx.clone(), d)) {
                Some(&k) => {
                    inside.insert(k, c.clone());
                }
                None => outside.add_term(idx.clone(), d, c),
            }
        }
        (inside, outside)
    }

    /// Coordinates of `p`, or an error naming the first term outside.
    pub fn embed(&self, p: &PolyElement) -> Result<SparseVec> {
        let (inside, outside) = self.split(p);
        if !outside.is_zero() {
            return Err(Error::Invalid(format!("{outside} lies outside the truncation")));
        }
        Ok(inside)
    }

    pub fn to_poly(&self, v: &SparseVec) -> PolyElement {
        let mut p = PolyElement::zero();
        for (k, c) in v {
            let (idx, d) = &self.coords[*k];
            p.add_term(idx.clone(), *d, c);
        }
        p
    }

    /// Every coordinate vector `∂^d x`.
    pub fn basis(&self) -> Vec<PolyElement> {
        self.coords.iter().map(|(i, d)| PolyElement::term(Scalar::one(), i.clone(), *d)).collect()
    }

    /// Coordinate vectors selected by `keep`.
    pub fn coordinate_span(&self, keep: impl Fn(&BasisIndex, u32) -> bool) -> Vec<PolyElement> {
        self.coords
            .iter()
            .filter(|(i, d)| keep(i, *d))
            .map(|(i, d)| PolyElement::term(Scalar::one(), i.clone(), *d))
            .collect()
    }
}

/// `{a + b : a, b ∈ w} ∪ w`, restricted to indices valid in `gd`. Symbolic
/// (table) windows are returned unchanged.
pub fn sum_window(gd: &GdStructure, w: &Window) -> Window {
    let add = |a: &BasisIndex, b: &BasisIndex| -> Option<BasisIndex> {
        match (a, b) {
            (BasisIndex::Int(i), BasisIndex::Int(j)) => Some(BasisIndex::Int(i + j)),
            (BasisIndex::Vec(u), BasisIndex::Vec(v)) => Some(BasisIndex::Vec(u + v)),
            (BasisIndex::VecNat(u, i), BasisIndex::VecNat(v, j)) => Some(BasisIndex::VecNat(u + v, i + j)),
            _ => None,
        }
    };
    let mut all: BTreeSet<BasisIndex> = w.iter().cloned().collect();
    for a in w {
        for b in w {
            if let Some(s) = add(a, b) {
                if gd.is_valid(&s) {
                    all.insert(s);
                }
            }
        }
    }
    Window::new(all.into_iter().collect()).expect("set has no duplicates")
}

/// The structure an ideal lives in.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    Gd(&'a GdStructure),
    Conformal(&'a ConformalAlgebra),
}

impl<'a> From<&'a GdStructure> for Target<'a> {
    fn from(g: &'a GdStructure) -> Self {
        Target::Gd(g)
    }
}

impl<'a> From<&'a ConformalAlgebra> for Target<'a> {
    fn from(c: &'a ConformalAlgebra) -> Self {
        Target::Conformal(c)
    }
}

impl<'a> Target<'a> {
    fn gd(&self) -> &'a GdStructure {
        match self {
            Target::Gd(g) => g,
            Target::Conformal(c) => c.gd(),
        }
    }

    fn description(&self) -> String {
        match self {
            Target::Gd(g) => g.description(),
            Target::Conformal(c) => c.description(),
        }
    }
}

/// Generates the closure moves of one ideal kind.
struct Moves<'a> {
    kind: IdealKind,
    gd: &'a GdStructure,
    engine: Option<Engine<'a>>,
    multipliers: Vec<BasisIndex>,
}

impl<'a> Moves<'a> {
    fn new(target: Target<'a>, kind: IdealKind, w: &Window) -> Result<Self> {
        let engine = match (kind, target) {
            (IdealKind::Conformal, Target::Conformal(ca)) => Some(Engine::new(ca)),
            (IdealKind::Conformal, Target::Gd(_)) => {
                return Err(Error::Invalid("conformal ideals need a conformal algebra".into()))
            }
            _ => None,
        };
        let gd = target.gd();
        gd.check_window(w)?;
        Ok(Moves { kind, gd, engine, multipliers: w.indices().to_vec() })
    }

    /// Every required product of `v` with the window basis, labeled.
    fn apply(&mut self, v: &PolyElement) -> Vec<(String, PolyElement)> {
        let mut out = Vec::new();
        if let Some(engine) = self.engine.as_mut() {
            out.push(("∂·v".to_string(), v.derive(1)));
            for e in &self.multipliers {
                let pe = PolyElement::basis(e.clone());
                for (k, c) in engine.bracket(&pe, v).into_iter().enumerate() {
                    out.push((format!("λ^{k} of [{e}_λ v]"), c));
                }
                for (k, c) in engine.bracket(v, &pe).into_iter().enumerate() {
                    out.push((format!("λ^{k} of [v_λ {e}]"), c));
                }
            }
            return out;
        }
        let ev = v.as_element().expect("non-conformal ideals hold ∂-free elements");
        for e in &self.multipliers {
            let eb = Element::basis(e.clone());
            let mut push = |label: String, x: Element| out.push((label, PolyElement::from_element(&x)));
            match self.kind {
                IdealKind::Novikov => {
                    push(format!("{e}∘v"), self.gd.novikov_unchecked(&eb, &ev));
                    push(format!("v∘{e}"), self.gd.novikov_unchecked(&ev, &eb));
                }
                IdealKind::Lie => push(format!("[{e},v]"), self.gd.lie_unchecked(&eb, &ev)),
                IdealKind::Nj => push(format!("v∗{e}"), self.gd.star_unchecked(&ev, &eb)),
                IdealKind::Gd => {
                    push(format!("{e}∘v"), self.gd.novikov_unchecked(&eb, &ev));
                    push(format!("v∘{e}"), self.gd.novikov_unchecked(&ev, &eb));
                    push(format!("[{e},v]"), self.gd.lie_unchecked(&eb, &ev));
                }
                IdealKind::Conformal => unreachable!("handled above"),
            }
        }
        out
    }
}

/// Result of a truncated ideal closure.
#[derive(Debug, Clone)]
pub struct IdealWitness {
    pub kind: IdealKind,
    pub policy: TruncationPolicy,
    pub generators: Vec<PolyElement>,
    pub window: Window,
    pub window_ext: Window,
    pub dpow_bound: u32,
    /// Reduced echelon basis of the closure, in pivot order.
    pub basis_of_closure: Vec<PolyElement>,
    /// Dimension of the truncation the closure lives in.
    pub truncation_dim: usize,
    /// Some move produced terms outside the truncation.
    pub escaped: bool,
    pub lossy: bool,
}

impl IdealWitness {
    pub fn dim(&self) -> usize {
        self.basis_of_closure.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.truncation_dim
    }

    fn echelon(&self, t: &Truncation) -> Echelon {
        let mut ech = Echelon::new();
        for b in &self.basis_of_closure {
            ech.insert(t.embed(b).expect("closure lies in its truncation"));
        }
        ech
    }

    pub fn truncation(&self) -> Truncation {
        Truncation::new(&self.window_ext, self.dpow_bound)
    }

    /// Whether every element of `ps` lies in the closure.
    pub fn contains_all(&self, ps: &[PolyElement]) -> bool {
        let t = self.truncation();
        let ech = self.echelon(&t);
        ps.iter().all(|p| t.embed(p).is_ok_and(|v| ech.contains(&v)))
    }

    /// The first closure basis vector outside `span(candidate)`, if any.
    pub fn first_outside(&self, candidate: &[PolyElement]) -> Result<Option<PolyElement>> {
        let t = self.truncation();
        let mut ech = Echelon::new();
        for c in candidate {
            ech.insert(t.embed(c)?);
        }
        Ok(self.basis_of_closure.iter().find(|b| !ech.contains(&t.embed(b).expect("in truncation"))).cloned())
    }

    pub fn to_report(&self, target_description: &str) -> Report {
        let mut r = Report::new("closure", &self.window)
            .param("algebra", target_description)
            .param("kind", self.kind)
            .param("policy", self.policy.name())
            .param("window_ext", format!("{} indices", self.window_ext.len()));
        r.dpow_bound = Some(self.dpow_bound);
        r.lossy = self.lossy;
        let gens: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        r.witness("generators", gens.join(" ; "));
        r.witness("dimension", format!("{} of {}", self.dim(), self.truncation_dim));
        for (k, b) in self.basis_of_closure.iter().enumerate() {
            r.witness(format!("basis[{k}]"), b.to_string());
        }
        r.verdict = if self.generators.iter().all(PolyElement::is_zero) {
            "zero generators give the zero ideal".to_string()
        } else if self.is_full() {
            "closure is the whole truncation".to_string()
        } else {
            format!("closure has dimension {} in a truncation of dimension {}", self.dim(), self.truncation_dim)
        };
        if self.escaped {
            r.note(match self.policy {
                TruncationPolicy::Project => "terms outside the truncation were dropped; the closure is evidence only",
                TruncationPolicy::Sound => "moves leaving the truncation were discarded; the closure is a lower bound",
            });
        }
        r.status = Status::Pass;
        r
    }
}

fn check_kind_inputs(kind: IdealKind, gens: &[PolyElement]) -> Result<()> {
    if kind != IdealKind::Conformal && gens.iter().any(|g| g.max_dpow().unwrap_or(0) > 0) {
        return Err(Error::Invalid(format!("{kind} ideals are generated by ∂-free elements")));
    }
    Ok(())
}

fn effective_dpow(kind: IdealKind, dpow: u32) -> u32 {
    if kind == IdealKind::Conformal {
        dpow
    } else {
        0
    }
}

/// Smallest subspace of the truncation `(w_ext, dpow_bound)` containing
/// `generators` and stable under the moves of `kind` against the basis of `w`.
pub fn ideal_closure<'a>(
    target: impl Into<Target<'a>>,
    kind: IdealKind,
    generators: &[PolyElement],
    w: &Window,
    w_ext: &Window,
    dpow_bound: u32,
    policy: TruncationPolicy,
) -> Result<IdealWitness> {
    let target = target.into();
    check_kind_inputs(kind, generators)?;
    if let Some(x) = w.iter().find(|x| !w_ext.contains(x)) {
        return Err(Error::Invalid(format!("window index {x} is missing from the extended window")));
    }
    target.gd().check_window(w_ext)?;
    let dpow = effective_dpow(kind, dpow_bound);
    let t = Truncation::new(w_ext, dpow);
    let mut moves = Moves::new(target, kind, w)?;
    let mut ech = Echelon::new();
    let mut queue = VecDeque::new();
    for g in generators {
        let v = t.embed(g)?;
        if ech.insert(v) {
            queue.push_back(g.clone());
        }
    }
    let mut escaped = false;
    while let Some(v) = queue.pop_front() {
        if policy == TruncationPolicy::Sound && ech.dim() == t.dim() {
            break;
        }
        for (_, out) in moves.apply(&v) {
            let (inside, outside) = t.split(&out);
            if !outside.is_zero() {
                escaped = true;
                if policy == TruncationPolicy::Sound {
                    continue;
                }
            }
            if ech.insert(inside.clone()) {
                queue.push_back(t.to_poly(&inside));
            }
        }
    }
    let basis_of_closure: Vec<PolyElement> = ech.rows().map(|r| t.to_poly(r)).collect();
    let full = basis_of_closure.len() == t.dim();
    let lossy = match policy {
        TruncationPolicy::Project => escaped,
        TruncationPolicy::Sound => escaped && !full,
    };
    Ok(IdealWitness {
        kind,
        policy,
        generators: generators.to_vec(),
        window: w.clone(),
        window_ext: w_ext.clone(),
        dpow_bound: dpow,
        basis_of_closure,
        truncation_dim: t.dim(),
        escaped,
        lossy,
    })
}

/// Checks that every required product of an element of `span(candidate)` with
/// a basis vector of `w` stays in the span. Products are tested on an echelon
/// basis of the candidate; parts of a product outside the truncation cannot
/// be judged and only mark the report lossy.
pub fn is_ideal<'a>(
    target: impl Into<Target<'a>>,
    kind: IdealKind,
    candidate: &[PolyElement],
    w: &Window,
    w_ext: &Window,
    dpow_bound: u32,
) -> Result<Report> {
    let target = target.into();
    check_kind_inputs(kind, candidate)?;
    let dpow = effective_dpow(kind, dpow_bound);
    let t = Truncation::new(w_ext, dpow);
    let mut moves = Moves::new(target, kind, w)?;
    let mut ech = Echelon::new();
    for c in candidate {
        ech.insert(t.embed(c)?);
    }
    let mut report = Report::new("is-ideal", w)
        .param("algebra", target.description())
        .param("kind", kind)
        .param("window_ext", format!("{} indices", w_ext.len()));
    report.dpow_bound = Some(dpow);
    report.witness("candidate dimension", format!("{} of {}", ech.dim(), t.dim()));
    let basis: Vec<PolyElement> = ech.rows().map(|r| t.to_poly(r)).collect();
    let (mut checked, mut truncated) = (0usize, 0usize);
    for v in &basis {
        for (label, out) in moves.apply(v) {
            checked += 1;
            let (inside, outside) = t.split(&out);
            if !outside.is_zero() {
                truncated += 1;
            }
            let rem = ech.reduce(inside);
            if !rem.is_empty() {
                report.fail("violation", vec![v.to_string(), label], t.to_poly(&rem));
            }
        }
    }
    report.lossy = truncated > 0;
    if truncated > 0 {
        report.note(format!("{truncated} products left the truncation and were checked on their truncated part only"));
    }
    report.verdict = if report.failures.is_empty() {
        format!("span of {} vectors is stable under all {checked} required products", basis.len())
    } else {
        format!("{} of {checked} required products leave the candidate span", report.failures.len())
    };
    Ok(report.finish(checked, "products"))
}

/// For a GD ideal `I`, checks that `ℂ[∂]I` (truncated at `dpow_bound`) is an
/// ideal of the conformal algebra built from the same data.
pub fn gd_ideal_lift(
    ca: &ConformalAlgebra,
    ideal: &[Element],
    w: &Window,
    w_ext: &Window,
    dpow_bound: u32,
) -> Result<Report> {
    let polys: Vec<PolyElement> = ideal.iter().map(PolyElement::from_element).collect();
    let mut report = Report::new("gd-ideal-lift", w).param("algebra", ca.description());
    report.dpow_bound = Some(dpow_bound);
    for kind in [IdealKind::Novikov, IdealKind::Lie] {
        let pre = is_ideal(ca.gd(), kind, &polys, w, w_ext, 0)?;
        report.lossy |= pre.lossy;
        if !pre.passed() {
            for f in pre.failures {
                report.fail(format!("precondition ({kind})"), f.inputs, f.residual);
            }
        }
    }
    if !report.failures.is_empty() {
        report.verdict = "precondition failed: the input is not a GD ideal".into();
        return Ok(report);
    }
    let lifted: Vec<PolyElement> =
        polys.iter().flat_map(|p| (0..=dpow_bound).map(move |k| p.derive(k))).collect();
    let conf = is_ideal(ca, IdealKind::Conformal, &lifted, w, w_ext, dpow_bound)?;
    report.lossy |= conf.lossy;
    report.witnesses.extend(conf.witnesses);
    report.notes.extend(conf.notes);
    for f in conf.failures {
        report.fail("conformal", f.inputs, f.residual);
    }
    report.verdict = if report.failures.is_empty() {
        "the GD ideal generates a conformal ideal on the truncation".into()
    } else {
        "the lifted span is not stable under λ-brackets".into()
    };
    Ok(report.finish(0, "products"))
}

/// Span of `{x∗y : x, y ∈ w}` and, per target, a representation in terms of
/// star products or a non-membership verdict.
pub fn star_span_check(gd: &GdStructure, w: &Window, targets: &Window) -> Result<Report> {
    gd.check_window(w)?;
    gd.check_window(targets)?;
    let mut report = Report::new("star-span", w)
        .param("algebra", gd.description())
        .param("targets", targets.len());
    let pairs: Vec<(&BasisIndex, &BasisIndex)> = w
        .iter()
        .enumerate()
        .flat_map(|(k, a)| w.indices()[k..].iter().map(move |b| (a, b)))
        .collect();
    let products: Vec<Element> =
        pairs.iter().map(|(a, b)| gd.star_unchecked(&Element::basis((*a).clone()), &Element::basis((*b).clone()))).collect();
    let mut coords: BTreeSet<BasisIndex> = targets.iter().cloned().collect();
    for p in &products {
        coords.extend(p.support().cloned());
    }
    let coords: HashMap<BasisIndex, usize> = coords.into_iter().enumerate().map(|(k, i)| (i, k)).collect();
    let ncoords = coords.len();
    let to_sparse = |e: &Element, track: Option<usize>| -> SparseVec {
        let mut v: SparseVec = e.iter().map(|(i, c)| (coords[i], c.clone())).collect();
        if let Some(k) = track {
            v.insert(ncoords + k, Scalar::one());
        }
        v
    };
    // Each row carries a tracking coordinate, so reducing a target leaves the
    // negated combination of products in the tracking part.
    let mut ech = Echelon::new();
    for (k, p) in products.iter().enumerate() {
        ech.insert(to_sparse(p, Some(k)));
    }
    let mut unreachable = Vec::new();
    for t in targets {
        let rem = ech.reduce(to_sparse(&Element::basis(t.clone()), None));
        if rem.keys().any(|&k| k < ncoords) {
            unreachable.push(t.to_string());
            report.witness(t.to_string(), "not in span(W∗W)");
            continue;
        }
        let mut combo = String::new();
        for (n, (k, c)) in rem.iter().enumerate() {
            let (a, b) = pairs[k - ncoords];
            let _ = crate::basis::write_term(&mut combo, n == 0, &-c, &format!("({a}∗{b})"));
        }
        report.witness(t.to_string(), format!("= {combo}"));
    }
    report.status = Status::from_ok(unreachable.is_empty());
    report.verdict = if unreachable.is_empty() {
        format!("all {} targets lie in span(W∗W)", targets.len())
    } else {
        format!("{} of {} targets unreachable: {}", unreachable.len(), targets.len(), unreachable.join(", "))
    };
    Ok(report)
}

/// The joint kernel of `x ↦ x∗e` for `e ∈ w`, over combinations supported in `w`.
pub fn star_annihilator_check(gd: &GdStructure, w: &Window) -> Result<Report> {
    gd.check_window(w)?;
    let mut report = Report::new("star-annihilator", w).param("algebra", gd.description());
    let images: Vec<Vec<Element>> = w
        .iter()
        .map(|x| w.iter().map(|e| gd.star_unchecked(&Element::basis(x.clone()), &Element::basis(e.clone()))).collect())
        .collect();
    let mut coords: BTreeSet<(usize, BasisIndex)> = BTreeSet::new();
    for row in &images {
        for (k, img) in row.iter().enumerate() {
            coords.extend(img.support().map(|i| (k, i.clone())));
        }
    }
    let coords: HashMap<(usize, BasisIndex), usize> = coords.into_iter().enumerate().map(|(n, c)| (c, n)).collect();
    let rows: Vec<Vec<Scalar>> = images
        .iter()
        .map(|row| {
            let mut v = vec![Scalar::zero(); coords.len()];
            for (k, img) in row.iter().enumerate() {
                for (i, c) in img.iter() {
                    v[coords[&(k, i.clone())]] = c.clone();
                }
            }
            v
        })
        .collect();
    let ker = if coords.is_empty() {
        // every product vanishes
        (0..w.len())
            .map(|k| (0..w.len()).map(|j| if j == k { Scalar::one() } else { Scalar::zero() }).collect())
            .collect()
    } else {
        kernel(&rows)?
    };
    for (n, v) in ker.iter().enumerate() {
        let e: Element = w.iter().cloned().zip(v.iter().cloned()).collect();
        report.witness(format!("kernel[{n}]"), e.to_string());
    }
    report.status = Status::from_ok(ker.is_empty());
    report.verdict = if ker.is_empty() {
        "no nonzero element of span(W) annihilates W under ∗".into()
    } else {
        format!("annihilator has dimension {} in span(W)", ker.len())
    };
    Ok(report)
}

const TRIAL_COEFFS: [&str; 6] = ["1", "-1", "2", "1/2", "i", "-3"];

/// A random nonzero element with 1 to 3 terms supported in `w` and ∂-degrees up to `dpow`.
pub fn random_generator(rng: &mut ChaCha8Rng, w: &Window, dpow: u32) -> PolyElement {
    let coeffs: Vec<Scalar> = TRIAL_COEFFS.iter().map(|c| c.parse().expect("literal")).collect();
    loop {
        let mut p = PolyElement::zero();
        for _ in 0..rng.gen_range(1..=3) {
            let idx = w.indices().choose(rng).expect("nonempty window").clone();
            let d = rng.gen_range(0..=dpow);
            p.add_term(idx, d, coeffs.choose(rng).expect("nonempty"));
        }
        if !p.is_zero() {
            return p;
        }
    }
}

/// One randomized closure trial.
#[derive(Debug, Clone)]
pub struct Trial {
    pub generator: PolyElement,
    pub closure_dim: usize,
    pub truncation_dim: usize,
    /// `∂^k x ∈ I` for all `x ∈ W`, `1 ≤ k ≤ dpow`.
    pub derivatives_in: bool,
    /// `∂^k x ∈ I` for all `x ∈ W`, `0 ≤ k ≤ dpow`.
    pub full: bool,
    pub lossy: bool,
}

/// Settings for [`simplicity_evidence_report`].
#[derive(Debug, Clone)]
pub struct EvidenceConfig {
    pub window: Window,
    pub window_ext: Window,
    pub dpow_bound: u32,
    pub trials: usize,
    pub seed: u64,
}

/// Runs the star-span and annihilator checks on the GD data and `trials`
/// seeded conformal closures of random generators (with the sound policy),
/// recording which reach `∂V ∩ T` and all of `V ⊗ ℂ[∂]` up to the bound.
pub fn simplicity_evidence_report(ca: &ConformalAlgebra, cfg: &EvidenceConfig) -> Result<(Report, Vec<Trial>)> {
    let w = &cfg.window;
    if w.is_empty() {
        return Err(Error::Invalid("simplicity evidence needs a nonempty window".into()));
    }
    let mut report = Report::new("simplicity-evidence", w)
        .param("algebra", ca.description())
        .param("trials", cfg.trials)
        .param("seed", cfg.seed)
        .param("window_ext", format!("{} indices", cfg.window_ext.len()));
    report.dpow_bound = Some(cfg.dpow_bound);

    let span = star_span_check(ca.gd(), w, w)?;
    report.witness("star-span", span.verdict.clone());
    let ann = star_annihilator_check(ca.gd(), w)?;
    report.witness("star-annihilator", ann.verdict.clone());

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gens: Vec<PolyElement> = (0..cfg.trials).map(|_| random_generator(&mut rng, w, cfg.dpow_bound)).collect();
    let derived: Vec<PolyElement> =
        w.iter().flat_map(|x| (1..=cfg.dpow_bound).map(move |k| PolyElement::term(Scalar::one(), x.clone(), k))).collect();
    let plain: Vec<PolyElement> = w.iter().map(|x| PolyElement::basis(x.clone())).collect();
    let trials: Vec<Trial> = gens
        .par_iter()
        .map(|g| {
            let wit = ideal_closure(
                ca,
                IdealKind::Conformal,
                std::slice::from_ref(g),
                w,
                &cfg.window_ext,
                cfg.dpow_bound,
                TruncationPolicy::Sound,
            )?;
            let derivatives_in = wit.contains_all(&derived);
            Ok(Trial {
                generator: g.clone(),
                closure_dim: wit.dim(),
                truncation_dim: wit.truncation_dim,
                derivatives_in,
                full: derivatives_in && wit.contains_all(&plain),
                lossy: wit.lossy,
            })
        })
        .collect::<Result<_>>()?;

    for (k, t) in trials.iter().enumerate() {
        report.witness(
            format!("trial {k}"),
            format!(
                "generator {} -> closure dim {}/{}, ∂V contained: {}, full: {}, lossy: {}",
                t.generator, t.closure_dim, t.truncation_dim, t.derivatives_in, t.full, t.lossy
            ),
        );
    }
    let derivatives_in = trials.iter().filter(|t| t.derivatives_in).count();
    let full = trials.iter().filter(|t| t.full).count();
    let non_lossy = trials.iter().filter(|t| !t.lossy).count();
    let full_non_lossy = trials.iter().filter(|t| !t.lossy && t.full).count();
    report.lossy = trials.iter().any(|t| t.lossy);
    let ok = span.passed() && ann.passed() && derivatives_in == trials.len() && full_non_lossy == non_lossy;
    report.status = Status::from_ok(ok);
    report.verdict = format!(
        "star span full: {}; annihilator trivial: {}; ∂V contained in {derivatives_in}/{n} closures; \
         full containment in {full}/{n} ({full_non_lossy}/{non_lossy} non-lossy)",
        span.passed(),
        ann.passed(),
        n = trials.len()
    );
    report.note("desk-scale evidence on a finite truncation, not a proof of simplicity");
    Ok((report, trials))
}

/// `J = span{x_α : α ≠ −2b}` inside the truncation of `w_ext` (∂-free part).
pub fn candidate_j(delta: &DeltaGroup, b: &Scalar, w_ext: &Window) -> Vec<PolyElement> {
    let minus_2b = -&(&Scalar::from_int(2) * b);
    Truncation::new(w_ext, 0).coordinate_span(|i, _| !is_delta_value(delta, i, &minus_2b))
}

/// `B = J ⊕ ℂ[∂]∂A2` truncated at `dpow`.
pub fn candidate_b(delta: &DeltaGroup, b: &Scalar, w_ext: &Window, dpow: u32) -> Vec<PolyElement> {
    let minus_2b = -&(&Scalar::from_int(2) * b);
    Truncation::new(w_ext, dpow).coordinate_span(|i, d| d > 0 || !is_delta_value(delta, i, &minus_2b))
}

/// The ∂-free coordinate span of `w_ext` with `drop` removed.
pub fn candidate_without(w_ext: &Window, drop: &BasisIndex) -> Vec<PolyElement> {
    Truncation::new(w_ext, 0).coordinate_span(|i, _| i != drop)
}

fn is_delta_value(delta: &DeltaGroup, idx: &BasisIndex, s: &Scalar) -> bool {
    let v: &DeltaVector = match idx {
        BasisIndex::Vec(v) | BasisIndex::VecNat(v, _) => v,
        _ => return false,
    };
    v.rank() == delta.rank() && &delta.eval_unchecked(v) == s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::quadratic_from_gd;
    use crate::families::{a1, a2, a3, GroupHom};
    use crate::table::{sym, Table};

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn x(a: i64) -> BasisIndex {
        BasisIndex::Vec(DeltaVector(vec![a]))
    }

    fn a2_plain(b: &str) -> GdStructure {
        let g = DeltaGroup::integers();
        a2(g.clone(), s(b), GroupHom::zero(g)).unwrap()
    }

    #[test]
    fn star_span_examples() {
        let w = Window::int_range(-1, 6);
        assert!(star_span_check(&a1(Scalar::zero()), &w, &w).unwrap().passed());

        let w = Window::vec_range(-4, 4);
        let r = star_span_check(&a2_plain("1/2"), &w, &w).unwrap();
        assert!(!r.passed());
        assert_eq!(r.verdict, "1 of 9 targets unreachable: x_{(-1)}");

        let g = DeltaGroup::integers();
        let a3 = a3(g.clone(), s("1/2"), GroupHom::zero(g), Scalar::zero()).unwrap();
        let w = Window::vecnat_range(-2, 2, 0, 3);
        assert!(star_span_check(&a3, &w, &w).unwrap().passed());
    }

    #[test]
    fn star_span_witness_is_a_valid_combination() {
        // x_0 ∗ x_0 = 2b x_0 with b = 1/3, so x_0 = 3/2 (x_0∗x_0).
        let w = Window::vec_range(0, 0);
        let r = star_span_check(&a2_plain("1/3"), &w, &w).unwrap();
        assert_eq!(r.witnesses[0].detail, "= 3/2·(x_{(0)}∗x_{(0)})");
    }

    #[test]
    fn star_span_dichotomy_exhaustive() {
        let w = Window::vec_range(-6, 6);
        for (b, hole) in [("1/2", Some(-1)), ("1", Some(-2)), ("3/2", Some(-3)), ("1/3", None)] {
            let r = star_span_check(&a2_plain(b), &w, &w).unwrap();
            let missing: Vec<&str> =
                r.witnesses.iter().filter(|w| w.detail.starts_with("not")).map(|w| w.label.as_str()).collect();
            let expect: Vec<String> = hole.map(|h| x(h).to_string()).into_iter().collect();
            assert_eq!(missing, expect, "b={b}");
        }
    }

    #[test]
    fn annihilator_examples() {
        assert!(star_annihilator_check(&a1(Scalar::zero()), &Window::int_range(-1, 6)).unwrap().passed());
        assert!(star_annihilator_check(&a2_plain("1/2"), &Window::vec_range(-4, 4)).unwrap().passed());
        let t = Table::new("zero", vec!["e".into(), "f".into()], vec![vec![Element::zero(); 2]; 2], vec![vec![Element::zero(); 2]; 2])
            .unwrap();
        let gd = t.clone().into_gd();
        let r = star_annihilator_check(&gd, &t.window()).unwrap();
        assert_eq!(r.witnesses.len(), 2);
        assert!(!r.passed());
    }

    #[test]
    fn nj_closure_stays_in_j() {
        let gd = a2_plain("1/2");
        let w_ext = Window::vec_range(-5, 5).without(&[x(-1)]);
        let gens = [PolyElement::basis(x(0))];
        let wit = ideal_closure(&gd, IdealKind::Nj, &gens, &w_ext, &w_ext, 0, TruncationPolicy::Project).unwrap();
        assert!(wit.dim() > 1);
        assert!(wit.basis_of_closure.iter().all(|b| b.coeff(&x(-1), 0).is_zero()));
    }

    #[test]
    fn conformal_closure_of_l0() {
        let ca = quadratic_from_gd(&a1(Scalar::zero()));
        let w = Window::int_range(-1, 4);
        let wit = ideal_closure(&ca, IdealKind::Conformal, &[PolyElement::basis(BasisIndex::Int(0))], &w, &w, 3, TruncationPolicy::Project)
            .unwrap();
        let all: Vec<PolyElement> =
            w.iter().flat_map(|i| (0..=3).map(move |k| PolyElement::term(Scalar::one(), i.clone(), k))).collect();
        assert!(wit.contains_all(&all));
        assert!(wit.lossy);
    }

    #[test]
    fn abelian_closure_does_not_grow() {
        let t = Table::new("ab", vec!["e".into(), "f".into()], vec![vec![Element::zero(); 2]; 2], vec![vec![Element::zero(); 2]; 2])
            .unwrap();
        let w = t.window();
        let gd = t.into_gd();
        let g = PolyElement::from_element(&(&sym("e") + &sym("f")));
        let wit = ideal_closure(&gd, IdealKind::Lie, std::slice::from_ref(&g), &w, &w, 0, TruncationPolicy::Project).unwrap();
        assert_eq!(wit.basis_of_closure.len(), 1);
        let ca = quadratic_from_gd(&gd);
        let wit = ideal_closure(&ca, IdealKind::Conformal, &[g], &w, &w, 2, TruncationPolicy::Project).unwrap();
        // only the ℂ[∂]-orbit of the generator
        assert_eq!(wit.dim(), 3);
    }

    #[test]
    fn zero_generators_give_zero_ideal() {
        let gd = a1(Scalar::one());
        let w = Window::int_range(-1, 2);
        let wit = ideal_closure(&gd, IdealKind::Gd, &[PolyElement::zero()], &w, &w, 0, TruncationPolicy::Project).unwrap();
        assert_eq!(wit.dim(), 0);
        assert!(wit.to_report("A1").verdict.contains("zero ideal"));
    }

    #[test]
    fn closure_input_errors() {
        let gd = a1(Scalar::one());
        let w = Window::int_range(-1, 2);
        let ca = quadratic_from_gd(&gd);
        let d = PolyElement::term(Scalar::one(), BasisIndex::Int(0), 1);
        assert!(ideal_closure(&gd, IdealKind::Lie, std::slice::from_ref(&d), &w, &w, 0, TruncationPolicy::Project).is_err());
        assert!(ideal_closure(&gd, IdealKind::Conformal, std::slice::from_ref(&d), &w, &w, 1, TruncationPolicy::Project).is_err());
        assert!(ideal_closure(&ca, IdealKind::Conformal, &[d], &w, &Window::int_range(0, 2), 1, TruncationPolicy::Project).is_err());
        let far = PolyElement::basis(BasisIndex::Int(9));
        assert!(ideal_closure(&ca, IdealKind::Conformal, &[far], &w, &w, 1, TruncationPolicy::Project).is_err());
    }

    #[test]
    fn ideal_candidates_in_a2() {
        let g = DeltaGroup::integers();
        let b = s("1/2");
        let gd = a2_plain("1/2");
        let w = Window::vec_range(-4, 4);
        let w_ext = Window::vec_range(-8, 8);
        let j = candidate_j(&g, &b, &w_ext);
        let r = is_ideal(&gd, IdealKind::Nj, &j, &w, &w_ext, 0).unwrap();
        assert!(r.passed(), "{:?}", r.failures.first());

        let bb = candidate_b(&g, &b, &w_ext, 3);
        let ca = quadratic_from_gd(&gd);
        let r = is_ideal(&ca, IdealKind::Conformal, &bb, &w, &w_ext, 3).unwrap();
        assert!(r.passed(), "{:?}", r.failures.first());

        // x_1 ∗ x_{-1} = (0 + 1)·x_0 leaves span{x_α : α ≠ 0}.
        let jp = candidate_without(&w_ext, &x(0));
        let r = is_ideal(&gd, IdealKind::Nj, &jp, &w, &w_ext, 0).unwrap();
        assert!(!r.passed());
        let f = r.failures.iter().find(|f| f.inputs == ["x_{(1)}", "v∗x_{(-1)}"]).unwrap();
        assert_eq!(f.residual, "x_{(0)}");

        let full = Truncation::new(&w_ext, 2).basis();
        assert!(is_ideal(&ca, IdealKind::Conformal, &full, &w, &w_ext, 2).unwrap().passed());
    }

    fn right_unit_table() -> Table {
        // e∘e = e, f∘e = f, everything else 0; span{f} is a GD ideal.
        Table::new(
            "right-unit",
            vec!["e".into(), "f".into()],
            vec![vec![sym("e"), Element::zero()], vec![sym("f"), Element::zero()]],
            vec![vec![Element::zero(); 2]; 2],
        )
        .unwrap()
    }

    #[test]
    fn gd_ideal_lifts() {
        let t = right_unit_table();
        let w = t.window();
        let ca = quadratic_from_gd(&t.into_gd());
        let r = gd_ideal_lift(&ca, &[sym("f")], &w, &w, 3).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(gd_ideal_lift(&ca, &[sym("e"), sym("f")], &w, &w, 2).unwrap().passed());
        assert!(gd_ideal_lift(&ca, &[], &w, &w, 2).unwrap().passed());
        // span{e} is not a Novikov ideal: f∘e = f.
        let r = gd_ideal_lift(&ca, &[sym("e")], &w, &w, 2).unwrap();
        assert!(!r.passed());
        assert!(r.verdict.starts_with("precondition failed"));
    }

    #[test]
    fn closure_is_idempotent_and_an_ideal() {
        let gd = a2_plain("1/2");
        let w_ext = Window::vec_range(-5, 5).without(&[x(-1)]);
        let wit = ideal_closure(&gd, IdealKind::Nj, &[PolyElement::basis(x(2))], &w_ext, &w_ext, 0, TruncationPolicy::Project)
            .unwrap();
        if !wit.lossy {
            let again =
                ideal_closure(&gd, IdealKind::Nj, &wit.basis_of_closure, &w_ext, &w_ext, 0, TruncationPolicy::Project).unwrap();
            assert_eq!(again.basis_of_closure, wit.basis_of_closure);
            assert!(is_ideal(&gd, IdealKind::Nj, &wit.basis_of_closure, &w_ext, &w_ext, 0).unwrap().passed());
        }
        let w = Window::vec_range(-2, 2);
        let w_ext = sum_window(&gd, &w);
        assert_eq!(w_ext, Window::vec_range(-4, 4));
    }

    #[test]
    fn simplicity_evidence_for_cl1() {
        let ca = quadratic_from_gd(&a1(Scalar::one()));
        let w = Window::int_range(-1, 4);
        let cfg = EvidenceConfig { window_ext: sum_window(ca.gd(), &w), window: w, dpow_bound: 2, trials: 4, seed: 11 };
        let (r, trials) = simplicity_evidence_report(&ca, &cfg).unwrap();
        assert!(r.passed(), "{}", r.to_text());
        assert!(trials.iter().all(|t| t.derivatives_in && t.full));
    }

    #[test]
    fn abelian_current_algebra_closures_do_not_grow() {
        let t = Table::new("ab", vec!["e".into(), "f".into()], vec![vec![Element::zero(); 2]; 2], vec![vec![Element::zero(); 2]; 2])
            .unwrap();
        let w = t.window();
        let ca = quadratic_from_gd(&crate::families::current(t));
        let cfg = EvidenceConfig { window: w.clone(), window_ext: w, dpow_bound: 1, trials: 5, seed: 3 };
        let (r, trials) = simplicity_evidence_report(&ca, &cfg).unwrap();
        assert!(!r.passed());
        for t in trials {
            // the generator and its derivative only
            assert!(t.closure_dim <= 2, "{t:?}");
        }
    }
}
