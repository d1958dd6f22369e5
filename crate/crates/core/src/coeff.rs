//! The coefficient Lie algebra `Coeff(R)` of a quadratic conformal algebra,
//! realized on modes `x[n]` of the basis vectors: the relation
//! `(∂a)[n] = −n·a[n−1]` removes every ∂.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{write_term, BasisIndex};
use crate::conformal::{ConformalAlgebra, PolyElement, Var};
use crate::delta::DeltaVector;
use crate::error::{Error, Result};
use crate::families::{make_family, FamilyKind, FamilyParams, GroupHom, SkewForm};
use crate::report::Report;
use crate::scalar::{binomial_falling, factorial, Scalar};
use crate::window::Window;

/// A basis vector together with a mode.
pub type Mode = (BasisIndex, i64);

/// `Σ c · x[n]`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CoeffElement {
    terms: BTreeMap<Mode, Scalar>,
}

impl CoeffElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coeff: Scalar, idx: BasisIndex, mode: i64) -> Self {
        let mut e = Self::zero();
        e.add_term(idx, mode, &coeff);
        e
    }

    pub fn add_term(&mut self, idx: BasisIndex, mode: i64, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        let key = (idx, mode);
        let slot = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &CoeffElement, factor: &Scalar) {
        for ((idx, n), c) in &other.terms {
            self.add_term(idx.clone(), *n, &(c * factor));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, idx: &BasisIndex, mode: i64) -> Scalar {
        self.terms.get(&(idx.clone(), mode)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, i64, &Scalar)> {
        self.terms.iter().map(|((i, n), c)| (i, *n, c))
    }
}

impl std::ops::Sub<&CoeffElement> for &CoeffElement {
    type Output = CoeffElement;
    fn sub(self, rhs: &CoeffElement) -> CoeffElement {
        let mut e = self.clone();
        e.add_scaled(rhs, &-Scalar::one());
        e
    }
}

impl fmt::Display for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((idx, n), c)) in self.terms.iter().enumerate() {
            write_term(f, k == 0, c, &format!("{idx}[{n}]"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CoeffElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for CoeffElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn mode_label((idx, n): &Mode) -> String {
    format!("{idx}[{n}]")
}

/// `(∂^k x)[n] ↦ (−1)^k n(n−1)…(n−k+1) · x[n−k]`, extended linearly.
pub fn coeff_canonicalize(p: &PolyElement, mode: i64) -> CoeffElement {
    let mut out = CoeffElement::zero();
    for (idx, k, c) in p.iter() {
        let mut falling = Scalar::one();
        for t in 0..k as i64 {
            falling = &falling * &Scalar::from_int(-(mode - t));
        }
        out.add_term(idx.clone(), mode - k as i64, &(c * &falling));
    }
    out
}

/// `[a[m], b[n]] = Σ_j C(m, j) (a_(j) b)[m+n−j]`.
pub fn coeff_bracket(ca: &ConformalAlgebra, a: &BasisIndex, m: i64, b: &BasisIndex, n: i64) -> Result<CoeffElement> {
    let br = ca.lambda_bracket(&PolyElement::basis(a.clone()), &PolyElement::basis(b.clone()), Var::Lambda)?;
    let mut out = CoeffElement::zero();
    for ((j, _), p) in br.iter() {
        let weight = &binomial_falling(m, j) * &Scalar::from_bigint(factorial(j as u64));
        out.add_scaled(&coeff_canonicalize(p, m + n - j as i64), &weight);
    }
    Ok(out)
}

/// Bilinear extension of [`coeff_bracket`].
pub fn coeff_bracket_elements(ca: &ConformalAlgebra, x: &CoeffElement, y: &CoeffElement) -> Result<CoeffElement> {
    let mut out = CoeffElement::zero();
    for (a, m, ca_) in x.iter() {
        for (b, n, cb) in y.iter() {
            out.add_scaled(&coeff_bracket(ca, a, m, b, n)?, &(ca_ * cb));
        }
    }
    Ok(out)
}

/// Skew-symmetry on each ordered pair inside a sample and the Jacobi identity
/// on each sampled triple.
pub fn check_coeff_jacobi(ca: &ConformalAlgebra, samples: &[[Mode; 3]]) -> Result<Report> {
    let mut report = Report::new("coeff-jacobi", &Window::empty())
        .param("algebra", ca.description())
        .param("samples", samples.len());
    let el = |(i, n): &Mode| CoeffElement::term(Scalar::one(), i.clone(), *n);
    let mut checked = 0;
    for t in samples {
        checked += 1;
        let labels: Vec<String> = t.iter().map(mode_label).collect();
        let [x, y, z] = [el(&t[0]), el(&t[1]), el(&t[2])];
        let xy = coeff_bracket_elements(ca, &x, &y)?;
        let skew = {
            let mut s = xy.clone();
            s.add_scaled(&coeff_bracket_elements(ca, &y, &x)?, &Scalar::one());
            s
        };
        if !skew.is_zero() {
            report.fail("skew-symmetry", labels[..2].to_vec(), skew);
        }
        let mut jac = coeff_bracket_elements(ca, &xy, &z)?;
        jac.add_scaled(&coeff_bracket_elements(ca, &coeff_bracket_elements(ca, &y, &z)?, &x)?, &Scalar::one());
        jac.add_scaled(&coeff_bracket_elements(ca, &coeff_bracket_elements(ca, &z, &x)?, &y)?, &Scalar::one());
        if !jac.is_zero() {
            report.fail("jacobi", labels, jac);
        }
    }
    Ok(report.finish(checked, "sampled triples"))
}

/// Every `(index, mode)` with index in `w` and mode in `lo..=hi`.
pub fn sample_box(w: &Window, lo: i64, hi: i64) -> Vec<Mode> {
    w.iter().flat_map(|i| (lo..=hi).map(move |n| (i.clone(), n))).collect()
}

/// `count` triples drawn uniformly (with replacement) from `points`.
pub fn random_triples(points: &[Mode], count: usize, seed: u64) -> Vec<[Mode; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if points.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let mut pick = || points.choose(&mut rng).expect("nonempty").clone();
            [pick(), pick(), pick()]
        })
        .collect()
}

/// `count` ordered pairs drawn from `points`.
pub fn random_pairs(points: &[Mode], count: usize, seed: u64) -> Vec<[Mode; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if points.is_empty() {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let mut pick = || points.choose(&mut rng).expect("nonempty").clone();
            [pick(), pick()]
        })
        .collect()
}

/// Every ordered pair of `points`.
pub fn all_pairs(points: &[Mode]) -> Vec<[Mode; 2]> {
    points.iter().flat_map(|p| points.iter().map(move |q| [p.clone(), q.clone()])).collect()
}

/// Published closed forms of the coefficient brackets.
#[derive(Debug, Clone)]
pub enum ClosedForm {
    /// `[L_{i,t}, L_{j,s}] = ((j+1)t − (i+1)s)L_{i+j,t+s−1} + c(j−i)L_{i+j,t+s}`.
    CL1 { c: Scalar },
    /// `[x_{α,i}, x_{β,j}] = (i(β+b) − j(α+b))x_{α+β,i+j−1}
    ///   + (1/b)(φ(α)β − φ(β)α + b(φ(α)−φ(β)))x_{α+β,i+j}`.
    CL2 { b: Scalar, phi: GroupHom },
    /// The four-term bracket on `x_{α,i,s}`.
    CL3 { b: Scalar, phi: GroupHom, c: Scalar },
    /// The `b = 0` bracket with the skew form ϕ.
    CL3b0 { form: SkewForm, phi: GroupHom },
}

impl ClosedForm {
    pub fn from_params(p: &FamilyParams) -> Result<Self> {
        let phi = || match &p.phi {
            None => Ok(GroupHom::zero(p.delta.clone())),
            Some(v) => GroupHom::new(p.delta.clone(), v.clone()),
        };
        Ok(match p.kind {
            FamilyKind::CL1 => ClosedForm::CL1 { c: p.c.clone() },
            FamilyKind::CL2 => ClosedForm::CL2 { b: p.b.clone(), phi: phi()? },
            FamilyKind::CL3 => ClosedForm::CL3 { b: p.b.clone(), phi: phi()?, c: p.c.clone() },
            FamilyKind::CL3b0 => {
                let form = match &p.form {
                    None => SkewForm::zero(p.delta.clone()),
                    Some(m) => SkewForm::new(p.delta.clone(), m.clone())?,
                };
                ClosedForm::CL3b0 { form, phi: phi()? }
            }
            other => return Err(Error::Invalid(format!("no closed coefficient bracket is known for {other}"))),
        })
    }

    pub fn bracket(&self, delta: &crate::delta::DeltaGroup, x: &Mode, y: &Mode) -> CoeffElement {
        let int = Scalar::from_int;
        let mut out = CoeffElement::zero();
        match self {
            ClosedForm::CL1 { c } => {
                let ((BasisIndex::Int(i), t), (BasisIndex::Int(j), s)) = ((&x.0, x.1), (&y.0, y.1)) else {
                    panic!("CL1 modes need integer indices");
                };
                let (i, j) = (*i, *j);
                out.add_term(BasisIndex::Int(i + j), t + s - 1, &int((j + 1) * t - (i + 1) * s));
                out.add_term(BasisIndex::Int(i + j), t + s, &(c * &int(j - i)));
            }
            ClosedForm::CL2 { b, phi } => {
                let ((BasisIndex::Vec(u), i), (BasisIndex::Vec(v), j)) = ((&x.0, x.1), (&y.0, y.1)) else {
                    panic!("CL2 modes need Δ indices");
                };
                let (alpha, beta) = (delta.eval_unchecked(u), delta.eval_unchecked(v));
                let (pa, pb) = (phi.apply(u), phi.apply(v));
                let g = BasisIndex::Vec(u + v);
                let first = &(&int(i) * &(&beta + b)) - &(&int(j) * &(&alpha + b));
                out.add_term(g.clone(), i + j - 1, &first);
                if !phi.is_zero() {
                    let inner = &(&(&pa * &beta) - &(&pb * &alpha)) + &(b * &(&pa - &pb));
                    out.add_term(g, i + j, &(&inner / b));
                }
            }
            ClosedForm::CL3 { b, phi, c } => {
                let (u, i, s, v, j, t) = vecnat_modes(x, y);
                let (alpha, beta) = (delta.eval_unchecked(u), delta.eval_unchecked(v));
                let (pa, pb) = (phi.apply(u), phi.apply(v));
                let (ab, bb) = (&alpha + b, &beta + b);
                let (si, sj) = (int(i as i64), int(j as i64));
                let top = &(&(&bb * &pa) - &(&ab * &pb)) / b;
                let below = &(&(&sj * &(&pa - &(c * &ab))) + &(&si * &(&(c * &bb) - &pb))) / b;
                four_terms(&mut out, u + v, i + j, s + t, [
                    &(&int(s) * &bb) - &(&int(t) * &ab),
                    int(j as i64 * s - i as i64 * t),
                    top,
                    below,
                ]);
            }
            ClosedForm::CL3b0 { form, phi } => {
                let (u, i, s, v, j, t) = vecnat_modes(x, y);
                let (alpha, beta) = (delta.eval_unchecked(u), delta.eval_unchecked(v));
                let (si, sj) = (int(i as i64), int(j as i64));
                four_terms(&mut out, u + v, i + j, s + t, [
                    &(&int(s) * &beta) - &(&int(t) * &alpha),
                    int(j as i64 * s - i as i64 * t),
                    form.apply(v, u),
                    &(&sj * &phi.apply(u)) - &(&si * &phi.apply(v)),
                ]);
            }
        }
        out
    }
}

fn vecnat_modes<'a>(x: &'a Mode, y: &'a Mode) -> (&'a DeltaVector, u32, i64, &'a DeltaVector, u32, i64) {
    match (x, y) {
        ((BasisIndex::VecNat(u, i), s), (BasisIndex::VecNat(v, j), t)) => (u, *i, *s, v, *j, *t),
        _ => panic!("CL3 modes need (Δ, ℕ) indices"),
    }
}

/// `k₀·x_{γ,n}[m−1] + k₁·x_{γ,n−1}[m−1] + k₂·x_{γ,n}[m] + k₃·x_{γ,n−1}[m]`;
/// the `n−1` terms are absent at `n = 0`.
fn four_terms(out: &mut CoeffElement, gamma: DeltaVector, n: u32, m: i64, k: [Scalar; 4]) {
    let top = BasisIndex::VecNat(gamma.clone(), n);
    out.add_term(top.clone(), m - 1, &k[0]);
    out.add_term(top, m, &k[2]);
    if n > 0 {
        let below = BasisIndex::VecNat(gamma, n - 1);
        out.add_term(below.clone(), m - 1, &k[1]);
        out.add_term(below, m, &k[3]);
    }
}

/// Compares [`coeff_bracket`] on the built family with its closed form on
/// each sample pair.
pub fn coeff_closed_form_crosscheck(p: &FamilyParams, samples: &[[Mode; 2]]) -> Result<Report> {
    let form = ClosedForm::from_params(p)?;
    let ca = make_family(p)?.conformal();
    let mut report = Report::new("coeff-crosscheck", &Window::empty())
        .param("algebra", ca.description())
        .param("samples", samples.len());
    for [x, y] in samples {
        ca.gd().check_index(&x.0)?;
        ca.gd().check_index(&y.0)?;
        let computed = coeff_bracket(&ca, &x.0, x.1, &y.0, y.1)?;
        let expected = form.bracket(&p.delta, x, y);
        let residual = &computed - &expected;
        if !residual.is_zero() {
            report.fail("closed-form", vec![mode_label(x), mode_label(y)], residual);
        }
    }
    Ok(report.finish(samples.len(), "sample pairs"))
}

/// Structure constants `[a[m], b[n]]` over `samples`, for export.
#[derive(Debug, Clone, Serialize)]
pub struct CoeffEntry {
    pub a: String,
    pub m: i64,
    pub b: String,
    pub n: i64,
    pub bracket: CoeffElement,
}

pub fn coeff_table(ca: &ConformalAlgebra, samples: &[[Mode; 2]]) -> Result<Vec<CoeffEntry>> {
    samples
        .iter()
        .map(|[x, y]| {
            Ok(CoeffEntry {
                a: x.0.to_string(),
                m: x.1,
                b: y.0.to_string(),
                n: y.1,
                bracket: coeff_bracket(ca, &x.0, x.1, &y.0, y.1)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::quadratic_from_gd;
    use crate::delta::DeltaGroup;
    use crate::families::vir;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn l() -> BasisIndex {
        BasisIndex::Sym("L".into())
    }

    #[test]
    fn canonicalize_examples() {
        let d1: PolyElement = "∂ L".parse().unwrap();
        let d2: PolyElement = "∂^2 L".parse().unwrap();
        for n in -3..4 {
            assert_eq!(coeff_canonicalize(&d1, n), CoeffElement::term(Scalar::from_int(-n), l(), n - 1));
            assert_eq!(coeff_canonicalize(&d2, n), CoeffElement::term(Scalar::from_int(n * (n - 1)), l(), n - 2));
        }
        assert!(coeff_canonicalize(&d1, 0).is_zero());
    }

    #[test]
    fn vir_modes_form_shifted_witt() {
        let v = quadratic_from_gd(&vir());
        for m in -3..4 {
            for n in -3..4 {
                let expect = CoeffElement::term(Scalar::from_int(m - n), l(), m + n - 1);
                assert_eq!(coeff_bracket(&v, &l(), m, &l(), n).unwrap(), expect);
            }
        }
        let pts = sample_box(&Window::new(vec![l()]).unwrap(), -2, 2);
        let mut triples: Vec<[Mode; 3]> = Vec::new();
        for a in &pts {
            for b in &pts {
                for c in &pts {
                    triples.push([a.clone(), b.clone(), c.clone()]);
                }
            }
        }
        assert!(check_coeff_jacobi(&v, &triples).unwrap().passed());
    }

    #[test]
    fn cl1_example_pair() {
        let p = FamilyParams { c: s("2"), ..FamilyParams::new(FamilyKind::CL1) };
        let ca = make_family(&p).unwrap().conformal();
        let got = coeff_bracket(&ca, &BasisIndex::Int(0), 1, &BasisIndex::Int(1), -1).unwrap();
        assert_eq!(got.to_string(), "3·L_{1}[-1] + 2·L_{1}[0]");
        let r = coeff_closed_form_crosscheck(&p, &[[(BasisIndex::Int(0), 1), (BasisIndex::Int(1), -1)]]).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn closed_forms_agree_on_boxes() {
        let g = DeltaGroup::integers();
        let cases = [
            (FamilyParams { c: s("-3"), ..FamilyParams::new(FamilyKind::CL1) }, Window::int_range(-1, 3)),
            (FamilyParams { b: s("1/2"), allow_2b_in_delta: true, ..FamilyParams::new(FamilyKind::CL2) }, Window::vec_range(-2, 2)),
            (
                FamilyParams { b: s("1/3"), phi: Some(vec![s("1/5")]), ..FamilyParams::new(FamilyKind::CL2) },
                Window::vec_range(-2, 2),
            ),
            (
                FamilyParams { b: s("1/3"), phi: Some(vec![s("1/5")]), c: s("2"), ..FamilyParams::new(FamilyKind::CL3) },
                Window::vecnat_range(-1, 1, 0, 2),
            ),
            (
                FamilyParams {
                    delta: g.clone(),
                    form: Some(vec![vec![s("0")]]),
                    phi: Some(vec![s("-1/2")]),
                    ..FamilyParams::new(FamilyKind::CL3b0)
                },
                Window::vecnat_range(-1, 1, 0, 2),
            ),
        ];
        for (p, w) in cases {
            let pts = sample_box(&w, -2, 2);
            let r = coeff_closed_form_crosscheck(&p, &all_pairs(&pts)).unwrap();
            assert!(r.passed(), "{:?}", r.failures.first());
        }
    }

    #[test]
    fn closed_form_detects_mismatch() {
        // The CL1 closed form with c = 1 against the algebra built with c = 2.
        let p = FamilyParams { c: s("2"), ..FamilyParams::new(FamilyKind::CL1) };
        let ca = make_family(&p).unwrap().conformal();
        let form = ClosedForm::CL1 { c: s("1") };
        let (x, y) = ((BasisIndex::Int(0), 0), (BasisIndex::Int(2), 0));
        let diff = &coeff_bracket(&ca, &x.0, 0, &y.0, 0).unwrap() - &form.bracket(&p.delta, &x, &y);
        assert_eq!(diff.to_string(), "2·L_{2}[0]");
        assert!(ClosedForm::from_params(&FamilyParams::new(FamilyKind::Vir)).is_err());
    }

    #[test]
    fn random_sampling_is_seeded() {
        let pts = sample_box(&Window::int_range(-1, 5), -3, 3);
        assert_eq!(random_triples(&pts, 10, 7), random_triples(&pts, 10, 7));
        assert_ne!(random_triples(&pts, 10, 7), random_triples(&pts, 10, 8));
        assert!(random_triples(&[], 3, 1).is_empty());
    }
}
