//! Quadratic Lie conformal algebras `R = ℂ[∂]V` built from GD data.
//!
//! Elements of `R` are [`PolyElement`]s (finite sums `c·∂^m x`). A λ-bracket
//! value is a [`BracketPoly`]: a polynomial in the formal variables λ, μ whose
//! coefficients are `PolyElement`s, so ∂ always lives inside the coefficient.
//! Brackets of arbitrary elements are obtained from the basis brackets by
//! conformal sesquilinearity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::basis::{parse_terms, write_term, BasisIndex, Element};
use crate::error::{Error, Result};
use crate::gd::GdStructure;
use crate::report::Report;
use crate::scalar::{binomial, factorial, Scalar};
use crate::window::Window;

/// `Σ c · ∂^dpow x`, a vector of the free ℂ[∂]-module on the basis.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PolyElement {
    terms: BTreeMap<(BasisIndex, u32), Scalar>,
}

impl PolyElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(coeff: Scalar, idx: BasisIndex, dpow: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(idx, dpow, &coeff);
        p
    }

    pub fn basis(idx: BasisIndex) -> Self {
        Self::term(Scalar::one(), idx, 0)
    }

    pub fn from_element(e: &Element) -> Self {
        Self::from_element_at(e, 0)
    }

    /// `∂^dpow e`.
    pub fn from_element_at(e: &Element, dpow: u32) -> Self {
        let mut p = Self::zero();
        for (idx, c) in e.iter() {
            p.add_term(idx.clone(), dpow, c);
        }
        p
    }

    pub fn add_term(&mut self, idx: BasisIndex, dpow: u32, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        let key = (idx, dpow);
        let remove = {
            let slot = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
            *slot += coeff;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &PolyElement, factor: &Scalar) {
        if factor.is_zero() {
            return;
        }
        for ((idx, d), c) in &other.terms {
            self.add_term(idx.clone(), *d, &(c * factor));
        }
    }

    /// Adds `factor · ∂^shift · other`.
    pub fn add_derived(&mut self, other: &PolyElement, shift: u32, factor: &Scalar) {
        if factor.is_zero() {
            return;
        }
        for ((idx, d), c) in &other.terms {
            self.add_term(idx.clone(), d + shift, &(c * factor));
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> PolyElement {
        let mut p = PolyElement::zero();
        p.add_scaled(self, factor);
        p
    }

    /// `∂^k · self`.
    pub fn derive(&self, k: u32) -> PolyElement {
        let mut p = PolyElement::zero();
        p.add_derived(self, k, &Scalar::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, u32, &Scalar)> {
        self.terms.iter().map(|((i, d), c)| (i, *d, c))
    }

    pub fn coeff(&self, idx: &BasisIndex, dpow: u32) -> Scalar {
        self.terms.get(&(idx.clone(), dpow)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn max_dpow(&self) -> Option<u32> {
        self.terms.keys().map(|(_, d)| *d).max()
    }

    /// The ∂-free part, when there is no ∂ at all.
    pub fn as_element(&self) -> Option<Element> {
        if self.terms.keys().any(|(_, d)| *d > 0) {
            return None;
        }
        Some(self.terms.iter().map(|((i, _), c)| (i.clone(), c.clone())).collect())
    }
}

impl std::ops::Add<&PolyElement> for &PolyElement {
    type Output = PolyElement;
    fn add(self, rhs: &PolyElement) -> PolyElement {
        let mut p = self.clone();
        p.add_scaled(rhs, &Scalar::one());
        p
    }
}

impl std::ops::Sub<&PolyElement> for &PolyElement {
    type Output = PolyElement;
    fn sub(self, rhs: &PolyElement) -> PolyElement {
        let mut p = self.clone();
        p.add_scaled(rhs, &-Scalar::one());
        p
    }
}

fn dpow_prefix(d: u32) -> String {
    match d {
        0 => String::new(),
        1 => "∂ ".to_string(),
        d => format!("∂^{d} "),
    }
}

impl fmt::Display for PolyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((idx, d), c)) in self.terms.iter().enumerate() {
            write_term(f, k == 0, c, &format!("{}{}", dpow_prefix(*d), idx))?;
        }
        Ok(())
    }
}

impl fmt::Debug for PolyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for PolyElement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = PolyElement::zero();
        for (c, d, idx) in parse_terms(s)? {
            p.add_term(idx, d, &c);
        }
        Ok(p)
    }
}

/// Formal bracket variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Lambda,
    Mu,
}

impl Var {
    fn symbol(self) -> &'static str {
        match self {
            Var::Lambda => "λ",
            Var::Mu => "μ",
        }
    }
}

/// A polynomial in λ and μ with [`PolyElement`] coefficients, keyed by the
/// exponent pair `(λ-power, μ-power)`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BracketPoly {
    vars: Vec<Var>,
    terms: BTreeMap<(u32, u32), PolyElement>,
}

impl BracketPoly {
    pub fn zero(vars: &[Var]) -> Self {
        BracketPoly { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    fn add_at(&mut self, exps: (u32, u32), p: &PolyElement, factor: &Scalar) {
        if p.is_zero() || factor.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps).or_default();
        slot.add_scaled(p, factor);
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `λ^i μ^j`.
    pub fn coeff(&self, lambda: u32, mu: u32) -> PolyElement {
        self.terms.get(&(lambda, mu)).cloned().unwrap_or_default()
    }

    /// Coefficient of `var^k` in a single-variable polynomial.
    pub fn coeff_of(&self, var: Var, k: u32) -> PolyElement {
        match var {
            Var::Lambda => self.coeff(k, 0),
            Var::Mu => self.coeff(0, k),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), &PolyElement)> {
        self.terms.iter().map(|(e, p)| (*e, p))
    }

    /// Every nonzero coefficient, in canonical exponent order.
    pub fn coefficients(&self) -> impl Iterator<Item = &PolyElement> {
        self.terms.values()
    }

    pub fn degree_in(&self, var: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|(l, m)| match var {
                Var::Lambda => *l,
                Var::Mu => *m,
            })
            .max()
    }

    /// Largest ∂-power among all coefficients.
    pub fn dpow_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(PolyElement::max_dpow).max()
    }

    fn from_uni(var: Var, coeffs: &[PolyElement]) -> BracketPoly {
        let mut b = BracketPoly::zero(&[var]);
        for (k, p) in coeffs.iter().enumerate() {
            b.add_at(exps_for(var, k as u32), p, &Scalar::one());
        }
        b
    }
}

fn exps_for(var: Var, k: u32) -> (u32, u32) {
    match var {
        Var::Lambda => (k, 0),
        Var::Mu => (0, k),
    }
}

impl fmt::Display for BracketPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((l, m), p) in &self.terms {
            let mut vars = String::new();
            for (var, e) in [(Var::Lambda, *l), (Var::Mu, *m)] {
                match e {
                    0 => {}
                    1 => vars.push_str(&format!("{} ", var.symbol())),
                    e => vars.push_str(&format!("{}^{e} ", var.symbol())),
                }
            }
            for (idx, d, c) in p.iter() {
                write_term(f, first, c, &format!("{vars}{}{idx}", dpow_prefix(d)))?;
                first = false;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BracketPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `[a_λ b] = ∂u + λv + w` on a basis pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuadraticBracket {
    pub u: Element,
    pub v: Element,
    pub w: Element,
}

impl QuadraticBracket {
    /// Coefficients of λ⁰ and λ¹.
    fn as_uni(&self) -> [PolyElement; 2] {
        let mut c0 = PolyElement::from_element_at(&self.u, 1);
        c0.add_scaled(&PolyElement::from_element(&self.w), &Scalar::one());
        [c0, PolyElement::from_element(&self.v)]
    }
}

/// Basis λ-bracket rule of a quadratic conformal algebra.
pub trait QuadraticRule: Send + Sync {
    fn bracket(&self, a: &BasisIndex, b: &BasisIndex) -> QuadraticBracket;
    fn description(&self) -> String;
}

/// `[a_λ b] = ∂(b∘a) + [b,a] + λ(a∗b)`.
struct FromGd(GdStructure);

impl QuadraticRule for FromGd {
    fn bracket(&self, a: &BasisIndex, b: &BasisIndex) -> QuadraticBracket {
        QuadraticBracket {
            u: self.0.novikov_basis(b, a),
            v: self.0.star_basis(a, b),
            w: self.0.lie_basis(b, a),
        }
    }
    fn description(&self) -> String {
        format!("R({})", self.0.description())
    }
}

/// A quadratic Lie conformal algebra on the free ℂ[∂]-module over the basis
/// of `gd`.
#[derive(Clone)]
pub struct ConformalAlgebra {
    gd: GdStructure,
    rule: Arc<dyn QuadraticRule>,
    label: Option<String>,
}

impl fmt::Debug for ConformalAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConformalAlgebra({})", self.description())
    }
}

/// The quadratic conformal algebra attached to a GD structure. The GD axioms
/// are not re-verified here.
pub fn quadratic_from_gd(gd: &GdStructure) -> ConformalAlgebra {
    ConformalAlgebra { gd: gd.clone(), rule: Arc::new(FromGd(gd.clone())), label: None }
}

impl ConformalAlgebra {
    /// An algebra on the basis of `gd` with an arbitrary quadratic rule.
    pub fn with_rule<R: QuadraticRule + 'static>(gd: &GdStructure, rule: R) -> Self {
        ConformalAlgebra { gd: gd.clone(), rule: Arc::new(rule), label: None }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn gd(&self) -> &GdStructure {
        &self.gd
    }

    pub fn description(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.rule.description())
    }

    pub fn basis_bracket(&self, a: &BasisIndex, b: &BasisIndex) -> QuadraticBracket {
        self.rule.bracket(a, b)
    }

    pub fn check_poly(&self, p: &PolyElement) -> Result<()> {
        p.iter().try_for_each(|(i, _, _)| self.gd.check_index(i))
    }

    /// `[P_var Q]` as a polynomial in `var`.
    pub fn lambda_bracket(&self, p: &PolyElement, q: &PolyElement, var: Var) -> Result<BracketPoly> {
        self.check_poly(p)?;
        self.check_poly(q)?;
        let mut engine = Engine::new(self);
        Ok(BracketPoly::from_uni(var, &engine.bracket(p, q)))
    }

    /// `P_(n) Q`: `n!` times the λⁿ coefficient of `[P_λ Q]`.
    pub fn nth_product(&self, p: &PolyElement, q: &PolyElement, n: u32) -> Result<PolyElement> {
        let b = self.lambda_bracket(p, q, Var::Lambda)?;
        Ok(b.coeff(n, 0).scaled(&Scalar::from_bigint(factorial(n as u64))))
    }
}

fn sign(k: u32) -> Scalar {
    if k.is_multiple_of(2) {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

fn binom(n: u32, k: u32) -> Scalar {
    Scalar::from_bigint(binomial(n as i64, k as i64))
}

/// Bracket evaluation with memoized basis brackets.
pub(crate) struct Engine<'a> {
    ca: &'a ConformalAlgebra,
    cache: HashMap<(BasisIndex, BasisIndex), Arc<[PolyElement; 2]>>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(ca: &'a ConformalAlgebra) -> Self {
        Engine { ca, cache: HashMap::new() }
    }

    fn basis(&mut self, a: &BasisIndex, b: &BasisIndex) -> Arc<[PolyElement; 2]> {
        if let Some(v) = self.cache.get(&(a.clone(), b.clone())) {
            return v.clone();
        }
        let v = Arc::new(self.ca.basis_bracket(a, b).as_uni());
        self.cache.insert((a.clone(), b.clone()), v.clone());
        v
    }

    /// Coefficients (by power of the bracket variable) of `[P_x Q]`.
    ///
    /// `[∂^m a_x ∂^n b] = (−x)^m (x+∂)^n [a_x b]`.
    pub(crate) fn bracket(&mut self, p: &PolyElement, q: &PolyElement) -> Vec<PolyElement> {
        let mut out: Vec<PolyElement> = Vec::new();
        for (a, m, ca) in p.iter() {
            for (b, n, cb) in q.iter() {
                let base = self.basis(a, b);
                let coeff = &(ca * cb) * &sign(m);
                for (k, term) in base.iter().enumerate() {
                    if term.is_zero() {
                        continue;
                    }
                    // x^(k+m) · (x+∂)^n = Σ_t C(n,t) x^(k+m+n−t) ∂^t
                    for t in 0..=n {
                        let power = k + m as usize + (n - t) as usize;
                        if out.len() <= power {
                            out.resize(power + 1, PolyElement::zero());
                        }
                        out[power].add_derived(term, t, &(&coeff * &binom(n, t)));
                    }
                }
            }
        }
        while out.last().is_some_and(PolyElement::is_zero) {
            out.pop();
        }
        out
    }

    /// `[a_λ b] + [b_{−λ−∂} a]`, which vanishes by skew-symmetry.
    pub(crate) fn skew_residual(&mut self, a: &PolyElement, b: &PolyElement) -> BracketPoly {
        let mut res = BracketPoly::from_uni(Var::Lambda, &self.bracket(a, b));
        // (−λ−∂)^k Q = (−1)^k Σ_t C(k,t) λ^(k−t) ∂^t Q
        for (k, qk) in self.bracket(b, a).iter().enumerate() {
            let k = k as u32;
            for t in 0..=k {
                let mut shifted = PolyElement::zero();
                shifted.add_derived(qk, t, &(&sign(k) * &binom(k, t)));
                res.add_at((k - t, 0), &shifted, &Scalar::one());
            }
        }
        res
    }

    /// `[a_λ[b_μ c]] − [[a_λ b]_{λ+μ} c] − [b_μ[a_λ c]]`.
    pub(crate) fn jacobi_residual(&mut self, a: &PolyElement, b: &PolyElement, c: &PolyElement) -> BracketPoly {
        let mut res = BracketPoly::zero(&[Var::Lambda, Var::Mu]);
        let one = Scalar::one();
        let minus = -Scalar::one();
        for (k, q) in self.bracket(b, c).iter().enumerate() {
            for (j, r) in self.bracket(a, q).iter().enumerate() {
                res.add_at((j as u32, k as u32), r, &one);
            }
        }
        for (k, q) in self.bracket(a, b).iter().enumerate() {
            for (m, s) in self.bracket(q, c).iter().enumerate() {
                let m = m as u32;
                for t in 0..=m {
                    res.add_at((k as u32 + t, m - t), s, &(&minus * &binom(m, t)));
                }
            }
        }
        for (k, q) in self.bracket(a, c).iter().enumerate() {
            for (m, t) in self.bracket(b, q).iter().enumerate() {
                res.add_at((k as u32, m as u32), t, &minus);
            }
        }
        res
    }
}

/// Skew-symmetry on all ordered pairs and the Jacobi identity on all ordered
/// triples of basis vectors in `w`, as exact polynomial identities in λ, μ, ∂.
pub fn check_conformal_axioms(ca: &ConformalAlgebra, w: &Window) -> Result<Report> {
    ca.gd.check_window(w)?;
    let mut report = Report::new("conformal-axioms", w).param("algebra", ca.description());
    let basis: Vec<PolyElement> = w.iter().map(|i| PolyElement::basis(i.clone())).collect();
    let mut engine = Engine::new(ca);
    let mut n = 0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            n += 1;
            let r = engine.skew_residual(a, b);
            if !r.is_zero() {
                report.fail("skew-symmetry", vec![w.indices()[i].to_string(), w.indices()[j].to_string()], r);
            }
        }
    }
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            for (k, c) in basis.iter().enumerate() {
                n += 1;
                let r = engine.jacobi_residual(a, b, c);
                if !r.is_zero() {
                    let idx = w.indices();
                    report.fail("jacobi", vec![idx[i].to_string(), idx[j].to_string(), idx[k].to_string()], r);
                }
            }
        }
    }
    Ok(report.finish(n, "pairs and triples"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{a1, vir};

    fn p(s: &str) -> PolyElement {
        s.parse().unwrap()
    }

    #[test]
    fn vir_bracket() {
        let v = quadratic_from_gd(&vir());
        let b = v.lambda_bracket(&p("L"), &p("L"), Var::Lambda).unwrap();
        assert_eq!(b.to_string(), "∂ L + 2·λ L");
        assert_eq!(b.coeff(0, 0), p("∂ L"));
        assert_eq!(b.coeff(1, 0), p("2 L"));
    }

    #[test]
    fn sesquilinearity_examples() {
        let v = quadratic_from_gd(&vir());
        // [∂L_λ L] = −λ(∂+2λ)L
        let b = v.lambda_bracket(&p("∂ L"), &p("L"), Var::Lambda).unwrap();
        assert_eq!(b.coeff(1, 0), p("-1 ∂ L"));
        assert_eq!(b.coeff(2, 0), p("-2 L"));
        assert_eq!(b.degree_in(Var::Lambda), Some(2));
        // [L_λ ∂L] = (λ+∂)(∂+2λ)L = ∂²L + 3λ∂L + 2λ²L
        let b = v.lambda_bracket(&p("L"), &p("∂ L"), Var::Lambda).unwrap();
        assert_eq!(b.coeff(0, 0), p("∂^2 L"));
        assert_eq!(b.coeff(1, 0), p("3 ∂ L"));
        assert_eq!(b.coeff(2, 0), p("2 L"));
        assert!(v.lambda_bracket(&PolyElement::zero(), &p("L"), Var::Lambda).unwrap().is_zero());
        // μ as the bracket variable
        let b = v.lambda_bracket(&p("L"), &p("L"), Var::Mu).unwrap();
        assert_eq!(b.coeff_of(Var::Mu, 1), p("2 L"));
    }

    #[test]
    fn nth_products() {
        let v = quadratic_from_gd(&vir());
        assert_eq!(v.nth_product(&p("L"), &p("L"), 0).unwrap(), p("∂ L"));
        assert_eq!(v.nth_product(&p("L"), &p("L"), 1).unwrap(), p("2 L"));
        assert!(v.nth_product(&p("L"), &p("L"), 2).unwrap().is_zero());
        let cl1 = quadratic_from_gd(&a1(Scalar::from_int(3)));
        for (i, j) in [(-1, 2), (0, 0), (2, 3)] {
            let (li, lj) = (PolyElement::basis(BasisIndex::Int(i)), PolyElement::basis(BasisIndex::Int(j)));
            let expect = PolyElement::term(Scalar::from_int(i + j + 2), BasisIndex::Int(i + j), 0);
            assert_eq!(cl1.nth_product(&li, &lj, 1).unwrap(), expect);
            assert!(cl1.nth_product(&li, &lj, 2).unwrap().is_zero());
        }
    }

    #[test]
    fn cl1_basis_bracket_matches_closed_form() {
        let c = Scalar::from_int(-3);
        let cl1 = quadratic_from_gd(&a1(c.clone()));
        for i in -1..4 {
            for j in -1..4 {
                let b = cl1
                    .lambda_bracket(&PolyElement::basis(BasisIndex::Int(i)), &PolyElement::basis(BasisIndex::Int(j)), Var::Lambda)
                    .unwrap();
                let mut expect = PolyElement::term(Scalar::from_int(i + 1), BasisIndex::Int(i + j), 1);
                expect.add_term(BasisIndex::Int(i + j), 0, &(&c * &Scalar::from_int(j - i)));
                if i + j < -1 {
                    expect = PolyElement::zero();
                }
                assert_eq!(b.coeff(0, 0), expect, "({i},{j})");
                assert_eq!(b.coeff(1, 0), PolyElement::from_element(&Element::from_terms([(BasisIndex::Int(i + j), Scalar::from_int(i + j + 2))])));
            }
        }
    }

    #[test]
    fn poly_element_parse_and_render() {
        let e = p("2·∂^2·L_{0} - 1/2 ∂ L_{1} + L_{-1}");
        assert_eq!(e.to_string(), "L_{-1} + 2·∂^2 L_{0} - 1/2·∂ L_{1}");
        assert_eq!(e.to_string().parse::<PolyElement>().unwrap(), e);
        assert_eq!(e.max_dpow(), Some(2));
        assert_eq!(e.derive(1).max_dpow(), Some(3));
    }
}
