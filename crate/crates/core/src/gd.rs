//! Gel'fand-Dorfman structures: a Novikov product and a Lie bracket on an
//! indexed basis, the derived commutative product `a∗b = a∘b + b∘a`, and
//! exact window checkers for the defining identities.

use std::fmt;
use std::sync::Arc;

use crate::basis::{BasisIndex, Element};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalar::Scalar;
use crate::window::{IndexKind, Window};

/// Closed-form structure constants on basis pairs. Implementations must be
/// total on valid indices and may only emit invalid labels with zero
/// coefficient (those terms are discarded by [`Element::from_terms`]).
pub trait StructureRules: Send + Sync {
    fn index_kind(&self) -> IndexKind;
    fn is_valid(&self, idx: &BasisIndex) -> bool;
    /// `a ∘ b`.
    fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element;
    /// `[a, b]`.
    fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element;
    fn description(&self) -> String;
}

/// A GD structure `(V, ∘, [·,·])`: immutable and cheap to clone.
#[derive(Clone)]
pub struct GdStructure {
    rules: Arc<dyn StructureRules>,
}

impl fmt::Debug for GdStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GdStructure({})", self.rules.description())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Product {
    Novikov,
    Lie,
    Star,
}

impl GdStructure {
    pub fn new<R: StructureRules + 'static>(rules: R) -> Self {
        GdStructure { rules: Arc::new(rules) }
    }

    pub fn from_arc(rules: Arc<dyn StructureRules>) -> Self {
        GdStructure { rules }
    }

    pub fn rules(&self) -> &Arc<dyn StructureRules> {
        &self.rules
    }

    pub fn description(&self) -> String {
        self.rules.description()
    }

    pub fn index_kind(&self) -> IndexKind {
        self.rules.index_kind()
    }

    pub fn is_valid(&self, idx: &BasisIndex) -> bool {
        self.rules.index_kind().matches(idx) && self.rules.is_valid(idx)
    }

    pub fn check_index(&self, idx: &BasisIndex) -> Result<()> {
        if self.is_valid(idx) {
            Ok(())
        } else {
            Err(Error::InvalidIndex(idx.to_string()))
        }
    }

    pub fn check_element(&self, x: &Element) -> Result<()> {
        x.support().try_for_each(|i| self.check_index(i))
    }

    pub fn check_window(&self, w: &Window) -> Result<()> {
        w.iter().try_for_each(|i| self.check_index(i))
    }

    pub(crate) fn novikov_basis(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        self.rules.novikov(a, b)
    }

    pub(crate) fn lie_basis(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        self.rules.lie(a, b)
    }

    pub(crate) fn star_basis(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        &self.rules.novikov(a, b) + &self.rules.novikov(b, a)
    }

    fn basis_product(&self, which: Product, a: &BasisIndex, b: &BasisIndex) -> Element {
        match which {
            Product::Novikov => self.novikov_basis(a, b),
            Product::Lie => self.lie_basis(a, b),
            Product::Star => self.star_basis(a, b),
        }
    }

    /// Bilinear extension without input validation.
    fn product(&self, which: Product, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                out.add_scaled(&self.basis_product(which, a, b), &(ca * cb));
            }
        }
        out
    }

    fn checked_product(&self, which: Product, x: &Element, y: &Element) -> Result<Element> {
        self.check_element(x)?;
        self.check_element(y)?;
        let out = self.product(which, x, y);
        self.check_element(&out)?;
        Ok(out)
    }

    pub fn novikov_product(&self, x: &Element, y: &Element) -> Result<Element> {
        self.checked_product(Product::Novikov, x, y)
    }

    pub fn lie_bracket(&self, x: &Element, y: &Element) -> Result<Element> {
        self.checked_product(Product::Lie, x, y)
    }

    pub fn star_product(&self, x: &Element, y: &Element) -> Result<Element> {
        self.checked_product(Product::Star, x, y)
    }

    pub(crate) fn novikov_unchecked(&self, x: &Element, y: &Element) -> Element {
        self.product(Product::Novikov, x, y)
    }

    pub(crate) fn lie_unchecked(&self, x: &Element, y: &Element) -> Element {
        self.product(Product::Lie, x, y)
    }

    pub(crate) fn star_unchecked(&self, x: &Element, y: &Element) -> Element {
        self.product(Product::Star, x, y)
    }
}

fn labels(idx: &[&BasisIndex]) -> Vec<String> {
    idx.iter().map(|i| i.to_string()).collect()
}

fn triples(w: &Window) -> impl Iterator<Item = (&BasisIndex, &BasisIndex, &BasisIndex)> {
    w.iter().flat_map(move |a| w.iter().flat_map(move |b| w.iter().map(move |c| (a, b, c))))
}

fn new_report(gd: &GdStructure, check: &str, w: &Window) -> Report {
    Report::new(check, w).param("algebra", gd.description())
}

/// Left symmetry of the associator and right commutativity on every
/// ordered triple of `w`.
pub fn check_novikov_axioms(gd: &GdStructure, w: &Window) -> Result<Report> {
    gd.check_window(w)?;
    let mut report = new_report(gd, "novikov-axioms", w);
    let mut n = 0;
    for (a, b, c) in triples(w) {
        n += 1;
        let (ea, eb, ec) = (Element::basis(a.clone()), Element::basis(b.clone()), Element::basis(c.clone()));
        let ab = gd.novikov_unchecked(&ea, &eb);
        let ba = gd.novikov_unchecked(&eb, &ea);
        let bc = gd.novikov_unchecked(&eb, &ec);
        let ac = gd.novikov_unchecked(&ea, &ec);
        let ab_c = gd.novikov_unchecked(&ab, &ec);
        let lhs = &ab_c - &gd.novikov_unchecked(&ea, &bc);
        let rhs = &gd.novikov_unchecked(&ba, &ec) - &gd.novikov_unchecked(&eb, &ac);
        let residual = &lhs - &rhs;
        if !residual.is_zero() {
            report.fail("left-symmetry", labels(&[a, b, c]), residual);
        }
        let residual = &ab_c - &gd.novikov_unchecked(&ac, &eb);
        if !residual.is_zero() {
            report.fail("right-commutativity", labels(&[a, b, c]), residual);
        }
    }
    Ok(report.finish(n, "triples"))
}

/// Skew-symmetry on pairs and the Jacobi identity on triples of `w`.
pub fn check_lie_axioms(gd: &GdStructure, w: &Window) -> Result<Report> {
    gd.check_window(w)?;
    let mut report = new_report(gd, "lie-axioms", w);
    let mut n = 0;
    for a in w {
        for b in w {
            n += 1;
            let residual = &gd.lie_basis(a, b) + &gd.lie_basis(b, a);
            if !residual.is_zero() {
                report.fail("skew-symmetry", labels(&[a, b]), residual);
            }
        }
    }
    for (a, b, c) in triples(w) {
        n += 1;
        let (ea, eb, ec) = (Element::basis(a.clone()), Element::basis(b.clone()), Element::basis(c.clone()));
        let mut residual = gd.lie_unchecked(&ea, &gd.lie_basis(b, c));
        residual.add_scaled(&gd.lie_unchecked(&eb, &gd.lie_basis(c, a)), &Scalar::one());
        residual.add_scaled(&gd.lie_unchecked(&ec, &gd.lie_basis(a, b)), &Scalar::one());
        if !residual.is_zero() {
            report.fail("jacobi", labels(&[a, b, c]), residual);
        }
    }
    Ok(report.finish(n, "pairs and triples"))
}

/// `[a∘b, c] − [a∘c, b] + [a,b]∘c − [a,c]∘b − a∘[b,c] = 0` on every ordered triple.
pub fn check_gd_compatibility(gd: &GdStructure, w: &Window) -> Result<Report> {
    gd.check_window(w)?;
    let mut report = new_report(gd, "gd-compatibility", w);
    let mut n = 0;
    for (a, b, c) in triples(w) {
        n += 1;
        let (ea, eb, ec) = (Element::basis(a.clone()), Element::basis(b.clone()), Element::basis(c.clone()));
        let mut r = gd.lie_unchecked(&gd.novikov_basis(a, b), &ec);
        r.add_scaled(&gd.lie_unchecked(&gd.novikov_basis(a, c), &eb), &-Scalar::one());
        r.add_scaled(&gd.novikov_unchecked(&gd.lie_basis(a, b), &ec), &Scalar::one());
        r.add_scaled(&gd.novikov_unchecked(&gd.lie_basis(a, c), &eb), &-Scalar::one());
        r.add_scaled(&gd.novikov_unchecked(&ea, &gd.lie_basis(b, c)), &-Scalar::one());
        if !r.is_zero() {
            report.fail("compatibility", labels(&[a, b, c]), r);
        }
    }
    Ok(report.finish(n, "triples"))
}

/// Which left-hand side of the four-variable identity for `∗` to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TortkenVariant {
    /// `(a∗b)∗(c∗d) − (a∗d)∗(c∗d)`, with the repeated factor `c∗d`.
    Printed,
    /// `(a∗b)∗(c∗d) − (a∗d)∗(c∗b)`.
    Corrected,
}

impl TortkenVariant {
    pub fn name(self) -> &'static str {
        match self {
            TortkenVariant::Printed => "printed",
            TortkenVariant::Corrected => "corrected",
        }
    }
}

impl std::str::FromStr for TortkenVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(TortkenVariant::Printed),
            "corrected" => Ok(TortkenVariant::Corrected),
            _ => Err(Error::Parse(format!("unknown Tortken variant {s:?} (printed|corrected)"))),
        }
    }
}

/// Checks `LHS = (a,b,c)∗d − (a,d,c)∗b` on every 4-tuple of `w`, where
/// `(a,b,c) = a∗(b∗c) − (a∗b)∗c`.
pub fn check_tortken(gd: &GdStructure, w: &Window, variant: TortkenVariant) -> Result<Report> {
    gd.check_window(w)?;
    let mut report = new_report(gd, "tortken", w).param("variant", variant.name());
    let star = |x: &Element, y: &Element| gd.star_unchecked(x, y);
    let assoc = |a: &Element, b: &Element, c: &Element| &star(a, &star(b, c)) - &star(&star(a, b), c);
    let basis: Vec<Element> = w.iter().map(|i| Element::basis(i.clone())).collect();
    let mut n = 0;
    for (ia, a) in basis.iter().enumerate() {
        for (ib, b) in basis.iter().enumerate() {
            for (ic, c) in basis.iter().enumerate() {
                for (id, d) in basis.iter().enumerate() {
                    n += 1;
                    let cd = star(c, d);
                    let second = match variant {
                        TortkenVariant::Printed => star(&star(a, d), &cd),
                        TortkenVariant::Corrected => star(&star(a, d), &star(c, b)),
                    };
                    let lhs = &star(&star(a, b), &cd) - &second;
                    let rhs = &star(&assoc(a, b, c), d) - &star(&assoc(a, d, c), b);
                    let residual = &lhs - &rhs;
                    if !residual.is_zero() {
                        let idx = w.indices();
                        report.fail(
                            "tortken",
                            labels(&[&idx[ia], &idx[ib], &idx[ic], &idx[id]]),
                            residual,
                        );
                    }
                }
            }
        }
    }
    Ok(report.finish(n, "4-tuples"))
}

/// `(V, ∘)` with the bracket replaced by `[a,b] = k(a∘b − b∘a)`.
struct CommutatorBracket {
    base: Arc<dyn StructureRules>,
    k: Scalar,
}

impl StructureRules for CommutatorBracket {
    fn index_kind(&self) -> IndexKind {
        self.base.index_kind()
    }
    fn is_valid(&self, idx: &BasisIndex) -> bool {
        self.base.is_valid(idx)
    }
    fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        self.base.novikov(a, b)
    }
    fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        (&self.base.novikov(a, b) - &self.base.novikov(b, a)).scaled(&self.k)
    }
    fn description(&self) -> String {
        format!("{} with bracket k(a∘b-b∘a), k={}", self.base.description(), self.k)
    }
}

/// GD structure on the Novikov algebra of `novikov` (its own bracket is
/// ignored) with the commutator bracket scaled by `k`.
pub fn gd_from_novikov(novikov: &GdStructure, k: Scalar) -> GdStructure {
    GdStructure::new(CommutatorBracket { base: novikov.rules.clone(), k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{a1, a2, a3, GroupHom};
    use crate::delta::{DeltaGroup, DeltaVector};

    fn l(i: i64) -> Element {
        Element::basis(BasisIndex::Int(i))
    }

    fn x(a: i64) -> Element {
        Element::basis(BasisIndex::Vec(DeltaVector(vec![a])))
    }

    fn xn(a: i64, n: u32) -> Element {
        Element::basis(BasisIndex::VecNat(DeltaVector(vec![a]), n))
    }

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    /// A1 Novikov product with the coefficient shifted to (j+2).
    struct ShiftedA1;
    impl StructureRules for ShiftedA1 {
        fn index_kind(&self) -> IndexKind {
            IndexKind::Int
        }
        fn is_valid(&self, idx: &BasisIndex) -> bool {
            matches!(idx, BasisIndex::Int(i) if *i >= -1)
        }
        fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
            let (BasisIndex::Int(i), BasisIndex::Int(j)) = (a, b) else { unreachable!() };
            // (j+2)L_{i+j} is nonzero at i=j=-1, so keep the index valid
            if i + j < -1 {
                return Element::zero();
            }
            Element::term(Scalar::from_int(j + 2), BasisIndex::Int(i + j))
        }
        fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
            let (BasisIndex::Int(i), BasisIndex::Int(j)) = (a, b) else { unreachable!() };
            Element::term(Scalar::from_int(i - j), BasisIndex::Int(i + j))
        }
        fn description(&self) -> String {
            "A1 mutant".into()
        }
    }

    /// A1 with a chosen bracket rule.
    struct A1With(fn(i64, i64) -> Element);
    impl StructureRules for A1With {
        fn index_kind(&self) -> IndexKind {
            IndexKind::Int
        }
        fn is_valid(&self, idx: &BasisIndex) -> bool {
            matches!(idx, BasisIndex::Int(i) if *i >= -1)
        }
        fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
            let (BasisIndex::Int(i), BasisIndex::Int(j)) = (a, b) else { unreachable!() };
            Element::term(Scalar::from_int(j + 1), BasisIndex::Int(i + j))
        }
        fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
            let (BasisIndex::Int(i), BasisIndex::Int(j)) = (a, b) else { unreachable!() };
            (self.0)(*i, *j)
        }
        fn description(&self) -> String {
            "A1 with custom bracket".into()
        }
    }

    #[test]
    fn novikov_product_examples() {
        let a1 = a1(Scalar::zero());
        assert_eq!(a1.novikov_product(&l(1), &l(2)).unwrap(), l(3).scaled(&s("3")));
        assert!(a1.novikov_product(&l(0), &l(-1)).unwrap().is_zero());
        assert!(matches!(a1.novikov_product(&l(-2), &l(0)), Err(Error::InvalidIndex(_))));

        let a3 = a3(DeltaGroup::integers(), s("1/3"), GroupHom::zero(DeltaGroup::integers()), Scalar::zero())
            .unwrap();
        let expect = &xn(2, 3).scaled(&s("4/3")) + &xn(2, 2);
        assert_eq!(a3.novikov_product(&xn(1, 2), &xn(1, 1)).unwrap(), expect);
    }

    #[test]
    fn lie_bracket_examples() {
        let a1 = a1(s("1"));
        assert_eq!(a1.lie_bracket(&l(2), &l(0)).unwrap(), l(2).scaled(&s("2")));
        let g = DeltaGroup::integers();
        let a2 = a2(g.clone(), s("1/2"), GroupHom::new(g, vec![s("1")]).unwrap()).unwrap();
        assert_eq!(a2.lie_bracket(&x(1), &x(2)).unwrap(), x(3));
        for e in [l(3), &l(0) + &l(2).scaled(&s("1+i"))] {
            assert!(a1.lie_bracket(&e, &e).unwrap().is_zero());
        }
        assert!(a2.lie_bracket(&x(-3), &x(-3)).unwrap().is_zero());
    }

    #[test]
    fn star_product_examples() {
        let a1 = a1(Scalar::zero());
        assert_eq!(a1.star_product(&l(0), &l(0)).unwrap(), l(0).scaled(&s("2")));
        assert!(a1.star_product(&l(-1), &l(-1)).unwrap().is_zero());
        let a3 = a3(DeltaGroup::integers(), s("1/3"), GroupHom::zero(DeltaGroup::integers()), Scalar::zero())
            .unwrap();
        let expect = &xn(0, 2).scaled(&s("2/3")) + &xn(0, 1).scaled(&s("2"));
        assert_eq!(a3.star_product(&xn(0, 1), &xn(0, 1)).unwrap(), expect);
    }

    #[test]
    fn novikov_checker_passes_and_catches_mutant() {
        let w = Window::int_range(-1, 6);
        assert!(check_novikov_axioms(&a1(Scalar::zero()), &w).unwrap().passed());
        assert!(check_novikov_axioms(&a1(Scalar::zero()), &Window::empty()).unwrap().passed());

        // With (j+2), L_-1∘L_-1 would land on L_-2 and is cut off, so
        // right-commutativity breaks at (L_-1, L_-1, L_1):
        //   (L_-1∘L_-1)∘L_1 = 0,  (L_-1∘L_1)∘L_-1 = 3·L_0∘L_-1 = 3·L_-1.
        let r = check_novikov_axioms(&GdStructure::new(ShiftedA1), &w).unwrap();
        assert!(!r.passed());
        let f = r
            .failures
            .iter()
            .find(|f| f.label == "right-commutativity" && f.inputs == ["L_{-1}", "L_{-1}", "L_{1}"])
            .unwrap();
        assert_eq!(f.residual, "-3·L_{-1}");
    }

    #[test]
    fn lie_checker() {
        assert!(check_lie_axioms(&a1(s("2")), &Window::int_range(-1, 6)).unwrap().passed());
        // [L_i, L_j] = (i+j) L_{i+j} is symmetric: [L_0, L_1] + [L_1, L_0] = 2 L_1.
        let bad = GdStructure::new(A1With(|i, j| Element::term(Scalar::from_int(i + j), BasisIndex::Int(i + j))));
        let r = check_lie_axioms(&bad, &Window::int_range(-1, 3)).unwrap();
        let f = r.failures.iter().find(|f| f.label == "skew-symmetry" && f.inputs == ["L_{0}", "L_{1}"]).unwrap();
        assert_eq!(f.residual, "2·L_{1}");
    }

    #[test]
    fn gd_checker() {
        assert!(check_gd_compatibility(&a1(s("3")), &Window::int_range(-1, 6)).unwrap().passed());
        let g = DeltaGroup::integers();
        let a2 = a2(g.clone(), s("1/3"), GroupHom::zero(g)).unwrap();
        assert!(check_gd_compatibility(&a2, &Window::vec_range(-3, 3)).unwrap().passed());
        // [L_i, L_j] = L_{i+j}. At (L_0, L_0, L_1):
        // [L_0∘L_0, L_1] − [L_0∘L_1, L_0] + [L_0,L_0]∘L_1 − [L_0,L_1]∘L_0 − L_0∘[L_0,L_1]
        //   = L_1 − 2 L_1 + 2 L_1 − L_1 − 2 L_1 = −2 L_1.
        let bad = GdStructure::new(A1With(|i, j| Element::basis(BasisIndex::Int(i + j))));
        let r = check_gd_compatibility(&bad, &Window::int_range(-1, 6)).unwrap();
        let f = r.failures.iter().find(|f| f.inputs == ["L_{0}", "L_{0}", "L_{1}"]).unwrap();
        assert_eq!(f.residual, "-2·L_{1}");
    }

    #[test]
    fn gd_from_novikov_examples() {
        let gd = gd_from_novikov(&a1(Scalar::zero()), Scalar::one());
        for i in -1..4 {
            for j in -1..4 {
                let expect = if i + j >= -1 { l(i + j).scaled(&Scalar::from_int(j - i)) } else { Element::zero() };
                assert_eq!(gd.lie_bracket(&l(i), &l(j)).unwrap(), expect);
            }
        }
        let trivial = gd_from_novikov(&a1(s("5")), Scalar::zero());
        assert!(trivial.lie_bracket(&l(2), &l(1)).unwrap().is_zero());
    }

    #[test]
    fn empty_window_is_vacuous() {
        let a1 = a1(Scalar::one());
        for v in [TortkenVariant::Printed, TortkenVariant::Corrected] {
            assert!(check_tortken(&a1, &Window::empty(), v).unwrap().passed());
        }
        assert!(check_lie_axioms(&a1, &Window::empty()).unwrap().passed());
    }

    #[test]
    fn invalid_window_is_an_error() {
        let w = Window::new(vec![BasisIndex::Int(-2)]).unwrap();
        assert!(check_novikov_axioms(&a1(Scalar::zero()), &w).is_err());
    }
}
