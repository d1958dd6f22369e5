//! Built-in algebras: Vir, current algebras, the Novikov algebras A1, A2, A3
//! (and Osborn's binomial presentation of A3) with their Lie structures, and
//! the conformal families CL1, CL2, CL3 built from them.

use std::fmt;
use std::str::FromStr;

use crate::basis::{BasisIndex, Element};
use crate::conformal::{quadratic_from_gd, ConformalAlgebra};
use crate::delta::{DeltaGroup, DeltaVector};
use crate::error::{Error, Result};
use crate::gd::{gd_from_novikov, GdStructure, StructureRules};
use crate::report::Report;
use crate::scalar::{binomial, factorial, Scalar};
use crate::table::{sym, Table};
use crate::window::{IndexKind, Window};

/// A homomorphism φ: Δ → (ℂ, +), fixed by its values on the generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    delta: DeltaGroup,
    images: Vec<Scalar>,
}

impl GroupHom {
    pub fn new(delta: DeltaGroup, images: Vec<Scalar>) -> Result<Self> {
        if images.len() != delta.rank() {
            return Err(Error::RankMismatch { expected: delta.rank(), got: images.len() });
        }
        Ok(GroupHom { delta, images })
    }

    pub fn zero(delta: DeltaGroup) -> Self {
        let images = vec![Scalar::zero(); delta.rank()];
        GroupHom { delta, images }
    }

    pub fn delta(&self) -> &DeltaGroup {
        &self.delta
    }

    pub fn images(&self) -> &[Scalar] {
        &self.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Scalar::is_zero)
    }

    pub fn apply(&self, v: &DeltaVector) -> Scalar {
        let mut acc = Scalar::zero();
        for (c, g) in v.coords().iter().zip(&self.images) {
            acc += &(&Scalar::from_int(*c) * g);
        }
        acc
    }
}

impl fmt::Display for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|s| s.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// A skew-symmetric ℤ-bilinear form on Δ, given by its Gram matrix on the
/// generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewForm {
    delta: DeltaGroup,
    matrix: Vec<Vec<Scalar>>,
}

impl SkewForm {
    pub fn new(delta: DeltaGroup, matrix: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = delta.rank();
        if matrix.len() != r || matrix.iter().any(|row| row.len() != r) {
            return Err(Error::Invalid(format!("skew form needs a {r}x{r} matrix")));
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if *x != -&matrix[j][i] {
                    return Err(Error::Invalid(format!("form matrix is not skew-symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SkewForm { delta, matrix })
    }

    pub fn zero(delta: DeltaGroup) -> Self {
        let r = delta.rank();
        SkewForm { delta, matrix: vec![vec![Scalar::zero(); r]; r] }
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    pub fn apply(&self, u: &DeltaVector, v: &DeltaVector) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, ui) in u.coords().iter().enumerate() {
            for (j, vj) in v.coords().iter().enumerate() {
                if *ui != 0 && *vj != 0 {
                    acc += &(&Scalar::from_int(ui * vj) * &self.matrix[i][j]);
                }
            }
        }
        acc
    }
}

impl fmt::Display for SkewForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "{}", rows.join(";"))
    }
}

fn int_pair(a: &BasisIndex, b: &BasisIndex) -> (i64, i64) {
    match (a, b) {
        (BasisIndex::Int(i), BasisIndex::Int(j)) => (*i, *j),
        _ => panic!("expected integer indices, got {a}, {b}"),
    }
}

fn vec_pair<'a>(a: &'a BasisIndex, b: &'a BasisIndex) -> (&'a DeltaVector, &'a DeltaVector) {
    match (a, b) {
        (BasisIndex::Vec(u), BasisIndex::Vec(v)) => (u, v),
        _ => panic!("expected Δ-indices, got {a}, {b}"),
    }
}

fn vecnat_pair<'a>(a: &'a BasisIndex, b: &'a BasisIndex) -> (&'a DeltaVector, u32, &'a DeltaVector, u32) {
    match (a, b) {
        (BasisIndex::VecNat(u, i), BasisIndex::VecNat(v, j)) => (u, *i, v, *j),
        _ => panic!("expected (Δ, ℕ)-indices, got {a}, {b}"),
    }
}

/// `c₀·x_{γ,n} + c₁·x_{γ,n−1}`, skipping the second term at `n = 0`.
fn two_level(gamma: DeltaVector, n: u32, top: Scalar, below: Scalar) -> Element {
    let mut e = Element::term(top, BasisIndex::VecNat(gamma.clone(), n));
    if n > 0 {
        e.add_term(BasisIndex::VecNat(gamma, n - 1), &below);
    }
    e
}

struct A1 {
    c: Scalar,
}

impl StructureRules for A1 {
    fn index_kind(&self) -> IndexKind {
        IndexKind::Int
    }
    fn is_valid(&self, idx: &BasisIndex) -> bool {
        matches!(idx, BasisIndex::Int(i) if *i >= -1)
    }
    fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        let (i, j) = int_pair(a, b);
        Element::term(Scalar::from_int(j + 1), BasisIndex::Int(i + j))
    }
    fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        let (i, j) = int_pair(a, b);
        Element::term(&self.c * &Scalar::from_int(i - j), BasisIndex::Int(i + j))
    }
    fn description(&self) -> String {
        format!("A1(c={})", self.c)
    }
}

/// `(A1, ∘)` with `L_i∘L_j = (j+1)L_{i+j}` and `[L_i, L_j] = c(i−j)L_{i+j}`, `i, j ≥ −1`.
pub fn a1(c: Scalar) -> GdStructure {
    GdStructure::new(A1 { c })
}

struct A2 {
    delta: DeltaGroup,
    b: Scalar,
    phi: GroupHom,
}

impl StructureRules for A2 {
    fn index_kind(&self) -> IndexKind {
        IndexKind::Vec { rank: self.delta.rank() }
    }
    fn is_valid(&self, _: &BasisIndex) -> bool {
        true
    }
    fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        let (u, v) = vec_pair(a, b);
        let beta = self.delta.eval_unchecked(v);
        Element::term(&beta + &self.b, BasisIndex::Vec(u + v))
    }
    fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        if self.phi.is_zero() {
            return Element::zero();
        }
        let (u, v) = vec_pair(a, b);
        let (alpha, beta) = (self.delta.eval_unchecked(u), self.delta.eval_unchecked(v));
        let (pa, pb) = (self.phi.apply(u), self.phi.apply(v));
        // (1/b)(φ(β)α − φ(α)β + b(φ(β) − φ(α)))
        let inner = &(&(&pb * &alpha) - &(&pa * &beta)) + &(&self.b * &(&pb - &pa));
        Element::term(&inner / &self.b, BasisIndex::Vec(u + v))
    }
    fn description(&self) -> String {
        format!("A2(Δ={}, b={}, φ={})", self.delta, self.b, self.phi)
    }
}

fn require_b_not_in_delta(delta: &DeltaGroup, b: &Scalar, who: &str) -> Result<()> {
    if delta.contains(b) {
        return Err(Error::Hypothesis(format!("{who} with φ≠0 requires b∉Δ, but b={b}∈Δ")));
    }
    Ok(())
}

fn check_same_delta(delta: &DeltaGroup, phi: &GroupHom) -> Result<()> {
    if phi.delta() != delta {
        return Err(Error::Invalid("φ is defined on a different Δ".into()));
    }
    Ok(())
}

/// `(A2, ∘)` with `x_α∘x_β = (β+b)x_{α+β}` and the Lie structure attached to φ.
/// A nonzero φ needs `b ∉ Δ`.
pub fn a2(delta: DeltaGroup, b: Scalar, phi: GroupHom) -> Result<GdStructure> {
    check_same_delta(&delta, &phi)?;
    if !phi.is_zero() {
        require_b_not_in_delta(&delta, &b, "A2")?;
    }
    Ok(GdStructure::new(A2 { delta, b, phi }))
}

#[derive(Clone)]
enum A3Lie {
    Trivial,
    /// The `b ∉ Δ` family in φ and c.
    General { phi: GroupHom, c: Scalar },
    /// The displayed `b = 0` structure in a skew form ϕ and φ.
    Form { form: SkewForm, phi: GroupHom },
}

struct A3 {
    delta: DeltaGroup,
    b: Scalar,
    lie: A3Lie,
}

impl StructureRules for A3 {
    fn index_kind(&self) -> IndexKind {
        IndexKind::VecNat { rank: self.delta.rank() }
    }
    fn is_valid(&self, _: &BasisIndex) -> bool {
        true
    }
    fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        let (u, i, v, j) = vecnat_pair(a, b);
        let beta = self.delta.eval_unchecked(v);
        two_level(u + v, i + j, &beta + &self.b, Scalar::from_int(j as i64))
    }
    fn lie(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        let (u, i, v, j) = vecnat_pair(a, b);
        let (si, sj) = (Scalar::from_int(i as i64), Scalar::from_int(j as i64));
        match &self.lie {
            A3Lie::Trivial => Element::zero(),
            A3Lie::General { phi, c } => {
                let alpha_b = &self.delta.eval_unchecked(u) + &self.b;
                let beta_b = &self.delta.eval_unchecked(v) + &self.b;
                let (pa, pb) = (phi.apply(u), phi.apply(v));
                // (1/b)((α+b)φ(β) − (β+b)φ(α)) and
                // (1/b)[i(φ(β) − c(β+b)) + j(c(α+b) − φ(α))]
                let top = &(&alpha_b * &pb) - &(&beta_b * &pa);
                let below = &(&si * &(&pb - &(c * &beta_b))) + &(&sj * &(&(c * &alpha_b) - &pa));
                two_level(u + v, i + j, &top / &self.b, &below / &self.b)
            }
            A3Lie::Form { form, phi } => {
                let below = &(&si * &phi.apply(v)) - &(&sj * &phi.apply(u));
                two_level(u + v, i + j, form.apply(u, v), below)
            }
        }
    }
    fn description(&self) -> String {
        match &self.lie {
            A3Lie::Trivial => format!("A3(Δ={}, b={})", self.delta, self.b),
            A3Lie::General { phi, c } => format!("A3(Δ={}, b={}, φ={}, c={})", self.delta, self.b, phi, c),
            A3Lie::Form { form, phi } => format!("A3(Δ={}, b=0, ϕ={}, φ={})", self.delta, form, phi),
        }
    }
}

/// `(A3, ∘)` with `x_{α,i}∘x_{β,j} = (β+b)x_{α+β,i+j} + j·x_{α+β,i+j−1}` and
/// the Lie structure in (φ, c). The bracket divides by b, so it needs `b ≠ 0`
/// unless φ and c both vanish; a nonzero φ needs `b ∉ Δ`.
pub fn a3(delta: DeltaGroup, b: Scalar, phi: GroupHom, c: Scalar) -> Result<GdStructure> {
    check_same_delta(&delta, &phi)?;
    if phi.is_zero() && c.is_zero() {
        return Ok(a3_novikov(delta, b));
    }
    if b.is_zero() {
        return Err(Error::Hypothesis("this Lie structure over A3 requires b≠0".into()));
    }
    if !phi.is_zero() {
        require_b_not_in_delta(&delta, &b, "A3")?;
    }
    Ok(GdStructure::new(A3 { delta, b, lie: A3Lie::General { phi, c } }))
}

/// `(A3, ∘)` with the zero bracket.
pub fn a3_novikov(delta: DeltaGroup, b: Scalar) -> GdStructure {
    GdStructure::new(A3 { delta, b, lie: A3Lie::Trivial })
}

/// `(A3, ∘)` at `b = 0` with
/// `[x_{α,i}, x_{β,j}] = ϕ(α,β)x_{α+β,i+j} + (iφ(β) − jφ(α))x_{α+β,i+j−1}`.
pub fn a3_b0(form: SkewForm, phi: GroupHom) -> Result<GdStructure> {
    check_same_delta(&form.delta, &phi)?;
    let delta = form.delta.clone();
    Ok(GdStructure::new(A3 { delta, b: Scalar::zero(), lie: A3Lie::Form { form, phi } }))
}

/// Combinatorial binomial as a scalar; `C(n, k) = 0` outside `0 ≤ k ≤ n`.
fn choose(n: i64, k: i64) -> Scalar {
    Scalar::from_bigint(binomial(n, k))
}

struct Osborn {
    delta: DeltaGroup,
    b: Scalar,
}

impl StructureRules for Osborn {
    fn index_kind(&self) -> IndexKind {
        IndexKind::VecNat { rank: self.delta.rank() }
    }
    fn is_valid(&self, _: &BasisIndex) -> bool {
        true
    }
    fn novikov(&self, a: &BasisIndex, b: &BasisIndex) -> Element {
        let (u, i, v, j) = vecnat_pair(a, b);
        let (i, j) = (i as i64, j as i64);
        let beta_b = &self.delta.eval_unchecked(v) + &self.b;
        two_level(u + v, (i + j) as u32, &beta_b * &choose(i + j, i), choose(i + j - 1, i))
    }
    fn lie(&self, _: &BasisIndex, _: &BasisIndex) -> Element {
        Element::zero()
    }
    fn description(&self) -> String {
        format!("OsbornA(Δ={}, b={})", self.delta, self.b)
    }
}

/// Osborn's Novikov algebra on `L_{α,i}` with
/// `L_{α,i}∘L_{β,j} = (β+b)C(i+j,i)L_{α+β,i+j} + C(i+j−1,i)L_{α+β,i+j−1}`.
pub fn osborn_a(delta: DeltaGroup, b: Scalar) -> GdStructure {
    GdStructure::new(Osborn { delta, b })
}

/// Virasoro data: one basis vector `L` with `L∘L = L` and zero bracket.
pub fn vir() -> GdStructure {
    let t = Table::new("Vir", vec!["L".into()], vec![vec![sym("L")]], vec![vec![Element::zero()]])
        .expect("Vir table is well formed");
    t.into_gd()
}

/// Current-algebra data: the Lie algebra `g` of `lie` with the zero Novikov
/// product. The conformal bracket is then `[a_λ b] = [b, a]`.
pub fn current(lie: Table) -> GdStructure {
    lie.with_trivial_novikov().into_gd()
}

/// Verifies `ψ(u)∘ψ(v) = ψ(u∘v)` for every ordered pair in `w`, where `ψ`
/// maps Osborn's `L_{α,i}` to `(1/i!)·x_{α,i}` in A3 with the same `b`.
pub fn osborn_iso_check(b: &Scalar, delta: &DeltaGroup, w: &Window) -> Result<Report> {
    osborn_iso_check_with(b, delta, w, |i| {
        Scalar::one().checked_div(&Scalar::from_bigint(factorial(i as u64))).expect("i! is nonzero")
    })
}

pub(crate) fn osborn_iso_check_with(
    b: &Scalar,
    delta: &DeltaGroup,
    w: &Window,
    scale: impl Fn(u32) -> Scalar,
) -> Result<Report> {
    let source = osborn_a(delta.clone(), b.clone());
    let target = a3_novikov(delta.clone(), b.clone());
    source.check_window(w)?;
    let psi = |e: &Element| -> Element {
        e.iter()
            .map(|(idx, c)| match idx {
                BasisIndex::VecNat(_, n) => (idx.clone(), c * &scale(*n)),
                other => unreachable!("window was validated, got {other}"),
            })
            .collect()
    };
    let mut report = Report::new("osborn-iso", w)
        .param("delta", delta)
        .param("b", b);
    let mut n = 0;
    for u in w {
        for v in w {
            n += 1;
            let (eu, ev) = (Element::basis(u.clone()), Element::basis(v.clone()));
            let lhs = target.novikov_unchecked(&psi(&eu), &psi(&ev));
            let rhs = psi(&source.novikov_unchecked(&eu, &ev));
            let residual = &lhs - &rhs;
            if !residual.is_zero() {
                report.fail("homomorphism", vec![u.to_string(), v.to_string()], residual);
            }
        }
    }
    Ok(report.finish(n, "pairs"))
}

/// Family tags accepted by [`make_family`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyKind {
    Vir,
    Cur,
    A1,
    CL1,
    A2,
    CL2,
    A3,
    CL3,
    CL3b0,
    OsbornA,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 10] = [
        FamilyKind::Vir,
        FamilyKind::Cur,
        FamilyKind::A1,
        FamilyKind::CL1,
        FamilyKind::A2,
        FamilyKind::CL2,
        FamilyKind::A3,
        FamilyKind::CL3,
        FamilyKind::CL3b0,
        FamilyKind::OsbornA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Vir => "Vir",
            FamilyKind::Cur => "Cur",
            FamilyKind::A1 => "A1",
            FamilyKind::CL1 => "CL1",
            FamilyKind::A2 => "A2",
            FamilyKind::CL2 => "CL2",
            FamilyKind::A3 => "A3",
            FamilyKind::CL3 => "CL3",
            FamilyKind::CL3b0 => "CL3_b0",
            FamilyKind::OsbornA => "OsbornA",
        }
    }

    /// Whether the family is presented as a conformal algebra rather than
    /// as GD data.
    pub fn is_conformal(self) -> bool {
        matches!(
            self,
            FamilyKind::Vir | FamilyKind::Cur | FamilyKind::CL1 | FamilyKind::CL2 | FamilyKind::CL3 | FamilyKind::CL3b0
        )
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<&str> = FamilyKind::ALL.iter().map(|k| k.name()).collect();
                Error::Parse(format!("unknown family {s:?} (expected one of {})", names.join(", ")))
            })
    }
}

/// Parameters for [`make_family`]; each family reads only the fields it uses.
#[derive(Debug, Clone)]
pub struct FamilyParams {
    pub kind: FamilyKind,
    pub delta: DeltaGroup,
    pub b: Scalar,
    pub c: Scalar,
    /// When set on A1, A2, A3 or OsbornA, the bracket is replaced by
    /// `k(a∘b − b∘a)`.
    pub k: Option<Scalar>,
    /// Images of the Δ generators under φ; `None` means φ = 0.
    pub phi: Option<Vec<Scalar>>,
    /// Gram matrix of ϕ for CL3_b0; `None` means ϕ = 0.
    pub form: Option<Vec<Vec<Scalar>>>,
    /// Lie table for Cur.
    pub lie_table: Option<Table>,
    /// Build CL2 even though `2b ∈ Δ`.
    pub allow_2b_in_delta: bool,
}

impl FamilyParams {
    pub fn new(kind: FamilyKind) -> Self {
        FamilyParams {
            kind,
            delta: DeltaGroup::integers(),
            b: Scalar::zero(),
            c: Scalar::zero(),
            k: None,
            phi: None,
            form: None,
            lie_table: None,
            allow_2b_in_delta: false,
        }
    }

    fn phi(&self) -> Result<GroupHom> {
        match &self.phi {
            None => Ok(GroupHom::zero(self.delta.clone())),
            Some(images) => GroupHom::new(self.delta.clone(), images.clone()),
        }
    }

    fn form(&self) -> Result<SkewForm> {
        match &self.form {
            None => Ok(SkewForm::zero(self.delta.clone())),
            Some(m) => SkewForm::new(self.delta.clone(), m.clone()),
        }
    }
}

/// The result of [`make_family`].
#[derive(Debug, Clone)]
pub enum Built {
    Gd(GdStructure),
    Conformal(ConformalAlgebra),
}

impl Built {
    pub fn gd(&self) -> &GdStructure {
        match self {
            Built::Gd(g) => g,
            Built::Conformal(c) => c.gd(),
        }
    }

    /// The conformal algebra, forming it from the GD data when needed.
    pub fn conformal(&self) -> ConformalAlgebra {
        match self {
            Built::Gd(g) => quadratic_from_gd(g),
            Built::Conformal(c) => c.clone(),
        }
    }
}

fn with_k(gd: GdStructure, k: &Option<Scalar>) -> GdStructure {
    match k {
        Some(k) => gd_from_novikov(&gd, k.clone()),
        None => gd,
    }
}

pub fn make_family(p: &FamilyParams) -> Result<Built> {
    let conformal = |gd: GdStructure, label: String| Built::Conformal(quadratic_from_gd(&gd).labeled(label));
    Ok(match p.kind {
        FamilyKind::Vir => conformal(vir(), "Vir".into()),
        FamilyKind::Cur => {
            let t = p.lie_table.clone().ok_or_else(|| Error::Invalid("Cur needs a Lie algebra table".into()))?;
            let gd = current(t);
            let label = gd.description();
            conformal(gd, label)
        }
        FamilyKind::A1 => Built::Gd(with_k(a1(p.c.clone()), &p.k)),
        FamilyKind::CL1 => conformal(a1(p.c.clone()), format!("CL1(c={})", p.c)),
        FamilyKind::A2 => Built::Gd(with_k(a2(p.delta.clone(), p.b.clone(), p.phi()?)?, &p.k)),
        FamilyKind::CL2 => {
            let two_b = &Scalar::from_int(2) * &p.b;
            if !p.allow_2b_in_delta && p.delta.contains(&two_b) {
                return Err(Error::Hypothesis(format!(
                    "CL2 requires 2b∉Δ, but 2b={two_b}∈Δ (use the override to build the non-simple algebra)"
                )));
            }
            let phi = p.phi()?;
            let label = format!("CL2(Δ={}, b={}, φ={})", p.delta, p.b, phi);
            conformal(a2(p.delta.clone(), p.b.clone(), phi)?, label)
        }
        FamilyKind::A3 => Built::Gd(with_k(a3(p.delta.clone(), p.b.clone(), p.phi()?, p.c.clone())?, &p.k)),
        FamilyKind::CL3 => {
            if p.b.is_zero() {
                return Err(Error::Hypothesis("CL3 requires b≠0 (use CL3_b0 for b=0)".into()));
            }
            let phi = p.phi()?;
            let label = format!("CL3(Δ={}, b={}, φ={}, c={})", p.delta, p.b, phi, p.c);
            conformal(a3(p.delta.clone(), p.b.clone(), phi, p.c.clone())?, label)
        }
        FamilyKind::CL3b0 => {
            let (form, phi) = (p.form()?, p.phi()?);
            let label = format!("CL3_b0(Δ={}, ϕ={}, φ={})", p.delta, form, phi);
            conformal(a3_b0(form, phi)?, label)
        }
        FamilyKind::OsbornA => Built::Gd(with_k(osborn_a(p.delta.clone(), p.b.clone()), &p.k)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{PolyElement, Var};
    use crate::gd::{check_gd_compatibility, check_lie_axioms, check_novikov_axioms};

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn dv(a: i64) -> DeltaVector {
        DeltaVector(vec![a])
    }

    fn params(kind: FamilyKind, b: &str) -> FamilyParams {
        FamilyParams { b: s(b), ..FamilyParams::new(kind) }
    }

    fn basis_bracket(ca: &ConformalAlgebra, a: BasisIndex, b: BasisIndex) -> (PolyElement, PolyElement) {
        let br = ca.lambda_bracket(&PolyElement::basis(a), &PolyElement::basis(b), Var::Lambda).unwrap();
        assert!(br.degree_in(Var::Lambda).unwrap_or(0) <= 1);
        assert!(br.dpow_degree().unwrap_or(0) <= 1);
        (br.coeff(0, 0), br.coeff(1, 0))
    }

    #[test]
    fn hypotheses_accept_and_reject() {
        // 2b∉Δ
        assert!(make_family(&params(FamilyKind::CL2, "1/3")).is_ok());
        let err = make_family(&params(FamilyKind::CL2, "1/2")).unwrap_err();
        assert!(err.to_string().contains("2b∉Δ"), "{err}");
        assert!(make_family(&FamilyParams { allow_2b_in_delta: true, ..params(FamilyKind::CL2, "1/2") }).is_ok());

        // b∉Δ for nonzero φ
        let phi = Some(vec![s("1/5")]);
        assert!(make_family(&FamilyParams { phi: phi.clone(), ..params(FamilyKind::A2, "1/3") }).is_ok());
        let err = make_family(&FamilyParams { phi: phi.clone(), ..params(FamilyKind::A2, "1") }).unwrap_err();
        assert!(err.to_string().contains("b∉Δ"), "{err}");
        assert!(make_family(&FamilyParams { phi: phi.clone(), ..params(FamilyKind::CL3, "1/3") }).is_ok());
        let err = make_family(&FamilyParams { phi: phi.clone(), ..params(FamilyKind::CL3, "2") }).unwrap_err();
        assert!(err.to_string().contains("b∉Δ"), "{err}");
        let err = make_family(&FamilyParams { phi, allow_2b_in_delta: true, ..params(FamilyKind::CL2, "1") })
            .unwrap_err();
        assert!(err.to_string().contains("b∉Δ"), "{err}");

        // b≠0
        assert!(make_family(&params(FamilyKind::CL3, "2")).is_ok());
        let err = make_family(&params(FamilyKind::CL3, "0")).unwrap_err();
        assert!(err.to_string().contains("b≠0"), "{err}");
    }

    #[test]
    fn malformed_parameters() {
        assert!(GroupHom::new(DeltaGroup::integers(), vec![]).is_err());
        let g2 = DeltaGroup::new(vec![s("1"), s("i")]).unwrap();
        assert!(SkewForm::new(g2.clone(), vec![vec![s("0"), s("1")], vec![s("1"), s("0")]]).is_err());
        assert!(SkewForm::new(g2.clone(), vec![vec![s("1"), s("1")], vec![s("-1"), s("0")]]).is_err());
        assert!(SkewForm::new(g2, vec![vec![s("0"), s("2")], vec![s("-2"), s("0")]]).is_ok());
        assert!(make_family(&FamilyParams::new(FamilyKind::Cur)).is_err());
        assert!("cl3_b0".parse::<FamilyKind>().is_ok());
        assert!("CL4".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn vir_bracket() {
        let v = make_family(&FamilyParams::new(FamilyKind::Vir)).unwrap().conformal();
        let l = BasisIndex::Sym("L".into());
        let (c0, c1) = basis_bracket(&v, l.clone(), l);
        assert_eq!(c0, "∂ L".parse().unwrap());
        assert_eq!(c1, "2 L".parse().unwrap());
    }

    #[test]
    fn current_algebra_uses_reversed_bracket() {
        // sl2-free toy: [e, f] = h, [h, e] = 2e, [h, f] = -2f
        let t = Table::from_json(
            r#"{"basis": ["e", "f", "h"],
                "lie": [[{}, {"h": "1"}, {"e": "-2"}],
                        [{"h": "-1"}, {}, {"f": "2"}],
                        [{"e": "2"}, {"f": "-2"}, {}]]}"#,
        )
        .unwrap();
        let ca = make_family(&FamilyParams { lie_table: Some(t), ..FamilyParams::new(FamilyKind::Cur) })
            .unwrap()
            .conformal();
        let (c0, c1) = basis_bracket(&ca, BasisIndex::Sym("e".into()), BasisIndex::Sym("f".into()));
        assert_eq!(c0, "-1 h".parse().unwrap());
        assert!(c1.is_zero());
    }

    #[test]
    fn cl1_golden() {
        for c in ["0", "1", "-3"] {
            let ca = make_family(&FamilyParams { c: s(c), ..FamilyParams::new(FamilyKind::CL1) }).unwrap().conformal();
            for i in -1..5 {
                for j in -1..5 {
                    let (c0, c1) = basis_bracket(&ca, BasisIndex::Int(i), BasisIndex::Int(j));
                    // ((i+1)∂ + (i+j+2)λ)L_{i+j} + c(j−i)L_{i+j}
                    let mut e0 = PolyElement::zero();
                    let mut e1 = PolyElement::zero();
                    if i + j >= -1 {
                        e0.add_term(BasisIndex::Int(i + j), 1, &Scalar::from_int(i + 1));
                        e0.add_term(BasisIndex::Int(i + j), 0, &(&s(c) * &Scalar::from_int(j - i)));
                        e1.add_term(BasisIndex::Int(i + j), 0, &Scalar::from_int(i + j + 2));
                    }
                    assert_eq!((c0, c1), (e0, e1), "c={c} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn cl2_golden() {
        let (b, p1) = (s("1/3"), s("1/5"));
        let ca = make_family(&FamilyParams { phi: Some(vec![p1.clone()]), ..params(FamilyKind::CL2, "1/3") })
            .unwrap()
            .conformal();
        for a in -3..=3 {
            for bb in -3..=3 {
                let (c0, c1) = basis_bracket(&ca, BasisIndex::Vec(dv(a)), BasisIndex::Vec(dv(bb)));
                let (alpha, beta) = (Scalar::from_int(a), Scalar::from_int(bb));
                let (pa, pb) = (&alpha * &p1, &beta * &p1);
                let g = BasisIndex::Vec(dv(a + bb));
                // ((α+b)∂ + (α+β+2b)λ)x_{α+β} + (1/b)(φ(α)β − φ(β)α + b(φ(α)−φ(β)))x_{α+β}
                let phi_term = &(&(&(&pa * &beta) - &(&pb * &alpha)) + &(&b * &(&pa - &pb))) / &b;
                let mut e0 = PolyElement::term(&alpha + &b, g.clone(), 1);
                e0.add_term(g.clone(), 0, &phi_term);
                let e1 = PolyElement::term(&(&alpha + &beta) + &(&b + &b), g, 0);
                assert_eq!((c0, c1), (e0, e1), "({a},{bb})");
            }
        }
    }

    #[test]
    fn cl3_golden() {
        let (b, p1, c) = (s("1/3"), s("1/5"), s("-2/7"));
        let ca = make_family(&FamilyParams {
            phi: Some(vec![p1.clone()]),
            c: c.clone(),
            ..params(FamilyKind::CL3, "1/3")
        })
        .unwrap()
        .conformal();
        for a in -2..=2 {
            for bb in -2..=2 {
                for i in 0..3u32 {
                    for j in 0..3u32 {
                        let (c0, c1) =
                            basis_bracket(&ca, BasisIndex::VecNat(dv(a), i), BasisIndex::VecNat(dv(bb), j));
                        let (alpha, beta) = (Scalar::from_int(a), Scalar::from_int(bb));
                        let (pa, pb) = (&alpha * &p1, &beta * &p1);
                        let (si, sj) = (Scalar::from_int(i as i64), Scalar::from_int(j as i64));
                        let top = BasisIndex::VecNat(dv(a + bb), i + j);
                        let mut e0 = PolyElement::zero();
                        let mut e1 = PolyElement::zero();
                        // ∂((α+b)x_{i+j} + i x_{i+j−1}) + λ((α+β+2b)x_{i+j} + (i+j)x_{i+j−1})
                        //   + (1/b)((β+b)φ(α) − (α+b)φ(β))x_{i+j}
                        //   + (1/b)[j(φ(α) − c(α+b)) + i(c(β+b) − φ(β))]x_{i+j−1}
                        e0.add_term(top.clone(), 1, &(&alpha + &b));
                        e1.add_term(top.clone(), 0, &(&(&alpha + &beta) + &(&b + &b)));
                        let w0 = &(&(&(&beta + &b) * &pa) - &(&(&alpha + &b) * &pb)) / &b;
                        e0.add_term(top, 0, &w0);
                        if i + j > 0 {
                            let below = BasisIndex::VecNat(dv(a + bb), i + j - 1);
                            e0.add_term(below.clone(), 1, &si);
                            e1.add_term(below.clone(), 0, &(&si + &sj));
                            let w1 = &(&(&sj * &(&pa - &(&c * &(&alpha + &b))))
                                + &(&si * &(&(&c * &(&beta + &b)) - &pb)))
                                / &b;
                            e0.add_term(below, 0, &w1);
                        }
                        assert_eq!((c0, c1), (e0, e1), "({a},{i}),({bb},{j})");
                    }
                }
            }
        }
    }

    #[test]
    fn cl3_b0_golden() {
        let g2 = DeltaGroup::new(vec![s("1"), s("i")]).unwrap();
        let form = vec![vec![s("0"), s("3/2")], vec![s("-3/2"), s("0")]];
        let phi = vec![s("1"), s("-1/2")];
        let ca = make_family(&FamilyParams {
            delta: g2.clone(),
            form: Some(form.clone()),
            phi: Some(phi.clone()),
            ..FamilyParams::new(FamilyKind::CL3b0)
        })
        .unwrap()
        .conformal();
        let u = DeltaVector(vec![1, -1]);
        let v = DeltaVector(vec![0, 1]);
        let (c0, c1) = basis_bracket(&ca, BasisIndex::VecNat(u.clone(), 1), BasisIndex::VecNat(v.clone(), 2));
        // α = 1−i, β = i, α+β = 1; ϕ(β,α) = −ϕ(α,β) = −(1·1·3/2) = −3/2;
        // φ(α) = 1 + 1/2 = 3/2, φ(β) = −1/2; jφ(α) − iφ(β) = 3 + 1/2 = 7/2.
        let top = BasisIndex::VecNat(DeltaVector(vec![1, 0]), 3);
        let below = BasisIndex::VecNat(DeltaVector(vec![1, 0]), 2);
        let mut e0 = PolyElement::term(s("1-i"), top.clone(), 1);
        e0.add_term(below.clone(), 1, &s("1"));
        e0.add_term(top.clone(), 0, &s("-3/2"));
        e0.add_term(below.clone(), 0, &s("7/2"));
        let mut e1 = PolyElement::term(s("1"), top, 0);
        e1.add_term(below, 0, &s("3"));
        assert_eq!((c0, c1), (e0, e1));
    }

    #[test]
    fn families_satisfy_axioms() {
        let g = DeltaGroup::integers();
        let gd_cases = [
            (a1(s("2")), Window::int_range(-1, 5)),
            (a2(g.clone(), s("1/3"), GroupHom::new(g.clone(), vec![s("1/5")]).unwrap()).unwrap(), Window::vec_range(-3, 3)),
            (
                a3(g.clone(), s("1/3"), GroupHom::new(g.clone(), vec![s("1/5")]).unwrap(), s("2")).unwrap(),
                Window::vecnat_range(-1, 1, 0, 2),
            ),
            (osborn_a(g.clone(), s("1/2")), Window::vecnat_range(-1, 1, 0, 3)),
        ];
        for (gd, w) in gd_cases {
            assert!(check_novikov_axioms(&gd, &w).unwrap().passed(), "{gd:?}");
            assert!(check_lie_axioms(&gd, &w).unwrap().passed(), "{gd:?}");
            assert!(check_gd_compatibility(&gd, &w).unwrap().passed(), "{gd:?}");
        }
        let g2 = DeltaGroup::new(vec![s("1"), s("i")]).unwrap();
        let form = SkewForm::new(g2.clone(), vec![vec![s("0"), s("2")], vec![s("-2"), s("0")]]).unwrap();
        let gd = a3_b0(form, GroupHom::new(g2, vec![s("1/2"), s("1")]).unwrap()).unwrap();
        let w = Window::from_ranges(&gd.index_kind(), &[(-1, 1), (0, 1), (0, 1)]).unwrap();
        assert!(check_lie_axioms(&gd, &w).unwrap().passed());
        assert!(check_gd_compatibility(&gd, &w).unwrap().passed());
    }

    #[test]
    fn osborn_isomorphism() {
        let g = DeltaGroup::integers();
        let w = Window::vecnat_range(-2, 2, 0, 3);
        assert!(osborn_iso_check(&s("1/3"), &g, &w).unwrap().passed());
        let w0 = Window::new(vec![BasisIndex::VecNat(dv(1), 0), BasisIndex::VecNat(dv(-2), 0)]).unwrap();
        assert!(osborn_iso_check(&s("1/2"), &g, &w0).unwrap().passed());

        // Without the 1/i! factor: ψ(L_{0,2})∘ψ(L_{0,1}) = (0+b)x_{0,3} + x_{0,2}, while
        // ψ(L_{0,2}∘L_{0,1}) = b·C(3,2)x_{0,3} + C(2,2)x_{0,2} = 3b·x_{0,3} + x_{0,2}.
        let r = osborn_iso_check_with(&s("1/3"), &g, &w, |_| Scalar::one()).unwrap();
        assert!(!r.passed());
        let f = r.failures.iter().find(|f| f.inputs == ["x_{(0),2}", "x_{(0),1}"]).unwrap();
        assert_eq!(f.residual, "-2/3·x_{(0),3}");
    }
}
