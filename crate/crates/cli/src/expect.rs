//! Verdicts the known theory predicts for the built-in families. A check
//! with no prediction exits 0 whatever its status.

use conformal_core::{BasisIndex, DeltaGroup, FamilyKind, Scalar, Status, Window};

use crate::args::Candidate;

/// What the algebra under test is, as far as predictions go.
pub struct Subject {
    pub kind: Option<FamilyKind>,
    pub delta: DeltaGroup,
    pub b: Scalar,
}

impl Subject {
    fn two_b_in_delta(&self) -> bool {
        self.delta.contains(&(&Scalar::from_int(2) * &self.b))
    }

    fn is(&self, kinds: &[FamilyKind]) -> bool {
        self.kind.is_some_and(|k| kinds.contains(&k))
    }

    fn builtin(&self) -> bool {
        self.kind.is_some_and(|k| k != FamilyKind::Cur)
    }

    /// `eval(α) = −2b` for the Δ-part of `idx`.
    fn is_minus_2b(&self, idx: &BasisIndex) -> bool {
        let v = match idx {
            BasisIndex::Vec(v) | BasisIndex::VecNat(v, _) => v,
            _ => return false,
        };
        let minus_2b = -&(&Scalar::from_int(2) * &self.b);
        self.delta.eval(v).is_ok_and(|s| s == minus_2b)
    }
}

fn pass_if(ok: bool) -> Option<Status> {
    ok.then_some(Status::Pass)
}

/// Axiom, conformal-axiom, closed-form and isomorphism checks hold for
/// every built-in family.
pub fn identities(s: &Subject) -> Option<Status> {
    pass_if(s.builtin())
}

pub fn tortken(s: &Subject, corrected: bool) -> Option<Status> {
    pass_if(corrected && s.builtin())
}

/// `A = A∗A` except for the one target `x_{−2b}` when `2b ∈ Δ`; each other
/// target `x_α` is `x_α∗x_0` up to the nonzero factor `α+2b`, so the window
/// must hold the zero index. The same triangular argument gives `A3 = A3∗A3`
/// when `2b ∉ Δ`.
pub fn star_span(s: &Subject, w: &Window, targets: &Window) -> Option<Status> {
    use FamilyKind::*;
    let has_zero = w.iter().any(|i| match i {
        BasisIndex::Int(n) => *n == 0,
        BasisIndex::Vec(v) => v.coords().iter().all(|&c| c == 0),
        BasisIndex::VecNat(v, n) => *n == 0 && v.coords().iter().all(|&c| c == 0),
        _ => false,
    });
    if !has_zero {
        return None;
    }
    if s.is(&[A1, CL1]) || (s.is(&[A3, CL3]) && !s.two_b_in_delta()) {
        return Some(Status::Pass);
    }
    if !s.is(&[A2, CL2]) {
        return None;
    }
    Some(if targets.iter().any(|t| s.is_minus_2b(t)) { Status::Fail } else { Status::Pass })
}

pub fn is_ideal(s: &Subject, kind: &str, candidate: Candidate, dropped: Option<&BasisIndex>) -> Option<Status> {
    use FamilyKind::*;
    let a2 = s.is(&[A2, CL2]);
    match candidate {
        Candidate::Full => pass_if(s.builtin()),
        Candidate::J => pass_if(a2 && kind == "nj"),
        Candidate::B => pass_if(a2 && kind == "conformal" && s.two_b_in_delta()),
        Candidate::Drop => {
            let d = dropped?;
            (a2 && kind == "nj" && !s.is_minus_2b(d)).then_some(Status::Fail)
        }
        Candidate::Span => None,
    }
}

pub fn simplicity(s: &Subject) -> Option<Status> {
    use FamilyKind::*;
    if s.is(&[Vir, A1, CL1]) {
        return Some(Status::Pass);
    }
    if s.is(&[A2, CL2]) {
        return Some(if s.two_b_in_delta() { Status::Fail } else { Status::Pass });
    }
    if s.is(&[A3, CL3]) && !s.b.is_zero() && !s.two_b_in_delta() {
        return Some(Status::Pass);
    }
    None
}
