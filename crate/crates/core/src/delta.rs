//! The index group Δ ⊂ ℂ, modeled as a free abelian group with an explicit
//! embedding into ℚ(i).

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

/// Integer coordinates of an element of Δ with respect to its generators.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeltaVector(pub Vec<i64>);

impl DeltaVector {
    pub fn new(coords: Vec<i64>) -> Self {
        DeltaVector(coords)
    }

    pub fn zero(rank: usize) -> Self {
        DeltaVector(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl Add for &DeltaVector {
    type Output = DeltaVector;
    fn add(self, rhs: &DeltaVector) -> DeltaVector {
        debug_assert_eq!(self.rank(), rhs.rank());
        DeltaVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DeltaVector {
    type Output = DeltaVector;
    fn sub(self, rhs: &DeltaVector) -> DeltaVector {
        debug_assert_eq!(self.rank(), rhs.rank());
        DeltaVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &DeltaVector {
    type Output = DeltaVector;
    fn neg(self) -> DeltaVector {
        DeltaVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for DeltaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for DeltaVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finitely generated subgroup of ℚ(i) given by ℚ-linearly independent
/// generators. Since ℚ(i) is two-dimensional over ℚ, the rank is at most 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DeltaGroup {
    generators: Vec<Scalar>,
}

fn components(s: &Scalar) -> Vec<Scalar> {
    vec![Scalar::from(s.re().clone()), Scalar::from(s.im().clone())]
}

impl DeltaGroup {
    pub fn new(generators: Vec<Scalar>) -> Result<Self> {
        let rows: Vec<Vec<Scalar>> = generators.iter().map(components).collect();
        if linalg::row_reduce(&rows)?.len() != generators.len() {
            return Err(Error::DependentGenerators);
        }
        Ok(DeltaGroup { generators })
    }

    /// Δ = ℤ.
    pub fn integers() -> Self {
        DeltaGroup { generators: vec![Scalar::one()] }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Scalar] {
        &self.generators
    }

    /// Σ v_k · g_k.
    pub fn eval(&self, v: &DeltaVector) -> Result<Scalar> {
        if v.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), got: v.rank() });
        }
        Ok(self.eval_unchecked(v))
    }

    pub(crate) fn eval_unchecked(&self, v: &DeltaVector) -> Scalar {
        let mut acc = Scalar::zero();
        for (c, g) in v.0.iter().zip(&self.generators) {
            if *c != 0 {
                acc += &(&Scalar::from_int(*c) * g);
            }
        }
        acc
    }

    /// The coordinates of `s` in Δ, or `None` when `s ∉ Δ`.
    pub fn membership(&self, s: &Scalar) -> Option<DeltaVector> {
        if self.rank() == 0 {
            return s.is_zero().then(|| DeltaVector::zero(0));
        }
        let rows: Vec<Vec<Scalar>> = self.generators.iter().map(components).collect();
        let sol = linalg::solve_linear(&rows, &components(s)).ok()??;
        let mut coords = Vec::with_capacity(sol.len());
        for c in sol {
            let r: &BigRational = c.re();
            if !c.im().is_zero() || !r.is_integer() {
                return None;
            }
            coords.push(r.to_integer().to_i64()?);
        }
        Some(DeltaVector(coords))
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        self.membership(s).is_some()
    }
}

impl fmt::Display for DeltaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (k, g) in self.generators.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for DeltaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DeltaGroup{self}")
    }
}
