//! Finite windows of basis indices and their compact text syntax.

use std::collections::BTreeSet;
use std::fmt;

use crate::basis::BasisIndex;
use crate::delta::DeltaVector;
use crate::error::{Error, Result};

/// The shape of basis labels an algebra uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndexKind {
    Int,
    Vec { rank: usize },
    VecNat { rank: usize },
    Sym { names: Vec<String> },
}

impl IndexKind {
    /// Number of integer components in the window syntax.
    pub fn components(&self) -> usize {
        match self {
            IndexKind::Int => 1,
            IndexKind::Vec { rank } => *rank,
            IndexKind::VecNat { rank } => rank + 1,
            IndexKind::Sym { .. } => 0,
        }
    }

    pub fn matches(&self, idx: &BasisIndex) -> bool {
        match (self, idx) {
            (IndexKind::Int, BasisIndex::Int(_)) => true,
            (IndexKind::Vec { rank }, BasisIndex::Vec(v)) => v.rank() == *rank,
            (IndexKind::VecNat { rank }, BasisIndex::VecNat(v, _)) => v.rank() == *rank,
            (IndexKind::Sym { names }, BasisIndex::Sym(s)) => names.contains(s),
            _ => false,
        }
    }
}

/// A finite, duplicate-free list of basis indices.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Window(Vec<BasisIndex>);

impl Window {
    pub fn new(indices: Vec<BasisIndex>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for idx in &indices {
            if !seen.insert(idx) {
                return Err(Error::Invalid(format!("duplicate index {idx} in window")));
            }
        }
        Ok(Window(indices))
    }

    pub fn empty() -> Self {
        Window(Vec::new())
    }

    /// `L_lo, …, L_hi`.
    pub fn int_range(lo: i64, hi: i64) -> Self {
        Window((lo..=hi).map(BasisIndex::Int).collect())
    }

    /// `x_α` for rank-one α ∈ [lo, hi].
    pub fn vec_range(lo: i64, hi: i64) -> Self {
        Window((lo..=hi).map(|a| BasisIndex::Vec(DeltaVector(vec![a]))).collect())
    }

    /// `x_{α,n}` for rank-one α ∈ [alo, ahi] and n ∈ [nlo, nhi].
    pub fn vecnat_range(alo: i64, ahi: i64, nlo: u32, nhi: u32) -> Self {
        let mut v = Vec::new();
        for a in alo..=ahi {
            for n in nlo..=nhi {
                v.push(BasisIndex::VecNat(DeltaVector(vec![a]), n));
            }
        }
        Window(v)
    }

    /// Cross product of integer ranges, interpreted according to `kind`.
    pub fn from_ranges(kind: &IndexKind, ranges: &[(i64, i64)]) -> Result<Self> {
        if ranges.len() != kind.components() {
            return Err(Error::Invalid(format!(
                "window needs {} range component(s), got {}",
                kind.components(),
                ranges.len()
            )));
        }
        for (lo, hi) in ranges {
            if lo > hi {
                return Err(Error::Invalid(format!("empty range {lo}..{hi}")));
            }
        }
        let mut tuples: Vec<Vec<i64>> = vec![Vec::new()];
        for (lo, hi) in ranges {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (*lo..=*hi).map(move |x| {
                        let mut t = t.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        let indices = tuples
            .into_iter()
            .map(|t| match kind {
                IndexKind::Int => Ok(BasisIndex::Int(t[0])),
                IndexKind::Vec { .. } => Ok(BasisIndex::Vec(DeltaVector(t))),
                IndexKind::VecNat { rank } => {
                    let n = u32::try_from(t[*rank])
                        .map_err(|_| Error::Invalid("the last window component must be non-negative".into()))?;
                    Ok(BasisIndex::VecNat(DeltaVector(t[..*rank].to_vec()), n))
                }
                IndexKind::Sym { .. } => unreachable!("symbolic windows have no ranges"),
            })
            .collect::<Result<Vec<_>>>()?;
        Window::new(indices)
    }

    /// Parses `"a..b"` per component joined by ` x `, e.g. `"-2..2 x 0..3"`.
    /// For table algebras the syntax is a comma-separated name list or `all`.
    pub fn parse(kind: &IndexKind, text: &str) -> Result<Self> {
        if let IndexKind::Sym { names } = kind {
            let t = text.trim();
            if t.is_empty() || t == "all" {
                return Window::new(names.iter().cloned().map(BasisIndex::Sym).collect());
            }
            let picked = t
                .split(',')
                .map(|n| {
                    let n = n.trim();
                    if names.iter().any(|m| m == n) {
                        Ok(BasisIndex::Sym(n.to_string()))
                    } else {
                        Err(Error::Invalid(format!("unknown basis name {n:?}")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            return Window::new(picked);
        }
        let text = text.replace('\u{2212}', "-");
        let ranges = text
            .split(['x', '×'])
            .map(|part| parse_range(part.trim()))
            .collect::<Result<Vec<_>>>()?;
        Window::from_ranges(kind, &ranges)
    }

    pub fn indices(&self) -> &[BasisIndex] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BasisIndex> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, idx: &BasisIndex) -> bool {
        self.0.contains(idx)
    }

    /// Window with the listed indices removed.
    pub fn without(&self, drop: &[BasisIndex]) -> Window {
        Window(self.0.iter().filter(|i| !drop.contains(i)).cloned().collect())
    }

    pub fn labels(&self) -> Vec<String> {
        self.0.iter().map(|i| i.to_string()).collect()
    }
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::Parse(format!("invalid range {s:?}, expected a..b"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Ok((lo, hi))
    } else {
        let v = s.parse().map_err(|_| bad())?;
        Ok((v, v))
    }
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<'a> IntoIterator for &'a Window {
    type Item = &'a BasisIndex;
    type IntoIter = std::slice::Iter<'a, BasisIndex>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
