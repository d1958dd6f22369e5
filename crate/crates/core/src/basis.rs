//! Basis labels and finitely supported linear combinations over them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::delta::DeltaVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A basis label. The derived ordering (variant, then fields
/// lexicographically) is the canonical order used everywhere.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BasisIndex {
    /// `L_i` of the A1-type algebras.
    Int(i64),
    /// `x_α` of the A2-type algebras.
    Vec(DeltaVector),
    /// `x_{α,n}` of the A3-type algebras.
    VecNat(DeltaVector, u32),
    /// A named basis vector of a finite table.
    Sym(String),
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisIndex::Int(i) => write!(f, "L_{{{i}}}"),
            BasisIndex::Vec(v) => write!(f, "x_{{{v}}}"),
            BasisIndex::VecNat(v, n) => write!(f, "x_{{{v},{n}}}"),
            BasisIndex::Sym(s) => write!(f, "{s}"),
        }
    }
}

impl fmt::Debug for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_int_list(s: &str, whole: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|p| p.trim().replace('\u{2212}', "-").parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse(format!("invalid basis index {whole:?}")))
}

impl std::str::FromStr for BasisIndex {
    type Err = Error;

    /// Accepts the rendered forms `L_{3}`, `L_3`, `x_{(1,-2)}`,
    /// `x_{(1),2}`, or a bare identifier for table bases.
    fn from_str(input: &str) -> Result<Self> {
        let s = input.trim();
        let bad = || Error::Parse(format!("invalid basis index {input:?}"));
        let unbrace = |t: &str| -> String {
            let t = t.trim();
            t.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(t).trim().to_string()
        };
        if let Some(rest) = s.strip_prefix("L_") {
            let body = unbrace(rest);
            let v = parse_int_list(&body, input)?;
            return match v.as_slice() {
                [i] => Ok(BasisIndex::Int(*i)),
                _ => Err(bad()),
            };
        }
        if let Some(rest) = s.strip_prefix("x_") {
            let body = unbrace(rest);
            let body = body.strip_prefix('(').ok_or_else(bad)?;
            let (vec, tail) = body.split_once(')').ok_or_else(bad)?;
            let coords = parse_int_list(vec, input)?;
            let tail = tail.trim();
            if tail.is_empty() {
                return Ok(BasisIndex::Vec(DeltaVector(coords)));
            }
            let n = tail
                .strip_prefix(',')
                .and_then(|t| t.trim().parse::<u32>().ok())
                .ok_or_else(bad)?;
            return Ok(BasisIndex::VecNat(DeltaVector(coords), n));
        }
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_alphabetic() && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'') => {
                Ok(BasisIndex::Sym(s.to_string()))
            }
            _ => Err(bad()),
        }
    }
}

/// A finitely supported linear combination of basis vectors. Zero
/// coefficients are never stored, so equality is support equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(idx: BasisIndex) -> Self {
        Self::term(Scalar::one(), idx)
    }

    pub fn term(coeff: Scalar, idx: BasisIndex) -> Self {
        let mut e = Self::zero();
        e.add_term(idx, &coeff);
        e
    }

    /// Sums the given terms; zero coefficients are dropped, so a rule may
    /// produce an out-of-range label as long as its coefficient vanishes.
    pub fn from_terms<I: IntoIterator<Item = (BasisIndex, Scalar)>>(terms: I) -> Self {
        let mut e = Self::zero();
        for (idx, c) in terms {
            e.add_term(idx, &c);
        }
        e
    }

    pub fn add_term(&mut self, idx: BasisIndex, coeff: &Scalar) {
        if coeff.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(idx.clone()).or_insert_with(Scalar::zero);
            *slot += coeff;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&idx);
        }
    }

    pub fn add_scaled(&mut self, other: &Element, factor: &Scalar) {
        if factor.is_zero() {
            return;
        }
        for (idx, c) in &other.terms {
            self.add_term(idx.clone(), &(c * factor));
        }
    }

    pub fn scaled(&self, factor: &Scalar) -> Element {
        let mut e = Element::zero();
        e.add_scaled(self, factor);
        e
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

    pub fn coeff(&self, idx: &BasisIndex) -> Scalar {
        self.terms.get(idx).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &BasisIndex> {
        self.terms.keys()
    }
}

impl std::ops::Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut e = self.clone();
        e.add_scaled(rhs, &Scalar::one());
        e
    }
}

impl std::ops::Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut e = self.clone();
        e.add_scaled(rhs, &-Scalar::one());
        e
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scaled(&-Scalar::one())
    }
}

impl FromIterator<(BasisIndex, Scalar)> for Element {
    fn from_iter<T: IntoIterator<Item = (BasisIndex, Scalar)>>(iter: T) -> Self {
        Element::from_terms(iter)
    }
}

/// Writes `c·body` with sign handling; `first` controls the leading joiner.
pub(crate) fn write_term(f: &mut impl fmt::Write, first: bool, coeff: &Scalar, body: &str) -> fmt::Result {
    use num_traits::{Signed, Zero};
    let neg = coeff.re().is_negative() || (coeff.re().is_zero() && coeff.im().is_negative());
    let mag = if neg { -coeff } else { coeff.clone() };
    match (first, neg) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    if mag.is_one() {
        write!(f, "{body}")
    } else if mag.is_real() || mag.re().is_zero() {
        write!(f, "{mag}·{body}")
    } else {
        write!(f, "({mag})·{body}")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (idx, c)) in self.terms.iter().enumerate() {
            write_term(f, k == 0, c, &idx.to_string())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses a sum of terms `[coeff·][∂^k·]index`. Terms are joined by `+`, or
/// by ` - ` (a minus sign preceded by whitespace). Coefficients with both a
/// real and imaginary part must be parenthesized. `d` may stand in for `∂`
/// and `*` for `·`.
pub fn parse_terms(input: &str) -> Result<Vec<(Scalar, u32, BasisIndex)>> {
    let bad = |why: &str| Error::Parse(format!("invalid element {input:?}: {why}"));
    let s = input.replace('\u{2212}', "-");
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    let mut prev_space = true;
    for ch in s.chars() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            _ => {}
        }
        let split = depth == 0 && (ch == '+' || (ch == '-' && prev_space && !cur.trim().is_empty()));
        if split {
            pieces.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
        prev_space = ch.is_whitespace();
    }
    pieces.push((neg, cur));
    if s.trim() == "0" {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    for (neg, piece) in pieces {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(bad("empty term"));
        }
        // Split on separators at depth 0.
        let mut parts: Vec<String> = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        for ch in piece.chars() {
            match ch {
                '(' | '{' => depth += 1,
                ')' | '}' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (ch == '·' || ch == '*' || ch.is_whitespace()) {
                if !cur.is_empty() {
                    parts.push(std::mem::take(&mut cur));
                }
            } else {
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            parts.push(cur);
        }
        let mut coeff = if neg { -Scalar::one() } else { Scalar::one() };
        let mut dpow = 0u32;
        let (last, init) = parts.split_last().ok_or_else(|| bad("empty term"))?;
        let mut index_text = last.as_str();
        if let Some(rest) = index_text.strip_prefix('-') {
            coeff = -coeff;
            index_text = rest;
        }
        for part in init {
            let p = part.as_str();
            let deriv = p.strip_prefix('∂').or_else(|| p.strip_prefix('d'));
            if let Some(rest) = deriv {
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')
                        .and_then(|k| k.parse::<u32>().ok())
                        .ok_or_else(|| bad("bad derivative power"))?
                };
                dpow += k;
                continue;
            }
            let (flip, p) = match p.strip_prefix('-') {
                Some(rest) if rest.starts_with('(') => (true, rest),
                _ => (false, p),
            };
            let p = p.strip_prefix('(').and_then(|p| p.strip_suffix(')')).unwrap_or(p);
            let c: Scalar = p.parse()?;
            coeff = &coeff * &c;
            if flip {
                coeff = -coeff;
            }
        }
        out.push((coeff, dpow, index_text.parse()?));
    }
    Ok(out)
}

impl std::str::FromStr for Element {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut e = Element::zero();
        for (c, dpow, idx) in parse_terms(s)? {
            if dpow != 0 {
                return Err(Error::Parse(format!("derivative not allowed in element {s:?}")));
            }
            e.add_term(idx, &c);
        }
        Ok(e)
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.terms.len()))?;
        for (idx, c) in &self.terms {
            m.serialize_entry(&idx.to_string(), &c.to_string())?;
        }
        m.end()
    }
}
