//! Exact Gaussian-rational numbers, the coefficient field ℚ(i).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element `re + im·i` of ℚ(i). Both parts are kept in lowest terms with a
/// positive denominator, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        // BigRational normalizes on construction and after every operation.
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn i() -> Self {
        Scalar::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::new(BigRational::from_integer(n), BigRational::zero())
    }

    /// `num/den` as a real scalar. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Scalar::new(re, im)
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// |z|², always a non-negative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn checked_inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.im.is_zero() {
            return Ok(Scalar::new(self.re.recip(), BigRational::zero()));
        }
        let n = self.norm_sqr();
        Ok(Scalar::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self * &rhs.checked_inv()?)
    }

    /// Integer `n` if this scalar is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.im.is_zero() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

/// Binary operations on [`Scalar`], as used by [`scalar_arithmetic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn scalar_arithmetic(a: &Scalar, b: &Scalar, op: ScalarOp) -> Result<Scalar> {
    match op {
        ScalarOp::Add => Ok(a + b),
        ScalarOp::Sub => Ok(a - b),
        ScalarOp::Mul => Ok(a * b),
        ScalarOp::Div => a.checked_div(b),
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::new(r, BigRational::zero())
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::new(&self.re * &rhs.re, BigRational::zero());
        }
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        Scalar::new(re, im)
    }
}

/// Panics on division by zero; use [`Scalar::checked_div`] for a fallible form.
impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `p/q`, `r/si`, or `p/q+r/si`; a unit imaginary
/// coefficient prints as `i`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |im: &BigRational| -> String {
            let abs = im.abs();
            if abs.is_one() {
                "i".to_string()
            } else {
                format!("{}i", fmt_rational(&abs))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => {
                let sign = if self.im.is_negative() { "-" } else { "" };
                write!(f, "{}{}", sign, im_part(&self.im))
            }
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}", fmt_rational(&self.re), sign, im_part(&self.im))
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str, whole: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("invalid scalar {whole:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    if num.is_empty() || den.is_empty() || den.starts_with(['+', '-']) {
        return Err(bad());
    }
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(num, den))
}

/// Parses `p/q`, `r/si`, `p/q+r/si` and variants with optional signs,
/// implicit unit coefficients (`i`, `-i`) and arbitrary whitespace. Both `-`
/// and the Unicode minus sign are accepted.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(input: &str) -> Result<Scalar> {
        let s: String = input
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '\u{2212}' { '-' } else { c })
            .collect();
        let bad = || Error::Parse(format!("invalid scalar {input:?}"));
        if s.is_empty() {
            return Err(bad());
        }

        // Split into signed terms at every sign that does not begin the string.
        let mut terms = Vec::new();
        let mut start = 0;
        for (pos, ch) in s.char_indices() {
            if pos > start && (ch == '+' || ch == '-') {
                terms.push(&s[start..pos]);
                start = pos;
            }
        }
        terms.push(&s[start..]);
        if terms.len() > 2 {
            return Err(bad());
        }

        let mut re: Option<BigRational> = None;
        let mut im: Option<BigRational> = None;
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let (slot, value) = if let Some(coeff) = body.strip_suffix('i') {
                let v = if coeff.is_empty() {
                    BigRational::one()
                } else {
                    parse_rational(coeff, input)?
                };
                (&mut im, v)
            } else {
                (&mut re, parse_rational(body, input)?)
            };
            if slot.is_some() {
                return Err(bad());
            }
            *slot = Some(if neg { -value } else { value });
        }
        Ok(Scalar::new(
            re.unwrap_or_else(BigRational::zero),
            im.unwrap_or_else(BigRational::zero),
        ))
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Falling-factorial binomial `m(m-1)…(m-j+1)/j!`, valid for negative `m`.
pub fn binomial_falling(m: i64, j: u32) -> Scalar {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 0..j as i64 {
        num *= BigInt::from(m - k);
        den *= BigInt::from(k + 1);
    }
    Scalar::from(BigRational::new(num, den))
}

/// Combinatorial binomial: zero unless `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(scalar_arithmetic(&s("1/2"), &s("1/3"), ScalarOp::Add).unwrap(), s("5/6"));
        assert_eq!(scalar_arithmetic(&s("i"), &s("i"), ScalarOp::Mul).unwrap(), s("-1"));
        // (1+i)/(1-i) = (1+i)^2/2 = 2i/2
        assert_eq!(scalar_arithmetic(&s("1+i"), &s("1-i"), ScalarOp::Div).unwrap(), s("i"));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let r = scalar_arithmetic(&s("3"), &Scalar::zero(), ScalarOp::Div);
        assert!(matches!(r, Err(Error::DivisionByZero)));
        assert!(matches!("1/0".parse::<Scalar>(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn parse_and_display() {
        for (text, canon) in [
            ("−1/3+2i", "-1/3+2i"),
            (" 2/4 ", "1/2"),
            ("-i", "-i"),
            ("1/2 - 3/4 i", "1/2-3/4i"),
            ("+7", "7"),
            ("i", "i"),
            ("0", "0"),
            ("3i+1", "1+3i"),
            ("-0/5", "0"),
        ] {
            assert_eq!(s(text).to_string(), canon, "{text}");
        }
        for bad in ["", "1/", "/2", "1+2+3", "1+2", "i+i", "1/-2", "abc", "2j", "--1"] {
            assert!(bad.parse::<Scalar>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn canonical_zero() {
        let z = &s("1/3") - &s("2/6");
        assert_eq!(z, Scalar::zero());
        assert_eq!(z.re().denom(), &BigInt::one());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_falling(-3, 2), Scalar::from_int(6));
        assert_eq!(binomial_falling(5, 0), Scalar::one());
        assert_eq!(binomial_falling(-1, 1), Scalar::from_int(-1));
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(-1, 0), BigInt::zero());
        assert_eq!(binomial(2, 3), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }

    fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..12, -20i64..20, 1i64..12).prop_map(|(a, b, c, d)| {
            Scalar::gaussian(BigRational::new(a.into(), b.into()), BigRational::new(c.into(), d.into()))
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
                prop_assert!((&b * &b.checked_inv().unwrap()).is_one());
            }
        }

        #[test]
        fn display_parse_round_trip(a in arb_scalar()) {
            prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
        }
    }
}
