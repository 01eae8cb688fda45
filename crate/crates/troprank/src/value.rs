//! Scalars of the extended tropical semiring (Q ∪ {+∞}, min, +).
//!
//! Tropical addition is `min`, tropical multiplication is ordinary `+`.
//! `+∞` is the additive identity and the multiplicative absorbing element.
//! Finite values are exact rationals; no rounding ever occurs.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar type used everywhere in the crate.
pub type Rat = BigRational;

/// Build a rational from an integer.
pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Build a rational from numerator and denominator.
pub fn ratio(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// One element of the extended tropical semiring: an exact rational or +∞.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TropValue {
    Finite(Rat),
    Infinity,
}

impl TropValue {
    pub fn from_int(n: i64) -> Self {
        TropValue::Finite(rat(n))
    }

    pub fn zero() -> Self {
        TropValue::Finite(Rat::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TropValue::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, TropValue::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TropValue::Finite(r) if r.is_zero())
    }

    /// The finite payload, if any.
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            TropValue::Finite(r) => Some(r),
            TropValue::Infinity => None,
        }
    }

    /// Tropical addition: `a ⊕ b = min(a, b)`, with +∞ as identity.
    pub fn tropical_add(&self, rhs: &TropValue) -> TropValue {
        if self <= rhs {
            self.clone()
        } else {
            rhs.clone()
        }
    }

    /// Tropical multiplication: `a ⊗ b = a + b`, with +∞ absorbing.
    pub fn tropical_mul(&self, rhs: &TropValue) -> TropValue {
        match (self, rhs) {
            (TropValue::Finite(a), TropValue::Finite(b)) => TropValue::Finite(a + b),
            _ => TropValue::Infinity,
        }
    }

    /// Ordinary subtraction of a finite rational; +∞ stays +∞.
    pub fn shift_down(&self, by: &Rat) -> TropValue {
        match self {
            TropValue::Finite(a) => TropValue::Finite(a - by),
            TropValue::Infinity => TropValue::Infinity,
        }
    }

    /// Ordinary addition of a finite rational; +∞ stays +∞.
    pub fn shift_up(&self, by: &Rat) -> TropValue {
        match self {
            TropValue::Finite(a) => TropValue::Finite(a + by),
            TropValue::Infinity => TropValue::Infinity,
        }
    }
}

impl PartialOrd for TropValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropValue::Finite(a), TropValue::Finite(b)) => a.cmp(b),
            (TropValue::Finite(_), TropValue::Infinity) => Ordering::Less,
            (TropValue::Infinity, TropValue::Finite(_)) => Ordering::Greater,
            (TropValue::Infinity, TropValue::Infinity) => Ordering::Equal,
        }
    }
}

impl From<i64> for TropValue {
    fn from(n: i64) -> Self {
        TropValue::from_int(n)
    }
}

impl From<Rat> for TropValue {
    fn from(r: Rat) -> Self {
        TropValue::Finite(r)
    }
}

/// Render a rational the way the text format expects: a plain integer when
/// the denominator is 1, `p/q` in lowest terms otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse one token of the matrix text format: a signed decimal integer,
/// a `p/q` rational, or `inf` for +∞.
pub fn parse_token(tok: &str) -> std::result::Result<TropValue, String> {
    if tok == "inf" {
        return Ok(TropValue::Infinity);
    }
    if let Some((num, den)) = tok.split_once('/') {
        let n: BigInt = num
            .parse()
            .map_err(|_| format!("bad numerator in rational token {tok:?}"))?;
        let d: BigInt = den
            .parse()
            .map_err(|_| format!("bad denominator in rational token {tok:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in rational token {tok:?}"));
        }
        return Ok(TropValue::Finite(BigRational::new(n, d)));
    }
    let n: BigInt = tok
        .parse()
        .map_err(|_| format!("expected integer, rational p/q, or inf, got {tok:?}"))?;
    Ok(TropValue::Finite(BigRational::from_integer(n)))
}

impl fmt::Display for TropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropValue::Finite(r) => write!(f, "{}", format_rat(r)),
            TropValue::Infinity => write!(f, "inf"),
        }
    }
}

/// Absolute value of a rational.
pub fn rat_abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_is_additive_identity_and_multiplicative_absorber() {
        let a = TropValue::from_int(3);
        assert_eq!(a.tropical_add(&TropValue::Infinity), a);
        assert_eq!(TropValue::Infinity.tropical_add(&a), a);
        assert_eq!(a.tropical_mul(&TropValue::Infinity), TropValue::Infinity);
        assert_eq!(TropValue::Infinity.tropical_mul(&a), TropValue::Infinity);
    }

    #[test]
    fn min_and_plus() {
        let a = TropValue::from_int(2);
        let b = TropValue::from_int(5);
        assert_eq!(a.tropical_add(&b), a);
        assert_eq!(a.tropical_mul(&b), TropValue::from_int(7));
    }

    #[test]
    fn token_round_trip() {
        for s in ["0", "-17", "3/4", "-5/7", "inf"] {
            let v = parse_token(s).unwrap();
            assert_eq!(v.to_string(), s);
        }
        // non-lowest-terms input re-renders reduced
        assert_eq!(parse_token("4/6").unwrap().to_string(), "2/3");
        assert!(parse_token("1/0").is_err());
        assert!(parse_token("abc").is_err());
    }
}
