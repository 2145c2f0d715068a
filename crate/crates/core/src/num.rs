//! Number tower: exact big rationals, promoted to binary floating point of a
//! chosen precision once a transcendental value enters.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Exponent, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default mantissa length in bits.
pub const DEFAULT_PRECISION: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = Word::BITS as usize;
// Decimal exponents beyond this are rejected by the parser.
const MAX_DECIMAL_EXPONENT: i64 = 100_000;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Rounds a requested precision up to whole mantissa words (the granularity
/// of the float backend).
pub fn word_precision(bits: usize) -> usize {
    bits.max(WORD_BITS).div_ceil(WORD_BITS) * WORD_BITS
}

/// Number of significant decimal digits that make `bits`-bit values
/// round-trip through their decimal representation.
pub fn decimal_digits(bits: usize) -> usize {
    (bits * 30103).div_ceil(100_000) + 1
}

/// Arbitrary-precision binary float with an explicit mantissa length.
#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(v: BigFloat, prec: usize) -> Real {
        debug_assert!(!v.is_nan(), "NaN escaped into Real");
        Real { v, prec }
    }

    pub fn zero(prec: usize) -> Real {
        let prec = word_precision(prec);
        Real::wrap(BigFloat::from_word(0, prec), prec)
    }

    pub fn one(prec: usize) -> Real {
        Real::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Real {
        let prec = word_precision(prec);
        Real::wrap(BigFloat::from_i64(v, prec), prec)
    }

    /// Exact for any finite `v` (precision is at least 64 bits).
    pub fn from_f64(v: f64, prec: usize) -> Real {
        assert!(v.is_finite(), "non-finite f64 {v}");
        let prec = word_precision(prec);
        Real::wrap(BigFloat::from_f64(v, prec), prec)
    }

    /// Correctly rounded (to nearest, ties to even) conversion.
    pub fn from_rational(r: &BigRational, prec: usize) -> Real {
        let prec = word_precision(prec);
        Real::wrap(round_rational(r, prec), prec)
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn signum(&self) -> i32 {
        if self.v.is_zero() {
            0
        } else if self.v.is_negative() {
            -1
        } else {
            1
        }
    }

    fn joint(&self, other: &Real) -> usize {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &Real) -> Real {
        let p = self.joint(other);
        Real::wrap(self.v.add(&other.v, p, RM), p)
    }

    pub fn sub(&self, other: &Real) -> Real {
        let p = self.joint(other);
        Real::wrap(self.v.sub(&other.v, p, RM), p)
    }

    pub fn mul(&self, other: &Real) -> Real {
        let p = self.joint(other);
        Real::wrap(self.v.mul(&other.v, p, RM), p)
    }

    pub fn div(&self, other: &Real) -> Real {
        assert!(!other.is_zero(), "division by zero");
        let p = self.joint(other);
        Real::wrap(self.v.div(&other.v, p, RM), p)
    }

    pub fn neg(&self) -> Real {
        Real::wrap(-self.v.clone(), self.prec)
    }

    pub fn abs(&self) -> Real {
        Real::wrap(self.v.abs(), self.prec)
    }

    pub fn exp(&self) -> Real {
        let p = self.prec;
        Real::wrap(with_consts(|cc| self.v.exp(p, RM, cc)), p)
    }

    pub fn ln(&self) -> Result<Real> {
        if self.signum() <= 0 {
            return Err(Error::InvalidArgument("logarithm of a non-positive number".into()));
        }
        let p = self.prec;
        Ok(Real::wrap(with_consts(|cc| self.v.ln(p, RM, cc)), p))
    }

    pub fn sqrt(&self) -> Result<Real> {
        if self.signum() < 0 {
            return Err(Error::InvalidArgument("square root of a negative number".into()));
        }
        Ok(Real::wrap(self.v.sqrt(self.prec, RM), self.prec))
    }

    pub fn cmp_value(&self, other: &Real) -> Ordering {
        let c = self.v.cmp(&other.v).expect("comparison involving NaN");
        c.cmp(&0)
    }

    /// Exact value as a rational number.
    pub fn to_rational(&self) -> BigRational {
        if self.v.is_zero() {
            return BigRational::zero();
        }
        assert!(self.is_finite(), "non-finite value has no rational form");
        let (words, _, sign, e, _) = self.v.as_raw_parts().expect("finite float");
        let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
        let mantissa = BigInt::from(BigUint::from_bytes_le(&bytes));
        let shift = e as i64 - (words.len() * WORD_BITS) as i64;
        let mut r = if shift >= 0 {
            BigRational::from_integer(mantissa << shift as usize)
        } else {
            BigRational::new(mantissa, BigInt::one() << (-shift) as usize)
        };
        if sign == Sign::Neg {
            r = -r;
        }
        r
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Shortest-safe scientific representation: enough significant digits
    /// that [`Real::parse`] at the same precision restores the value exactly.
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = decimal_digits(self.prec);
        let r = self.to_rational();
        let neg = r.is_negative();
        let r = r.abs();
        let est = (r.numer().bits() as f64 - r.denom().bits() as f64) * std::f64::consts::LOG10_2;
        let mut exp10 = est.floor() as i64;
        let lower = BigInt::from(10u32).pow(digits as u32 - 1);
        let upper = BigInt::from(10u32).pow(digits as u32);
        let mantissa = loop {
            let shift = digits as i64 - 1 - exp10;
            let scaled = if shift >= 0 {
                &r * BigRational::from_integer(BigInt::from(10u32).pow(shift as u32))
            } else {
                &r / BigRational::from_integer(BigInt::from(10u32).pow((-shift) as u32))
            };
            let m = round_half_even(&scaled);
            if m >= upper {
                exp10 += 1;
            } else if m < lower {
                exp10 -= 1;
            } else {
                break m;
            }
        };
        let text = mantissa.to_string();
        let trimmed = text.trim_end_matches('0');
        let (head, tail) = trimmed.split_at(1);
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(head);
        if !tail.is_empty() {
            out.push('.');
            out.push_str(tail);
        }
        out.push('e');
        out.push_str(&exp10.to_string());
        out
    }

    /// Parses a decimal (`-1.25e-3`), integer or `p/q` literal, correctly rounded.
    pub fn parse(s: &str, prec: usize) -> Result<Real> {
        let (r, _) = parse_rational_literal(s)?;
        Ok(Real::from_rational(&r, prec))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

fn round_half_even(r: &BigRational) -> BigInt {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    let twice: BigInt = rem * 2;
    match twice.cmp(r.denom()) {
        Ordering::Less => q,
        Ordering::Greater => q + 1,
        Ordering::Equal => {
            if q.is_odd() {
                q + 1
            } else {
                q
            }
        }
    }
}

fn round_rational(r: &BigRational, prec: usize) -> BigFloat {
    if r.is_zero() {
        return BigFloat::from_word(0, prec);
    }
    let sign = if r.is_negative() { Sign::Neg } else { Sign::Pos };
    let num = r.numer().abs().to_biguint().expect("absolute value");
    let den = r.denom().to_biguint().expect("positive denominator");
    let p = prec as i64;
    // |r| = q * 2^k with q in [2^(p-1), 2^p)
    let mut k = num.bits() as i64 - den.bits() as i64 - p;
    loop {
        let (n2, d2) = if k >= 0 {
            (num.clone(), &den << k as usize)
        } else {
            (&num << (-k) as usize, den.clone())
        };
        let (mut q, rem) = n2.div_rem(&d2);
        if q.bits() as i64 > p {
            k += 1;
            continue;
        }
        if (q.bits() as i64) < p {
            k -= 1;
            continue;
        }
        let twice = &rem << 1usize;
        match twice.cmp(&d2) {
            Ordering::Greater => q += 1u32,
            Ordering::Equal if q.is_odd() => q += 1u32,
            _ => {}
        }
        if q.bits() as i64 > p {
            q >>= 1usize;
            k += 1;
        }
        let mut words: Vec<Word> = q.to_u64_digits();
        words.resize(prec / WORD_BITS, 0);
        let e = k + p;
        assert!(
            e > Exponent::MIN as i64 && e < Exponent::MAX as i64,
            "exponent out of range"
        );
        return BigFloat::from_raw_parts(&words, prec, sign, e as Exponent, !rem.is_zero());
    }
}

/// Parses `[-+]int`, `[-+]int/int` or a decimal with optional fraction and
/// exponent. The flag is true when the literal was written as an integer or
/// fraction (and therefore denotes an exact value).
pub fn parse_rational_literal(s: &str) -> Result<(BigRational, bool)> {
    let err = || Error::NumberParse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = parse_int(n).ok_or_else(err)?;
        let d: BigInt = parse_int(d).ok_or_else(err)?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok((BigRational::new(n, d), true));
    }
    let (neg, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((a, b)) => (a, Some(b)),
        None => (mant, None),
    };
    let frac = frac_part.unwrap_or("");
    if int_part.is_empty() && frac.is_empty() {
        return Err(err());
    }
    let all_digits = |x: &str| x.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac) {
        return Err(err());
    }
    let mut exp10: i64 = match exp {
        Some(e) => {
            let (eneg, edigits) = match e.as_bytes().first() {
                Some(b'-') => (true, &e[1..]),
                Some(b'+') => (false, &e[1..]),
                _ => (false, e),
            };
            if edigits.is_empty() || !all_digits(edigits) || edigits.len() > 7 {
                return Err(err());
            }
            let v: i64 = edigits.parse().map_err(|_| err())?;
            if eneg {
                -v
            } else {
                v
            }
        }
        None => 0,
    };
    exp10 -= frac.len() as i64;
    if exp10.abs() > MAX_DECIMAL_EXPONENT {
        return Err(err());
    }
    let digits = format!("{int_part}{frac}");
    let mut n: BigInt = digits.parse().map_err(|_| err())?;
    if neg {
        n = -n;
    }
    let ten = BigInt::from(10u32);
    let r = if exp10 >= 0 {
        BigRational::from_integer(n * ten.pow(exp10 as u32))
    } else {
        BigRational::new(n, ten.pow((-exp10) as u32))
    };
    let exact = frac_part.is_none() && exp.is_none();
    Ok((r, exact))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// A real number that stays an exact rational until an operation forces a
/// float; mixed operations promote the rational to the float's precision.
#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Approx(Real),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(v: i64) -> Scalar {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Scalar {
        Scalar::Exact(BigRational::from_integer(v))
    }

    pub fn ratio(n: i64, d: i64) -> Scalar {
        Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// The exact dyadic value of a finite `f64`.
    pub fn from_f64_exact(v: f64) -> Scalar {
        Scalar::Exact(BigRational::from_float(v).expect("finite f64"))
    }

    pub fn approx(v: f64, prec: usize) -> Scalar {
        Scalar::Approx(Real::from_f64(v, prec))
    }

    /// Parses a literal: integers and `p/q` stay exact, decimals become floats
    /// rounded to `prec` bits.
    pub fn parse(s: &str, prec: usize) -> Result<Scalar> {
        let (r, exact) = parse_rational_literal(s)?;
        Ok(if exact {
            Scalar::Exact(r)
        } else {
            Scalar::Approx(Real::from_rational(&r, prec))
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn precision(&self) -> Option<usize> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx(r) => Some(r.precision()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Approx(r) => r.cmp_value(&Real::one(r.precision())) == Ordering::Equal,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => {
                if r.is_zero() {
                    0
                } else if r.is_negative() {
                    -1
                } else {
                    1
                }
            }
            Scalar::Approx(r) => r.signum(),
        }
    }

    pub fn to_real(&self, prec: usize) -> Real {
        match self {
            Scalar::Exact(r) => Real::from_rational(r, prec),
            Scalar::Approx(r) => r.clone(),
        }
    }

    /// Exact rational value (floats are dyadic rationals).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Approx(r) => r.to_rational(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(r) => r.to_f64(),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(r) => Scalar::Approx(r.abs()),
        }
    }

    pub fn recip(&self) -> Scalar {
        Scalar::one() / self
    }

    /// `e^self`; exact zero maps to exact one.
    pub fn exp(&self, prec: usize) -> Scalar {
        if self.is_exact() && self.is_zero() {
            return Scalar::one();
        }
        Scalar::Approx(self.to_real(prec).exp())
    }

    /// Natural logarithm; exact one maps to exact zero.
    pub fn ln(&self, prec: usize) -> Result<Scalar> {
        if self.is_exact() && self.is_one() {
            return Ok(Scalar::zero());
        }
        Ok(Scalar::Approx(self.to_real(prec).ln()?))
    }

    /// Square root; exact when the argument is the square of a rational.
    pub fn sqrt(&self, prec: usize) -> Result<Scalar> {
        if let Scalar::Exact(r) = self {
            if r.is_negative() {
                return Err(Error::InvalidArgument("square root of a negative number".into()));
            }
            let n = r.numer().sqrt();
            let d = r.denom().sqrt();
            if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
                return Ok(Scalar::Exact(BigRational::new(n, d)));
            }
        }
        Ok(Scalar::Approx(self.to_real(prec).sqrt()?))
    }

    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => (self - other).signum().cmp(&0),
        }
    }

    pub fn max_value(self, other: Scalar) -> Scalar {
        if other.cmp_value(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// `max(self, 1/self)` for a positive value.
    pub fn symmetric_magnitude(&self) -> Scalar {
        debug_assert!(self.signum() > 0);
        if self.cmp_value(&Scalar::one()) == Ordering::Less {
            self.recip()
        } else {
            self.clone()
        }
    }

    /// `|a - b| / max(|a|, |b|)`, zero when both vanish.
    pub fn relative_difference(&self, other: &Scalar) -> f64 {
        let diff = (self - other).abs();
        if diff.is_zero() {
            return 0.0;
        }
        let scale = self.abs().max_value(other.abs());
        (diff / &scale).to_f64()
    }

    pub fn approx_eq(&self, other: &Scalar, rel_tol: f64) -> bool {
        self.relative_difference(other) <= rel_tol
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(r) => f.write_str(&r.to_decimal_string()),
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Scalar {
        Scalar::from_int(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Scalar {
        Scalar::Exact(v)
    }
}

impl From<Real> for Scalar {
    fn from(v: Real) -> Scalar {
        Scalar::Approx(v)
    }
}

fn combine(
    a: &Scalar,
    b: &Scalar,
    exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
    approx: impl FnOnce(&Real, &Real) -> Real,
) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Scalar::Exact(exact(x, y)),
        (Scalar::Approx(x), Scalar::Approx(y)) => Scalar::Approx(approx(x, y)),
        (Scalar::Exact(x), Scalar::Approx(y)) => {
            Scalar::Approx(approx(&Real::from_rational(x, y.precision()), y))
        }
        (Scalar::Approx(x), Scalar::Exact(y)) => {
            Scalar::Approx(approx(x, &Real::from_rational(y, x.precision())))
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $exact:expr, $approx:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                combine(self, rhs, $exact, $approx)
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                combine(&self, &rhs, $exact, $approx)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                combine(&self, rhs, $exact, $approx)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                combine(self, &rhs, $exact, $approx)
            }
        }
    };
}

scalar_binop!(Add, add, |x, y| x + y, |x, y| x.add(y));
scalar_binop!(Sub, sub, |x, y| x - y, |x, y| x.sub(y));
scalar_binop!(Mul, mul, |x, y| x * y, |x, y| x.mul(y));
scalar_binop!(
    Div,
    div,
    |x, y| {
        assert!(!y.is_zero(), "division by exact zero");
        x / y
    },
    |x, y| x.div(y)
);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(r) => Scalar::Approx(r.neg()),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Scalar,
    compensation: Scalar,
}

impl Default for CompensatedSum {
    fn default() -> Self {
        CompensatedSum {
            sum: Scalar::zero(),
            compensation: Scalar::zero(),
        }
    }
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: &Scalar) {
        let t = &self.sum + x;
        if !t.is_exact() {
            let c = if self.sum.abs().cmp_value(&x.abs()) != Ordering::Less {
                (&self.sum - &t) + x
            } else {
                (x - &t) + &self.sum
            };
            self.compensation = &self.compensation + &c;
        }
        self.sum = t;
    }

    pub fn value(&self) -> Scalar {
        &self.sum + &self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_digits_for_common_precisions() {
        assert_eq!(decimal_digits(53), 17);
        assert_eq!(decimal_digits(128), 40);
    }

    #[test]
    fn rational_rounding_is_exact_for_dyadics() {
        let r = BigRational::new(BigInt::from(3), BigInt::from(8));
        assert_eq!(Real::from_rational(&r, 128).to_rational(), r);
        let big = BigRational::from_integer(BigInt::from(1u64) << 200usize);
        assert_eq!(Real::from_rational(&big, 128).to_rational(), big);
    }

    #[test]
    fn rational_rounding_ties_to_even() {
        // 2^64 + 1 at 64 bits sits exactly between two neighbours.
        let two64 = BigInt::one() << 64usize;
        let r = BigRational::from_integer(&two64 + 1);
        assert_eq!(Real::from_rational(&r, 64).to_rational(), BigRational::from_integer(two64.clone()));
        let r3 = BigRational::from_integer(&two64 + 3);
        assert_eq!(
            Real::from_rational(&r3, 64).to_rational(),
            BigRational::from_integer(&two64 + 4)
        );
    }

    #[test]
    fn third_formats_with_forty_digits() {
        let third = Real::from_rational(&BigRational::new(1.into(), 3.into()), 128);
        let s = third.to_decimal_string();
        assert!(s.starts_with("3.33333333333333333333333333333333333"), "{s}");
        assert!(s.ends_with("e-1") && s.len() == "3.".len() + 39 + "e-1".len());
        let back = Real::parse(&s, 128).unwrap();
        assert_eq!(back.to_rational(), third.to_rational());
    }

    #[test]
    fn formats_simple_values() {
        assert_eq!(Real::from_i64(0, 128).to_decimal_string(), "0");
        assert_eq!(Real::from_i64(3, 128).to_decimal_string(), "3e0");
        assert_eq!(Real::from_f64(-0.5, 128).to_decimal_string(), "-5e-1");
        assert_eq!(Real::from_i64(1000, 128).to_decimal_string(), "1e3");
    }

    #[test]
    fn parse_literals() {
        assert!(parse_rational_literal("1.5e2").unwrap().0 == BigRational::from_integer(150.into()));
        assert!(parse_rational_literal("-3/6").unwrap() == (BigRational::new((-1).into(), 2.into()), true));
        assert!(parse_rational_literal(".5").unwrap().0 == BigRational::new(1.into(), 2.into()));
        for bad in ["", "abc", "1e", "1/0", "--1", "1.2.3", "e5", "1e99999999"] {
            assert!(parse_rational_literal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_exp_and_ln_shortcuts() {
        assert!(Scalar::zero().exp(128).is_exact());
        assert!(Scalar::one().ln(128).unwrap().is_zero());
        let e = Scalar::one().exp(128);
        let back = e.ln(128).unwrap();
        assert!(back.approx_eq(&Scalar::one(), 1e-35));
    }

    #[test]
    fn mixed_arithmetic_promotes() {
        let x = Scalar::ratio(1, 3) + Scalar::approx(1.0, 128);
        assert_eq!(x.precision(), Some(128));
        assert!(x.approx_eq(&Scalar::ratio(4, 3), 1e-37));
    }

    #[test]
    fn exact_sqrt_of_square() {
        assert!(matches!(Scalar::ratio(9, 4).sqrt(128).unwrap(), Scalar::Exact(r) if r == BigRational::new(3.into(), 2.into())));
        assert!(!Scalar::from_int(2).sqrt(128).unwrap().is_exact());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        let big = Scalar::approx(1e40, 64);
        let small = Scalar::approx(1.0, 64);
        s.add(&big);
        s.add(&small);
        s.add(&(-&big));
        assert!(s.value().approx_eq(&Scalar::one(), 1e-15));
    }
}
