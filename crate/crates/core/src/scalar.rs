//! Exact arithmetic in the ordered field Q(√2).
//!
//! Every probability handled by this crate is a number `a + b√2` with
//! rational `a` and `b`. Rationals are arbitrary precision and kept in lowest
//! terms, so two scalars are equal exactly when their coefficients are.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical form (positive denominator,
/// coprime numerator and denominator).
pub type Rational = BigRational;

/// The real number `rat + root2·√2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    rat: Rational,
    root2: Rational,
}

fn rational_sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Scalar {
    pub fn new(rat: Rational, root2: Rational) -> Self {
        Scalar { rat, root2 }
    }

    pub fn zero() -> Self {
        Scalar::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::integer(1)
    }

    /// √2 itself.
    pub fn sqrt2() -> Self {
        Scalar::new(Rational::zero(), Rational::one())
    }

    pub fn integer(n: i64) -> Self {
        Scalar::new(Rational::from_integer(BigInt::from(n)), Rational::zero())
    }

    /// The rational `num/den`.
    ///
    /// Panics if `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::new(
            Rational::new(BigInt::from(num), BigInt::from(den)),
            Rational::zero(),
        )
    }

    /// `(a_num/a_den) + (b_num/b_den)·√2`.
    pub fn from_parts(a_num: i64, a_den: i64, b_num: i64, b_den: i64) -> Self {
        Scalar::new(
            Rational::new(BigInt::from(a_num), BigInt::from(a_den)),
            Rational::new(BigInt::from(b_num), BigInt::from(b_den)),
        )
    }

    /// Rational coefficient `a`.
    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    /// Coefficient `b` of √2.
    pub fn root2(&self) -> &Rational {
        &self.root2
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.root2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.root2.is_zero()
    }

    /// `a − b√2`.
    pub fn conjugate(&self) -> Self {
        Scalar::new(self.rat.clone(), -self.root2.clone())
    }

    /// Field norm `a² − 2b²`, the product of the scalar with its conjugate.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - Rational::from_integer(BigInt::from(2)) * &self.root2 * &self.root2
    }

    /// Sign of the real number `a + b√2` as −1, 0 or +1.
    pub fn sign(&self) -> i8 {
        let sa = rational_sign(&self.rat);
        let sb = rational_sign(&self.root2);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // a and b have opposite signs: |a| vs |b|√2 decides, i.e. a² vs 2b².
        sa * rational_sign(&self.norm())
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // 1/(a + b√2) = (a − b√2)/(a² − 2b²); the norm is nonzero because √2 is irrational.
        let n = self.norm();
        Ok(Scalar::new(&self.rat / &n, -(&self.root2 / &n)))
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    /// Double-precision approximation.
    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        let b = self.root2.to_f64().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }

    /// Parse the textual form `rational ( ("+"|"-") rational "*" "sqrt2" )?`,
    /// ignoring whitespace.
    pub fn parse(text: &str) -> Result<Self> {
        Parser::new(text).scalar()
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::integer(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::new(r, Rational::zero())
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign().cmp(&0)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root2.is_zero() {
            return write!(f, "{}", self.rat);
        }
        let op = if self.root2.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}*sqrt2", self.rat, op, self.root2.abs())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse(s)
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect(),
            pos: 0,
            end: text.len(),
        }
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.end, |&(i, _)| i)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        if self.pos == start {
            return self.error("expected digits");
        }
        Ok(s.parse().expect("ascii digits form an integer"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let negative = self.eat('-');
        let num = self.digits()?;
        let den = if self.eat('/') {
            let at = self.pos;
            let d = self.digits()?;
            if d.is_zero() {
                self.pos = at;
                return self.error("zero denominator");
            }
            d
        } else {
            BigInt::one()
        };
        let r = Rational::new(num, den);
        Ok(if negative { -r } else { r })
    }

    fn scalar(&mut self) -> Result<Scalar> {
        let rat = self.rational()?;
        let root2 = match self.peek() {
            None => Rational::zero(),
            Some(op @ ('+' | '-')) => {
                self.pos += 1;
                let b = self.rational()?;
                if !self.eat('*') {
                    return self.error("expected `*sqrt2`");
                }
                for expected in "sqrt2".chars() {
                    if !self.eat(expected) {
                        return self.error("expected `sqrt2`");
                    }
                }
                if op == '-' {
                    -b
                } else {
                    b
                }
            }
            Some(c) => return self.error(format!("unexpected character `{c}`")),
        };
        if let Some(c) = self.peek() {
            return self.error(format!("trailing character `{c}`"));
        }
        Ok(Scalar::new(rat, root2))
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.rat, -self.root2)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.rat.clone(), -self.root2.clone())
    }
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.rat + &rhs.rat, &self.root2 + &rhs.root2)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar::new(&self.rat - &rhs.rat, &self.root2 - &rhs.root2)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let two = Rational::from_integer(BigInt::from(2));
        Scalar::new(
            &self.rat * &rhs.rat + two * &self.root2 * &rhs.root2,
            &self.rat * &rhs.root2 + &rhs.rat * &self.root2,
        )
    }
}

/// Panics on a zero divisor; use [`Scalar::checked_div`] to get an error instead.
impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_binop {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { (&self).$m(&rhs) }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar { (&self).$m(rhs) }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar { self.$m(&rhs) }
        }
    )*};
}

forward_binop!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.rat += &rhs.rat;
        self.root2 += &rhs.root2;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self += &rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.rat -= &rhs.rat;
        self.root2 -= &rhs.root2;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self -= &rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn sqrt2_terms_cancel() {
        assert_eq!(s("1/4+1/8*sqrt2") + s("1/4-1/8*sqrt2"), Scalar::ratio(1, 2));
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(s("1+1*sqrt2") * s("1-1*sqrt2"), Scalar::integer(-1));
    }

    #[test]
    fn forced_bell_combination() {
        // ¼(2−√2) + ½ − ¼(2+√2) = ½(1−√2)
        let lhs = s("1/2-1/4*sqrt2") + Scalar::ratio(1, 2) - s("1/2+1/4*sqrt2");
        assert_eq!(lhs, s("1/2-1/2*sqrt2"));
    }

    #[test]
    fn division() {
        let one_plus = s("1+1*sqrt2");
        assert_eq!(Scalar::one().checked_div(&one_plus).unwrap(), s("-1+1*sqrt2"));
        assert_eq!(
            s("1+1/2*sqrt2").checked_div(&Scalar::integer(2)).unwrap(),
            s("1/2+1/4*sqrt2")
        );
        assert_eq!(one_plus.checked_div(&one_plus).unwrap(), Scalar::one());
        assert_eq!(one_plus.checked_div(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn signs() {
        assert_eq!(s("1/4-1/4*sqrt2").sign(), -1);
        assert_eq!(Scalar::zero().sign(), 0);
        assert_eq!(s("3-2*sqrt2").sign(), 1);
        assert_eq!(s("-3+2*sqrt2").sign(), -1);
        assert_eq!(s("0+1*sqrt2").sign(), 1);
        assert_eq!(s("-1/2").sign(), -1);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(
            s("1/8-1/8*sqrt2"),
            Scalar::from_parts(1, 8, -1, 8)
        );
        assert_eq!(s("0"), Scalar::zero());
        assert_eq!(s("2/8").to_string(), "1/4");
        assert_eq!(s(" 1 / 8 - 1 / 8 * sqrt 2 ").to_string(), "1/8-1/8*sqrt2");
        assert_eq!(s("-1/4+1/4*sqrt2").to_string(), "-1/4+1/4*sqrt2");
        assert_eq!(Scalar::sqrt2().to_string(), "0+1*sqrt2");
        assert_eq!(s("1+-1/2*sqrt2").to_string(), "1-1/2*sqrt2");
    }

    #[test]
    fn parse_errors_carry_position() {
        let at = |t: &str| match Scalar::parse(t) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("expected parse error for {t:?}, got {other:?}"),
        };
        assert_eq!(at(""), 0);
        assert_eq!(at("1/0"), 2);
        assert_eq!(at("1/2+3"), 5);
        assert_eq!(at("1/2x"), 3);
        assert_eq!(at("1+2*sqrt3"), 8);
        assert_eq!(at("abc"), 0);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
    }

    fn scalar() -> impl Strategy<Value = Scalar> {
        (small_rational(), small_rational()).prop_map(|(a, b)| Scalar::new(a, b))
    }

    proptest! {
        #[test]
        fn field_axioms(x in scalar(), y in scalar(), z in scalar()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert_eq!(&x + &(-&x), Scalar::zero());
            prop_assert_eq!(&x * &Scalar::one(), x.clone());
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.recip().unwrap(), Scalar::one());
            }
        }

        #[test]
        fn total_order(x in scalar(), y in scalar(), z in scalar()) {
            let relations = [x < y, x == y, x > y];
            prop_assert_eq!(relations.iter().filter(|&&r| r).count(), 1);
            if x < y {
                prop_assert!(&x + &z < &y + &z);
                if z.is_positive() {
                    prop_assert!(&x * &z < &y * &z);
                }
            }
        }

        #[test]
        fn sign_matches_float(x in scalar()) {
            let v = x.to_f64();
            if v.abs() > 1e-6 {
                prop_assert_eq!(x.sign(), if v > 0.0 { 1 } else { -1 });
            }
        }

        #[test]
        fn parse_inverts_format(x in scalar()) {
            prop_assert_eq!(Scalar::parse(&x.to_string()).unwrap(), x);
        }
    }
}
