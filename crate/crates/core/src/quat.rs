//! Hamilton quaternions over a generic scalar field.
//!
//! The same arithmetic runs on `f64` (the default) and on exact rationals,
//! so structural decisions in the test-suite can be anchored without
//! rounding. Similarity-class canonicalization needs square roots and is
//! only provided for `f64`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default absolute tolerance for component-wise comparison.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Scalar field carried by quaternion components.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Num + Neg<Output = Self> {
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact rational from the binary value of a finite `f64`.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite component {x}")))
}

/// Parses `"p/q"` or `"p"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational literal {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => match s.parse::<BigInt>() {
            Ok(p) => Ok(BigRational::from_integer(p)),
            Err(_) => s.parse::<f64>().map_err(|_| bad()).and_then(rational_from_f64),
        },
    }
}

/// `a0 + a1 i + a2 j + a3 k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Quaternion<T = f64> {
    pub a0: T,
    pub a1: T,
    pub a2: T,
    pub a3: T,
}

pub type ExactQuaternion = Quaternion<BigRational>;

impl<T: Scalar> Quaternion<T> {
    pub fn new(a0: T, a1: T, a2: T, a3: T) -> Self {
        Self { a0, a1, a2, a3 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn real(a0: T) -> Self {
        Self::new(a0, T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.a1.is_zero() && self.a2.is_zero() && self.a3.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(
            self.a0.clone(),
            -self.a1.clone(),
            -self.a2.clone(),
            -self.a3.clone(),
        )
    }

    /// `|q|^2`, exact in the scalar field.
    pub fn norm_sqr(&self) -> T {
        self.a0.clone() * self.a0.clone()
            + self.a1.clone() * self.a1.clone()
            + self.a2.clone() * self.a2.clone()
            + self.a3.clone() * self.a3.clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(
            self.a0.clone() * s.clone(),
            self.a1.clone() * s.clone(),
            self.a2.clone() * s.clone(),
            self.a3.clone() * s.clone(),
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conj();
        Ok(Self::new(
            c.a0 / n2.clone(),
            c.a1 / n2.clone(),
            c.a2 / n2.clone(),
            c.a3 / n2,
        ))
    }

    /// Hamilton product `self * rhs`.
    pub fn mul_ref(&self, rhs: &Self) -> Self {
        let (a0, a1, a2, a3) = (&self.a0, &self.a1, &self.a2, &self.a3);
        let (b0, b1, b2, b3) = (&rhs.a0, &rhs.a1, &rhs.a2, &rhs.a3);
        let m = |x: &T, y: &T| x.clone() * y.clone();
        Self::new(
            m(a0, b0) - m(a1, b1) - m(a2, b2) - m(a3, b3),
            m(a0, b1) + m(a1, b0) + m(a2, b3) - m(a3, b2),
            m(a0, b2) - m(a1, b3) + m(a2, b0) + m(a3, b1),
            m(a0, b3) + m(a1, b2) - m(a2, b1) + m(a3, b0),
        )
    }

    pub fn add_ref(&self, rhs: &Self) -> Self {
        Self::new(
            self.a0.clone() + rhs.a0.clone(),
            self.a1.clone() + rhs.a1.clone(),
            self.a2.clone() + rhs.a2.clone(),
            self.a3.clone() + rhs.a3.clone(),
        )
    }

    pub fn sub_ref(&self, rhs: &Self) -> Self {
        Self::new(
            self.a0.clone() - rhs.a0.clone(),
            self.a1.clone() - rhs.a1.clone(),
            self.a2.clone() - rhs.a2.clone(),
            self.a3.clone() - rhs.a3.clone(),
        )
    }

    /// True when the j and k parts vanish.
    pub fn is_complex(&self) -> bool {
        self.a2.is_zero() && self.a3.is_zero()
    }

    pub fn to_f64(&self) -> Quaternion<f64> {
        Quaternion::new(
            self.a0.to_f64(),
            self.a1.to_f64(),
            self.a2.to_f64(),
            self.a3.to_f64(),
        )
    }

    /// Commutation test `self * other == other * self`, exact in the field.
    pub fn commutes_with(&self, other: &Self) -> bool {
        self.mul_ref(other) == other.mul_ref(self)
    }
}

impl Quaternion<f64> {
    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im, 0.0, 0.0)
    }

    /// Splits `q = z1 + z2 j` into its two complex parts.
    pub fn split(&self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.a0, self.a1),
            Complex64::new(self.a2, self.a3),
        )
    }

    pub fn from_split(z1: Complex64, z2: Complex64) -> Self {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }

    pub fn norm(&self) -> f64 {
        let s = self.a0.abs().max(self.a1.abs()).max(self.a2.abs()).max(self.a3.abs());
        if s == 0.0 {
            return 0.0;
        }
        // Divide rather than multiply by 1/s, which overflows for subnormal s.
        let (a, b, c, d) = (self.a0 / s, self.a1 / s, self.a2 / s, self.a3 / s);
        s * (a * a + b * b + c * c + d * d).sqrt()
    }

    pub fn imag_norm(&self) -> f64 {
        (self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3).sqrt()
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        (self.a0 - other.a0).abs() <= eps
            && (self.a1 - other.a1).abs() <= eps
            && (self.a2 - other.a2).abs() <= eps
            && (self.a3 - other.a3).abs() <= eps
    }

    /// The complex number `Re(q) + |Im(q)| i` representing the similarity
    /// class `{ mu^-1 q mu }`.
    pub fn canonical_rep(&self) -> Complex64 {
        Complex64::new(self.a0, self.imag_norm())
    }

    /// A unit quaternion `mu` with `mu * q * mu^-1 == canonical_rep(q)`.
    pub fn canonicalizer(&self) -> Quaternion<f64> {
        let im = self.imag_norm();
        if im == 0.0 {
            return Quaternion::one();
        }
        let u = Quaternion::new(0.0, self.a1 / im, self.a2 / im, self.a3 / im);
        // (1 - w u) u = w (1 - w u) for unit imaginary u, w.
        let r = Quaternion::one().sub_ref(&Quaternion::i().mul_ref(&u));
        let n = r.norm();
        if n < 1e-8 {
            // u is (numerically) -i; j rotates -i onto i.
            return Quaternion::j();
        }
        r.scale(&(1.0 / n))
    }

    /// Replaces negative zeros by positive ones so that output is canonical.
    pub fn clean_zero(&self) -> Self {
        let f = |x: f64| if x == 0.0 { 0.0 } else { x };
        Self::new(f(self.a0), f(self.a1), f(self.a2), f(self.a3))
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.sub_ref(&rhs)
    }
}

impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<'a, T: Scalar> Mul<&'a Quaternion<T>> for &'a Quaternion<T> {
    type Output = Quaternion<T>;
    fn mul(self, rhs: &'a Quaternion<T>) -> Quaternion<T> {
        self.mul_ref(rhs)
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a0, -self.a1, -self.a2, -self.a3)
    }
}

impl fmt::Display for Quaternion<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.a0, self.a1, self.a2, self.a3)
    }
}

impl Serialize for Quaternion<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let q = self.clean_zero();
        [q.a0, q.a1, q.a2, q.a3].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a0, a1, a2, a3] = <[f64; 4]>::deserialize(d)?;
        Ok(Self::new(a0, a1, a2, a3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion<f64>;

    fn q(a0: f64, a1: f64, a2: f64, a3: f64) -> Q {
        Q::new(a0, a1, a2, a3)
    }

    #[test]
    fn unit_products() {
        assert_eq!(Q::i() * Q::j(), Q::k());
        assert_eq!(Q::j() * Q::i(), -Q::k());
        assert_eq!(Q::i() * Q::i(), -Q::one());
        assert_eq!(Q::i() * Q::j() * Q::k(), -Q::one());
    }

    #[test]
    fn distributive_expansion() {
        // (1+i)(1+j) = 1 + j + i + ij = 1 + i + j + k
        assert_eq!(q(1., 1., 0., 0.) * q(1., 0., 1., 0.), q(1., 1., 1., 1.));
    }

    #[test]
    fn conjugation() {
        assert_eq!(q(1., 2., 3., 4.).conj(), q(1., -2., -3., -4.));
        let x = q(0.3, -1.0, 2.5, 7.0);
        assert_eq!(x.conj().conj(), x);
        assert_eq!((Q::i() * Q::j()).conj(), -Q::k());
        assert_eq!(Q::j().conj() * Q::i().conj(), -Q::k());
    }

    #[test]
    fn norms() {
        assert_eq!(q(1., 1., 1., 1.).norm(), 2.0);
        assert_eq!(Q::zero().norm(), 0.0);
        let p = q(1., 1., 0., 0.);
        assert!(((p * Q::j()).norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inverses() {
        assert_eq!(Q::j().inverse().unwrap(), -Q::j());
        assert_eq!(Q::real(2.0).inverse().unwrap(), Q::real(0.5));
        let p = q(1., 1., 0., 0.);
        assert!((p.inverse().unwrap() * p).approx_eq(&Q::one(), 1e-15));
        assert_eq!(Q::zero().inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn canonical_representatives() {
        assert_eq!(Q::j().canonical_rep(), Complex64::new(0.0, 1.0));
        assert_eq!(Q::real(3.0).canonical_rep(), Complex64::new(3.0, 0.0));
        assert_eq!(q(1., -2., 0., 0.).canonical_rep(), Complex64::new(1.0, 2.0));
        // mu = (j - i)/|j - i| sends j to -i; (i + j)/|i + j| sends it to i.
        let mu = (Q::j() - Q::i()).scale(&(1.0 / 2f64.sqrt()));
        assert!((mu.inverse().unwrap() * Q::j() * mu).approx_eq(&-Q::i(), 1e-15));
        let nu = (Q::j() + Q::i()).scale(&(1.0 / 2f64.sqrt()));
        assert!((nu.inverse().unwrap() * Q::j() * nu).approx_eq(&Q::i(), 1e-15));
    }

    #[test]
    fn canonicalizer_rotates_onto_rep() {
        for x in [q(1., -2., 0., 0.), q(0.5, 0., 0., -3.), q(-1., 1., 2., 3.), Q::real(2.0)] {
            let mu = x.canonicalizer();
            let y = mu * x * mu.inverse().unwrap();
            assert!(y.approx_eq(&Q::from_complex(x.canonical_rep()), 1e-12), "{x}");
        }
    }

    #[test]
    fn exact_arithmetic() {
        let half = parse_rational("1/2").unwrap();
        let a = ExactQuaternion::new(half.clone(), half.clone(), half.clone(), half);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul_ref(&inv), ExactQuaternion::one());
        assert!(ExactQuaternion::zero().inverse().is_err());
        assert_eq!(parse_rational("3").unwrap(), BigRational::from_integer(3.into()));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn json_shape() {
        let s = serde_json::to_string(&q(1., -0.0, 2.5, 0.)).unwrap();
        assert_eq!(s, "[1.0,0.0,2.5,0.0]");
        let back: Q = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q(1., 0., 2.5, 0.));
    }
}
