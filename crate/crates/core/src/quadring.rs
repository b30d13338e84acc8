//! Exact arithmetic for elements (x + y*sqrt(-d)) / (sqrt 2)^e of an
//! imaginary quadratic field, with e restricted to {0, 1}.
//!
//! Only half-integer denominators sqrt(2) occur in the identities this
//! crate checks; general 2-adic denominators are rejected at construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// An element (x + y*sqrt(-d)) / (sqrt 2)^e with e in {0, 1}.
///
/// When e = 1 the numerator norm x^2 + d*y^2 must be even so the element
/// norm stays an integer. For odd d this is the parity condition x = y
/// (mod 2); for even d it forces x even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfQuadInt {
    d: BigInt,
    x: BigInt,
    y: BigInt,
    e: u8,
}

impl HalfQuadInt {
    pub fn new(d: BigInt, x: BigInt, y: BigInt, e: u8) -> Result<Self> {
        if d < BigInt::one() {
            return Err(Error::Domain(format!("field parameter d must be >= 1, got {d}")));
        }
        if e > 1 {
            return Err(Error::Domain(format!("exponent e must be 0 or 1, got {e}")));
        }
        if e == 1 {
            let norm_num = &x * &x + &d * &y * &y;
            if norm_num.is_odd() {
                return Err(Error::Domain(format!(
                    "({x} + {y}*sqrt(-{d}))/sqrt(2) is not an algebraic integer"
                )));
            }
        }
        Ok(HalfQuadInt { d, x, y, e })
    }

    pub fn from_i64(d: i64, x: i64, y: i64, e: u8) -> Result<Self> {
        Self::new(BigInt::from(d), BigInt::from(x), BigInt::from(y), e)
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn e(&self) -> u8 {
        self.e
    }

    /// (x^2 + d*y^2) / 2^e, always an exact integer.
    pub fn norm(&self) -> BigInt {
        let num = &self.x * &self.x + &self.d * &self.y * &self.y;
        if self.e == 1 {
            num / 2
        } else {
            num
        }
    }

    pub fn conjugate(&self) -> HalfQuadInt {
        HalfQuadInt {
            d: self.d.clone(),
            x: self.x.clone(),
            y: -&self.y,
            e: self.e,
        }
    }

    pub fn negate(&self) -> HalfQuadInt {
        HalfQuadInt {
            d: self.d.clone(),
            x: -&self.x,
            y: -&self.y,
            e: self.e,
        }
    }
}

/// Exact product. A combined exponent of 2 is renormalized by dividing
/// both components by 2 (sqrt(2)*sqrt(2) = 2); the required evenness is
/// checked, not assumed.
pub fn multiply(u: &HalfQuadInt, v: &HalfQuadInt) -> Result<HalfQuadInt> {
    if u.d != v.d {
        return Err(Error::Domain(format!(
            "cannot multiply elements of Q(sqrt(-{})) and Q(sqrt(-{}))",
            u.d, v.d
        )));
    }
    let mut x = &u.x * &v.x - &u.d * &u.y * &v.y;
    let mut y = &u.x * &v.y + &u.y * &v.x;
    let mut e = u.e + v.e;
    if e == 2 {
        if x.is_odd() || y.is_odd() {
            return Err(Error::Invariant(format!(
                "odd components ({x}, {y}) while renormalizing sqrt(2)^2"
            )));
        }
        x /= 2;
        y /= 2;
        e = 0;
    }
    HalfQuadInt::new(u.d.clone(), x, y, e)
}

/// Exact odd power of an element with e = 1, renormalized back to e = 1.
/// The numerator power is always divisible by 2^((t-1)/2); a failed
/// division signals a bug, not bad input.
pub fn power(base: &HalfQuadInt, t: u64) -> Result<HalfQuadInt> {
    if t % 2 == 0 || t == 0 {
        return Err(Error::Domain(format!("power exponent must be odd, got {t}")));
    }
    if base.e != 1 {
        return Err(Error::Domain("power expects a base with e = 1".into()));
    }
    // numerator (x + y*omega)^t by square and multiply
    let mut rx = BigInt::one();
    let mut ry = BigInt::zero();
    let mut bx = base.x.clone();
    let mut by = base.y.clone();
    let mut exp = t;
    while exp > 0 {
        if exp & 1 == 1 {
            let nx = &rx * &bx - &base.d * &ry * &by;
            let ny = &rx * &by + &ry * &bx;
            rx = nx;
            ry = ny;
        }
        exp >>= 1;
        if exp > 0 {
            let nx = &bx * &bx - &base.d * &by * &by;
            let ny = BigInt::from(2) * &bx * &by;
            bx = nx;
            by = ny;
        }
    }
    let shift = (t - 1) / 2;
    let denom = BigInt::one() << shift;
    let (qx, remx) = rx.div_rem(&denom);
    let (qy, remy) = ry.div_rem(&denom);
    if !remx.is_zero() || !remy.is_zero() {
        return Err(Error::Invariant(format!(
            "power numerator ({rx}, {ry}) not divisible by 2^{shift}"
        )));
    }
    HalfQuadInt::new(base.d.clone(), qx, qy, 1)
}
