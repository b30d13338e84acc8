//! Binary quadratic forms of negative discriminant: reduction, enumeration,
//! class numbers, Gauss composition and element orders.
//!
//! The form class group is the computational stand-in for the ideal class
//! group; enumeration of primitive reduced forms is the single source of
//! truth for class numbers. Coefficients are kept in i64 with i128
//! intermediates; the enumeration bound guarantees no overflow.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intarith::{self, FactorConfig};

/// Default cap on |D| for enumeration.
pub const DEFAULT_MAX_ABS_DISC: i64 = 40_000_000_000;

/// Hard cap keeping every intermediate inside i64/i128 range.
const OVERFLOW_SAFE_MAX_ABS_DISC: i64 = 1 << 60;

/// A negative discriminant, D = 0 or 1 (mod 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::Domain(format!("discriminant must be negative, got {d}")));
        }
        if !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::Domain(format!("discriminant must be 0 or 1 mod 4, got {d}")));
        }
        Ok(Discriminant(d))
    }

    pub fn value(&self) -> i64 {
        self.0
    }
}

/// Discriminant of Q(sqrt(-d)) for squarefree d >= 1: -d when d = 3 (mod 4),
/// else -4d.
pub fn field_discriminant(d: &BigInt, config: &FactorConfig) -> Result<Discriminant> {
    if !intarith::is_squarefree(d, config)? {
        return Err(Error::Domain(format!("field parameter {d} is not squarefree")));
    }
    let d64 = d
        .to_i64()
        .ok_or_else(|| Error::ResourceLimit(format!("field parameter {d} exceeds supported range")))?;
    let disc = if d64.rem_euclid(4) == 3 { -d64 } else { -4 * d64 };
    Discriminant::new(disc)
}

/// A primitive positive-definite binary quadratic form a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        if a <= 0 || c <= 0 {
            return Err(Error::Domain(format!(
                "form ({a}, {b}, {c}) is not positive definite"
            )));
        }
        let disc = (b as i128) * (b as i128) - 4 * (a as i128) * (c as i128);
        if disc >= 0 {
            return Err(Error::Domain(format!(
                "form ({a}, {b}, {c}) has nonnegative discriminant"
            )));
        }
        if gcd3(a, b, c) != 1 {
            return Err(Error::Domain(format!("form ({a}, {b}, {c}) is not primitive")));
        }
        Ok(QuadForm { a, b, c })
    }

    pub fn discriminant(&self) -> Discriminant {
        let d = (self.b as i128) * (self.b as i128) - 4 * (self.a as i128) * (self.c as i128);
        Discriminant(d as i64)
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        if b.abs() > a || a > c {
            return false;
        }
        if (b.abs() == a || a == c) && b < 0 {
            return false;
        }
        true
    }

    /// The inverse class representative (a, -b, c), reduced.
    pub fn inverse(&self) -> QuadForm {
        reduce(&QuadForm {
            a: self.a,
            b: -self.b,
            c: self.c,
        })
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    gcd(gcd(a, b), c)
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            return (-a, -1, 0);
        }
        return (a, 1, 0);
    }
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        let tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        let tmp = old_s - q * s;
        old_s = s;
        s = tmp;
        let tmp = old_t - q * t;
        old_t = t;
        t = tmp;
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// g = u*a + v*b + w*c.
fn ext_gcd3(a: i128, b: i128, c: i128) -> (i128, i128, i128, i128) {
    let (g1, u1, v1) = ext_gcd(a, b);
    let (g, u2, w) = ext_gcd(g1, c);
    (g, u2 * u1, u2 * v1, w)
}

/// The principal (identity) form of discriminant D.
pub fn principal_form(disc: Discriminant) -> QuadForm {
    let d = disc.value();
    if d.rem_euclid(4) == 0 {
        QuadForm { a: 1, b: 0, c: -d / 4 }
    } else {
        QuadForm { a: 1, b: 1, c: (1 - d) / 4 }
    }
}

/// Unique reduced representative of the form's class.
pub fn reduce(f: &QuadForm) -> QuadForm {
    let disc = f.discriminant().value() as i128;
    let mut a = f.a as i128;
    let mut b = f.b as i128;
    let mut c = f.c as i128;
    loop {
        if c < a {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        }
        if b.abs() > a {
            let two_a = 2 * a;
            // shift b into [-a, a]
            let k = if b >= 0 { (b + a) / two_a } else { -((-b + a) / two_a) };
            b -= k * two_a;
            c = (b * b - disc) / (4 * a);
            continue;
        }
        if (b.abs() == a || a == c) && b < 0 {
            b = -b;
            continue;
        }
        break;
    }
    QuadForm {
        a: a as i64,
        b: b as i64,
        c: c as i64,
    }
}

/// Gauss composition of two primitive forms of the same discriminant,
/// returned reduced.
pub fn compose(f1: &QuadForm, f2: &QuadForm) -> Result<QuadForm> {
    let d1 = f1.discriminant();
    let d2 = f2.discriminant();
    if d1 != d2 {
        return Err(Error::Domain(format!(
            "cannot compose forms of discriminants {} and {}",
            d1.value(),
            d2.value()
        )));
    }
    let disc = d1.value() as i128;
    let (a1, b1, _c1) = (f1.a as i128, f1.b as i128, f1.c as i128);
    let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);

    let half_sum = (b1 + b2) / 2;
    let (g, _u, v, w) = ext_gcd3(a1, a2, half_sum);
    let a3 = a1 * a2 / (g * g);
    let half_diff = (b1 - b2) / 2;
    let inner = v * half_diff - w * c2;
    let b_raw = b2 + 2 * a2 * inner / g;
    let two_a3 = 2 * a3;
    let mut b3 = b_raw.rem_euclid(two_a3);
    if b3 > a3 {
        b3 -= two_a3;
    }
    let c3 = (b3 * b3 - disc) / (4 * a3);
    Ok(reduce(&QuadForm {
        a: a3 as i64,
        b: b3 as i64,
        c: c3 as i64,
    }))
}

/// All primitive reduced forms of discriminant D, sorted by (a, b).
pub fn enumerate_reduced(disc: Discriminant, max_abs_disc: i64) -> Result<Vec<QuadForm>> {
    check_bound(disc, max_abs_disc)?;
    let d = disc.value();
    let a_max = int_sqrt((-d) / 3);
    let forms: Vec<QuadForm> = (1..=a_max)
        .into_par_iter()
        .flat_map_iter(|a| forms_for_a(d, a))
        .collect();
    // parallel collection preserves a-order; b is ascending within each a
    Ok(forms)
}

/// Count of primitive reduced forms of discriminant D. Same loop as
/// [`enumerate_reduced`] without materializing the forms.
pub fn count_reduced(disc: Discriminant, max_abs_disc: i64) -> Result<u64> {
    check_bound(disc, max_abs_disc)?;
    let d = disc.value();
    let a_max = int_sqrt((-d) / 3);
    let count: u64 = (1..=a_max)
        .into_par_iter()
        .map(|a| forms_for_a(d, a).count() as u64)
        .sum();
    Ok(count)
}

fn check_bound(disc: Discriminant, max_abs_disc: i64) -> Result<()> {
    let abs = -disc.value();
    if abs > max_abs_disc.min(OVERFLOW_SAFE_MAX_ABS_DISC) {
        return Err(Error::ResourceLimit(format!(
            "|D| = {abs} exceeds the enumeration bound {max_abs_disc}"
        )));
    }
    Ok(())
}

fn int_sqrt(n: i64) -> i64 {
    if n < 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn forms_for_a(d: i64, a: i64) -> impl Iterator<Item = QuadForm> {
    // b runs over -a..=a with b = D (mod 2)
    let parity = d.rem_euclid(2);
    let start = if (-a).rem_euclid(2) == parity { -a } else { -a + 1 };
    (start..=a)
        .step_by(2)
        .filter_map(move |b| {
            let num = b * b - d; // fits i64: b^2 <= a^2 <= |D|/3
            let den = 4 * a;
            if num % den != 0 {
                return None;
            }
            let c = num / den;
            if c < a {
                return None;
            }
            if (b.abs() == a || a == c) && b < 0 {
                return None;
            }
            if gcd3(a, b, c) != 1 {
                return None;
            }
            Some(QuadForm { a, b, c })
        })
}

/// Order of the class of `f` in the form class group.
pub fn element_order(f: &QuadForm) -> Result<u64> {
    let disc = f.discriminant();
    let id = principal_form(disc);
    let base = reduce(f);
    let mut acc = base;
    let mut order = 1u64;
    while acc != id {
        acc = compose(&acc, &base)?;
        order += 1;
        if order > 100_000_000 {
            return Err(Error::ResourceLimit(format!(
                "order of ({}, {}, {}) exceeds the iteration cap",
                f.a, f.b, f.c
            )));
        }
    }
    Ok(order)
}

/// n-th power of a class by repeated squaring.
pub fn form_power(f: &QuadForm, n: u64) -> Result<QuadForm> {
    let disc = f.discriminant();
    let mut result = principal_form(disc);
    let mut base = reduce(f);
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = compose(&result, &base)?;
        }
        n >>= 1;
        if n > 0 {
            base = compose(&base, &base)?;
        }
    }
    Ok(result)
}

/// Searches for a class of order exactly `n`. Checks n | h first (necessary
/// in an abelian group); then scans reduced forms. If some class has order
/// o with n | o, its (o/n)-th power is a witness.
pub fn exists_element_of_order(
    disc: Discriminant,
    n: u64,
    max_abs_disc: i64,
) -> Result<Option<QuadForm>> {
    if n == 0 {
        return Err(Error::Domain("order must be >= 1".into()));
    }
    let forms = enumerate_reduced(disc, max_abs_disc)?;
    let h = forms.len() as u64;
    if h % n != 0 {
        return Ok(None);
    }
    if n == 1 {
        return Ok(Some(principal_form(disc)));
    }
    for f in &forms {
        let o = element_order(f)?;
        if o % n == 0 {
            let witness = form_power(f, o / n)?;
            debug_assert_eq!(element_order(&witness)?, n);
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Class-number provider with an in-memory cache and an optional sink for
/// persisting freshly computed values.
pub struct ClassNumberCtx {
    pub max_abs_disc: i64,
    mem: Mutex<HashMap<i64, u64>>,
    sink: Option<Box<dyn Fn(i64, u64) + Send + Sync>>,
}

impl ClassNumberCtx {
    pub fn new(max_abs_disc: i64) -> Self {
        ClassNumberCtx {
            max_abs_disc,
            mem: Mutex::new(HashMap::new()),
            sink: None,
        }
    }

    /// Preload cached values (e.g. from a cache file).
    pub fn preload(&self, entries: impl IntoIterator<Item = (i64, u64)>) {
        let mut mem = self.mem.lock().unwrap();
        for (d, h) in entries {
            mem.insert(d, h);
        }
    }

    /// Install a callback invoked once per freshly computed class number.
    pub fn set_sink(&mut self, sink: Box<dyn Fn(i64, u64) + Send + Sync>) {
        self.sink = Some(sink);
    }

    pub fn cached(&self, disc: Discriminant) -> Option<u64> {
        self.mem.lock().unwrap().get(&disc.value()).copied()
    }

    /// h(D): cached when available, otherwise counted by enumeration.
    pub fn class_number(&self, disc: Discriminant) -> Result<u64> {
        if let Some(h) = self.cached(disc) {
            return Ok(h);
        }
        let h = count_reduced(disc, self.max_abs_disc)?;
        let fresh = self
            .mem
            .lock()
            .unwrap()
            .insert(disc.value(), h)
            .is_none();
        if fresh {
            if let Some(sink) = &self.sink {
                sink(disc.value(), h);
            }
        }
        Ok(h)
    }
}
