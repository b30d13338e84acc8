//! Exact integer utilities: integer square roots, primality, factorization,
//! squarefree decomposition and square-ratio tests.
//!
//! Everything here is arbitrary precision. Factorization runs trial division
//! up to a configurable limit, then a deterministic Miller-Rabin witness
//! ladder, then Pollard rho with Brent cycling under an explicit effort cap.
//! Hitting the cap is a loud [`Error::ResourceLimit`], never a wrong answer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Effort knobs for [`factorize`].
#[derive(Debug, Clone)]
pub struct FactorConfig {
    /// Trial-divide by every prime up to this bound.
    pub trial_limit: u64,
    /// Total Pollard-rho iterations allowed per call before giving up.
    pub rho_iteration_cap: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_limit: 1_000_000,
            rho_iteration_cap: 100_000_000,
        }
    }
}

/// A complete prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigInt,
    /// (prime, exponent) pairs with strictly increasing primes.
    pub factors: Vec<(BigInt, u32)>,
}

impl Factorization {
    /// Recompute the product of the prime powers; used by tests and
    /// invariant checks.
    pub fn product(&self) -> BigInt {
        let mut acc = BigInt::one();
        for (p, e) in &self.factors {
            acc *= p.pow(*e);
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }
}

/// N = sign * d * s^2 with d squarefree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub sign: i8,
    pub d: BigInt,
    pub s: BigInt,
}

impl SquarefreeDecomposition {
    pub fn reconstruct(&self) -> BigInt {
        BigInt::from(self.sign) * &self.d * &self.s * &self.s
    }
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    if n.is_negative() {
        return Err(Error::Domain(format!("isqrt of negative integer {n}")));
    }
    Ok(n.sqrt())
}

/// Returns the root when `n` is a perfect square, `None` otherwise.
/// Negative inputs are never squares.
pub fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// True iff `den | num`, the quotient is nonnegative and a perfect square.
/// Non-integral, negative or non-square quotients all give `false`.
pub fn square_ratio(num: &BigInt, den: &BigInt) -> bool {
    if den.is_zero() {
        return false;
    }
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return false;
    }
    is_perfect_square(&q).is_some()
}

// Deterministic Miller-Rabin witness set: correct for all n below
// 3.317e24 (first 13 primes as bases). Inputs in this artifact stay far
// below that bound; the same ladder is applied beyond it, where no
// counterexample is known.
const MR_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn miller_rabin_witness(n: &BigInt, base: &BigInt) -> bool {
    // returns true if `base` witnesses compositeness of odd n > 2
    let one = BigInt::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = base.modpow(&d, n);
    if x.is_one() || x == n_minus_1 {
        return false;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return false;
        }
    }
    true
}

/// Exact primality test: trial division by small primes, then the
/// deterministic Miller-Rabin ladder.
pub fn is_prime(n: &BigInt) -> bool {
    let two = BigInt::from(2);
    if n < &two {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    for b in MR_BASES {
        let b = BigInt::from(b);
        if miller_rabin_witness(n, &b) {
            return false;
        }
    }
    true
}

/// Pollard rho with Brent cycling. Returns a nontrivial factor of `n`
/// (odd composite, no factor below the trial limit), or an error if the
/// iteration budget runs out.
fn pollard_rho_brent(n: &BigInt, budget: &mut u64) -> Result<BigInt> {
    let one = BigInt::one();
    let two = BigInt::from(2);
    // deterministic constant sweep keeps factorization reproducible
    for c in 1u64.. {
        let c = BigInt::from(c);
        let mut y = two.clone();
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let batch = std::cmp::min(128, r - k);
                for _ in 0..batch {
                    y = (&y * &y + &c) % n;
                    let diff = (&x - &y).abs();
                    q = (&q * &diff) % n;
                }
                g = q.gcd(n);
                k += batch;
                if *budget < batch {
                    return Err(Error::ResourceLimit(format!(
                        "rho iteration cap reached; unfactored cofactor {n}"
                    )));
                }
                *budget -= batch;
            }
            r *= 2;
        }
        if g == *n {
            // backtrack one step at a time
            loop {
                ys = (&ys * &ys + &c) % n;
                let g2 = (&x - &ys).abs().gcd(n);
                if g2 > one {
                    if g2 == *n {
                        break; // retry with next c
                    }
                    return Ok(g2);
                }
            }
        } else {
            return Ok(g);
        }
    }
    unreachable!()
}

/// Complete prime factorization of `n > 1`.
pub fn factorize(n: &BigInt, config: &FactorConfig) -> Result<Factorization> {
    if n <= &BigInt::one() {
        return Err(Error::Domain(format!("factorize requires n > 1, got {n}")));
    }
    let mut remaining = n.clone();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();

    let push = |p: BigInt, e: u32, factors: &mut Vec<(BigInt, u32)>| {
        factors.push((p, e));
    };

    // trial division
    let mut d: u64 = 2;
    while d <= config.trial_limit {
        let db = BigInt::from(d);
        if &(&db * &db) > &remaining {
            break;
        }
        if (&remaining % &db).is_zero() {
            let mut e = 0u32;
            while (&remaining % &db).is_zero() {
                remaining /= &db;
                e += 1;
            }
            push(db, e, &mut factors);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if remaining.is_one() {
        factors.sort_by(|x, y| x.0.cmp(&y.0));
        return Ok(Factorization {
            n: n.clone(),
            factors,
        });
    }

    // remaining has no prime factor <= trial_limit (or is small)
    let mut budget = config.rho_iteration_cap;
    let mut stack = vec![remaining];
    let mut large: Vec<BigInt> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            large.push(m);
            continue;
        }
        if let Some(r) = is_perfect_square(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let f = pollard_rho_brent(&m, &mut budget)?;
        let q = &m / &f;
        stack.push(f);
        stack.push(q);
    }
    large.sort();
    let mut i = 0;
    while i < large.len() {
        let mut j = i + 1;
        while j < large.len() && large[j] == large[i] {
            j += 1;
        }
        push(large[i].clone(), (j - i) as u32, &mut factors);
        i = j;
    }
    factors.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(Factorization {
        n: n.clone(),
        factors,
    })
}

/// Split a nonzero integer as sign * d * s^2 with d squarefree.
pub fn squarefree_decompose(n: &BigInt, config: &FactorConfig) -> Result<SquarefreeDecomposition> {
    if n.is_zero() {
        return Err(Error::Domain("squarefree_decompose of zero".into()));
    }
    let sign: i8 = if n.is_negative() { -1 } else { 1 };
    let abs = n.abs();
    if abs.is_one() {
        return Ok(SquarefreeDecomposition {
            sign,
            d: BigInt::one(),
            s: BigInt::one(),
        });
    }
    let fac = factorize(&abs, config)?;
    let mut d = BigInt::one();
    let mut s = BigInt::one();
    for (p, e) in &fac.factors {
        if e % 2 == 1 {
            d *= p;
        }
        s *= p.pow(e / 2);
    }
    Ok(SquarefreeDecomposition { sign, d, s })
}

/// One prime factor of `n > 1`; cheaper than a full factorization when
/// only a witness is needed.
pub fn some_prime_factor(n: &BigInt, config: &FactorConfig) -> Result<BigInt> {
    if n <= &BigInt::one() {
        return Err(Error::Domain(format!("prime factor requires n > 1, got {n}")));
    }
    if is_prime(n) {
        return Ok(n.clone());
    }
    let mut d: u64 = 2;
    while d <= config.trial_limit {
        let db = BigInt::from(d);
        if &(&db * &db) > n {
            break;
        }
        if (n % &db).is_zero() {
            return Ok(db);
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    // no small factor: split with rho, always recursing into the smaller half
    let mut m = n.clone();
    let mut budget = config.rho_iteration_cap;
    loop {
        if is_prime(&m) {
            return Ok(m);
        }
        if let Some(r) = is_perfect_square(&m) {
            m = r;
            continue;
        }
        let f = pollard_rho_brent(&m, &mut budget)?;
        let q = &m / &f;
        m = f.min(q);
    }
}

/// True iff `d` is squarefree (d >= 1).
pub fn is_squarefree(d: &BigInt, config: &FactorConfig) -> Result<bool> {
    if d < &BigInt::one() {
        return Err(Error::Domain(format!("squarefree test requires d >= 1, got {d}")));
    }
    if d.is_one() {
        return Ok(true);
    }
    Ok(factorize(d, config)?.is_squarefree())
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}
