//! Lehmer pairs and sequences, primitive-divisor detection, the catalogs of
//! defective pairs at odd indices, and Fibonacci/Lucas support.
//!
//! A Lehmer pair (alpha, beta) is represented by its parameters
//! (a, b) = ((alpha+beta)^2, (alpha-beta)^2). With P = (a+b)/2 and
//! Q = (a-b)/4 = alpha*beta, the Lehmer numbers obey the integer recurrence
//! L_{n+4} = P*L_{n+2} - Q^2*L_n with seeds L_0=0, L_1=1, L_2=1,
//! L_3=(3a+b)/4, so every value is computed exactly in integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::intarith::{self, FactorConfig};

/// Parameters (a, b) of a Lehmer pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LehmerParams {
    a: BigInt,
    b: BigInt,
}

impl LehmerParams {
    /// Validates all pair invariants: a, b nonzero, a = b (mod 4),
    /// Q = (a-b)/4 nonzero and coprime to a, and alpha/beta not a root
    /// of unity (2(a+b)/(a-b) outside {0, +-1, +-2}).
    pub fn new(a: BigInt, b: BigInt) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::Domain("Lehmer parameters must be nonzero".into()));
        }
        let diff = &a - &b;
        if !(&diff % BigInt::from(4)).is_zero() {
            return Err(Error::Domain(format!(
                "Lehmer parameters require a = b (mod 4), got ({a}, {b})"
            )));
        }
        let q: BigInt = &diff / BigInt::from(4);
        if q.is_zero() {
            return Err(Error::Domain(format!(
                "Lehmer parameters require alpha*beta != 0, got ({a}, {b})"
            )));
        }
        if !a.gcd(&q).is_one() {
            return Err(Error::Domain(format!(
                "Lehmer parameters require gcd(a, (a-b)/4) = 1, got ({a}, {b})"
            )));
        }
        // root-of-unity exclusion: 2(a+b) must not be c*(a-b), c in -2..=2
        let two_sum = BigInt::from(2) * (&a + &b);
        for c in -2i32..=2 {
            if two_sum == BigInt::from(c) * &diff {
                return Err(Error::Domain(format!(
                    "alpha/beta is a root of unity for parameters ({a}, {b})"
                )));
            }
        }
        Ok(LehmerParams { a, b })
    }

    pub fn from_i64(a: i64, b: i64) -> Result<Self> {
        Self::new(BigInt::from(a), BigInt::from(b))
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    /// Q = alpha*beta = (a-b)/4.
    pub fn q(&self) -> BigInt {
        (&self.a - &self.b) / 4
    }

    /// P = alpha^2+beta^2 = (a+b)/2.
    pub fn p(&self) -> BigInt {
        (&self.a + &self.b) / 2
    }

    /// The equivalent pair obtained by multiplying alpha, beta by sqrt(-1).
    pub fn negated(&self) -> LehmerParams {
        LehmerParams {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

/// True iff the pairs are equivalent (equal or sign-flipped parameters).
pub fn params_equivalent(p1: &LehmerParams, p2: &LehmerParams) -> bool {
    p1 == p2 || *p2 == p1.negated()
}

/// [L_0, ..., L_upto] by the integer recurrence.
pub fn lehmer_sequence(params: &LehmerParams, upto: u64) -> Vec<BigInt> {
    let p = params.p();
    let q2 = {
        let q = params.q();
        &q * &q
    };
    let l3 = (BigInt::from(3) * &params.a + &params.b) / 4;
    let mut seq = vec![BigInt::zero(), BigInt::one(), BigInt::one(), l3];
    seq.truncate(upto as usize + 1);
    while seq.len() <= upto as usize {
        let n = seq.len();
        let next = &p * &seq[n - 2] - &q2 * &seq[n - 4];
        seq.push(next);
    }
    seq
}

/// L_n for the pair.
pub fn lehmer_number(params: &LehmerParams, n: u64) -> BigInt {
    lehmer_sequence(params, n).pop().unwrap()
}

/// Primitive-divisor test for L_n: strip from |L_n| every prime shared with
/// a*b*L_1*...*L_{n-1}; whatever survives is divisible only by primitive
/// primes. Returns one of them as witness.
pub fn has_primitive_divisor(
    params: &LehmerParams,
    n: u64,
    config: &FactorConfig,
) -> Result<(bool, Option<BigInt>)> {
    if n < 1 {
        return Err(Error::Domain("primitive divisor index must be >= 1".into()));
    }
    let seq = lehmer_sequence(params, n);
    let ln = &seq[n as usize];
    if ln.is_zero() {
        return Err(Error::Invariant(format!(
            "L_{n} = 0 for valid parameters ({}, {})",
            params.a, params.b
        )));
    }
    let mut m = ln.abs();
    // (alpha^2 - beta^2)^2 = a*b
    let mut b_prod = (&params.a * &params.b).abs();
    for l in &seq[1..n as usize] {
        if !l.is_zero() {
            b_prod *= l.abs();
        }
    }
    loop {
        let g = m.gcd(&b_prod);
        if g.is_one() {
            break;
        }
        m /= &g;
    }
    if m.is_one() {
        Ok((false, None))
    } else {
        // existence is already settled; witness extraction may degrade to
        // None when the residual is too expensive to factor
        let witness = match intarith::some_prime_factor(&m, config) {
            Ok(w) => Some(w),
            Err(Error::ResourceLimit(_)) => None,
            Err(e) => return Err(e),
        };
        Ok((true, witness))
    }
}

pub fn is_n_defective(params: &LehmerParams, n: u64, config: &FactorConfig) -> Result<bool> {
    Ok(!has_primitive_divisor(params, n, config)?.0)
}

/// Standard Fibonacci numbers, F_0 = 0, F_1 = 1.
pub fn fibonacci(k: u64) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..k {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

/// Standard Lucas numbers, L_0 = 2, L_1 = 1.
pub fn lucas(k: u64) -> BigInt {
    let (mut a, mut b) = (BigInt::from(2), BigInt::one());
    for _ in 0..k {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

/// Which catalog a defective pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectSource {
    FixedTable,
    FibonacciFamily,
    LucasFamily,
}

impl DefectSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            DefectSource::FixedTable => "fixed-table",
            DefectSource::FibonacciFamily => "fibonacci-family",
            DefectSource::LucasFamily => "lucas-family",
        }
    }
}

/// A catalog entry proving a pair n-defective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectRecord {
    pub n: u64,
    pub params: LehmerParams,
    pub source: DefectSource,
    /// (k, epsilon) for family entries.
    pub family_index: Option<(u64, i8)>,
}

/// Fixed table of all n-defective pairs (up to equivalence) for odd
/// 7 <= n <= 29. Indices absent from the table have no defective pairs.
pub const FIXED_DEFECTIVE_TABLE: &[(u64, &[(i64, i64)])] = &[
    (7, &[(1, -7), (1, -19), (3, -5), (5, -7), (13, -3), (14, -22)]),
    (9, &[(5, -3), (7, -1), (7, -5)]),
    (13, &[(1, -7)]),
    (15, &[(7, -1), (10, -2)]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Fibonacci,
    Lucas,
}

/// The parametrized 5-defective pair (S_{k-2e}, S_{k-2e} - 4 S_k) when the
/// side constraints and the pair invariants hold.
pub fn five_defective_family(k: u64, eps: i8, kind: FamilyKind) -> Option<LehmerParams> {
    if eps != 1 && eps != -1 {
        return None;
    }
    let shifted = k as i64 - 2 * eps as i64;
    if shifted < 0 {
        // F and L are not defined at negative indices here
        return None;
    }
    let shifted = shifted as u64;
    let (first, second) = match kind {
        FamilyKind::Fibonacci => {
            if k < 3 {
                return None;
            }
            let f_sh = fibonacci(shifted);
            let f_k = fibonacci(k);
            let b = &f_sh - BigInt::from(4) * &f_k;
            (f_sh, b)
        }
        FamilyKind::Lucas => {
            if k == 1 {
                return None;
            }
            let l_sh = lucas(shifted);
            let l_k = lucas(k);
            let b = &l_sh - BigInt::from(4) * &l_k;
            (l_sh, b)
        }
    };
    LehmerParams::new(first, second).ok()
}

/// Catalog lookup: is this pair n-defective according to the published
/// tables/families? Domain: odd n with 5 <= n <= 29.
pub fn defective_catalog_lookup(params: &LehmerParams, n: u64) -> Result<Option<DefectRecord>> {
    if n % 2 == 0 || !(5..=29).contains(&n) {
        return Err(Error::Domain(format!(
            "catalog lookup requires odd n in [5, 29], got {n}"
        )));
    }
    if n == 5 {
        return Ok(five_family_lookup(params));
    }
    for (idx, entries) in FIXED_DEFECTIVE_TABLE {
        if *idx == n {
            for (a, b) in *entries {
                let entry = LehmerParams::from_i64(*a, *b)
                    .map_err(|e| Error::Invariant(format!("bad fixed-table entry ({a},{b}): {e}")))?;
                if params_equivalent(params, &entry) {
                    return Ok(Some(DefectRecord {
                        n,
                        params: entry,
                        source: DefectSource::FixedTable,
                        family_index: None,
                    }));
                }
            }
            return Ok(None);
        }
    }
    Ok(None)
}

/// Search the two 5-defective families for a member equivalent to `params`.
/// Family magnitudes are eventually strictly increasing, so the scan stops
/// after 8 consecutive k with both |F_{k-2e}| and |L_{k-2e}| above
/// max(|a|, |b|).
fn five_family_lookup(params: &LehmerParams) -> Option<DefectRecord> {
    let target = params.a.abs().max(params.b.abs());
    let mut consecutive_over = 0u32;
    let mut k = 0u64;
    loop {
        let mut all_over = true;
        for eps in [1i8, -1] {
            let shifted = k as i64 - 2 * eps as i64;
            if shifted < 0 {
                continue;
            }
            let shifted = shifted as u64;
            if fibonacci(shifted) <= target || lucas(shifted) <= target {
                all_over = false;
            }
            for kind in [FamilyKind::Fibonacci, FamilyKind::Lucas] {
                if let Some(candidate) = five_defective_family(k, eps, kind) {
                    if params_equivalent(params, &candidate) {
                        let source = match kind {
                            FamilyKind::Fibonacci => DefectSource::FibonacciFamily,
                            FamilyKind::Lucas => DefectSource::LucasFamily,
                        };
                        return Some(DefectRecord {
                            n: 5,
                            params: candidate,
                            source,
                            family_index: Some((k, eps)),
                        });
                    }
                }
            }
        }
        if all_over {
            consecutive_over += 1;
            if consecutive_over >= 8 {
                return None;
            }
        } else {
            consecutive_over = 0;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intarith::big;

    fn pair(a: i64, b: i64) -> LehmerParams {
        LehmerParams::from_i64(a, b).unwrap()
    }

    fn cfg() -> FactorConfig {
        FactorConfig::default()
    }

    #[test]
    fn params_validation() {
        assert!(LehmerParams::from_i64(1, -7).is_ok());
        assert!(LehmerParams::from_i64(0, 4).is_err()); // a = 0
        assert!(LehmerParams::from_i64(1, -2).is_err()); // a != b mod 4
        assert!(LehmerParams::from_i64(1, 1).is_err()); // alpha*beta = 0
        assert!(LehmerParams::from_i64(2, -2).is_err()); // gcd(a, Q) = 2
        assert!(LehmerParams::from_i64(1, -3).is_err()); // 2(a+b) = -1*(a-b): root of unity
        // catalog entry sanity: (14,-22) has Q = 9, gcd(14, 9) = 1
        assert!(LehmerParams::from_i64(14, -22).is_ok());
    }

    #[test]
    fn lehmer_number_examples() {
        let p = pair(1, -7);
        assert_eq!(lehmer_number(&p, 1), big(1));
        assert_eq!(lehmer_number(&p, 7), big(7));
        assert_eq!(lehmer_number(&p, 13), big(-1));
        assert_eq!(lehmer_number(&pair(3, -5), 7), big(1));
    }

    #[test]
    fn lehmer_sequence_examples() {
        assert_eq!(
            lehmer_sequence(&pair(1, -7), 3),
            vec![big(0), big(1), big(1), big(-1)]
        );
        let s = lehmer_sequence(&pair(7, -1), 9);
        let odd: Vec<BigInt> = (1..=9).step_by(2).map(|i| s[i].clone()).collect();
        assert_eq!(odd, vec![big(1), big(5), big(11), big(13), big(-5)]);
        assert_eq!(lehmer_sequence(&pair(5, -3), 0), vec![big(0)]);
    }

    #[test]
    fn primitive_divisor_examples() {
        assert_eq!(has_primitive_divisor(&pair(1, -7), 7, &cfg()).unwrap().0, false);
        assert_eq!(has_primitive_divisor(&pair(7, -1), 9, &cfg()).unwrap().0, false);
        let (found, witness) = has_primitive_divisor(&pair(1, -7), 31, &cfg()).unwrap();
        assert!(found);
        let w = witness.unwrap();
        assert!(crate::intarith::is_prime(&w));
        assert!((lehmer_number(&pair(1, -7), 31) % &w).is_zero());
    }

    #[test]
    fn defectivity_examples() {
        assert!(is_n_defective(&pair(1, -7), 13, &cfg()).unwrap());
        assert!(is_n_defective(&pair(5, -3), 9, &cfg()).unwrap());
        assert!(!is_n_defective(&pair(1, -7), 31, &cfg()).unwrap());
    }

    #[test]
    fn equivalence_examples() {
        assert!(params_equivalent(&pair(1, -7), &pair(1, -7)));
        assert!(params_equivalent(&pair(1, -7), &pair(-1, 7)));
        assert!(!params_equivalent(&pair(1, -7), &pair(3, -5)));
    }

    #[test]
    fn fibonacci_lucas_examples() {
        assert_eq!(fibonacci(0), big(0));
        assert_eq!(lucas(0), big(2));
        assert_eq!(fibonacci(7), big(13));
        assert_eq!(lucas(4), big(7));
    }

    #[test]
    fn family_examples() {
        let p = five_defective_family(3, 1, FamilyKind::Fibonacci).unwrap();
        assert_eq!((p.a().clone(), p.b().clone()), (big(1), big(-7)));
        assert!(five_defective_family(1, 1, FamilyKind::Lucas).is_none());
        let p = five_defective_family(3, 1, FamilyKind::Lucas).unwrap();
        assert_eq!((p.a().clone(), p.b().clone()), (big(1), big(-15)));
    }

    #[test]
    fn catalog_lookup_examples() {
        let r = defective_catalog_lookup(&pair(1, -7), 7).unwrap().unwrap();
        assert_eq!(r.source, DefectSource::FixedTable);

        let r = defective_catalog_lookup(&pair(1, -7), 5).unwrap().unwrap();
        assert_eq!(r.source, DefectSource::FibonacciFamily);
        assert_eq!(r.family_index, Some((3, 1)));

        assert!(defective_catalog_lookup(&pair(3, -5), 11).unwrap().is_none());
        assert!(defective_catalog_lookup(&pair(3, -5), 8).is_err());
        assert!(defective_catalog_lookup(&pair(3, -5), 31).is_err());
    }

    #[test]
    fn fixed_table_entries_are_valid_pairs() {
        for (_, entries) in FIXED_DEFECTIVE_TABLE {
            for (a, b) in *entries {
                LehmerParams::from_i64(*a, *b).unwrap();
            }
        }
    }

    // Independent evaluation of L_n through the quadratic ring Z[sqrt(ab)]:
    // represent (alpha^2)^j = (E + F*sqrt(ab))/4^j and read off
    // L_n = (E + a F)/4^j for odd n = 2j+1, L_n = 2F/4^j for even n = 2j.
    fn lehmer_oracle(params: &LehmerParams, n: u64) -> BigInt {
        let ab = params.a() * params.b();
        let sum = params.a() + params.b();
        // gamma = 4*alpha^2 = (a+b) + 2*sqrt(ab); track gamma^j = E + F*sqrt(ab)
        let j = n / 2;
        let mut e = BigInt::one();
        let mut f = BigInt::zero();
        for _ in 0..j {
            let ne = &e * &sum + BigInt::from(2) * &f * &ab;
            let nf = &e * BigInt::from(2) + &f * &sum;
            e = ne;
            f = nf;
        }
        let denom = BigInt::from(4).pow(j as u32);
        if n % 2 == 1 {
            let num = &e + params.a() * &f;
            let (q, r) = num.div_rem(&denom);
            assert!(r.is_zero(), "oracle non-integral at odd n = {n}");
            q
        } else {
            let num = BigInt::from(2) * &f;
            let (q, r) = num.div_rem(&denom);
            assert!(r.is_zero(), "oracle non-integral at even n = {n}");
            q
        }
    }

    #[test]
    fn recurrence_agrees_with_ring_oracle() {
        let mut checked = 0u32;
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                if let Ok(p) = LehmerParams::from_i64(a, b) {
                    let seq = lehmer_sequence(&p, 15);
                    for n in 0..=15u64 {
                        assert_eq!(seq[n as usize], lehmer_oracle(&p, n), "({a},{b}) at n={n}");
                    }
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn lemma_identities_fib_lucas() {
        for k in 1u64..=50 {
            for eps in [1i64, -1] {
                let shifted = k as i64 - 2 * eps;
                if shifted < 0 {
                    continue;
                }
                let shifted = shifted as u64;
                let idx = (k as i64 + eps) as u64;
                assert_eq!(
                    BigInt::from(4) * fibonacci(k) - fibonacci(shifted),
                    lucas(idx)
                );
                assert_eq!(
                    BigInt::from(4) * lucas(k) - lucas(shifted),
                    BigInt::from(5) * fibonacci(idx)
                );
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn equivalence_is_equivalence_relation(a1 in -30i64..30, b1 in -30i64..30,
                                               a2 in -30i64..30, b2 in -30i64..30) {
            let p1 = LehmerParams::from_i64(a1, b1);
            let p2 = LehmerParams::from_i64(a2, b2);
            if let (Ok(p1), Ok(p2)) = (p1, p2) {
                proptest::prop_assert!(params_equivalent(&p1, &p1));
                proptest::prop_assert_eq!(params_equivalent(&p1, &p2), params_equivalent(&p2, &p1));
                // transitivity through the negation orbit
                let p3 = p1.negated();
                if params_equivalent(&p1, &p2) {
                    proptest::prop_assert!(params_equivalent(&p3, &p2));
                }
            }
        }
    }
}
