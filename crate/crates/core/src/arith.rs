//! Integer and rational arithmetic helpers: primality, factorization,
//! quadratic residues, square-root extraction and rational string I/O.
//!
//! Everything here is exact. Factorizations are memoized in a process-wide
//! table that is safe for concurrent readers.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

pub type Q = BigRational;
pub type Z = BigInt;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

/// Renders a rational as a decimal-free `"p/q"` string (just `"p"` when integral).
pub fn q_to_string(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p"` or `"p/q"` into an exact rational.
pub fn q_from_str(s: &str) -> Result<Q, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: Z = n.trim().parse().map_err(|e| format!("bad numerator {n:?}: {e}"))?;
        let d: Z = d.trim().parse().map_err(|e| format!("bad denominator {d:?}: {e}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(Q::new(n, d))
    } else {
        let n: Z = s.parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
        Ok(Q::from_integer(n))
    }
}

fn mulmod_u128(a: u128, b: u128, m: u128) -> u128 {
    // Schoolbook split; m < 2^127 in all our uses.
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let mut result: u128 = 0;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

fn powmod_u128(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc: u128 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod_u128(acc, base, m);
        }
        base = mulmod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // Deterministic Miller-Rabin for n < 3.3 * 10^24 with these bases.
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality for arbitrary positive integers. Values beyond `u128` fall back
/// to Miller-Rabin over `BigUint` with the same fixed witness set.
pub fn is_prime(n: &Z) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(v) = n.to_u128() {
        return is_prime_u128(v);
    }
    let n = n.magnitude().clone();
    let one = BigUint::one();
    let two = &one + &one;
    let nm1 = &n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let a = BigUint::from(a);
        if a >= n {
            continue;
        }
        let mut x = a.modpow(&d, &n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, &n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho_u128(n: u128) -> u128 {
    // Brent's variant, deterministic constant sweep.
    for c in 1u128.. {
        let f = |x: u128| (mulmod_u128(x, x, n) + c) % n;
        let mut x: u128 = 2;
        let mut y: u128 = 2;
        let mut d: u128 = 1;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            let diff = if x > y { x - y } else { y - x };
            d = gcd_u128(diff, n);
            count += 1;
            if count > 1 << 24 {
                break;
            }
        }
        if d != 1 && d != n {
            return d;
        }
    }
    unreachable!()
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn factor_u128(mut n: u128, out: &mut Vec<(Z, u32)>) {
    let mut small: HashMap<u128, u32> = HashMap::new();
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            *small.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u128(m) {
            *small.entry(m).or_insert(0) += 1;
            continue;
        }
        let d = pollard_rho_u128(m);
        stack.push(d);
        stack.push(m / d);
    }
    let mut ps: Vec<_> = small.into_iter().collect();
    ps.sort();
    out.extend(ps.into_iter().map(|(p, e)| (Z::from(p), e)));
}

static FACTOR_CACHE: Lazy<RwLock<HashMap<Z, Arc<Vec<(Z, u32)>>>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

/// Prime factorization of `|n|` for nonzero `n`, as sorted `(p, e)` pairs.
pub fn factor(n: &Z) -> Arc<Vec<(Z, u32)>> {
    let key = n.abs();
    assert!(!key.is_zero(), "factor(0) is undefined");
    if let Some(hit) = FACTOR_CACHE.read().unwrap().get(&key) {
        return hit.clone();
    }
    let mut fs = Vec::new();
    if let Some(v) = key.to_u128() {
        factor_u128(v, &mut fs);
    } else {
        // Big inputs are rare here; strip small primes then recurse via rho on BigInt.
        let mut m = key.clone();
        let mut small: HashMap<Z, u32> = HashMap::new();
        let mut p = Z::from(2);
        while &p * &p <= m && p < Z::from(100_000) {
            while (&m % &p).is_zero() {
                *small.entry(p.clone()).or_insert(0) += 1;
                m /= &p;
            }
            p += 1;
        }
        let mut stack = vec![m];
        while let Some(v) = stack.pop() {
            if v.is_one() {
                continue;
            }
            if is_prime(&v) {
                *small.entry(v).or_insert(0) += 1;
                continue;
            }
            let d = pollard_rho_big(&v);
            stack.push(&v / &d);
            stack.push(d);
        }
        let mut ps: Vec<_> = small.into_iter().collect();
        ps.sort();
        fs = ps;
    }
    let arc = Arc::new(fs);
    FACTOR_CACHE.write().unwrap().insert(key, arc.clone());
    arc
}

fn pollard_rho_big(n: &Z) -> Z {
    let one = Z::one();
    let mut c = Z::one();
    loop {
        let f = |x: &Z| (x * x + &c) % n;
        let mut x = Z::from(2);
        let mut y = Z::from(2);
        loop {
            x = f(&x);
            y = f(&f(&y));
            let d = (&x - &y).abs().gcd(n);
            if d == one {
                continue;
            }
            if &d != n {
                return d;
            }
            break;
        }
        c += 1;
    }
}

/// Signed squarefree part of a nonzero rational: the unique squarefree integer
/// in the square class of `q`.
pub fn squarefree_part(q: &Q) -> Z {
    let n = q.numer() * q.denom();
    assert!(!n.is_zero(), "squarefree_part(0) is undefined");
    let mut out = Z::one();
    for (p, e) in factor(&n).iter() {
        if e % 2 == 1 {
            out *= p;
        }
    }
    if n.is_negative() {
        -out
    } else {
        out
    }
}

/// Exact integer square root when `n` is a perfect square.
pub fn exact_sqrt_int(n: &Z) -> Option<Z> {
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

/// Exact rational square root when `q` is a square in Q, with nonnegative sign.
pub fn exact_sqrt(q: &Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let n = exact_sqrt_int(q.numer())?;
    let d = exact_sqrt_int(q.denom())?;
    Some(Q::new(n, d))
}

pub fn is_rational_square(q: &Q) -> bool {
    !q.is_zero() && exact_sqrt(q).is_some()
}

/// Legendre symbol `(a|p)` for odd prime `p`; 0 when `p | a`.
pub fn legendre(a: &Z, p: &Z) -> i32 {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - Z::one()) / Z::from(2);
    let r = a.modpow(&e, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// `p`-adic valuation of a nonzero rational and its unit part.
pub fn val_unit(q: &Q, p: &Z) -> (i64, Q) {
    assert!(!q.is_zero());
    let mut v: i64 = 0;
    let mut num = q.numer().clone();
    let mut den = q.denom().clone();
    while (&num % p).is_zero() {
        num /= p;
        v += 1;
    }
    while (&den % p).is_zero() {
        den /= p;
        v -= 1;
    }
    (v, Q::new(num, den))
}

/// Square root mod an odd prime (Tonelli-Shanks, deterministic nonresidue sweep).
pub fn sqrt_mod_p(a: &Z, p: &Z) -> Option<Z> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(Z::zero());
    }
    if *p == Z::from(2) {
        return Some(a);
    }
    if legendre(&a, p) != 1 {
        return None;
    }
    // p ≡ 3 (mod 4) shortcut
    if (p % Z::from(4)) == Z::from(3) {
        let e = (p + Z::one()) / Z::from(4);
        return Some(a.modpow(&e, p));
    }
    let one = Z::one();
    let mut q = p - &one;
    let mut s = 0u32;
    while q.is_even() {
        q /= 2;
        s += 1;
    }
    let mut znr = Z::from(2);
    while legendre(&znr, p) != -1 {
        znr += 1;
    }
    let mut m = s;
    let mut c = znr.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + &one) / Z::from(2)), p);
    while !t.is_one() {
        let mut i = 0u32;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
            if i == m {
                return None;
            }
        }
        let mut b = c.clone();
        for _ in 0..(m - i - 1) {
            b = (&b * &b) % p;
        }
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    Some(r)
}

/// Square root of `a` modulo a squarefree modulus `m > 0` via CRT over the
/// prime factors. Requires `a` to be a residue at each factor.
pub fn sqrt_mod_squarefree(a: &Z, m: &Z) -> Option<Z> {
    if m.is_one() {
        return Some(Z::zero());
    }
    let mut x = Z::zero();
    let mut modulus = Z::one();
    for (p, e) in factor(m).iter() {
        debug_assert_eq!(*e, 1, "modulus must be squarefree");
        let r = if *p == Z::from(2) {
            a.mod_floor(&Z::from(2))
        } else {
            sqrt_mod_p(a, p)?
        };
        // CRT combine x (mod modulus) with r (mod p)
        let (g, inv, _) = extended_gcd(&modulus, p);
        debug_assert!(g.is_one());
        let diff = (&r - &x).mod_floor(p);
        let t = (diff * inv).mod_floor(p);
        x += &modulus * t;
        modulus *= p;
        x = x.mod_floor(&modulus);
    }
    Some(x)
}

/// Returns (g, s, t) with g = gcd(a, b) = s*a + t*b.
pub fn extended_gcd(a: &Z, b: &Z) -> (Z, Z, Z) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Z::one(), Z::zero());
    let (mut t0, mut t1) = (Z::zero(), Z::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r);
        let s = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s);
        let t = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t);
    }
    (r0, s0, t0)
}

/// Serde adapter: `BigInt` as a decimal string on the wire.
pub mod bigint_string {
    use super::Z;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Z, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&z.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Z, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Primes dividing numerator or denominator of `q`.
pub fn rational_primes(q: &Q) -> Vec<Z> {
    let n = q.numer() * q.denom();
    if n.is_zero() {
        return vec![];
    }
    factor(&n).iter().map(|(p, _)| p.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<i64> = vec![2, 3, 5, 7, 11, 13, 17, 97, 7919];
        for p in primes {
            assert!(is_prime(&Z::from(p)), "{p} should be prime");
        }
        for c in [1i64, 4, 9, 15, 91, 561, 7917] {
            assert!(!is_prime(&Z::from(c)), "{c} should be composite");
        }
    }

    #[test]
    fn factor_roundtrip() {
        for n in [2i64, 12, 360, 1001, 104729 * 7, -98, 2 * 3 * 5 * 7 * 11 * 13] {
            let fs = factor(&Z::from(n));
            let mut prod = Z::one();
            for (p, e) in fs.iter() {
                assert!(is_prime(p));
                prod *= p.pow(*e);
            }
            assert_eq!(prod, Z::from(n).abs());
        }
    }

    #[test]
    fn squarefree_parts() {
        assert_eq!(squarefree_part(&q_int(12)), Z::from(3));
        assert_eq!(squarefree_part(&q_int(-18)), Z::from(-2));
        assert_eq!(squarefree_part(&q_ratio(9, 25)), Z::from(1));
        assert_eq!(squarefree_part(&q_ratio(2, 3)), Z::from(6));
        assert_eq!(squarefree_part(&q_int(1)), Z::from(1));
    }

    #[test]
    fn legendre_by_enumeration() {
        // Oracle: brute-force the residues.
        for p in [3i64, 5, 7, 11, 13, 17, 19] {
            let mut squares = std::collections::HashSet::new();
            for x in 1..p {
                squares.insert((x * x) % p);
            }
            for a in 1..p {
                let expect = if squares.contains(&a) { 1 } else { -1 };
                assert_eq!(legendre(&Z::from(a), &Z::from(p)), expect, "({a}|{p})");
            }
        }
    }

    #[test]
    fn tonelli_shanks_agrees() {
        for p in [3i64, 5, 13, 17, 41, 97, 193] {
            let p = Z::from(p);
            for a in 1..40 {
                let a = Z::from(a).mod_floor(&p);
                if a.is_zero() {
                    continue;
                }
                match sqrt_mod_p(&a, &p) {
                    Some(r) => assert_eq!((&r * &r).mod_floor(&p), a),
                    None => assert_eq!(legendre(&a, &p), -1),
                }
            }
        }
    }

    #[test]
    fn sqrt_mod_composite() {
        // 2 is a square mod 17 and mod 7 (?), check against direct squaring.
        let m = Z::from(7 * 17);
        if let Some(r) = sqrt_mod_squarefree(&Z::from(2), &m) {
            assert_eq!((&r * &r).mod_floor(&m), Z::from(2).mod_floor(&m));
        }
        let m = Z::from(2 * 17);
        let r = sqrt_mod_squarefree(&Z::from(2), &m).unwrap();
        assert_eq!((&r * &r).mod_floor(&Z::from(17)), Z::from(2));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(q_to_string(&q_ratio(-3, 2)), "-3/2");
        assert_eq!(q_to_string(&q_int(17)), "17");
        assert_eq!(q_from_str("-3/2").unwrap(), q_ratio(-3, 2));
        assert_eq!(q_from_str(" 7 ").unwrap(), q_int(7));
        assert!(q_from_str("1/0").is_err());
    }

    #[test]
    fn val_unit_examples() {
        let (v, u) = val_unit(&q_ratio(12, 5), &Z::from(2));
        assert_eq!(v, 2);
        assert_eq!(u, q_ratio(3, 5));
        let (v, _) = val_unit(&q_ratio(5, 8), &Z::from(2));
        assert_eq!(v, -3);
    }
}
