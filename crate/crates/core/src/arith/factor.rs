//! Integer factorization for product-formula ledgers.
//!
//! Deterministic Miller-Rabin and Pollard-Brent on `u64`; larger cofactors use
//! the same algorithms over `BigUint` (Miller-Rabin there is probabilistic with
//! 20 fixed bases).

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic primality for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in SMALL_PRIMES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// A nontrivial factor of an odd composite `n`.
fn brent_u64(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, m) = (2u64, 128u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let (mut x, mut ys) = (0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = brent_u64(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

fn is_probable_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    let two = BigUint::from(2u8);
    if *n < two {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    const BASES: [u32; 20] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    'witness: for a in BASES {
        let a = BigUint::from(a);
        if (&a % n).is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_big(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u8);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u8;
    }
}

fn factor_big_into(n: BigUint, out: &mut Vec<u64>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        factor_u64_into(small, out);
        return Ok(());
    }
    if is_probable_prime_big(&n) {
        return Err(Error::domain(format!(
            "prime factor {n} exceeds 64 bits; places are limited to u64 primes"
        )));
    }
    let d = rho_big(&n);
    let rest = &n / &d;
    factor_big_into(d, out)?;
    factor_big_into(rest, out)
}

/// Prime factorization of a positive integer as `(p, e)` pairs ascending in `p`.
pub fn factor_biguint(n: &BigUint) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut n = n.clone();
    let mut primes = Vec::new();
    for p in SMALL_PRIMES {
        let bp = BigUint::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
            primes.push(p);
        }
    }
    factor_big_into(n, &mut primes)?;
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut n = n;
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn primality_small_range() {
        let sieve: Vec<bool> = (0..2000u64)
            .map(|n| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        for (n, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(n as u64), p, "n = {n}");
        }
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3_215_031_751)); // strong pseudoprime to 2,3,5,7
    }

    #[test]
    fn factor_matches_trial_division() {
        for n in [1u64, 2, 12, 97, 360, 1_000_000, 999_999_937, 600_851_475_143] {
            assert_eq!(factor_biguint(&BigUint::from(n)).unwrap(), trial(n), "n = {n}");
        }
    }

    #[test]
    fn factor_semiprime_and_beyond_u64() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(
            factor_biguint(&BigUint::from(p * q)).unwrap(),
            vec![(q, 1), (p, 1)]
        );
        let big = BigUint::from(p) * BigUint::from(q) * BigUint::from(p) * BigUint::from(6u8);
        assert_eq!(
            factor_biguint(&big).unwrap(),
            vec![(2, 1), (3, 1), (q, 1), (p, 2)]
        );
    }
}
