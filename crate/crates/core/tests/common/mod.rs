//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's arithmetic beyond constructing inputs.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use subspace_core::{HomForm, ProjPoint, Rat};

pub const MOD_P: i128 = 2_305_843_009_213_693_951; // 2^61 - 1

/// Rank over F_p by plain Gaussian elimination.
pub fn rank_mod_p(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| (x as i128).rem_euclid(MOD_P)).collect())
        .collect();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], MOD_P - 2);
        for i in 0..m.len() {
            if i != rank && m[i][col] != 0 {
                let f = m[i][col] * inv % MOD_P;
                for j in 0..ncols {
                    let sub = f * m[rank][j] % MOD_P;
                    m[i][j] = (m[i][j] - sub).rem_euclid(MOD_P);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: i128, mut e: i128) -> i128 {
    let mut r = 1i128;
    b %= MOD_P;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b);
        }
        b = mul_mod(b, b);
        e >>= 1;
    }
    r
}

fn mul_mod(a: i128, b: i128) -> i128 {
    // both < 2^61, product < 2^122 fits in i128
    a * b % MOD_P
}

/// l-subgeneral position by enumerating every subset as a bitmask.
pub fn subgeneral_oracle(forms: &[Vec<i64>], x: &[Vec<i64>], m: usize, l: usize) -> bool {
    let q = forms.len();
    for mask in 1u32..(1 << q) {
        let size = mask.count_ones() as usize;
        if size > l + 1 {
            continue;
        }
        let mut rows: Vec<Vec<i64>> = (0..q)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| forms[i].clone())
            .collect();
        rows.extend(x.iter().cloned());
        let dim = m as i64 - rank_mod_p(&rows) as i64;
        if dim > l as i64 - size as i64 {
            return false;
        }
    }
    true
}

/// Evaluates `sum c * x^e` directly.
pub fn eval_terms(terms: &[(Vec<u32>, BigInt)], p: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (e, c) in terms {
        let mut t = c.clone();
        for (x, &k) in p.iter().zip(e) {
            for _ in 0..k {
                t *= x;
            }
        }
        acc += t;
    }
    acc
}

/// Valuation by repeated division.
pub fn ord_oracle(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut e = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        e += 1;
    }
    e
}

/// Fermat test to several bases; enough to catch a composite in a ledger.
pub fn probably_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    for b in [2u64, 3, 5, 7, 11, 13, 17] {
        if p == b {
            return true;
        }
        if p.is_multiple_of(b) {
            return false;
        }
        let r = BigInt::from(b).modpow(&BigInt::from(p - 1), &BigInt::from(p));
        if !r.is_one() {
            return false;
        }
    }
    true
}

pub fn random_point(rng: &mut ChaCha8Rng, m: usize, bound: i64) -> ProjPoint {
    loop {
        let v: Vec<i64> = (0..=m).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return ProjPoint::from_ints(&v).unwrap();
        }
    }
}

pub fn random_exponents(rng: &mut ChaCha8Rng, m: usize, d: u32) -> Vec<u32> {
    let mut e = vec![0u32; m + 1];
    for _ in 0..d {
        e[rng.gen_range(0..=m)] += 1;
    }
    e
}

/// A form with 1..=max_terms random monomials and coefficients in
/// `-bound..=bound`.
pub fn random_form(rng: &mut ChaCha8Rng, m: usize, d: u32, max_terms: usize, bound: i64) -> HomForm {
    loop {
        let k = rng.gen_range(1..=max_terms);
        let terms: Vec<(Vec<u32>, Rat)> = (0..k)
            .map(|_| {
                (
                    random_exponents(rng, m, d),
                    Rat::from_integer(rng.gen_range(-bound..=bound)),
                )
            })
            .collect();
        if let Ok(f) = HomForm::from_terms(m, d, &terms) {
            return f;
        }
    }
}

/// `|a - b|` in units in the last place, for finite floats.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    if a == b {
        return 0;
    }
    let key = |x: f64| {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}
