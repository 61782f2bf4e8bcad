//! Exact rationals, places of Q, normalized absolute values and valuations.
//!
//! Norms follow the usual normalization over Q: `||x||_inf = |x|` and
//! `||p||_p = 1/p`. Every log-norm at a finite place is carried exactly as a
//! prime power next to its floating-point value so invariants that hold
//! exactly (multiplicativity, the product formula) can be checked exactly.

mod factor;
mod rat;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use factor::{factor_biguint, is_prime_u64};
pub use rat::Rat;

/// A rational prime, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime_u64(p) {
            Ok(Prime(p))
        } else {
            Err(Error::arg(format!("{p} is not prime")))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn ln(self) -> f64 {
        (self.0 as f64).ln()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A place of Q: the archimedean absolute value or the p-adic one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Infinite,
    Finite(Prime),
}

impl Place {
    pub fn finite(p: u64) -> Result<Self> {
        Prime::new(p).map(Place::Finite)
    }

    pub fn is_archimedean(&self) -> bool {
        matches!(self, Place::Infinite)
    }

    pub fn prime(&self) -> Option<Prime> {
        match self {
            Place::Infinite => None,
            Place::Finite(p) => Some(*p),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => f.write_str("inf"),
            Place::Finite(p) => write!(f, "p={p}"),
        }
    }
}

impl FromStr for Place {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "∞" => Ok(Place::Infinite),
            _ => {
                let digits = s.strip_prefix("p=").unwrap_or(s);
                let p: u64 = digits
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad place {s:?}, expected \"inf\" or \"p=<prime>\"")))?;
                Place::finite(p)
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `exponent * log(prime)`, kept symbolically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: i64,
}

impl PrimePower {
    pub fn ln(&self) -> f64 {
        self.exponent as f64 * (self.prime as f64).ln()
    }
}

/// Logarithm of a normalized absolute value.
///
/// At a finite place `exact = (p, e)` encodes `log ||x||_p = -e log p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogNorm {
    pub exact: Option<PrimePower>,
    pub approx: f64,
}

/// p-adic valuation of a nonzero integer.
pub fn ord_int(n: &BigInt, p: Prime) -> Result<i64> {
    if n.is_zero() {
        return Err(Error::domain("valuation of 0 is undefined"));
    }
    let p = BigInt::from(p.get());
    let mut n = n.clone();
    let mut e = 0i64;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return Ok(e);
        }
        n = q;
        e += 1;
    }
}

/// p-adic valuation of a nonzero rational: `x = p^e * (unit at p)`.
pub fn ord(x: &Rat, p: Prime) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::domain("valuation of 0 is undefined"));
    }
    Ok(ord_int(x.numer(), p)? - ord_int(x.denom(), p)?)
}

/// Like [`ord`] but validates a raw integer prime.
pub fn ord_checked(x: &Rat, p: u64) -> Result<i64> {
    ord(x, Prime::new(p)?)
}

/// Natural log of a positive big integer, accurate to a few ulp for any size.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        if let Some(f) = n.to_f64() {
            return f.ln();
        }
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of `|num / den|` for nonzero integers, computed from the exact
/// ratio so that equal ratios give bit-identical results.
pub fn ln_ratio(num: &BigInt, den: &BigInt) -> f64 {
    debug_assert!(!num.is_zero() && !den.is_zero());
    let r = BigRational::new(num.abs(), den.abs());
    if let Some(f) = r.to_f64() {
        if f.is_normal() {
            return f.ln();
        }
    }
    ln_biguint(r.numer().magnitude()) - ln_biguint(r.denom().magnitude())
}

/// `log ||x||_v`.
pub fn norm(x: &Rat, v: Place) -> Result<LogNorm> {
    if x.is_zero() {
        return Err(Error::domain("norm of 0 is -inf; exclude supports first"));
    }
    Ok(match v {
        Place::Infinite => LogNorm {
            exact: None,
            approx: ln_ratio(x.numer(), x.denom()),
        },
        Place::Finite(p) => {
            let e = ord(x, p)?;
            LogNorm {
                exact: Some(PrimePower {
                    prime: p.get(),
                    exponent: e,
                }),
                approx: -(e as f64) * p.ln(),
            }
        }
    })
}

/// The data of the product formula for one rational: its valuations at every
/// prime where it is not a unit, and its archimedean log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductFormula {
    pub value: Rat,
    /// `(p, ord_p(x))`, ascending in `p`, zero exponents omitted.
    pub finite: Vec<(u64, i64)>,
    pub archimedean_log: f64,
}

impl ProductFormula {
    /// Per-prime coefficients of `sum_v log ||x||_v`, where the archimedean
    /// term `log|x|` is expanded symbolically from the factorization. Every
    /// entry is zero for a valid ledger; the map is empty in that case.
    pub fn symbolic_residual(&self) -> BTreeMap<u64, i64> {
        let mut acc: BTreeMap<u64, i64> = BTreeMap::new();
        // archimedean: log|x| = sum e_p log p
        for &(p, e) in &self.finite {
            *acc.entry(p).or_default() += e;
        }
        // finite places: log ||x||_p = -e_p log p
        for &(p, e) in &self.finite {
            *acc.entry(p).or_default() -= e;
        }
        acc.retain(|_, e| *e != 0);
        acc
    }

    /// True when the ledger reconstructs `|x|` exactly and the symbolic
    /// residual vanishes.
    pub fn is_exact_zero(&self) -> bool {
        let mut rebuilt = BigRational::one();
        for &(p, e) in &self.finite {
            let pp = BigRational::from_integer(BigInt::from(p));
            rebuilt *= num_traits::pow::Pow::pow(&pp, e as i32);
        }
        rebuilt == self.value.inner().abs() && self.symbolic_residual().is_empty()
    }

    /// Floating-point residual `log|x| - sum_p ord_p(x) log p`.
    pub fn float_residual(&self) -> f64 {
        let finite: f64 = self
            .finite
            .iter()
            .map(|&(p, e)| e as f64 * (p as f64).ln())
            .sum();
        self.archimedean_log - finite
    }
}

pub fn product_formula_residual(x: &Rat) -> Result<ProductFormula> {
    if x.is_zero() {
        return Err(Error::domain("product formula needs a nonzero rational"));
    }
    let mut exps: BTreeMap<u64, i64> = BTreeMap::new();
    for (p, e) in factor_biguint(x.numer().magnitude())? {
        *exps.entry(p).or_default() += e as i64;
    }
    for (p, e) in factor_biguint(x.denom().magnitude())? {
        *exps.entry(p).or_default() -= e as i64;
    }
    Ok(ProductFormula {
        value: x.clone(),
        finite: exps.into_iter().filter(|(_, e)| *e != 0).collect(),
        archimedean_log: ln_ratio(x.numer(), x.denom()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    fn two() -> Place {
        Place::finite(2).unwrap()
    }

    #[test]
    fn norm_examples() {
        let n = norm(&r("12"), two()).unwrap();
        assert_eq!(n.exact, Some(PrimePower { prime: 2, exponent: 2 }));
        assert!((n.approx - (0.25f64).ln()).abs() < 1e-15);

        let n = norm(&r("-6"), Place::Infinite).unwrap();
        assert_eq!(n.exact, None);
        assert_eq!(n.approx, 6f64.ln());

        let n = norm(&r("3/8"), two()).unwrap();
        assert_eq!(n.exact, Some(PrimePower { prime: 2, exponent: -3 }));
        assert!((n.approx - 8f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn norm_of_zero_is_domain_error() {
        assert!(matches!(norm(&r("0"), Place::Infinite), Err(Error::Domain(_))));
    }

    #[test]
    fn ord_examples() {
        assert_eq!(ord_checked(&r("40"), 2).unwrap(), 3);
        assert_eq!(ord_checked(&r("1"), 7).unwrap(), 0);
        assert_eq!(ord_checked(&r("9/2"), 3).unwrap(), 2);
        assert!(matches!(ord_checked(&r("0"), 3), Err(Error::Domain(_))));
        assert!(matches!(ord_checked(&r("5"), 4), Err(Error::Argument(_))));
    }

    #[test]
    fn product_formula_examples() {
        let pf = product_formula_residual(&r("-6")).unwrap();
        assert_eq!(pf.finite, vec![(2, 1), (3, 1)]);
        assert_eq!(pf.archimedean_log, 6f64.ln());
        assert!(pf.is_exact_zero());

        let pf = product_formula_residual(&r("1")).unwrap();
        assert!(pf.finite.is_empty());
        assert_eq!(pf.archimedean_log, 0.0);
        assert!(pf.is_exact_zero());

        let pf = product_formula_residual(&r("35/4")).unwrap();
        assert_eq!(pf.finite, vec![(2, -2), (5, 1), (7, 1)]);
        assert!(pf.is_exact_zero());
        assert!(pf.float_residual().abs() < 1e-14);
    }

    #[test]
    fn tampered_ledger_is_not_zero() {
        let mut pf = product_formula_residual(&r("35/4")).unwrap();
        pf.finite[1].1 = 2;
        assert!(!pf.is_exact_zero());
    }

    #[test]
    fn place_round_trip() {
        for s in ["inf", "p=2", "p=101"] {
            let p: Place = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("p=9".parse::<Place>().is_err());
        assert!("q".parse::<Place>().is_err());
    }

    #[test]
    fn ln_of_huge_ratio() {
        let big = BigInt::from(10u8).pow(400);
        let v = ln_ratio(&big, &BigInt::from(1));
        assert!((v - 400.0 * 10f64.ln()).abs() < 1e-9);
        let v = ln_ratio(&BigInt::from(1), &big);
        assert!((v + 400.0 * 10f64.ln()).abs() < 1e-9);
    }
}
