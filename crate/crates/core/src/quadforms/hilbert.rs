//! Hilbert symbols over Q at finite and infinite places.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

use crate::fields::base::factor_u;
use crate::Error;

/// A place of Q: the real place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaceQ {
    Infinity,
    Prime(u64),
}

impl fmt::Display for PlaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceQ::Infinity => write!(f, "inf"),
            PlaceQ::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for PlaceQ {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "inf" {
            return Ok(PlaceQ::Infinity);
        }
        s.parse::<u64>()
            .map(PlaceQ::Prime)
            .map_err(|_| Error::Parse(format!("bad place: {s}")))
    }
}

/// p-adic valuation and unit part of a nonzero rational.
fn val_unit(r: &BigRational, p: u64) -> (i64, BigRational) {
    assert!(!r.is_zero());
    let bp = BigInt::from(p);
    let mut v = 0i64;
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    loop {
        let (q, rem) = num.div_rem(&bp);
        if rem.is_zero() {
            num = q;
            v += 1;
        } else {
            break;
        }
    }
    loop {
        let (q, rem) = den.div_rem(&bp);
        if rem.is_zero() {
            den = q;
            v -= 1;
        } else {
            break;
        }
    }
    (v, BigRational::new(num, den))
}

/// Legendre symbol of a p-unit rational, p an odd prime.
fn legendre(u: &BigRational, p: u64) -> i32 {
    let bp = BigInt::from(p);
    let n = u.numer().mod_floor(&bp);
    let d = u.denom().mod_floor(&bp);
    // (n/d mod p | p) = (n*d | p) since d^2 is a square
    let m = (n * d).mod_floor(&bp);
    assert!(!m.is_zero(), "legendre symbol needs a p-unit");
    let e = (&bp - BigInt::one()) / BigInt::from(2);
    let r = m.modpow(&e, &bp);
    if r.is_one() {
        1
    } else {
        -1
    }
}

/// (u-1)/2 mod 2 for an odd 2-unit rational: 0 iff u = 1 mod 4.
fn eps2(u: &BigRational) -> u8 {
    let four = BigInt::from(4);
    let n = u.numer().mod_floor(&four);
    let d = u.denom().mod_floor(&four);
    // u mod 4 is n * d^{-1}; d is 1 or 3, both self-inverse mod 4
    let m = (n * d).mod_floor(&four);
    if m == BigInt::one() {
        0
    } else {
        1
    }
}

/// (u^2-1)/8 mod 2 for an odd 2-unit rational: 0 iff u = ±1 mod 8.
fn omega2(u: &BigRational) -> u8 {
    let eight = BigInt::from(8);
    let n = u.numer().mod_floor(&eight);
    let d = u.denom().mod_floor(&eight);
    // odd residues mod 8 are self-inverse
    let m = (n * d).mod_floor(&eight);
    let m = m.to_string().parse::<u8>().unwrap();
    if m == 1 || m == 7 {
        0
    } else {
        1
    }
}

/// Hilbert symbol (a, b)_v over Q_v for nonzero rationals; returns +1 or -1.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: &PlaceQ) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "hilbert symbol of zero");
    match v {
        PlaceQ::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        PlaceQ::Prime(2) => {
            let (alpha, u) = val_unit(a, 2);
            let (beta, w) = val_unit(b, 2);
            let e = (eps2(&u) & eps2(&w))
                ^ ((alpha as u8 & 1) & omega2(&w))
                ^ ((beta as u8 & 1) & omega2(&u));
            if e == 0 {
                1
            } else {
                -1
            }
        }
        PlaceQ::Prime(p) => {
            assert!(*p > 2);
            let (alpha, u) = val_unit(a, *p);
            let (beta, w) = val_unit(b, *p);
            let mut s = 1i32;
            if alpha & 1 == 1 && beta & 1 == 1 && (p - 1) / 2 % 2 == 1 {
                s = -s;
            }
            if beta & 1 == 1 {
                s *= legendre(&u, *p);
            }
            if alpha & 1 == 1 {
                s *= legendre(&w, *p);
            }
            s
        }
    }
}

/// Finite primes dividing the numerator or denominator of r.
pub fn prime_support(r: &BigRational) -> Result<Vec<u64>, Error> {
    assert!(!r.is_zero());
    let prod: BigInt = (r.numer() * r.denom()).abs();
    Ok(factor_u(&prod)?.into_iter().map(|(p, _)| p).collect())
}

/// All places where (a, b)_v could be nontrivial: infinity, 2, and the odd
/// primes in the supports of a and b.
pub fn ram_support(a: &BigRational, b: &BigRational) -> Result<Vec<PlaceQ>, Error> {
    let mut primes: Vec<u64> = vec![2];
    primes.extend(prime_support(a)?);
    primes.extend(prime_support(b)?);
    primes.sort_unstable();
    primes.dedup();
    let mut out = vec![PlaceQ::Infinity];
    out.extend(primes.into_iter().map(PlaceQ::Prime));
    Ok(out)
}

/// Places where (a, b)_v = -1. Always even in number (product formula).
pub fn ram_places(a: &BigRational, b: &BigRational) -> Result<Vec<PlaceQ>, Error> {
    let places = ram_support(a, b)?;
    let ram: Vec<PlaceQ> = places
        .into_iter()
        .filter(|v| hilbert_symbol(a, b, v) == -1)
        .collect();
    debug_assert!(ram.len() % 2 == 0, "product formula violated");
    Ok(ram)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn classic_values() {
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), &PlaceQ::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), &PlaceQ::Infinity), -1);
        assert_eq!(hilbert_symbol(&q(-1), &q(-1), &PlaceQ::Prime(3)), 1);
        assert_eq!(hilbert_symbol(&q(3), &q(5), &PlaceQ::Prime(5)), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(7), &PlaceQ::Prime(7)), 1);
        assert_eq!(hilbert_symbol(&q(2), &q(7), &PlaceQ::Prime(2)), 1);
        // (2, 5)_2 = -1: 5 = 5 mod 8, omega(5) = 1
        assert_eq!(hilbert_symbol(&q(2), &q(5), &PlaceQ::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&q(2), &q(5), &PlaceQ::Prime(5)), -1);
    }

    #[test]
    fn symmetry_and_bilinearity() {
        let vals = [q(-1), q(2), q(3), q(5), q(-6), q(15)];
        let places = [
            PlaceQ::Infinity,
            PlaceQ::Prime(2),
            PlaceQ::Prime(3),
            PlaceQ::Prime(5),
        ];
        for a in &vals {
            for b in &vals {
                for v in &places {
                    assert_eq!(hilbert_symbol(a, b, v), hilbert_symbol(b, a, v));
                    for c in &vals {
                        let bc = b * c;
                        assert_eq!(
                            hilbert_symbol(a, &bc, v),
                            hilbert_symbol(a, b, v) * hilbert_symbol(a, c, v)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn product_formula() {
        let vals = [q(-1), q(2), q(3), q(-30), q(77), q(13)];
        for a in &vals {
            for b in &vals {
                let mut prod = 1;
                for v in ram_support(a, b).unwrap() {
                    prod *= hilbert_symbol(a, b, &v);
                }
                assert_eq!(prod, 1, "product formula for ({a}, {b})");
            }
        }
    }

    #[test]
    fn rational_arguments() {
        // symbol depends only on square classes
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let two = q(2);
        for v in [PlaceQ::Prime(2), PlaceQ::Prime(5), PlaceQ::Infinity] {
            assert_eq!(
                hilbert_symbol(&half, &q(5), &v),
                hilbert_symbol(&two, &q(5), &v)
            );
        }
    }
}
