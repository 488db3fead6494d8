//! Base-field arithmetic: exact rationals and Gaussian rationals.
//!
//! Every scalar in the library ultimately reduces to arithmetic here. The two
//! supported base fields are Q and Q(i); a `BaseElem` always carries both a
//! real and an imaginary part, with the invariant that the imaginary part is
//! zero whenever the ambient field is plain Q (enforced at the `Scalar`
//! construction boundary, not here).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;
use std::fmt;

use crate::Error;

/// Which base field a tower starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BaseKind {
    Rationals,
    GaussianRationals,
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseKind::Rationals => write!(f, "Q"),
            BaseKind::GaussianRationals => write!(f, "Q(i)"),
        }
    }
}

/// Element of Q or Q(i): `re + im*i` with exact rational components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseElem {
    pub re: BigRational,
    pub im: BigRational,
}

impl BaseElem {
    pub fn zero() -> Self {
        BaseElem {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        BaseElem {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    pub fn i() -> Self {
        BaseElem {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        BaseElem {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        BaseElem {
            re: r,
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &BaseElem) -> BaseElem {
        BaseElem {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &BaseElem) -> BaseElem {
        BaseElem {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn neg(&self) -> BaseElem {
        BaseElem {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn mul(&self, o: &BaseElem) -> BaseElem {
        BaseElem {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    /// Complex conjugate (identity on Q).
    pub fn conj(&self) -> BaseElem {
        BaseElem {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `re^2 + im^2`, the norm down to Q.
    pub fn norm(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<BaseElem> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(BaseElem {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    pub fn div(&self, o: &BaseElem) -> Option<BaseElem> {
        o.inv().map(|inv| self.mul(&inv))
    }

    /// Exact square root within the given base field, if one exists.
    pub fn sqrt(&self, kind: BaseKind) -> Option<BaseElem> {
        if self.is_zero() {
            return Some(BaseElem::zero());
        }
        match kind {
            BaseKind::Rationals => {
                if !self.im.is_zero() {
                    return None;
                }
                rational_sqrt(&self.re).map(BaseElem::from_rational)
            }
            BaseKind::GaussianRationals => gaussian_sqrt(self),
        }
    }

    pub fn is_square(&self, kind: BaseKind) -> bool {
        self.sqrt(kind).is_some()
    }
}

impl fmt::Display for BaseElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            if self.im.is_one() {
                write!(f, "i")
            } else {
                write!(f, "{}*i", self.im)
            }
        } else if self.im.is_positive() {
            if self.im.is_one() {
                write!(f, "({}+i)", self.re)
            } else {
                write!(f, "({}+{}*i)", self.re, self.im)
            }
        } else if self.im == -BigRational::one() {
            write!(f, "({}-i)", self.re)
        } else {
            write!(f, "({}{}*i)", self.re, self.im)
        }
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Square root of `x + y*i` inside Q(i), solving `(a+bi)^2 = x+yi`.
fn gaussian_sqrt(z: &BaseElem) -> Option<BaseElem> {
    let x = &z.re;
    let y = &z.im;
    if y.is_zero() {
        // Either x is a rational square, or -x is (then the root is b*i).
        if let Some(a) = rational_sqrt(x) {
            return Some(BaseElem::from_rational(a));
        }
        if let Some(b) = rational_sqrt(&-x.clone()) {
            return Some(BaseElem {
                re: BigRational::zero(),
                im: b,
            });
        }
        return None;
    }
    // a^2 - b^2 = x, 2ab = y => a^2 = (x + sqrt(x^2+y^2)) / 2, needing the
    // norm x^2+y^2 to be a rational square first.
    let norm = x * x + y * y;
    let s = rational_sqrt(&norm)?;
    let two = BigRational::from_integer(BigInt::from(2));
    for root in [&s, &(-s.clone())] {
        let a2 = (x + root) / &two;
        if let Some(a) = rational_sqrt(&a2) {
            if !a.is_zero() {
                let b = y / (&two * &a);
                return Some(BaseElem { re: a, im: b });
            }
        }
    }
    None
}

/// Primes up to the factoring capacity bound (10^4 per the library contract).
pub const PRIME_CAP: u64 = 10_000;

pub static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| {
    let cap = PRIME_CAP as usize;
    let mut sieve = vec![true; cap + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= cap {
        if sieve[p] {
            let mut m = p * p;
            while m <= cap {
                sieve[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    (2..=cap).filter(|&n| sieve[n]).map(|n| n as u64).collect()
});

/// Factor a positive integer using primes <= 10^4; errors if a larger prime
/// factor remains (capacity contract: no silently wrong answers).
pub fn factor_u(n: &BigInt) -> Result<Vec<(u64, u32)>, Error> {
    assert!(n.is_positive(), "factor_u needs a positive integer");
    let mut m = n.clone();
    let mut out = Vec::new();
    for &p in SMALL_PRIMES.iter() {
        if m.is_one() {
            break;
        }
        let bp = BigInt::from(p);
        let mut e = 0u32;
        loop {
            let (q, r) = m.div_rem(&bp);
            if r.is_zero() {
                m = q;
                e += 1;
            } else {
                break;
            }
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    if !m.is_one() {
        return Err(Error::Capacity(format!(
            "integer has a prime factor beyond {PRIME_CAP}: residual {m}"
        )));
    }
    Ok(out)
}

/// Canonical square-class data for a base-field element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BaseClass {
    /// Sign bit plus the set of primes with odd exponent.
    Rat { neg: bool, primes: Vec<u64> },
    /// `unit_i` marks the class of i (equivalently the class of 2·(square)
    /// absorbed as a unit); `primes` are canonical Gaussian primes with odd
    /// exponent, stored as (re, im) with re odd positive, im even.
    Gauss {
        unit_i: bool,
        primes: Vec<(i64, i64)>,
    },
}

impl BaseClass {
    pub fn is_trivial(&self) -> bool {
        match self {
            BaseClass::Rat { neg, primes } => !*neg && primes.is_empty(),
            BaseClass::Gauss { unit_i, primes } => !*unit_i && primes.is_empty(),
        }
    }

    pub fn mul(&self, other: &BaseClass) -> BaseClass {
        match (self, other) {
            (BaseClass::Rat { neg: n1, primes: p1 }, BaseClass::Rat { neg: n2, primes: p2 }) => {
                BaseClass::Rat {
                    neg: n1 ^ n2,
                    primes: symmetric_diff(p1, p2),
                }
            }
            (
                BaseClass::Gauss { unit_i: u1, primes: p1 },
                BaseClass::Gauss { unit_i: u2, primes: p2 },
            ) => BaseClass::Gauss {
                unit_i: u1 ^ u2,
                primes: symmetric_diff(p1, p2),
            },
            _ => panic!("square classes over different base fields"),
        }
    }
}

fn symmetric_diff<T: Ord + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Square class of a nonzero element of Q: sign plus odd-exponent primes.
pub fn rat_square_class(r: &BigRational) -> Result<BaseClass, Error> {
    assert!(!r.is_zero());
    let neg = r.is_negative();
    // numerator * denominator has the same square class as r
    let prod: BigInt = (r.numer() * r.denom()).abs();
    let mut primes: Vec<u64> = factor_u(&prod)?
        .into_iter()
        .filter(|(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .collect();
    primes.sort_unstable();
    Ok(BaseClass::Rat { neg, primes })
}

/// Square class of a nonzero element of Q(i).
///
/// Units: -1 = i^2 is a square; i is not, and its class coincides with the
/// class of 2 because 2i = (1+i)^2. We normalize by fully factoring into
/// canonical Gaussian primes and one residual unit.
pub fn gauss_square_class(z: &BaseElem) -> Result<BaseClass, Error> {
    assert!(!z.is_zero());
    // Clear denominators: class(u/v) = class(u * conj(v) * |v|^2 ...) —
    // simplest: class(num) * class(den) where num, den are Gaussian integers.
    let d1 = z.re.denom().clone();
    let d2 = z.im.denom().clone();
    let l = d1.lcm(&d2);
    let gi_re = z.re.numer() * (&l / z.re.denom());
    let gi_im = z.im.numer() * (&l / z.im.denom());
    let c_num = gauss_int_class(&gi_re, &gi_im)?;
    let c_den = gauss_int_class(&l, &BigInt::zero())?;
    Ok(c_num.mul(&c_den))
}

/// Square class of a nonzero Gaussian integer a + b*i.
fn gauss_int_class(a: &BigInt, b: &BigInt) -> Result<BaseClass, Error> {
    let mut wa = a.clone();
    let mut wb = b.clone();
    let norm = a * a + b * b;
    let fac = factor_u(&norm)?;
    let mut odd_primes: Vec<(i64, i64)> = Vec::new();
    for (p, _) in fac {
        if p == 2 {
            // pi = 1 + i; (a+bi)/(1+i) = ((a+b) + (b-a)i)/2, exact iff a+b even
            let two = BigInt::from(2);
            let mut e = 0u32;
            while ((&wa + &wb) % &two).is_zero() {
                let na = (&wa + &wb) / &two;
                let nb = (&wb - &wa) / &two;
                wa = na;
                wb = nb;
                e += 1;
            }
            if e % 2 == 1 {
                odd_primes.push((1, 1));
            }
        } else if p % 4 == 3 {
            let bp = BigInt::from(p);
            let mut e = 0u32;
            loop {
                let (qa, ra) = wa.div_rem(&bp);
                let (qb, rb) = wb.div_rem(&bp);
                if ra.is_zero() && rb.is_zero() {
                    wa = qa;
                    wb = qb;
                    e += 1;
                } else {
                    break;
                }
            }
            if e % 2 == 1 {
                odd_primes.push((p as i64, 0));
            }
        } else {
            // p = 1 mod 4: split; canonical pi = (x, y) with x odd > 0, y even
            let (x, y) = split_prime(p);
            for pi in [(x, y), (x, -y)] {
                let mut e = 0u32;
                while let Some((na, nb)) = gauss_div_exact(&wa, &wb, pi.0, pi.1, p) {
                    wa = na;
                    wb = nb;
                    e += 1;
                }
                if e % 2 == 1 {
                    odd_primes.push(pi);
                }
            }
        }
    }
    // residual unit
    let unit_i = if wb.is_zero() {
        debug_assert!(wa.clone().abs().is_one(), "nonunit residual in gaussian factorization");
        false
    } else {
        debug_assert!(wa.is_zero() && wb.clone().abs().is_one());
        true
    };
    odd_primes.sort_unstable();
    Ok(BaseClass::Gauss {
        unit_i,
        primes: odd_primes,
    })
}

/// Write p = x^2 + y^2 with x odd positive, y even positive (p = 1 mod 4).
fn split_prime(p: u64) -> (i64, i64) {
    for x in (1..).step_by(2) {
        let x2 = x * x;
        if x2 > p {
            break;
        }
        let rest = p - x2;
        let y = (rest as f64).sqrt() as u64;
        for cand in y.saturating_sub(1)..=y + 1 {
            if cand * cand == rest && cand % 2 == 0 {
                return (x as i64, cand as i64);
            }
        }
    }
    unreachable!("p = 1 mod 4 must split as a sum of squares")
}

/// Exact division of a Gaussian integer by the prime x + y*i of norm p.
fn gauss_div_exact(a: &BigInt, b: &BigInt, x: i64, y: i64, p: u64) -> Option<(BigInt, BigInt)> {
    // (a+bi)(x-yi)/p
    let bx = BigInt::from(x);
    let by = BigInt::from(y);
    let bp = BigInt::from(p);
    let na = a * &bx + b * &by;
    let nb = b * &bx - a * &by;
    let (qa, ra) = na.div_rem(&bp);
    let (qb, rb) = nb.div_rem(&bp);
    if ra.is_zero() && rb.is_zero() {
        Some((qa, qb))
    } else {
        None
    }
}

/// Square class of a base element in the appropriate field.
pub fn base_square_class(x: &BaseElem, kind: BaseKind) -> Result<BaseClass, Error> {
    match kind {
        BaseKind::Rationals => {
            assert!(x.im.is_zero(), "imaginary part in a rational-base element");
            rat_square_class(&x.re)
        }
        BaseKind::GaussianRationals => gauss_square_class(x),
    }
}
