//! Quaternion algebras (a, b) over a field tower: exact arithmetic in the
//! basis 1, i, j, k (i^2 = a, j^2 = b, k = ij = -ji), the canonical
//! involution, reduced trace and norm, pure elements with prescribed squares,
//! and split/division certification through the norm form.

use std::fmt;

use crate::fields::{parse_scalar, FieldTower, Scalar};
use crate::quadforms::witness::{find_representation, RepResult};
use crate::quadforms::{certify_anisotropic, represents, AnisoResult, Certificate, QuadForm};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatAlgebra {
    pub tower: FieldTower,
    pub a: Scalar,
    pub b: Scalar,
}

impl QuatAlgebra {
    pub fn new(a: Scalar, b: Scalar) -> Result<Self, Error> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroInput("quaternion algebra parameter".into()));
        }
        if a.tower != b.tower {
            return Err(Error::AlgebraMismatch(
                "algebra parameters over different towers".into(),
            ));
        }
        Ok(QuatAlgebra {
            tower: a.tower.clone(),
            a,
            b,
        })
    }

    pub fn zero(&self) -> QuatElement {
        QuatElement {
            algebra: self.clone(),
            coeffs: std::array::from_fn(|_| Scalar::zero(&self.tower)),
        }
    }

    pub fn scalar(&self, x: Scalar) -> QuatElement {
        let mut e = self.zero();
        e.coeffs[0] = x;
        e
    }

    pub fn one(&self) -> QuatElement {
        self.scalar(Scalar::one(&self.tower))
    }

    pub fn basis_i(&self) -> QuatElement {
        let mut e = self.zero();
        e.coeffs[1] = Scalar::one(&self.tower);
        e
    }

    pub fn basis_j(&self) -> QuatElement {
        let mut e = self.zero();
        e.coeffs[2] = Scalar::one(&self.tower);
        e
    }

    pub fn basis_k(&self) -> QuatElement {
        let mut e = self.zero();
        e.coeffs[3] = Scalar::one(&self.tower);
        e
    }

    pub fn from_coeffs(&self, coeffs: [Scalar; 4]) -> Result<QuatElement, Error> {
        for c in &coeffs {
            if c.tower != self.tower {
                return Err(Error::AlgebraMismatch(
                    "coefficient over a different tower".into(),
                ));
            }
        }
        Ok(QuatElement {
            algebra: self.clone(),
            coeffs,
        })
    }

    /// A pure element built from coordinates in the (i, j, k) basis.
    pub fn pure(&self, x1: Scalar, x2: Scalar, x3: Scalar) -> Result<QuatElement, Error> {
        self.from_coeffs([Scalar::zero(&self.tower), x1, x2, x3])
    }

    /// The square form on pure quaternions: q^2 = <a, b, -a*b>(x1, x2, x3).
    pub fn pure_square_form(&self) -> QuadForm {
        QuadForm::new(
            &self.tower,
            vec![
                self.a.clone(),
                self.b.clone(),
                self.a.mul(&self.b).neg(),
            ],
        )
        .expect("parameters are nonzero")
    }

    /// The reduced norm form <1, -a, -b, a*b>.
    pub fn norm_form(&self) -> QuadForm {
        QuadForm::new(
            &self.tower,
            vec![
                Scalar::one(&self.tower),
                self.a.neg(),
                self.b.neg(),
                self.a.mul(&self.b),
            ],
        )
        .expect("parameters are nonzero")
    }
}

impl fmt::Display for QuatAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatElement {
    pub algebra: QuatAlgebra,
    /// Coordinates in the basis 1, i, j, k.
    pub coeffs: [Scalar; 4],
}

impl QuatElement {
    fn same_algebra(&self, o: &QuatElement) -> Result<(), Error> {
        if self.algebra != o.algebra {
            return Err(Error::AlgebraMismatch(format!(
                "elements of {} and {}",
                self.algebra, o.algebra
            )));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_pure(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    pub fn add(&self, o: &QuatElement) -> Result<QuatElement, Error> {
        self.same_algebra(o)?;
        Ok(QuatElement {
            algebra: self.algebra.clone(),
            coeffs: std::array::from_fn(|n| self.coeffs[n].add(&o.coeffs[n])),
        })
    }

    pub fn sub(&self, o: &QuatElement) -> Result<QuatElement, Error> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> QuatElement {
        QuatElement {
            algebra: self.algebra.clone(),
            coeffs: std::array::from_fn(|n| self.coeffs[n].neg()),
        }
    }

    pub fn scale(&self, c: &Scalar) -> QuatElement {
        QuatElement {
            algebra: self.algebra.clone(),
            coeffs: std::array::from_fn(|n| self.coeffs[n].mul(c)),
        }
    }

    pub fn mul(&self, o: &QuatElement) -> Result<QuatElement, Error> {
        self.same_algebra(o)?;
        let a = &self.algebra.a;
        let b = &self.algebra.b;
        let ab = a.mul(b);
        let [x0, x1, x2, x3] = &self.coeffs;
        let [y0, y1, y2, y3] = &o.coeffs;
        let z0 = x0
            .mul(y0)
            .add(&a.mul(&x1.mul(y1)))
            .add(&b.mul(&x2.mul(y2)))
            .sub(&ab.mul(&x3.mul(y3)));
        let z1 = x0
            .mul(y1)
            .add(&x1.mul(y0))
            .sub(&b.mul(&x2.mul(y3)))
            .add(&b.mul(&x3.mul(y2)));
        let z2 = x0
            .mul(y2)
            .add(&x2.mul(y0))
            .add(&a.mul(&x1.mul(y3)))
            .sub(&a.mul(&x3.mul(y1)));
        let z3 = x0
            .mul(y3)
            .add(&x3.mul(y0))
            .add(&x1.mul(y2))
            .sub(&x2.mul(y1));
        Ok(QuatElement {
            algebra: self.algebra.clone(),
            coeffs: [z0, z1, z2, z3],
        })
    }

    /// Canonical involution (quaternion conjugation).
    pub fn conj(&self) -> QuatElement {
        QuatElement {
            algebra: self.algebra.clone(),
            coeffs: [
                self.coeffs[0].clone(),
                self.coeffs[1].neg(),
                self.coeffs[2].neg(),
                self.coeffs[3].neg(),
            ],
        }
    }

    /// Reduced trace: 2*x0.
    pub fn trd(&self) -> Scalar {
        self.coeffs[0].scale_int(2)
    }

    /// Reduced norm: x0^2 - a*x1^2 - b*x2^2 + a*b*x3^2.
    pub fn nrd(&self) -> Scalar {
        let a = &self.algebra.a;
        let b = &self.algebra.b;
        let [x0, x1, x2, x3] = &self.coeffs;
        x0.mul(x0)
            .sub(&a.mul(&x1.mul(x1)))
            .sub(&b.mul(&x2.mul(x2)))
            .add(&a.mul(b).mul(&x3.mul(x3)))
    }

    pub fn inv(&self) -> Result<QuatElement, Error> {
        let n = self.nrd();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj().scale(&n.inv()?))
    }

    /// The square of the element as a scalar, when the square is scalar
    /// (always true for pure elements).
    pub fn square_scalar(&self) -> Option<Scalar> {
        let sq = self.mul(self).unwrap();
        if sq.coeffs[1].is_zero() && sq.coeffs[2].is_zero() && sq.coeffs[3].is_zero() {
            Some(sq.coeffs[0].clone())
        } else {
            None
        }
    }
}

impl fmt::Display for QuatElement {
    /// "x0 + x1*i + x2*j + x3*k", skipping zero components; parseable by
    /// `parse_quat`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        let mut wrote = false;
        for n in 0..4 {
            if self.coeffs[n].is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            if n == 0 {
                write!(f, "{}", self.coeffs[n])?;
            } else if self.coeffs[n].is_one() {
                write!(f, "{}", names[n])?;
            } else {
                write!(f, "{}*{}", self.coeffs[n], names[n])?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Outcome of division/split certification.
#[derive(Debug, Clone)]
pub enum DivisionResult {
    /// The norm form is anisotropic: certified division algebra.
    Division(Certificate),
    /// Split, with an explicit nonzero element of reduced norm zero (a zero
    /// divisor: z * conj(z) = 0).
    Split {
        zero_divisor: QuatElement,
        cert: Certificate,
    },
    Unknown(String),
}

/// Decide whether Q is a division algebra by certifying (an)isotropy of the
/// reduced norm form.
pub fn is_division(q: &QuatAlgebra) -> Result<DivisionResult, Error> {
    match certify_anisotropic(&q.norm_form())? {
        AnisoResult::Anisotropic(cert) => Ok(DivisionResult::Division(cert)),
        AnisoResult::Isotropic { vector, cert } => {
            let [x0, x1, x2, x3]: [Scalar; 4] =
                vector.try_into().expect("norm form has dimension 4");
            let z = q.from_coeffs([x0, x1, x2, x3])?;
            assert!(!z.is_zero() && z.nrd().is_zero());
            Ok(DivisionResult::Split {
                zero_divisor: z,
                cert,
            })
        }
        AnisoResult::Unknown(note) => Ok(DivisionResult::Unknown(note)),
    }
}

/// Outcome of a pure-element search.
#[derive(Debug, Clone)]
pub enum PureResult {
    Found {
        element: QuatElement,
        cert: Certificate,
    },
    /// No pure element squares to c, certified via the square form.
    None(Certificate),
    Unknown(String),
}

/// Find a pure quaternion with q^2 = c exactly, via representation of c by
/// the square form <a, b, -a*b>.
pub fn pure_with_square(q: &QuatAlgebra, c: &Scalar) -> Result<PureResult, Error> {
    if c.is_zero() {
        return Err(Error::ZeroInput("prescribed square".into()));
    }
    match represents(&q.pure_square_form(), c)? {
        RepResult::Represented { vector, cert } => {
            let [x1, x2, x3]: [Scalar; 3] = vector.try_into().expect("dimension 3");
            let e = q.pure(x1, x2, x3)?;
            assert_eq!(e.square_scalar().as_ref(), Some(c));
            Ok(PureResult::Found { element: e, cert })
        }
        RepResult::NotRepresented(cert) => Ok(PureResult::None(cert)),
        RepResult::Unknown(note) => Ok(PureResult::Unknown(note)),
    }
}

/// A nonzero pure element anticommuting with the given pure element: the
/// first nonzero candidate among the basis vectors and the coordinate cross
/// combinations, all orthogonal to q under the polar form of the norm.
pub fn anticommuting_pure(q: &QuatElement) -> Result<QuatElement, Error> {
    if !q.is_pure() {
        return Err(Error::Precondition("anticommutant of a non-pure element".into()));
    }
    let sq = q
        .square_scalar()
        .expect("pure elements square to scalars");
    if sq.is_zero() {
        return Err(Error::Precondition(
            "anticommutant of a pure element with square zero".into(),
        ));
    }
    let alg = &q.algebra;
    let t = &alg.tower;
    let (a, b) = (&alg.a, &alg.b);
    let [_, q1, q2, q3] = &q.coeffs;
    // u anticommutes with q iff a*u1*q1 + b*u2*q2 - a*b*u3*q3 = 0
    let zero = Scalar::zero(t);
    let one = Scalar::one(t);
    let candidates: Vec<[Scalar; 3]> = vec![
        [one.clone(), zero.clone(), zero.clone()],
        [zero.clone(), one.clone(), zero.clone()],
        [zero.clone(), zero.clone(), one.clone()],
        [b.mul(q2), a.mul(q1).neg(), zero.clone()],
        [b.mul(q3), zero.clone(), q1.clone()],
        [zero.clone(), a.mul(q3), q2.clone()],
    ];
    for [u1, u2, u3] in candidates {
        let pairing = a
            .mul(&u1.mul(q1))
            .add(&b.mul(&u2.mul(q2)))
            .sub(&a.mul(b).mul(&u3.mul(q3)));
        if !pairing.is_zero() {
            continue;
        }
        let u = alg.pure(u1, u2, u3)?;
        if u.is_zero() {
            continue;
        }
        let anti = u.mul(q)?.add(&q.mul(&u)?)?;
        assert!(anti.is_zero(), "orthogonality must imply anticommutation");
        return Ok(u);
    }
    Err(Error::Internal(
        "no anticommuting candidate for a nonzero pure element".into(),
    ))
}

/// Does F(sqrt(delta)) split Q? Decided through representation of delta by
/// the pure square form; delta must not already be a square.
pub fn splits_over(q: &QuatAlgebra, delta: &Scalar) -> Result<PureResult, Error> {
    if delta.is_square() {
        return Err(Error::Precondition(
            "splitting field test with a square discriminant".into(),
        ));
    }
    pure_with_square(q, delta)
}

/// Write an element as a product of two pure quaternions. Needs an
/// invertible pure element orthogonal to the pure part.
pub fn two_pure_factorization(
    x: &QuatElement,
) -> Result<(QuatElement, QuatElement), Error> {
    let alg = &x.algebra;
    let p = alg.pure(
        x.coeffs[1].clone(),
        x.coeffs[2].clone(),
        x.coeffs[3].clone(),
    )?;
    let u = if p.is_zero() {
        alg.basis_i()
    } else {
        // an anticommuting pure has zero trace pairing with p
        let sq = p.square_scalar().unwrap();
        if sq.is_zero() {
            return Err(Error::Precondition(
                "pure part has square zero; no invertible orthogonal pure".into(),
            ));
        }
        anticommuting_pure(&p)?
    };
    let w = u.inv()?.mul(x)?;
    if !w.is_pure() {
        return Err(Error::Internal("cofactor is not pure".into()));
    }
    debug_assert_eq!(u.mul(&w)?, *x);
    Ok((u, w))
}

/// Deterministic representation search on the pure square form, exposed for
/// callers that want a witness vector rather than an element.
pub fn pure_square_witness(q: &QuatAlgebra, c: &Scalar) -> Option<[Scalar; 3]> {
    let v = find_representation(&q.pure_square_form(), c, 0)?;
    v.try_into().ok()
}

/// Parse `x0 + x1*i + x2*j + x3*k` with scalar coefficients. The letters
/// i, j, k denote the quaternion units when they stand alone as a factor;
/// over Q(i) the imaginary unit must therefore appear inside parentheses,
/// e.g. `(1+i)*j`.
pub fn parse_quat(alg: &QuatAlgebra, src: &str) -> Result<QuatElement, Error> {
    let mut coeffs = [
        Scalar::zero(&alg.tower),
        Scalar::zero(&alg.tower),
        Scalar::zero(&alg.tower),
        Scalar::zero(&alg.tower),
    ];
    for (sign, term) in split_terms(src)? {
        let (unit, coeff_src) = split_unit(&term)?;
        let mut c = if coeff_src.is_empty() {
            Scalar::one(&alg.tower)
        } else {
            parse_scalar(&alg.tower, &coeff_src)?
        };
        if sign < 0 {
            c = c.neg();
        }
        coeffs[unit] = coeffs[unit].add(&c);
    }
    alg.from_coeffs(coeffs)
}

/// Split at top-level + and - into signed terms.
fn split_terms(src: &str) -> Result<Vec<(i32, String)>, Error> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut sign = 1i32;
    for (n, ch) in src.chars().enumerate() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse("unbalanced parentheses".into()));
                }
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                // a leading sign or a sign right after '*' or '^' belongs to
                // the current term
                let trimmed = cur.trim();
                if n == 0 || trimmed.is_empty() || trimmed.ends_with(['*', '/', '^']) {
                    cur.push(ch);
                } else {
                    out.push((sign, std::mem::take(&mut cur)));
                    sign = if ch == '+' { 1 } else { -1 };
                }
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced parentheses".into()));
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    out.push((sign, cur));
    Ok(out)
}

/// Pull a standalone quaternion unit factor out of a term; returns the
/// component index and the remaining coefficient source.
fn split_unit(term: &str) -> Result<(usize, String), Error> {
    let mut depth = 0i32;
    let mut factors: Vec<String> = vec![String::new()];
    for ch in term.chars() {
        match ch {
            '(' => {
                depth += 1;
                factors.last_mut().unwrap().push(ch);
            }
            ')' => {
                depth -= 1;
                factors.last_mut().unwrap().push(ch);
            }
            '*' if depth == 0 => factors.push(String::new()),
            _ => factors.last_mut().unwrap().push(ch),
        }
    }
    let mut unit: Option<usize> = None;
    let mut coeff: Vec<String> = Vec::new();
    for f in factors {
        let t = f.trim();
        let u = match t {
            "i" => Some(1),
            "j" => Some(2),
            "k" => Some(3),
            _ => None,
        };
        match u {
            Some(u) => {
                if unit.replace(u).is_some() {
                    return Err(Error::Parse(
                        "more than one quaternion unit in a term".into(),
                    ));
                }
            }
            None => coeff.push(t.to_string()),
        }
    }
    Ok((unit.unwrap_or(0), coeff.join("*")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BaseKind;

    fn hamilton() -> QuatAlgebra {
        let t = FieldTower::rationals();
        QuatAlgebra::new(Scalar::from_int(&t, -1), Scalar::from_int(&t, -1)).unwrap()
    }

    fn generic() -> QuatAlgebra {
        let t = FieldTower::new(BaseKind::Rationals, &["a1", "a2"]);
        QuatAlgebra::new(Scalar::var(&t, "a1"), Scalar::var(&t, "a2")).unwrap()
    }

    #[test]
    fn multiplication_table() {
        let q = generic();
        let (i, j, k) = (q.basis_i(), q.basis_j(), q.basis_k());
        assert_eq!(i.mul(&j).unwrap(), k);
        assert_eq!(j.mul(&i).unwrap(), k.neg());
        assert_eq!(
            i.mul(&i).unwrap(),
            q.scalar(q.a.clone())
        );
        assert_eq!(
            j.mul(&j).unwrap(),
            q.scalar(q.b.clone())
        );
        assert_eq!(
            k.mul(&k).unwrap(),
            q.scalar(q.a.mul(&q.b).neg())
        );
        // associativity spot checks on mixed products
        let x = i.add(&j).unwrap();
        let y = j.add(&k).unwrap();
        let z = k.add(&q.one()).unwrap();
        assert_eq!(
            x.mul(&y).unwrap().mul(&z).unwrap(),
            x.mul(&y.mul(&z).unwrap()).unwrap()
        );
    }

    #[test]
    fn norm_and_conjugation() {
        let q = hamilton();
        let t = &q.tower;
        let x = q
            .from_coeffs([
                Scalar::from_int(t, 1),
                Scalar::from_int(t, 2),
                Scalar::from_int(t, -3),
                Scalar::from_int(t, 5),
            ])
            .unwrap();
        // x * conj(x) = Nrd(x) * 1
        assert_eq!(x.mul(&x.conj()).unwrap(), q.scalar(x.nrd()));
        // Nrd(1 + 2i - 3j + 5k) over (-1,-1) is 1 + 4 + 9 + 25
        assert_eq!(x.nrd(), Scalar::from_int(t, 39));
        let y = q.basis_i().add(&q.one()).unwrap();
        // (xy)~ = conj(y) conj(x), Nrd multiplicative
        let xy = x.mul(&y).unwrap();
        assert_eq!(xy.conj(), y.conj().mul(&x.conj()).unwrap());
        assert_eq!(xy.nrd(), x.nrd().mul(&y.nrd()));
    }

    #[test]
    fn i_plus_j_squares_to_minus_two() {
        let q = hamilton();
        let x = q.basis_i().add(&q.basis_j()).unwrap();
        assert_eq!(x.square_scalar(), Some(Scalar::from_int(&q.tower, -2)));
    }

    #[test]
    fn division_certificates() {
        // (1, b) is split with an explicit zero divisor
        let t = FieldTower::new(BaseKind::Rationals, &["b"]);
        let q = QuatAlgebra::new(Scalar::one(&t), Scalar::var(&t, "b")).unwrap();
        match is_division(&q).unwrap() {
            DivisionResult::Split { zero_divisor, cert } => {
                assert!(!zero_divisor.is_zero());
                assert!(zero_divisor.nrd().is_zero());
                cert.verify().unwrap();
            }
            other => panic!("expected split, got {other:?}"),
        }
        // Hamilton quaternions over Q are division
        match is_division(&hamilton()).unwrap() {
            DivisionResult::Division(cert) => cert.verify().unwrap(),
            other => panic!("expected division, got {other:?}"),
        }
        // (a1, a2) over Q(a1, a2) is division via a residue chain
        match is_division(&generic()).unwrap() {
            DivisionResult::Division(cert) => cert.verify().unwrap(),
            other => panic!("expected division, got {other:?}"),
        }
    }

    #[test]
    fn pure_with_prescribed_square() {
        let q = generic();
        // c = a gives i
        match pure_with_square(&q, &q.a).unwrap() {
            PureResult::Found { element, .. } => {
                assert_eq!(element, q.basis_i());
            }
            other => panic!("expected i, got {other:?}"),
        }
        // c = -2 in (-1,-1): some pure with square -2 (i + j works)
        let h = hamilton();
        let c = Scalar::from_int(&h.tower, -2);
        match pure_with_square(&h, &c).unwrap() {
            PureResult::Found { element, cert } => {
                assert_eq!(element.square_scalar(), Some(c));
                assert!(element.is_pure());
                cert.verify().unwrap();
            }
            other => panic!("expected a pure square root of -2, got {other:?}"),
        }
        // c = 2 in (-1,-1): impossible (negative-definite square form)
        let c = Scalar::from_int(&h.tower, 2);
        match pure_with_square(&h, &c).unwrap() {
            PureResult::None(cert) => cert.verify().unwrap(),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn anticommutants() {
        let q = generic();
        let u = anticommuting_pure(&q.basis_i()).unwrap();
        assert_eq!(u, q.basis_j());
        let h = hamilton();
        let x = h.basis_i().add(&h.basis_j()).unwrap();
        let u = anticommuting_pure(&x).unwrap();
        assert!(u.is_pure() && !u.is_zero());
        let anti = u.mul(&x).unwrap().add(&x.mul(&u).unwrap()).unwrap();
        assert!(anti.is_zero());
    }

    #[test]
    fn products_of_two_pures() {
        let h = hamilton();
        let t = &h.tower;
        for coeffs in [[1i64, 0, 0, 0], [2, 1, 0, 0], [1, 2, -3, 5], [0, 0, 2, 1]] {
            let x = h
                .from_coeffs(std::array::from_fn(|n| Scalar::from_int(t, coeffs[n])))
                .unwrap();
            let (u, w) = two_pure_factorization(&x).unwrap();
            assert!(u.is_pure() && w.is_pure());
            assert_eq!(u.mul(&w).unwrap(), x);
        }
    }

    #[test]
    fn element_parsing() {
        let q = generic();
        let e = parse_quat(&q, "1 - 2*a1*i + j - (a2+1)*k").unwrap();
        assert_eq!(e.coeffs[0], Scalar::one(&q.tower));
        assert_eq!(e.coeffs[1], Scalar::from_int(&q.tower, -2).mul(&q.a));
        assert_eq!(e.coeffs[2], Scalar::one(&q.tower));
        assert_eq!(
            e.coeffs[3],
            q.b.add(&Scalar::one(&q.tower)).neg()
        );
        // round-trip through display
        let back = parse_quat(&q, &e.to_string()).unwrap();
        assert_eq!(back, e);
        // bare units and pure scalars
        assert_eq!(parse_quat(&q, "i").unwrap(), q.basis_i());
        assert_eq!(parse_quat(&q, "-7").unwrap(), q.scalar(Scalar::from_int(&q.tower, -7)));
        // two units in one term is an error
        assert!(parse_quat(&q, "i*j").is_err());
    }

    #[test]
    fn splitting_field_test() {
        // (-1,-1) over Q splits over Q(sqrt(-1)): the square form represents -1
        let h = hamilton();
        let c = Scalar::from_int(&h.tower, -1);
        match splits_over(&h, &c).unwrap() {
            PureResult::Found { element, .. } => {
                assert_eq!(element.square_scalar(), Some(c));
            }
            other => panic!("expected splitting, got {other:?}"),
        }
        // square delta is a caller error
        assert!(splits_over(&h, &Scalar::from_int(&h.tower, 4)).is_err());
    }
}
