//! Machine-checkable certificates.
//!
//! A certificate is a self-contained JSON-serializable value whose `verify`
//! method re-derives the claimed fact from scratch, using only the data
//! embedded in the certificate. Verification never trusts the producer: every
//! split is recomputed, every witness is re-evaluated, every local symbol is
//! recalculated.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::hilbert::{hilbert_symbol, ram_support, PlaceQ};
use super::qsolve::local_anisotropic_at;
use super::{springer_split, QuadForm};
use crate::fields::{parse_scalar, parse_tower, BaseKind, FieldTower, Scalar};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A vector v with sum e_i v_i^2 = value over the stated tower. With
    /// value 0 (and v nonzero) this witnesses isotropy; otherwise it
    /// witnesses representation of the value.
    Witness {
        tower: String,
        form: Vec<String>,
        vector: Vec<String>,
        value: String,
    },
    /// Anisotropy of a form over a rational function tower, by iterated
    /// residue splitting down to base-field leaves.
    AnisotropicChain { tower: String, root: ChainNode },
    /// Emptiness of a prescribed-symbol problem: a set of (constraint, place)
    /// rows whose symbols sum to an odd target parity for every candidate
    /// multiplier, by the parity conditions checked in `verify`.
    ReciprocityObstruction { rows: Vec<ObsRow> },
    /// A multiplier satisfying every listed symbol constraint at every place.
    SymbolAssignment {
        mu: String,
        constraints: Vec<ObsConstraint>,
    },
    /// An equal-dimension anisotropic form cannot represent the generic value
    /// of a form in a different discriminant class.
    GenericValueObstruction {
        tower: String,
        psi: Vec<String>,
        phi: Vec<String>,
        psi_anisotropic: Box<Certificate>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainNode {
    pub form: Vec<String>,
    #[serde(flatten)]
    pub step: ChainStep,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum ChainStep {
    /// Split at a residue valuation: entries of even valuation on one side,
    /// odd on the other, residues taken over the smaller tower.
    Split {
        var: String,
        even: Box<ChainNode>,
        odd: Box<ChainNode>,
    },
    Leaf {
        reason: BaseReason,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum BaseReason {
    /// The zero-dimensional form.
    Empty,
    /// A one-dimensional form with a nonzero entry.
    Dim1,
    /// Two-dimensional, and -e1*e2 is not a square (valid over any field).
    NonSquareRatio,
    /// Constant form over Q, anisotropic over the completion at this place.
    LocalPlace { place: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsRow {
    pub a: String,
    #[serde(flatten)]
    pub target: TargetSpec,
    pub place: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObsConstraint {
    pub a: String,
    #[serde(flatten)]
    pub target: TargetSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum TargetSpec {
    /// (a, mu) must be split, i.e. all symbols +1.
    Split,
    /// (a, mu) must have the same symbols as the quaternion algebra (qa, qb).
    SameAs { qa: String, qb: String },
}

impl TargetSpec {
    /// The required sign of (a, mu)_v at the given place.
    pub fn required_sign(&self, place: &PlaceQ) -> Result<i32, Error> {
        match self {
            TargetSpec::Split => Ok(1),
            TargetSpec::SameAs { qa, qb } => {
                let qa = parse_rational(qa)?;
                let qb = parse_rational(qb)?;
                Ok(hilbert_symbol(&qa, &qb, place))
            }
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    BigRational::from_str(s).map_err(|e| Error::Parse(format!("bad rational {s}: {e}")))
}

fn parse_form(tower: &FieldTower, entries: &[String]) -> Result<QuadForm, Error> {
    let scalars: Result<Vec<Scalar>, Error> =
        entries.iter().map(|s| parse_scalar(tower, s)).collect();
    QuadForm::new(tower, scalars?)
}

impl Certificate {
    /// Serialize deterministically (field order is fixed by the types).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Certificate, Error> {
        serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad certificate: {e}")))
    }

    /// Re-derive the certified fact from the embedded data alone.
    pub fn verify(&self) -> Result<(), Error> {
        match self {
            Certificate::Witness {
                tower,
                form,
                vector,
                value,
            } => {
                let tower = parse_tower(tower)?;
                let q = parse_form(&tower, form)?;
                let v: Result<Vec<Scalar>, Error> =
                    vector.iter().map(|s| parse_scalar(&tower, s)).collect();
                let v = v?;
                if v.len() != q.dim() {
                    return Err(Error::Dimension(
                        "witness length differs from form dimension".into(),
                    ));
                }
                let target = parse_scalar(&tower, value)?;
                if q.eval(&v) != target {
                    return Err(Error::Internal("witness does not evaluate to value".into()));
                }
                if target.is_zero() && v.iter().all(|x| x.is_zero()) {
                    return Err(Error::Internal("zero vector is not an isotropy witness".into()));
                }
                Ok(())
            }
            Certificate::AnisotropicChain { tower, root } => {
                let tower = parse_tower(tower)?;
                verify_chain_node(&tower, root)
            }
            Certificate::ReciprocityObstruction { rows } => verify_obstruction(rows),
            Certificate::SymbolAssignment { mu, constraints } => {
                verify_assignment(mu, constraints)
            }
            Certificate::GenericValueObstruction {
                tower,
                psi,
                phi,
                psi_anisotropic,
            } => {
                let t = parse_tower(tower)?;
                let psi = parse_form(&t, psi)?;
                let phi = parse_form(&t, phi)?;
                if psi.dim() != phi.dim() {
                    return Err(Error::Dimension(
                        "generic-value obstruction needs equal dimensions".into(),
                    ));
                }
                // the sub-certificate must be about psi itself
                match psi_anisotropic.as_ref() {
                    Certificate::AnisotropicChain { tower: t2, root } => {
                        if parse_tower(t2)? != t {
                            return Err(Error::AlgebraMismatch(
                                "anisotropy sub-certificate is over a different tower".into(),
                            ));
                        }
                        if parse_form(&t, &root.form)? != psi {
                            return Err(Error::AlgebraMismatch(
                                "anisotropy sub-certificate is about a different form".into(),
                            ));
                        }
                    }
                    _ => {
                        return Err(Error::Precondition(
                            "generic-value obstruction needs an anisotropy chain".into(),
                        ))
                    }
                }
                psi_anisotropic.verify()?;
                if psi.disc().mul(&phi.disc()).is_square() {
                    return Err(Error::Internal(
                        "discriminants agree; no obstruction".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

fn verify_chain_node(tower: &FieldTower, node: &ChainNode) -> Result<(), Error> {
    let q = parse_form(tower, &node.form)?;
    match &node.step {
        ChainStep::Leaf { reason } => match reason {
            BaseReason::Empty => {
                if q.dim() != 0 {
                    return Err(Error::Dimension("empty leaf with entries".into()));
                }
                Ok(())
            }
            BaseReason::Dim1 => {
                if q.dim() != 1 {
                    return Err(Error::Dimension("dim-1 leaf with wrong dimension".into()));
                }
                Ok(())
            }
            BaseReason::NonSquareRatio => {
                if q.dim() != 2 {
                    return Err(Error::Dimension("ratio leaf needs dimension 2".into()));
                }
                let prod = q.entries[0].mul(&q.entries[1]).neg();
                if prod.is_square() {
                    return Err(Error::Internal(
                        "-e1*e2 is a square; the binary form is isotropic".into(),
                    ));
                }
                Ok(())
            }
            BaseReason::LocalPlace { place } => {
                if tower.nvars() != 0 || tower.base != BaseKind::Rationals {
                    return Err(Error::Precondition(
                        "local leaf requires a constant form over Q".into(),
                    ));
                }
                let v: PlaceQ = place.parse()?;
                let entries: Vec<BigRational> = q
                    .entries
                    .iter()
                    .map(|e| e.constant_value().unwrap().re)
                    .collect();
                if !local_anisotropic_at(&entries, &v) {
                    return Err(Error::Internal(format!(
                        "form is locally isotropic at {place}"
                    )));
                }
                Ok(())
            }
        },
        ChainStep::Split { var, even, odd } => {
            let idx = tower.var_index(var).ok_or_else(|| {
                Error::Parse(format!("split variable {var} not in tower {tower}"))
            })?;
            let (qe, qo) = springer_split(&q, idx)?;
            let sub = tower.without_var(idx);
            if parse_form(&sub, &even.form)? != qe || parse_form(&sub, &odd.form)? != qo {
                return Err(Error::Internal(
                    "recomputed residue split disagrees with certificate".into(),
                ));
            }
            verify_chain_node(&sub, even)?;
            verify_chain_node(&sub, odd)
        }
    }
}

/// Check the reciprocity-obstruction conditions. Sound for every candidate
/// multiplier: under these conditions the product of the selected symbols is
/// +1 for any nonzero rational mu, while the targets force it to be -1.
pub fn verify_obstruction(rows: &[ObsRow]) -> Result<(), Error> {
    if rows.is_empty() {
        return Err(Error::Precondition("empty obstruction".into()));
    }
    // target parity must be odd
    let mut parity = 0u8;
    let mut parsed: Vec<(BigRational, PlaceQ)> = Vec::new();
    for r in rows {
        let a = parse_rational(&r.a)?;
        if a.is_zero() {
            return Err(Error::ZeroInput("zero constraint coefficient".into()));
        }
        let place: PlaceQ = r.place.parse()?;
        if r.target.required_sign(&place)? == -1 {
            parity ^= 1;
        }
        parsed.push((a, place));
    }
    if parity == 0 {
        return Err(Error::Internal("target parity is even; no contradiction".into()));
    }
    // group by place: b_v = product of the a's at place v
    let mut groups: Vec<(PlaceQ, BigRational)> = Vec::new();
    for (a, place) in &parsed {
        match groups.iter_mut().find(|(v, _)| v == place) {
            Some((_, b)) => *b *= a,
            None => groups.push((*place, a.clone())),
        }
    }
    // the product of (b_v, mu)_v over the groups must be +1 for every mu.
    // Directly check the generators that can interact with the places
    // involved; the remaining generators are handled by parity conditions.
    let mut direct: Vec<BigRational> = vec![
        -BigRational::from_integer(1.into()),
        BigRational::from_integer(2.into()),
    ];
    for (v, _) in &groups {
        if let PlaceQ::Prime(p) = v {
            if *p != 2 {
                direct.push(BigRational::from_integer((*p).into()));
            }
        }
    }
    for g in &direct {
        let mut prod = 1;
        for (v, b) in &groups {
            prod *= hilbert_symbol(b, g, v);
        }
        if prod != 1 {
            return Err(Error::Internal(format!(
                "obstruction rows are sensitive to the multiplier (generator {g})"
            )));
        }
    }
    // generic odd primes p away from the listed places: at an odd place v the
    // symbol (b_v, p)_v is Legendre(p|v)^{val_v(b_v)}, so we need even
    // valuation; at 2 we need val_2(b_2) even and the unit part 1 mod 4.
    for (v, b) in &groups {
        match v {
            PlaceQ::Infinity => {}
            PlaceQ::Prime(2) => {
                let (val, u) = val_unit_rat(b, 2);
                if val % 2 != 0 {
                    return Err(Error::Internal(
                        "odd 2-adic valuation: sensitive to generic primes".into(),
                    ));
                }
                if !unit_is_one_mod4(&u) {
                    return Err(Error::Internal(
                        "2-adic unit not 1 mod 4: sensitive to generic primes".into(),
                    ));
                }
            }
            PlaceQ::Prime(p) => {
                let (val, _) = val_unit_rat(b, *p);
                if val % 2 != 0 {
                    return Err(Error::Internal(format!(
                        "odd {p}-adic valuation: sensitive to generic primes"
                    )));
                }
            }
        }
    }
    Ok(())
}

fn val_unit_rat(r: &BigRational, p: u64) -> (i64, BigRational) {
    use num_integer::Integer;
    use num_traits::Zero;
    let bp = num_bigint::BigInt::from(p);
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

fn unit_is_one_mod4(u: &BigRational) -> bool {
    use num_integer::Integer;
    use num_traits::One;
    let four = num_bigint::BigInt::from(4);
    let n = u.numer().mod_floor(&four);
    let d = u.denom().mod_floor(&four);
    (n * d).mod_floor(&four).is_one()
}

fn verify_assignment(mu: &str, constraints: &[ObsConstraint]) -> Result<(), Error> {
    use num_traits::Zero;
    let mu = parse_rational(mu)?;
    if mu.is_zero() {
        return Err(Error::ZeroInput("zero multiplier".into()));
    }
    for c in constraints {
        let a = parse_rational(&c.a)?;
        if a.is_zero() {
            return Err(Error::ZeroInput("zero constraint coefficient".into()));
        }
        // joint support: every place where any of a, mu, or the target
        // algebra could ramify
        let mut places = ram_support(&a, &mu)?;
        if let TargetSpec::SameAs { qa, qb } = &c.target {
            for v in ram_support(&parse_rational(qa)?, &parse_rational(qb)?)? {
                if !places.contains(&v) {
                    places.push(v);
                }
            }
        }
        for v in &places {
            if hilbert_symbol(&a, &mu, v) != c.target.required_sign(v)? {
                return Err(Error::Internal(format!(
                    "constraint on {} fails at place {v}",
                    c.a
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let cert = Certificate::Witness {
            tower: "Q".into(),
            form: vec!["1".into(), "-1".into()],
            vector: vec!["1".into(), "1".into()],
            value: "0".into(),
        };
        let s = cert.to_json();
        let back = Certificate::from_json(&s).unwrap();
        assert_eq!(cert, back);
        assert_eq!(s, back.to_json(), "serialization is deterministic");
        back.verify().unwrap();
    }

    #[test]
    fn bad_witness_rejected() {
        let cert = Certificate::Witness {
            tower: "Q".into(),
            form: vec!["1".into(), "1".into()],
            vector: vec!["1".into(), "1".into()],
            value: "0".into(),
        };
        assert!(cert.verify().is_err());
        let zero = Certificate::Witness {
            tower: "Q".into(),
            form: vec!["1".into(), "-1".into()],
            vector: vec!["0".into(), "0".into()],
            value: "0".into(),
        };
        assert!(zero.verify().is_err());
    }

    #[test]
    fn tower_witness() {
        let cert = Certificate::Witness {
            tower: "Q[a1]".into(),
            form: vec!["a1".into(), "-a1".into()],
            vector: vec!["1+a1".into(), "1+a1".into()],
            value: "0".into(),
        };
        cert.verify().unwrap();
    }

    #[test]
    fn obstruction_single_square_row() {
        // (1, mu) is +1 everywhere but the target demands -1 at 2
        let cert = Certificate::ReciprocityObstruction {
            rows: vec![ObsRow {
                a: "1".into(),
                target: TargetSpec::SameAs {
                    qa: "-1".into(),
                    qb: "-1".into(),
                },
                place: "2".into(),
            }],
        };
        cert.verify().unwrap();
        let round = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(cert, round);
    }

    #[test]
    fn obstruction_sensitivity_rejected() {
        // (3, mu) at place 3 does depend on mu: not a valid obstruction
        let cert = Certificate::ReciprocityObstruction {
            rows: vec![ObsRow {
                a: "3".into(),
                target: TargetSpec::SameAs {
                    qa: "-1".into(),
                    qb: "-1".into(),
                },
                place: "2".into(),
            }],
        };
        assert!(cert.verify().is_err());
    }

    #[test]
    fn assignment_verified() {
        let cert = Certificate::SymbolAssignment {
            mu: "-1".into(),
            constraints: vec![ObsConstraint {
                a: "-1".into(),
                target: TargetSpec::SameAs {
                    qa: "-1".into(),
                    qb: "-1".into(),
                },
            }],
        };
        cert.verify().unwrap();
        let bad = Certificate::SymbolAssignment {
            mu: "1".into(),
            constraints: vec![ObsConstraint {
                a: "-1".into(),
                target: TargetSpec::SameAs {
                    qa: "-1".into(),
                    qb: "-1".into(),
                },
            }],
        };
        assert!(bad.verify().is_err());
    }
}
