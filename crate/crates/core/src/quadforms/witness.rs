//! Does a diagonal form represent a given value? Sound three-valued answer
//! with certificates: an explicit vector on `yes`, an anisotropy chain for
//! the padded form on `no`.
//!
//! The search side is a deterministic strategy list (exact square tests on
//! entry ratios, small two-term combinations, conversion of isotropy
//! witnesses, a quaternion-norm twist for ternary pure forms, and the
//! binary-form swap). Every candidate is re-evaluated exactly before being
//! returned.

use super::cert::Certificate;
use super::springer::{certify_anisotropic, AnisoResult};
use super::QuadForm;
use crate::fields::{BaseKind, Scalar};
use crate::Error;

#[derive(Debug, Clone)]
pub enum RepResult {
    Represented {
        vector: Vec<Scalar>,
        cert: Certificate,
    },
    NotRepresented(Certificate),
    Unknown(String),
}

/// Decide whether the form represents the nonzero value c.
pub fn represents(q: &QuadForm, c: &Scalar) -> Result<RepResult, Error> {
    if c.is_zero() {
        return Err(Error::ZeroInput("representation of zero".into()));
    }
    if c.tower != q.tower {
        return Err(Error::AlgebraMismatch("value over a different tower".into()));
    }
    if let Some(v) = find_representation(q, c, 0) {
        return Ok(RepResult::Represented {
            cert: witness_certificate(q, c, &v)?,
            vector: v,
        });
    }
    // q represents c iff q + <-c> is isotropic
    let padded = q.perp(&QuadForm::new(&q.tower, vec![c.neg()])?);
    match certify_anisotropic(&padded)? {
        AnisoResult::Anisotropic(cert) => Ok(RepResult::NotRepresented(cert)),
        AnisoResult::Isotropic { vector, .. } => {
            let v = representation_from_padded_witness(q, c, &vector)?;
            Ok(RepResult::Represented {
                cert: witness_certificate(q, c, &v)?,
                vector: v,
            })
        }
        AnisoResult::Unknown(note) => Ok(RepResult::Unknown(note)),
    }
}

/// Validate a caller-supplied representation vector and wrap it as a
/// certificate.
pub fn witness_certificate(q: &QuadForm, c: &Scalar, v: &[Scalar]) -> Result<Certificate, Error> {
    if v.len() != q.dim() {
        return Err(Error::Dimension("witness length mismatch".into()));
    }
    if q.eval(v) != *c {
        return Err(Error::Internal("vector does not represent the value".into()));
    }
    Ok(Certificate::Witness {
        tower: q.tower.to_string(),
        form: q.entry_strings(),
        vector: v.iter().map(|x| x.to_string()).collect(),
        value: c.to_string(),
    })
}

/// Turn an isotropy witness of q + <-c> into a representation of c by q.
fn representation_from_padded_witness(
    q: &QuadForm,
    c: &Scalar,
    w: &[Scalar],
) -> Result<Vec<Scalar>, Error> {
    let n = q.dim();
    assert_eq!(w.len(), n + 1);
    let last = &w[n];
    if !last.is_zero() {
        let v: Result<Vec<Scalar>, Error> = w[..n].iter().map(|x| x.div(last)).collect();
        let v = v?;
        debug_assert_eq!(q.eval(&v), *c);
        return Ok(v);
    }
    // last coordinate zero: q itself is isotropic, hence universal
    let v = represent_via_isotropy(q, c, &w[..n])
        .ok_or_else(|| Error::Internal("degenerate padded witness".into()))?;
    Ok(v)
}

/// Given a nonzero isotropic vector of q, represent any value c exactly:
/// with u the k-th basis vector (v_k nonzero), q(t v + u) = e_k + 2 t e_k v_k.
fn represent_via_isotropy(q: &QuadForm, c: &Scalar, v: &[Scalar]) -> Option<Vec<Scalar>> {
    let k = v.iter().position(|x| !x.is_zero())?;
    let ek = &q.entries[k];
    let denom = ek.mul(&v[k]).scale_int(2);
    let t = c.sub(ek).div(&denom).ok()?;
    let mut out: Vec<Scalar> = v.iter().map(|x| t.mul(x)).collect();
    out[k] = out[k].add(&Scalar::one(&q.tower));
    debug_assert_eq!(q.eval(&out), *c);
    Some(out)
}

/// Deterministic representation search. `depth` guards the binary swap from
/// recursing.
pub fn find_representation(q: &QuadForm, c: &Scalar, depth: u32) -> Option<Vec<Scalar>> {
    if let Some(v) = single_entry_ratio(q, c) {
        return Some(check(q, c, v));
    }
    if let Some(v) = two_entry_pool(q, c) {
        return Some(check(q, c, v));
    }
    if let Some(w) = isotropy_witness(q) {
        if let Some(v) = represent_via_isotropy(q, c, &w) {
            return Some(check(q, c, v));
        }
    }
    if q.dim() == 3 {
        if let Some(v) = ternary_norm_twist(q, c) {
            return Some(check(q, c, v));
        }
    }
    if q.dim() == 2 && depth == 0 {
        if let Some(v) = binary_swap(q, c) {
            return Some(check(q, c, v));
        }
    }
    None
}

fn check(q: &QuadForm, c: &Scalar, v: Vec<Scalar>) -> Vec<Scalar> {
    assert_eq!(q.eval(&v), *c, "strategy produced a bad vector");
    v
}

/// c/e_i a square: one nonzero coordinate suffices.
fn single_entry_ratio(q: &QuadForm, c: &Scalar) -> Option<Vec<Scalar>> {
    for i in 0..q.dim() {
        if let Some(t) = c.div(&q.entries[i]).ok()?.sqrt() {
            let mut v = vec![Scalar::zero(&q.tower); q.dim()];
            v[i] = t;
            return Some(v);
        }
    }
    None
}

fn pool(q: &QuadForm) -> Vec<Scalar> {
    let t = &q.tower;
    let mut p = vec![
        Scalar::one(t),
        Scalar::from_int(t, 2),
        Scalar::from_int(t, 3),
    ];
    if t.base == BaseKind::GaussianRationals {
        let i = Scalar::i(t);
        p.push(i.clone());
        p.push(i.scale_int(2));
        p.push(i.add(&Scalar::one(t)));
    }
    p
}

/// Two coordinates: fix x_j = y from a small pool, solve for x_i.
fn two_entry_pool(q: &QuadForm, c: &Scalar) -> Option<Vec<Scalar>> {
    let pool = pool(q);
    for j in 0..q.dim() {
        for y in &pool {
            let rest = c.sub(&q.entries[j].mul(&y.mul(y)));
            if rest.is_zero() {
                continue;
            }
            for i in 0..q.dim() {
                if i == j {
                    continue;
                }
                if let Some(x) = rest.div(&q.entries[i]).ok()?.sqrt() {
                    let mut v = vec![Scalar::zero(&q.tower); q.dim()];
                    v[i] = x;
                    v[j] = y.clone();
                    return Some(v);
                }
            }
        }
    }
    None
}

/// Isotropy scan used by the conversion strategy: square ratios, plus the
/// full engine over constant forms on Q.
fn isotropy_witness(q: &QuadForm) -> Option<Vec<Scalar>> {
    for i in 0..q.dim() {
        for j in i + 1..q.dim() {
            let ratio = q.entries[i].neg().div(&q.entries[j]).ok()?;
            if let Some(t) = ratio.sqrt() {
                let mut v = vec![Scalar::zero(&q.tower); q.dim()];
                v[i] = Scalar::one(&q.tower);
                v[j] = t;
                return Some(v);
            }
        }
    }
    if q.tower.nvars() == 0 && q.tower.base == BaseKind::Rationals {
        let entries: Vec<num_rational::BigRational> = q
            .entries
            .iter()
            .map(|e| e.constant_value().unwrap().re)
            .collect();
        if super::qsolve::find_local_obstruction(&entries).ok()? .is_some() {
            return None;
        }
        let w = super::qsolve::find_isotropy_witness(&entries)?;
        return Some(
            w.into_iter()
                .map(|r| Scalar::from_base(&q.tower, crate::fields::BaseElem::from_rational(r)))
                .collect(),
        );
    }
    None
}

/// For a ternary form isometric to the pure-quaternion square form
/// <a, b, -a*b*s^2>: twist the (j, k)-plane by an invertible element
/// z = x + y*sqrt(a), giving the isometric form <a, b*m, -a*b*m> with
/// m = x^2 - a*y^2, and map representations back through the twist.
fn ternary_norm_twist(q: &QuadForm, c: &Scalar) -> Option<Vec<Scalar>> {
    debug_assert_eq!(q.dim(), 3);
    let t = &q.tower;
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for perm in perms {
        let a = &q.entries[perm[0]];
        let b = &q.entries[perm[1]];
        let e3 = &q.entries[perm[2]];
        // need e3 = -a*b*s^2
        let s2 = e3.div(&a.mul(b).neg()).ok()?;
        let s = match s2.sqrt() {
            Some(s) => s,
            None => continue,
        };
        for (x, y) in twist_pool(t) {
            let m = x.mul(&x).sub(&a.mul(&y.mul(&y)));
            if m.is_zero() {
                continue;
            }
            let twisted = QuadForm::new(
                t,
                vec![a.clone(), b.mul(&m), a.mul(b).mul(&m).neg()],
            )
            .ok()?;
            let rep = single_entry_ratio(&twisted, c)
                .or_else(|| two_entry_pool(&twisted, c))?;
            let (alpha, beta, gamma) = (&rep[0], &rep[1], &rep[2]);
            // basis of the twisted copy inside <a, b, -a*b>:
            //   f1 = (1, 0, 0), f2 = (0, x, -y), f3 = (0, -a*y, x)
            let u1 = alpha.clone();
            let u2 = beta.mul(&x).sub(&gamma.mul(&a.mul(&y)));
            let u3 = gamma.mul(&x).sub(&beta.mul(&y));
            // undo the s-scaling on the third coordinate
            let u3 = u3.div(&s).ok()?;
            let mut v = vec![Scalar::zero(t); 3];
            v[perm[0]] = u1;
            v[perm[1]] = u2;
            v[perm[2]] = u3;
            if q.eval(&v) == *c {
                return Some(v);
            }
        }
    }
    None
}

fn twist_pool(t: &crate::fields::FieldTower) -> Vec<(Scalar, Scalar)> {
    let one = Scalar::one(t);
    let two = Scalar::from_int(t, 2);
    let three = Scalar::from_int(t, 3);
    let mut p = vec![
        (one.clone(), one.clone()),
        (one.clone(), one.neg()),
        (two.clone(), one.clone()),
        (one.clone(), two.clone()),
        (three.clone(), one.clone()),
        (one.clone(), three),
    ];
    if t.base == BaseKind::GaussianRationals {
        let i = Scalar::i(t);
        p.push((one.clone(), i.clone()));
        p.push((i.clone(), one.clone()));
        p.push((one, i.scale_int(2)));
    }
    p
}

/// Binary forms: <e1, e2> represents c iff x^2 - A y^2 = C with
/// A = -e2/e1, C = c/e1; that norm equation is symmetric in A and C, so try
/// the swapped equation as well.
fn binary_swap(q: &QuadForm, c: &Scalar) -> Option<Vec<Scalar>> {
    debug_assert_eq!(q.dim(), 2);
    let t = &q.tower;
    let a = q.entries[1].neg().div(&q.entries[0]).ok()?;
    let cc = c.div(&q.entries[0]).ok()?;
    if cc.is_zero() {
        return None;
    }
    // solve x^2 - C y^2 = A
    let swapped = QuadForm::new(t, vec![Scalar::one(t), cc.neg()]).ok()?;
    let rep = single_entry_ratio(&swapped, &a).or_else(|| two_entry_pool(&swapped, &a))?;
    let (xs, ys) = (&rep[0], &rep[1]);
    if ys.is_zero() {
        return None; // A is a square: the isotropy route handles it
    }
    // then x = xs/ys, y = 1/ys solves x^2 - A y^2 = C
    let x = xs.div(ys).ok()?;
    let y = ys.inv().ok()?;
    Some(vec![x, y])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{parse_scalar, FieldTower};

    fn t2() -> FieldTower {
        FieldTower::new(BaseKind::Rationals, &["a1", "a2"])
    }

    fn s(t: &FieldTower, src: &str) -> Scalar {
        parse_scalar(t, src).unwrap()
    }

    #[test]
    fn ratio_strategy() {
        let t = t2();
        let q = QuadForm::new(&t, vec![s(&t, "a1"), s(&t, "a2")]).unwrap();
        let c = s(&t, "4*a2");
        match represents(&q, &c).unwrap() {
            RepResult::Represented { vector, cert } => {
                assert_eq!(q.eval(&vector), c);
                cert.verify().unwrap();
            }
            other => panic!("expected representation, got {other:?}"),
        }
    }

    #[test]
    fn pool_strategy() {
        let t = t2();
        // <1, -a1> represents 1 - a1 via (1, 1)
        let q = QuadForm::new(&t, vec![s(&t, "1"), s(&t, "-a1")]).unwrap();
        let c = s(&t, "1 - a1");
        match represents(&q, &c).unwrap() {
            RepResult::Represented { vector, .. } => assert_eq!(q.eval(&vector), c),
            other => panic!("expected representation, got {other:?}"),
        }
    }

    #[test]
    fn refusal_with_chain() {
        let t = t2();
        // <1, -a1> does not represent a2
        let q = QuadForm::new(&t, vec![s(&t, "1"), s(&t, "-a1")]).unwrap();
        let c = s(&t, "a2");
        match represents(&q, &c).unwrap() {
            RepResult::NotRepresented(cert) => cert.verify().unwrap(),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn isotropy_conversion_is_universal() {
        let t = t2();
        // <a1, -a1> is isotropic, hence represents anything
        let q = QuadForm::new(&t, vec![s(&t, "a1"), s(&t, "-a1")]).unwrap();
        for c in ["a2", "1+a1+a2", "-7"] {
            let c = s(&t, c);
            match represents(&q, &c).unwrap() {
                RepResult::Represented { vector, .. } => assert_eq!(q.eval(&vector), c),
                other => panic!("expected representation of {c}, got {other:?}"),
            }
        }
    }

    #[test]
    fn constant_form_representation_over_q() {
        let t = FieldTower::rationals();
        let q = QuadForm::from_ints(&t, &[1, 1]);
        // 5 = 1 + 4
        let c = Scalar::from_int(&t, 5);
        match represents(&q, &c).unwrap() {
            RepResult::Represented { vector, .. } => assert_eq!(q.eval(&vector), c),
            other => panic!("expected representation, got {other:?}"),
        }
        // 7 is not a sum of two squares
        let c = Scalar::from_int(&t, 7);
        match represents(&q, &c).unwrap() {
            RepResult::NotRepresented(cert) => cert.verify().unwrap(),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn ternary_twist_mapping_is_exact() {
        let t = t2();
        let q = QuadForm::new(&t, vec![s(&t, "a1"), s(&t, "a2"), s(&t, "-a1*a2")]).unwrap();
        // value of the twisted form at a simple vector: for z = 1 + sqrt(a1),
        // m = 1 - a1, the twisted copy is <a1, a2*m, -a1*a2*m>
        let c = s(&t, "a2*(1-a1)");
        let v = ternary_norm_twist(&q, &c).expect("twist should find this value");
        assert_eq!(q.eval(&v), c);
    }

    #[test]
    fn binary_swap_strategy() {
        let t = t2();
        // x^2 - a1 y^2 = (1 - a1)/4 needs the half-integer point (1/2, 1/2),
        // which only the swapped equation x^2 - C y^2 = a1 reaches (at y = 2)
        let q = QuadForm::new(&t, vec![s(&t, "1"), s(&t, "-a1")]).unwrap();
        let c = s(&t, "(1-a1)/4");
        assert!(single_entry_ratio(&q, &c).is_none());
        assert!(two_entry_pool(&q, &c).is_none());
        match represents(&q, &c).unwrap() {
            RepResult::Represented { vector, .. } => assert_eq!(q.eval(&vector), c),
            other => panic!("expected representation, got {other:?}"),
        }
    }

    #[test]
    fn caller_witness_validation() {
        let t = t2();
        let q = QuadForm::new(&t, vec![s(&t, "a1"), s(&t, "a2")]).unwrap();
        let good = vec![s(&t, "1"), s(&t, "1")];
        let c = s(&t, "a1+a2");
        witness_certificate(&q, &c, &good).unwrap().verify().unwrap();
        let bad = vec![s(&t, "1"), s(&t, "2")];
        assert!(witness_certificate(&q, &c, &bad).is_err());
    }
}
