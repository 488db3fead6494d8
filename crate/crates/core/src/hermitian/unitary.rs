//! Unitary hermitian forms for the involution theta = conjugation composed
//! with iota, where iota is the tower automorphism negating a distinguished
//! variable t. The weighted shape is h = h1 perp <t> h2 with h1 scalar
//! entries fixed by iota and h2 pure quaternion entries — exactly the
//! theta-symmetric diagonal forms.

use super::matrix::QuatMatrix;
use crate::fields::Scalar;
use crate::quaternion::{QuatAlgebra, QuatElement};
use crate::Error;

/// h = h1 perp <sign * t> h2 over Q-hat; `t_sign` tracks the weight of the
/// skew block so that applying iota is just a sign flip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitaryHermForm {
    pub algebra: QuatAlgebra,
    /// Index of the distinguished variable t in the tower.
    pub t_var: usize,
    /// +1 or -1: the current weight of the skew block is t_sign * t.
    pub t_sign: i32,
    /// Hermitian block entries: nonzero scalars fixed by iota.
    pub herm: Vec<Scalar>,
    /// Skew block entries: pure elements with nonzero square and
    /// iota-fixed coefficients (named weights may be baked in as factors).
    pub skew: Vec<QuatElement>,
}

impl UnitaryHermForm {
    pub fn new(
        algebra: &QuatAlgebra,
        t_name: &str,
        herm: Vec<Scalar>,
        skew: Vec<QuatElement>,
    ) -> Result<Self, Error> {
        let t_var = algebra
            .tower
            .var_index(t_name)
            .ok_or_else(|| Error::Parse(format!("unknown variable {t_name}")))?;
        if !algebra.a.negate_var(t_var).eq(&algebra.a)
            || !algebra.b.negate_var(t_var).eq(&algebra.b)
        {
            return Err(Error::Precondition(
                "algebra structure constants must be fixed by iota".into(),
            ));
        }
        for (n, x) in herm.iter().enumerate() {
            if x.is_zero() {
                return Err(Error::ZeroInput(format!("hermitian entry {n} is zero")));
            }
            if x.tower != algebra.tower {
                return Err(Error::AlgebraMismatch(format!("hermitian entry {n} tower")));
            }
            if x.negate_var(t_var) != *x {
                return Err(Error::Precondition(format!(
                    "hermitian entry {n} is not fixed by iota"
                )));
            }
        }
        for (n, q) in skew.iter().enumerate() {
            if q.algebra != *algebra {
                return Err(Error::AlgebraMismatch(format!("skew entry {n} algebra")));
            }
            if !q.is_pure() {
                return Err(Error::Precondition(format!("skew entry {n} is not pure")));
            }
            let sq = q.square_scalar().expect("pure entry");
            if sq.is_zero() {
                return Err(Error::ZeroInput(format!(
                    "skew entry {n} has square zero"
                )));
            }
            for c in &q.coeffs {
                if c.negate_var(t_var) != *c {
                    return Err(Error::Precondition(format!(
                        "skew entry {n} has a coefficient moved by iota"
                    )));
                }
            }
        }
        Ok(UnitaryHermForm {
            algebra: algebra.clone(),
            t_var,
            t_sign: 1,
            herm,
            skew,
        })
    }

    pub fn rank(&self) -> usize {
        self.herm.len() + self.skew.len()
    }

    fn t_scalar(&self) -> Scalar {
        let name = self.algebra.tower.vars[self.t_var].clone();
        let t = Scalar::var(&self.algebra.tower, &name);
        if self.t_sign < 0 {
            t.neg()
        } else {
            t
        }
    }

    /// Diagonal Gram matrix over Q-hat: herm entries, then (sign t) * skew
    /// entries. Every diagonal entry is theta-symmetric.
    pub fn gram(&self) -> QuatMatrix {
        let t = self.t_scalar();
        let mut entries: Vec<QuatElement> = self
            .herm
            .iter()
            .map(|x| self.algebra.scalar(x.clone()))
            .collect();
        entries.extend(self.skew.iter().map(|q| q.scale(&t)));
        QuatMatrix::diagonal(&self.algebra, &entries).expect("diagonal Gram")
    }

    /// iota applied entrywise to a matrix over Q-hat (no conjugation).
    pub fn apply_iota(&self, m: &QuatMatrix) -> QuatMatrix {
        let idx = self.t_var;
        m.map(|e| {
            let coeffs = std::array::from_fn(|n| e.coeffs[n].negate_var(idx));
            QuatElement {
                algebra: e.algebra.clone(),
                coeffs,
            }
        })
    }

    /// theta = conjugation o iota, entrywise plus transpose.
    pub fn theta_transpose(&self, m: &QuatMatrix) -> QuatMatrix {
        self.apply_iota(&m.conj_transpose())
    }
}

/// h^iota: same hermitian block, skew-block weight negated.
pub fn conjugate_unitary_form(h: &UnitaryHermForm) -> UnitaryHermForm {
    let mut out = h.clone();
    out.t_sign = -h.t_sign;
    out
}

#[derive(Debug, Clone)]
pub struct UnitaryCheck {
    /// h^iota(gx, gy) = mu h(x, y) holds exactly.
    pub valid: bool,
    /// g * g^iota is a central scalar in the iota-fixed field.
    pub order2: bool,
    /// The scalar g * g^iota when order2 (always +-mu for valid g with
    /// iota-fixed mu).
    pub lambda: Option<Scalar>,
}

/// Verify that g is a similitude h -> h^iota with multiplier mu, and whether
/// the induced semilinear automorphism has order 2.
pub fn unitary_similitude_check(
    h: &UnitaryHermForm,
    g: &QuatMatrix,
    mu: &Scalar,
) -> Result<UnitaryCheck, Error> {
    if g.n != h.rank() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix against a rank-{} form",
            g.n,
            g.n,
            h.rank()
        )));
    }
    if g.algebra != h.algebra {
        return Err(Error::AlgebraMismatch("similitude over a different algebra".into()));
    }
    if mu.is_zero() {
        return Err(Error::ZeroInput("zero multiplier".into()));
    }
    let gram = h.gram();
    let gram_iota = conjugate_unitary_form(h).gram();
    // h^iota(gx, gy) = theta(g)^T H^iota g
    let lhs = h.theta_transpose(g).mul(&gram_iota)?.mul(g)?;
    let rhs = gram.scale(mu);
    let valid = lhs == rhs;
    let gg = g.mul(&h.apply_iota(g))?;
    let lambda = gg.central_scalar().filter(|l| {
        !l.is_zero() && l.negate_var(h.t_var) == *l
    });
    let order2 = lambda.is_some();
    if valid && order2 && mu.negate_var(h.t_var) == *mu {
        let l = lambda.as_ref().unwrap();
        assert!(
            *l == *mu || *l == mu.neg(),
            "order-2 scalar must be +-mu for a valid similitude"
        );
    }
    Ok(UnitaryCheck {
        valid,
        order2,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BaseKind, FieldTower};

    fn setup() -> (QuatAlgebra, FieldTower) {
        let t = FieldTower::new(BaseKind::Rationals, &["t"]);
        let q = QuatAlgebra::new(Scalar::from_int(&t, -1), Scalar::from_int(&t, -1)).unwrap();
        (q, t)
    }

    #[test]
    fn conjugation_is_an_involution() {
        let (q, t) = setup();
        let h = UnitaryHermForm::new(
            &q,
            "t",
            vec![Scalar::one(&t)],
            vec![q.basis_i()],
        )
        .unwrap();
        let hi = conjugate_unitary_form(&h);
        assert_eq!(hi.t_sign, -1);
        assert_eq!(conjugate_unitary_form(&hi), h);
        // empty skew block: conjugation changes nothing visible in the Gram
        let h0 = UnitaryHermForm::new(&q, "t", vec![Scalar::one(&t)], vec![]).unwrap();
        assert_eq!(conjugate_unitary_form(&h0).gram(), h0.gram());
    }

    #[test]
    fn identity_on_hermitian_block() {
        let (q, t) = setup();
        let h = UnitaryHermForm::new(
            &q,
            "t",
            vec![Scalar::one(&t), Scalar::from_int(&t, 2)],
            vec![],
        )
        .unwrap();
        let g = QuatMatrix::identity(&q, 2);
        let chk = unitary_similitude_check(&h, &g, &Scalar::one(&t)).unwrap();
        assert!(chk.valid);
        assert!(chk.order2);
        assert_eq!(chk.lambda, Some(Scalar::one(&t)));
    }

    #[test]
    fn skew_block_witness() {
        // h = <t i> over (-1,-1): g = j satisfies theta(j)(-t i)(j) = t i,
        // so g is a similitude h -> h^iota with mu = 1; g g^iota = -1 = -mu
        let (q, t) = setup();
        let h = UnitaryHermForm::new(&q, "t", vec![], vec![q.basis_i()]).unwrap();
        let g = QuatMatrix::diagonal(&q, &[q.basis_j()]).unwrap();
        let chk = unitary_similitude_check(&h, &g, &Scalar::one(&t)).unwrap();
        assert!(chk.valid);
        assert!(chk.order2);
        assert_eq!(chk.lambda, Some(Scalar::from_int(&t, -1)));
    }

    #[test]
    fn central_scaling_scales_the_multiplier() {
        let (q, t) = setup();
        let h = UnitaryHermForm::new(&q, "t", vec![], vec![q.basis_i()]).unwrap();
        let lam0 = Scalar::from_int(&t, 3);
        let g = QuatMatrix::diagonal(&q, &[q.basis_j()])
            .unwrap()
            .scale(&lam0);
        // mu scales by lam0 * iota(lam0) = 9
        let chk = unitary_similitude_check(&h, &g, &Scalar::from_int(&t, 9)).unwrap();
        assert!(chk.valid);
    }

    #[test]
    fn iota_moved_entries_rejected() {
        let (q, t) = setup();
        // t itself is not iota-fixed
        let bad = Scalar::var(&t, "t");
        assert!(UnitaryHermForm::new(&q, "t", vec![bad], vec![]).is_err());
    }
}
