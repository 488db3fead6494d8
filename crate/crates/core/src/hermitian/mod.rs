//! Diagonal skew-hermitian forms over quaternion algebras with the canonical
//! involution, unitary forms for the conjugation-composed-with-iota
//! involution, and construction plus exact verification of proper/improper
//! similitudes.

pub mod matrix;
pub mod similitude;
pub mod unitary;

pub use matrix::QuatMatrix;
pub use similitude::{
    build_diagonal_similitude, multiplier_class, verify_similitude, BlockKind, BuildResult,
    MultClass, SimType, SimilitudeMatrix,
};
pub use unitary::{conjugate_unitary_form, unitary_similitude_check, UnitaryCheck, UnitaryHermForm};

use crate::fields::{Scalar, SquareClassSupport};
use crate::quaternion::{QuatAlgebra, QuatElement};
use crate::Error;

/// Diagonal skew-hermitian form <q1, ..., qn> over (Q, conjugation), with
/// optional generic weight variables making it <t1 q1, ..., tn qn>.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewHermForm {
    pub algebra: QuatAlgebra,
    /// Pure entries with nonzero (scalar) squares.
    pub entries: Vec<QuatElement>,
    /// Tower variable indices of the weights, when present: distinct and in
    /// embedding (increasing) order, one per entry.
    pub weights: Option<Vec<usize>>,
}

impl SkewHermForm {
    pub fn new(algebra: &QuatAlgebra, entries: Vec<QuatElement>) -> Result<Self, Error> {
        Self::build(algebra, entries, None)
    }

    /// Weighted form <t1 q1, ..., tn qn> with named weight variables.
    pub fn weighted(
        algebra: &QuatAlgebra,
        entries: Vec<QuatElement>,
        weight_vars: &[&str],
    ) -> Result<Self, Error> {
        if weight_vars.len() != entries.len() {
            return Err(Error::Dimension(
                "one weight variable per entry required".into(),
            ));
        }
        let mut idx = Vec::with_capacity(weight_vars.len());
        for name in weight_vars {
            let i = algebra.tower.var_index(name).ok_or_else(|| {
                Error::Parse(format!("unknown weight variable {name}"))
            })?;
            idx.push(i);
        }
        let increasing = idx.windows(2).all(|w| w[0] < w[1]);
        if !increasing {
            return Err(Error::Precondition(
                "weight variables must be distinct and in embedding order".into(),
            ));
        }
        Self::build(algebra, entries, Some(idx))
    }

    fn build(
        algebra: &QuatAlgebra,
        entries: Vec<QuatElement>,
        weights: Option<Vec<usize>>,
    ) -> Result<Self, Error> {
        for (n, q) in entries.iter().enumerate() {
            if q.algebra != *algebra {
                return Err(Error::AlgebraMismatch(format!(
                    "entry {n} over a different algebra"
                )));
            }
            if !q.is_pure() {
                return Err(Error::Precondition(format!("entry {n} is not pure")));
            }
            let sq = q.square_scalar().expect("pure elements square to scalars");
            if sq.is_zero() {
                return Err(Error::ZeroInput(format!(
                    "entry {n} has square zero (degenerate form)"
                )));
            }
        }
        Ok(SkewHermForm {
            algebra: algebra.clone(),
            entries,
            weights,
        })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// The scalars a_i = q_i^2.
    pub fn entry_squares(&self) -> Vec<Scalar> {
        self.entries
            .iter()
            .map(|q| q.square_scalar().expect("pure entry"))
            .collect()
    }

    /// The weight scalar of entry i (the variable t_i, or 1 when unweighted).
    pub fn weight_scalar(&self, i: usize) -> Scalar {
        match &self.weights {
            Some(idx) => {
                let name = self.algebra.tower.vars[idx[i]].clone();
                Scalar::var(&self.algebra.tower, &name)
            }
            None => Scalar::one(&self.algebra.tower),
        }
    }

    /// Gram entry i: t_i * q_i.
    pub fn gram_entry(&self, i: usize) -> QuatElement {
        self.entries[i].scale(&self.weight_scalar(i))
    }

    /// The diagonal Gram matrix (weights included).
    pub fn gram(&self) -> QuatMatrix {
        let entries: Vec<QuatElement> = (0..self.rank()).map(|i| self.gram_entry(i)).collect();
        QuatMatrix::diagonal(&self.algebra, &entries).expect("diagonal Gram")
    }

    /// Discriminant of the adjoint involution: the square class of the
    /// product of the entry squares. Weights never change the class, since
    /// each t_i enters once with its q_i and hence squared in the product.
    pub fn discriminant(&self) -> Result<SquareClassSupport, Error> {
        let mut acc = Scalar::one(&self.algebra.tower);
        for a in self.entry_squares() {
            acc = acc.mul(&a);
        }
        acc.square_class()
    }

    /// The same class presented through reduced norms: (-1)^n prod Nrd(q_i).
    /// Agrees with `discriminant` exactly because Nrd(q) = -q^2 for pure q.
    pub fn discriminant_norm_convention(&self) -> Result<SquareClassSupport, Error> {
        let mut acc = Scalar::one(&self.algebra.tower);
        for q in &self.entries {
            acc = acc.mul(&q.nrd());
        }
        if self.rank() % 2 == 1 {
            acc = acc.neg();
        }
        acc.square_class()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BaseKind, FieldTower};

    fn hamilton() -> QuatAlgebra {
        let t = FieldTower::rationals();
        QuatAlgebra::new(Scalar::from_int(&t, -1), Scalar::from_int(&t, -1)).unwrap()
    }

    #[test]
    fn discriminant_of_rank_one_is_the_entry_square() {
        let h = hamilton();
        let form = SkewHermForm::new(&h, vec![h.basis_i()]).unwrap();
        let d = form.discriminant().unwrap();
        // class of i^2 = -1
        assert_eq!(
            d,
            Scalar::from_int(&h.tower, -1).square_class().unwrap()
        );
        assert!(!d.is_trivial());
    }

    #[test]
    fn discriminant_of_i_j_is_trivial() {
        let h = hamilton();
        let form = SkewHermForm::new(&h, vec![h.basis_i(), h.basis_j()]).unwrap();
        assert!(form.discriminant().unwrap().is_trivial());
    }

    #[test]
    fn weighted_discriminant_ignores_weights() {
        let t = FieldTower::new(BaseKind::Rationals, &["a1", "a2", "t1", "t2", "t3"]);
        let q = QuatAlgebra::new(Scalar::var(&t, "a1"), Scalar::var(&t, "a2")).unwrap();
        let entries = vec![q.basis_i(), q.basis_j(), q.basis_k()];
        let plain = SkewHermForm::new(&q, entries.clone()).unwrap();
        let weighted =
            SkewHermForm::weighted(&q, entries, &["t1", "t2", "t3"]).unwrap();
        assert_eq!(
            plain.discriminant().unwrap(),
            weighted.discriminant().unwrap()
        );
        // a1 * a2 * (-a1 a2) ~ -1 ~ the class of -(a1 a2)^2
        let expect = Scalar::from_int(&t, -1).square_class().unwrap();
        assert_eq!(plain.discriminant().unwrap(), expect);
    }

    #[test]
    fn norm_convention_matches_exactly() {
        // prod Nrd(q_i) = (-1)^n prod q_i^2 as scalars, not just as classes
        let t = FieldTower::new(BaseKind::Rationals, &["a1", "a2"]);
        let q = QuatAlgebra::new(Scalar::var(&t, "a1"), Scalar::var(&t, "a2")).unwrap();
        for entries in [
            vec![q.basis_i()],
            vec![q.basis_i(), q.basis_j()],
            vec![q.basis_i(), q.basis_j(), q.basis_k()],
            vec![q.basis_i().add(&q.basis_j()).unwrap(), q.basis_k()],
        ] {
            let n = entries.len();
            let form = SkewHermForm::new(&q, entries).unwrap();
            let mut norms = Scalar::one(&t);
            for e in &form.entries {
                norms = norms.mul(&e.nrd());
            }
            let mut squares = Scalar::one(&t);
            for a in form.entry_squares() {
                squares = squares.mul(&a);
            }
            if n % 2 == 1 {
                squares = squares.neg();
            }
            assert_eq!(norms, squares);
            assert_eq!(
                form.discriminant().unwrap(),
                form.discriminant_norm_convention().unwrap()
            );
        }
    }

    #[test]
    fn degenerate_entries_rejected() {
        // in (1, b) the pure element i + j*0 + ... pick x with x^2 = 0:
        // (i*b - k) squares to 0 in (1, b)? use a simpler split algebra (1,1)
        let t = FieldTower::rationals();
        let q = QuatAlgebra::new(Scalar::one(&t), Scalar::one(&t)).unwrap();
        // (i + k)^2 = a + (-ab) = 1 - 1 = 0
        let z = q.basis_i().add(&q.basis_k()).unwrap();
        assert_eq!(z.square_scalar(), Some(Scalar::zero(&t)));
        assert!(SkewHermForm::new(&q, vec![z]).is_err());
        // non-pure entries rejected too
        let h = hamilton();
        assert!(SkewHermForm::new(&h, vec![h.one()]).is_err());
    }
}
