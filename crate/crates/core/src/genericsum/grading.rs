//! The valuation bookkeeping for generic orthogonal sums: half-integer value
//! vectors ordered lexicographically from the right, formal vectors with
//! polynomial support in the weight variables, the norm nu(x) = 1/2 v(h(x,x)),
//! and the restriction of a normalized similitude to the associated graded
//! module.

use std::cmp::Ordering;

use crate::fields::{Poly, Scalar};
use crate::hermitian::{verify_similitude, QuatMatrix, SimType, SimilitudeMatrix, SkewHermForm};
use crate::quaternion::QuatElement;
use crate::Error;

/// A vector of half-integers, stored doubled. Comparison is lexicographic
/// from right to left: the last component is the most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueVector {
    pub doubled: Vec<i64>,
}

impl ValueVector {
    pub fn zero(n: usize) -> Self {
        ValueVector {
            doubled: vec![0; n],
        }
    }

    /// The value of the basis vector e_i: half the i-th unit vector.
    pub fn half_unit(n: usize, i: usize) -> Self {
        let mut doubled = vec![0; n];
        doubled[i] = 1;
        ValueVector { doubled }
    }
}

/// Right-to-left lexicographic comparison.
pub fn lex_compare(u: &ValueVector, v: &ValueVector) -> Result<Ordering, Error> {
    if u.doubled.len() != v.doubled.len() {
        return Err(Error::Dimension(format!(
            "value vectors of lengths {} and {}",
            u.doubled.len(),
            v.doubled.len()
        )));
    }
    for (a, b) in u.doubled.iter().rev().zip(v.doubled.iter().rev()) {
        match a.cmp(b) {
            Ordering::Equal => continue,
            other => return Ok(other),
        }
    }
    Ok(Ordering::Equal)
}

/// One term of a formal vector: (basis vector index, monomial in the weight
/// variables, weight-free quaternion coefficient).
#[derive(Debug, Clone)]
pub struct FormalTerm {
    pub block: usize,
    /// Exponents of the weight variables t_1, ..., t_n.
    pub expo: Vec<i64>,
    pub coeff: QuatElement,
}

/// An element of the generic-sum module with finite (polynomial) support.
/// General Laurent series are unrepresentable by design: every normalized
/// witness the constructions produce has this shape.
#[derive(Debug, Clone, Default)]
pub struct FormalVector {
    pub terms: Vec<FormalTerm>,
}

impl FormalVector {
    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.is_zero())
    }
}

/// Projection of a monomial onto the weight variables, as exponents in
/// block order.
fn monomial_weight_part(mono: &[u32], weight_vars: &[usize]) -> Vec<i64> {
    weight_vars.iter().map(|&v| mono[v] as i64).collect()
}

fn lex_min(a: Vec<i64>, b: Vec<i64>) -> Vec<i64> {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match x.cmp(y) {
            Ordering::Less => return a,
            Ordering::Greater => return b,
            Ordering::Equal => continue,
        }
    }
    a
}

/// The valuation of a polynomial: the right-to-left lexicographic minimum of
/// the weight-variable exponent vectors over the support. None for zero.
fn poly_weight_value(p: &Poly, weight_vars: &[usize]) -> Option<Vec<i64>> {
    let mut best: Option<Vec<i64>> = None;
    for mono in p.terms.keys() {
        let v = monomial_weight_part(mono, weight_vars);
        best = Some(match best {
            None => v,
            Some(b) => lex_min(b, v),
        });
    }
    best
}

/// v(num) - v(den). Sound because right-to-left lex is a monomial order, so
/// the minimal weight part of a product is the sum of the minimal parts.
pub(crate) fn scalar_weight_value(s: &Scalar, weight_vars: &[usize]) -> Option<Vec<i64>> {
    let num = poly_weight_value(&s.num, weight_vars)?;
    let den = poly_weight_value(&s.den, weight_vars).expect("nonzero denominator");
    Some(num.iter().zip(den.iter()).map(|(a, b)| a - b).collect())
}

/// Minimum over the four quaternion coefficients.
fn quat_weight_value(x: &QuatElement, weight_vars: &[usize]) -> Option<Vec<i64>> {
    let mut best: Option<Vec<i64>> = None;
    for c in &x.coeffs {
        if let Some(v) = scalar_weight_value(c, weight_vars) {
            best = Some(match best {
                None => v,
                Some(b) => lex_min(b, v),
            });
        }
    }
    best
}

pub(crate) fn scalar_uses_var(s: &Scalar, var: usize) -> bool {
    s.num.terms.keys().chain(s.den.terms.keys()).any(|m| m[var] != 0)
}

fn quat_uses_vars(x: &QuatElement, vars: &[usize]) -> bool {
    x.coeffs
        .iter()
        .any(|c| vars.iter().any(|&v| scalar_uses_var(c, v)))
}

fn weight_vars_of(h: &SkewHermForm) -> Result<Vec<usize>, Error> {
    h.weights.clone().ok_or_else(|| {
        Error::Precondition("generic weight variables required".into())
    })
}

/// Assemble the block-i component of x as an element of Q-hat.
fn block_component(
    x: &FormalVector,
    i: usize,
    h: &SkewHermForm,
    weight_vars: &[usize],
) -> Result<QuatElement, Error> {
    let alg = &h.algebra;
    let t = &alg.tower;
    let mut acc = alg.zero();
    for term in x.terms.iter().filter(|t| t.block == i) {
        if term.expo.len() != weight_vars.len() {
            return Err(Error::Dimension(
                "term exponent vector length must match the rank".into(),
            ));
        }
        let mut mono = Scalar::one(t);
        for (&e, &v) in term.expo.iter().zip(weight_vars.iter()) {
            if e == 0 {
                continue;
            }
            let tv = Scalar::var(t, &t.vars[v]);
            let p = tv.pow(e.unsigned_abs() as u32);
            mono = if e > 0 { mono.mul(&p) } else { mono.div(&p)? };
        }
        acc = acc.add(&term.coeff.scale(&mono))?;
    }
    Ok(acc)
}

/// nu(x) = 1/2 v(h(x,x)), computed exactly from the weight-variable
/// valuation of the Gram value. Doubling makes the result integral: the
/// returned vector is v(h(x,x)) itself.
pub fn norm_nu(x: &FormalVector, h: &SkewHermForm) -> Result<ValueVector, Error> {
    let weight_vars = weight_vars_of(h)?;
    if x.is_zero() {
        return Err(Error::ZeroInput("norm of the zero vector".into()));
    }
    let n = h.rank();
    for term in &x.terms {
        if term.block >= n {
            return Err(Error::Dimension(format!(
                "block index {} out of range for rank {n}",
                term.block
            )));
        }
        if term.coeff.algebra != h.algebra {
            return Err(Error::AlgebraMismatch("coefficient algebra".into()));
        }
        if quat_uses_vars(&term.coeff, &weight_vars) {
            return Err(Error::Precondition(
                "coefficients must be free of the weight variables".into(),
            ));
        }
    }
    let mut value = h.algebra.zero();
    for i in 0..n {
        let xi = block_component(x, i, h, &weight_vars)?;
        if xi.is_zero() {
            continue;
        }
        let contrib = xi.conj().mul(&h.gram_entry(i))?.mul(&xi)?;
        value = value.add(&contrib)?;
    }
    let v = quat_weight_value(&value, &weight_vars).ok_or(Error::Internal(
        "anisotropic blocks cannot produce a zero Gram value".into(),
    ))?;
    Ok(ValueVector { doubled: v })
}

/// The per-block residues of a normalized similitude.
#[derive(Debug, Clone)]
pub struct GradedBlocks {
    /// 1x1 similitudes of the unweighted blocks <q_i>, in entry order.
    pub blocks: Vec<SimilitudeMatrix>,
    pub improper_count: usize,
    /// True when the number of improper blocks is odd — the overall
    /// similitude is then improper.
    pub parity_odd: bool,
}

/// Restrict a similitude with multiplier in F (free of the weight
/// variables) to the associated graded module: take residues of the diagonal
/// entries at all weights zero, check that every off-diagonal entry vanishes
/// in the graded module, and re-verify each residue as a similitude of its
/// block with the same multiplier.
pub fn graded_restriction(
    g: &SimilitudeMatrix,
    h: &SkewHermForm,
) -> Result<GradedBlocks, Error> {
    let weight_vars = weight_vars_of(h)?;
    let n = h.rank();
    if g.matrix.n != n {
        return Err(Error::Dimension(format!(
            "{}x{} matrix against a rank-{n} form",
            g.matrix.n, g.matrix.n
        )));
    }
    if g.matrix.algebra != h.algebra {
        return Err(Error::AlgebraMismatch("similitude over a different algebra".into()));
    }
    let mu = &g.multiplier;
    if weight_vars.iter().any(|&v| scalar_uses_var(mu, v)) {
        return Err(Error::Precondition(
            "multiplier must be normalized into the weight-free subfield".into(),
        ));
    }
    for q in &h.entries {
        if quat_uses_vars(q, &weight_vars) {
            return Err(Error::Precondition(
                "form entries must be free of the weight variables".into(),
            ));
        }
    }

    // off-diagonal entries must vanish in the graded module:
    // 2 v(g_ij) + e_i > e_j (right-to-left lex), never equal since the
    // unit-vector parts differ in parity
    let zero = ValueVector::zero(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let e = g.matrix.get(i, j);
            if e.is_zero() {
                continue;
            }
            let v = quat_weight_value(e, &weight_vars).expect("nonzero entry");
            let mut shifted: Vec<i64> = v.iter().map(|x| 2 * x).collect();
            shifted[i] += 1;
            shifted[j] -= 1;
            let sv = ValueVector { doubled: shifted };
            if lex_compare(&sv, &zero)? != Ordering::Greater {
                return Err(Error::Precondition(format!(
                    "off-block leading term at ({i},{j}): the witness is outside \
                     the normalized graded shape"
                )));
            }
        }
    }

    let mut blocks = Vec::with_capacity(n);
    let mut improper_count = 0usize;
    for i in 0..n {
        let d = g.matrix.get(i, i);
        let mut coeffs = d.coeffs.clone();
        for c in coeffs.iter_mut() {
            for &v in &weight_vars {
                *c = c.subst_zero(v).map_err(|_| {
                    Error::Precondition(format!(
                        "diagonal entry {i} has a pole at the zero weights"
                    ))
                })?;
            }
        }
        let residue = h.algebra.from_coeffs(coeffs)?;
        let block_form = SkewHermForm::new(&h.algebra, vec![h.entries[i].clone()])?;
        let mat = QuatMatrix::diagonal(&h.algebra, &[residue])?;
        let (ok, kind) = verify_similitude(&block_form, &mat, mu)?;
        if !ok {
            return Err(Error::Precondition(format!(
                "diagonal residue {i} is not a similitude of its block"
            )));
        }
        if kind == SimType::Improper {
            improper_count += 1;
        }
        blocks.push(SimilitudeMatrix {
            matrix: mat,
            multiplier: mu.clone(),
            kind,
        });
    }
    let parity_odd = improper_count % 2 == 1;
    if g.kind != SimType::Unknown {
        let expected = if parity_odd {
            SimType::Improper
        } else {
            SimType::Proper
        };
        if g.kind != expected {
            return Err(Error::Internal(
                "declared similitude type contradicts the block parity".into(),
            ));
        }
    }
    Ok(GradedBlocks {
        blocks,
        improper_count,
        parity_odd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BaseKind, FieldTower};
    use crate::hermitian::{build_diagonal_similitude, BlockKind, BuildResult};
    use crate::quaternion::QuatAlgebra;

    fn weighted_hamilton(n: usize) -> SkewHermForm {
        let names: Vec<String> = (1..=n).map(|i| format!("t{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let t = FieldTower::new(BaseKind::Rationals, &refs);
        let q = QuatAlgebra::new(Scalar::from_int(&t, -1), Scalar::from_int(&t, -1)).unwrap();
        let entries = vec![q.basis_i(); n];
        SkewHermForm::weighted(&q, entries, &refs).unwrap()
    }

    fn basis_vec(h: &SkewHermForm, block: usize, expo: Vec<i64>) -> FormalVector {
        FormalVector {
            terms: vec![FormalTerm {
                block,
                expo,
                coeff: h.algebra.one(),
            }],
        }
    }

    #[test]
    fn lex_order_is_right_to_left() {
        let u = ValueVector { doubled: vec![1, 0] };
        let v = ValueVector { doubled: vec![0, 1] };
        assert_eq!(lex_compare(&u, &v).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&v, &u).unwrap(), Ordering::Greater);
        assert_eq!(lex_compare(&u, &u).unwrap(), Ordering::Equal);
        // e1 + e2 < 2 e2
        let a = ValueVector { doubled: vec![1, 1] };
        let b = ValueVector { doubled: vec![0, 2] };
        assert_eq!(lex_compare(&a, &b).unwrap(), Ordering::Less);
        let short = ValueVector { doubled: vec![0] };
        assert!(lex_compare(&u, &short).is_err());
    }

    #[test]
    fn basis_vector_values() {
        let h = weighted_hamilton(3);
        // nu(e_1) = 1/2 e_1
        let x = basis_vec(&h, 0, vec![0, 0, 0]);
        assert_eq!(norm_nu(&x, &h).unwrap(), ValueVector::half_unit(3, 0));
        // nu(e_1 t_2) = 1/2 e_1 + e_2
        let x = basis_vec(&h, 0, vec![0, 1, 0]);
        assert_eq!(
            norm_nu(&x, &h).unwrap(),
            ValueVector {
                doubled: vec![1, 2, 0]
            }
        );
        // nu(e_1 + e_2) = min = 1/2 e_1
        let mut x = basis_vec(&h, 0, vec![0, 0, 0]);
        x.terms.extend(basis_vec(&h, 1, vec![0, 0, 0]).terms);
        assert_eq!(norm_nu(&x, &h).unwrap(), ValueVector::half_unit(3, 0));
        // negative exponents (Laurent tails) still evaluate exactly
        let x = basis_vec(&h, 2, vec![0, 0, -1]);
        assert_eq!(
            norm_nu(&x, &h).unwrap(),
            ValueVector {
                doubled: vec![0, 0, -1]
            }
        );
        assert!(norm_nu(&FormalVector::default(), &h).is_err());
    }

    #[test]
    fn block_values_are_disjoint() {
        // the half-unit offsets make nu(V_i) and nu(V_j) disjoint for i != j
        let h = weighted_hamilton(2);
        for e1 in -2i64..3 {
            for e2 in -2i64..3 {
                let x = basis_vec(&h, 0, vec![e1, e2]);
                let y = basis_vec(&h, 1, vec![e2, e1]);
                let vx = norm_nu(&x, &h).unwrap();
                let vy = norm_nu(&y, &h).unwrap();
                assert_ne!(vx, vy, "block values must never coincide");
                // component i is odd exactly for the block-i vector
                assert_eq!(vx.doubled[0] % 2 != 0, true);
                assert_eq!(vy.doubled[1] % 2 != 0, true);
            }
        }
    }

    #[test]
    fn graded_round_trip_on_constructed_similitudes() {
        let h = weighted_hamilton(3);
        let t = &h.algebra.tower;
        let mu = Scalar::from_int(t, -1);
        let pattern = [BlockKind::Improper, BlockKind::Improper, BlockKind::Improper];
        let sim = match build_diagonal_similitude(&h, &mu, &pattern).unwrap() {
            BuildResult::Built { sim, .. } => sim,
            other => panic!("construction failed: {other:?}"),
        };
        let blocks = graded_restriction(&sim, &h).unwrap();
        assert_eq!(blocks.improper_count, 3);
        assert!(blocks.parity_odd);
        for (i, b) in blocks.blocks.iter().enumerate() {
            // residues of constant diagonal blocks are the blocks themselves
            assert_eq!(b.matrix.get(0, 0), sim.matrix.get(i, i));
            assert_eq!(b.kind, SimType::Improper);
        }
    }

    #[test]
    fn off_block_leading_terms_rejected() {
        let h = weighted_hamilton(2);
        let t = &h.algebra.tower;
        let mu = Scalar::one(t);
        let alg = &h.algebra;
        // identity plus a constant off-diagonal entry: the (0,1) entry has
        // value 0, and 0 + e_0 - e_1 < 0, so it survives in the graded module
        let data = vec![
            alg.one(),
            alg.one(),
            alg.zero(),
            alg.one(),
        ];
        let m = QuatMatrix::new(alg, 2, data).unwrap();
        let g = SimilitudeMatrix {
            matrix: m,
            multiplier: mu.clone(),
            kind: SimType::Unknown,
        };
        assert!(graded_restriction(&g, &h).is_err());
        // an off-diagonal entry divisible by t_2 is below the diagonal grades
        let t2 = Scalar::var(t, "t2");
        let data = vec![
            alg.one(),
            alg.scalar(t2),
            alg.zero(),
            alg.one(),
        ];
        let m = QuatMatrix::new(alg, 2, data).unwrap();
        let g = SimilitudeMatrix {
            matrix: m,
            multiplier: mu,
            kind: SimType::Proper,
        };
        let blocks = graded_restriction(&g, &h).unwrap();
        assert_eq!(blocks.improper_count, 0);
    }

    #[test]
    fn non_normalized_multiplier_rejected() {
        let h = weighted_hamilton(2);
        let t = &h.algebra.tower;
        let g = SimilitudeMatrix {
            matrix: QuatMatrix::identity(&h.algebra, 2),
            multiplier: Scalar::var(t, "t1"),
            kind: SimType::Unknown,
        };
        assert!(graded_restriction(&g, &h).is_err());
    }
}
