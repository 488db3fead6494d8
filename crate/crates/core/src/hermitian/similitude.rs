//! Multiplier groups, block-diagonal similitude construction, and exact
//! similitude verification with proper/improper classification through the
//! reduced norm.

use super::matrix::QuatMatrix;
use super::SkewHermForm;
use crate::fields::Scalar;
use crate::quadforms::{represents, Certificate, QuadForm, RepResult};
use crate::quaternion::{
    anticommuting_pure, is_division, pure_with_square, DivisionResult, PureResult, QuatAlgebra,
    QuatElement,
};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SimType {
    Proper,
    Improper,
    Unknown,
}

/// A square matrix with a declared multiplier and type; `verify_similitude`
/// re-derives both from scratch.
#[derive(Debug, Clone)]
pub struct SimilitudeMatrix {
    pub matrix: QuatMatrix,
    pub multiplier: Scalar,
    pub kind: SimType,
}

/// Where a multiplier sits relative to the algebra: (a, mu) split, (a, mu)
/// isomorphic to Q, provably neither, or out of reach.
#[derive(Debug, Clone)]
pub enum MultClass {
    /// (a, mu) is split: mu is a norm from F(sqrt(a)).
    GPlus { cert: Certificate },
    /// (a, mu) is isomorphic to Q.
    GMinus { cert: Certificate },
    /// (a, mu) is a division algebra distinct from Q; both facts certified.
    Neither {
        not_split: Certificate,
        not_q: Certificate,
    },
    Unknown(String),
}

/// Classify a multiplier mu for the 1-dimensional form <q> with q^2 = a over
/// the division algebra Q. Presents Q as (a, b') through a pure square root
/// of a and an anticommuting complement, then uses that (a,mu) = (a,b') iff
/// (a, mu*b') splits.
pub fn multiplier_class(a: &Scalar, mu: &Scalar, q: &QuatAlgebra) -> Result<MultClass, Error> {
    if mu.is_zero() {
        return Err(Error::ZeroInput("zero multiplier".into()));
    }
    let qa = match pure_with_square(q, a)? {
        PureResult::Found { element, .. } => element,
        PureResult::None(_) => {
            return Err(Error::Precondition(
                "a is not the square of a pure quaternion of Q".into(),
            ))
        }
        PureResult::Unknown(note) => return Ok(MultClass::Unknown(note)),
    };
    let split_test = QuatAlgebra::new(a.clone(), mu.clone())?;
    let not_split = match is_division(&split_test)? {
        DivisionResult::Split { cert, .. } => return Ok(MultClass::GPlus { cert }),
        DivisionResult::Division(cert) => cert,
        DivisionResult::Unknown(note) => return Ok(MultClass::Unknown(note)),
    };
    // Q = (a, b') with b' the square of an anticommuting complement of qa
    let u = anticommuting_pure(&qa)?;
    let bp = u.square_scalar().expect("pure complement");
    let diff_test = QuatAlgebra::new(a.clone(), mu.mul(&bp))?;
    match is_division(&diff_test)? {
        DivisionResult::Split { cert, .. } => Ok(MultClass::GMinus { cert }),
        DivisionResult::Division(not_q) => Ok(MultClass::Neither { not_split, not_q }),
        DivisionResult::Unknown(note) => Ok(MultClass::Unknown(note)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Proper,
    Improper,
}

/// Outcome of the block-diagonal construction: either a fully verified
/// similitude, or the index of the first unsolvable/undecided block.
#[derive(Debug, Clone)]
pub enum BuildResult {
    Built {
        sim: SimilitudeMatrix,
        /// Per-block representation certificates, in entry order.
        certs: Vec<Certificate>,
    },
    /// Block `index` is unsolvable; the refutation certificate shows the
    /// relevant norm equation has no solution.
    Blocked { index: usize, cert: Certificate },
    Unknown { index: usize, note: String },
}

/// Build g = diag(g_1, ..., g_n) with multiplier mu following the requested
/// proper/improper pattern: proper g_i = x + y q_i with x^2 - a_i y^2 = mu;
/// improper g_i = u (x - q_i y) with u an anticommuting complement of q_i
/// and x^2 - a_i y^2 = mu / u^2. The result is re-verified exactly.
pub fn build_diagonal_similitude(
    h: &SkewHermForm,
    mu: &Scalar,
    pattern: &[BlockKind],
) -> Result<BuildResult, Error> {
    if pattern.len() != h.rank() {
        return Err(Error::Dimension(
            "pattern length must match the rank".into(),
        ));
    }
    if mu.is_zero() {
        return Err(Error::ZeroInput("zero multiplier".into()));
    }
    let alg = &h.algebra;
    let t = &alg.tower;
    let squares = h.entry_squares();
    let mut blocks: Vec<QuatElement> = Vec::with_capacity(h.rank());
    let mut certs: Vec<Certificate> = Vec::with_capacity(h.rank());
    let mut improper_count = 0usize;
    for (i, kind) in pattern.iter().enumerate() {
        let qi = &h.entries[i];
        let ai = &squares[i];
        let norm_form = QuadForm::new(t, vec![Scalar::one(t), ai.neg()])?;
        let g = match kind {
            BlockKind::Proper => {
                let (x, y, cert) = match solve_norm(&norm_form, mu)? {
                    NormSolution::Solved(x, y, cert) => (x, y, cert),
                    NormSolution::Blocked(cert) => {
                        return Ok(BuildResult::Blocked { index: i, cert })
                    }
                    NormSolution::Unknown(note) => {
                        return Ok(BuildResult::Unknown { index: i, note })
                    }
                };
                certs.push(cert);
                // g = x + y q_i, a norm-mu element of F(q_i)
                alg.scalar(x).add(&qi.scale(&y))?
            }
            BlockKind::Improper => {
                improper_count += 1;
                let u = anticommuting_pure(qi)?;
                let nu = u.square_scalar().expect("pure complement");
                let target = mu.div(&nu)?;
                let (x, y, cert) = match solve_norm(&norm_form, &target)? {
                    NormSolution::Solved(x, y, cert) => (x, y, cert),
                    NormSolution::Blocked(cert) => {
                        return Ok(BuildResult::Blocked { index: i, cert })
                    }
                    NormSolution::Unknown(note) => {
                        return Ok(BuildResult::Unknown { index: i, note })
                    }
                };
                certs.push(cert);
                // g = u (x - y q_i): pure, anticommutes with q_i, g^2 = mu
                let z_bar = alg.scalar(x).sub(&qi.scale(&y))?;
                let g = u.mul(&z_bar)?;
                assert!(g.is_pure(), "improper block must be pure");
                assert_eq!(
                    g.square_scalar().as_ref(),
                    Some(mu),
                    "improper block must be square-central with square mu"
                );
                g
            }
        };
        // per-block similitude identity: conj(g) q_i g = mu q_i
        let lhs = g.conj().mul(qi)?.mul(&g)?;
        assert_eq!(lhs, qi.scale(mu), "block similitude identity");
        blocks.push(g);
    }
    let matrix = QuatMatrix::diagonal(alg, &blocks)?;
    let kind = if improper_count % 2 == 0 {
        SimType::Proper
    } else {
        SimType::Improper
    };
    let (valid, verified_kind) = verify_similitude(h, &matrix, mu)?;
    assert!(valid, "constructed similitude must verify");
    assert_eq!(
        verified_kind, kind,
        "reduced-norm type must match the improper-count parity"
    );
    Ok(BuildResult::Built {
        sim: SimilitudeMatrix {
            matrix,
            multiplier: mu.clone(),
            kind,
        },
        certs,
    })
}

enum NormSolution {
    Solved(Scalar, Scalar, Certificate),
    Blocked(Certificate),
    Unknown(String),
}

fn solve_norm(norm_form: &QuadForm, target: &Scalar) -> Result<NormSolution, Error> {
    match represents(norm_form, target)? {
        RepResult::Represented { vector, cert } => {
            let [x, y]: [Scalar; 2] = vector.try_into().expect("binary form");
            Ok(NormSolution::Solved(x, y, cert))
        }
        RepResult::NotRepresented(cert) => Ok(NormSolution::Blocked(cert)),
        RepResult::Unknown(note) => Ok(NormSolution::Unknown(note)),
    }
}

/// Check g* H g = mu H exactly (H the diagonal Gram matrix of h, * the
/// conjugate transpose), then classify by Nrd(g) = mu^n (proper) or -mu^n
/// (improper).
pub fn verify_similitude(
    h: &SkewHermForm,
    g: &QuatMatrix,
    mu: &Scalar,
) -> Result<(bool, SimType), Error> {
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
    let lhs = g.conj_transpose().mul(&gram)?.mul(g)?;
    let rhs = gram.scale(mu);
    if lhs != rhs {
        return Ok((false, SimType::Unknown));
    }
    let nrd = g.reduced_norm()?;
    let mu_n = mu.pow(h.rank() as u32);
    let kind = if nrd == mu_n {
        SimType::Proper
    } else if nrd == mu_n.neg() {
        SimType::Improper
    } else {
        return Err(Error::Internal(
            "similitude with reduced norm different from both +mu^n and -mu^n".into(),
        ));
    };
    Ok((true, kind))
}
