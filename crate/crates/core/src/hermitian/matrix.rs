//! Square matrices over a quaternion algebra, and their reduced norm.
//!
//! The reduced norm of an n x n quaternion matrix is computed by splitting
//! the algebra over F(sqrt(a)): each entry x0 + x1 i + x2 j + x3 k maps to
//! the 2x2 block
//!
//! ```text
//!   [ x0 + x1 s      x2 + x3 s  ]        s^2 = a
//!   [ b (x2 - x3 s)  x0 - x1 s  ]
//! ```
//!
//! and Nrd is the determinant of the resulting 2n x 2n matrix. When a is not
//! a square the extension is handled as formal pairs (p, q) = p + q s, which
//! form a field, so exact Gaussian elimination applies; when a happens to be
//! a square the root is already in the field and no extension is needed.

use std::fmt;

use crate::fields::Scalar;
use crate::quaternion::{QuatAlgebra, QuatElement};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatMatrix {
    pub algebra: QuatAlgebra,
    pub n: usize,
    /// Row-major entries.
    pub data: Vec<QuatElement>,
}

impl QuatMatrix {
    pub fn new(algebra: &QuatAlgebra, n: usize, data: Vec<QuatElement>) -> Result<Self, Error> {
        if data.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        for e in &data {
            if e.algebra != *algebra {
                return Err(Error::AlgebraMismatch(
                    "matrix entry over a different algebra".into(),
                ));
            }
        }
        Ok(QuatMatrix {
            algebra: algebra.clone(),
            n,
            data,
        })
    }

    pub fn identity(algebra: &QuatAlgebra, n: usize) -> Self {
        let mut data = vec![algebra.zero(); n * n];
        for r in 0..n {
            data[r * n + r] = algebra.one();
        }
        QuatMatrix {
            algebra: algebra.clone(),
            n,
            data,
        }
    }

    pub fn diagonal(algebra: &QuatAlgebra, entries: &[QuatElement]) -> Result<Self, Error> {
        let n = entries.len();
        let mut data = vec![algebra.zero(); n * n];
        for (r, e) in entries.iter().enumerate() {
            data[r * n + r] = e.clone();
        }
        QuatMatrix::new(algebra, n, data)
    }

    pub fn get(&self, r: usize, c: usize) -> &QuatElement {
        &self.data[r * self.n + c]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|r| (0..self.n).all(|c| r == c || self.get(r, c).is_zero()))
    }

    pub fn mul(&self, o: &QuatMatrix) -> Result<QuatMatrix, Error> {
        if self.algebra != o.algebra {
            return Err(Error::AlgebraMismatch("matrix product".into()));
        }
        if self.n != o.n {
            return Err(Error::Dimension("matrix product size mismatch".into()));
        }
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = self.algebra.zero();
                for m in 0..n {
                    acc = acc.add(&self.get(r, m).mul(o.get(m, c))?)?;
                }
                data.push(acc);
            }
        }
        QuatMatrix::new(&self.algebra, n, data)
    }

    pub fn transpose(&self) -> QuatMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(self.get(c, r).clone());
            }
        }
        QuatMatrix {
            algebra: self.algebra.clone(),
            n,
            data,
        }
    }

    /// Conjugate transpose for the canonical involution.
    pub fn conj_transpose(&self) -> QuatMatrix {
        let mut t = self.transpose();
        for e in &mut t.data {
            *e = e.conj();
        }
        t
    }

    /// Apply a map to every entry.
    pub fn map(&self, f: impl Fn(&QuatElement) -> QuatElement) -> QuatMatrix {
        QuatMatrix {
            algebra: self.algebra.clone(),
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> QuatMatrix {
        self.map(|e| e.scale(c))
    }

    /// Is this mu times the identity for some scalar quaternion entry?
    pub fn central_scalar(&self) -> Option<Scalar> {
        let cand = self.get(0, 0).clone();
        if !(cand.coeffs[1].is_zero() && cand.coeffs[2].is_zero() && cand.coeffs[3].is_zero()) {
            return None;
        }
        for r in 0..self.n {
            for c in 0..self.n {
                let want = if r == c { &cand } else { &self.algebra.zero() };
                if self.get(r, c) != want {
                    return None;
                }
            }
        }
        Some(cand.coeffs[0].clone())
    }

    /// Reduced norm: determinant of the 2n x 2n image under the splitting of
    /// the algebra over F(sqrt(a)). Always lands in the base tower.
    pub fn reduced_norm(&self) -> Result<Scalar, Error> {
        let a = &self.algebra.a;
        let b = &self.algebra.b;
        let t = &self.algebra.tower;
        let m = 2 * self.n;
        // entries as pairs (p, q) = p + q*sqrt(a)
        let mut grid: Vec<(Scalar, Scalar)> = vec![(Scalar::zero(t), Scalar::zero(t)); m * m];
        for r in 0..self.n {
            for c in 0..self.n {
                let [x0, x1, x2, x3] = &self.get(r, c).coeffs;
                let put = |grid: &mut Vec<(Scalar, Scalar)>, rr: usize, cc: usize, p: Scalar, q: Scalar| {
                    grid[rr * m + cc] = (p, q);
                };
                put(&mut grid, 2 * r, 2 * c, x0.clone(), x1.clone());
                put(&mut grid, 2 * r, 2 * c + 1, x2.clone(), x3.clone());
                put(&mut grid, 2 * r + 1, 2 * c, b.mul(x2), b.mul(x3).neg());
                put(&mut grid, 2 * r + 1, 2 * c + 1, x0.clone(), x1.neg());
            }
        }
        match a.sqrt() {
            Some(s) => {
                // a is already a square: evaluate the pairs in the field
                let flat: Vec<Scalar> = grid
                    .into_iter()
                    .map(|(p, q)| p.add(&q.mul(&s)))
                    .collect();
                det_scalar(m, flat, t)
            }
            None => {
                let (p, q) = det_ext(m, grid, a, t)?;
                if !q.is_zero() {
                    return Err(Error::Internal(
                        "reduced norm has a nonzero sqrt(a)-component".into(),
                    ));
                }
                Ok(p)
            }
        }
    }
}

impl fmt::Display for QuatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

fn det_scalar(
    m: usize,
    mut grid: Vec<Scalar>,
    t: &crate::fields::FieldTower,
) -> Result<Scalar, Error> {
    let mut det = Scalar::one(t);
    for col in 0..m {
        let pivot = (col..m).find(|&r| !grid[r * m + col].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => return Ok(Scalar::zero(t)),
        };
        if pivot != col {
            for c in 0..m {
                grid.swap(pivot * m + c, col * m + c);
            }
            det = det.neg();
        }
        let pv = grid[col * m + col].clone();
        det = det.mul(&pv);
        let pinv = pv.inv()?;
        for r in col + 1..m {
            let factor = grid[r * m + col].mul(&pinv);
            if factor.is_zero() {
                continue;
            }
            for c in col..m {
                let sub = factor.mul(&grid[col * m + c]);
                grid[r * m + c] = grid[r * m + c].sub(&sub);
            }
        }
    }
    Ok(det)
}

type Ext = (Scalar, Scalar);

fn ext_is_zero(x: &Ext) -> bool {
    x.0.is_zero() && x.1.is_zero()
}

fn ext_mul(x: &Ext, y: &Ext, a: &Scalar) -> Ext {
    (
        x.0.mul(&y.0).add(&a.mul(&x.1.mul(&y.1))),
        x.0.mul(&y.1).add(&x.1.mul(&y.0)),
    )
}

fn ext_sub(x: &Ext, y: &Ext) -> Ext {
    (x.0.sub(&y.0), x.1.sub(&y.1))
}

fn ext_inv(x: &Ext, a: &Scalar) -> Result<Ext, Error> {
    // (p + q s)^-1 = (p - q s)/(p^2 - a q^2); the denominator is nonzero
    // because a is not a square
    let d = x.0.mul(&x.0).sub(&a.mul(&x.1.mul(&x.1)));
    if d.is_zero() {
        return Err(Error::Internal(
            "zero norm in the quadratic extension of a nonsquare".into(),
        ));
    }
    let dinv = d.inv()?;
    Ok((x.0.mul(&dinv), x.1.neg().mul(&dinv)))
}

fn det_ext(
    m: usize,
    mut grid: Vec<Ext>,
    a: &Scalar,
    t: &crate::fields::FieldTower,
) -> Result<Ext, Error> {
    let mut det: Ext = (Scalar::one(t), Scalar::zero(t));
    for col in 0..m {
        let pivot = (col..m).find(|&r| !ext_is_zero(&grid[r * m + col]));
        let pivot = match pivot {
            Some(p) => p,
            None => return Ok((Scalar::zero(t), Scalar::zero(t))),
        };
        if pivot != col {
            for c in 0..m {
                grid.swap(pivot * m + c, col * m + c);
            }
            det = (det.0.neg(), det.1.neg());
        }
        let pv = grid[col * m + col].clone();
        det = ext_mul(&det, &pv, a);
        let pinv = ext_inv(&pv, a)?;
        for r in col + 1..m {
            let factor = ext_mul(&grid[r * m + col], &pinv, a);
            if ext_is_zero(&factor) {
                continue;
            }
            for c in col..m {
                let sub = ext_mul(&factor, &grid[col * m + c], a);
                grid[r * m + c] = ext_sub(&grid[r * m + c], &sub);
            }
        }
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BaseKind, FieldTower};

    fn hamilton() -> QuatAlgebra {
        let t = FieldTower::rationals();
        QuatAlgebra::new(Scalar::from_int(&t, -1), Scalar::from_int(&t, -1)).unwrap()
    }

    fn elem(q: &QuatAlgebra, c: [i64; 4]) -> QuatElement {
        q.from_coeffs(std::array::from_fn(|n| Scalar::from_int(&q.tower, c[n])))
            .unwrap()
    }

    #[test]
    fn reduced_norm_of_diagonal_matches_element_norm() {
        let h = hamilton();
        let x = elem(&h, [1, 2, -3, 5]);
        let y = elem(&h, [0, 1, 1, 0]);
        let m = QuatMatrix::diagonal(&h, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(m.reduced_norm().unwrap(), x.nrd().mul(&y.nrd()));
    }

    #[test]
    fn reduced_norm_multiplicative() {
        let h = hamilton();
        let m1 = QuatMatrix::new(
            &h,
            2,
            vec![
                elem(&h, [1, 1, 0, 0]),
                elem(&h, [0, 0, 2, 0]),
                elem(&h, [3, 0, 0, 1]),
                elem(&h, [1, -1, 1, -1]),
            ],
        )
        .unwrap();
        let m2 = QuatMatrix::new(
            &h,
            2,
            vec![
                elem(&h, [0, 2, 1, 0]),
                elem(&h, [1, 0, 0, 0]),
                elem(&h, [1, 1, 1, 1]),
                elem(&h, [0, 0, 0, 3]),
            ],
        )
        .unwrap();
        let lhs = m1.mul(&m2).unwrap().reduced_norm().unwrap();
        let rhs = m1.reduced_norm().unwrap().mul(&m2.reduced_norm().unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduced_norm_over_generic_tower() {
        // (a1, a2): a1 is a nonsquare, so the formal extension path runs
        let t = FieldTower::new(BaseKind::Rationals, &["a1", "a2"]);
        let q = QuatAlgebra::new(Scalar::var(&t, "a1"), Scalar::var(&t, "a2")).unwrap();
        let x = q.basis_i().add(&q.basis_j()).unwrap();
        let m = QuatMatrix::diagonal(&q, &[x.clone()]).unwrap();
        assert_eq!(m.reduced_norm().unwrap(), x.nrd());
        // and Nrd(i+j) = -a1 - a2
        assert_eq!(
            x.nrd(),
            Scalar::var(&t, "a1").neg().sub(&Scalar::var(&t, "a2"))
        );
    }

    #[test]
    fn reduced_norm_with_square_structure_constant() {
        // (4, b) splits with sqrt(4) = 2 in the field; no extension needed
        let t = FieldTower::new(BaseKind::Rationals, &["b"]);
        let q = QuatAlgebra::new(Scalar::from_int(&t, 4), Scalar::var(&t, "b")).unwrap();
        let x = q.one().add(&q.basis_i()).unwrap().add(&q.basis_k()).unwrap();
        let m = QuatMatrix::diagonal(&q, &[x.clone()]).unwrap();
        assert_eq!(m.reduced_norm().unwrap(), x.nrd());
    }

    #[test]
    fn central_scalar_detection() {
        let h = hamilton();
        let two = QuatMatrix::identity(&h, 2).scale(&Scalar::from_int(&h.tower, 2));
        assert_eq!(two.central_scalar(), Some(Scalar::from_int(&h.tower, 2)));
        let m = QuatMatrix::diagonal(&h, &[h.one(), h.basis_i()]).unwrap();
        assert_eq!(m.central_scalar(), None);
    }
}
