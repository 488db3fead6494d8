//! Decision and certification engine for diagonal quadratic forms.
//!
//! Local machinery over Q (Hilbert symbols, Hasse–Minkowski with witness
//! search), Springer residue chains over function-field towers, the
//! equal-dimension generic-value refutation, and the prescribed-symbol
//! solver. All verdicts are three-valued; `yes` always carries an explicit
//! witness, `no` always carries a re-checkable certificate, and `unknown` is
//! never converted to a boolean.

pub mod cert;
pub mod hilbert;
pub mod qsolve;
pub mod refute;
pub mod springer;
pub mod symbols;
pub mod witness;

use crate::fields::{FieldTower, Scalar};
use crate::Error;

pub use cert::{BaseReason, Certificate, ChainNode};
pub use hilbert::{hilbert_symbol, ram_support, PlaceQ};
pub use qsolve::is_isotropic_q;
pub use refute::generic_value_refute;
pub use springer::{certify_anisotropic, springer_split, AnisoResult};
pub use symbols::{solve_prescribed_symbols, Constraint, SymbolOutcome, SymbolTarget};
pub use witness::{represents, witness_certificate, RepResult};

/// Three-valued verdict. `Unknown` is a first-class answer everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// Diagonal quadratic form over a tower; entries nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadForm {
    pub tower: FieldTower,
    pub entries: Vec<Scalar>,
}

impl QuadForm {
    pub fn new(tower: &FieldTower, entries: Vec<Scalar>) -> Result<Self, Error> {
        for (k, e) in entries.iter().enumerate() {
            if e.is_zero() {
                return Err(Error::ZeroInput(format!("form entry {k} is zero")));
            }
            if e.tower != *tower {
                return Err(Error::AlgebraMismatch(format!(
                    "entry {k} lives over {} but the form is over {}",
                    e.tower, tower
                )));
            }
        }
        Ok(QuadForm {
            tower: tower.clone(),
            entries,
        })
    }

    pub fn from_ints(tower: &FieldTower, entries: &[i64]) -> Self {
        QuadForm::new(
            tower,
            entries
                .iter()
                .map(|&n| Scalar::from_int(tower, n))
                .collect(),
        )
        .expect("nonzero integer entries")
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Evaluate the form at a vector of scalars.
    pub fn eval(&self, v: &[Scalar]) -> Scalar {
        assert_eq!(v.len(), self.dim(), "vector length mismatch");
        let mut acc = Scalar::zero(&self.tower);
        for (e, x) in self.entries.iter().zip(v) {
            acc = acc.add(&e.mul(&x.mul(x)));
        }
        acc
    }

    /// Discriminant: product of the entries, as a scalar.
    pub fn disc(&self) -> Scalar {
        let mut acc = Scalar::one(&self.tower);
        for e in &self.entries {
            acc = acc.mul(e);
        }
        acc
    }

    /// Orthogonal sum.
    pub fn perp(&self, o: &QuadForm) -> QuadForm {
        assert_eq!(self.tower, o.tower);
        let mut entries = self.entries.clone();
        entries.extend(o.entries.iter().cloned());
        QuadForm {
            tower: self.tower.clone(),
            entries,
        }
    }

    /// Scale every entry by c.
    pub fn scale(&self, c: &Scalar) -> QuadForm {
        assert!(!c.is_zero());
        QuadForm {
            tower: self.tower.clone(),
            entries: self.entries.iter().map(|e| e.mul(c)).collect(),
        }
    }

    /// Entry-wise square-class normalization (isometric form).
    pub fn normalized(&self) -> QuadForm {
        QuadForm {
            tower: self.tower.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| e.square_class_rep().expect("nonzero entry"))
                .collect(),
        }
    }

    pub fn entry_strings(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.to_string()).collect()
    }
}
