//! Refuting that an anisotropic form represents the generic value of another
//! form of the same dimension.
//!
//! Over k(x1,...,xn), an anisotropic form psi represents the generic value
//! phi(x1,...,xn) iff phi is a subform of psi (representation theorem for
//! function fields of quadrics). With equal dimensions "subform" means
//! "isometric", which forces equal discriminants — so a discriminant
//! mismatch plus an anisotropy chain for psi is a complete refutation
//! certificate.

use super::cert::Certificate;
use super::springer::{certify_anisotropic, AnisoResult};
use super::{QuadForm, Verdict};
use crate::Error;

/// Can psi (anisotropic, certified here) represent the generic value of phi?
/// `No` is certified; `Unknown` means this particular obstruction does not
/// apply (it never claims representability).
pub fn generic_value_refute(
    psi: &QuadForm,
    phi: &QuadForm,
) -> Result<(Verdict, Option<Certificate>), Error> {
    if psi.tower != phi.tower {
        return Err(Error::AlgebraMismatch(
            "generic-value refutation across towers".into(),
        ));
    }
    if psi.dim() != phi.dim() {
        return Ok((Verdict::Unknown, None));
    }
    let aniso = match certify_anisotropic(psi)? {
        AnisoResult::Anisotropic(cert) => cert,
        AnisoResult::Isotropic { .. } => {
            return Err(Error::Precondition(
                "refutation requires an anisotropic form".into(),
            ))
        }
        AnisoResult::Unknown(_) => return Ok((Verdict::Unknown, None)),
    };
    if psi.disc().mul(&phi.disc()).is_square() {
        // same discriminant class: this obstruction cannot distinguish them
        return Ok((Verdict::Unknown, None));
    }
    let cert = Certificate::GenericValueObstruction {
        tower: psi.tower.to_string(),
        psi: psi.entry_strings(),
        phi: phi.entry_strings(),
        psi_anisotropic: Box::new(aniso),
    };
    cert.verify()?;
    Ok((Verdict::No, Some(cert)))
}
