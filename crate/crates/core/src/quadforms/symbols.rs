//! Finding a multiplier with prescribed Hilbert-symbol behavior, or proving
//! that none exists.
//!
//! Each constraint fixes, for one rational a_i, the full local behavior of
//! the quaternion algebra (a_i, mu): either split everywhere, or isomorphic
//! to a given division algebra Q. Writing mu multiplicatively over a finite
//! generator set (-1, the relevant primes, and a batch of auxiliary primes)
//! turns the constraints into an F2-linear system, one equation per
//! (constraint, place). Witnesses are re-verified symbol by symbol; emptiness
//! is only ever declared with an algebraically sound reciprocity obstruction
//! — an unsolvable search alone yields `unknown`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::cert::{Certificate, ObsConstraint, ObsRow, TargetSpec};
use super::hilbert::{hilbert_symbol, prime_support, ram_places, PlaceQ};
use crate::Error;

/// Number of auxiliary primes (outside the constraint support) made
/// available as generators for the multiplier.
const AUX_PRIMES: usize = 25;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolTarget {
    /// (a, mu) splits: all symbols +1.
    Split,
    /// (a, mu) is isomorphic to the reference algebra Q.
    EqualToQ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub a: BigRational,
    pub target: SymbolTarget,
}

#[derive(Debug, Clone)]
pub enum SymbolOutcome {
    Solution {
        mu: BigRational,
        cert: Certificate,
    },
    Empty(Certificate),
    Unknown(String),
}

/// Solve for mu with (a_i, mu) in the prescribed class for every constraint,
/// where the `EqualToQ` targets refer to the division algebra Q = (qa, qb).
pub fn solve_prescribed_symbols(
    constraints: &[Constraint],
    qa: &BigRational,
    qb: &BigRational,
) -> Result<SymbolOutcome, Error> {
    if constraints.is_empty() {
        return Err(Error::Precondition("no constraints".into()));
    }
    for c in constraints {
        if c.a.is_zero() {
            return Err(Error::ZeroInput("zero constraint coefficient".into()));
        }
    }
    if qa.is_zero() || qb.is_zero() {
        return Err(Error::ZeroInput("degenerate reference algebra".into()));
    }
    let q_ram = ram_places(qa, qb)?;
    if q_ram.is_empty()
        && constraints
            .iter()
            .any(|c| c.target == SymbolTarget::EqualToQ)
    {
        return Err(Error::Precondition(
            "reference algebra is split, not division".into(),
        ));
    }

    // support primes: 2, everything dividing the a_i or ramified in Q
    let mut support: Vec<u64> = vec![2];
    for c in constraints {
        support.extend(prime_support(&c.a)?);
    }
    support.extend(prime_support(qa)?);
    support.extend(prime_support(qb)?);
    support.sort_unstable();
    support.dedup();

    // auxiliary generator primes outside the support
    let mut aux: Vec<u64> = Vec::new();
    for &p in crate::fields::base::SMALL_PRIMES.iter() {
        if aux.len() == AUX_PRIMES {
            break;
        }
        if !support.contains(&p) {
            aux.push(p);
        }
    }

    // generators for mu's square class, and the places that can see them
    let mut gens: Vec<BigRational> = vec![-BigRational::one()];
    let mut places: Vec<PlaceQ> = vec![PlaceQ::Infinity];
    for &p in support.iter().chain(aux.iter()) {
        gens.push(BigRational::from_integer(BigInt::from(p)));
        places.push(PlaceQ::Prime(p));
    }
    if gens.len() > 64 {
        return Err(Error::Capacity(format!(
            "too many symbol generators ({})",
            gens.len()
        )));
    }

    // one F2 row per (constraint, place): sum_j e_j [(a_i, g_j)_v = -1]
    // must equal the target bit
    struct Row {
        mask: u64,
        target: bool,
        members: Vec<usize>, // indices into the original (constraint, place) grid
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut grid: Vec<(usize, PlaceQ)> = Vec::new();
    for (ci, c) in constraints.iter().enumerate() {
        for v in &places {
            let mut mask = 0u64;
            for (gi, g) in gens.iter().enumerate() {
                if hilbert_symbol(&c.a, g, v) == -1 {
                    mask |= 1 << gi;
                }
            }
            let target = match c.target {
                SymbolTarget::Split => false,
                SymbolTarget::EqualToQ => hilbert_symbol(qa, qb, v) == -1,
            };
            rows.push(Row {
                mask,
                target,
                members: vec![grid.len()],
            });
            grid.push((ci, v.clone()));
        }
    }

    // Gaussian elimination over F2, tracking row provenance for the
    // contradiction certificate
    let mut pivots: Vec<(usize, Row)> = Vec::new(); // (bit, reduced row)
    let mut contradiction: Option<Vec<usize>> = None;
    for mut row in rows {
        for (bit, p) in &pivots {
            if row.mask >> bit & 1 == 1 {
                row.mask ^= p.mask;
                row.target ^= p.target;
                row.members = xor_members(&row.members, &p.members);
            }
        }
        if row.mask == 0 {
            if row.target {
                contradiction = Some(row.members.clone());
                break;
            }
            continue;
        }
        let bit = row.mask.trailing_zeros() as usize;
        pivots.push((bit, row));
    }

    if let Some(members) = &contradiction {
        if let Some(cert) = try_obstruction(constraints, qa, qb, &grid, members) {
            return Ok(SymbolOutcome::Empty(cert));
        }
    }

    if contradiction.is_none() {
        // back-substitute a particular solution
        let mut e = 0u64;
        // process pivots in reverse insertion order
        for (bit, row) in pivots.iter().rev() {
            let mut val = row.target;
            let rest = row.mask & !(1u64 << bit);
            val ^= ((rest & e).count_ones() & 1) == 1;
            if val {
                e |= 1 << bit;
            }
        }
        let mut mu = BigRational::one();
        for (gi, g) in gens.iter().enumerate() {
            if e >> gi & 1 == 1 {
                mu *= g;
            }
        }
        // independent re-verification at every place in sight
        for c in constraints {
            for v in &places {
                let want = match c.target {
                    SymbolTarget::Split => 1,
                    SymbolTarget::EqualToQ => hilbert_symbol(qa, qb, v),
                };
                if hilbert_symbol(&c.a, &mu, v) != want {
                    return Err(Error::Internal(format!(
                        "solver produced mu = {mu} violating a constraint at {v}"
                    )));
                }
            }
        }
        let cert = Certificate::SymbolAssignment {
            mu: mu.to_string(),
            constraints: constraints.iter().map(|c| obs_constraint(c, qa, qb)).collect(),
        };
        cert.verify()?;
        return Ok(SymbolOutcome::Solution { mu, cert });
    }

    // the F2 contradiction did not pass the soundness filter: scan the small
    // canonical shapes before giving up
    for rows in small_candidates(constraints, &places) {
        if let Some(cert) = try_obstruction(constraints, qa, qb, &grid, &rows) {
            return Ok(SymbolOutcome::Empty(cert));
        }
    }
    Ok(SymbolOutcome::Unknown(
        "linear system unsatisfiable over the generator set, but no sound reciprocity obstruction found".into(),
    ))
}

fn xor_members(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn obs_constraint(c: &Constraint, qa: &BigRational, qb: &BigRational) -> ObsConstraint {
    ObsConstraint {
        a: c.a.to_string(),
        target: target_spec(&c.target, qa, qb),
    }
}

fn target_spec(t: &SymbolTarget, qa: &BigRational, qb: &BigRational) -> TargetSpec {
    match t {
        SymbolTarget::Split => TargetSpec::Split,
        SymbolTarget::EqualToQ => TargetSpec::SameAs {
            qa: qa.to_string(),
            qb: qb.to_string(),
        },
    }
}

/// Build a candidate obstruction from grid cells and keep it only if the
/// certificate verifier (the algebraic soundness check) accepts it.
fn try_obstruction(
    constraints: &[Constraint],
    qa: &BigRational,
    qb: &BigRational,
    grid: &[(usize, PlaceQ)],
    members: &[usize],
) -> Option<Certificate> {
    let rows: Vec<ObsRow> = members
        .iter()
        .map(|&m| {
            let (ci, place) = &grid[m];
            ObsRow {
                a: constraints[*ci].a.to_string(),
                target: target_spec(&constraints[*ci].target, qa, qb),
                place: place.to_string(),
            }
        })
        .collect();
    let cert = Certificate::ReciprocityObstruction { rows };
    cert.verify().ok().map(|_| cert)
}

/// Canonical small obstruction shapes: single cells, and pairs of cells at
/// the same place.
fn small_candidates(constraints: &[Constraint], places: &[PlaceQ]) -> Vec<Vec<usize>> {
    let np = places.len();
    let nc = constraints.len();
    let mut out = Vec::new();
    for cell in 0..nc * np {
        out.push(vec![cell]);
    }
    for c1 in 0..nc {
        for c2 in c1 + 1..nc {
            for (pi, _) in places.iter().enumerate() {
                out.push(vec![c1 * np + pi, c2 * np + pi]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn div_q() -> (BigRational, BigRational) {
        (q(-1), q(-1)) // the rational Hamilton quaternions, division
    }

    #[test]
    fn finds_simple_witness() {
        let (qa, qb) = div_q();
        let out = solve_prescribed_symbols(
            &[Constraint {
                a: q(-1),
                target: SymbolTarget::EqualToQ,
            }],
            &qa,
            &qb,
        )
        .unwrap();
        match out {
            SymbolOutcome::Solution { mu, cert } => {
                cert.verify().unwrap();
                // (−1, mu) ramified exactly at 2 and infinity
                for v in [PlaceQ::Prime(2), PlaceQ::Infinity] {
                    assert_eq!(hilbert_symbol(&q(-1), &mu, &v), -1);
                }
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn joint_constraints() {
        let (qa, qb) = div_q();
        let out = solve_prescribed_symbols(
            &[
                Constraint {
                    a: q(-1),
                    target: SymbolTarget::EqualToQ,
                },
                Constraint {
                    a: q(3),
                    target: SymbolTarget::Split,
                },
            ],
            &qa,
            &qb,
        )
        .unwrap();
        match out {
            SymbolOutcome::Solution { cert, .. } => cert.verify().unwrap(),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn square_coefficient_is_empty() {
        // (1, mu) is split for every mu; demanding it equal a division
        // algebra is impossible
        let (qa, qb) = div_q();
        let out = solve_prescribed_symbols(
            &[Constraint {
                a: q(1),
                target: SymbolTarget::EqualToQ,
            }],
            &qa,
            &qb,
        )
        .unwrap();
        match out {
            SymbolOutcome::Empty(cert) => {
                cert.verify().unwrap();
                let back = Certificate::from_json(&cert.to_json()).unwrap();
                back.verify().unwrap();
            }
            other => panic!("expected emptiness, got {other:?}"),
        }
    }

    #[test]
    fn split_and_equal_conflict_is_empty() {
        // {(a, split), (a, equal-to-Q)} can never both hold
        let (qa, qb) = div_q();
        for a in [q(2), q(-1), q(15)] {
            let out = solve_prescribed_symbols(
                &[
                    Constraint {
                        a: a.clone(),
                        target: SymbolTarget::Split,
                    },
                    Constraint {
                        a,
                        target: SymbolTarget::EqualToQ,
                    },
                ],
                &qa,
                &qb,
            )
            .unwrap();
            match out {
                SymbolOutcome::Empty(cert) => cert.verify().unwrap(),
                other => panic!("expected emptiness, got {other:?}"),
            }
        }
    }

    #[test]
    fn witnesses_agree_with_exhaustive_search() {
        // small instances: compare against brute force over square classes
        // supported on the generator primes below 100
        let (qa, qb) = div_q();
        let gen_primes: Vec<i64> = vec![2, 3, 5, 7];
        let cases: Vec<Vec<Constraint>> = vec![
            vec![Constraint {
                a: q(5),
                target: SymbolTarget::EqualToQ,
            }],
            vec![
                Constraint {
                    a: q(-1),
                    target: SymbolTarget::EqualToQ,
                },
                Constraint {
                    a: q(5),
                    target: SymbolTarget::Split,
                },
            ],
            vec![
                Constraint {
                    a: q(6),
                    target: SymbolTarget::Split,
                },
                Constraint {
                    a: q(-6),
                    target: SymbolTarget::EqualToQ,
                },
            ],
        ];
        for constraints in &cases {
            let out = solve_prescribed_symbols(constraints, &qa, &qb).unwrap();
            let brute = brute_force(constraints, &qa, &qb, &gen_primes);
            match (out, brute) {
                (SymbolOutcome::Solution { .. }, Some(_)) => {}
                (SymbolOutcome::Empty(_), None) => {}
                // the solver's generator set is larger than the brute-force
                // one, so a solution with no small brute witness is fine
                (SymbolOutcome::Solution { .. }, None) => {}
                (got, want) => {
                    panic!("solver {got:?} disagrees with brute force {want:?}")
                }
            }
        }
    }

    fn brute_force(
        constraints: &[Constraint],
        qa: &BigRational,
        qb: &BigRational,
        primes: &[i64],
    ) -> Option<BigRational> {
        let n = primes.len();
        for signs in 0..2u32 {
            for mask in 0..(1u32 << n) {
                let mut mu = if signs == 1 { -q(1) } else { q(1) };
                for (i, &p) in primes.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        mu *= q(p);
                    }
                }
                let ok = constraints.iter().all(|c| {
                    let mut places = ram_places(&c.a, &mu).unwrap();
                    places.extend(ram_places(qa, qb).unwrap());
                    places.sort_unstable();
                    places.dedup();
                    places.iter().all(|v| {
                        let want = match c.target {
                            SymbolTarget::Split => 1,
                            SymbolTarget::EqualToQ => hilbert_symbol(qa, qb, v),
                        };
                        hilbert_symbol(&c.a, &mu, v) == want
                    })
                });
                if ok {
                    return Some(mu);
                }
            }
        }
        None
    }
}
