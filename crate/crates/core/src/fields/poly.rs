//! Sparse multivariate polynomials over the base field.
//!
//! Monomials are exponent vectors aligned with the tower's variable list and
//! ordered lexicographically (first variable most significant), so the term
//! map is canonical and equality is syntactic. All algorithms are exact:
//! division either succeeds exactly or reports failure, GCDs run a primitive
//! pseudo-remainder sequence recursing on the main variable, and square roots
//! are extracted coefficient by coefficient with an exactness check at every
//! step.

use std::collections::BTreeMap;
use std::fmt;

use super::base::{BaseElem, BaseKind};

pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    pub nvars: usize,
    /// monomial -> nonzero coefficient
    pub terms: BTreeMap<Monomial, BaseElem>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BaseElem) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        Poly { nvars, terms }
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, BaseElem::one())
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        assert!(idx < nvars);
        let mut mono = vec![0; nvars];
        mono[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(mono, BaseElem::one());
        Poly { nvars, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value().is_one()
    }

    /// The constant coefficient viewed as a base element (0 if absent).
    pub fn constant_value(&self) -> BaseElem {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(BaseElem::zero)
    }

    fn insert_term(terms: &mut BTreeMap<Monomial, BaseElem>, m: Monomial, c: BaseElem) {
        if c.is_zero() {
            return;
        }
        match terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars);
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            Self::insert_term(&mut terms, m.clone(), c.clone());
        }
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BaseElem) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars);
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Monomial = m1.iter().zip(m2.iter()).map(|(a, b)| a + b).collect();
                Self::insert_term(&mut terms, m, c1.mul(c2));
            }
        }
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading (lex-largest) term.
    pub fn leading(&self) -> Option<(&Monomial, &BaseElem)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BaseElem {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BaseElem::zero)
    }

    /// Divide every coefficient by the lex-leading coefficient.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coeff();
        let inv = lc.inv().expect("nonzero leading coefficient");
        self.scale(&inv)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Highest-index variable occurring with positive degree.
    pub fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.degree_in(v) > 0)
    }

    /// View as a univariate polynomial in `var`, coefficients with `var`
    /// zeroed out.
    pub fn as_univariate(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m[var];
            let mut m2 = m.clone();
            m2[var] = 0;
            let entry = out.entry(e).or_insert_with(|| Poly::zero(self.nvars));
            Self::insert_term(&mut entry.terms, m2, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn from_univariate(nvars: usize, var: usize, coeffs: &BTreeMap<u32, Poly>) -> Poly {
        let mut terms = BTreeMap::new();
        for (e, p) in coeffs {
            for (m, c) in &p.terms {
                debug_assert_eq!(m[var], 0);
                let mut m2 = m.clone();
                m2[var] = *e;
                Self::insert_term(&mut terms, m2, c.clone());
            }
        }
        Poly { nvars, terms }
    }

    /// Coefficient of `var^e` (with `var` zeroed out of the monomials).
    pub fn coeff_of(&self, var: usize, e: u32) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m[var] == e {
                let mut m2 = m.clone();
                m2[var] = 0;
                Self::insert_term(&mut out.terms, m2, c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[var] == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2[var] -= 1;
            let factor = BaseElem::from_i64(m[var] as i64);
            Self::insert_term(&mut terms, m2, c.mul(&factor));
        }
        Poly {
            nvars: self.nvars,
            terms,
        }
    }

    /// Substitute a base-field constant for `var`.
    /// Substitute var -> -var (each term picks up (-1)^exponent).
    pub fn negate_var(&self, var: usize) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = if m[var] % 2 == 1 { c.neg() } else { c.clone() };
                    (m.clone(), c)
                })
                .collect(),
        }
    }

    pub fn subst_const(&self, var: usize, value: &BaseElem) -> Poly {
        let uni = self.as_univariate(var);
        let mut acc = Poly::zero(self.nvars);
        let mut pw = BaseElem::one();
        let mut last = 0u32;
        for (e, p) in uni {
            for _ in last..e {
                pw = pw.mul(value);
            }
            last = e;
            acc = acc.add(&p.scale(&pw));
        }
        acc
    }

    /// Substitute another polynomial for `var`.
    pub fn subst_poly(&self, var: usize, value: &Poly) -> Poly {
        assert_eq!(self.nvars, value.nvars);
        let uni = self.as_univariate(var);
        let mut acc = Poly::zero(self.nvars);
        for (e, p) in uni {
            acc = acc.add(&p.mul(&value.pow(e)));
        }
        acc
    }

    /// Drop a variable that no longer occurs (tower shrink); panics if used.
    pub fn drop_var(&self, var: usize) -> Poly {
        assert_eq!(self.degree_in(var), 0, "dropping a live variable");
        Poly {
            nvars: self.nvars - 1,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = m.clone();
                    m2.remove(var);
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// Insert a fresh variable slot at position `var` (exponent 0 everywhere).
    pub fn insert_var(&self, var: usize) -> Poly {
        Poly {
            nvars: self.nvars + 1,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m2 = m.clone();
                    m2.insert(var, 0);
                    (m2, c.clone())
                })
                .collect(),
        }
    }

    /// Exact division: returns Some(q) iff self = q * d exactly.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        assert_eq!(self.nvars, d.nvars);
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut rem = self.clone();
        let mut q = Poly::zero(self.nvars);
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        let dc_inv = dc.inv().unwrap();
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            // monomial divisibility
            if rm.iter().zip(dm.iter()).any(|(a, b)| a < b) {
                return None;
            }
            let qm: Monomial = rm.iter().zip(dm.iter()).map(|(a, b)| a - b).collect();
            let qc = rc.mul(&dc_inv);
            let mut qt = BTreeMap::new();
            qt.insert(qm, qc);
            let qterm = Poly {
                nvars: self.nvars,
                terms: qt,
            };
            rem = rem.sub(&qterm.mul(d));
            q = q.add(&qterm);
        }
        Some(q)
    }

    /// Pseudo-remainder of self by d with respect to `var`:
    /// lc(d)^(deg f - deg d + 1) * f = q*d + r with deg_var r < deg_var d.
    fn pseudo_rem(&self, d: &Poly, var: usize) -> Poly {
        let dd = d.degree_in(var);
        let lc_d = d.coeff_of(var, dd);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= dd {
            let dr = r.degree_in(var);
            let lc_r = r.coeff_of(var, dr);
            // r := lc_d * r - lc_r * x^(dr-dd) * d
            let shift = Poly::var(self.nvars, var).pow(dr - dd);
            r = r.mul(&lc_d).sub(&lc_r.mul(&shift).mul(d));
            debug_assert!(r.is_zero() || r.degree_in(var) < dr);
        }
        r
    }

    /// Content with respect to `var`: gcd of the univariate coefficients.
    fn content_wrt(&self, var: usize) -> Poly {
        let uni = self.as_univariate(var);
        let mut acc = Poly::zero(self.nvars);
        for p in uni.values() {
            acc = Poly::gcd(&acc, p);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    /// GCD, monic-normalized. Recursive primitive PRS on the main variable.
    pub fn gcd(f: &Poly, g: &Poly) -> Poly {
        if f.is_zero() {
            return g.monic();
        }
        if g.is_zero() {
            return f.monic();
        }
        if f.is_constant() || g.is_constant() {
            return Poly::one(f.nvars);
        }
        let mv = f.main_var().unwrap().max(g.main_var().unwrap());
        if f.degree_in(mv) == 0 {
            return Poly::gcd(f, &g.content_wrt(mv));
        }
        if g.degree_in(mv) == 0 {
            return Poly::gcd(&f.content_wrt(mv), g);
        }
        let cf = f.content_wrt(mv);
        let cg = g.content_wrt(mv);
        let c = Poly::gcd(&cf, &cg);
        let mut a = f.exact_div(&cf).unwrap();
        let mut b = g.exact_div(&cg).unwrap();
        if a.degree_in(mv) < b.degree_in(mv) {
            std::mem::swap(&mut a, &mut b);
        }
        loop {
            let r = a.pseudo_rem(&b, mv);
            if r.is_zero() {
                break;
            }
            if r.degree_in(mv) == 0 {
                return c.monic();
            }
            let rc = r.content_wrt(mv);
            let r = r.exact_div(&rc).unwrap();
            a = b;
            b = r;
        }
        let cb = b.content_wrt(mv);
        let b = b.exact_div(&cb).unwrap();
        c.mul(&b).monic()
    }

    /// Exact polynomial square root, recursing on the main variable.
    pub fn sqrt(&self, kind: BaseKind) -> Option<Poly> {
        if self.is_zero() {
            return Some(self.clone());
        }
        match self.main_var() {
            None => {
                let c = self.constant_value();
                c.sqrt(kind)
                    .map(|s| Poly::constant(self.nvars, s))
            }
            Some(var) => {
                let d = self.degree_in(var);
                if d % 2 != 0 {
                    return None;
                }
                let half = d / 2;
                let lc = self.coeff_of(var, d);
                let slc = lc.sqrt(kind)?;
                // g = slc * x^half + lower terms, solved greedily:
                // each step cancels the current leading x-term of f - g^2
                // by dividing exactly by 2*slc*x^half.
                let two_slc = slc.scale(&BaseElem::from_i64(2));
                let mut g_coeffs: BTreeMap<u32, Poly> = BTreeMap::new();
                g_coeffs.insert(half, slc);
                loop {
                    let g = Poly::from_univariate(self.nvars, var, &g_coeffs);
                    let r = self.sub(&g.mul(&g));
                    if r.is_zero() {
                        return Some(g);
                    }
                    let dr = r.degree_in(var);
                    if dr < half {
                        return None;
                    }
                    let cr = r.coeff_of(var, dr);
                    let next = cr.exact_div(&two_slc)?;
                    let e = dr - half;
                    if e >= half {
                        // would collide with or exceed the leading term
                        return None;
                    }
                    if g_coeffs.contains_key(&e) {
                        return None;
                    }
                    g_coeffs.insert(e, next);
                }
            }
        }
    }

    /// Radical: product of the distinct irreducible factors, monic.
    pub fn radical(&self) -> Poly {
        assert!(!self.is_zero());
        match self.main_var() {
            None => Poly::one(self.nvars),
            Some(var) => {
                let cont = self.content_wrt(var);
                let pp = self.exact_div(&cont).unwrap();
                let der = pp.derivative(var);
                let g = Poly::gcd(&pp, &der);
                let rad_pp = pp.exact_div(&g).unwrap();
                cont.radical().mul(&rad_pp).monic()
            }
        }
    }

    /// Product of the irreducible factors of odd multiplicity, monic.
    /// This is the square-free part that determines the square class.
    pub fn odd_part(&self) -> Poly {
        assert!(!self.is_zero());
        if self.main_var().is_none() {
            return Poly::one(self.nvars);
        }
        let r = self.radical();
        let q = self.exact_div(&r).unwrap();
        if q.main_var().is_none() {
            return r;
        }
        // factors of even multiplicity in self = factors of odd multiplicity
        // in self/radical; they divide the radical
        let even = q.odd_part();
        let g = Poly::gcd(&r, &even);
        r.exact_div(&g).unwrap().monic()
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest term first for readability
        for (m, c) in self.poly.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let is_const_mono = m.iter().all(|&e| e == 0);
            if is_const_mono {
                write!(f, "{c}")?;
            } else {
                if !c.is_one() {
                    write!(f, "{c}*")?;
                }
                let mut firstv = true;
                for (v, &e) in m.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if !firstv {
                        write!(f, "*")?;
                    }
                    firstv = false;
                    if e == 1 {
                        write!(f, "{}", self.names[v])?;
                    } else {
                        write!(f, "{}^{}", self.names[v], e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_vars(n: usize) -> Vec<Poly> {
        (0..n).map(|i| Poly::var(n, i)).collect()
    }

    #[test]
    fn arithmetic_and_exact_division() {
        let v = p_vars(2);
        let (x, y) = (&v[0], &v[1]);
        let f = x.add(y).mul(&x.sub(y)); // x^2 - y^2
        let g = x.mul(x).sub(&y.mul(y));
        assert_eq!(f, g);
        let q = f.exact_div(&x.add(y)).unwrap();
        assert_eq!(q, x.sub(y));
        assert!(f.exact_div(&x.add(&Poly::one(2))).is_none());
    }

    #[test]
    fn gcd_multivariate() {
        let v = p_vars(3);
        let (x, y, z) = (&v[0], &v[1], &v[2]);
        let common = x.add(y).mul(z);
        let f = common.mul(&x.sub(z));
        let g = common.mul(&y.add(&Poly::one(3)));
        let d = Poly::gcd(&f, &g);
        // gcd should be (x+y)*z up to normalization
        assert!(f.exact_div(&d).is_some());
        assert!(g.exact_div(&d).is_some());
        assert_eq!(d.total_degree(), 2);
    }

    #[test]
    fn sqrt_multivariate() {
        let v = p_vars(2);
        let (x, y) = (&v[0], &v[1]);
        let g = x
            .mul(x)
            .add(&x.mul(y).scale(&BaseElem::from_i64(3)))
            .add(&Poly::one(2));
        let f = g.mul(&g);
        let s = f.sqrt(BaseKind::Rationals).unwrap();
        assert!(s == g || s == g.neg());
        assert!(f.add(&Poly::one(2)).sqrt(BaseKind::Rationals).is_none());
        assert!(x.mul(x).mul(y).sqrt(BaseKind::Rationals).is_none());
    }

    #[test]
    fn odd_part_is_square_class_support() {
        let v = p_vars(2);
        let (x, y) = (&v[0], &v[1]);
        // x^2 * y -> y
        let f = x.mul(x).mul(y);
        assert_eq!(f.odd_part(), y.clone());
        // x^3 * (x+y)^2 -> x
        let f = x.pow(3).mul(&x.add(y).pow(2));
        assert_eq!(f.odd_part(), x.clone());
        // (x+y)^3 * y^2 * x -> (x+y)*x
        let f = x.add(y).pow(3).mul(&y.pow(2)).mul(x);
        assert_eq!(f.odd_part(), x.add(y).mul(x).monic());
    }
}
