//! Rational functions over a field tower: the `Scalar` type.
//!
//! A tower is a base field (Q or Q(i)) plus an ordered list of indeterminates;
//! the order fixes the iterated-Laurent embedding used by the residue
//! machinery (last variable = outermost valuation). Scalars are reduced
//! fractions of sparse polynomials with a monic denominator, so equality is
//! syntactic.

use std::fmt;

use super::base::{base_square_class, BaseClass, BaseElem, BaseKind};
use super::poly::Poly;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldTower {
    pub base: BaseKind,
    pub vars: Vec<String>,
}

impl FieldTower {
    pub fn new(base: BaseKind, vars: &[&str]) -> Self {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let mut seen = std::collections::HashSet::new();
        for v in &vars {
            assert!(!v.is_empty(), "empty variable name");
            assert!(seen.insert(v.clone()), "duplicate variable name {v}");
        }
        FieldTower { base, vars }
    }

    pub fn rationals() -> Self {
        FieldTower::new(BaseKind::Rationals, &[])
    }

    pub fn gaussian() -> Self {
        FieldTower::new(BaseKind::GaussianRationals, &[])
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Tower with variable `idx` removed (residue tower).
    pub fn without_var(&self, idx: usize) -> FieldTower {
        let mut vars = self.vars.clone();
        vars.remove(idx);
        FieldTower {
            base: self.base,
            vars,
        }
    }

    /// Tower extended by fresh variables at the end (outermost).
    pub fn with_vars(&self, extra: &[&str]) -> FieldTower {
        let mut vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        vars.extend_from_slice(extra);
        FieldTower::new(self.base, &vars)
    }
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        if !self.vars.is_empty() {
            write!(f, "[{}]", self.vars.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    pub tower: FieldTower,
    pub num: Poly,
    pub den: Poly,
}

impl Scalar {
    pub fn reduced(tower: FieldTower, num: Poly, den: Poly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if tower.base == BaseKind::Rationals {
            let imag = num
                .terms
                .values()
                .chain(den.terms.values())
                .any(|c| !c.is_real());
            if imag {
                return Err(Error::Parse("imaginary coefficient over base Q".into()));
            }
        }
        if num.is_zero() {
            return Ok(Scalar {
                num: Poly::zero(tower.nvars()),
                den: Poly::one(tower.nvars()),
                tower,
            });
        }
        let g = Poly::gcd(&num, &den);
        let mut num = num.exact_div(&g).unwrap();
        let mut den = den.exact_div(&g).unwrap();
        // normalize: monic denominator
        let lc = den.leading_coeff();
        let inv = lc.inv().unwrap();
        num = num.scale(&inv);
        den = den.scale(&inv);
        Ok(Scalar { tower, num, den })
    }

    pub fn zero(tower: &FieldTower) -> Self {
        Scalar {
            num: Poly::zero(tower.nvars()),
            den: Poly::one(tower.nvars()),
            tower: tower.clone(),
        }
    }

    pub fn one(tower: &FieldTower) -> Self {
        Scalar::from_int(tower, 1)
    }

    pub fn from_int(tower: &FieldTower, n: i64) -> Self {
        Scalar {
            num: Poly::constant(tower.nvars(), BaseElem::from_i64(n)),
            den: Poly::one(tower.nvars()),
            tower: tower.clone(),
        }
    }

    pub fn from_base(tower: &FieldTower, c: BaseElem) -> Self {
        Scalar {
            num: Poly::constant(tower.nvars(), c),
            den: Poly::one(tower.nvars()),
            tower: tower.clone(),
        }
    }

    /// The imaginary unit; only valid over Q(i).
    pub fn i(tower: &FieldTower) -> Self {
        assert_eq!(tower.base, BaseKind::GaussianRationals);
        Scalar::from_base(tower, BaseElem::i())
    }

    pub fn var(tower: &FieldTower, name: &str) -> Self {
        let idx = tower
            .var_index(name)
            .unwrap_or_else(|| panic!("unknown variable {name} in tower {tower}"));
        Scalar {
            num: Poly::var(tower.nvars(), idx),
            den: Poly::one(tower.nvars()),
            tower: tower.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Constant value when the scalar is base-field valued.
    pub fn constant_value(&self) -> Option<BaseElem> {
        if self.is_constant() {
            self.num
                .constant_value()
                .div(&self.den.constant_value())
        } else {
            None
        }
    }

    fn same_tower(&self, o: &Scalar) {
        assert_eq!(
            self.tower, o.tower,
            "scalar arithmetic across different towers"
        );
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        self.same_tower(o);
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        let den = self.den.mul(&o.den);
        Scalar::reduced(self.tower.clone(), num, den).unwrap()
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            tower: self.tower.clone(),
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        self.same_tower(o);
        Scalar::reduced(
            self.tower.clone(),
            self.num.mul(&o.num),
            self.den.mul(&o.den),
        )
        .unwrap()
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, Error> {
        self.same_tower(o);
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Scalar::reduced(
            self.tower.clone(),
            self.num.mul(&o.den),
            self.den.mul(&o.num),
        )
    }

    pub fn inv(&self) -> Result<Scalar, Error> {
        Scalar::one(&self.tower).div(self)
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one(&self.tower);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale_int(&self, n: i64) -> Scalar {
        self.mul(&Scalar::from_int(&self.tower, n))
    }

    /// Exact square root in the tower, if the scalar is a square.
    pub fn sqrt(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(self.clone());
        }
        // x = n/d = (n*d)/d^2, so x is a square iff n*d is
        let prod = self.num.mul(&self.den);
        let s = prod.sqrt(self.tower.base)?;
        Some(
            Scalar::reduced(self.tower.clone(), s, self.den.clone())
                .expect("nonzero denominator"),
        )
    }

    pub fn is_square(&self) -> bool {
        !self.is_zero() && self.sqrt().is_some()
    }

    /// Square class: canonical odd-multiplicity polynomial part plus the
    /// base-unit class of what remains (which is a perfect square times that
    /// unit).
    pub fn square_class(&self) -> Result<SquareClassSupport, Error> {
        if self.is_zero() {
            return Err(Error::ZeroInput("square class of zero".into()));
        }
        let prod = self.num.mul(&self.den);
        let odd = prod.odd_part();
        let even = prod.exact_div(&odd).expect("odd part divides");
        // even = c * g^2 with g monic, so c is the leading coefficient
        let c = even.leading_coeff();
        let g2 = even.scale(&c.inv().unwrap());
        debug_assert!(
            g2.sqrt(self.tower.base).is_some(),
            "even part must be a square after removing the odd part"
        );
        Ok(SquareClassSupport {
            tower: self.tower.clone(),
            poly: odd,
            base: base_square_class(&c, self.tower.base)?,
        })
    }

    /// Do two nonzero scalars lie in the same square class?
    pub fn same_square_class(&self, o: &Scalar) -> bool {
        self.same_tower(o);
        self.mul(o).is_square()
    }

    /// Canonical square-class representative: odd polynomial part times a
    /// small base representative. Multiplying by squares never changes it.
    pub fn square_class_rep(&self) -> Result<Scalar, Error> {
        let sc = self.square_class()?;
        Ok(sc.representative())
    }

    /// The automorphism of the tower sending the given variable to its
    /// negative and fixing everything else.
    pub fn negate_var(&self, idx: usize) -> Scalar {
        assert!(idx < self.tower.nvars());
        Scalar::reduced(
            self.tower.clone(),
            self.num.negate_var(idx),
            self.den.negate_var(idx),
        )
        .expect("negating a variable preserves nonzero denominators")
    }

    /// Substitute var := 0, staying over the same tower. Errors when the
    /// denominator vanishes there.
    pub fn subst_zero(&self, idx: usize) -> Result<Scalar, Error> {
        assert!(idx < self.tower.nvars());
        let zero = BaseElem::zero();
        let num = self.num.subst_const(idx, &zero);
        let den = self.den.subst_const(idx, &zero);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Scalar::reduced(self.tower.clone(), num, den)
    }

    /// Valuation and residue at a tame place of the tower.
    ///
    /// For a `VarAdic` place the valuation is the lowest exponent of the
    /// variable; for a linear place `var - root` the valuation counts exact
    /// divisions by the uniformizer. The residue lives over the tower with
    /// that variable removed.
    pub fn tame_residue(&self, place: &TamePlace) -> Result<(i64, Scalar), Error> {
        if self.is_zero() {
            return Err(Error::ZeroInput("residue of zero".into()));
        }
        let (vn, rn) = poly_residue(&self.num, place, &self.tower);
        let (vd, rd) = poly_residue(&self.den, place, &self.tower);
        let tower = self.tower.without_var(place.var());
        let res = Scalar::reduced(tower, rn, rd)?;
        Ok((vn - vd, res))
    }

    pub fn display(&self) -> ScalarDisplay<'_> {
        ScalarDisplay(self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

pub struct ScalarDisplay<'a>(&'a Scalar);

impl fmt::Display for ScalarDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.0;
        let names = &s.tower.vars;
        if s.den.is_one() {
            if s.num.terms.len() <= 1 {
                write!(f, "{}", s.num.display_with(names))
            } else {
                write!(f, "({})", s.num.display_with(names))
            }
        } else {
            write!(
                f,
                "(({})/({}))",
                s.num.display_with(names),
                s.den.display_with(names)
            )
        }
    }
}

/// Canonical square-class support of a scalar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareClassSupport {
    pub tower: FieldTower,
    /// Monic square-free polynomial carrying the odd-multiplicity factors.
    pub poly: Poly,
    /// Square class of the residual base-field constant.
    pub base: BaseClass,
}

impl SquareClassSupport {
    pub fn is_trivial(&self) -> bool {
        self.poly.is_one() && self.base.is_trivial()
    }

    /// A small scalar representing the class.
    pub fn representative(&self) -> Scalar {
        let base_rep: BaseElem = match &self.base {
            BaseClass::Rat { neg, primes } => {
                let mut v = num_rational::BigRational::from_integer(1.into());
                if *neg {
                    v = -v;
                }
                for p in primes {
                    v *= num_rational::BigRational::from_integer((*p).into());
                }
                BaseElem::from_rational(v)
            }
            BaseClass::Gauss { unit_i, primes } => {
                let mut v = if *unit_i {
                    BaseElem::i()
                } else {
                    BaseElem::one()
                };
                for (re, im) in primes {
                    let p = BaseElem {
                        re: num_rational::BigRational::from_integer((*re).into()),
                        im: num_rational::BigRational::from_integer((*im).into()),
                    };
                    v = v.mul(&p);
                }
                v
            }
        };
        Scalar {
            tower: self.tower.clone(),
            num: self.poly.scale(&base_rep),
            den: Poly::one(self.tower.nvars()),
        }
    }

    pub fn mul(&self, other: &SquareClassSupport) -> SquareClassSupport {
        assert_eq!(self.tower, other.tower);
        self.representative()
            .mul(&other.representative())
            .square_class()
            .expect("nonzero")
    }
}

/// A tame place of the tower: the variable-adic valuation, or the valuation
/// at a linear polynomial `var - root` with a base-field root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TamePlace {
    VarAdic(usize),
    Linear { var: usize, root: BaseElem },
}

impl TamePlace {
    pub fn var(&self) -> usize {
        match self {
            TamePlace::VarAdic(v) => *v,
            TamePlace::Linear { var, .. } => *var,
        }
    }
}

fn poly_residue(p: &Poly, place: &TamePlace, _tower: &FieldTower) -> (i64, Poly) {
    debug_assert!(!p.is_zero());
    match place {
        TamePlace::VarAdic(var) => {
            let v = p.terms.keys().map(|m| m[*var]).min().unwrap();
            // divide out var^v, then set var = 0
            let mut shifted = Poly::zero(p.nvars);
            for (m, c) in &p.terms {
                let mut m2 = m.clone();
                m2[*var] -= v;
                shifted.terms.insert(m2, c.clone());
            }
            let res = shifted.subst_const(*var, &BaseElem::zero());
            (v as i64, res.drop_var(*var))
        }
        TamePlace::Linear { var, root } => {
            let pi = Poly::var(p.nvars, *var).sub(&Poly::constant(p.nvars, root.clone()));
            let mut v = 0i64;
            let mut cur = p.clone();
            while let Some(q) = cur.exact_div(&pi) {
                cur = q;
                v += 1;
            }
            let res = cur.subst_const(*var, root);
            debug_assert!(!res.is_zero());
            (v, res.drop_var(*var))
        }
    }
}
