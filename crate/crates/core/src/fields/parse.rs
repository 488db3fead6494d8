//! Parsers for the CLI grammars.
//!
//! Tower syntax: `Q` or `Q(i)` followed by variable blocks in embedding
//! order, e.g. `Q(i)[a1,a2][r,s,t]`. Scalar syntax: integers, `i`, variable
//! identifiers, and `+ - * / ^ ( )` with the usual precedence.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::base::{BaseElem, BaseKind};
use super::scalar::{FieldTower, Scalar};
use crate::Error;

pub fn parse_tower(s: &str) -> Result<FieldTower, Error> {
    let s = s.trim();
    let (base, mut rest) = if let Some(r) = s.strip_prefix("Q(i)") {
        (BaseKind::GaussianRationals, r)
    } else if let Some(r) = s.strip_prefix("Q") {
        (BaseKind::Rationals, r)
    } else {
        return Err(Error::Parse(format!(
            "tower must start with Q or Q(i): {s:?}"
        )));
    };
    let mut vars: Vec<String> = Vec::new();
    while !rest.is_empty() {
        let r = rest.trim_start();
        if r.is_empty() {
            break;
        }
        if !r.starts_with('[') {
            return Err(Error::Parse(format!(
                "expected '[' in tower at {:?}",
                r
            )));
        }
        let close = r
            .find(']')
            .ok_or_else(|| Error::Parse(format!("unclosed '[' in tower {s:?}")))?;
        for name in r[1..close].split(',') {
            let name = name.trim();
            if name.is_empty() {
                return Err(Error::Parse("empty variable name in tower".into()));
            }
            if name == "i" {
                return Err(Error::Parse("variable name 'i' is reserved".into()));
            }
            if !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
                || !name.chars().next().unwrap().is_ascii_alphabetic()
            {
                return Err(Error::Parse(format!("bad variable name {name:?}")));
            }
            if vars.iter().any(|v| v == name) {
                return Err(Error::Parse(format!("duplicate variable {name:?}")));
            }
            vars.push(name.to_string());
        }
        rest = &r[close + 1..];
    }
    let refs: Vec<&str> = vars.iter().map(|v| v.as_str()).collect();
    Ok(FieldTower::new(base, &refs))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    ImagUnit,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        let tok = match c {
            '+' => {
                pos += 1;
                Tok::Plus
            }
            '-' | '−' => {
                pos += 1;
                Tok::Minus
            }
            '*' => {
                pos += 1;
                Tok::Star
            }
            '/' => {
                pos += 1;
                Tok::Slash
            }
            '^' => {
                pos += 1;
                Tok::Caret
            }
            '(' => {
                pos += 1;
                Tok::LParen
            }
            ')' => {
                pos += 1;
                Tok::RParen
            }
            '0'..='9' => {
                let mut num = String::new();
                while pos < chars.len() && chars[pos].is_ascii_digit() {
                    num.push(chars[pos]);
                    pos += 1;
                }
                Tok::Int(num.parse().unwrap())
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut id = String::new();
                while pos < chars.len()
                    && (chars[pos].is_ascii_alphanumeric() || chars[pos] == '_')
                {
                    id.push(chars[pos]);
                    pos += 1;
                }
                if id == "i" {
                    Tok::ImagUnit
                } else {
                    Tok::Ident(id)
                }
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character {other:?} at position {pos}"
                )))
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    tower: &'a FieldTower,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> Error {
        let at = self
            .toks
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(usize::MAX);
        if at == usize::MAX {
            Error::Parse(format!("{msg} at end of input"))
        } else {
            Error::Parse(format!("{msg} at position {at}"))
        }
    }

    fn expr(&mut self) -> Result<Scalar, Error> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.next();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, Error> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.next();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Scalar, Error> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                Ok(self.factor()?.neg())
            }
            Some(Tok::Plus) => {
                self.next();
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Scalar, Error> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.next();
            match self.next() {
                Some(Tok::Int(n)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent out of range".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(self.err("expected integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Scalar, Error> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(Scalar::from_base(
                self.tower,
                BaseElem::from_rational(BigRational::from_integer(n)),
            )),
            Some(Tok::ImagUnit) => {
                if self.tower.base != BaseKind::GaussianRationals {
                    return Err(Error::Parse(
                        "the imaginary unit needs base Q(i)".into(),
                    ));
                }
                Ok(Scalar::i(self.tower))
            }
            Some(Tok::Ident(name)) => {
                if self.tower.var_index(&name).is_none() {
                    return Err(Error::Parse(format!(
                        "unknown variable {name:?} in tower {}",
                        self.tower
                    )));
                }
                Ok(Scalar::var(self.tower, &name))
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(self.err("expected ')'")),
                }
            }
            _ => Err(self.err("expected a value")),
        }
    }
}

pub fn parse_scalar(tower: &FieldTower, s: &str) -> Result<Scalar, Error> {
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks,
        pos: 0,
        tower,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn towers_round_trip() {
        for s in ["Q", "Q(i)", "Q[a1,a2]", "Q(i)[a1,a2][r,s,t]"] {
            let t = parse_tower(s).unwrap();
            assert_eq!(parse_tower(&t.to_string()).unwrap(), t);
        }
        assert!(parse_tower("R[x]").is_err());
        assert!(parse_tower("Q[a,a]").is_err());
        assert!(parse_tower("Q[i]").is_err());
    }

    #[test]
    fn scalars_parse_and_round_trip() {
        let t = parse_tower("Q(i)[a1,a2]").unwrap();
        let x = parse_scalar(&t, "a1*((1-a1)^2*(1+a2)^2 - 4*(1-a1)*a2)").unwrap();
        let y = parse_scalar(&t, "a1*(1-a1)*((1-a2)^2 - a1*(1+a2)^2)").unwrap();
        assert_eq!(x, y); // factored form of the same polynomial
        let back = parse_scalar(&t, &x.to_string()).unwrap();
        assert_eq!(back, x);
        let z = parse_scalar(&t, "(2+3*i)/(a1-i)").unwrap();
        let back = parse_scalar(&t, &z.to_string()).unwrap();
        assert_eq!(back, z);
        assert!(parse_scalar(&t, "1/0").is_err());
        assert!(parse_scalar(&t, "zz").is_err());
    }
}
